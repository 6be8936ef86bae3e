"""Quantum fluid models of degenerate electron gases.

Closures, linear dispersion relations, a nonlinear QHD solver for nanoshells
and quantum wells, and Gaussian variational reduced models.  All quantities
are in Hartree atomic units unless a function says otherwise.
"""
__version__ = "0.1.0"
