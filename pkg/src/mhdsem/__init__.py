"""Positivity- and entropy-filtered discontinuous spectral element
solver for the ideal MHD equations, with eight-wave divergence
treatment on structured quadrilateral meshes."""

from .efilter import KERNEL_BACKEND

__version__ = "0.1.0"
__all__ = ["KERNEL_BACKEND", "__version__"]
