"""Spectral analysis of the truncated Hilbert transform on multiple intervals."""

from .geometry import REFERENCE_ENDPOINTS, GapGeometry, GeometryError
from .surface import Surface, SurfaceError
from .theta import ThetaContext, constant_W0, find_kappa_tilde, line_W
from .spectral import Spectral, SpectralError
from .asymptotics import AsymptoticModel, lambda_asymptotic_slope

__version__ = "0.1.0"

__all__ = [
    "REFERENCE_ENDPOINTS",
    "GapGeometry",
    "GeometryError",
    "Surface",
    "SurfaceError",
    "ThetaContext",
    "constant_W0",
    "find_kappa_tilde",
    "line_W",
    "Spectral",
    "SpectralError",
    "AsymptoticModel",
    "lambda_asymptotic_slope",
]
