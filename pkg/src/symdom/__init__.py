"""Numerical geometry of classical bounded symmetric domains."""

from .domains import DomainError, DomainSpec, TangentVector, boundary_distance, contains, generic_norm
from .metrics import bergman_metric, curvature, holomorphic_sectional_curvature, ke_metric
from .normal_forms import h_eta, normal_form, v_space, w_space
from .automorphisms import transvection
from .curves import CurveSpec, profile
from .rescaling import rescale_sequence
from .kobayashi import boundary_bound_check, frame_norm_bound_check

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "DomainSpec",
    "TangentVector",
    "boundary_distance",
    "contains",
    "generic_norm",
    "ke_metric",
    "bergman_metric",
    "curvature",
    "holomorphic_sectional_curvature",
    "normal_form",
    "h_eta",
    "w_space",
    "v_space",
    "transvection",
    "CurveSpec",
    "profile",
    "rescale_sequence",
    "boundary_bound_check",
    "frame_norm_bound_check",
]
