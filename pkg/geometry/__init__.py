"""Normed-space geometry: Lp/Linf spaces, sphere sampling, semi-inner products."""

from .sampling import (
    candidate_pool,
    make_rng,
    refine_on_sphere,
    refine_on_spheres,
    sphere_sample,
    sphere_sample_array,
    sphere_vertices,
)
from .sip import (
    DirectionClass,
    EpsilonRangeError,
    SelectorError,
    SipSelector,
    direction_class,
    direction_class_eps,
    relaxed_plus_mask,
    sip_eval,
    sip_is_unique,
)
from .spaces import (
    DerivativePair,
    DescriptorError,
    Functional,
    Space,
    SpaceMismatchError,
    SupportOverflowError,
    Vector,
    ZeroVectorError,
    derivative_arrays,
    dual_attainer,
    dual_attainer_array,
    norm_eval,
    numeric_derivatives,
    one_sided_derivatives,
    support_extremes,
)

__all__ = [
    "DerivativePair",
    "DescriptorError",
    "DirectionClass",
    "EpsilonRangeError",
    "Functional",
    "SelectorError",
    "SipSelector",
    "Space",
    "SpaceMismatchError",
    "SupportOverflowError",
    "Vector",
    "ZeroVectorError",
    "candidate_pool",
    "derivative_arrays",
    "direction_class",
    "direction_class_eps",
    "dual_attainer",
    "dual_attainer_array",
    "make_rng",
    "norm_eval",
    "numeric_derivatives",
    "one_sided_derivatives",
    "refine_on_sphere",
    "refine_on_spheres",
    "relaxed_plus_mask",
    "sip_eval",
    "sip_is_unique",
    "sphere_sample",
    "sphere_sample_array",
    "sphere_vertices",
    "support_extremes",
]
