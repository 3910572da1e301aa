"""Assisted residual information and Gray-Wyner rate regions of discrete pairs."""

from .channel import (
    AuxChannel,
    OptimizerConfig,
    RateTriple,
    Weights3,
    aci_coordinates,
    coordinates,
    gw_coordinates,
)
from .common import (
    ScalarReport,
    corner_rate_1,
    corner_rate_2,
    g_rates,
    gk_common_information,
    gk_decomposition,
    min_sum_rate_zero_residual,
    residual_info_zero,
    wyner_common_information,
)
from .errors import CIRegionsError
from .optimize import penalized_search, scalarized_search
from .pmf import (
    Alphabet,
    JointPMF,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    independent_join,
    load_pmf,
    mutual_information,
    pmf_from_json,
    validate_joint,
)
from .regions import RegionApprox, affine_map_f, lgw_membership, point_in_region_inner, trace_region

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "AuxChannel",
    "CIRegionsError",
    "JointPMF",
    "OptimizerConfig",
    "RateTriple",
    "RegionApprox",
    "ScalarReport",
    "Weights3",
    "aci_coordinates",
    "affine_map_f",
    "conditional_entropy",
    "conditional_mutual_information",
    "coordinates",
    "corner_rate_1",
    "corner_rate_2",
    "entropy",
    "g_rates",
    "gk_common_information",
    "gk_decomposition",
    "gw_coordinates",
    "independent_join",
    "lgw_membership",
    "load_pmf",
    "min_sum_rate_zero_residual",
    "mutual_information",
    "penalized_search",
    "pmf_from_json",
    "point_in_region_inner",
    "residual_info_zero",
    "scalarized_search",
    "trace_region",
    "validate_joint",
    "wyner_common_information",
]
