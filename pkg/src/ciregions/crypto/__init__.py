"""Secure-sampling application: OT sources, rate bounds and the bit-OT oracle."""

from .bitot import (
    SupOracleResult,
    bit_ot_pair_min_sum_zero,
    bit_ot_sup_oracle,
    channel_objective,
    class_channel,
    closed_form_objective,
)
from .bounds import (
    EfficiencyBound,
    TargetConstraint,
    aci_efficiency_bound,
    axis_intercepts,
    bit_ot_pair_constraints,
    bit_ot_pair_intercepts,
    register_intercepts,
    string_ot_pair,
    string_ot_source_points,
    ww_bound,
)
from .monotone import MonotoneReport, monotone_step_checks
from .ot import make_bit_ot, make_bit_ot_pair, make_string_ot_pair, paper_channel

__all__ = [
    "EfficiencyBound",
    "MonotoneReport",
    "SupOracleResult",
    "TargetConstraint",
    "aci_efficiency_bound",
    "axis_intercepts",
    "bit_ot_pair_constraints",
    "bit_ot_pair_intercepts",
    "bit_ot_pair_min_sum_zero",
    "bit_ot_sup_oracle",
    "channel_objective",
    "class_channel",
    "closed_form_objective",
    "make_bit_ot",
    "make_bit_ot_pair",
    "make_string_ot_pair",
    "monotone_step_checks",
    "paper_channel",
    "register_intercepts",
    "string_ot_pair",
    "string_ot_source_points",
    "ww_bound",
]
