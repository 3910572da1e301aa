"""Rate bounds for secure two-party sampling.

Convention: producing ``n_t`` target copies from ``n_s`` source copies
forces ``n_s * R_ACI(source)`` inside ``n_t * R_ACI(target)``. A source point
``p`` and a valid lower inequality ``w . q >= h`` on a face of the target
region therefore give ``n_t / n_s <= (w . p) / h``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channel import ACI, AuxChannel, OptimizerConfig, RateTriple, aci_coordinates
from ..common import EXACT, HEURISTIC_UPPER, ScalarReport, corner_rate_1, corner_rate_2, residual_info_zero
from ..errors import NoPositiveConstraint, ValidationError, ZeroTargetIntercept
from ..pmf import JointPMF
from ..regions import RegionApprox
from .bitot import SupOracleResult, bit_ot_pair_min_sum_zero
from .ot import make_string_ot_pair, paper_channel, reveal_x_channel, reveal_y_channel

FACE_TOL = 1e-9


@dataclass(frozen=True)
class AnalyticIntercepts:
    r10: float
    r20: float
    note: str


# pmf fingerprint -> closed-form corner intercepts
_REGISTRY: dict = {}


def register_intercepts(pmf: JointPMF, r10: float, r20: float, note: str) -> None:
    _REGISTRY[pmf.fingerprint()] = AnalyticIntercepts(float(r10), float(r20), note)


def registered_intercepts(pmf: JointPMF) -> AnalyticIntercepts | None:
    return _REGISTRY.get(pmf.fingerprint())


def string_ot_pair(L: int) -> JointPMF:
    """Builder that also registers the closed-form intercepts (1+L, 1+L)."""
    pmf = make_string_ot_pair(L)
    register_intercepts(
        pmf,
        1 + L,
        1 + L,
        f"string-OT pair L={L}: corner intercepts 1+L, attained by U=Y and U=X",
    )
    return pmf


def axis_intercepts(pmf: JointPMF, config: OptimizerConfig | None = None) -> tuple:
    """(R_1-0, R_2-0, R_RD-0) as ScalarReports.

    R_RD-0 is exact. The corners come from the closed-form registry when the
    pmf is known there, otherwise from the penalized optimizer.
    """
    rd0 = residual_info_zero(pmf)
    known = registered_intercepts(pmf)
    if known is not None:
        return (
            ScalarReport(known.r10, EXACT, note=known.note),
            ScalarReport(known.r20, EXACT, note=known.note),
            rd0,
        )
    return corner_rate_1(pmf, config), corner_rate_2(pmf, config), rd0


@dataclass(frozen=True)
class TargetConstraint:
    """``w . q >= h`` for every q in the target region with q[face] == 0."""

    w: tuple
    h: float
    face: tuple = ()
    source: str = ""

    def __post_init__(self):
        w = tuple(float(v) for v in self.w)
        if len(w) != 3 or min(w) < 0:
            raise ValidationError("constraint weights must be a nonnegative 3-vector")
        face = tuple(sorted(int(i) for i in self.face))
        if any(i not in (0, 1, 2) for i in face):
            raise ValidationError("face indices must be coordinate positions 0..2")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "face", face)
        object.__setattr__(self, "h", float(self.h))

    def applies_to(self, point) -> bool:
        p = tuple(point)
        return all(abs(p[i]) <= FACE_TOL for i in self.face)

    def ratio(self, point) -> float:
        return float(np.dot(self.w, tuple(point))) / self.h

    def to_json(self) -> dict:
        return {"w": list(self.w), "h": self.h, "face": list(self.face), "source": self.source}

    @classmethod
    def from_json(cls, data) -> "TargetConstraint":
        return cls(tuple(data["w"]), float(data["h"]), tuple(data.get("face", ())), data.get("source", ""))


@dataclass(frozen=True)
class EfficiencyBound:
    bound: float
    method: str
    certificates: list = field(default_factory=list)
    certified: bool = True

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "method": self.method,
            "certified": self.certified,
            "certificates": self.certificates,
        }


def _values(x) -> tuple:
    out = []
    for v in x:
        out.append(float(v.value) if isinstance(v, ScalarReport) else float(v))
    return tuple(out)


def ww_bound(source_intercepts, target_intercepts) -> EfficiencyBound:
    """min over the axes of source intercept / target intercept."""
    src, tgt = _values(source_intercepts), _values(target_intercepts)
    if len(src) != 3 or len(tgt) != 3:
        raise ValidationError("intercepts are triples (R_1-0, R_2-0, R_RD-0)")
    if min(tgt) <= 0:
        raise ZeroTargetIntercept(f"target intercepts {tgt} must all be positive")
    ratios = [s / t for s, t in zip(src, tgt)]
    axis = int(np.argmin(ratios))
    certs = [
        {"axis": ACI[i], "source_intercept": s, "target_intercept": t, "ratio": r}
        for i, (s, t, r) in enumerate(zip(src, tgt, ratios))
    ]
    certified = all(not isinstance(v, ScalarReport) or v.certified == EXACT for v in target_intercepts)
    return EfficiencyBound(ratios[axis], "intercept", certs, certified)


def _source_points(source) -> list:
    if isinstance(source, RegionApprox):
        if source.tag != "aci":
            raise ValidationError("efficiency bounds need an ACI region")
        return [(p.label, p.aci.values) for p in source.points]
    out = []
    for item in source:
        if isinstance(item, RateTriple):
            out.append(("point", item.values))
        elif isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], str):
            out.append((item[0], tuple(item[1])))
        else:
            out.append(("point", tuple(item)))
    return out


def aci_efficiency_bound(source, constraints) -> EfficiencyBound:
    """min of (w . p) / h over source points p and applicable target constraints.

    ``source`` is a RegionApprox or a list of ACI points (optionally
    ``(label, point)`` pairs); every point must be achieved by some channel.
    ``constraints`` must be valid for the target region (analytic sources
    only; optimizer minima are not lower bounds).
    """
    constraints = [c for c in constraints if c.h > 0]
    if not constraints:
        raise NoPositiveConstraint("no target constraint with a positive right-hand side")
    best, certs, chosen = np.inf, [], None
    for label, pt in _source_points(source):
        for c in constraints:
            if not c.applies_to(pt):
                continue
            r = c.ratio(pt)
            certs.append({"point": list(pt), "point_label": label, "constraint": c.to_json(), "ratio": r})
            if r < best:
                best, chosen = r, len(certs) - 1
    if chosen is None:
        raise NoPositiveConstraint("no source point lies on the face of any target constraint")
    certs[chosen]["binding"] = True
    return EfficiencyBound(float(best), "region-inclusion", certs, True)


def bit_ot_pair_constraints(oracle: SupOracleResult | None) -> list:
    """Analytic lower inequalities for the ACI region of the bit-OT pair."""
    pair = make_string_ot_pair(1)
    min_sum = bit_ot_pair_min_sum_zero(oracle).value
    rd0 = residual_info_zero(pair).value
    return [
        TargetConstraint((1, 1, 0), min_sum, (2,), "min R1+R2 on R_RD=0 face (bit-OT lemma, additivity)"),
        TargetConstraint((1, 0, 0), min_sum, (1, 2), "R_1 axis, implied by the R_RD=0 min-sum"),
        TargetConstraint((0, 1, 0), min_sum, (0, 2), "R_2 axis, implied by the R_RD=0 min-sum"),
        TargetConstraint((0, 0, 1), rd0, (0, 1), "R_RD-0 = I - C_GK (exact)"),
    ]


def bit_ot_pair_intercepts(oracle: SupOracleResult | None) -> tuple:
    """Certified (R_1-0, R_2-0, R_RD-0) = (2, 2, 2) of the bit-OT pair.

    Lower bound from the min-sum on the R_RD = 0 face, upper bound from the
    channels U = Y and U = X, which achieve (2, 0, 0) and (0, 2, 0).
    """
    pair = make_string_ot_pair(1)
    min_sum = bit_ot_pair_min_sum_zero(oracle).value
    up1 = aci_coordinates(pair, reveal_y_channel(pair))
    up2 = aci_coordinates(pair, reveal_x_channel(pair))
    if abs(up1[0] - min_sum) > FACE_TOL or abs(up2[1] - min_sum) > FACE_TOL:
        raise ValidationError("corner witnesses do not meet the min-sum lower bound")
    note = "lower bound: R_RD=0 min-sum; attained by U=Y / U=X"
    return (
        ScalarReport(up1[0], EXACT, note=note),
        ScalarReport(up2[1], EXACT, note=note),
        residual_info_zero(pair),
    )


def string_ot_source_points(pmf: JointPMF, include_paper_channel: bool = True) -> list:
    """Achieved ACI points of a string-OT pair with their witness channels."""
    channels = [
        ("U=const", AuxChannel.constant(len(pmf))),
        ("U=Y", reveal_y_channel(pmf)),
        ("U=X", reveal_x_channel(pmf)),
    ]
    if include_paper_channel:
        channels.insert(0, ("Q=(C_A,C_B,S_A[C_B],S_B[C_A])", paper_channel(pmf)))
    return [(label, aci_coordinates(pmf, ch).values, ch) for label, ch in channels]


def analytic_source_points(pmf: JointPMF) -> list:
    """Points of any pair pmf from U = constant, U = X, U = Y."""
    channels = [
        ("U=const", AuxChannel.constant(len(pmf))),
        ("U=Y", reveal_y_channel(pmf)),
        ("U=X", reveal_x_channel(pmf)),
    ]
    return [(label, aci_coordinates(pmf, ch).values, ch) for label, ch in channels]


__all__ = [
    "AnalyticIntercepts",
    "EfficiencyBound",
    "HEURISTIC_UPPER",
    "TargetConstraint",
    "aci_efficiency_bound",
    "analytic_source_points",
    "axis_intercepts",
    "bit_ot_pair_constraints",
    "bit_ot_pair_intercepts",
    "register_intercepts",
    "registered_intercepts",
    "string_ot_pair",
    "string_ot_source_points",
    "ww_bound",
]
