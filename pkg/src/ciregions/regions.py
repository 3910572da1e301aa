"""Inner approximations of the ACI and Gray-Wyner regions.

A :class:`RegionApprox` stores a cloud of achieved points, each with the
channel that witnesses it, and one scalarization record per weight vector.
The represented set is the increasing hull of the cloud, so membership can
only be certified, never refuted.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from .channel import (
    AuxChannel,
    OptimizerConfig,
    RateTriple,
    Weights3,
    _canonical_tag,
    aci_coordinates,
    gw_coordinates,
    source_entropies,
)
from .errors import TagMismatch, ValidationError
from .optimize import scalarized_search
from .parallel import ordered_map
from .pmf import JointPMF

SLACK = 1e-9
CSV_HEADER = ["tag", "w1", "w2", "w3", "c1", "c2", "c3", "value"]


def affine_map_f(h_x: float, h_y: float, h_xy: float, gw) -> RateTriple:
    """Send a GW triple (R_A, R_B, R_C) to its ACI image."""
    if isinstance(gw, RateTriple) and gw.tag != "gw":
        raise TagMismatch("affine_map_f expects a GW triple")
    ra, rb, rc = tuple(gw)
    vals = (ra + rc - h_x, rb + rc - h_y, ra + rb + rc - h_xy)
    # Triples outside L_GW map to negative coordinates; keep the sign
    # instead of raising so callers can test membership on the image.
    return _unchecked("aci", vals)


def _unchecked(tag: str, vals) -> RateTriple:
    t = object.__new__(RateTriple)
    object.__setattr__(t, "tag", tag)
    object.__setattr__(t, "values", tuple(float(v) for v in vals))
    return t


def lgw_membership(gw, h_x: float, h_y: float, h_xy: float) -> bool:
    """Whether a GW triple satisfies the three cut-set lower bounds."""
    ra, rb, rc = tuple(gw)
    return ra + rc >= h_x - SLACK and rb + rc >= h_y - SLACK and ra + rb + rc >= h_xy - SLACK


@dataclass(frozen=True)
class RegionPoint:
    aci: RateTriple
    gw: RateTriple
    witness: AuxChannel | None = field(default=None, compare=False, repr=False)
    label: str = "search"

    def triple(self, tag: str) -> RateTriple:
        return self.aci if tag == "aci" else self.gw


@dataclass(frozen=True)
class Scalarization:
    weights: Weights3
    value: float
    point_index: int


@dataclass(frozen=True)
class RegionApprox:
    tag: str
    points: tuple
    scalarizations: tuple
    source_entropies: tuple
    scale: float = 1.0

    def cloud(self) -> np.ndarray:
        return np.array([p.triple(self.tag).values for p in self.points]).reshape(-1, 3)

    def witness_point(self, s: Scalarization) -> RateTriple:
        return self.points[s.point_index].triple(self.tag)

    def theorem1_deviation(self) -> float:
        """Max |f(GW) - ACI| over stored points."""
        hx, hy, hxy = self.source_entropies
        dev = 0.0
        for p in self.points:
            img = affine_map_f(hx, hy, hxy, p.gw)
            dev = max(dev, float(np.max(np.abs(img.array() - p.aci.array()))))
        return dev

    def to_csv(self, check_column: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER + (["thm1_dev"] if check_column else []))
        hx, hy, hxy = self.source_entropies
        for s in self.scalarizations:
            pt = self.points[s.point_index]
            row = [self.tag, *(_fmt(v) for v in s.weights.w), *(_fmt(v) for v in pt.triple(self.tag)), _fmt(s.value)]
            if check_column:
                dev = np.max(np.abs(affine_map_f(hx, hy, hxy, pt.gw).array() - pt.aci.array()))
                row.append(_fmt(dev))
            writer.writerow(row)
        return buf.getvalue()

    def to_json(self, pmf: JointPMF | None = None) -> dict:
        points = []
        for p in self.points:
            entry = {"label": p.label, "aci": list(p.aci.values), "gw": list(p.gw.values)}
            if p.witness is not None and pmf is not None:
                entry["witness"] = p.witness.to_json(pmf)
            points.append(entry)
        return {
            "tag": self.tag,
            "scale": self.scale,
            "source_entropies": list(self.source_entropies),
            "points": points,
            "scalarizations": [
                {"w": list(s.weights.w), "value": s.value, "point": s.point_index} for s in self.scalarizations
            ],
        }

    @classmethod
    def from_json(cls, data, pmf: JointPMF | None = None) -> "RegionApprox":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        points = []
        for p in data["points"]:
            witness = AuxChannel.from_json(p["witness"], pmf) if pmf is not None and "witness" in p else None
            points.append(RegionPoint(_unchecked("aci", p["aci"]), _unchecked("gw", p["gw"]), witness, p.get("label", "")))
        scal = tuple(Scalarization(Weights3(tuple(s["w"])), float(s["value"]), int(s["point"])) for s in data["scalarizations"])
        return cls(data["tag"], tuple(points), scal, tuple(data["source_entropies"]), float(data.get("scale", 1.0)))


def _fmt(v) -> str:
    return repr(float(v))


def read_region_csv(text: str) -> list:
    """Rows of a region CSV as dicts with float fields."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {"tag": rec["tag"]}
        for k in CSV_HEADER[1:] + (["thm1_dev"] if "thm1_dev" in rec else []):
            row[k] = float(rec[k])
        rows.append(row)
    return rows


def simplex_weight_grid(resolution: int = 8) -> list:
    """All nonnegative weight vectors with coordinates in multiples of 1/resolution."""
    out = []
    for i, j in product(range(resolution + 1), repeat=2):
        k = resolution - i - j
        if k >= 0:
            out.append(Weights3((i, j, k)))
    return out


def _point(pmf: JointPMF, channel: AuxChannel, label: str) -> RegionPoint:
    return RegionPoint(aci_coordinates(pmf, channel), gw_coordinates(pmf, channel), channel, label)


def _scalarize(tag: str, points, weights) -> tuple:
    cloud = np.array([p.triple(tag).values for p in points])
    sums = cloud.sum(axis=1)
    records = []
    for w in weights:
        vals = cloud @ w.array()
        best = float(vals.min())
        # Ties within SLACK go to the smallest coordinate sum, then first stored.
        tied = np.flatnonzero(vals <= best + SLACK)
        i = int(tied[np.argmin(sums[tied])])
        records.append(Scalarization(w, float(vals[i]), i))
    return tuple(records)


def trace_region(
    pmf: JointPMF,
    tag: str = "aci",
    weights=None,
    config: OptimizerConfig | None = None,
    extra_channels=(),
    search: bool = True,
) -> RegionApprox:
    """Trace an inner approximation by one scalarized search per weight.

    The channels U = constant and U = (X, Y) are always added, followed by
    any ``extra_channels`` given as ``(label, AuxChannel)`` pairs.
    """
    tag = _canonical_tag(tag)
    config = config or OptimizerConfig()
    weights = list(weights) if weights is not None else simplex_weight_grid(8)
    if not weights:
        raise ValidationError("weight grid is empty")
    points = [
        _point(pmf, AuxChannel.constant(len(pmf)), "U=const"),
        _point(pmf, AuxChannel.identity(len(pmf)), "U=(X,Y)"),
    ]
    for label, ch in extra_channels:
        points.append(_point(pmf, ch, label))
    if search:
        seeds = np.random.SeedSequence(config.seed).generate_state(len(weights))

        def run(args):
            w, s = args
            return scalarized_search(pmf, w, tag, config.replace(seed=int(s)))

        for w, res in zip(weights, ordered_map(run, zip(weights, seeds))):
            points.append(_point(pmf, res.channel, "search w=" + ",".join(f"{v:.4g}" for v in w.w)))
    return RegionApprox(tag, tuple(points), _scalarize(tag, points, weights), source_entropies(pmf))


def point_in_region_inner(triple, region: RegionApprox) -> bool:
    """True iff the triple dominates a stored point (certified membership)."""
    if isinstance(triple, RateTriple) and triple.tag != region.tag:
        raise TagMismatch(f"{triple.tag} triple tested against a {region.tag} region")
    t = np.asarray(tuple(triple), dtype=float)
    cloud = region.cloud()
    return bool(np.any(np.all(t[None, :] >= cloud - SLACK, axis=1)))


def scale_region(region: RegionApprox, factor: float) -> RegionApprox:
    """Scale by ``factor``; for convex up-closed regions this is the Minkowski self-sum."""
    if not factor > 0:
        raise ValidationError("scale factor must be positive")
    points = tuple(replace(p, aci=p.aci.scaled(factor), gw=p.gw.scaled(factor)) for p in region.points)
    scal = tuple(replace(s, value=s.value * factor) for s in region.scalarizations)
    ents = tuple(factor * h for h in region.source_entropies)
    return RegionApprox(region.tag, points, scal, ents, region.scale * factor)


def rescore(region: RegionApprox, pmf: JointPMF) -> float:
    """Max deviation between stored points and their re-evaluated witnesses."""
    dev = 0.0
    for p in region.points:
        if p.witness is None:
            continue
        aci = aci_coordinates(pmf, p.witness).array() * region.scale
        gw = gw_coordinates(pmf, p.witness).array() * region.scale
        dev = max(dev, float(np.max(np.abs(aci - p.aci.array()))), float(np.max(np.abs(gw - p.gw.array()))))
    return dev
