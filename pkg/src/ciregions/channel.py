"""Auxiliary channels p(u | x, y), rate triples and the coordinate maps.

A channel has one row per support pair of the source pmf, in the pmf's
support order. Rows are stored as a CSR matrix so that deterministic
channels over very large supports (string-OT at L=4 has 2**18 pairs) stay
cheap.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Hashable, Mapping

import numpy as np
from scipy import sparse

from .errors import SupportMismatch, ValidationError
from .pmf import Alphabet, JointPMF, conditional_entropy, conditional_mutual_information, entropy, mutual_information

ROW_TOL = 1e-12

# Coordinate keys. ACI order (R_1, R_2, R_RD), GW order (R_A, R_B, R_C).
ACI = ("r1", "r2", "rd")
GW = ("ra", "rb", "rc")
COORD_LABELS = {
    "r1": "I(Y;U|X)",
    "r2": "I(X;U|Y)",
    "rd": "I(X;Y|U)",
    "ra": "H(X|U)",
    "rb": "H(Y|U)",
    "rc": "I(X,Y;U)",
}
TAGS = {"aci": ACI, "gw": GW}


def _canonical_tag(tag: str) -> str:
    t = tag.lower()
    if t not in TAGS:
        raise ValidationError(f"unknown coordinate tag {tag!r} (expected 'aci' or 'gw')")
    return t


@dataclass(frozen=True)
class RateTriple:
    tag: str
    values: tuple

    def __post_init__(self):
        tag = _canonical_tag(self.tag)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != 3:
            raise ValidationError("a rate triple has three coordinates")
        if tag == "aci":
            if min(vals) < -1e-9:
                raise ValidationError(f"ACI coordinates must be nonnegative, got {vals}")
            vals = tuple(max(v, 0.0) for v in vals)
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def array(self) -> np.ndarray:
        return np.array(self.values)

    def scaled(self, factor: float) -> "RateTriple":
        return RateTriple(self.tag, tuple(factor * v for v in self.values))


@dataclass(frozen=True)
class Weights3:
    w: tuple

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.shape != (3,) or not np.all(np.isfinite(w)):
            raise ValidationError("weights must be a finite 3-vector")
        if np.any(w < 0) or w.sum() <= 0:
            raise ValidationError("weights must be nonnegative and not all zero")
        object.__setattr__(self, "w", tuple(float(v) for v in w / w.sum()))

    def array(self) -> np.ndarray:
        return np.array(self.w)

    def dot(self, triple) -> float:
        return float(np.dot(self.w, tuple(triple)))


def default_u_size(pmf: JointPMF) -> int:
    nx, ny = pmf.shape[:2]
    return nx * ny + 2


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 2000
    step: float = 1.0
    tolerance: float = 1e-9
    seed: int = 0
    mode: str = "local-search"
    u_size: int | None = None
    penalty_schedule: tuple = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)
    feasibility_tol: float = 1e-6
    grid_step: float = 0.05

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.tolerance <= 0:
            raise ValidationError("tolerance must be positive")
        if self.mode not in ("local-search", "grid"):
            raise ValidationError(f"unknown optimizer mode {self.mode!r}")
        if self.u_size is not None and self.u_size < 1:
            raise ValidationError("u_size must be >= 1")
        object.__setattr__(self, "penalty_schedule", tuple(float(m) for m in self.penalty_schedule))

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def replace(self, **changes) -> "OptimizerConfig":
        data = asdict(self)
        data.update(changes)
        return OptimizerConfig(**data)


@dataclass(frozen=True, eq=False)
class AuxChannel:
    """Conditional law of U given each support pair; ``matrix`` is (pairs x u_size)."""

    u_size: int
    matrix: sparse.csr_matrix = field(repr=False)

    def __post_init__(self):
        m = sparse.csr_matrix(self.matrix, dtype=np.float64)
        m.sum_duplicates()
        m.eliminate_zeros()
        if m.shape[1] != self.u_size:
            raise ValidationError(f"channel has {m.shape[1]} columns, u_size is {self.u_size}")
        if m.nnz and (m.data.min() < 0 or m.data.max() > 1 + ROW_TOL):
            raise ValidationError("channel entries must lie in [0, 1]")
        rows = np.asarray(m.sum(axis=1)).ravel()
        if m.shape[0] and np.max(np.abs(rows - 1.0)) > ROW_TOL:
            raise ValidationError("every channel row must sum to 1")
        object.__setattr__(self, "matrix", m)

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    @classmethod
    def from_dense(cls, rows) -> "AuxChannel":
        rows = np.asarray(rows, dtype=np.float64)
        rows = np.where(rows < 0, 0.0, rows)
        rows = rows / rows.sum(axis=1, keepdims=True)
        return cls(rows.shape[1], sparse.csr_matrix(rows))

    @classmethod
    def deterministic(cls, labels, u_size: int | None = None) -> "AuxChannel":
        labels = np.asarray(labels, dtype=np.int64)
        k = int(labels.max()) + 1 if u_size is None else int(u_size)
        n = len(labels)
        m = sparse.csr_matrix((np.ones(n), (np.arange(n), labels)), shape=(n, k))
        return cls(k, m)

    @classmethod
    def constant(cls, num_rows: int) -> "AuxChannel":
        return cls.deterministic(np.zeros(num_rows, dtype=np.int64), 1)

    @classmethod
    def identity(cls, num_rows: int) -> "AuxChannel":
        return cls.deterministic(np.arange(num_rows), num_rows)

    def permute_letters(self, permutation) -> "AuxChannel":
        perm = np.asarray(permutation, dtype=np.int64)
        coo = self.matrix.tocoo()
        m = sparse.csr_matrix((coo.data, (coo.row, perm[coo.col])), shape=self.matrix.shape)
        return AuxChannel(self.u_size, m)

    def to_json(self, pmf: JointPMF) -> dict:
        check_support(pmf, self)
        dense = self.dense()
        return {
            "u_size": self.u_size,
            "rows": [{"idx": [int(i) for i in idx], "p": [float(v) for v in row]} for idx, row in zip(pmf.indices, dense)],
        }

    @classmethod
    def from_json(cls, data: Mapping, pmf: JointPMF) -> "AuxChannel":
        position = {tuple(int(i) for i in row): k for k, row in enumerate(pmf.indices)}
        u_size = int(data["u_size"])
        rows = np.full((len(pmf), u_size), np.nan)
        for entry in data["rows"]:
            key = tuple(int(i) for i in entry["idx"])
            if key not in position:
                raise SupportMismatch(f"channel row {key} is not in the pmf support")
            rows[position[key]] = entry["p"]
        if np.isnan(rows).any():
            raise SupportMismatch("channel does not cover the whole support")
        return cls(u_size, sparse.csr_matrix(rows))


def check_support(pmf: JointPMF, channel: AuxChannel) -> None:
    if pmf.num_vars != 2:
        raise ValidationError("auxiliary channels are defined for pair distributions")
    if channel.num_rows != len(pmf):
        raise SupportMismatch(f"channel has {channel.num_rows} rows but the pmf support has {len(pmf)} pairs")


def channel_from_function(pmf: JointPMF, fn: Callable[[int, int], Hashable]) -> AuxChannel:
    """Deterministic channel U = fn(x, y); letters numbered in sorted label order."""
    labels = [fn(int(x), int(y)) for x, y in pmf.indices]
    letters = sorted(set(labels))
    code = {lab: i for i, lab in enumerate(letters)}
    return AuxChannel.deterministic([code[lab] for lab in labels], len(letters))


def joint_with_channel(pmf: JointPMF, channel: AuxChannel) -> JointPMF:
    """Sparse joint over (X, Y, U) induced by p(x,y) p(u|x,y)."""
    check_support(pmf, channel)
    coo = channel.matrix.tocoo()
    probs = pmf.probs[coo.row] * coo.data
    keep = probs > 0
    rows, cols, probs = coo.row[keep], coo.col[keep], probs[keep]
    idx = np.column_stack([pmf.indices[rows, 0], pmf.indices[rows, 1], cols])
    order = np.lexsort(idx.T[::-1])
    alphabets = list(pmf.alphabets) + [Alphabet.range("U", channel.u_size)]
    return JointPMF(alphabets, idx[order], probs[order] / probs.sum())


def coordinate_values(pmf: JointPMF, channel: AuxChannel, keys=ACI + GW) -> dict:
    """Evaluate the named coordinates on the joint induced by ``channel``."""
    j = joint_with_channel(pmf, channel)
    x, y, u = 0, 1, 2
    fns = {
        "r1": lambda: conditional_mutual_information(j, y, u, x),
        "r2": lambda: conditional_mutual_information(j, x, u, y),
        "rd": lambda: conditional_mutual_information(j, x, y, u),
        "ra": lambda: conditional_entropy(j, x, u),
        "rb": lambda: conditional_entropy(j, y, u),
        "rc": lambda: mutual_information(j, (x, y), u),
    }
    return {k: fns[k]() for k in keys}


def aci_coordinates(pmf: JointPMF, channel: AuxChannel) -> RateTriple:
    """(I(Y;U|X), I(X;U|Y), I(X;Y|U))."""
    v = coordinate_values(pmf, channel, ACI)
    return RateTriple("aci", tuple(v[k] for k in ACI))


def gw_coordinates(pmf: JointPMF, channel: AuxChannel) -> RateTriple:
    """(H(X|U), H(Y|U), I(X,Y;U))."""
    v = coordinate_values(pmf, channel, GW)
    return RateTriple("gw", tuple(v[k] for k in GW))


def coordinates(pmf: JointPMF, channel: AuxChannel, tag: str) -> RateTriple:
    return aci_coordinates(pmf, channel) if _canonical_tag(tag) == "aci" else gw_coordinates(pmf, channel)


def source_entropies(pmf: JointPMF) -> tuple:
    """(H(X), H(Y), H(X,Y)) of a pair distribution."""
    return entropy(pmf, 0), entropy(pmf, 1), entropy(pmf, (0, 1))


def objective_value(pmf: JointPMF, channel: AuxChannel, objective: Mapping[str, float]) -> float:
    vals = coordinate_values(pmf, channel, tuple(objective))
    return float(sum(w * vals[k] for k, w in objective.items()))
