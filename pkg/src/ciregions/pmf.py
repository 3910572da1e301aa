"""Sparse finite joint distributions and Shannon measures (all in bits)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    DuplicateEntry,
    InconsistentInformation,
    MassNotOne,
    NegativeProbability,
    ValidationError,
    ZeroMassConditioning,
)

MASS_TOL = 1e-9
CLAMP_TOL = 1e-9
# Above this many cells grouping goes through np.unique instead of bincount.
_DENSE_GROUP_LIMIT = 1 << 22

VarRef = Union[int, str]


@dataclass(frozen=True)
class Alphabet:
    name: str
    symbols: tuple

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        if not symbols:
            raise ValidationError(f"alphabet {self.name!r} is empty")
        if len(set(symbols)) != len(symbols):
            raise ValidationError(f"alphabet {self.name!r} has repeated symbols")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self):
        return len(self.symbols)

    def index(self, symbol) -> int:
        if isinstance(symbol, (int, np.integer)):
            if not 0 <= symbol < len(self.symbols):
                raise ValidationError(f"symbol index {symbol} out of range for {self.name!r}")
            return int(symbol)
        try:
            return self.symbols.index(str(symbol))
        except ValueError:
            raise ValidationError(f"unknown symbol {symbol!r} for {self.name!r}") from None

    @classmethod
    def range(cls, name: str, size: int) -> "Alphabet":
        return cls(name, tuple(str(i) for i in range(size)))


class JointPMF:
    """Immutable sparse joint pmf.

    ``indices`` is an ``(n, k)`` integer array of symbol indices, sorted
    lexicographically, and ``probs`` the matching strictly positive masses.
    """

    __slots__ = ("alphabets", "indices", "probs", "_fingerprint")

    def __init__(self, alphabets: Sequence[Alphabet], indices: np.ndarray, probs: np.ndarray):
        # Trusted constructor: callers go through validate_joint or build
        # sorted, positive, normalized arrays themselves.
        self.alphabets = tuple(alphabets)
        indices = np.ascontiguousarray(indices, dtype=np.int64).reshape(len(probs), len(self.alphabets))
        probs = np.ascontiguousarray(probs, dtype=np.float64)
        indices.flags.writeable = False
        probs.flags.writeable = False
        self.indices = indices
        self.probs = probs
        self._fingerprint = None

    @property
    def names(self) -> tuple:
        return tuple(a.name for a in self.alphabets)

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.alphabets)

    @property
    def num_vars(self) -> int:
        return len(self.alphabets)

    def __len__(self):
        return len(self.probs)

    def __repr__(self):
        return f"JointPMF(vars={self.names}, shape={self.shape}, support={len(self)})"

    def axis(self, var: VarRef) -> int:
        if isinstance(var, (int, np.integer)):
            if not 0 <= var < self.num_vars:
                raise ValidationError(f"variable position {var} out of range")
            return int(var)
        try:
            return self.names.index(var)
        except ValueError:
            raise ValidationError(f"unknown variable {var!r}") from None

    def axes(self, variables) -> tuple:
        if isinstance(variables, (int, str, np.integer)):
            variables = [variables]
        return tuple(self.axis(v) for v in variables)

    def as_dict(self) -> dict:
        return {tuple(int(i) for i in row): float(p) for row, p in zip(self.indices, self.probs)}

    def dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[tuple(self.indices.T)] = self.probs
        return out

    def fingerprint(self) -> str:
        if self._fingerprint is None:
            h = hashlib.sha256()
            h.update(json.dumps(self.shape).encode())
            h.update(self.indices.tobytes())
            h.update(self.probs.tobytes())
            self._fingerprint = h.hexdigest()
        return self._fingerprint

    @classmethod
    def from_array(cls, array, names: Sequence[str] | None = None) -> "JointPMF":
        array = np.asarray(array, dtype=np.float64)
        if names is None:
            names = ["X", "Y", "U"][: array.ndim] if array.ndim <= 3 else [f"V{i}" for i in range(array.ndim)]
        alphabets = [Alphabet.range(n, s) for n, s in zip(names, array.shape)]
        nz = np.argwhere(array != 0)
        entries = [(tuple(row), array[tuple(row)]) for row in nz]
        return validate_joint(entries, alphabets)


def _group_codes(indices: np.ndarray, shape: Sequence[int], axes: Sequence[int]) -> np.ndarray:
    codes = np.zeros(len(indices), dtype=np.int64)
    for a in axes:
        codes = codes * shape[a] + indices[:, a]
    return codes


def _grouped_mass(pmf: JointPMF, axes: Sequence[int]) -> tuple:
    """Return (codes, inverse, masses) for the marginal on ``axes``."""
    size = 1
    for a in axes:
        size *= pmf.shape[a]
    codes = _group_codes(pmf.indices, pmf.shape, axes)
    if size <= _DENSE_GROUP_LIMIT:
        masses = np.bincount(codes, weights=pmf.probs, minlength=size)
        keep = np.flatnonzero(masses > 0)
        return keep, None, masses[keep]
    uniq, inverse = np.unique(codes, return_inverse=True)
    return uniq, inverse, np.bincount(inverse, weights=pmf.probs)


def _entropy_of_masses(masses: np.ndarray) -> float:
    m = masses[masses > 0]
    return float(-np.sum(m * np.log2(m)))


def clamp_bits(value: float, what: str = "information") -> float:
    if value < -CLAMP_TOL:
        raise InconsistentInformation(f"{what} = {value:.3e} bits is negative beyond tolerance")
    return 0.0 if value < 0 else value


def validate_joint(entries, alphabets: Sequence[Alphabet]) -> JointPMF:
    """Check raw entries and build a normalized :class:`JointPMF`.

    ``entries`` is a mapping or an iterable of ``(index_tuple, p)`` pairs.
    Explicit zeros are dropped; the mass must be within 1e-9 of one and is
    renormalized exactly after the check.
    """
    alphabets = tuple(alphabets)
    if not alphabets:
        raise ValidationError("at least one variable is required")
    if len({a.name for a in alphabets}) != len(alphabets):
        raise ValidationError("variable names must be distinct")
    items = entries.items() if isinstance(entries, Mapping) else entries
    seen = set()
    rows, probs = [], []
    shape = tuple(len(a) for a in alphabets)
    for idx, p in items:
        idx = tuple(int(i) for i in idx)
        if len(idx) != len(alphabets):
            raise ValidationError(f"entry {idx} has {len(idx)} coordinates, expected {len(alphabets)}")
        for i, n in zip(idx, shape):
            if not 0 <= i < n:
                raise ValidationError(f"entry {idx} references a symbol outside its alphabet")
        if idx in seen:
            raise DuplicateEntry(f"entry {idx} given more than once")
        seen.add(idx)
        p = float(p)
        if not np.isfinite(p):
            raise ValidationError(f"entry {idx} has non-finite probability")
        if p < 0:
            raise NegativeProbability(f"entry {idx} has probability {p}")
        if p > 0:
            rows.append(idx)
            probs.append(p)
    total = float(np.sum(probs)) if probs else 0.0
    if abs(total - 1.0) > MASS_TOL:
        raise MassNotOne(f"probabilities sum to {total!r}")
    indices = np.array(rows, dtype=np.int64).reshape(len(rows), len(alphabets))
    probs = np.array(probs, dtype=np.float64)
    if total != 1.0:
        probs = probs / total
    order = np.lexsort(indices.T[::-1])
    return JointPMF(alphabets, indices[order], probs[order])


def entropy(pmf: JointPMF, variables) -> float:
    axes = pmf.axes(variables)
    if not axes:
        raise ValidationError("entropy needs a non-empty variable set")
    if len(set(axes)) != len(axes):
        raise ValidationError("repeated variable")
    _, _, masses = _grouped_mass(pmf, axes)
    return clamp_bits(_entropy_of_masses(masses), "entropy")


def _disjoint(pmf: JointPMF, *groups) -> list:
    resolved = [pmf.axes(g) if g is not None else () for g in groups]
    flat = [a for g in resolved for a in g]
    if len(set(flat)) != len(flat):
        raise ValidationError("variable groups must be pairwise disjoint")
    return resolved


def conditional_entropy(pmf: JointPMF, target, given=()) -> float:
    t, g = _disjoint(pmf, target, given)
    if not t:
        raise ValidationError("target set is empty")
    if not g:
        return entropy(pmf, t)
    return clamp_bits(entropy(pmf, t + g) - entropy(pmf, g), "conditional entropy")


def mutual_information(pmf: JointPMF, vars1, vars2) -> float:
    return conditional_mutual_information(pmf, vars1, vars2, ())


def conditional_mutual_information(pmf: JointPMF, vars1, vars2, given=()) -> float:
    a, b, g = _disjoint(pmf, vars1, vars2, given)
    if not a or not b:
        raise ValidationError("mutual information needs two non-empty groups")
    h = entropy
    if g:
        value = h(pmf, a + g) + h(pmf, b + g) - h(pmf, a + b + g) - h(pmf, g)
    else:
        value = h(pmf, a) + h(pmf, b) - h(pmf, a + b)
    return clamp_bits(value, "mutual information")


def marginalize(pmf: JointPMF, keep) -> JointPMF:
    axes = pmf.axes(keep)
    if not axes:
        raise ValidationError("marginal needs at least one variable")
    if len(set(axes)) != len(axes):
        raise ValidationError("repeated variable")
    shape = [pmf.shape[a] for a in axes]
    codes, inverse, masses = _grouped_mass(pmf, axes)
    idx = np.stack(np.unravel_index(codes, shape), axis=1) if len(codes) else np.zeros((0, len(axes)), np.int64)
    masses = masses / masses.sum()
    return JointPMF([pmf.alphabets[a] for a in axes], idx, masses)


def condition(pmf: JointPMF, var: VarRef, symbol) -> JointPMF:
    """Distribution of the remaining variables given ``var == symbol``."""
    axis = pmf.axis(var)
    if pmf.num_vars < 2:
        raise ValidationError("conditioning needs at least two variables")
    s = pmf.alphabets[axis].index(symbol)
    mask = pmf.indices[:, axis] == s
    mass = pmf.probs[mask].sum()
    if mass <= 0:
        raise ZeroMassConditioning(f"{pmf.names[axis]}={pmf.alphabets[axis].symbols[s]} has zero mass")
    rest = [a for a in range(pmf.num_vars) if a != axis]
    return JointPMF([pmf.alphabets[a] for a in rest], pmf.indices[mask][:, rest], pmf.probs[mask] / mass)


def reorder(pmf: JointPMF, order) -> JointPMF:
    """Permute (or select) variables; ``reorder(p, [1, 0])`` transposes a pair."""
    axes = pmf.axes(order)
    if sorted(axes) != list(range(pmf.num_vars)):
        return marginalize(pmf, axes)
    idx = pmf.indices[:, axes]
    sort = np.lexsort(idx.T[::-1])
    return JointPMF([pmf.alphabets[a] for a in axes], idx[sort], pmf.probs[sort])


def relabel(pmf: JointPMF, var: VarRef, permutation: Sequence[int]) -> JointPMF:
    """Send symbol ``i`` of ``var`` to position ``permutation[i]``."""
    axis = pmf.axis(var)
    perm = np.asarray(permutation, dtype=np.int64)
    n = pmf.shape[axis]
    if sorted(perm.tolist()) != list(range(n)):
        raise ValidationError("not a permutation of the alphabet")
    old = pmf.alphabets[axis]
    symbols = [None] * n
    for i, j in enumerate(perm):
        symbols[j] = old.symbols[i]
    alphabets = list(pmf.alphabets)
    alphabets[axis] = Alphabet(old.name, tuple(symbols))
    idx = pmf.indices.copy()
    idx[:, axis] = perm[idx[:, axis]]
    sort = np.lexsort(idx.T[::-1])
    return JointPMF(alphabets, idx[sort], pmf.probs[sort])


def _compound(a: Alphabet, b: Alphabet) -> Alphabet:
    return Alphabet(f"({a.name},{b.name})", tuple(f"({s},{t})" for s in a.symbols for t in b.symbols))


def independent_join(first: JointPMF, second: JointPMF) -> JointPMF:
    """Product of two pair distributions, regrouped as ((X1,X2),(Y1,Y2))."""
    if first.num_vars != 2 or second.num_vars != 2:
        raise ValidationError("independent_join expects two pair distributions")
    (_nx1, _ny1), (nx2, ny2) = first.shape, second.shape
    i = np.repeat(np.arange(len(first)), len(second))
    j = np.tile(np.arange(len(second)), len(first))
    x = first.indices[i, 0] * nx2 + second.indices[j, 0]
    y = first.indices[i, 1] * ny2 + second.indices[j, 1]
    probs = first.probs[i] * second.probs[j]
    idx = np.stack([x, y], axis=1)
    sort = np.lexsort(idx.T[::-1])
    alphabets = [_compound(first.alphabets[0], second.alphabets[0]), _compound(first.alphabets[1], second.alphabets[1])]
    return JointPMF(alphabets, idx[sort], probs[sort] / probs.sum())


def _parse_prob(value) -> float:
    if isinstance(value, Mapping):
        return float(Fraction(int(value["num"]), int(value["den"])))
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def pmf_from_json(data) -> JointPMF:
    """Parse the JSON pmf schema (``variables`` + ``entries``)."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        alphabets = [Alphabet(v["name"], tuple(v["symbols"])) for v in data["variables"]]
        entries = [(tuple(e["idx"]), _parse_prob(e["p"])) for e in data["entries"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"malformed pmf document: {exc}") from exc
    return validate_joint(entries, alphabets)


def pmf_to_json(pmf: JointPMF) -> dict:
    return {
        "variables": [{"name": a.name, "symbols": list(a.symbols)} for a in pmf.alphabets],
        "entries": [{"idx": [int(i) for i in row], "p": float(p)} for row, p in zip(pmf.indices, pmf.probs)],
    }


def load_pmf(path) -> JointPMF:
    with open(path) as fh:
        return pmf_from_json(json.load(fh))


def iter_support(pmf: JointPMF) -> Iterable[tuple]:
    for row, p in zip(pmf.indices, pmf.probs):
        yield tuple(int(i) for i in row), float(p)
