"""Gács-Körner common part and the scalar quantities derived from it.

The GK quantities are exact (graph decomposition of the support). Wyner's
common information and the corner rates are variational and are estimated
by :func:`ciregions.optimize.penalized_search`; those reports are labelled
``heuristic-upper``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .channel import AuxChannel, OptimizerConfig
from .optimize import penalized_search
from .pmf import JointPMF, mutual_information, reorder

EXACT = "exact"
HEURISTIC_UPPER = "heuristic-upper"
HEURISTIC = "heuristic"


@dataclass(frozen=True)
class GKDecomposition:
    component_of_x: dict
    component_of_y: dict
    component_mass: dict

    @property
    def num_components(self) -> int:
        return len(self.component_mass)

    def masses(self) -> np.ndarray:
        return np.array([self.component_mass[c] for c in sorted(self.component_mass)])


@dataclass(frozen=True)
class ScalarReport:
    value: float
    certified: str
    witness: AuxChannel | None = None
    seed: int | None = None
    config_hash: str | None = None
    note: str = ""

    def __float__(self):
        return float(self.value)

    def to_json(self, pmf: JointPMF | None = None) -> dict:
        out = {
            "value": self.value,
            "certified": self.certified,
            "seed": self.seed,
            "config_hash": self.config_hash,
        }
        if self.witness is not None and pmf is not None:
            out["witness"] = self.witness.dense().tolist()
        if self.note:
            out["note"] = self.note
        return out


def gk_decomposition(pmf: JointPMF) -> GKDecomposition:
    """Connected components of the bipartite support graph.

    Components are numbered 0, 1, ... in order of their smallest x index.
    """
    nx, ny = pmf.shape
    xs, ys = pmf.indices[:, 0], pmf.indices[:, 1]
    # x-nodes are 0..nx-1, y-nodes nx..nx+ny-1
    graph = coo_matrix((np.ones(len(xs)), (xs, nx + ys)), shape=(nx + ny, nx + ny))
    _, labels = connected_components(graph, directed=False)
    xs_used = np.unique(xs)
    ys_used = np.unique(ys)
    order = {}
    for x in xs_used:
        order.setdefault(labels[x], len(order))
    comp_x = {int(x): order[labels[x]] for x in xs_used}
    comp_y = {int(y): order[labels[nx + y]] for y in ys_used}
    mass = np.zeros(len(order))
    np.add.at(mass, [comp_x[int(x)] for x in xs], pmf.probs)
    return GKDecomposition(comp_x, comp_y, {i: float(m) for i, m in enumerate(mass)})


def _entropy_bits(masses) -> float:
    m = np.asarray([v for v in masses if v > 0])
    return float(max(-np.sum(m * np.log2(m)), 0.0)) + 0.0  # no negative zero


def gk_common_information(pmf: JointPMF) -> ScalarReport:
    """Entropy of the common part."""
    return ScalarReport(_entropy_bits(gk_decomposition(pmf).masses()), EXACT)


def residual_info_zero(pmf: JointPMF) -> ScalarReport:
    """R_RD-0 = I(X;Y) - C_GK, the residual information at zero genie rates."""
    value = mutual_information(pmf, 0, 1) - gk_common_information(pmf).value
    return ScalarReport(max(value, 0.0), EXACT)


def _heuristic(pmf, objective, constraints, config: OptimizerConfig | None) -> ScalarReport:
    config = config or OptimizerConfig()
    res = penalized_search(pmf, objective, constraints, config)
    return ScalarReport(
        max(res.value, 0.0),
        HEURISTIC_UPPER,
        witness=res.channel,
        seed=config.seed,
        config_hash=config.config_hash(),
    )


def wyner_common_information(pmf: JointPMF, config: OptimizerConfig | None = None) -> ScalarReport:
    """min I(X,Y;U) over channels with X - U - Y (best found)."""
    return _heuristic(pmf, "rc", ("rd",), config)


def corner_rate_1(pmf: JointPMF, config: OptimizerConfig | None = None) -> ScalarReport:
    """R_1-0: min I(Y;U|X) with I(X;U|Y) = I(X;Y|U) = 0."""
    return _heuristic(pmf, "r1", ("r2", "rd"), config)


def corner_rate_2(pmf: JointPMF, config: OptimizerConfig | None = None) -> ScalarReport:
    """R_2-0: min I(X;U|Y) with I(Y;U|X) = I(X;Y|U) = 0."""
    return _heuristic(pmf, "r2", ("r1", "rd"), config)


def min_sum_rate_zero_residual(pmf: JointPMF, config: OptimizerConfig | None = None) -> ScalarReport:
    """inf R_1 + R_2 over the R_RD = 0 face (equals C_Wyner - I(X;Y))."""
    return _heuristic(pmf, {"r1": 1.0, "r2": 1.0}, ("rd",), config)


def g_rates(pmf: JointPMF, config: OptimizerConfig | None = None, corners=None) -> tuple:
    """(G(Y->X), G(X->Y)) = I(X;Y) + (R_1-0, R_2-0).

    ``corners`` may carry precomputed corner reports to avoid re-running the
    optimizer.
    """
    c1, c2 = corners if corners is not None else (corner_rate_1(pmf, config), corner_rate_2(pmf, config))
    mi = mutual_information(pmf, 0, 1)
    return (
        ScalarReport(mi + c1.value, c1.certified, c1.witness, c1.seed, c1.config_hash),
        ScalarReport(mi + c2.value, c2.certified, c2.witness, c2.seed, c2.config_hash),
    )


def transpose(pmf: JointPMF) -> JointPMF:
    return reorder(pmf, [1, 0])


def brute_force_gk(pmf: JointPMF) -> float:
    """sup H(g(X)) over labelings g of X that some h(Y) matches on the support.

    Enumerates set partitions of the used X symbols; a partition is admissible
    when every y only meets x's from a single block. Exponential; test oracle.
    """
    xs = sorted({int(x) for x in pmf.indices[:, 0]})
    px = {x: 0.0 for x in xs}
    nbrs: dict = {}
    for (x, y), p in zip(pmf.indices.tolist(), pmf.probs):
        px[x] += p
        nbrs.setdefault(y, set()).add(x)
    best = 0.0
    for blocks in _set_partitions(xs):
        block_of = {x: i for i, blk in enumerate(blocks) for x in blk}
        if all(len({block_of[x] for x in group}) == 1 for group in nbrs.values()):
            best = max(best, _entropy_bits([sum(px[x] for x in blk) for blk in blocks]))
    return best


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]

