"""Sup of H(A|Q,B) + H(B|Q,A) over the eight-class channel family of bit OT.

A channel with I(A;B|Q) = 0 on the bit-OT support (an 8-cycle) can be
reduced to eight letters, one per vertex of the cycle: letter ``q_i`` for
i = 1..4 sits on the two edges at a fixed value of A, letters ``q_5..q_8``
on the two edges at a fixed value of B. Each edge then splits its mass
between its two letters, which gives one parameter per edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channel import AuxChannel, joint_with_channel
from ..common import EXACT, ScalarReport
from ..errors import CIRegionsError, OracleNotRun, ValidationError
from ..pmf import JointPMF, conditional_entropy, conditional_mutual_information
from .ot import make_bit_ot

# parameter k (1-based) -> (A symbol, B symbol, letter taking p_k, letter taking 1 - p_k)
EDGES = {
    1: ("00", "10", 1, 5),
    5: ("01", "10", 5, 2),
    2: ("01", "21", 2, 6),
    6: ("11", "21", 6, 3),
    3: ("11", "11", 3, 7),
    7: ("10", "11", 7, 4),
    4: ("10", "20", 4, 8),
    8: ("00", "20", 8, 1),
}

# Every letter collects mass p_i from its own edge and 1 - p_j from a
# neighbour; the objective is a sum of terms t(p_i, p_j) around this cycle.
CYCLE = (1, 8, 4, 7, 3, 6, 2, 5)


def h2(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(p * np.log2(np.where(p > 0, p, 1.0)) + (1 - p) * np.log2(np.where(p < 1, 1 - p, 1.0)))
    return np.where((p <= 0) | (p >= 1), 0.0, out)


def letter_term(own, other):
    """(own + 1 - other)/8 * H2(own / (own + 1 - other)), zero when the letter is empty."""
    own = np.asarray(own, dtype=float)
    other = np.asarray(other, dtype=float)
    mass = own + 1.0 - other
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(mass > 0, own / np.where(mass > 0, mass, 1.0), 0.0)
    return mass / 8.0 * h2(frac)


def h_b_given_qa(p):
    """Closed-form H(B|Q,A); ``p`` has the eight parameters on its last axis."""
    p = np.asarray(p, dtype=float)
    P = lambda k: p[..., k - 1]  # noqa: E731
    return letter_term(P(1), P(8)) + letter_term(P(2), P(5)) + letter_term(P(3), P(6)) + letter_term(P(4), P(7))


def h_a_given_qb(p):
    """Closed-form H(A|Q,B)."""
    p = np.asarray(p, dtype=float)
    P = lambda k: p[..., k - 1]  # noqa: E731
    return letter_term(P(5), P(1)) + letter_term(P(6), P(2)) + letter_term(P(7), P(3)) + letter_term(P(8), P(4))


def closed_form_objective(p):
    return h_b_given_qa(p) + h_a_given_qb(p)


def upper_bound_b(p):
    """(4 + sum p_1..p_4 - sum p_5..p_8) / 8, the H2 <= 1 bound on H(B|Q,A)."""
    p = np.asarray(p, dtype=float)
    return (4 + p[..., :4].sum(-1) - p[..., 4:].sum(-1)) / 8


def upper_bound_a(p):
    p = np.asarray(p, dtype=float)
    return (4 + p[..., 4:].sum(-1) - p[..., :4].sum(-1)) / 8


def class_channel(params, bit_ot: JointPMF | None = None) -> AuxChannel:
    """The eight-letter channel p(q | a, b) on the bit-OT support."""
    bit_ot = bit_ot or make_bit_ot()
    params = np.asarray(params, dtype=float)
    if params.shape != (8,) or np.any(params < 0) or np.any(params > 1):
        raise ValidationError("class parameters are eight numbers in [0, 1]")
    a_alpha, b_alpha = bit_ot.alphabets
    rows = np.zeros((len(bit_ot), 8))
    position = {(int(a), int(b)): i for i, (a, b) in enumerate(bit_ot.indices)}
    for k, (a, b, own, other) in EDGES.items():
        r = position[(a_alpha.index(a), b_alpha.index(b))]
        rows[r, own - 1] += params[k - 1]
        rows[r, other - 1] += 1 - params[k - 1]
    return AuxChannel.from_dense(rows)


def channel_objective(params, bit_ot: JointPMF | None = None) -> tuple:
    """(H(A|Q,B) + H(B|Q,A), I(A;B|Q)) evaluated on the explicit channel."""
    bit_ot = bit_ot or make_bit_ot()
    j = joint_with_channel(bit_ot, class_channel(params, bit_ot))
    obj = conditional_entropy(j, 0, (2, 1)) + conditional_entropy(j, 1, (2, 0))
    return obj, conditional_mutual_information(j, 0, 1, 2)


def jensen_merge_gain(mass1, p1, mass2, p2):
    """Objective change when two same-class letters are merged (never negative)."""
    mass1, p1, mass2, p2 = map(np.asarray, (mass1, p1, mass2, p2))
    total = mass1 + mass2
    mixed = (mass1 * p1 + mass2 * p2) / total
    return total * h2(mixed) - mass1 * h2(p1) - mass2 * h2(p2)


def _cycle_max(candidates: list) -> tuple:
    """Exact max of sum_k t(v_k, v_{k+1}) around the cycle over per-variable candidates.

    ``candidates[k]`` lists the admissible values of the k-th variable in
    :data:`CYCLE` order. Max-plus dynamic programming over the cycle, with
    the first variable fixed in turn (all at once, vectorized).
    """
    n = len(candidates)
    tables = [letter_term(candidates[k][:, None], candidates[(k + 1) % n][None, :]) for k in range(n)]
    # best[i0, j]: best partial sum with v_0 = i0 and current variable = j
    best = tables[0].copy()
    back = []
    for k in range(1, n - 1):
        tot = best[:, :, None] + tables[k][None, :, :]
        back.append(np.argmax(tot, axis=1))
        best = np.max(tot, axis=1)
    # closing term t(v_{n-1}, v_0): tables[n-1][j, i0]
    closing = best + tables[n - 1].T
    j_last = np.argmax(closing, axis=1)
    totals = closing[np.arange(len(candidates[0])), j_last]
    i0 = int(np.argmax(totals))
    path = [int(j_last[i0])]
    for ptr in reversed(back):
        path.append(int(ptr[i0, path[-1]]))
    path.append(i0)
    path.reverse()
    values = np.array([candidates[k][path[k]] for k in range(n)])
    return float(totals[i0]), values


@dataclass(frozen=True)
class SupOracleResult:
    value: float
    params: np.ndarray = field(repr=False)
    coarse_value: float
    grid_step: float
    refine_step: float

    def params_dict(self) -> dict:
        return {f"p{k}": float(self.params[k - 1]) for k in range(1, 9)}


def _to_param_order(values_in_cycle_order) -> np.ndarray:
    out = np.empty(8)
    for pos, k in enumerate(CYCLE):
        out[k - 1] = values_in_cycle_order[pos]
    return out


def bit_ot_sup_oracle(grid_step: float = 0.05, refine_step: float = 0.01) -> SupOracleResult:
    """Grid maximum of H(A|Q,B) + H(B|Q,A) over the eight class parameters.

    The coarse stage is exact over the full product grid with spacing
    ``grid_step`` (the objective is a cycle of pairwise terms, so dynamic
    programming covers all (1/step + 1)**8 points). The refinement repeats
    the search on a ``refine_step`` grid within one coarse step of the
    coarse maximizer. Ties resolve to the smallest grid index.
    """
    if not 0 < grid_step <= 0.25:
        raise ValidationError("grid_step must lie in (0, 0.25]")
    if not 0 < refine_step <= grid_step:
        raise ValidationError("refine_step must lie in (0, grid_step]")
    m = int(round(1 / grid_step))
    coarse = np.linspace(0.0, 1.0, m + 1)
    coarse_val, coarse_pt = _cycle_max([coarse] * 8)
    cands = []
    for v in coarse_pt:
        lo, hi = max(0.0, v - grid_step), min(1.0, v + grid_step)
        n = int(round((hi - lo) / refine_step))
        cands.append(np.linspace(lo, hi, n + 1))
    fine_val, fine_pt = _cycle_max(cands)
    if fine_val < coarse_val:
        fine_val, fine_pt = coarse_val, coarse_pt
    return SupOracleResult(fine_val, _to_param_order(fine_pt), coarse_val, grid_step, refine_step)


SUP_TOL = 1e-3


def bit_ot_pair_min_sum_zero(oracle: SupOracleResult | None) -> ScalarReport:
    """inf{R_1 + R_2 : (R_1, R_2, 0) in R_ACI} for the bit-OT pair, which is 2.

    Per bit OT the infimum is H(A|B) + H(B|A) minus the sup above; the sup
    is at most 1 analytically and the oracle must confirm that 1 is reached.
    Regions of independent pairs add, so the pair doubles the single value.
    """
    if oracle is None:
        raise OracleNotRun("run bit_ot_sup_oracle before certifying the min-sum")
    if abs(oracle.value - 1.0) > SUP_TOL:
        raise CIRegionsError(f"sup oracle returned {oracle.value}, expected 1 within {SUP_TOL}")
    bit = make_bit_ot()
    two = conditional_entropy(bit, 0, 1) + conditional_entropy(bit, 1, 0)
    single = two - 1.0
    note = (
        f"H(A|B)+H(B|A) = {two:g}; sup H(A|Q,B)+H(B|Q,A) = 1 "
        f"(analytic bound, oracle {oracle.value:.6f}); single bit OT = {single:g}; pair = 2 x single"
    )
    return ScalarReport(2.0 * single, EXACT, note=note)
