"""Exhaustive grid search over channels, used as an independent test oracle.

Each channel row ranges over the lattice points of the probability simplex
with spacing ``grid_step``; the oracle enumerates the full product of those
lattices. Coordinates are computed from a dense (x, y, u) tensor, sharing no
code with the local-search engine or the sparse pmf routines.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .channel import COORD_LABELS, AuxChannel
from .errors import BudgetExceeded, ValidationError
from .pmf import JointPMF

DEFAULT_BUDGET = 10**8
_CHUNK = 1 << 18


def simplex_lattice(u_size: int, grid_step: float) -> np.ndarray:
    """All probability vectors of length ``u_size`` with entries in multiples of the step."""
    m = int(round(1.0 / grid_step))
    if m < 1 or abs(m * grid_step - 1.0) > 1e-9:
        raise ValidationError("grid_step must divide 1")
    if u_size == 1:
        return np.ones((1, 1))
    pts = []
    # Stars and bars: bar positions among m + u_size - 1 slots.
    for bars in combinations(range(m + u_size - 1), u_size - 1):
        prev, parts = -1, []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(m + u_size - 2 - prev)
        pts.append(parts)
    return np.array(pts, dtype=float) / m


def _plogp_sum(t, axes):
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(t > 0, t * np.log2(np.where(t > 0, t, 1.0)), 0.0)
    return -v.sum(axis=axes)


def dense_coordinates(pmf: JointPMF, channels: np.ndarray) -> dict:
    """All six coordinates for a batch of dense channels ``(batch, pairs, u)``."""
    nx, ny = pmf.shape
    b, s, k = channels.shape
    t = np.zeros((b, nx, ny, k))
    t[:, pmf.indices[:, 0], pmf.indices[:, 1], :] = pmf.probs[None, :, None] * channels
    px = t.sum(axis=(2, 3))
    py = t.sum(axis=(1, 3))
    pxy = t.sum(axis=3)
    pu = t.sum(axis=(1, 2))
    pxu = t.sum(axis=2)
    pyu = t.sum(axis=1)
    h_x, h_y, h_xy = _plogp_sum(px, 1), _plogp_sum(py, 1), _plogp_sum(pxy, (1, 2))
    h_u, h_xu, h_yu = _plogp_sum(pu, 1), _plogp_sum(pxu, (1, 2)), _plogp_sum(pyu, (1, 2))
    h_xyu = _plogp_sum(t, (1, 2, 3))
    return {
        "r1": h_xy + h_xu - h_x - h_xyu,
        "r2": h_xy + h_yu - h_y - h_xyu,
        "rd": h_xu + h_yu - h_u - h_xyu,
        "ra": h_xu - h_u,
        "rb": h_yu - h_u,
        "rc": h_xy + h_u - h_xyu,
    }


def grid_size(num_rows: int, u_size: int, grid_step: float) -> int:
    m = int(round(1.0 / grid_step))
    return comb(m + u_size - 1, u_size - 1) ** num_rows


def brute_force_grid(
    pmf: JointPMF,
    u_size: int,
    grid_step: float,
    objective,
    feasibility: dict | None = None,
    budget: int = DEFAULT_BUDGET,
):
    """Exact minimum of ``objective`` over the channel grid.

    ``objective`` maps coordinate keys to weights; ``feasibility`` maps keys
    to the largest admissible value. Ties go to the first grid point in
    enumeration order. Returns ``(value, AuxChannel)``.
    """
    if isinstance(objective, str):
        objective = {objective: 1.0}
    feasibility = feasibility or {}
    for key in list(objective) + list(feasibility):
        if key not in COORD_LABELS:
            raise ValidationError(f"unknown coordinate {key!r}")
    lattice = simplex_lattice(u_size, grid_step)
    rows = len(pmf)
    total = len(lattice) ** rows
    if total > budget:
        raise BudgetExceeded(f"grid has {total} channels, budget is {budget}")
    best_val, best_id = np.inf, -1
    shape = (len(lattice),) * rows
    for start in range(0, total, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, total))
        digits = np.stack(np.unravel_index(ids, shape), axis=1)
        chans = lattice[digits]
        coords = dense_coordinates(pmf, chans)
        val = sum(w * coords[k] for k, w in objective.items())
        ok = np.ones(len(ids), bool)
        for key, cap in feasibility.items():
            ok &= coords[key] <= cap
        val = np.where(ok, val, np.inf)
        i = int(np.argmin(val))
        if val[i] < best_val:
            best_val, best_id = float(val[i]), int(ids[i])
    if best_id < 0:
        raise ValidationError("no grid channel satisfies the feasibility filter")
    digits = np.array(np.unravel_index(best_id, shape))
    return best_val, AuxChannel.from_dense(lattice[digits])


def markov_grid(pmf: JointPMF, grid_step: float, objective, feasibility: dict | None = None):
    """Exhaustive grid over the binary channels that make X - U - Y exact.

    Only for full-support 2x2 pmfs with ``|U| = 2``. With ``t_xy = p(u=0|x,y)``
    the chain X - U - Y holds iff both slices p(x,y,u) have zero determinant:

        t00 t11 p00 p11 = t01 t10 p01 p10
        (1-t00)(1-t11) p00 p11 = (1-t01)(1-t10) p01 p10

    ``t00`` and ``t01`` run over the grid; the second equation is linear in
    ``t10`` once ``t11`` is eliminated with the first. Points whose solved
    rows leave [0, 1] are discarded. The identity channel rows (t in {0, 1})
    that make both slices degenerate are handled by the generic filter.
    Returns ``(value, AuxChannel)``.
    """
    if isinstance(objective, str):
        objective = {objective: 1.0}
    feasibility = feasibility or {}
    if pmf.shape != (2, 2) or len(pmf) != 4:
        raise ValidationError("markov_grid needs a full-support 2x2 pmf")
    d = pmf.dense()
    k = d[0, 1] * d[1, 0] / (d[0, 0] * d[1, 1])
    m = int(round(1.0 / grid_step))
    ticks = np.arange(m + 1) / m
    a, b = np.meshgrid(ticks, ticks, indexing="ij")
    a, b = a.ravel(), b.ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = k * (1 - b) - k * b * (1 - a) / a
        c = (k * (1 - b) - (1 - a)) / denom
        e = k * b * c / a
    ok = np.isfinite(c) & np.isfinite(e) & (c >= 0) & (c <= 1) & (e >= 0) & (e <= 1)
    a, b, c, e = a[ok], b[ok], c[ok], e[ok]
    if not len(a):
        raise ValidationError("no grid point lies on the Markov manifold")
    # Support order of a 2x2 full-support pmf is (0,0), (0,1), (1,0), (1,1).
    t = np.stack([a, b, c, e], axis=1)
    chans = np.stack([t, 1 - t], axis=2)
    coords = dense_coordinates(pmf, chans)
    val = sum(w * coords[key] for key, w in objective.items())
    keep = np.ones(len(val), bool)
    for key, cap in feasibility.items():
        keep &= coords[key] <= cap
    val = np.where(keep, val, np.inf)
    i = int(np.argmin(val))
    return float(val[i]), AuxChannel.from_dense(chans[i])
