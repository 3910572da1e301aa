"""Multi-restart local search over auxiliary channels.

Every objective used here is a linear combination of the coordinates in
:data:`ciregions.channel.COORD_LABELS`, and each coordinate is a linear
combination of H(U), H(X,U), H(Y,U), H(X,Y,U) plus a constant. The engine
therefore only needs the four channel-dependent entropies and their
gradients. Restarts are evaluated as one batch (axis 0) but evolve
independently, so adding restarts never changes the earlier ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .channel import (
    ACI,
    GW,
    AuxChannel,
    OptimizerConfig,
    Weights3,
    _canonical_tag,
    default_u_size,
    objective_value,
    coordinate_values,
)
from .errors import OptimizerDidNotConverge, ValidationError
from .pmf import JointPMF, entropy

log = logging.getLogger(__name__)

_LN2 = np.log(2.0)
_TINY = 1e-300
_ETA_MIN = 1e-12

# Coefficients on (H(U), H(X,U), H(Y,U), H(X,Y,U)) and the constant's
# coefficients on (H(X), H(Y), H(X,Y)).
_ENTROPY_FORM = {
    "r1": ((0, 1, 0, -1), (-1, 0, 1)),
    "r2": ((0, 0, 1, -1), (0, -1, 1)),
    "rd": ((-1, 1, 1, -1), (0, 0, 0)),
    "ra": ((-1, 1, 0, 0), (0, 0, 0)),
    "rb": ((-1, 0, 1, 0), (0, 0, 0)),
    "rc": ((1, 0, 0, -1), (0, 0, 1)),
}


def _as_objective(objective) -> dict:
    if isinstance(objective, str):
        objective = {objective: 1.0}
    objective = {k: float(v) for k, v in dict(objective).items() if v != 0}
    for k in objective:
        if k not in _ENTROPY_FORM:
            raise ValidationError(f"unknown coordinate {k!r}")
    if not objective:
        raise ValidationError("empty objective")
    return objective


def _linear_form(objective: Mapping[str, float]) -> tuple:
    coef = np.zeros(4)
    const = np.zeros(3)
    for k, w in objective.items():
        c, d = _ENTROPY_FORM[k]
        coef += w * np.asarray(c, float)
        const += w * np.asarray(d, float)
    return coef, const


def weighted_objective(weights: Weights3, tag: str) -> dict:
    keys = ACI if _canonical_tag(tag) == "aci" else GW
    return {k: w for k, w in zip(keys, weights.w) if w != 0}


class _Problem:
    """Batched evaluation of linear entropy objectives for one pmf."""

    def __init__(self, pmf: JointPMF, u_size: int):
        if pmf.num_vars != 2:
            raise ValidationError("channel search needs a pair distribution")
        self.u_size = u_size
        self.p = pmf.probs.copy()
        self.xs = pmf.indices[:, 0].copy()
        self.ys = pmf.indices[:, 1].copy()
        nx, ny = pmf.shape
        self.mx = np.zeros((len(self.p), nx))
        self.mx[np.arange(len(self.p)), self.xs] = 1.0
        self.my = np.zeros((len(self.p), ny))
        self.my[np.arange(len(self.p)), self.ys] = 1.0
        self.hsrc = np.array([entropy(pmf, 0), entropy(pmf, 1), entropy(pmf, (0, 1))])

    def marginals(self, w):
        joint = self.p[None, :, None] * w
        pu = joint.sum(axis=1)
        pxu = np.einsum("rsk,sx->rxk", joint, self.mx)
        pyu = np.einsum("rsk,sy->ryk", joint, self.my)
        return joint, pu, pxu, pyu

    @staticmethod
    def _h(q, axes):
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(q > 0, q * np.log(np.maximum(q, _TINY)), 0.0)
        return -t.sum(axis=axes) / _LN2

    def entropies(self, w) -> np.ndarray:
        joint, pu, pxu, pyu = self.marginals(w)
        return np.stack(
            [self._h(pu, 1), self._h(pxu, (1, 2)), self._h(pyu, (1, 2)), self._h(joint, (1, 2))],
            axis=1,
        )

    def value(self, w, coef, const) -> np.ndarray:
        return self.entropies(w) @ coef + self.hsrc @ const

    def row_gradient(self, w, coef) -> np.ndarray:
        """Gradient divided by p(x,y), up to per-row constants."""
        joint, pu, pxu, pyu = self.marginals(w)
        lpu = np.log(np.maximum(pu, _TINY))[:, None, :]
        lpxu = np.log(np.maximum(pxu[:, self.xs, :], _TINY))
        lpyu = np.log(np.maximum(pyu[:, self.ys, :], _TINY))
        lw = np.log(np.maximum(w, _TINY))
        return -(coef[0] * lpu + coef[1] * lpxu + coef[2] * lpyu + coef[3] * lw) / _LN2


def _eg_step(w, grad, eta):
    logits = np.log(np.maximum(w, _TINY)) - eta[:, None, None] * grad
    logits -= logits.max(axis=2, keepdims=True)
    out = np.exp(logits)
    out /= out.sum(axis=2, keepdims=True)
    return out


def _local_search(problem: _Problem, w, coef, const, config: OptimizerConfig, active=None):
    """Exponentiated-gradient descent with per-restart backtracking.

    Returns (w, values, converged) with one entry per restart.
    """
    w = w.copy()
    r = w.shape[0]
    eta = np.full(r, float(config.step))
    f = problem.value(w, coef, const)
    active = np.ones(r, bool) if active is None else active.copy()
    converged = np.zeros(r, bool)
    for _ in range(config.max_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        wa = w[idx]
        cand = _eg_step(wa, problem.row_gradient(wa, coef), eta[idx])
        fc = problem.value(cand, coef, const)
        gain = f[idx] - fc
        better = gain > 0
        acc = idx[better]
        w[acc] = cand[better]
        f[acc] = fc[better]
        eta[acc] *= 1.5
        rej = idx[~better]
        eta[rej] *= 0.5
        done = np.zeros(len(idx), bool)
        done[better] = gain[better] < config.tolerance
        done |= eta[idx] < _ETA_MIN
        converged[idx[done]] = True
        active[idx[done]] = False
    return w, f, converged


def initial_channels(num_rows: int, u_size: int, config: OptimizerConfig) -> np.ndarray:
    """Dirichlet(1) rows, one independent stream per restart."""
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    out = np.empty((config.restarts, num_rows, u_size))
    for i, s in enumerate(seeds):
        out[i] = np.random.default_rng(s).dirichlet(np.ones(u_size), size=num_rows)
    return out


def deterministic_channels(pmf: JointPMF, u_size: int) -> np.ndarray:
    """Channels U = X, U = Y and U = (X, Y) that fit in ``u_size`` letters.

    All three satisfy X - U - Y, and U = X or U = Y also zero one of the
    conditional informations, so they are always-feasible warm starts for
    the zero-residual problems.
    """
    labels = [pmf.indices[:, 0], pmf.indices[:, 1], np.arange(len(pmf))]
    out = []
    for lab in labels:
        _, lab = np.unique(lab, return_inverse=True)
        if lab.max() < u_size:
            w = np.zeros((len(pmf), u_size))
            w[np.arange(len(pmf)), lab] = 1.0
            out.append(w)
    return np.array(out).reshape(len(out), len(pmf), u_size)


@dataclass(frozen=True)
class SearchResult:
    value: float
    channel: AuxChannel
    converged: bool
    restart: int
    constraint_values: dict | None = None

    def __iter__(self):
        # Allows ``value, channel = scalarized_search(...)``.
        return iter((self.value, self.channel))


def _u_size(pmf: JointPMF, config: OptimizerConfig) -> int:
    return config.u_size if config.u_size is not None else default_u_size(pmf)


def minimize_objective(pmf: JointPMF, objective, config: OptimizerConfig | None = None) -> SearchResult:
    """Unconstrained minimum of a linear coordinate combination (best of restarts)."""
    config = config or OptimizerConfig()
    objective = _as_objective(objective)
    problem = _Problem(pmf, _u_size(pmf, config))
    coef, const = _linear_form(objective)
    w0 = initial_channels(len(pmf), problem.u_size, config)
    w, f, conv = _local_search(problem, w0, coef, const, config)
    best = int(np.argmin(f))
    channel = AuxChannel.from_dense(w[best])
    value = objective_value(pmf, channel, objective)
    return SearchResult(value, channel, bool(conv[best]), best)


def scalarized_search(pmf: JointPMF, weights: Weights3, coords: str = "aci", config: OptimizerConfig | None = None) -> SearchResult:
    """Minimize ``weights . coords(U)`` over channels; returns value and witness."""
    return minimize_objective(pmf, weighted_objective(weights, coords), config)


def penalized_search(pmf: JointPMF, objective, constraints, config: OptimizerConfig | None = None) -> SearchResult:
    """Minimize ``objective`` subject to each constraint coordinate being zero.

    The constrained coordinates are nonnegative, so the penalty is
    ``mu * sum(constraints)`` with ``mu`` stepped through the configured
    schedule, warm-starting every stage from the previous one. The random
    restarts are joined by the deterministic channels U = X, U = Y and
    U = (X, Y), which lie exactly on the zero-residual face; they are also
    kept as undescended candidates, so a feasible witness always exists
    when one of them satisfies the constraints.
    """
    config = config or OptimizerConfig()
    objective = _as_objective(objective)
    constraints = tuple(constraints)
    for k in constraints:
        if k not in _ENTROPY_FORM:
            raise ValidationError(f"unknown constraint coordinate {k!r}")
    problem = _Problem(pmf, _u_size(pmf, config))
    coef_f, const_f = _linear_form(objective)
    coef_g, const_g = _linear_form({k: 1.0 for k in constraints}) if constraints else (np.zeros(4), np.zeros(3))
    w = initial_channels(len(pmf), problem.u_size, config)
    seeds = deterministic_channels(pmf, problem.u_size) if constraints else w[:0]
    # Penalized descent from the interior can stall just short of an
    # exactly-zero constraint; the deterministic channels sit on it. They
    # are descended from and also kept unchanged as fallback candidates.
    w = np.concatenate([w, seeds])
    conv = np.zeros(w.shape[0], bool)
    schedule = config.penalty_schedule if constraints else (0.0,)
    for mu in schedule:
        w, _, conv = _local_search(problem, w, coef_f + mu * coef_g, const_f + mu * const_g, config)
    w = np.concatenate([w, seeds])
    conv = np.concatenate([conv, np.ones(len(seeds), bool)])
    f = problem.value(w, coef_f, const_f)
    g = problem.value(w, coef_g, const_g) if constraints else np.zeros(w.shape[0])
    feasible = g <= config.feasibility_tol
    if not feasible.any():
        best = int(np.argmin(g))
        channel = AuxChannel.from_dense(w[best])
        raise OptimizerDidNotConverge(
            f"no restart reached constraint level {config.feasibility_tol:g} (best {g[best]:.3e})",
            best=SearchResult(float(f[best]), channel, False, best),
        )
    masked = np.where(feasible, f, np.inf)
    best = int(np.argmin(masked))
    channel = AuxChannel.from_dense(w[best])
    values = coordinate_values(pmf, channel, tuple(set(objective) | set(constraints)))
    value = float(sum(wt * values[k] for k, wt in objective.items()))
    cvals = {k: values[k] for k in constraints}
    if sum(cvals.values()) > config.feasibility_tol:
        raise OptimizerDidNotConverge(
            f"witness violates constraints on re-evaluation: {cvals}",
            best=SearchResult(value, channel, False, best, cvals),
        )
    log.debug("penalized_search: best restart %d value %.9f constraints %s", best, value, cvals)
    return SearchResult(value, channel, bool(conv[best]), best, cvals)
