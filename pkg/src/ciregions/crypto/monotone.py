"""Numerical checks of the information identities behind region monotonicity.

Each step draws random joints of a prescribed factorized form as dense
arrays (one axis per variable) and checks a list of equalities and
inequalities between conditional mutual informations. The dense evaluation
is deliberately independent of the sparse pmf code.

Step (d) superadditivity: the bound I(XU;YV|Q) >= I(X;Y|Q) + I(U;V|Q) is
false in general (X=Y, U=V uniform bits and Q = X xor U give 1 < 2). The
checked form conditions the second pair on (Q, X, Y), which is what the
region argument needs; see :func:`superadditivity_counterexample`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import IdentityViolation, ValidationError

TOL = 1e-9


class _Dense:
    """Dense joint pmf with named axes."""

    def __init__(self, p: np.ndarray, names: str):
        if p.ndim != len(names):
            raise ValidationError("one name per axis")
        self.p = p / p.sum()
        self.names = names

    def H(self, vars_: str) -> float:
        keep = {self.names.index(v) for v in vars_}
        drop = tuple(i for i in range(self.p.ndim) if i not in keep)
        m = self.p.sum(axis=drop) if drop else self.p
        m = m[m > 0]
        return float(-(m * np.log2(m)).sum())

    def I(self, a: str, b: str, c: str = "") -> float:
        """I(a; b | c); each argument is a string of variable names."""
        a, b, c = set(a), set(b), set(c)
        return self.H(a | c) + self.H(b | c) - self.H(a | b | c) - self.H(c)


def _cond(rng, cond_shape, k) -> np.ndarray:
    """Random conditional p(. | cond) with the new axis last."""
    return rng.dirichlet(np.ones(k), size=cond_shape)


def _joint(rng, shape) -> np.ndarray:
    return rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)


@dataclass(frozen=True)
class Check:
    step: str
    name: str
    kind: str  # "eq" or "ge"
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        """Signed margin; must be >= -TOL (and |.| <= TOL for equalities)."""
        d = self.lhs - self.rhs
        return -abs(d) if self.kind == "eq" else d

    @property
    def ok(self) -> bool:
        return self.slack >= -TOL


@dataclass
class StepSummary:
    step: str
    name: str
    kind: str
    trials: int = 0
    worst: float = np.inf

    @property
    def passed(self) -> bool:
        return self.worst >= -TOL

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        rel = "=" if self.kind == "eq" else ">="
        return f"{status} step ({self.step}) {self.name} [{rel}] trials={self.trials} worst_slack={self.worst:.3e}"


@dataclass
class MonotoneReport:
    seed: int
    trials: int
    summaries: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def add(self, check: Check, instance) -> None:
        key = (check.step, check.name)
        s = self.summaries.setdefault(key, StepSummary(check.step, check.name, check.kind))
        s.trials += 1
        s.worst = min(s.worst, check.slack)
        if not check.ok:
            self.failures.append((check, instance))

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list:
        return [s.line() for s in self.summaries.values()]

    def raise_on_failure(self) -> None:
        if self.failures:
            check, inst = self.failures[0]
            raise IdentityViolation(
                f"step ({check.step}) {check.name}: lhs={check.lhs!r} rhs={check.rhs!r}", instance=inst
            )


# ---- step (a): local computation, p(x,y) p(z|y) p(q|x,y)


def step_a_joint(rng, sizes=(2, 2, 2, 2)) -> _Dense:
    nx, ny, nz, nq = sizes
    pxy = _joint(rng, (nx, ny))
    pz_y = _cond(rng, (ny,), nz)
    pq_xy = _cond(rng, (nx, ny), nq)
    return _Dense(np.einsum("xy,yz,xyq->xyzq", pxy, pz_y, pq_xy), "XYZQ")


def step_a_checks(d: _Dense) -> list:
    return [
        Check("a", "I(X;YZ|Q) = I(X;Y|Q)", "eq", d.I("X", "YZ", "Q"), d.I("X", "Y", "Q")),
        Check("a", "I(Q;YZ|X) = I(Q;Y|X)", "eq", d.I("Q", "YZ", "X"), d.I("Q", "Y", "X")),
        Check("a", "I(X;Q|YZ) = I(X;Q|Y)", "eq", d.I("X", "Q", "YZ"), d.I("X", "Q", "Y")),
    ]


# ---- step (b): communication of F = f(X), p(x,y) p(q|x,y)


def step_b_joint(rng, f=None, sizes=(3, 2, 2)) -> _Dense:
    nx, ny, nq = sizes
    if f is None:
        f = rng.integers(0, 2, size=nx)
    f = np.asarray(f, dtype=int)
    nf = int(f.max()) + 1
    pxy = _joint(rng, (nx, ny))
    pq_xy = _cond(rng, (nx, ny), nq)
    pf_x = np.zeros((nx, nf))
    pf_x[np.arange(nx), f] = 1.0
    return _Dense(np.einsum("xy,xyq,xf->xyqf", pxy, pq_xy, pf_x), "XYQF")


def step_b_checks(d: _Dense) -> list:
    return [
        Check("b", "I(X;YF|QF) = I(X;Y|QF)", "eq", d.I("X", "YF", "QF"), d.I("X", "Y", "QF")),
        Check("b", "I(X;Y|Q) >= I(X;Y|QF)", "ge", d.I("X", "Y", "Q"), d.I("X", "Y", "QF")),
        Check("b", "I(X;QF|YF) = I(X;Q|YF)", "eq", d.I("X", "QF", "YF"), d.I("X", "Q", "YF")),
        Check("b", "I(X;Q|Y) >= I(X;Q|YF)", "ge", d.I("X", "Q", "Y"), d.I("X", "Q", "YF")),
        Check("b", "I(Y;QF|X) = I(Y;Q|X)", "eq", d.I("Y", "QF", "X"), d.I("Y", "Q", "X")),
    ]


# ---- step (c): secure derivation, p(u,v) p(x|u) p(y|v) p(q|x,u,v,y)


def step_c_joint(rng, sizes=(2, 2, 2, 2, 2), copies: bool = False) -> _Dense:
    """X - U - V and U - V - Y; ``copies`` sets X = U and Y = V."""
    nu, nv, nx, ny, nq = sizes
    puv = _joint(rng, (nu, nv))
    if copies:
        nx, ny = nu, nv
        px_u, py_v = np.eye(nu), np.eye(nv)
    else:
        px_u = _cond(rng, (nu,), nx)
        py_v = _cond(rng, (nv,), ny)
    pq = _cond(rng, (nx, nu, nv, ny), nq)
    return _Dense(np.einsum("uv,ux,vy,xuvyq->xuvyq", puv, px_u, py_v, pq), "XUVYQ")


def step_c_checks(d: _Dense) -> list:
    return [
        Check("c", "I(XU;YV|Q) >= I(U;V|Q)", "ge", d.I("XU", "YV", "Q"), d.I("U", "V", "Q")),
        Check(
            "c",
            "I(XU;QY|V) = I(U;QY|V) + I(X;QY|UV)",
            "eq",
            d.I("XU", "QY", "V"),
            d.I("U", "QY", "V") + d.I("X", "QY", "UV"),
        ),
        Check("c", "I(XU;Y|V) = I(X;Y|UV)", "eq", d.I("XU", "Y", "V"), d.I("X", "Y", "UV")),
        Check("c", "I(XU;Q|YV) >= I(U;Q|V)", "ge", d.I("XU", "Q", "YV"), d.I("U", "Q", "V")),
        Check("c", "I(YV;Q|XU) >= I(V;Q|U)", "ge", d.I("YV", "Q", "XU"), d.I("V", "Q", "U")),
    ]


def step_c_copy_checks(d: _Dense) -> list:
    """With X = U and Y = V the three bounds are equalities."""
    return [
        Check("c", "copies: I(XU;YV|Q) = I(U;V|Q)", "eq", d.I("XU", "YV", "Q"), d.I("U", "V", "Q")),
        Check("c", "copies: I(XU;Q|YV) = I(U;Q|V)", "eq", d.I("XU", "Q", "YV"), d.I("U", "Q", "V")),
        Check("c", "copies: I(YV;Q|XU) = I(V;Q|U)", "eq", d.I("YV", "Q", "XU"), d.I("V", "Q", "U")),
    ]


# ---- step (d): independent pairs


def step_d_product_joint(rng, sizes=(2, 2, 2, 2, 2, 2)) -> _Dense:
    """p(x,y) p(u,v) p(q1|x,y) p(q2|u,v); axes X Y U V A(=Q1) B(=Q2)."""
    nx, ny, nu, nv, n1, n2 = sizes
    j = np.einsum(
        "xy,uv,xya,uvb->xyuvab",
        _joint(rng, (nx, ny)),
        _joint(rng, (nu, nv)),
        _cond(rng, (nx, ny), n1),
        _cond(rng, (nu, nv), n2),
    )
    return _Dense(j, "XYUVAB")


def step_d_product_checks(d: _Dense) -> list:
    return [
        Check("d", "I(XU;YV|Q1Q2) = I(X;Y|Q1) + I(U;V|Q2)", "eq", d.I("XU", "YV", "AB"), d.I("X", "Y", "A") + d.I("U", "V", "B")),
        Check("d", "I(XU;Q1Q2|YV) = I(X;Q1|Y) + I(U;Q2|V)", "eq", d.I("XU", "AB", "YV"), d.I("X", "A", "Y") + d.I("U", "B", "V")),
        Check("d", "I(YV;Q1Q2|XU) = I(Y;Q1|X) + I(V;Q2|U)", "eq", d.I("YV", "AB", "XU"), d.I("Y", "A", "X") + d.I("V", "B", "U")),
    ]


def step_d_joint(rng, sizes=(2, 2, 2, 2, 3)) -> _Dense:
    """p(x,y) p(u,v) p(q|x,y,u,v)."""
    nx, ny, nu, nv, nq = sizes
    j = np.einsum("xy,uv,xyuvq->xyuvq", _joint(rng, (nx, ny)), _joint(rng, (nu, nv)), _cond(rng, (nx, ny, nu, nv), nq))
    return _Dense(j, "XYUVQ")


def step_d_checks(d: _Dense) -> list:
    """Superadditivity with Q1 = Q for (X, Y) and Q2 = (Q, X, Y) for (U, V)."""
    return [
        Check("d", "I(XU;YV|Q) >= I(X;Y|Q) + I(U;V|QXY)", "ge", d.I("XU", "YV", "Q"), d.I("X", "Y", "Q") + d.I("U", "V", "QXY")),
        Check("d", "I(XU;Q|YV) >= I(X;Q|Y) + I(U;Q|V)", "ge", d.I("XU", "Q", "YV"), d.I("X", "Q", "Y") + d.I("U", "Q", "V")),
        Check("d", "I(YV;Q|XU) >= I(Y;Q|X) + I(V;Q|U)", "ge", d.I("YV", "Q", "XU"), d.I("Y", "Q", "X") + d.I("V", "Q", "U")),
        Check("d", "I(XU;Q|YV) >= I(X;Q|Y) + I(U;QXY|V)", "ge", d.I("XU", "Q", "YV"), d.I("X", "Q", "Y") + d.I("U", "QXY", "V")),
        Check("d", "I(YV;Q|XU) >= I(Y;Q|X) + I(V;QXY|U)", "ge", d.I("YV", "Q", "XU"), d.I("Y", "Q", "X") + d.I("V", "QXY", "U")),
    ]


def superadditivity_counterexample() -> tuple:
    """(I(XU;YV|Q), I(X;Y|Q) + I(U;V|Q)) for X=Y, U=V uniform bits, Q = X xor U: (1, 2)."""
    p = np.zeros((2, 2, 2, 2, 2))
    for x in range(2):
        for u in range(2):
            p[x, x, u, u, x ^ u] = 0.25
    d = _Dense(p, "XYUVQ")
    return d.I("XU", "YV", "Q"), d.I("X", "Y", "Q") + d.I("U", "V", "Q")


STEPS = {
    "a": (step_a_joint, step_a_checks),
    "b": (step_b_joint, step_b_checks),
    "c": (step_c_joint, step_c_checks),
    "d": (step_d_joint, step_d_checks),
}


def _variants():
    """Extra families run alongside the main steps."""
    return [
        ("b", lambda rng: step_b_joint(rng, f=np.zeros(3, dtype=int)), _b_constant_checks),
        ("b", lambda rng: step_b_joint(rng, f=np.arange(3)), _b_identity_checks),
        ("c", lambda rng: step_c_joint(rng, copies=True), step_c_copy_checks),
        ("d", step_d_product_joint, step_d_product_checks),
    ]


def _b_constant_checks(d: _Dense) -> list:
    """Constant f: the two inequality lines are tight."""
    return [
        Check("b", "f const: I(X;Y|QF) = I(X;Y|Q)", "eq", d.I("X", "Y", "QF"), d.I("X", "Y", "Q")),
        Check("b", "f const: I(X;Q|YF) = I(X;Q|Y)", "eq", d.I("X", "Q", "YF"), d.I("X", "Q", "Y")),
    ] + step_b_checks(d)


def _b_identity_checks(d: _Dense) -> list:
    """f = identity: X is revealed, so the conditioned terms vanish."""
    return [
        Check("b", "f = id: I(X;Y|QF) = 0", "eq", d.I("X", "Y", "QF"), 0.0),
        Check("b", "f = id: I(X;Q|YF) = 0", "eq", d.I("X", "Q", "YF"), 0.0),
    ] + step_b_checks(d)


def monotone_step_checks(seed: int = 0, trials: int = 100, steps: str = "abcd", raise_on_failure: bool = False) -> MonotoneReport:
    """Run ``trials`` random instances of each step (and its variants)."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    families = [(s, *STEPS[s]) for s in steps] + [v for v in _variants() if v[0] in steps]
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(len(families))]
    report = MonotoneReport(seed, trials)
    for (_, make, checks), rng in zip(families, rngs):
        for t in range(trials):
            d = make(rng)
            for c in checks(d):
                report.add(c, {"trial": t, "axes": d.names, "pmf": d.p.tolist()})
    if raise_on_failure:
        report.raise_on_failure()
    return report
