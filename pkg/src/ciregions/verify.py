"""Seeded verification suites driven by the ``verify`` command.

Every suite returns a list of :class:`SuiteLine`; a suite passes when all
of its lines do. Output depends only on the seed and the arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import AuxChannel, aci_coordinates, coordinate_values, gw_coordinates, source_entropies
from .common import brute_force_gk, gk_common_information, residual_info_zero
from .grid import dense_coordinates
from .pmf import JointPMF, conditional_mutual_information, entropy, mutual_information
from .regions import affine_map_f, lgw_membership

TOL = 1e-9
SUITES = ("identities", "monotone-steps", "bitot-lemma", "theorem1")


@dataclass(frozen=True)
class SuiteLine:
    name: str
    passed: bool
    detail: str

    def text(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def random_pmf(rng: np.random.Generator, max_x: int = 4, max_y: int = 4, sparse: bool = True) -> JointPMF:
    """Random joint pmf on up to ``max_x x max_y`` letters, optionally with zeros."""
    nx, ny = int(rng.integers(1, max_x + 1)), int(rng.integers(1, max_y + 1))
    p = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
    if sparse:
        mask = rng.random((nx, ny)) < 0.35
        mask.flat[int(rng.integers(nx * ny))] = False
        p[mask] = 0.0
        p /= p.sum()
    return JointPMF.from_array(p)


def random_channel(rng: np.random.Generator, pmf: JointPMF, max_u: int = 6) -> AuxChannel:
    k = int(rng.integers(1, max_u + 1))
    return AuxChannel.from_dense(rng.dirichlet(np.ones(k), size=len(pmf)))


def theorem1_suite(seed: int = 0, trials: int = 200) -> list:
    """f(GW coordinates) = ACI coordinates, and GW points lie in L_GW."""
    rng = np.random.default_rng(seed)
    dev, outside = 0.0, 0
    for _ in range(trials):
        pmf = random_pmf(rng)
        ch = random_channel(rng, pmf)
        hx, hy, hxy = source_entropies(pmf)
        gw = gw_coordinates(pmf, ch)
        img = affine_map_f(hx, hy, hxy, gw)
        dev = max(dev, float(np.max(np.abs(img.array() - aci_coordinates(pmf, ch).array()))))
        outside += not lgw_membership(gw, hx, hy, hxy)
    return [
        SuiteLine("theorem1 affine map", dev <= TOL, f"{trials} pmf/channel pairs, max deviation {dev:.3e}"),
        SuiteLine("theorem1 L_GW membership", outside == 0, f"{outside} of {trials} GW points outside L_GW"),
    ]


def identities_suite(seed: int = 0, trials: int = 100) -> list:
    """Cross-checks between independent evaluation paths and basic identities."""
    rng = np.random.default_rng(seed)
    path_dev = chain_dev = gk_dev = 0.0
    neg = 0
    for _ in range(trials):
        pmf = random_pmf(rng)
        ch = random_channel(rng, pmf)
        sparse = coordinate_values(pmf, ch)
        dense = dense_coordinates(pmf, ch.dense()[None])
        path_dev = max(path_dev, max(abs(sparse[k] - float(dense[k][0])) for k in sparse))
        mi = mutual_information(pmf, 0, 1)
        chain = entropy(pmf, [0]) + entropy(pmf, [1]) - entropy(pmf, [0, 1])
        cmi = conditional_mutual_information(pmf, 0, 1)
        chain_dev = max(chain_dev, abs(mi - chain), abs(mi - cmi))
        gk_dev = max(gk_dev, abs(gk_common_information(pmf).value - brute_force_gk(pmf)))
        neg += residual_info_zero(pmf).value < 0
    return [
        SuiteLine("identities sparse vs dense coordinates", path_dev <= TOL, f"max deviation {path_dev:.3e}"),
        SuiteLine("identities I = H(X)+H(Y)-H(XY)", chain_dev <= TOL, f"max deviation {chain_dev:.3e}"),
        SuiteLine("identities GK vs brute force", gk_dev <= TOL, f"max deviation {gk_dev:.3e}"),
        SuiteLine("identities R_RD-0 >= 0", neg == 0, f"{neg} negative values"),
    ]


def monotone_suite(seed: int = 0, trials: int = 100) -> list:
    from .crypto.monotone import monotone_step_checks

    report = monotone_step_checks(seed, trials)
    return [
        SuiteLine(f"monotone ({s.step}) {s.name}", s.passed, f"trials={s.trials} worst slack {s.worst:.3e}")
        for s in report.summaries.values()
    ]


def bitot_suite(
    seed: int = 0,
    draws: int = 100_000,
    grid_step: float = 0.05,
    refine_step: float = 0.01,
    channel_samples: int = 200,
) -> list:
    """Sup oracle, its two analytic bounds, and the closed form vs channel path."""
    from .crypto import bitot

    rng = np.random.default_rng(seed)
    out = []
    oracle = bitot.bit_ot_sup_oracle(grid_step, refine_step)
    out.append(
        SuiteLine("bitot sup oracle", abs(oracle.value - 1.0) <= bitot.SUP_TOL, f"sup = {oracle.value:.6f} (target 1 +/- 1e-3)")
    )
    p = rng.random((draws, 8))
    hb, ha = bitot.h_b_given_qa(p), bitot.h_a_given_qb(p)
    vb = int(np.sum(hb > bitot.upper_bound_b(p) + TOL))
    va = int(np.sum(ha > bitot.upper_bound_a(p) + TOL))
    vs = int(np.sum(ha + hb > 1.0 + TOL))
    out.append(SuiteLine("bitot H(B|Q,A) bound", vb == 0, f"{vb} violations in {draws} draws"))
    out.append(SuiteLine("bitot H(A|Q,B) bound", va == 0, f"{va} violations in {draws} draws"))
    out.append(SuiteLine("bitot sum <= 1", vs == 0, f"{vs} violations in {draws} draws"))
    # Closed form vs explicit channel on a random subset of the oracle grid.
    m = int(round(1 / grid_step))
    grid_pts = rng.integers(0, m + 1, size=(channel_samples, 8)) / m
    dev = cmi = 0.0
    for q in grid_pts:
        obj, i_ab = bitot.channel_objective(q)
        dev = max(dev, abs(obj - float(bitot.closed_form_objective(q))))
        cmi = max(cmi, abs(i_ab))
    out.append(SuiteLine("bitot closed form vs channel", dev <= 1e-12, f"{channel_samples} grid points, max deviation {dev:.3e}"))
    out.append(SuiteLine("bitot I(A;B|Q) = 0", cmi <= 1e-12, f"max {cmi:.3e}"))
    m1, m2 = rng.random(1000) + 1e-3, rng.random(1000) + 1e-3
    gain = bitot.jensen_merge_gain(m1, rng.random(1000), m2, rng.random(1000))
    out.append(SuiteLine("bitot merge never decreases", bool(np.all(gain >= -TOL)), f"min gain {float(gain.min()):.3e}"))
    report = bitot.bit_ot_pair_min_sum_zero(oracle)
    out.append(SuiteLine("bitot pair min-sum", report.value == 2.0, f"value {report.value:g} ({report.certified})"))
    return out


def run_suite(name: str, seed: int = 0, trials: int | None = None) -> list:
    if name == "theorem1":
        return theorem1_suite(seed, trials or 200)
    if name == "identities":
        return identities_suite(seed, trials or 100)
    if name == "monotone-steps":
        return monotone_suite(seed, trials or 100)
    if name == "bitot-lemma":
        return bitot_suite(seed, draws=trials or 100_000)
    raise KeyError(name)
