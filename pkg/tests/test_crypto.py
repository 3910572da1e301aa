import numpy as np
import pytest

from ciregions.channel import OptimizerConfig, aci_coordinates, joint_with_channel
from ciregions.common import EXACT, gk_common_information, wyner_common_information
from ciregions.crypto import bitot
from ciregions.crypto.bounds import (
    TargetConstraint,
    aci_efficiency_bound,
    analytic_source_points,
    axis_intercepts,
    bit_ot_pair_constraints,
    bit_ot_pair_intercepts,
    string_ot_pair,
    string_ot_source_points,
    ww_bound,
)
from ciregions.crypto.monotone import monotone_step_checks, superadditivity_counterexample
from ciregions.crypto.ot import make_bit_ot, make_bit_ot_pair, make_string_ot_pair, paper_channel, unpack
from ciregions.errors import IdentityViolation, NoPositiveConstraint, OracleNotRun, SizeGuard, ValidationError, ZeroTargetIntercept
from ciregions.pmf import JointPMF, conditional_entropy, entropy, independent_join, mutual_information


@pytest.fixture(scope="module")
def oracle():
    return bitot.bit_ot_sup_oracle(0.05, 0.01)


# ---- distributions


def test_string_ot_sizes():
    p = make_string_ot_pair(1)
    assert len(p) == 64 and np.allclose(p.probs, 1 / 64)
    assert entropy(p, [0]) == pytest.approx(4.0)
    with pytest.raises(SizeGuard):
        make_string_ot_pair(6)
    with pytest.raises(ValidationError):
        make_string_ot_pair(0)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_string_ot_structure(L):
    p = make_string_ot_pair(L)
    assert len(p) == 2 ** (4 * L + 2)
    assert entropy(p, [0]) == pytest.approx(3 * L + 1)
    assert mutual_information(p, 0, 1) == pytest.approx(2 * L)
    assert gk_common_information(p).value == 0.0
    # each side's received string is the other side's chosen string
    ca, a1, a2, a_recv = unpack(p.indices[:, 0], L)
    cb, b1, b2, b_recv = unpack(p.indices[:, 1], L)
    assert np.array_equal(a_recv, np.where(ca == 0, b1, b2))
    assert np.array_equal(b_recv, np.where(cb == 0, a1, a2))


def test_string_ot_is_join_of_two_single_ots():
    # Single string-OT (L=1): sender S=(S1,S2), receiver (C, S_C); the pair
    # joins one in each direction. Compare entropy profiles of the join.
    sender, receiver = [], []
    for s1 in range(2):
        for s2 in range(2):
            for c in range(2):
                sender.append(s1 * 2 + s2)
                receiver.append(c * 2 + (s1 if c == 0 else s2))
    single = np.zeros((4, 4))
    np.add.at(single, (sender, receiver), 1 / 8)
    fwd = JointPMF.from_array(single)
    join = independent_join(fwd, JointPMF.from_array(single.T))
    pair = make_string_ot_pair(1)
    for f in (lambda q: entropy(q, [0, 1]), lambda q: mutual_information(q, 0, 1), lambda q: entropy(q, [0])):
        assert f(join) == pytest.approx(f(pair), abs=1e-12)
    assert len(join) == len(pair)


def test_bit_ot():
    b = make_bit_ot()
    assert len(b) == 8 and np.allclose(b.probs, 1 / 8)
    assert conditional_entropy(b, 0, 1) + conditional_entropy(b, 1, 0) == pytest.approx(2.0)
    from ciregions.common import gk_decomposition

    assert gk_decomposition(b).num_components == 1
    assert make_bit_ot_pair().fingerprint() == make_string_ot_pair(1).fingerprint()


@pytest.mark.parametrize("L", [1, 2, 3])
def test_paper_channel_point(L):
    p = make_string_ot_pair(L)
    assert aci_coordinates(p, paper_channel(p)).values == pytest.approx((1, 1, 0), abs=1e-9)


# ---- bit-OT class family


def test_class_examples():
    assert float(bitot.closed_form_objective(np.full(8, 0.5))) == pytest.approx(1.0, abs=1e-15)
    for const in (np.zeros(8), np.ones(8)):
        assert float(bitot.closed_form_objective(const)) == 0.0
    # Binary parameters give 0 exactly when Q pins down (A, B); a letter that
    # collects two whole edges contributes 2/8 * H2(1/2).
    for bits in np.random.default_rng(0).integers(0, 2, size=(30, 8)):
        bits = bits.astype(float)
        j = joint_with_channel(make_bit_ot(), bitot.class_channel(bits))
        determined = conditional_entropy(j, [0, 1], 2) <= 1e-12
        value = float(bitot.closed_form_objective(bits))
        assert (value == 0.0) == determined
        assert value == pytest.approx(0.25 * round(value / 0.25), abs=1e-12)


def test_class_channel_paths():
    rng = np.random.default_rng(1)
    for q in rng.random((50, 8)):
        obj, cmi = bitot.channel_objective(q)
        assert obj == pytest.approx(float(bitot.closed_form_objective(q)), abs=1e-12)
        assert cmi <= 1e-12


def test_class_constraint_equations():
    # Each edge's two letters share its mass, e.g. p(q1|00,10) + p(q5|00,10) = 1.
    ch = bitot.class_channel(np.random.default_rng(2).random(8)).dense()
    assert np.allclose(ch.sum(axis=1), 1)
    assert np.all((ch > 0).sum(axis=1) <= 2)
    with pytest.raises(ValidationError):
        bitot.class_channel(np.full(8, 1.5))


def test_bounds_on_random_draws():
    p = np.random.default_rng(3).random((20000, 8))
    hb, ha = bitot.h_b_given_qa(p), bitot.h_a_given_qb(p)
    assert np.all(hb <= bitot.upper_bound_b(p) + 1e-12)
    assert np.all(ha <= bitot.upper_bound_a(p) + 1e-12)
    assert np.all(ha + hb <= 1 + 1e-12)


def test_jensen_merge():
    rng = np.random.default_rng(4)
    gain = bitot.jensen_merge_gain(rng.random(500) + 1e-3, rng.random(500), rng.random(500) + 1e-3, rng.random(500))
    assert np.all(gain >= -1e-12)


def test_cycle_dp_matches_enumeration():
    grid = np.linspace(0, 1, 4)
    pts = np.stack(np.meshgrid(*[grid] * 8, indexing="ij"), axis=-1).reshape(-1, 8)
    brute = float(np.max(bitot.closed_form_objective(pts)))
    val, _ = bitot._cycle_max([grid] * 8)
    assert val == pytest.approx(brute, abs=1e-12)


def test_oracle(oracle):
    assert oracle.value == pytest.approx(1.0, abs=1e-3)
    assert float(bitot.closed_form_objective(oracle.params)) == pytest.approx(oracle.value, abs=1e-12)
    assert oracle.value >= oracle.coarse_value
    with pytest.raises(ValidationError):
        bitot.bit_ot_sup_oracle(0.5)


def test_min_sum(oracle):
    rep = bitot.bit_ot_pair_min_sum_zero(oracle)
    assert rep.value == 2.0 and rep.certified == EXACT
    with pytest.raises(OracleNotRun):
        bitot.bit_ot_pair_min_sum_zero(None)


def test_min_sum_vs_wyner():
    pair = make_bit_ot_pair()
    cfg = OptimizerConfig(restarts=16, u_size=16)
    w = wyner_common_information(pair, cfg).value
    assert w - mutual_information(pair, 0, 1) == pytest.approx(2.0, abs=5e-3)


# ---- bounds


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_bounds_ot(oracle, L):
    src = string_ot_pair(L)
    pts = [(lab, v) for lab, v, _ in string_ot_source_points(src)]
    aci = aci_efficiency_bound(pts, bit_ot_pair_constraints(oracle))
    ww = ww_bound(axis_intercepts(src), bit_ot_pair_intercepts(oracle))
    assert aci.bound == 1.0
    assert ww.bound == (1 + L) / 2
    binding = [c for c in aci.certificates if c.get("binding")]
    assert binding[0]["point"] == [1.0, 1.0, 0.0] and binding[0]["constraint"]["h"] == 2.0


def test_intercepts():
    assert [r.value for r in axis_intercepts(string_ot_pair(2))] == [3, 3, 4]
    ind = JointPMF.from_array(np.outer([0.5, 0.5], [0.2, 0.8]))
    vals = [r.value for r in axis_intercepts(ind, OptimizerConfig(restarts=4))]
    assert vals == pytest.approx([0, 0, 0], abs=1e-6)


def test_bitot_pair_intercepts(oracle):
    assert [r.value for r in bit_ot_pair_intercepts(oracle)] == [2, 2, 2]


def test_ww_examples():
    assert ww_bound((3, 3, 4), (2, 2, 2)).bound == 1.5
    assert ww_bound((2, 2, 2), (2, 2, 2)).bound == 1.0
    assert ww_bound((1, 2, 3), (1, 2, 3)).bound == 1.0
    with pytest.raises(ZeroTargetIntercept):
        ww_bound((1, 1, 1), (1, 0, 1))


def test_ww_equals_axis_region_bound():
    # With only the three axis points and axis constraints both bounds agree.
    rng = np.random.default_rng(7)
    for _ in range(20):
        s, t = rng.random(3) * 4 + 0.1, rng.random(3) * 4 + 0.1
        pts = [tuple(s[i] * (np.arange(3) == i)) for i in range(3)]
        faces = ((1, 2), (0, 2), (0, 1))
        cons = [TargetConstraint(tuple(float(j == i) for j in range(3)), t[i], faces[i]) for i in range(3)]
        assert aci_efficiency_bound(pts, cons).bound == pytest.approx(ww_bound(s, t).bound, abs=1e-12)


def test_same_region_bound_at_least_one(dsbs):
    pts = [(lab, v) for lab, v, _ in analytic_source_points(dsbs)]
    ints = axis_intercepts(dsbs, OptimizerConfig(restarts=4))
    faces = ((1, 2), (0, 2), (0, 1))
    # Only the exact intercept (R_RD-0) is a valid outer constraint here.
    cons = [TargetConstraint((0, 0, 1), ints[2].value, faces[2])]
    assert aci_efficiency_bound(pts, cons).bound >= 1 - 1e-12


def test_constraint_errors():
    with pytest.raises(NoPositiveConstraint):
        aci_efficiency_bound([(1, 1, 0)], [TargetConstraint((1, 1, 0), 0.0, (2,))])
    with pytest.raises(NoPositiveConstraint):
        aci_efficiency_bound([(1, 1, 1)], [TargetConstraint((1, 1, 0), 2.0, (2,))])
    with pytest.raises(ValidationError):
        TargetConstraint((-1, 0, 0), 1.0)
    c = TargetConstraint((1, 1, 0), 2, (2,), "x")
    assert TargetConstraint.from_json(c.to_json()) == c


# ---- monotone steps


def test_monotone_steps():
    rep = monotone_step_checks(seed=0, trials=100)
    assert rep.passed
    assert {s.step for s in rep.summaries.values()} == {"a", "b", "c", "d"}
    assert all(s.trials >= 100 for s in rep.summaries.values())
    rep.raise_on_failure()


def test_monotone_deterministic():
    a, b = monotone_step_checks(3, 5), monotone_step_checks(3, 5)
    assert a.lines() == b.lines()
    with pytest.raises(ValidationError):
        monotone_step_checks(0, 0)


def test_literal_superadditivity_fails():
    lhs, rhs = superadditivity_counterexample()
    assert lhs == pytest.approx(1.0) and rhs == pytest.approx(2.0)


def test_identity_violation_reports_instance():
    from ciregions.crypto.monotone import Check, MonotoneReport

    rep = MonotoneReport(0, 1)
    rep.add(Check("a", "fake", "eq", 1.0, 0.0), {"trial": 0})
    with pytest.raises(IdentityViolation) as err:
        rep.raise_on_failure()
    assert err.value.instance == {"trial": 0}
