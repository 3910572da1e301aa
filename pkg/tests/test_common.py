import numpy as np
import pytest

from ciregions.channel import aci_coordinates
from ciregions.common import (
    EXACT,
    HEURISTIC_UPPER,
    brute_force_gk,
    corner_rate_1,
    corner_rate_2,
    g_rates,
    gk_common_information,
    gk_decomposition,
    min_sum_rate_zero_residual,
    residual_info_zero,
    transpose,
    wyner_common_information,
)
from ciregions.crypto.ot import make_bit_ot
from ciregions.pmf import JointPMF, mutual_information
from ciregions.verify import random_pmf


def h2(p):
    return -(p * np.log2(p) + (1 - p) * np.log2(1 - p))


def two_block():
    a = np.zeros((3, 3))
    a[:2, :2] = 0.2
    a[2, 2] = 0.2
    return JointPMF.from_array(a)


def test_decomposition_examples(indep):
    d = gk_decomposition(indep)
    assert d.num_components == 1 and d.masses() == pytest.approx([1.0])
    d = gk_decomposition(JointPMF.from_array(np.eye(3) / 3))
    assert d.num_components == 3
    d = gk_decomposition(two_block())
    assert d.masses() == pytest.approx([0.8, 0.2])
    assert d.component_of_x == {0: 0, 1: 0, 2: 1} and d.component_of_y == {0: 0, 1: 0, 2: 1}


def test_decomposition_invariants():
    rng = np.random.default_rng(5)
    for _ in range(30):
        p = random_pmf(rng)
        d = gk_decomposition(p)
        for x, y in p.indices:
            assert d.component_of_x[int(x)] == d.component_of_y[int(y)]
        assert sum(d.component_mass.values()) == pytest.approx(1.0, abs=1e-12)


def test_gk_values(indep):
    assert gk_common_information(indep).value == 0.0
    for k in (2, 3, 4):
        assert gk_common_information(JointPMF.from_array(np.eye(k) / k)).value == pytest.approx(np.log2(k))
    assert gk_common_information(two_block()).value == pytest.approx(h2(0.8), abs=1e-12)
    assert h2(0.8) == pytest.approx(0.72193, abs=1e-5)
    assert gk_common_information(indep).certified == EXACT


def test_residual_zero(copy_bit, indep):
    assert residual_info_zero(copy_bit).value == pytest.approx(0.0, abs=1e-12)
    assert residual_info_zero(indep).value == 0.0
    assert residual_info_zero(make_bit_ot()).value == pytest.approx(1.0, abs=1e-12)


def test_brute_force_gk_agrees():
    rng = np.random.default_rng(11)
    for _ in range(40):
        p = random_pmf(rng)
        assert gk_common_information(p).value == pytest.approx(brute_force_gk(p), abs=1e-12)


def test_wyner_trivial(copy_bit, indep, fast):
    w = wyner_common_information(copy_bit, fast)
    assert w.value == pytest.approx(1.0, abs=1e-4) and w.certified == HEURISTIC_UPPER
    assert w.seed == fast.seed and w.config_hash == fast.config_hash()
    assert wyner_common_information(indep, fast).value <= 1e-6


def test_corners(copy_bit, indep, fast, dsbs):
    assert corner_rate_1(copy_bit, fast).value == pytest.approx(0, abs=1e-6)
    assert corner_rate_1(indep, fast).value == pytest.approx(0, abs=1e-6)
    rep = corner_rate_1(dsbs, fast)
    r1, r2, rd = aci_coordinates(dsbs, rep.witness).values
    assert r2 <= 1e-6 and rd <= 1e-6 and r1 == pytest.approx(rep.value, abs=1e-9)


def test_corner_symmetry(fast):
    p = JointPMF.from_array([[0.3, 0.2], [0.0, 0.5]])
    assert corner_rate_1(p, fast).value == pytest.approx(corner_rate_2(transpose(p), fast).value, abs=1e-5)


def test_bit_ot_corner_consistency(fast):
    bit = make_bit_ot()
    cfg = fast.replace(u_size=8)
    c1, c2 = corner_rate_1(bit, cfg), corner_rate_2(bit, cfg)
    g1, g2 = g_rates(bit, cfg, corners=(c1, c2))
    # G(Y->X) - I(X;Y) equals I(Y;U|X) of the very witness that produced R_1-0.
    mi = mutual_information(bit, 0, 1)
    assert g1.value - mi == pytest.approx(aci_coordinates(bit, c1.witness).values[0], abs=1e-9)
    assert g2.value - mi == pytest.approx(aci_coordinates(bit, c2.witness).values[1], abs=1e-9)


def test_g_rates(copy_bit, indep, fast):
    g1, g2 = g_rates(copy_bit, fast)
    assert g1.value == pytest.approx(1.0, abs=1e-6) and g2.value == pytest.approx(1.0, abs=1e-6)
    g1, g2 = g_rates(indep, fast)
    assert g1.value == pytest.approx(0.0, abs=1e-6) and g2.value == pytest.approx(0.0, abs=1e-6)


def test_ordering_of_common_informations(fast):
    rng = np.random.default_rng(2)
    for _ in range(10):
        p = random_pmf(rng, 3, 3)
        gk = gk_common_information(p).value
        mi = mutual_information(p, 0, 1)
        w = wyner_common_information(p, fast).value
        assert gk <= mi + 1e-12 and mi <= w + 1e-6


def test_min_sum_equals_wyner_minus_i(dsbs, fast):
    ms = min_sum_rate_zero_residual(dsbs, fast).value
    w = wyner_common_information(dsbs, fast).value
    assert ms == pytest.approx(w - mutual_information(dsbs, 0, 1), abs=1e-4)


def test_report_json(dsbs, fast):
    rep = wyner_common_information(dsbs, fast)
    data = rep.to_json(dsbs)
    assert set(data) >= {"value", "certified", "seed", "config_hash", "witness"}
