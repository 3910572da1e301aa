import numpy as np
import pytest

from ciregions.channel import OptimizerConfig, RateTriple, Weights3, gw_coordinates, source_entropies
from ciregions.crypto.ot import make_string_ot_pair, paper_channel
from ciregions.errors import TagMismatch, ValidationError
from ciregions.pmf import conditional_entropy, independent_join, mutual_information
from ciregions.regions import (
    RegionApprox,
    affine_map_f,
    lgw_membership,
    point_in_region_inner,
    read_region_csv,
    rescore,
    scale_region,
    simplex_weight_grid,
    trace_region,
)

SMALL = OptimizerConfig(restarts=4, max_iters=500)


def test_affine_examples(dsbs):
    hx, hy, hxy = source_entropies(dsbs)
    mi = mutual_information(dsbs, 0, 1)
    assert affine_map_f(hx, hy, hxy, (hx, hy, 0)).values == pytest.approx((0, 0, mi))
    img = affine_map_f(hx, hy, hxy, (0, 0, hxy))
    assert img.values == pytest.approx((conditional_entropy(dsbs, 1, 0), conditional_entropy(dsbs, 0, 1), 0))
    with pytest.raises(TagMismatch):
        affine_map_f(hx, hy, hxy, RateTriple("aci", (0, 0, 0)))


def test_affine_paper_channel():
    p = make_string_ot_pair(1)
    gw = gw_coordinates(p, paper_channel(p))
    assert affine_map_f(*source_entropies(p), gw).values == pytest.approx((1, 1, 0), abs=1e-12)


def test_lgw(dsbs):
    hx, hy, hxy = source_entropies(dsbs)
    assert lgw_membership((hx, hy, 0), hx, hy, hxy)
    assert not lgw_membership((0, 0, 0), hx, hy, hxy)


def test_weight_grid():
    g = simplex_weight_grid(8)
    assert len(g) == 45
    axes = {(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)}
    assert axes <= {w.w for w in g}


@pytest.mark.parametrize("tag", ["aci", "gw"])
def test_trace_invariants(dsbs, tag):
    r = trace_region(dsbs, tag, simplex_weight_grid(2), SMALL)
    cloud = r.cloud()
    for s in r.scalarizations:
        assert s.value == pytest.approx(float(np.min(cloud @ s.weights.array())), abs=1e-9)
    assert r.theorem1_deviation() <= 1e-9
    hx, hy, hxy = r.source_entropies
    assert all(lgw_membership(p.gw, hx, hy, hxy) for p in r.points)
    assert np.all(np.array([p.aci.values for p in r.points]) >= 0)
    assert rescore(r, dsbs) <= 1e-9


def test_trace_contains_zero(indep, copy_bit):
    for p in (indep, copy_bit):
        r = trace_region(p, "aci", simplex_weight_grid(2), SMALL)
        assert point_in_region_inner((0, 0, 0), r)
        assert np.min(np.abs(r.cloud()).sum(axis=1)) <= 1e-6


def test_paper_channel_injected():
    p = make_string_ot_pair(1)
    r = trace_region(p, "aci", [Weights3((1, 1, 1))], extra_channels=[("Q", paper_channel(p))], search=False)
    assert any(np.allclose(pt, (1, 1, 0), atol=1e-9) for pt in r.cloud())
    assert point_in_region_inner((1, 1, 0), r)


def test_membership(dsbs):
    r = trace_region(dsbs, "aci", simplex_weight_grid(1), search=False)
    mi = mutual_information(dsbs, 0, 1)
    assert point_in_region_inner((0, 0, mi), r)
    assert point_in_region_inner((1, 1, mi + 1), r)
    assert not point_in_region_inner((0, 0, 0), r)
    with pytest.raises(TagMismatch):
        point_in_region_inner(RateTriple("gw", (9, 9, 9)), r)


def test_scale(dsbs):
    r = trace_region(dsbs, "aci", simplex_weight_grid(1), search=False)
    assert np.allclose(scale_region(r, 1).cloud(), r.cloud())
    r2 = scale_region(r, 2)
    assert np.allclose(r2.cloud(), 2 * r.cloud())
    assert r2.theorem1_deviation() <= 1e-9
    assert rescore(r2, dsbs) <= 1e-9
    with pytest.raises(ValidationError):
        scale_region(r, 0)


def test_scale_single_point():
    p = make_string_ot_pair(1)
    r = trace_region(p, "aci", [Weights3((1, 1, 0))], extra_channels=[("Q", paper_channel(p))], search=False)
    assert np.any(np.all(np.isclose(scale_region(r, 2).cloud(), (2, 2, 0)), axis=1))


def test_additivity_cross_check(dsbs):
    # Every doubled single-copy point is dominated by the traced region of two copies.
    weights = simplex_weight_grid(2)
    single = scale_region(trace_region(dsbs, "aci", weights, SMALL), 2)
    double = trace_region(independent_join(dsbs, dsbs), "aci", weights, SMALL.replace(u_size=6))
    for s_single, s_double in zip(single.scalarizations, double.scalarizations):
        # double-copy support value can only be lower (up to optimizer slack)
        assert s_double.value <= s_single.value + 2e-3


def test_csv_and_json_roundtrip(dsbs):
    r = trace_region(dsbs, "aci", simplex_weight_grid(2), SMALL)
    rows = read_region_csv(r.to_csv(check_column=True))
    assert len(rows) == len(r.scalarizations)
    assert r.to_csv().splitlines()[0] == "tag,w1,w2,w3,c1,c2,c3,value"
    assert max(row["thm1_dev"] for row in rows) <= 1e-9
    back = RegionApprox.from_json(r.to_json(dsbs), dsbs)
    assert rescore(back, dsbs) <= 1e-9
    for row, s in zip(rows, back.scalarizations):
        assert row["value"] == s.value


def test_monotone_membership(dsbs):
    r = trace_region(dsbs, "aci", simplex_weight_grid(1), search=False)
    rng = np.random.default_rng(0)
    for p in r.cloud():
        q = p + rng.random(3)
        assert point_in_region_inner(p, r) and point_in_region_inner(q, r)
