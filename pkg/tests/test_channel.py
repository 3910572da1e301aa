import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ciregions.channel import (
    AuxChannel,
    OptimizerConfig,
    RateTriple,
    Weights3,
    aci_coordinates,
    channel_from_function,
    coordinate_values,
    default_u_size,
    gw_coordinates,
    source_entropies,
)
from ciregions.errors import SupportMismatch, ValidationError
from ciregions.pmf import conditional_entropy, mutual_information
from ciregions.verify import random_channel, random_pmf


def test_constant_and_identity(dsbs):
    hx, hy, hxy = source_entropies(dsbs)
    mi = mutual_information(dsbs, 0, 1)
    assert aci_coordinates(dsbs, AuxChannel.constant(4)).values == pytest.approx((0, 0, mi), abs=1e-12)
    assert gw_coordinates(dsbs, AuxChannel.constant(4)).values == pytest.approx((hx, hy, 0), abs=1e-12)
    ident = AuxChannel.identity(4)
    expect = (conditional_entropy(dsbs, 1, 0), conditional_entropy(dsbs, 0, 1), 0.0)
    assert aci_coordinates(dsbs, ident).values == pytest.approx(expect, abs=1e-12)
    assert gw_coordinates(dsbs, ident).values == pytest.approx((0, 0, hxy), abs=1e-12)


def test_copy_bit_reveal(copy_bit):
    u = channel_from_function(copy_bit, lambda x, y: x)
    assert gw_coordinates(copy_bit, u).values == pytest.approx((0, 0, 1))
    assert aci_coordinates(copy_bit, u).values == pytest.approx((0, 0, 0))


def test_support_mismatch(dsbs):
    with pytest.raises(SupportMismatch):
        aci_coordinates(dsbs, AuxChannel.constant(3))


def test_channel_validation():
    with pytest.raises(ValidationError):
        AuxChannel(2, np.array([[0.5, 0.6]]))
    with pytest.raises(ValidationError):
        AuxChannel(3, np.array([[0.5, 0.5]]))


def test_channel_json_roundtrip(dsbs):
    ch = random_channel(np.random.default_rng(1), dsbs)
    back = AuxChannel.from_json(ch.to_json(dsbs), dsbs)
    assert np.allclose(back.dense(), ch.dense())
    bad = ch.to_json(dsbs)
    bad["rows"] = bad["rows"][:-1]
    with pytest.raises(SupportMismatch):
        AuxChannel.from_json(bad, dsbs)


def test_weights_and_triples():
    assert Weights3((2, 1, 1)).w == (0.5, 0.25, 0.25)
    for bad in ((0, 0, 0), (-1, 1, 1), (1, 1)):
        with pytest.raises(ValidationError):
            Weights3(bad)
    assert RateTriple("aci", (-5e-10, 1, 2)).values[0] == 0.0
    with pytest.raises(ValidationError):
        RateTriple("aci", (-1e-3, 0, 0))
    with pytest.raises(ValidationError):
        RateTriple("xyz", (0, 0, 0))


def test_config():
    c = OptimizerConfig()
    assert (c.restarts, c.max_iters, c.tolerance, c.seed) == (32, 2000, 1e-9, 0)
    assert c.config_hash() == OptimizerConfig().config_hash()
    assert c.replace(seed=1).config_hash() != c.config_hash()
    with pytest.raises(ValidationError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValidationError):
        OptimizerConfig(tolerance=0)


def test_default_u_size(dsbs):
    assert default_u_size(dsbs) == 6


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_coordinate_identities(seed):
    # ACI coordinates are the affine image of the GW coordinates.
    rng = np.random.default_rng(seed)
    p = random_pmf(rng)
    ch = random_channel(rng, p)
    v = coordinate_values(p, ch)
    hx, hy, hxy = source_entropies(p)
    assert v["r1"] == pytest.approx(v["ra"] + v["rc"] - hx, abs=1e-9)
    assert v["r2"] == pytest.approx(v["rb"] + v["rc"] - hy, abs=1e-9)
    assert v["rd"] == pytest.approx(v["ra"] + v["rb"] + v["rc"] - hxy, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_letter_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    p = random_pmf(rng)
    ch = random_channel(rng, p)
    perm = rng.permutation(ch.u_size)
    a, b = coordinate_values(p, ch), coordinate_values(p, ch.permute_letters(perm))
    for k in a:
        assert a[k] == pytest.approx(b[k], abs=1e-12)
