import numpy as np
import pytest

from ciregions.channel import AuxChannel, OptimizerConfig, Weights3, aci_coordinates, objective_value
from ciregions.errors import BudgetExceeded, OptimizerDidNotConverge, ValidationError
from ciregions.grid import brute_force_grid, dense_coordinates, grid_size, markov_grid, simplex_lattice
from ciregions.optimize import deterministic_channels, minimize_objective, penalized_search, scalarized_search, weighted_objective
from ciregions.pmf import JointPMF, mutual_information

# Frozen oracle values for [[0.4, 0.1], [0.1, 0.4]] (|U| = 2).
WYNER_DSBS = 0.7059049  # closed form, see test_wyner_closed_form
CORNER_DSBS = 0.7219281  # h2(0.2)


def test_scalarized_trivial(copy_bit, indep, fast):
    v, ch = scalarized_search(copy_bit, Weights3((0, 0, 1)), "aci", fast)
    assert v == pytest.approx(0, abs=1e-6)
    v, _ = scalarized_search(indep, Weights3((1, 1, 1)), "aci", fast)
    assert v == pytest.approx(0, abs=1e-6)


def test_witness_reproduces_value(dsbs, fast):
    res = scalarized_search(dsbs, Weights3((1, 2, 3)), "aci", fast)
    obj = weighted_objective(Weights3((1, 2, 3)), "aci")
    assert objective_value(dsbs, res.channel, obj) == pytest.approx(res.value, abs=1e-9)


def test_restarts_monotone(dsbs):
    w = Weights3((1, 1, 0.5))
    vals = [scalarized_search(dsbs, w, "aci", OptimizerConfig(restarts=r)).value for r in (1, 4, 16)]
    assert vals[0] >= vals[1] - 1e-12 >= vals[2] - 2e-12


def test_deterministic(dsbs, fast):
    a = scalarized_search(dsbs, Weights3((1, 1, 1)), "gw", fast)
    b = scalarized_search(dsbs, Weights3((1, 1, 1)), "gw", fast)
    assert a.value == b.value and np.array_equal(a.channel.dense(), b.channel.dense())


def test_penalized_trivial(indep, copy_bit, fast):
    assert penalized_search(indep, "rc", ("rd",), fast).value == pytest.approx(0, abs=1e-6)
    assert penalized_search(copy_bit, "r1", ("r2", "rd"), fast).value == pytest.approx(0, abs=1e-6)


def test_penalized_feasibility(dsbs, fast):
    res = penalized_search(dsbs, "r1", ("r2", "rd"), fast)
    assert res.constraint_values["r2"] <= 1e-6 and res.constraint_values["rd"] <= 1e-6
    with pytest.raises(ValidationError):
        penalized_search(dsbs, "r1", ("nope",), fast)


def test_penalized_infeasible_raises(dsbs):
    # |U| = 1 cannot make a dependent pair conditionally independent.
    with pytest.raises(OptimizerDidNotConverge):
        penalized_search(dsbs, "rc", ("rd",), OptimizerConfig(u_size=1, restarts=2))


def test_wyner_closed_form(dsbs, fast):
    # Binary symmetric source with crossover a0: C = 1 + h(a0) - 2 h(a1),
    # a1 = (1 - sqrt(1 - 2 a0)) / 2.
    h = lambda p: -(p * np.log2(p) + (1 - p) * np.log2(1 - p))  # noqa: E731
    a1 = (1 - np.sqrt(1 - 2 * 0.2)) / 2
    assert 1 + h(0.2) - 2 * h(a1) == pytest.approx(WYNER_DSBS, abs=1e-7)
    assert penalized_search(dsbs, "rc", ("rd",), fast).value == pytest.approx(WYNER_DSBS, abs=1e-5)


def test_lattice():
    lat = simplex_lattice(3, 0.25)
    assert len(lat) == 15 and np.allclose(lat.sum(axis=1), 1)
    assert simplex_lattice(1, 0.5).tolist() == [[1.0]]
    with pytest.raises(ValidationError):
        simplex_lattice(2, 0.3)
    assert grid_size(4, 2, 0.02) == 51**4


def test_dense_matches_sparse(dsbs):
    rng = np.random.default_rng(0)
    chans = rng.dirichlet(np.ones(3), size=(5, 4))
    d = dense_coordinates(dsbs, chans)
    for i in range(5):
        t = aci_coordinates(dsbs, AuxChannel.from_dense(chans[i]))
        assert (d["r1"][i], d["r2"][i], d["rd"][i]) == pytest.approx(t.values, abs=1e-12)


def test_grid_u1_and_budget(dsbs):
    v, ch = brute_force_grid(dsbs, 1, 0.5, "rd")
    assert ch.u_size == 1 and v == pytest.approx(mutual_information(dsbs, 0, 1))
    with pytest.raises(BudgetExceeded):
        brute_force_grid(dsbs, 3, 0.01, "rd", budget=10**6)


def test_grid_contains_witness(copy_bit):
    # U = X lies on every grid, so the grid minimum is at most its value 0.
    v, _ = brute_force_grid(copy_bit, 2, 0.5, {"r1": 1, "r2": 1, "rd": 1})
    assert v <= 1e-12


def test_markov_grid(dsbs):
    v, ch = markov_grid(dsbs, 0.001, "rc")
    assert v == pytest.approx(WYNER_DSBS, abs=1e-5)
    assert aci_coordinates(dsbs, ch).values[2] <= 1e-9
    with pytest.raises(ValidationError):
        markov_grid(JointPMF.from_array([[0.5, 0.0], [0.0, 0.5]]), 0.01, "rc")


def test_scalarized_vs_grid_small(dsbs):
    cfg = OptimizerConfig(u_size=2, restarts=16)
    w = Weights3((1, 1, 0.001))
    g, _ = brute_force_grid(dsbs, 2, 0.05, weighted_objective(w, "aci"))
    v = scalarized_search(dsbs, w, "aci", cfg).value
    assert v <= g + 1e-9
    assert v == pytest.approx(g, abs=5e-3)


def test_minimize_objective_accepts_keys(dsbs, fast):
    assert minimize_objective(dsbs, "rd", fast).value == pytest.approx(0, abs=1e-6)


def test_deterministic_channels_on_zero_residual_face(dsbs):
    seeds = deterministic_channels(dsbs, 4)
    assert seeds.shape == (3, 4, 4)
    for w in seeds:
        assert aci_coordinates(dsbs, AuxChannel.from_dense(w)).values[2] == pytest.approx(0.0, abs=1e-12)
    assert deterministic_channels(dsbs, 2).shape == (2, 4, 2)  # U = (X, Y) does not fit


def test_corner_near_independence():
    # Nearly independent pmf where interior restarts stall above the face.
    a = np.array([[0.1687, 0.1643], [0.3177, 0.3492]])
    res = penalized_search(JointPMF.from_array(a / a.sum()), "r1", ("r2", "rd"), OptimizerConfig(restarts=8))
    assert sum(res.constraint_values.values()) <= 1e-6
