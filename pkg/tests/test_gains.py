import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.errors import InvalidArgument, OptimizerAbort
from artifact.gains import (
    GAIN_LIMIT,
    GainSet,
    SteeringObjective,
    cluster_gainsets,
    epr_gains,
    ghz_gains_for,
    nelder_mead,
    optimize_steering_gains,
    ss_gains,
    steering_value,
)
from artifact.networks import cluster3, cv_epr, cv_ghz, cv_ss
from artifact.tables import TABLE_TOL, TABLES, reproduce_row


def conditional_variance(cov: np.ndarray, k: int, rest: list[int], quad: int) -> float:
    """Schur complement of one quadrature of mode k given the same quadrature elsewhere."""
    i = 2 * k + quad
    j = [2 * m + quad for m in rest]
    c = cov[i, j]
    return float(cov[i, i] - c @ np.linalg.solve(cov[np.ix_(j, j)], c))


def schur_oracle(state, k: int, rest: list[int]) -> float:
    return np.sqrt(conditional_variance(state.cov, k, rest, 0) * conditional_variance(state.cov, k, rest, 1))


def grid_oracle(state, k: int, l: int, step: float = 0.01, span: float = GAIN_LIMIT) -> float:
    """Exhaustive 2-mode grid: x and p parts decouple, so each axis is scanned alone."""
    c = state.cov
    gains = np.arange(-span, span + step / 2, step)
    out = 1.0
    for q in (0, 1):
        a, b = 2 * k + q, 2 * l + q
        var = c[a, a] + 2 * gains * c[a, b] + gains**2 * c[b, b]
        out *= var.min()
    return float(np.sqrt(out))


# ---------------------------------------------------------------- Nelder-Mead


def test_nelder_mead_quadratic():
    res = nelder_mead(lambda z: (z[0] - 1.5) ** 2 + 3 * (z[1] + 0.5) ** 2, [0.0, 0.0], tol=1e-12)
    assert res.converged
    assert np.allclose(res.x, [1.5, -0.5], atol=1e-5)


def test_nelder_mead_rosenbrock():
    rosen = lambda z: 100 * (z[1] - z[0] ** 2) ** 2 + (1 - z[0]) ** 2
    res = nelder_mead(rosen, [-1.2, 1.0], tol=1e-12, step=0.5)
    assert np.allclose(res.x, [1.0, 1.0], atol=1e-4)


def test_nelder_mead_respects_budget():
    res = nelder_mead(lambda z: float(np.sum(z**2)), np.ones(3), tol=0.0, max_calls=40)
    assert not res.converged
    assert res.calls <= 45


def test_nelder_mead_aborts_on_nan():
    with pytest.raises(OptimizerAbort):
        nelder_mead(lambda z: np.nan, [0.0])


def test_nelder_mead_rejects_empty_start():
    with pytest.raises(InvalidArgument):
        nelder_mead(lambda z: 0.0, [])


# ---------------------------------------------------------------- closed forms


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.0])
def test_epr_gains_are_tanh_for_balanced_splitter(r):
    assert epr_gains(r) == pytest.approx((np.tanh(2 * r), np.tanh(2 * r)))


@pytest.mark.parametrize("R1", [0.2, 0.5, 0.7])
def test_closed_form_gains_minimise_regression_variance(R1):
    r = 0.8
    for gains, state in ((epr_gains(r, R1), cv_epr(2, r, R1)), (ss_gains(r, R1), cv_ss(2, r, R1))):
        c = state.cov
        assert -c[0, 2] / c[2, 2] == pytest.approx(-gains[0])
        assert -c[1, 3] / c[3, 3] == pytest.approx(gains[1])


def test_ghz_gains_match_table_limits():
    assert ghz_gains_for(3, 3.0, 3.0) == pytest.approx((-0.5, 1.0), abs=1e-4)
    assert ghz_gains_for(3, 0.0, 0.0) == (0.0, 0.0)


def test_closed_form_validation():
    with pytest.raises(InvalidArgument):
        epr_gains(-1.0)
    with pytest.raises(InvalidArgument):
        ss_gains(0.5, 1.5)


# ---------------------------------------------------------------- optimiser vs oracles


@pytest.mark.parametrize("family", ["epr", "ss", "ghz"])
@pytest.mark.parametrize("r", [0.1, 0.5, 1.2])
def test_single_steered_mode_matches_schur_oracle(family, r):
    state = {"epr": cv_epr, "ss": cv_ss, "ghz": cv_ghz}[family](3, r)
    for k in range(3):
        rest = [m for m in range(3) if m != k]
        gs = optimize_steering_gains(state, [k], rest)
        assert gs.value == pytest.approx(schur_oracle(state, k, rest), abs=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.5), st.floats(0.05, 0.95))
def test_two_mode_optimum_matches_exhaustive_grid(r, R1):
    state = cv_epr(2, r, R1)
    gs = optimize_steering_gains(state, [0], [1])
    oracle = grid_oracle(state, 0, 1)
    # the grid can only overshoot the true minimum
    assert gs.value <= oracle + 1e-9
    assert gs.value == pytest.approx(oracle, abs=5e-3)


def test_epr_pair_closed_form():
    for r in (0.2, 0.9):
        gs = optimize_steering_gains(cv_epr(2, r), [0], [1])
        assert gs.value == pytest.approx(1 / np.cosh(2 * r), abs=1e-9)
        assert abs(gs.h[1]) == pytest.approx(np.tanh(2 * r), abs=1e-5)


@pytest.mark.parametrize("family", ["epr", "ss", "ghz"])
def test_simplex_reaches_the_regression_optimum(family):
    state = {"epr": cv_epr, "ss": cv_ss, "ghz": cv_ghz}[family](3, 0.9)
    obj = SteeringObjective.build(state, [0], [1, 2])
    res = nelder_mead(obj, obj.regression_seed() + 0.3, tol=1e-12, step=0.1)
    assert res.fun == pytest.approx(schur_oracle(state, 0, [1, 2]), abs=1e-8)


def test_optimum_is_below_regression_value():
    state = cv_epr(3, 0.75)
    obj = SteeringObjective.build(state, [1, 2], [0])
    gs = optimize_steering_gains(state, [1, 2], [0])
    assert gs.value <= obj(obj.regression_seed()) + 1e-12


def test_gainset_value_is_reproducible():
    state = cv_ghz(3, 0.6)
    gs = optimize_steering_gains(state, [1, 2], [0])
    assert steering_value(state, [1, 2], [0], gs) == pytest.approx(gs.value)


def test_objective_penalises_runaway_gains():
    obj = SteeringObjective.build(cv_ghz(3, 0.5), [0], [1, 2])
    assert obj(np.full(4, 2 * GAIN_LIMIT)) >= 1e300


def test_objective_rejects_overlapping_sets():
    with pytest.raises(InvalidArgument):
        SteeringObjective.build(cv_ghz(3, 0.5), [0], [0, 1])
    with pytest.raises(InvalidArgument):
        SteeringObjective.build(cv_ghz(3, 0.5), [0], [3])


def test_gainset_rejects_non_finite():
    with pytest.raises(InvalidArgument):
        GainSet("1|2", {0: np.inf}, {0: 1.0})


def test_gainset_serialises_one_based():
    doc = GainSet("1|2", {0: 1.0, 1: -0.5}, {0: 1.0, 1: 0.5}).to_dict()
    assert doc["h"] == {"1": 1.0, "2": -0.5}


@pytest.mark.parametrize("r", [0.0, 0.7, 1.5])
def test_cluster_rotated_forms(r):
    # each rotated product equals sqrt(3 e^-2r * 2 e^-2r)
    state = cluster3(r)
    for gs in cluster_gainsets():
        k = int(gs.target[0]) - 1
        rest = [m for m in range(3) if m != k]
        assert steering_value(state, [k], rest, gs) == pytest.approx(np.sqrt(6) * np.exp(-2 * r))


# ---------------------------------------------------------------- table spot checks


@pytest.mark.parametrize("name, r", [("ghz-1-23", 0.5), ("epr-1-23", 1.0), ("ss-23-1", 0.5), ("ghz-fixed", 1.5)])
def test_table_rows_reproduce(name, r):
    got = np.array(reproduce_row(name, r))
    assert np.abs(got - np.array(TABLES[name].rows[r])).max() <= TABLE_TOL
