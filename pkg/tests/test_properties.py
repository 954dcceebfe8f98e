"""Randomised checks over beam-splitter networks with squeezed inputs."""

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from artifact.criteria import classify, vlf_quantities
from artifact.gains import optimize_steering_gains
from artifact.networks import NetworkSpec, SqueezedInput, Splitter, build
from artifact.phase_space import symplectic_form

SETTINGS = dict(deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def specs(draw, n_modes=st.integers(2, 4)):
    n = draw(n_modes)
    inputs = tuple(
        draw(st.one_of(st.none(), st.builds(SqueezedInput, st.floats(0.0, 2.0), st.sampled_from(["x", "p"])))) for _ in range(n)
    )
    splitters = []
    for _ in range(draw(st.integers(0, 2 * n))):
        a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
        splitters.append(Splitter(a, b, draw(st.floats(0.05, 0.95))))
    return NetworkSpec(n, inputs, tuple(splitters))


def schur(cov, k, rest, quad):
    i, j = 2 * k + quad, [2 * m + quad for m in rest]
    c = cov[i, j]
    return cov[i, i] - c @ np.linalg.solve(cov[np.ix_(j, j)], c)


@settings(max_examples=1000, **SETTINGS)
@given(specs())
def test_random_networks_are_physical(spec):
    state = build(spec)
    cov = state.cov
    n = spec.n_modes
    # pure Gaussian state: cov Omega cov Omega^T = I
    omega = symplectic_form(n)
    assert np.allclose(cov @ omega @ cov @ omega.T, np.eye(2 * n), atol=1e-8 * np.abs(cov).max() ** 2)
    assert state.physicality_floor() >= -1e-8 * np.abs(cov).max()


@settings(max_examples=300, **SETTINGS)
@given(specs(st.just(3)))
def test_sum_bounds_product(spec):
    q = vlf_quantities(build(spec))
    for name in ("I", "II", "III"):
        assert q[f"B_{name}"] / 2 >= q[f"S_{name}"] - 1e-9 * max(1.0, q[f"B_{name}"])


@settings(max_examples=200, **SETTINGS)
@given(specs(), st.data())
def test_single_mode_optimum_matches_schur_complement(spec, data):
    state = build(spec)
    n = spec.n_modes
    k = data.draw(st.integers(0, n - 1))
    rest = [m for m in range(n) if m != k]
    oracle = np.sqrt(schur(state.cov, k, rest, 0) * schur(state.cov, k, rest, 1))
    got = optimize_steering_gains(state, [k], rest).value
    # the optimum is exact when the regression gains stay inside the gain box
    assert got >= oracle - 1e-7 * max(1.0, oracle)
    assert got <= oracle + 1e-5 * max(1.0, oracle) or got <= 1e-3


@settings(max_examples=40, **SETTINGS)
@given(specs(st.just(3)))
def test_classification_respects_the_lattice(spec):
    cls, _ = classify(build(spec))
    assert cls.lattice_consistent()
    for label in ("1|23", "2|13", "3|12"):
        if cls.flags.get(f"two-way:{label}"):
            a, b = label.split("|")
            assert cls.flags[f"steering:{a}|{b}"] and cls.flags[f"steering:{b}|{a}"]
