import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from artifact.criteria import (
    FULL_INSEPARABLE,
    FULL_TWO_WAY,
    GENUINE_DEF1,
    GENUINE_DEF3,
    GLOBAL_FLAGS,
    SteeringClass,
    classify,
    cluster_pair_rule,
    cluster_vlf_quantities,
    criterion1,
    criterion1b,
    criterion1b_bound,
    criterion2,
    criterion3,
    criterion3_from_values,
    criterion4,
    criterion4b,
    criterion5,
    criterion5c,
    criterion6c,
    criterion7,
    dgcz,
    epr_paradox,
    genuine_entanglement,
    giovannetti,
    giovannetti_value,
    optimize_giovannetti,
    pair_product_witness,
    vlf_quantities,
)
from artifact.errors import InvalidArgument, Unsupported
from artifact.gains import cluster_gainsets, ghz_gains_for, optimize_steering_gains, uniform_gains
from artifact.networks import cluster3, cv_epr, cv_ghz, cv_ss
from artifact.phase_space import vacuum


def ghz_sn(n: int, r: float) -> float:
    return n / np.sqrt(n**2 + 4 * (n - 1) * np.sinh(2 * r) ** 2)


# ---------------------------------------------------------------- closed forms


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("r", [0.0, 0.4, 1.1])
def test_ghz_symmetric_product_closed_form(n, r):
    h, g = ghz_gains_for(n, r, r)
    rep = genuine_entanglement(cv_ghz(n, r), h, g)
    assert rep.value == pytest.approx(ghz_sn(n, r), abs=1e-12)
    assert rep.bound == pytest.approx(1 / (n - 1))


@pytest.mark.parametrize("r", [0.3, 1.0])
def test_vlf_quantities_for_ghz(r):
    q = vlf_quantities(cv_ghz(3, r))
    # var(x1 - x2) = 2 e^-2r, var(p1 + p2 + p3) = 3 e^-2r
    for name in ("I", "II", "III"):
        assert q[f"B_{name}"] == pytest.approx(5 * np.exp(-2 * r))
        assert q[f"S_{name}"] == pytest.approx(np.sqrt(6) * np.exp(-2 * r))


@pytest.mark.parametrize("r", [0.3, 1.0])
def test_cluster_sums_closed_form(r):
    q = cluster_vlf_quantities(cluster3(r))
    assert q["B'_I"] == pytest.approx(5 * np.exp(-2 * r))
    assert q["B'_II"] == pytest.approx(5 * np.exp(-2 * r))


def test_vacuum_dgcz_and_witnesses_sit_on_the_bound():
    state = vacuum(3)
    assert dgcz(state, 0, 1).value == pytest.approx(1.0)
    assert pair_product_witness(state, 0, 2).value == pytest.approx(2.0)
    assert not dgcz(state, 0, 1).violated
    assert giovannetti(state, 0, 1).value == pytest.approx(1.0, abs=1e-6)


def test_epr_pair_dgcz():
    r = 0.7
    assert dgcz(cv_epr(2, r), 0, 1).value == pytest.approx(np.exp(-2 * r))


def test_giovannetti_at_unit_gains_is_half_the_pair_product():
    state = cv_epr(2, 0.5)
    assert giovannetti_value(state, 0, 1, 1.0, 1.0) == pytest.approx(pair_product_witness(state, 0, 1).value / 2)


def test_giovannetti_optimum_beats_unit_gains():
    state = cv_ss(2, 0.8)
    assert optimize_giovannetti(state, 0, 1).value <= giovannetti_value(state, 0, 1, 1.0, 1.0) + 1e-12


def test_pair_checks():
    with pytest.raises(InvalidArgument):
        dgcz(vacuum(2), 0, 0)
    with pytest.raises(InvalidArgument):
        giovannetti(vacuum(2), 0, 2)


# ---------------------------------------------------------------- single inequalities


@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(2, 6))
def test_criterion1b_bound_terms(h, g, n):
    bound, terms = criterion1b_bound(n, h, g)
    assert bound == min(terms.values())
    assert bound <= 1.0  # the a = 0 term is |1|
    assert len(terms) == 2 * (n - 1)


def test_criterion2_bound_is_at_least_criterion1_bound():
    state = cv_ghz(3, 0.8)
    gs = optimize_steering_gains(state, [0], [1, 2])
    u, v = gs.forms(3)
    one, two = criterion1(state, u, v), criterion2(state, u, v)
    assert one.value == pytest.approx(two.value)
    assert two.bound >= one.bound - 1e-12


@pytest.mark.parametrize("r, expect", [(0.2, False), (1.5, True)])
def test_criterion1b_on_ghz(r, expect):
    h, g = ghz_gains_for(3, r, r)
    assert criterion1b(cv_ghz(3, r), h, g).violated is expect


def test_criterion3_with_cluster_forms():
    # sum of three products 3 sqrt6 e^-2r against bound 1
    r = 1.2
    rep = criterion3(cluster3(r), cluster_gainsets())
    assert rep.value == pytest.approx(3 * np.sqrt(6) * np.exp(-2 * r))
    assert rep.bound == pytest.approx(1.0)
    assert rep.violated


def test_criterion3_from_values_is_undetermined_without_pair_bounds():
    rep = criterion3_from_values([0.1, 0.1, 0.1])
    assert not rep.violated
    assert rep.details["undetermined"]
    assert criterion3_from_values([0.1, 0.1, 0.1], [0.9, 0.9, 0.9]).violated
    assert not criterion3_from_values([0.5, 0.5, 0.5], [1, 1, 1]).violated


def test_criterion3_shape_checks():
    with pytest.raises(InvalidArgument):
        criterion3(cv_ghz(4, 0.5), cluster_gainsets())
    with pytest.raises(InvalidArgument):
        criterion3_from_values([0.1, 0.2])


def test_epr_paradox_for_epr_state():
    rep = epr_paradox(cv_epr(2, 0.5), 0)
    assert rep.value == pytest.approx(1 / np.cosh(1.0), abs=1e-9)
    assert rep.violated


# ---------------------------------------------------------------- VLF-type rules


def test_two_of_three_rules():
    assert criterion4([0.5, 0.9, 1.2]).violated
    assert not criterion4([0.5, 1.1, 1.2]).violated
    assert criterion4b([1.9, 1.9, None]).violated
    rep = criterion4([0.5, None, None])
    assert not rep.violated and rep.details["undetermined"]
    with pytest.raises(InvalidArgument):
        criterion4([-0.1, 0.5, 0.5])


def test_sum_rules():
    assert criterion5([0.6, 0.6, 0.6]).violated
    assert not criterion5([0.7, 0.7, 0.7]).violated
    assert criterion5c([0.4, 0.5, 2.0]).violated
    assert criterion6c([0.9, 1.0, 5.0]).violated
    assert not criterion6c([1.0, 1.0, 1.0]).violated
    assert criterion7([0.14, 0.14, None], "B").violated
    assert set(criterion7([0.3, 0.3, 0.3]).implications) == {GENUINE_DEF3, GENUINE_DEF1}


def test_unit_gain_rules_refuse_other_gains():
    with pytest.raises(InvalidArgument):
        criterion5c([0.1, 0.1, 0.1], unit_gains=False)
    with pytest.raises(InvalidArgument):
        criterion7([0.1, 0.1, 0.1], unit_gains=False)


def test_sum_rule_without_pairs_is_undetermined():
    rep = criterion5([0.1, 0.1, None])
    assert not rep.violated and rep.details["undetermined"]


def test_cluster_pair_rule():
    assert cluster_pair_rule(0.12, 0.18).violated
    assert not cluster_pair_rule(1.0, 1.0).violated
    with pytest.raises(InvalidArgument):
        cluster_pair_rule(-0.1, 0.5)


@given(st.floats(0, 5), st.floats(0, 5), st.floats(0, 5))
def test_sum_violation_implies_product_violation(b1, b2, b3):
    # var(u) + var(v) >= 2 du dv, so B/2 >= S term by term
    s = [b / 2 for b in (b1, b2, b3)]
    if criterion6c([b1, b2, b3]).violated:
        assert criterion5c(s).violated
    if criterion4b([b1, b2, b3]).violated:
        assert criterion4(s).violated


# ---------------------------------------------------------------- classification


def test_classify_ghz_is_full_two_way():
    cls, reports = classify(cv_ghz(3, 1.0))
    assert cls.flags[FULL_TWO_WAY] is True
    assert cls.flags[GENUINE_DEF1] is True
    assert cls.lattice_consistent()
    assert {r.name for r in reports} >= {"criterion1", "criterion3", "criterion5"}


def test_classify_epr_is_def1_but_not_def3():
    cls, _ = classify(cv_epr(3, 0.9))
    assert cls.flags[GENUINE_DEF1] is True
    assert cls.flags[GENUINE_DEF3] is False


def test_classify_vacuum_certifies_nothing():
    cls, _ = classify(vacuum(3))
    assert not any(cls.flags[f] for f in GLOBAL_FLAGS)
    assert cls.flags[FULL_INSEPARABLE] is False


def test_classify_validation():
    with pytest.raises(InvalidArgument):
        classify(vacuum(1))
    with pytest.raises(InvalidArgument):
        classify(vacuum(2), strategy="guess")
    with pytest.raises(Unsupported):
        classify(vacuum(21))


def test_lattice_propagates_only_true():
    cls = SteeringClass(3)
    cls.record(GENUINE_DEF3, True, "test")
    cls.close()
    assert cls.flags[GENUINE_DEF1] and cls.flags[FULL_TWO_WAY] and cls.flags[FULL_INSEPARABLE]
    assert cls.flags["steering:23|1"] is True

    neg = SteeringClass(3)
    neg.record(GENUINE_DEF1, False, "test")
    neg.close()
    assert neg.flags[FULL_TWO_WAY] is None


def test_false_never_overrides_true():
    cls = SteeringClass(2)
    cls.record(FULL_TWO_WAY, True, "a")
    cls.record(FULL_TWO_WAY, False, "b")
    assert cls.flags[FULL_TWO_WAY] is True


def test_uniform_gains_criterion1b_matches_criterion1():
    state = cv_ghz(4, 0.9)
    h, g = ghz_gains_for(4, 0.9, 0.9)
    u, v = uniform_gains(4, h, g).forms(4)
    a, b = criterion1b(state, h, g), criterion1(state, u, v)
    assert a.value == pytest.approx(b.value)
    assert a.bound == pytest.approx(b.bound)
