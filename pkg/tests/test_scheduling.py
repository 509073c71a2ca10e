import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force, naive_communicability, naive_gramian, naive_metric, random_transmission_network
from tvcs.errors import BudgetError, DegenerateBaselineError, DimensionError
from tvcs.gramian import Metric, Schedule, gramian, metric
from tvcs.scheduling import (
    CHI_EPSILON,
    Solver,
    chi_report,
    chi_vs_horizon,
    exhaustive_schedule,
    greedy_schedule,
    tics_trace,
    tvcs_trace,
)

METRICS = ["trace", "trinv", "det", "mineig"]


@pytest.mark.parametrize("K", [1, 3, 6])
def test_identity_trace(K):
    s, v = tvcs_trace(np.eye(4), K)
    assert s == Schedule.constant(0, K)
    assert v == K
    s, v = tics_trace(np.eye(4), K)
    assert s == Schedule.constant(0, K) and v == K


def test_chain_trace(chain5):
    assert tvcs_trace(chain5, 5)[1] == 5.0
    s, v = tics_trace(chain5, 5)
    assert v == 5.0 and s == Schedule.constant(0, 5)


@pytest.mark.parametrize("kind", METRICS)
def test_chain_all_metrics(chain5, kind):
    rep = chi_report(chain5, 5, kind)
    assert rep.chi == 0.0
    assert rep.class_label == "I"
    assert rep.solver is (Solver.CLOSED_FORM_TRACE if kind == "trace" else Solver.EXHAUSTIVE)


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("m", [1, 2])
def test_trace_closed_form_vs_brute_force(seed, m):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(m + 1, 5))
    K = int(rng.integers(1, 4))
    a = random_transmission_network(rng, n)
    _, tv = tvcs_trace(a, K, m)
    _, ti = tics_trace(a, K, m)
    assert tv == pytest.approx(brute_force(a, K, "trace", m=m), rel=1e-9)
    assert ti == pytest.approx(brute_force(a, K, "trace", constant_only=True, m=m), rel=1e-9)


def test_multi_input_uses_top_m(chain5):
    r = naive_communicability(chain5, 5)
    s, _ = tvcs_trace(chain5, 5, m=2)
    for k in range(5):
        order = np.argsort(-r[:, k], kind="stable")[:2]
        assert s.nodes[4 - k] == tuple(sorted(order))


def test_two_node_example():
    # node 1 drives node 0, so only node 1 at the first step reaches two states
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    s, v = exhaustive_schedule(a, 2, "trace")
    assert v == brute_force(a, 2, "trace") == 2.0
    assert s.nodes[0] == (1,)


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("kind", METRICS)
def test_exhaustive_vs_brute_force(seed, kind):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    K = int(rng.integers(n, n + 2))
    a = rng.random((n, n))
    s, v = exhaustive_schedule(a, K, kind)
    want = brute_force(a, K, kind)
    assert v == pytest.approx(want, rel=1e-9, abs=1e-15)
    assert naive_metric(naive_gramian(a, s.nodes), kind) == pytest.approx(v, rel=1e-9, abs=1e-15)
    _, vc = exhaustive_schedule(a, K, kind, constant_only=True)
    assert vc == pytest.approx(brute_force(a, K, kind, constant_only=True), rel=1e-9, abs=1e-15)


def test_exhaustive_agrees_with_trace_closed_form():
    rng = np.random.default_rng(5)
    a = random_transmission_network(rng, 5)
    assert exhaustive_schedule(a, 4, "trace")[1] == pytest.approx(tvcs_trace(a, 4)[1], rel=1e-12)
    assert exhaustive_schedule(a, 4, "trace", constant_only=True)[1] == pytest.approx(tics_trace(a, 4)[1], rel=1e-12)


def test_exhaustive_lexicographic_tie_break():
    s, v = exhaustive_schedule(np.eye(3), 2, "trace")
    assert s == Schedule.single([0, 0]) and v == 2.0


def test_exhaustive_budget():
    with pytest.raises(BudgetError):
        exhaustive_schedule(np.eye(10), 7, "det", budget=1000)


@pytest.mark.parametrize("seed", range(20))
def test_greedy_trace_equals_closed_form(seed):
    rng = np.random.default_rng(seed)
    a = random_transmission_network(rng, int(rng.integers(3, 9)))
    g, gv = greedy_schedule(a, 5, "trace")
    s, v = tvcs_trace(a, 5)
    assert g == s
    assert gv == pytest.approx(v, rel=1e-12)


def test_greedy_identity_mineig():
    s, v = greedy_schedule(np.eye(4), 4, "mineig")
    assert sorted(i for (i,) in s.nodes) == [0, 1, 2, 3]
    assert v == pytest.approx(1.0)


@pytest.mark.parametrize("kind", ["det", "trinv"])
def test_greedy_identity_spreads(kind):
    s, v = greedy_schedule(np.eye(3), 3, kind)
    assert len({i for (i,) in s.nodes}) == 3
    assert v > 0


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("kind", METRICS)
def test_greedy_below_exhaustive(seed, kind):
    rng = np.random.default_rng(seed)
    a = rng.random((3, 3))
    _, g = greedy_schedule(a, 4, kind)
    _, e = exhaustive_schedule(a, 4, kind)
    assert g <= e * (1 + 1e-9) + 1e-15


def test_identity_chi_zero():
    rep = chi_report(np.eye(3), 4)
    assert rep.chi == 0.0 and rep.class_label == "I"


def test_chi_report_greedy_flags_lower_bound():
    rng = np.random.default_rng(2)
    a = rng.random((4, 4))
    rep = chi_report(a, 6, "det", budget=100)
    assert rep.solver is Solver.GREEDY
    assert rep.chi_is_lower_bound
    assert rep.f_tv >= rep.f_ti
    assert rep.chi >= 0


def test_chi_report_degenerate_baseline():
    # n > K m makes every non-trace measure zero
    with pytest.raises(DegenerateBaselineError):
        chi_report(np.eye(4), 2, "det")
    with pytest.raises(DegenerateBaselineError):
        chi_report(np.zeros((2, 2)), 3, "mineig")


def test_chi_report_dimensions():
    with pytest.raises(DimensionError):
        chi_report(np.eye(3), 0)
    with pytest.raises(DimensionError):
        chi_report(np.eye(3), 2, m=4)


def test_chi_report_dict():
    d = chi_report(np.eye(2), 2, "trace").to_dict()
    assert d["metric"] == "trace"
    assert d["schedule_tv"] == [[0], [0]]
    assert d["solver_tv"] == "closed_form_trace"


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(2, 4),
    K=st.integers(2, 4),
    kind=st.sampled_from(METRICS),
)
def test_time_varying_never_worse(seed, n, K, kind):
    rng = np.random.default_rng(seed)
    a = rng.random((n, n))
    try:
        rep = chi_report(a, K, kind)
    except DegenerateBaselineError:
        return
    assert rep.f_tv >= rep.f_ti * (1 - 1e-12)
    assert rep.chi >= 0
    assert (rep.class_label == "V") == (rep.chi > CHI_EPSILON)
    assert metric(gramian(a, rep.schedule_tv), kind) == pytest.approx(rep.f_tv, rel=1e-9, abs=1e-15)
    assert rep.schedule_ti.is_constant


def test_chi_vs_horizon_chain(chain5):
    rows, best = chi_vs_horizon(chain5, 8)
    assert [K for K, _ in rows] == list(range(2, 9))
    assert all(chi == 0.0 for _, chi in rows)
    assert best == 2


def test_chi_vs_horizon_identity():
    rows, _ = chi_vs_horizon(np.eye(3), 5, "trace")
    assert all(chi == 0.0 for _, chi in rows)


def test_chi_vs_horizon_class_v():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a = random_transmission_network(rng, 15)
        if chi_report(a, 10).chi > 0:
            break
    rows, best = chi_vs_horizon(a, 10)
    chis = dict(rows)
    assert max(chis.values()) >= chis[2]
    assert chis[best] == max(chis.values())
    assert chis[10] == pytest.approx(chi_report(a, 10).chi, rel=1e-12)


def test_chi_vs_horizon_skips_undefined():
    # a constant input on the identity never reaches the second node
    rows, best = chi_vs_horizon(np.eye(2), 3, "mineig")
    assert [K for K, _ in rows] == [2, 3]
    assert all(np.isnan(chi) for _, chi in rows)
    assert best is None


def test_metric_enum_parse():
    assert Metric.parse("TRACE") is Metric.TRACE
    with pytest.raises(ValueError):
        Metric.parse("rank")


def test_all_schedules_bounded_by_optimum():
    rng = np.random.default_rng(9)
    a = random_transmission_network(rng, 3)
    _, best = tvcs_trace(a, 3)
    for seq in itertools.product(range(3), repeat=3):
        assert metric(gramian(a, Schedule.single(seq)), "trace") <= best * (1 + 1e-12)
