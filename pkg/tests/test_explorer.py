import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from partialsearch import explorer as ex
from partialsearch import reduced as rd
from partialsearch.core import IterationPlan, make_space
from partialsearch.planner import asymptotic_queries, optimal_params, query_count

P = IterationPlan


def test_normalize_examples():
    assert ex.normalize_even(P((("G1", 2),))) == P((("G1", 2),))
    assert ex.normalize_even(P((("G1", 1), ("G2", 3), ("G1", 1)))) == P((("Ga", 3),))
    mixed = P((("G1", 1), ("G2", 2), ("G1", 3), ("G2", 1), ("G1", 1)))
    assert ex.normalize_even(mixed) == P((("Ga", 2), ("G1", 2), ("G2", 1), ("G1", 2)))


def test_normalize_rejects_ga():
    with pytest.raises(ValueError):
        ex.normalize_even(P((("Ga", 2),)))


plans = st.lists(st.tuples(st.sampled_from(["G1", "G2"]), st.integers(0, 6)), max_size=8).map(
    lambda s: IterationPlan(tuple(s)))


@given(plans)
def test_normalize_structure(plan):
    out = ex.normalize_even(plan)
    assert all(p % 2 == 0 for k, p in out.steps if k == "G1")
    assert query_count(out) <= query_count(plan) + 1


def _exact_equal_parity(plan):
    return sum(p for k, p in plan.steps if k == "G1") % 2 == 0


@settings(max_examples=60)
@given(plans)
def test_normalize_exact_when_parity_even(plan):
    # with even total G1 parity the rewrite is an identity of exact operators
    if not _exact_equal_parity(plan):
        plan = IterationPlan(plan.steps + (("G1", 1),))
    s = make_space(4 * 64, 4)
    a = rd.plan_matrix(plan, s, "exact")
    b = rd.plan_matrix(ex.normalize_even(plan), s, "exact")
    assert np.abs(a - b).max() <= 1e-10


@settings(max_examples=60)
@given(plans)
def test_normalize_asymptotic_action(plan):
    b = 2**16
    s = make_space(4 * b, 4)
    s1 = rd.reduced_state("s1", s)
    before = rd.plan_matrix(plan, s, "asymptotic") @ s1
    after = rd.plan_matrix(ex.normalize_even(plan), s, "asymptotic") @ s1
    assert np.abs(before - after).max() <= 10 / math.sqrt(b)


def test_normalize_mixed_example_trajectory():
    b = 2**16
    s = make_space(4 * b, 4)
    plan = P((("G1", 1), ("G2", 2), ("G1", 3), ("G2", 1), ("G1", 1)))
    out = ex.normalize_even(plan)
    s1 = rd.reduced_state("s1", s)
    assert np.abs(rd.plan_matrix(plan, s, "exact") @ s1 - rd.plan_matrix(out, s, "asymptotic") @ s1).max() \
        <= 10 / math.sqrt(b)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_smallest_root(A, B, C):
    x = float(ex.smallest_root(A, B, C))
    grid = np.linspace(0, 2 * math.pi, 20001)
    f = A * np.cos(grid) + B * np.sin(grid) + C
    if math.isnan(x):
        assert math.hypot(A, B) <= 1e-15 or abs(C) > math.hypot(A, B) * (1 - 1e-9)
        return
    assert 0 <= x < 2 * math.pi
    assert abs(A * math.cos(x) + B * math.sin(x) + C) <= 1e-9 * (1 + abs(C))
    crossings = grid[:-1][np.sign(f[:-1]) * np.sign(f[1:]) < 0]
    if len(crossings):
        assert x <= crossings[0] + 1e-3


def brute_three_segment(K, N, n2=600, n1=4000):
    """Minimum-query zero of <u| G1 G2^j2 G1^j1 |s1> found by sign changes on a grid."""
    m = ex.LimitModel(K)
    phi2 = np.linspace(0, math.pi, n2)
    phi1 = np.linspace(0, 2 * math.pi, n1)
    last = m.g1(0.0, -1)[2]
    g1 = np.stack([m.g1(p, 1) @ m.s1() for p in phi1])  # (n1, 3)
    vals = np.stack([g1 @ (last @ rd.g2_rotation(p)) for p in phi2])  # (n2, n1)
    best = math.inf
    for i, row in enumerate(vals):
        idx = np.nonzero(np.sign(row[:-1]) * np.sign(row[1:]) < 0)[0]
        if len(idx):
            k = idx[0]
            root = phi1[k] - row[k] * (phi1[k + 1] - phi1[k]) / (row[k + 1] - row[k])
            best = min(best, root * math.sqrt(N) / 2 + phi2[i] * math.sqrt(N / K) / 2)
    return best


def test_scan_k4():
    r = ex.scan_three_segment(4, 4096, 1e-2)
    assert r.best_queries == pytest.approx(39.39, abs=1e-2)
    p = optimal_params(4)
    assert p.eta - p.alpha == pytest.approx(0.339837, abs=1e-6)
    assert r.best_queries == pytest.approx(math.pi * 16 - (p.eta - p.alpha) * 32, abs=1e-2)
    assert r.best_queries == pytest.approx(brute_three_segment(4, 4096), abs=0.05)


def test_scan_k3():
    r = ex.scan_three_segment(3, 4096, 1e-2)
    p = optimal_params(3)
    assert r.best_queries == pytest.approx(math.pi * 16 - (p.eta - p.alpha) * 64 / math.sqrt(3), abs=1e-2)
    assert r.best_queries == pytest.approx(brute_three_segment(3, 4096), abs=0.05)


@pytest.mark.parametrize("K", [3, 4, 5, 8])
def test_scan_no_counterexamples_fine_grid(K):
    r = ex.scan_three_segment(K, 4096, 1e-3)
    assert r.counterexamples == []
    assert r.best_queries >= r.grk_queries - r.grid_step
    assert r.best_queries == pytest.approx(asymptotic_queries(4096, K), abs=1e-3)


def test_scan_grid_halving_stable():
    a = ex.scan_three_segment(4, 4096, 0.2)
    b = ex.scan_three_segment(4, 4096, 0.1)
    assert abs(a.best_queries - b.best_queries) <= 0.2


def test_scan_preconditions():
    with pytest.raises(ValueError):
        ex.scan_three_segment(2, 4096, 0.1)
    with pytest.raises(ValueError):
        ex.scan_three_segment(4, 4096, 0.0)


def test_scan_records():
    r = ex.scan_three_segment(4, 4096, 0.5, keep_records=True)
    assert len(r.records) == len(np.arange(0, math.pi * 16, 0.5))
    assert r.to_dict()["units"] == "queries"


@pytest.mark.parametrize("K", [3, 4, 5])
def test_probe_s1_start(K):
    m = ex.LimitModel(K)
    rec = ex.probe_start(m, m.s1(), 2 * math.pi, 0.05, tol=1e-2)
    p = optimal_params(K)
    grk = math.pi / 4 - p.query_coefficient / math.sqrt(K)
    assert rec["three_cost"] == pytest.approx(grk, abs=1e-3)
    assert rec["gap"] <= 1e-2


def test_probe_target_start_excluded():
    m = ex.LimitModel(4)
    assert "excluded" in ex.probe_start(m, np.array([1.0, 0, 0]), 2 * math.pi, 0.05)


def test_conjecture_probe_small():
    r = ex.conjecture_probe(4, grid_step=1e-2, n_starts=4, seed=3)
    assert r.units == "queries/sqrt(N)"
    for rec in r.counterexamples:
        assert rec["gap"] > r.grid_step and rec in r.records
    assert len(r.records) + len(r.excluded) == 5
    assert r.records[0]["index"] == 0
    assert r.best_queries == pytest.approx(r.grk_queries, abs=1e-3)
    for rec in r.records:
        assert rec["four_cost"] <= rec["three_cost"]


def test_conjecture_probe_deterministic():
    a = ex.conjecture_probe(3, n_starts=2, seed=9).to_dict()
    b = ex.conjecture_probe(3, n_starts=2, seed=9).to_dict()
    assert a == b


def test_conjecture_probe_bounds():
    with pytest.raises(ValueError):
        ex.conjecture_probe(4, j_bounds=math.inf)


# a start found by the 200-start probe (K=4, seed 0) where a four-segment plan wins
WITNESS = np.array([-0.5280787858028362, 0.7674184310833719, 0.3635955825069089])


def test_witness_start_limit_model():
    m = ex.LimitModel(4)
    rec = ex.probe_start(m, WITNESS, 2 * math.pi, 0.05, tol=1e-2)
    assert rec["three_cost"] == pytest.approx(0.6004, abs=1e-3)
    assert rec["gap"] > 0.07
    # the finer three-segment grid does not close the gap
    assert ex._min_three_segment(m, WITNESS / np.linalg.norm(WITNESS), 2 * math.pi, 0.005).cost \
        == pytest.approx(rec["three_cost"], abs=1e-6)


def test_witness_start_finite_integer_counts():
    # exact matrices, integer counts, b = 1024: brute force over every three-segment plan
    s = make_space(4 * 1024, 4)
    G1, G2 = rd.exact_matrix("G1", s), rd.exact_matrix("G2", s)
    phi = WITNESS / np.linalg.norm(WITNESS)
    J1, J2 = int(math.pi * 64) + 2, int(math.pi * 32) + 2
    P1, P2 = [np.eye(3)], [np.eye(3)]
    for _ in range(J1):
        P1.append(G1 @ P1[-1])
    for _ in range(J2):
        P2.append(G2 @ P2[-1])
    inner = np.einsum("kij,aj->aki", np.array(P2), np.array([P @ phi for P in P1]))
    thr = 0.02
    best3 = math.inf
    for j3 in range(J1 + 1):
        j1, j2 = np.nonzero(np.abs(inner @ P1[j3][2]) <= thr)
        if len(j1):
            best3 = min(best3, int((j1 + j2).min()) + j3)
    best4 = min(a + c + 2 for a in range(J2 + 1) for c in range(J2 + 1)
                if abs((G1 @ P2[a] @ G1 @ P2[c] @ phi)[2]) <= thr)
    assert (best3, best4) == (38, 34)
