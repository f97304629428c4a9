import math

import numpy as np
import pytest
from scipy.optimize import brentq

from partialsearch import planner as pl
from partialsearch import statevector as sv
from partialsearch.core import IterationPlan, make_space


def brute_params(K):
    """Root-solve both optimality equations independently of the closed forms."""
    alpha = brentq(lambda a: math.cos(2 * a) - (K - 2) / (2 * (K - 1)), 1e-9, math.pi / 2 - 1e-9, xtol=1e-15)
    # sin/cos form avoids the pole of tan at K = 2
    f = lambda e: math.sin(2 * e / math.sqrt(K)) * (K - 2) - math.sqrt(3 * K - 4) * math.cos(2 * e / math.sqrt(K))
    eta = brentq(f, 1e-9, math.sqrt(K) * math.pi / 2 * 0.999, xtol=1e-15)
    return eta, alpha


@pytest.mark.parametrize("K, eta, alpha", [
    (2, math.pi * math.sqrt(2) / 4, math.pi / 4),
    (3, math.sqrt(3) * math.atan(math.sqrt(5)) / 2, math.acos(0.25) / 2),
    (4, math.atan(math.sqrt(2)), math.acos(1 / 3) / 2),
])
def test_optimal_params_spot_values(K, eta, alpha):
    p = pl.optimal_params(K)
    assert p.eta == pytest.approx(eta, abs=1e-14)
    assert p.alpha == pytest.approx(alpha, abs=1e-14)


def test_optimal_params_rounded():
    assert pl.optimal_params(2).eta == pytest.approx(1.110721, abs=1e-6)
    assert pl.optimal_params(3).alpha == pytest.approx(0.659058, abs=1e-6)
    # sqrt(3) * atan(sqrt(5)) / 2 = 0.9961561..., so six decimals give 0.996156
    assert pl.optimal_params(3).eta == pytest.approx(0.996156, abs=1e-6)
    assert pl.optimal_params(4).alpha == pytest.approx(0.615480, abs=1e-6)
    assert pl.optimal_params(4).eta == pytest.approx(0.955317, abs=1e-6)


@pytest.mark.parametrize("K", range(2, 65))
def test_optimal_params_equations(K):
    p = pl.optimal_params(K)
    assert (p.eta, p.alpha) == pytest.approx(brute_params(K), abs=1e-12)
    assert math.cos(2 * p.alpha) == pytest.approx((K - 2) / (2 * (K - 1)), rel=1e-12, abs=1e-15)
    if K > 2:
        assert math.tan(2 * p.eta / math.sqrt(K)) * (K - 2) == pytest.approx(math.sqrt(3 * K - 4), rel=1e-12)
    assert 0 < p.alpha < math.pi / 2 and p.eta > 0


def test_optimal_params_rejects():
    with pytest.raises(ValueError):
        pl.optimal_params(1)


def test_iteration_counts_4096():
    s = make_space(4096, 4)
    c1, c2 = pl.continuous_counts(s)
    assert c1 == pytest.approx(math.pi * 16 - pl.optimal_params(4).eta * 32, abs=1e-12)
    assert c1 == pytest.approx(19.70, abs=0.01) and c2 == pytest.approx(19.70, abs=0.01)
    assert pl.iteration_counts(s) == (20, 20)
    j1, j2 = pl.iteration_counts(s)
    assert pl.query_count(pl.grk_plan(j1, j2)) == 41


def test_refined_counts_keep_query_total():
    s = make_space(4096, 4)
    j1, j2 = pl.iteration_counts(s, refine=True)
    assert j1 + j2 == 40
    assert abs(pl.run_grk(s, "reduced_exact", counts=(j1, j2)).u_amplitude) <= abs(
        pl.run_grk(s, "reduced_exact").u_amplitude)


def test_continuous_j1_linear_in_root_n():
    K = 4
    j = [pl.continuous_counts(make_space(K * b, K))[0] for b in (256, 1024)]
    # sqrt(N) doubles from 32 to 64
    p = pl.optimal_params(K)
    assert j[1] - j[0] == pytest.approx((math.pi / 4 - p.eta / math.sqrt(K)) * 32, abs=1e-12)


def test_degenerate_counts():
    from partialsearch.core import DegenerateGeometry
    with pytest.raises(DegenerateGeometry):
        pl.iteration_counts(make_space(4, 2))


def test_query_count():
    assert pl.query_count(IterationPlan((("G1", 5), ("G2", 3)))) == 8
    assert pl.query_count(IterationPlan((("Ga", 4),))) == 6
    assert pl.query_count(IterationPlan()) == 0


def test_run_grk_full_4096():
    s = make_space(4096, 4, 1234)
    run = pl.run_grk(s, "full")
    assert run.u_amplitude**2 <= 0.05
    assert run.target_block_probability >= 0.95
    assert run.queries == run.j1 + run.j2 + 1 == 41
    assert run.block_probabilities.sum() == pytest.approx(1, abs=1e-12)
    assert run.block_probabilities.argmax() == s.target_block


def test_representations_agree():
    s = make_space(1024, 8, 5)
    full = pl.run_grk(s, "full")
    exact = pl.run_grk(s, "reduced_exact")
    asym = pl.run_grk(s, "reduced_asymptotic")
    assert np.abs(full.final_state - exact.final_state).max() <= 1e-12
    assert full.target_block_probability == pytest.approx(exact.target_block_probability, abs=1e-12)
    assert np.abs(asym.final_state - exact.final_state).max() <= 2 / math.sqrt(s.block_size)


def test_b_sweep():
    amps = [abs(pl.run_grk(make_space(4 * b, 4), "full").u_amplitude) for b in (64, 256, 1024)]
    assert amps[0] <= 0.25
    for a, b in zip(amps, amps[1:]):
        assert b <= a + 0.01


def test_target_block_probability_ladder():
    probs = [pl.run_grk(make_space(4 * b, 4, 3), "full").target_block_probability for b in (64, 256, 1024, 4096)]
    for a, b in zip(probs, probs[1:]):
        assert b >= a - 0.01
    assert probs[-1] > 0.99


@pytest.mark.parametrize("K", [2, 3, 4, 5, 8, 16])
def test_continuous_limit_zero_amplitude(K):
    run = pl.run_grk(make_space(K * 64, K), "reduced_asymptotic", continuous=True)
    assert abs(run.u_amplitude) <= 1e-10


def test_continuous_needs_asymptotic():
    with pytest.raises(ValueError):
        pl.run_grk(make_space(64, 4), "full", continuous=True)


def test_asymptotic_query_gap_shrinks():
    K = 4
    gaps = []
    for b in (2**4, 2**12, 2**18):
        s = make_space(K * b, K)
        j1, j2 = pl.iteration_counts(s)
        gaps.append(abs(j1 + j2 - pl.asymptotic_queries(s.n_items, K)) / math.sqrt(s.n_items))
        # rounding each count moves the total by at most 1
        assert gaps[-1] <= 1 / math.sqrt(s.n_items)
    assert gaps[0] > gaps[1] > gaps[2]


def test_full_grover_256():
    s = make_space(256, 4, 77)
    psi = sv.run_sequence(s, IterationPlan((("G1", 12),)))
    p = sv.target_probability(s, psi)
    assert p >= 0.999
    assert p == pytest.approx(math.sin(25 * s.angles.theta1) ** 2, abs=1e-12)
