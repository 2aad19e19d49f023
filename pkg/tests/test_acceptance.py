"""Acceptance suite: one marked group of tests per criterion.

The terminal summary (see conftest.py) prints one PASS/FAIL line per
criterion with the measured values recorded here.
"""

import csv
import io
import random
import time
from fractions import Fraction as F
from functools import lru_cache
from math import floor, log

import numpy as np
import pytest

from macdonald_chain.cli import main
from macdonald_chain.convergence import (
    binned_pi_qt,
    chi2_distance,
    chi2_lower_bound_1k,
    mixing_time,
    thm51_bound,
    tv_distance,
    tv_lower_bound_1k,
)
from macdonald_chain.exact_chain import (
    aux_matrix,
    aux_matrix_via_operator,
    aux_row,
    check_reversibility,
    hanlon_ell_matrix,
    hanlon_matrix,
    metropolis_matrix,
    power_dist,
    stationarity_residual,
)
from macdonald_chain.measures import pi_ewens, pi_inf_t, pi_qt_table, w_given
from macdonald_chain.partitions import (
    Partition,
    dominance_leq,
    enumerate_partitions,
    sub_multisets,
    z_classical,
)
from macdonald_chain.samplers import (
    RngStream,
    aux_step,
    chinese_restaurant,
    run_chain,
    sample_pi_inf_t,
    sample_w,
    stick_breaking,
)
from macdonald_chain.spectral import beta, eigen_table, gram_check, kostka_qt

from conftest import QT_PAIRS
from helpers import tv

DATA = __import__("pathlib").Path(__file__).parent / "data"
criterion = pytest.mark.criterion


# 1 -------------------------------------------------------------------------


@criterion(1)
def test_c01_table_k10(capsys, record_property):
    printed = {}
    with open(DATA / "table1_k10_q4_t2.csv") as fh:
        for row in csv.DictReader(fh):
            printed[Partition.parse(row["partition"])] = float(row["probability"])
    t0 = time.perf_counter()
    code = main(["table", "--k", "10", "--q", "4", "--t", "2"])
    elapsed = time.perf_counter() - t0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    got = {Partition.parse(r["partition"]): F(r["fraction"]) for r in rows}
    worst = max(abs(float(got[lam]) - p) for lam, p in printed.items())
    record_property("rows", len(printed))
    record_property("max_err", f"{worst:.2e}")
    record_property("seconds", f"{elapsed:.3f}")
    assert code == 0 and len(printed) == 42 and set(got) == set(printed)
    assert worst <= 5e-7
    assert elapsed < 1


# 2 -------------------------------------------------------------------------


def _random_pairs(n, seed):
    rnd = random.Random(seed)
    return [(1 + F(rnd.randint(1, 60), rnd.randint(1, 9)), 1 + F(rnd.randint(1, 60), rnd.randint(1, 9))) for _ in range(n)]


@criterion(2)
@pytest.mark.parametrize("q,t", _random_pairs(5, 2024), ids=str)
def test_c02_k2_closed_forms(q, t):
    M = aux_matrix(2, q, t).to_dense()
    s = 1 / (2 * t)
    assert M == [
        [s * (t + 1), s * (t - 1)],
        [s * (q - 1) * (t + 1) / (q + 1), s * (4 * t + (q - 1) * (t - 1)) / (q + 1)],
    ]
    T = eigen_table(2, q, t)
    assert [list(r) for r in T.index] == [[2], [1, 1]]
    assert T.f[0] == [(1 - q) ** 2 * (1 + q)] * 2
    assert T.f[1] == [(t - 1) * (1 - q**2), (t + 1) * (1 - q) ** 2]
    assert T.beta == [1, (1 + 1 / t) / (1 + q)]


# 3 -------------------------------------------------------------------------


@criterion(3)
@pytest.mark.parametrize("q,t", QT_PAIRS, ids=str)
def test_c03_exact_chain(q, t, record_property):
    t0 = time.perf_counter()
    for k in range(1, 13):
        M = aux_matrix(k, q, t)
        pi = pi_qt_table(k, q, t)
        assert pi.total() == 1
        assert all(s == 1 for s in M.row_sums())
        assert stationarity_residual(M, pi) == 0
        assert check_reversibility(M, pi) == 0
    elapsed = time.perf_counter() - t0
    record_property(f"seconds(q={q},t={t})", f"{elapsed:.1f}")
    # the three pairs share the two-minute budget
    assert elapsed < 40


# 4 -------------------------------------------------------------------------


@criterion(4)
@pytest.mark.parametrize("q,t", [(F(4), F(2)), (F(7, 2), F(9, 4))], ids=str)
def test_c04_eigen_equation_and_gram(q, t):
    for k in range(1, 9):
        M = aux_matrix(k, q, t)
        T = eigen_table(k, q, t, M=M)
        for b, f in zip(T.beta, T.f):
            assert M.apply(f) == [b * x for x in f]
        assert gram_check(T) == 0


@criterion(4)
@pytest.mark.parametrize("q,t", QT_PAIRS, ids=str)
def test_c04_dominance_monotonicity(q, t):
    for k in range(1, 16):
        idx = list(enumerate_partitions(k))
        b = {lam: beta(lam, q, t) for lam in idx}
        for lam in idx:
            for mu in idx:
                if dominance_leq(mu, lam):
                    assert b[mu] <= b[lam]


@criterion(4)
@pytest.mark.parametrize("q,t", QT_PAIRS, ids=str)
def test_c04_k2_kostka(q, t):
    assert kostka_qt(eigen_table(2, q, t)) == [[1, q], [t, 1]]


# 5 -------------------------------------------------------------------------


@criterion(5)
@pytest.mark.parametrize("q,t", QT_PAIRS, ids=str)
def test_c05_operator_construction(q, t):
    for k in range(1, 7):
        A = aux_matrix(k, q, t).to_dense()
        for n in (k, k + 3):
            assert aux_matrix_via_operator(k, q, t, n).to_dense() == A


# 6 and 7 (aux part) ---------------------------------------------------------


@lru_cache(maxsize=None)
def _one_step_tv(k):
    """TV of the exact row ``M((k), .)`` from ``pi_{4,2}``, and ``pi((k))``."""
    pi = pi_qt_table(k, 4, 2)
    row = aux_row((k,), 4, 2)
    vec = [row.get(lam, F(0)) for lam in pi.index]
    return tv_distance(vec, pi, accumulate="float"), float(pi.probs[0])


@criterion(6)
def test_c06_row_collapse_identity():
    for k in range(1, 16):
        row = aux_row((k,), 4, 2)
        inf = pi_inf_t(k, 2)
        assert row == {lam: p for lam, p in zip(inf.index, inf.probs) if p}


@criterion(6)
def test_c06_one_step_tv(record_property):
    t0 = time.perf_counter()
    vals = {k: _one_step_tv(k)[0] for k in (10, 20, 30, 40, 50)}
    elapsed = time.perf_counter() - t0
    record_property("tv", ",".join(f"{v:.5f}" for v in vals.values()))
    record_property("seconds", f"{elapsed:.1f}")
    assert all(abs(v - 0.093) <= 0.001 for v in vals.values())
    assert elapsed < 60


@criterion(7)
def test_c07_aux_mixes_in_one_step(record_property):
    times = {}
    for k in (10, 20, 30, 40, 50):
        d1, top = _one_step_tv(k)
        # the chain starts at (k), so TV at step 0 is 1 - pi((k))
        times[k] = 0 if 1 - top < 0.1 else (1 if d1 < 0.1 else None)
    record_property("aux_steps", ",".join(str(v) for v in times.values()))
    assert all(v == 1 for v in times.values())


@lru_cache(maxsize=None)
def _metropolis_time(k):
    M = metropolis_matrix(k, 4, 2, "float")
    return mixing_time(M, (k,), 0.1, pi_qt_table(k, 4.0, 2.0, "float"), max_steps=200)


@criterion(7)
def test_c07_metropolis_k10(record_property):
    ell = _metropolis_time(10)
    record_property("metropolis_k10", ell)
    assert abs(ell - 8) <= 2


@criterion(7)
@pytest.mark.xfail(strict=True, reason="transposition chain gives 13 steps at k=20; see decisions ledger")
def test_c07_metropolis_k20(record_property):
    ell = _metropolis_time(20)
    record_property("metropolis_k20", ell)
    assert abs(ell - 17) <= 3


# 8 -------------------------------------------------------------------------


@criterion(8)
@pytest.mark.parametrize("q,t", QT_PAIRS, ids=str)
def test_c08_upper_bound(q, t, record_property):
    worst = 0.0
    for k in range(4, 13):
        M = aux_matrix(k, q, t)
        pi = pi_qt_table(k, q, t)
        for ell in range(2, 7):
            d = float(tv_distance(power_dist(M, (k,), ell), pi))
            bound = thm51_bound(k, q, t, ell).upper
            worst = max(worst, 4 * d * d / bound)
            assert 4 * d * d <= bound
    record_property(f"max_ratio(q={q},t={t})", f"{worst:.3f}")


@criterion(8)
def test_c08_tv_at_most_005(record_property):
    implied = (thm51_bound(10, 4, 2, 2).upper / 4) ** 0.5
    record_property("implied_tv", f"{implied:.4f}")
    assert implied <= 0.05


# 9 -------------------------------------------------------------------------


@criterion(9)
@pytest.mark.xfail(strict=True, reason="printed lower bound exceeds exact chi-square for ell >= 3; see decisions ledger")
def test_c09_chi2_lower_bound(record_property):
    short = []
    for k in range(2, 13):
        M = aux_matrix(k, 4, 2)
        pi = pi_qt_table(k, 4, 2)
        for ell in range(2, 7):
            c2 = chi2_distance(power_dist(M, (1,) * k, ell), pi)
            if c2 < chi2_lower_bound_1k(k, 4, 2, ell):
                short.append((k, ell))
    record_property("violations", len(short))
    assert not short


@criterion(9)
def test_c09_tv_lower_bound_from_ones(record_property):
    """Number-of-parts marginal from 40000 chains; a marginal TV never exceeds the full TV."""
    k, q, t, chains = 100, 4, 2, 40_000
    theta_max = -(t - 1) / (q - 1)
    # largest integer ell = floor(log_q k) + theta with theta in the admissible range
    ell = floor(log(k) / log(q)) + floor(theta_max)
    theta = ell - log(k) / log(q)
    assert theta < theta_max
    bound, _ = tv_lower_bound_1k(q, t, theta)
    target = binned_pi_qt(k, q, t).sum(axis=0)
    halves = np.zeros((2, k + 1))
    for c in range(chains):
        rng = RngStream(9, c)
        lam = (1,) * k
        for _ in range(ell):
            lam = aux_step(lam, float(q), float(t), rng)
        halves[c % 2, len(lam)] += 1
    emp = halves.sum(axis=0) / chains
    est = tv(emp, target)
    # split-half disagreement bounds the upward bias of the plug-in estimate
    noise = tv(halves[0] / halves[0].sum(), halves[1] / halves[1].sum())
    record_property("ell", ell)
    record_property("tv_estimate", f"{est:.4f}")
    record_property("noise", f"{noise:.4f}")
    record_property("bound", f"{bound:.4f}")
    assert est - noise >= bound - 0.02


# 10 ------------------------------------------------------------------------


@criterion(10)
@pytest.mark.parametrize("alpha", [F(1), F(2), F(7, 2)], ids=str)
def test_c10_hanlon(alpha):
    for r in range(2, 11):
        assert check_reversibility(hanlon_matrix(r, alpha), pi_ewens(r, alpha)) == 0
    for r in range(2, 9):
        H = hanlon_matrix(r, alpha).to_dense()
        for n in (r, r + 5):
            assert hanlon_ell_matrix(r, alpha, n).to_dense() == H


# 11 ------------------------------------------------------------------------

DRAWS = 1_000_000


def _law(draws, index):
    freq = np.zeros(len(index))
    for lam in draws:
        freq[index.index(lam)] += 1
    return freq / len(draws)


@criterion(11)
def test_c11_stick_breaking(record_property):
    rng = RngStream(11, 0)
    idx = enumerate_partitions(10)
    d = tv(_law([stick_breaking(10, rng) for _ in range(DRAWS)], idx), [1 / z_classical(l) for l in idx])
    record_property("tv_stick", f"{d:.4f}")
    assert d < 0.01


@criterion(11)
def test_c11_crp(record_property):
    rng = RngStream(11, 1)
    theta = 0.5
    idx = enumerate_partitions(10)
    d = tv(_law([chinese_restaurant(10, theta, rng) for _ in range(DRAWS)], idx), pi_ewens(10, 1 / theta, "float").probs)
    record_property("tv_crp", f"{d:.4f}")
    assert d < 0.01


@criterion(11)
def test_c11_sample_w(record_property):
    rng = RngStream(11, 2)
    lam, q = Partition((3, 2, 2, 1, 1, 1)), 1.5
    outcomes = [s for s, _ in sub_multisets(lam) if s != lam]
    pos = {s: i for i, s in enumerate(outcomes)}
    freq = np.zeros(len(outcomes))
    retries = 0
    for _ in range(DRAWS):
        (_, kept), r = sample_w(lam, q, rng, return_retries=True)
        freq[pos[kept]] += 1
        retries += r
    d = tv(freq / DRAWS, [w_given(lam, s, F(3, 2)) for s in outcomes])
    p = 1 - q**-10
    trials = DRAWS + retries
    z = (DRAWS / trials - p) / (p * (1 - p) / trials) ** 0.5
    record_property("tv_w", f"{d:.4f}")
    record_property("z_w", f"{z:.2f}")
    assert d < 0.01 and abs(z) <= 3


@criterion(11)
def test_c11_pi_inf_t(record_property):
    rng = RngStream(11, 3)
    t = 2.0
    idx = enumerate_partitions(10)
    draws, retries = [], 0
    for _ in range(DRAWS):
        mu, r = sample_pi_inf_t(10, t, rng, return_retries=True)
        draws.append(mu)
        retries += r
    d = tv(_law(draws, idx), pi_inf_t(10, t, "float").probs)
    p = 1 - 1 / t
    trials = DRAWS + retries
    z = (DRAWS / trials - p) / (p * (1 - p) / trials) ** 0.5
    record_property("tv_inf", f"{d:.4f}")
    record_property("z_inf", f"{z:.2f}")
    assert d < 0.01 and abs(z) <= 3


@criterion(11)
def test_c11_stationary_aux_chain(record_property):
    rng = RngStream(11, 4)
    trace = run_chain((10,), DRAWS, "aux", {"q": 4.0, "t": 2.0}, rng)
    d = tv(_law(trace.states[1:], enumerate_partitions(10)), pi_qt_table(10, 4.0, 2.0, "float").probs)
    record_property("tv_chain", f"{d:.4f}")
    assert d < 0.01


# 12 ------------------------------------------------------------------------


@criterion(12)
@pytest.mark.parametrize("q", [F(2), F(7, 3), F(41, 10)], ids=str)
def test_c12_q_equals_t(q):
    for k in range(1, 13):
        m = pi_qt_table(k, q, q)
        assert m.probs == [F(1, z_classical(lam)) for lam in m.index]


@criterion(12)
@pytest.mark.parametrize("alpha", [F(1, 2), F(2), F(7, 2)], ids=str)
def test_c12_ewens_limit(alpha):
    t = 1 + 1e-4
    for k in (4, 8, 12):
        got = np.asarray(pi_qt_table(k, t ** float(alpha), t, "float").probs)
        want = np.asarray(pi_ewens(k, alpha, "float").probs)
        assert np.max(np.abs(got - want)) < 1e-3


@criterion(12)
def test_c12_large_t():
    for r in (4, 8, 12):
        got = np.asarray(pi_inf_t(r, 1e6, "float").probs)
        want = np.asarray([1 / z_classical(lam) for lam in enumerate_partitions(r)])
        assert np.max(np.abs(got - want)) < 1e-5


# 13 ------------------------------------------------------------------------


@criterion(13)
@pytest.mark.parametrize("start", ["ones", "single"])
def test_c13_one_step_at_a_million(start, record_property):
    k = 10**6
    lam = Partition._trusted((1,) * k) if start == "ones" else Partition((k,))
    rng = RngStream(13, 0)
    t0 = time.perf_counter()
    nu = aux_step(lam, 4.0, 2.0, rng)
    elapsed = time.perf_counter() - t0
    record_property(f"seconds({start})", f"{elapsed:.3f}")
    assert sum(nu) == k and elapsed < 1


@criterion(13)
def test_c13_ten_thousand_steps(record_property):
    rng = RngStream(13, 1)
    t0 = time.perf_counter()
    trace = run_chain((1,) * 1000, 10_000, "aux", {"q": 4.0, "t": 2.0}, rng)
    elapsed = time.perf_counter() - t0
    record_property("seconds(1e4 steps)", f"{elapsed:.2f}")
    assert len(trace) == 10_001 and elapsed < 10
