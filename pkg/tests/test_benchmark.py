import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mipslsh.benchmark import (
    DEFAULT_PARAMS,
    PR_HEADER,
    PRCurve,
    emit_pr_csv,
    ground_truth_topT,
    hamming_rank,
    pr_auc,
    precision_recall_at_ranks,
    rank_positions,
    run_retrieval,
    scheme_label,
)
from mipslsh.factorization import Factorization, synthetic_factorization
from mipslsh.hashers import build_codes, hamming_matrix


@pytest.fixture(scope="module")
def small_fact():
    return synthetic_factorization(n_users=60, n_items=120, f=8, seed=0)


def test_ground_truth_examples():
    L = np.array([[1.0, 0.0]])
    R = np.array([[0.2, 0.0], [0.9, 0.0], [0.5, 0.0]])
    np.testing.assert_array_equal(ground_truth_topT(L, R, 3, [0]), [[1, 2, 0]])
    R_tie = np.array([[0.5, 0.0], [0.9, 0.0], [0.5, 0.0]])
    np.testing.assert_array_equal(ground_truth_topT(L, R_tie, 3, [0]), [[1, 0, 2]])
    with pytest.raises(ValueError):
        ground_truth_topT(L, R, 4, [0])


def test_rank_helpers():
    order = np.array([3, 0, 2, 1])
    np.testing.assert_array_equal(rank_positions(order, np.array([1, 3])), [1, 4])
    prec, rec = precision_recall_at_ranks(order, np.array([1, 3]))
    np.testing.assert_allclose(prec, [1, 0.5, 1 / 3, 0.5])
    np.testing.assert_allclose(rec, [0.5, 0.5, 0.5, 1.0])


def test_hamming_rank_breaks_ties_by_seeded_shuffle():
    d = np.array([1, 0, 1, 0, 1])
    a = hamming_rank(d, np.random.default_rng(0))
    b = hamming_rank(d, np.random.default_rng(0))
    np.testing.assert_array_equal(a, b)
    assert set(a[:2]) == {1, 3}
    assert np.all(np.diff(d[a]) >= 0)


def test_T1_perfect_retrieval():
    # one user aligned with item 0; SIMPLE-LSH codes of q and item 0 coincide
    L = np.array([[1.0, 0.0]])
    R = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, -1.0]])
    curves = run_retrieval("simple-lsh", None, Factorization(L, R), [1], [32], 1, seed=0)
    assert curves[0].points == [(1.0, 1.0)]


def test_T_equals_n_items(small_fact):
    curves = run_retrieval("simple-lsh", None, small_fact, [120], [16], 5, seed=0)
    # the last recall level is reached only at the final rank or earlier
    assert curves[0].recall[-1] == 1.0
    assert curves[0].precision[-1] == pytest.approx(1.0)


def test_run_retrieval_deterministic_and_thread_invariant(small_fact):
    args = ("l2-alsh", DEFAULT_PARAMS["l2-alsh"], small_fact, [1, 5], [16, 64], 30)
    a = run_retrieval(*args, seed=4, threads=1)
    b = run_retrieval(*args, seed=4, threads=1)
    c = run_retrieval(*args, seed=4, threads=4)
    assert emit_pr_csv(a) == emit_pr_csv(b) == emit_pr_csv(c)
    assert [(cv.T, cv.K) for cv in a] == [(1, 16), (1, 64), (5, 16), (5, 64)]


@pytest.mark.parametrize("scheme", list(DEFAULT_PARAMS))
def test_curve_ranges(small_fact, scheme):
    for cv in run_retrieval(scheme, DEFAULT_PARAMS[scheme], small_fact, [10], [32], 20, seed=1):
        assert np.all((cv.precision > 0) & (cv.precision <= 1))
        np.testing.assert_allclose(cv.recall, np.arange(1, 11) / 10)
        assert 0 < pr_auc(cv) <= 1


def test_large_K_approaches_exact_ranking():
    fact = synthetic_factorization(n_users=20, n_items=40, f=5, seed=2)
    cv = run_retrieval("simple-lsh", None, fact, [5], [2 ** 14], 10, seed=0)[0]
    # exact inner-product ranking gives precision 1 at every recall level
    assert pr_auc(cv) > 0.9
    short = run_retrieval("simple-lsh", None, fact, [5], [8], 10, seed=0)[0]
    assert pr_auc(cv) > pr_auc(short)


def test_self_distance_zero_for_simple_lsh():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((5, 4))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    d = hamming_matrix(build_codes("simple-lsh", None, X, "query", 128, 0),
                       build_codes("simple-lsh", None, X, "data", 128, 0))
    np.testing.assert_array_equal(np.diag(d), 0)


@given(st.integers(2, 30), st.integers(0, 2 ** 31))
@settings(max_examples=100)
def test_pr_invariants(n, seed):
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    relevant = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
    prec, rec = precision_recall_at_ranks(order, relevant)
    assert np.all((prec >= 0) & (prec <= 1)) and np.all((rec >= 0) & (rec <= 1))
    assert np.all(np.diff(rec) >= 0)
    assert rec[-1] == 1.0


def test_run_retrieval_validation(small_fact):
    with pytest.raises(ValueError):
        run_retrieval("simple-lsh", None, small_fact, [0], [8], 5, 0)
    with pytest.raises(ValueError):
        run_retrieval("simple-lsh", None, small_fact, [1], [0], 5, 0)
    with pytest.raises(ValueError):
        run_retrieval("simple-lsh", None, small_fact, [], [8], 5, 0)


def test_emit_pr_csv():
    cv = PRCurve("simple-lsh", 10, 64, np.arange(1, 11) / 10, np.linspace(1, 0.1, 10))
    text = emit_pr_csv([cv])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == PR_HEADER and len(rows) == 11
    assert emit_pr_csv([cv]) == text
    with pytest.raises(ValueError):
        emit_pr_csv([])


def test_scheme_label():
    assert scheme_label("l2-alsh", DEFAULT_PARAMS["l2-alsh"]) == "l2-alsh[m=3;U=0.83;r=2.5]"
    assert scheme_label("simple-lsh", None) == "simple-lsh"
