"""Hamming-ranking retrieval benchmark over a user/item factorization.

Items (rows of ``R``) form the database and users (rows of ``L``) are the
queries.  For each query, items are ranked by Hamming distance between hash
codes; ties are broken by a seeded per-query shuffle followed by a stable
sort.  Precision is recorded at each of the T recall levels k/T, at the rank
where the k-th true top-T item appears, and averaged over queries level by
level.  The area under such a curve is its mean precision.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import L2_ALSH, SIGN_ALSH, SIMPLE_ALSH, SIMPLE_LSH, Dataset, QuerySet, normalize_queries, rescale_dataset
from .factorization import Factorization
from .hashers import build_codes, hamming_matrix, substream
from .transforms import L2AlshParams, SignAlshParams

PR_HEADER = ["scheme", "T", "K", "recall", "precision"]

# Operating points used for the movie-recommendation comparison.
DEFAULT_PARAMS = {
    SIMPLE_LSH: None,
    SIMPLE_ALSH: None,
    L2_ALSH: L2AlshParams(m=3, U=0.83, r=2.5),
    SIGN_ALSH: SignAlshParams(m=2, U=0.75),
}
SIGN_ALSH_ALT = SignAlshParams(m=3, U=0.85)


@dataclass(frozen=True, eq=False)
class PRCurve:
    scheme: str
    T: int
    K: int
    recall: np.ndarray
    precision: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.recall.tolist(), self.precision.tolist()))


def scheme_label(scheme: str, params) -> str:
    if params is None:
        return scheme
    fields = ";".join(f"{k}={v:g}" for k, v in vars(params).items())
    return f"{scheme}[{fields}]"


def pr_auc(curve: PRCurve) -> float:
    return float(np.mean(curve.precision))


def ground_truth_topT(L: np.ndarray, R: np.ndarray, T: int, query_indices) -> np.ndarray:
    """Exact top-T items by inner product per query; ties go to the lower item index."""
    n_items = R.shape[0]
    if not 1 <= T <= n_items:
        raise ValueError(f"T={T} must lie in [1, {n_items}]")
    scores = np.asarray(L)[np.asarray(query_indices)] @ np.asarray(R).T
    order = np.argsort(-scores, axis=1, kind="stable")
    return order[:, :T]


def rank_positions(order: np.ndarray, relevant: np.ndarray) -> np.ndarray:
    """1-based positions in ``order`` at which the relevant items appear, ascending."""
    return np.flatnonzero(np.isin(order, relevant)) + 1


def precision_recall_at_ranks(order: np.ndarray, relevant: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Precision and recall after each rank position 1..len(order)."""
    hits = np.cumsum(np.isin(order, relevant))
    ranks = np.arange(1, len(order) + 1)
    return hits / ranks, hits / len(relevant)


def hamming_rank(dists: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    perm = rng.permutation(dists.shape[0])
    return perm[np.argsort(dists[perm], kind="stable")]


def prepare(scheme: str, fact: Factorization, query_indices) -> tuple[np.ndarray, np.ndarray]:
    """Items scaled into the unit ball; queries normalized, or scaled into the ball for SIMPLE-ALSH."""
    items, _ = rescale_dataset(Dataset(fact.R))
    users = np.asarray(fact.L)[np.asarray(query_indices)]
    if scheme == SIMPLE_ALSH:
        queries, _ = rescale_dataset(Dataset(users))
        return items.points, queries.points
    return items.points, normalize_queries(QuerySet(users)).points


def sample_queries(fact: Factorization, n_query_sample: int, seed: int) -> np.ndarray:
    candidates = np.flatnonzero(np.linalg.norm(fact.L, axis=1) > 0)
    if candidates.size == 0:
        raise ValueError("every user vector is zero")
    if n_query_sample >= candidates.size:
        return candidates
    picked = substream(seed, 1).choice(candidates, size=n_query_sample, replace=False)
    return np.sort(picked)


def run_retrieval(scheme: str, params, fact: Factorization, T_values, K_values,
                  n_query_sample: int, seed: int, threads: int = 1) -> list[PRCurve]:
    """Precision-recall curves of Hamming ranking, one per (T, K), T-major order."""
    T_values = [int(T) for T in T_values]
    K_values = [int(K) for K in K_values]
    n_items = fact.R.shape[0]
    if not T_values or not K_values:
        raise ValueError("need at least one T and one K")
    if any(not 1 <= T <= n_items for T in T_values):
        raise ValueError(f"every T must lie in [1, {n_items}]")
    if any(K < 1 for K in K_values):
        raise ValueError("every K must be positive")
    if n_query_sample < 1:
        raise ValueError("n_query_sample must be positive")

    qidx = sample_queries(fact, n_query_sample, seed)
    items, queries = prepare(scheme, fact, qidx)
    Kmax = max(K_values)
    item_codes = build_codes(scheme, params, items, "data", Kmax, seed)
    query_codes = build_codes(scheme, params, queries, "query", Kmax, seed)
    truth = ground_truth_topT(fact.L, fact.R, max(T_values), qidx)

    # precision[T][K] has one row per sampled query, filled by position
    prec = {(T, K): np.empty((len(qidx), T)) for T in T_values for K in K_values}

    def work(rows):
        for K in K_values:
            D = hamming_matrix(query_codes.prefix(K).take(rows), item_codes.prefix(K))
            for local, row in enumerate(rows):
                order = hamming_rank(D[local], substream(seed, 2, int(qidx[row]), K))
                for T in T_values:
                    pos = rank_positions(order, truth[row, :T])
                    prec[(T, K)][row] = np.arange(1, T + 1) / pos

    chunks = np.array_split(np.arange(len(qidx)), max(1, min(threads, len(qidx))))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    else:
        for ch in chunks:
            work(ch)

    label = scheme_label(scheme, params)
    return [PRCurve(label, T, K, np.arange(1, T + 1) / T, prec[(T, K)].mean(axis=0))
            for T in T_values for K in K_values]


def emit_pr_csv(curves, out=None) -> str:
    """Write curves as ``scheme,T,K,recall,precision`` rows; returns the CSV text."""
    curves = list(curves)
    if not curves:
        raise ValueError("no curves to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PR_HEADER)
    for cv in curves:
        for rec, pre in cv.points:
            w.writerow([cv.scheme, cv.T, cv.K, f"{rec:.10g}", f"{pre:.10g}"])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return text
