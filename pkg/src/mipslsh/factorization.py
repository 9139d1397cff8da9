"""Ratings ingestion and the pureSVD factorization used as a MIPS workload."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hashers import substream

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class RatingsMatrix:
    """Observed ratings as index triples; ids are remapped to 0..n-1 in order of first appearance."""

    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray
    n_users: int
    n_items: int
    user_ids: tuple = ()
    item_ids: tuple = ()

    def dense(self) -> np.ndarray:
        Z = np.zeros((self.n_users, self.n_items))
        Z[self.users, self.items] = self.ratings
        return Z


@dataclass(frozen=True, eq=False)
class Factorization:
    """``L`` (users x f) and ``R`` (items x f) with ``L @ R.T`` the rank-f approximation."""

    L: np.ndarray
    R: np.ndarray

    @property
    def f(self) -> int:
        return self.L.shape[1]


def ingest_ratings(source, delimiter: str | None = "\t") -> RatingsMatrix:
    """Parse ``user<delim>item<delim>rating[<delim>...]`` lines.

    ``source`` is a path or an iterable of text lines.  Extra columns (e.g.
    MovieLens timestamps) are ignored; ``delimiter=None`` splits on
    whitespace.  A repeated (user, item) pair keeps its last rating.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = list(source)

    user_index: dict[str, int] = {}
    item_index: dict[str, int] = {}
    cells: dict[tuple[int, int], float] = {}
    duplicates = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split(delimiter)
        if len(parts) < 3:
            raise ValueError(f"line {lineno}: expected user, item, rating; got {line!r}")
        user, item, raw = parts[0].strip(), parts[1].strip(), parts[2].strip()
        try:
            rating = float(raw)
        except ValueError:
            raise ValueError(f"line {lineno}: rating {raw!r} is not a number") from None
        if not np.isfinite(rating):
            raise ValueError(f"line {lineno}: rating {raw!r} is not finite")
        u = user_index.setdefault(user, len(user_index))
        i = item_index.setdefault(item, len(item_index))
        if (u, i) in cells:
            duplicates += 1
        cells[(u, i)] = rating
    if not cells:
        raise ValueError("no ratings found in input")
    if duplicates:
        log.warning("%d duplicate (user, item) pairs; kept the last rating of each", duplicates)

    keys = np.array(list(cells.keys()), dtype=np.int64)
    vals = np.array(list(cells.values()), dtype=np.float64)
    Z = RatingsMatrix(keys[:, 0], keys[:, 1], vals, len(user_index), len(item_index),
                      tuple(user_index), tuple(item_index))
    log.info("ingested %d ratings: %d users, %d items, mean %.4f",
             len(vals), Z.n_users, Z.n_items, float(vals.mean()))
    return Z


def truncated_svd(A: np.ndarray, f: int, seed: int = 0, oversample: int = 10,
                  tol: float = 1e-10, max_iter: int = 500):
    """Top-``f`` singular triplets of ``A`` by randomized subspace iteration.

    Returns ``(W, sigma, V)`` with ``A ~ W @ diag(sigma) @ V.T``.  Iterates
    until the leading ``f`` singular values change by less than ``tol``
    relative to the largest one.
    """
    A = np.asarray(A, dtype=np.float64)
    n_rows, n_cols = A.shape
    if not 1 <= f <= min(n_rows, n_cols):
        raise ValueError(f"f={f} must lie in [1, {min(n_rows, n_cols)}]")
    k = min(f + oversample, n_rows, n_cols)
    omega = substream(seed, 4).standard_normal((n_cols, k))
    Qm, _ = np.linalg.qr(A @ omega)
    prev = None
    for _ in range(max_iter):
        Zm, _ = np.linalg.qr(A.T @ Qm)
        Qm, _ = np.linalg.qr(A @ Zm)
        Ub, s, Vt = np.linalg.svd(Qm.T @ A, full_matrices=False)
        scale = s[0] if s[0] > 0 else 1.0
        if prev is not None and np.max(np.abs(s[:f] - prev)) <= tol * scale:
            break
        prev = s[:f].copy()
    else:
        raise ConvergenceError(f"subspace iteration did not converge in {max_iter} iterations")
    return Qm @ Ub[:, :f], s[:f], Vt[:f].T


def pure_svd(Z: RatingsMatrix, f: int, seed: int = 0) -> Factorization:
    """Rank-f SVD of the mean-centred, zero-filled ratings matrix; L = W Sigma, R = V."""
    if not 1 <= f <= min(Z.n_users, Z.n_items):
        raise ValueError(f"f={f} exceeds min(n_users, n_items)={min(Z.n_users, Z.n_items)}")
    mean = float(Z.ratings.mean())
    M = np.zeros((Z.n_users, Z.n_items))
    M[Z.users, Z.items] = Z.ratings - mean
    W, sigma, V = truncated_svd(M, f, seed=seed)
    return Factorization(W * sigma, V)


def synthetic_ratings(n_users: int = 500, n_items: int = 1000, rank: int = 50,
                      density: float = 0.2, noise: float = 0.5, seed: int = 0) -> RatingsMatrix:
    """Noisy samples of a low-rank preference matrix with skewed item popularity.

    Item latent vectors get log-normal scales so item norms vary, which is
    what makes inner-product search differ from cosine search.
    """
    rng = substream(seed, 3)
    spectrum = 1.0 / np.sqrt(np.arange(1, rank + 1))
    Lt = rng.standard_normal((n_users, rank)) * spectrum
    Rt = rng.standard_normal((n_items, rank)) * rng.lognormal(0.0, 0.5, size=(n_items, 1))
    Y = Lt @ Rt.T
    Y = 3.0 + Y / Y.std()
    mask = rng.random((n_users, n_items)) < density
    users, items = np.nonzero(mask)
    ratings = Y[users, items] + noise * rng.standard_normal(users.shape[0])
    return RatingsMatrix(users, items, ratings, n_users, n_items)


def synthetic_factorization(n_users: int = 500, n_items: int = 1000, f: int = 50, seed: int = 0) -> Factorization:
    return pure_svd(synthetic_ratings(n_users, n_items, rank=f, seed=seed), f, seed=seed)
