"""Deterministic maps that reduce inner products to angles or distances.

Every function accepts a single vector (1-D) or a batch of row vectors (2-D)
and returns the same rank.  Norm powers ``||Ux||^(2^k)`` are built by repeated
squaring of ``||Ux||^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import L2_ALSH, NORM_TOL, SIGN_ALSH, SIMPLE_ALSH, SIMPLE_LSH, DomainError, as_points


@dataclass(frozen=True)
class L2AlshParams:
    m: int = 3
    U: float = 0.83
    r: float = 2.5

    def __post_init__(self):
        _check_mU(self.m, self.U)
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")


@dataclass(frozen=True)
class SignAlshParams:
    m: int = 2
    U: float = 0.75

    def __post_init__(self):
        _check_mU(self.m, self.U)


def _check_mU(m, U):
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if not (0.0 < U < 1.0):
        raise ValueError(f"U must lie in (0, 1), got {U}")


def _batch(x, name):
    arr = np.asarray(x)
    single = arr.ndim == 1
    return as_points(arr, name), single


def _out(z, single):
    return z[0] if single else z


def clamp_to_ball(X: np.ndarray, name: str = "x") -> tuple[np.ndarray, np.ndarray]:
    """Return ``(X', sq_norms)`` with rows of norm in (1, 1+tol] pulled onto the sphere.

    Rows further outside the ball raise ``DomainError``.
    """
    sq = np.einsum("ij,ij->i", X, X)
    norms = np.sqrt(sq)
    bad = np.flatnonzero(norms > 1.0 + NORM_TOL)
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"{name}[{i}] has norm {norms[i]!r} > 1; rescale the data into the unit ball")
    over = norms > 1.0
    if np.any(over):
        X = X.copy()
        X[over] /= norms[over, None]
        sq = np.where(over, 1.0, sq)
    return X, sq


def check_unit(X: np.ndarray, name: str = "q") -> None:
    norms = np.linalg.norm(X, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > NORM_TOL)
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"{name}[{i}] has norm {norms[i]!r}; queries must be normalized")


def norm_powers(sq: np.ndarray, m: int) -> np.ndarray:
    """Columns ``sq, sq^2, sq^4, ..., sq^(2^(m-1))``, i.e. ``||v||^(2^k)`` for k=1..m."""
    cols = np.empty((sq.shape[0], m))
    cur = sq
    for k in range(m):
        cols[:, k] = cur
        cur = cur * cur
    return cols


def top_norm_power(sq: np.ndarray, m: int) -> np.ndarray:
    """``||v||^(2^(m+1))`` from ``sq = ||v||^2``."""
    cur = sq
    for _ in range(m):
        cur = cur * cur
    return cur


def l2alsh_P(x, p: L2AlshParams):
    """[Ux; ||Ux||^2; ||Ux||^4; ...; ||Ux||^(2^m)]"""
    X, single = _batch(x, "x")
    X, sq = clamp_to_ball(X, "x")
    UX = p.U * X
    return _out(np.hstack([UX, norm_powers(p.U * p.U * sq, p.m)]), single)


def l2alsh_Q(q, p: L2AlshParams):
    """[q; 1/2; ...; 1/2]

    Queries are checked against the ball only; the MIPS setting further
    assumes unit queries, which callers enforce where they need it.
    """
    Q, single = _batch(q, "q")
    Q, _ = clamp_to_ball(Q, "q")
    return _out(np.hstack([Q, np.full((Q.shape[0], p.m), 0.5)]), single)


def l2alsh_distance_sq(x, q, p: L2AlshParams):
    """Closed form of ``||P(x) - Q(q)||^2``.

    Equals ``||q||^2 + m/4 + ||Ux||^(2^(m+1)) - 2U q.x``; with unit ``q`` the
    leading term is 1.
    """
    X, _ = clamp_to_ball(as_points(x, "x"), "x")
    Q, _ = clamp_to_ball(as_points(q, "q"), "q")
    sx = p.U * p.U * np.einsum("ij,ij->i", X, X)
    sq = np.einsum("ij,ij->i", Q, Q)
    out = sq + p.m / 4.0 + top_norm_power(sx, p.m) - 2.0 * p.U * np.einsum("ij,ij->i", X, Q)
    return out if np.ndim(x) == 2 or np.ndim(q) == 2 else float(out[0])


def signalsh_P(x, p: SignAlshParams):
    """[Ux; 1/2 - ||Ux||^2; ...; 1/2 - ||Ux||^(2^m)]"""
    X, single = _batch(x, "x")
    X, sq = clamp_to_ball(X, "x")
    UX = p.U * X
    return _out(np.hstack([UX, 0.5 - norm_powers(p.U * p.U * sq, p.m)]), single)


def signalsh_Q(q, p: SignAlshParams):
    """[q; 0; ...; 0]"""
    Q, single = _batch(q, "q")
    Q, _ = clamp_to_ball(Q, "q")
    return _out(np.hstack([Q, np.zeros((Q.shape[0], p.m))]), single)


def signalsh_P_sq_norm(x, p: SignAlshParams):
    """Closed form ``||P(x)||^2 = m/4 + ||Ux||^(2^(m+1))`` (the sum telescopes)."""
    X, _ = clamp_to_ball(as_points(x, "x"), "x")
    sx = p.U * p.U * np.einsum("ij,ij->i", X, X)
    out = p.m / 4.0 + top_norm_power(sx, p.m)
    return out if np.ndim(x) == 2 else float(out[0])


def simple_P(x):
    """[x; sqrt(1 - ||x||^2)], a point on the unit sphere in d+1 dimensions."""
    X, single = _batch(x, "x")
    X, sq = clamp_to_ball(X, "x")
    pad = np.sqrt(np.maximum(1.0 - sq, 0.0))
    return _out(np.hstack([X, pad[:, None]]), single)


def simplealsh_P(x):
    """[x; sqrt(1 - ||x||^2); 0]"""
    X, single = _batch(x, "x")
    X, sq = clamp_to_ball(X, "x")
    pad = np.sqrt(np.maximum(1.0 - sq, 0.0))
    return _out(np.hstack([X, pad[:, None], np.zeros((X.shape[0], 1))]), single)


def simplealsh_Q(y):
    """[y; 0; sqrt(1 - ||y||^2)]"""
    Y, single = _batch(y, "y")
    Y, sq = clamp_to_ball(Y, "y")
    pad = np.sqrt(np.maximum(1.0 - sq, 0.0))
    return _out(np.hstack([Y, np.zeros((Y.shape[0], 1)), pad[:, None]]), single)


def transform(scheme: str, params, points, side: str) -> np.ndarray:
    """Apply the data-side (``P``) or query-side map of ``scheme`` to a batch.

    SIMPLE-LSH is symmetric: both sides use ``P``, and its queries must be
    unit vectors. The asymmetric schemes accept any query in the ball.
    """
    if side not in ("data", "query"):
        raise ValueError(f"side must be 'data' or 'query', got {side!r}")
    X = as_points(points, side)
    if scheme == SIMPLE_LSH:
        if side == "query":
            check_unit(X, "q")
        return simple_P(X)
    if scheme == SIMPLE_ALSH:
        return simplealsh_P(X) if side == "data" else simplealsh_Q(X)
    if scheme == L2_ALSH:
        if not isinstance(params, L2AlshParams):
            raise TypeError("l2-alsh needs L2AlshParams")
        return l2alsh_P(X, params) if side == "data" else l2alsh_Q(X, params)
    if scheme == SIGN_ALSH:
        if not isinstance(params, SignAlshParams):
            raise TypeError("sign-alsh needs SignAlshParams")
        return signalsh_P(X, params) if side == "data" else signalsh_Q(X, params)
    raise ValueError(f"unknown scheme {scheme!r}")


def transformed_dim(scheme: str, params, dim: int) -> int:
    if scheme == SIMPLE_LSH:
        return dim + 1
    if scheme == SIMPLE_ALSH:
        return dim + 2
    return dim + params.m
