"""Analytic and Monte-Carlo collision probabilities of the hash families."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

from .core import L2_ALSH, SCHEMES, as_points
from .hashers import build_codes
from .transforms import transform

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def std_normal_cdf(z):
    """Phi(z) = erfc(-z / sqrt(2)) / 2."""
    return 0.5 * erfc(-np.asarray(z, dtype=np.float64) / _SQRT2)


def _clamp_cos(cos_sim):
    c = np.asarray(cos_sim, dtype=np.float64)
    if np.any(np.abs(c) > 1.0 + 1e-12) or np.any(np.isnan(c)):
        raise ValueError(f"cosine similarity outside [-1, 1]: {cos_sim}")
    return np.clip(c, -1.0, 1.0)


def sign_collision(cos_sim):
    """P[sign(a.u) == sign(a.v)] = 1 - arccos(cos) / pi."""
    out = 1.0 - np.arccos(_clamp_cos(cos_sim)) / math.pi
    return float(out) if np.ndim(out) == 0 else out


def l2_noncollision(delta, r: float):
    """1 - F_r(delta), computed directly so values near 0 keep their precision."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    d = np.asarray(delta, dtype=np.float64)
    if np.any(d < 0) or np.any(np.isnan(d)):
        raise ValueError(f"distance must be nonnegative, got {delta}")
    with np.errstate(divide="ignore", invalid="ignore"):
        t = r / d
        out = erfc(t / _SQRT2) - 2.0 * np.expm1(-0.5 * t * t) / (_SQRT2PI * t)
    out = np.where(d == 0.0, 0.0, np.where(np.isinf(d), 1.0, out))
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def l2_collision(delta, r: float):
    """Collision probability F_r(delta) of floor((a.x + b) / r) at distance delta.

    F_r(delta) = 1 - 2 Phi(-r/delta) - 2 / (sqrt(2 pi) r/delta) * (1 - exp(-(r/delta)^2 / 2)),
    with F_r(0) = 1.
    """
    out = 1.0 - np.asarray(l2_noncollision(delta, r))
    return float(out) if np.ndim(out) == 0 else out


def transformed_cosine(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Row-wise cosine, using the sign(0) = +1 convention for zero vectors."""
    nu = np.linalg.norm(U, axis=1)
    nv = np.linalg.norm(V, axis=1)
    dots = np.einsum("ij,ij->i", U, V)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = np.clip(dots / (nu * nv), -1.0, 1.0)
    # A zero vector always hashes to +1: it collides surely with another zero
    # vector and with probability 1/2 with anything else (cosine 0).
    cos = np.where((nu == 0) & (nv == 0), 1.0, np.where((nu == 0) | (nv == 0), 0.0, cos))
    return cos


def analytic_collision(scheme: str, params, x, q):
    """P[f(x) == g(q)] for data point(s) ``x`` and query point(s) ``q``."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    X = as_points(x, "x")
    Q = as_points(q, "q")
    if X.shape != Q.shape:
        raise ValueError(f"shape mismatch: x {X.shape} vs q {Q.shape}")
    PX = transform(scheme, params, X, "data")
    QQ = transform(scheme, params, Q, "query")
    if scheme == L2_ALSH:
        out = l2_collision(np.linalg.norm(PX - QQ, axis=1), params.r)
    else:
        out = sign_collision(transformed_cosine(PX, QQ))
    out = np.atleast_1d(out)
    return float(out[0]) if np.ndim(x) == 1 and np.ndim(q) == 1 else out


def monte_carlo_collision(scheme: str, params, x, q, n: int, seed: int) -> tuple[float, float]:
    """Empirical collision rate of (x, q) over ``n`` independent draws, with its binomial standard error."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    cx = build_codes(scheme, params, x, "data", n, seed)
    cq = build_codes(scheme, params, q, "query", n, seed)
    if len(cx) != 1 or len(cq) != 1:
        raise ValueError("monte_carlo_collision takes a single pair of points")
    p = float(np.count_nonzero(cx.symbols[0] == cq.symbols[0])) / n
    return p, math.sqrt(p * (1.0 - p) / n)
