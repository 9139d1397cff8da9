"""Explicit witnesses showing where a hash breaks the LSH collision ordering.

Each constructor builds points in two dimensions (optionally zero-padded to
``dim``): a query ``q``, a high-similarity point ``x_far`` (``q.x_far >= S``)
and a low-similarity point ``y_near`` (``q.y_near <= cS``) that the hash
nevertheless treats as at least as close.  ``margin`` measures how much closer
``y_near`` is (distance gap or cosine gap in the transformed space); a
nonnegative margin means the low-similarity pair collides at least as often,
so no ``p1 > p2`` exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .collision import sign_collision, transformed_cosine
from .core import L2_ALSH, SIGN_ALSH, SIMPLE_LSH, ThresholdPair
from .hashers import build_codes
from .transforms import L2AlshParams, SignAlshParams, l2alsh_P, l2alsh_Q, signalsh_P, signalsh_Q, simple_P

SIM_TOL = 1e-12

L2_NONUNIVERSAL = "l2-nonuniversal"
SYMMETRIC_BOUNDED = "symmetric-bounded"
L2_BOUNDED = "l2-bounded"
SIGN_NONUNIVERSAL = "sign-nonuniversal"
SIGN_BOUNDED = "sign-bounded"
LEMMAS = (L2_NONUNIVERSAL, SYMMETRIC_BOUNDED, L2_BOUNDED, SIGN_NONUNIVERSAL, SIGN_BOUNDED)


@dataclass(frozen=True, eq=False)
class Witness:
    lemma: str
    scheme: str
    params: L2AlshParams | SignAlshParams | None
    q: np.ndarray
    x_far: np.ndarray
    y_near: np.ndarray
    margin: float
    # query paired with x_far when it differs from q
    q_far: np.ndarray | None = None
    branch: int | None = None
    # both points of each pair go through the data-side map (symmetric hash)
    symmetric: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def zero_margin(self) -> bool:
        return self.margin == 0.0

    @property
    def far_query(self) -> np.ndarray:
        return self.q if self.q_far is None else self.q_far


def _embed(v, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if dim < v.shape[0]:
        raise ValueError(f"witness needs at least {v.shape[0]} dimensions, got {dim}")
    return np.concatenate([v, np.zeros(dim - v.shape[0])])


def _unit_pair(S: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors q, x with q.x = S."""
    q = _embed([1.0, 0.0], dim)
    x = _embed([S, math.sqrt(max(1.0 - S * S, 0.0))], dim)
    return q, x


def _check_sims(q, x_far, y_near, t: ThresholdPair, q_far=None):
    qf = q if q_far is None else q_far
    if float(qf @ x_far) < t.S - SIM_TOL:
        raise AssertionError("witness high-similarity pair below S")
    if float(q @ y_near) > t.cS + SIM_TOL:
        raise AssertionError("witness low-similarity pair above cS")


def lemma1_threshold(p: L2AlshParams, S: float) -> float:
    """Smallest c for which the L2-ALSH non-universality construction applies."""
    N = 2 ** (p.m + 1)
    return 1.0 - p.U ** (N - 1) * (1.0 - S ** N) / (2.0 * S)


def lemma1_witness(p: L2AlshParams, t: ThresholdPair, dim: int = 2) -> Witness:
    """L2-ALSH over unit queries and ball data: y = cS q lands closer to Q(q) than x does."""
    if not t.S < 1.0:
        raise ValueError("need 0 < S < 1")
    c0 = lemma1_threshold(p, t.S)
    if t.c < c0:
        raise ValueError(f"c={t.c} is below the construction threshold {c0:.12g}")
    q, x = _unit_pair(t.S, dim)
    y = t.cS * q
    _check_sims(q, x, y, t)
    N = 2 ** (p.m + 1)
    U, S, cS = p.U, t.S, t.cS
    # ||P(x)-Q(q)||^2 - ||P(y)-Q(q)||^2, expanded to avoid cancelling the 1 + m/4 terms
    margin = (U ** N - (cS * U) ** N) - 2.0 * S * U * (1.0 - t.c)
    return Witness(L2_NONUNIVERSAL, L2_ALSH, p, q, x, y, float(margin))


def thm3_witness(t: ThresholdPair, dim: int = 2) -> Witness:
    """No symmetric hash over the ball: a point collides with itself surely.

    The low-similarity pair is (z, z) with ||z||^2 = cS.  When S <= c the
    high-similarity partner is z / c (inside the ball, z.(z/c) = S); otherwise
    no point of the ball has inner product S with z, and a separate unit pair
    with similarity S is used.  Margin is P[h(z) = h(z)] - P[high pair] under
    SIMPLE-LSH, the symmetric hash implemented here.
    """
    nz = math.sqrt(t.cS)
    z = _embed([nz, 0.0], dim)
    notes = ["q.y_near = ||z||^2 = cS; taking ||z|| = cS would give c^2 S^2"]
    if t.S <= t.c:
        x_far = z / t.c
        q_far = None
    else:
        q_far, x_far = _unit_pair(t.S, dim)
        notes.append("S > c: high-similarity pair built from separate unit vectors")
    _check_sims(z, x_far, z, t, q_far)
    margin = 1.0 - _symmetric_collision(x_far, z if q_far is None else q_far)
    return Witness(SYMMETRIC_BOUNDED, SIMPLE_LSH, None, z, x_far, z.copy(), float(margin),
                   q_far=q_far, symmetric=True, notes=notes)


def _symmetric_collision(a, b) -> float:
    """SIMPLE-LSH collision probability with both points mapped by P."""
    return sign_collision(float(transformed_cosine(simple_P(a)[None], simple_P(b)[None])[0]))


def thm4_witness(p: L2AlshParams, t: ThresholdPair, dim: int = 2) -> Witness:
    """L2-ALSH over ball queries: (q2 = cS x2, x2) is at least as close as a unit pair at similarity S."""
    if not t.S < (t.c + 1.0) / 2.0:
        raise ValueError(f"need S < (c+1)/2; got S={t.S}, (c+1)/2={(t.c + 1) / 2}")
    q1, x1 = _unit_pair(t.S, dim)
    x2 = _embed([1.0, 0.0], dim)
    q2 = t.cS * x2
    _check_sims(q2, x1, x2, t, q_far=q1)
    # ||P(x1)-Q(q1)||^2 - ||P(x2)-Q(q2)||^2 = 1 - c^2 S^2 - 2 S U (1 - c)
    margin = 1.0 - t.cS ** 2 - 2.0 * t.S * p.U * (1.0 - t.c)
    return Witness(L2_BOUNDED, L2_ALSH, p, q2, x1, x2, float(margin), q_far=q1)


def signalsh_alpha(m: int) -> float:
    """Maximiser of t^2 / (m/4 + t^(2^(m+1)))."""
    N = 2 ** (m + 1)
    return ((m / 2.0) / (N - 2.0)) ** (1.0 / N)


def signalsh_nonuniversal_bounds(p: SignAlshParams, S: float) -> tuple[float, float]:
    N = 2 ** (p.m + 1)
    UN = p.U ** N
    b1 = math.sqrt(max(1.0 - UN * (1.0 - S ** N) / (UN + p.m / 4.0), 0.0))
    b2 = signalsh_alpha(p.m) / (S * p.U)
    return b1, b2


def _sign_cos(x, q, p: SignAlshParams) -> float:
    return float(transformed_cosine(signalsh_P(x, p)[None], signalsh_Q(q, p)[None])[0])


def signalsh_nonuniversal_witness(p: SignAlshParams, t: ThresholdPair, dim: int = 2) -> Witness:
    """SIGN-ALSH over unit queries and ball data.

    Branch 1 uses y = cS q, branch 2 uses y = (alpha_m / U) q, the point
    whose transformed cosine with Q(q) is largest.
    """
    if not t.S < 1.0:
        raise ValueError("need 0 < S < 1")
    b1, b2 = signalsh_nonuniversal_bounds(p, t.S)
    if t.c >= b1:
        branch = 1
    elif t.c >= b2:
        branch = 2
    else:
        raise ValueError(f"c={t.c} is below both construction bounds ({b1:.12g}, {b2:.12g})")
    q, x = _unit_pair(t.S, dim)
    y = t.cS * q if branch == 1 else (signalsh_alpha(p.m) / p.U) * q
    _check_sims(q, x, y, t)
    margin = _sign_cos(y, q, p) - _sign_cos(x, q, p)
    return Witness(SIGN_NONUNIVERSAL, SIGN_ALSH, p, q, x, y, float(margin), branch=branch)


def signalsh_bounded_witness(p: SignAlshParams, t: ThresholdPair, dim: int = 2) -> Witness:
    """SIGN-ALSH over ball queries: q2 = cS x2 has the transformed cosine U / sqrt(m/4 + U^(2^(m+1)))."""
    q1, x1 = _unit_pair(t.S, dim)
    x2 = _embed([1.0, 0.0], dim)
    q2 = t.cS * x2
    _check_sims(q2, x1, x2, t, q_far=q1)
    N = 2 ** (p.m + 1)
    # both cosines share the factor U / sqrt(m/4 + U^N); the gap is (1 - S) times it
    margin = (1.0 - t.S) * p.U / math.sqrt(p.m / 4.0 + p.U ** N)
    return Witness(SIGN_BOUNDED, SIGN_ALSH, p, q2, x1, x2, float(margin), q_far=q1)


def direct_margin(w: Witness) -> float:
    """Recompute a witness margin from the transformed vectors themselves."""
    if w.scheme == L2_ALSH:
        far = np.sum((l2alsh_P(w.x_far, w.params) - l2alsh_Q(w.far_query, w.params)) ** 2)
        near = np.sum((l2alsh_P(w.y_near, w.params) - l2alsh_Q(w.q, w.params)) ** 2)
        return float(far - near)
    if w.scheme == SIGN_ALSH:
        return _sign_cos(w.y_near, w.q, w.params) - _sign_cos(w.x_far, w.far_query, w.params)
    return 1.0 - _symmetric_collision(w.x_far, w.far_query)


@dataclass(frozen=True)
class MonteCarloCheck:
    p_near: float
    se_near: float
    p_far: float
    se_far: float

    @property
    def passed(self) -> bool:
        # same draws for both pairs; combined standard error is conservative
        return self.p_near >= self.p_far - 3.0 * math.hypot(self.se_near, self.se_far)


def _rate(w: Witness, data_pt, query_pt, n, seed):
    cd = build_codes(w.scheme, w.params, data_pt, "data", n, seed)
    cq = build_codes(w.scheme, w.params, query_pt, "data" if w.symmetric else "query", n, seed)
    p = float(np.count_nonzero(cd.symbols[0] == cq.symbols[0])) / n
    return p, math.sqrt(p * (1.0 - p) / n)


def monte_carlo_check(w: Witness, n: int = 100_000, seed: int = 0) -> MonteCarloCheck:
    """Empirical collision rates of the near and far pairs under shared draws."""
    p_near, se_near = _rate(w, w.y_near, w.q, n, seed)
    p_far, se_far = _rate(w, w.x_far, w.far_query, n, seed)
    return MonteCarloCheck(p_near, se_near, p_far, se_far)


def build_witness(lemma: str, t: ThresholdPair, m: int | None = None, U: float | None = None,
                  r: float = 2.5, dim: int = 2) -> Witness:
    if lemma == L2_NONUNIVERSAL:
        return lemma1_witness(L2AlshParams(m, U, r), t, dim)
    if lemma == SYMMETRIC_BOUNDED:
        return thm3_witness(t, dim)
    if lemma == L2_BOUNDED:
        return thm4_witness(L2AlshParams(m, U, r), t, dim)
    if lemma == SIGN_NONUNIVERSAL:
        return signalsh_nonuniversal_witness(SignAlshParams(m, U), t, dim)
    if lemma == SIGN_BOUNDED:
        return signalsh_bounded_witness(SignAlshParams(m, U), t, dim)
    raise ValueError(f"unknown lemma {lemma!r}; choose from {', '.join(LEMMAS)}")
