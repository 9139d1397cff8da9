"""Hashing quality: closed form for SIMPLE-LSH, grid search for the ALSH schemes.

Worst-case collision bounds
---------------------------
For a unit query ``q`` and a data point with ``s = q.x`` and ``n = ||x|| >= |s|``:

* L2-ALSH: ``||P(x) - Q(q)||^2 = 1 + m/4 + (Un)^(2^(m+1)) - 2Us``.  Over
  ``s >= S`` this is largest at ``s = S, n = 1``; over ``s <= cS`` it is
  smallest at ``s = n = cS``.  So ``p1 = F_r(sqrt(1 + m/4 + U^(2^(m+1)) - 2SU))``
  and ``p2 = F_r(sqrt(1 + m/4 + (cSU)^(2^(m+1)) - 2cSU))``.
* SIGN-ALSH: the transformed cosine is ``Us / sqrt(m/4 + (Un)^(2^(m+1)))``.
  Over ``s >= S`` it is smallest at ``s = S, n = 1``.  Over ``s <= cS`` it is
  largest at ``n = s``, where ``t -> t / sqrt(m/4 + t^(2^(m+1)))`` with
  ``t = Us`` peaks at ``t = alpha_m = ((m/2) / (2^(m+1) - 2))^(1 / 2^(m+1))``;
  the bound therefore uses ``t = min(cSU, alpha_m)``.

The default grid (m in 1..6, U in 0.01..0.99, r in 0.1..5.0) is a
reconstruction chosen to contain the commonly used operating points
(m=3, U=0.83, r=2.5); it is not a published grid.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .collision import l2_noncollision, sign_collision
from .core import CollisionPair, ThresholdPair, hashing_quality
from .transforms import L2AlshParams, SignAlshParams

DEFAULT_S_VALUES = (0.3, 0.5, 0.7, 0.9, 0.99, 0.999)
CSV_HEADER = ["S", "c", "rho_simple", "rho_l2alsh", "m_l2", "U_l2", "r_l2", "rho_signalsh", "m_sign", "U_sign"]


def _steps(start: int, stop: int, scale: float) -> list[float]:
    return [round(k * scale, 10) for k in range(start, stop + 1)]


@dataclass(frozen=True)
class GridSpec:
    m_values: tuple = tuple(range(1, 7))
    U_values: tuple = tuple(_steps(1, 99, 0.01))
    r_values: tuple = tuple(_steps(1, 50, 0.1))

    def __post_init__(self):
        for name in ("m_values", "U_values", "r_values"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if any(int(m) != m or m < 1 for m in self.m_values):
            raise ValueError("m values must be positive integers")
        if any(not 0 < U < 1 for U in self.U_values):
            raise ValueError("U values must lie in (0, 1)")
        if any(not r > 0 for r in self.r_values):
            raise ValueError("r values must be positive")


@dataclass(frozen=True)
class RhoResult:
    rho: float
    p1: float
    p2: float
    params: L2AlshParams | SignAlshParams | None = None


@dataclass(frozen=True)
class Infeasible:
    """No parameter setting in the grid gives p1 > p2."""

    reason: str = field(default="no grid point yields p1 > p2")


def _result(p1: float, p2: float, params=None) -> RhoResult:
    return RhoResult(hashing_quality(CollisionPair(p1, p2)), p1, p2, params)


def rho_simple(t: ThresholdPair) -> RhoResult:
    if not t.S < 1.0:
        raise ValueError("rho is 0 at S = 1; need 0 < S < 1")
    p1 = 1.0 - math.acos(t.S) / math.pi
    p2 = 1.0 - math.acos(t.cS) / math.pi
    return _result(p1, p2)


def _grid_arrays(grid: GridSpec, with_r: bool):
    m = np.asarray(grid.m_values, dtype=np.float64)[:, None, None]
    U = np.asarray(grid.U_values, dtype=np.float64)[None, :, None]
    r = np.asarray(grid.r_values if with_r else (1.0,), dtype=np.float64)[None, None, :]
    return m, U, r


def _pow2(base, m):
    """base ** (2 ** (m + 1))"""
    return np.power(base, 2.0 ** (m + 1))


def l2alsh_distance_bounds(t: ThresholdPair, m, U):
    """Worst-case transformed distances (far pair, near pair) for L2-ALSH."""
    S, cS = t.S, t.cS
    d_hi = 1.0 + m / 4.0 + _pow2(U, m) - 2.0 * S * U
    d_lo = 1.0 + m / 4.0 + _pow2(cS * U, m) - 2.0 * cS * U
    return np.sqrt(d_hi), np.sqrt(d_lo)


def signalsh_cosine_bounds(t: ThresholdPair, m, U):
    """Worst-case transformed cosines (cos_min over q.x >= S, cos_max over q.x <= cS)."""
    N = 2.0 ** (m + 1)
    cos_min = t.S * U / np.sqrt(m / 4.0 + _pow2(U, m))
    alpha = ((m / 2.0) / (N - 2.0)) ** (1.0 / N)
    tt = np.minimum(t.cS * U, alpha)
    cos_max = tt / np.sqrt(m / 4.0 + _pow2(tt, m))
    return cos_min, cos_max


def _argmin(log_p1, log_p2, feasible):
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(feasible, log_p1 / log_p2, np.inf)
    flat = int(np.argmin(rho))
    if not np.isfinite(rho.flat[flat]):
        return None
    return np.unravel_index(flat, rho.shape)


def rho_l2alsh(t: ThresholdPair, grid: GridSpec | None = None) -> RhoResult | Infeasible:
    grid = grid or GridSpec()
    m, U, r = _grid_arrays(grid, with_r=True)
    d_hi, d_lo = l2alsh_distance_bounds(t, m, U)
    # F_r(d) depends on d / r only
    q1 = l2_noncollision(d_hi / r, 1.0)
    q2 = l2_noncollision(d_lo / r, 1.0)
    p1, p2 = 1.0 - q1, 1.0 - q2
    feasible = (p1 > p2) & (p1 < 1.0) & (p2 > 0.0)
    with np.errstate(divide="ignore"):
        idx = _argmin(np.log1p(-q1), np.log1p(-q2), feasible)
    if idx is None:
        return Infeasible()
    i, j, k = idx
    params = L2AlshParams(int(grid.m_values[i]), float(grid.U_values[j]), float(grid.r_values[k]))
    return _result(float(p1[idx]), float(p2[idx]), params)


def rho_signalsh(t: ThresholdPair, grid: GridSpec | None = None) -> RhoResult | Infeasible:
    grid = grid or GridSpec()
    m, U, _ = _grid_arrays(grid, with_r=False)
    cos_min, cos_max = signalsh_cosine_bounds(t, m, U)
    p1 = sign_collision(cos_min)
    p2 = sign_collision(cos_max)
    feasible = (p1 > p2) & (p1 < 1.0) & (p2 > 0.0)
    with np.errstate(divide="ignore"):
        idx = _argmin(np.log(p1), np.log(p2), feasible)
    if idx is None:
        return Infeasible()
    i, j, _ = idx
    params = SignAlshParams(int(grid.m_values[i]), float(grid.U_values[j]))
    return _result(float(p1[idx]), float(p2[idx]), params)


def _fmt(v) -> str:
    return f"{v:.10g}"


def rho_rows(S_values, c_values, grid: GridSpec | None = None) -> list[list[str]]:
    if not S_values:
        raise ValueError("S_values must be nonempty")
    if not c_values:
        raise ValueError("c_values must be nonempty")
    grid = grid or GridSpec()
    rows = []
    for S in S_values:
        for c in c_values:
            t = ThresholdPair(S, c)
            simple = rho_simple(t)
            l2 = rho_l2alsh(t, grid)
            sg = rho_signalsh(t, grid)
            row = [_fmt(S), _fmt(c), _fmt(simple.rho)]
            if isinstance(l2, RhoResult):
                row += [_fmt(l2.rho), str(l2.params.m), _fmt(l2.params.U), _fmt(l2.params.r)]
            else:
                row += ["", "", "", ""]
            if isinstance(sg, RhoResult):
                row += [_fmt(sg.rho), str(sg.params.m), _fmt(sg.params.U)]
            else:
                row += ["", "", ""]
            rows.append(row)
    return rows


def emit_rho_curves(S_values, c_values, grid: GridSpec | None = None, out=None) -> list[list[str]]:
    """Tabulate optimal rho for all three hashes, one row per (S, c).

    ``out`` may be a path or a text stream; infeasible cells are left empty.
    """
    rows = rho_rows(S_values, c_values, grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    if out is not None:
        if hasattr(out, "write"):
            out.write(buf.getvalue())
        else:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
    return rows
