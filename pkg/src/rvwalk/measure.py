"""Limit measure ``mu``, ruin functional ``mu*``, finite-dimensional limits and the Frechet scale.

With exact Pareto radii and atoms ``theta_i`` of weight ``w_i`` the limit
measure is a finite sum of radial integrals,

    mu(A) = sum_i w_i sum_{(lo, hi) in section(A, theta_i)} (lo**-alpha - hi**-alpha),

so every quantity here reduces to ray sections of some derived set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AmbiguousSetError,
    DivergentIntegralError,
    InfiniteMeasureError,
    UnboundedNearOriginError,
)
from .model import RegVarModel
from .sets import HalfSpace, RadialHull, StarSet, drift_hull, intersect

# bisection tolerance of numerically scanned ray sections
_SCAN_TOL = 1e-10


@dataclass(frozen=True)
class MeasureValue:
    value: float
    abs_error_bound: float = 0.0
    method: str = "closed-form"

    def __float__(self):
        return float(self.value)


def _mu_raw(model: RegVarModel, A: StarSet, closed: bool = True) -> tuple[float, float]:
    alpha = model.alpha
    total = err = 0.0
    for theta, w in zip(model.directions, model.weights):
        sec = A.ray_section(theta, closed=closed)
        mass = sec.tail_mass(alpha)
        if math.isinf(mass):
            raise UnboundedNearOriginError(f"{A!r} reaches the origin along an atom")
        total += w * mass
        if not A.exact:
            for lo, hi in sec:
                for r in (lo, hi):
                    if 0 < r < math.inf:
                        err += w * alpha * r ** (-alpha - 1) * _SCAN_TOL * max(1.0, r)
    return total, err


def mu(model: RegVarModel, A: StarSet, closed: bool = True) -> MeasureValue:
    """Limit measure of ``A`` (or of its interior when ``closed=False``).

    Raises
    ------
    UnboundedNearOriginError
        If ``A`` is not bounded away from the origin.
    """
    if not A.bounded_away > 0:
        raise UnboundedNearOriginError(f"{A!r} is not bounded away from 0; its measure is infinite")
    value, err = _mu_raw(model, A, closed)
    if A.exact:
        return MeasureValue(value, 0.0, "closed-form")
    return MeasureValue(value, err, "quadrature")


def _halfspace_mu_star(model: RegVarModel, H: HalfSpace, c: np.ndarray) -> float:
    proj = np.clip(model.directions @ H.direction, 0.0, None)
    mass = float(model.weights @ proj ** model.alpha)
    return mass * H.level ** (1.0 - model.alpha) / ((model.alpha - 1.0) * float(H.direction @ c))


def _adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 50):
    """Iterative adaptive Simpson; returns ``(integral, error_estimate)``."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = err = 0.0
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = f(0.5 * (a + m)), f(0.5 * (m + b))
        left = (m - a) * (fa + 4 * lm + fm) / 6.0
        right = (b - m) * (fm + 4 * rm + fb) / 6.0
        delta = left + right - whole
        if abs(delta) <= 15 * tol or depth >= max_depth:
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
        else:
            stack.append((m, b, fm, rm, fb, right, tol / 2, depth + 1))
            stack.append((a, m, fa, lm, fm, left, tol / 2, depth + 1))
    return total, err


def mu_star(
    model: RegVarModel,
    A: StarSet,
    c,
    tol: float = 1e-10,
    method: str = "auto",
    rtol: float = 1e-8,
) -> MeasureValue:
    """Ruin constant ``mu*(A) = int_0^inf mu(c v + A_c) dv``.

    Parameters
    ----------
    tol : float
        Absolute error budget, split evenly between quadrature and the
        truncated tail beyond ``V``.
    rtol : float
        Relative error budget.  When the bound from ``tol`` exceeds
        ``rtol * value`` the integral is redone with a tighter budget.
    method : {"auto", "quadrature"}
        ``"auto"`` uses the closed form for half-spaces.

    Notes
    -----
    Every point of ``c v + A_c`` has norm at least ``theta v`` with
    ``theta = |c| delta / 2``, where ``delta`` is the cone gap of ``A``.
    Hence ``mu(c v + A_c) <= (theta v)**-alpha`` and the tail beyond ``V``
    is at most ``theta**-alpha V**(1-alpha) / (alpha-1)``.
    """
    if model.alpha <= 1:
        raise DivergentIntegralError(f"mu* diverges for alpha <= 1 (alpha={model.alpha})")
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    c = np.asarray(c, dtype=float)
    delta = A.cone_delta(c)
    if method == "auto" and isinstance(A, HalfSpace):
        return MeasureValue(_halfspace_mu_star(model, A, c), 0.0, "closed-form")

    if not A.exact:
        return _mu_star_by_exit_time(model, A, c, delta, tol)

    res = _mu_star_quadrature(model, A, c, delta, tol)
    for _ in range(4):
        if res.value <= 0 or res.abs_error_bound <= rtol * res.value:
            break
        res = _mu_star_quadrature(model, A, c, delta, 0.5 * rtol * res.value)
    return res


def _mu_star_quadrature(model: RegVarModel, A: StarSet, c: np.ndarray, delta: float, tol: float) -> MeasureValue:
    alpha = model.alpha
    theta = np.linalg.norm(c) * delta / 2.0
    # theta**-alpha V**(1-alpha) / (alpha-1) = tol/2
    V = (0.5 * tol * (alpha - 1.0) * theta ** alpha) ** (1.0 / (1.0 - alpha))
    tail = theta ** -alpha * V ** (1.0 - alpha) / (alpha - 1.0)

    def g(v):
        return _mu_raw(model, drift_hull(A, c, v))[0]

    edges = [0.0, 1.0]
    while edges[-1] < V:
        edges.append(min(2.0 * edges[-1], V))
    per_panel = 0.5 * tol / (len(edges) - 1)
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        s, e = _adaptive_simpson(g, lo, hi, per_panel)
        total += s
        err += e
    return MeasureValue(total, err + tail, "quadrature")


def _exit_time(A: StarSet, x: np.ndarray, c: np.ndarray, horizon: float, n_grid: int = 2048) -> float:
    """``sup{t >= 0 : x - c t in A}`` on a grid refined by bisection (0 if never)."""
    ts = np.linspace(0.0, horizon, n_grid)
    hit = np.flatnonzero(A.contains(x[None, :] - ts[:, None] * c))
    if hit.size == 0:
        return 0.0
    k = hit[-1]
    if k == n_grid - 1:
        return horizon
    a, b = ts[k], ts[k + 1]
    while b - a > 1e-10 * max(1.0, b):
        m = 0.5 * (a + b)
        if A.contains((x - m * c)[None, :])[0]:
            a = m
        else:
            b = m
    return a


def _mu_star_by_exit_time(model, A, c, delta, tol):
    # Fubini: mu*(A) = sum_i w_i int alpha r**(-alpha-1) tau_i(r) dr with
    # tau_i(r) = sup{t : r theta_i - c t in A}; beyond t = 2r/(|c| delta) the
    # backward ray sits inside the cone, so tau_i(r) <= 2r/(|c| delta)
    alpha = model.alpha
    cn = float(np.linalg.norm(c))
    slope = 2.0 / (cn * delta)
    th = cn * delta / 2.0
    r0 = A.bounded_away * th / (th + cn)
    # tail: int_R^inf alpha r**-alpha slope dr = tol / 2
    R = (0.5 * tol * (alpha - 1.0) / (alpha * slope)) ** (1.0 / (1.0 - alpha))
    tail = alpha * slope * R ** (1.0 - alpha) / (alpha - 1.0)
    total = err = 0.0
    for theta, w in zip(model.directions, model.weights):

        def f(r):
            if r <= 0:
                return 0.0
            return alpha * r ** (-alpha - 1.0) * _exit_time(A, r * theta, c, slope * r + 1.0)

        edges = [r0]
        while edges[-1] < R:
            edges.append(min(2.0 * edges[-1], R))
        per_panel = 0.5 * tol / max(1, len(edges) - 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            s, e = _adaptive_simpson(f, lo, hi, per_panel, max_depth=30)
            total += w * s
            err += w * e
    return MeasureValue(total, err + tail, "quadrature")


def _classify(A: StarSet) -> str:
    if A.contains_origin_nbhd:
        return "origin"
    if A.bounded_away > 0:
        return "away"
    raise AmbiguousSetError(
        f"{A!r} neither contains a neighbourhood of 0 nor is bounded away from it"
    )


def m_fidi(model: RegVarModel, times: Sequence[float], sets: Sequence[StarSet]) -> MeasureValue:
    """Limit of the finite-dimensional restriction at ``times`` on ``A_1 x ... x A_k``.

    Returns ``sum_{i<=j} (t_i - t_{i-1}) mu(A_i & ... & A_k)`` where ``j`` is the
    first index whose set excludes the origin.
    """
    times = [float(t) for t in times]
    if len(times) != len(sets) or not times:
        raise ValueError("times and sets must be nonempty and of equal length")
    if any(b < a for a, b in zip(times[:-1], times[1:])) or times[0] < 0 or times[-1] > 1:
        raise ValueError("times must be nondecreasing in [0, 1]")
    kinds = [_classify(A) for A in sets]
    if "away" not in kinds:
        raise InfiniteMeasureError("no set is bounded away from 0; the limit is infinite")
    j = kinds.index("away")
    value = err = 0.0
    prev = 0.0
    exact = True
    for i in range(j + 1):
        inter = intersect(*sets[i:])
        mv = mu(model, inter)
        value += (times[i] - prev) * mv.value
        err += (times[i] - prev) * mv.abs_error_bound
        exact = exact and mv.method == "closed-form"
        prev = times[i]
    return MeasureValue(value, err, "closed-form" if exact else "quadrature")


def frechet_scale(model: RegVarModel, A: StarSet, mode: str = "closed") -> MeasureValue:
    """``v = mu(U_{s>=1} s A)``; ``mode="open"`` uses the interior of ``A``."""
    if not A.bounded_away > 0:
        raise UnboundedNearOriginError(f"{A!r} is not bounded away from 0")
    if A.increasing and mode == "closed":
        return mu(model, A)
    return mu(model, RadialHull(A, mode), closed=mode == "closed")
