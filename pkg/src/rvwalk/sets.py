"""Target sets in R^d described through their ray sections.

Every set answers two questions: pointwise membership and, for a unit
direction ``theta``, the ray section ``{r > 0 : r * theta in A}`` as a finite
union of intervals.  Measures, drift hulls and scale unions are all computed
from ray sections.

Catalog shapes use closed boundaries; ``ray_section(theta, closed=False)``
returns the section of the interior.  Interval endpoints are never tracked
as open or closed since the limit measure gives them no mass.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import nnls

from .errors import (
    ConeViolationError,
    InvalidEpsilonError,
    MissingBoundError,
    UnsupportedShapeError,
)

_UNIT_TOL = 1e-9


# ---------------------------------------------------------------------------
# interval unions


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted disjoint intervals ``(lo, hi)`` with ``0 <= lo < hi <= inf``."""

    intervals: tuple = ()

    @classmethod
    def of(cls, pairs: Iterable[tuple[float, float]]) -> "IntervalUnion":
        cleaned = sorted(
            (max(float(lo), 0.0), float(hi)) for lo, hi in pairs if float(hi) > max(float(lo), 0.0)
        )
        merged: list[list[float]] = []
        for lo, hi in cleaned:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @classmethod
    def positive_axis(cls) -> "IntervalUnion":
        return cls(((0.0, math.inf),))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def contains(self, r: float) -> bool:
        return any(lo <= r <= hi for lo, hi in self.intervals)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion.of(out)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.of(self.intervals + other.intervals)

    def scale(self, s: float) -> "IntervalUnion":
        return IntervalUnion.of((s * lo, s * hi) for lo, hi in self.intervals)

    def tail_mass(self, alpha: float) -> float:
        """``sum (lo**-alpha - hi**-alpha)``: the radial Pareto mass of the union."""
        total = 0.0
        for lo, hi in self.intervals:
            if lo == 0.0:
                return math.inf
            total += lo ** -alpha - (0.0 if math.isinf(hi) else hi ** -alpha)
        return total


def _unit(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if abs(np.linalg.norm(theta) - 1.0) > _UNIT_TOL:
        raise ValueError("ray direction must be a unit vector")
    return theta


def _as_points(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# base class


class StarSet:
    """Interface shared by all target sets."""

    increasing: bool = False
    # ray sections are closed-form (False when they come from a numeric scan)
    exact: bool = True

    def contains(self, x) -> np.ndarray:
        """Membership of points ``x`` with shape ``(..., d)``."""
        raise NotImplementedError

    def ray_section(self, theta, closed: bool = True) -> IntervalUnion:
        raise NotImplementedError

    @property
    def bounded_away(self) -> float:
        """A lower bound on ``inf |x|`` over the set (exact for catalog shapes)."""
        raise NotImplementedError

    @property
    def contains_origin_nbhd(self) -> bool:
        return False

    def cone_delta(self, c) -> float:
        """Largest ``delta`` with the set outside ``K_c^delta`` (a valid lower bound for boxes)."""
        raise ConeViolationError(f"{type(self).__name__} cannot certify the cone condition")

    def scaled(self, u: float) -> "StarSet":
        if u <= 0:
            raise ValueError("scale factor must be positive")
        return ScaledSet(self, float(u))

    def dilate(self, eps: float) -> "StarSet":
        raise UnsupportedShapeError(f"dilation is not available for {type(self).__name__}")

    def erode(self, eps: float) -> "StarSet":
        raise UnsupportedShapeError(f"erosion is not available for {type(self).__name__}")

    def to_config(self) -> dict:
        raise UnsupportedShapeError(f"{type(self).__name__} has no config form")

    # membership through ray sections, for sets without a direct predicate
    def _contains_by_rays(self, x, closed: bool = True) -> np.ndarray:
        pts = _as_points(x)
        flat = pts.reshape(-1, pts.shape[-1])
        out = np.zeros(flat.shape[0], dtype=bool)
        for k, p in enumerate(flat):
            r = np.linalg.norm(p)
            if r == 0.0:
                continue
            sec = self.ray_section(p / r, closed=closed)
            if closed:
                out[k] = sec.contains(r)
            else:
                out[k] = any(lo < r < hi for lo, hi in sec)
        return out.reshape(pts.shape[:-1])


def _check_eps(eps):
    if not eps > 0:
        raise InvalidEpsilonError(f"epsilon must be positive, got {eps}")


def _halfspace_delta(direction: np.ndarray, c) -> float:
    c = np.asarray(c, dtype=float)
    cn = np.linalg.norm(c)
    if cn == 0:
        raise ValueError("drift vector must be nonzero")
    proj = float(direction @ c) / cn
    if proj <= 0:
        raise ConeViolationError(
            "half-space with (d, c) <= 0 reaches into every cone around -c"
        )
    # angle between -c and d lies in (pi/2, pi]; distance to the closed hemisphere
    phi = math.acos(max(-1.0, min(1.0, -proj)))
    return 2.0 * math.sin((phi - math.pi / 2) / 2.0)


# ---------------------------------------------------------------------------
# catalog shapes


class HalfSpace(StarSet):
    """``{x : (x, d) >= a}`` with unit ``d`` and ``a > 0``."""

    increasing = True

    def __init__(self, direction, level: float):
        d = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(d)
        if norm == 0:
            raise ValueError("half-space normal must be nonzero")
        if not level > 0:
            raise ValueError(f"half-space level must be positive, got {level}")
        self.direction = d / norm
        self.level = float(level)

    def __repr__(self):
        return f"HalfSpace({self.direction.tolist()}, {self.level:g})"

    def __eq__(self, other):
        return (
            isinstance(other, HalfSpace)
            and np.allclose(self.direction, other.direction, atol=1e-14)
            and math.isclose(self.level, other.level, rel_tol=1e-14)
        )

    __hash__ = None

    def contains(self, x):
        return _as_points(x) @ self.direction >= self.level

    def ray_section(self, theta, closed=True):
        p = float(_unit(theta) @ self.direction)
        if p <= 0:
            return IntervalUnion.empty()
        return IntervalUnion(((self.level / p, math.inf),))

    @property
    def bounded_away(self):
        return self.level

    def cone_delta(self, c):
        return _halfspace_delta(self.direction, c)

    def scaled(self, u):
        return HalfSpace(self.direction, self.level * u)

    def dilate(self, eps):
        _check_eps(eps)
        if self.level - eps <= 0:
            raise InvalidEpsilonError(
                f"dilating by {eps} would reach the origin (level {self.level})"
            )
        return HalfSpace(self.direction, self.level - eps)

    def erode(self, eps):
        _check_eps(eps)
        return HalfSpace(self.direction, self.level + eps)

    def to_config(self):
        return {"shape": "halfspace", "direction": self.direction.tolist(), "level": self.level}


class BallComplement(StarSet):
    """``{x : |x| >= rho}``."""

    increasing = True

    def __init__(self, radius: float):
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)

    def __repr__(self):
        return f"BallComplement({self.radius:g})"

    def __eq__(self, other):
        return isinstance(other, BallComplement) and math.isclose(self.radius, other.radius)

    __hash__ = None

    def contains(self, x):
        return np.linalg.norm(_as_points(x), axis=-1) >= self.radius

    def ray_section(self, theta, closed=True):
        _unit(theta)
        return IntervalUnion(((self.radius, math.inf),))

    @property
    def bounded_away(self):
        return self.radius

    def cone_delta(self, c):
        raise ConeViolationError("a ball complement contains the whole drift ray -c t")

    def scaled(self, u):
        return BallComplement(self.radius * u)

    def dilate(self, eps):
        _check_eps(eps)
        if self.radius - eps <= 0:
            raise InvalidEpsilonError(f"dilating by {eps} would reach the origin")
        return BallComplement(self.radius - eps)

    def erode(self, eps):
        _check_eps(eps)
        return BallComplement(self.radius + eps)

    def to_config(self):
        return {"shape": "ball-complement", "radius": self.radius}


class Box(StarSet):
    """Axis-aligned box ``prod [lower_i, upper_i]``; bounds may be infinite."""

    def __init__(self, lower, upper):
        lo = np.asarray(lower, dtype=float)
        hi = np.asarray(upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("box bounds must be 1-d arrays of equal length")
        if np.any(~(lo < hi)):
            raise ValueError("box needs lower < upper on every axis")
        self.lower, self.upper = lo, hi

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"

    def __eq__(self, other):
        return (
            isinstance(other, Box)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    __hash__ = None

    @property
    def increasing(self):
        # t x stays inside for t >= 1 only if the box is unbounded wherever it has sign
        pos_ok = np.all((self.upper <= 0) | np.isinf(self.upper))
        neg_ok = np.all((self.lower >= 0) | np.isinf(self.lower))
        return bool(pos_ok and neg_ok)

    def contains(self, x):
        p = _as_points(x)
        return np.all((p >= self.lower) & (p <= self.upper), axis=-1)

    def ray_section(self, theta, closed=True):
        theta = _unit(theta)
        lo_r, hi_r = 0.0, math.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            for t, lo, hi in zip(theta, self.lower, self.upper):
                if t == 0.0:
                    inside = (lo <= 0.0 <= hi) if closed else (lo < 0.0 < hi)
                    if not inside:
                        return IntervalUnion.empty()
                    continue
                a, b = lo / t, hi / t
                if t < 0:
                    a, b = b, a
                lo_r, hi_r = max(lo_r, a), min(hi_r, b)
        return IntervalUnion.of([(lo_r, hi_r)])

    @property
    def bounded_away(self):
        return float(np.linalg.norm(np.clip(0.0, self.lower, self.upper)))

    @property
    def contains_origin_nbhd(self):
        return bool(np.all((self.lower < 0) & (self.upper > 0)))

    def cone_delta(self, c):
        """Exact angular gap to ``-c`` via projection onto the cone spanned by the box."""
        c = np.asarray(c, dtype=float)
        v = -c / np.linalg.norm(c)
        if self.bounded_away == 0.0:
            raise ConeViolationError("box touches the origin")
        choices = []
        rays = []
        for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            finite = [b for b in (lo, hi) if np.isfinite(b)]
            choices.append(finite or [0.0])
            e = np.zeros(len(self.lower))
            if np.isinf(hi):
                e[i] = 1.0
                rays.append(e.copy())
            if np.isinf(lo):
                e[i] = -1.0
                rays.append(e.copy())
        gens = [np.array(p) for p in itertools.product(*choices)] + rays
        G = np.array([g / np.linalg.norm(g) for g in gens if np.linalg.norm(g) > 0]).T
        coef, _ = nnls(G, v)
        proj = G @ coef
        cos_max = float(np.linalg.norm(proj))
        if cos_max >= 1.0 - 1e-12:
            raise ConeViolationError("box reaches the drift ray -c t")
        if cos_max <= 0.0:
            return math.sqrt(2.0)
        return math.sqrt(2.0 - 2.0 * cos_max)

    def scaled(self, u):
        return Box(self.lower * u, self.upper * u)

    def dilate(self, eps):
        _check_eps(eps)
        out = Box(self.lower - eps, self.upper + eps)
        if out.bounded_away <= 0:
            raise InvalidEpsilonError(f"dilating by {eps} would reach the origin")
        return out

    def erode(self, eps):
        _check_eps(eps)
        lo, hi = self.lower + eps, self.upper - eps
        if np.any(lo >= hi):
            return EmptySet()
        return Box(lo, hi)

    def to_config(self):
        return {"shape": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


class Exceedance(StarSet):
    """``{y : y_i > x_i for some i}``, the complement of the orthant ``prod (-inf, x_i]``.

    This is the set whose empty hit count gives ``P(max_j Y_j <= x)`` for
    componentwise maxima.
    """

    increasing = True

    def __init__(self, levels):
        x = np.atleast_1d(np.asarray(levels, dtype=float))
        if np.any(~(x > 0)):
            raise ValueError("exceedance levels must be positive")
        self.levels = x

    def __repr__(self):
        return f"Exceedance({self.levels.tolist()})"

    def __eq__(self, other):
        return isinstance(other, Exceedance) and np.allclose(self.levels, other.levels)

    __hash__ = None

    def contains(self, x):
        return np.any(_as_points(x) > self.levels, axis=-1)

    def ray_section(self, theta, closed=True):
        theta = _unit(theta)
        pos = theta > 0
        if not np.any(pos):
            return IntervalUnion.empty()
        return IntervalUnion(((float(np.min(self.levels[pos] / theta[pos])), math.inf),))

    @property
    def bounded_away(self):
        return float(self.levels.min())

    def cone_delta(self, c):
        eye = np.eye(len(self.levels))
        return min(_halfspace_delta(eye[i], c) for i in range(len(self.levels)))

    def scaled(self, u):
        return Exceedance(self.levels * u)

    def dilate(self, eps):
        _check_eps(eps)
        if np.any(self.levels - eps <= 0):
            raise InvalidEpsilonError(f"dilating by {eps} would reach the origin")
        return Exceedance(self.levels - eps)

    def erode(self, eps):
        # union of eroded half-spaces: an inner approximation of the true erosion
        _check_eps(eps)
        return Exceedance(self.levels + eps)

    def to_config(self):
        return {"shape": "exceedance", "levels": self.levels.tolist()}


class ConeComplementK(StarSet):
    """Complement of ``K_c^delta = {x : |x/|x| + c/|c|| < delta}`` (origin excluded)."""

    increasing = True

    def __init__(self, c, delta: float):
        c = np.asarray(c, dtype=float)
        if np.linalg.norm(c) == 0:
            raise ValueError("drift vector must be nonzero")
        if not delta > 0:
            raise ValueError("cone opening must be positive")
        self.c = c
        self.delta = float(delta)
        self._chat = c / np.linalg.norm(c)

    def __repr__(self):
        return f"ConeComplementK({self.c.tolist()}, {self.delta:g})"

    def contains(self, x):
        p = _as_points(x)
        r = np.linalg.norm(p, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            gap = np.linalg.norm(p / r[..., None] + self._chat, axis=-1)
        return (r > 0) & (gap >= self.delta)

    def ray_section(self, theta, closed=True):
        theta = _unit(theta)
        gap = np.linalg.norm(theta + self._chat)
        inside = gap >= self.delta if closed else gap > self.delta
        return IntervalUnion.positive_axis() if inside else IntervalUnion.empty()

    @property
    def bounded_away(self):
        return 0.0

    def cone_delta(self, c):
        c = np.asarray(c, dtype=float)
        if not np.allclose(c / np.linalg.norm(c), self._chat):
            raise ConeViolationError("cone complement was built for another drift")
        return self.delta

    def to_config(self):
        return {"shape": "cone-complement", "drift": self.c.tolist(), "delta": self.delta}


def default_cone_delta(directions, c) -> float:
    """Half the smallest gap between the atoms and ``-c``: keeps atoms off the cone boundary."""
    c = np.asarray(c, dtype=float)
    chat = c / np.linalg.norm(c)
    gaps = np.linalg.norm(np.atleast_2d(directions) + chat, axis=1)
    return 0.5 * float(gaps.min())


class FullSpace(StarSet):
    increasing = True

    def __repr__(self):
        return "FullSpace()"

    def contains(self, x):
        p = _as_points(x)
        return np.ones(p.shape[:-1], dtype=bool)

    def ray_section(self, theta, closed=True):
        _unit(theta)
        return IntervalUnion.positive_axis()

    @property
    def bounded_away(self):
        return 0.0

    @property
    def contains_origin_nbhd(self):
        return True

    def scaled(self, u):
        return self

    def to_config(self):
        return {"shape": "full-space"}


class EmptySet(StarSet):
    increasing = True

    def __repr__(self):
        return "EmptySet()"

    def contains(self, x):
        p = _as_points(x)
        return np.zeros(p.shape[:-1], dtype=bool)

    def ray_section(self, theta, closed=True):
        return IntervalUnion.empty()

    @property
    def bounded_away(self):
        return math.inf

    def cone_delta(self, c):
        return 2.0

    def scaled(self, u):
        return self


class Generic(StarSet):
    """Set given by a vectorised membership predicate.

    ``predicate`` maps an ``(m, d)`` array to ``m`` booleans and must be pure.
    Ray sections scan ``(0, search_bound]`` on a grid of step ``resolution``
    and refine every sign change by bisection to 1e-10; membership at the
    search bound is taken to persist to infinity.  Topological facts
    (``bounded_away``, ``cone_delta``, ``increasing``) must be declared.
    """

    def __init__(
        self,
        predicate: Callable[[np.ndarray], np.ndarray],
        bounded_away: float,
        search_bound: float | None = None,
        resolution: float | None = None,
        increasing: bool = False,
        contains_origin_nbhd: bool = False,
        cone_delta: float | None = None,
    ):
        self.predicate = predicate
        self._bounded_away = float(bounded_away)
        self.search_bound = search_bound
        self.resolution = resolution
        self.increasing = bool(increasing)
        self._origin = bool(contains_origin_nbhd)
        self._cone_delta = cone_delta
        self.exact = False

    def __repr__(self):
        return f"Generic(bounded_away={self._bounded_away:g}, search_bound={self.search_bound})"

    def contains(self, x):
        p = _as_points(x)
        flat = p.reshape(-1, p.shape[-1])
        return np.asarray(self.predicate(flat), dtype=bool).reshape(p.shape[:-1])

    def ray_section(self, theta, closed=True):
        theta = _unit(theta)
        if self.search_bound is None:
            raise MissingBoundError("Generic set needs a search_bound for ray sections")
        return _scan_ray(self.contains, theta, self.search_bound, self.resolution, self._bounded_away)

    @property
    def bounded_away(self):
        return self._bounded_away

    @property
    def contains_origin_nbhd(self):
        return self._origin

    def cone_delta(self, c):
        if self._cone_delta is None or not self._cone_delta > 0:
            raise ConeViolationError("Generic set must declare cone_delta to be used with a drift")
        return float(self._cone_delta)


def _scan_ray(contains, theta, bound, resolution=None, start=0.0, tol=1e-10) -> IntervalUnion:
    bound = float(bound)
    step = resolution if resolution else bound / 4096.0
    r0 = 0.5 * start if start > 0 else step
    grid = np.arange(r0, bound + 0.5 * step, step)
    if grid[-1] < bound:
        grid = np.append(grid, bound)
    inside = np.asarray(contains(grid[:, None] * theta), dtype=bool)

    def edge(a, b, a_in):
        # invariant: membership(a) == a_in != membership(b)
        while b - a > tol * max(1.0, abs(b)):
            m = 0.5 * (a + b)
            if bool(contains(m * theta[None, :])[0]) == a_in:
                a = m
            else:
                b = m
        return 0.5 * (a + b)

    pieces = []
    lo = grid[0] if inside[0] else None
    for k in range(1, len(grid)):
        if inside[k] != inside[k - 1]:
            x = edge(grid[k - 1], grid[k], bool(inside[k - 1]))
            if inside[k]:
                lo = x
            else:
                pieces.append((lo, x))
                lo = None
    if lo is not None:
        pieces.append((lo, math.inf))
    return IntervalUnion.of(pieces)


# ---------------------------------------------------------------------------
# derived sets


class ScaledSet(StarSet):
    def __init__(self, base: StarSet, u: float):
        self.base, self.u = base, float(u)
        self.increasing = base.increasing
        self.exact = base.exact

    def __repr__(self):
        return f"{self.u:g}*{self.base!r}"

    def contains(self, x):
        return self.base.contains(_as_points(x) / self.u)

    def ray_section(self, theta, closed=True):
        return self.base.ray_section(theta, closed).scale(self.u)

    @property
    def bounded_away(self):
        return self.u * self.base.bounded_away

    @property
    def contains_origin_nbhd(self):
        return self.base.contains_origin_nbhd

    def cone_delta(self, c):
        return self.base.cone_delta(c)

    def scaled(self, u):
        return ScaledSet(self.base, self.u * u)


class IntersectionSet(StarSet):
    def __init__(self, sets: Sequence[StarSet]):
        if not sets:
            raise ValueError("intersection of no sets")
        self.sets = tuple(sets)
        self.increasing = all(s.increasing for s in self.sets)
        self.exact = all(s.exact for s in self.sets)

    def __repr__(self):
        return " & ".join(repr(s) for s in self.sets)

    def contains(self, x):
        out = self.sets[0].contains(x)
        for s in self.sets[1:]:
            out = out & s.contains(x)
        return out

    def ray_section(self, theta, closed=True):
        sec = self.sets[0].ray_section(theta, closed)
        for s in self.sets[1:]:
            if not sec:
                break
            sec = sec.intersect(s.ray_section(theta, closed))
        return sec

    @property
    def bounded_away(self):
        return max(s.bounded_away for s in self.sets)

    @property
    def contains_origin_nbhd(self):
        return all(s.contains_origin_nbhd for s in self.sets)

    def cone_delta(self, c):
        best = None
        for s in self.sets:
            try:
                d = s.cone_delta(c)
            except ConeViolationError:
                continue
            best = d if best is None else max(best, d)
        if best is None:
            raise ConeViolationError("no member of the intersection avoids the cone")
        return best


def intersect(*sets: StarSet) -> StarSet:
    return sets[0] if len(sets) == 1 else IntersectionSet(sets)


class ScaleUnion(StarSet):
    """``A*(t) = U_{t<=s<=1} s cl(A)`` (closed) or ``A°(t) = U_{t<s<=1} s int(A)`` (open)."""

    def __init__(self, base: StarSet, t: float, mode: str = "closed"):
        if not 0 < t < 1:
            raise ValueError(f"scale-union parameter must lie in (0, 1), got {t}")
        if mode not in ("closed", "open"):
            raise ValueError("mode must be 'closed' or 'open'")
        self.base, self.t, self.mode = base, float(t), mode
        self.exact = base.exact

    def __repr__(self):
        return f"ScaleUnion({self.base!r}, t={self.t:g}, {self.mode})"

    def ray_section(self, theta, closed=True):
        # union over s of [s lo, s hi] is the connected interval [t lo, hi]
        sec = self.base.ray_section(theta, closed=(self.mode == "closed") and closed)
        return IntervalUnion.of((self.t * lo, hi) for lo, hi in sec)

    def contains(self, x):
        return self._contains_by_rays(x, closed=self.mode == "closed")

    @property
    def bounded_away(self):
        return self.t * self.base.bounded_away


def scale_union(base: StarSet, t: float, mode: str = "closed") -> StarSet:
    """Union of the scaled copies ``s A`` for ``s`` in ``[t, 1]`` (or ``(t, 1]`` open)."""
    if not 0 < t < 1:
        raise ValueError(f"scale-union parameter must lie in (0, 1), got {t}")
    if base.increasing and mode == "closed":
        return base.scaled(t)
    return ScaleUnion(base, t, mode)


class RadialHull(StarSet):
    """``U_{s>=1} s A``: every ray section ``(lo, hi)`` becomes ``(lo, inf)``."""

    increasing = True

    def __init__(self, base: StarSet, mode: str = "closed"):
        self.base, self.mode = base, mode
        self.exact = base.exact

    def __repr__(self):
        return f"RadialHull({self.base!r}, {self.mode})"

    def ray_section(self, theta, closed=True):
        sec = self.base.ray_section(theta, closed=(self.mode == "closed") and closed)
        if not sec:
            return sec
        return IntervalUnion(((sec.intervals[0][0], math.inf),))

    def contains(self, x):
        return self._contains_by_rays(x, closed=self.mode == "closed")

    @property
    def bounded_away(self):
        return self.base.bounded_away


# ---------------------------------------------------------------------------
# drift hulls


def _section_2d(coef_r, coef_t, bound, t_min, closed=True) -> IntervalUnion:
    """Project ``{(r, t) : coef_r r + coef_t t <= bound, r >= 0, t >= t_min}`` onto ``r``."""
    coef_r = np.asarray(coef_r, float)
    coef_t = np.asarray(coef_t, float)
    bound = np.asarray(bound, float)
    keep = np.isfinite(bound)
    coef_r, coef_t, bound = coef_r[keep], coef_t[keep], bound[keep]
    zero = (coef_r == 0) & (coef_t == 0)
    if np.any(zero):
        ok = bound[zero] >= 0 if closed else bound[zero] > 0
        if not np.all(ok):
            return IntervalUnion.empty()
        coef_r, coef_t, bound = coef_r[~zero], coef_t[~zero], bound[~zero]
    A = np.vstack([np.column_stack([coef_r, coef_t]), [[-1.0, 0.0], [0.0, -1.0]]])
    b = np.concatenate([bound, [0.0, -t_min]])
    scale = np.abs(A).sum(axis=1) + np.abs(b) + 1.0

    verts = []
    for i, j in itertools.combinations(range(len(b)), 2):
        M = A[[i, j]]
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        if abs(det) < 1e-14:
            continue
        p = np.linalg.solve(M, b[[i, j]])
        if np.all(A @ p <= b + 1e-10 * scale * (1.0 + np.abs(p).max())):
            verts.append(p)
    if not verts:
        return IntervalUnion.empty()
    verts = np.array(verts)
    r_lo = max(0.0, float(verts[:, 0].min()))

    cands = [np.array(d, float) for d in ((1, 0), (1, 1), (1, -1), (0, 1))]
    for a in A:
        cands += [np.array([-a[1], a[0]]), np.array([a[1], -a[0]]), -a]
    unbounded = any(
        d[0] > 1e-12 and np.all(A @ (d / np.abs(d).max()) <= 1e-12) for d in cands if np.any(d)
    )
    r_hi = math.inf if unbounded else float(verts[:, 0].max())
    return IntervalUnion.of([(r_lo, r_hi)])


class CHull(StarSet):
    """``c start + B_c`` where ``B_c = {x + c t : x in B, t >= 0}``.

    Equivalently the points ``x`` with ``x - c t in B`` for some ``t >= start``.
    Boxes use an exact two-variable projection; Generic bases search ``t`` on a
    grid up to the horizon where ``x - c t`` must have entered the cone.
    """

    def __init__(self, base: StarSet, c, start: float = 0.0, delta: float | None = None):
        self.base = base
        self.c = np.asarray(c, dtype=float)
        self.start = float(start)
        self.delta = base.cone_delta(self.c) if delta is None else float(delta)
        self.exact = isinstance(base, Box)

    def __repr__(self):
        return f"CHull({self.base!r}, c={self.c.tolist()}, start={self.start:g})"

    increasing = False

    def shifted(self, v: float) -> "CHull":
        return CHull(self.base, self.c, self.start + v, self.delta)

    def contains(self, x):
        p = _as_points(x)
        if isinstance(self.base, Box):
            return self._box_contains(p)
        flat = p.reshape(-1, p.shape[-1])
        out = np.array([self._generic_contains_one(q) for q in flat], dtype=bool)
        return out.reshape(p.shape[:-1])

    def _box_contains(self, p):
        lo, hi, c = self.base.lower, self.base.upper, self.c
        with np.errstate(divide="ignore", invalid="ignore"):
            a = (p - hi) / c
            b = (p - lo) / c
        t_lo = np.where(c > 0, a, np.where(c < 0, b, -np.inf))
        t_hi = np.where(c > 0, b, np.where(c < 0, a, np.inf))
        flat_ok = np.where(c == 0, (p >= lo) & (p <= hi), True)
        lo_t = np.maximum(np.max(t_lo, axis=-1), self.start)
        hi_t = np.min(t_hi, axis=-1)
        return np.all(flat_ok, axis=-1) & (lo_t <= hi_t)

    def _generic_contains_one(self, q):
        cn = np.linalg.norm(self.c)
        horizon = max(self.start, 2.0 * np.linalg.norm(q) / (cn * self.delta)) + 1.0
        res = getattr(self.base, "resolution", None) or (getattr(self.base, "search_bound", None) or 1.0) / 4096.0
        ts = np.arange(self.start, horizon + res / cn, res / cn)
        return bool(np.any(self.base.contains(q[None, :] - ts[:, None] * self.c)))

    def ray_section(self, theta, closed=True):
        theta = _unit(theta)
        if isinstance(self.base, Box):
            lo, hi = self.base.lower, self.base.upper
            # lo_i <= r theta_i - c_i t <= hi_i
            coef_r = np.concatenate([theta, -theta])
            coef_t = np.concatenate([-self.c, self.c])
            bound = np.concatenate([hi, -lo])
            return _section_2d(coef_r, coef_t, bound, self.start, closed)
        bound = getattr(self.base, "search_bound", None)
        if bound is None:
            raise MissingBoundError("drift hull of a Generic set needs the base search_bound")
        reach = (bound + np.linalg.norm(self.c) * self.start) * (1.0 + 2.0 / self.delta)
        return _scan_ray(self.contains, theta, reach, None, self.bounded_away)

    @property
    def bounded_away(self):
        # |x + c t| >= max(theta t, b - |c| t) with theta = |c| delta / 2
        b = self.base.bounded_away
        cn = np.linalg.norm(self.c)
        th = cn * self.delta / 2.0
        return max(th * self.start, b * th / (th + cn))

    def cone_delta(self, c):
        c = np.asarray(c, dtype=float)
        if np.allclose(c / np.linalg.norm(c), self.c / np.linalg.norm(self.c)):
            return self.delta
        raise ConeViolationError("hull was built for another drift direction")


def drift_hull(base: StarSet, c, start: float = 0.0) -> StarSet:
    """``c * start + B_c``; closed forms for half-spaces and exceedance sets."""
    c = np.asarray(c, dtype=float)
    if np.linalg.norm(c) == 0:
        raise ValueError("drift vector must be nonzero")
    if isinstance(base, HalfSpace):
        dc = float(base.direction @ c)
        if dc < 0:
            raise ConeViolationError(
                "half-space with (d, c) < 0 is reached by drifting; the hull is the whole space"
            )
        return HalfSpace(base.direction, base.level + start * dc)
    if isinstance(base, Exceedance):
        if np.any(c < 0):
            raise ConeViolationError("exceedance set with a negative drift component")
        return Exceedance(base.levels + start * c)
    if isinstance(base, CHull):
        cn, bn = np.linalg.norm(c), np.linalg.norm(base.c)
        if not np.allclose(c / cn, base.c / bn):
            raise UnsupportedShapeError("nested drift hulls need parallel drifts")
        return base.shifted(start * cn / bn)
    if isinstance(base, (Box, Generic)):
        return CHull(base, c, start)
    if isinstance(base, EmptySet):
        return base
    if isinstance(base, BallComplement):
        base.cone_delta(c)
    raise UnsupportedShapeError(f"no drift hull for {type(base).__name__}")


def c_hull(base: StarSet, c) -> StarSet:
    """Smallest c-increasing superset ``B_c = {x + c t : x in B, t >= 0}``."""
    return drift_hull(base, c, 0.0)
