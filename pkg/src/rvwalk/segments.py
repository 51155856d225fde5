"""Long strange segments: the longest window whose average increment lies in ``A``.

``R_n(A) = max{k : S_{i+k} - S_i in k A for some i}`` with ``max of nothing = 0``.
For a half-space ``{(x, d) >= a}`` the condition reads ``P_{i+k} >= P_i`` for
the prefix sums ``P`` of ``(Z_j, d) - a``, which is solved in ``O(n log n)``
with a suffix maximum and a binary search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .estimate import EstimateResult, _result
from .measure import frechet_scale, mu
from .model import RegVarModel, ScalingSchedule, a_n, radial_tail
from .sample import DEFAULT_SEED, WalkPath, chunk_sizes, draw_steps, run_chunks
from .sets import HalfSpace, StarSet, scale_union


@dataclass(frozen=True)
class SegmentResult:
    length: int
    start: int  # -1 when length == 0


def _sums(path) -> np.ndarray:
    sums = path.sums if isinstance(path, WalkPath) else np.asarray(path, dtype=float)
    if sums.ndim == 1:
        sums = sums[:, None]
    return sums


def _halfspace_longest(sums: np.ndarray, H: HalfSpace) -> SegmentResult:
    n = sums.shape[0] - 1
    P = sums @ H.direction - H.level * np.arange(n + 1)
    suffix_max = np.maximum.accumulate(P[::-1])[::-1]
    # last j with suffix_max[j] >= P[i]; suffix_max is nonincreasing
    last = np.searchsorted(-suffix_max, -P, side="right") - 1
    gap = last - np.arange(n + 1)
    i = int(np.argmax(gap))
    if gap[i] <= 0:
        return SegmentResult(0, -1)
    return SegmentResult(int(gap[i]), i)


def _naive_longest(sums: np.ndarray, A: StarSet, kmin: int = 1) -> SegmentResult:
    n = sums.shape[0] - 1
    for k in range(n, kmin - 1, -1):
        means = (sums[k:] - sums[:-k]) / k
        hit = np.flatnonzero(A.contains(means))
        if hit.size:
            return SegmentResult(k, int(hit[0]))
    return SegmentResult(0, -1)


def longest_segment(path, A: StarSet, method: str = "auto") -> SegmentResult:
    """Exact ``R_n(A)`` and the smallest start index of a longest window.

    Parameters
    ----------
    path : WalkPath or array
        Partial sums ``S_0 = 0, ..., S_n`` of shape ``(n+1,)`` or ``(n+1, d)``.
    method : {"auto", "naive"}
        ``"naive"`` forces the quadratic scan (k descending, first witness wins).
    """
    sums = _sums(path)
    if sums.shape[0] <= 1:
        return SegmentResult(0, -1)
    if method == "auto" and isinstance(A, HalfSpace):
        return _halfspace_longest(sums, A)
    if method not in ("auto", "naive"):
        raise ValueError(f"unknown method {method!r}")
    return _naive_longest(sums, A)


def _lengths_chunk(steps: np.ndarray, A: StarSet) -> np.ndarray:
    size, n, _ = steps.shape
    out = np.empty(size, dtype=np.int64)
    sums = np.zeros((n + 1, steps.shape[2]))
    for k in range(size):
        np.cumsum(steps[k], axis=0, out=sums[1:])
        out[k] = longest_segment(sums, A).length
    return out


def segment_lengths(
    model: RegVarModel,
    A: StarSet,
    n: int,
    reps: int,
    seed: int = DEFAULT_SEED,
    threads: int | None = None,
) -> np.ndarray:
    """``reps`` independent draws of ``R_n(A)``."""
    if reps < 1 or n < 1:
        raise ValueError("n and reps must be >= 1")

    def kernel(rng, size):
        return _lengths_chunk(draw_steps(model, rng, (size, n)), A)

    parts = run_chunks(kernel, chunk_sizes(reps, n * model.dimension), seed, threads)
    return np.concatenate(parts)


def _exceeds(steps: np.ndarray, A: StarSet, K: int) -> np.ndarray:
    """Per replication: is there a window of length ``>= K`` with mean in ``A``?"""
    size, n, d = steps.shape
    if K > n:
        return np.zeros(size, dtype=bool)
    if isinstance(A, HalfSpace):
        z = steps @ A.direction - A.level
        P = np.zeros((size, n + 1))
        np.cumsum(z, axis=1, out=P[:, 1:])
        suffix_max = np.maximum.accumulate(P[:, ::-1], axis=1)[:, ::-1]
        # a window of length >= K starts at i iff max_{j >= i+K} P_j >= P_i
        return np.any(suffix_max[:, K:] >= P[:, : n + 1 - K], axis=1)
    out = np.empty(size, dtype=bool)
    sums = np.zeros((n + 1, d))
    for k in range(size):
        np.cumsum(steps[k], axis=0, out=sums[1:])
        out[k] = _naive_longest(sums, A, kmin=K).length >= K
    return out


def segment_ld_ratio(
    model: RegVarModel,
    A: StarSet,
    t: float,
    n: int,
    reps: int,
    seed: int = DEFAULT_SEED,
    threads: int | None = None,
) -> EstimateResult:
    """``P(R_n(A) > n t) / (n P(|Z| > n))``.

    ``theory_value`` is ``mu(A*(t))``, the upper limit; ``theory_alt`` is
    ``mu`` of the open union, the lower limit.
    """
    model.require_centered("segment_ld_ratio")
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    upper = mu(model, scale_union(A, t, "closed")).value
    lower = mu(model, scale_union(A, t, "open"), closed=False).value
    K = int(math.floor(n * t)) + 1

    def kernel(rng, size):
        return int(np.count_nonzero(_exceeds(draw_steps(model, rng, (size, n)), A, K)))

    events = int(sum(run_chunks(kernel, chunk_sizes(reps, n * model.dimension), seed, threads)))
    scale = 1.0 / (n * radial_tail(model, n))
    return _result(events, reps, scale, "segment_ld_ratio", theory_value=upper, theory_alt=lower)


def frechet_cdf(x, alpha: float, v: float = 1.0):
    """``P(v**(1/alpha) W <= x) = exp(-v x**-alpha)`` for standard Frechet ``W``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(x > 0, np.exp(-v * np.power(np.where(x > 0, x, 1.0), -alpha)), 0.0)
    return float(out) if out.ndim == 0 else out


def segment_frechet_cdf(
    model: RegVarModel,
    A: StarSet,
    n: int,
    reps: int,
    xs: Sequence[float],
    seed: int = DEFAULT_SEED,
    schedule: ScalingSchedule | None = None,
    threads: int | None = None,
) -> list[EstimateResult]:
    """Empirical ``P(R_n(A) / a_n <= x)`` on a grid, next to the Frechet limit."""
    model.require_centered("segment_frechet_cdf")
    xs = [float(x) for x in xs]
    if any(not x > 0 for x in xs):
        raise ValueError("grid points must be positive")
    scale = a_n(model, schedule or ScalingSchedule("table", a_rule="analytic"), n)
    v_closed = frechet_scale(model, A, "closed").value
    v_open = frechet_scale(model, A, "open").value
    lengths = segment_lengths(model, A, n, reps, seed, threads) / scale
    out = []
    for x in xs:
        k = int(np.count_nonzero(lengths <= x))
        out.append(
            _result(
                k,
                reps,
                1.0,
                "segment_frechet_cdf",
                theory_value=frechet_cdf(x, model.alpha, v_closed),
                theory_alt=frechet_cdf(x, model.alpha, v_open),
            )
        )
    return out
