"""Monte Carlo estimators for the heavy-tailed limit statements.

Each estimator counts events over ``reps`` independent replications, split
into chunks that draw from their own substream (see :mod:`rvwalk.sample`),
and rescales the empirical frequency by a deterministic normaliser.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import binomtest

from .errors import (
    HorizonError,
    MissingBoundError,
    ZeroEventWarning,
)
from .measure import m_fidi, mu, mu_star
from .model import RegVarModel, ScalingSchedule, a_n, gamma_n, radial_tail
from .sample import DEFAULT_SEED, chunk_sizes, draw_steps, run_chunks
from .sets import Box, Exceedance, HalfSpace, StarSet


@dataclass(frozen=True)
class EstimateResult:
    """Normalised Monte Carlo estimate with its Wilson interval.

    ``theory_alt`` holds the other side of a bracketing limit (open-set
    bound) when the lower and upper limits may differ.
    """

    estimate: float
    replications: int
    ci95: tuple
    event_count: int
    truncation_bound: float = 0.0
    theory_value: float | None = None
    theory_alt: float | None = None

    @property
    def ratio(self) -> float:
        if not self.theory_value:
            return math.nan
        return self.estimate / self.theory_value


def wilson_interval(events: int, reps: int) -> tuple[float, float]:
    if reps <= 0:
        return (0.0, 1.0)
    ci = binomtest(int(events), int(reps)).proportion_ci(0.95, method="wilson")
    return (float(ci.low), float(ci.high))


def _result(events, reps, scale, what, **kw) -> EstimateResult:
    if events == 0:
        warnings.warn(f"{what}: no events in {reps} replications", ZeroEventWarning, stacklevel=3)
    lo, hi = wilson_interval(events, reps)
    p = events / reps if reps else 0.0
    return EstimateResult(
        estimate=scale * p,
        replications=int(reps),
        ci95=(scale * lo, scale * hi),
        event_count=int(events),
        **kw,
    )


def _count_events(kernel: Callable, reps: int, per_rep: int, seed: int, threads) -> int:
    if reps < 1:
        raise ValueError("reps must be >= 1")
    sizes = chunk_sizes(reps, per_rep)
    return int(sum(run_chunks(kernel, sizes, seed, threads)))


def _check_schedule(model: RegVarModel, schedule: ScalingSchedule) -> None:
    schedule.validate(model)
    if schedule.lambda_rule == "sqrt-nlogn" and model.alpha <= 2:
        warnings.warn(
            "lambda_n = a sqrt(n log n) is meant for alpha > 2", RuntimeWarning, stacklevel=3
        )


def ldp_ratio(
    model: RegVarModel,
    schedule: ScalingSchedule,
    A: StarSet,
    t: float,
    n: int,
    reps: int,
    seed: int = DEFAULT_SEED,
    threads: int | None = None,
) -> EstimateResult:
    """``gamma_n P(S_[nt] / lambda_n in A)``, compared with ``t mu(A)``."""
    if not 0 < t <= 1:
        raise ValueError(f"t must lie in (0, 1], got {t}")
    _check_schedule(model, schedule)
    theory = t * mu(model, A).value
    lam = schedule.lambda_n(n)
    gamma = gamma_n(model, schedule, n)
    k = int(math.floor(n * t))

    def kernel(rng, size):
        s = draw_steps(model, rng, (size, k)).sum(axis=1)
        return int(np.count_nonzero(A.contains(s / lam)))

    events = _count_events(kernel, reps, k * model.dimension, seed, threads)
    return _result(events, reps, gamma, "ldp_ratio", theory_value=theory)


def fidi_ratio(
    model: RegVarModel,
    schedule: ScalingSchedule,
    times: Sequence[float],
    sets: Sequence[StarSet],
    n: int,
    reps: int,
    seed: int = DEFAULT_SEED,
    threads: int | None = None,
) -> EstimateResult:
    """``gamma_n P(S_[n t_i] / lambda_n in A_i for all i)``."""
    _check_schedule(model, schedule)
    theory = m_fidi(model, times, sets).value
    lam = schedule.lambda_n(n)
    gamma = gamma_n(model, schedule, n)
    idx = [int(math.floor(n * t)) for t in times]
    kmax = max(idx)

    def kernel(rng, size):
        sums = np.cumsum(draw_steps(model, rng, (size, kmax)), axis=1)
        ok = np.ones(size, dtype=bool)
        for k, A in zip(idx, sets):
            s = sums[:, k - 1] if k > 0 else np.zeros((size, model.dimension))
            ok &= A.contains(s / lam)
        return int(np.count_nonzero(ok))

    events = _count_events(kernel, reps, kmax * model.dimension, seed, threads)
    return _result(events, reps, gamma, "fidi_ratio", theory_value=theory)


def default_cover(A: StarSet, c, model: RegVarModel | None = None) -> list[np.ndarray]:
    """Vectors ``b`` whose half-spaces ``{x : (x, b) >= 1}`` cover ``A``."""
    c = np.asarray(c, dtype=float)
    if isinstance(A, HalfSpace):
        return [A.direction / A.level]
    if isinstance(A, Exceedance):
        return [np.eye(len(A.levels))[i] / A.levels[i] for i in range(len(A.levels))]
    if isinstance(A, Box):
        faces = []
        for i in range(len(A.lower)):
            e = np.zeros(len(A.lower))
            if A.lower[i] > 0 and c[i] > 0:
                e[i] = 1.0 / A.lower[i]
            elif A.upper[i] < 0 and c[i] < 0:
                e[i] = 1.0 / A.upper[i]
            else:
                continue
            faces.append(e)
        if faces:
            if model is None:
                return faces[:1]
            return [min(faces, key=lambda b: truncation_constant(model, [b], c))]
    raise MissingBoundError(f"no default half-space cover for {A!r}; pass cover=")


def truncation_constant(model: RegVarModel, cover: Sequence, c) -> float:
    """``kappa`` with ``P(ruin after u M) / (u P(|Z| > u)) <~ kappa M**(1-alpha)``.

    For a cover by half-spaces ``{(x, b_i) >= 1}``,
    ``kappa = sum_i mu((x, b_i) >= 1) (c, b_i)**-alpha / (alpha - 1)``.
    """
    c = np.asarray(c, dtype=float)
    alpha = model.alpha
    kappa = 0.0
    for b in cover:
        b = np.asarray(b, dtype=float)
        cb = float(b @ c)
        if cb <= 0:
            raise HorizonError("cover half-space is not pushed away by the drift: (c, b) <= 0")
        mass = float(model.weights @ np.clip(model.directions @ b, 0.0, None) ** alpha)
        kappa += mass * cb ** -alpha / (alpha - 1.0)
    return kappa


def ruin_ratio(
    model: RegVarModel,
    A: StarSet,
    c,
    u: float,
    horizon_M: float = 20.0,
    reps: int = 100_000,
    seed: int = DEFAULT_SEED,
    threads: int | None = None,
    cover: Sequence | None = None,
) -> EstimateResult:
    """``P(S_n - n c in u A for some n <= u M) / (u P(|Z| > u))``, compared with ``mu*(A)``."""
    model.require_centered("ruin_ratio")
    if not horizon_M > 1:
        raise HorizonError(f"horizon_M must exceed 1, got {horizon_M}")
    c = np.asarray(c, dtype=float)
    A.cone_delta(c)
    theory = mu_star(model, A, c).value
    kappa = truncation_constant(model, cover if cover is not None else default_cover(A, c, model), c)
    bound = kappa * horizon_M ** (1.0 - model.alpha)
    N = int(math.ceil(u * horizon_M))

    if isinstance(A, HalfSpace):
        # project onto the normal first: one cumulative sum instead of d
        dc = float(c @ A.direction)
        level = u * A.level
        line = dc * np.arange(1, N + 1)

        def kernel(rng, size):
            steps = draw_steps(model, rng, (size, N)) @ A.direction
            path = np.cumsum(steps, axis=1) - line
            return int(np.count_nonzero(path.max(axis=1) >= level))

    else:
        drift = np.arange(1, N + 1)[:, None] * c

        def kernel(rng, size):
            path = np.cumsum(draw_steps(model, rng, (size, N)), axis=1) - drift
            return int(np.count_nonzero(A.contains(path / u).any(axis=1)))

    events = _count_events(kernel, reps, N * model.dimension, seed, threads)
    scale = 1.0 / (u * radial_tail(model, u))
    return _result(
        events, reps, scale, "ruin_ratio", truncation_bound=bound, theory_value=theory
    )


def maxima_cdf(
    model: RegVarModel,
    n: int,
    xs: Sequence,
    reps: int,
    seed: int = DEFAULT_SEED,
    beta: float = 0.5,
    block: int | None = None,
    schedule: ScalingSchedule | None = None,
    threads: int | None = None,
) -> list[EstimateResult]:
    """``P(componentwise block-sum maxima <= a_n x)`` for each grid point ``x``.

    Blocks have length ``r = floor(n**beta)`` (or ``block``); the limit is
    ``exp(-mu(E_x))`` with ``E_x = {y : y_i > x_i for some i}``.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    d = model.dimension
    grid = [np.broadcast_to(np.asarray(x, dtype=float), (d,)).copy() for x in xs]
    for x in grid:
        if np.any(x <= 0):
            raise ValueError(f"grid point {x.tolist()} must be positive in every coordinate")
    r = int(block) if block else int(math.floor(n ** beta))
    m = n // r
    if m < 1:
        raise ValueError("block length exceeds n")
    scale = a_n(model, schedule or ScalingSchedule("table", a_rule="analytic"), n)
    thresholds = np.array(grid) * scale  # (g, d)

    def kernel(rng, size):
        blocks = draw_steps(model, rng, (size, m, r)).sum(axis=2)  # (size, m, d)
        mx = blocks.max(axis=1)  # (size, d)
        below = np.all(mx[:, None, :] <= thresholds[None, :, :], axis=2)
        return below.sum(axis=0)

    if reps < 1:
        raise ValueError("reps must be >= 1")
    counts = run_chunks(kernel, chunk_sizes(reps, m * r * d), seed, threads)
    totals = np.sum(counts, axis=0)
    out = []
    for x, k in zip(grid, totals):
        theory = math.exp(-mu(model, Exceedance(x)).value)
        out.append(_result(int(k), reps, 1.0, "maxima_cdf", theory_value=theory))
    return out


@dataclass(frozen=True)
class JumpDiagnostic:
    fraction: float
    events: int
    hits: int
    replications: int
    ci95: tuple
    threshold: float


def one_jump_diagnostic(
    model: RegVarModel,
    A: StarSet,
    n: int,
    reps: int,
    seed: int = DEFAULT_SEED,
    threshold: float = 0.8,
    threads: int | None = None,
) -> JumpDiagnostic:
    """Among paths with ``S_n in n A``, the share whose largest step has norm ``>= threshold |S_n|``."""
    model.require_centered("one_jump_diagnostic")
    if not A.bounded_away > 0:
        raise ValueError("the conditioning set must be bounded away from 0")

    def kernel(rng, size):
        steps = draw_steps(model, rng, (size, n))
        s = steps.sum(axis=1)
        hit = A.contains(s / n)
        big = np.linalg.norm(steps[hit], axis=-1).max(axis=1, initial=0.0)
        jump = big >= threshold * np.linalg.norm(s[hit], axis=-1)
        return np.array([np.count_nonzero(hit), np.count_nonzero(jump)])

    if reps < 1:
        raise ValueError("reps must be >= 1")
    events, hits = np.sum(run_chunks(kernel, chunk_sizes(reps, n * model.dimension), seed, threads), axis=0)
    events, hits = int(events), int(hits)
    if events == 0:
        warnings.warn("one_jump_diagnostic: no conditioning events", ZeroEventWarning, stacklevel=2)
        return JumpDiagnostic(math.nan, 0, 0, int(reps), (0.0, 1.0), threshold)
    return JumpDiagnostic(hits / events, events, hits, int(reps), wilson_interval(hits, events), threshold)
