"""Step, walk and block-sum generation with splittable, reproducible seeding.

Substream ``j`` of master seed ``s`` is ``PCG64(SeedSequence(s, spawn_key=(j,)))``,
a pure function of ``(s, j)``.  Monte Carlo drivers cut the replications into
chunks whose sizes depend only on the problem (never on the worker count) and
feed chunk ``j`` from substream ``j``, so results are identical for any number
of threads.
"""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyBlocksWarning
from .model import RegVarModel

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0xC0FFEE
# float64 elements per chunk; keeps a chunk near 16 MB
CHUNK_ELEMENTS = 1 << 21


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """Generator for ``seed`` or for substream ``stream`` of ``seed``."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if stream is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def radius_from_uniform(alpha: float, u):
    """Inverse-CDF Pareto radius ``R = U**(-1/alpha)`` for ``U`` in (0, 1]."""
    return np.power(u, -1.0 / alpha)


def draw_steps(model: RegVarModel, rng: np.random.Generator, shape) -> np.ndarray:
    """Draw i.i.d. steps with array shape ``shape + (d,)``.

    Consumes, in order: ``prod(shape)`` uniforms for the radii, then (only for
    several atoms) as many uniforms for the atom choice, then (only with
    noise) normals and uniforms for the ball perturbation.
    """
    shape = (int(shape),) if np.isscalar(shape) else tuple(int(s) for s in shape)
    radius = rng.random(shape)
    np.subtract(1.0, radius, out=radius)  # (0, 1]
    np.power(radius, -1.0 / model.alpha, out=radius)

    if model.n_atoms == 1:
        steps = radius[..., None] * model.directions[0]
    else:
        idx = np.searchsorted(model._cum_weights, rng.random(shape), side="right")
        np.minimum(idx, model.n_atoms - 1, out=idx)
        steps = model.directions[idx]
        steps *= radius[..., None]
    if np.any(model.centering):
        steps -= model.centering

    if model.noise_radius > 0:
        d = model.dimension
        g = rng.standard_normal(shape + (d,))
        g /= np.linalg.norm(g, axis=-1, keepdims=True)
        g *= (model.noise_radius * rng.random(shape) ** (1.0 / d))[..., None]
        # the uniform ball law is centred, so no extra mean correction is needed
        steps += g
    return steps


def draw_step(model: RegVarModel, rng: np.random.Generator) -> np.ndarray:
    return draw_steps(model, rng, (1,))[0]


def step_from_uniform(model: RegVarModel, u: float, atom: int = 0) -> np.ndarray:
    """Deterministic noise-free step for a given uniform and atom index."""
    return radius_from_uniform(model.alpha, u) * model.directions[atom] - model.centering


@dataclass(frozen=True, eq=False)
class WalkPath:
    """Partial sums ``S_0 = 0, ..., S_n`` (shape ``(n+1, d)``)."""

    sums: np.ndarray
    seed: int
    model: RegVarModel
    drift: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.sums.shape[0] - 1

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.sums, axis=0)


def walk(model: RegVarModel, n: int, seed: int = DEFAULT_SEED) -> WalkPath:
    if n < 0:
        raise ValueError("n must be >= 0")
    steps = draw_steps(model, make_rng(seed), (n,))
    sums = np.zeros((n + 1, model.dimension))
    np.cumsum(steps, axis=0, out=sums[1:])
    return WalkPath(sums, int(seed), model)


def drifted_walk(model: RegVarModel, c, n: int, seed: int = DEFAULT_SEED) -> WalkPath:
    """Walk of ``S_k - k c``; the increments are those of :func:`walk` with the same seed."""
    c = np.asarray(c, dtype=float)
    base = walk(model, n, seed)
    sums = base.sums - np.arange(n + 1)[:, None] * c
    return WalkPath(sums, int(seed), model, drift=c)


def block_sums(model: RegVarModel, n: int, r: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``S_{ir} - S_{(i-1)r}`` for ``i = 1..floor(n/r)``; trailing steps are dropped."""
    if r < 1:
        raise ValueError("block length must be >= 1")
    if r > n:
        warnings.warn(f"block length {r} exceeds n={n}; no complete block", EmptyBlocksWarning)
        return np.zeros((0, model.dimension))
    path = walk(model, n, seed)
    m = n // r
    ends = path.sums[r * np.arange(1, m + 1)]
    starts = path.sums[r * np.arange(0, m)]
    return ends - starts


def default_threads() -> int:
    return os.cpu_count() or 1


def chunk_sizes(reps: int, elements_per_rep: int, budget: int = CHUNK_ELEMENTS) -> list[int]:
    """Split ``reps`` replications into chunks of roughly ``budget`` array elements."""
    if reps < 0:
        raise ValueError("reps must be >= 0")
    per = max(1, budget // max(1, elements_per_rep))
    full, rest = divmod(reps, per)
    return [per] * full + ([rest] if rest else [])


def run_chunks(
    kernel: Callable[[np.random.Generator, int], object],
    sizes: Sequence[int],
    seed: int,
    threads: int | None = None,
) -> list:
    """Evaluate ``kernel(rng_j, size_j)`` for every chunk; results keep chunk order."""
    threads = default_threads() if threads is None else max(1, int(threads))

    def one(j):
        return kernel(make_rng(seed, j), sizes[j])

    if threads == 1 or len(sizes) <= 1:
        return [one(j) for j in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(len(sizes))))
