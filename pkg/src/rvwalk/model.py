"""Regularly varying step law: exact Pareto radius times a discrete spectral law.

A step is ``Z = R * Theta - m`` where ``P(R > r) = r**-alpha`` for ``r >= 1``,
``Theta`` is drawn from finitely many unit directions and ``m`` is an optional
centering vector.  With this choice the limit measure is normalised so that
``mu({|x| > 1}) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    InsufficientPilotError,
    InvalidAtomError,
    ScheduleError,
    UnsupportedCenteringError,
)

CENTER_MODES = ("mean-zero", "none")
_ATOL = 1e-12


@dataclass(frozen=True)
class SpectralAtom:
    direction: np.ndarray
    weight: float


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RegVarModel:
    """Immutable step model; build it with :func:`make_model`."""

    alpha: float
    directions: np.ndarray  # (k, d), unit rows
    weights: np.ndarray  # (k,), sums to 1
    centering: np.ndarray  # (d,)
    center_mode: str = "mean-zero"
    noise_radius: float = 0.0
    _cum_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"tail index must be positive, got {self.alpha}")
        norms = np.linalg.norm(self.directions, axis=1)
        if np.any(np.abs(norms - 1.0) > _ATOL):
            raise InvalidAtomError("atom directions must have unit length")
        if abs(self.weights.sum() - 1.0) > _ATOL or np.any(self.weights <= 0):
            raise InvalidAtomError("atom weights must be positive and sum to 1")
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        cum.setflags(write=False)
        object.__setattr__(self, "_cum_weights", cum)

    @property
    def dimension(self) -> int:
        return self.directions.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.directions.shape[0]

    @property
    def atoms(self) -> list[SpectralAtom]:
        return [SpectralAtom(d, float(w)) for d, w in zip(self.directions, self.weights)]

    @property
    def mean_zero(self) -> bool:
        return self.center_mode == "mean-zero"

    def require_centered(self, what: str = "this operation") -> None:
        """Raise unless the model has alpha > 1 and mean-zero steps."""
        if self.alpha <= 1:
            raise UnsupportedCenteringError(f"{what} needs alpha > 1, got {self.alpha}")
        if not self.mean_zero:
            raise UnsupportedCenteringError(f"{what} needs a mean-zero model")

    def to_config(self) -> dict:
        return {
            "alpha": float(self.alpha),
            "atoms": [[d.tolist(), float(w)] for d, w in zip(self.directions, self.weights)],
            "centering": self.center_mode,
            "noise_radius": float(self.noise_radius),
        }


def make_model(
    alpha: float,
    atoms: Sequence[tuple[Sequence[float], float]],
    center: str = "mean-zero",
    noise_radius: float = 0.0,
    normalize: bool = True,
) -> RegVarModel:
    """Build a :class:`RegVarModel`.

    Directions are normalised to unit length.  Weights are renormalised to sum
    to one unless ``normalize=False``, in which case a sum off by more than
    1e-12 raises :class:`InvalidAtomError`.  ``center="mean-zero"`` subtracts
    ``E(R Theta) = alpha/(alpha-1) * sum_i w_i theta_i`` and requires alpha > 1.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError(f"tail index must be positive, got {alpha}")
    if center not in CENTER_MODES:
        raise UnsupportedCenteringError(f"unknown centering mode {center!r}")
    if len(atoms) == 0:
        raise InvalidAtomError("at least one spectral atom is required")

    dirs, ws = [], []
    for vec, w in atoms:
        v = np.atleast_1d(np.asarray(vec, dtype=float))
        norm = np.linalg.norm(v)
        if not np.isfinite(norm) or norm == 0.0:
            raise InvalidAtomError(f"atom direction {list(v)} is the zero vector")
        if not w > 0:
            raise InvalidAtomError(f"atom weight must be positive, got {w}")
        dirs.append(v / norm)
        ws.append(float(w))
    if len({d.shape for d in dirs}) != 1:
        raise InvalidAtomError("all atom directions must share one dimension")
    weights = np.array(ws)
    if normalize:
        weights = weights / weights.sum()
    elif abs(weights.sum() - 1.0) > _ATOL:
        raise InvalidAtomError(f"atom weights must sum to 1 (got {weights.sum():.12g})")
    directions = np.vstack(dirs)

    if not 0.0 <= noise_radius < 0.5:
        raise ValueError(f"noise_radius must lie in [0, 1/2), got {noise_radius}")

    if center == "mean-zero":
        if alpha <= 1:
            raise UnsupportedCenteringError(
                f"mean-zero centering needs a finite mean (alpha > 1), got alpha={alpha}"
            )
        centering = alpha / (alpha - 1.0) * (weights @ directions)
        centering[np.abs(centering) < 1e-15] = 0.0
    else:
        centering = np.zeros(directions.shape[1])

    return RegVarModel(
        alpha=alpha,
        directions=_frozen(directions),
        weights=_frozen(weights),
        centering=_frozen(centering),
        center_mode=center,
        noise_radius=float(noise_radius),
    )


def radial_tail(model: RegVarModel | float, x):
    """Exact pre-centering radial tail ``P(R > x) = min(1, x**-alpha)``."""
    alpha = model.alpha if isinstance(model, RegVarModel) else float(model)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("radial_tail is defined for x >= 0")
    with np.errstate(divide="ignore"):
        out = np.where(x <= 1.0, 1.0, np.power(np.maximum(x, 1.0), -alpha))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ScalingSchedule:
    """Normalising sequences ``lambda_n`` and ``a_n``.

    ``lambda_rule`` is one of ``"linear"`` (``c * n``), ``"sqrt-nlogn"``
    (``a * sqrt(n log n)``) or ``"table"`` (explicit ``{n: lambda_n}``).
    ``a_rule`` is ``"analytic"`` (``n**(1/alpha)``) or ``"empirical"`` (sample
    quantile of ``|Z|`` from a pilot run of ``pilot_size`` steps).
    """

    lambda_rule: str = "linear"
    lambda_param: float = 1.0
    table: Mapping[int, float] | None = None
    a_rule: str = "analytic"
    pilot_size: int | None = None
    pilot_seed: int = 0

    @classmethod
    def linear(cls, c: float = 1.0, **kw) -> "ScalingSchedule":
        return cls("linear", float(c), **kw)

    @classmethod
    def sqrt_nlogn(cls, a: float, **kw) -> "ScalingSchedule":
        return cls("sqrt-nlogn", float(a), **kw)

    @classmethod
    def custom(cls, table: Mapping[int, float], **kw) -> "ScalingSchedule":
        return cls("table", 1.0, dict(table), **kw)

    def validate(self, model: RegVarModel) -> None:
        if self.lambda_rule == "linear":
            if not self.lambda_param > 0:
                raise ScheduleError(f"linear schedule needs c > 0, got {self.lambda_param}")
            if model.alpha < 1 or not model.mean_zero:
                raise ScheduleError("lambda_n = c n is only valid for alpha >= 1 and mean-zero steps")
        elif self.lambda_rule == "sqrt-nlogn":
            if not self.lambda_param > 0:
                raise ScheduleError("sqrt-nlogn schedule needs a > 0")
        elif self.lambda_rule != "table":
            raise ScheduleError(f"unknown lambda rule {self.lambda_rule!r}")
        if self.a_rule not in ("analytic", "empirical"):
            raise ScheduleError(f"unknown a_n rule {self.a_rule!r}")

    def lambda_n(self, n: int) -> float:
        if self.lambda_rule == "linear":
            return self.lambda_param * n
        if self.lambda_rule == "sqrt-nlogn":
            return self.lambda_param * math.sqrt(n * math.log(n))
        if self.lambda_rule == "table":
            try:
                return float(self.table[n])
            except KeyError:
                raise ScheduleError(f"no lambda_n tabulated for n={n}") from None
        raise ScheduleError(f"unknown lambda rule {self.lambda_rule!r}")

    def to_config(self) -> dict:
        out = {"lambda": self.lambda_rule, "a": self.a_rule}
        if self.lambda_rule == "table":
            out["table"] = {int(k): float(v) for k, v in self.table.items()}
        else:
            out["param"] = self.lambda_param
        if self.a_rule == "empirical":
            out["pilot_size"] = self.pilot_size
            out["pilot_seed"] = self.pilot_seed
        return out


def a_n(model: RegVarModel, schedule: ScalingSchedule, n: int) -> float:
    """Scale with ``n P(|Z| > a_n) -> 1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if schedule.a_rule == "analytic":
        return float(n) ** (1.0 / model.alpha)
    pilot = schedule.pilot_size
    if pilot is None or pilot < 10 * n:
        raise InsufficientPilotError(
            f"empirical a_n needs a pilot of at least 10*n = {10 * n} steps, got {pilot}"
        )
    from .sample import draw_steps, make_rng

    steps = draw_steps(model, make_rng(schedule.pilot_seed), (pilot,))
    norms = np.linalg.norm(steps, axis=-1)
    return float(np.quantile(norms, 1.0 - 1.0 / n))


def gamma_n(model: RegVarModel, schedule: ScalingSchedule, n: int) -> float:
    """``[n P(|Z| > lambda_n)]**-1`` using the pre-centering radial tail."""
    lam = schedule.lambda_n(n)
    if lam <= 1.0:
        raise ScheduleError(
            f"lambda_n = {lam:g} does not exceed the radial support edge 1 (n={n})"
        )
    return 1.0 / (n * radial_tail(model, lam))
