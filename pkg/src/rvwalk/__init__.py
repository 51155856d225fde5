"""Simulation and limit-measure toolkit for multivariate regularly varying random walks."""

from .errors import *  # noqa: F401,F403
from .estimate import (
    EstimateResult,
    JumpDiagnostic,
    fidi_ratio,
    ldp_ratio,
    maxima_cdf,
    one_jump_diagnostic,
    ruin_ratio,
    wilson_interval,
)
from .measure import MeasureValue, frechet_scale, m_fidi, mu, mu_star
from .model import RegVarModel, ScalingSchedule, SpectralAtom, a_n, gamma_n, make_model, radial_tail
from .sample import (
    DEFAULT_SEED,
    WalkPath,
    block_sums,
    draw_step,
    draw_steps,
    drifted_walk,
    make_rng,
    walk,
)
from .segments import (
    SegmentResult,
    longest_segment,
    segment_frechet_cdf,
    segment_ld_ratio,
    segment_lengths,
)
from .sets import (
    BallComplement,
    Box,
    CHull,
    ConeComplementK,
    Exceedance,
    FullSpace,
    Generic,
    HalfSpace,
    IntervalUnion,
    c_hull,
    drift_hull,
    scale_union,
)

__version__ = "0.1.0"
