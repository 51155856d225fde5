import math

import numpy as np
import pytest

from rvwalk.errors import EmptyBlocksWarning
from rvwalk.model import make_model, radial_tail
from rvwalk.sample import (
    block_sums,
    chunk_sizes,
    draw_steps,
    drifted_walk,
    make_rng,
    radius_from_uniform,
    run_chunks,
    step_from_uniform,
    walk,
)

M2 = make_model(2.0, [([1.0], 1.0)])


def test_inverse_cdf_quarter_gives_zero_step():
    m = make_model(2.0, [([1.0, 0.0], 1.0)])
    np.testing.assert_allclose(step_from_uniform(m, 0.25), [0.0, 0.0], atol=1e-15)


def test_radius_near_one():
    assert radius_from_uniform(2.0, 1 - 1e-6) == pytest.approx(1.0000005, rel=1e-9)


def test_steps_use_radius_from_first_uniforms():
    m = make_model(2.0, [([1.0], 1.0)])
    z = draw_steps(m, make_rng(5), 4)
    u = 1.0 - make_rng(5).random(4)
    np.testing.assert_allclose(z[:, 0], radius_from_uniform(2.0, u) - 2.0)


@pytest.mark.parametrize("r", [2.0, 5.0, 10.0])
def test_tail_calibration(r):
    n = 10**6
    m = make_model(2.0, [([1.0, 0.0], 0.5), ([0.0, 1.0], 0.5)])
    z = draw_steps(m, make_rng(21), n) + m.centering
    p = radial_tail(2.0, r)
    frac = np.mean(np.linalg.norm(z, axis=1) > r)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(frac - p) <= 4 * se


def test_noise_stays_in_ball_and_centred():
    m = make_model(3.0, [([1.0, 0.0], 1.0)], noise_radius=0.3)
    base = make_model(3.0, [([1.0, 0.0], 1.0)])
    z = draw_steps(m, make_rng(1), 10**5)
    z0 = draw_steps(base, make_rng(1), 10**5)
    assert np.all(np.linalg.norm(z - z0, axis=1) <= 0.3 + 1e-12)
    assert np.all(np.abs((z - z0).mean(axis=0)) < 0.01)


def test_walk_zero_length():
    p = walk(M2, 0, seed=1)
    np.testing.assert_array_equal(p.sums, [[0.0]])


def test_walk_is_cumsum_of_steps():
    p = walk(M2, 3, seed=9)
    steps = draw_steps(M2, make_rng(9), 3)
    np.testing.assert_array_equal(p.sums[0], [0.0])
    np.testing.assert_array_equal(p.sums[1:], np.cumsum(steps, axis=0))
    np.testing.assert_array_equal(p.steps, steps)


def test_drifted_walk_subtracts_drift():
    c = np.array([1.0])
    base = walk(M2, 5, seed=3)
    drifted = drifted_walk(M2, c, 5, seed=3)
    np.testing.assert_array_equal(drifted.sums[5], base.sums[5] - 5 * c)


def test_walk_reproducible():
    a = walk(M2, 1000, seed=42)
    b = walk(M2, 1000, seed=42)
    np.testing.assert_array_equal(a.sums, b.sums)


def test_block_sums_even():
    p = walk(M2, 4, seed=2)
    b = block_sums(M2, 4, 2, seed=2)
    np.testing.assert_array_equal(b, [p.sums[2], p.sums[4] - p.sums[2]])


def test_block_sums_drop_tail_and_telescope():
    p = walk(M2, 5, seed=2)
    b = block_sums(M2, 5, 2, seed=2)
    assert b.shape == (2, 1)
    np.testing.assert_allclose(b.sum(axis=0), p.sums[4], rtol=1e-12)


def test_block_longer_than_walk_warns():
    with pytest.warns(EmptyBlocksWarning):
        b = block_sums(M2, 3, 5, seed=1)
    assert b.shape == (0, 1)


def test_chunk_sizes_cover_reps():
    sizes = chunk_sizes(10_007, 1000, budget=100_000)
    assert sum(sizes) == 10_007
    assert sizes[0] == 100


def test_substreams_independent_of_thread_count():
    def kernel(rng, size):
        return rng.random(size)

    sizes = chunk_sizes(1000, 1, budget=64)
    one = np.concatenate(run_chunks(kernel, sizes, 7, threads=1))
    many = np.concatenate(run_chunks(kernel, sizes, 7, threads=8))
    np.testing.assert_array_equal(one, many)


def test_parallel_substreams_match_serial_generation():
    # chunk j is exactly what a serial loop over streams 0..k-1 produces
    sizes = [5, 5, 5]
    par = run_chunks(lambda rng, size: draw_steps(M2, rng, size), sizes, 11, threads=3)
    serial = [draw_steps(M2, make_rng(11, j), 5) for j in range(3)]
    for a, b in zip(par, serial):
        np.testing.assert_array_equal(a, b)


def test_seed_range_checked():
    with pytest.raises(ValueError):
        make_rng(-1)
