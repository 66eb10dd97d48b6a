import math

import numpy as np
import pytest

from monowave.directions import generate_uniform_directions
from monowave.field import make_wave
from monowave.grid import (
    ScalarGrid,
    finite_diff_gradient,
    plane_wave_grid,
    read_grid,
    sample_on_grid,
    write_grid,
)


def test_sample_on_grid_geometry():
    g = sample_on_grid(lambda p: p[:, 0], np.array([1.0, -2.0]), 3.0, 0.1)
    assert g.dim == 2 and g.spacing == 0.1
    assert all(n % 2 == 1 for n in g.shape)
    # center vertex carries the center value
    mid = tuple(n // 2 for n in g.shape)
    assert g.grid_values()[mid] == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(g.mask(), g.radii() <= g.ball_radius)
    assert g.ball_radius == 3.0


def test_sample_on_grid_guards():
    with pytest.raises(ValueError):
        sample_on_grid(lambda p: p[:, 0], np.zeros(2), 2.0, 0.3)
    with pytest.raises(ValueError):
        sample_on_grid(lambda p: p[:, 0], np.zeros(4), 2.0, 0.1)


def test_wave_fast_path_matches_callable_path():
    w = make_wave(generate_uniform_directions(2, 24, 7), seed=2)
    fast = sample_on_grid(w, np.array([0.5, 0.5]), 2.0, 0.1)
    slow = sample_on_grid(lambda p: w.value(p), np.array([0.5, 0.5]), 2.0, 0.1)
    assert np.max(np.abs(fast.values - slow.values)) < 1e-9
    w3 = make_wave(generate_uniform_directions(3, 10, 7), seed=2)
    fast3 = sample_on_grid(w3, np.zeros(3), 1.2, 0.15)
    slow3 = sample_on_grid(lambda p: w3.value(p), np.zeros(3), 1.2, 0.15)
    assert np.max(np.abs(fast3.values - slow3.values)) < 1e-9


def test_plane_wave_grid_against_direct_sum():
    rng = np.random.default_rng(3)
    freqs = rng.standard_normal((5, 2))
    coeffs = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    origin = np.array([-0.4, 0.2])
    shape = (6, 7)
    h = 0.13
    got = plane_wave_grid(freqs, coeffs, origin, shape, h)
    pts = np.stack(
        np.meshgrid(*[origin[a] + h * np.arange(shape[a]) for a in range(2)], indexing="ij"),
        axis=-1,
    ).reshape(-1, 2)
    direct = (np.exp(2j * np.pi * (pts @ freqs.T)) @ coeffs).real.reshape(shape)
    assert np.max(np.abs(got.reshape(shape) - direct)) < 1e-12


def test_finite_diff_gradient():
    # linear field: both central and one-sided differences are exact
    g = sample_on_grid(lambda p: 2.0 * p[:, 0] - 3.0 * p[:, 1], np.zeros(2), 2.0, 0.1)
    grad = finite_diff_gradient(g)
    assert grad.shape == (2,) + g.shape
    assert np.max(np.abs(grad[0] - 2.0)) < 1e-10
    assert np.max(np.abs(grad[1] + 3.0)) < 1e-10
    # smooth field: O(h^2) error along the central row
    gc = sample_on_grid(lambda p: np.cos(2 * np.pi * p[:, 0]), np.zeros(2), 2.0, 0.05)
    row = finite_diff_gradient(gc)[0][:, gc.shape[1] // 2]
    pts0 = gc.axis_coords(0)
    exact = -2 * np.pi * np.sin(2 * np.pi * pts0)
    keep = np.abs(pts0) < 1.5
    assert np.max(np.abs(row[keep] - exact[keep])) < (2 * math.pi) ** 3 * 0.05**2 / 6 + 1e-6
    with pytest.raises(ValueError):
        finite_diff_gradient(
            ScalarGrid(dim=2, origin=np.zeros(2), spacing=0.1, shape=(2, 2), values=np.zeros(4))
        )


def test_grid_io_round_trip(tmp_path):
    w = make_wave(generate_uniform_directions(2, 8, 9), seed=4)
    g = sample_on_grid(w, np.array([0.3, -0.7]), 1.5, 0.1)
    p = tmp_path / "field.grid"
    write_grid(g, p)
    back = read_grid(p)
    assert back.dim == g.dim
    assert back.shape == g.shape
    assert back.spacing == g.spacing
    assert np.array_equal(back.origin, g.origin)
    assert np.array_equal(back.values, g.values)  # f8 payload, bit exact
    # the dump format carries the box only; the ball mask is caller state
    assert back.ball_radius is None and back.ball_center is None
    assert back.mask().all()


def test_grid_io_rejects_corrupt_header(tmp_path):
    p = tmp_path / "bad.grid"
    p.write_bytes(b"not a grid file\n\x00\x01")
    with pytest.raises((ValueError, OSError)):
        read_grid(p)


def test_box_grid_without_ball_mask():
    vals = np.arange(12, dtype=float)
    g = ScalarGrid(dim=2, origin=np.zeros(2), spacing=0.5, shape=(3, 4), values=vals)
    assert g.mask().all()
    assert np.array_equal(g.axis_coords(1), 0.5 * np.arange(4))
