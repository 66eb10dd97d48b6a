import math

import numpy as np
import pytest

from monowave.directions import generate_uniform_directions, empirical_measure
from monowave.gaussian import SpectralMeasure, sample_atomic, uniform_measure
from monowave.grid import sample_on_grid
from monowave.nodal import DegenerateSampleError
from monowave.partition import build_partition
from monowave.stats import (
    bk_moment_report,
    covariance_compare,
    discrepancy_estimate,
    kac_rice_density,
    ns_constant_estimate,
    pushforward_distance,
    semilocal_count_check,
    volume_sandwich_check,
    window_moment_report,
)

PI_OVER_SQRT2 = 2.221441469079183  # closed form, m = 2
FOUR_OVER_SQRT3 = 2.3094010767585034  # closed form, m = 3


def test_window_moment_guards(wave64):
    with pytest.raises(ValueError):
        window_moment_report(wave64, 200.0, 1.0, [[0.0, 0.0]], 13, 100, 0)
    with pytest.raises(ValueError):
        window_moment_report(wave64, 200.0, 1.0, [[2.0, 0.0]], 4, 100, 0)


def test_window_moments_match_gaussian(wave64):
    rep = window_moment_report(wave64, 200.0, 1.0, [[0.0, 0.0]], 6, 20000, 12345)
    assert np.array_equal(rep.predicted, [0.0, 1.0, 0.0, 3.0, 0.0, 15.0])
    assert rep.passed
    assert np.array_equal(rep.tolerance, 4 * rep.stderr)


def test_bk_moment_report(wave64):
    dirs = generate_uniform_directions(2, 64, 2)
    from monowave.field import make_wave

    w = make_wave(dirs, seed=11)
    part = build_partition(dirs, 4, 1e-4)
    k0 = int(part.selected_positive[0])
    with pytest.raises(ValueError):
        bk_moment_report(w, part, 150.0, [[(k0, 4, 3)]], 100, 0)
    rep = bk_moment_report(w, part, 150.0, [[(k0, 1, 1)], [(k0, 2, 0)]], 5000, 9)
    assert rep.passed
    assert np.array_equal(rep.predicted, [1.0, 0.0])


def test_covariance_compare(cosine_wave):
    with pytest.raises(ValueError):
        covariance_compare(cosine_wave, 50.0, 2.0, [[4.1, 0.0]], 100, 0)
    rep = covariance_compare(
        cosine_wave, 50.0, 2.0, [[0.3, 0.0], [0.0, 1.1], [1.3, 0.9]], 20000, 3
    )
    assert rep.passed
    # the single-frequency kernel is cos(2 pi tau_1), independent of tau_2
    assert np.allclose(
        rep.predicted,
        [math.cos(2 * math.pi * 0.3), 1.0, math.cos(2 * math.pi * 1.3)],
        atol=1e-12,
    )
    assert rep.meta["max_abs_error"] < 0.02


def test_kac_rice_closed_forms():
    assert kac_rice_density(uniform_measure(2)) == pytest.approx(PI_OVER_SQRT2, rel=1e-12)
    assert kac_rice_density(uniform_measure(3)) == pytest.approx(FOUR_OVER_SQRT3, rel=1e-12)


def test_kac_rice_atomic_agrees_with_isotropic_lattice():
    # the four-atom axis measure shares the uniform second moments, so its
    # Monte Carlo route must land on pi/sqrt 2 as well: a two-way oracle
    mu = SpectralMeasure(
        kind="atomic",
        dim=2,
        atoms=np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]]),
        weights=np.full(4, 0.25),
    )
    val, err = kac_rice_density(mu, n_mc=200000, seed=11)
    assert err < 0.01
    assert abs(val - PI_OVER_SQRT2) <= 4 * err


def test_kac_rice_rejects_degenerate_support():
    flat = SpectralMeasure(
        kind="atomic",
        dim=2,
        atoms=np.array([[1.0, 0.0], [-1.0, 0.0]]),
        weights=np.array([0.5, 0.5]),
    )
    with pytest.raises(ValueError):
        kac_rice_density(flat)


def test_ns_constant_guards():
    mu = empirical_measure(generate_uniform_directions(2, 8, 0))
    with pytest.raises(ValueError):
        ns_constant_estimate(mu, 3.0, 50, 0)
    with pytest.raises(ValueError):
        ns_constant_estimate(mu, 4.0, 20, 0)
    with pytest.raises(ValueError):
        ns_constant_estimate(lambda seed: None, 4.0, 50, 0)  # bare callable needs m


def test_ns_constant_worker_invariance():
    from monowave.directions import log_rational_directions
    from monowave.gaussian import measure_from_partition

    mu = measure_from_partition(build_partition(log_rational_directions(8), 4, 1e-3))
    e1 = ns_constant_estimate(mu, 4.0, 50, seed=6, h=0.2, workers=1)
    e4 = ns_constant_estimate(mu, 4.0, 50, seed=6, h=0.2, workers=4)
    assert e1.mean == e4.mean
    assert e1.stderr == e4.stderr
    assert e1.mean == pytest.approx(0.2379366399223835, rel=1e-12)  # frozen run


def test_ns_constant_with_topology():
    mu = empirical_measure(generate_uniform_directions(2, 32, 12))
    est = ns_constant_estimate(mu, 5.0, 50, seed=6, h=0.08, workers=2, with_topology=True)
    assert est.excluded == 2
    assert "circle" in est.class_density
    dens, se = est.class_density["circle"]
    assert dens > 0 and se >= 0
    # coarse probes cannot resolve these trees; the estimator refuses
    with pytest.raises(DegenerateSampleError):
        ns_constant_estimate(mu, 5.0, 50, seed=6, h=0.15, workers=2, with_topology=True)


def test_discrepancy_constant_sampler():
    mu = empirical_measure(generate_uniform_directions(2, 16, 3))
    fixed = sample_atomic(mu, 99)
    with pytest.raises(ValueError):
        discrepancy_estimate(lambda seed: fixed, 4.0, 10, 0, m=2)
    rep = discrepancy_estimate(lambda seed: fixed, 4.0, 50, seed=3, h=0.2, m=2)
    assert rep.mean_abs_deviation < 1e-12
    assert rep.mean_density > 0


def test_volume_sandwich(cosine_wave):
    g = sample_on_grid(cosine_wave, np.zeros(2), 7.5, 0.05)
    rep = volume_sandwich_check(g, 6.0, 1.5)
    assert rep.passed
    # frozen from this exact grid
    assert rep.meta["lower"] == pytest.approx(127.74729839152721, rel=1e-12)
    assert rep.meta["middle"] == pytest.approx(222.10067349264054, rel=1e-12)
    assert rep.meta["upper"] == pytest.approx(350.79999999999995, rel=1e-12)
    small = sample_on_grid(cosine_wave, np.zeros(2), 6.0, 0.05)
    with pytest.raises(ValueError):
        volume_sandwich_check(small, 6.0, 1.5)  # grid ball too small for R + r


def test_semilocal_guard(wave64):
    with pytest.raises(ValueError):
        semilocal_count_check(wave64, 20.0, 6.0)


def test_pushforward_distance(wave64):
    mu = empirical_measure(wave64.dirs)
    with pytest.raises(ValueError):
        pushforward_distance(wave64, 150.0, mu, np.zeros((6, 2)), 100, 0)
    rep = pushforward_distance(
        wave64, 150.0, mu, [[0.0, 0.0], [0.3, 0.4]], 800, seed=21,
        subsample=400, permutations=100,
    )
    assert rep.meta["gaussian_indistinguishable"]
    assert rep.meta["energy"] <= rep.meta["threshold"]
    assert np.all(rep.meta["ks"] < 0.1)
