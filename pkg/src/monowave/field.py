"""Deterministic wave evaluation: f, window restrictions, phi, wave packets, kernels.

The wave is f(x) = (2N)^{-1/2} * sum over |n| <= N of a_n e(<r_n, x>) with
e(t) = exp(2*pi*i*t), a_{-n} = conj(a_n), r_{-n} = -r_n. Every evaluator here
reduces that sum to its real form, so results are exactly real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .directions import DirectionSet
from .partition import SpherePartition

TWO_PI = 2 * np.pi


@dataclass
class CoefficientSet:
    count: int
    values: np.ndarray  # complex, |a_n| = 1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.count,):
            raise ValueError("coefficient array shape does not match count")
        if np.any(np.abs(np.abs(self.values) - 1.0) > 1e-12):
            raise ValueError("coefficients must have unit modulus within 1e-12")


def random_phase_coefficients(N: int, seed: int) -> CoefficientSet:
    rng = np.random.default_rng(seed)
    return CoefficientSet(N, np.exp(2j * np.pi * rng.random(N)))


def all_ones_coefficients(N: int) -> CoefficientSet:
    return CoefficientSet(N, np.ones(N, dtype=complex))


@dataclass
class MonochromaticWave:
    """Finite symmetric plane-wave sum; a weak solution of Delta f = -4 pi^2 f."""

    dirs: DirectionSet
    coeffs: CoefficientSet

    def __post_init__(self):
        if self.coeffs.count != self.dirs.count:
            raise ValueError("coefficient count must match direction count")

    @property
    def dim(self) -> int:
        return self.dirs.dim

    def plane_waves(self):
        """One-sided complex form: f(x) = Re sum_n c_n e(<r_n, x>), c_n = sqrt(2/N) a_n."""
        c = np.sqrt(2.0 / self.dirs.count) * self.coeffs.values
        return self.dirs.vectors, c

    def value(self, x):
        return eval_f(self, x)

    def gradient(self, x):
        return eval_grad_f(self, x)


def make_wave(dirs: DirectionSet, coeffs: CoefficientSet | None = None, seed: int = 0,
              mode: str = "random-phase") -> MonochromaticWave:
    if coeffs is None:
        if mode == "random-phase":
            coeffs = random_phase_coefficients(dirs.count, seed)
        elif mode == "all-ones":
            coeffs = all_ones_coefficients(dirs.count)
        else:
            raise ValueError(f"unknown coefficient mode {mode!r}")
    return MonochromaticWave(dirs, coeffs)


def _check_dim(wave: MonochromaticWave, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != wave.dirs.dim:
        raise ValueError("point dimension does not match the wave")
    return x


def eval_f(wave: MonochromaticWave, x) -> np.ndarray | float:
    """f at one point or a batch of points (last axis is the coordinate axis)."""
    x = _check_dim(wave, x)
    freqs, c = wave.plane_waves()
    phases = TWO_PI * (x @ freqs.T)
    val = np.cos(phases) @ c.real - np.sin(phases) @ c.imag
    return float(val) if val.ndim == 0 else val


def eval_grad_f(wave: MonochromaticWave, x) -> np.ndarray:
    """Exact term-by-term gradient of f."""
    x = _check_dim(wave, x)
    freqs, c = wave.plane_waves()
    phases = TWO_PI * (x @ freqs.T)
    s = -np.sin(phases) * c.real - np.cos(phases) * c.imag
    return TWO_PI * (s @ freqs)


@dataclass
class ObservationWindow:
    """Ball B(center, W) inside the ambient ball B(R)."""

    center: np.ndarray
    W: float
    R: float
    s: int = 0

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if not self.W < self.R:
            raise ValueError("need W < R")
        if np.linalg.norm(self.center) > self.R:
            raise ValueError("window center lies outside B(R)")
        if self.s < 0:
            raise ValueError("smoothness order must be >= 0")


def eval_window(wave: MonochromaticWave, window: ObservationWindow, y) -> np.ndarray | float:
    """F_x(y) = f(x + y) by shifted phase accumulation.

    The base phases <r_n, x> are formed once per call, so batched y probes
    reuse them; values agree with direct eval_f(x + y) to rounding.
    """
    y = _check_dim(wave, y)
    if np.any(np.linalg.norm(y, axis=-1) > window.W):
        raise ValueError("probe point outside the window ball")
    freqs, c = wave.plane_waves()
    base = freqs @ window.center
    phases = TWO_PI * (y @ freqs.T + base)
    val = np.cos(phases) @ c.real - np.sin(phases) @ c.imag
    return float(val) if val.ndim == 0 else val


def _signed_coeffs(wave: MonochromaticWave) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients and frequencies of the full signed atom list [r; -r]."""
    a = wave.coeffs.values
    atoms = np.vstack([wave.dirs.vectors, -wave.dirs.vectors])
    return atoms, np.concatenate([a, np.conj(a)])


def _check_partition(wave: MonochromaticWave, part: SpherePartition) -> None:
    if part.dirs is not wave.dirs and not np.array_equal(part.dirs.vectors, wave.dirs.vectors):
        raise ValueError("partition was not built from this wave's directions")


def eval_bk(wave: MonochromaticWave, part: SpherePartition, x) -> np.ndarray:
    """Wave packets b_k(x) for k in the selected set, batched over x.

    b_k(x) = (2N mu_k)^{-1/2} * sum over signed atoms in cell k of a_n e(<r_n, x>).
    Conjugate pairing b_{-k} = conj(b_k) holds because cell -k carries exactly
    the negated atoms with conjugated coefficients.
    """
    _check_partition(wave, part)
    if len(part.selected) == 0:
        raise ValueError("no cell exceeds the mass threshold; degenerate partition")
    x = _check_dim(wave, x)
    atoms, coeffs = _signed_coeffs(wave)
    two_n = 2 * wave.dirs.count

    order = np.argsort(part.atom_cells, kind="stable")
    sorted_cells = part.atom_cells[order]
    E = np.exp(2j * np.pi * (x @ atoms[order].T)) * coeffs[order]
    out = np.empty(x.shape[:-1] + (len(part.selected),), dtype=complex)
    for col, k in enumerate(part.selected):
        lo = np.searchsorted(sorted_cells, k, side="left")
        hi = np.searchsorted(sorted_cells, k, side="right")
        if hi == lo:
            raise AssertionError("selected cell has no atoms despite positive mass")
        norm = 1.0 / math.sqrt(two_n * part.masses[k])
        out[..., col] = norm * E[..., lo:hi].sum(axis=-1)
    return out


def eval_phi(wave: MonochromaticWave, part: SpherePartition, window: ObservationWindow, y):
    """phi_x(y) = sum over k in the selected set of b_k(x) mu_k^{1/2} e(<zeta_k, y>).

    The +-k cell pairs combine to a real value; the imaginary residue is
    asserted below 1e-10.
    """
    _check_partition(wave, part)
    if len(part.selected) == 0:
        raise ValueError("no cell exceeds the mass threshold; degenerate partition")
    y = _check_dim(wave, y)
    if np.any(np.linalg.norm(y, axis=-1) > window.W):
        raise ValueError("probe point outside the window ball")
    b = eval_bk(wave, part, window.center)
    w = np.sqrt(part.masses[part.selected])
    zeta = part.centers[part.selected]
    val = np.exp(2j * np.pi * (y @ zeta.T)) @ (b * w)
    if np.max(np.abs(np.atleast_1d(val).imag)) > 1e-10:
        raise AssertionError("phi failed to combine to a real value")
    out = val.real
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Bessel functions of the first kind, integer and half-integer order

_SERIES_MAX_TERMS = 200


def _bessel_series(nu: float, z: np.ndarray) -> np.ndarray:
    # sum_k (-1)^k (z/2)^(2k+nu) / (k! Gamma(k+nu+1))
    half = z / 2.0
    with np.errstate(divide="ignore"):
        log_first = nu * np.log(np.where(z > 0, half, 1.0))
    first = np.where(z > 0, np.exp(log_first) / math.gamma(nu + 1), 1.0 if nu == 0 else 0.0)
    term = first.astype(float)
    acc = term.copy()
    z2 = half * half
    for k in range(1, _SERIES_MAX_TERMS):
        term = term * (-z2) / (k * (k + nu))
        acc += term
        if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(acc), 1e-30)):
            break
    return acc


def _bessel_asymptotic(nu: float, z: np.ndarray) -> np.ndarray:
    # sqrt(2/(pi z)) [cos(omega) P(z) - sin(omega) Q(z)], omega = z - nu pi/2 - pi/4.
    # The correction series is asymptotic: terms may grow briefly (large nu near
    # the cutoff) before decaying, so each element keeps the partial sum
    # snapshotted at its smallest term so far (optimal truncation).
    mu = 4.0 * nu * nu
    omega = z - nu * np.pi / 2 - np.pi / 4
    p = np.ones_like(z)
    q = np.zeros_like(z)
    best_p = p.copy()
    best_q = q.copy()
    term = np.ones_like(z)
    smallest = np.full_like(z, np.inf)
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, 80):
            term = term * (mu - (2 * j - 1) ** 2) / (j * 8.0 * z)
            if j % 4 == 1:
                q = q + term
            elif j % 4 == 2:
                p = p - term
            elif j % 4 == 3:
                q = q - term
            else:
                p = p + term
            mag = np.abs(term)
            better = mag < smallest
            smallest = np.where(better, mag, smallest)
            best_p = np.where(better, p, best_p)
            best_q = np.where(better, q, best_q)
            if np.all(smallest <= 1e-18):
                break
    return np.sqrt(2.0 / (np.pi * z)) * (np.cos(omega) * best_p - np.sin(omega) * best_q)


def bessel_j(nu: float, z) -> np.ndarray | float:
    """J_nu(z) for nu in {0, 1/2, 1, ..., 10}, z >= 0.

    Power series up to z = max(12, 2 nu), the asymptotic cosine form with
    correction series beyond; absolute accuracy 1e-10 on [0, 50].
    """
    two_nu = 2 * nu
    if two_nu != int(two_nu) or nu < 0 or nu > 10:
        raise ValueError("order must be a half-integer in [0, 10]")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("argument must be nonnegative")
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    cut = max(12.0, 2.0 * nu)
    out = np.empty_like(z)
    small = z <= cut
    if np.any(small):
        out[small] = _bessel_series(float(nu), z[small])
    if np.any(~small):
        out[~small] = _bessel_asymptotic(float(nu), z[~small])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Covariance kernels


@dataclass
class KernelSpec:
    """Normalized covariance kernel of a spectral measure; kernel(0) = 1."""

    measure: object  # SpectralMeasure
    lambda_index: float
    norm_constant: float


def kernel_spec(measure) -> KernelSpec:
    m = measure.dim
    lam = (m - 2) / 2.0
    # C_m = Gamma(m/2) 2^lambda makes the uniform kernel equal 1 at 0
    c_m = math.gamma(m / 2.0) * 2.0**lam
    return KernelSpec(measure=measure, lambda_index=lam, norm_constant=c_m)


def covariance_kernel(spec, tau) -> np.ndarray | float:
    """E[F(x) conj(F(y))] at lag tau = x - y; accepts a KernelSpec or a measure."""
    if not isinstance(spec, KernelSpec):
        spec = kernel_spec(spec)
    tau = np.asarray(tau, dtype=float)
    scalar = tau.ndim == 1
    tau = np.atleast_2d(tau)
    meas = spec.measure
    if meas.kind == "atomic":
        val = np.cos(TWO_PI * (tau @ meas.atoms.T)) @ meas.weights
    else:
        m = meas.dim
        w = TWO_PI * np.linalg.norm(tau, axis=-1)
        lam = spec.lambda_index
        val = np.empty_like(w)
        tiny = w < 1e-6
        # series limit: C_m J_lam(w)/w^lam -> 1 - w^2/(2m) + O(w^4)
        val[tiny] = 1.0 - w[tiny] ** 2 / (2.0 * m)
        big = ~tiny
        if np.any(big):
            val[big] = spec.norm_constant * bessel_j(lam, w[big]) / w[big] ** lam
    return float(val[0]) if scalar else val
