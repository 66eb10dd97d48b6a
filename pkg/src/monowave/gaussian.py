"""Gaussian comparison fields and the nondegeneracy check.

Atomic measures sample F(y) = sum_k sqrt(2 w_k) [g_k cos(2 pi <z_k, y>) +
h_k sin(2 pi <z_k, y>)] over one representative per +- atom pair; the uniform
measure is approximated by M random plane waves with uniform phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .partition import SpherePartition, positive_side

TWO_PI = 2 * np.pi


def child_rng(seed: int, j: int) -> np.random.Generator:
    """Counter-based child stream j of a master seed; order-independent."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(j,)))


@dataclass
class SpectralMeasure:
    """Symmetric probability measure on S^{m-1}, atomic or uniform."""

    kind: str  # "atomic" | "uniform"
    dim: int
    atoms: np.ndarray | None = None  # (2A, m), closed under negation
    weights: np.ndarray | None = None
    hyperplane_ok: bool = False

    def __post_init__(self):
        if self.kind == "uniform":
            if self.atoms is not None:
                raise ValueError("uniform measure carries no atoms")
            self.hyperplane_ok = True
            return
        if self.kind != "atomic":
            raise ValueError("kind must be atomic or uniform")
        self.atoms = np.asarray(self.atoms, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights <= 0):
            raise ValueError("atom weights must be positive")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1 within 1e-12")
        self._pair = self._match_antipodes()
        self.hyperplane_ok = np.linalg.matrix_rank(self.atoms) == self.dim

    def _match_antipodes(self) -> np.ndarray:
        """Pair every atom with its negation (equal weight required)."""
        n = len(self.atoms)
        pair = np.full(n, -1, dtype=np.intp)
        # nearest-neighbor match against -atoms; exact constructions match to 0
        for i in range(n):
            if pair[i] >= 0:
                continue
            d = np.linalg.norm(self.atoms + self.atoms[i], axis=1)
            j = int(np.argmin(d))
            if d[j] > 1e-9 or pair[j] >= 0:
                raise ValueError("atom set is not symmetric under negation")
            if abs(self.weights[i] - self.weights[j]) > 1e-12:
                raise ValueError("antipodal atoms carry unequal weights")
            pair[i], pair[j] = j, i
        return pair

    def positive_representatives(self) -> np.ndarray:
        """One index per +- pair, chosen by the last-nonzero-coordinate sign rule."""
        reps = []
        for i, j in enumerate(self._pair):
            if i < j or (i == j):
                reps.append(i if positive_side(self.atoms[i]) else j)
        return np.asarray(sorted(set(reps)), dtype=np.intp)


def uniform_measure(m: int) -> SpectralMeasure:
    return SpectralMeasure(kind="uniform", dim=m)


def measure_from_partition(part: SpherePartition) -> SpectralMeasure:
    """Atoms at selected cell centers, weights mu_k normalized by kappa^2.

    A self-paired cell (K = 1) contributes a +- atom pair with the weight
    split evenly, keeping the measure symmetric.
    """
    if part.selected is None or len(part.selected) == 0:
        raise ValueError("no selected cells; partition is degenerate")
    kappa_sq = float(part.masses[part.selected].sum())
    atoms = []
    weights = []
    for k in part.selected:
        gamma = part.masses[k] / kappa_sq
        if part.pair[k] == k:
            atoms.extend([part.centers[k], -part.centers[k]])
            weights.extend([gamma / 2, gamma / 2])
        else:
            atoms.append(part.centers[k])
            weights.append(gamma)
    return SpectralMeasure(
        kind="atomic", dim=part.dim, atoms=np.array(atoms), weights=np.array(weights)
    )


@dataclass
class GaussianRealization:
    """One sampled field; evaluation is a pure function of the probe point."""

    kind: str
    dim: int
    seed: int
    freqs: np.ndarray  # (J, m)
    coeffs: np.ndarray  # complex; F(y) = Re sum_j c_j e(<v_j, y>)

    def plane_waves(self):
        return self.freqs, self.coeffs

    def value(self, y) -> np.ndarray | float:
        y = np.asarray(y, dtype=float)
        phases = TWO_PI * (y @ self.freqs.T)
        val = np.cos(phases) @ self.coeffs.real - np.sin(phases) @ self.coeffs.imag
        return float(val) if val.ndim == 0 else val

    def __call__(self, y):
        return self.value(y)

    def gradient(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        phases = TWO_PI * (y @ self.freqs.T)
        s = -np.sin(phases) * self.coeffs.real - np.cos(phases) * self.coeffs.imag
        return TWO_PI * (s @ self.freqs)


def sample_atomic(measure: SpectralMeasure, seed: int) -> GaussianRealization:
    """Draw g_k, h_k iid N(0,1) per positive atom; E|c_k|^2 = 1 normalization."""
    if measure.kind != "atomic":
        raise ValueError("sample_atomic needs an atomic measure")
    reps = measure.positive_representatives()
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(len(reps))
    h = rng.standard_normal(len(reps))
    coeffs = np.sqrt(2.0 * measure.weights[reps]) * (g - 1j * h)
    return GaussianRealization(
        kind="atomic", dim=measure.dim, seed=seed, freqs=measure.atoms[reps], coeffs=coeffs
    )


def sample_uniform(m: int, M: int = 1024, seed: int = 0) -> GaussianRealization:
    """F(y) = sqrt(2/M) sum_j cos(2 pi <xi_j, y> + phi_j), xi uniform on the sphere."""
    if M < 16:
        raise ValueError("fewer than 16 plane waves is too degenerate")
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal((M, m))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    phi = rng.uniform(0.0, TWO_PI, M)
    coeffs = math.sqrt(2.0 / M) * np.exp(1j * phi)
    return GaussianRealization(kind="uniform", dim=m, seed=seed, freqs=xi, coeffs=coeffs)


@dataclass
class NondegeneracyReport:
    min_bulk: float  # min of |g| + |grad g| over B(W+1)
    min_spherical: float  # min of |g| + |tangential grad g| over the sphere of radius W
    threshold: float
    passed: bool


def _sphere_mesh(m: int, radius: float, h: float) -> np.ndarray:
    if m == 2:
        n = max(64, int(np.ceil(TWO_PI * radius / h)))
        a = TWO_PI * np.arange(n) / n
        return radius * np.column_stack([np.cos(a), np.sin(a)])
    n = max(256, int(np.ceil(4 * np.pi * radius**2 / h**2)))
    # Fibonacci sphere: near-uniform deterministic covering
    k = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * k / n)
    theta = np.pi * (1 + math.sqrt(5.0)) * k
    return radius * np.column_stack(
        [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)]
    )


def check_nondegenerate(evaluator, W: float, h: float = 0.05, tau0: float = 1e-3) -> NondegeneracyReport:
    """Probe |g| + |grad g| over B(W+1) and the spherical part on the boundary of B(W).

    A fail is a valid report: the thresholded minima are a finite-sample
    convention, not an almost-sure statement.
    """
    if h > 0.1:
        raise ValueError("need h <= 0.1 for the nondegeneracy probe")
    if tau0 <= 0:
        raise ValueError("threshold must be positive")
    m = evaluator.dim if hasattr(evaluator, "dim") else evaluator.dirs.dim

    coords = h * np.arange(-np.ceil((W + 1) / h), np.ceil((W + 1) / h) + 1)
    mesh = np.meshgrid(*([coords] * m), indexing="ij")
    pts = np.stack([g.reshape(-1) for g in mesh], axis=-1)
    pts = pts[np.linalg.norm(pts, axis=1) <= W + 1]
    min_bulk = np.inf
    for lo in range(0, len(pts), 1 << 13):  # bound the phase-matrix footprint
        block = pts[lo : lo + (1 << 13)]
        psi = np.abs(evaluator.value(block)) + np.linalg.norm(
            evaluator.gradient(block), axis=-1
        )
        min_bulk = min(min_bulk, float(psi.min()))

    sph = _sphere_mesh(m, W, h)
    min_sph = np.inf
    for lo in range(0, len(sph), 1 << 13):
        block = sph[lo : lo + (1 << 13)]
        vals_s = evaluator.value(block)
        grads_s = evaluator.gradient(block)
        radial = (np.sum(block * grads_s, axis=-1) / W**2)[:, None] * block
        slashed = np.abs(vals_s) + np.linalg.norm(grads_s - radial, axis=-1)
        min_sph = min(min_sph, float(slashed.min()))

    return NondegeneracyReport(
        min_bulk=min_bulk,
        min_spherical=min_sph,
        threshold=tau0,
        passed=bool(min_bulk > tau0 and min_sph > tau0),
    )
