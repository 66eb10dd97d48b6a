"""Direction sequences {r_n} on S^{m-1} and their empirical spectral measure.

A direction set stores only the positive half of a symmetric frequency set:
r_{-n} = -r_n is implicit everywhere downstream.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12
COLLISION_TOL = 1e-9


@dataclass
class DirectionSet:
    """N unit vectors in R^m, pairwise distinct and non-antipodal, spanning R^m."""

    dim: int
    count: int
    vectors: np.ndarray  # shape (N, m)
    gap_cache: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.shape != (self.count, self.dim):
            raise ValueError("vector array shape does not match (count, dim)")
        validate_directions(self.vectors)


def validate_directions(vectors: np.ndarray) -> None:
    """Enforce the construction invariants: unit norms, no (anti)podal pairs, full rank.

    The rank requirement only binds once N >= m; single-frequency fixtures
    (N=1 in the plane) are legitimate degenerate inputs elsewhere and the
    hyperplane guard for those lives on the spectral-measure side.
    """
    n, m = vectors.shape
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(np.abs(norms - 1.0) > NORM_TOL):
        raise ValueError("direction norms deviate from 1 beyond 1e-12")
    # pairwise distinct and non-antipodal within 1e-9. The Gram identities
    # |v_i -+ v_j|^2 = 2 -+ 2g only screen: for near-coincident rows the
    # subtraction leaves O(eps) noise far above COLLISION_TOL^2 = 1e-18, so
    # candidates get the exact pairwise difference.
    gram = vectors @ vectors.T
    screen = 1e-7
    close = 2.0 - 2.0 * gram < screen
    anti = 2.0 + 2.0 * gram < screen
    bad = (close | anti) & ~np.eye(n, dtype=bool)
    for i, j in zip(*np.nonzero(bad)):
        d2 = float(np.sum((vectors[i] - vectors[j]) ** 2))
        s2 = float(np.sum((vectors[i] + vectors[j]) ** 2))
        if min(d2, s2) < COLLISION_TOL**2:
            raise ValueError("direction set contains equal or antipodal pairs within 1e-9")
    if n >= m and np.linalg.matrix_rank(vectors) < m:
        raise ValueError("directions do not span R^m")


def generate_uniform_directions(m: int, N: int, seed: int) -> DirectionSet:
    """N independent uniform points on S^{m-1}, deterministic for a given seed.

    Rows that collide (equal or antipodal within 1e-9) are resampled from the
    same stream until the set is clean.
    """
    if m < 2 or N < 1:
        raise ValueError("need m >= 2 and N >= 1")
    rng = np.random.default_rng(seed)
    vecs = _unit_rows(rng.standard_normal((N, m)))
    for _ in range(64):
        try:
            validate_directions(vecs)
            break
        except ValueError:
            # resample the rows involved in the closest pair
            gram = vecs @ vecs.T
            np.fill_diagonal(gram, 0.0)
            i = int(np.unravel_index(np.argmax(np.abs(gram)), gram.shape)[0])
            vecs[i] = _unit_rows(rng.standard_normal((1, m)))[0]
    return DirectionSet(dim=m, count=N, vectors=vecs)


def _unit_rows(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def log_rational_directions(N: int) -> DirectionSet:
    """Planar directions at angles theta_n = log(1 + n/(N+1)), n = 1..N.

    The ratios 1 + n/(N+1) are rationals in (1, e), so every angle lies in
    (0, 1) and all are pairwise distinct. Deterministic, no randomness.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    n = np.arange(1, N + 1, dtype=float)
    theta = np.log1p(n / (N + 1))
    vecs = np.column_stack([np.cos(2 * np.pi * theta), np.sin(2 * np.pi * theta)])
    return DirectionSet(dim=2, count=N, vectors=vecs)


def min_sum_gap(dirs: DirectionSet, T: int) -> dict[int, float]:
    """Minimum norm of t-fold signed direction sums, t = 2..T.

    For each t, minimizes ||r_{n_1} + ... + r_{n_t}|| over all multisets of
    signed directions, excluding the exact cancellation patterns where the
    multiset splits into antipodal pairs (possible only for even t). Cost
    grows as (2N)^T, so T is capped at 4.
    """
    if T < 2:
        raise ValueError("need T >= 2")
    if T > 4:
        raise ValueError("T > 4 refused: enumeration cost grows as (2N)^T")
    N = dirs.count
    signed = np.vstack([dirs.vectors, -dirs.vectors])
    out: dict[int, float] = {}
    for t in range(2, T + 1):
        if t in dirs.gap_cache:
            out[t] = dirs.gap_cache[t]
            continue
        best = math.inf
        combos = itertools.combinations_with_replacement(range(2 * N), t)
        for chunk in _chunks(combos, 1 << 16):
            idx = np.array(chunk, dtype=np.intp)
            # balance[n] = count(+n) - count(-n); all-zero rows cancel exactly
            bal = np.zeros((len(idx), N), dtype=np.int64)
            for col in range(t):
                j = idx[:, col]
                np.add.at(bal, (np.arange(len(idx)), j % N), np.where(j < N, 1, -1))
            keep = np.any(bal != 0, axis=1)
            if not np.any(keep):
                continue
            sums = signed[idx[keep]].sum(axis=1)
            best = min(best, float(np.linalg.norm(sums, axis=1).min()))
        out[t] = best
        dirs.gap_cache[t] = best
    return out


def _chunks(it, size):
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def empirical_measure(dirs: DirectionSet):
    """Atomic spectral measure with atoms at +-r_n, each of weight 1/(2N)."""
    from .gaussian import SpectralMeasure

    atoms = np.vstack([dirs.vectors, -dirs.vectors])
    weights = np.full(2 * dirs.count, 1.0 / (2 * dirs.count))
    return SpectralMeasure(kind="atomic", dim=dirs.dim, atoms=atoms, weights=weights)


def save_directions(dirs: DirectionSet, path) -> None:
    """Text format: first line "m N", then N lines of m components, 17 significant digits."""
    lines = [f"{dirs.dim} {dirs.count}"]
    for row in dirs.vectors:
        lines.append(" ".join(f"{x:.17g}" for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_directions(path) -> DirectionSet:
    with open(path) as fh:
        head = fh.readline().split()
        m, n = int(head[0]), int(head[1])
        vecs = np.loadtxt(fh, dtype=float, max_rows=n).reshape(n, m)
    return DirectionSet(dim=m, count=n, vectors=vecs)
