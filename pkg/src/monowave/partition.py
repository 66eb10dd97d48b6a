"""Hyperspherical cube partition of the sphere into K^{m-1} cells.

The unit cube [0,1]^{m-1} maps onto S^{m-1} through the angle map G; cells are
the images of the axis-aligned K-grid boxes. Each of the 2N signed atoms
+-r_n is assigned to exactly one cell; cell masses are atom fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .directions import DirectionSet

SIGN_TOL = 1e-9  # "nonzero coordinate" threshold for the positive-side rule


def lipschitz_constant(m: int) -> float:
    """Crude global Lipschitz bound for G, used only in tolerance formulas."""
    return 2 * np.pi * np.sqrt(m - 1)


def hyperspherical_map(theta, m: int) -> np.ndarray:
    """G(theta): [0,1]^{m-1} -> S^{m-1}.

    Polar angles scale by pi, the final seam angle by 2*pi; for m = 2 the map
    degenerates to the plain angle parameterization of the circle.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != m - 1:
        raise ValueError("theta must have m-1 components")
    if m == 2:
        a = 2 * np.pi * theta[..., 0]
        return np.stack([np.cos(a), np.sin(a)], axis=-1)
    out = np.empty(theta.shape[:-1] + (m,))
    running = np.ones(theta.shape[:-1])
    for i in range(m - 2):
        a = np.pi * theta[..., i]
        out[..., i] = running * np.cos(a)
        running = running * np.sin(a)
    seam = 2 * np.pi * theta[..., m - 2]
    out[..., m - 2] = running * np.cos(seam)
    out[..., m - 1] = running * np.sin(seam)
    return out


def theta_coordinates(v, m: int) -> np.ndarray:
    """Inverse of G, with poles and seam clamped into [0,1).

    On the measure-zero set where G is not injective (vanishing tail norm,
    seam endpoints) the convention is to clamp: undetermined angles become 0.
    """
    v = np.asarray(v, dtype=float)
    if m == 2:
        return (np.arctan2(v[..., 1], v[..., 0]) / (2 * np.pi) % 1.0)[..., None]
    theta = np.empty(v.shape[:-1] + (m - 1,))
    tail = np.linalg.norm(v, axis=-1)
    for i in range(m - 2):
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.where(tail > 0, v[..., i] / np.where(tail > 0, tail, 1.0), 1.0)
        theta[..., i] = np.arccos(np.clip(c, -1.0, 1.0)) / np.pi
        tail = np.linalg.norm(v[..., i + 1 :], axis=-1)
    theta[..., m - 2] = np.arctan2(v[..., m - 1], v[..., m - 2]) / (2 * np.pi) % 1.0
    return theta


def _axis_cells(t: np.ndarray, K: int) -> np.ndarray:
    # boundary value i/K belongs to the lower cell i-1 (except 0); theta = 1
    # thereby lands in cell K-1, which is the [0,1) clamp convention
    s = t * K
    i = np.floor(s)
    i = np.where((s == i) & (i > 0), i - 1, i)
    return np.clip(i, 0, K - 1).astype(np.intp)


@dataclass
class SpherePartition:
    """K^{m-1} cells with centers, masses, threshold and selected index sets."""

    dim: int
    resolution: int
    delta: float
    dirs: DirectionSet
    cell_lows: np.ndarray  # (C, m-1) lower corners in the theta cube, width 1/K
    centers: np.ndarray  # (C, m) images of box centers under G
    masses: np.ndarray  # (C,)
    atom_cells: np.ndarray  # (2N,) cell index of each signed atom
    pair: np.ndarray  # (C,) index of the cell holding the antipodal center
    selected: np.ndarray = field(default=None)  # K: cells with mass > delta
    selected_positive: np.ndarray = field(default=None)  # K+ per the sign rule

    def cell_of_points(self, v: np.ndarray) -> np.ndarray:
        """Cell index for points on the sphere (idempotent with the builder)."""
        theta = theta_coordinates(v, self.dim)
        idx = _axis_cells(theta, self.resolution)
        flat = idx[..., 0]
        for a in range(1, self.dim - 1):
            flat = flat * self.resolution + idx[..., a]
        return flat

    def members(self, k: int) -> np.ndarray:
        """Signed-atom indices assigned to cell k (j < N is +r_j, else -r_{j-N})."""
        return np.nonzero(self.atom_cells == k)[0]

    @property
    def selected_mass(self) -> float:
        return float(self.masses[self.selected].sum())


def positive_side(center: np.ndarray) -> bool:
    """Sign rule: the last coordinate over SIGN_TOL in magnitude must be positive."""
    nz = np.nonzero(np.abs(center) > SIGN_TOL)[0]
    if len(nz) == 0:
        raise ValueError("center is numerically zero")
    return bool(center[nz[-1]] > 0)


def build_partition(dirs: DirectionSet, K: int, delta: float) -> SpherePartition:
    """Assign the 2N signed atoms to cells and populate masses and index sets.

    K must be 1 (single self-paired cell) or even, so that every cell center
    pairs exactly with an antipodal center's cell; odd K >= 3 breaks the
    pairing and is rejected.
    """
    m = dirs.dim
    if K < 1:
        raise ValueError("need K >= 1")
    if K > 1 and K % 2 == 1:
        raise ValueError("odd K > 1 breaks antipodal cell pairing; use even K")
    if not (0 < delta < 1):
        raise ValueError("need 0 < delta < 1")
    n_cells = K ** (m - 1)
    if n_cells > (1 << 26):
        raise ValueError("K^(m-1) exceeds addressable partition size")

    grids = np.meshgrid(*([np.arange(K)] * (m - 1)), indexing="ij")
    multi = np.stack([g.reshape(-1) for g in grids], axis=-1)  # (C, m-1) row-major
    cell_lows = multi / K
    centers = hyperspherical_map((multi + 0.5) / K, m)

    part = SpherePartition(
        dim=m,
        resolution=K,
        delta=float(delta),
        dirs=dirs,
        cell_lows=cell_lows,
        centers=centers,
        masses=None,
        atom_cells=None,
        pair=None,
    )
    atoms = np.vstack([dirs.vectors, -dirs.vectors])
    part.atom_cells = part.cell_of_points(atoms)
    part.masses = np.bincount(part.atom_cells, minlength=n_cells) / (2.0 * dirs.count)
    part.pair = part.cell_of_points(-centers)

    if abs(part.masses.sum() - 1.0) > 1e-12:
        raise AssertionError("cell masses do not sum to 1")
    if np.any(part.masses[part.pair] != part.masses):
        raise AssertionError("antipodal cells carry unequal mass")
    # every assigned direction sits within the Lipschitz tolerance of its center
    dist = np.linalg.norm(atoms - centers[part.atom_cells], axis=1)
    if np.any(dist > lipschitz_constant(m) * np.sqrt(m - 1) / K + 1e-9):
        raise AssertionError("direction strays beyond C_G*sqrt(m-1)/K of its cell center")

    part.selected = np.nonzero(part.masses > delta)[0]
    if part.masses[part.selected].sum() < 1.0 - delta * n_cells - 1e-12:
        raise AssertionError("selected mass fell below 1 - delta*K^(m-1)")
    pos = [
        k
        for k in part.selected
        if part.pair[k] == k or positive_side(part.centers[k])
    ]
    part.selected_positive = np.asarray(pos, dtype=np.intp)
    return part
