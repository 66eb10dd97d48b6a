"""Regular grids over balls: sampling, finite differences, masks, binary dumps.

Values are stored flat in row-major order; every consumer (labeling, meshing)
shares the same index arithmetic: flat = i1*n2*n3 + i2*n3 + i3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_SPACING = 0.25  # unit wavelength: coarser grids alias


@dataclass
class ScalarGrid:
    dim: int
    origin: np.ndarray
    spacing: float
    shape: tuple
    values: np.ndarray  # flat, row-major
    ball_center: np.ndarray | None = None
    ball_radius: float | None = None

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float)
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if int(np.prod(self.shape)) != self.values.size:
            raise ValueError("shape product does not match value count")
        if self.ball_radius is not None:
            self.ball_center = np.asarray(self.ball_center, dtype=float)
            extent = (np.asarray(self.shape) - 1) * self.spacing
            if self.ball_radius > extent.min() / 2 + self.spacing:
                raise ValueError("mask radius exceeds half the box extent")

    def axis_coords(self, a: int) -> np.ndarray:
        return self.origin[a] + self.spacing * np.arange(self.shape[a])

    def grid_values(self) -> np.ndarray:
        return self.values.reshape(self.shape)

    def radii(self) -> np.ndarray:
        """Distance of every vertex from the mask center (origin if unmasked)."""
        c = self.ball_center if self.ball_center is not None else np.zeros(self.dim)
        sq = np.zeros(self.shape)
        for a in range(self.dim):
            d = self.axis_coords(a) - c[a]
            sq = sq + (d**2).reshape([-1 if i == a else 1 for i in range(self.dim)])
        return np.sqrt(sq)

    def mask(self) -> np.ndarray:
        """Boolean in-region array; all True when no ball mask is set."""
        if self.ball_radius is None:
            return np.ones(self.shape, dtype=bool)
        return self.radii() <= self.ball_radius


def sample_on_grid(evaluator, center, radius: float, h: float) -> ScalarGrid:
    """Sample a field on the axis-aligned box circumscribing B(center, radius).

    The evaluator is either an object exposing plane_waves() (wave or Gaussian
    realization; evaluated through an exact separable per-axis factorization)
    or any callable mapping point batches (..., m) to values.
    """
    center = np.asarray(center, dtype=float)
    m = center.size
    if m not in (2, 3):
        raise ValueError("grid geometry supports m in {2, 3}")
    if h > MAX_SPACING:
        raise ValueError("h > 0.25 undersamples a unit-wavelength field")
    if radius < h:
        raise ValueError("radius must be at least h")
    # ceil so the box truly circumscribes the ball even when 2r/h is fractional
    n = int(np.ceil(2 * radius / h - 1e-9)) + 1
    shape = (n,) * m
    origin = center - radius
    if hasattr(evaluator, "plane_waves"):
        freqs, coeffs = evaluator.plane_waves()
        vals = plane_wave_grid(freqs, coeffs, origin, shape, h)
    else:
        axes = [origin[a] + h * np.arange(n) for a in range(m)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
        vals = np.empty(pts.shape[0])
        step = 1 << 20
        for lo in range(0, pts.shape[0], step):
            vals[lo : lo + step] = evaluator(pts[lo : lo + step])
    return ScalarGrid(
        dim=m,
        origin=origin,
        spacing=h,
        shape=shape,
        values=np.asarray(vals).reshape(-1),
        ball_center=center,
        ball_radius=radius,
    )


def plane_wave_grid(freqs: np.ndarray, coeffs: np.ndarray, origin, shape, h: float) -> np.ndarray:
    """Re sum_j c_j exp(2 pi i <v_j, x>) on a regular grid, factored per axis.

    exp(2 pi i v.x) splits into a product of per-axis phase vectors, so the
    grid fill is a (chunked) complex matrix product instead of pointwise
    trigonometry; values match pointwise evaluation to rounding.
    """
    origin = np.asarray(origin, dtype=float)
    m = len(shape)
    axes = []
    for a in range(m):
        coords = origin[a] + h * np.arange(shape[a])
        axes.append(np.exp(2j * np.pi * np.outer(freqs[:, a], coords)))  # (J, n_a)
    if m == 2:
        return ((axes[0] * coeffs[:, None]).T @ axes[1]).real
    out = np.zeros((shape[0], shape[1] * shape[2]))
    step = 128
    for lo in range(0, len(coeffs), step):
        u = axes[0][lo : lo + step] * coeffs[lo : lo + step, None]
        vw = (
            axes[1][lo : lo + step, :, None] * axes[2][lo : lo + step, None, :]
        ).reshape(-1, shape[1] * shape[2])
        out += (u.T @ vw).real
    return out.reshape(shape)


def finite_diff_gradient(grid: ScalarGrid) -> np.ndarray:
    """Central differences in the interior, one-sided at the box faces.

    Returns an array of shape (m,) + grid.shape.
    """
    if any(s < 3 for s in grid.shape):
        raise ValueError("need at least 3 samples per axis")
    parts = np.gradient(grid.grid_values(), grid.spacing)
    if grid.dim == 1:
        parts = [parts]
    return np.stack(parts)


def write_grid(grid: ScalarGrid, path) -> None:
    """Dump format: ASCII header "m h shape... origin...", then little-endian float64."""
    head = " ".join(
        [str(grid.dim), f"{grid.spacing:.17g}"]
        + [str(s) for s in grid.shape]
        + [f"{x:.17g}" for x in grid.origin]
    )
    with open(path, "wb") as fh:
        fh.write((head + "\n").encode("ascii"))
        fh.write(grid.values.astype("<f8").tobytes())


def read_grid(path) -> ScalarGrid:
    with open(path, "rb") as fh:
        head = fh.readline().decode("ascii").split()
        m = int(head[0])
        h = float(head[1])
        shape = tuple(int(s) for s in head[2 : 2 + m])
        origin = np.array([float(x) for x in head[2 + m : 2 + 2 * m]])
        vals = np.frombuffer(fh.read(), dtype="<f8").copy()
    return ScalarGrid(dim=m, origin=origin, spacing=h, shape=shape, values=vals)
