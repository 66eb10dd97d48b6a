"""Nodal decompositions of sampled fields.

Sign components come from union-find over orthogonally adjacent same-sign
vertices (run-length encoded rows, so the label pass is O(V alpha)). The zero
set is extracted per cell from the sign-case tables, measured by linear
interpolation, and split into connected pieces by a second union-find over
crossing grid edges. Downstream: nesting trees over components and topology
classes (circles in 2D, genus in 3D) for the zero pieces.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import _mc_tables as mct
from .grid import ScalarGrid

TIE_EPS = 1e-13  # |value| below this is treated as +TIE_EPS everywhere


class DegenerateSampleError(RuntimeError):
    """The grid resolution failed to resolve the sample's nodal topology."""


# ---------------------------------------------------------------------------
# union-find over explicit pair lists


def _connected(n: int, pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    """Root array after uniting all (pa[i], pb[i]); plain list-based DSU."""
    parent = list(range(n))
    for a, b in zip(pa.tolist(), pb.tolist()):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    p = np.asarray(parent, dtype=np.intp)
    while True:
        q = p[p]
        if np.array_equal(q, p):
            return p
        p = q


# ---------------------------------------------------------------------------
# sign-component labeling


@dataclass
class ComponentRecord:
    id: int
    sign: int  # +1 or -1
    size: int  # vertex count
    touches_boundary: bool
    bbox_lo: np.ndarray  # vertex-coordinate bounds
    bbox_hi: np.ndarray


@dataclass
class NodalDecomposition:
    grid: ScalarGrid
    labels: np.ndarray  # flat, -1 outside the mask
    components: list[ComponentRecord]
    interior_count: int
    boundary_count: int
    _zero: "_ZeroSet | None" = field(default=None, repr=False)

    @property
    def total_components(self) -> int:
        return len(self.components)

    @property
    def adjacency(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Opposite-sign component pairs -> ids of the zero pieces between them."""
        return self._ensure_zero().adjacency

    def _ensure_zero(self) -> "_ZeroSet":
        if self._zero is None:
            self._zero = _extract_zero_set(self.grid, self.labels)
        return self._zero


def _clamped(grid: ScalarGrid) -> np.ndarray:
    v = grid.grid_values()
    return np.where(np.abs(v) < TIE_EPS, TIE_EPS, v)


def _shell(grid: ScalarGrid, band: float = 1.0) -> np.ndarray:
    """Outermost in-domain layer: near the mask sphere, or the box faces.

    band scales the sphere-side width in units of the spacing. Component
    boundary detection uses 1; zero pieces use 2, because a crossing edge
    whose companion cell has an out-of-mask corner (so its curve end dangles)
    can sit up to sqrt(m) * h inside the sphere.
    """
    if grid.ball_radius is not None:
        return grid.mask() & (grid.radii() > grid.ball_radius - band * grid.spacing)
    sh = np.zeros(grid.shape, dtype=bool)
    for a in range(grid.dim):
        sl: list = [slice(None)] * grid.dim
        sl[a] = 0
        sh[tuple(sl)] = True
        sl[a] = -1
        sh[tuple(sl)] = True
    return sh


def label_domains(grid: ScalarGrid) -> NodalDecomposition:
    """Union-find over orthogonally adjacent same-sign in-mask vertices."""
    cached = grid.__dict__.get("_nodal_dec")
    if cached is not None:
        return cached

    mask = grid.mask()
    if not mask.any():
        raise ValueError("mask selects no vertices")
    pos = _clamped(grid) > 0
    shape = grid.shape
    L = shape[-1]
    nlines = int(np.prod(shape[:-1], dtype=np.int64)) if grid.dim > 1 else 1

    key = np.where(mask, pos.astype(np.int8), np.int8(-1)).reshape(-1)
    change = np.empty(key.size, dtype=bool)
    change[0] = True
    np.not_equal(key[1:], key[:-1], out=change[1:])
    change[::L] = True  # runs never span line boundaries
    rs_flat = np.flatnonzero(change)
    rkey = key[rs_flat]
    re_flat = np.append(rs_flat[1:], key.size)
    inmask = rkey >= 0
    rs_flat, re_flat, rkey = rs_flat[inmask], re_flat[inmask], rkey[inmask]
    run_line = rs_flat // L
    run_s = rs_flat - run_line * L
    run_e = re_flat - run_line * L
    R = len(rs_flat)

    # overlapping same-sign runs on neighboring lines, via composite keys
    comp_s = rs_flat  # == run_line * L + run_s, globally sorted
    comp_e = re_flat
    pa_parts, pb_parts = [], []
    line_shape = shape[:-1]
    neighbor_steps = []
    if grid.dim == 2:
        neighbor_steps.append((1, run_line + 1 < line_shape[0]))
    elif grid.dim == 3:
        li = run_line // line_shape[1]
        lj = run_line - li * line_shape[1]
        neighbor_steps.append((line_shape[1], li + 1 < line_shape[0]))
        neighbor_steps.append((1, lj + 1 < line_shape[1]))
    for d, valid in neighbor_steps:
        tgt = (run_line + d) * L
        lo = np.searchsorted(comp_e, tgt + run_s, side="right")
        hi = np.searchsorted(comp_s, tgt + run_e, side="left")
        lo = np.where(valid, lo, 0)
        hi = np.maximum(np.where(valid, hi, 0), lo)
        counts = hi - lo
        tot = int(counts.sum())
        if tot == 0:
            continue
        src = np.repeat(np.arange(R), counts)
        dst = np.repeat(lo, counts) + (np.arange(tot) - np.repeat(np.cumsum(counts) - counts, counts))
        ok = rkey[src] == rkey[dst]
        pa_parts.append(src[ok])
        pb_parts.append(dst[ok])
    if pa_parts:
        root = _connected(R, np.concatenate(pa_parts), np.concatenate(pb_parts))
    else:
        root = np.arange(R, dtype=np.intp)

    uniq_roots, comp_of_run = np.unique(root, return_inverse=True)
    ncomp = len(uniq_roots)
    lengths = run_e - run_s
    sizes = np.bincount(comp_of_run, weights=lengths, minlength=ncomp).astype(np.int64)
    signs = np.zeros(ncomp, dtype=np.int8)
    signs[comp_of_run] = np.where(rkey > 0, 1, -1)

    shell_flat = _shell(grid).reshape(-1)
    cs = np.concatenate([[0], np.cumsum(shell_flat)])
    run_shell = (cs[re_flat] - cs[rs_flat]) > 0
    touches = np.zeros(ncomp, dtype=bool)
    np.logical_or.at(touches, comp_of_run, run_shell)

    # index-space bbox per component from run extents
    lo_idx = np.full((ncomp, grid.dim), np.iinfo(np.int64).max, dtype=np.int64)
    hi_idx = np.full((ncomp, grid.dim), np.iinfo(np.int64).min, dtype=np.int64)
    if grid.dim == 2:
        run_multi = [run_line]
    else:
        run_multi = [run_line // line_shape[1], run_line % line_shape[1]]
    for a, arr in enumerate(run_multi):
        np.minimum.at(lo_idx[:, a], comp_of_run, arr)
        np.maximum.at(hi_idx[:, a], comp_of_run, arr)
    np.minimum.at(lo_idx[:, -1], comp_of_run, run_s)
    np.maximum.at(hi_idx[:, -1], comp_of_run, run_e - 1)

    total = int(lengths.sum())
    flat_idx = np.repeat(rs_flat, lengths) + (np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths))
    labels = np.full(key.size, -1, dtype=np.intp)
    labels[flat_idx] = np.repeat(comp_of_run, lengths)

    comps = [
        ComponentRecord(
            id=i,
            sign=int(signs[i]),
            size=int(sizes[i]),
            touches_boundary=bool(touches[i]),
            bbox_lo=grid.origin + grid.spacing * lo_idx[i],
            bbox_hi=grid.origin + grid.spacing * hi_idx[i],
        )
        for i in range(ncomp)
    ]
    dec = NodalDecomposition(
        grid=grid,
        labels=labels,
        components=comps,
        interior_count=int(np.sum(~touches)),
        boundary_count=int(np.sum(touches)),
    )
    grid.__dict__["_nodal_dec"] = dec
    return dec


# ---------------------------------------------------------------------------
# zero-set extraction


@dataclass
class _ZeroSet:
    dim: int
    edge_ids: np.ndarray  # unique crossing grid edges, sorted
    edge_points: np.ndarray  # (U, m) interpolated zero crossings
    edge_piece: np.ndarray  # (U,) piece index
    npieces: int
    piece_measure: np.ndarray
    piece_boundary: np.ndarray
    piece_neighbors: tuple[frozenset, ...]
    adjacency: dict[tuple[int, int], tuple[int, ...]]
    elements: np.ndarray  # (S,2) or (T,3) indices into the unique edges
    element_piece: np.ndarray
    element_measure: np.ndarray


def _edge_endpoints_2d(gids, shape):
    n0, n1 = shape
    k0 = (n0 - 1) * n1
    ax0 = gids < k0
    u = np.empty(len(gids), dtype=np.int64)
    v = np.empty(len(gids), dtype=np.int64)
    g0 = gids[ax0]
    u[ax0] = g0  # (bi * n1 + bj), endpoint (bi, bj)
    v[ax0] = g0 + n1
    g1 = gids[~ax0] - k0
    bi = g1 // (n1 - 1)
    bj = g1 - bi * (n1 - 1)
    u[~ax0] = bi * n1 + bj
    v[~ax0] = bi * n1 + bj + 1
    return u, v


def _edge_endpoints_3d(gids, shape):
    n0, n1, n2 = shape
    k0 = (n0 - 1) * n1 * n2
    k1 = k0 + n0 * (n1 - 1) * n2
    u = np.empty(len(gids), dtype=np.int64)
    v = np.empty(len(gids), dtype=np.int64)
    a0 = gids < k0
    a1 = (~a0) & (gids < k1)
    a2 = gids >= k1
    u[a0] = gids[a0]
    v[a0] = gids[a0] + n1 * n2
    g = gids[a1] - k0
    bi = g // ((n1 - 1) * n2)
    rem = g - bi * (n1 - 1) * n2
    bj = rem // n2
    bk = rem - bj * n2
    u[a1] = (bi * n1 + bj) * n2 + bk
    v[a1] = u[a1] + n2
    g = gids[a2] - k1
    bi = g // (n1 * (n2 - 1))
    rem = g - bi * n1 * (n2 - 1)
    bj = rem // (n2 - 1)
    bk = rem - bj * (n2 - 1)
    u[a2] = (bi * n1 + bj) * n2 + bk
    v[a2] = u[a2] + 1
    return u, v


def _gather_segments(grid: ScalarGrid, v: np.ndarray):
    """Per-cell crossing segments for 2D grids, vectorized over cells per case."""
    n0, n1 = grid.shape
    pos = v > 0
    mask = grid.mask()
    cell_ok = mask[:-1, :-1] & mask[1:, :-1] & mask[:-1, 1:] & mask[1:, 1:]
    case = (
        pos[:-1, :-1].astype(np.int8)
        + 2 * pos[1:, :-1]
        + 4 * pos[:-1, 1:]
        + 8 * pos[1:, 1:]
    )
    work = np.flatnonzero(cell_ok & (case > 0) & (case < 15))
    case_w = case.reshape(-1)[work]
    h = grid.spacing
    n1c = n1 - 1

    def edge_point(e, i, j):
        ax = int(mct.SQ_EDGE_AXIS[e])
        bx, by = mct.SQ_EDGE_BASE[e]
        bi = i + bx
        bj = j + by
        va = v[bi, bj]
        vb = v[bi + 1, bj] if ax == 0 else v[bi, bj + 1]
        t = va / (va - vb)
        x = grid.origin[0] + h * (bi + (t if ax == 0 else 0.0))
        y = grid.origin[1] + h * (bj + (t if ax == 1 else 0.0))
        gid = bi * n1 + bj if ax == 0 else (n0 - 1) * n1 + bi * n1c + bj
        return gid, np.stack([x, y], axis=-1)

    gid_a, gid_b, pts_a, pts_b = [], [], [], []
    for cs in np.unique(case_w):
        sel = work[case_w == cs]
        i = sel // n1c
        j = sel - i * n1c
        for ea, eb in mct.SQUARE_CASES[cs]:
            ga, pa = edge_point(ea, i, j)
            gb, pb = edge_point(eb, i, j)
            gid_a.append(ga)
            gid_b.append(gb)
            pts_a.append(pa)
            pts_b.append(pb)
    if not gid_a:
        return np.empty((0, 2), dtype=np.int64), np.empty(0)
    seg_gids = np.stack([np.concatenate(gid_a), np.concatenate(gid_b)], axis=1)
    measure = np.linalg.norm(np.concatenate(pts_a) - np.concatenate(pts_b), axis=1)
    return seg_gids, measure


def _gather_triangles(grid: ScalarGrid, v: np.ndarray):
    """Per-cell crossing triangles for 3D grids, vectorized over cells per case."""
    n0, n1, n2 = grid.shape
    pos = v > 0
    mask = grid.mask()
    cell_ok = np.ones((n0 - 1, n1 - 1, n2 - 1), dtype=bool)
    case = np.zeros((n0 - 1, n1 - 1, n2 - 1), dtype=np.int16)
    for c in range(8):
        dx, dy, dz = mct.CORNER_OFFSETS[c]
        sl = (slice(dx, n0 - 1 + dx), slice(dy, n1 - 1 + dy), slice(dz, n2 - 1 + dz))
        cell_ok &= mask[sl]
        case += pos[sl].astype(np.int16) << c
    work = np.flatnonzero(cell_ok & (case > 0) & (case < 255))
    case_w = case.reshape(-1)[work]
    h = grid.spacing
    c1, c2 = n1 - 1, n2 - 1
    off1 = (n0 - 1) * n1 * n2
    off2 = off1 + n0 * (n1 - 1) * n2

    def edge_point(e, i, j, k):
        ax = int(mct.EDGE_AXIS[e])
        bx, by, bz = mct.EDGE_BASE[e]
        bi, bj, bk = i + bx, j + by, k + bz
        va = v[bi, bj, bk]
        if ax == 0:
            vb = v[bi + 1, bj, bk]
        elif ax == 1:
            vb = v[bi, bj + 1, bk]
        else:
            vb = v[bi, bj, bk + 1]
        t = va / (va - vb)
        p = np.stack(
            [
                grid.origin[0] + h * (bi + (t if ax == 0 else 0.0)),
                grid.origin[1] + h * (bj + (t if ax == 1 else 0.0)),
                grid.origin[2] + h * (bk + (t if ax == 2 else 0.0)),
            ],
            axis=-1,
        )
        if ax == 0:
            gid = (bi * n1 + bj) * n2 + bk
        elif ax == 1:
            gid = off1 + (bi * (n1 - 1) + bj) * n2 + bk
        else:
            gid = off2 + (bi * n1 + bj) * (n2 - 1) + bk
        return gid, p

    tri_gids, tri_areas = [], []
    for cs in np.unique(case_w):
        sel = work[case_w == cs]
        i = sel // (c1 * c2)
        rem = sel - i * c1 * c2
        j = rem // c2
        k = rem - j * c2
        tris = mct.CUBE_CASES[cs]
        cache = {}
        for e in np.unique(tris):
            cache[int(e)] = edge_point(int(e), i, j, k)
        for e0, e1, e2 in tris:
            g0, p0 = cache[int(e0)]
            g1, p1 = cache[int(e1)]
            g2, p2 = cache[int(e2)]
            area = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=-1)
            tri_gids.append(np.stack([g0, g1, g2], axis=1))
            tri_areas.append(area)
    if not tri_gids:
        return np.empty((0, 3), dtype=np.int64), np.empty(0)
    return np.concatenate(tri_gids), np.concatenate(tri_areas)


def _extract_zero_set(grid: ScalarGrid, labels: np.ndarray) -> _ZeroSet:
    v = _clamped(grid)
    if grid.dim == 2:
        elem_gids, measure = _gather_segments(grid, v)
    elif grid.dim == 3:
        elem_gids, measure = _gather_triangles(grid, v)
    else:
        raise ValueError("zero-set extraction supports m in {2, 3} only")

    uniq, inv = np.unique(elem_gids.reshape(-1), return_inverse=True)
    elements = inv.reshape(elem_gids.shape).astype(np.intp)
    U = len(uniq)

    if grid.dim == 2:
        ends_u, ends_v = _edge_endpoints_2d(uniq, grid.shape)
        root = _connected(U, elements[:, 0], elements[:, 1])
    else:
        ends_u, ends_v = _edge_endpoints_3d(uniq, grid.shape)
        pa = np.concatenate([elements[:, 0], elements[:, 0]])
        pb = np.concatenate([elements[:, 1], elements[:, 2]])
        root = _connected(U, pa, pb)

    piece_roots, edge_piece = np.unique(root, return_inverse=True)
    npieces = len(piece_roots)
    elem_piece = edge_piece[elements[:, 0]] if U else np.empty(0, dtype=np.intp)
    piece_measure = np.bincount(elem_piece, weights=measure, minlength=npieces)

    shell_flat = _shell(grid, band=2.0).reshape(-1)
    edge_shell = shell_flat[ends_u] | shell_flat[ends_v]
    piece_boundary = np.zeros(npieces, dtype=bool)
    np.logical_or.at(piece_boundary, edge_piece, edge_shell)

    # crossing point per unique edge, recomputed from endpoint values
    vf = v.reshape(-1)
    t = vf[ends_u] / (vf[ends_u] - vf[ends_v])
    base = np.stack(np.unravel_index(ends_u, grid.shape), axis=-1).astype(float)
    step = np.stack(np.unravel_index(ends_v, grid.shape), axis=-1) - base
    edge_points = grid.origin + grid.spacing * (base + t[:, None] * step)

    lab_u = labels[ends_u]
    lab_v = labels[ends_v]
    neigh: list[set] = [set() for _ in range(npieces)]
    adjacency: dict[tuple[int, int], set] = defaultdict(set)
    for p, a, b in zip(edge_piece.tolist(), lab_u.tolist(), lab_v.tolist()):
        neigh[p].add(a)
        neigh[p].add(b)
        adjacency[(a, b) if a < b else (b, a)].add(p)

    return _ZeroSet(
        dim=grid.dim,
        edge_ids=uniq,
        edge_points=edge_points,
        edge_piece=edge_piece,
        npieces=npieces,
        piece_measure=piece_measure,
        piece_boundary=piece_boundary,
        piece_neighbors=tuple(frozenset(s) for s in neigh),
        adjacency={k: tuple(sorted(s)) for k, s in adjacency.items()},
        elements=elements,
        element_piece=elem_piece,
        element_measure=measure,
    )


@dataclass
class NodalGeometry:
    dim: int
    measures: np.ndarray  # one entry per zero piece
    boundary_flags: np.ndarray
    total: float
    covered_volume: float  # volume of the cells actually scanned
    segments: np.ndarray | None  # 2D: (S, 2, m) endpoint coords
    segment_piece: np.ndarray | None
    vertices: np.ndarray | None  # 3D: welded mesh vertices (one per crossing edge)
    triangles: np.ndarray | None  # 3D: (T, 3) indices into vertices
    triangle_piece: np.ndarray | None

    def __post_init__(self):
        if abs(self.total - float(np.sum(self.measures))) > 1e-9:
            raise AssertionError("piece measures do not add up to the total")
        if np.any(self.measures < 0):
            raise AssertionError("negative piece measure")

    @property
    def density(self) -> float:
        """Zero-set measure per unit volume over the scanned region.

        Division by the scanned volume, not by vol B(R): the cell scan stops
        one layer short of the mask sphere, and pretending that band was
        measured biases comparisons at small R.
        """
        return self.total / self.covered_volume


def _covered_volume(grid: ScalarGrid) -> float:
    mask = grid.mask()
    m = grid.dim
    ok = mask[tuple(slice(None, -1) for _ in range(m))].copy()
    for c in range(1, 2**m):
        sl = tuple(
            slice(1, None) if (c >> a) & 1 else slice(None, -1) for a in range(m)
        )
        ok &= mask[sl]
    return float(ok.sum()) * grid.spacing**m


def nodal_volume(grid: ScalarGrid) -> NodalGeometry:
    """Total zero-set length (2D) or area (3D), split by connected piece."""
    dec = label_domains(grid)
    z = dec._ensure_zero()
    if grid.dim == 2:
        segments, seg_piece = z.edge_points[z.elements], z.element_piece
        vertices = triangles = tri_piece = None
    else:
        segments = seg_piece = None
        vertices, triangles, tri_piece = z.edge_points, z.elements, z.element_piece
    return NodalGeometry(
        dim=grid.dim,
        measures=z.piece_measure.copy(),
        boundary_flags=z.piece_boundary.copy(),
        total=float(np.sum(z.piece_measure)),
        covered_volume=_covered_volume(grid),
        segments=segments,
        segment_piece=seg_piece,
        vertices=vertices,
        triangles=triangles,
        triangle_piece=tri_piece,
    )


# ---------------------------------------------------------------------------
# nesting tree


@dataclass
class NestingTree:
    root: int  # -1 for the virtual super-root
    parent: dict[int, int]
    children: dict[int, tuple[int, ...]]
    codes: dict[int, str]
    code: str
    edge_piece: dict[int, int | None]  # component -> piece toward its parent


def build_nesting_tree(dec: NodalDecomposition) -> NestingTree:
    """Rooted nesting structure of the sign components.

    Contacts between two boundary-touching components are routed through the
    super-root rather than kept as tree edges; a genuine cycle or a piece
    bordering three components means the grid failed to separate domains.
    """
    z = dec._ensure_zero()
    touches = [c.touches_boundary for c in dec.components]
    ncomp = len(dec.components)

    # Pieces cut by the window rim may graze any number of rim slivers; only a
    # piece living strictly inside must separate exactly two components.
    for p in range(z.npieces):
        if not z.piece_boundary[p] and len(z.piece_neighbors[p]) != 2:
            raise DegenerateSampleError(
                "an interior zero piece does not separate exactly two components"
            )
    edges: dict[tuple[int, int], int] = {}
    for (a, b), pieces in z.adjacency.items():
        if touches[a] and touches[b]:
            continue  # lateral contact along the window rim
        if len(pieces) > 1:
            raise DegenerateSampleError("two components share two separating pieces")
        edges[(a, b)] = pieces[0]

    boundary_comps = [i for i in range(ncomp) if touches[i]]
    if len(boundary_comps) == 1:
        root = boundary_comps[0]
        virtual_links: list[int] = []
    elif len(boundary_comps) == 0:
        raise DegenerateSampleError("no component reaches the window boundary")
    else:
        root = -1
        virtual_links = boundary_comps

    graph: dict[int, list[int]] = defaultdict(list)
    for (a, b) in edges:
        graph[a].append(b)
        graph[b].append(a)
    for b in virtual_links:
        graph[root].append(b)
        graph[b].append(root)

    nnodes = ncomp + (1 if root == -1 else 0)
    nedges = len(edges) + len(virtual_links)
    parent: dict[int, int] = {}
    order = [root]
    seen = {root}
    for node in order:
        for nb in graph[node]:
            if nb not in seen:
                seen.add(nb)
                parent[nb] = node
                order.append(nb)
    if len(seen) != nnodes or nedges != nnodes - 1:
        raise DegenerateSampleError("component adjacency is not a tree")

    children: dict[int, list[int]] = defaultdict(list)
    for c, p in parent.items():
        children[p].append(c)
    codes: dict[int, str] = {}
    for node in reversed(order):  # children precede parents
        codes[node] = "(" + "".join(sorted(codes[c] for c in children[node])) + ")"

    edge_piece: dict[int, int | None] = {}
    for c, p in parent.items():
        key = (c, p) if c < p else (p, c)
        edge_piece[c] = edges.get(key)
    return NestingTree(
        root=root,
        parent=parent,
        children={k: tuple(sorted(v)) for k, v in children.items()},
        codes=codes,
        code=codes[root],
        edge_piece=edge_piece,
    )


# ---------------------------------------------------------------------------
# topology classes of interior zero pieces


@dataclass
class TopologySummary:
    dim: int
    tags: dict[int, str]  # interior piece id -> class tag
    histogram: Counter
    class_count: int | None = None
    tree_count: int | None = None


def _piece_tag(z: _ZeroSet, p: int) -> str:
    if z.dim == 2:
        member = np.flatnonzero(z.element_piece == p)
        deg = np.bincount(z.elements[member].reshape(-1), minlength=len(z.edge_ids))
        used = np.unique(z.elements[member])
        if not np.all(deg[used] == 2):
            raise DegenerateSampleError("an interior zero curve is not closed")
        return "circle"
    member = np.flatnonzero(z.element_piece == p)
    tris = z.elements[member]
    verts = np.unique(tris)
    pairs = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [0, 2]]])
    pairs = np.sort(pairs, axis=1)
    uniq_edges, counts = np.unique(pairs, axis=0, return_counts=True)
    if not np.all(counts == 2):
        raise DegenerateSampleError("an interior zero surface is not a closed 2-manifold")
    chi = len(verts) - len(uniq_edges) + len(tris)
    if chi % 2 or chi > 2:
        raise DegenerateSampleError("mesh Euler characteristic is not that of a closed surface")
    return f"genus{(2 - chi) // 2}"


def classify_topology(
    dec: NodalDecomposition,
    geom: NodalGeometry | None = None,
    classes: set[str] | None = None,
    tree_code: str | None = None,
) -> TopologySummary:
    """Class tags ("circle" / "genusG") for interior zero pieces, plus queries.

    classes: count interior pieces whose tag lies in the set.
    tree_code: count interior sign components whose nesting subtree has this
    canonical code.
    """
    del geom  # measures are not needed for classification
    z = dec._ensure_zero()
    tags = {
        p: _piece_tag(z, p) for p in range(z.npieces) if not z.piece_boundary[p]
    }
    hist = Counter(tags.values())
    out = TopologySummary(dim=dec.grid.dim, tags=tags, histogram=hist)
    if classes is not None:
        out.class_count = sum(1 for t in tags.values() if t in classes)
    if tree_code is not None:
        tree = build_nesting_tree(dec)
        out.tree_count = sum(
            1
            for c in dec.components
            if not c.touches_boundary and tree.codes.get(c.id) == tree_code
        )
    return out


def export_components_csv(dec: NodalDecomposition, path: str) -> None:
    """One row per sign component; measure/class describe its outer boundary piece."""
    import csv

    z = dec._ensure_zero()
    try:
        tree: NestingTree | None = build_nesting_tree(dec)
    except DegenerateSampleError:
        tree = None
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "sign", "size", "boundary", "measure", "class"])
        for c in dec.components:
            measure = ""
            tag = ""
            if tree is not None:
                p = tree.edge_piece.get(c.id)
                if p is not None:
                    measure = repr(float(z.piece_measure[p]))
                    if not z.piece_boundary[p]:
                        tag = _piece_tag(z, p)
            w.writerow([c.id, "+" if c.sign > 0 else "-", c.size, int(c.touches_boundary), measure, tag])
