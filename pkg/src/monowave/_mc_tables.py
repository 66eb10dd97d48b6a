"""Sign-case tables for level-set extraction, generated at import time.

Both the square (2D) and cube (3D) tables resolve ambiguous cases with one
face-local rule: when a face shows alternating signs, the crossing segments
cut off the positive corners and keep the negative corners joined. Because
the rule depends only on the four signs of the face, the two cells sharing a
face always agree on its segments, so welded 3D meshes are watertight by
construction. The same rule in 2D keeps diagonally-touching positive cells
separate, matching 4-neighbor component labeling.

Corner c of the unit cube has offsets (dx, dy, dz) with c = dx + 2 dy + 4 dz;
a case index sets bit c when corner c is positive. Edge tables list cube
edges as (axis, base-corner offset) so callers can interpolate crossings.
"""

from collections import defaultdict

import numpy as np

# ---------------------------------------------------------------------------
# square (marching squares), corner c = dx + 2 dy

SQUARE_CYCLE = (0, 1, 3, 2)  # corners in cyclic order around the square
# local edge k joins cyclic corners k and k+1: bottom, right, top, left
SQ_EDGE_AXIS = np.array([0, 1, 0, 1], dtype=np.intp)
SQ_EDGE_BASE = np.array([(0, 0), (1, 0), (0, 1), (0, 0)], dtype=np.intp)


def _square_segments(case: int) -> list[tuple[int, int]]:
    s = [(case >> c) & 1 for c in SQUARE_CYCLE]
    crossing = [k for k in range(4) if s[k] != s[(k + 1) % 4]]
    if not crossing:
        return []
    if len(crossing) == 2:
        return [(crossing[0], crossing[1])]
    # alternating signs: one segment around each positive corner
    return [((k - 1) % 4, k) for k in range(4) if s[k]]


SQUARE_CASES = tuple(tuple(_square_segments(c)) for c in range(16))


# ---------------------------------------------------------------------------
# cube (marching cubes), corner c = dx + 2 dy + 4 dz

CORNER_OFFSETS = np.array([[(c >> a) & 1 for a in range(3)] for c in range(8)], dtype=np.intp)

_EDGES: list[tuple[int, int]] = []
for _a in range(3):
    for _c in range(8):
        if not (_c >> _a) & 1:
            _EDGES.append((_c, _c | (1 << _a)))
_EDGES.sort()
EDGE_INDEX = {e: i for i, e in enumerate(_EDGES)}
EDGE_CORNERS = np.array(_EDGES, dtype=np.intp)
EDGE_AXIS = np.array([(ca ^ cb).bit_length() - 1 for ca, cb in _EDGES], dtype=np.intp)
EDGE_BASE = CORNER_OFFSETS[EDGE_CORNERS[:, 0]]


def _face_cycle(axis: int, side: int) -> list[int]:
    u, v = (a for a in range(3) if a != axis)
    return [(side << axis) | (du << u) | (dv << v) for du, dv in ((0, 0), (1, 0), (1, 1), (0, 1))]


def _face_segments(cycle: list[int], case: int) -> list[tuple[int, int]]:
    s = [(case >> c) & 1 for c in cycle]
    edge = lambda k: EDGE_INDEX[tuple(sorted((cycle[k], cycle[(k + 1) % 4])))]
    crossing = [k for k in range(4) if s[k] != s[(k + 1) % 4]]
    if not crossing:
        return []
    if len(crossing) == 2:
        return [(edge(crossing[0]), edge(crossing[1]))]
    return [(edge((k - 1) % 4), edge(k)) for k in range(4) if s[k]]


_FACE_CYCLES = [_face_cycle(a, s) for a in range(3) for s in (0, 1)]


def _triangulate(case: int) -> np.ndarray:
    adj: dict[int, list[int]] = defaultdict(list)
    for cycle in _FACE_CYCLES:
        for e1, e2 in _face_segments(cycle, case):
            adj[e1].append(e2)
            adj[e2].append(e1)
    # every crossing edge lies on exactly two faces, each pairing it once
    assert all(len(v) == 2 for v in adj.values())
    tris: list[tuple[int, int, int]] = []
    seen: set[int] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        prev, cur = -1, start
        while True:
            a, b = adj[cur]
            nxt = b if a == prev else a
            if nxt == start:
                break
            loop.append(nxt)
            seen.add(nxt)
            prev, cur = cur, nxt
        for i in range(1, len(loop) - 1):  # fan; loops are simple, length >= 3
            tris.append((loop[0], loop[i], loop[i + 1]))
    return np.array(tris, dtype=np.intp).reshape(-1, 3)


CUBE_CASES = tuple(_triangulate(c) for c in range(256))
