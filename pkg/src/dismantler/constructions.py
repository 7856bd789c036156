"""Constructive families on [n]^3 and their explicit dismantling schedules.

Plane geometry: cells are graded by plane(i, j, k) = i + j - k.  Cells on
one plane are pairwise non-adjacent, and cells on planes differing by two
or more are non-adjacent too; every edge of the grid joins consecutive
planes.  A cell on plane c has exactly three neighbours on plane c - 1
(decrease i or j, or increase k) and three on plane c + 1.

The families here are plane stacks: triangular bases are single planes,
heaps pile them up, hexagonal boards are single mid planes, nested
hexagons grow a board both ways, one supported layer at a time.  The
trace builders then realize the dismantling schedules whose legality the
engine re-checks step by step.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .engine import (
    IllegalMoveError,
    MoveStar,
    Trace,
    _Workspace,
    restricted_dismantle,
    trace_end,
)
from .grid import Coord, GridShape, encode
from .position import Position

Vec = tuple[int, int, int]


def tri(m: int) -> int:
    """Triangular number: cells in a corner triangle with leg m."""
    return m * (m + 1) // 2 if m > 0 else 0


def tet(m: int) -> int:
    """Tetrahedral number: cells in a corner tetrahedron with leg m."""
    return m * (m + 1) * (m + 2) // 6 if m > 0 else 0


def plane_value(coord: Coord) -> int:
    i, j, k = coord
    return i + j - k


def _cube(n: int) -> GridShape:
    return GridShape((n, n, n))


def _plane_cells(n: int, c: int) -> frozenset[Coord]:
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            k = i + j - c
            if 1 <= k <= n:
                out.append((i, j, k))
    return frozenset(out)


# -- triangular families ---------------------------------------------------------


def upper_triangular_base(n: int, m: int) -> frozenset[Coord]:
    """Plane m + 1 - n; a corner triangle of tri(m) cells (m = n covers the
    whole plane 1)."""
    if not 1 <= m <= n:
        raise ValueError(f"order {m} out of range 1..{n}")
    return _plane_cells(n, m + 1 - n)


def lower_triangular_base(n: int, m: int) -> frozenset[Coord]:
    """Plane 2n - m, the triangle at the opposite corner; m = 0 is empty."""
    if not 0 <= m <= n - 1:
        raise ValueError(f"order {m} out of range 0..{n - 1}")
    return _plane_cells(n, 2 * n - m)


def tb_layer(n: int, t: int) -> frozenset[Coord]:
    """The t-th nesting layer over the plane-1 triangle: the cells of plane
    t + 1 whose three lower neighbours lie in the previous layer."""
    if t < 1 or n - 2 * t < 1:
        raise ValueError(f"no layer {t} in order {n}")
    return frozenset(
        (i, j, k)
        for (i, j, k) in _plane_cells(n, t + 1)
        if i >= t + 1 and j >= t + 1 and k <= n - t
    )


def heap_of_oranges(n: int, m: int) -> frozenset[Coord]:
    """Union of the corner triangles of orders 1..m: a solid tetrahedron."""
    if not 1 <= m <= n:
        raise ValueError(f"order {m} out of range 1..{n}")
    out: set[Coord] = set()
    for i in range(1, m + 1):
        out |= upper_triangular_base(n, i)
    return frozenset(out)


def nested_heap(n: int) -> frozenset[Coord]:
    """Full heap plus the supported layers above its top triangle."""
    out = set(heap_of_oranges(n, n))
    t = 1
    while n - 2 * t >= 1:
        out |= tb_layer(n, t)
        t += 1
    return frozenset(out)


def hexagonal_board(n: int, s: int) -> frozenset[Coord]:
    """All cells of plane n + 1 - s: a hexagon of n² - tri(n-s) - tri(s-1)
    cells."""
    if not 1 <= s <= n - 1:
        raise ValueError(f"shift {s} out of range 1..{n - 1}")
    return _plane_cells(n, n + 1 - s)


def _layer_up(n: int, cells: frozenset[Coord], c: int) -> frozenset[Coord]:
    # cells of plane c+1 whose three lower neighbours are all in `cells`
    return frozenset(
        (i, j, k)
        for (i, j, k) in _plane_cells(n, c + 1)
        if (i - 1, j, k) in cells and (i, j - 1, k) in cells and (i, j, k + 1) in cells
    )


def _layer_down(n: int, cells: frozenset[Coord], c: int) -> frozenset[Coord]:
    # cells of plane c-1 whose three upper neighbours are all in `cells`
    return frozenset(
        (i, j, k)
        for (i, j, k) in _plane_cells(n, c - 1)
        if (i + 1, j, k) in cells and (i, j + 1, k) in cells and (i, j, k - 1) in cells
    )


def nested_hexagon(n: int, s: int) -> frozenset[Coord]:
    """Hexagonal board plus the maximal stacks of supported boards above
    and below it, one plane at a time (each layer's cells have all three
    same-side neighbours in the previous layer)."""
    board = hexagonal_board(n, s)
    c0 = n + 1 - s
    out = set(board)
    cur, c = board, c0
    while True:
        cur = _layer_up(n, cur, c)
        if not cur:
            break
        out |= cur
        c += 1
    cur, c = board, c0
    while True:
        cur = _layer_down(n, cur, c)
        if not cur:
            break
        out |= cur
        c -= 1
    return frozenset(out)


_KINDS = ("utb", "ltb", "tb", "ho", "nho", "hb", "dnh")


def triangular_set(kind: str, n: int, m: int | None = None, s: int | None = None) -> frozenset[Coord]:
    """Dispatch to the named cell family.

    utb/ltb/ho take the order m; tb takes the side m of the embedded
    triangle (same parity as n); hb/dnh take the shift s; nho takes only n.
    """
    kind = kind.lower()
    if kind == "utb":
        return upper_triangular_base(n, _req(m, "m"))
    if kind == "ltb":
        return lower_triangular_base(n, _req(m, "m"))
    if kind == "tb":
        m = _req(m, "m")
        if m < 1 or (n - m) % 2 or m > n - 2:
            raise ValueError(f"no nested triangle of side {m} in order {n}")
        return tb_layer(n, (n - m) // 2)
    if kind == "ho":
        return heap_of_oranges(n, _req(m, "m"))
    if kind == "nho":
        return nested_heap(n)
    if kind == "hb":
        return hexagonal_board(n, _req(s, "s"))
    if kind == "dnh":
        return nested_hexagon(n, _req(s, "s"))
    raise ValueError(f"unknown kind {kind!r}; expected one of {_KINDS}")


def _req(value: int | None, name: str) -> int:
    if value is None:
        raise ValueError(f"parameter {name} is required")
    return value


@dataclass(frozen=True)
class BoxPlacement:
    """Signed axis permutation plus offset, embedding a small box in [n]^3."""

    axis_perm: tuple[int, int, int]
    flips: tuple[bool, bool, bool]
    offset: tuple[int, int, int]
    side: int  # the embedded box is [side]^3

    def apply(self, coord: Coord) -> Coord:
        out = []
        for a in range(3):
            x = coord[self.axis_perm[a]]
            if self.flips[a]:
                x = self.side + 1 - x
            out.append(self.offset[a] + x)
        return tuple(out)


@dataclass(frozen=True)
class TriangularFamily:
    """A named cell family, optionally embedded somewhere by a placement."""

    kind: str
    n: int
    m: int | None = None
    s: int | None = None
    placement: BoxPlacement | None = None

    def cells(self) -> frozenset[Coord]:
        base = triangular_set(self.kind, self.n, m=self.m, s=self.s)
        if self.placement is None:
            return base
        return frozenset(self.placement.apply(c) for c in base)


def counting_identity(n: int) -> bool:
    """Two bookkeeping checks behind the corner-peeling move count: the
    numeric identity tet(n) + 4 tet(n-1) + tet(n-2) = n³ and its set-level
    form on generated heaps."""
    if n < 2:
        raise ValueError("needs n >= 2")
    numeric = tet(n) + 4 * tet(n - 1) + tet(n - 2) == n**3
    sets = len(nested_heap(n)) + len(nested_heap(n - 1)) + 3 * tet(n - 1) == n**3
    return numeric and sets


# -- base positions ---------------------------------------------------------------


def cyclic_base(n: int) -> Position:
    """Black cells where i + j - k is 1 mod n; the union of the order-n
    upper triangle and the order-(n-1) lower triangle."""
    if n < 2:
        raise ValueError("needs n >= 2")
    shape = _cube(n)
    cells = [c for c in shape if (plane_value(c) - 1) % n == 0]
    return Position.from_coords(shape, cells)


def shifted_cyclic_base(n: int, s: int) -> Position:
    """Levels of the cyclic base shifted cyclically by s."""
    if not 0 <= s <= n - 1:
        raise ValueError(f"shift {s} out of range 0..{n - 1}")
    shape = _cube(n)
    cells = [c for c in shape if (plane_value(c) - (1 - s)) % n == 0]
    return Position.from_coords(shape, cells)


def level_permuted_cyclic(n: int, perm) -> Position:
    """Cyclic base with level k relocated to level perm[k-1]."""
    p = [int(v) for v in perm]
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError("perm must be a permutation of 1..n")
    shape = _cube(n)
    cells = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            k = ((i + j - 2) % n) + 1
            cells.append((i, j, p[k - 1]))
    return Position.from_coords(shape, cells)


def is_checkerboard_monochromatic(pos: Position) -> bool:
    """Do all black cells share one parity of the coordinate sum?"""
    parities = {sum(c) % 2 for c in pos.black_coords()}
    return len(parities) <= 1


# -- peeling schedules -------------------------------------------------------------


def _remove_cells(ws: _Workspace, cells, moves: list[MoveStar], start_index: int) -> None:
    """Remove cells in order, validating the exactly-3 rule at each step."""
    shape = ws.shape
    for off, coord in enumerate(cells):
        idx = start_index + off
        try:
            cid = encode(coord, shape)
        except ValueError as exc:
            raise IllegalMoveError(f"step {idx}: {exc}") from exc
        if not ws.mask_ext[cid]:
            raise IllegalMoveError(f"step {idx}: cell {coord} is already white")
        if ws.deg[cid] != shape.d:
            raise IllegalMoveError(
                f"step {idx}: cell {coord} has black degree {int(ws.deg[cid])}"
            )
        moves.append(MoveStar(coord, ws.black_nbrs(cid)))
        ws.flip(cid, False)


def _peel_cells(corner: Coord, d1: Vec, d2: Vec, size: int):
    """Triangle corner + x·d1 + y·d2 (x + y < size), by diagonals of
    growing size: removing each diagonal frees the next."""
    for t in range(size):
        for x in range(t + 1):
            y = t - x
            yield tuple(corner[a] + x * d1[a] + y * d2[a] for a in range(3))


def diagonal_peeling_trace(pos: Position, corner: Coord, dir1: Vec, dir2: Vec, size: int) -> Trace:
    """Remove the triangle spanned by dir1/dir2 at corner from pos.

    The caller supplies the context position; an illegal step raises
    IllegalMoveError naming the step index.  Removes tri(size) cells.
    """
    ws = _Workspace(pos)
    moves: list[MoveStar] = []
    _remove_cells(ws, _peel_cells(corner, dir1, dir2, size), moves, 0)
    assert len(moves) == tri(size)
    return Trace(pos.shape, pos, "dismantling", tuple(moves))


def staircase_trace(
    pos: Position, corner: Coord, dir1: Vec, dir2: Vec, dir3: Vec, size: int, depth: int
) -> Trace:
    """Depth-many stacked diagonal peelings, advancing along dir3."""
    ws = _Workspace(pos)
    moves: list[MoveStar] = []
    for q in range(depth):
        layer_corner = tuple(corner[a] + q * dir3[a] for a in range(3))
        _remove_cells(ws, _peel_cells(layer_corner, dir1, dir2, size), moves, len(moves))
    assert len(moves) == depth * tri(size)
    return Trace(pos.shape, pos, "dismantling", tuple(moves))


def _corner_schedule(n: int):
    """The alternating six-corner peeling schedule for [n]^3.

    Round r peels three size-(n-1-2r) triangles clearing the low-i, low-j
    and high-k hull walls, then three size-(n-2-2r) triangles clearing the
    low-k, high-i and high-j walls; each peeling exposes the next.
    """
    r = 0
    while True:
        qa = n - 1 - 2 * r
        qb = n - 2 - 2 * r
        if qa < 1 and qb < 1:
            return
        if qa >= 1:
            yield ((1 + r, n - r, 1 + r), (0, -1, 0), (0, 0, 1), qa)
            yield ((n - r, 1 + r, 1 + r), (-1, 0, 0), (0, 0, 1), qa)
            yield ((n - r, n - r, n - r), (-1, 0, 0), (0, -1, 0), qa)
        if qb >= 1:
            yield ((2 + r, 2 + r, 1 + r), (1, 0, 0), (0, 1, 0), qb)
            yield ((n - r, 2 + r, n - 1 - r), (0, 1, 0), (0, 0, -1), qb)
            yield ((2 + r, n - r, n - 1 - r), (1, 0, 0), (0, 0, -1), qb)
        r += 1


def _run_corner_peel(n: int) -> tuple[_Workspace, list[MoveStar]]:
    ws = _Workspace(Position.full(_cube(n)))
    moves: list[MoveStar] = []
    for corner, d1, d2, size in _corner_schedule(n):
        _remove_cells(ws, _peel_cells(corner, d1, d2, size), moves, len(moves))
    return ws, moves


def _solve_placement(local_cells: frozenset[Coord], side: int, target: frozenset[Coord]) -> BoxPlacement | None:
    """Find a signed axis permutation plus offset mapping local_cells onto
    target exactly, or None."""
    if not target:
        return None
    los = [min(c[a] for c in target) for a in range(3)]
    his = [max(c[a] for c in target) for a in range(3)]
    if any(hi - lo + 1 > side for lo, hi in zip(los, his)):
        return None
    offset = tuple(lo - 1 for lo in los)
    for perm in permutations(range(3)):
        for flips in product((False, True), repeat=3):
            pl = BoxPlacement(perm, flips, offset, side)
            if frozenset(pl.apply(c) for c in local_cells) == target:
                return pl
    return None


def corner_peeling_trace(n: int) -> Trace:
    """Dismantle full [n]^3 down to the nested heap plus an embedded copy
    of the order-(n-1) nested heap, by alternating corner peelings.

    Exactly 3·tet(n-1) moves; the end set is asserted, with the copy's
    placement solved rather than hard-coded.
    """
    ws, moves = _run_corner_peel(n)
    assert len(moves) == 3 * tet(n - 1)
    end = frozenset(ws.snapshot().black_coords())
    main = nested_heap(n)
    assert main <= end
    copy = end - main
    assert len(copy) == len(nested_heap(n - 1))
    assert _solve_placement(nested_heap(n - 1), n - 1, copy) is not None
    full = Position.full(_cube(n))
    return Trace(full.shape, full, "dismantling", tuple(moves))


def cyclic_solution_trace(n: int) -> Trace:
    """Full dismantling from [n]^3 to the cyclic base: corner peelings down
    to the two nested heaps, then layer-by-layer removal of the nesting.

    The continuation is a maximal dismantling avoiding the cyclic cells;
    since some dismantling to the cyclic base exists, the end state is
    exactly the cyclic base (asserted).
    """
    ws, moves = _run_corner_peel(n)
    target = cyclic_base(n)
    tail = restricted_dismantle(ws.snapshot(), keep=target.black_coords())
    moves.extend(tail.moves)
    full = Position.full(_cube(n))
    out = Trace(full.shape, full, "dismantling", tuple(moves))
    assert trace_end(out) == target
    return out


def _box_cells(ilo: int, ihi: int, jlo: int, jhi: int, klo: int, khi: int) -> frozenset[Coord]:
    return frozenset(
        (i, j, k)
        for i in range(ilo, ihi + 1)
        for j in range(jlo, jhi + 1)
        for k in range(klo, khi + 1)
    )


def shifted_cyclic_trace(n: int, s: int) -> Trace:
    """Full dismantling from [n]^3 to the shift-s cyclic position.

    Composite route: greedy staircase removal down to two corner boxes plus
    the nested hexagon, corner peelings inside each box, then a maximal
    dismantling avoiding the target (provably exact).  If the composite
    stages cannot be realized for these parameters, falls back to the
    one-stage maximal restricted dismantling, which reaches the same end.
    """
    if not 0 <= s <= n - 1:
        raise ValueError(f"shift {s} out of range 0..{n - 1}")
    if s == 0:
        return cyclic_solution_trace(n)
    full = Position.full(_cube(n))
    target = shifted_cyclic_base(n, s)
    keep_coords = target.black_coords()

    def fallback() -> Trace:
        out = restricted_dismantle(full, keep=keep_coords)
        assert trace_end(out) == target
        return out

    m1 = n - s  # upper corner box [1,m1]^2 x [s+1,n]
    m2 = s - 1  # lower corner box [n-m2+1,n]^2 x [1,m2]
    box1 = _box_cells(1, m1, 1, m1, s + 1, n)
    box2 = _box_cells(n - m2 + 1, n, n - m2 + 1, n, 1, m2) if m2 >= 1 else frozenset()
    fence = box1 | box2 | nested_hexagon(n, s)

    stage_a = restricted_dismantle(full, keep=fence)
    pos_a = trace_end(stage_a)
    if frozenset(pos_a.black_coords()) != fence:
        return fallback()
    moves = list(stage_a.moves)

    ws = _Workspace(pos_a)
    try:
        if m1 >= 2:
            for corner, d1, d2, size in _corner_schedule(m1):
                cells = (
                    (c[0], c[1], c[2] + s)
                    for c in _peel_cells(corner, d1, d2, size)
                )
                _remove_cells(ws, cells, moves, len(moves))
        if m2 >= 2:
            for corner, d1, d2, size in _corner_schedule(m2):
                cells = (
                    (n + 1 - c[0], n + 1 - c[1], s - c[2])
                    for c in _peel_cells(corner, d1, d2, size)
                )
                _remove_cells(ws, cells, moves, len(moves))
    except IllegalMoveError:
        return fallback()

    tail = restricted_dismantle(ws.snapshot(), keep=keep_coords)
    moves.extend(tail.moves)
    out = Trace(full.shape, full, "dismantling", tuple(moves))
    if trace_end(out) != target:
        return fallback()
    return out


# -- corridor solution --------------------------------------------------------------


def _corridor_square(t: int) -> frozenset[tuple[int, int]]:
    """Recursive square pattern in [2^t - 1]^2: four corner copies plus the
    centre cell."""
    if t == 1:
        return frozenset({(1, 1)})
    prev = _corridor_square(t - 1)
    h = 2 ** (t - 1)
    out = {(h, h)}
    for dr, dc in ((0, 0), (0, h), (h, 0), (h, h)):
        out |= {(r + dr, c + dc) for (r, c) in prev}
    return frozenset(out)


def corridor(t: int) -> Position:
    """A solution of [2^t]^3 whose black cells sit in the three facial
    sections through (1,1,1)."""
    if t < 1:
        raise ValueError("needs t >= 1")
    n = 2**t
    sq = _corridor_square(t)
    cells: set[Coord] = {(1, 1, 1)}
    for r, c in sq:
        cells.add((1, 1 + r, 1 + c))
        cells.add((1 + r, 1, 1 + c))
        cells.add((1 + r, 1 + c, 1))
    return Position.from_coords(_cube(n), cells)


# -- fixtures -------------------------------------------------------------------------


def imperfect_solution_order4() -> Position:
    """A 16-cell solution of [4]^3 with four black cells in every planar
    section that is nevertheless not perfect."""
    levels = {
        1: [(1, 2), (2, 1), (2, 4), (4, 3)],
        2: [(1, 4), (2, 2), (3, 3), (4, 4)],
        3: [(1, 1), (2, 3), (3, 2), (4, 1)],
        4: [(1, 2), (3, 1), (3, 4), (4, 3)],
    }
    cells = [(i, j, k) for k, ij in levels.items() for (i, j) in ij]
    return Position.from_coords(_cube(4), cells)


# Minimum-size solutions for the three feasible small cuboid families,
# found by exhaustive search (see enumeration) and frozen here.
_CUBOID_CELLS: dict[tuple[int, int, int], tuple[Coord, ...]] = {
    (2, 2, 5): (
        (1, 1, 4), (1, 2, 1), (1, 2, 3), (1, 2, 5),
        (2, 1, 1), (2, 1, 3), (2, 1, 5), (2, 2, 2),
    ),
    (2, 3, 6): (
        (1, 1, 4), (1, 1, 6), (1, 2, 1), (1, 2, 3),
        (1, 3, 2), (1, 3, 4), (1, 3, 6), (2, 1, 1),
        (2, 1, 3), (2, 1, 5), (2, 2, 6), (2, 3, 1),
    ),
    (3, 3, 4): (
        (1, 1, 3), (1, 2, 4), (1, 3, 1), (1, 3, 3),
        (2, 1, 2), (2, 3, 2), (2, 3, 4), (3, 1, 1),
        (3, 1, 4), (3, 2, 2), (3, 3, 1),
    ),
}


def cuboid_fixtures() -> list[Position]:
    """Solutions of the cuboids (2,2,5), (2,3,6) and (3,3,4), each of
    minimum size."""
    out = []
    for dims in ((2, 2, 5), (2, 3, 6), (3, 3, 4)):
        cells = _CUBOID_CELLS.get(dims)
        if cells is None:
            raise RuntimeError(f"fixture for {dims} not frozen yet")
        out.append(Position.from_coords(GridShape(dims), cells))
    return out
