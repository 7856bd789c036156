"""Moves, traces, and the greedy decision procedure.

A build-up move adds a white cell with exactly d black neighbours; a
dismantling move removes a black cell with exactly d black neighbours.
The two are mutual reverses.  Each executed move is recorded as a
MoveStar: the cell together with its black neighbour set at move time.

Greedy build-up decides solutions: whether the completion reaches the
full grid does not depend on the processing order, so the scan policy
here (row-major sweep feeding a FIFO work queue) is a performance and
determinism choice only.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, grid
from . import position as _position
from .grid import Coord, GridShape
from .position import Position

# When true, every mutating step cross-checks the incremental degree table
# against a from-scratch recomputation.  Enabled by the test suite.
DEBUG_VALIDATE = False


class IllegalMoveError(ValueError):
    """A move that does not satisfy the exactly-d rule at its position."""


class TraceVerificationError(ValueError):
    """Replay of a trace hit an illegal step."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"illegal step {index}: {reason}")


@dataclass(frozen=True)
class MoveStar:
    """A cell together with its d black neighbours at move time."""

    cell: Coord
    nbrs: frozenset[Coord]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cell", tuple(self.cell))
        object.__setattr__(self, "nbrs", frozenset(tuple(x) for x in self.nbrs))
        d = len(self.cell)
        if len(self.nbrs) != d:
            raise ValueError(f"need exactly {d} witnesses, got {len(self.nbrs)}")
        for w in self.nbrs:
            diffs = [a for a in range(d) if w[a] != self.cell[a]]
            if len(diffs) != 1 or abs(w[diffs[0]] - self.cell[diffs[0]]) != 1:
                raise ValueError(f"witness {w} is not adjacent to {self.cell}")


def is_balanced(move: MoveStar) -> bool:
    """True when the d witnesses lie on d distinct axes through the cell."""
    axes = set()
    for w in move.nbrs:
        for a in range(len(move.cell)):
            if w[a] != move.cell[a]:
                axes.add(a)
    return len(axes) == len(move.cell)


@dataclass(frozen=True)
class Trace:
    """An ordered record of moves replayable from a start position."""

    shape: GridShape
    start: Position
    direction: str  # "buildup" | "dismantling"
    moves: tuple[MoveStar, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.direction not in ("buildup", "dismantling"):
            raise ValueError(f"unknown direction {self.direction!r}")
        object.__setattr__(self, "moves", tuple(self.moves))

    def __len__(self) -> int:
        return len(self.moves)

    def to_json_dict(self) -> dict:
        return {
            "dims": list(self.shape.dims),
            "direction": self.direction,
            "start": self.start.to_json_dict(),
            "moves": [
                {"cell": list(m.cell), "nbrs": sorted(list(w) for w in m.nbrs)}
                for m in self.moves
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "Trace":
        try:
            shape = GridShape(tuple(data["dims"]))
            start = Position.from_json_dict(data["start"])
            moves = tuple(
                MoveStar(tuple(m["cell"]), frozenset(tuple(w) for w in m["nbrs"]))
                for m in data["moves"]
            )
            return cls(shape, start, data["direction"], moves)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed trace object: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Trace":
        return cls.from_json_dict(json.loads(text))


# -- candidates ---------------------------------------------------------------


def _candidate_ids(pos: Position, colour: int) -> np.ndarray:
    degs = _position.black_degrees(pos)
    want = (pos.mask == colour) & (degs == pos.shape.d)
    return np.nonzero(want)[0]


def buildup_candidates(pos: Position) -> set[Coord]:
    """White cells with exactly d black neighbours."""
    return {grid.decode(int(c), pos.shape) for c in _candidate_ids(pos, 0)}


def dismantle_candidates(pos: Position) -> set[Coord]:
    """Black cells with exactly d black neighbours."""
    return {grid.decode(int(c), pos.shape) for c in _candidate_ids(pos, 1)}


# -- single moves -------------------------------------------------------------


def _black_nbr_coords(mask_ext: np.ndarray, cid: int, shape: GridShape) -> frozenset[Coord]:
    row = grid.neighbor_table(shape)[cid]
    return frozenset(
        grid.decode(int(w), shape) for w in row if w < shape.cell_count and mask_ext[w]
    )


def apply_move(pos: Position, move: MoveStar, direction: str) -> Position:
    """Validate and execute one move, returning the new position.

    Rejects the move when the cell has the wrong colour, its black degree
    is not d, or the recorded witnesses do not match the current black
    neighbourhood.
    """
    if direction not in ("buildup", "dismantling"):
        raise ValueError(f"unknown direction {direction!r}")
    shape = pos.shape
    cid = grid.encode(move.cell, shape)
    want_black = direction == "dismantling"
    if pos.is_black(cid) != want_black:
        raise IllegalMoveError(f"cell {move.cell} has the wrong colour for {direction}")
    mask_ext = np.append(pos.mask, np.uint8(0))
    actual = _black_nbr_coords(mask_ext, cid, shape)
    if len(actual) != shape.d:
        raise IllegalMoveError(
            f"cell {move.cell} has black degree {len(actual)}, need exactly {shape.d}"
        )
    if actual != move.nbrs:
        raise IllegalMoveError(f"witness mismatch at {move.cell}")
    return pos.with_cell(cid, not want_black)


# -- greedy completion ---------------------------------------------------------


class _Workspace:
    """Mutable mask + incrementally maintained black-degree table."""

    def __init__(self, pos: Position):
        self.shape = pos.shape
        self.n = pos.shape.cell_count
        self.nbr = grid.neighbor_table(pos.shape)
        self.mask_ext = np.append(pos.mask, np.uint8(0))
        self.deg = np.zeros(self.n, dtype=np.int32)
        _kernels.compute_degrees(self.mask_ext, self.nbr, self.deg)

    def flip(self, cid: int, to_black: bool) -> None:
        self.mask_ext[cid] = 1 if to_black else 0
        delta = 1 if to_black else -1
        for w in self.nbr[cid]:
            if w < self.n:
                self.deg[w] += delta
        if DEBUG_VALIDATE:
            check = np.zeros(self.n, dtype=np.int32)
            _kernels.compute_degrees(self.mask_ext, self.nbr, check)
            assert np.array_equal(check, self.deg), "degree table out of sync"

    def black_nbrs(self, cid: int) -> frozenset[Coord]:
        return _black_nbr_coords(self.mask_ext, cid, self.shape)

    def snapshot(self) -> Position:
        return Position(self.shape, self.mask_ext[: self.n])


def greedy_complete(pos: Position) -> tuple[Position, Trace]:
    """Add white degree-d cells until none remain; record every move.

    The final position is maximal: no white cell has black degree exactly
    d.  Which maximal position is reached cannot depend on the order when
    the start is a solution; for other starts this fixed policy keeps the
    output deterministic.
    """
    ws = _Workspace(pos)
    d = pos.shape.d
    queue = deque(int(c) for c in np.nonzero((ws.mask_ext[: ws.n] == 0) & (ws.deg == d))[0])
    moves = []
    while queue:
        c = queue.popleft()
        if ws.mask_ext[c] or ws.deg[c] != d:
            continue
        moves.append(MoveStar(grid.decode(c, pos.shape), ws.black_nbrs(c)))
        ws.flip(c, True)
        for w in ws.nbr[c]:
            if w < ws.n and ws.mask_ext[w] == 0 and ws.deg[w] == d:
                queue.append(int(w))
    final = ws.snapshot()
    return final, Trace(pos.shape, pos, "buildup", tuple(moves))


def greedy_final(pos: Position) -> Position:
    """Greedy completion without trace recording (kernel fast path)."""
    n = pos.shape.cell_count
    mask_ext = np.append(pos.mask, np.uint8(0))
    deg = np.zeros(n, dtype=np.int32)
    queue = np.zeros(n, dtype=np.int32)
    _kernels.greedy_fill(mask_ext, grid.neighbor_table(pos.shape), pos.shape.d, deg, queue)
    return Position(pos.shape, mask_ext[:n])


def is_solution(pos: Position) -> bool:
    """Whether greedy build-up from a base position reaches the full grid.

    Refuses non-base inputs: the order-independence of the verdict is
    established for base positions, so the question is only posed there.
    """
    if not _position.is_base_position(pos):
        raise ValueError("is_solution expects a base position")
    n = pos.shape.cell_count
    mask_ext = np.append(pos.mask, np.uint8(0))
    deg = np.zeros(n, dtype=np.int32)
    queue = np.zeros(n, dtype=np.int32)
    filled = _kernels.greedy_fill(
        mask_ext, grid.neighbor_table(pos.shape), pos.shape.d, deg, queue
    )
    return filled == n


def random_order_buildup(pos: Position, seed: int) -> tuple[Position, Trace]:
    """Greedy build-up scanning cells in seeded random order.

    Repeats full scans (a fresh shuffle each sweep) until a sweep makes no
    move.  Identical seeds give identical traces.
    """
    ws = _Workspace(pos)
    d = pos.shape.d
    rng = np.random.default_rng(seed)
    moves = []
    progress = True
    while progress:
        progress = False
        for c in rng.permutation(ws.n):
            if ws.mask_ext[c] == 0 and ws.deg[c] == d:
                moves.append(MoveStar(grid.decode(int(c), pos.shape), ws.black_nbrs(int(c))))
                ws.flip(int(c), True)
                progress = True
    return ws.snapshot(), Trace(pos.shape, pos, "buildup", tuple(moves))


def restricted_dismantle(pos: Position, keep=()) -> Trace:
    """Remove degree-d black cells, never touching ``keep``, until stuck.

    The end state is maximal under the restriction.  When *some*
    dismantling from pos to exactly the keep set exists, any maximal
    restricted dismantling lands on exactly the keep set: were a cell of
    the end state outside keep, comparing the two move sequences move by
    move (first differing cell, in either direction) exhibits a black
    degree-d cell outside keep at the end state, contradicting maximality.
    Callers that rely on an exact target assert the end position.
    """
    keep_ids = frozenset(grid.encode(c, pos.shape) for c in keep)
    ws = _Workspace(pos)
    d = pos.shape.d
    queue = deque(
        int(c)
        for c in np.nonzero((ws.mask_ext[: ws.n] == 1) & (ws.deg == d))[0]
        if int(c) not in keep_ids
    )
    moves = []
    while queue:
        c = queue.popleft()
        if ws.mask_ext[c] == 0 or ws.deg[c] != d:
            continue
        moves.append(MoveStar(grid.decode(c, pos.shape), ws.black_nbrs(c)))
        ws.flip(c, False)
        for w in ws.nbr[c]:
            w = int(w)
            if w < ws.n and ws.mask_ext[w] == 1 and ws.deg[w] == d and w not in keep_ids:
                queue.append(w)
    return Trace(pos.shape, pos, "dismantling", tuple(moves))


# -- verification ---------------------------------------------------------------


def verify_trace(trace: Trace) -> Position:
    """Replay a trace move by move, checking every recorded witness set.

    Returns the end position; raises TraceVerificationError naming the
    first bad step.
    """
    shape = trace.shape
    ws = _Workspace(trace.start)
    to_black = trace.direction == "buildup"
    for idx, mv in enumerate(trace.moves):
        try:
            cid = grid.encode(mv.cell, shape)
        except ValueError as exc:
            raise TraceVerificationError(idx, str(exc)) from exc
        if bool(ws.mask_ext[cid]) == to_black:
            raise TraceVerificationError(idx, f"cell {mv.cell} has the wrong colour")
        if ws.deg[cid] != shape.d:
            raise TraceVerificationError(
                idx, f"cell {mv.cell} has black degree {int(ws.deg[cid])}, need {shape.d}"
            )
        actual = ws.black_nbrs(cid)
        if actual != mv.nbrs:
            raise TraceVerificationError(idx, f"witness mismatch at {mv.cell}")
        ws.flip(cid, to_black)
    return ws.snapshot()


def trace_end(trace: Trace) -> Position:
    """End position of a trace, trusting it (no witness checks)."""
    mask = trace.start.mask.copy()
    to_black = 1 if trace.direction == "buildup" else 0
    for mv in trace.moves:
        mask[grid.encode(mv.cell, trace.shape)] = to_black
    return Position(trace.shape, mask)


def traces_equivalent(t1: Trace, t2: Trace) -> bool:
    """Equality of the MoveStar multisets of two traces on one shape."""
    if t1.shape != t2.shape:
        raise ValueError("traces live on different shapes")
    return Counter(t1.moves) == Counter(t2.moves)


def all_moves_balanced(trace: Trace) -> bool:
    return all(is_balanced(m) for m in trace.moves)
