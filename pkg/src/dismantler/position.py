"""Positions (black cell sets), their predicates, and closed-form bounds.

A position is an immutable snapshot: a shape plus a black/white colouring
of its cells.  Mutation happens on private working arrays inside the
engine; a Position handed out to callers never changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import grid
from .grid import Coord, GridShape


class Position:
    """A black cell set in a grid.  Immutable; hashable; order-insensitive."""

    __slots__ = ("shape", "_mask", "_count")

    def __init__(self, shape: GridShape, mask: np.ndarray):
        if mask.shape != (shape.cell_count,) or mask.dtype != np.uint8:
            raise ValueError("mask must be a uint8 array of length cell_count")
        mask = mask.copy()
        mask.flags.writeable = False
        self.shape = shape
        self._mask = mask
        self._count = int(mask.sum())

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_ids(cls, shape: GridShape, ids) -> "Position":
        mask = np.zeros(shape.cell_count, dtype=np.uint8)
        ids = list(ids)
        if ids:
            arr = np.asarray(ids, dtype=np.int64)
            if arr.min() < 0 or arr.max() >= shape.cell_count:
                raise ValueError("cell id out of range")
            mask[arr] = 1
        return cls(shape, mask)

    @classmethod
    def from_coords(cls, shape: GridShape, coords) -> "Position":
        return cls.from_ids(shape, [grid.encode(c, shape) for c in coords])

    @classmethod
    def full(cls, shape: GridShape) -> "Position":
        return cls(shape, np.ones(shape.cell_count, dtype=np.uint8))

    @classmethod
    def empty(cls, shape: GridShape) -> "Position":
        return cls(shape, np.zeros(shape.cell_count, dtype=np.uint8))

    # -- access ------------------------------------------------------------

    @property
    def mask(self) -> np.ndarray:
        """Read-only uint8 mask over cell ids."""
        return self._mask

    @property
    def black_count(self) -> int:
        return self._count

    def black_ids(self) -> np.ndarray:
        return np.nonzero(self._mask)[0]

    def black_coords(self) -> list[Coord]:
        return [grid.decode(int(i), self.shape) for i in self.black_ids()]

    def is_black(self, cid: int) -> bool:
        return bool(self._mask[cid])

    def is_full(self) -> bool:
        return self._count == self.shape.cell_count

    def with_cell(self, cid: int, black: bool) -> "Position":
        mask = self._mask.copy()
        mask[cid] = 1 if black else 0
        return Position(self.shape, mask)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Position)
            and self.shape == other.shape
            and self._mask.tobytes() == other._mask.tobytes()
        )

    def __hash__(self) -> int:
        return hash((self.shape, self._mask.tobytes()))

    def __repr__(self) -> str:
        return f"Position({self.shape}, {self._count} black)"

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dims": list(self.shape.dims),
            "black": [list(c) for c in self.black_coords()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "Position":
        try:
            shape = GridShape(tuple(data["dims"]))
            coords = [tuple(c) for c in data["black"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed position object: {exc}") from exc
        return cls.from_coords(shape, coords)

    @classmethod
    def from_json(cls, text: str) -> "Position":
        return cls.from_json_dict(json.loads(text))


# -- degree and surface ------------------------------------------------------


def _mask_ext(pos: Position) -> np.ndarray:
    """Mask extended by one zero sentinel slot for padded neighbour gathers."""
    return np.append(pos.mask, np.uint8(0))


def black_degrees(pos: Position) -> np.ndarray:
    """Number of black neighbours of every cell (black or white alike)."""
    ext = _mask_ext(pos)
    return ext[grid.neighbor_table(pos.shape)].sum(axis=1, dtype=np.int32)


def black_degree(pos: Position, cid: int) -> int:
    """Number of black neighbours of one cell."""
    ext = _mask_ext(pos)
    return int(ext[grid.neighbor_table(pos.shape)[cid]].sum())


def visible_surface(pos: Position) -> int:
    """Count of black-cell faces not shared with another black cell.

    Faces on the box boundary count as visible.  The quantity is invariant
    under every legal move: a flipped cell has exactly d black neighbours,
    so it trades d hidden faces for the d faces of its witnesses.
    """
    d = pos.shape.d
    degs = black_degrees(pos)
    black = pos.mask.astype(bool)
    return int((2 * d) * pos.black_count - degs[black].sum())


# -- predicates ---------------------------------------------------------------


def is_independent(pos: Position) -> bool:
    """No two black cells adjacent."""
    black = pos.mask.astype(bool)
    return not np.any(black_degrees(pos)[black] > 0)


def min_black(shape: GridShape) -> int:
    """Smallest possible black count of a maximal-dismantling end state.

    ceil of (sum over axes of the perpendicular cross-section size) / d;
    n^{d-1} for the hypercube.
    """
    total = sum(shape.cell_count // n for n in shape.dims)
    return -(-total // shape.d)


def is_base_position(pos: Position) -> bool:
    """Independent set of exactly min_black cells."""
    return pos.black_count == min_black(pos.shape) and is_independent(pos)


def _fiber_view(mask: np.ndarray, shape: GridShape, axis: int) -> np.ndarray:
    """Reshape a flat mask to (n_lines, dims[axis]) with lines contiguous."""
    arr = mask.reshape(shape.dims)
    arr = np.moveaxis(arr, axis, -1)
    return arr.reshape(-1, shape.dims[axis])


def is_convex(pos: Position) -> bool:
    """Black cells form a contiguous run (possibly empty) in every line."""
    for axis in range(pos.shape.d):
        fib = _fiber_view(pos.mask, pos.shape, axis)
        n = fib.shape[1]
        count = fib.sum(axis=1)
        first = np.argmax(fib, axis=1)
        last = n - 1 - np.argmax(fib[:, ::-1], axis=1)
        run = last - first + 1
        nonempty = count > 0
        if np.any(run[nonempty] != count[nonempty]):
            return False
    return True


def projection_area(pos: Position, axis: int) -> int:
    """Number of distinct images of black cells after deleting one coordinate."""
    black = set(int(i) for i in pos.black_ids())
    return len(grid.project(black, pos.shape, axis))


def total_projection_area(pos: Position) -> int:
    return sum(projection_area(pos, a) for a in range(pos.shape.d))


def is_perfect(pos: Position) -> bool:
    """All d projections of a base position are surjective.

    Only defined for base positions; other inputs are refused.
    """
    if not is_base_position(pos):
        raise ValueError("is_perfect is defined for base positions only")
    nc = pos.shape.cell_count
    for axis in range(pos.shape.d):
        if projection_area(pos, axis) != nc // pos.shape.dims[axis]:
            return False
    return True


# -- section counts and bounds ------------------------------------------------


def section_count(pos: Position, axis: int, value: int) -> int:
    """Black count in one section."""
    return int(pos.mask[grid.section_ids(pos.shape, axis, value)].sum())


def facial_count(pos: Position, axis: int, value: int) -> int:
    """Black count in a facial section; refuses inner sections."""
    if not grid.is_facial(pos.shape, axis, value):
        raise ValueError(f"section x_{axis} = {value} is not facial")
    return section_count(pos, axis, value)


def facial_lower_bound(shape: GridShape) -> int | None:
    """Minimum black count of any facial section of a hypercube solution.

    n^{d-2} for [n]^d; None for other shapes (the bound is not established
    for general boxes, so nothing is claimed there).
    """
    if not shape.is_hypercube:
        return None
    return shape.dims[0] ** (shape.d - 2)


def check_facial_bound(pos: Position) -> bool:
    """Every facial section meets the hypercube lower bound."""
    bound = facial_lower_bound(pos.shape)
    if bound is None:
        raise ValueError("facial bound applies to hypercube shapes only")
    for axis in range(pos.shape.d):
        for value in (1, pos.shape.dims[axis]):
            if facial_count(pos, axis, value) < bound:
                return False
    return True


def projection_lower_bound(shape: GridShape) -> int | None:
    """Minimum per-axis projection area of a hypercube solution.

    ceil((n^{d-1} + (d-1) n^{d-2}) / d); None for non-hypercube shapes.
    """
    if not shape.is_hypercube:
        return None
    n, d = shape.dims[0], shape.d
    return -(-(n ** (d - 1) + (d - 1) * n ** (d - 2)) // d)


@dataclass(frozen=True)
class BoundsReport:
    """Closed-form lower bounds attached to a shape.

    facial_min and projection_min are None when the shape is not a
    hypercube: those bounds are not claimed for general boxes.
    """

    shape: GridShape
    min_black: int
    facial_min: int | None
    projection_min: int | None


def bounds_report(shape: GridShape) -> BoundsReport:
    return BoundsReport(
        shape=shape,
        min_black=min_black(shape),
        facial_min=facial_lower_bound(shape),
        projection_min=projection_lower_bound(shape),
    )


# -- rendering ----------------------------------------------------------------


def render_layers(pos: Position) -> str:
    """ASCII picture of a 3-dimensional position, one n1 x n2 panel per level.

    Panels are the level sections bottom level to top level, left to right;
    within a panel rows run top to bottom and columns left to right.
    """
    if pos.shape.d != 3:
        raise ValueError("layer rendering is defined for 3-dimensional shapes")
    n1, n2, n3 = pos.shape.dims
    arr = pos.mask.reshape(pos.shape.dims)
    header = "  ".join(f"k={k + 1}".ljust(n2) for k in range(n3))
    lines = [header]
    for i in range(n1):
        row_parts = []
        for k in range(n3):
            row_parts.append("".join("#" if arr[i, j, k] else "." for j in range(n2)))
        lines.append("  ".join(row_parts))
    return "\n".join(lines)
