"""Geometry of a d-dimensional box of unit cells.

Cells are addressed two ways: 1-based coordinate tuples ``(x_1, ..., x_d)``
with ``x_i`` in ``[1, dims[i]]``, and 0-based integer ids.  Ids use a
mixed-radix encoding with the *last* coordinate fastest; ids are internal
plumbing only, every serialized format speaks coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator

import numpy as np

Coord = tuple[int, ...]


@dataclass(frozen=True)
class GridShape:
    """Side lengths of the box.  Every side must be at least 2.

    A size-1 side would let a cell have fewer than d grid neighbours on
    the corresponding axis pair, degenerating the exactly-d-neighbour
    move rule, so such shapes are rejected outright.
    """

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 2:
            raise ValueError(f"need at least 2 dimensions, got {len(dims)}")
        if any(n < 2 for n in dims):
            raise ValueError(f"every side must be >= 2, got {dims}")

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def cell_count(self) -> int:
        return math.prod(self.dims)

    @property
    def is_hypercube(self) -> bool:
        return len(set(self.dims)) == 1

    def __iter__(self) -> Iterator[Coord]:
        """All coordinates in id order."""
        return product(*(range(1, n + 1) for n in self.dims))

    def __str__(self) -> str:
        return "x".join(str(n) for n in self.dims)


def encode(coord: Coord, shape: GridShape) -> int:
    """Coordinate tuple -> cell id (mixed radix, last coordinate fastest)."""
    dims = shape.dims
    if len(coord) != len(dims):
        raise ValueError(f"coordinate {coord} has wrong arity for shape {shape}")
    cid = 0
    for x, n in zip(coord, dims):
        if not 1 <= x <= n:
            raise ValueError(f"coordinate {coord} out of bounds for shape {shape}")
        cid = cid * n + (x - 1)
    return cid


def decode(cid: int, shape: GridShape) -> Coord:
    """Cell id -> coordinate tuple."""
    if not 0 <= cid < shape.cell_count:
        raise ValueError(f"cell id {cid} out of range for shape {shape}")
    out = []
    for n in reversed(shape.dims):
        cid, r = divmod(cid, n)
        out.append(r + 1)
    return tuple(reversed(out))


@lru_cache(maxsize=None)
def coords_array(shape: GridShape) -> np.ndarray:
    """(cell_count, d) int32 array of 1-based coordinates, row i = decode(i)."""
    idx = np.indices(shape.dims).reshape(shape.d, -1).T.astype(np.int32) + 1
    idx.flags.writeable = False
    return idx


@lru_cache(maxsize=None)
def neighbor_table(shape: GridShape) -> np.ndarray:
    """(cell_count, 2d) int32 table of neighbour ids, padded with cell_count.

    Column pairs (2a, 2a+1) hold the -1/+1 neighbours along axis a.  The
    pad value cell_count indexes a sentinel slot in mask arrays extended
    by one zero entry, so gathers need no branch.
    """
    nc, d = shape.cell_count, shape.d
    coords = coords_array(shape)
    table = np.full((nc, 2 * d), nc, dtype=np.int32)
    # stride of axis a in the id encoding
    strides = np.ones(d, dtype=np.int64)
    for a in range(d - 2, -1, -1):
        strides[a] = strides[a + 1] * shape.dims[a + 1]
    ids = np.arange(nc, dtype=np.int64)
    for a in range(d):
        x = coords[:, a]
        lo = ids - strides[a]
        hi = ids + strides[a]
        table[:, 2 * a] = np.where(x > 1, lo, nc)
        table[:, 2 * a + 1] = np.where(x < shape.dims[a], hi, nc)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def neighbor_counts(shape: GridShape) -> np.ndarray:
    """(cell_count,) int32 array: number of in-grid neighbours per cell."""
    counts = (neighbor_table(shape) < shape.cell_count).sum(axis=1).astype(np.int32)
    counts.flags.writeable = False
    return counts


def neighbors(cid: int, shape: GridShape) -> set[int]:
    """In-grid neighbour ids of a cell (cells sharing a (d-1)-face)."""
    nc = shape.cell_count
    row = neighbor_table(shape)[cid]
    return {int(x) for x in row if x < nc}


def neighbors_of_coord(coord: Coord, shape: GridShape) -> set[Coord]:
    """In-grid neighbour coordinates of a coordinate."""
    out = set()
    for a, n in enumerate(shape.dims):
        for delta in (-1, 1):
            x = coord[a] + delta
            if 1 <= x <= n:
                out.add(coord[:a] + (x,) + coord[a + 1 :])
    return out


def line(shape: GridShape, axis: int, fixed: Coord) -> list[int]:
    """Ids of the line along ``axis`` with the other coordinates ``fixed``.

    ``fixed`` lists the d-1 remaining coordinates in axis order with the
    running axis omitted.  Cells come back in increasing coordinate order.
    """
    if len(fixed) != shape.d - 1:
        raise ValueError(f"fixed tuple {fixed} has wrong arity")
    out = []
    for v in range(1, shape.dims[axis] + 1):
        coord = fixed[:axis] + (v,) + fixed[axis:]
        out.append(encode(coord, shape))
    return out


def all_lines(shape: GridShape, axis: int) -> Iterator[list[int]]:
    """All lines along one axis (there are cell_count / dims[axis] of them)."""
    others = [shape.dims[a] for a in range(shape.d) if a != axis]
    for fixed in product(*(range(1, n + 1) for n in others)):
        yield line(shape, axis, fixed)


@lru_cache(maxsize=None)
def section_ids(shape: GridShape, axis: int, value: int) -> np.ndarray:
    """Sorted ids of the section ``x_axis = value`` (read-only array)."""
    if not 1 <= value <= shape.dims[axis]:
        raise ValueError(f"section value {value} out of range on axis {axis}")
    ids = np.nonzero(coords_array(shape)[:, axis] == value)[0].astype(np.int32)
    ids.flags.writeable = False
    return ids


def section(shape: GridShape, axis: int, value: int) -> set[int]:
    """Ids of the (d-1)-dimensional slice with coordinate ``axis`` fixed."""
    return set(int(x) for x in section_ids(shape, axis, value))


def is_facial(shape: GridShape, axis: int, value: int) -> bool:
    """A section is facial when the fixed coordinate is extremal."""
    if not 1 <= value <= shape.dims[axis]:
        raise ValueError(f"section value {value} out of range on axis {axis}")
    return value == 1 or value == shape.dims[axis]


def project(cells: set[int], shape: GridShape, axis: int) -> set[Coord]:
    """Image of a cell set under deleting coordinate ``axis``.

    Returns (d-1)-tuples rather than ids: the reduced shape may have a
    single dimension, which GridShape does not represent.
    """
    if not 0 <= axis < shape.d:
        raise ValueError(f"axis {axis} out of range")
    out = set()
    for cid in cells:
        c = decode(cid, shape)
        out.add(c[:axis] + c[axis + 1 :])
    return out
