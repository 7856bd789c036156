"""Isometries of the box, canonical forms, orbits.

An isometry is a signed axis permutation compatible with the side
lengths: output axis a reads input axis perm[a], optionally reversed.
Hypercubes get the full group of size 2^d d! (48 at d = 3); boxes keep
the subgroup preserving their dimension profile.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product

import numpy as np

from . import grid
from .grid import Coord, GridShape
from .position import Position


@dataclass(frozen=True)
class Isometry:
    """y[a] = x[perm[a]], reversed on axis a when flips[a] is set."""

    perm: tuple[int, ...]
    flips: tuple[bool, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        object.__setattr__(self, "flips", tuple(bool(f) for f in self.flips))
        d = len(self.perm)
        if sorted(self.perm) != list(range(d)) or len(self.flips) != d:
            raise ValueError("malformed isometry")

    @property
    def d(self) -> int:
        return len(self.perm)

    def is_compatible(self, shape: GridShape) -> bool:
        return all(shape.dims[a] == shape.dims[p] for a, p in enumerate(self.perm))

    def apply_to_coord(self, coord: Coord, shape: GridShape) -> Coord:
        out = []
        for a in range(self.d):
            x = coord[self.perm[a]]
            if self.flips[a]:
                x = shape.dims[self.perm[a]] + 1 - x
            out.append(x)
        return tuple(out)

    def identity_like(self) -> bool:
        return all(p == a for a, p in enumerate(self.perm)) and not any(self.flips)


def identity_isometry(d: int) -> Isometry:
    return Isometry(tuple(range(d)), (False,) * d)


def compose(g: Isometry, h: Isometry) -> Isometry:
    """The isometry acting as g after h."""
    if g.d != h.d:
        raise ValueError("dimension mismatch")
    perm = tuple(h.perm[g.perm[a]] for a in range(g.d))
    flips = tuple(bool(g.flips[a]) ^ bool(h.flips[g.perm[a]]) for a in range(g.d))
    return Isometry(perm, flips)


def inverse(g: Isometry) -> Isometry:
    inv_perm = [0] * g.d
    for a, p in enumerate(g.perm):
        inv_perm[p] = a
    flips = tuple(bool(g.flips[inv_perm[a]]) for a in range(g.d))
    return Isometry(tuple(inv_perm), flips)


@lru_cache(maxsize=None)
def isometry_group(shape: GridShape) -> tuple[Isometry, ...]:
    """All signed axis permutations preserving the dimension profile."""
    d = shape.d
    out = []
    for perm in permutations(range(d)):
        if any(shape.dims[a] != shape.dims[perm[a]] for a in range(d)):
            continue
        for flips in product((False, True), repeat=d):
            out.append(Isometry(perm, flips))
    return tuple(out)


@lru_cache(maxsize=None)
def cell_permutation(shape: GridShape, g: Isometry) -> np.ndarray:
    """int32 table sending each cell id to its image id under g."""
    if not g.is_compatible(shape):
        raise ValueError(f"isometry {g} incompatible with shape {shape}")
    coords = grid.coords_array(shape).astype(np.int64)
    d = shape.d
    cols = []
    for a in range(d):
        x = coords[:, g.perm[a]]
        if g.flips[a]:
            x = shape.dims[g.perm[a]] + 1 - x
        cols.append(x - 1)
    out = np.zeros(shape.cell_count, dtype=np.int64)
    for a in range(d):
        out = out * shape.dims[a] + cols[a]
    table = out.astype(np.int32)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def group_cell_tables(shape: GridShape) -> np.ndarray:
    """(G, cell_count) int32 stack of all cell permutations."""
    tables = np.stack([cell_permutation(shape, g) for g in isometry_group(shape)])
    tables.flags.writeable = False
    return tables


def apply_isometry(pos: Position, g: Isometry) -> Position:
    table = cell_permutation(pos.shape, g)
    mask = np.zeros_like(pos.mask)
    mask[table] = pos.mask
    return Position(pos.shape, mask)


def _image_bytes(pos: Position) -> list[bytes]:
    mask = pos.mask
    out = []
    for table in group_cell_tables(pos.shape):
        img = np.zeros_like(mask)
        img[table] = mask
        out.append(img.tobytes())
    return out


def canonical_form(pos: Position) -> bytes:
    """Least mask image over the group; equal keys characterize isometric
    positions."""
    return min(_image_bytes(pos))


def canonical_representative(pos: Position) -> Position:
    mask = np.frombuffer(canonical_form(pos), dtype=np.uint8)
    return Position(pos.shape, mask.copy())


def orbit_and_stabilizer(pos: Position) -> tuple[int, int]:
    """(orbit size, stabilizer size); the product is the group order."""
    images = _image_bytes(pos)
    own = pos.mask.tobytes()
    orbit = len(set(images))
    stab = sum(1 for b in images if b == own)
    assert orbit * stab == len(images)
    return orbit, stab
