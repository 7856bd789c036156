"""Threshold growth processes and their agreement on convex starts.

Three ways to grow a black set, differing only in the wake-up rule:

* greedy build-up: add a white cell while it has exactly d black
  neighbours (the move relation of the main process);
* bootstrap: add a white cell once it has at least d black neighbours;
* modified bootstrap: add a white cell once it has a black neighbour
  on every axis.

Bootstrap dominates greedy pointwise, and modified bootstrap dominates
bootstrap.  Started from a convex position all three stall at the same
set; `convex_equivalence_check` verifies that on a given input.
"""

from __future__ import annotations

import numpy as np

from . import _kernels, grid
from .engine import greedy_final
from .grid import GridShape
from .position import Position, is_convex


def _run_fill(pos: Position, kind: str) -> Position:
    shape = pos.shape
    n = shape.cell_count
    mask_ext = np.zeros(n + 1, dtype=np.uint8)
    mask_ext[:n] = pos.mask
    nbr = grid.neighbor_table(shape)
    queue = np.empty(n, dtype=np.int32)
    if kind == "bootstrap":
        deg = np.zeros(n, dtype=np.int32)
        _kernels.bootstrap_fill(mask_ext, nbr, shape.d, deg, queue)
    else:
        axes_seen = np.zeros(n + 1, dtype=np.uint8)
        _kernels.modified_bootstrap_fill(mask_ext, nbr, shape.d, axes_seen, queue)
    return Position(shape, mask_ext[:n])


def bootstrap_closure(pos: Position) -> Position:
    """Grow pos by repeatedly blackening cells with >= d black neighbours."""
    return _run_fill(pos, "bootstrap")


def modified_bootstrap_closure(pos: Position) -> Position:
    """Grow pos by blackening cells with a black neighbour on every axis."""
    return _run_fill(pos, "modified")


def bootstrap_closure_reference(pos: Position) -> Position:
    """Round-synchronous restatement of bootstrap_closure, for cross-checks."""
    shape = pos.shape
    mask = pos.mask.copy()
    nbr = grid.neighbor_table(shape)
    ext = np.zeros(shape.cell_count + 1, dtype=np.uint8)
    while True:
        ext[:-1] = mask
        degs = ext[nbr].sum(axis=1)
        new = (mask == 0) & (degs >= shape.d)
        if not new.any():
            return Position(shape, mask)
        mask[new] = 1


def modified_bootstrap_closure_reference(pos: Position) -> Position:
    """Round-synchronous restatement of modified_bootstrap_closure."""
    shape = pos.shape
    mask = pos.mask.copy()
    nbr = grid.neighbor_table(shape)
    ext = np.zeros(shape.cell_count + 1, dtype=np.uint8)
    while True:
        ext[:-1] = mask
        black = ext[nbr]
        per_axis = black.reshape(-1, shape.d, 2).max(axis=2)
        new = (mask == 0) & (per_axis.min(axis=1) == 1)
        if not new.any():
            return Position(shape, mask)
        mask[new] = 1


def convex_equivalence_check(pos: Position) -> bool:
    """For a convex start, do greedy build-up, bootstrap and modified
    bootstrap all stall at the same set?  Raises on a non-convex input."""
    if not is_convex(pos):
        raise ValueError("convex_equivalence_check expects a convex position")
    g = greedy_final(pos)
    b = bootstrap_closure(pos)
    m = modified_bootstrap_closure(pos)
    return g == b and b == m


def _random_subbox(shape: GridShape, rng: np.random.Generator) -> Position:
    cells = []
    los, his = [], []
    for n_a in shape.dims:
        lo = int(rng.integers(1, n_a + 1))
        hi = int(rng.integers(lo, n_a + 1))
        los.append(lo)
        his.append(hi)
    for coord in shape:
        if all(lo <= x <= hi for x, lo, hi in zip(coord, los, his)):
            cells.append(coord)
    return Position.from_coords(shape, cells)


def _random_latin_position(shape: GridShape, rng: np.random.Generator) -> Position:
    # One black per line along the last axis, at a level given by a sum of
    # random permutations of the side; needs a hypercube.
    n = shape.dims[0]
    perms = [rng.permutation(n) for _ in range(shape.d - 1)]
    cells = []
    for coord in shape:
        if coord[-1] != 1:
            continue
        level = sum(int(p[x - 1]) for p, x in zip(perms, coord)) % n
        cells.append(coord[:-1] + (level + 1,))
    return Position.from_coords(shape, cells)


def _grown_convex(shape: GridShape, rng: np.random.Generator) -> Position:
    target = int(rng.integers(1, max(2, shape.cell_count // 2)))
    order = rng.permutation(shape.cell_count)
    pos = Position.empty(shape)
    for cid in order:
        if pos.black_count >= target:
            break
        cand = pos.with_cell(int(cid), True)
        if is_convex(cand):
            pos = cand
    return pos


def random_convex_position(shape: GridShape, seed: int) -> Position:
    """Seeded sample from a mix of convex families: sub-boxes, positions
    with one black per vertical line, and randomly grown convex sets."""
    rng = np.random.default_rng(seed)
    kinds = ["box", "grow"]
    if shape.is_hypercube:
        kinds.append("latin")
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == "box":
        pos = _random_subbox(shape, rng)
    elif kind == "latin":
        pos = _random_latin_position(shape, rng)
    else:
        pos = _grown_convex(shape, rng)
    assert is_convex(pos)
    return pos
