"""Latin squares and hypercubes as positions, plus sampling experiments.

A base position of the hypercube corresponds to a function assigning to
every line along the last axis the level of its unique black cell; the
position is perfect exactly when that function is a Latin hypercube on
symbols 1..n.  This module holds the conversions, an order-capped
enumerator, an exact solution census for small orders, and a uniform
sampler (a ±1-move chain on squares) used to estimate how rare solutions
become among random Latin squares.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import _kernels, grid, symmetry
from .engine import is_solution
from .grid import GridShape
from .position import Position

ENUM_ORDER_CAP = 6


@dataclass(frozen=True, eq=False)
class LatinHypercube:
    """entries[x1-1, ..., x_{d-1}-1] = symbol in 1..order; every axis-parallel
    line contains each symbol once."""

    order: int
    entries: np.ndarray

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LatinHypercube)
            and self.order == other.order
            and self.entries.shape == other.entries.shape
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self) -> int:
        return hash((self.order, self.entries.shape, self.entries.tobytes()))

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=np.int16).copy()
        if arr.ndim < 1 or any(s != self.order for s in arr.shape):
            raise ValueError("entry array must be order^dim shaped")
        want = np.arange(1, self.order + 1, dtype=np.int16)
        for axis in range(arr.ndim):
            lines = np.sort(np.moveaxis(arr, axis, -1).reshape(-1, self.order), axis=1)
            if not (lines == want).all():
                raise ValueError("not Latin: a line repeats a symbol")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.ndim

    @classmethod
    def from_rows(cls, rows) -> "LatinHypercube":
        arr = np.asarray(rows, dtype=np.int16)
        return cls(arr.shape[0], arr)

    def to_text(self) -> str:
        if self.dim != 2:
            raise ValueError("text form is defined for squares")
        return "\n".join(" ".join(str(v) for v in row) for row in self.entries) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LatinHypercube":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if line:
                rows.append([int(tok) for tok in line.split()])
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("expected n lines of n symbols")
        return cls.from_rows(rows)


def position_from_latin(cube: LatinHypercube) -> Position:
    """Black cell at level cube[x] on the vertical line through x."""
    n = cube.order
    shape = GridShape((n,) * (cube.dim + 1))
    cells = [
        tuple(i + 1 for i in idx) + (int(level),)
        for idx, level in np.ndenumerate(cube.entries)
    ]
    return Position.from_coords(shape, cells)


def latin_from_position(pos: Position) -> LatinHypercube:
    """Inverse of position_from_latin; explains failures in the error."""
    shape = pos.shape
    if not shape.is_hypercube:
        raise ValueError("latin form needs a hypercube position")
    n = shape.dims[0]
    axis = shape.d - 1
    entries = np.zeros((n,) * (shape.d - 1), dtype=np.int16)
    for fixed in product(range(1, n + 1), repeat=shape.d - 1):
        line = grid.line(shape, axis, fixed)
        levels = [k + 1 for k, cid in enumerate(line) if pos.is_black(cid)]
        if len(levels) != 1:
            raise ValueError(
                f"not single-valued: line at {fixed} has {len(levels)} black cells"
            )
        entries[tuple(i - 1 for i in fixed)] = levels[0]
    return LatinHypercube(n, entries)  # raises "not Latin" if lines repeat


def is_latin_position(pos: Position) -> bool:
    try:
        latin_from_position(pos)
    except ValueError:
        return False
    return True


def enumerate_latin_squares(n: int):
    """Yield every order-n Latin square (row-major backtracking).

    Capped at order 6 (812 million squares of order 7 would take days);
    larger orders raise with that guidance.
    """
    if n > ENUM_ORDER_CAP:
        raise ValueError(
            f"order {n} exceeds the enumeration cap {ENUM_ORDER_CAP}; "
            "use random_latin_square for larger orders"
        )
    grid_rows: list[list[int]] = []
    col_used = [0] * n

    def place_row(r: int):
        if r == n:
            yield LatinHypercube.from_rows([[v + 1 for v in row] for row in grid_rows])
            return
        row = [-1] * n
        grid_rows.append(row)

        def place(c: int, row_used: int):
            if c == n:
                yield from place_row(r + 1)
                return
            free = ~(row_used | col_used[c])
            for s in range(n):
                if (free >> s) & 1:
                    row[c] = s
                    col_used[c] |= 1 << s
                    yield from place(c + 1, row_used | (1 << s))
                    col_used[c] &= ~(1 << s)
            row[c] = -1

        yield from place(0, 0)
        grid_rows.pop()

    yield from place_row(0)


def count_latin_squares(n: int) -> int:
    return sum(1 for _ in enumerate_latin_squares(n))


# -- uniform-ish sampling via the ±1-move chain ---------------------------------


class LatinSampler:
    """Stream of random order-n Latin squares from a ±1-move chain.

    The chain walks proper and improper incidence cubes; samples are taken
    at proper states only, spaced by a thinning gap after a burn-in.  The
    walk mixes rapidly in practice; defaults scale with n^3 moves.
    """

    def __init__(self, n: int, seed: int, burn_in: int | None = None, thin: int | None = None):
        if n < 2:
            raise ValueError("sampler needs order >= 2")
        self.n = n
        self.burn_in = max(2000, 20 * n**3) if burn_in is None else burn_in
        self.thin = max(200, 2 * n**3) if thin is None else thin
        # cyclic start; the chain forgets it during burn-in
        base = (np.add.outer(np.arange(n), np.arange(n)) % n).astype(np.int8)
        self._L = base.copy()
        self._imp = np.array([-1, 0, 0, 0], dtype=np.int64)
        self._state = np.array([np.uint64(seed) ^ np.uint64(0xD1B54A32D192ED03)], dtype=np.uint64)
        _kernels.lsq_chain_advance(self._L, self._imp, self._state, self.burn_in)

    def sample(self) -> LatinHypercube:
        _kernels.lsq_chain_advance(self._L, self._imp, self._state, self.thin)
        return LatinHypercube(self.n, self._L.astype(np.int16) + 1)


def random_latin_square(n: int, seed: int) -> LatinHypercube:
    """One uniform-ish random Latin square of order n."""
    return LatinSampler(n, seed).sample()


# -- percolation test for permutation matrices ----------------------------------


def shapiro_stephens_percolates(perm) -> bool:
    """Does the permutation matrix of perm fill the n x n board under the
    two-neighbour threshold rule?

    perm maps row i to a column, as a sequence over 1..n (or 0..n-1).
    Equivalent to the greedy build-up of the same position reaching the
    full board.
    """
    p = [int(v) for v in perm]
    n = len(p)
    if sorted(p) == list(range(n)):
        p = [v + 1 for v in p]
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError("not a permutation")
    shape = GridShape((n, n))
    pos = Position.from_coords(shape, [(i + 1, p[i]) for i in range(n)])
    from .percolation import bootstrap_closure

    return bootstrap_closure(pos).is_full()


# -- solution fraction among Latin squares ---------------------------------------


@dataclass(frozen=True)
class ExperimentReport:
    order: int
    samples: int
    hits: int
    exact: Fraction | None

    @property
    def fraction(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        return self.hits / self.samples if self.samples else float("nan")


def _exact_solution_fraction(n: int) -> Fraction:
    shape = GridShape((n, n, n))
    nbr = grid.neighbor_table(shape)
    tables = symmetry.group_cell_tables(shape).astype(np.int32)
    words = -(-shape.cell_count // 64)
    # generous cap; order <= 5 has at most 2688 solutions
    cap = 8192
    keys = np.zeros((cap, words), dtype=np.uint64)
    first = np.array([-1], dtype=np.int64)
    seen, found = _kernels.latin_solution_scan(n, nbr, tables, keys, first)
    if found < 0:
        raise RuntimeError("solution key buffer overflow")
    return Fraction(int(found), int(seen))


def solution_fraction_experiment(n: int, samples: int = 0, seed: int = 0) -> ExperimentReport:
    """Fraction of order-n Latin squares that are solutions of the cube.

    Exact by full enumeration for n <= 5; otherwise a chain-sampled
    estimate over `samples` squares.
    """
    if n <= 5:
        return ExperimentReport(n, 0, 0, _exact_solution_fraction(n))
    if samples <= 0:
        raise ValueError("sampling orders need samples > 0")
    sampler = LatinSampler(n, seed)
    hits = 0
    for _ in range(samples):
        cube = sampler.sample()
        if is_solution(position_from_latin(cube)):
            hits += 1
    return ExperimentReport(n, samples, hits, None)


def latin_is_solution(cube: LatinHypercube) -> bool:
    """Latin positions are exactly the perfect base positions, so a Latin
    square passing the greedy test is a perfect solution."""
    return is_solution(position_from_latin(cube))
