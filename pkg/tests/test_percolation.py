import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dismantler.engine import greedy_final
from dismantler.grid import GridShape
from dismantler.percolation import (
    bootstrap_closure,
    bootstrap_closure_reference,
    convex_equivalence_check,
    modified_bootstrap_closure,
    modified_bootstrap_closure_reference,
    random_convex_position,
)
from dismantler.position import Position, is_convex

S3 = GridShape((3, 3, 3))


@st.composite
def random_position(draw):
    shape = draw(st.sampled_from([GridShape(x) for x in [(3, 3), (3, 3, 3), (2, 3, 4), (4, 4, 4), (2, 2, 2, 2)]]))
    n = shape.cell_count
    ids = draw(st.sets(st.integers(0, n - 1), max_size=n // 2))
    return Position.from_ids(shape, ids)


@given(random_position())
@settings(max_examples=80)
def test_bootstrap_matches_reference(pos):
    assert bootstrap_closure(pos) == bootstrap_closure_reference(pos)


@given(random_position())
@settings(max_examples=80)
def test_modified_matches_reference(pos):
    assert modified_bootstrap_closure(pos) == modified_bootstrap_closure_reference(pos)


@given(random_position())
@settings(max_examples=40)
def test_closure_properties(pos):
    b = bootstrap_closure(pos)
    m = modified_bootstrap_closure(pos)
    # extensive
    assert bool((pos.mask <= b.mask).all())
    assert bool((pos.mask <= m.mask).all())
    # idempotent
    assert bootstrap_closure(b) == b
    assert modified_bootstrap_closure(m) == m
    # the modified rule only ever adds a subset of the plain rule's cells
    assert bool((m.mask <= b.mask).all())
    # greedy moves are legal bootstrap moves
    g = greedy_final(pos)
    assert bool((g.mask <= b.mask).all())


def test_bootstrap_monotone_in_start():
    rng = np.random.default_rng(3)
    for _ in range(20):
        small = rng.choice(27, size=6, replace=False)
        extra = rng.choice(27, size=4, replace=False)
        a = Position.from_ids(S3, small)
        b = Position.from_ids(S3, set(small) | set(extra))
        ca, cb = bootstrap_closure(a), bootstrap_closure(b)
        assert bool((ca.mask <= cb.mask).all())


def test_greedy_can_stall_where_bootstrap_fills():
    # octahedron: the centre has six black neighbours, never exactly three
    oct_cells = [(2, 2, 1), (2, 2, 3), (2, 1, 2), (2, 3, 2), (1, 2, 2), (3, 2, 2)]
    pos = Position.from_coords(S3, oct_cells)
    assert greedy_final(pos) == pos  # no cell has black degree exactly 3
    boot = bootstrap_closure(pos)
    assert boot.is_black(13)  # centre (2,2,2) filled at threshold >= 3


def test_modified_rule_needs_every_axis():
    # three witnesses but only two axes: plain rule fills, modified refuses
    cells = [(1, 2, 2), (3, 2, 2), (2, 1, 2)]
    pos = Position.from_coords(S3, cells)
    assert bootstrap_closure(pos).is_black(13)
    assert not modified_bootstrap_closure(pos).is_black(13)


@pytest.mark.parametrize("dims", [(3, 3, 3), (4, 4, 4), (5, 5, 5), (3, 3, 4), (2, 2, 2, 2)])
def test_convex_equivalence_on_samples(dims):
    shape = GridShape(dims)
    for seed in range(60):
        pos = random_convex_position(shape, seed)
        assert is_convex(pos)
        assert convex_equivalence_check(pos)


def test_convex_equivalence_rejects_nonconvex():
    gap = Position.from_coords(S3, [(1, 1, 1), (3, 1, 1)])
    with pytest.raises(ValueError):
        convex_equivalence_check(gap)


def test_random_convex_position_is_deterministic_per_seed():
    shape = GridShape((4, 4, 4))
    assert random_convex_position(shape, 7) == random_convex_position(shape, 7)
    samples = {random_convex_position(shape, s) for s in range(25)}
    assert len(samples) > 5
