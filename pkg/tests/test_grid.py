import math

import pytest
from hypothesis import given, strategies as st

from dismantler import grid
from dismantler.grid import GridShape, decode, encode, is_facial, line, neighbors, project

SHAPES = [(2, 2), (3, 3), (2, 3), (3, 3, 3), (2, 2, 5), (2, 3, 6), (3, 3, 4), (4, 4, 4), (2, 2, 2, 2), (3, 3, 3, 3)]

shape_st = st.sampled_from([GridShape(d) for d in SHAPES])


@st.composite
def shape_and_cell(draw):
    shape = draw(shape_st)
    cid = draw(st.integers(0, shape.cell_count - 1))
    return shape, cid


def test_shape_basics():
    s = GridShape((3, 4, 5))
    assert s.d == 3
    assert s.cell_count == 60
    assert not s.is_hypercube
    assert GridShape((4, 4, 4)).is_hypercube


@pytest.mark.parametrize("dims", [(1, 3), (3, 1, 3), (5,), (), (3, 0)])
def test_shape_rejects_degenerate(dims):
    with pytest.raises(ValueError):
        GridShape(dims)


@given(shape_and_cell())
def test_encode_decode_roundtrip(sc):
    shape, cid = sc
    coord = decode(cid, shape)
    assert encode(coord, shape) == cid
    assert all(1 <= coord[a] <= shape.dims[a] for a in range(shape.d))


def test_encode_rejects_out_of_range():
    s = GridShape((3, 3, 3))
    with pytest.raises(ValueError):
        encode((0, 1, 1), s)
    with pytest.raises(ValueError):
        encode((1, 4, 1), s)


@given(shape_and_cell())
def test_neighbors_symmetric_irreflexive(sc):
    shape, cid = sc
    nbrs = neighbors(cid, shape)
    assert cid not in nbrs
    for m in nbrs:
        assert cid in neighbors(m, shape)


@given(shape_st)
def test_neighbor_counts(shape):
    # corner cells have d neighbours, interior cells 2d
    corner = encode(tuple(1 for _ in shape.dims), shape)
    assert len(neighbors(corner, shape)) == shape.d
    if all(n >= 3 for n in shape.dims):
        inner = encode(tuple(2 for _ in shape.dims), shape)
        assert len(neighbors(inner, shape)) == 2 * shape.d
    counts = grid.neighbor_counts(shape)
    assert int(counts.sum()) == sum(len(neighbors(c, shape)) for c in range(shape.cell_count))


def test_neighbor_table_matches_neighbors():
    shape = GridShape((2, 3, 4))
    tab = grid.neighbor_table(shape)
    assert tab.shape == (shape.cell_count, 2 * shape.d)
    for cid in range(shape.cell_count):
        # rows are padded with the out-of-range sentinel id
        row = {int(x) for x in tab[cid] if x < shape.cell_count}
        assert row == neighbors(cid, shape)


def test_line_contents():
    shape = GridShape((3, 4, 5))
    cells = line(shape, 1, (2, 3))  # x0 = 2, x2 = 3, x1 running
    assert len(cells) == 4
    coords = [decode(c, shape) for c in cells]
    assert {c[1] for c in coords} == {1, 2, 3, 4}
    assert all(c[0] == 2 and c[2] == 3 for c in coords)


@given(shape_st, st.integers(0, 3))
def test_lines_partition_grid(shape, axis):
    axis %= shape.d
    seen = []
    for cells in grid.all_lines(shape, axis):
        seen.extend(cells)
    assert sorted(seen) == list(range(shape.cell_count))


@given(shape_st, st.integers(0, 3))
def test_sections_partition_grid(shape, axis):
    axis %= shape.d
    seen = []
    for v in range(1, shape.dims[axis] + 1):
        sec = grid.section(shape, axis, v)
        assert len(sec) == shape.cell_count // shape.dims[axis]
        seen.extend(sec)
    assert sorted(seen) == list(range(shape.cell_count))


def test_line_meets_own_axis_section_once():
    shape = GridShape((3, 3, 4))
    cells = set(line(shape, 2, (2, 2)))
    for v in range(1, 5):
        assert len(cells & grid.section(shape, 2, v)) == 1


def test_is_facial():
    shape = GridShape((3, 4, 5))
    assert is_facial(shape, 0, 1)
    assert is_facial(shape, 0, 3)
    assert not is_facial(shape, 0, 2)
    assert is_facial(shape, 2, 5)
    with pytest.raises(ValueError):
        is_facial(shape, 2, 6)


@given(shape_st)
def test_facial_cell_count(shape):
    # boundary cells = all minus the interior box
    facial = sum(
        1
        for cid in range(shape.cell_count)
        if any(is_facial(shape, a, decode(cid, shape)[a]) for a in range(shape.d))
    )
    interior = math.prod(max(n - 2, 0) for n in shape.dims)
    assert facial == shape.cell_count - interior


def test_project_drops_axis():
    shape = GridShape((3, 3, 3))
    cells = {encode((1, 2, 3), shape), encode((1, 2, 1), shape), encode((3, 1, 2), shape)}
    assert project(cells, shape, 2) == {(1, 2), (3, 1)}
    assert project(cells, shape, 0) == {(2, 3), (2, 1), (1, 2)}
    full = set(range(shape.cell_count))
    assert len(project(full, shape, 1)) == 9
