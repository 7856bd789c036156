from collections import Counter

import pytest

from dismantler import constructions as C
from dismantler.constructions import (
    BoxPlacement,
    TriangularFamily,
    corner_peeling_trace,
    corridor,
    counting_identity,
    cuboid_fixtures,
    cyclic_base,
    cyclic_solution_trace,
    diagonal_peeling_trace,
    heap_of_oranges,
    hexagonal_board,
    imperfect_solution_order4,
    is_checkerboard_monochromatic,
    level_permuted_cyclic,
    lower_triangular_base,
    nested_heap,
    nested_hexagon,
    plane_value,
    shifted_cyclic_base,
    shifted_cyclic_trace,
    staircase_trace,
    tb_layer,
    tet,
    tri,
    triangular_set,
    upper_triangular_base,
)
from dismantler.engine import is_solution, trace_end, verify_trace
from dismantler.grid import GridShape
from dismantler.position import Position, is_base_position, is_perfect, min_black

# -- counting ------------------------------------------------------------------


def test_triangle_and_pyramid_numbers():
    assert [tri(m) for m in range(6)] == [0, 1, 3, 6, 10, 15]
    assert [tet(m) for m in range(6)] == [0, 1, 4, 10, 20, 35]
    for m in range(1, 12):
        assert tri(m) == tri(m - 1) + m
        assert tet(m) == tet(m - 1) + tri(m)


@pytest.mark.parametrize("n", range(2, 11))
def test_counting_identity(n):
    # tet(n) + 4 tet(n-1) + tet(n-2) = n^3, and the set version behind it
    assert counting_identity(n)
    assert tet(n) + 4 * tet(n - 1) + tet(n - 2) == n**3


# -- triangular families ----------------------------------------------------------


def test_triangular_base_sizes_and_planes():
    n = 5
    for m in range(1, n + 1):
        u = upper_triangular_base(n, m)
        assert len(u) == tri(m)
        assert {plane_value(c) for c in u} == {m + 1 - n}
    for m in range(0, n):
        low = lower_triangular_base(n, m)
        assert len(low) == tri(m)
        if m:
            assert {plane_value(c) for c in low} == {2 * n - m}
    assert lower_triangular_base(n, 0) == frozenset()


def test_tb_layer():
    assert len(tb_layer(5, 1)) == tri(3)
    assert len(tb_layer(5, 2)) == tri(1)
    assert {plane_value(c) for c in tb_layer(5, 1)} == {2}
    with pytest.raises(ValueError):
        tb_layer(5, 0)
    with pytest.raises(ValueError):
        tb_layer(5, 3)


def test_heap_of_oranges():
    n = 5
    for m in range(1, n + 1):
        heap = heap_of_oranges(n, m)
        assert len(heap) == tet(m)
        # m consecutive planes, one triangle per plane
        planes = Counter(plane_value(c) for c in heap)
        assert len(planes) == m
        assert sorted(planes.values()) == sorted(tri(i) for i in range(1, m + 1))


NESTED_HEAP_SIZES = {2: 4, 3: 11, 4: 23, 5: 42, 6: 69}


@pytest.mark.parametrize("n", sorted(NESTED_HEAP_SIZES))
def test_nested_heap_sizes(n):
    assert len(nested_heap(n)) == NESTED_HEAP_SIZES[n]


@pytest.mark.parametrize("n", range(2, 8))
def test_nested_heap_is_the_closure_of_the_top_triangle(n):
    # grow the top-plane triangle both ways by the three-support rule; the
    # result must match the nested heap exactly
    utb = upper_triangular_base(n, n)
    out = set(utb)
    cur, c = utb, 1
    while True:
        cur = C._layer_up(n, cur, c)
        if not cur:
            break
        out |= cur
        c += 1
    cur, c = utb, 1
    while True:
        cur = C._layer_down(n, cur, c)
        if not cur:
            break
        out |= cur
        c -= 1
    assert frozenset(out) == nested_heap(n)


def test_hexagonal_board():
    for n in (3, 4, 5, 6):
        for s in range(1, n):
            hb = hexagonal_board(n, s)
            assert len(hb) == n * n - tri(n - s) - tri(s - 1)
            assert {plane_value(c) for c in hb} == {n + 1 - s}
    with pytest.raises(ValueError):
        hexagonal_board(5, 0)
    with pytest.raises(ValueError):
        hexagonal_board(5, 5)


def test_nested_hexagon_oracle():
    dnh = nested_hexagon(5, 2)
    assert len(dnh) == 53
    assert hexagonal_board(5, 2) <= dnh
    planes = Counter(plane_value(c) for c in dnh)
    assert dict(planes) == {2: 3, 3: 10, 4: 18, 5: 12, 6: 7, 7: 3}
    assert sorted(c for c in dnh if plane_value(c) == 2) == [(2, 3, 3), (3, 2, 3), (3, 3, 4)]


def test_triangular_set_dispatcher():
    assert triangular_set("utb", n=5, m=5) == upper_triangular_base(5, 5)
    assert triangular_set("ltb", n=5, m=3) == lower_triangular_base(5, 3)
    assert triangular_set("tb", n=5, m=3) == tb_layer(5, 1)
    assert triangular_set("ho", n=5, m=2) == heap_of_oranges(5, 2)
    assert triangular_set("nho", n=5) == nested_heap(5)
    assert triangular_set("hb", n=5, s=2) == hexagonal_board(5, 2)
    assert triangular_set("dnh", n=5, s=2) == nested_hexagon(5, 2)
    with pytest.raises(ValueError):
        triangular_set("tb", n=5, m=2)  # parity: (n - m) must be even
    with pytest.raises(ValueError):
        triangular_set("pyramid", n=5)


def test_box_placement():
    ident = BoxPlacement((0, 1, 2), (False, False, False), (0, 0, 0), 5)
    cells = nested_heap(5)
    assert {ident.apply(c) for c in cells} == set(cells)
    shifted = BoxPlacement((0, 1, 2), (False, False, False), (1, 1, 1), 5)
    moved = {shifted.apply(c) for c in cells}
    assert {tuple(x - 1 for x in c) for c in moved} == set(cells)
    fam = TriangularFamily("nho", 5, None, None, shifted)
    assert set(fam.cells()) == moved
    flip = BoxPlacement((1, 0, 2), (True, False, False), (0, 0, 0), 5)
    flipped = {flip.apply(c) for c in cells}
    assert len(flipped) == len(cells)
    assert all(1 <= x <= 5 for c in flipped for x in c)


# -- cyclic bases ------------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 8))
def test_cyclic_base_is_a_base_position(n):
    base = cyclic_base(n)
    assert base.black_count == n * n
    assert is_base_position(base)
    assert is_perfect(base)
    # black cells lie on every n-th diagonal plane
    assert all((plane_value(c) - 1) % n == 0 for c in base.black_coords())


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_checkerboard_parity(n):
    # all cells of one checkerboard colour exactly when the order is even
    assert is_checkerboard_monochromatic(cyclic_base(n)) == (n % 2 == 0)


def test_shifted_cyclic_bases():
    for n in (3, 4, 5):
        assert shifted_cyclic_base(n, 0) == cyclic_base(n)
        for s in range(1, n):
            pos = shifted_cyclic_base(n, s)
            assert is_base_position(pos)
            assert all((plane_value(c) - (1 - s)) % n == 0 for c in pos.black_coords())


def test_level_permuted_cyclic():
    assert level_permuted_cyclic(4, (1, 2, 3, 4)) == cyclic_base(4)
    scrambled = level_permuted_cyclic(4, (1, 3, 2, 4))
    assert is_base_position(scrambled)
    assert not is_solution(scrambled)  # most level orders break the greedy run
    assert is_solution(level_permuted_cyclic(4, (2, 1, 4, 3)))
    with pytest.raises(ValueError):
        level_permuted_cyclic(4, (1, 1, 2, 3))


# -- explicit traces ---------------------------------------------------------------


def test_diagonal_peeling_from_full():
    full = Position.full(GridShape((4, 4, 4)))
    trace = diagonal_peeling_trace(full, (1, 4, 1), (0, -1, 0), (0, 0, 1), 3)
    assert len(trace) == tri(3)
    verify_trace(trace)


def test_staircase_drills_a_prism():
    full = Position.full(GridShape((3, 3, 3)))
    trace = staircase_trace(full, (1, 3, 1), (0, -1, 0), (0, 0, 1), (1, 0, 0), 2, 2)
    assert len(trace) == 2 * tri(2)
    verify_trace(trace)


@pytest.mark.parametrize("n", range(2, 7))
def test_corner_peeling_trace(n):
    trace = corner_peeling_trace(n)
    assert trace.direction == "dismantling"
    assert trace.start.is_full()
    assert len(trace) == 3 * tet(n - 1)
    end = verify_trace(trace)
    # what remains is the nested heap plus a disjoint placed copy of the
    # next smaller one
    nho = nested_heap(n)
    copy_size = 1 if n == 2 else len(nested_heap(n - 1))
    assert end.black_count == len(nho) + copy_size
    assert set(nho) <= set(end.black_coords())


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cyclic_solution_trace(n):
    trace = cyclic_solution_trace(n)
    assert trace.start.is_full()
    assert verify_trace(trace) == cyclic_base(n)
    assert len(trace) == n**3 - n**2


@pytest.mark.parametrize("n", [3, 4, 5])
def test_shifted_cyclic_traces(n):
    for s in range(n):
        trace = shifted_cyclic_trace(n, s)
        assert trace.start.is_full()
        assert verify_trace(trace) == shifted_cyclic_base(n, s)
        assert len(trace) == n**3 - n**2


# -- corridor squares -------------------------------------------------------------


@pytest.mark.parametrize("t", [1, 2, 3])
def test_corridor_solutions(t):
    pos = corridor(t)
    n = 2**t
    assert pos.shape == GridShape((n, n, n))
    assert is_base_position(pos)
    assert is_solution(pos)


def test_corridor_base_case_matches_cyclic():
    assert corridor(1) == cyclic_base(2)


# -- fixed example positions -------------------------------------------------------


def test_imperfect_solution_order4():
    pos = imperfect_solution_order4()
    assert is_base_position(pos)
    assert is_solution(pos)
    assert not is_perfect(pos)


def test_cuboid_fixtures():
    fixtures = cuboid_fixtures()
    assert {pos.shape.dims for pos in fixtures} == {(2, 2, 5), (2, 3, 6), (3, 3, 4)}
    for pos in fixtures:
        assert pos.black_count == min_black(pos.shape)
        assert is_base_position(pos)
        assert is_solution(pos)
