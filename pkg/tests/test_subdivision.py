from fractions import Fraction

import pytest

from chrotop.errors import NotChromatic, UnknownVertex, UnsupportedCoarsening
from chrotop.simplicial import Complex, Simplex, Vertex
from chrotop.subdivision import (
    TerminatingSubdivision,
    cell_contained,
    cell_of_word,
    chr_iterate,
    chr_subdivision,
    coordinates,
    diameter_Dk,
    edge_position,
    facet_children,
    geometric_simplex,
    ordered_partitions,
    partial_chr_step,
    policy_all_at_zero,
    policy_never,
    prefix_policy,
    volume_by_base_facet,
    wrap_simplex,
)

R, L, B = ((0,), (1,)), ((1,), (0,)), ((0, 1),)


def standard_simplex(n):
    return Complex([Simplex(Vertex(i, i) for i in range(n))])


EDGE = standard_simplex(2)
TRIANGLE = standard_simplex(3)


# independent oracle: ordered set partitions both counted by recurrence and
# enumerated brute-force over block assignments
def fubini(n):
    from math import comb

    if n == 0:
        return 1
    return sum(comb(n, k) * fubini(n - k) for k in range(1, n + 1))


def brute_force_ordered_partitions(items):
    items = list(items)
    if not items:
        return [()]
    out = []
    from itertools import combinations

    def rec(remaining):
        if not remaining:
            return [()]
        result = []
        rem = sorted(remaining)
        for r in range(1, len(rem) + 1):
            for block in combinations(rem, r):
                for tail in rec([x for x in rem if x not in block]):
                    result.append((block,) + tail)
        return result

    return rec(items)


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 13), (4, 75)])
def test_ordered_partition_counts(n, count):
    listed = list(ordered_partitions(range(n)))
    assert len(listed) == count == fubini(n)
    assert set(listed) == set(brute_force_ordered_partitions(range(n)))
    assert len(set(listed)) == len(listed)


def test_chr_edge():
    K = chr_subdivision(EDGE)
    assert len(K.facets) == 3
    assert len(K.vertices()) == 4


def test_chr_triangle():
    K = chr_subdivision(TRIANGLE)
    assert len(K.facets) == 13
    assert len(K.vertices()) == 12


def test_chr_single_vertex():
    point = standard_simplex(1)
    K = chr_subdivision(point)
    assert len(K.facets) == 1
    (v,) = K.vertices()
    assert v.color == 0 and isinstance(v.label, Simplex)


def test_chr_iterate_counts():
    assert len(chr_iterate(EDGE, 2).facets) == 9
    assert len(chr_iterate(EDGE, 2).vertices()) == 10
    assert len(chr_iterate(TRIANGLE, 2).facets) == 169
    assert chr_iterate(EDGE, 0) is EDGE or chr_iterate(EDGE, 0).facets == EDGE.facets


def test_chr_requires_chromatic():
    bad = Complex([Simplex([Vertex(0, "x"), Vertex(0, "y")])])
    with pytest.raises(NotChromatic):
        chr_subdivision(bad)


def test_chromaticity_preserved():
    K = chr_iterate(TRIANGLE, 2)
    assert K.is_chromatic()
    assert K.is_pure()
    for f in K.facets:
        assert f.colors() == {0, 1, 2}


def test_coordinates_examples():
    K = chr_subdivision(EDGE)
    pts = {v: coordinates(v, EDGE) for v in K.vertices()}
    corner0, corner1 = EDGE.vertices()
    for v, pt in pts.items():
        assert sum(pt.weights.values()) == 1
    solo = next(v for v in K.vertices() if v.label.colors() == {0})
    assert coordinates(solo, EDGE).weight(corner0) == 1
    both0 = next(v for v in K.vertices() if v.color == 0 and len(v.label) == 2)
    assert coordinates(both0, EDGE).weight(corner0) == Fraction(1, 3)
    assert coordinates(both0, EDGE).weight(corner1) == Fraction(2, 3)


def test_depth2_coordinates_compose():
    K2 = chr_iterate(EDGE, 2)
    for v in K2.vertices():
        pt = coordinates(v, EDGE)
        assert sum(pt.weights.values()) == 1
        # agreement with direct evaluation through one explicit level
        carrier = v.label
        m = len(carrier)
        own, other = Fraction(1, 2 * m - 1), Fraction(2, 2 * m - 1)
        acc = {}
        for u in carrier:
            w = own if u.color == v.color else other
            for b, q in coordinates(u, EDGE).weights.items():
                acc[b] = acc.get(b, Fraction(0)) + w * q
        assert acc == pt.weights


def test_unknown_vertex_raises():
    other_base = Complex([Simplex([Vertex(0, "u"), Vertex(1, "w")])])
    v = chr_subdivision(EDGE).vertices()[0]
    with pytest.raises(UnknownVertex):
        coordinates(v, other_base)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_diameter_law_on_edge(k):
    assert diameter_Dk(EDGE, k) == Fraction(1, 3**k)


def test_diameters_strictly_decrease():
    values = [diameter_Dk(EDGE, k) for k in range(5)]
    assert all(a > b for a, b in zip(values, values[1:]))
    tri = [diameter_Dk(TRIANGLE, k) for k in range(3)]
    assert all(a > b for a, b in zip(tri, tri[1:]))


@pytest.mark.parametrize("base,k", [(EDGE, 1), (EDGE, 2), (EDGE, 3), (TRIANGLE, 1), (TRIANGLE, 2)])
def test_volume_soundness(base, k):
    totals = volume_by_base_facet(chr_iterate(base, k), base)
    assert all(total == 1 for total in totals.values())


def test_partial_step_everything_terminated():
    K = chr_subdivision(EDGE)
    out = partial_chr_step(K, K)
    assert out.facets == tuple(sorted((wrap_simplex(f) for f in K.facets), key=lambda s: s.key))


def test_partial_step_nothing_terminated_matches_chr():
    out = partial_chr_step(EDGE, None)
    assert out.facets == chr_subdivision(EDGE).facets
    assert len(out.facets) == 3


def test_partial_step_left_terminated():
    K = chr_subdivision(EDGE)
    left = min(
        K.facets,
        key=lambda f: min(edge_position(p, EDGE) for p in geometric_simplex(f, EDGE)),
    )
    out = partial_chr_step(K, Complex([left]))
    assert len(out.facets) == 7


def test_partial_step_rejects_terminated_interior_edge():
    K = chr_subdivision(TRIANGLE)
    # terminate one edge of a live facet
    facet = K.facets[0]
    edge = Simplex(list(facet.vertices)[:2])
    with pytest.raises(UnsupportedCoarsening):
        partial_chr_step(K, Complex([edge]))


def test_geometric_containment_examples():
    K1 = chr_subdivision(EDGE)
    K2 = chr_iterate(EDGE, 2)

    def leftmost(K):
        return min(
            K.facets,
            key=lambda f: min(edge_position(p, EDGE) for p in geometric_simplex(f, EDGE)),
        )

    left1, left2 = leftmost(K1), leftmost(K2)
    central2 = sorted(
        K2.facets,
        key=lambda f: min(edge_position(p, EDGE) for p in geometric_simplex(f, EDGE)),
    )[4]
    assert cell_contained(left1, left1, EDGE)
    assert cell_contained(left2, left1, EDGE)
    assert not cell_contained(central2, left1, EDGE)


def test_geometric_containment_triangle():
    K = chr_subdivision(TRIANGLE)
    base_facet = TRIANGLE.facets[0]
    for f in K.facets:
        assert cell_contained(f, base_facet, TRIANGLE)


def test_stable_complex_policies():
    ts_all = TerminatingSubdivision(EDGE, policy_all_at_zero)
    stable = ts_all.stable_complex(0)
    pts = sorted(edge_position(v.label, EDGE) for v in stable.vertices())
    assert pts == [0, 1]

    ts_never = TerminatingSubdivision(EDGE, policy_never)
    ts_never.materialize(3)
    assert ts_never.stable_complex(3) is None


def test_m1_policy_stable_cells():
    policy = prefix_policy({1: [(R,)], 2: [(L, s) for s in (R, B, L)]})
    ts = TerminatingSubdivision(EDGE, policy)
    stable = ts.stable_complex(2)
    assert len(stable.facets) == 4
    intervals = sorted(
        tuple(sorted(edge_position(v.label, EDGE) for v in f)) for f in stable.facets
    )
    assert intervals == [
        (Fraction(0), Fraction(1, 3)),
        (Fraction(2, 3), Fraction(7, 9)),
        (Fraction(7, 9), Fraction(8, 9)),
        (Fraction(8, 9), Fraction(1)),
    ]


def test_stable_inclusion_across_depths():
    policy = prefix_policy({1: [(R,)], 2: [(L, s) for s in (R, B, L)]})
    ts = TerminatingSubdivision(EDGE, policy)
    ts.materialize(3)
    s1 = {f for f in ts.stable_complex(1).facets}
    s3 = {f for f in ts.stable_complex(3).facets}
    assert s1 <= s3


def test_cell_of_word_matches_prefix_navigation():
    base_facet = EDGE.facets[0]
    cell = cell_of_word(base_facet, (R, L))
    positions = sorted(edge_position(p, EDGE) for p in geometric_simplex(cell, EDGE))
    assert positions == [Fraction(2, 9), Fraction(1, 3)]


def test_schedule_children_count():
    children = facet_children(TRIANGLE.facets[0])
    assert len(children) == 13
    for child in children.values():
        assert child.colors() == {0, 1, 2}


def test_base_mismatch_between_realizations():
    from chrotop.errors import BaseMismatch
    from chrotop.subdivision import geometric_distance

    other = Complex([Simplex([Vertex(0, "u"), Vertex(1, "w")])])
    p = coordinates(chr_subdivision(EDGE).vertices()[0], EDGE)
    q = coordinates(other.vertices()[0], other)
    with pytest.raises(BaseMismatch):
        geometric_distance(p, q)


def test_policy_output_validated():
    from chrotop.errors import InvalidTermination

    stray = Simplex([Vertex(0, "nope")])
    with pytest.raises(InvalidTermination):
        TerminatingSubdivision(EDGE, lambda k, level, ts: [stray])
