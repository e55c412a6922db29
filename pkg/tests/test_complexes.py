import itertools
import random

import pytest

from kleinlab import complexes as cx
from kleinlab import constructions as con
from kleinlab import klein
from kleinlab import projspace as ps
from kleinlab.errors import NotInG, SearchExhausted, SingularComplex, ValidationError
from kleinlab.linalg import dot


def test_classify_examples():
    assert cx.classify_complex((1, 0, 0, 1, 0, 0), 5).kind == "regular"
    c = cx.classify_complex((1, 0, 0, 0, 1, 0), 5)
    assert c.kind == "singular"
    assert klein.on_klein(c.tangency, 5)


def test_singular_covectors_form_dual_quadric_p3():
    p = 3
    covs = ps.enumerate_points(5, p)
    singular = [U for U in covs if cx.classify_complex(U, p).kind == "singular"]
    assert len(covs) == 364 and len(singular) == 130
    assert sorted(cx.classify_complex(U, p).tangency for U in singular) == klein.klein_points(p)


def test_singular_complex_is_lines_meeting_the_axis():
    p = 3
    lines = ps.enumerate_lines(3, p)
    for U in ps.enumerate_points(5, p)[::17]:
        c = cx.classify_complex(U, p)
        if c.kind != "singular":
            continue
        axis = klein.klein_preimage(c.tangency, p)
        in_complex = {l for l in lines if dot(U, klein.klein_map(l, p), p) == 0}
        assert in_complex == {l for l in lines if ps.lines_meet(l, axis, p)}


def test_null_polarity_exhaustive_p3():
    p = 3
    U = (1, 0, 0, 1, 0, 0)
    A = cx.null_polarity_from(U, p)
    for q in ps.enumerate_points(3, p):
        assert ps.incident(q, A.plane(q), p)
    lines = ps.enumerate_lines(3, p)
    invariant = {l for l in lines if A.is_invariant(l)}
    G = cx.ThreeQuadricG(U, p)
    on_g = {l for l in lines if G.contains(klein.klein_map(l, p))}
    assert invariant == on_g and len(on_g) == 40


def test_null_polarity_random_covectors():
    p = 7
    rng = random.Random(0)
    lines = ps.enumerate_lines(3, p)[::37]
    for _ in range(20):
        U = [rng.randrange(p) for _ in range(6)]
        if not any(U):
            continue
        if cx.classify_complex(U, p).kind == "singular":
            with pytest.raises(SingularComplex):
                cx.null_polarity_from(U, p)
            continue
        A = cx.null_polarity_from(U, p)
        for l in lines:
            assert A.is_invariant(l) == (dot(ps.normalize(U, p), klein.klein_map(l, p), p) == 0)


def test_restrict_to_g():
    p = 3
    G = cx.ThreeQuadricG((1, 0, 0, 1, 0, 0), p)
    pts = ps.enumerate_points(3, p)
    alphas = [cx.restrict_to_g(G, q, "alpha") for q in pts]
    betas = [cx.restrict_to_g(G, pi, "beta") for pi in pts]
    for gl in alphas + betas:
        assert G.contains_line(gl.carrier)
        assert len(gl.points(p)) == p + 1
    assert len({g.carrier for g in alphas}) == len(pts)
    assert len({g.carrier for g in betas}) == len(pts)
    for gl in betas:
        for L in gl.points(p):
            assert ps.line_in_plane(klein.klein_preimage(L, p), gl.source, p)
    with pytest.raises(ValidationError):
        cx.restrict_to_g(G, pts[0], "gamma")


def test_reduce_single_incidence():
    p = 101
    red = cx.reduce_incidence([(1, 0, 0, 0)], [(0, 0, 0, 1)], p, seed=1)
    assert red.incidences == 1
    assert cx.count_cross_incidences(red.alpha, red.beta, p) == 1


def test_reduce_small_field_is_infeasible():
    p = 3
    arr = con.random_arrangement(20, 20, p, seed=0)
    with pytest.raises(SearchExhausted):
        cx.reduce_incidence(arr.points, arr.planes, p, seed=0)
    # exhaustive oracle: no covector of P^5* satisfies all constraints
    avoid, pencils = cx._constraints(arr.points, arr.planes, p)
    admissible = [
        U for U in ps.enumerate_points(5, p)
        if cx.complex_invariant(U, p)
        and all(dot(U, X, p) for X in avoid)
        and not any(dot(U, l.r0, p) == 0 and dot(U, l.r1, p) == 0 for l in pencils)
    ]
    assert admissible == []


def test_reduce_is_deterministic():
    arr = con.random_arrangement(10, 10, 31, seed=5)
    a = cx.reduce_incidence(arr.points, arr.planes, 31, seed=2)
    b = cx.reduce_incidence(arr.points, arr.planes, 31, seed=2)
    assert a == b


def test_convert_single_and_pair():
    p = 5
    chart = cx.sl2_chart(p)
    carrier = chart.carrier(chart.lines[0])
    conv = cx.convert_lines(chart.G, [carrier])
    assert ps.incident(conv.points[0], conv.planes[0], p)
    # two chart lines through the identity meet there
    ident = (1, 0, 0, 1)
    through = [l for l in chart.lines if ident in l.points][:2]
    carriers = [chart.carrier(l) for l in through]
    conv = cx.convert_lines(chart.G, carriers)
    I = sum(ps.incident(q, pi, p) for q in conv.points for pi in conv.planes)
    assert cx.count_line_intersections(carriers, p) == 2 == I - 2
    assert cx.count_line_intersections(carriers, p, ordered=False) == 1


def test_convert_rejects_foreign_lines():
    p = 5
    chart = cx.sl2_chart(p)
    foreign = ps.line_from_rows([(1, 0, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0)], p)
    with pytest.raises(NotInG):
        cx.convert_lines(chart.G, [foreign])


def test_convert_then_reduce_round_trip():
    p = 101
    arr = con.random_arrangement(6, 6, p, seed=3)
    red = cx.reduce_incidence(arr.points, arr.planes, p, seed=3)
    lines = list(red.alpha[:4]) + list(red.beta[:4])
    conv = cx.convert_lines(red.G, lines)
    assert len(set(conv.points)) == len(set(conv.planes)) == len(lines)
    meets = cx.count_line_intersections(lines, p)
    back = cx.reduce_incidence(list(conv.points), list(conv.planes), p, seed=4)
    assert back.incidences == meets + len(lines)
    assert cx.count_cross_incidences(back.alpha, back.beta, p) == back.incidences


def test_projection_of_two_lines():
    p = 101
    skew = [ps.line_from_rows([(1, 0, 0, 0, 0), (0, 1, 0, 0, 0)], p),
            ps.line_from_rows([(0, 0, 1, 0, 0), (0, 0, 0, 1, 0)], p)]
    pr = cx.project_to_p3(skew, p)
    assert not ps.lines_meet(*pr.images, p)
    meeting = [skew[0], ps.line_from_rows([(1, 0, 0, 0, 0), (0, 0, 1, 1, 0)], p)]
    pr = cx.project_to_p3(meeting, p)
    rel = ps.line_line_relation(*pr.images, p)
    assert rel == ("meet", pr.project_point((1, 0, 0, 0, 0), p))


def test_projection_preserves_relations_of_50_g_lines():
    p = 101
    arr = con.random_arrangement(25, 25, p, seed=7)
    red = cx.reduce_incidence(arr.points, arr.planes, p, seed=7)
    lines = [red.G.line_in_p4(g.carrier) for g in red.alpha + red.beta]
    pr = cx.project_to_p3(lines, p, seed=1)
    pairs = 0
    for (a, x), (b, y) in itertools.combinations(zip(lines, pr.images), 2):
        assert ps.lines_meet(a, b, p) == ps.lines_meet(x, y, p)
        pairs += 1
    assert pairs == 1225


def test_sl2_chart_basics():
    p = 3
    chart = cx.sl2_chart(p)
    assert len(chart.elements) == 24
    ident = chart.embed((1, 0, 0, 1))
    assert chart.G.contains(ident)
    a, b, c, d = 1, 0, 0, 1
    assert (a * d - b * c) % p == 1  # chart coordinates (a, b, d, c): x1 y1 - x2 y2
    for g in chart.elements:
        assert chart.G.contains(chart.embed(g))
    for line in chart.lines:
        assert chart.G.contains_line(chart.carrier(line))


@pytest.mark.parametrize("p", [3, 5])
def test_sl2_lines_match_brute_force(p):
    elements = set(cx.sl2_elements(p))
    found = set()
    for g in elements:
        for d in ps.enumerate_points(3, p):
            pts = tuple(sorted(tuple((x + t * v) % p for x, v in zip(g, d)) for t in range(p)))
            if set(pts) <= elements:
                found.add(pts)
    lines = cx.sl2_lines(p)
    assert sorted(found) == [l.points for l in lines]
    assert len(lines) == len(elements) * (p + 1) // p


def test_unipotent_cosets_are_lines():
    p = 3
    lines = {l.points for l in cx.sl2_lines(p)}
    for g in cx.sl2_elements(p):
        coset = tuple(sorted(cx._mat(g, (1, t, 0, 1), p) for t in range(p)))
        assert coset in lines


def test_line_union_cover():
    p = 5
    chart = cx.sl2_chart(p)
    assert cx.line_union_cover([], p) == (0, 0)
    size, frac = cx.line_union_cover(chart.lines, p)
    assert size == 120 and frac == cx.Fraction(120, 125)
