import itertools

import pytest
from hypothesis import given, settings, strategies as st

from kleinlab import applications as ap
from kleinlab import constructions as con
from kleinlab import klein
from kleinlab import projspace as ps
from kleinlab.errors import DegenerateCubic, InsufficientSpace, ModulusTooSmall, ValidationError
from kleinlab.ffield import next_prime


def _coprime_count(n):
    # inclusion-exclusion with the Moebius function
    def mu(k):
        res, x, d = 1, k, 2
        while d * d <= x:
            if x % d == 0:
                x //= d
                if x % d == 0:
                    return 0
                res = -res
            d += 1
        return -res if x > 1 else res
    return sum(mu(d) * (n // d) ** 2 for d in range(1, n + 1))


def test_coprime_grid():
    assert con.coprime_grid(2, 17) == [(1, 1), (1, 2), (2, 1)]
    assert con.coprime_grid(1, 5) == [(1, 1)]
    assert len(con.coprime_grid(10, 401)) == 63 == _coprime_count(10)
    with pytest.raises(ModulusTooSmall):
        con.coprime_grid(10, 397)


@pytest.mark.parametrize("n", [4, 8, 12])
def test_coprime_grid_distinct_directions(n):
    p = next_prime(4 * n * n + 1)
    S = con.coprime_grid(n, p)
    assert ap.distinct_directions(S, p)


def test_cubic_surface_p7():
    p = 7
    cs = con.cubic_surface_points(p)
    assert p * p - 12 * p <= len(cs.surface) <= p * p + 12 * p
    assert len(cs.lines) <= 27
    # every detected line lies on the surface
    surface = set(cs.surface)
    for base, d in cs.lines:
        assert all(tuple((b + t * x) % p for b, x in zip(base, d)) in surface for t in range(p))


@pytest.mark.parametrize("p", [11, 19])
def test_cubic_surface_remaining_points_no_four_collinear(p):
    cs = con.cubic_surface_points(p)
    assert len(cs.lines) <= 27
    pts = [(1,) + x for x in cs.points]
    assert ps.max_collinear(pts, p)[0] <= 3


def test_cubic_line_scan_matches_brute_force():
    p = 7
    cs = con.cubic_surface_points(p)
    surface = set(cs.surface)
    brute = set()
    for base in surface:
        for d in ps.enumerate_points(2, p):
            pts = [tuple((b + t * x) % p for b, x in zip(base, d)) for t in range(p)]
            if all(q in surface for q in pts):
                brute.add((min(pts), d))
    # over F_7 a cubic vanishing at all p points of a line vanishes on the line
    assert brute == set(cs.lines)


def test_cubic_containing_plane():
    # (x - 1)(x^2 + y^2 + z^2 + 1) contains the plane x = 1
    coeffs = {(3, 0, 0): 1, (1, 2, 0): 1, (1, 0, 2): 1, (1, 0, 0): 1,
              (2, 0, 0): -1, (0, 2, 0): -1, (0, 0, 2): -1, (0, 0, 0): -1}
    with pytest.raises(DegenerateCubic):
        con.cubic_surface_points(7, coeffs)


def test_isotropic_directions():
    d5 = con.isotropic_directions(5)
    assert len(d5) == 6 and (1, 2, 0) in d5
    assert len(con.isotropic_directions(3)) == 4
    for p in (3, 5, 7, 11, 13):
        ds = con.isotropic_directions(p)
        assert len(ds) == p + 1
        assert all(con.norm2(d, p) == 0 for d in ds)


def test_semi_isotropic_grid():
    p = 5
    assert con.norm2((1, 2, 0), p) == 0
    g = con.semi_isotropic_grid(1, 5, 13)
    census = ap.distance_census(g.points, 13)
    assert census.values == {0}
    g = con.semi_isotropic_grid(3, 10, 31)
    assert len(g.points) == len(set(g.points)) == 30
    assert con.norm2(g.e1, 31) == 0 and con.norm2(g.e2, 31) != 0
    assert sum(a * b for a, b in zip(g.e1, g.e2)) % 31 == 0
    assert len(ap.distance_census(g.points, 31).values) <= 2 * 3 + 1


@pytest.mark.parametrize("k,l,p", [(2, 4, 7), (3, 10, 11), (4, 9, 13), (5, 5, 17)])
def test_semi_isotropic_distances_come_from_offsets(k, l, p):
    g = con.semi_isotropic_grid(k, l, p)
    c = con.norm2(g.e2, p)
    expected = {(i * i * c) % p for i in range(k)}
    assert ap.distance_census(g.points, p).values == expected


def test_isotropic_regulus():
    p = 5
    for lam in (1, 2):
        lines = con.isotropic_regulus(lam, p)
        assert len(lines) == p + 1
        dirs = set(con.isotropic_directions(p))
        for l in lines:
            omega = klein.split(klein.klein_map(l, p))[0]
            assert ps.normalize(omega, p) in dirs
            for x in ps.points_on_line(l, p):
                if x[0]:
                    q = ps.normalize(x, p)[1:]
                    assert (con.norm2(q, p) + lam * lam) % p == 0
        for a, b in itertools.combinations(lines, 2):
            assert not ps.lines_meet(a, b, p)


def test_random_arrangement():
    p = 101
    arr = con.random_arrangement(0, 5, p, seed=0)
    assert arr.m == 0
    clustered = con.random_arrangement(20, 40, p, seed=3, mode="clustered", k_target=10)
    assert ps.max_collinear(clustered.planes, p, "planes")[0] == 10
    assert con.random_arrangement(20, 40, p, seed=3).to_json() == con.random_arrangement(20, 40, p, seed=3).to_json()
    with pytest.raises(InsufficientSpace):
        con.random_arrangement(41, 1, 3, seed=0)
    with pytest.raises(InsufficientSpace):
        con.random_arrangement(5, 5, p, seed=0, mode="clustered", k_target=6)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 40), st.integers(0, 40), st.integers(0, 2 ** 32))
def test_random_arrangement_properties(m, n, seed):
    arr = con.random_arrangement(m, n, 7, seed=seed)
    assert (arr.m, arr.n) == (m, n)
    assert arr.points == sorted(set(arr.points))


def test_construction_spec_dispatch():
    assert con.ConstructionSpec("coprime_grid", {"n": 2, "p": 17}).build() == [(1, 1), (1, 2), (2, 1)]
    arr = con.ConstructionSpec("random_arrangement", {"m": 3, "n": 2, "p": 7}, seed=4).build()
    assert arr == con.random_arrangement(3, 2, 7, seed=4)
    assert len(con.ConstructionSpec("isotropic_cone", {"p": 5}).build()) == 6
    with pytest.raises(ValidationError):
        con.ConstructionSpec("no_such_construction", {}).build()
    with pytest.raises(ValidationError):
        con.ConstructionSpec("coprime_grid", {"n": 2, "p": 17, "k": 1}).build()


def test_points_csv():
    assert con.points_csv([(1, 2), (3, 4)]) == "x0,x1\n1,2\n3,4\n"
