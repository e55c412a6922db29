"""Linear line complexes and the three-quadric G = K ∩ S.

A hyperplane S of P^5 is given by a covector ``U = (u, w)`` acting as
``u . omega + w . v``. S is tangent to K (a singular complex) iff
``u . w = 0``; otherwise G = K ∩ S is a smooth three-quadric and the
alpha/beta planes of K cut it in two families of lines.

The two reductions between point-plane incidences in P^3 and line-line
incidences in G live here, together with generic projection of lines from
P^4 to P^3 and the SL_2 chart of G.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, NamedTuple, Sequence

import numpy as np

from . import klein, projspace as ps
from .errors import (
    BudgetExceeded,
    FewerThanTwoRationalPoints,
    NotInG,
    SearchExhausted,
    SingularComplex,
    ValidationError,
)
from .ffield import check_modulus
from .linalg import combine, dot, nullspace, rank
from .projspace import Hyperplane, ProjLine, ProjPoint, normalize

Covector = tuple[int, ...]


# ------------------------------------------------------------ classification

class ComplexClass(NamedTuple):
    kind: Literal["regular", "singular"]
    tangency: klein.PlueckerVector | None = None


def complex_invariant(U: Sequence[int], p: int) -> int:
    """``u . w``; zero iff the covector lies on the dual Klein quadric."""
    return (U[0] * U[3] + U[1] * U[4] + U[2] * U[5]) % p


def classify_complex(U: Sequence[int], p: int) -> ComplexClass:
    """Regular iff ``u . w != 0``; a singular complex reports its tangency point.

    The tangent hyperplane of K at L = (omega : v) has covector (v, omega),
    so the tangency point of U = (u, w) is L = (w : u).
    """
    U = normalize(U, p)
    if complex_invariant(U, p):
        return ComplexClass("regular")
    return ComplexClass("singular", normalize(U[3:] + U[:3], p))


def apply_covector(U: Sequence[int], L: Sequence[int], p: int) -> int:
    return dot(U, L, p)


# ------------------------------------------------------------ null polarity

@dataclass(frozen=True)
class NullPolarity:
    """Nondegenerate skew 4x4 matrix A; the point q goes to the plane A q."""

    matrix: tuple[tuple[int, ...], ...]
    p: int

    def plane(self, q: ProjPoint) -> Hyperplane:
        return normalize([dot(row, q, self.p) for row in self.matrix], self.p)

    def is_invariant(self, line: ProjLine) -> bool:
        """Every point of the line is mapped to a plane containing the line."""
        a, b = line
        return dot(b, [dot(row, a, self.p) for row in self.matrix], self.p) == 0


def null_polarity_from(U: Sequence[int], p: int) -> NullPolarity:
    """Skew matrix whose invariant lines are the lines of the complex U.

    For the line q ^ u, ``u^T A q = -sum_{i<j} A_ij P_ij``. Matching this
    with ``u . omega + w . v`` in the storage order (P01, P02, P03, P23,
    P31, P12) fixes A01=u1, A02=u2, A03=u3, A23=w1, A13=-w2, A12=w3, and
    then the Pfaffian of A equals u . w.
    """
    U = normalize(U, p)
    if not complex_invariant(U, p):
        raise SingularComplex("a singular complex has no null polarity")
    u1, u2, u3, w1, w2, w3 = U
    upper = {(0, 1): u1, (0, 2): u2, (0, 3): u3, (2, 3): w1, (1, 3): -w2, (1, 2): w3}
    A = [[0] * 4 for _ in range(4)]
    for (i, j), x in upper.items():
        A[i][j] = x % p
        A[j][i] = -x % p
    return NullPolarity(tuple(tuple(r) for r in A), p)


# ---------------------------------------------------------------- G and lines

@dataclass(frozen=True)
class ThreeQuadricG:
    covector: Covector
    p: int
    chart: str | None = None

    def __post_init__(self):
        U = normalize(self.covector, self.p)
        object.__setattr__(self, "covector", U)
        if not complex_invariant(U, self.p):
            raise SingularComplex(f"covector {U} defines a singular complex")

    def contains(self, L: Sequence[int]) -> bool:
        return klein.on_klein(L, self.p) and dot(self.covector, L, self.p) == 0

    def contains_line(self, line: ProjLine) -> bool:
        a, b = line
        return self.contains(a) and self.contains(b) and klein.reciprocal_product(a, b, self.p) == 0

    def hyperplane_basis(self) -> list[tuple[int, ...]]:
        """Basis of S whose coordinates are read off at the free columns."""
        return nullspace([self.covector], 6, self.p)

    def coordinates(self, L: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a point of S in P^4 (w.r.t. :meth:`hyperplane_basis`)."""
        lead = next(i for i, x in enumerate(self.covector) if x)
        return tuple(x for i, x in enumerate(L) if i != lead)

    def line_in_p4(self, line: ProjLine) -> ProjLine:
        return ps.line_from_rows([self.coordinates(line.r0), self.coordinates(line.r1)], self.p)


@dataclass(frozen=True)
class GLine:
    """A line of G; ``kind``/``source`` record the alpha or beta plane it came from."""

    carrier: ProjLine
    kind: Literal["alpha", "beta", "free"]
    source: tuple[int, ...] | None = None

    def points(self, p: int) -> list[tuple[int, ...]]:
        return ps.points_on_line(self.carrier, p)


def _cut(basis: Sequence[Sequence[int]], U: Sequence[int], p: int) -> ProjLine:
    """Intersect the projective plane spanned by ``basis`` with the hyperplane U."""
    vals = [dot(U, b, p) for b in basis]
    coeffs = nullspace([vals], len(basis), p)
    if len(coeffs) != 2:
        raise ValidationError("the plane lies inside S; S must be regular")
    return ps.line_from_rows([combine(c, basis, p) for c in coeffs], p)


def restrict_to_g(G: ThreeQuadricG, obj: Sequence[int], kind: Literal["alpha", "beta"]) -> GLine:
    """Line of G cut out by the alpha plane of a point or the beta plane of a plane."""
    p = G.p
    if kind == "alpha":
        plane = klein.alpha_plane(obj, p)
    elif kind == "beta":
        plane = klein.beta_plane(obj, p)
    else:
        raise ValidationError(f"kind must be 'alpha' or 'beta', got {kind!r}")
    return GLine(_cut(plane.basis, G.covector, p), kind, normalize(obj, p))


def glines_meet(a: GLine | ProjLine, b: GLine | ProjLine, p: int) -> bool:
    """Carriers share an F_p-point."""
    la = a.carrier if isinstance(a, GLine) else a
    lb = b.carrier if isinstance(b, GLine) else b
    return ps.lines_meet(la, lb, p)


def count_line_intersections(lines: Sequence[GLine | ProjLine], p: int, ordered: bool = True) -> int:
    """Pairs of distinct lines sharing an F_p-point (ordered pairs by default)."""
    n = 0
    for a, b in itertools.combinations(lines, 2):
        if glines_meet(a, b, p):
            n += 1
    return 2 * n if ordered else n


def count_cross_incidences(alpha: Sequence[GLine], beta: Sequence[GLine], p: int) -> int:
    return sum(1 for a in alpha for b in beta if glines_meet(a, b, p))


# -------------------------------------------------- point-plane -> line-line

@dataclass(frozen=True)
class Reduction:
    G: ThreeQuadricG
    alpha: tuple[GLine, ...]
    beta: tuple[GLine, ...]
    draws: int
    incidences: int


def _constraints(points: Sequence[ProjPoint], planes: Sequence[Hyperplane], p: int):
    avoid = []
    for a, b in itertools.combinations(points, 2):
        avoid.append(klein.klein_map(ps.line_from_points(a, b, p), p))
    for a, b in itertools.combinations(planes, 2):
        avoid.append(klein.klein_map(ps.plane_meet(a, b, p), p))
    pencils = []
    for q in points:
        for pi in planes:
            if ps.incident(q, pi, p):
                pencils.append(klein.pencil(q, pi, p))
    return avoid, pencils


def default_draw_budget(m: int, n: int) -> int:
    return 10 * (m * m + n * n + m * n)


def find_transverse_covector(points: Sequence[ProjPoint], planes: Sequence[Hyperplane], p: int,
                             seed: int = 0, max_draws: int | None = None,
                             batch: int = 4096) -> tuple[Covector, int]:
    """Seeded rejection sampling of an admissible covector U.

    U must be regular, avoid every point where two same-type planes of K
    meet, and contain none of the pencil lines of incident pairs. Draws are
    consumed in a fixed order, so the result depends only on ``seed``.
    Returns (U, number of draws used).
    """
    m, n = len(points), len(planes)
    if max_draws is None:
        max_draws = max(default_draw_budget(m, n), 1)
    avoid, pencils = _constraints(points, planes, p)
    X = np.array(avoid, dtype=np.int64).reshape(-1, 6)
    PA = np.array([pl.r0 for pl in pencils], dtype=np.int64).reshape(-1, 6)
    PB = np.array([pl.r1 for pl in pencils], dtype=np.int64).reshape(-1, 6)
    rng = np.random.default_rng(seed)
    used = 0
    while used < max_draws:
        size = min(batch, max_draws - used)
        U = rng.integers(0, p, size=(size, 6), dtype=np.int64)
        ok = U.any(axis=1)
        ok &= (U[:, :3] * U[:, 3:]).sum(axis=1) % p != 0
        if len(X):
            ok &= ((U @ X.T) % p != 0).all(axis=1)
        if len(PA):
            ok &= ~(((U @ PA.T) % p == 0) & ((U @ PB.T) % p == 0)).any(axis=1)
        hits = np.flatnonzero(ok)
        if len(hits):
            i = int(hits[0])
            return normalize([int(x) for x in U[i]], p), used + i + 1
        used += size
    raise SearchExhausted(
        f"no admissible covector in {max_draws} draws (m={m}, n={n}, p={p}); "
        "over a small field the finitely many constraints may cover all of P^5*")


def reduce_incidence(points: Sequence[ProjPoint], planes: Sequence[Hyperplane], p: int,
                     seed: int = 0, max_draws: int | None = None, verify: bool = True) -> Reduction:
    """Turn a point-plane arrangement into two families of lines in some G.

    On success the lines of each family are pairwise disjoint and the number
    of alpha-beta pairs sharing a point equals |I(P, Pi)|.
    """
    check_modulus(p)
    points = [normalize(q, p) for q in points]
    planes = [normalize(pi, p) for pi in planes]
    U, draws = find_transverse_covector(points, planes, p, seed, max_draws)
    G = ThreeQuadricG(U, p)
    alpha = tuple(restrict_to_g(G, q, "alpha") for q in points)
    beta = tuple(restrict_to_g(G, pi, "beta") for pi in planes)
    I = sum(1 for q in points for pi in planes if ps.incident(q, pi, p))
    if verify:
        for fam in (alpha, beta):
            for a, b in itertools.combinations(fam, 2):
                if glines_meet(a, b, p):
                    raise AssertionError("same-family lines meet after reduction")
        if count_cross_incidences(alpha, beta, p) != I:
            raise AssertionError("line-line incidences differ from point-plane incidences")
    return Reduction(G, alpha, beta, draws, I)


# -------------------------------------------------- line-line -> point-plane

@dataclass(frozen=True)
class Conversion:
    points: tuple[ProjPoint, ...]
    planes: tuple[Hyperplane, ...]


def pencil_of(line: ProjLine, p: int) -> tuple[ProjPoint, Hyperplane]:
    """The (point, plane) of the plane pencil represented by a line in K."""
    l1 = klein.klein_preimage(line.r0, p)
    l2 = klein.klein_preimage(line.r1, p)
    rel = ps.line_line_relation(l1, l2, p)
    if rel.kind != "meet":
        raise ValidationError("the line is not contained in K")
    q = rel.point
    third = next(x for x in l2.rows() if not ps.line_contains(l1, x, p))
    return q, ps.plane_through(l1.r0, l1.r1, third, p)


def convert_lines(G: ThreeQuadricG, lines: Iterable[GLine | ProjLine]) -> Conversion:
    """n lines of G -> n points and n planes with q_i on pi_i.

    The number of ordered pairs of distinct input lines sharing a point
    equals |I(P, Pi)| - n.
    """
    p = G.p
    points, planes = [], []
    for lam in lines:
        carrier = lam.carrier if isinstance(lam, GLine) else lam
        if rank(carrier.rows(), p) < 2:
            raise FewerThanTwoRationalPoints("carrier does not span a line")
        if not G.contains_line(carrier):
            raise NotInG(f"{carrier} is not contained in G")
        q, pi = pencil_of(carrier, p)
        points.append(q)
        planes.append(pi)
    return Conversion(tuple(points), tuple(planes))


# ------------------------------------------------------ projection to P^3

@dataclass(frozen=True)
class Projection:
    center: ProjPoint
    images: tuple[ProjLine, ...]

    def project_point(self, x: Sequence[int], p: int) -> ProjPoint:
        return normalize(_project(x, self.center, p), p)


def _project(x: Sequence[int], c: Sequence[int], p: int) -> list[int]:
    i = next(k for k, v in enumerate(c) if v)  # c is normalized, c[i] == 1
    t = x[i]
    return [(x[k] - t * c[k]) % p for k in range(len(c)) if k != i]


def _sieve_block(hyper: np.ndarray, M: np.ndarray, p: int) -> np.ndarray:
    """Affine points (1, a, b, z) of the 3-space spanned by the columns of M
    (in that order) that avoid every hyperplane in ``hyper``."""
    alive = np.ones((p, p, p), dtype=bool)
    H = (hyper @ M) % p  # restricted linear forms h0 + h1 a + h2 b + h3 z
    ar = np.arange(p, dtype=np.int64)
    A, B = np.meshgrid(ar, ar, indexing="ij")
    for h0, h1, h2, h3 in H.tolist():
        if h3:
            z = (-(h0 + h1 * A + h2 * B) * pow(h3, -1, p)) % p
            alive[A, B, z] = False
        elif h2:
            b = (-(h0 + h1 * ar) * pow(h2, -1, p)) % p
            alive[ar, b, :] = False
        elif h1:
            alive[(-h0 * pow(h1, -1, p)) % p, :, :] = False
        elif h0 == 0:
            alive[:] = False
    return alive


def project_to_p3(lines: Sequence[ProjLine], p: int, seed: int = 0, max_blocks: int = 8) -> Projection:
    """Project lines of P^4 from a centre that keeps every meet/skew relation.

    The centre must avoid each line, each plane spanned by a meeting pair
    and each 3-space spanned by a skew pair. The 3-space conditions are
    sieved over seeded random projective 3-spaces; the rest are checked on
    the survivors.
    """
    lines = list(lines)
    if any(len(l.r0) != 5 for l in lines):
        raise ValidationError("project_to_p3 takes lines of P^4")
    if len(set(lines)) != len(lines):
        raise ValidationError("lines must be pairwise distinct")
    hyper, planes = [], []
    for a, b in itertools.combinations(lines, 2):
        rows = a.rows() + b.rows()
        ns = nullspace(rows, 5, p)
        if len(ns) == 1:
            hyper.append(ns[0])
        else:
            planes.append(rows)
    hyper_arr = np.array(hyper, dtype=np.int64).reshape(-1, 5)
    rng = np.random.default_rng(seed)
    for _ in range(max_blocks):
        while True:
            M = rng.integers(0, p, size=(5, 4), dtype=np.int64)
            if rank(M.T.tolist(), p) == 4:
                break
        alive = _sieve_block(hyper_arr, M, p) if len(hyper) else np.ones((p, p, p), dtype=bool)
        for a, b, z in np.argwhere(alive).tolist():
            c = normalize((M @ np.array([1, a, b, z], dtype=np.int64) % p).tolist(), p)
            if any(ps.line_contains(l, c, p) for l in lines):
                continue
            if any(rank(rows + [c], p) == 3 for rows in planes):
                continue
            images = tuple(ps.line_from_rows([_project(r, c, p) for r in l.rows()], p) for l in lines)
            return Projection(c, images)
    raise SearchExhausted(f"no admissible projection centre found in {max_blocks} sieved 3-spaces")


# ------------------------------------------------------------- SL_2 chart

SL2_COVECTOR: Covector = (0, 0, 1, 0, 0, -1)  # S: P03 = P12


class SL2Line(NamedTuple):
    points: tuple[tuple[int, int, int, int], ...]
    base: tuple[int, int, int, int]
    direction: tuple[int, int, int, int]


def sl2_embed_raw(g: Sequence[int], p: int) -> list[int]:
    """[[a, b], [c, d]] -> (a, b, 1, -d, c, 1): affine-linear in the entries."""
    a, b, c, d = g
    return [a % p, b % p, 1, -d % p, c % p, 1]


def sl2_embed(g: Sequence[int], p: int) -> klein.PlueckerVector:
    """Point of G with P03 = P12 = 1; det g = 1 is exactly the Klein relation.

    In chart coordinates (x1, x2, y1, y2) = (a, b, d, c) the image is the
    quadric x1 y1 - x2 y2 = 1.
    """
    return normalize(sl2_embed_raw(g, p), p)


def sl2_elements(p: int, budget: int | None = ps.DEFAULT_BUDGET) -> list[tuple[int, int, int, int]]:
    if budget is not None and p ** 3 > budget:
        raise BudgetExceeded(f"|SL_2(F_{p})| ~ p^3 exceeds the budget {budget}")
    return [(a, b, c, d) for a in range(p) for b in range(p) for c in range(p) for d in range(p)
            if (a * d - b * c) % p == 1]


def _mat(g, h, p):
    a, b, c, d = g
    e, f, x, y = h
    return ((a * e + b * x) % p, (a * f + b * y) % p, (c * e + d * x) % p, (c * f + d * y) % p)


def _affine_line(base, direction, p) -> SL2Line:
    pts = tuple(sorted(tuple((x + t * v) % p for x, v in zip(base, direction)) for t in range(p)))
    d = normalize(direction, p)
    return SL2Line(pts, pts[0], d)


def sl2_lines(p: int, budget: int | None = ps.DEFAULT_BUDGET) -> list[SL2Line]:
    """Every affine line of F_p^4 contained in SL_2(F_p).

    det(g + t v) = 1 for all t forces v = g n with n nilpotent, so the lines
    through g are g(I + t n) for the p+1 nilpotent directions
    n = [[c1 c2, -c1^2], [c2^2, -c1 c2]].
    """
    if budget is not None and p ** 4 > budget:
        raise BudgetExceeded(f"line enumeration in SL_2(F_{p}) exceeds the budget {budget}")
    nilpotents = [((c1 * c2) % p, (-c1 * c1) % p, (c2 * c2) % p, (-c1 * c2) % p)
                  for c1, c2 in [(1, t) for t in range(p)] + [(0, 1)]]
    seen = {}
    for g in sl2_elements(p, budget):
        for n in nilpotents:
            line = _affine_line(g, _mat(g, n, p), p)
            seen.setdefault(line.points, line)
    return [seen[k] for k in sorted(seen)]


@dataclass(frozen=True)
class SL2Chart:
    G: ThreeQuadricG
    elements: tuple[tuple[int, int, int, int], ...]
    lines: tuple[SL2Line, ...]

    def embed(self, g: Sequence[int]) -> klein.PlueckerVector:
        return sl2_embed(g, self.G.p)

    def carrier(self, line: SL2Line) -> ProjLine:
        """Projective closure of an affine chart line as a line of G in P^5."""
        p = self.G.p
        return ps.line_from_rows([sl2_embed_raw(line.points[0], p), sl2_embed_raw(line.points[1], p)], p)


def sl2_chart(p: int, budget: int | None = ps.DEFAULT_BUDGET) -> SL2Chart:
    check_modulus(p)
    G = ThreeQuadricG(SL2_COVECTOR, p, chart="sl2")
    return SL2Chart(G, tuple(sl2_elements(p, budget)), tuple(sl2_lines(p, budget)))


def line_union_cover(lines: Iterable[SL2Line], p: int) -> tuple[int, Fraction]:
    """Size of the union of the given chart lines, and its fraction of p^3."""
    union = set()
    for line in lines:
        union.update(line.points)
    return len(union), Fraction(len(union), p ** 3)
