"""Plücker coordinates and the Klein quadric K in P^5.

A Plücker vector is a normalized 6-tuple ``(P01, P02, P03, P23, P31, P12)``.
Its first half is the direction part ``omega`` and its second half the
moment part ``v``; K is the quadric ``omega . v = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import projspace as ps
from .errors import DegenerateConic, NotMutuallySkew, NotOnKleinQuadric, ValidationError
from .ffield import field as prime_field
from .linalg import combine, det, nullspace, rref, span_intersection
from .projspace import ProjLine, ProjPoint, Hyperplane, normalize

PlueckerVector = tuple[int, ...]

# index pairs (i, j) behind each Plücker slot, in storage order
PLUECKER_INDEX = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))


def pluecker_raw(q: Sequence[int], u: Sequence[int], p: int) -> list[int]:
    """Unnormalized ``P_ij = q_i u_j - q_j u_i`` in storage order."""
    return [(q[i] * u[j] - q[j] * u[i]) % p for i, j in PLUECKER_INDEX]


def klein_map(line: ProjLine, p: int) -> PlueckerVector:
    if len(line.r0) != 4:
        raise ValidationError("klein_map takes a line of P^3")
    return normalize(pluecker_raw(line.r0, line.r1, p), p)


def klein_form(L: Sequence[int], p: int) -> int:
    """``P01 P23 + P02 P31 + P03 P12``; zero exactly on K."""
    return (L[0] * L[3] + L[1] * L[4] + L[2] * L[5]) % p


def on_klein(L: Sequence[int], p: int) -> bool:
    return klein_form(L, p) == 0


def reciprocal_product(L: Sequence[int], M: Sequence[int], p: int) -> int:
    """Polar form of K. Only its vanishing is representative-independent."""
    return (L[0] * M[3] + L[1] * M[4] + L[2] * M[5] + M[0] * L[3] + M[1] * L[4] + M[2] * L[5]) % p


def lines_meet(L: Sequence[int], M: Sequence[int], p: int) -> bool:
    """For L, M on K: True iff the underlying lines of P^3 meet (or coincide)."""
    return reciprocal_product(L, M, p) == 0


def split(L: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``(omega, v)`` halves of a Plücker vector."""
    return tuple(L[:3]), tuple(L[3:])


def pluecker_matrix(L: Sequence[int], p: int) -> list[list[int]]:
    """Skew 4x4 matrix M with M[i][j] = P_ij."""
    M = [[0] * 4 for _ in range(4)]
    for (i, j), x in zip(PLUECKER_INDEX, L):
        M[i][j] = x % p
        M[j][i] = -x % p
    return M


def klein_preimage(L: Sequence[int], p: int) -> ProjLine:
    """The line of P^3 whose Klein image is ``L``.

    For L = q ^ u the matrix ``q u^T - u q^T`` has column space span(q, u),
    so its rows (the matrix is skew) span the line.
    """
    if len(L) != 6 or not any(x % p for x in L):
        raise ValidationError("expected a nonzero 6-vector")
    if not on_klein(L, p):
        raise NotOnKleinQuadric(f"{tuple(L)} does not satisfy the Klein relation")
    return ps.line_from_rows(pluecker_matrix(L, p), p)


def klein_points(p: int, budget: int | None = ps.DEFAULT_BUDGET) -> list[PlueckerVector]:
    """All F_p-points of K, by scanning P^5 (an oracle independent of klein_map)."""
    return [L for L in ps.enumerate_points(5, p, budget) if on_klein(L, p)]


def span_points(basis: Sequence[Sequence[int]], p: int) -> list[tuple[int, ...]]:
    """All rational points of the projective span of linearly independent ``basis``."""
    k = len(basis)
    return sorted({normalize(combine(c, basis, p), p) for c in ps.enumerate_points(k - 1, p, None)})


# ------------------------------------------------------------ rulings of K

@dataclass(frozen=True)
class AlphaPlane:
    """Klein image of the star of lines through ``point``."""

    point: ProjPoint
    basis: tuple[PlueckerVector, ...]

    def points(self, p: int) -> list[PlueckerVector]:
        return span_points(self.basis, p)


@dataclass(frozen=True)
class BetaPlane:
    """Klein image of the lines lying in ``plane``."""

    plane: Hyperplane
    basis: tuple[PlueckerVector, ...]

    def points(self, p: int) -> list[PlueckerVector]:
        return span_points(self.basis, p)


def alpha_plane(q: ProjPoint, p: int) -> AlphaPlane:
    q = normalize(q, p)
    lead = next(i for i, x in enumerate(q) if x)
    basis = []
    for j in range(4):
        if j != lead:
            e = [0] * 4
            e[j] = 1
            basis.append(normalize(pluecker_raw(q, e, p), p))
    return AlphaPlane(q, tuple(basis))


def beta_plane(pi: Hyperplane, p: int) -> BetaPlane:
    pi = normalize(pi, p)
    b = nullspace([pi], 4, p)
    basis = tuple(normalize(pluecker_raw(b[i], b[j], p), p) for i, j in ((0, 1), (0, 2), (1, 2)))
    return BetaPlane(pi, basis)


def pencil(q: ProjPoint, pi: Hyperplane, p: int) -> ProjLine | None:
    """Line ``alpha(q) ∩ beta(pi)`` of P^5, or None when q is not on pi."""
    inter = span_intersection(alpha_plane(q, p).basis, beta_plane(pi, p).basis, p)
    if not inter:
        return None
    if len(inter) != 2:
        raise AssertionError("alpha and beta planes meet in a point or a line only")
    return ProjLine(tuple(inter[0]), tuple(inter[1]))


def plane_intersection(basis1: Sequence[Sequence[int]], basis2: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Reduced basis of the intersection of two projective subspaces of P^5."""
    return span_intersection(basis1, basis2, p)


# ---------------------------------------------------------------- reguli

@dataclass(frozen=True)
class Regulus:
    """Lines meeting three mutually skew lines, with their Klein images.

    ``plane`` is a basis of the projective 2-plane of P^5 cut out by the
    three incidence conditions; ``members`` are its points on K.
    """

    defining: tuple[ProjLine, ProjLine, ProjLine]
    plane: tuple[PlueckerVector, ...]
    members: tuple[PlueckerVector, ...] = field(default=())

    def lines(self, p: int) -> list[ProjLine]:
        return [klein_preimage(L, p) for L in self.members]


def _restricted_form(basis: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Gram matrix of the reciprocal product on ``basis`` (twice the Klein form)."""
    return [[reciprocal_product(a, b, p) for b in basis] for a in basis]


def _conic_points(gram: list[list[int]], p: int) -> list[tuple[int, int, int]]:
    """Projective solutions of x^T G x = 0 for a symmetric 3x3 G.

    Solves the chart (a : b : 1) as a quadratic in b for each a, then the
    line c = 0 directly; O(p) square roots instead of a plane scan.
    """
    F = prime_field(p)
    (g00, g01, g02), (_, g11, g12), (_, _, g22) = gram
    inv2 = F.inv(2)
    # q(a, b, c) = (g00 a^2 + g11 b^2 + g22 c^2)/2 + g01 ab + g02 ac + g12 bc
    h00, h11, h22 = g00 * inv2 % p, g11 * inv2 % p, g22 * inv2 % p
    sols = set()
    for a in range(p):
        # A b^2 + B b + C with c = 1
        A = h11
        B = (g01 * a + g12) % p
        C = (h00 * a * a + g02 * a + h22) % p
        if A == 0:
            if B:
                sols.add((a, -C * F.inv(B) % p, 1))
            elif C == 0:
                sols.update((a, b, 1) for b in range(p))
            continue
        disc = (B * B - 4 * A * C) % p
        for r in F.sqrt(disc):
            sols.add((a, (-B + r) * F.inv(2 * A) % p, 1))
    # c = 0: points (a : 1 : 0) and (1 : 0 : 0)
    for a in range(p):
        if (h00 * a * a + g01 * a + h11) % p == 0:
            sols.add((a, 1, 0))
    if h00 == 0:
        sols.add((1, 0, 0))
    return sorted(normalize(s, p) for s in sols)


def _linear_factors(gram: list[list[int]], p: int) -> list[tuple[int, ...]]:
    """Rational lines contained in a degenerate conic (as coefficient triples)."""
    pts = _conic_points(gram, p)
    factors = set()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            (line,) = nullspace([pts[i], pts[j]], 3, p)
            on = [x for x in pts if sum(a * b for a, b in zip(x, line)) % p == 0]
            if len(on) == p + 1:
                factors.add(normalize(line, p))
    return sorted(factors)


def regulus_through(l1: ProjLine, l2: ProjLine, l3: ProjLine, p: int) -> Regulus:
    """The regulus of lines meeting three mutually skew lines of P^3."""
    lines = (l1, l2, l3)
    for a, b in ((l1, l2), (l1, l3), (l2, l3)):
        if ps.lines_meet(a, b, p):
            raise NotMutuallySkew("the defining lines must be pairwise skew")
    Ls = [klein_map(l, p) for l in lines]
    # X with reciprocal_product(L_i, X) = 0: row i is L_i with halves swapped
    conditions = [list(L[3:]) + list(L[:3]) for L in Ls]
    plane = nullspace(conditions, 6, p)
    if len(plane) != 3:
        raise AssertionError("skew lines give independent Plücker vectors")
    plane = [tuple(r) for r in rref(plane, p)[0]]
    gram = _restricted_form(plane, p)
    if det(gram, p) == 0:
        factors = _linear_factors(gram, p)
        raise DegenerateConic("the plane section of K is a degenerate conic", factors)
    members = tuple(sorted(normalize(combine(c, plane, p), p) for c in _conic_points(gram, p)))
    return Regulus(lines, tuple(plane), members)


def reciprocal_regulus(reg: Regulus, p: int) -> Regulus:
    """The regulus of lines meeting every member of ``reg`` (the opposite ruling)."""
    if len(reg.members) < 3:
        raise ValidationError("need at least three members")
    first = reg.lines(p)[:3]
    return regulus_through(*first, p)

