"""Projective spaces P^d(F_p): points, hyperplanes and lines.

Points and hyperplanes are plain int tuples normalized so that the first
nonzero coordinate is 1; two vectors are the same projective object iff
their normalized tuples are equal. Lines are stored as the 2-row reduced
echelon basis of the underlying 2-dimensional subspace (:class:`ProjLine`),
which is likewise a unique hashable key. The same line type is used in
P^3, P^4 and P^5.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Iterable, Literal, NamedTuple, Sequence

from .errors import BudgetExceeded, DimensionMismatch, IdenticalPoints, TooFewObjects, ValidationError
from .linalg import nullspace, rank, rref

ProjPoint = tuple[int, ...]
Hyperplane = tuple[int, ...]

DEFAULT_BUDGET = 5_000_000


def normalize(v: Sequence[int], p: int) -> tuple[int, ...]:
    """Canonical representative: reduce mod p, scale the first nonzero entry to 1."""
    v = [x % p for x in v]
    for x in v:
        if x:
            if x == 1:
                return tuple(v)
            inv = pow(x, -1, p)
            return tuple(y * inv % p for y in v)
    raise ValidationError("the zero vector is not a projective point")


def is_normalized(v: Sequence[int], p: int) -> bool:
    for x in v:
        if not 0 <= x < p:
            return False
    for x in v:
        if x:
            return x == 1
    return False


def incident(q: ProjPoint, pi: Hyperplane, p: int) -> bool:
    """True iff the point ``q`` lies on the hyperplane ``pi``."""
    if len(q) != len(pi):
        raise DimensionMismatch(f"point has {len(q)} coordinates, hyperplane {len(pi)}")
    return sum(a * b for a, b in zip(q, pi)) % p == 0


class ProjLine(NamedTuple):
    """A projective line, as the reduced echelon basis of its 2-dim subspace."""

    r0: tuple[int, ...]
    r1: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.r0) - 1

    def rows(self) -> list[tuple[int, ...]]:
        return [self.r0, self.r1]


LineP3 = ProjLine


def line_from_rows(rows: Sequence[Sequence[int]], p: int) -> ProjLine:
    """Line spanned by ``rows``; the rows must span a 2-dimensional subspace."""
    red, _ = rref(rows, p)
    if len(red) != 2:
        raise ValidationError(f"rows span a subspace of dimension {len(red)}, not 2")
    return ProjLine(tuple(red[0]), tuple(red[1]))


def line_from_points(q: ProjPoint, u: ProjPoint, p: int) -> ProjLine:
    if len(q) != len(u):
        raise DimensionMismatch("points live in different dimensions")
    red, _ = rref([q, u], p)
    if len(red) < 2:
        raise IdenticalPoints(f"{q} and {u} are the same projective point")
    return ProjLine(tuple(red[0]), tuple(red[1]))


def line_contains(line: ProjLine, x: Sequence[int], p: int) -> bool:
    return rank([line.r0, line.r1, x], p) == 2


def points_on_line(line: ProjLine, p: int) -> list[ProjPoint]:
    """The p+1 rational points of ``line`` in lexicographic order."""
    a, b = line
    pts = [normalize(b, p)]
    pts += [normalize([x + t * y for x, y in zip(a, b)], p) for t in range(p)]
    return sorted(pts)


def plane_meet(pi1: Hyperplane, pi2: Hyperplane, p: int) -> ProjLine:
    """Common line of two distinct planes of P^3."""
    if len(pi1) != 4 or len(pi2) != 4:
        raise DimensionMismatch("plane_meet is defined for planes of P^3")
    basis = nullspace([pi1, pi2], 4, p)
    if len(basis) != 2:
        raise IdenticalPoints("the two planes coincide")
    return line_from_rows(basis, p)


def line_in_plane(line: ProjLine, pi: Hyperplane, p: int) -> bool:
    return incident(line.r0, pi, p) and incident(line.r1, pi, p)


def planes_through_line(line: ProjLine, p: int) -> list[Hyperplane]:
    """The p+1 planes of P^3 containing ``line``, lexicographically."""
    dual = line_from_rows(nullspace(line.rows(), 4, p), p)
    return points_on_line(dual, p)


def plane_through(a: ProjPoint, b: ProjPoint, c: ProjPoint, p: int) -> Hyperplane:
    basis = nullspace([a, b, c], 4, p)
    if len(basis) != 1:
        raise ValidationError("points are collinear")
    return normalize(basis[0], p)


def dual_line(line: ProjLine, p: int) -> ProjLine:
    """The line of P^3* formed by the planes through ``line``."""
    return line_from_rows(nullspace(line.rows(), len(line.r0), p), p)


# ---------------------------------------------------------------- enumeration

def count_points(d: int, p: int) -> int:
    return (p ** (d + 1) - 1) // (p - 1)


def count_lines(d: int, p: int) -> int:
    # Gaussian binomial [d+1 choose 2]_p
    return (p ** (d + 1) - 1) * (p ** d - 1) // ((p ** 2 - 1) * (p - 1))


def point_from_index(index: int, d: int, p: int) -> ProjPoint:
    """Inverse of the lexicographic ranking used by :func:`enumerate_points`."""
    if not 0 <= index < count_points(d, p):
        raise IndexError(index)
    # blocks by pivot position, last pivot first: 1, p, p^2, ...
    for lead in range(d, -1, -1):
        size = p ** (d - lead)
        if index < size:
            tail = []
            for _ in range(d - lead):
                index, r = divmod(index, p)
                tail.append(r)
            return (0,) * lead + (1,) + tuple(reversed(tail))
        index -= size
    raise AssertionError("unreachable")


def point_index(q: ProjPoint, p: int) -> int:
    d = len(q) - 1
    lead = next(i for i, x in enumerate(q) if x)
    offset = sum(p ** (d - j) for j in range(lead + 1, d + 1))
    val = 0
    for x in q[lead + 1:]:
        val = val * p + x
    return offset + val


def _check_budget(n: int, budget: int | None, what: str):
    if budget is not None and n > budget:
        raise BudgetExceeded(f"enumerating {n} {what} exceeds the budget of {budget}")


def enumerate_points(d: int, p: int, budget: int | None = DEFAULT_BUDGET) -> list[ProjPoint]:
    """All points of P^d(F_p) in lexicographic order of normalized coordinates."""
    _check_budget(count_points(d, p), budget, "points")
    out = []
    for lead in range(d, -1, -1):
        for tail in itertools.product(range(p), repeat=d - lead):
            out.append((0,) * lead + (1,) + tail)
    return out


def enumerate_hyperplanes(d: int, p: int, budget: int | None = DEFAULT_BUDGET) -> list[Hyperplane]:
    return enumerate_points(d, p, budget)


def enumerate_lines(d: int, p: int, budget: int | None = DEFAULT_BUDGET) -> list[ProjLine]:
    """All lines of P^d(F_p), lexicographic in their echelon bases."""
    _check_budget(count_lines(d, p), budget, "lines")
    n = d + 1
    out = []
    for c0, c1 in itertools.combinations(range(n), 2):
        # row 0: 1 at c0, zeros at c1 and before c0; free elsewhere
        free0 = [j for j in range(c0 + 1, n) if j != c1]
        free1 = list(range(c1 + 1, n))
        for v0 in itertools.product(range(p), repeat=len(free0)):
            r0 = [0] * n
            r0[c0] = 1
            for j, x in zip(free0, v0):
                r0[j] = x
            for v1 in itertools.product(range(p), repeat=len(free1)):
                r1 = [0] * n
                r1[c1] = 1
                for j, x in zip(free1, v1):
                    r1[j] = x
                out.append(ProjLine(tuple(r0), tuple(r1)))
    out.sort()
    return out


def enumerate_space(space: Literal["points", "hyperplanes", "lines"], d: int, p: int,
                    budget: int | None = DEFAULT_BUDGET) -> list:
    if space == "points":
        return enumerate_points(d, p, budget)
    if space == "hyperplanes":
        return enumerate_hyperplanes(d, p, budget)
    if space == "lines":
        return enumerate_lines(d, p, budget)
    raise ValidationError(f"unknown space {space!r}")


# ------------------------------------------------------------ line relations

class LineRelation(NamedTuple):
    kind: Literal["equal", "meet", "skew"]
    point: ProjPoint | None = None


def line_line_relation(l1: ProjLine, l2: ProjLine, p: int) -> LineRelation:
    if len(l1.r0) != len(l2.r0):
        raise DimensionMismatch("lines live in different dimensions")
    if l1 == l2:
        return LineRelation("equal")
    rows = [l1.r0, l1.r1, l2.r0, l2.r1]
    r = rank(rows, p)
    if r == 4:
        return LineRelation("skew")
    # a*r0 + b*r1 = c*s0 + d*s1; the kernel is one-dimensional
    n = len(l1.r0)
    system = [[l1.r0[i], l1.r1[i], -l2.r0[i] % p, -l2.r1[i] % p] for i in range(n)]
    (a, b, _, _), = nullspace(system, 4, p)
    return LineRelation("meet", normalize([a * x + b * y for x, y in zip(l1.r0, l1.r1)], p))


def lines_meet(l1: ProjLine, l2: ProjLine, p: int) -> bool:
    """True iff the lines share at least one point (equal lines included)."""
    return rank([l1.r0, l1.r1, l2.r0, l2.r1], p) <= 3


# -------------------------------------------------------------- collinearity

def collinear_groups(objects: Sequence[Sequence[int]], p: int,
                     kind: Literal["points", "planes"] = "points") -> dict[ProjLine, set[int]]:
    """Map each line carrying at least two of ``objects`` to their indices.

    For ``kind="planes"`` the objects are planes of P^3 and the key is the
    common line in P^3 (the planes through it form a collinear family of
    the dual space).
    """
    objs = [normalize(o, p) for o in objects]
    if len(set(objs)) != len(objs):
        raise ValidationError("duplicate objects")
    join = line_from_points if kind == "points" else plane_meet
    groups: dict[ProjLine, set[int]] = {}
    n = len(objs)
    for i in range(n):
        local: dict[ProjLine, list[int]] = defaultdict(list)
        for j in range(i + 1, n):
            local[join(objs[i], objs[j], p)].append(j)
        # the first index to see a line is its smallest member, so the
        # group is complete the first time it is recorded
        for line, js in local.items():
            if line not in groups:
                groups[line] = {i, *js}
    return groups


def max_collinear(objects: Sequence[Sequence[int]], p: int,
                  kind: Literal["points", "planes"] = "points") -> tuple[int, ProjLine]:
    """Largest number of objects on a common line, with a witness line.

    Points: most points on one line. Planes (of P^3): most planes through one
    common line. Ties are broken by the smallest line key.
    """
    if len(objects) < 2:
        raise TooFewObjects("max_collinear needs at least two objects")
    groups = collinear_groups(objects, p, kind)
    line, g = min(groups.items(), key=lambda item: (-len(item[1]), item[0]))
    return len(g), line


def collinearity(objects: Sequence[Sequence[int]], p: int, kind: Literal["points", "planes"] = "points",
                 exclude: Iterable[ProjLine] = ()) -> int:
    """Max collinear count that tolerates small inputs and forbidden lines.

    Any single object lies on lines outside a finite forbidden set, so the
    result is 1 for one object and 0 for none.
    """
    if len(objects) == 0:
        return 0
    if len(objects) == 1:
        return 1
    exclude = set(exclude)
    groups = collinear_groups(objects, p, kind)
    return max([len(g) for line, g in groups.items() if line not in exclude], default=1)
