"""Generators for the explicit configurations: extremal grids, cubic
surfaces, semi-isotropic grids, isotropic cones and reguli, and seeded
random arrangements."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Literal, Sequence

from . import klein, projspace as ps
from .errors import DegenerateCubic, InsufficientSpace, ModulusTooSmall, ValidationError
from .ffield import check_modulus, field
from .incidence import Arrangement
from .projspace import ProjLine, normalize

Point3 = tuple[int, int, int]


def coprime_grid(n: int, p: int) -> list[tuple[int, int]]:
    """{(a, b) : 1 <= a, b <= n, gcd(a, b) = 1} embedded in F_p^2.

    Needs p > 4 n^2 so the integer dot products (at most 2 n^2) and their
    differences never wrap around.
    """
    check_modulus(p)
    if p <= 4 * n * n:
        raise ModulusTooSmall(f"coprime_grid({n}) needs p > {4 * n * n}, got {p}")
    return [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if math.gcd(a, b) == 1]


# ------------------------------------------------------------ cubic surface

DIAGONAL_CUBIC = {(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1, (0, 0, 0): -1}


def _eval(poly, x, p):
    total = 0
    for (i, j, k), c in poly.items():
        total += c * pow(x[0], i, p) * pow(x[1], j, p) * pow(x[2], k, p)
    return total % p


def _pmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _restrict(poly, base, direction, p) -> list[int]:
    """Coefficients in t of poly(base + t * direction)."""
    lin = [[b % p, d % p] for b, d in zip(base, direction)]
    out = [0] * 4
    for exps, c in poly.items():
        term = [c % p]
        for coord, e in zip(lin, exps):
            for _ in range(e):
                term = _pmul(term, coord, p)
        for i, x in enumerate(term):
            out[i] = (out[i] + x) % p
    return out


@dataclass(frozen=True)
class CubicSurface:
    p: int
    surface: tuple[Point3, ...]
    lines: tuple[tuple[Point3, Point3], ...]  # (base point, normalized direction)
    points: tuple[Point3, ...]  # surface minus the points of its lines


def _line_points(base, direction, p):
    return sorted(tuple((b + t * d) % p for b, d in zip(base, direction)) for t in range(p))


def cubic_surface_points(p: int, coefficients: dict | None = None) -> CubicSurface:
    """Affine points of a cubic surface in F_p^3 with its lines removed.

    Lines are found by scanning, for every surface point, every direction and
    testing that the restricted cubic vanishes identically as a polynomial
    in the line parameter.
    """
    check_modulus(p)
    if p < 5:
        raise ValidationError("cubic_surface_points needs p >= 5")
    poly = dict(DIAGONAL_CUBIC if coefficients is None else coefficients)
    if any(sum(e) > 3 for e in poly):
        raise ValidationError("polynomial has degree above 3")
    surface = sorted(x for x in itertools.product(range(p), repeat=3) if _eval(poly, x, p) == 0)
    directions = ps.enumerate_points(2, p)
    lines = {}
    for s in surface:
        for d in directions:
            if not any(_restrict(poly, s, d, p)):
                pts = _line_points(s, d, p)
                lines.setdefault((pts[0], d), pts)
    _reject_planes(poly, lines, p)
    on_lines = set()
    for pts in lines.values():
        on_lines.update(pts)
    remaining = tuple(x for x in surface if x not in on_lines)
    return CubicSurface(p, tuple(surface), tuple(sorted(lines)), remaining)


def _reject_planes(poly, lines, p):
    """Raise DegenerateCubic if two coplanar lines span a plane inside the surface."""
    keys = list(lines)
    checked = set()
    for (b1, d1), (b2, d2) in itertools.combinations(keys, 2):
        diff = [(x - y) % p for x, y in zip(b2, b1)]
        normal = _cross(d1, d2, p)
        if not any(normal):
            normal = _cross(d1, diff, p)
            if not any(normal):
                continue
        elif sum(a * b for a, b in zip(normal, diff)) % p:
            continue  # skew lines
        normal = normalize(normal, p)
        offset = sum(a * b for a, b in zip(normal, b1)) % p
        if (normal, offset) in checked:
            continue
        checked.add((normal, offset))
        u, v = d1, (d2 if any(_cross(d1, d2, p)) else diff)
        if all(_eval(poly, [(b + s * x + t * y) % p for b, x, y in zip(b1, u, v)], p) == 0
               for s in range(p) for t in range(p)):
            raise DegenerateCubic(f"the surface contains the plane {normal}.x = {offset}")


def _cross(a, b, p):
    return ((a[1] * b[2] - a[2] * b[1]) % p, (a[2] * b[0] - a[0] * b[2]) % p, (a[0] * b[1] - a[1] * b[0]) % p)


def affine_to_projective(x: Sequence[int]) -> tuple[int, ...]:
    return (1, *x)


# ---------------------------------------------------------- isotropic geometry

def norm2(x: Sequence[int], p: int) -> int:
    return sum(a * a for a in x) % p


def isotropic_directions(p: int) -> list[tuple[int, int, int]]:
    """Projective solutions of x^2 + y^2 + z^2 = 0, a smooth conic with p+1 points."""
    check_modulus(p)
    return [d for d in ps.enumerate_points(2, p) if norm2(d, p) == 0]


def isotropic_vector(p: int) -> tuple[int, int, int]:
    """(a, b, 1) with a^2 + b^2 = -1, from the least two-square decomposition."""
    a, b = field(p).sum_two_squares(-1)
    return (a, b, 1)


@dataclass(frozen=True)
class SemiIsotropicGrid:
    points: tuple[Point3, ...]
    e1: Point3
    e2: Point3


def semi_isotropic_frame(p: int, e1: Sequence[int] | None = None) -> tuple[Point3, Point3]:
    """Isotropic e1 and a non-isotropic e2 orthogonal to it."""
    e1 = tuple(x % p for x in (isotropic_vector(p) if e1 is None else e1))
    if norm2(e1, p) or not any(e1):
        raise ValidationError(f"{e1} is not a nonzero isotropic vector")
    from .linalg import nullspace
    v1, v2 = nullspace([e1], 3, p)
    for c1, c2 in ps.enumerate_points(1, p):
        e2 = tuple((c1 * x + c2 * y) % p for x, y in zip(v1, v2))
        if norm2(e2, p):
            return e1, e2
    raise AssertionError("the orthogonal complement of an isotropic vector is not totally isotropic")


def semi_isotropic_grid(k: int, l: int, p: int, e1: Sequence[int] | None = None) -> SemiIsotropicGrid:
    """k rows of l points on parallel isotropic lines, offsets 0..k-1 along e2."""
    check_modulus(p)
    if not 1 <= k <= l:
        raise ValidationError("need 1 <= k <= l")
    if l > p:
        raise ValidationError(f"at most p={p} points fit on a line")
    e1, e2 = semi_isotropic_frame(p, e1)
    pts = tuple(tuple((i * a + j * b) % p for a, b in zip(e2, e1)) for i in range(k) for j in range(l))
    return SemiIsotropicGrid(pts, e1, e2)


def isotropic_regulus(lam: int, p: int) -> list[ProjLine]:
    """Lines with Plücker form (omega : lam * omega), omega isotropic."""
    check_modulus(p)
    lam %= p
    if lam == 0:
        raise ValidationError("lambda must be nonzero (lambda = 0 is the isotropic cone)")
    out = []
    for w in isotropic_directions(p):
        L = normalize(list(w) + [lam * x for x in w], p)
        out.append(klein.klein_preimage(L, p))
    return out


# ------------------------------------------------------- random arrangements

def random_arrangement(m: int, n: int, p: int, seed: int = 0,
                       mode: Literal["generic", "clustered"] = "generic",
                       k_target: int | None = None) -> Arrangement:
    """Seeded duplicate-free arrangement in P^3(F_p).

    ``clustered`` plants ``k_target`` planes through one random line and
    fills the remaining planes generically (avoiding that line).
    """
    check_modulus(p)
    total = ps.count_points(3, p)
    if m < 0 or n < 0 or m > total or n > total:
        raise InsufficientSpace(f"P^3(F_{p}) has {total} points and planes; asked for m={m}, n={n}")
    rng = random.Random(seed)
    points = [ps.point_from_index(i, 3, p) for i in sorted(rng.sample(range(total), m))]
    if mode == "generic":
        planes = [ps.point_from_index(i, 3, p) for i in sorted(rng.sample(range(total), n))]
        return Arrangement(p, points, planes)
    if mode != "clustered":
        raise ValidationError(f"unknown mode {mode!r}")
    if k_target is None or not 1 <= k_target <= min(n, p + 1):
        raise InsufficientSpace(f"k_target must lie in [1, min(n, p+1)] = [1, {min(n, p + 1)}]")
    i, j = rng.sample(range(total), 2)
    line = ps.line_from_points(ps.point_from_index(i, 3, p), ps.point_from_index(j, 3, p), p)
    pencil = ps.planes_through_line(line, p)
    chosen = set(rng.sample(pencil, k_target))
    blocked = set(pencil)
    while len(chosen) < n:
        pi = ps.point_from_index(rng.randrange(total), 3, p)
        if pi not in blocked:
            chosen.add(pi)
            blocked.add(pi)
    return Arrangement(p, points, sorted(chosen))


# ------------------------------------------------------------- dispatching

BUILDERS = {
    "coprime_grid": (coprime_grid, ("n", "p")),
    "cubic_surface": (lambda p: cubic_surface_points(p).points, ("p",)),
    "semi_isotropic_grid": (lambda k, l, p: semi_isotropic_grid(k, l, p).points, ("k", "l", "p")),
    "isotropic_cone": (isotropic_directions, ("p",)),
    "isotropic_regulus": (isotropic_regulus, ("lam", "p")),
    "random_arrangement": (random_arrangement, ("m", "n", "p", "seed", "mode", "k_target")),
}


@dataclass(frozen=True)
class ConstructionSpec:
    """A named construction with its parameters, e.g.
    ``ConstructionSpec("coprime_grid", {"n": 4, "p": 67})``."""

    name: str
    params: dict
    seed: int = 0

    def build(self):
        if self.name not in BUILDERS:
            raise ValidationError(f"unknown construction {self.name!r}; choose from {sorted(BUILDERS)}")
        func, names = BUILDERS[self.name]
        params = dict(self.params)
        if "seed" in names:
            params.setdefault("seed", self.seed)
        unknown = set(params) - set(names)
        if unknown:
            raise ValidationError(f"{self.name} does not take {sorted(unknown)}")
        return func(**params)


def points_csv(points: Sequence[Sequence[int]]) -> str:
    """One row per point, canonical coordinates, header x0, x1, ..."""
    points = list(points)
    width = len(points[0]) if points else 0
    lines = [",".join(f"x{i}" for i in range(width))]
    lines += [",".join(str(x) for x in pt) for pt in points]
    return "\n".join(lines) + "\n"
