"""Point-plane incidence counting in P^3(F_p).

Two independent engines are provided for every count: ``hashed``, which
evaluates all covectors on all points at once (sharded over points,
optionally across threads) and buckets the points by plane, and ``brute``,
the plain double loop. The collinearity
statistics k (planes through a common line) and k* (the same, ignoring
forbidden lines) come from :mod:`kleinlab.projspace`.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Sequence

import numpy as np

from . import projspace as ps
from .errors import NoKernel, OrientationError, ValidationError
from .ffield import check_modulus
from .linalg import nullspace
from .projspace import Hyperplane, ProjLine, ProjPoint, normalize

Method = Literal["hashed", "brute"]


@dataclass
class Arrangement:
    """Points and planes of P^3(F_p), optionally weighted (weights >= 1)."""

    p: int
    points: list[ProjPoint]
    planes: list[Hyperplane]
    point_weights: list[int] | None = None
    plane_weights: list[int] | None = None

    def __post_init__(self):
        check_modulus(self.p)
        self.points = [normalize(q, self.p) for q in self.points]
        self.planes = [normalize(pi, self.p) for pi in self.planes]
        for name, objs in (("points", self.points), ("planes", self.planes)):
            if any(len(o) != 4 for o in objs):
                raise ValidationError(f"{name} must have four homogeneous coordinates")
            if len(set(objs)) != len(objs):
                raise ValidationError(f"duplicate {name}")
        for name, w, objs in (("point", self.point_weights, self.points),
                              ("plane", self.plane_weights, self.planes)):
            if w is not None:
                if len(w) != len(objs):
                    raise ValidationError(f"{name} weights do not match the {name} count")
                if any(int(x) < 1 for x in w):
                    raise ValidationError(f"{name} weights must be positive integers")

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.planes)

    @property
    def weighted(self) -> bool:
        return self.point_weights is not None or self.plane_weights is not None

    def dual(self) -> "Arrangement":
        """Swap roles: planes become points and vice versa (incidence is symmetric)."""
        return Arrangement(self.p, list(self.planes), list(self.points), self.plane_weights, self.point_weights)

    def to_json(self) -> str:
        doc = {"p": self.p, "points": [list(q) for q in self.points], "planes": [list(pi) for pi in self.planes]}
        if self.weighted:
            doc["weights"] = {"points": self.point_weights or [1] * self.m,
                              "planes": self.plane_weights or [1] * self.n}
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Arrangement":
        doc = json.loads(text)
        w = doc.get("weights") or {}
        return cls(doc["p"], [tuple(x) for x in doc["points"]], [tuple(x) for x in doc["planes"]],
                   w.get("points"), w.get("planes"))


@dataclass
class IncidenceReport:
    I: int
    m: int
    n: int
    k_points: int
    k_planes: int
    k_star: int | None = None
    restricted: bool = False
    buckets: dict[int, list[int]] = field(default_factory=dict, repr=False)

    @property
    def bound_value(self) -> int:
        """m * ceil(sqrt n) + k * m with k the plane collinearity (k* if restricted)."""
        k = self.k_star if self.restricted else self.k_planes
        return self.m * ceil_sqrt(self.n) + k * self.m

    @property
    def ratio(self) -> Fraction:
        b = self.bound_value
        return Fraction(self.I, b) if b else Fraction(0)


def ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


# ---------------------------------------------------------------- engines

def _shard_counts(P: np.ndarray, H: np.ndarray, p: int, workers: int) -> list[np.ndarray]:
    """Boolean incidence blocks, one per shard of points, in shard order."""
    if len(P) == 0 or len(H) == 0:
        return [np.zeros((len(P), len(H)), dtype=bool)]
    shards = np.array_split(np.arange(len(P)), max(1, min(workers, len(P))))

    def work(idx):
        return (P[idx] @ H.T) % p == 0

    if workers <= 1:
        return [work(s) for s in shards]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(work, shards))


def incidence_matrix(arr: Arrangement, workers: int = 1) -> np.ndarray:
    P = np.array(arr.points, dtype=np.int64).reshape(-1, 4)
    H = np.array(arr.planes, dtype=np.int64).reshape(-1, 4)
    return np.vstack(_shard_counts(P, H, arr.p, workers))


def plane_buckets(arr: Arrangement, workers: int = 1) -> dict[int, list[int]]:
    """Plane index -> indices of the points on it (only nonempty buckets)."""
    M = incidence_matrix(arr, workers)
    return {j: np.flatnonzero(M[:, j]).tolist() for j in range(arr.n) if M[:, j].any()}


def incident_pairs_brute(arr: Arrangement) -> list[tuple[int, int]]:
    p = arr.p
    return [(i, j) for i, q in enumerate(arr.points) for j, pi in enumerate(arr.planes)
            if sum(a * b for a, b in zip(q, pi)) % p == 0]


def _pairs(arr: Arrangement, method: Method, workers: int) -> list[tuple[int, int]]:
    if method == "brute":
        return incident_pairs_brute(arr)
    if method == "hashed":
        M = incidence_matrix(arr, workers)
        return [tuple(x) for x in np.argwhere(M).tolist()]
    raise ValidationError(f"unknown method {method!r}")


def count_incidences(arr: Arrangement, method: Method = "hashed", workers: int = 1,
                     collinearity: bool = True) -> IncidenceReport:
    """Exact |{(q, pi) : q on pi}| with collinearity statistics."""
    if method == "hashed":
        buckets = plane_buckets(arr, workers)
        I = sum(len(v) for v in buckets.values())
    else:
        buckets = {}
        for i, j in incident_pairs_brute(arr):
            buckets.setdefault(j, []).append(i)
        I = sum(len(v) for v in buckets.values())
    kp = ps.collinearity(arr.points, arr.p, "points") if collinearity else 0
    kq = ps.collinearity(arr.planes, arr.p, "planes") if collinearity else 0
    return IncidenceReport(I, arr.m, arr.n, kp, kq, buckets=buckets)


def count_restricted(arr: Arrangement, forbidden: Iterable[ProjLine], method: Method = "hashed",
                     workers: int = 1) -> IncidenceReport:
    """Incidences not supported on a forbidden line.

    (q, pi) is dropped when some forbidden l has q on l and l inside pi. k*
    is the largest number of planes through a common line outside the
    forbidden set.
    """
    p = arr.p
    forbidden = {ps.line_from_rows(l.rows(), p) for l in forbidden}
    pairs = _pairs(arr, method, workers)
    excluded = set()
    for l in forbidden:
        on = [i for i, q in enumerate(arr.points) if ps.line_contains(l, q, p)]
        through = [j for j, pi in enumerate(arr.planes) if ps.line_in_plane(l, pi, p)]
        excluded.update(itertools.product(on, through))
    kept = [pr for pr in pairs if pr not in excluded]
    kp = ps.collinearity(arr.points, p, "points")
    kq = ps.collinearity(arr.planes, p, "planes")
    ks = ps.collinearity(arr.planes, p, "planes", exclude=forbidden)
    return IncidenceReport(len(kept), arr.m, arr.n, kp, kq, k_star=ks, restricted=True)


def count_weighted(arr: Arrangement, method: Method = "hashed", workers: int = 1) -> int:
    """Sum of w(q) w(pi) over incident pairs; missing weights count as 1."""
    wq = arr.point_weights or [1] * arr.m
    wp = arr.plane_weights or [1] * arr.n
    return sum(wq[i] * wp[j] for i, j in _pairs(arr, method, workers))


# ---------------------------------------------------------------- bound check

@dataclass(frozen=True)
class BoundVerdict:
    m: int
    n: int
    k: int
    I: int
    swapped: bool
    n_within_p2: bool
    bound_value: int
    ratio: Fraction


def bound_check(report: IncidenceReport, p: int, allow_swap: bool = True) -> BoundVerdict:
    """Evaluate I / (m ceil(sqrt n) + k m) in the orientation m >= n.

    When there are more planes than points the roles are exchanged by
    duality and k becomes the point collinearity. No constant is asserted.
    """
    m, n = report.m, report.n
    k = report.k_star if report.restricted else report.k_planes
    swapped = False
    if m < n:
        if not allow_swap:
            raise OrientationError(f"m={m} < n={n} and swapping was not allowed")
        m, n, k, swapped = n, m, report.k_points, True
    bound = m * ceil_sqrt(n) + k * m
    ratio = Fraction(report.I, bound) if bound else Fraction(0)
    return BoundVerdict(m, n, k, report.I, swapped, n <= p * p, bound, ratio)


# ------------------------------------------------------ vanishing polynomial

@dataclass(frozen=True)
class HomogeneousPolynomial:
    """Degree-d form in four variables; ``coeffs`` maps exponent tuples to residues."""

    p: int
    degree: int
    coeffs: dict[tuple[int, int, int, int], int]

    def __call__(self, x: Sequence[int]) -> int:
        p = self.p
        total = 0
        for e, c in self.coeffs.items():
            t = c
            for xi, ei in zip(x, e):
                if ei:
                    t = t * pow(xi, ei, p) % p
            total += t
        return total % p

    def is_zero(self) -> bool:
        return not any(self.coeffs.values())

    def __str__(self):
        names = "x0 x1 x2 x3".split()
        terms = []
        for e, c in sorted(self.coeffs.items(), reverse=True):
            if c:
                mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(names, e) if k)
                terms.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(terms) or "0"


def monomials(d: int, nvars: int = 4) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree d, in decreasing lexicographic order."""
    out = [e for e in itertools.product(range(d + 1), repeat=nvars) if sum(e) == d]
    return sorted(out, reverse=True)


def interpolation_points(line: ProjLine, d: int, p: int) -> list[ProjPoint]:
    if p < d + 1:
        raise ValidationError(f"a line over F_{p} has only {p + 1} points; need d+1={d + 1} distinct ones")
    return ps.points_on_line(line, p)[: d + 1]


def fit_vanishing_polynomial(lines: Sequence[ProjLine], d: int, p: int) -> HomogeneousPolynomial:
    """Nonzero degree-d form vanishing on every line, from the evaluation kernel.

    Each line contributes its first d+1 rational points; a form of degree d
    with d+1 zeros on a line vanishes on the whole line. A kernel is
    guaranteed once C(d+3, 3) > (d+1) * len(lines).
    """
    if d < 1:
        raise ValidationError("degree must be at least 1")
    mons = monomials(d)
    rows = []
    for line in lines:
        for x in interpolation_points(line, d, p):
            rows.append([_mono_value(x, e, p) for e in mons])
    kernel = nullspace(rows, len(mons), p)
    if not kernel:
        raise NoKernel(f"no degree-{d} form vanishes on these {len(lines)} lines")
    poly = HomogeneousPolynomial(p, d, {e: c for e, c in zip(mons, kernel[0]) if c})
    for line in lines:
        for x in ps.points_on_line(line, p):
            if poly(x):
                raise AssertionError("interpolated form does not vanish on an input line")
    return poly


def _mono_value(x, e, p):
    t = 1
    for xi, ei in zip(x, e):
        if ei:
            t = t * pow(xi, ei, p) % p
    return t


def minimal_degree(n_lines: int) -> int:
    """Least d with C(d+3, 3) > (d+1) n_lines."""
    d = 1
    while math.comb(d + 3, 3) <= (d + 1) * n_lines:
        d += 1
    return d
