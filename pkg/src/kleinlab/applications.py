"""Counters for bilinear value sets, sum-product sets, distances and energies.

Every energy has two engines: ``hashed`` (bucket values, add squared
bucket sizes) and ``brute`` (loop over all tuples). They are meant to be
compared against each other.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from . import projspace as ps
from .errors import BudgetExceeded, ValidationError
from .ffield import check_modulus
from .incidence import Arrangement

Vec = tuple[int, ...]
Method = Literal["hashed", "brute"]

DEFAULT_BUDGET = 50_000_000


def _check_budget(ops: int, budget: int | None, what: str):
    if budget is not None and ops > budget:
        raise BudgetExceeded(f"{what} needs about {ops} operations; budget is {budget}")


def _points(S: Iterable[Sequence[int]], p: int, dim: int) -> list[Vec]:
    out = []
    for s in S:
        if len(s) != dim:
            raise ValidationError(f"expected points of F_p^{dim}, got {tuple(s)}")
        out.append(tuple(x % p for x in s))
    if not out:
        raise ValidationError("the point set is empty")
    return out


# ------------------------------------------------------------ bilinear forms

@dataclass(frozen=True)
class BilinearForm:
    """The dot product or the wedge s1 t2 - s2 t1 on F_p^2."""

    kind: Literal["dot", "wedge"]
    p: int

    def __post_init__(self):
        check_modulus(self.p)
        if self.kind not in ("dot", "wedge"):
            raise ValidationError(f"unknown form {self.kind!r}")

    @property
    def matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        if self.kind == "dot":
            return ((1, 0), (0, 1))
        return ((0, 1), (self.p - 1, 0))

    def __call__(self, s: Sequence[int], t: Sequence[int]) -> int:
        if self.kind == "dot":
            return (s[0] * t[0] + s[1] * t[1]) % self.p
        return (s[0] * t[1] - s[1] * t[0]) % self.p

    def covector(self, s: Sequence[int], t: Sequence[int]) -> Vec:
        """Plane (s', t') whose incidence with (s : t) says form(s, s') = form(t, t')."""
        p = self.p
        if self.kind == "dot":
            return (s[0] % p, s[1] % p, -t[0] % p, -t[1] % p)
        return (s[1] % p, -s[0] % p, -t[1] % p, t[0] % p)


def _value_matrix(S: list[Vec], form: BilinearForm) -> np.ndarray:
    A = np.array(S, dtype=np.int64)
    M = np.array(form.matrix, dtype=np.int64)
    return (A @ M @ A.T) % form.p


def bilinear_value_set(S: Iterable[Sequence[int]], form: BilinearForm) -> set[int]:
    """{form(s, s') : s, s' in S}."""
    S = _points(S, form.p, 2)
    return set(np.unique(_value_matrix(S, form)).tolist())


def energy_bilinear(S: Iterable[Sequence[int]], form: BilinearForm, exclude_zero: bool = True,
                    method: Method = "hashed", budget: int | None = DEFAULT_BUDGET) -> int:
    """Number of (s, s', t, t') in S^4 with form(s, s') = form(t, t') (nonzero if asked)."""
    S = _points(S, form.p, 2)
    N = len(S)
    if method == "hashed":
        _check_budget(N * N, budget, "hashed energy")
        vals, counts = np.unique(_value_matrix(S, form), return_counts=True)
        if exclude_zero:
            counts = counts[vals != 0]
        return int(sum(int(c) * int(c) for c in counts))
    if method != "brute":
        raise ValidationError(f"unknown method {method!r}")
    _check_budget(N ** 4, budget, "brute-force energy")
    pairs = [form(s, t) for s in S for t in S]
    total = 0
    for a in pairs:
        if exclude_zero and a == 0:
            continue
        for b in pairs:
            if a == b:
                total += 1
    return total


def zero_quadruples(S: Iterable[Sequence[int]], form: BilinearForm) -> int:
    """Quadruples with form(s, s') = form(t, t') = 0."""
    S = _points(S, form.p, 2)
    z = int((_value_matrix(S, form) == 0).sum())
    return z * z


def bilinear_arrangement(S: Iterable[Sequence[int]], form: BilinearForm) -> Arrangement:
    """Weighted points (s : t) and planes of S x S encoding form(s, s') = form(t, t').

    The weight of a projective class is the number of pairs (s, t) in S x S
    representing it, so the weighted incidence count equals the energy with
    zero values included. The origin must not be in S.
    """
    S = _points(S, form.p, 2)
    p = form.p
    if (0, 0) in S:
        raise ValidationError("the origin cannot be a point of S")
    pw, hw = Counter(), Counter()
    for s in S:
        for t in S:
            pw[ps.normalize(s + t, p)] += 1
            hw[ps.normalize(form.covector(s, t), p)] += 1
    points, planes = sorted(pw), sorted(hw)
    return Arrangement(p, points, planes, [pw[x] for x in points], [hw[x] for x in planes])


def affinely_collinear(S: Iterable[Sequence[int]], p: int) -> bool:
    """True if all points of S lie on one affine line (any dimension)."""
    S = [tuple(x % p for x in s) for s in S]
    if len(S) < 3:
        return True
    from .linalg import rank
    base = S[0]
    diffs = [[(a - b) % p for a, b in zip(s, base)] for s in S[1:]]
    return rank(diffs, p) <= 1


def product_sum_set(A: Iterable[int], B: Iterable[int], sign: int, p: int) -> set[int]:
    """{a b + sign * a' b'} for a, a' in A and b, b' in B."""
    check_modulus(p)
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    A = sorted({a % p for a in A})
    B = sorted({b % p for b in B})
    if not A or not B:
        raise ValidationError("A and B must be nonempty")
    prods = np.unique((np.array(A, dtype=np.int64)[:, None] * np.array(B, dtype=np.int64)[None, :]) % p)
    return set(np.unique((prods[:, None] + sign * prods[None, :]) % p).tolist())


# ----------------------------------------------------------------- distances

def _distance_matrix(S: list[Vec], p: int) -> np.ndarray:
    A = np.array(S, dtype=np.int64)
    D = A[:, None, :] - A[None, :, :]
    return (D * D).sum(axis=2) % p


@dataclass(frozen=True)
class DistanceSet:
    points: tuple[Vec, ...]
    values: frozenset[int]
    pinned: tuple[int, ...]  # per point, distinct distances to the other points

    @property
    def max_pinned(self) -> int:
        return max(self.pinned, default=0)


def distance_census(S: Iterable[Sequence[int]], p: int) -> DistanceSet:
    """Delta(S) and the pinned distinct-distance counts (self excluded)."""
    check_modulus(p)
    S = _points(S, p, 3)
    D = _distance_matrix(S, p)
    pinned = []
    for i in range(len(S)):
        row = np.delete(D[i], i)
        pinned.append(len(np.unique(row)))
    return DistanceSet(tuple(S), frozenset(np.unique(D).tolist()), tuple(pinned))


@dataclass(frozen=True)
class NullCensus:
    null_pairs: int
    null_triangles: int
    nontrivial_null_triangles: int


def null_census(S: Iterable[Sequence[int]], p: int, budget: int | None = DEFAULT_BUDGET) -> NullCensus:
    """Unordered null pairs and all-null triangles (split by collinearity)."""
    check_modulus(p)
    S = _points(S, p, 3)
    if len(set(S)) != len(S):
        raise ValidationError("duplicate points")
    N = len(S)
    _check_budget(N ** 3, budget, "null triangle census")
    null = _distance_matrix(S, p) == 0
    np.fill_diagonal(null, False)
    pairs = int(null.sum()) // 2
    tri = nontrivial = 0
    for i in range(N):
        for j in np.flatnonzero(null[i, i + 1:]) + i + 1:
            for k in np.flatnonzero(null[j, j + 1:] & null[i, j + 1:]) + j + 1:
                tri += 1
                if not affinely_collinear((S[i], S[j], S[k]), p):
                    nontrivial += 1
    return NullCensus(pairs, tri, nontrivial)


def energy_distance(S: Iterable[Sequence[int]], p: int, variant: Literal["E", "E_star"] = "E",
                    method: Method = "hashed", budget: int | None = DEFAULT_BUDGET) -> int:
    """Triples (s, t, t') with |s-t|^2 = |s-t'|^2 != 0; E_star also needs |t-t'|^2 != 0."""
    check_modulus(p)
    S = _points(S, p, 3)
    if variant not in ("E", "E_star"):
        raise ValidationError(f"unknown variant {variant!r}")
    N = len(S)
    D = _distance_matrix(S, p)
    if method == "brute":
        _check_budget(N ** 3, budget, "brute-force distance energy")
        total = 0
        for s in range(N):
            for t in range(N):
                d = D[s, t]
                if d == 0:
                    continue
                for u in range(N):
                    if D[s, u] == d and (variant == "E" or D[t, u] != 0):
                        total += 1
        return total
    if method != "hashed":
        raise ValidationError(f"unknown method {method!r}")
    _check_budget(N * N, budget, "hashed distance energy")
    E = 0
    for s in range(N):
        vals, counts = np.unique(D[s], return_counts=True)
        E += int((counts[vals != 0].astype(np.int64) ** 2).sum())
    if variant == "E":
        return E
    # subtract triples whose (t, t') is null, t = t' included
    _check_budget(N * N * N, budget, "hashed E_star correction")
    correction = 0
    for t, u in zip(*np.nonzero(D == 0)):
        correction += int(((D[:, t] == D[:, u]) & (D[:, t] != 0)).sum())
    return E - correction


def is_semi_isotropic_planar(S: Iterable[Sequence[int]], p: int) -> bool:
    """True if S lies in a translate of a plane spanned by isotropic e1 and e2 with e1.e2 = 0.

    Such planes are exactly those with an isotropic normal vector.
    """
    from .constructions import isotropic_directions
    S = _points(S, p, 3)
    base = S[0]
    diffs = [[(a - b) % p for a, b in zip(s, base)] for s in S[1:]]
    for n in isotropic_directions(p):
        if all(sum(a * b for a, b in zip(n, d)) % p == 0 for d in diffs):
            return True
    return False


def distinct_directions(S: Iterable[Sequence[int]], p: int) -> bool:
    """True if no two nonzero points of S are proportional over F_p."""
    seen = set()
    for s in S:
        if any(x % p for x in s):
            key = ps.normalize(s, p)
            if key in seen:
                return False
            seen.add(key)
    return True
