"""Arithmetic in the prime field F_p for odd primes p.

Field elements are plain Python ints held in canonical form ``0 <= x < p``;
a :class:`PrimeField` instance carries the modulus and supplies the
operations that need more than ``%`` (inverses, square roots, sums of two
squares).
"""

from __future__ import annotations

from functools import lru_cache

from .errors import DivisionByZero, EvenCharacteristic, ModulusTooLarge, NotPrime

# Keeps six-term dot products of residues inside a signed 64-bit word,
# which the numpy fast paths rely on.
MAX_MODULUS = 1 << 30


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    n += 1
    while not is_prime(n):
        n += 1
    return n


class PrimeField:
    """The field F_p.

    >>> F = PrimeField(5)
    >>> F.inv(2)
    3
    >>> F.sqrt(4)
    (2, 3)
    """

    __slots__ = ("p", "_nonresidue", "_q", "_s")

    def __init__(self, p: int):
        p = int(p)
        if p == 2:
            raise EvenCharacteristic("characteristic 2 is not supported")
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if p >= MAX_MODULUS:
            raise ModulusTooLarge(f"p={p} exceeds the supported bound {MAX_MODULUS}")
        self.p = p
        # p - 1 = q * 2**s with q odd
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        self._q, self._s = q, s
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        self._nonresidue = z

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __call__(self, x: int) -> int:
        return int(x) % self.p

    def __iter__(self):
        return iter(range(self.p))

    def __len__(self):
        return self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.p}")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def legendre(self, a: int) -> int:
        """1 for nonzero squares, -1 for non-squares, 0 for zero."""
        a %= self.p
        if a == 0:
            return 0
        return 1 if pow(a, (self.p - 1) // 2, self.p) == 1 else -1

    def is_square(self, a: int) -> bool:
        return self.legendre(a) >= 0

    def sqrt(self, a: int) -> tuple[int, ...]:
        """All square roots of ``a``, smaller root first.

        Returns ``()`` for non-residues and ``(0,)`` for zero.
        """
        p = self.p
        a %= p
        if a == 0:
            return (0,)
        if self.legendre(a) != 1:
            return ()
        if p % 4 == 3:
            r = pow(a, (p + 1) // 4, p)
        else:
            # Tonelli-Shanks with the least quadratic non-residue
            m, c = self._s, pow(self._nonresidue, self._q, p)
            t, r = pow(a, self._q, p), pow(a, (self._q + 1) // 2, p)
            while t != 1:
                i, t2 = 0, t
                while t2 != 1:
                    t2 = t2 * t2 % p
                    i += 1
                b = pow(c, 1 << (m - i - 1), p)
                m, c = i, b * b % p
                t, r = t * c % p, r * b % p
        r2 = p - r
        return (r, r2) if r < r2 else (r2, r)

    def sum_two_squares(self, t: int) -> tuple[int, int]:
        """Lexicographically least ``(a, b)`` with ``a*a + b*b == t``.

        A solution exists for every t when p is odd: the sets {a^2} and
        {t - b^2} both have (p+1)/2 elements and must intersect.
        """
        return _sum_two_squares(self.p, t % self.p)

    def squares(self) -> frozenset[int]:
        return frozenset(x * x % self.p for x in range(self.p))


@lru_cache(maxsize=None)
def _sum_two_squares(p: int, t: int) -> tuple[int, int]:
    F = field(p)
    for a in range(p):
        roots = F.sqrt(t - a * a)
        if roots:
            return a, roots[0]
    raise AssertionError("unreachable for odd p")


@lru_cache(maxsize=None)
def field(p: int) -> PrimeField:
    """Cached field constructor; validates ``p`` like :class:`PrimeField`."""
    return PrimeField(p)


def check_modulus(p: int) -> int:
    """Validate ``p`` as a supported odd prime and return it."""
    return field(int(p)).p
