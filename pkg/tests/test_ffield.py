import pytest
from hypothesis import given, settings, strategies as st

from kleinlab.errors import DivisionByZero, EvenCharacteristic, ModulusTooLarge, NotPrime
from kleinlab.ffield import MAX_MODULUS, PrimeField, field, is_prime, next_prime

PRIMES = [3, 5, 7, 11, 13, 17, 41, 97, 101, 1009, 65537, 1_000_000_007 % MAX_MODULUS]
PRIMES = [p for p in PRIMES if is_prime(p)] + [next_prime(MAX_MODULUS // 2)]


def test_construction():
    assert PrimeField(7).p == 7
    with pytest.raises(EvenCharacteristic):
        PrimeField(2)
    with pytest.raises(NotPrime):
        PrimeField(9)
    with pytest.raises(ModulusTooLarge):
        PrimeField(next_prime(MAX_MODULUS))


def test_is_prime_matches_trial_division():
    def slow(n):
        return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))
    assert [n for n in range(2000) if is_prime(n)] == [n for n in range(2000) if slow(n)]


def test_inverse_examples():
    assert field(5).inv(2) == 3
    assert field(101).inv(1) == 1
    with pytest.raises(DivisionByZero):
        field(7).inv(0)


def test_sqrt_examples():
    assert field(7).sqrt(4) == (2, 5)
    assert field(11).sqrt(0) == (0,)
    assert field(5).sqrt(3) == ()


def test_sum_two_squares_examples():
    assert field(5).sum_two_squares(-1) == (0, 2)
    assert field(13).sum_two_squares(0) == (0, 0)
    assert field(7).sum_two_squares(1) == (0, 1)


@pytest.mark.parametrize("p", [3, 5, 7, 13, 17, 41, 97, 113, 257])
def test_sqrt_exhaustive(p):
    F = field(p)
    squares = {}
    for x in range(p):
        squares.setdefault(x * x % p, set()).add(x)
    for a in range(p):
        assert set(F.sqrt(a)) == squares.get(a, set())
        assert F.is_square(a) == (a in squares)


@pytest.mark.parametrize("p", [3, 5, 7, 13, 31])
def test_sum_two_squares_is_lexicographic_minimum(p):
    F = field(p)
    for t in range(p):
        best = min((a, b) for a in range(p) for b in range(p) if (a * a + b * b) % p == t)
        assert F.sum_two_squares(t) == best


@settings(max_examples=200)
@given(st.sampled_from(PRIMES), st.integers(), st.integers())
def test_field_axioms(p, a, b):
    F = field(p)
    a, b = F(a), F(b)
    assert F.add(a, F.neg(a)) == 0
    assert F.sub(F.add(a, b), b) == a
    if b:
        assert F.mul(F.div(a, b), b) == a
        assert F.mul(b, F.inv(b)) == 1


@settings(max_examples=200)
@given(st.sampled_from(PRIMES), st.integers())
def test_sqrt_roots_square_back(p, a):
    F = field(p)
    for r in F.sqrt(a):
        assert r * r % p == a % p
    assert len(F.sqrt(a)) == (0 if F.legendre(a) == -1 else 1 if a % p == 0 else 2)
