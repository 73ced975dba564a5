import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from verbdyn.gf import GF, FieldError, Fq, parse_field, prime_power

SMALL_Q = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64]


@pytest.mark.parametrize("q", SMALL_Q)
def test_field_axioms_by_enumeration(q):
    F = GF(q)
    els = list(F)
    assert len(els) == q
    rng = random.Random(q)
    triples = [tuple(rng.randrange(q) for _ in range(3)) for _ in range(400)]
    for a, b, c in triples:
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1


@pytest.mark.parametrize("q", SMALL_Q)
def test_frobenius_is_a_ring_map(q):
    F = GF(q)
    for a in F:
        for b in range(0, q, max(1, q // 8)):
            assert F.frob(F.add(a, b)) == F.add(F.frob(a), F.frob(b))
            assert F.frob(F.mul(a, b)) == F.mul(F.frob(a), F.frob(b))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_multiplicative_group_is_cyclic_of_order_q_minus_1(q):
    F = GF(q)
    orders = set()
    for a in range(1, q):
        e, x = 1, a
        while x != 1:
            x = F.mul(x, a)
            e += 1
        orders.add(e)
    assert max(orders) == q - 1


def _conic_brute(F, co):
    A, B, C, D, E, G = co
    for a in F:
        for c in F:
            v = F.add(F.add(F.mul(A, F.mul(a, a)), F.mul(B, F.mul(c, c))), F.mul(C, F.mul(a, c)))
            v = F.add(F.add(v, F.mul(D, a)), F.add(F.mul(E, c), G))
            if v == 0:
                return True
    return False


@pytest.mark.parametrize("q", [2, 3])
def test_solve_conic_matches_exhaustive_scan(q):
    F = GF(q)
    for co in itertools.product(range(q), repeat=6):
        if co[0] == co[1] == co[2] == 0:
            continue
        sol = F.solve_conic(*co)
        assert (sol is not None) == _conic_brute(F, co)
        if sol is not None:
            assert _conic_brute(F, co)


@pytest.mark.parametrize("q", [4, 5])
def test_solve_conic_matches_exhaustive_scan_sampled(q):
    F = GF(q)
    rng = random.Random(q)
    for _ in range(1500):
        co = tuple(rng.randrange(q) for _ in range(6))
        if co[0] == co[1] == co[2] == 0:
            continue
        sol = F.solve_conic(*co)
        assert (sol is not None) == _conic_brute(F, co)
        if sol is not None:
            A, B, C, D, E, G = (Fq(F, v) for v in co)
            a, c = Fq(F, sol[0]), Fq(F, sol[1])
            assert A * a * a + B * c * c + C * a * c + D * a + E * c + G == 0


@given(st.sampled_from(SMALL_Q), st.integers(0, 10 ** 6), st.integers(1, 40), st.integers(1, 30))
def test_frac_pow_consistent_with_pow(q, a, n, d):
    F = GF(q)
    a = 1 + a % (q - 1)  # frac_pow lives on the multiplicative group
    if math.gcd(d, q - 1) != 1:
        d = 1
    assert F.frac_pow(a, n * d, d) == F.pow(a, n)


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25, 4, 8, 16])
def test_sqrt_and_artin_schreier(q):
    F = GF(q)
    squares = {F.mul(a, a) for a in F}
    for a in F:
        r = F.sqrt(a)
        assert (r is not None) == (a in squares)
        if r is not None:
            assert F.mul(r, r) == a
    if F.p == 2:
        image = {F.add(F.mul(w, w), w) for w in F}
        for c in F:
            w = F.solve_artin_schreier(c)
            assert (w is not None) == (c in image)


@pytest.mark.parametrize("q", [4, 8, 9, 25, 27, 49])
def test_literal_round_trip(q):
    F = GF(q)
    for a in F:
        assert F.parse_element(F.render(a)) == a
        assert F.parse_element(f"#{a}") == a


def test_field_literal_errors():
    with pytest.raises(FieldError):
        GF(6)
    with pytest.raises(FieldError):
        GF(9).parse_element("z^3")
    with pytest.raises(FieldError):
        GF(7).parse_element("z")
    assert parse_field("2^3").q == 8
    assert prime_power(49) == (7, 2)
