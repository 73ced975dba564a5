import itertools
import random

import pytest

from verbdyn.fiber import fiber2, fiber3, fiber3_case, qual_F_value, qual_polys
from verbdyn.gf import GF
from verbdyn.sl2 import (SL2, L_value, enumerate_sl2, enumerate_Z, hha1_value, on_Z,
                         psl33_word_check, reversed_triple_trace)

# brute-force |Z(F_q)| from the vectorised enumerator, cross-checked against
# the SL(2,q)^3 trace image for q = 2, 3
Z_SIZES = {2: 42, 3: 570, 4: 3524, 5: 14130, 7: 111482}


@pytest.mark.parametrize("q", [4, 5, 7, 9])
def test_trace_identities_on_random_pairs(q):
    G = SL2(GF(q))
    F = G.F
    rng = random.Random(q)
    for _ in range(500):
        x, y, u = G.random(rng), G.random(rng), G.random(rng)
        s, w, t = G.pi2(x, y)
        # tr(xy) + tr(x^-1 y) = tr x tr y
        assert F.add(w, G.trace(G.mul(G.inv(x), y))) == F.mul(s, t)
        # Fricke: tr[x,y] = s^2 + t^2 + u^2 - stu - 2
        assert F.sub(G.trace(G.commutator(x, y)), F.elem(2)) == L_value(F, s, t, w)
        a = G.traces3(x, y, u)
        assert on_Z(F, a)
        assert reversed_triple_trace(F, a) == G.trace(G.mul(G.mul(y, x), u))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13])
def test_fiber2_round_trip_on_all_triples(q):
    F = GF(q)
    G = SL2(F)
    for Q in itertools.product(range(q), repeat=3):
        x, y = fiber2(F, Q)
        assert G.det(x) == 1 and G.det(y) == 1
        assert tuple(G.pi2(x, y)) == Q


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_pair_trace_image_is_everything(q):
    G = SL2(GF(q))
    els = list(enumerate_sl2(q))
    image = {tuple(G.pi2(x, y)) for x in els for y in els}
    assert len(image) == q ** 3


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_fiber3_round_trip_on_Z(q):
    F = GF(q)
    G = SL2(F)
    n = 0
    for a in enumerate_Z(q):
        x, u, y = fiber3(F, a)
        assert G.pi3(x, u, y) == a
        n += 1
    assert n == Z_SIZES[q]


@pytest.mark.parametrize("q", [2, 3])
def test_Z_equals_trace_image_of_triples(q):
    G = SL2(GF(q))
    els = list(enumerate_sl2(q))
    image = {tuple(G.traces3(x, y, u)) for x in els for y in els for u in els}
    assert image == {tuple(a) for a in enumerate_Z(q)}
    assert len(image) == Z_SIZES[q]


def test_Z_count_q2_by_scanning_all_of_F2_7():
    F = GF(2)
    zeros = [a for a in itertools.product(range(2), repeat=7) if hha1_value(F, a) == 0]
    assert len(zeros) == Z_SIZES[2]


@pytest.mark.parametrize("q", [2, 4, 5])
def test_fiber3_reports_its_branch(q):
    F = GF(q)
    seen = {fiber3_case(F, a)[1].split(":")[0] for a in enumerate_Z(q)}
    assert "case1" in seen
    assert seen <= {"case1", "case2a", "case2b"}


def test_fiber3_rejects_points_off_Z():
    F = GF(5)
    a = next(a for a in itertools.product(range(5), repeat=7) if not on_Z(F, a))
    with pytest.raises(ValueError):
        fiber3(F, a)


def test_determinant_identity_is_polynomial():
    P = qual_polys()
    x3 = P["D2"].ring.var("x3")
    assert (P["detA"] - P["L23"] - (x3 ** 2 - 4) * P["D2"]).is_zero()


@pytest.mark.parametrize("q", [5, 7, 9])
def test_norm_form_vanishes_on_conic_points(q):
    F = GF(q)
    pts = list(enumerate_Z(q))
    rng = random.Random(q)
    hits = 0
    while hits < 1000:
        a = rng.choice(pts)
        x1, x2, x3, x12, x13, x23, x123 = a
        al2 = rng.randrange(q)
        # D2 as a quadratic in ga2: -g^2 + g(al2 x3 - x2 x3 + x23) - al2^2 + al2 x2 - 1
        b = F.add(F.sub(F.mul(al2, x3), F.mul(x2, x3)), x23)
        c = F.sub(F.sub(F.mul(al2, x2), F.mul(al2, al2)), 1)
        for ga2 in F.roots_quadratic(F.neg(1), b, c):
            assert qual_polys()["D2"].eval(F, tuple(a) + (al2, ga2)) == 0
            assert qual_F_value(F, a, al2, ga2) == 0
            hits += 1


def test_psl33_words_agree_up_to_scalar():
    assert psl33_word_check()
