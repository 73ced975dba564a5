import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from verbdyn.arith import (CM_CURVE, CM_TWO_TORSION, E0, INFINITY, WeierstrassCurve, b_of_p, c_E,
                           cm_b_p_prediction, e0_divisibility_scan, ec_add, ec_count,
                           ec_count_euler, ec_dyn_system, ec_mul, ec_points, fibred_example_forbidden,
                           fibred_example_map, gl2, in_omega, koblitz_factor, legendre,
                           matched_character_group, mat_inv, mat_mul, mult_order, omega,
                           omega_ell_criterion, parse_curve, poly_map_scan, poly_system, primes_upto,
                           rational_periodic_check, reduce_group, split_field_map, split_field_poly,
                           subgroup_closure, supersingular_scan, torus_a_p)
from verbdyn.dynsys import brent_oracle, cycle_structure

# naive double-loop point counts of y^2 = x^3 + 75x + 125
E0_COUNTS = {7: 4, 11: 18, 13: 10, 17: 21, 19: 27, 23: 33}


def naive_count(E, p):
    return 1 + sum(1 for x in range(p) for y in range(p)
                   if (y * y - x ** 3 - E.a * x - E.b) % p == 0)


@pytest.mark.parametrize("p", sorted(E0_COUNTS))
def test_e0_counts(p):
    assert ec_count(E0, p) == E0_COUNTS[p] == naive_count(E0, p)


@pytest.mark.parametrize("E", [E0, CM_CURVE, WeierstrassCurve(2, 3), WeierstrassCurve(-3, 5)])
def test_counts_agree_and_respect_hasse(E):
    for p in primes_upto(400):
        if not E.good(p):
            continue
        n = ec_count(E, p)
        assert n == ec_count_euler(E, p) == len(ec_points(E, p))
        assert (n - p - 1) ** 2 <= 4 * p
        if p < 60:
            assert n == naive_count(E, p)


def test_bad_primes_are_rejected():
    with pytest.raises(ValueError):
        ec_count(E0, 5)
    with pytest.raises(ValueError):
        ec_count(CM_CURVE, 2)
    with pytest.raises(ValueError):
        WeierstrassCurve(0, 0)


def test_parse_curve():
    assert parse_curve("-1, 0") == CM_CURVE
    with pytest.raises(ValueError):
        parse_curve("1")


@pytest.mark.parametrize("p", [101, 103])
def test_group_law(p):
    rng = random.Random(p)
    pts = ec_points(E0, p)
    n = len(pts)
    for _ in range(200):
        P, Q, R = (rng.choice(pts) for _ in range(3))
        assert ec_add(E0, p, ec_add(E0, p, P, Q), R) == ec_add(E0, p, P, ec_add(E0, p, Q, R))
        assert ec_add(E0, p, P, Q) == ec_add(E0, p, Q, P)
        assert ec_mul(E0, p, n, P) is INFINITY
        assert ec_mul(E0, p, -1, P) == ec_mul(E0, p, n - 1, P)


def test_e0_divisibility_rule():
    rep = e0_divisibility_scan(3000)
    assert rep.ok
    assert rep.c_values <= {2, 3}
    assert c_E(E0, 7) == 2 and c_E(E0, 13) == 2 and c_E(E0, 19) == 3


def test_supersingular_rule():
    assert supersingular_scan(2000) == []


def test_cm_cycle_length_matches_prediction_without_four_torsion():
    for p in primes_upto(600):
        if p % 4 != 3 or p == 3:
            continue
        sys = ec_dyn_system(CM_CURVE, 3, p, CM_TWO_TORSION)
        ell = cycle_structure(sys).ell
        if ((p + 1) // 4) % 2:
            assert ell == cm_b_p_prediction(3, p)
        if p < 200:
            assert brent_oracle(sys) == cycle_structure(sys)
    # 4-torsion gives an admissible 2-cycle the recipe does not see
    assert b_of_p(7) == 2
    assert cycle_structure(ec_dyn_system(CM_CURVE, 3, 7, CM_TWO_TORSION)).ell == 2
    assert cm_b_p_prediction(3, 7) == float("inf")


def test_split_field_example():
    rep = poly_map_scan(split_field_map(2, 3), primes_upto(500))
    assert rep.M == [] and rep.N_set == [1] and rep.errors == []
    chk = rational_periodic_check(split_field_poly(2, 3))
    assert chk.fixed == [] and chk.period_two == []


def test_split_field_poly_splits_mod_p():
    # one of 2, 3, 6 is a square mod every odd p > 3, so x -> f(x) has a fixed point
    f = split_field_poly(2, 3)
    for p in primes_upto(300)[2:]:
        assert any(sum(c * pow(x, i, p) for i, c in enumerate(f)) % p == x for x in range(p))


def test_rational_periodic_check_on_known_polys():
    assert rational_periodic_check([0, 0, 1]).fixed == [0, 1]
    assert rational_periodic_check([-1, 0, 1]).period_two == [-1, 0]
    with pytest.raises(ValueError):
        rational_periodic_check([1, 0, 2])


def test_fibred_example():
    rep = poly_map_scan(fibred_example_map(), primes_upto(100), fibred_example_forbidden)
    assert rep.M == [2, 3]
    assert rep.N_set == [1]


def test_poly_system_indexing():
    sys = poly_system(fibred_example_map(), 5)
    # (a, b) = (2, 3) -> (12 mod 5, 3) = (2, 3)
    assert sys.step(2 * 5 + 3) == 2 * 5 + 3
    assert sys.step(1 * 5 + 2) == 2 * 5 + 2


@given(st.sampled_from(sorted(gl2(3).elements)), st.sampled_from(sorted(gl2(3).elements)))
def test_omega_is_conjugation_stable(g, h):
    c = mat_mul(mat_mul(h, g, 3), mat_inv(h, 3), 3)
    assert in_omega(g, 3) == in_omega(c, 3)


def test_matched_character_group():
    G = matched_character_group(3)
    assert len(G) == 36
    assert omega(G) == G.elements
    assert subgroup_closure(6, list(G.elements)).elements == G.elements
    # neither reduction is covered on its own; only the matching makes Omega full
    for m in (2, 3):
        H = reduce_group(G, m)
        assert omega(H) != H.elements


def test_omega_criterion_mod_ell():
    B = subgroup_closure(3, [(1, 1, 0, 1), (1, 0, 0, 2)])
    assert omega_ell_criterion(B) == (True, True)
    direct, conj = omega_ell_criterion(gl2(3))
    assert not direct and not conj


def test_koblitz_factor_of_full_group():
    frac, lam = koblitz_factor(gl2(2), B=50)
    assert frac == Fraction(len(gl2(2)) - len(omega(gl2(2))), len(gl2(2))) / Fraction(1, 2)
    assert 0 < lam < 1


def test_number_theory_helpers():
    assert legendre(-15, 17) == 1 and legendre(-15, 7) == -1
    assert mult_order(3, 11) == 5
    assert torus_a_p(3, 11) == 4
