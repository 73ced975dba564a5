import random

import pytest

from verbdyn.dynsys import brent_oracle, cycle_of
from verbdyn.suzuki import (Cell1, Cell2, Suzuki, SuzukiError, SzParams, bww_family_check,
                            bww_phi, periodic_point_search, theta_phi, verify_properties,
                            word_system)

G8 = Suzuki(1)

# full orbit census of x -> [y x y^-1, x^-1] on Sz(8) with y = T(0,1)
SZ8_HISTOGRAM = {1: 1, 8: 48, 12: 96, 24: 48, 60: 32}


def test_parameters():
    assert (SzParams(1).q, SzParams(1).s) == (8, 4)
    assert (SzParams(2).q, SzParams(2).s) == (32, 8)
    with pytest.raises(SuzukiError):
        SzParams(0)
    assert G8.order() == 29120


@pytest.mark.parametrize("m", [1, 2])
def test_random_elements_have_det_one_and_decompose(m):
    G = Suzuki(m)
    rng = random.Random(m)
    for _ in range(200):
        x = G.random(rng)
        assert G.det(x) == 1
        cell = G.bruhat(x)
        assert G.compose(cell).mat == x.mat
        assert isinstance(cell, Cell1) == G.is_lower(x)
        assert G.mul(x, G.inv(x)).mat == G.identity().mat


def test_bruhat_cells_over_all_parameters():
    q = G8.q
    for a in range(q):
        for b in range(q):
            for k in range(1, q):
                assert G8.bruhat(G8.compose(Cell1(a, b, k))) == (a, b, k)
    rng = random.Random(3)
    for _ in range(500):
        c = Cell2(*(rng.randrange(q) for _ in range(3)), rng.randrange(q), rng.randrange(q))
        if c.k == 0:
            continue
        assert G8.bruhat(G8.compose(c)) == c


def test_whole_group_is_enumerated_once():
    elts = G8.all_elements()
    assert len(elts) == G8.order()
    assert len({e.tobytes() for e in elts}) == G8.order()


def test_identities_hold_exhaustively_at_q8():
    rep = verify_properties(1)
    for name in ("i", "ii", "iii a+c", "iv", "v", "vi"):
        assert rep.results[name][0], name
    assert rep.iii_reading == "a+c"


def test_identities_sampled_at_q32():
    rep = verify_properties(2, samples=300)
    assert rep.iii_reading == "a+c"
    assert all(rep.results[n][0] for n in ("i", "ii", "iv", "v", "vi"))


@pytest.mark.parametrize("m", [1, 2])
def test_kappa_is_conjugation_and_invariant(m):
    G = Suzuki(m)
    q = G.q
    rng = random.Random(10 + m)
    for _ in range(300):
        x = G.compose(Cell2(rng.randrange(q), rng.randrange(q), rng.randrange(1, q),
                            rng.randrange(q), rng.randrange(q)))
        assert G.kappa(x).mat == G.kappa_by_conjugation(x).mat
        z = G.t_mat(rng.randrange(q), rng.randrange(q))
        assert G.projection(G.prod(z, x, G.inv(z))) == G.projection(x)


def test_step_factors_through_the_projection():
    rng = random.Random(7)
    y = G8.t_mat(0, 1)
    checked = 0
    for _ in range(400):
        x = G8.random(rng)
        try:
            lhs = G8.fgh_step(y, x, bww_phi())
            rhs = G8.fgh_step(y, G8.kappa(x), bww_phi())
        except SuzukiError:
            continue
        assert lhs == rhs
        checked += 1
    assert checked > 300


@pytest.mark.parametrize("m", [1, 2])
def test_period_two_family(m):
    fam = bww_family_check(m)
    assert fam["step1"] == fam["total"] == fam["step2"]
    assert fam["mismatches"] == []


def test_full_orbit_scan_at_q8():
    y = G8.t_mat(0, 1)
    sys = word_system(1, y, bww_phi())
    rep = periodic_point_search(1, y, bww_phi())
    assert rep.ell == 8
    assert rep.cycle_count == 225
    assert rep.cycle_length_histogram == SZ8_HISTOGRAM
    assert len(cycle_of(sys, rep.witness)) == 8
    assert not sys.forbidden(rep.witness)
    assert brent_oracle(sys) == rep


def test_theta_with_a_square_root_matches_bww():
    y, y1 = G8.t_mat(0, 1), G8.t_mat(1, 1)
    assert G8.mul(y1, y1).mat == y.mat
    assert (word_system(1, y1, theta_phi()).succ == word_system(1, y, bww_phi()).succ).all()


def test_mixing_groups_is_an_error():
    with pytest.raises(SuzukiError):
        G8.mul(G8.identity(), Suzuki(2).identity())
