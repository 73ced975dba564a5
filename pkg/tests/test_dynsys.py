import itertools
import json

import pytest
from hypothesis import given, strategies as st

from verbdyn.arith import torus_a_p, torus_scan, torus_system
from verbdyn.dynsys import (INF, EndoSystem, OrbitReport, ScanReport, SystemTooLarge,
                            brent_oracle, cycle_of, cycle_structure, orbit, scan,
                            trace_fixed_points2, verify_invariant, word_system)
from verbdyn.gf import GF
from verbdyn.tracepoly import build_map2, bww_word
from verbdyn.words import SystemSpec, parse

BWW_FIXED = {4: 6, 5: 6, 7: 12, 8: 6, 9: 24, 11: 12, 13: 30}
TORUS3 = {7: INF, 11: 4, 19: INF, 23: 5, 31: 4, 43: 6, 47: 11, 59: 28}


@st.composite
def functional_graphs(draw, max_n=40):
    n = draw(st.integers(1, max_n))
    succ = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    forb = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return EndoSystem.from_arrays(succ, forb)


@given(functional_graphs())
def test_cycle_structure_agrees_with_brent(sys):
    assert cycle_structure(sys) == brent_oracle(sys)


@given(functional_graphs())
def test_witness_lies_on_an_admissible_cycle_of_length_ell(sys):
    rep = cycle_structure(sys)
    if rep.ell == INF:
        periodic = {z for z in range(sys.N) if orbit(sys, z)[0] == 0}
        assert all(sys.forbidden(z) for z in periodic)
    else:
        cyc = cycle_of(sys, rep.witness)
        assert len(cyc) == rep.ell
        assert not sys.forbidden(rep.witness)
        assert rep.witness == min(z for z in cyc if not sys.forbidden(z))
    assert sum(rep.cycle_length_histogram.values()) == rep.cycle_count


def test_small_hand_examples():
    ident = EndoSystem.from_arrays([0, 1, 2], [True, False, False])
    assert cycle_structure(ident) == OrbitReport(1, 1, 3, {1: 3})
    rot = EndoSystem.from_arrays([1, 2, 0, 3], [False, False, False, True])
    rep = cycle_structure(rot)
    assert (rep.ell, rep.witness, rep.cycle_count) == (3, 0, 2)
    all_forbidden = EndoSystem.from_arrays([1, 0], [True, True])
    assert cycle_structure(all_forbidden).ell == INF


def test_orbit_tail_and_cycle():
    sys = EndoSystem.from_arrays([1, 2, 3, 4, 2])
    assert orbit(sys, 0) == (2, 3)
    with pytest.raises(ValueError):
        orbit(sys, 9)


def test_bad_successor_array_is_rejected():
    with pytest.raises(ValueError):
        EndoSystem.from_arrays([0, 5]).succ


def test_bounds_are_enforced():
    with pytest.raises(SystemTooLarge):
        EndoSystem(10, lambda i: i, bound=5)
    with pytest.raises(SystemTooLarge):
        cycle_structure(EndoSystem.from_arrays(list(range(10))), bound=5)


def _torus_family(p):
    return torus_system(3, p)


def test_scan_is_thread_and_order_independent():
    ps = [7, 11, 19, 23, 31, 43, 47, 59]
    one = scan(_torus_family, ps, "t", threads=1).to_dict()
    many = scan(_torus_family, ps, "t", threads=4).to_dict()
    assert one == many
    rev = scan(_torus_family, ps[::-1], "t").to_dict()
    assert sorted(map(json.dumps, rev["entries"])) == sorted(map(json.dumps, one["entries"]))
    assert rev["M"] == one["M"][::-1] and rev["N_set"] == one["N_set"]


def test_scan_records_failures():
    def family(p):
        if p == 2:
            raise RuntimeError("boom")
        return torus_system(3, p)

    rep = scan(family, [2, 7], "f")
    assert rep.errors == [(2, "RuntimeError: boom")]
    assert rep.M == [7]


def test_scan_report_round_trips_through_json():
    rep = torus_scan(3, 200)
    back = ScanReport.from_dict(json.loads(rep.to_json()))
    assert back.to_dict() == rep.to_dict()
    assert rep.to_csv().splitlines()[0] == "parameter,ell,witness,cycle_count"
    assert len(rep.to_csv().splitlines()) == len(rep.entries) + 1


def test_empty_scan():
    rep = scan(_torus_family, [], "empty")
    d = json.loads(rep.to_json())
    assert d["entries"] == [] and d["M"] == [] and d["N_set"] == []


@pytest.mark.parametrize("p", sorted(TORUS3))
def test_torus_values(p):
    assert torus_a_p(3, p) == TORUS3[p]
    assert cycle_structure(torus_system(3, p)).ell == TORUS3[p]


def test_torus_scan_matches_prediction():
    rep = torus_scan(3, 600)
    for p, r, _ in rep.entries:
        assert r.ell == torus_a_p(3, p)


@pytest.mark.parametrize("q", sorted(BWW_FIXED))
def test_bww_trace_fixed_points(q):
    tm = build_map2(bww_word())
    pts = trace_fixed_points2(tm, q)
    assert len(pts) == BWW_FIXED[q]
    assert len(trace_fixed_points2(tm, q, "L1")) == BWW_FIXED[q]
    if q <= 9:
        F = GF(q)
        two, m2 = F.elem(2), F.elem(-2)
        brute = [P for P in itertools.product(range(q), repeat=3)
                 if tm(F, P) == P and not (P[0] in (two, m2) and P[1] in (P[2], F.neg(P[2])))]
        assert sorted(map(tuple, pts)) == sorted(brute)


def test_word_system_matches_direct_step():
    # state (y, x); y is fixed and x -> [y x y^-1, x^-1]
    w = parse("[y x y^-1, x^-1]", 2, names={"y": 0, "x": 1})
    sys = word_system(SystemSpec(r=1, s=1, W=(w,)), 3)
    G = sys.group
    phi = parse("[y x y^-1, x^-1]", 2)
    for i in range(0, sys.N, 37):
        y, x = sys.state(i)
        assert sys.state(sys.step(i)) == (y, G.eval(phi, (x, y)))


def test_fibred_word_system_keeps_the_fixed_generator_out_of_the_state():
    w = parse("[y x y^-1, x^-1]", 2, names={"y": 0, "x": 1})
    spec = SystemSpec(r=1, s=1, W=(w,))
    full = word_system(spec, 3)
    G = full.group
    y = G.element(7)
    fib = word_system(spec, 3, fixed_seed=(y,))
    assert fib.N == 24
    for i in range(fib.N):
        st = fib.state(i)
        assert fib.state(fib.step(i)) == full.state(full.step(full.encode(st)))


def test_verify_invariant():
    sys = torus_system(3, 23)
    squares = {pow(t, 2, 23) for t in range(1, 23)}
    assert verify_invariant(sys, lambda i: (i + 1) in squares)
    assert not verify_invariant(sys, lambda i: i + 1 == 5)
