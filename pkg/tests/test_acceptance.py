"""Acceptance suite: twelve end-to-end checks, each reported as one PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v`; the lines are repeated in the
terminal summary.  `python tests/test_acceptance.py` prints them directly.
"""

import itertools
import random
import sys
import time

import pytest

from verbdyn import arith
from verbdyn.casebook import (BWW_STEP_E, THETA_STEP_E, bww_golden, exceptional_zero_set,
                              fibred_spec, prime_powers, run_case, three_var_helpers)
from verbdyn.dynsys import INF, brent_oracle, cycle_structure, word_system
from verbdyn.fiber import exceptional_points, fiber2, fiber3, qual_polys
from verbdyn.gf import GF
from verbdyn.sl2 import SL2, enumerate_sl2, enumerate_Z, psl33_word_check
from verbdyn.suzuki import Suzuki, bww_phi, periodic_point_search
from verbdyn.tracepoly import build_map2, bww_word, trace_of_word, trace_of_word3
from verbdyn.words import Word, evaluate, parse

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


def pair_fibres():
    bad = []
    for q in (2, 3, 4, 5, 7, 8, 9, 11, 13):
        F = GF(q)
        G = SL2(F)
        for Q in itertools.product(range(q), repeat=3):
            x, y = fiber2(F, Q)
            if G.det(x) != 1 or G.det(y) != 1 or tuple(G.pi2(x, y)) != Q:
                bad.append((q, Q))
    for q in (2, 3, 4, 5):
        G = SL2(GF(q))
        els = list(enumerate_sl2(q))
        image = {tuple(G.pi2(x, y)) for x in els for y in els}
        if image != set(itertools.product(range(q), repeat=3)):
            bad.append((q, "image"))
    return not bad, f"fiber2 round trip on F_q^3 for 9 fields, pair image full for q<=5; failures {bad[:3]}"


def triple_fibres():
    bad, total = [], 0
    for q in (2, 3, 4, 5, 7):
        F = GF(q)
        G = SL2(F)
        for a in enumerate_Z(q):
            total += 1
            if G.pi3(*fiber3(F, a)) != a:
                bad.append((q, a))
    G = SL2(GF(3))
    els = list(enumerate_sl2(3))
    image = {tuple(G.traces3(x, y, u)) for x in els for y in els for u in els}
    same = image == {tuple(a) for a in enumerate_Z(3)}
    return not bad and same, (f"fiber3 round trip on {total} points of Z, q<=7; "
                              f"SL(2,3)^3 image equals Z(F_3): {same}")


def trace_engine():
    rng = random.Random(2024)
    bad, n = [], 0
    for arity in (2, 3):
        for _ in range(300):
            w = Word(arity, tuple((rng.randrange(arity), rng.choice((1, -1)))
                                  for _ in range(rng.randint(0, 24))))
            poly = trace_of_word(w)
            for q in (5, 7, 9, 13):
                G = SL2(GF(q))
                T = [G.random(rng) for _ in range(arity)]
                if arity == 2:
                    s, u, t = G.pi2(*T)
                    pt = (s, t, u)
                else:
                    pt = G.traces3(*T)
                n += 1
                if poly.eval(G.F, pt) != G.trace(evaluate(w, T, G)):
                    bad.append((q, w))
    return not bad, f"{n} word/tuple evaluations, {len(bad)} failures"


def symbolic_goldens():
    tm = build_map2(bww_word())
    f1, f2 = bww_golden()
    H = three_var_helpers()
    v = "[x u x^-1, y u y^-1]"
    ls = {name: H[name][0] == trace_of_word3(parse(word, 3))
          for name, word in (("l1", v), ("l2", v + " x"), ("l3", v + " y"), ("l4", v + " x y"))}
    P = qual_polys()
    x3 = P["D2"].ring.var("x3")
    qual = (P["detA"] - P["L23"] - (x3 ** 2 - 4) * P["D2"]).is_zero()
    ok = tm.f1 == f1 and tm.f2 == f2 and all(ls.values()) and qual
    return ok, f"f1 {tm.f1 == f1}, f2 {tm.f2 == f2}, {ls}, det(A) identity {qual}"


def exceptional_locus():
    rows, ok = [], True
    for q in (2, 4, 5, 7):
        Z = exceptional_zero_set(q)
        listed = exceptional_points(GF(q))
        ok &= Z == listed
        rows.append(f"F_{q}: {len(Z)} zeros vs {len(listed)} listed")
    return ok, "; ".join(rows)


def _case(name, **kw):
    res = run_case(name, **kw)
    fails = [c.description for c in res.failures]
    return res.passed, f"{len(res.checks)} checks, {len(fails)} failed {fails[:3]}, {res.runtime:.1f}s"


def bww_case():
    return _case("bww")


def theta_case():
    return _case("theta")


def suzuki_case():
    ok, detail = _case("suzuki")
    G = Suzuki(1)
    rep = periodic_point_search(1, G.t_mat(0, 1), bww_phi())
    ok &= rep.witness is not None and rep.ell != INF
    return ok, f"{detail}; orbit scan over {G.order()} states: ell={rep.ell}, {rep.cycle_count} cycles"


def psl33():
    ok = psl33_word_check()
    return ok, "s1 = s4 up to scalar in PSL(3,3)"


def residual_scans():
    split = arith.poly_map_scan(arith.split_field_map(2, 3), arith.primes_upto(500))
    rat = arith.rational_periodic_check(arith.split_field_poly(2, 3))
    ok1 = split.N_set == [1] and not split.M and not split.errors and rat.fixed == [] and rat.period_two == []
    fib = arith.poly_map_scan(arith.fibred_example_map(), arith.primes_upto(100),
                              arith.fibred_example_forbidden)
    ok2 = fib.M == [2, 3]
    tor = arith.torus_scan(3, 2000)
    mism = [p for p, r, _ in tor.entries if r.ell != arith.torus_a_p(3, p)]
    ok3 = not mism and len(tor.N_set) >= 5
    return ok1 and ok2 and ok3, (f"split-field ell=1 to 500 and no rational periodic points: {ok1}; "
                                 f"fibred M={fib.M}; torus: {len(tor.entries)} primes, "
                                 f"{len(tor.N_set)} finite values, mismatches {mism[:3]}")


def elliptic():
    E0 = arith.E0
    counts = (arith.ec_count(E0, 7), arith.ec_count(E0, 17))
    div = arith.e0_divisibility_scan(10 ** 4)
    ss = arith.supersingular_scan(2000)
    G = arith.matched_character_group()
    om = arith.omega(G) == G.elements
    ok = counts == (4, 21) and div.ok and div.c_values <= {2, 3} and not ss and om
    return ok, (f"#E0(F_7), #E0(F_17) = {counts}; {div.checked} primes, {len(div.violations)} violations, "
                f"c values {sorted(div.c_values)}; supersingular exceptions {ss[:3]}; Omega_6 full {om}")


def _small_systems():
    """The functional graphs built by the BWW, theta and residual-periodicity checks."""
    for text in (BWW_STEP_E, THETA_STEP_E):
        spec = fibred_spec(text)
        for q in prime_powers(4, 11):
            F = GF(q)
            for t in range(q):
                yield f"{text} q={q} t={t}", word_system(spec, q, fixed_seed=((0, F.neg(1), 1, t),))
    for p in arith.primes_upto(500):
        yield f"split-field p={p}", arith.poly_system(arith.split_field_map(2, 3), p)
    for p in arith.primes_upto(100):
        yield f"fibred p={p}", arith.poly_system(arith.fibred_example_map(), p, arith.fibred_example_forbidden)
    for p in arith.primes_upto(2000):
        if p % 4 == 3:
            yield f"torus p={p}", arith.torus_system(3, p)


def engine_cross_oracle():
    n, bad = 0, []
    for label, system in _small_systems():
        if system.N > 10 ** 4:
            continue
        n += 1
        if cycle_structure(system) != brent_oracle(system):
            bad.append(label)
    return not bad, f"{n} systems, disagreements {bad[:3]}"


CRITERIA = {
    1: ("pair surjectivity", pair_fibres),
    2: ("triple surjectivity", triple_fibres),
    3: ("trace engine soundness", trace_engine),
    4: ("symbolic closed forms", symbolic_goldens),
    5: ("exceptional locus lists", exceptional_locus),
    6: ("BWW periodic points", bww_case),
    7: ("theta periodic points", theta_case),
    8: ("Suzuki group q=8", suzuki_case),
    9: ("PSL(3,3) recurrence", psl33),
    10: ("residual-periodicity scans", residual_scans),
    11: ("elliptic curve checks", elliptic),
    12: ("cycle engine vs Brent oracle", engine_cross_oracle),
}


def evaluate_criterion(n):
    name, fn = CRITERIA[n]
    t0 = time.perf_counter()
    ok, detail = fn()
    line = f"[acceptance {n:2d}] {'PASS' if ok else 'FAIL'} {name} ({time.perf_counter() - t0:.1f}s): {detail}"
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA), ids=[CRITERIA[n][0].replace(" ", "-") for n in sorted(CRITERIA)])
def test_acceptance(n):
    ok, line = evaluate_criterion(n)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate_criterion(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
