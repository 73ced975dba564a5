"""Arithmetic example systems: polynomial maps, the torus power map, elliptic curves, Omega_n."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .dynsys import INF, EndoSystem, ScanReport, scan


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return np.nonzero(sieve)[0].tolist()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    n = abs(n)
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def least_prime_factor(n: int) -> int:
    if n < 2:
        raise ValueError(f"{n} has no prime factor")
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def legendre(a: int, p: int) -> int:
    """Euler's criterion: 0, 1 or -1."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def mult_order(d: int, n: int) -> int:
    if math.gcd(d, n) != 1:
        raise ValueError(f"{d} is not a unit mod {n}")
    k, x = 1, d % n
    while x != 1 % n:
        x = x * d % n
        k += 1
    return k


# integer polynomial maps

@dataclass(frozen=True)
class AffinePolyMap:
    """n integer polynomials in n variables, each a dict exponent-tuple -> coefficient."""

    n: int
    polys: tuple

    def __post_init__(self):
        if len(self.polys) != self.n:
            raise ValueError("need one polynomial per variable")
        for P in self.polys:
            for k in P:
                if len(k) != self.n:
                    raise ValueError("exponent tuple has the wrong arity")

    def eval_mod(self, point: Sequence[int], p: int) -> tuple:
        out = []
        for P in self.polys:
            acc = 0
            for k, c in P.items():
                t = c
                for x, e in zip(point, k):
                    t = t * pow(x, e, p) % p
                acc = (acc + t) % p
            out.append(acc)
        return tuple(out)

    def eval_array(self, arrays: Sequence[np.ndarray], p: int) -> list[np.ndarray]:
        out = []
        for P in self.polys:
            acc = np.zeros_like(arrays[0])
            for k, c in P.items():
                t = np.full_like(arrays[0], c % p)
                for x, e in zip(arrays, k):
                    for _ in range(e):
                        t = t * x % p
                acc = (acc + t) % p
            out.append(acc)
        return out


def univariate(coeffs: Sequence[int]) -> dict:
    """Low-degree-first coefficient list to a one-variable term dict."""
    return {(i,): c for i, c in enumerate(coeffs) if c}


def _pmul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def split_field_poly(a: int, b: int) -> list[int]:
    """(x^2 - a)(x^2 - b)(x^2 - ab) + x, low degree first."""
    f = _pmul(_pmul([-a, 0, 1], [-b, 0, 1]), [-a * b, 0, 1])
    f[1] += 1
    return f


def split_field_map(a: int = 2, b: int = 3) -> AffinePolyMap:
    return AffinePolyMap(1, (univariate(split_field_poly(a, b)),))


def fibred_example_map() -> AffinePolyMap:
    """(a, b) -> (a^2 b, b)."""
    return AffinePolyMap(2, ({(2, 1): 1}, {(0, 1): 1}))


def fibred_example_forbidden(p: int, point) -> bool:
    """a or b in {0, 1, -1} modulo p."""
    return any(v % p in (0, 1, (p - 1) % p) for v in point)


def poly_system(H: AffinePolyMap, p: int, forbidden: Callable | None = None, bound: int = 1 << 24) -> EndoSystem:
    """Reduction of H modulo p on (Z/p)^n; states indexed in base p, first coordinate most significant."""
    N = p ** H.n
    if N > bound:
        raise ValueError(f"{N} states exceed bound {bound}")
    idx = np.arange(N, dtype=np.int64)
    coords = []
    rest = idx
    for _ in range(H.n):
        rest, r = np.divmod(rest, p)
        coords.append(r)
    coords.reverse()
    img = H.eval_array(coords, p)
    succ = np.zeros(N, dtype=np.int64)
    for c in img:
        succ = succ * p + c
    forb = None
    if forbidden is not None:
        forb = np.fromiter((forbidden(p, tuple(int(c[i]) for c in coords)) for i in range(N)), dtype=bool, count=N)
    return EndoSystem.from_arrays(succ, forb, label=f"polynomial map mod {p}", bound=bound)


def poly_map_scan(H: AffinePolyMap, primes: Iterable[int], forbidden: Callable | None = None,
                  label: str = "polynomial map") -> ScanReport:
    return scan(lambda p: poly_system(H, p, forbidden), list(primes), label)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        return []
    divs = [1]
    for q in prime_factors(n):
        e, m = 0, n
        while m % q == 0:
            m //= q
            e += 1
        divs = [d * q ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def _poly_compose(f: Sequence[int], g: Sequence[int]) -> list[int]:
    out = [0]
    for c in reversed(f):
        out = _pmul(out, g)
        out[0] += c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _integer_roots(f: Sequence[int]) -> list[int] | None:
    """Integer roots of a monic integer polynomial; None if it is identically zero."""
    f = list(f)
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    if all(c == 0 for c in f):
        return None
    roots = set()
    # strip a factor x^k
    k = 0
    while f[k] == 0:
        k += 1
    if k:
        roots.add(0)
    g = f[k:]
    for d in _divisors(g[0]):
        for r in (d, -d):
            v = 0
            for c in reversed(g):
                v = v * r + c
            if v == 0:
                roots.add(r)
    return sorted(roots)


@dataclass
class RationalPeriodicReport:
    fixed: list | None  # None means every rational is fixed
    period_two: list | None
    verdict: str


def rational_periodic_check(coeffs: Sequence[int]) -> RationalPeriodicReport:
    """Rational roots of H(x) - x and H(H(x)) - x for monic integer H (low degree first).

    A monic integer polynomial has rational roots only in Z, so the
    rational-root search reduces to divisors of the constant term.
    """
    H = list(coeffs)
    while len(H) > 1 and H[-1] == 0:
        H.pop()
    if H[-1] != 1:
        raise ValueError("polynomial must be monic")
    if len(H) - 1 > 8:
        raise ValueError("degree above 8")
    x = [0, 1]
    f1 = [a - b for a, b in zip(H + [0] * 2, x + [0] * len(H))]
    HH = _poly_compose(H, H)
    f2 = [a - b for a, b in zip(HH + [0] * 2, x + [0] * len(HH))]
    fixed = _integer_roots(f1)
    two = _integer_roots(f2)
    if fixed is None or two is None:
        verdict = "degenerate: every rational point is periodic"
    elif not fixed and not two:
        verdict = "no rational periodic points"
    else:
        verdict = f"rational periodic points: fixed {fixed}, period dividing 2 {two}"
    return RationalPeriodicReport(fixed, two, verdict)


# torus x -> x^d on F_p^*

def torus_system(d: int, p: int) -> EndoSystem:
    """t -> t^d on F_p^*, state i standing for t = i + 1, forbidden {1, -1}."""
    t = np.arange(1, p, dtype=np.int64)
    img = np.array([pow(int(v), d, p) for v in t], dtype=np.int64)
    forb = (t == 1) | (t == p - 1)
    return EndoSystem.from_arrays(img - 1, forb, label=f"t^{d} mod {p}")


def torus_a_p(d: int, p: int) -> float:
    """min over odd primes q | p-1 with q coprime to d of ord_q(d); inf when there are none."""
    if math.gcd(p, d) != 1:
        raise ValueError("need gcd(p, d) = 1")
    Q = [q for q in prime_factors(p - 1) if q != 2 and d % q != 0]
    if not Q:
        return INF
    return min(mult_order(d, q) for q in Q)


def torus_scan(d: int, p_max: int, residue: tuple[int, int] | None = (4, 3)) -> ScanReport:
    ps = [p for p in primes_upto(p_max) if p > 2 and math.gcd(p, d) == 1]
    if residue is not None:
        ps = [p for p in ps if p % residue[0] == residue[1]]
    return scan(lambda p: torus_system(d, p), ps, f"torus t^{d}")


# elliptic curves y^2 = x^3 + a x + b

INFINITY = None


@dataclass(frozen=True)
class WeierstrassCurve:
    a: int
    b: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError("singular curve")

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.a ** 3 + 27 * self.b ** 2)

    def good(self, p: int) -> bool:
        return p > 3 and self.discriminant % p != 0

    def on_curve(self, P, p: int) -> bool:
        if P is INFINITY:
            return True
        x, y = P
        return (y * y - (x ** 3 + self.a * x + self.b)) % p == 0


def parse_curve(text: str) -> WeierstrassCurve:
    parts = [v.strip() for v in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"curve literal must be 'a,b', got {text!r}")
    return WeierstrassCurve(int(parts[0]), int(parts[1]))


E0 = WeierstrassCurve(75, 125)
CM_CURVE = WeierstrassCurve(-1, 0)


def _check_good(E: WeierstrassCurve, p: int):
    if not E.good(p):
        raise ValueError(f"p={p} is a bad (or too small) prime for {E}")


def ec_count(E: WeierstrassCurve, p: int) -> int:
    """#E(F_p) = p + 1 + sum_x chi(x^3 + a x + b)."""
    _check_good(E, p)
    x = np.arange(p, dtype=np.int64)
    rhs = (x * x % p * x + E.a % p * x + E.b) % p
    sq = np.zeros(p, dtype=bool)
    sq[(x * x) % p] = True
    chi = np.where(rhs == 0, 0, np.where(sq[rhs], 1, -1))
    n = p + 1 + int(chi.sum())
    if (n - p - 1) ** 2 > 4 * p:
        raise AssertionError(f"Hasse bound violated at p={p}")
    return n


def ec_count_euler(E: WeierstrassCurve, p: int) -> int:
    """Same count with the Legendre symbol by Euler's criterion."""
    _check_good(E, p)
    return p + 1 + sum(legendre(x ** 3 + E.a * x + E.b, p) for x in range(p))


def ec_points(E: WeierstrassCurve, p: int) -> list:
    _check_good(E, p)
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    pts = [INFINITY]
    for x in range(p):
        for y in roots.get((x ** 3 + E.a * x + E.b) % p, ()):
            pts.append((x, y))
    return pts


def ec_neg(E: WeierstrassCurve, p: int, P):
    if P is INFINITY:
        return P
    return (P[0], (-P[1]) % p)


def ec_add(E: WeierstrassCurve, p: int, P, Q):
    if not (E.on_curve(P, p) and E.on_curve(Q, p)):
        raise ValueError("point not on curve")
    if P is INFINITY:
        return Q
    if Q is INFINITY:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2 and (y1 + y2) % p == 0:
        return INFINITY
    if P == Q:
        lam = (3 * x1 * x1 + E.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def ec_mul(E: WeierstrassCurve, p: int, d: int, P):
    if d < 0:
        return ec_mul(E, p, -d, ec_neg(E, p, P))
    out, base = INFINITY, P
    while d:
        if d & 1:
            out = ec_add(E, p, out, base)
        base = ec_add(E, p, base, base)
        d >>= 1
    return out


def c_E(E: WeierstrassCurve, p: int) -> int:
    return least_prime_factor(ec_count(E, p))


@dataclass
class DivisibilityReport:
    p_max: int
    checked: int
    violations: list = field(default_factory=list)
    c_values: set = field(default_factory=set)

    @property
    def ok(self) -> bool:
        return not self.violations


def e0_divisibility_scan(p_max: int, E: WeierstrassCurve = E0, p_min: int = 7) -> DivisibilityReport:
    """(-15/p) = 1 gives 3 | #E, (-15/p) = -1 gives 2 | #E, and gcd(#E, 6) > 1."""
    if p_max > 10 ** 5:
        raise ValueError("p_max above 1e5")
    rep = DivisibilityReport(p_max, 0)
    for p in primes_upto(p_max):
        if p < p_min or not E.good(p):
            continue
        n = ec_count(E, p)
        rep.checked += 1
        chi = legendre(-15, p)
        if chi == 1 and n % 3:
            rep.violations.append((p, n, chi))
        elif chi == -1 and n % 2:
            rep.violations.append((p, n, chi))
        elif math.gcd(n, 6) == 1:
            rep.violations.append((p, n, chi))
        rep.c_values.add(least_prime_factor(n))
    return rep


def supersingular_scan(p_max: int, E: WeierstrassCurve = CM_CURVE) -> list[tuple[int, int]]:
    """(p, #E(F_p)) for p = 3 mod 4 where #E(F_p) != p + 1; empty means the rule held."""
    return [(p, ec_count(E, p)) for p in primes_upto(p_max) if p % 4 == 3 and E.good(p)
            and ec_count(E, p) != p + 1]


def ec_dyn_system(E: WeierstrassCurve, d: int, p: int, forbidden: Sequence = (INFINITY,)) -> EndoSystem:
    """Multiplication by d on E(F_p); forbidden points given over Q (reduced mod p)."""
    if p > 5000:
        raise ValueError("p above 5000")
    pts = ec_points(E, p)
    index = {P: i for i, P in enumerate(pts)}
    succ = [index[ec_mul(E, p, d, P)] for P in pts]
    red = set()
    for P in forbidden:
        red.add(INFINITY if P is INFINITY else (P[0] % p, P[1] % p))
    forb = [P in red for P in pts]
    sys = EndoSystem.from_arrays(succ, forb, label=f"[{d}] on E(F_{p})")
    sys.points = pts
    return sys


CM_TWO_TORSION = (INFINITY, (0, 0), (1, 0), (-1, 0))


def b_of_p(p: int, E: WeierstrassCurve = CM_CURVE) -> int | None:
    """Smallest prime factor of #E(F_p)/4; None when the quotient is 1."""
    n = ec_count(E, p)
    if n % 4:
        raise ValueError(f"#E(F_{p}) = {n} is not divisible by 4")
    m = n // 4
    return None if m == 1 else least_prime_factor(m)


def cm_b_p_prediction(d: int, p: int, E: WeierstrassCurve = CM_CURVE) -> float:
    """Cycle length predicted by the torus-style recipe: min ord_q(d) over odd primes q | #E(F_p).

    This ignores 4-torsion.  When E(F_p) has points of order 4 they are
    not in the forbidden 2-torsion and give shorter cycles, so the value
    is compared with the real ell rather than assumed equal to it.
    """
    n = ec_count(E, p)
    qs = [q for q in prime_factors(n) if q != 2 and d % q != 0]
    if not qs:
        return INF
    return min(mult_order(d, q) for q in qs)


# subgroups of GL_2(Z/nZ)

Mat = tuple  # (a, b, c, d)


def mat_mul(x: Mat, y: Mat, n: int) -> Mat:
    return ((x[0] * y[0] + x[1] * y[2]) % n, (x[0] * y[1] + x[1] * y[3]) % n,
            (x[2] * y[0] + x[3] * y[2]) % n, (x[2] * y[1] + x[3] * y[3]) % n)


def mat_det(x: Mat, n: int) -> int:
    return (x[0] * x[3] - x[1] * x[2]) % n


def mat_inv(x: Mat, n: int) -> Mat:
    di = pow(mat_det(x, n), -1, n)
    return (x[3] * di % n, -x[1] * di % n, -x[2] * di % n, x[0] * di % n)


@dataclass(frozen=True)
class MatGroupModN:
    n: int
    elements: frozenset

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.elements


def subgroup_closure(n: int, generators: Iterable[Mat], bound: int = 10 ** 6) -> MatGroupModN:
    ident = (1 % n, 0, 0, 1 % n)
    gens = [tuple(v % n for v in g) for g in generators]
    for g in gens:
        if math.gcd(mat_det(g, n), n) != 1:
            raise ValueError(f"{g} is not invertible mod {n}")
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                k = mat_mul(h, g, n)
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
                    if len(seen) > bound:
                        raise ValueError(f"closure exceeds {bound} elements")
        frontier = nxt
    return MatGroupModN(n, frozenset(seen))


def gl2(n: int) -> MatGroupModN:
    els = frozenset(m for m in _all_mats(n) if math.gcd(mat_det(m, n), n) == 1)
    return MatGroupModN(n, els)


def _all_mats(n: int):
    r = range(n)
    return ((a, b, c, d) for a in r for b in r for c in r for d in r)


def in_omega(g: Mat, n: int) -> bool:
    v = (mat_det(g, n) + 1 - g[0] - g[3]) % n
    return math.gcd(v, n) != 1


def omega(G: MatGroupModN) -> frozenset:
    return frozenset(g for g in G.elements if in_omega(g, G.n))


def omega_ell_criterion(G: MatGroupModN) -> tuple[bool, bool]:
    """(Omega(G) = G, G conjugate into {(1,*;0,*)} or {(*,*;0,1)})."""
    ell = G.n
    if ell not in (2, 3, 5):
        raise ValueError("ell must be 2, 3 or 5")
    direct = omega(G) == G.elements
    shape1 = lambda g: g[0] == 1 and g[2] == 0
    shape2 = lambda g: g[3] == 1 and g[2] == 0
    conj = False
    for h in gl2(ell).elements:
        hi = mat_inv(h, ell)
        img = [mat_mul(mat_mul(h, g, ell), hi, ell) for g in G.elements]
        if all(shape1(g) for g in img) or all(shape2(g) for g in img):
            conj = True
            break
    return direct, conj


def crt_pair(g2: Mat, g3: Mat, n2: int = 2, n3: int = 3) -> Mat:
    """The matrix mod n2*n3 reducing to g2 and g3."""
    n = n2 * n3
    out = []
    for a, b in zip(g2, g3):
        out.append(next(v for v in range(n) if v % n2 == a % n2 and v % n3 == b % n3))
    return tuple(out)


def gl2_mod2_sign(g: Mat) -> int:
    """Sign of g as a permutation of the three nonzero vectors of F_2^2."""
    vecs = [(1, 0), (0, 1), (1, 1)]
    img = [((g[0] * v[0] + g[1] * v[1]) % 2, (g[2] * v[0] + g[3] * v[1]) % 2) for v in vecs]
    perm = [vecs.index(v) for v in img]
    inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def matched_character_group(ell: int = 3) -> MatGroupModN:
    """Pairs (g2, g_ell) in GL_2(Z/2) x {(+-1,*;0,*)} with sign(g2) = upper-left entry of g_ell."""
    g2s = [g for g in gl2(2).elements]
    gls = [g for g in _all_mats(ell) if g[2] == 0 and g[0] in (1, ell - 1) and g[3] != 0]
    n = 2 * ell
    els = set()
    for a in g2s:
        for b in gls:
            chi = 1 if b[0] == 1 else -1
            if gl2_mod2_sign(a) == chi:
                els.add(crt_pair(a, b, 2, ell))
    return MatGroupModN(n, frozenset(els))


def reduce_group(G: MatGroupModN, m: int) -> MatGroupModN:
    return MatGroupModN(m, frozenset(tuple(v % m for v in g) for g in G.elements))


def koblitz_factor(G: MatGroupModN, B: int = 1000) -> tuple[Fraction, float]:
    """Finite factor (1 - |Omega|/|G|) / prod_{l | n}(1 - 1/l) and the truncated non-CM lambda product."""
    n = G.n
    frac = Fraction(len(G) - len(omega(G)), len(G))
    for ell in prime_factors(n):
        frac /= Fraction(ell - 1, ell)
    lam = 1.0
    for ell in primes_upto(B):
        if n % ell == 0:
            continue
        lam *= 1 - (ell * ell - ell - 1) / ((ell - 1) ** 3 * (ell + 1))
    return frac, lam
