"""Constructive inverses of the trace projections pi2 and pi3."""

from __future__ import annotations

import functools
import itertools

from .gf import Field
from .sl2 import SL2, Mat2, L_value, on_Z, reversed_triple_trace
from .tracepoly import F_phi, IntPoly, Ring
from .words import builtin_automorphism, builtin_automorphism_inverse, evaluate


class FiberError(RuntimeError):
    """Raised when a construction fails; this would contradict surjectivity."""


def fiber2(F: Field, Q) -> tuple[Mat2, Mat2]:
    """(x, y) in SL(2,q) with (tr x, tr xy, tr y) = Q = (s, u, t)."""
    s0, u0, t0 = Q
    G = SL2(F)
    add, sub, mul, neg = F.add, F.sub, F.mul, F.neg
    two = F.elem(2)
    if s0 == two or s0 == neg(two):
        e = 1 if s0 == two else F.neg(1)
        # upper unitriangular x with y = [[1, t-2], [1, t-1]]
        x = (e, sub(u0, mul(e, t0)), 0, e)
        y = (1, sub(t0, two), 1, sub(t0, 1))
    else:
        x = (0, 1, neg(1), s0)
        if F.p == 2:
            alpha = F.div(add(mul(s0, t0), u0), s0)
            gamma = F.div(t0, s0)
            r = add(add(mul(alpha, alpha), mul(gamma, gamma)), mul(s0, mul(alpha, gamma)))
            r = add(add(r, mul(t0, alpha)), add(mul(add(mul(s0, t0), u0), gamma), 1))
            a = add(F.sqrt(r), alpha)
            c = gamma
        else:
            sol = F.solve_conic(1, 1, neg(s0), neg(t0), sub(mul(s0, t0), u0), 1)
            if sol is None:
                raise FiberError(f"no point on the fibre conic for {tuple(Q)} over {F}")
            a, c = sol
        d = sub(t0, a)
        # tr(xy) = c - b + s0 d
        b = sub(add(c, mul(s0, d)), u0)
        y = (a, b, c, d)
    if G.det(x) != 1 or G.det(y) != 1 or G.pi2(x, y) != tuple(Q):
        raise FiberError(f"fibre construction failed for {tuple(Q)} over {F}")
    return x, y


def _solve_slot23(F: Field, a) -> tuple[Mat2, Mat2, Mat2]:
    """Preimage (x, y, u) of a point with L23 != 0."""
    x1, x2, x3, x12, x13, x23, x123 = a
    add, sub, mul, neg = F.add, F.sub, F.mul, F.neg
    two = F.elem(2)
    sol = F.solve_conic(1, 1, neg(x3), neg(x2), sub(mul(x2, x3), x23), 1)
    if sol is None:
        raise FiberError(f"determinant conic has no point for {tuple(a)}")
    al2, ga2 = sol
    A11 = sub(sub(mul(two, al2), mul(ga2, x3)), x2)
    A12 = sub(add(add(neg(mul(al2, x3)), mul(two, ga2)), mul(x2, x3)), x23)
    A21 = neg(A12)
    A22 = add(neg(mul(al2, mul(x3, x3))), mul(two, al2))
    A22 = add(A22, mul(ga2, x3))
    A22 = add(A22, mul(x2, mul(x3, x3)))
    A22 = sub(sub(A22, x2), mul(x3, x23))
    b1 = sub(mul(al2, x1), mul(ga2, mul(x1, x3)))
    b1 = add(add(b1, mul(ga2, x13)), sub(x12, mul(x1, x2)))
    b2 = sub(mul(al2, x13), mul(ga2, x1))
    b2 = add(sub(b2, mul(x2, x13)), x123)
    det = sub(mul(A11, A22), mul(A12, A21))
    if det == 0:
        raise FiberError(f"singular linear system for {tuple(a)}")
    al1 = F.div(sub(mul(A22, b1), mul(A12, b2)), det)
    ga1 = F.div(sub(mul(A11, b2), mul(A21, b1)), det)
    B1 = (al1, sub(add(sub(ga1, mul(al1, x3)), mul(x1, x3)), x13), ga1, sub(x1, al1))
    B2 = (al2, sub(add(sub(ga2, mul(al2, x3)), mul(x2, x3)), x23), ga2, sub(x2, al2))
    B3 = (0, 1, neg(1), x3)
    return B1, B2, B3


def _solve_case1(F: Field, a) -> tuple[Mat2, Mat2, Mat2] | None:
    """Preimage in (x, y, u) order when some L_ij is nonzero, else None."""
    a1, a2, a3, a12, a13, a23, a123 = a
    if L_value(F, a2, a3, a23) != 0:
        return _solve_slot23(F, a)
    a213 = reversed_triple_trace(F, a)
    if L_value(F, a1, a3, a13) != 0:
        # swap x and y
        B1, B2, B3 = _solve_slot23(F, (a2, a1, a3, a12, a23, a13, a213))
        return B2, B1, B3
    if L_value(F, a1, a2, a12) != 0:
        # swap x and u
        B1, B2, B3 = _solve_slot23(F, (a3, a2, a1, a23, a13, a12, a213))
        return B3, B2, B1
    return None


@functools.lru_cache(maxsize=None)
def _aut_polys(m: int):
    return F_phi(builtin_automorphism(m))


def aut_action(F: Field, m: int, a) -> tuple:
    """F_phi for the m-th built-in automorphism evaluated at a."""
    return tuple(p.eval(F, a) for p in _aut_polys(m))


# exceptional points, listed in (a1, a2, a3, a12, a13, a23, a123) order
EXCEPTIONAL_ODD = (
    (2, 2, 2, 2, 2, 2, 2),
    (0, -2, -2, 0, 0, 2, 0),
    (0, -2, 2, 0, 0, -2, 0),
    (0, 2, -2, 0, 0, -2, 0),
    (0, 2, 2, 0, 0, 2, 0),
    (0, 0, 0, -2, -2, -2, 0),
    (0, 0, 0, -2, 2, 2, 0),
    (0, 0, 0, 2, -2, 2, 0),
    (0, 0, 0, 2, 2, -2, 0),
)
EXCEPTIONAL_EVEN = (
    (0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 1, 1, 0, 1),
)


def exceptional_points(F: Field) -> set[tuple]:
    pts = EXCEPTIONAL_EVEN if F.p == 2 else EXCEPTIONAL_ODD
    return {tuple(F.elem(v) for v in pt) for pt in pts}


def _int_traces(x, y, u):
    def mul(m, n):
        return (m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
                m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3])

    tr = lambda m: m[0] + m[3]
    xy = mul(x, y)
    return (tr(x), tr(y), tr(u), tr(xy), tr(mul(x, u)), tr(mul(y, u)), tr(mul(xy, u)))


@functools.lru_cache(maxsize=None)
def exceptional_table(char: int) -> dict:
    """Integer matrix triples (x, y, u) over the exceptional points.

    For odd characteristic the triples are integral with entries in
    {-1, 0, 1}, so they reduce correctly modulo every odd prime.  For
    characteristic 2 the search runs over SL(2,2).
    """
    if char == 2:
        mats = [m for m in itertools.product(range(2), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % 2 == 1]
        targets = set(EXCEPTIONAL_EVEN)
        reduce = lambda t: tuple(v % 2 for v in t)
    else:
        mats = [m for m in itertools.product((-1, 0, 1), repeat=4) if m[0] * m[3] - m[1] * m[2] == 1]
        mats += [(-1, 0, 0, -1)]
        targets = set(EXCEPTIONAL_ODD)
        reduce = lambda t: t
    table = {
        (2, 2, 2, 2, 2, 2, 2): ((1, 0, 0, 1),) * 3,
        (0, -2, -2, 0, 0, 2, 0): ((0, -1, 1, 0), (-1, 0, 0, -1), (-1, 0, 0, -1)),
    } if char != 2 else {}
    for x, y, u in itertools.product(mats, repeat=3):
        if len(table) == len(targets):
            break
        t = reduce(_int_traces(x, y, u))
        if t in targets and t not in table:
            table[t] = (x, y, u)
    missing = targets - set(table)
    if missing:
        raise FiberError(f"no bounded preimage for exceptional points {sorted(missing)}")
    return table


def fiber3(F: Field, a) -> tuple[Mat2, Mat2, Mat2]:
    """(x, u, y) with pi3(x, u, y) = a for a point a on the hypersurface."""
    xyu = fiber3_xyu(F, a)
    return xyu[0], xyu[2], xyu[1]


def fiber3_xyu(F: Field, a) -> tuple[Mat2, Mat2, Mat2]:
    """Same as fiber3 but returned in generator order (x, y, u)."""
    a = tuple(a)
    if not on_Z(F, a):
        raise ValueError(f"{a} is not on the hypersurface over {F}")
    G = SL2(F)
    T, case = fiber3_case(F, a)
    if G.traces3(*T) != a or any(G.det(m) != 1 for m in T):
        raise FiberError(f"fibre construction ({case}) failed for {a} over {F}")
    return T


def fiber3_case(F: Field, a) -> tuple[tuple[Mat2, Mat2, Mat2], str]:
    """Preimage in generator order together with the branch used."""
    T = _solve_case1(F, a)
    if T is not None:
        return T, "case1"
    G = SL2(F)
    for m in range(1, 9):
        b = aut_action(F, m, a)
        T = _solve_case1(F, b)
        if T is not None:
            inv = builtin_automorphism_inverse(m)
            return tuple(evaluate(w, T, G) for w in inv), f"case2a:phi{m}"
    key = tuple(a)
    table = exceptional_table(F.p)
    for pt, trip in table.items():
        if tuple(F.elem(v) for v in pt) == key:
            return tuple(tuple(F.elem(v) for v in m) for m in trip), "case2b:table"
    T = torus_preimage(F, a)
    if T is not None:
        return T, "case2b:torus"
    raise FiberError(f"exceptional-point table miss at {a} over {F}")


def _matrix_order_divides(G: SL2, m: Mat2, n: int) -> bool:
    return _mat_pow(G, m, n) == G.one


def _mat_pow(G: SL2, m: Mat2, n: int) -> Mat2:
    out, base = G.one, m
    while n:
        if n & 1:
            out = G.mul(out, base)
        base = G.mul(base, base)
        n >>= 1
    return out


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _has_order(G: SL2, m: Mat2, n: int) -> bool:
    return _matrix_order_divides(G, m, n) and all(
        not _matrix_order_divides(G, m, n // r) for r in _prime_factors(n))


@functools.lru_cache(maxsize=None)
def tori(F: Field) -> tuple:
    """Generators of a split and a non-split maximal torus of SL(2,q), with orders."""
    G = SL2(F)
    q = F.q
    out = []
    if q > 3:
        g = F.generator if F.k > 1 else next(
            c for c in range(2, q) if all(F.pow(c, (q - 1) // r) != 1 for r in _prime_factors(q - 1)))
        out.append(((g, 0, 0, F.inv(g)), q - 1))
    for t in range(q):
        m = (0, F.neg(1), 1, t)
        if _has_order(G, m, q + 1):
            out.append((m, q + 1))
            break
    return tuple(out)


def torus_preimage(F: Field, a) -> tuple[Mat2, Mat2, Mat2] | None:
    """A commuting triple (x, y, u) inside a maximal torus with traces a, if any.

    Points where every L_ij and all their automorphic images vanish are
    characters of reducible triples; up to semisimplification such a triple
    lies in one torus, split or not according to the eigenvalue field.
    """
    G = SL2(F)
    a1, a2, a3, a12, a13, a23, a123 = a
    for gen, N in tori(F):
        pw = [G.one]
        for _ in range(N - 1):
            pw.append(G.mul(pw[-1], gen))
        tr = [G.trace(m) for m in pw]
        by_tr: dict = {}
        for n, v in enumerate(tr):
            by_tr.setdefault(v, []).append(n)
        for i in by_tr.get(a1, ()):
            for j in by_tr.get(a2, ()):
                if tr[(i + j) % N] != a12:
                    continue
                for k in by_tr.get(a3, ()):
                    if (tr[(i + k) % N], tr[(j + k) % N], tr[(i + j + k) % N]) == (a13, a23, a123):
                        return pw[i], pw[j], pw[k]
    return None


# polynomial identities behind the three-generator construction

QUAL_RING = Ring(("x1", "x2", "x3", "x12", "x13", "x23", "x123", "al2", "ga2"), "QUAL")


def qual_polys() -> dict[str, IntPoly]:
    x1, x2, x3, x12, x13, x23, x123, al2, ga2 = QUAL_RING.vars()
    D2 = (-al2 ** 2 + al2 * ga2 * x3 + al2 * x2 - ga2 ** 2 - ga2 * x2 * x3
          + ga2 * x23 - 1)
    A11 = 2 * al2 - ga2 * x3 - x2
    A12 = -al2 * x3 + 2 * ga2 + x2 * x3 - x23
    A21 = al2 * x3 - 2 * ga2 - x2 * x3 + x23
    A22 = -al2 * x3 ** 2 + 2 * al2 + ga2 * x3 + x2 * x3 ** 2 - x2 - x3 * x23
    b1 = al2 * x1 - ga2 * x1 * x3 + ga2 * x13 - x1 * x2 + x12
    b2 = al2 * x13 - ga2 * x1 - x2 * x13 + x123
    L23 = x2 ** 2 + x3 ** 2 + x23 ** 2 - x2 * x3 * x23 - 4
    detA = A11 * A22 - A12 * A21
    r = A22 * b1 - A12 * b2
    s = A11 * b2 - A21 * b1
    return dict(D2=D2, A11=A11, A12=A12, A21=A21, A22=A22, b1=b1, b2=b2,
                L23=L23, detA=detA, r=r, s=s)


def qual_F(y1: IntPoly, y2: IntPoly) -> IntPoly:
    x1, x2, x3, x12, x13, x23, x123, al2, ga2 = QUAL_RING.vars()
    L = x2 ** 2 + x3 ** 2 + x23 ** 2 - x2 * x3 * x23 - 4
    return (-y1 ** 2 + y1 * y2 * x3 + y1 * L * x1 - y2 ** 2 - y2 * L * x1 * x3
            + y2 * L * x13 - L ** 2)


def qual_F_value(F: Field, a, al2: int, ga2: int) -> int:
    """F(r, s) at a point of the hypersurface and a point of D2 = 0."""
    P = qual_polys()
    pt = tuple(a) + (al2, ga2)
    rv, sv = P["r"].eval(F, pt), P["s"].eval(F, pt)
    x1, x2, x3, x12, x13, x23, x123 = a
    L = L_value(F, x2, x3, x23)
    m, ad, sb = F.mul, F.add, F.sub
    v = sb(m(m(rv, sv), x3), m(rv, rv))
    v = ad(v, m(m(rv, L), x1))
    v = sb(v, m(sv, sv))
    v = sb(v, m(m(sv, L), m(x1, x3)))
    v = ad(v, m(m(sv, L), x13))
    return sb(v, m(L, L))
