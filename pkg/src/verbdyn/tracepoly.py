"""Trace polynomials of words in SL(2) and the induced trace maps.

Two coordinate rings are used.  RING2 has variables (s, t, u) standing for
(tr x, tr y, tr xy).  RING7 has (a1, a2, a3, a12, a13, a23, a123) for the
triple (x, y, u); polynomials in RING7 are kept linear in a123 by reducing
with the quadratic relation the seven traces satisfy.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf import Field
from .words import Word, parse, substitute


class Ring:
    def __init__(self, names: Sequence[str], label: str):
        self.names = tuple(names)
        self.n = len(names)
        self.label = label
        self.relation = None  # (index, S, R): v^2 = S v - R

    def __repr__(self):
        return f"Ring({self.label})"

    def var(self, name: str) -> "IntPoly":
        i = self.names.index(name)
        e = [0] * self.n
        e[i] = 1
        return IntPoly(self, {tuple(e): 1})

    def vars(self):
        return tuple(self.var(nm) for nm in self.names)

    def const(self, c: int) -> "IntPoly":
        return IntPoly(self, {(0,) * self.n: c} if c else {})


RING2 = Ring(("s", "t", "u"), "VARS2")
RING7 = Ring(("a1", "a2", "a3", "a12", "a13", "a23", "a123"), "VARS7")


class IntPoly:
    """Sparse polynomial with integer coefficients over a Ring."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict | None = None):
        self.ring = ring
        self.terms = {k: v for k, v in (terms or {}).items() if v}
        self._hash = None

    # arithmetic

    def _coerce(self, o) -> "IntPoly":
        if isinstance(o, IntPoly):
            if o.ring is not self.ring:
                raise ValueError("ring mismatch")
            return o
        if isinstance(o, int):
            return self.ring.const(o)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return IntPoly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        t: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                t[k] = t.get(k, 0) + v1 * v2
        return IntPoly(self.ring, t)._normalize()

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = self.ring.const(1)
        for _ in range(e):
            out = out * self
        return out

    def _normalize(self) -> "IntPoly":
        rel = self.ring.relation
        if rel is None:
            return self
        idx, S, R = rel
        while any(k[idx] >= 2 for k in self.terms):
            t: dict = {}
            for k, v in self.terms.items():
                if k[idx] < 2:
                    t[k] = t.get(k, 0) + v
                    continue
                # v^2 * m -> (S v - R) * m
                base = list(k)
                base[idx] -= 2
                for sk, sv in S.items():
                    kk = [a + b for a, b in zip(base, sk)]
                    kk[idx] += 1
                    kk = tuple(kk)
                    t[kk] = t.get(kk, 0) + v * sv
                for rk, rv in R.items():
                    kk = tuple(a + b for a, b in zip(base, rk))
                    t[kk] = t.get(kk, 0) - v * rv
            self.terms = {k: v for k, v in t.items() if v}
        self._hash = None
        return self

    def __eq__(self, o):
        if isinstance(o, int):
            o = self.ring.const(o)
        if not isinstance(o, IntPoly):
            return NotImplemented
        return self.ring is o.ring and self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.label, frozenset(self.terms.items())))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def __len__(self):
        return len(self.terms)

    # rendering

    def sorted_terms(self):
        # graded lexicographic: higher total degree first, then by exponent
        # of the earliest variable
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.sorted_terms():
            mono = "*".join(nm if e == 1 else f"{nm}^{e}"
                            for nm, e in zip(self.ring.names, k) if e)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __repr__ = __str__

    # evaluation

    def eval(self, F: Field, point: Sequence[int]) -> int:
        if len(point) != self.ring.n:
            raise ValueError(f"expected {self.ring.n} coordinates")
        return self.compile(F)(*point)

    def compile(self, F: Field):
        """A fast callable evaluating the polynomial at field points."""
        key = (F.p, F.k)
        cache = _COMPILED.setdefault(id(self), {})
        if key in cache and cache[key][0] is self:
            return cache[key][1]
        args = [f"v{i}" for i in range(self.ring.n)]
        if F.k == 1 and len(self.terms) > 200:
            p = F.p
            items = [(tuple(k), c % p) for k, c in self.terms.items()]

            def fn(*pt, _items=items, _p=p):
                acc = 0
                powcache: dict = {}
                for k, c in _items:
                    term = c
                    for i, e in enumerate(k):
                        if e:
                            key2 = (i, e)
                            if key2 not in powcache:
                                powcache[key2] = pow(pt[i], e, _p)
                            term = term * powcache[key2] % _p
                    acc += term
                return acc % _p
        elif F.k == 1:
            p = F.p
            terms = []
            for k, c in self.terms.items():
                factors = [str(c % p)] + [f"v{i}" if e == 1 else f"v{i}**{e}"
                                          for i, e in enumerate(k) if e]
                terms.append("*".join(factors))
            src = f"lambda {','.join(args)}: ({' + '.join(terms) or '0'}) % {p}"
            fn = eval(src)
        else:
            items = [(tuple(k), c % F.p) for k, c in self.terms.items()]

            def fn(*pt, _items=items, _F=F):
                acc = 0
                powcache: dict = {}
                for k, c in _items:
                    term = c
                    for i, e in enumerate(k):
                        if e:
                            key2 = (i, e)
                            if key2 not in powcache:
                                powcache[key2] = _F.pow(pt[i], e)
                            term = _F.mul(term, powcache[key2])
                    acc = _F.add(acc, term)
                return acc
        cache[key] = (self, fn)
        return fn

    def eval_array(self, F: Field, arrays: Sequence[np.ndarray]) -> np.ndarray:
        """Evaluate at many points at once; arrays hold one coordinate each."""
        arrays = np.broadcast_arrays(*[np.asarray(a, dtype=np.int64) for a in arrays])
        shape = arrays[0].shape
        acc = np.zeros(shape, dtype=np.int64)
        powers: dict = {}

        def pw(i, e):
            if (i, e) not in powers:
                powers[(i, e)] = arrays[i] if e == 1 else F.vmul(pw(i, e - 1), arrays[i])
            return powers[(i, e)]

        for k, c in self.terms.items():
            term = np.full(shape, F.elem(c), dtype=np.int64)
            for i, e in enumerate(k):
                if e:
                    term = F.vmul(term, pw(i, e))
            acc = F.vadd(acc, term)
        return acc

    def compose(self, subs: Sequence["IntPoly"]) -> "IntPoly":
        """Substitute subs[i] for the i-th variable."""
        if len(subs) != self.ring.n:
            raise ValueError("arity mismatch in compose")
        target = subs[0].ring
        out = target.const(0)
        powers: dict = {}

        def pw(i, e):
            if (i, e) not in powers:
                powers[(i, e)] = subs[i] if e == 1 else pw(i, e - 1) * subs[i]
            return powers[(i, e)]

        for k, c in self.terms.items():
            term = target.const(c)
            for i, e in enumerate(k):
                if e:
                    term = term * pw(i, e)
            out = out + term
        return out


_COMPILED: dict = {}


def _relation():
    a1, a2, a3, a12, a13, a23, a123 = RING7.vars()
    S = a12 * a3 + a13 * a2 + a23 * a1 - a1 * a2 * a3
    R = (a1 ** 2 + a2 ** 2 + a3 ** 2 + a12 ** 2 + a13 ** 2 + a23 ** 2
         - a1 * a2 * a12 - a1 * a3 * a13 - a2 * a3 * a23 + a12 * a13 * a23 - 4)
    return S, R


_S7, _R7 = _relation()
RING7.relation = (6, dict(_S7.terms), dict(_R7.terms))


def hypersurface_poly() -> tuple[IntPoly, IntPoly]:
    """(S, R) with a123^2 - S a123 + R the defining relation."""
    return _S7, _R7


def L_poly(i: int, j: int) -> IntPoly:
    """L_ij = x_i^2 + x_j^2 + x_ij^2 - x_i x_j x_ij - 4 in RING7 (1-based i < j)."""
    v = dict(zip(RING7.names, RING7.vars()))
    xi, xj, xij = v[f"a{i}"], v[f"a{j}"], v[f"a{i}{j}"]
    return xi ** 2 + xj ** 2 + xij ** 2 - xi * xj * xij - 4


# trace engine


def _cyclic_reduce(letters) -> tuple:
    w = []
    for g, e in letters:
        if e == 0:
            continue
        if w and w[-1][0] == g:
            e += w[-1][1]
            w.pop()
            if e:
                w.append((g, e))
        else:
            w.append((g, e))
    while len(w) >= 2 and w[0][0] == w[-1][0]:
        g, e0 = w[0]
        e = e0 + w[-1][1]
        w = w[1:-1]
        if e:
            if w and w[0][0] == g:
                # cannot happen for freely reduced input, kept for safety
                w[0] = (g, w[0][1] + e)
            else:
                w.insert(0, (g, e))
        return _cyclic_reduce(w)
    return tuple(w)


def _canonical(w: tuple) -> tuple:
    inv = tuple((g, -e) for g, e in reversed(w))
    cands = []
    for v in (w, inv):
        for i in range(len(v)):
            r = v[i:] + v[:i]
            cands.append((sum(1 for _, e in r if e < 0), r))
    return min(cands)[1]


class _Engine:
    def __init__(self, n: int):
        self.n = n
        self.ring = RING2 if n == 2 else RING7
        self.memo: dict = {}
        vs = self.ring.vars()
        if n == 2:
            s, t, u = vs
            self.gens = (s, t)
            self.base = {((0, 1), (1, 1)): u}
        else:
            a1, a2, a3, a12, a13, a23, a123 = vs
            self.gens = (a1, a2, a3)
            a213 = _S7 - a123
            self.base = {
                ((0, 1), (1, 1)): a12,
                ((0, 1), (2, 1)): a13,
                ((1, 1), (2, 1)): a23,
                ((0, 1), (1, 1), (2, 1)): a123,
                ((0, 1), (2, 1), (1, 1)): a213,
            }
        self.cheb: dict = {}

    def chebyshev(self, g: int, e: int) -> IntPoly:
        e = abs(e)
        key = (g, e)
        if key not in self.cheb:
            t = self.gens[g]
            if e == 0:
                val = self.ring.const(2)
            elif e == 1:
                val = t
            else:
                val = t * self.chebyshev(g, e - 1) - self.chebyshev(g, e - 2)
            self.cheb[key] = val
        return self.cheb[key]

    def trace(self, letters) -> IntPoly:
        w = _cyclic_reduce(letters)
        if not w:
            return self.ring.const(2)
        key = _canonical(w)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._compute(key)
            self.memo[key] = hit
        return hit

    def _compute(self, w: tuple) -> IntPoly:
        if len(w) == 1:
            return self.chebyshev(*w[0])
        for i, (g, e) in enumerate(w):
            if e < 0:
                rest = w[i + 1:] + w[:i]
                # g^-1 = tr(g) - g
                return (self.gens[g] * self.trace(((g, e + 1),) + rest)
                        - self.trace(((g, e + 2),) + rest))
        for i, (g, e) in enumerate(w):
            if e >= 2:
                rest = w[i + 1:] + w[:i]
                return (self.gens[g] * self.trace(((g, e - 1),) + rest)
                        - self.trace(((g, e - 2),) + rest))
        gens = [g for g, _ in w]
        for i, g in enumerate(gens):
            if g in gens[i + 1:]:
                j = gens.index(g, i + 1)
                P = w[i + 1:j]
                Q = w[j + 1:] + w[:i]
                Qinv = tuple((h, -f) for h, f in reversed(Q))
                # tr(gPgQ) = tr(gP) tr(gQ) - tr(P Q^-1)
                return (self.trace(((g, 1),) + P) * self.trace(((g, 1),) + Q)
                        - self.trace(P + Qinv))
        if w in self.base:
            return self.base[w]
        raise AssertionError(f"no rewriting rule for {w}")


@functools.lru_cache(maxsize=None)
def _engine(n: int) -> _Engine:
    return _Engine(n)


def trace_of_word2(w: Word) -> IntPoly:
    if w.n != 2:
        raise ValueError("trace_of_word2 needs a word over 2 generators")
    return _engine(2).trace(w.letters)


def trace_of_word3(w: Word) -> IntPoly:
    if w.n != 3:
        raise ValueError("trace_of_word3 needs a word over 3 generators")
    return _engine(3).trace(w.letters)


def trace_of_word(w: Word) -> IntPoly:
    return trace_of_word2(w) if w.n == 2 else trace_of_word3(w)


X2, Y2 = Word.gen(0, 2), Word.gen(1, 2)
X3, Y3, U3 = Word.gen(0, 3), Word.gen(1, 3), Word.gen(2, 3)


@dataclass(frozen=True)
class TraceMap2:
    """(s, u, t) -> (f1, f2, t)."""

    f1: IntPoly
    f2: IntPoly

    def __call__(self, F: Field, point) -> tuple[int, int, int]:
        s, u, t = point
        pt = (s, t, u)  # ring order
        return self.f1.eval(F, pt), self.f2.eval(F, pt), t


@dataclass(frozen=True)
class TraceMap3:
    """a -> (a1, a2, l1, a12, l2, l3, l4)."""

    l1: IntPoly
    l2: IntPoly
    l3: IntPoly
    l4: IntPoly

    def __call__(self, F: Field, a) -> tuple:
        a = tuple(a)
        return (a[0], a[1], self.l1.eval(F, a), a[3], self.l2.eval(F, a),
                self.l3.eval(F, a), self.l4.eval(F, a))


def build_map2(phi: Word) -> TraceMap2:
    return TraceMap2(trace_of_word2(phi), trace_of_word2(phi * Y2))


def build_map3(v: Word) -> TraceMap3:
    return TraceMap3(trace_of_word3(v), trace_of_word3(v * X3),
                     trace_of_word3(v * Y3), trace_of_word3(v * X3 * Y3))


_BASIS7 = ("x", "y", "u", "x y", "x u", "y u", "x y u")


def F_phi(images: Sequence[Word]) -> tuple[IntPoly, ...]:
    """Trace polynomials of the images of X, Y, Z, XY, XZ, YZ, XYZ."""
    return tuple(trace_of_word3(substitute(parse(b, 3), images)) for b in _BASIS7)


def apply_polys(F: Field, polys: Sequence[IntPoly], point) -> tuple:
    return tuple(p.eval(F, point) for p in polys)


def embed2to7(p: IntPoly) -> IntPoly:
    """Rename (s, t, u) = (tr x, tr y, tr xy) to (a1, a2, a12)."""
    a1, a2, _, a12, _, _, _ = RING7.vars()
    return p.compose((a1, a2, a12))


def initial_locus(w: Word) -> tuple[IntPoly, IntPoly, IntPoly, IntPoly]:
    """(g3, g13, g23, g123): traces of w, wx, wy, wxy in (a1, a2, a12)."""
    if w.n != 2:
        raise ValueError("initial word must be over 2 generators")
    polys = (w, w * X2, w * Y2, w * X2 * Y2)
    return tuple(embed2to7(trace_of_word2(p)) for p in polys)


def bww_word() -> Word:
    return parse("[y x y^-1, x^-1]", 2)


def commutator_word() -> Word:
    return parse("[x,y]", 2)


def theta_word() -> Word:
    return parse("[y^2 x y^-2, x^-1]", 2)


def three_var_word() -> Word:
    return parse("[x u x^-1, y u y^-1]", 3)
