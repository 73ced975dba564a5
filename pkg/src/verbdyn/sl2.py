"""SL(2,q) arithmetic and the trace projections.

A matrix [[a, b], [c, d]] is the tuple (a, b, c, d) of field elements.
"""

from __future__ import annotations

from typing import NamedTuple

from .gf import Field, GF
from .words import Word, evaluate, parse

Mat2 = tuple


class TraceTriple(NamedTuple):
    s: int  # tr x
    u: int  # tr xy
    t: int  # tr y


class ZPoint(NamedTuple):
    a1: int
    a2: int
    a3: int
    a12: int
    a13: int
    a23: int
    a123: int


class SL2:
    """Group interface for SL(2,q), usable by words.evaluate."""

    def __init__(self, field: Field):
        self.F = field
        self.one = (1, 0, 0, 1)

    def identity(self) -> Mat2:
        return self.one

    def mul(self, x: Mat2, y: Mat2) -> Mat2:
        F = self.F
        a, b, c, d = x
        e, f, g, h = y
        if F.k == 1:
            p = F.p
            return ((a * e + b * g) % p, (a * f + b * h) % p,
                    (c * e + d * g) % p, (c * f + d * h) % p)
        m, ad = F.mul, F.add
        return (ad(m(a, e), m(b, g)), ad(m(a, f), m(b, h)),
                ad(m(c, e), m(d, g)), ad(m(c, f), m(d, h)))

    def inv(self, x: Mat2) -> Mat2:
        a, b, c, d = x
        n = self.F.neg
        return (d, n(b), n(c), a)

    def trace(self, x: Mat2) -> int:
        return self.F.add(x[0], x[3])

    def det(self, x: Mat2) -> int:
        F = self.F
        return F.sub(F.mul(x[0], x[3]), F.mul(x[1], x[2]))

    def neg(self, x: Mat2) -> Mat2:
        return tuple(self.F.neg(v) for v in x)

    def scalar(self, c: int) -> Mat2:
        c = self.F.elem(c)
        return (c, 0, 0, c)

    def commutator(self, x: Mat2, y: Mat2) -> Mat2:
        return self.mul(self.mul(x, y), self.mul(self.inv(x), self.inv(y)))

    def is_central(self, x: Mat2) -> bool:
        return x[1] == 0 and x[2] == 0 and x[0] == x[3]

    def eval(self, w: Word, elems) -> Mat2:
        return evaluate(w, elems, self)

    def pi2(self, x: Mat2, y: Mat2) -> TraceTriple:
        return TraceTriple(self.trace(x), self.trace(self.mul(x, y)), self.trace(y))

    def traces3(self, x: Mat2, y: Mat2, u: Mat2) -> ZPoint:
        """Character coordinates of (x, y, u) in generator order."""
        tr, mul = self.trace, self.mul
        xy = mul(x, y)
        return ZPoint(tr(x), tr(y), tr(u), tr(xy), tr(mul(x, u)),
                      tr(mul(y, u)), tr(mul(xy, u)))

    def pi3(self, x: Mat2, u: Mat2, y: Mat2) -> ZPoint:
        """Projection with the argument order (x, u, y)."""
        return self.traces3(x, y, u)

    def random(self, rng) -> Mat2:
        F = self.F
        while True:
            a, b, c = (rng.randrange(F.q) for _ in range(3))
            if a != 0:
                # d = (1 + bc) / a
                d = F.div(F.add(1, F.mul(b, c)), a)
                return (a, b, c, d)
            if b != 0:
                c = F.neg(F.inv(b))
                d = rng.randrange(F.q)
                return (0, b, c, d)

    def elements(self, bound: int = 128):
        return enumerate_sl2(self.F.q, bound)

    def index(self, x: Mat2) -> int:
        """Lexicographic rank of x among the elements of SL(2,q)."""
        return self._index_map[x]

    @property
    def _index_map(self):
        if not hasattr(self, "_idx"):
            self._elts = list(enumerate_sl2(self.F.q, bound=1 << 12))
            self._idx = {m: i for i, m in enumerate(self._elts)}
        return self._idx

    def element(self, i: int) -> Mat2:
        self._index_map
        return self._elts[i]

    def order(self) -> int:
        q = self.F.q
        return q * (q * q - 1)

    def render(self, x: Mat2) -> str:
        r = self.F.render
        return f"[[{r(x[0])},{r(x[1])}],[{r(x[2])},{r(x[3])}]]"

    def parse(self, text: str) -> Mat2:
        """Matrix literal "[[a,b],[c,d]]" with integer entries."""
        body = text.replace("[", " ").replace("]", " ").replace(",", " ").split()
        if len(body) != 4:
            raise ValueError(f"bad matrix literal {text!r}")
        m = tuple(self.F.parse_element(v) for v in body)
        if self.det(m) != 1:
            raise ValueError(f"matrix {text!r} does not have determinant 1")
        return m


_SL2_CACHE: dict[int, SL2] = {}


def sl2(q: int) -> SL2:
    if q not in _SL2_CACHE:
        _SL2_CACHE[q] = SL2(GF(q))
    return _SL2_CACHE[q]


def enumerate_sl2(q: int, bound: int = 128):
    """All q(q^2-1) elements in lexicographic order of (a, b, c, d)."""
    if q > bound:
        raise ValueError(f"q={q} exceeds bound {bound}")
    F = GF(q)
    for a in range(q):
        for b in range(q):
            for c in range(q):
                if a != 0:
                    d = F.div(F.add(1, F.mul(b, c)), a)
                    yield (a, b, c, d)
                elif F.mul(b, c) == F.neg(1):
                    for d in range(q):
                        yield (a, b, c, d)


def hha1_value(F: Field, a) -> int:
    """Left side of the hypersurface relation among the seven coordinates."""
    a1, a2, a3, a12, a13, a23, a123 = a
    m, ad, sb = F.mul, F.add, F.sub
    S = sb(ad(ad(m(a12, a3), m(a13, a2)), m(a23, a1)), m(m(a1, a2), a3))
    R = 0
    for v in (a1, a2, a3, a12, a13, a23):
        R = ad(R, m(v, v))
    R = sb(R, m(m(a1, a2), a12))
    R = sb(R, m(m(a1, a3), a13))
    R = sb(R, m(m(a2, a3), a23))
    R = ad(R, m(m(a12, a13), a23))
    R = sb(R, F.elem(4))
    return ad(sb(m(a123, a123), m(a123, S)), R)


def on_Z(F: Field, a) -> bool:
    return hha1_value(F, a) == 0


def reversed_triple_trace(F: Field, a) -> int:
    """tr(y x u) from the seven coordinates of (x, y, u)."""
    a1, a2, a3, a12, a13, a23, a123 = a
    m, ad, sb = F.mul, F.add, F.sub
    S = sb(ad(ad(m(a12, a3), m(a13, a2)), m(a23, a1)), m(m(a1, a2), a3))
    return sb(S, a123)


def L_value(F: Field, x1: int, x2: int, x12: int) -> int:
    """x1^2 + x2^2 + x12^2 - x1 x2 x12 - 4: zero iff the pair is reducible."""
    m, ad = F.mul, F.add
    v = ad(ad(m(x1, x1), m(x2, x2)), m(x12, x12))
    return F.sub(F.sub(v, m(m(x1, x2), x12)), F.elem(4))


def enumerate_Z(q: int, bound: int = 32):
    """All F_q-points of the hypersurface, each root in a123 once."""
    import numpy as np

    if q > bound:
        raise ValueError(f"q={q} exceeds bound {bound}")
    F = GF(q)
    grid = np.arange(q, dtype=np.int64)
    g4 = np.array(np.meshgrid(grid, grid, grid, grid, indexing="ij")).reshape(4, -1)
    a3, a12, a13, a23 = g4
    m, ad, sb = F.vmul, F.vadd, F.vsub
    four = F.elem(4)
    sq = F.sqrt_table
    for a1 in range(q):
        for a2 in range(q):
            A1 = np.full_like(a3, a1)
            A2 = np.full_like(a3, a2)
            S = sb(ad(ad(m(a12, a3), m(a13, A2)), m(a23, A1)), m(m(A1, A2), a3))
            R = ad(ad(ad(m(A1, A1), m(A2, A2)), ad(m(a3, a3), m(a12, a12))),
                   ad(m(a13, a13), m(a23, a23)))
            R = sb(R, ad(ad(m(m(A1, A2), a12), m(m(A1, a3), a13)), m(m(A2, a3), a23)))
            R = sb(ad(R, m(m(a12, a13), a23)), np.full_like(R, four))
            # z^2 - S z + R = 0
            if F.p == 2:
                roots = _char2_roots(F, S, R)
            else:
                disc = sb(m(S, S), m(np.full_like(R, four), R))
                w = sq[disc]
                ok = w >= 0
                half = F.inv(2)
                r1 = m(ad(S, np.where(ok, w, 0)), np.full_like(S, half))
                r2 = m(sb(S, np.where(ok, w, 0)), np.full_like(S, half))
                roots = [(ok, r1), (ok & (r1 != r2), r2)]
            rows = []
            for mask, r in roots:
                idx = np.nonzero(mask)[0]
                for j, root in zip(idx.tolist(), r[idx].tolist()):
                    rows.append((j, root))
            rows.sort()
            for j, root in rows:
                yield ZPoint(a1, a2, int(a3[j]), int(a12[j]), int(a13[j]), int(a23[j]), root)


def _char2_roots(F: Field, S, R):
    import numpy as np

    sq, AS = F.sqrt_table, F.artin_schreier_table
    m = F.vmul
    zero = S == 0
    # S = 0: double root sqrt(R)
    r0 = sq[R]
    # S != 0: z = S w with w^2 + w = R / S^2
    Ssafe = np.where(zero, 1, S)
    inv = F._np_exp[(F.q - 1 - F._np_log[Ssafe]) % (F.q - 1)] if F.k > 1 else Ssafe
    inv2 = m(inv, inv)
    c = m(R, inv2)
    w = AS[c]
    ok = (~zero) & (w >= 0)
    wsafe = np.where(w >= 0, w, 0)
    r1 = m(S, wsafe)
    r2 = F.vadd(r1, S)
    return [(zero, r0), (ok, r1), (ok, r2)]


# PSL(3,3)

def _mul3(x, y, p=3):
    return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(3)) % p for j in range(3))
                 for i in range(3))


def _det3(x, p=3):
    return (x[0][0] * (x[1][1] * x[2][2] - x[1][2] * x[2][1])
            - x[0][1] * (x[1][0] * x[2][2] - x[1][2] * x[2][0])
            + x[0][2] * (x[1][0] * x[2][1] - x[1][1] * x[2][0])) % p


def _inv3(x, p=3):
    d = _det3(x, p)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    di = pow(d, -1, p)
    cof = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            minor = [[x[r][c] for c in range(3) if c != j] for r in range(3) if r != i]
            cof[i][j] = (-1) ** (i + j) * (minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0])
    return tuple(tuple(cof[j][i] * di % p for j in range(3)) for i in range(3))


class GL3F3:
    def identity(self):
        return ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def mul(self, x, y):
        return _mul3(x, y)

    def inv(self, x):
        return _inv3(x)


PSL33_X = ((2, 0, 0), (0, 0, 1), (0, 1, 2))
PSL33_Y = ((0, 2, 2), (1, 2, 1), (0, 2, 0))


def equal_up_to_scalar(x, y, p=3) -> bool:
    for lam in range(1, p):
        if all(x[i][j] == lam * y[i][j] % p for i in range(3) for j in range(3)):
            return True
    return False


BWW_STEP = "[y^-1 x y, x^-1]"
THETA_STEP = "[y^2 x y^-2, x^-1]"


def word_sequence(x, y, n: int, ops, step: str = BWW_STEP) -> list:
    """s_1 = x, s_k = step(s_{k-1}, y)."""
    w = parse(step, 2)
    out = [x]
    for _ in range(n - 1):
        out.append(evaluate(w, (out[-1], y), ops))
    return out


def psl33_word_check(x=PSL33_X, y=PSL33_Y, step: str = THETA_STEP) -> bool:
    """Whether s_1 = s_4 in PSL(3,3) for the theta step x -> [y^2 x y^-2, x^-1]."""
    seq = word_sequence(x, y, 4, GL3F3(), step)
    return equal_up_to_scalar(seq[0], seq[3])
