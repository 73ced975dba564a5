"""Sz(q), q = 2^(2m+1), as 4x4 matrices: Bruhat cells, the kappa projection, orbit scans."""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynsys import EndoSystem, OrbitReport, cycle_structure
from .gf import GF, Field
from .words import Word, evaluate, parse

Mat4 = tuple  # 16 entries, row-major


class SuzukiError(ValueError):
    pass


@dataclass(frozen=True)
class SzParams:
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise SuzukiError("m must be at least 1")
        if math.gcd(self.s + 2, self.q - 1) != 1:
            raise SuzukiError(f"gcd(s+2, q-1) != 1 for m={self.m}")

    @property
    def q(self) -> int:
        return 2 ** (2 * self.m + 1)

    @property
    def s(self) -> int:
        return 2 ** (self.m + 1)


@dataclass(frozen=True)
class SzElt:
    mat: Mat4
    q: int
    provenance: str = "generators"

    def row(self, i: int) -> tuple:
        return self.mat[4 * i:4 * i + 4]

    def __getitem__(self, ij):
        i, j = ij
        return self.mat[4 * i + j]


class Cell1(NamedTuple):
    a: int
    b: int
    k: int


class Cell2(NamedTuple):
    a: int
    b: int
    k: int
    c: int
    d: int


W_PERM = (0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0)


class Suzuki:
    """Group operations in Sz(q) for q = 2^(2m+1)."""

    def __init__(self, m: int):
        self.params = SzParams(m)
        self.q, self.s = self.params.q, self.params.s
        self.F: Field = GF(self.q)

    def __repr__(self):
        return f"Sz({self.q})"

    # constructors
    def _elt(self, mat, provenance="generators") -> SzElt:
        return SzElt(tuple(mat), self.q, provenance)

    def t_mat(self, a: int, b: int) -> SzElt:
        F, s = self.F, self.s
        p, m, ad = F.pow, F.mul, F.add
        return self._elt((
            1, 0, 0, 0,
            a, 1, 0, 0,
            ad(p(a, 1 + s), b), p(a, s), 1, 0,
            ad(ad(p(a, 2 + s), m(a, b)), p(b, s)), b, a, 1,
        ))

    def d_mat(self, k: int) -> SzElt:
        if k == 0:
            raise SuzukiError("D(k) needs k != 0")
        F, h = self.F, self.s // 2
        return self._elt((
            F.pow(k, h + 1), 0, 0, 0,
            0, F.pow(k, h), 0, 0,
            0, 0, F.pow(k, -h), 0,
            0, 0, 0, F.pow(k, -h - 1),
        ))

    def w_mat(self) -> SzElt:
        return self._elt(W_PERM)

    def identity(self) -> SzElt:
        return self.t_mat(0, 0)

    # arithmetic
    def mul(self, x: SzElt, y: SzElt) -> SzElt:
        if x.q != self.q or y.q != self.q:
            raise SuzukiError("elements from different groups")
        F = self.F
        A, B = x.mat, y.mat
        out = []
        for i in range(4):
            for j in range(4):
                v = 0
                for k in range(4):
                    v ^= F.mul(A[4 * i + k], B[4 * k + j])
                out.append(v)
        return self._elt(out)

    def inv(self, x: SzElt) -> SzElt:
        # the group preserves the form with Gram matrix w, so x^-1 = w x^T w
        A = x.mat
        return self._elt(tuple(A[4 * (3 - j) + (3 - i)] for i in range(4) for j in range(4)))

    def prod(self, *xs: SzElt) -> SzElt:
        out = self.identity()
        for x in xs:
            out = self.mul(out, x)
        return out

    def det(self, x: SzElt) -> int:
        F = self.F
        M = [list(x.row(i)) for i in range(4)]
        det = 1
        for c in range(4):
            piv = next((r for r in range(c, 4) if M[r][c]), None)
            if piv is None:
                return 0
            M[c], M[piv] = M[piv], M[c]
            det = F.mul(det, M[c][c])
            inv = F.inv(M[c][c])
            for r in range(c + 1, 4):
                f = F.mul(M[r][c], inv)
                if f:
                    M[r] = [M[r][j] ^ F.mul(f, M[c][j]) for j in range(4)]
        return det

    # Bruhat decomposition
    def is_lower(self, x: SzElt) -> bool:
        return all(x[i, j] == 0 for i in range(4) for j in range(i + 1, 4))

    def _cell1(self, L: SzElt) -> Cell1:
        F = self.F
        k = F.div(L[0, 0], L[1, 1])
        a = F.div(L[1, 0], L[0, 0])
        b = F.div(L[3, 1], L[1, 1])
        return Cell1(a, b, k)

    def bruhat(self, x: SzElt) -> Cell1 | Cell2:
        F = self.F
        if self.is_lower(x):
            cell = self._cell1(x)
        else:
            # x w = (T(a,b) D(k)) (w T(c,d) w), a lower times upper unitriangular
            xw = self.mul(x, self.w_mat())
            if xw[0, 0] == 0:
                raise SuzukiError("matrix is in neither Bruhat cell")
            c = F.div(xw[0, 1], xw[0, 0])
            d = F.div(xw[0, 2], xw[0, 0])
            L = self.mul(x, self.inv(self.mul(self.w_mat(), self.t_mat(c, d))))
            if not self.is_lower(L):
                raise SuzukiError("Bruhat decomposition failed")
            a, b, k = self._cell1(L)
            cell = Cell2(a, b, k, c, d)
        if self.compose(cell).mat != x.mat:
            raise SuzukiError(f"Bruhat recomposition mismatch for {cell}")
        return cell

    def compose(self, cell) -> SzElt:
        if isinstance(cell, Cell2):
            return self.prod(self.t_mat(cell.a, cell.b), self.d_mat(cell.k), self.w_mat(),
                             self.t_mat(cell.c, cell.d))
        return self.mul(self.t_mat(cell.a, cell.b), self.d_mat(cell.k))

    # kappa projection
    def projection(self, x: SzElt) -> tuple[int, int, int]:
        """(pi1, pi2, k) = (a + c, c a^s + b + d, k) for x in the big cell."""
        cell = self.bruhat(x)
        if not isinstance(cell, Cell2):
            raise SuzukiError("x lies in the first Bruhat cell")
        F = self.F
        a, b, k, c, d = cell
        return F.add(a, c), F.add(F.add(F.mul(c, F.pow(a, self.s)), b), d), k

    def kappa(self, x: SzElt) -> SzElt:
        p1, p2, k = self.projection(x)
        return self.prod(self.t_mat(p1, p2), self.d_mat(k), self.w_mat())

    def kappa_by_conjugation(self, x: SzElt) -> SzElt:
        cell = self.bruhat(x)
        if not isinstance(cell, Cell2):
            raise SuzukiError("x lies in the first Bruhat cell")
        z = self.t_mat(cell.c, cell.d)
        return self.prod(z, x, self.inv(z))

    def word_map(self, phi: Word, x: SzElt, y: SzElt) -> SzElt:
        return evaluate(phi, (x, y), self)

    def fgh_step(self, y: SzElt, x: SzElt, phi: Word) -> tuple[int, int, int]:
        """(pi1, pi2, k) of phi_y(x)."""
        z = self.word_map(phi, x, y)
        if z.mat == self.identity().mat:
            raise SuzukiError("phi_y(x) is the identity")
        return self.projection(z)

    def random(self, rng: random.Random) -> SzElt:
        q = self.q
        if rng.random() < 1 / q:
            return self.compose(Cell1(rng.randrange(q), rng.randrange(q), rng.randrange(1, q)))
        return self.compose(Cell2(rng.randrange(q), rng.randrange(q), rng.randrange(1, q),
                                  rng.randrange(q), rng.randrange(q)))

    def order(self) -> int:
        q = self.q
        return q * q * (q * q + 1) * (q - 1)

    # batched arithmetic over arrays of shape (N, 4, 4)
    def batch_mul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        F = self.F
        A, B = np.broadcast_arrays(A[..., :, :, None], B[..., None, :, :])
        prod = F.vmul(A, B)
        return np.bitwise_xor.reduce(prod, axis=-2)

    def batch_inv(self, A: np.ndarray) -> np.ndarray:
        return A[..., ::-1, ::-1].swapaxes(-1, -2)

    def all_elements(self) -> np.ndarray:
        """Every element of Sz(q) as an (N, 4, 4) array: first cell, then big cell."""
        q = self.q
        T = np.array([[self.t_mat(a, b).mat for b in range(q)] for a in range(q)], dtype=np.int64).reshape(q, q, 4, 4)
        D = np.array([self.d_mat(k).mat for k in range(1, q)], dtype=np.int64).reshape(q - 1, 4, 4)
        w = np.array(W_PERM, dtype=np.int64).reshape(4, 4)
        TD = self.batch_mul(T[:, :, None], D[None, None]).reshape(-1, 4, 4)  # (a, b, k)
        TDw = self.batch_mul(TD, w)
        Tf = T.reshape(-1, 4, 4)
        big = self.batch_mul(TDw[:, None], Tf[None]).reshape(-1, 4, 4)  # (a, b, k, c, d)
        return np.concatenate([TD, big])


def bits(q: int) -> int:
    return (q - 1).bit_length()


def _codes(G: Suzuki, arr: np.ndarray) -> np.ndarray:
    b = bits(G.q)
    if 16 * b > 63:
        raise SuzukiError("full-group encoding needs q <= 8")
    flat = arr.reshape(-1, 16)
    c = np.zeros(len(flat), dtype=np.int64)
    for j in range(16):
        c = (c << b) | flat[:, j]
    return c


def _batch_word(G: Suzuki, phi: Word, X: np.ndarray, y: SzElt) -> np.ndarray:
    Y = np.array(y.mat, dtype=np.int64).reshape(4, 4)

    class Ops:
        @staticmethod
        def identity():
            return np.broadcast_to(np.eye(4, dtype=np.int64), X.shape)

        mul = staticmethod(G.batch_mul)
        inv = staticmethod(G.batch_inv)

    return evaluate(phi, (X, np.broadcast_to(Y, X.shape)), Ops)


@functools.lru_cache(maxsize=4)
def _group_table(m: int):
    G = Suzuki(m)
    elts = G.all_elements()
    codes = _codes(G, elts)
    order = np.argsort(codes)
    return G, elts, codes, order


def word_system(m: int, y: SzElt, phi: Word) -> EndoSystem:
    """phi_y on the whole of Sz(q) (q = 8), forbidden = identity."""
    G, elts, codes, order = _group_table(m)
    img = _batch_word(G, phi, elts, y)
    ic = _codes(G, img)
    sc = codes[order]
    pos = np.searchsorted(sc, ic)
    if np.any(pos >= len(sc)) or np.any(sc[np.minimum(pos, len(sc) - 1)] != ic):
        raise SuzukiError("word image left the enumerated group")
    succ = order[pos]
    ident = _codes(G, np.eye(4, dtype=np.int64)[None])[0]
    forb = codes == ident
    sys = EndoSystem.from_arrays(succ, forb, label=f"phi_y on Sz({G.q})")
    sys.elements = elts
    return sys


def periodic_point_search(m: int, y: SzElt, phi: Word) -> OrbitReport:
    """Minimal non-identity cycle of phi_y on Sz(q); full scan for q = 8."""
    if m != 1:
        return projected_search(m, y, phi)
    return cycle_structure(word_system(m, y, phi))


def projected_system(m: int, y: SzElt, phi: Word) -> EndoSystem:
    """psi on (pi1, pi2, k) with one extra absorbing state for undefined images."""
    G = Suzuki(m)
    q = G.q
    N = q * q * (q - 1)
    sink = N

    def enc(p1, p2, k):
        return (p1 * q + p2) * (q - 1) + (k - 1)

    def step(i):
        if i == sink:
            return sink
        r, k = divmod(i, q - 1)
        p1, p2 = divmod(r, q)
        x = G.prod(G.t_mat(p1, p2), G.d_mat(k + 1), G.w_mat())
        try:
            return enc(*G.fgh_step(y, x, phi))
        except SuzukiError:
            return sink

    return EndoSystem(N + 1, step, lambda i: i == sink, label=f"psi on Sz({q}) projection")


def projected_search(m: int, y: SzElt, phi: Word) -> OrbitReport:
    return cycle_structure(projected_system(m, y, phi))


def bww_phi() -> Word:
    return parse("[y x y^-1, x^-1]", 2)


def theta_phi() -> Word:
    return parse("[y^2 x y^-2, x^-1]", 2)


@dataclass
class PropertyReport:
    q: int
    results: dict  # name -> (passed, checked, first counterexample or None)

    @property
    def iii_reading(self) -> str:
        ac = self.results["iii a+c"][0]
        ab = self.results["iii a+b"][0]
        if ac and not ab:
            return "a+c"
        if ab and not ac:
            return "a+b"
        return "both" if ab else "neither"


def verify_properties(m: int, samples: int = 2000, seed: int = 0) -> PropertyReport:
    """Check the listed Sz(q) identities; exhaustive at q = 8, sampled above."""
    G = Suzuki(m)
    F, q, s = G.F, G.q, G.s
    rng = random.Random(seed)
    full = q <= 8
    T, D, w = G.t_mat, G.d_mat, G.w_mat()
    eq = lambda x, y: x.mat == y.mat

    def run(name, params, pred):
        n, bad = 0, None
        for args in params:
            n += 1
            if not pred(*args):
                bad = args
                break
        res[name] = (bad is None, n, bad)

    def pairs():
        return ((a, b) for a in range(q) for b in range(q))

    def quads():
        if full:
            return ((a, b, c, d) for a in range(q) for b in range(q) for c in range(q) for d in range(q))
        return (tuple(rng.randrange(q) for _ in range(4)) for _ in range(samples))

    def triples():
        if full:
            return ((a, b, k) for a in range(q) for b in range(q) for k in range(1, q))
        return ((rng.randrange(q), rng.randrange(q), rng.randrange(1, q)) for _ in range(samples))

    res: dict = {}
    t01 = T(0, 1)
    run("i", pairs(), lambda a, b: eq(G.mul(t01, T(a, b)), G.mul(T(a, b), t01)))
    run("ii", ((k,) for k in range(1, q)), lambda k: eq(G.mul(D(k), w), G.mul(w, D(F.inv(k)))))
    run("iii a+c", quads(), lambda a, b, c, d: eq(G.mul(T(a, b), T(c, d)),
                                                     T(F.add(a, c), F.add(F.add(F.mul(a, F.pow(c, s)), b), d))))
    run("iii a+b", quads(), lambda a, b, c, d: eq(G.mul(T(a, b), T(c, d)),
                                                     T(F.add(a, b), F.add(F.add(F.mul(a, F.pow(c, s)), b), d))))

    def iv(t):
        lhs = G.prod(w, T(0, t), w)
        e = F.pow(t, 1 - s)
        rhs = G.prod(T(e, F.inv(t)), D(F.frac_pow(t, 2 * s, s + 2)), w, T(e, 0))
        return eq(lhs, rhs)

    run("iv", ((t,) for t in range(1, q)), iv)
    run("v", [()], lambda: eq(G.inv(t01), t01) and eq(G.mul(t01, t01), G.identity()))
    run("vi", triples(), lambda a, b, k: eq(G.prod(G.inv(D(k)), T(a, b), D(k)),
                                            T(F.mul(a, k), F.mul(b, F.pow(k, 1 + s)))))
    return PropertyReport(q, res)


def bww_family_check(m: int, phi: Word | None = None) -> dict:
    """The x = T(0,b) D(k) w family under phi_y, y = T(0,1): one and two steps.

    Returns counts of (b, k) with b not in {0,1} matching the closed forms
    f = 0, g = b + 1, h = k^4 (b+1)^(2s/(s+2)) and, after the second step,
    f = 0, g = b, h = k^16 (b+1)^(8s/(s+2)) b^(2s/(s+2)).
    """
    G = Suzuki(m)
    F, q, s = G.F, G.q, G.s
    phi = phi or bww_phi()
    y = G.t_mat(0, 1)
    total = first = second = 0
    bad = []
    for b in range(2, q):
        for k in range(1, q):
            total += 1
            x = G.prod(G.t_mat(0, b), G.d_mat(k), G.w_mat())
            f1, g1, h1 = G.fgh_step(y, x, phi)
            b1 = F.add(b, 1)
            h_exp = F.mul(F.pow(k, 4), F.frac_pow(b1, 2 * s, s + 2))
            if (f1, g1, h1) == (0, b1, h_exp):
                first += 1
            else:
                bad.append(("step1", b, k, (f1, g1, h1)))
            x1 = G.prod(G.t_mat(f1, g1), G.d_mat(h1), G.w_mat())
            f2, g2, h2 = G.fgh_step(y, x1, phi)
            h2_exp = F.mul(F.mul(F.pow(k, 16), F.frac_pow(b1, 8 * s, s + 2)), F.frac_pow(b, 2 * s, s + 2))
            if (f2, g2, h2) == (0, b, h2_exp):
                second += 1
            else:
                bad.append(("step2", b, k, (f2, g2, h2)))
    return {"total": total, "step1": first, "step2": second, "mismatches": bad[:10]}
