"""Finite fields F_{p^k}.

Elements are plain ints: the coefficient vector (c_0, ..., c_{k-1}) of the
residue class modulo the defining polynomial is packed as sum c_i p^i.  The
prime subfield is therefore {0, ..., p-1} with its usual meaning, and the
integer order of elements is the coefficient-lexicographic order.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np

ENUM_BOUND = 1 << 20


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p**k, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in range(2, math.isqrt(q) + 1):
        if q % p == 0:
            k = 0
            while q % p == 0:
                q //= p
                k += 1
            if q != 1:
                raise FieldError(f"{p ** k * q} is not a prime power")
            return p, k
    return q, 1


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except FieldError:
        return False
    return True


# dense polynomials over F_p, lists of coefficients low degree first

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f, g, p):
    f = list(f)
    inv_lead = pow(g[-1], -1, p)
    dg = len(g) - 1
    while len(_trim(f)) - 1 >= dg:
        c = f[-1] * inv_lead % p
        shift = len(f) - 1 - dg
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gi) % p
    return f


def _monic_polys(p, deg):
    for tail in itertools.product(range(p), repeat=deg):
        yield list(tail) + [1]


def is_irreducible(f, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(f)/2."""
    n = len(f) - 1
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(f, g, p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree k, least when compared from the constant term up."""
    for tail in itertools.product(range(p), repeat=k):
        f = list(tail) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible of degree {k} over F_{p}")


class Field:
    """The field with q = p**k elements, built on the least irreducible modulus."""

    def __init__(self, p: int, k: int = 1):
        if not _is_prime(p) or k < 1:
            raise FieldError(f"bad field parameters p={p}, k={k}")
        self.p = p
        self.k = k
        self.q = p ** k
        if self.q >= 1 << 64:
            raise FieldError("field too large")
        self.modulus = smallest_irreducible(p, k) if k > 1 else (0, 1)
        self._exp = None
        self._log = None
        if k > 1:
            self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash((self.p, self.k))

    # packing

    def coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def pack(self, cs) -> int:
        v = 0
        for c in reversed(list(cs)):
            v = v * self.p + c % self.p
        return v

    def _polymul(self, a: int, b: int) -> int:
        p, k, m = self.p, self.k, self.modulus
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d]
            if c:
                for i in range(k + 1):
                    prod[d - k + i] = (prod[d - k + i] - c * m[i]) % p
        return self.pack(prod[:k])

    def _build_tables(self):
        q = self.q
        for g in range(2, q):
            exp = [1]
            x = 1
            for _ in range(q - 2):
                x = self._polymul(x, g)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == q - 1:
                break
        else:
            raise FieldError("no primitive element found")
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._exp = exp + exp
        self._log = log
        self.generator = exp[1]
        if self.p != 2:
            neg = [0] * q
            for a in range(q):
                neg[a] = self.pack([-c for c in self.coeffs(a)])
            self._neg = neg

    # scalar arithmetic

    def elem(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p = self.p
        out, scale = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in " + repr(self))
        if self.k == 1:
            return pow(a, -1, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if self.k == 1:
            if e < 0:
                return pow(self.inv(a), -e, self.p)
            return pow(a, e, self.p)
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frob(self, a: int) -> int:
        return self.pow(a, self.p)

    def is_square(self, a: int) -> bool:
        if a == 0 or self.p == 2:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1

    def sqrt(self, a: int) -> int | None:
        if a == 0:
            return 0
        if self.p == 2:
            return self.pow(a, self.q // 2)
        if not self.is_square(a):
            return None
        if self.k > 1:
            return self._exp[self._log[a] // 2]
        return _tonelli(a, self.p)

    def trace_abs(self, a: int) -> int:
        """Absolute trace to the prime field."""
        t, x = 0, a
        for _ in range(self.k):
            t = self.add(t, x)
            x = self.frob(x)
        return t

    def solve_artin_schreier(self, c: int) -> int | None:
        """A root of z^2 + z = c in characteristic 2, or None."""
        if self.trace_abs(c) != 0:
            return None
        k = self.k
        if k % 2 == 1:
            z, x = 0, c
            for _ in range((k + 1) // 2):
                z ^= x
                x = self.frob(self.frob(x))
            return z
        delta = next(d for d in range(self.q) if self.trace_abs(d) == 1)
        dpow = [delta]
        for _ in range(k - 1):
            dpow.append(self.frob(dpow[-1]))
        cpow = [c]
        for _ in range(k - 1):
            cpow.append(self.frob(cpow[-1]))
        z = 0
        for i in range(k - 1):
            inner = 0
            for j in range(i + 1, k):
                inner ^= dpow[j]
            z ^= self.mul(inner, cpow[i])
        return z

    def roots_quadratic(self, a: int, b: int, c: int) -> list[int]:
        """Distinct roots of a z^2 + b z + c (a != 0)."""
        ia = self.inv(a)
        b, c = self.mul(b, ia), self.mul(c, ia)
        if self.p == 2:
            if b == 0:
                return [self.sqrt(c)]
            z = self.solve_artin_schreier(self.div(c, self.mul(b, b)))
            if z is None:
                return []
            r1 = self.mul(b, z)
            r2 = self.add(r1, b)
            return [r1, r2]
        disc = self.sub(self.mul(b, b), self.mul(4 % self.p, c))
        w = self.sqrt(disc)
        if w is None:
            return []
        half = self.inv(2)
        r1 = self.mul(self.sub(w, b), half)
        r2 = self.mul(self.sub(self.neg(w), b), half)
        return [r1] if r1 == r2 else [r1, r2]

    def solve_conic(self, A, B, C, D, E, F) -> tuple[int, int] | None:
        """Find (a, c) with A a^2 + B c^2 + C ac + D a + E c + F = 0."""
        if A == 0 and B == 0 and C == 0:
            raise FieldError("degenerate conic: no quadratic part")
        for a in range(self.q):
            beta = self.add(self.mul(C, a), E)
            gamma = self.add(self.add(self.mul(A, self.mul(a, a)), self.mul(D, a)), F)
            if B != 0:
                roots = self.roots_quadratic(B, beta, gamma)
                if roots:
                    return a, roots[0]
            elif beta != 0:
                return a, self.neg(self.div(gamma, beta))
            elif gamma == 0:
                return a, 0
        return None

    def frac_pow(self, a: int, num: int, den: int) -> int:
        """a^(num/den) in the cyclic group F_q^*."""
        n = self.q - 1
        if math.gcd(den, n) != 1:
            raise FieldError(f"{den} not invertible mod {n}")
        if a == 0:
            raise ZeroDivisionError("frac_pow of 0")
        return self.pow(a, num * pow(den, -1, n) % n)

    def elements(self, bound: int = ENUM_BOUND):
        if self.q > bound:
            raise FieldError(f"q={self.q} exceeds enumeration bound {bound}")
        return range(self.q)

    def __iter__(self):
        return iter(self.elements())

    def render(self, a: int) -> str:
        if self.k == 1:
            return str(a)
        cs = self.coeffs(a)
        terms = []
        for i in range(self.k - 1, -1, -1):
            c = cs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}{mono}")
        return "+".join(terms) or "0"

    def parse_element(self, text: str) -> int:
        """Integer literal (possibly negative), packed index '#n', or a sum like '2z^2+z+1'."""
        text = text.strip().replace(" ", "")
        if text.startswith("#"):
            v = int(text[1:])
            if not 0 <= v < self.q:
                raise FieldError(f"element index {v} out of range")
            return v
        if "z" not in text:
            try:
                return self.elem(int(text))
            except ValueError:
                raise FieldError(f"bad field literal {text!r}") from None
        if self.k == 1:
            raise FieldError(f"{text!r}: z only exists in extension fields")
        cs = [0] * self.k
        for term in text.split("+"):
            head, z, e = term.partition("z")
            try:
                if not z:
                    c, i = int(head), 0
                else:
                    c = 1 if head == "" else -1 if head == "-" else int(head)
                    i = 1 if e == "" else int(e[1:]) if e.startswith("^") else int("x")
            except ValueError:
                raise FieldError(f"bad field literal {text!r}") from None
            if not 0 <= i < self.k:
                raise FieldError(f"{text!r}: degree {i} is not below {self.k}")
            cs[i] = (cs[i] + c) % self.p
        return self.pack(cs)

    # vectorized arithmetic on numpy int64 arrays

    @functools.cached_property
    def _np_exp(self):
        return np.array(self._exp, dtype=np.int64)

    @functools.cached_property
    def _np_log(self):
        return np.array(self._log, dtype=np.int64)

    @functools.cached_property
    def _np_add_table(self):
        q = self.q
        t = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                t[a, b] = self.add(a, b)
        return t

    @functools.cached_property
    def _np_neg(self):
        return np.array([self.neg(a) for a in range(self.q)], dtype=np.int64)

    def vadd(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self._np_add_table[a, b]

    def vneg(self, a):
        if self.k == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self._np_neg[a]

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        out = self._np_exp[self._np_log[a] + self._np_log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vconst(self, c: int, shape):
        return np.full(shape, self.elem(c), dtype=np.int64)

    @functools.cached_property
    def sqrt_table(self):
        """Array mapping a to a square root of a, or -1 for non-squares."""
        t = np.full(self.q, -1, dtype=np.int64)
        for x in range(self.q):
            t[self.mul(x, x)] = x
        return t

    @functools.cached_property
    def artin_schreier_table(self):
        """Array mapping c to a root of z^2+z=c, or -1 (characteristic 2 only)."""
        t = np.full(self.q, -1, dtype=np.int64)
        for z in range(self.q):
            t[self.add(self.mul(z, z), z)] = z
        return t


def _tonelli(a: int, p: int) -> int:
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@functools.lru_cache(maxsize=None)
def GF(q: int) -> Field:
    """Cached field of order q."""
    p, k = prime_power(q)
    return Field(p, k)


def parse_field(text: str) -> Field:
    """Field literal 'p' or 'p^k'."""
    text = text.strip()
    try:
        if "^" in text:
            p, k = text.split("^")
            p, k = int(p), int(k)
            if not _is_prime(p):
                raise FieldError(f"{p} is not prime")
            return GF(p ** k)
        return GF(int(text))
    except ValueError as exc:
        raise FieldError(f"bad field literal {text!r}: {exc}") from None


class Fq:
    """Operator-overloaded wrapper around an element of a Field."""

    __slots__ = ("field", "v")

    def __init__(self, field: Field, v: int):
        self.field = field
        self.v = v % field.q if field.k == 1 else v

    def _other(self, o):
        if isinstance(o, Fq):
            if o.field != self.field:
                raise FieldError("field mismatch")
            return o.v
        return self.field.elem(o)

    def __add__(self, o):
        return Fq(self.field, self.field.add(self.v, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return Fq(self.field, self.field.sub(self.v, self._other(o)))

    def __rsub__(self, o):
        return Fq(self.field, self.field.sub(self._other(o), self.v))

    def __mul__(self, o):
        return Fq(self.field, self.field.mul(self.v, self._other(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return Fq(self.field, self.field.div(self.v, self._other(o)))

    def __neg__(self):
        return Fq(self.field, self.field.neg(self.v))

    def __pow__(self, e: int):
        return Fq(self.field, self.field.pow(self.v, e))

    def inv(self):
        return Fq(self.field, self.field.inv(self.v))

    def __eq__(self, o):
        if isinstance(o, Fq):
            return self.field == o.field and self.v == o.v
        if isinstance(o, int):
            return self.v == self.field.elem(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.v))

    def __repr__(self):
        return f"Fq({self.field.render(self.v)} in {self.field!r})"
