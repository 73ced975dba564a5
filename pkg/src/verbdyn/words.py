"""Words in free groups F_n and their evaluation in arbitrary groups."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

MAX_LETTERS = 10 ** 6
EXP_MIN, EXP_MAX = -(1 << 31), (1 << 31) - 1
DEFAULT_NAMES = {"x": 0, "y": 1, "u": 2}


class WordError(ValueError):
    pass


class WordSyntaxError(WordError):
    def __init__(self, msg: str, offset: int):
        super().__init__(f"{msg} at offset {offset}")
        self.offset = offset


def _reduce(letters) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for g, e in letters:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    for _, e in out:
        if not EXP_MIN <= e <= EXP_MAX:
            raise WordError("exponent overflow")
    if sum(abs(e) for _, e in out) > MAX_LETTERS:
        raise WordError(f"word longer than {MAX_LETTERS} letters")
    return tuple((g, e) for g, e in out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word: syllables (generator, nonzero exponent)."""

    n: int
    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not 1 <= self.n <= 9:
            raise WordError(f"generator count {self.n} outside 1..9")
        red = _reduce(self.letters)
        for g, _ in red:
            if not 0 <= g < self.n:
                raise WordError(f"generator index {g} not below {self.n}")
        object.__setattr__(self, "letters", red)

    @classmethod
    def gen(cls, i: int, n: int) -> "Word":
        return cls(n, ((i, 1),))

    @classmethod
    def identity(cls, n: int) -> "Word":
        return cls(n, ())

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __pow__(self, e: int) -> "Word":
        if e < 0:
            return invert(self) ** (-e)
        out = Word.identity(self.n)
        for _ in range(e):
            out = out * self
        return out

    def __invert__(self) -> "Word":
        return invert(self)

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def __str__(self):
        return render(self)


def _gen_name(g: int, n: int) -> str:
    if n <= 3:
        return "xyu"[g]
    return f"g{g + 1}"


def render(w: Word) -> str:
    if not w.letters:
        return "1"
    parts = []
    for g, e in w.letters:
        name = _gen_name(g, w.n)
        parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts)


class _Parser:
    def __init__(self, text: str, n: int, names: dict[str, int] | None):
        self.s = text
        self.i = 0
        self.n = n
        self.names = names

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self):
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch):
        if self.peek() != ch:
            raise WordSyntaxError(f"expected {ch!r}", self.i)
        self.i += 1

    def word(self) -> list:
        letters = list(self.factor())
        while self.peek() and self.peek() not in "),]":
            letters.extend(self.factor())
        return letters

    def factor(self):
        base = self.base()
        if self.peek() == "^":
            self.i += 1
            self.ws()
            start = self.i
            if self.i < len(self.s) and self.s[self.i] == "-":
                self.i += 1
            while self.i < len(self.s) and self.s[self.i].isdigit():
                self.i += 1
            tok = self.s[start:self.i]
            if tok in ("", "-"):
                raise WordSyntaxError("expected integer exponent", start)
            e = int(tok)
            if not EXP_MIN <= e <= EXP_MAX:
                raise WordError("exponent overflow")
            if abs(e) * max(len(base), 1) > MAX_LETTERS:
                raise WordError(f"word longer than {MAX_LETTERS} letters")
            if e < 0:
                base = [(g, -x) for g, x in reversed(base)]
                e = -e
            return base * e
        return base

    def base(self) -> list:
        ch = self.peek()
        if ch == "(":
            self.i += 1
            inner = self.word()
            self.expect(")")
            return list(_reduce(inner))
        if ch == "[":
            self.i += 1
            a = list(_reduce(self.word()))
            self.expect(",")
            b = list(_reduce(self.word()))
            self.expect("]")
            ainv = [(g, -e) for g, e in reversed(a)]
            binv = [(g, -e) for g, e in reversed(b)]
            return list(_reduce(a + b + ainv + binv))
        start = self.i
        if ch == "1":
            # identity literal, so that render(empty word) parses back
            self.i += 1
            return []
        if ch == "g":
            self.i += 1
            if self.i < len(self.s) and self.s[self.i].isdigit():
                idx = int(self.s[self.i]) - 1
                self.i += 1
                name = f"g{idx + 1}"
            else:
                raise WordSyntaxError("expected digit after 'g'", self.i)
        elif ch and ch.isalpha():
            name = ch
            self.i += 1
            idx = None
        else:
            raise WordSyntaxError(f"unexpected {ch!r}" if ch else "unexpected end", start)
        if self.names is not None and name in self.names:
            idx = self.names[name]
        elif idx is None:
            if name not in DEFAULT_NAMES:
                raise WordError(f"unknown generator {name!r} at offset {start}")
            idx = DEFAULT_NAMES[name]
        if not 0 <= idx < self.n:
            raise WordError(f"unknown generator {name!r} for n={self.n} at offset {start}")
        return [(idx, 1)]


def parse(text: str, n: int, names: dict[str, int] | None = None) -> Word:
    """Parse the word grammar; `names` optionally overrides the generator naming."""
    p = _Parser(text, n, names)
    if not p.peek():
        raise WordSyntaxError("empty word", 0)
    letters = p.word()
    if p.peek():
        raise WordSyntaxError(f"unexpected {p.peek()!r}", p.i)
    return Word(n, tuple(letters))


def multiply(a: Word, b: Word) -> Word:
    if a.n != b.n:
        raise WordError("mismatched generator counts")
    return Word(a.n, a.letters + b.letters)


def invert(a: Word) -> Word:
    return Word(a.n, tuple((g, -e) for g, e in reversed(a.letters)))


def commutator(a: Word, b: Word) -> Word:
    return a * b * ~a * ~b


def substitute(w: Word, images: Sequence[Word]) -> Word:
    """Apply the endomorphism sending generator i to images[i]."""
    if len(images) != w.n:
        raise WordError(f"need {w.n} images, got {len(images)}")
    m = images[0].n
    if any(im.n != m for im in images):
        raise WordError("images have different generator counts")
    letters: list = []
    for g, e in w.letters:
        im = images[g] if e > 0 else invert(images[g])
        letters.extend(im.letters * abs(e))
    return Word(m, tuple(letters))


_AUT_TEXT = {
    1: ("x y", "y", "u"),
    2: ("x", "y u", "u"),
    3: ("x", "y", "x u"),
    4: ("x y^-1", "y", "u"),
    5: ("x", "y", "y u"),
    6: ("x y^2", "y", "u"),
    7: ("x", "u y u^-1", "u"),
    8: ("x", "y", "x u x^-1"),
}

_AUT_INVERSE_TEXT = {
    1: ("x y^-1", "y", "u"),
    2: ("x", "y u^-1", "u"),
    3: ("x", "y", "x^-1 u"),
    4: ("x y", "y", "u"),
    5: ("x", "y", "y^-1 u"),
    6: ("x y^-2", "y", "u"),
    7: ("x", "u^-1 y u", "u"),
    8: ("x", "y", "x^-1 u x"),
}


def builtin_automorphism(i: int) -> tuple[Word, Word, Word]:
    """Image basis of the i-th automorphism (X, Y, Z = x, y, u)."""
    if i not in _AUT_TEXT:
        raise WordError(f"automorphism id {i} not in 1..8")
    return tuple(parse(t, 3) for t in _AUT_TEXT[i])


def builtin_automorphism_inverse(i: int) -> tuple[Word, Word, Word]:
    if i not in _AUT_INVERSE_TEXT:
        raise WordError(f"automorphism id {i} not in 1..8")
    return tuple(parse(t, 3) for t in _AUT_INVERSE_TEXT[i])


def evaluate(w: Word, elems: Sequence[Any], ops) -> Any:
    """Evaluate w at elems; ops supplies mul(a, b), inv(a) and identity()."""
    if len(elems) != w.n:
        raise WordError(f"need {w.n} elements, got {len(elems)}")
    out = ops.identity()
    invs: dict[int, Any] = {}
    for g, e in w.letters:
        if e > 0:
            base = elems[g]
        else:
            if g not in invs:
                invs[g] = ops.inv(elems[g])
            base = invs[g]
        for _ in range(abs(e)):
            out = ops.mul(out, base)
    return out


@dataclass(frozen=True)
class ForbiddenDescriptor:
    """kind: 'none', 'identity-coordinates', 'explicit-points' or 'trace-locus'."""

    kind: str = "none"
    data: Any = None

    def check_arity(self, arity: int):
        if self.kind == "identity-coordinates":
            for i in self.data:
                if not 0 <= i < arity:
                    raise WordError(f"forbidden coordinate {i} outside arity {arity}")


@dataclass(frozen=True)
class SystemSpec:
    """Word system on G^(r+s): the last r coordinates are rewritten by W.

    With `kept` set (a tuple of t indices into the s fixed generators) the
    system acts on G^(r+t) and only those generators are carried.
    """

    r: int
    s: int
    W: tuple[Word, ...]
    J: tuple[Word, ...] | None = None
    forbidden: ForbiddenDescriptor = field(default_factory=ForbiddenDescriptor)
    kept: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.W) != self.r:
            raise WordError("W must have r words")
        width = self.r + self.fixed_arity
        for w in self.W:
            if w.n != width:
                raise WordError(f"W words must be over {width} generators")
        if self.J is not None:
            if len(self.J) != self.r:
                raise WordError("J must have r words")
            for w in self.J:
                if w.n != self.s:
                    raise WordError(f"J words must be over {self.s} generators")
        self.forbidden.check_arity(self.arity)

    @property
    def fixed_arity(self) -> int:
        return len(self.kept) if self.kept is not None else self.s

    @property
    def arity(self) -> int:
        return self.fixed_arity + self.r


def dw_step(spec: SystemSpec, state: Sequence[Any], ops) -> tuple:
    if len(state) != spec.arity:
        raise WordError(f"state arity {len(state)} != {spec.arity}")
    t = spec.fixed_arity
    return tuple(state[:t]) + tuple(evaluate(w, state, ops) for w in spec.W)


def init_state(spec: SystemSpec, seed: Sequence[Any], ops) -> tuple:
    if spec.J is None:
        raise WordError("system has no initial-condition words")
    if len(seed) != spec.s:
        raise WordError(f"seed must have {spec.s} elements")
    fixed = tuple(seed) if spec.kept is None else tuple(seed[i] for i in spec.kept)
    return fixed + tuple(evaluate(j, seed, ops) for j in spec.J)


def three_var_system() -> SystemSpec:
    """(x, y, u) -> (x, y, [x u x^-1, y u y^-1]) with u_0 = x^-2 y^-1 x."""
    return SystemSpec(
        r=1, s=2,
        W=(parse("[x u x^-1, y u y^-1]", 3),),
        J=(parse("x^-2 y^-1 x", 2),),
        forbidden=ForbiddenDescriptor("identity-coordinates", (2,)),
    )


def two_var_system() -> SystemSpec:
    """(y, u) -> (y, [y^-1 u y, u^-1]) with u_0 = x."""
    return SystemSpec(
        r=1, s=2,
        W=(parse("[y^-1 u y, u^-1]", 2, names={"y": 0, "u": 1}),),
        J=(parse("x", 2),),
        forbidden=ForbiddenDescriptor("identity-coordinates", (1,)),
        kept=(1,),
    )
