"""Finite dynamical systems: functional graphs, minimal admissible cycles, scans."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .gf import GF, Field
from .sl2 import SL2, TraceTriple, ZPoint, enumerate_Z
from .tracepoly import TraceMap2, TraceMap3
from .words import SystemSpec, dw_step

DEFAULT_BOUND = 1 << 24
INF = math.inf


class SystemTooLarge(ValueError):
    pass


class EndoSystem:
    """A self-map of {0..N-1} with a forbidden predicate.

    `step` and `forbidden` may be callables or precomputed arrays.  The
    successor array is materialised on first use.
    """

    def __init__(self, N: int, step, forbidden=None, label: str = "", bound: int = DEFAULT_BOUND):
        if N > bound:
            raise SystemTooLarge(f"{label or 'system'}: {N} states exceed bound {bound}")
        self.N = N
        self.label = label
        self._step = step
        self._forbidden = forbidden
        self._succ = None
        self._forb = None

    @classmethod
    def from_arrays(cls, succ, forbidden=None, label: str = "", bound: int = DEFAULT_BOUND):
        succ = np.asarray(succ, dtype=np.int64)
        sys = cls(len(succ), succ, forbidden, label, bound)
        return sys

    @property
    def succ(self) -> np.ndarray:
        if self._succ is None:
            st = self._step
            if callable(st):
                arr = np.fromiter((st(i) for i in range(self.N)), dtype=np.int64, count=self.N)
            else:
                arr = np.asarray(st, dtype=np.int64)
            if len(arr) != self.N:
                raise ValueError("successor array has wrong length")
            if self.N and (arr.min() < 0 or arr.max() >= self.N):
                raise ValueError(f"{self.label}: step leaves the state space")
            self._succ = arr
        return self._succ

    @property
    def forb(self) -> np.ndarray:
        if self._forb is None:
            f = self._forbidden
            if f is None:
                arr = np.zeros(self.N, dtype=bool)
            elif callable(f):
                arr = np.fromiter((bool(f(i)) for i in range(self.N)), dtype=bool, count=self.N)
            else:
                arr = np.asarray(f, dtype=bool)
            self._forb = arr
        return self._forb

    def step(self, i: int) -> int:
        return int(self.succ[i])

    def forbidden(self, i: int) -> bool:
        return bool(self.forb[i])


@dataclass
class OrbitReport:
    ell: float  # int or math.inf
    witness: int | None
    cycle_count: int
    cycle_length_histogram: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ell": "inf" if self.ell == INF else int(self.ell),
            "witness": self.witness,
            "cycle_count": self.cycle_count,
            "cycle_length_histogram": {str(k): v for k, v in sorted(self.cycle_length_histogram.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OrbitReport":
        ell = INF if d["ell"] == "inf" else int(d["ell"])
        hist = {int(k): v for k, v in d.get("cycle_length_histogram", {}).items()}
        return cls(ell, d.get("witness"), d.get("cycle_count", 0), hist)


def _reduce_cycles(cycles: Iterable[list[int]], forb) -> OrbitReport:
    hist: dict[int, int] = {}
    best, witness, count = INF, None, 0
    for cyc in cycles:
        count += 1
        L = len(cyc)
        hist[L] = hist.get(L, 0) + 1
        ok = [z for z in cyc if not forb[z]]
        if not ok:
            continue
        w = min(ok)
        if L < best or (L == best and w < witness):
            best, witness = L, w
    return OrbitReport(best, witness, count, hist)


def cycle_structure(sys: EndoSystem, bound: int = DEFAULT_BOUND) -> OrbitReport:
    """Minimal admissible cycle length by a full three-colour traversal."""
    N = sys.N
    if N > bound:
        raise SystemTooLarge(f"{N} states exceed bound {bound}")
    succ = sys.succ.tolist()
    forb = sys.forb
    colour = bytearray(N)  # 0 white, 1 on current path, 2 done
    cycles = []
    for s in range(N):
        if colour[s]:
            continue
        path = []
        z = s
        while colour[z] == 0:
            colour[z] = 1
            path.append(z)
            z = succ[z]
        if colour[z] == 1:
            cycles.append(path[path.index(z):])
        for v in path:
            colour[v] = 2
    return _reduce_cycles(cycles, forb)


def orbit(sys: EndoSystem, start: int) -> tuple[int, int]:
    """(tail length, cycle length) of start by Brent's algorithm."""
    if not 0 <= start < sys.N:
        raise ValueError("start outside the state space")
    f = sys.step
    power = lam = 1
    tortoise, hare = start, f(start)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        lam += 1
    tortoise = hare = start
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while tortoise != hare:
        tortoise, hare = f(tortoise), f(hare)
        mu += 1
    return mu, lam


def brent_oracle(sys: EndoSystem) -> OrbitReport:
    """Independent cycle census: Brent from every start, cycles keyed by minimum."""
    seen: dict[int, list[int]] = {}
    f = sys.step
    for s in range(sys.N):
        mu, lam = orbit(sys, s)
        z = s
        for _ in range(mu):
            z = f(z)
        cyc = [z]
        for _ in range(lam - 1):
            cyc.append(f(cyc[-1]))
        key = min(cyc)
        seen.setdefault(key, cyc)
    return _reduce_cycles(seen.values(), sys.forb)


def cycle_of(sys: EndoSystem, z: int) -> list[int]:
    """The cycle through a periodic point z."""
    out = [z]
    w = sys.step(z)
    while w != z:
        out.append(w)
        w = sys.step(w)
        if len(out) > sys.N:
            raise ValueError(f"{z} is not periodic")
    return out


def verify_invariant(sys: EndoSystem, member: Callable[[int], bool]) -> bool:
    """True iff step maps the set {i : member(i)} into itself."""
    succ = sys.succ
    return all(member(int(succ[i])) for i in range(sys.N) if member(i))


@dataclass
class ScanReport:
    family: str
    entries: list = field(default_factory=list)  # (param, OrbitReport | None, error | None)

    @property
    def M(self) -> list:
        return [p for p, rep, err in self.entries if rep is not None and rep.ell == INF]

    @property
    def N_set(self) -> list[int]:
        return sorted({int(rep.ell) for _, rep, _ in self.entries if rep is not None and rep.ell != INF})

    @property
    def errors(self) -> list:
        return [(p, err) for p, _, err in self.entries if err is not None]

    @property
    def verdict(self) -> str:
        M = self.M
        if not M:
            head = "residually periodic (evidence: no inf in range)"
        else:
            head = f"inf at {{{', '.join(str(p) for p in M)}}}"
        if self.N_set:
            head += f"; N_set bounded by {max(self.N_set)} in range ({len(self.N_set)} values)"
        return head

    def to_dict(self) -> dict:
        entries = []
        for p, rep, err in self.entries:
            e = {"p": p}
            if rep is not None:
                e["ell"] = "inf" if rep.ell == INF else int(rep.ell)
                e["witness"] = rep.witness
                e["cycle_count"] = rep.cycle_count
            if err is not None:
                e["error"] = err
            entries.append(e)
        return {"family": self.family, "entries": entries, "M": self.M, "N_set": self.N_set,
                "verdict": self.verdict}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["parameter", "ell", "witness", "cycle_count"])
        for p, rep, err in self.entries:
            if rep is None:
                w.writerow([p, "error", "", ""])
            else:
                w.writerow([p, "inf" if rep.ell == INF else int(rep.ell),
                            "" if rep.witness is None else rep.witness, rep.cycle_count])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, d: dict) -> "ScanReport":
        entries = []
        for e in d["entries"]:
            if "ell" in e:
                rep = OrbitReport(INF if e["ell"] == "inf" else int(e["ell"]), e.get("witness"),
                                  e.get("cycle_count", 0))
            else:
                rep = None
            entries.append((e["p"], rep, e.get("error")))
        return cls(d["family"], entries)


def scan(family: Callable[[int], EndoSystem], params: Sequence, label: str = "",
         threads: int = 1, bound: int = DEFAULT_BOUND) -> ScanReport:
    """cycle_structure over a parameter family; failures are recorded, not raised."""

    def one(p):
        try:
            return p, cycle_structure(family(p), bound), None
        except Exception as exc:  # noqa: BLE001 - recorded per parameter
            return p, None, f"{type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            entries = list(ex.map(one, params))
    else:
        entries = [one(p) for p in params]
    return ScanReport(label, entries)


# word systems over SL(2,q)

def _forbidden_pred(spec: SystemSpec, G: SL2):
    fd = spec.forbidden
    one = G.identity()
    if fd.kind == "none":
        return lambda st: False
    if fd.kind == "identity-coordinates":
        coords = tuple(fd.data)
        return lambda st: any(st[i] == one for i in coords)
    if fd.kind == "explicit-points":
        pts = {tuple(p) for p in fd.data}
        return lambda st: tuple(st) in pts
    if fd.kind == "trace-locus":
        pred = fd.data
        return lambda st: bool(pred(G, st))
    raise ValueError(f"unknown forbidden kind {fd.kind!r}")


def word_system(spec: SystemSpec, q: int, fixed_seed=None, bound: int = DEFAULT_BOUND) -> EndoSystem:
    """The word step on SL(2,q)-tuples; fibred over fixed_seed when given."""
    G = SL2(GF(q))
    elts = list(G.elements(bound=1 << 12))
    index = {m: i for i, m in enumerate(elts)}
    n = len(elts)
    t, r = spec.fixed_arity, spec.r
    if fixed_seed is not None:
        fixed = tuple(fixed_seed)
        if len(fixed) != t:
            raise ValueError(f"fixed seed must have {t} elements")
        free = r
    else:
        fixed = None
        free = spec.arity
    N = n ** free
    if N > bound:
        raise SystemTooLarge(f"{N} states exceed bound {bound}")

    def decode(i):
        out = []
        for _ in range(free):
            i, d = divmod(i, n)
            out.append(elts[d])
        return tuple(reversed(out))

    def encode(st):
        i = 0
        for m in st:
            i = i * n + index[m]
        return i

    def state(i):
        part = decode(i)
        return fixed + part if fixed is not None else part

    def step(i):
        nxt = dw_step(spec, state(i), G)
        return encode(nxt[t:] if fixed is not None else nxt)

    pred = _forbidden_pred(spec, G)
    sys = EndoSystem(N, step, lambda i: pred(state(i)), label=f"word system over SL(2,{q})", bound=bound)
    sys.state = state
    sys.encode = encode
    sys.group = G
    return sys


# trace maps

def psl_trivial_locus(F: Field, s, u, t):
    """Mask of (s, u, t) = (+-2, +-t, t): traces of pairs central modulo +-1 in the first slot."""
    two, m2 = F.elem(2), F.elem(-2)
    return ((s == two) | (s == m2)) & ((u == t) | (u == F.vneg(t)))


def trace_fixed_points2(tmap: TraceMap2, q: int, forbidden: str = "default", bound: int = 512) -> list[TraceTriple]:
    """All F_q-points (s, u, t) with psi(P) = P, minus the forbidden locus.

    forbidden: "default" removes (+-2, +-t, t) (which contains the line
    s=2, u=t), "L1" removes only that line and "none" keeps everything.
    """
    if q > bound:
        raise SystemTooLarge(f"q={q} exceeds bound {bound}")
    F = GF(q)
    g = np.arange(q, dtype=np.int64)
    U, T = np.meshgrid(g, g, indexing="ij")
    U, T = U.ravel(), T.ravel()
    out = []
    for s in range(q):
        S = np.full_like(U, s)
        f1 = tmap.f1.eval_array(F, (S, T, U))
        mask = f1 == S
        if not mask.any():
            continue
        f2 = tmap.f2.eval_array(F, (S[mask], T[mask], U[mask]))
        u, t = U[mask], T[mask]
        keep = f2 == u
        if forbidden == "default":
            keep &= ~psl_trivial_locus(F, np.full_like(u, s), u, t)
        elif forbidden == "L1":
            keep &= ~((s == F.elem(2)) & (u == t))
        elif forbidden != "none":
            raise ValueError(f"unknown forbidden locus {forbidden!r}")
        for uu, tt in zip(u[keep].tolist(), t[keep].tolist()):
            out.append(TraceTriple(s, uu, tt))
    return out


def u_trivial(F: Field, a) -> bool:
    """Seven-coordinate points that are traces of triples with u = 1."""
    a1, a2, a3, a12, a13, a23, a123 = a
    return a3 == F.elem(2) and a13 == a1 and a23 == a2 and a123 == a12


def _codes(points: np.ndarray, q: int) -> np.ndarray:
    c = np.zeros(len(points), dtype=np.int64)
    for j in range(points.shape[1]):
        c = c * q + points[:, j]
    return c


def trace_map3_graph(tmap: TraceMap3, q: int, bound: int = 16):
    """Points of Z(F_q) and the successor array of psi on them."""
    if q > bound:
        raise SystemTooLarge(f"q={q} exceeds bound {bound}")
    F = GF(q)
    pts = np.array(list(enumerate_Z(q, bound=max(bound, q))), dtype=np.int64)
    cols = [pts[:, j] for j in range(7)]
    img = np.stack([cols[0], cols[1], tmap.l1.eval_array(F, cols), cols[3],
                    tmap.l2.eval_array(F, cols), tmap.l3.eval_array(F, cols),
                    tmap.l4.eval_array(F, cols)], axis=1)
    codes = _codes(pts, q)
    order = np.argsort(codes)
    icodes = _codes(img, q)
    pos = np.searchsorted(codes[order], icodes)
    pos = np.minimum(pos, len(codes) - 1)
    if not np.all(codes[order][pos] == icodes):
        raise ValueError("trace map leaves the hypersurface")
    return pts, order[pos]


def trace_periodic_points3(tmap: TraceMap3, q: int, max_period: int = 1,
                           exclude=u_trivial, bound: int = 16) -> list[tuple[ZPoint, int]]:
    """(point, period) for points of Z(F_q) with psi-period <= max_period, off the excluded locus."""
    pts, succ = trace_map3_graph(tmap, q, bound)
    n = len(pts)
    cur = np.arange(n)
    period = np.zeros(n, dtype=np.int64)
    for k in range(1, max_period + 1):
        cur = succ[cur]
        hit = (cur == np.arange(n)) & (period == 0)
        period[hit] = k
    out = []
    F = GF(q)
    for i in np.nonzero(period)[0].tolist():
        p = ZPoint(*(int(v) for v in pts[i]))
        if exclude is not None and exclude(F, p):
            continue
        out.append((p, int(period[i])))
    return out
