"""Finitely presented monoids: shortlex completion, right Cayley balls, growth.

Words are tuples of generator indices internally and strings of generator
tokens at the edges; ``1`` is the empty word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ._workers import pmap
from .digraph import DiGraph, InputError
from .embeddings import PartialSelfEmbedding

EMPTY = "1"
Word = tuple[int, ...]


class RefusedError(RuntimeError):
    """Raised when an operation needs a confluent system and did not get one."""


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relations: tuple[tuple[Word, Word], ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", tuple((tuple(a), tuple(b)) for a, b in self.relations))
        if not gens:
            raise InputError("a presentation needs at least one generator")
        for s in gens:
            if len(s) != 1 or s == EMPTY or s.isspace() or s in "=.#":
                raise InputError(f"generator tokens are single characters other than '1', '=', '.', '#': {s!r}")
        if len(set(gens)) != len(gens):
            raise InputError("duplicate generator")
        for a, b in self.relations:
            for i in a + b:
                if not 0 <= i < len(gens):
                    raise InputError(f"relation uses undeclared generator index {i}")

    def word(self, text: str) -> Word:
        if text == EMPTY:
            return ()
        try:
            return tuple(self.generators.index(c) for c in text)
        except ValueError:
            raise InputError(f"word {text!r} uses an undeclared generator") from None

    def text(self, w: Sequence[int]) -> str:
        return "".join(self.generators[i] for i in w) or EMPTY


def parse_presentation(text: str) -> Presentation:
    gens = None
    rels = []
    raw_rels = []
    for n, raw in enumerate(text.splitlines(), start=1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if parts[0] == "gens":
            if gens is not None:
                raise InputError(f"line {n}: second 'gens' line")
            gens = tuple(parts[1:])
        elif parts[0] == "rel" and len(parts) == 2 and parts[1].count("=") == 1:
            raw_rels.append((n, *parts[1].split("=")))
        else:
            raise InputError(f"line {n}: cannot parse {ln!r}")
    if gens is None:
        raise InputError("missing 'gens' line")
    P = Presentation(gens)
    for n, a, b in raw_rels:
        if not a or not b:
            raise InputError(f"line {n}: empty side (write 1 for the empty word)")
        rels.append((P.word(a), P.word(b)))
    return Presentation(gens, rels)


def read_presentation(path) -> Presentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


def shortlex_key(w: Word):
    return (len(w), w)


# -- rewriting ----------------------------------------------------------------


class _Rewriter:
    def __init__(self, rules: Sequence[tuple[Word, Word]]):
        self.table = {l: r for l, r in rules}
        self.lengths = sorted({len(l) for l in self.table})

    def reduce(self, w: Word) -> Word:
        if not self.table:
            return tuple(w)
        w = list(w)
        i = 0
        # w[:i] is irreducible; look for a left side ending at position i
        while i < len(w):
            for k in self.lengths:
                if k > i + 1:
                    i += 1
                    break
                r = self.table.get(tuple(w[i + 1 - k: i + 1]))
                if r is not None:
                    start = i + 1 - k
                    w[start: i + 1] = r
                    i = start
                    break
            else:
                i += 1
        return tuple(w)


def _critical_pairs(r1, r2):
    (l1, s1), (l2, s2) = r1, r2
    # suffix of l1 overlaps prefix of l2
    for k in range(1, min(len(l1), len(l2))):
        if l1[-k:] == l2[:k]:
            yield s1 + l2[k:], l1[:-k] + s2
    # l2 inside l1
    if len(l2) <= len(l1) and r1 != r2:
        for i in range(len(l1) - len(l2) + 1):
            if l1[i: i + len(l2)] == l2:
                yield s1, l1[:i] + s2 + l1[i + len(l2):]


@dataclass(frozen=True)
class RewriteSystem:
    presentation: Presentation
    rules: tuple[tuple[Word, Word], ...]
    confluent: bool
    limits_hit: bool
    _rw: _Rewriter = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for l, r in self.rules:
            if not shortlex_key(l) > shortlex_key(r):
                raise InputError("rules must be shortlex decreasing")
        object.__setattr__(self, "_rw", _Rewriter(self.rules))

    def rule_strings(self) -> list[str]:
        P = self.presentation
        return [f"{P.text(l)}->{P.text(r)}" for l, r in self.rules]

    def reduce(self, w: Word, override: bool = False) -> Word:
        if not self.confluent and not override:
            raise RefusedError("rewrite system is not known to be confluent; pass override=True to reduce anyway")
        return self._rw.reduce(w)

    def to_json(self) -> dict:
        return {"rules": self.rule_strings(), "confluent": self.confluent, "limits_hit": self.limits_hit}


def _orient(a: Word, b: Word):
    return (a, b) if shortlex_key(a) > shortlex_key(b) else (b, a)


def complete(P: Presentation, max_rules: int = 200, max_len: int = 32) -> RewriteSystem:
    """Shortlex Knuth-Bendix completion within explicit limits.

    ``confluent`` is only set after every critical pair of the final rule
    set resolves; hitting a limit stops the run and is reported.
    """
    if max_rules < 1 or max_len < 1:
        raise InputError("completion limits must be positive")
    rules: list[tuple[Word, Word]] = []
    pending = [(a, b) for a, b in P.relations]
    limits_hit = False
    while pending:
        rw = _Rewriter(rules)
        a, b = pending.pop(0)
        a, b = rw.reduce(a), rw.reduce(b)
        if a == b:
            continue
        new = _orient(a, b)
        if len(rules) >= max_rules or len(new[0]) > max_len:
            limits_hit = True
            break
        # drop rules whose left side the new rule reduces; they are re-queued
        kept = []
        new_rw = _Rewriter([new])
        for l, r in rules:
            if new_rw.reduce(l) != l:
                pending.append((l, r))
            else:
                kept.append((l, r))
        rules = kept + [new]
        full = _Rewriter(rules)
        rules = [(l, full.reduce(r)) for l, r in rules]
        for other in list(rules):
            pending.extend(_critical_pairs(new, other))
            if other != new:
                pending.extend(_critical_pairs(other, new))
    confluent = False
    if not limits_hit:
        rw = _Rewriter(rules)
        confluent = all(
            rw.reduce(x) == rw.reduce(y) for r1 in rules for r2 in rules for x, y in _critical_pairs(r1, r2)
        )
    rules.sort(key=lambda lr: shortlex_key(lr[0]))
    return RewriteSystem(P, tuple(rules), confluent, limits_hit)


def normal_form(RS: RewriteSystem, w, override: bool = False):
    """Irreducible descendant of ``w``; strings in, strings out."""
    if isinstance(w, str):
        return RS.presentation.text(RS.reduce(RS.presentation.word(w), override))
    return RS.reduce(tuple(w), override)


# -- Cayley balls ----------------------------------------------------------------


@dataclass
class CayleyBall:
    system: RewriteSystem
    radius: int
    elements: list[Word]
    length: dict[Word, int]
    digraph: DiGraph

    def vertex(self, w: Word) -> str:
        return self.system.presentation.text(w)

    def __len__(self):
        return len(self.elements)


def cayley_ball(RS: RewriteSystem, radius: int, override: bool = False) -> CayleyBall:
    """Right Cayley digraph ball: BFS from the identity under ``m -> nf(ms)``."""
    if radius < 0:
        raise InputError("radius must be non-negative")
    if not RS.confluent and not override:
        raise RefusedError("rewrite system is not known to be confluent")
    P = RS.presentation
    gens = range(len(P.generators))

    def products(m):
        return [RS.reduce(m + (s,), override) for s in gens]

    ident: Word = ()
    length = {ident: 0}
    elements = [ident]
    frontier = [ident]
    succ: dict[Word, list[Word]] = {}
    for t in range(1, radius + 1):
        nxt = []
        for m, prods in zip(frontier, pmap(products, frontier)):
            succ[m] = prods
            for p in prods:
                if p not in length:
                    length[p] = t
                    elements.append(p)
                    nxt.append(p)
        frontier = nxt
    for m, prods in zip(frontier, pmap(products, frontier)):
        succ[m] = prods
    D = DiGraph(window_note=f"right Cayley ball of radius {radius}")
    for m in elements:
        D.add_vertex(P.text(m))
    for m in elements:
        for p in succ[m]:
            # relations such as a=b give parallel edges; keep one
            if p in length and not D.has_edge(P.text(m), P.text(p)):
                D.add_edge(P.text(m), P.text(p))
    D.root = EMPTY
    D.interior = [P.text(m) for m in elements if length[m] < radius]
    return CayleyBall(RS, radius, elements, length, D)


def enumerate_normal_forms(RS: RewriteSystem, radius: int, override: bool = False) -> list[int]:
    """Count distinct normal forms of all words of length <= t, for each t.

    Direct enumeration over every word; exponential and meant as an oracle.
    """
    n = len(RS.presentation.generators)
    seen: set[Word] = set()
    counts = []
    layer: list[Word] = [()]
    for t in range(radius + 1):
        if t:
            layer = [w + (s,) for w in layer for s in range(n)]
        for w in layer:
            seen.add(RS.reduce(w, override))
        counts.append(len(seen))
    return counts


# -- growth ------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthTable:
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if not self.counts:
            raise InputError("empty growth table")

    @classmethod
    def from_function(cls, f: Callable[[int], int], radius: int) -> "GrowthTable":
        return cls(tuple(f(t) for t in range(radius + 1)))

    @property
    def radius(self) -> int:
        return len(self.counts) - 1

    def __getitem__(self, t: int) -> int:
        return self.counts[t]

    @property
    def rate_estimate(self) -> float:
        r = self.radius
        return float(self.counts[r]) ** (1.0 / r) if r > 0 else 1.0

    def to_csv(self) -> str:
        return "t,count\n" + "".join(f"{t},{c}\n" for t, c in enumerate(self.counts))


def growth_table(B: CayleyBall) -> GrowthTable:
    counts = [0] * (B.radius + 1)
    for w in B.elements:
        counts[B.length[w]] += 1
    for t in range(1, len(counts)):
        counts[t] += counts[t - 1]
    return GrowthTable(tuple(counts))


@dataclass(frozen=True)
class PreceqResult:
    holds: bool
    witness: tuple[int, int] | None
    window: int
    failures: dict[str, dict[str, int]]

    @property
    def label(self) -> str:
        return "window witness" if self.holds else "window falsification"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "holds": self.holds,
            "witness": list(self.witness) if self.witness else None,
            "window": self.window,
            "failures": self.failures,
        }


def preceq_window(f: GrowthTable, g: GrowthTable, k_max: int, l_max: int) -> PreceqResult:
    """Search ``k <= k_max, l <= l_max`` with ``f(t) <= k g(l t)`` for all ``t`` in f's window.

    The witness minimises ``l`` first, then ``k``. Without a witness, every
    candidate gets its first and last failing ``t``.
    """
    if k_max < 1 or l_max < 1:
        raise InputError("k_max and l_max must be positive")
    T = f.radius
    if g.radius < l_max * T:
        raise InputError(f"g covers t <= {g.radius} but l_max * T = {l_max * T} is needed")
    for ell in range(1, l_max + 1):
        need = 0
        for t in range(T + 1):
            gv = g[ell * t]
            if f[t] == 0:
                continue
            k = math.inf if gv == 0 else -(-f[t] // gv)
            need = max(need, k)
        need = max(need, 1)
        if need <= k_max:
            return PreceqResult(True, (int(need), ell), T, {})
    failures = {}
    for k in range(1, k_max + 1):
        for ell in range(1, l_max + 1):
            bad = [t for t in range(T + 1) if f[t] > k * g[ell * t]]
            failures[f"{k},{ell}"] = {"first_t": bad[0], "last_t": bad[-1]}
    return PreceqResult(False, None, T, failures)


# -- embeddings and cancellativity --------------------------------------------------


def left_mul_embedding(B: CayleyBall, m, override: bool = False) -> PartialSelfEmbedding:
    """``x -> nf(m x)`` on the elements whose image stays in the ball."""
    RS = B.system
    P = RS.presentation
    mw = P.word(m) if isinstance(m, str) else tuple(m)
    mapping = {}
    trimmed = []
    for x in B.elements:
        y = RS.reduce(mw + x, override)
        if y in B.length:
            mapping[P.text(x)] = P.text(y)
        else:
            trimmed.append(P.text(x))
    return PartialSelfEmbedding(mapping, EMPTY, P.text(mw) + "·", trimmed)


@dataclass(frozen=True)
class CancelSide:
    holds: bool
    witness: tuple[str, str, str] | None

    def to_json(self):
        return {"holds": self.holds, "witness": None if self.witness is None else
                dict(zip(("x", "y", "s"), self.witness))}


def _cancel(B: CayleyBall, side: str, override: bool) -> CancelSide:
    RS = B.system
    P = RS.presentation
    for s in range(len(P.generators)):
        seen: dict[Word, Word] = {}
        for x in B.elements:
            p = RS.reduce(x + (s,) if side == "right" else (s,) + x, override)
            y = seen.setdefault(p, x)
            if y != x:
                return CancelSide(False, (P.text(x), P.text(y), P.generators[s]))
    return CancelSide(True, None)


def cancellativity_window(B: CayleyBall, override: bool = False) -> dict[str, CancelSide]:
    """Right side: ``xs = ys => x = y``; left side: ``sx = sy => x = y``.

    ``x, y`` range over the ball. Cancelling a product reduces to cancelling
    its letters one at a time, so ``s`` ranges over generators only.
    """
    return {"left": _cancel(B, "left", override), "right": _cancel(B, "right", override)}
