"""Ping-pong certificates for free subsemigroups of self-embeddings.

Everything is checked on the window: vertices of ``U | V`` whose image
under a map is undefined are listed as unchecked rather than dropped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ._workers import pmap
from .digraph import INF, DiGraph, InputError, set_ball
from .embeddings import (
    Certificate,
    PartialSelfEmbedding,
    _base,
    direction_prefix,
    verify_embedding,
)
from .hyperbolicity import projectivity_kappa


@dataclass
class PingPongInstance:
    m1: PartialSelfEmbedding
    m2: PartialSelfEmbedding
    U: frozenset[str]
    V: frozenset[str]
    domain: frozenset[str] | None = None

    def __post_init__(self):
        self.U = frozenset(self.U)
        self.V = frozenset(self.V)
        if self.domain is None:
            self.domain = self.m1.domain & self.m2.domain
        self.domain = frozenset(self.domain)


def _excerpt(g: PartialSelfEmbedding, vs) -> dict[str, str]:
    return {v: g(v) for v in sorted(vs) if v in g}


def check_pingpong(I: PingPongInstance, D: DiGraph | None = None) -> Certificate:
    """Check ``U & V = {}``, ``m1(U | V) <= U`` and ``m2(U | V) <= V``.

    With ``D`` both maps are first verified as embeddings, which supplies
    the injectivity the argument needs. Vertices outside ``I.domain`` are
    reported as unchecked. Failures come back as ``Unknown`` naming the
    violated condition and a witness vertex.
    """
    if D is not None:
        for label, g in (("m1", I.m1), ("m2", I.m2)):
            chk = verify_embedding(D, g)
            if not chk.ok:
                return Certificate("Unknown", {"violation": f"{label} not an embedding ({chk.clause})",
                                               "witness": list(chk.witness or ())})
    both = I.U & I.V
    if both:
        return Certificate("Unknown", {"violation": "U and V intersect", "witness": min(both)})
    pool = sorted(I.U | I.V)
    checked = [v for v in pool if v in I.domain]
    if not checked:
        return Certificate("Unknown", {"violation": "no vertex of U | V lies in the domain", "witness": None})
    for label, g, target in (("m1(U | V) <= U", I.m1, I.U), ("m2(U | V) <= V", I.m2, I.V)):
        for v in checked:
            if g(v) not in target:
                return Certificate("Unknown", {"violation": label, "witness": v})
    return Certificate("PingPongFree", {
        "U": sorted(I.U),
        "V": sorted(I.V),
        "m1": {"name": I.m1.name, "excerpt": _excerpt(I.m1, checked)},
        "m2": {"name": I.m2.name, "excerpt": _excerpt(I.m2, checked)},
        "unchecked": [v for v in pool if v not in I.domain],
        "embeddings_verified": D is not None,
    })


def recheck_pingpong(D: DiGraph, cert: Certificate) -> Certificate:
    """Replay a PingPongFree certificate from its stored excerpts."""
    data = cert.data
    m1 = PartialSelfEmbedding(data["m1"]["excerpt"], None, data["m1"]["name"])
    m2 = PartialSelfEmbedding(data["m2"]["excerpt"], None, data["m2"]["name"])
    inst = PingPongInstance(m1, m2, data["U"], data["V"])
    return check_pingpong(inst, D if data.get("embeddings_verified") else None)


# -- attractors ------------------------------------------------------------------


@dataclass(frozen=True)
class AttractorKit:
    S: frozenset[str]
    kappa: int
    U_plus: frozenset[str]

    def to_json(self):
        return {"S": sorted(self.S), "kappa": self.kappa, "size": len(self.U_plus)}


def attractor_set(D: DiGraph, o: str, S: Iterable[str], kappa: int) -> frozenset[str]:
    """Vertices ``x`` such that some ``o``-``x`` geodesic meets the out-ball of radius ``kappa`` around ``S``.

    A vertex ``w`` lies on an ``o``-``x`` geodesic iff ``d(o,w) + d(w,x) = d(o,x) < inf``.
    """
    from_o = D.dist_from(o)
    out = set()
    for w in set_ball(D, S, kappa, "out"):
        dw = from_o.get(w)
        if dw is None:
            continue
        for x, d in D.dist_from(w).items():
            if from_o.get(x, INF) == dw + d:
                out.add(x)
    return frozenset(out)


def build_attractor(D: DiGraph, o: str, S: Iterable[str], delta: int, phi_of_delta_plus_1: int) -> AttractorKit:
    S = frozenset(S)
    for v in S:
        D._check(v)
    kappa = projectivity_kappa(delta, phi_of_delta_plus_1)
    return AttractorKit(S, kappa, attractor_set(D, o, S, kappa))


# -- search ------------------------------------------------------------------------


@dataclass
class SearchParams:
    delta: int = 0
    phi1: int = 1
    depth: int = 1
    prefix_depth: int = 4
    samples: int = 20
    cap: int = 64
    max_power: int = 20


@dataclass
class SearchResult:
    found: bool
    n: int | None = None
    m: int | None = None
    instance: PingPongInstance | None = None
    certificate: Certificate | None = None
    attractors: tuple[AttractorKit, AttractorKit] | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"found": self.found, "n": self.n, "m": self.m, "diagnostics": self.diagnostics}
        if self.attractors:
            out["attractors"] = {"U": self.attractors[0].to_json(), "V": self.attractors[1].to_json()}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def _containment_power(g, pool, target, max_power):
    """Least ``n`` with ``g^n(pool & dom) <= target`` plus the closest miss."""
    best = None
    gn = g
    for n in range(1, max_power + 1):
        if n > 1:
            gn = g.compose(gn)
        checked = [v for v in pool if v in gn]
        misses = [v for v in checked if gn(v) not in target]
        if checked and not misses:
            return n, gn, None
        key = (len(misses) if checked else INF, n)
        if best is None or key < best[0]:
            best = (key, {"power": n, "misses": len(misses), "checked": len(checked),
                          "first_miss": misses[0] if misses else None})
    return None, None, best[1] if best else None


def search_pingpong(D: DiGraph, g: PartialSelfEmbedding, h: PartialSelfEmbedding, o: str | None = None,
                    params: SearchParams | None = None) -> SearchResult:
    """Search powers ``g^n``, ``h^m`` playing ping-pong on attractor sets.

    ``S_U`` and ``S_V`` are the direction-prefix vertices of ``g`` and
    ``h`` at ``params.depth``; ``U`` and ``V`` are their attractors.
    """
    p = params or SearchParams()
    o = o if o is not None else _base(D, g)
    for f in (g, h):
        chk = verify_embedding(D, f)
        if not chk.ok:
            raise InputError(f"{f.name} fails verification: {chk.clause} {chk.witness}")
    kits = []
    for f in (g, h):
        dp = direction_prefix(D, f, max(p.prefix_depth, p.depth), p.samples, p.cap, start=o)
        if len(dp.vertices) <= p.depth:
            return SearchResult(False, diagnostics={"reason": f"direction prefix of {f.name} shorter than depth {p.depth}",
                                                    "prefix": list(dp.vertices)})
        kits.append(build_attractor(D, o, [dp.vertices[p.depth]], p.delta, p.phi1))
    KU, KV = kits
    both = KU.U_plus & KV.U_plus
    if both:
        return SearchResult(False, attractors=(KU, KV),
                            diagnostics={"reason": "attractors not disjoint", "witness": min(both),
                                         "overlap": len(both)})
    pool = sorted(KU.U_plus | KV.U_plus)
    n, gn, miss_g = _containment_power(g, pool, KU.U_plus, p.max_power)
    m, hm, miss_h = _containment_power(h, pool, KV.U_plus, p.max_power)
    if n is None or m is None:
        return SearchResult(False, attractors=(KU, KV), diagnostics={
            "reason": "power budget exhausted", "max_power": p.max_power,
            "closest_g": miss_g, "closest_h": miss_h})
    gn.name, hm.name = f"{g.name}^{n}", f"{h.name}^{m}"
    inst = PingPongInstance(gn, hm, KU.U_plus, KV.U_plus)
    cert = check_pingpong(inst, D)
    assert cert.tag == "PingPongFree", cert
    return SearchResult(True, n, m, inst, cert, (KU, KV), {})


# -- brute force oracle --------------------------------------------------------------


@dataclass(frozen=True)
class FreenessVerdict:
    free: bool
    L: int
    words: int
    distinct: int
    collisions: tuple[tuple[str, str], ...]
    probes: tuple[str, ...]
    trimmed_probes: tuple[str, ...]

    @property
    def first_collision(self):
        return self.collisions[0] if self.collisions else None

    def to_json(self):
        return {"free": self.free, "L": self.L, "words": self.words, "distinct": self.distinct,
                "collisions": [list(c) for c in self.collisions], "probes": list(self.probes),
                "trimmed_probes": list(self.trimmed_probes)}


def _words(L: int, first: int):
    for n in range(1, L + 1):
        for rest in itertools.product((0, 1), repeat=n - 1):
            yield (first,) + rest


def brute_force_free(D: DiGraph, m1: PartialSelfEmbedding, m2: PartialSelfEmbedding, L: int,
                     probes: Iterable[str] | None = None,
                     names: Sequence[str] = ("m1", "m2")) -> FreenessVerdict:
    """Evaluate every non-empty word of length <= L over ``m1, m2`` on the probes.

    In a word the last letter acts first. Probes on which some word leaves
    the window are trimmed. The verdict is free iff all evaluation tuples
    are pairwise distinct; collisions are listed in shortlex order.
    """
    if L < 1:
        raise InputError("L must be positive")
    maps = (m1, m2)
    if probes is None:
        probes = [_base(D, m1)]
    probes = sorted(set(probes))
    for v in probes:
        D._check(v)

    def evaluate(first):
        rows = {}
        for w in _words(L, first):
            vals = []
            for v in probes:
                x = v
                for s in reversed(w):
                    x = maps[s].get(x) if x is not None else None
                vals.append(x)
            rows[w] = vals
        return rows

    rows = {}
    for part in pmap(evaluate, [0, 1]):
        rows.update(part)
    keep = [i for i in range(len(probes)) if all(vals[i] is not None for vals in rows.values())]
    kept = tuple(probes[i] for i in keep)
    trimmed = tuple(v for i, v in enumerate(probes) if i not in keep)
    if not kept:
        raise InputError("every probe leaves the window; lower L or enlarge the window")
    order = sorted(rows, key=lambda w: (len(w), w))
    groups: dict[tuple, list] = {}
    for w in order:
        groups.setdefault(tuple(rows[w][i] for i in keep), []).append(w)

    def spell(w):
        return "".join(names[s] for s in w)

    collisions = sorted(
        ((a, b) for grp in groups.values() for a, b in itertools.combinations(grp, 2)),
        key=lambda ab: ((len(ab[0]), ab[0]), (len(ab[1]), ab[1])),
    )
    return FreenessVerdict(
        not collisions, L, len(order), len(groups),
        tuple((spell(a), spell(b)) for a, b in collisions), kept, trimmed,
    )
