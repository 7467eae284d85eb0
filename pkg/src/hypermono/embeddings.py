"""Self-embeddings on windows: verification, certificates, directions.

Nothing here claims a classification of an infinite object. Each search
returns a :class:`Certificate` carrying enough witness data to be replayed,
or an ``Unknown`` certificate recording what was tried.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ._workers import pmap
from .digraph import (
    INF,
    DiGraph,
    InputError,
    ball,
    geodesics,
    out_degrees_constant,
)
from .hyperbolicity import quasi_geodesic_check
from .rays import EquivalenceVerdict, RayPrefix, equivalence_window, make_ray


class PartialSelfEmbedding:
    """Vertex map defined on a finite domain of a window.

    ``trimmed`` records vertices left out of the domain because their image
    would fall outside the window.
    """

    def __init__(
        self,
        mapping: Mapping[str, str],
        base: str | None = None,
        name: str = "g",
        trimmed: Iterable[str] = (),
    ):
        self.mapping = dict(mapping)
        self.base = base
        self.name = name
        self.trimmed = frozenset(trimmed)

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self.mapping)

    def __call__(self, v: str) -> str:
        return self.mapping[v]

    def get(self, v: str) -> str | None:
        return self.mapping.get(v)

    def __contains__(self, v) -> bool:
        return v in self.mapping

    def __repr__(self) -> str:
        return f"PartialSelfEmbedding({self.name!r}, |domain|={len(self.mapping)}, base={self.base!r})"

    def compose(self, inner: "PartialSelfEmbedding", name: str | None = None) -> "PartialSelfEmbedding":
        """``self`` after ``inner``, on the vertices where both steps are defined."""
        m = {}
        for v, w in inner.mapping.items():
            if w in self.mapping:
                m[v] = self.mapping[w]
        return PartialSelfEmbedding(m, inner.base, name or f"{self.name}{inner.name}")

    def power(self, n: int) -> "PartialSelfEmbedding":
        if n < 0:
            raise InputError("negative power")
        result = PartialSelfEmbedding({v: v for v in self.mapping}, self.base, f"{self.name}^0")
        for _ in range(n):
            result = self.compose(result)
        result.name = f"{self.name}^{n}"
        return result

    def iterate(self, v: str, n: int) -> str | None:
        for _ in range(n):
            v = self.mapping.get(v)
            if v is None:
                return None
        return v

    def restrict(self, vs: Iterable[str]) -> "PartialSelfEmbedding":
        vs = set(vs)
        return PartialSelfEmbedding(
            {v: w for v, w in self.mapping.items() if v in vs}, self.base, self.name, self.trimmed
        )

    def to_text(self) -> str:
        lines = [f"# map {self.name}"]
        if self.base is not None:
            lines.append(f"base {self.base}")
        lines += [f"map {v} {w}" for v, w in self.mapping.items()]
        return "\n".join(lines) + "\n"


def parse_map(text: str, name: str = "g") -> PartialSelfEmbedding:
    mapping: dict[str, str] = {}
    base = None
    for n, raw in enumerate(text.splitlines(), start=1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if parts[0] == "map" and len(parts) == 3:
            if parts[1] in mapping:
                raise InputError(f"line {n}: {parts[1]} mapped twice")
            mapping[parts[1]] = parts[2]
        elif parts[0] == "base" and len(parts) == 2:
            base = parts[1]
        else:
            raise InputError(f"line {n}: cannot parse {ln!r}")
    return PartialSelfEmbedding(mapping, base, name)


def read_map(path, name: str | None = None) -> PartialSelfEmbedding:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_map(text, name or os.path.splitext(os.path.basename(str(path)))[0])


def _base(D: DiGraph, g: PartialSelfEmbedding) -> str:
    o = g.base if g.base is not None else D.root
    if o is None:
        raise InputError("no base vertex: give the map a base or the digraph a root")
    D._check(o)
    return o


# -- verification ---------------------------------------------------------------


@dataclass(frozen=True)
class EmbeddingCheck:
    ok: bool
    clause: str | None = None
    witness: tuple | None = None
    distance_checked: bool = False
    pairs_checked: int = 0

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "clause": self.clause,
            "witness": list(self.witness) if self.witness else None,
            "distance_checked": self.distance_checked,
            "pairs_checked": self.pairs_checked,
        }


def verify_embedding(D: DiGraph, g: PartialSelfEmbedding, check_distances: bool | None = None) -> EmbeddingCheck:
    """Injectivity plus edge and non-edge preservation over all domain pairs.

    On windows whose interior has constant out-degree every finite distance
    between domain vertices must also be preserved exactly;
    ``check_distances`` forces that clause on or off.
    """
    dom = list(g.mapping)
    for v in dom:
        if v not in D:
            return EmbeddingCheck(False, "domain", (v,))
        if g.mapping[v] not in D:
            return EmbeddingCheck(False, "image", (v, g.mapping[v]))
    seen: dict[str, str] = {}
    for v in dom:
        w = g.mapping[v]
        if w in seen:
            return EmbeddingCheck(False, "injectivity", (seen[w], v))
        seen[w] = v
    pairs = 0
    for u in dom:
        gu = g.mapping[u]
        for v in dom:
            pairs += 1
            e1 = D.has_edge(u, v)
            e2 = D.has_edge(gu, g.mapping[v])
            if e1 and not e2:
                return EmbeddingCheck(False, "edge", (u, v), pairs_checked=pairs)
            if e2 and not e1:
                return EmbeddingCheck(False, "non-edge", (u, v), pairs_checked=pairs)
    if check_distances is None:
        check_distances = out_degrees_constant(D)
    if check_distances:
        for u in dom:
            du = D.dist_from(u)
            dgu = D.dist_from(g.mapping[u])
            for v in dom:
                d = du.get(v)
                if d is not None and dgu.get(g.mapping[v]) != d:
                    return EmbeddingCheck(False, "distance", (u, v), True, pairs)
    return EmbeddingCheck(True, None, None, bool(check_distances), pairs)


def distance_preservation(D: DiGraph, g: PartialSelfEmbedding) -> tuple[int, int]:
    """``(preserved, total)`` over domain pairs at finite distance."""
    kept = total = 0
    for u in g.mapping:
        du = D.dist_from(u)
        dgu = D.dist_from(g.mapping[u])
        for v in g.mapping:
            d = du.get(v)
            if d is None:
                continue
            total += 1
            kept += dgu.get(g.mapping[v]) == d
    return kept, total


# -- certificates -----------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Tagged evidence: Elliptic, NonEllipticTranslation, PingPongFree or Unknown."""

    tag: str
    data: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.tag != "Unknown"

    def to_json(self) -> dict:
        return {"tag": self.tag, **self.data}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        obj = dict(obj)
        tag = obj.pop("tag")
        return cls(tag, obj)


def _sorted(vs) -> list[str]:
    return sorted(vs)


def _fixed_ball(D: DiGraph, o: str, r: int) -> set[str]:
    return ball(D, o, r, "out") | ball(D, o, r, "in")


def _elliptic_at(D, g, o, power, radius):
    """Certificate data if ``g**power`` fixes the radius ball pointwise, else None."""
    B = _fixed_ball(D, o, radius)
    excerpt = {}
    for v in B:
        x = v
        for _ in range(power):
            y = g.get(x)
            if y is None:
                return None
            excerpt[x] = y
            x = y
        if x != v:
            return None
    return {
        "power": power,
        "ball_radius": radius,
        "base": o,
        "ball": _sorted(B),
        "excerpt": {k: excerpt[k] for k in sorted(excerpt)},
    }


def elliptic_certificate(D: DiGraph, g: PartialSelfEmbedding, ball_radius: int = 1, max_power: int = 20) -> Certificate:
    """Least power of ``g`` (up to ``max_power``) fixing ``B+_r(o) | B-_r(o)`` pointwise.

    If the requested ball is not inside the domain the radius is trimmed to
    the largest one that is, and the trim is recorded.
    """
    o = _base(D, g)
    radius = ball_radius
    while radius >= 0 and not _fixed_ball(D, o, radius) <= g.domain:
        radius -= 1
    trimmed = radius != ball_radius
    if radius < 0:
        return Certificate("Unknown", {"search": "elliptic", "powers_tried": 0, "base": o,
                                       "requested_radius": ball_radius, "reason": "base outside domain"})
    for p in range(1, max_power + 1):
        data = _elliptic_at(D, g, o, p, radius)
        if data is not None:
            data["requested_radius"] = ball_radius
            data["radius_trimmed"] = trimmed
            return Certificate("Elliptic", data)
    return Certificate("Unknown", {"search": "elliptic", "powers_tried": max_power, "base": o,
                                   "requested_radius": ball_radius, "ball_radius": radius})


def _translation_with(D, g, o, U):
    """Certificate data for ``o not in U`` and ``g(U | {o}) <= U``, else None."""
    U = set(U)
    if o in U or o not in g.mapping:
        return None
    excerpt, unchecked = {}, []
    for x in U | {o}:
        y = g.get(x)
        if y is None:
            unchecked.append(x)
            continue
        if y not in U:
            return None
        excerpt[x] = y
    return {
        "U": _sorted(U),
        "base": o,
        "excerpt": {k: excerpt[k] for k in sorted(excerpt)},
        "unchecked": _sorted(unchecked),
    }


def _orbit(g, v, limit):
    out = []
    x = v
    for _ in range(limit):
        x = g.get(x)
        if x is None or x in out:
            break
        out.append(x)
    return out


def _closure(D, g, seed):
    """Smallest set containing ``seed`` closed under ``g`` and out-neighbours."""
    seen = set(seed)
    stack = list(seed)
    while stack:
        x = stack.pop()
        nxt = list(D.out_adj[x])
        y = g.get(x)
        if y is not None:
            nxt.append(y)
        for z in nxt:
            if z not in seen:
                seen.add(z)
                stack.append(z)
    return seen


def translation_certificate(D: DiGraph, g: PartialSelfEmbedding) -> Certificate:
    """Look for ``U`` with ``o not in U`` and ``g(U | {o}) <= U`` on the window.

    Candidates, in order: the forward orbit of ``g(o)``; everything reachable
    from ``g(o)``; the closure of ``g(o)`` under ``g`` and out-edges.
    Failure is ``Unknown``, never a negative claim. Vertices of ``U`` whose
    image leaves the window are listed as unchecked.
    """
    o = _base(D, g)
    go = g.get(o)
    tried = []
    if go is not None:
        candidates = [
            ("orbit", lambda: [go] + _orbit(g, go, len(D))),
            ("reachable", lambda: list(D.dist_from(go))),
            ("closure", lambda: _closure(D, g, [go])),
        ]
        for label, make in candidates:
            tried.append(label)
            data = _translation_with(D, g, o, make())
            if data is not None:
                data["candidate"] = label
                return Certificate("NonEllipticTranslation", data)
    return Certificate("Unknown", {"search": "translation", "candidates_tried": tried, "base": o})


def _map_from_excerpt(excerpt: Mapping[str, str], base=None, name="g") -> PartialSelfEmbedding:
    return PartialSelfEmbedding(excerpt, base, name)


def recheck_certificate(D: DiGraph, cert: Certificate | dict, g: PartialSelfEmbedding | None = None) -> Certificate:
    """Replay a certificate from its serialized witness data.

    Uses ``g`` when given (which also tests that the excerpt is faithful),
    otherwise the stored excerpt. The result equals the input when sound.
    """
    if isinstance(cert, dict):
        cert = Certificate.from_json(cert)
    data = cert.data
    if cert.tag == "Elliptic":
        h = g if g is not None else _map_from_excerpt(data["excerpt"], data["base"])
        new = _elliptic_at(D, h, data["base"], data["power"], data["ball_radius"])
        if new is None:
            return Certificate("Unknown", {"recheck": "failed"})
        new["requested_radius"] = data["requested_radius"]
        new["radius_trimmed"] = data["radius_trimmed"]
        return Certificate("Elliptic", new)
    if cert.tag == "NonEllipticTranslation":
        h = g if g is not None else _map_from_excerpt(data["excerpt"], data["base"])
        new = _translation_with(D, h, data["base"], data["U"])
        if new is None:
            return Certificate("Unknown", {"recheck": "failed"})
        new["candidate"] = data["candidate"]
        return Certificate("NonEllipticTranslation", new)
    if cert.tag == "PingPongFree":
        from .freeness import recheck_pingpong

        return recheck_pingpong(D, cert)
    return cert


# -- directions ---------------------------------------------------------------------


@dataclass(frozen=True)
class DirectionPrefix:
    prefix: RayPrefix
    support_counts: tuple[int, ...]
    requested_depth: int
    samples: tuple[int, ...]
    truncated: bool
    tie_break: str = "out_adj order"

    @property
    def vertices(self):
        return self.prefix.vertices

    def to_json(self) -> dict:
        return {
            "prefix": list(self.prefix.vertices),
            "geodesic": self.prefix.geodesic,
            "support_counts": list(self.support_counts),
            "requested_depth": self.requested_depth,
            "samples": list(self.samples),
            "truncated": self.truncated,
            "tie_break": self.tie_break,
        }


def direction_prefix(D: DiGraph, g: PartialSelfEmbedding, depth: int, samples: int = 20, cap: int = 64,
                     start: str | None = None) -> DirectionPrefix:
    """Nested-majority prefix of the geodesics from ``o`` to ``g^n(o)``.

    At each step keep the out-edge lying on the most surviving geodesics
    (ties broken by adjacency order), then drop the geodesics that avoid it.
    Stops early, flagged ``truncated``, once fewer than two geodesics
    support the next edge.
    """
    o = start if start is not None else _base(D, g)
    paths = []
    used = []
    x = o
    for n in range(1, samples + 1):
        x = g.get(x)
        if x is None:
            break
        if D.dist_from(o).get(x, INF) == INF:
            continue
        used.append(n)
        paths.extend(geodesics(D, o, x, cap).paths)
    prefix = [o]
    support = []
    alive = paths
    truncated = False
    for step in range(depth):
        tally = Counter(P[step + 1] for P in alive if len(P) > step + 1)
        if not tally:
            truncated = True
            break
        order = {w: i for i, w in enumerate(D.out_adj[prefix[-1]])}
        w, c = min(tally.items(), key=lambda kv: (-kv[1], order[kv[0]]))
        if c < 2:
            truncated = True
            break
        prefix.append(w)
        support.append(c)
        alive = [P for P in alive if len(P) > step + 1 and P[step + 1] == w]
    return DirectionPrefix(make_ray(D, prefix), tuple(support), depth, tuple(used), truncated)


def image_ray(D: DiGraph, g: PartialSelfEmbedding, R: RayPrefix):
    """``g`` applied along ``R`` where defined.

    A ray keeps its leading run of domain vertices, an anti-ray its
    trailing run, so the retained part always touches the finite end.
    Returns ``(image or None, number of vertices dropped)``.
    """
    vs = list(R.vertices) if R.kind == "ray" else list(reversed(R.vertices))
    out = []
    for v in vs:
        w = g.get(v)
        if w is None:
            break
        out.append(w)
    if not out:
        return None, len(vs)
    if R.kind != "ray":
        out.reverse()
    return make_ray(D, out, R.kind), len(vs) - len(out)


@dataclass(frozen=True)
class FixedDirectionVerdict:
    verdict: EquivalenceVerdict
    trimmed: int

    @property
    def holds(self):
        return self.verdict.holds

    def to_json(self):
        return {**self.verdict.to_json(), "trimmed": self.trimmed}


def fixes_direction_window(D: DiGraph, g: PartialSelfEmbedding, R, M: int, k: int) -> FixedDirectionVerdict:
    """Window check that ``g`` maps the boundary point of ``R`` to itself."""
    ray = R.prefix if isinstance(R, DirectionPrefix) else R
    img, trimmed = image_ray(D, g, ray)
    if img is None:
        return FixedDirectionVerdict(EquivalenceVerdict(False, 0, M, k, ray.vertices[0]), trimmed)
    return FixedDirectionVerdict(equivalence_window(D, img, ray, M, k), trimmed)


# -- orbit constants and quasi-geodesics --------------------------------------------


@dataclass(frozen=True)
class OrbitConstants:
    delta: int
    phi: int
    N: int
    d0: int
    lam: int
    kappa: int
    gamma: int
    c: int

    def to_json(self):
        return {"delta": self.delta, "phi": self.phi, "N": self.N, "d0": self.d0,
                "lambda": self.lam, "kappa": self.kappa, "gamma": self.gamma, "c": self.c}


def orbit_constants(delta: int, phi_of_delta_plus_1: int, N: int, d0: int) -> OrbitConstants:
    """Constants making ``i -> g^i(v)`` a quasi-isometric embedding."""
    phi = phi_of_delta_plus_1
    lam = (2 * delta + 1) * phi + 2 * delta
    kappa = 2 * lam * phi
    gamma = 2 * N * d0
    c = 4 * (1 + kappa) * N * d0 * (1 + 2 * N * d0)
    return OrbitConstants(delta, phi, N, d0, lam, kappa, gamma, c)


@dataclass(frozen=True)
class OrbitCheck:
    ok: bool
    witness: tuple | None
    iterates: int
    path: tuple[str, ...]
    orbit_injective: bool

    def to_json(self):
        return {"ok": self.ok, "witness": list(self.witness) if self.witness else None,
                "iterates": self.iterates, "path_length": len(self.path) - 1,
                "orbit_injective": self.orbit_injective}


def orbit_path(D: DiGraph, g: PartialSelfEmbedding, v: str, count: int, cap: int = 64):
    """Concatenation of ``g^n(P)`` for a first ``v``-``g(v)`` geodesic ``P``."""
    gv = g.get(v)
    if gv is None:
        raise InputError(f"{v} is outside the domain of {g.name}")
    paths = geodesics(D, v, gv, cap).paths
    if not paths:
        raise InputError(f"d({v}, g({v})) is infinite")
    P = list(paths[0])
    walk = list(P)
    seg = P
    done = 1
    for _ in range(count - 1):
        nxt = [g.get(x) for x in seg]
        if any(x is None for x in nxt):
            break
        walk.extend(nxt[1:])
        seg = nxt
        done += 1
    return tuple(walk), done


def orbit_quasigeodesic_check(D: DiGraph, g: PartialSelfEmbedding, v: str, count: int,
                              consts: OrbitConstants) -> OrbitCheck:
    walk, done = orbit_path(D, g, v, count)
    ok, witness = quasi_geodesic_check(D, walk, consts.gamma, consts.c)
    orbit = [v]
    x = v
    for _ in range(done):
        x = g(x)
        orbit.append(x)
    return OrbitCheck(ok, witness, done, walk, len(set(orbit)) == len(orbit))


# -- fixed point evidence ------------------------------------------------------------


@dataclass
class FpaParams:
    ball_radius: int = 1
    max_power: int = 20
    depth: int = 4
    samples: int = 20
    cap: int = 64
    M: int = 2
    k: int = 3


def fpa_window_report(D: DiGraph, gens: Mapping[str, PartialSelfEmbedding], params: FpaParams | None = None) -> dict:
    """Which fixed-point cases the window evidence is consistent with.

    Per generator: certificates and, when non-elliptic evidence exists, a
    direction prefix. Then every ordered pair is tested with
    :func:`fixes_direction_window` and directions are grouped into window
    equivalence classes.
    """
    p = params or FpaParams()
    names = sorted(gens)
    for n in names:
        chk = verify_embedding(D, gens[n])
        if not chk.ok:
            raise InputError(f"generator {n} fails verification: {chk.clause} {chk.witness}")

    def analyse(n):
        g = gens[n]
        ell = elliptic_certificate(D, g, p.ball_radius, p.max_power)
        tr = translation_certificate(D, g)
        direction = direction_prefix(D, g, p.depth, p.samples, p.cap) if tr.found else None
        return n, ell, tr, direction

    per = {n: (ell, tr, d) for n, ell, tr, d in pmap(analyse, names)}
    directions = {n: per[n][2] for n in names if per[n][2] is not None}
    table = {}
    for a in directions:
        for b in directions:
            if a != b:
                table[f"{a}|{b}"] = fixes_direction_window(D, gens[a], directions[b], p.M, p.k).holds

    classes: list[list[str]] = []
    for n in directions:
        for cls in classes:
            if equivalence_window(D, directions[n].prefix, directions[cls[0]].prefix, p.M, p.k).holds:
                cls.append(n)
                break
        else:
            classes.append([n])

    elliptic = [n for n in names if per[n][0].tag == "Elliptic"]
    radii = {per[n][0].data["ball_radius"] for n in elliptic}
    case_iv = sorted(
        [a, b] for a in directions for b in directions
        if a < b and not table[f"{a}|{b}"] and not table[f"{b}|{a}"]
    )
    return {
        "generators": {
            n: {
                "elliptic": per[n][0].to_json(),
                "translation": per[n][1].to_json(),
                "direction": per[n][2].to_json() if per[n][2] else None,
            }
            for n in names
        },
        "fixes_direction": table,
        "direction_classes": classes,
        "summary": {
            "case_i": len(elliptic) == len(names) and len(radii) == 1,
            "case_ii_iii": 1 <= len(classes) <= 2,
            "case_iv": bool(case_iv),
            "case_iv_pairs": case_iv,
        },
        "params": vars(p).copy(),
    }
