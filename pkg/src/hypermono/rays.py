"""Ray prefixes as finite stand-ins for hyperbolic boundary points.

Boundary points are never represented directly. Every statement about
them is checked on finite prefixes of (anti-)rays, with the infinitary
quantifier "infinitely many" replaced by a caller-supplied count ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .digraph import INF, DiGraph, InputError, geodesic_vertices, set_ball

KINDS = ("ray", "anti_ray")


@dataclass(frozen=True)
class RayPrefix:
    """Finite prefix of a ray, or finite suffix of an anti-ray.

    Vertices are stored first-to-last in path order for both kinds, so an
    anti-ray's sink is its last vertex.
    """

    vertices: tuple[str, ...]
    kind: str = "ray"
    geodesic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if self.kind not in KINDS:
            raise InputError(f"ray kind must be one of {KINDS}, not {self.kind!r}")
        if not self.vertices:
            raise InputError("empty ray prefix")

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def tail(self, start: int) -> "RayPrefix":
        return RayPrefix(self.vertices[start:], self.kind, self.geodesic)

    def to_line(self) -> str:
        return " ".join(("ray", self.kind) + self.vertices)


def subpaths_geodesic(D: DiGraph, vs: Sequence[str]) -> bool:
    for i, u in enumerate(vs):
        dist = D.dist_from(u)
        for j in range(i + 1, len(vs)):
            if dist.get(vs[j], INF) != j - i:
                return False
    return True


def make_ray(D: DiGraph, vertices: Iterable[str], kind: str = "ray") -> RayPrefix:
    """Validated prefix whose geodesic flag is measured on the window."""
    vs = tuple(vertices)
    for v in vs:
        D._check(v)
    for a, b in zip(vs, vs[1:]):
        if not D.has_edge(a, b):
            raise InputError(f"ray prefix uses missing edge {a} -> {b}")
    return RayPrefix(vs, kind, subpaths_geodesic(D, vs))


def validate_ray(D: DiGraph, R: RayPrefix) -> RayPrefix:
    checked = make_ray(D, R.vertices, R.kind)
    if R.geodesic and not checked.geodesic:
        raise InputError("ray prefix is flagged geodesic but has a non-geodesic subpath")
    return R


@dataclass(frozen=True)
class EquivalenceVerdict:
    holds: bool
    matched_count: int
    bound_M: int
    threshold_k: int
    witness: str | None = None

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "matched": self.matched_count,
            "M": self.bound_M,
            "k": self.threshold_k,
            "witness": self.witness,
        }


def _dist_to_set(D: DiGraph, v: str, targets: Iterable[str]):
    dist = D.dist_from(v)
    return min((dist.get(t, INF) for t in targets), default=INF)


def ray_leq_window(D: DiGraph, R1: RayPrefix, R2: RayPrefix, M: int, k: int) -> EquivalenceVerdict:
    """Window version of ``R1 <= R2``: at least ``k`` vertices of ``R1`` reach ``R2`` within ``M``."""
    validate_ray(D, R1)
    validate_ray(D, R2)
    if k < 1:
        raise InputError("threshold k must be positive")
    matched = 0
    witness = None
    for v in R1.vertices:
        if _dist_to_set(D, v, R2.vertices) <= M:
            matched += 1
        elif witness is None:
            witness = v
    return EquivalenceVerdict(matched >= k, matched, M, k, witness)


def equivalence_window(D: DiGraph, R1: RayPrefix, R2: RayPrefix, M: int, k: int) -> EquivalenceVerdict:
    a = ray_leq_window(D, R1, R2, M, k)
    b = ray_leq_window(D, R2, R1, M, k)
    return EquivalenceVerdict(
        a.holds and b.holds,
        min(a.matched_count, b.matched_count),
        M,
        k,
        a.witness if not a.holds else b.witness,
    )


def tail_containment(D: DiGraph, R1: RayPrefix, R2: RayPrefix, delta: int):
    """Earliest suffix of ``R2`` inside the out-ball of radius ``6*delta`` around ``R1``.

    Returns ``(found, split_index)``; ``split_index`` is ``None`` when no
    non-empty suffix fits.
    """
    validate_ray(D, R1)
    validate_ray(D, R2)
    around = set_ball(D, R1.vertices, 6 * delta, "out")
    split = len(R2.vertices)
    for i in range(len(R2.vertices) - 1, -1, -1):
        if R2.vertices[i] not in around:
            break
        split = i
    if split == len(R2.vertices):
        return False, None
    return True, split


@dataclass(frozen=True)
class RhoEstimate:
    value: int | float
    depth: int
    pair_count: int
    tail_from: int
    rule: str = "min over pairs of nearest-vertex distance from o"

    def to_json(self) -> dict:
        return {
            "value": "inf" if self.value == INF else self.value,
            "depth": self.depth,
            "pair_count": self.pair_count,
            "tail_from": self.tail_from,
            "rule": self.rule,
        }


def rho_truncated(D: DiGraph, o: str, S1: Sequence[str], S2: Sequence[str], tail_from: int = 0) -> RhoEstimate:
    """Window surrogate for the liminf defining the visual exponent.

    For each index pair ``(i, j)`` past ``tail_from`` with a connecting
    ``x_i``-``y_j`` geodesic, take the smallest ``d(o, w)`` over vertices
    ``w`` on any such geodesic; the estimate is the minimum over pairs, or
    0 when no pair is connected.
    """
    from_o = D.dist_from(o)
    best = INF
    pairs = 0
    for x in S1[tail_from:]:
        for y in S2[tail_from:]:
            on = geodesic_vertices(D, x, y)
            if not on:
                continue
            pairs += 1
            best = min(best, min(from_o.get(w, INF) for w in on))
    if pairs == 0:
        best = 0
    return RhoEstimate(best, max(len(S1), len(S2)), pairs, tail_from)


def visual_interval(rho: float, a: float, C: float) -> tuple[float, float]:
    """Bounds ``[a**-rho / C, C * a**-rho]`` for a visual pseudo-semimetric value."""
    if not a > 1:
        raise InputError("visual parameter a must exceed 1")
    if not C > 0:
        raise InputError("constant C must be positive")
    if rho < 0:
        raise InputError("rho must be non-negative")
    base = 0.0 if rho == INF else a ** (-rho)
    return base / C, C * base


def parse_ray(text: str) -> RayPrefix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if len(lines) != 1:
        raise InputError("ray file must hold exactly one 'ray' line")
    parts = lines[0].split()
    if len(parts) < 3 or parts[0] != "ray":
        raise InputError("ray line must read: ray <kind> <id> <id> ...")
    return RayPrefix(tuple(parts[2:]), parts[1])


def read_ray(path) -> RayPrefix:
    with open(path, encoding="utf-8") as fh:
        return parse_ray(fh.read())
