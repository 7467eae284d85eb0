"""Finite directed-graph windows with asymmetric distances.

A :class:`DiGraph` is always a finite window of some (possibly infinite)
object. Every analysis in this package treats the window as the truth and
reports its results as window-relative.

Distances are integers or ``math.inf``; ``inf`` absorbs addition and sorts
above every integer, which is exactly the extended-distance arithmetic we
need.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

INF = math.inf

Path = tuple  # tuple of vertex ids, non-empty


class InputError(ValueError):
    """Raised for malformed input: unknown vertices, bad paths, bad files."""


class DiGraph:
    """Finite digraph with insertion-ordered adjacency.

    Vertex ids are whitespace-free strings. Self-loops and antiparallel
    edges are allowed, parallel duplicates are not. Distance caches are
    dropped on every mutation.
    """

    def __init__(
        self,
        edges: Iterable[tuple[str, str]] = (),
        *,
        vertices: Iterable[str] = (),
        root: str | None = None,
        window_note: str = "",
        interior: Iterable[str] | None = None,
    ):
        self.out_adj: dict[str, list[str]] = {}
        self.in_adj: dict[str, list[str]] = {}
        self._edge_set: set[tuple[str, str]] = set()
        self._root: str | None = None
        self.window_note = window_note
        self._interior: frozenset[str] | None = None
        self._clear_cache()
        for v in vertices:
            self.add_vertex(v)
        for u, v in edges:
            self.add_edge(u, v)
        if root is not None:
            self.root = root
        if interior is not None:
            self.interior = interior

    # -- construction -----------------------------------------------------

    def _clear_cache(self) -> None:
        self._bfs_out: dict[str, dict[str, int]] = {}
        self._bfs_in: dict[str, dict[str, int]] = {}
        self._matrix: np.ndarray | None = None
        self._index: dict[str, int] | None = None

    def add_vertex(self, v: str) -> None:
        if not isinstance(v, str) or not v or any(c.isspace() for c in v):
            raise InputError(f"vertex id must be a non-empty whitespace-free string: {v!r}")
        if v not in self.out_adj:
            self.out_adj[v] = []
            self.in_adj[v] = []
            self._clear_cache()

    def add_edge(self, u: str, v: str) -> None:
        if (u, v) in self._edge_set:
            raise InputError(f"duplicate edge {u} -> {v}")
        self.add_vertex(u)
        self.add_vertex(v)
        self.out_adj[u].append(v)
        self.in_adj[v].append(u)
        self._edge_set.add((u, v))
        self._clear_cache()

    @property
    def root(self) -> str | None:
        return self._root

    @root.setter
    def root(self, v: str | None) -> None:
        if v is not None:
            self._check(v)
        self._root = v

    @property
    def interior(self) -> frozenset[str]:
        """Vertices whose out-neighbourhood is complete in the window.

        Fixtures declare it explicitly; otherwise every non-sink vertex.
        """
        if self._interior is not None:
            return self._interior
        return frozenset(v for v, out in self.out_adj.items() if out)

    @interior.setter
    def interior(self, vs: Iterable[str]) -> None:
        vs = frozenset(vs)
        for v in vs:
            self._check(v)
        self._interior = vs

    # -- queries ------------------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self.out_adj)

    def edges(self) -> Iterator[tuple[str, str]]:
        for u, outs in self.out_adj.items():
            for v in outs:
                yield u, v

    def __contains__(self, v: object) -> bool:
        return v in self.out_adj

    def __len__(self) -> int:
        return len(self.out_adj)

    def __repr__(self) -> str:
        return f"DiGraph(|V|={len(self)}, |E|={len(self._edge_set)}, root={self._root!r})"

    @property
    def edge_count(self) -> int:
        return len(self._edge_set)

    def has_edge(self, u: str, v: str) -> bool:
        return (u, v) in self._edge_set

    def _check(self, v: str) -> None:
        if v not in self.out_adj:
            raise InputError(f"unknown vertex {v!r}")

    def index(self) -> dict[str, int]:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.out_adj)}
        return self._index

    def dist_from(self, u: str) -> dict[str, int]:
        """Breadth-first distances from ``u``; unreachable vertices are absent."""
        self._check(u)
        cached = self._bfs_out.get(u)
        if cached is None:
            cached = _bfs(u, self.out_adj)
            self._bfs_out[u] = cached
        return cached

    def dist_to(self, v: str) -> dict[str, int]:
        """Breadth-first distances *to* ``v`` along reversed edges."""
        self._check(v)
        cached = self._bfs_in.get(v)
        if cached is None:
            cached = _bfs(v, self.in_adj)
            self._bfs_in[v] = cached
        return cached

    def distance_matrix(self) -> np.ndarray:
        """All-pairs distances as a float array, ``inf`` where unreachable.

        Row and column order follow :meth:`index`.
        """
        if self._matrix is None:
            idx = self.index()
            mat = np.full((len(idx), len(idx)), np.inf)
            for u, i in idx.items():
                for v, d in self.dist_from(u).items():
                    mat[i, idx[v]] = d
            mat.setflags(write=False)
            self._matrix = mat
        return self._matrix


def _bfs(source: str, adj: dict[str, list[str]]) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for y in adj[x]:
            if y not in dist:
                dist[y] = dx
                queue.append(y)
    return dist


def distance(D: DiGraph, u: str, v: str) -> int | float:
    """Length of a shortest directed ``u``-``v`` path, ``INF`` if none."""
    D._check(v)
    return D.dist_from(u).get(v, INF)


def ball(D: DiGraph, v: str, r: int, side: str = "out") -> set[str]:
    if side == "out":
        dist = D.dist_from(v)
    elif side == "in":
        dist = D.dist_to(v)
    else:
        raise InputError(f"side must be 'out' or 'in', not {side!r}")
    return {y for y, d in dist.items() if d <= r}


def set_ball(D: DiGraph, S: Iterable[str], r: int, side: str = "out") -> set[str]:
    """Union of the radius-``r`` balls around every vertex of ``S``."""
    out: set[str] = set()
    for s in S:
        out |= ball(D, s, r, side)
    return out


def is_path(D: DiGraph, P: Sequence[str]) -> bool:
    if not P or any(v not in D for v in P):
        return False
    return all(D.has_edge(a, b) for a, b in zip(P, P[1:]))


def is_geodesic(D: DiGraph, P: Sequence[str]) -> bool:
    return is_path(D, P) and distance(D, P[0], P[-1]) == len(P) - 1


def check_path(D: DiGraph, P: Sequence[str], *, geodesic: bool = False) -> tuple[str, ...]:
    P = tuple(P)
    for v in P:
        D._check(v)
    if not is_path(D, P):
        raise InputError(f"not a directed path: {' '.join(P)}")
    if geodesic and not is_geodesic(D, P):
        raise InputError(f"not a geodesic: {' '.join(P)}")
    return P


@dataclass(frozen=True)
class Geodesics:
    """Enumerated ``u``-``v`` geodesics, truncated at ``cap``.

    ``total`` is the full number of geodesics in the window, counted without
    enumerating them.
    """

    paths: tuple[Path, ...]
    total: int
    cap: int

    @property
    def truncated(self) -> bool:
        return self.total > len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def __getitem__(self, i):
        return self.paths[i]


def geodesics(D: DiGraph, u: str, v: str, cap: int = 64) -> Geodesics:
    """All ``u``-``v`` geodesics in ``out_adj`` order, at most ``cap`` of them."""
    if cap < 1:
        raise InputError("cap must be >= 1")
    d = distance(D, u, v)
    if d == INF:
        return Geodesics((), 0, cap)
    to_v = D.dist_to(v)
    from_u = D.dist_from(u)

    # number of geodesics from each DAG vertex to v, memoised
    counts: dict[str, int] = {v: 1}

    def count(x: str) -> int:
        if x in counts:
            return counts[x]
        need = to_v[x] - 1
        c = sum(count(y) for y in D.out_adj[x] if to_v.get(y) == need)
        counts[x] = c
        return c

    # longest chains are bounded by the window size, so iterate by layer
    layers: dict[int, list[str]] = {}
    for x, dx in from_u.items():
        if dx <= d and to_v.get(x) == d - dx:
            layers.setdefault(dx, []).append(x)
    for k in range(d, -1, -1):
        for x in layers.get(k, ()):
            count(x)
    total = counts[u]

    paths: list[Path] = []
    stack: list[tuple[str, ...]] = [(u,)]
    while stack and len(paths) < cap:
        p = stack.pop()
        x = p[-1]
        if x == v and len(p) == d + 1:
            paths.append(p)
            continue
        need = to_v[x] - 1
        nxt = [y for y in D.out_adj[x] if to_v.get(y) == need]
        for y in reversed(nxt):
            stack.append(p + (y,))
    return Geodesics(tuple(paths), total, cap)


def geodesic_vertices(D: DiGraph, u: str, v: str) -> set[str]:
    """Vertices lying on at least one ``u``-``v`` geodesic."""
    d = distance(D, u, v)
    if d == INF:
        return set()
    to_v = D.dist_to(v)
    return {x for x, dx in D.dist_from(u).items() if to_v.get(x, INF) + dx == d}


class RootCheck(NamedTuple):
    ok: bool
    witness: str | None


def verify_root(D: DiGraph, o: str) -> RootCheck:
    reach = D.dist_from(o)
    for v in D.vertices:
        if v not in reach:
            return RootCheck(False, v)
    return RootCheck(True, None)


def phi_witness(D: DiGraph, r: int) -> int:
    """Largest finite distance between two vertices of a common radius-``r`` ball.

    Scans every out-ball and in-ball of the window; the result is a lower
    bound for any function witnessing the bounded-ball conditions.
    """
    if r < 0:
        raise InputError("radius must be non-negative")
    if len(D) == 0:
        return 0
    mat = D.distance_matrix()
    idx = D.index()
    best = 0
    for v in D.vertices:
        for side in ("out", "in"):
            members = [idx[y] for y in ball(D, v, r, side)]
            if len(members) < 2:
                continue
            sub = mat[np.ix_(members, members)]
            finite = sub[np.isfinite(sub)]
            if finite.size:
                best = max(best, int(finite.max()))
    return best


def out_degrees_constant(D: DiGraph, vertices: Iterable[str] | None = None) -> bool:
    vs = list(D.interior if vertices is None else vertices)
    return len({len(D.out_adj[v]) for v in vs}) <= 1


# -- text format --------------------------------------------------------------


def parse_digraph(text: str) -> DiGraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != "digraph":
        raise InputError("digraph file must start with a 'digraph' line")
    D = DiGraph()
    root = None
    for n, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if parts[0] == "edge" and len(parts) == 3:
            D.add_edge(parts[1], parts[2])
        elif parts[0] == "root" and len(parts) == 2:
            root = parts[1]
        elif parts[0] == "vertex" and len(parts) == 2:
            D.add_vertex(parts[1])
        else:
            raise InputError(f"line {n}: cannot parse {ln!r}")
    if root is not None:
        D.root = root
    return D


def format_digraph(D: DiGraph) -> str:
    out = ["digraph"]
    if D.window_note:
        out.append(f"# window: {D.window_note}")
    if D.root is not None:
        out.append(f"root {D.root}")
    for v in D.vertices:
        if not D.out_adj[v] and not D.in_adj[v]:
            out.append(f"vertex {v}")
    for u, v in D.edges():
        out.append(f"edge {u} {v}")
    return "\n".join(out) + "\n"


def read_digraph(path) -> DiGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_digraph(fh.read())
