"""Parameterised fixture windows with their canonical roots and maps.

Catalog::

    path(n)                   x0 -> x1 -> ... -> xn, map ``shift``
    cycle(n)                  directed n-cycle, map ``rotate``
    out_tree(k, depth)        free monoid Cayley ball, maps = left multiplication
    grid(n)                   N x N Cayley ball {i + j <= n}, maps ``a`` and ``b``
    bidirected_tree(degree, depth)
                              regular tree, every edge in both directions, map ``rotate``
    ex_counter(depth)         ray with ray pairs R1^i, R2^i, map ``shift``
    ex_shift(n, depth)        ray plus n double rays with K4 gadgets, map ``shift``
    ex_directions(I, depth)   branching rays at positions in I, maps ``g<i>``
    graph_ends(n, depth)      ray plus n-1 double rays, undirected, map ``shift``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .digraph import DiGraph, InputError
from .embeddings import PartialSelfEmbedding
from .rays import RayPrefix, make_ray

EMPTY_WORD = "1"


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    params: Mapping[str, object] = field(default_factory=dict)


@dataclass
class Fixture:
    name: str
    params: dict
    graph: DiGraph
    root: str
    maps: dict[str, PartialSelfEmbedding]
    rays: dict[str, RayPrefix] = field(default_factory=dict)
    predicted: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        # (graph, root, maps) unpacking
        return iter((self.graph, self.root, self.maps))


def _int(params, key, default=None, minimum=0):
    if key not in params:
        if default is None:
            raise InputError(f"missing parameter {key!r}")
        return default
    try:
        value = int(params[key])
    except (TypeError, ValueError):
        raise InputError(f"parameter {key!r} must be an integer") from None
    if value < minimum:
        raise InputError(f"parameter {key!r} must be >= {minimum}")
    return value


def _map(D, mapping, name, base):
    g = PartialSelfEmbedding(mapping, base, name)
    g.trimmed = frozenset(v for v in D.vertices if v not in mapping)
    return g


def path(n: int) -> Fixture:
    vs = [f"x{i}" for i in range(n + 1)]
    D = DiGraph(zip(vs, vs[1:]), vertices=vs, root="x0", window_note=f"path n={n}")
    D.interior = vs[:-1]
    shift = _map(D, dict(zip(vs[:-1], vs[1:])), "shift", "x0")
    return Fixture("path", {"n": n}, D, "x0", {"shift": shift}, {"ray": make_ray(D, vs)},
                   {"vertices": n + 1, "edges": n})


def cycle(n: int) -> Fixture:
    vs = [f"c{i}" for i in range(n)]
    D = DiGraph(((vs[i], vs[(i + 1) % n]) for i in range(n)), vertices=vs, root="c0",
                window_note=f"cycle n={n} (complete)")
    rot = _map(D, {vs[i]: vs[(i + 1) % n] for i in range(n)}, "rotate", "c0")
    return Fixture("cycle", {"n": n}, D, "c0", {"rotate": rot}, predicted={"vertices": n, "edges": n})


def _word(w: str) -> str:
    return w or EMPTY_WORD


def out_tree(k: int, depth: int) -> Fixture:
    letters = "abcdefghijklmnopqrstuvwxyz"[:k]
    if k < 1:
        raise InputError("out_tree needs k >= 1")
    D = DiGraph(root=None, window_note=f"free monoid rank {k}, word length <= {depth}")
    words = [""]
    D.add_vertex(EMPTY_WORD)
    frontier = [""]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for s in letters:
                D.add_edge(_word(w), w + s)
                nxt.append(w + s)
        words += nxt
        frontier = nxt
    D.root = EMPTY_WORD
    D.interior = [_word(w) for w in words if len(w) < depth]
    maps = {}
    for s in letters:
        maps[s] = _map(D, {_word(w): s + w for w in words if len(w) < depth}, s, EMPTY_WORD)
    total = sum(k**i for i in range(depth + 1))
    return Fixture("out_tree", {"k": k, "depth": depth}, D, EMPTY_WORD, maps,
                   predicted={"vertices": total, "edges": total - 1})


def _cell(i, j):
    return f"{i},{j}"


def grid(n: int) -> Fixture:
    D = DiGraph(window_note=f"N x N ball i + j <= {n}")
    cells = [(i, t - i) for t in range(n + 1) for i in range(t + 1)]
    for i, j in cells:
        D.add_vertex(_cell(i, j))
    for i, j in cells:
        if i + j < n:
            D.add_edge(_cell(i, j), _cell(i + 1, j))
            D.add_edge(_cell(i, j), _cell(i, j + 1))
    D.root = "0,0"
    D.interior = [_cell(i, j) for i, j in cells if i + j < n]
    inner = [(i, j) for i, j in cells if i + j < n]
    maps = {
        "a": _map(D, {_cell(i, j): _cell(i + 1, j) for i, j in inner}, "a", "0,0"),
        "b": _map(D, {_cell(i, j): _cell(i, j + 1) for i, j in inner}, "b", "0,0"),
    }
    return Fixture("grid", {"n": n}, D, "0,0", maps,
                   predicted={"vertices": (n + 1) * (n + 2) // 2, "edges": n * (n + 1)})


def bidirected_tree(degree: int, depth: int) -> Fixture:
    """Ball of the ``degree``-regular tree with both orientations of each edge."""
    if degree < 2:
        raise InputError("bidirected_tree needs degree >= 2")
    D = DiGraph(window_note=f"{degree}-regular tree ball of radius {depth}, edges doubled")
    D.add_vertex("o")
    level = ["o"]
    interior = []
    for d in range(depth):
        nxt = []
        for v in level:
            interior.append(v)
            for c in range(degree if v == "o" else degree - 1):
                w = f"{v}.{c}"
                D.add_edge(v, w)
                D.add_edge(w, v)
                nxt.append(w)
        level = nxt
    D.root = "o"
    D.interior = interior

    def rot(v):
        if v == "o":
            return v
        parts = v.split(".")
        parts[1] = str((int(parts[1]) + 1) % degree)
        return ".".join(parts)

    maps = {"rotate": _map(D, {v: rot(v) for v in D.vertices}, "rotate", "o")}
    n = 1 + sum(degree * (degree - 1) ** i for i in range(depth))
    return Fixture("bidirected_tree", {"degree": degree, "depth": depth}, D, "o", maps,
                   predicted={"vertices": n, "edges": 2 * (n - 1)})


def ex_counter(depth: int) -> Fixture:
    """Ray ``x1 x2 ...`` with two rays at each ``x_i``, cross-linked for ``i >= 2``.

    ``p<i>_<j>`` and ``q<i>_<j>`` are the j-th vertices of the two rays at
    ``x_i``; for ``i >= 2`` they are joined both ways by length-2 paths via
    ``u<i>_<j>`` and ``v<i>_<j>``. Every ray has ``depth`` vertices after ``x_i``.
    """
    if depth < 2:
        raise InputError("ex_counter needs depth >= 2")
    D = DiGraph(window_note=f"main ray x1..x{depth}, side rays of length {depth}")
    xs = [f"x{i}" for i in range(1, depth + 1)]
    for v in xs:
        D.add_vertex(v)
    rays = {}
    for i in range(1, depth + 1):
        if i < depth:
            D.add_edge(f"x{i}", f"x{i + 1}")
        for side in "pq":
            prev = f"x{i}"
            for j in range(1, depth + 1):
                D.add_edge(prev, f"{side}{i}_{j}")
                prev = f"{side}{i}_{j}"
        if i >= 2:
            for j in range(1, depth + 1):
                D.add_edge(f"p{i}_{j}", f"u{i}_{j}")
                D.add_edge(f"u{i}_{j}", f"q{i}_{j}")
                D.add_edge(f"q{i}_{j}", f"v{i}_{j}")
                D.add_edge(f"v{i}_{j}", f"p{i}_{j}")
    D.root = "x1"

    def shift(v):
        head = v[0]
        if head == "x":
            return f"x{int(v[1:]) + 1}"
        i, j = v[1:].split("_")
        return f"{head}{int(i) + 1}_{j}"

    def level(v):
        return int(v[1:]) if v[0] == "x" else int(v[1:].split("_")[0])

    mapping = {v: shift(v) for v in D.vertices if level(v) < depth}
    maps = {"shift": _map(D, mapping, "shift", "x1")}
    for i in range(1, depth + 1):
        rays[f"R1_{i}"] = make_ray(D, [f"x{i}"] + [f"p{i}_{j}" for j in range(1, depth + 1)])
        rays[f"R2_{i}"] = make_ray(D, [f"x{i}"] + [f"q{i}_{j}" for j in range(1, depth + 1)])
    predicted = {
        "vertices": depth + 2 * depth * depth + 2 * depth * (depth - 1),
        "edges": (depth - 1) + 2 * depth * depth + 4 * depth * (depth - 1),
    }
    return Fixture("ex_counter", {"depth": depth}, D, "x1", maps, rays, predicted)


GADGET_SIZE = 4
GADGET_LINKS = (0, 1)


def ex_shift(n: int, depth: int) -> Fixture:
    """Ray ``x0 x1 ...`` plus ``n`` double rays ``y<i>_<j>`` with edges ``x_j -> y<i>_<-j>``.

    Every ``y`` vertex carries a complete 4-vertex digraph (out-degree 3)
    entered through its first two vertices. The shift moves ``x_j`` to
    ``x_{j+1}`` and ``y_j`` to ``y_{j-1}``: that is the direction compatible
    with the edges ``x_j -> y_{-j}``.
    """
    if n < 1 or depth < 1:
        raise InputError("ex_shift needs n >= 1 and depth >= 1")
    D = DiGraph(window_note=f"x0..x{depth}, y indices -{depth}..{depth}, K4 gadgets")
    idx = range(-depth, depth + 1)
    for j in range(depth + 1):
        D.add_vertex(f"x{j}")
    for j in range(depth + 1):
        if j < depth:
            D.add_edge(f"x{j}", f"x{j + 1}")
        for i in range(1, n + 1):
            D.add_edge(f"x{j}", f"y{i}_{-j}")
    for i in range(1, n + 1):
        for j in idx:
            y = f"y{i}_{j}"
            if j < depth:
                D.add_edge(y, f"y{i}_{j + 1}")
            gad = [f"k{i}_{j}_{t}" for t in range(GADGET_SIZE)]
            for t in GADGET_LINKS:
                D.add_edge(y, gad[t])
            for a, b in itertools.permutations(gad, 2):
                D.add_edge(a, b)
    D.root = "x0"
    D.interior = [v for v in D.vertices if v != f"x{depth}" and not (v[0] == "y" and v.endswith(f"_{depth}"))]

    mapping = {}
    for v in D.vertices:
        if v[0] == "x":
            j = int(v[1:])
            if j < depth:
                mapping[v] = f"x{j + 1}"
        elif v[0] == "y":
            i, j = map(int, v[1:].split("_"))
            if j > -depth:
                mapping[v] = f"y{i}_{j - 1}"
        else:
            i, j, t = map(int, v[1:].split("_"))
            if j > -depth:
                mapping[v] = f"k{i}_{j - 1}_{t}"
    maps = {"shift": _map(D, mapping, "shift", "x0")}
    rays = {"x": make_ray(D, [f"x{j}" for j in range(depth + 1)])}
    for i in range(1, n + 1):
        rays[f"y{i}+"] = make_ray(D, [f"y{i}_{j}" for j in range(depth + 1)])
        rays[f"y{i}-"] = make_ray(D, [f"y{i}_{j}" for j in range(-depth, 1)], "anti_ray")
    k = GADGET_SIZE
    per_y = 1 + k
    predicted = {
        "vertices": (depth + 1) + n * (2 * depth + 1) * per_y,
        "edges": depth + n * (depth + 1) + n * 2 * depth
        + n * (2 * depth + 1) * (len(GADGET_LINKS) + k * (k - 1)),
    }
    fx = Fixture("ex_shift", {"n": n, "depth": depth}, D, "x0", maps, rays, predicted)
    fx.notes.append(f"gadget: complete digraph on {k} vertices, entered at vertices {GADGET_LINKS}")
    return fx


def _squares(limit):
    return [i * i for i in range(1, limit + 1) if i * i <= limit]


def horizon(depth: int) -> int:
    """Index bound up to which ``I`` is compared in the shift-avoidance check."""
    return 4 * depth


def shift_avoiding(I, depth) -> tuple[bool, tuple[int, int] | None]:
    """Window check that no shift of a tail of ``I`` equals a later tail.

    Pairs ``(m, n)`` with ``m + n <= depth`` are tested, comparing both sets
    below :func:`horizon`. Pairs where both truncated sets are empty carry
    no information and are skipped.
    """
    I = sorted(set(I))
    if 0 in I:
        return False, (0, 0)
    H = horizon(depth)
    for m in range(depth + 1):
        for n in range(1, depth + 1 - m):
            shifted = {n + i for i in I if i >= m and n + i <= H}
            later = {i for i in I if i >= m + n and i <= H}
            if not shifted and not later:
                continue
            if shifted == later:
                return False, (m, n)
    return True, None


def ex_directions(I, depth: int) -> Fixture:
    """Out-tree in which every ray branches at the positions listed in ``I``.

    A vertex is the tuple of branch positions followed by the offset on
    the last ray; ``g<i>`` moves the main ray onto the ray branching at
    ``x_i``.
    """
    I = sorted(set(int(i) for i in I))
    ok, bad = shift_avoiding(I, depth)
    if not ok:
        raise InputError(f"index set fails the shift-avoidance condition at (m, n) = {bad}")

    def name(t):
        return "r" + ".".join(map(str, t))

    D = DiGraph(window_note=f"branching rays, I={I}, distance <= {depth}")
    root = (0,)
    D.add_vertex(name(root))
    stack = [root]
    order = []
    while stack:
        t = stack.pop(0)
        order.append(t)
        if sum(t) >= depth:
            continue
        children = [t[:-1] + (t[-1] + 1,)]
        if t[-1] in I:
            children.append(t + (1,))
        for c in children:
            D.add_edge(name(t), name(c))
            stack.append(c)
    D.root = name(root)
    D.interior = [name(t) for t in order if sum(t) < depth]
    maps = {}
    for i in I:
        if i > depth:
            continue
        mapping = {}
        for t in order:
            if sum(t) + i > depth:
                continue
            img = (i,) if t == root else (i,) + t
            mapping[name(t)] = name(img)
        maps[f"g{i}"] = _map(D, mapping, f"g{i}", name(root))
    rays = {"R": make_ray(D, [name((j,)) for j in range(depth + 1)])}
    return Fixture("ex_directions", {"I": I, "depth": depth}, D, name(root), maps, rays)


def graph_ends(n: int, depth: int) -> Fixture:
    """Undirected ray ``x`` plus ``n - 1`` double rays, rungs ``x_j - y<i>_j`` for ``j >= 0``.

    Every undirected edge becomes an antiparallel pair. The shift moves
    every index up by one.
    """
    if n < 1 or depth < 1:
        raise InputError("graph_ends needs n >= 1 and depth >= 1")
    D = DiGraph(window_note=f"x0..x{depth}, y indices -{depth}..{depth}, undirected")

    def both(a, b):
        D.add_edge(a, b)
        D.add_edge(b, a)

    for j in range(depth + 1):
        D.add_vertex(f"x{j}")
    for j in range(depth):
        both(f"x{j}", f"x{j + 1}")
    for i in range(1, n):
        for j in range(-depth, depth):
            both(f"y{i}_{j}", f"y{i}_{j + 1}")
        for j in range(depth + 1):
            both(f"x{j}", f"y{i}_{j}")
    D.root = "x0"
    D.interior = [v for v in D.vertices if abs(int(v.rsplit("_", 1)[-1].lstrip("x"))) < depth]

    mapping = {}
    for v in D.vertices:
        if v[0] == "x":
            j = int(v[1:])
            if j < depth:
                mapping[v] = f"x{j + 1}"
        else:
            i, j = map(int, v[1:].split("_"))
            if j < depth:
                mapping[v] = f"y{i}_{j + 1}"
    maps = {"shift": _map(D, mapping, "shift", "x0")}
    rays = {"x": make_ray(D, [f"x{j}" for j in range(depth + 1)])}
    for i in range(1, n):
        rays[f"y{i}-"] = make_ray(D, [f"y{i}_{-j}" for j in range(depth + 1)])
    predicted = {
        "vertices": (depth + 1) + (n - 1) * (2 * depth + 1),
        "edges": 2 * (depth + (n - 1) * (2 * depth + depth + 1)),
    }
    return Fixture("graph_ends", {"n": n, "depth": depth}, D, "x0", maps, rays, predicted)


CATALOG = {
    "path": (path, ("n",), {}),
    "cycle": (cycle, ("n",), {}),
    "out_tree": (out_tree, ("k", "depth"), {}),
    "grid": (grid, ("n",), {}),
    "bidirected_tree": (bidirected_tree, ("degree", "depth"), {}),
    "ex_counter": (ex_counter, ("depth",), {}),
    "ex_shift": (ex_shift, ("n", "depth"), {}),
    "ex_directions": (ex_directions, ("I", "depth"), {}),
    "graph_ends": (graph_ends, ("n", "depth"), {}),
}


def usage() -> str:
    return "fixtures: " + "; ".join(f"{k}({', '.join(v[1])})" for k, v in CATALOG.items())


def make_fixture(spec: FixtureSpec | str, **params) -> Fixture:
    if isinstance(spec, FixtureSpec):
        name, params = spec.name, dict(spec.params)
    else:
        name = spec
    if name not in CATALOG:
        raise InputError(f"unknown fixture {name!r}; {usage()}")
    fn, keys, _ = CATALOG[name]
    unknown = set(params) - set(keys)
    if unknown:
        raise InputError(f"unknown parameter(s) {sorted(unknown)} for {name}; {usage()}")
    args = []
    for key in keys:
        if key == "I":
            raw = params.get("I")
            depth = _int(params, "depth", minimum=1)
            if raw is None:
                args.append(_squares(horizon(depth)))
            elif isinstance(raw, str):
                args.append([int(x) for x in raw.split(",") if x])
            else:
                args.append(list(raw))
        else:
            args.append(_int(params, key, minimum=1 if key != "depth" else 0))
    return fn(*args)
