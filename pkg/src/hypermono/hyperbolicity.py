"""Directed thinness of geodesic triangles and the derived constants.

A geodesic triangle with sides ``P, Q, R`` is delta-thin when, for every
labelling in which ``Q`` touches the start of ``P`` and ``R`` touches its
end, each vertex ``p`` of ``P`` satisfies

    min(d(Q, p), d(p, R)) <= delta

with ``d(Q, p) = min_q d(q, p)`` and ``d(p, R) = min_r d(p, r)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._workers import pmap
from .digraph import (
    INF,
    DiGraph,
    InputError,
    ball,
    check_path,
    distance,
    geodesics,
    is_path,
    phi_witness,
    verify_root,
)


@dataclass(frozen=True)
class GeodesicTriangle:
    endpoints: tuple[str, str, str]
    sides: tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]

    def __post_init__(self):
        object.__setattr__(self, "endpoints", tuple(self.endpoints))
        object.__setattr__(self, "sides", tuple(tuple(s) for s in self.sides))
        if len(self.endpoints) != 3 or len(self.sides) != 3:
            raise InputError("a triangle has three endpoints and three sides")
        # every pair of endpoints must be joined by a distinct side
        pairs = [(0, 1), (0, 2), (1, 2)]
        remaining = list(self.sides)
        for i, j in pairs:
            a, b = self.endpoints[i], self.endpoints[j]
            for s in remaining:
                if {s[0], s[-1]} == {a, b} and (a != b or s[0] == a):
                    remaining.remove(s)
                    break
            else:
                raise InputError(f"no side joins {a} and {b}")


@dataclass(frozen=True)
class ThinnessReport:
    delta_required: int
    worst_labeling: str
    worst_vertex: str | None


def _labelings(sides):
    """Admissible (P, Q, R) index triples for the incidence condition."""
    for p, q, r in itertools.permutations(range(3)):
        P, Q, R = sides[p], sides[q], sides[r]
        if P[0] in (Q[0], Q[-1]) and P[-1] in (R[0], R[-1]):
            yield p, q, r


def _cost(D: DiGraph, p: str, Q, R) -> int | float:
    dq = min(distance(D, q, p) for q in Q)
    dr = min(distance(D, p, r) for r in R)
    return min(dq, dr)


def triangle_thinness(D: DiGraph, T: GeodesicTriangle) -> ThinnessReport:
    """Smallest delta for which ``T`` is delta-thin, with the worst witness.

    All admissible labellings must hold at once; the report names the one
    that forces the largest delta. Ties go to the lexicographically smallest
    (labelling, vertex).
    """
    for s in T.sides:
        check_path(D, s, geodesic=True)
    candidates = []
    for p, q, r in _labelings(T.sides):
        label = f"P={p},Q={q},R={r}"
        for x in T.sides[p]:
            c = _cost(D, x, T.sides[q], T.sides[r])
            if c == INF:
                raise InputError("triangle side unreachable from both neighbours")
            candidates.append((-c, label, x))
    c, label, x = min(candidates)
    return ThinnessReport(int(-c), label, x)


def _pair_profiles(D, members, cap):
    """Per unordered endpoint pair, the worst side-to-vertex distance vectors.

    ``from_side[{a,c}][x] = max over a-c or c-a geodesics Q of d(Q, x)`` and
    ``to_side`` likewise with ``d(x, Q)``. Pairs with no geodesic either way
    are absent.
    """
    mat = D.distance_matrix()
    idx = D.index()
    from_side: dict[frozenset, np.ndarray] = {}
    to_side: dict[frozenset, np.ndarray] = {}
    geo_cache: dict[tuple[str, str], tuple] = {}
    for a, c in itertools.combinations_with_replacement(members, 2):
        sides = []
        for s, t in ((a, c), (c, a)) if a != c else ((a, a),):
            g = geodesics(D, s, t, cap).paths
            geo_cache[(s, t)] = g
            sides.extend(g)
        if not sides:
            continue
        fv = np.full(len(idx), -np.inf)
        tv = np.full(len(idx), -np.inf)
        for Q in sides:
            rows = [idx[q] for q in Q]
            fv = np.maximum(fv, mat[rows, :].min(axis=0))
            tv = np.maximum(tv, mat[:, rows].min(axis=1))
        key = frozenset((a, c))
        from_side[key] = fv
        to_side[key] = tv
    return from_side, to_side, geo_cache


def delta_estimate(D: DiGraph, o: str, radius: int, cap: int = 64) -> int:
    """Lower bound on delta from every capped geodesic triangle near ``o``.

    Triangles have endpoints in the out-ball of radius ``radius`` around
    ``o``; at most ``cap`` geodesics per ordered endpoint pair are used.
    Repeated endpoints are included.

    For a side ``P`` from ``a`` to ``b`` and third endpoint ``c`` the only
    admissible labelling puts the ``{a, c}`` side first, so the maximum over
    independent side choices factorises into per-pair profiles.
    """
    ok, witness = verify_root(D, o)
    if not ok:
        raise InputError(f"{o} is not a root of the window (cannot reach {witness})")
    members = sorted(ball(D, o, radius, "out"))
    from_side, to_side, geo = _pair_profiles(D, members, cap)
    idx = D.index()

    n = len(idx)
    blank = np.full(n, -np.inf)

    def stack(table, x):
        # rows indexed by the third endpoint c; -inf where no side exists
        return np.stack([table.get(frozenset((x, c)), blank) for c in members])

    to_rows = {b: stack(to_side, b) for b in members}

    def worst_for(a: str) -> int:
        best = 0
        from_rows = stack(from_side, a)
        for b in members:
            paths = geo[(a, b)]
            if not paths:
                continue
            cols = sorted({idx[x] for P in paths for x in P})
            v = np.minimum(from_rows[:, cols], to_rows[b][:, cols]).max()
            if v > best:
                best = int(v)
        return best

    D.distance_matrix()  # fill caches before fanning out
    return max(pmap(worst_for, members), default=0)


def enumerate_triangles(D: DiGraph, vertices: Sequence[str], cap: int):
    """Every geodesic triangle on ``vertices`` with capped side choices.

    Exponential; meant for small windows and as an oracle.
    """
    for x, y, z in itertools.combinations_with_replacement(sorted(vertices), 3):
        options = []
        for a, b in ((x, y), (x, z), (y, z)):
            opts = list(geodesics(D, a, b, cap).paths)
            if a != b:
                opts += list(geodesics(D, b, a, cap).paths)
            options.append(opts)
        if not all(options):
            continue
        for sides in itertools.product(*options):
            yield GeodesicTriangle((x, y, z), sides)


@dataclass(frozen=True)
class Constants:
    delta: int
    phi_table: dict[int, int]
    lambda_fellow: int
    kappa_projectivity: int
    N_ball_bound: int
    radius: int = 0
    cap: int = 0

    def phi(self, r: int) -> int:
        return self.phi_table[r]

    def to_json(self) -> dict:
        return {
            "delta_hat": self.delta,
            "phi_hat": {str(k): v for k, v in sorted(self.phi_table.items())},
            "lambda_fellow": self.lambda_fellow,
            "kappa": self.kappa_projectivity,
            "n_ball_bound": self.N_ball_bound,
            "radius": self.radius,
            "cap": self.cap,
        }


def fellow_lambda(delta: int, phi1: int) -> int:
    return 6 * delta + 2 * delta * phi1


def projectivity_kappa(delta: int, phi1: int) -> int:
    return (12 * delta + 4 * delta * phi1 + 1) * phi1


def orbit_lambda(delta: int, phi1: int) -> int:
    """Radius of the balls whose size bounds the orbit argument."""
    return (2 * delta + 1) * phi1 + 2 * delta


def ball_bound(D: DiGraph, lam: int) -> int:
    """Largest ``|B+_lam(u) | B-_lam(u)|`` over the window (a lower bound)."""
    return max((len(ball(D, u, lam, "out") | ball(D, u, lam, "in")) for u in D.vertices), default=0)


def measure_constants(D: DiGraph, o: str, radius: int = 6, cap: int = 64) -> Constants:
    delta = delta_estimate(D, o, radius, cap)
    top = max(radius, delta + 1)
    table = {r: phi_witness(D, r) for r in range(top + 1)}
    return constants_from(D, delta, table, radius=radius, cap=cap)


def constants_from(D: DiGraph, delta: int, phi_table: dict[int, int], *, radius=0, cap=0) -> Constants:
    phi1 = phi_table[delta + 1]
    return Constants(
        delta=delta,
        phi_table=dict(phi_table),
        lambda_fellow=fellow_lambda(delta, phi1),
        kappa_projectivity=projectivity_kappa(delta, phi1),
        N_ball_bound=ball_bound(D, orbit_lambda(delta, phi1)),
        radius=radius,
        cap=cap,
    )


def fellow_travel_check(D, x, y, z, P, Q, R, consts: Constants):
    """Check that ``R`` stays within ``lambda_fellow`` of ``P | Q`` on both sides.

    Returns ``(ok, violating_vertex)``.
    """
    P = check_path(D, P, geodesic=True)
    Q = check_path(D, Q, geodesic=True)
    R = check_path(D, R, geodesic=True)
    if (P[0], P[-1]) != (x, y) or (Q[0], Q[-1]) != (y, z) or (R[0], R[-1]) != (x, z):
        raise InputError("paths do not match the endpoints x-y, y-z, x-z")
    lam = consts.lambda_fellow
    around = set(P) | set(Q)
    for r in R:
        out_side = min(distance(D, w, r) for w in around)
        in_side = min(distance(D, r, w) for w in around)
        if out_side > lam or in_side > lam:
            return False, r
    return True, None


def quasi_geodesic_check(D: DiGraph, P: Sequence[str], gamma, slack=0):
    """Check ``j - i <= gamma * d(P[i], P[j]) + slack`` for positions ``i < j``.

    Positions holding the same vertex are skipped. Returns
    ``(ok, (i, j) or None)``.
    """
    P = tuple(P)
    if not is_path(D, P):
        raise InputError("not a directed path")
    gamma = Fraction(gamma) if not isinstance(gamma, float) else Fraction(gamma).limit_denominator()
    for i in range(len(P)):
        dist = D.dist_from(P[i])
        for j in range(i + 1, len(P)):
            if P[i] == P[j]:
                continue
            d = dist.get(P[j], INF)
            if d == INF:
                continue
            if j - i > gamma * d + slack:
                return False, (i, j)
    return True, None


def prop21_checks(D: DiGraph, consts: Constants, vertices: Sequence[str] | None = None):
    """Window check of the two distance inequalities for hyperbolic digraphs.

    (i) ``d(x, y) <= (d(x, z) + d(y, z)) * phi(delta + 1)`` for distinct
    triples with all three distances finite; (ii) ``d(x, y) <= (d(y, x) + 1)
    * phi(delta + 1)`` where the printed inequality has an unnamed function
    of delta, so ``phi(delta + 1)`` is substituted and flagged.
    Returns a dict with the first violation per inequality.
    """
    vs = list(D.vertices if vertices is None else vertices)
    k = consts.phi(consts.delta + 1)
    first_i = first_ii = None
    for x in vs:
        for y in vs:
            dxy = distance(D, x, y)
            if x == y or dxy == INF:
                continue
            dyx = distance(D, y, x)
            if first_ii is None and dyx != INF and dxy > (dyx + 1) * k:
                first_ii = (x, y)
            if first_i is None:
                for z in vs:
                    if z in (x, y):
                        continue
                    a, b = distance(D, x, z), distance(D, y, z)
                    if a != INF and b != INF and dxy > (a + b) * k:
                        first_i = (x, y, z)
                        break
    return {
        "i": {"holds": first_i is None, "witness": first_i},
        "ii": {"holds": first_ii is None, "witness": first_ii, "substituted": "phi(delta+1)"},
    }
