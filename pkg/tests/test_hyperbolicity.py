import pytest
from conftest import small_digraphs
from hypothesis import given, settings
from oracles import delta_oracle, thinness_oracle

from hypermono.digraph import InputError, geodesics, phi_witness
from hypermono.hyperbolicity import (
    GeodesicTriangle,
    constants_from,
    delta_estimate,
    enumerate_triangles,
    fellow_lambda,
    fellow_travel_check,
    measure_constants,
    orbit_lambda,
    prop21_checks,
    projectivity_kappa,
    quasi_geodesic_check,
    triangle_thinness,
)


def test_degenerate_triangle_on_path(fx):
    D = fx("path", n=5).graph
    T = GeodesicTriangle(("x0", "x2", "x4"), [("x0", "x1", "x2"), ("x2", "x3", "x4"), ("x0", "x1", "x2", "x3", "x4")])
    assert triangle_thinness(D, T).delta_required == 0


def test_tripod_in_bidirected_tree(fx):
    D = fx("bidirected_tree", degree=3, depth=2).graph
    x, y, z = "o.0.0", "o.1.0", "o.2.1"
    sides = [geodesics(D, a, b, 1)[0] for a, b in ((x, y), (y, z), (x, z))]
    assert triangle_thinness(D, GeodesicTriangle((x, y, z), sides)).delta_required == 0


GRID_SIDES = [("0,0", "1,0", "1,1"), ("1,1", "2,1", "2,2"), ("0,0", "0,1", "1,1", "1,2", "2,2")]


def test_grid_staircase_triangle(fx):
    D = fx("grid", n=6).graph
    rep = triangle_thinness(D, GeodesicTriangle(("0,0", "1,1", "2,2"), GRID_SIDES))
    # frozen from oracles.thinness_oracle
    assert rep.delta_required == 1
    assert thinness_oracle(D, None, GRID_SIDES) == 1


def test_report_rechecks(fx):
    D = fx("grid", n=6).graph
    T = GeodesicTriangle(("0,0", "1,1", "2,2"), GRID_SIDES)
    rep = triangle_thinness(D, T)
    p, q, r = (int(part.split("=")[1]) for part in rep.worst_labeling.split(","))
    from hypermono.digraph import distance

    cost = min(min(distance(D, x, rep.worst_vertex) for x in T.sides[q]),
               min(distance(D, rep.worst_vertex, x) for x in T.sides[r]))
    assert cost == rep.delta_required


def test_relabeling_invariance(fx):
    D = fx("grid", n=6).graph
    a = GeodesicTriangle(("0,0", "1,1", "2,2"), GRID_SIDES)
    b = GeodesicTriangle(("2,2", "0,0", "1,1"), GRID_SIDES[::-1])
    assert triangle_thinness(D, a).delta_required == triangle_thinness(D, b).delta_required


def test_non_geodesic_side_rejected(fx):
    D = fx("grid", n=4).graph
    with pytest.raises(InputError):
        triangle_thinness(D, GeodesicTriangle(("0,0", "0,0", "0,0"), [("0,0",), ("0,0",), ("0,0", "1,0")]))


def test_triangle_needs_matching_sides():
    with pytest.raises(InputError):
        GeodesicTriangle(("a", "b", "c"), [("a", "b"), ("a", "b"), ("b", "c")])


@pytest.mark.parametrize("name,params,radius", [
    ("path", {"n": 10}, 6),
    ("bidirected_tree", {"degree": 3, "depth": 5}, 4),
    ("out_tree", {"k": 2, "depth": 5}, 5),
])
def test_delta_zero_calibration(fx, name, params, radius):
    f = fx(name, **params)
    assert delta_estimate(f.graph, f.root, radius, 64) == 0


def test_grid_delta_grows(fx):
    small = delta_estimate(fx("grid", n=4).graph, "0,0", 4, 64)
    large = delta_estimate(fx("grid", n=8).graph, "0,0", 8, 64)
    # frozen from oracles.delta_oracle
    assert (small, large) == (2, 4)


@pytest.mark.parametrize("name,params,radius", [
    ("grid", {"n": 4}, 4),
    ("cycle", {"n": 5}, 4),
    ("ex_counter", {"depth": 3}, 2),
    ("graph_ends", {"n": 2, "depth": 2}, 3),
])
def test_delta_matches_triangle_oracle(fx, name, params, radius):
    f = fx(name, **params)
    assert delta_estimate(f.graph, f.root, radius, 10_000) == delta_oracle(f.graph, f.root, radius)


def test_delta_matches_enumerated_triangles(fx):
    f = fx("grid", n=3)
    members = list(f.graph.vertices)
    worst = max(triangle_thinness(f.graph, T).delta_required for T in enumerate_triangles(f.graph, members, 64))
    assert worst == delta_estimate(f.graph, f.root, 3, 64)


def test_delta_requires_root(fx):
    with pytest.raises(InputError):
        delta_estimate(fx("path", n=4).graph, "x2", 2)


def test_delta_monotone_in_radius_and_cap(fx):
    D = fx("grid", n=6).graph
    by_radius = [delta_estimate(D, "0,0", r, 8) for r in range(7)]
    assert by_radius == sorted(by_radius)
    by_cap = [delta_estimate(D, "0,0", 6, c) for c in (1, 2, 8, 64)]
    assert by_cap == sorted(by_cap)


@settings(max_examples=30, deadline=None)
@given(small_digraphs(max_vertices=5))
def test_delta_oracle_agreement_random(D):
    o = D.vertices[0]
    reach = D.dist_from(o)
    if len(reach) != len(D):
        return
    assert delta_estimate(D, o, 4, 10_000) == delta_oracle(D, o, 4)


def test_all_triangles_are_delta_hat_thin(fx):
    f = fx("ex_counter", depth=3)
    delta = delta_estimate(f.graph, f.root, 3, 64)
    members = [v for v, d in f.graph.dist_from(f.root).items() if d <= 3]
    for T in enumerate_triangles(f.graph, members, 64):
        assert triangle_thinness(f.graph, T).delta_required <= delta


def test_constants_formulas(fx):
    assert fellow_lambda(0, 1) == 0
    assert fellow_lambda(2, 3) == 12 + 12
    assert projectivity_kappa(0, 1) == 1
    assert projectivity_kappa(1, 4) == (12 + 16 + 1) * 4
    assert orbit_lambda(1, 4) == 14
    D = fx("grid", n=6).graph
    c = measure_constants(D, "0,0", 6, 64)
    p = c.phi(c.delta + 1)
    assert c.lambda_fellow == 6 * c.delta + 2 * c.delta * p
    assert c.kappa_projectivity == (12 * c.delta + 4 * c.delta * p + 1) * p
    assert c.phi_table == {r: phi_witness(D, r) for r in c.phi_table}
    assert c == constants_from(D, c.delta, c.phi_table, radius=6, cap=64)
    assert set(c.to_json()) >= {"delta_hat", "phi_hat", "lambda_fellow", "kappa", "n_ball_bound"}


def test_fellow_travel(fx):
    T = fx("bidirected_tree", degree=3, depth=3).graph
    c = measure_constants(T, "o", 3, 64)
    assert c.lambda_fellow == 0
    x, y, z = "o.0.0", "o", "o.1.1"
    P, Q, R = (geodesics(T, a, b, 1)[0] for a, b in ((x, y), (y, z), (x, z)))
    assert fellow_travel_check(T, x, y, z, P, Q, R, c) == (True, None)

    D = fx("path", n=10).graph
    c = measure_constants(D, "x0", 6, 64)
    path = lambda a, b: tuple(f"x{i}" for i in range(a, b + 1))  # noqa: E731
    assert fellow_travel_check(D, "x1", "x4", "x8", path(1, 4), path(4, 8), path(1, 8), c)[0]


def test_fellow_travel_grid_with_measured_constants(fx):
    D = fx("grid", n=6).graph
    c = measure_constants(D, "0,0", 6, 64)
    x, y, z = "0,0", "3,0", "3,3"
    for P in geodesics(D, x, y, 64):
        for Q in geodesics(D, y, z, 64):
            for R in geodesics(D, x, z, 64):
                assert fellow_travel_check(D, x, y, z, P, Q, R, c)[0]


def test_fellow_travel_rejects_non_geodesic(fx):
    D = fx("grid", n=4).graph
    c = measure_constants(D, "0,0", 4, 64)
    with pytest.raises(InputError):
        fellow_travel_check(D, "0,0", "1,0", "1,0", ("0,0", "1,0"), ("1,0",), ("0,0", "0,1", "1,1"), c)


def test_quasi_geodesic(fx):
    D = fx("grid", n=4).graph
    assert quasi_geodesic_check(D, ("0,0", "1,0", "2,0", "2,1"), 1) == (True, None)
    T = fx("bidirected_tree", degree=3, depth=2).graph
    walk = ("o", "o.0", "o", "o.0")
    ok, pair = quasi_geodesic_check(T, walk, 2)
    assert not ok and pair == (0, 3)
    assert quasi_geodesic_check(T, walk, 3)[0]
    assert quasi_geodesic_check(T, walk, 2, slack=1)[0]
    with pytest.raises(InputError):
        quasi_geodesic_check(T, ("o", "o.0.0"), 1)


def test_prop21_inequalities(fx):
    D = fx("bidirected_tree", degree=3, depth=3).graph
    c = measure_constants(D, "o", 3, 64)
    rep = prop21_checks(D, c)
    assert rep["i"]["holds"] and rep["ii"]["holds"]
    assert rep["ii"]["substituted"] == "phi(delta+1)"
