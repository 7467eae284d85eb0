import pytest

from hypermono.digraph import INF, InputError, is_geodesic
from hypermono.embeddings import (
    Certificate,
    PartialSelfEmbedding,
    direction_prefix,
    distance_preservation,
    elliptic_certificate,
    fixes_direction_window,
    fpa_window_report,
    orbit_path,
    orbit_quasigeodesic_check,
    parse_map,
    orbit_constants,
    recheck_certificate,
    translation_certificate,
    verify_embedding,
)
from hypermono.hyperbolicity import ball_bound, measure_constants, orbit_lambda, quasi_geodesic_check
from hypermono.monoid import cayley_ball, complete, left_mul_embedding, parse_presentation


def identity(D, base):
    return PartialSelfEmbedding({v: v for v in D.vertices}, base, "id")


def test_verify_shift_and_collapse(fx):
    f = fx("path", n=10)
    assert verify_embedding(f.graph, f.maps["shift"]).ok
    bad = PartialSelfEmbedding({"x0": "x5", "x1": "x5"}, "x0")
    chk = verify_embedding(f.graph, bad)
    assert not chk.ok and chk.clause == "injectivity" and set(chk.witness) == {"x0", "x1"}


def test_verify_edge_clauses(fx):
    D = fx("path", n=4).graph
    assert verify_embedding(D, PartialSelfEmbedding({"x0": "x0", "x1": "x2"})).clause == "edge"
    assert verify_embedding(D, PartialSelfEmbedding({"x0": "x1", "x2": "x2"})).clause == "non-edge"
    assert verify_embedding(D, PartialSelfEmbedding({"x0": "zz"})).clause == "image"
    assert verify_embedding(D, PartialSelfEmbedding({"zz": "x0"})).clause == "domain"


def test_distance_clause_on_constant_out_degree(fx):
    f = fx("out_tree", k=2, depth=4)
    chk = verify_embedding(f.graph, f.maps["a"])
    assert chk.ok and chk.distance_checked


def test_counter_shift_verifies(fx):
    f = fx("ex_counter", depth=8)
    assert verify_embedding(f.graph, f.maps["shift"]).ok


def test_composition_verifies(fx):
    for f, name in ((fx("out_tree", k=2, depth=5), "a"), (fx("ex_shift", n=2, depth=4), "shift"),
                    (fx("bidirected_tree", degree=3, depth=3), "rotate")):
        g = f.maps[name]
        assert verify_embedding(f.graph, g.compose(g)).ok


def test_distance_preservation_complete(fx):
    for f in (fx("out_tree", k=2, depth=5), fx("ex_shift", n=1, depth=4)):
        for g in f.maps.values():
            kept, total = distance_preservation(f.graph, g)
            assert total > 0 and kept == total


def test_elliptic_examples(fx):
    f = fx("cycle", n=3)
    assert elliptic_certificate(f.graph, identity(f.graph, "c0")).data["power"] == 1
    cert = elliptic_certificate(f.graph, f.maps["rotate"], 1, 20)
    assert cert.tag == "Elliptic" and cert.data["power"] == 3
    p = fx("path", n=10)
    assert elliptic_certificate(p.graph, p.maps["shift"], 1, 20).tag == "Unknown"


def test_elliptic_radius_trimmed(fx):
    f = fx("path", n=3)
    g = PartialSelfEmbedding({"x0": "x0", "x1": "x1"}, "x0")
    cert = elliptic_certificate(f.graph, g, 3, 5)
    assert cert.tag == "Elliptic" and cert.data["radius_trimmed"] and cert.data["ball_radius"] == 1


def test_translation_examples(fx):
    f = fx("path", n=10)
    cert = translation_certificate(f.graph, f.maps["shift"])
    assert cert.tag == "NonEllipticTranslation"
    assert "x0" not in cert.data["U"] and "x1" in cert.data["U"]
    assert translation_certificate(f.graph, identity(f.graph, "x0")).tag == "Unknown"
    e = fx("ex_shift", n=2, depth=6)
    assert translation_certificate(e.graph, e.maps["shift"]).found


def test_certificate_recheck_round_trip(fx):
    f = fx("path", n=10)
    cert = translation_certificate(f.graph, f.maps["shift"])
    again = Certificate.from_json(__import__("json").loads(cert.dumps()))
    assert recheck_certificate(f.graph, again).dumps() == cert.dumps()
    c = fx("cycle", n=4)
    ell = elliptic_certificate(c.graph, c.maps["rotate"])
    assert recheck_certificate(c.graph, ell.to_json()).dumps() == ell.dumps()


def test_tampered_certificate_fails(fx):
    f = fx("path", n=10)
    cert = translation_certificate(f.graph, f.maps["shift"]).to_json()
    cert["U"] = [u for u in cert["U"] if u != "x3"]
    assert recheck_certificate(f.graph, cert).tag == "Unknown"


def test_direction_prefix_examples(fx):
    f = fx("path", n=10)
    dp = direction_prefix(f.graph, f.maps["shift"], 5)
    assert dp.vertices == ("x0", "x1", "x2", "x3", "x4", "x5") and not dp.truncated

    rs = complete(parse_presentation("gens a b\n"))
    B = cayley_ball(rs, 6)
    dp = direction_prefix(B.digraph, left_mul_embedding(B, "a"), 4)
    assert dp.vertices == ("1", "a", "aa", "aaa", "aaaa")

    e = fx("ex_shift", n=2, depth=8)
    dp = direction_prefix(e.graph, e.maps["shift"], 6)
    # frozen from an exhaustive geodesic enumeration
    assert dp.vertices == tuple(f"x{i}" for i in range(7))
    assert is_geodesic(e.graph, dp.vertices) and dp.prefix.geodesic


def test_direction_prefix_truncates(fx):
    f = fx("path", n=3)
    dp = direction_prefix(f.graph, f.maps["shift"], 6)
    assert dp.truncated and len(dp.support_counts) < 6
    assert all(c >= 2 for c in dp.support_counts)


def test_fixes_direction(fx):
    f = fx("path", n=10)
    dp = direction_prefix(f.graph, f.maps["shift"], 6)
    assert fixes_direction_window(f.graph, f.maps["shift"], dp, 0, 3).holds

    rs = complete(parse_presentation("gens a b\n"))
    B = cayley_ball(rs, 6)
    a, b = left_mul_embedding(B, "a"), left_mul_embedding(B, "b")
    dp = direction_prefix(B.digraph, a, 5)
    for M in range(5):
        assert not fixes_direction_window(B.digraph, b, dp, M, 3).holds

    e = fx("ex_shift", n=2, depth=8)
    for R in e.rays.values():
        assert fixes_direction_window(e.graph, e.maps["shift"], R, 12, 5).holds


def test_orbit_constants():
    c = orbit_constants(0, 1, 3, 1)
    assert (c.lam, c.kappa, c.gamma, c.c) == (1, 2, 6, 252)
    c = orbit_constants(1, 4, 1, 1)
    assert (c.lam, c.kappa) == (14, 112)
    c = orbit_constants(0, 1, 1, 1)
    assert (c.gamma, c.c) == (2, 36)


def _orbit_consts(D, o, g):
    m = measure_constants(D, o, 4, 64)
    phi = m.phi(m.delta + 1)
    N = ball_bound(D, orbit_lambda(m.delta, phi))
    return orbit_constants(m.delta, phi, N, D.dist_from(o)[g(o)])


def test_orbit_checks(fx):
    f = fx("path", n=10)
    g = f.maps["shift"]
    walk, done = orbit_path(f.graph, g, "x0", 10)
    assert walk == tuple(f"x{i}" for i in range(11)) and done == 10
    assert quasi_geodesic_check(f.graph, walk, 1) == (True, None)
    assert orbit_quasigeodesic_check(f.graph, g, "x0", 10, _orbit_consts(f.graph, "x0", g)).ok

    rs = complete(parse_presentation("gens a b\n"))
    B = cayley_ball(rs, 7)
    a = left_mul_embedding(B, "a")
    res = orbit_quasigeodesic_check(B.digraph, a, "1", 7, _orbit_consts(B.digraph, "1", a))
    assert res.ok and res.orbit_injective and res.iterates == 7

    e = fx("ex_shift", n=2, depth=8)
    res = orbit_quasigeodesic_check(e.graph, e.maps["shift"], "x0", 8, _orbit_consts(e.graph, "x0", e.maps["shift"]))
    assert res.ok


def test_orbit_path_errors(fx):
    f = fx("path", n=4)
    with pytest.raises(InputError):
        orbit_path(f.graph, f.maps["shift"], "x4", 2)
    c = fx("cycle", n=3)
    g = PartialSelfEmbedding({"c0": "c0"}, "c0")
    walk, _ = orbit_path(c.graph, g, "c0", 3)
    assert walk == ("c0",)
    assert c.graph.dist_from("c0").get("c9", INF) == INF


def test_fpa_reports(fx):
    rs = complete(parse_presentation("gens a b\n"))
    B = cayley_ball(rs, 6)
    gens = {"a": left_mul_embedding(B, "a"), "b": left_mul_embedding(B, "b")}
    rep = fpa_window_report(B.digraph, gens)
    assert rep["summary"]["case_iv"] and rep["summary"]["case_iv_pairs"] == [["a", "b"]]

    p = fx("path", n=12)
    rep = fpa_window_report(p.graph, p.maps)
    assert rep["summary"]["case_ii_iii"] and rep["direction_classes"] == [["shift"]]

    c = fx("cycle", n=4)
    gens = {"r": c.maps["rotate"], "r2": c.maps["rotate"].compose(c.maps["rotate"], "r2")}
    rep = fpa_window_report(c.graph, gens)
    assert rep["summary"]["case_i"] and not rep["summary"]["case_iv"]


def test_map_file_parsing():
    g = parse_map("# m\nbase x0\nmap x0 x1\nmap x1 x2\n", "shift")
    assert g.base == "x0" and g("x1") == "x2"
    assert parse_map(g.to_text()).mapping == g.mapping
    with pytest.raises(InputError):
        parse_map("map a b\nmap a c\n")
    with pytest.raises(InputError):
        parse_map("mop a b\n")


def test_power_and_iterate(fx):
    g = fx("path", n=6).maps["shift"]
    assert g.power(3)("x1") == "x4" and "x4" not in g.power(3)
    assert g.iterate("x0", 6) == "x6" and g.iterate("x0", 7) is None
    with pytest.raises(InputError):
        g.power(-1)
