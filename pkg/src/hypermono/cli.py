"""Command-line front end.

JSON reports go to stdout, a short human summary and structured error
lines go to stderr. Exit status: 0 success, 1 analysis-negative, 2 input
error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .digraph import InputError, format_digraph, read_digraph, verify_root
from .embeddings import (
    FpaParams,
    direction_prefix,
    elliptic_certificate,
    fixes_direction_window,
    fpa_window_report,
    read_map,
    translation_certificate,
    verify_embedding,
)
from .freeness import PingPongInstance, SearchParams, brute_force_free, check_pingpong, search_pingpong
from .gallery import CATALOG, make_fixture, usage
from .hyperbolicity import measure_constants
from .monoid import RefusedError, cancellativity_window, cayley_ball, complete, growth_table, read_presentation
from .rays import equivalence_window, ray_leq_window, read_ray, rho_truncated, tail_containment, validate_ray

DEFAULTS = {"cap": 64, "radius": 6, "max_power": 20, "k": 5}


class Negative(Exception):
    """Analysis ran but a requested certificate or check did not succeed."""


def _digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _root(D, given):
    o = given or D.root
    if o is None:
        raise InputError("no root: pass --root or add a 'root' line")
    ok, witness = verify_root(D, o)
    if not ok:
        raise InputError(f"{o} is not a root of the window (cannot reach {witness})")
    return o


def _default_M(delta: int) -> int:
    return math.ceil(2 * delta * 6)


# -- subcommands --------------------------------------------------------------------


def cmd_analyze(args):
    D = read_digraph(args.digraph)
    o = _root(D, args.root)
    consts = measure_constants(D, o, args.radius, args.cap)
    _note(f"delta_hat={consts.delta} phi_hat({consts.delta + 1})={consts.phi(consts.delta + 1)} "
          f"lambda={consts.lambda_fellow} kappa={consts.kappa_projectivity} N={consts.N_ball_bound}")
    return {
        "inputs": {args.digraph: _digest(args.digraph)},
        "window": {"vertices": len(D), "edges": D.edge_count, "root": o, "radius": args.radius,
                   "cap": args.cap, "note": D.window_note},
        **consts.to_json(),
    }


def cmd_cayley(args):
    P = read_presentation(args.presentation)
    RS = complete(P, args.max_rules, args.max_len)
    report = {
        "inputs": {args.presentation: _digest(args.presentation)},
        "system": RS.to_json(),
        "window": {"radius": args.radius, "max_rules": args.max_rules, "max_len": args.max_len},
    }
    if not RS.confluent:
        _note("completion did not reach a confluent system")
        report["refused"] = "rewrite system is not known to be confluent"
        raise Negative(report)
    B = cayley_ball(RS, args.radius)
    G = growth_table(B)
    canc = cancellativity_window(B)
    for t, c in enumerate(G.counts):
        _note(f"{t},{c}")
    _note(f"theta_hat={G.rate_estimate:.6f}")
    if args.growth_csv:
        Path(args.growth_csv).write_text(G.to_csv(), encoding="utf-8")
    report.update({
        "ball": {"elements": len(B), "edges": B.digraph.edge_count},
        "growth": list(G.counts),
        "theta_hat": G.rate_estimate,
        "cancellativity": {k: v.to_json() for k, v in canc.items()},
    })
    return report


def _measure_M(D, o, args):
    if args.M is not None:
        return args.M, None
    consts = measure_constants(D, o, args.radius, args.cap)
    return _default_M(consts.delta), consts


def cmd_classify(args):
    D = read_digraph(args.digraph)
    g = read_map(args.map)
    o = _root(D, g.base)
    g.base = o
    report = {"inputs": {args.digraph: _digest(args.digraph), args.map: _digest(args.map)}}
    chk = verify_embedding(D, g)
    report["verification"] = chk.to_json()
    if not chk.ok:
        _note(f"map fails verification: {chk.clause} {chk.witness}")
        raise Negative(report)
    M, consts = _measure_M(D, o, args)
    ell = elliptic_certificate(D, g, args.ball_radius, args.max_power)
    tr = translation_certificate(D, g)
    assert not (ell.found and tr.found), "elliptic and translation certificates both found"
    report["certificates"] = {"elliptic": ell.to_json(), "translation": tr.to_json()}
    if tr.found:
        dp = direction_prefix(D, g, args.depth, args.samples, args.cap)
        report["direction"] = dp.to_json()
        report["fixes_own_direction"] = fixes_direction_window(D, g, dp, M, args.k).to_json()
    fpa = fpa_window_report(D, {g.name: g}, FpaParams(args.ball_radius, args.max_power, args.depth,
                                                      args.samples, args.cap, M, args.k))
    report["fpa"] = fpa["summary"]
    report["window"] = {"vertices": len(D), "edges": D.edge_count, "root": o, "max_power": args.max_power,
                        "ball_radius": args.ball_radius, "depth": args.depth, "samples": args.samples,
                        "cap": args.cap, "M": M, "k": args.k,
                        "delta_hat": None if consts is None else consts.delta}
    found = [c.tag for c in (ell, tr) if c.found]
    _note("certificate: " + (", ".join(found) if found else "none"))
    if not found:
        raise Negative(report)
    return report


def _read_set(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list) or not all(isinstance(v, str) for v in data):
        raise InputError(f"{path}: expected a JSON list of vertex ids")
    return data


def cmd_pingpong(args):
    D = read_digraph(args.digraph)
    g = read_map(args.map1)
    h = read_map(args.map2)
    o = _root(D, g.base)
    files = [args.digraph, args.map1, args.map2] + (args.check or [])
    report = {"inputs": {f: _digest(f) for f in files}}
    probes = {o}
    if args.check:
        U, V = _read_set(args.check[0]), _read_set(args.check[1])
        for v in U + V:
            D._check(v)
        cert = check_pingpong(PingPongInstance(g, h, U, V), D)
        report["mode"] = "check"
    else:
        consts = measure_constants(D, o, args.radius, args.cap)
        params = SearchParams(consts.delta, consts.phi(consts.delta + 1), args.depth, max(args.depth, 4),
                              args.samples, args.cap, args.max_power)
        res = search_pingpong(D, g, h, o, params)
        report["mode"] = "search"
        report["search"] = res.to_json()
        report["window"] = {"radius": args.radius, "cap": args.cap, "delta_hat": consts.delta,
                            "max_power": args.max_power, "depth": args.depth}
        cert = res.certificate
        if res.attractors:
            probes |= res.attractors[0].S | res.attractors[1].S
        if res.found:
            g, h = res.instance.m1, res.instance.m2
    ok = cert is not None and cert.found
    report["certificate"] = None if cert is None else cert.to_json()
    _note("certificate: " + ("PingPongFree" if ok else "none"))
    if args.oracle:
        names = (g.name, h.name) if g.name != h.name else ("m1", "m2")
        v = brute_force_free(D, g, h, args.oracle, probes, names)
        report["oracle"] = v.to_json()
        _note(f"oracle: {v.distinct}/{v.words} distinct")
        ok = ok and v.free
    if not ok:
        raise Negative(report)
    return report


def cmd_rays(args):
    D = read_digraph(args.digraph)
    o = _root(D, args.root)
    R1 = validate_ray(D, read_ray(args.ray1))
    R2 = validate_ray(D, read_ray(args.ray2))
    if args.delta is None:
        consts = measure_constants(D, o, args.radius, args.cap)
        delta = consts.delta
    else:
        delta = args.delta
    M = _default_M(delta) if args.M is None else args.M
    eq = equivalence_window(D, R1, R2, M, args.k)
    found, split = tail_containment(D, R1, R2, delta)
    rho = rho_truncated(D, o, R1.vertices, R2.vertices, args.tail_from)
    report = {
        "inputs": {f: _digest(f) for f in (args.digraph, args.ray1, args.ray2)},
        "window": {"root": o, "M": M, "k": args.k, "delta": delta, "tail_from": args.tail_from},
        "leq_12": ray_leq_window(D, R1, R2, M, args.k).to_json(),
        "leq_21": ray_leq_window(D, R2, R1, M, args.k).to_json(),
        "equivalent": eq.to_json(),
        "tail_containment": {"holds": found, "split": split},
        "rho": rho.to_json(),
    }
    _note(f"equivalent={eq.holds} rho={rho.value}")
    if not eq.holds:
        raise Negative(report)
    return report


def cmd_gallery(args):
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise InputError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        params[k] = v
    fx = make_fixture(args.name, **params)
    dg = format_digraph(fx.graph)
    maps = {n: g.to_text() for n, g in sorted(fx.maps.items())}
    rays = {n: R.to_line() + "\n" for n, R in sorted(fx.rays.items())}
    report = {"fixture": fx.name, "params": {k: fx.params[k] for k in sorted(fx.params)},
              "root": fx.root, "vertices": len(fx.graph), "edges": fx.graph.edge_count,
              "predicted": fx.predicted, "note": fx.graph.window_note, "notes": fx.notes}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        files = {f"{fx.name}.dg": dg}
        files.update({f"{n}.map": t for n, t in maps.items()})
        files.update({f"{_safe(n)}.ray": t for n, t in rays.items()})
        for fname, text in files.items():
            (out / fname).write_text(text, encoding="utf-8")
        report["files"] = {f: hashlib.sha256(t.encode()).hexdigest() for f, t in sorted(files.items())}
    else:
        report["digraph"] = dg
        report["maps"] = maps
        report["rays"] = rays
    _note(f"{fx.name}: {len(fx.graph)} vertices, {fx.graph.edge_count} edges, maps {sorted(fx.maps)}")
    return report


def _safe(name: str) -> str:
    return name.replace("+", "_pos").replace("-", "_neg")


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypermono", description="Window analyses of hyperbolic digraphs and monoids.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def window(sp):
        sp.add_argument("--radius", type=int, default=DEFAULTS["radius"])
        sp.add_argument("--cap", type=int, default=DEFAULTS["cap"])

    a = sub.add_parser("analyze", help="delta_hat, phi_hat table and derived constants")
    a.add_argument("digraph")
    a.add_argument("--root")
    window(a)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("cayley", help="Cayley ball, growth table, cancellativity")
    c.add_argument("presentation")
    c.add_argument("--radius", type=int, required=True)
    c.add_argument("--growth-csv")
    c.add_argument("--max-rules", type=int, default=200)
    c.add_argument("--max-len", type=int, default=32)
    c.set_defaults(func=cmd_cayley)

    k = sub.add_parser("classify", help="certificates and direction for one self-embedding")
    k.add_argument("digraph")
    k.add_argument("map")
    k.add_argument("--max-power", type=int, default=DEFAULTS["max_power"])
    k.add_argument("--ball-radius", type=int, default=1)
    k.add_argument("--depth", type=int, default=4)
    k.add_argument("--samples", type=int, default=20)
    k.add_argument("--M", type=int)
    k.add_argument("--k", type=int, default=DEFAULTS["k"])
    window(k)
    k.set_defaults(func=cmd_classify)

    pp = sub.add_parser("pingpong", help="ping-pong certificate and brute-force oracle")
    pp.add_argument("digraph")
    pp.add_argument("map1")
    pp.add_argument("map2")
    mode = pp.add_mutually_exclusive_group()
    mode.add_argument("--search", action="store_true", help="search attractor sets and powers (default)")
    mode.add_argument("--check", nargs=2, metavar=("U.json", "V.json"))
    pp.add_argument("--oracle", type=int, metavar="L")
    pp.add_argument("--max-power", type=int, default=DEFAULTS["max_power"])
    pp.add_argument("--depth", type=int, default=1)
    pp.add_argument("--samples", type=int, default=20)
    window(pp)
    pp.set_defaults(func=cmd_pingpong)

    r = sub.add_parser("rays", help="ray order, equivalence, tail containment and rho")
    r.add_argument("digraph")
    r.add_argument("ray1")
    r.add_argument("ray2")
    r.add_argument("--M", type=int)
    r.add_argument("--k", type=int, default=DEFAULTS["k"])
    r.add_argument("--root")
    r.add_argument("--delta", type=int)
    r.add_argument("--tail-from", type=int, default=0)
    window(r)
    r.set_defaults(func=cmd_rays)

    g = sub.add_parser("gallery", help="emit a fixture", description=usage())
    g.add_argument("name", choices=sorted(CATALOG))
    g.add_argument("--param", action="append", metavar="k=v")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gallery)
    return p


def _emit(report: dict, argv) -> None:
    out = {"command": list(argv), **report}
    sys.stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        report = args.func(args)
    except Negative as neg:
        _emit(neg.args[0], argv)
        return 1
    except RefusedError as exc:
        _error("refused", str(exc))
        return 1
    except (InputError, OSError, json.JSONDecodeError) as exc:
        _error("input", str(exc))
        return 2
    _emit(report, argv)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
