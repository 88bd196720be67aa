"""Command line interface.

Subcommands: generate (scenario to chain JSON), spectrum (eigenvalues of
a chain), flatnorm (optimal decomposition with certificate), study
(parameter sweeps with verdicts, CSV + JSON), verify (acceptance suite).
Exit codes: 0 success, 1 failed verification, 2 domain error, 3 config
error. Identical config and seed produce byte-identical outputs,
independent of --threads.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .acceptance import run_all
from .basis import default_basis_for_chain, make_rbf_basis, make_spline_basis
from .chains import boundary, chain_to_json, load_chain, mass, set_of
from .errors import ConfigError, CurrentLabError
from .flatnorm import flat_norm
from .scenarios import (OmegaMesh, ScenarioSpec, gen_circle, gen_dumbbell,
                        gen_example1_curve, gen_swiss_cheese,
                        gen_two_circles, generate, scenario_names)
from .spectral import (ambient_lambda, ambient_lambda_dirichlet,
                       intrinsic_curve_spectrum, intrinsic_surface_spectrum)

VERDICT_REL_TOL = 0.05
VERDICT_ABS_TOL = 1e-6
SQUARE_LAMBDA1 = 2.0 * math.pi ** 2


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors map to the config-error exit code."""

    def error(self, message):
        raise ConfigError(message)


def _load_config(path):
    if path is None:
        raise ConfigError("--config is required for this command")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config: %s" % exc)
    except json.JSONDecodeError as exc:
        raise ConfigError("config is not valid JSON: %s" % exc)


def _require(cfg, key, kind=None):
    if not isinstance(cfg, dict) or key not in cfg:
        raise ConfigError("config key %r is required" % key)
    value = cfg[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError("config key %r must be of type %s"
                          % (key, kind.__name__))
    return value


def _resolve_out(args, cfg, default_name):
    name = cfg.get("output", default_name)
    if not isinstance(name, str) or not name:
        raise ConfigError("config key 'output' must be a file name")
    out_dir = getattr(args, "out", None)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        return os.path.join(out_dir, name)
    return name


def _write_json(data, path):
    with open(path, "w") as fh:
        fh.write(json.dumps(data, sort_keys=True, indent=2))
        fh.write("\n")


def _build_scenario(sc):
    name = _require(sc, "name", str)
    params = sc.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("scenario params must be an object")
    if name not in scenario_names():
        raise ConfigError("unknown scenario %r (known: %s)"
                          % (name, ", ".join(scenario_names())))
    try:
        return generate(ScenarioSpec(name, params))
    except TypeError as exc:
        raise ConfigError("bad parameters for scenario %r: %s"
                          % (name, exc))


def _chain_from_config(cfg):
    if "chain" in cfg and "scenario" in cfg:
        raise ConfigError("give either 'chain' or 'scenario', not both")
    if "chain" in cfg:
        path = _require(cfg, "chain", str)
        try:
            return load_chain(path)
        except OSError as exc:
            raise ConfigError("cannot read chain file: %s" % exc)
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ConfigError("malformed chain file %r: %s" % (path, exc))
    if "scenario" in cfg:
        obj = _build_scenario(_require(cfg, "scenario", dict))
        return obj.chain if isinstance(obj, OmegaMesh) else obj
    raise ConfigError("config needs a 'chain' path or a 'scenario'")


def _basis_from_config(cfg, chain):
    desc = cfg.get("basis")
    if desc is None:
        return default_basis_for_chain(chain)
    kind = _require(desc, "kind", str)
    if kind == "spline":
        box = _require(desc, "box", list)
        if len(box) != 2:
            raise ConfigError("spline box must be [lo, hi] corner lists")
        cells = _require(desc, "cells")
        degree = desc.get("degree", 3)
        return make_spline_basis((box[0], box[1]), cells, degree=degree)
    if kind == "rbf":
        centers = np.asarray(_require(desc, "centers", list), dtype=float)
        width = float(_require(desc, "width"))
        return make_rbf_basis(centers, width)
    raise ConfigError("unknown basis kind %r" % kind)


def cmd_generate(args):
    cfg = _load_config(args.config)
    obj = _build_scenario(_require(cfg, "scenario", dict))
    if isinstance(obj, OmegaMesh):
        chain = obj.chain
        extra = {"arc_vertices": [int(v) for v in obj.arc_vertices]}
    else:
        chain, extra = obj, {}
    data = chain_to_json(chain)
    data["mass"] = mass(chain)
    data.update(extra)
    path = _resolve_out(args, cfg, "chain.json")
    _write_json(data, path)
    print("wrote %s (mass %.12g)" % (path, data["mass"]))
    return 0


def cmd_spectrum(args):
    cfg = _load_config(args.config)
    chain = _chain_from_config(cfg)
    method = _require(cfg, "method", str)
    k = _require(cfg, "k", int)
    order = cfg.get("order", 2)
    if method == "intrinsic":
        bc = cfg.get("bc", "closed")
        if chain.dim == 1:
            res = intrinsic_curve_spectrum(chain, bc, k)
        else:
            res = intrinsic_surface_spectrum(chain, bc, k)
    elif method == "ambient":
        res = ambient_lambda(chain, _basis_from_config(cfg, chain), k,
                             order=order)
    elif method == "ambient_dirichlet":
        if "epsilon" not in cfg:
            raise ConfigError("method 'ambient_dirichlet' needs 'epsilon'")
        res = ambient_lambda_dirichlet(chain,
                                       _basis_from_config(cfg, chain), k,
                                       float(cfg["epsilon"]), order=order)
    else:
        raise ConfigError("unknown method %r (known: intrinsic, ambient, "
                          "ambient_dirichlet)" % method)
    path = _resolve_out(args, cfg, "spectrum.json")
    _write_json(res.to_json(), path)
    print("wrote %s (%d values, %d infinite)"
          % (path, len(res.values), res.inf_count))
    return 0


def cmd_flatnorm(args):
    cfg = _load_config(args.config)
    chain = _chain_from_config(cfg)
    cert = flat_norm(chain)
    data = {
        "value": cert.value,
        "U": chain_to_json(cert.U),
        "V": chain_to_json(cert.V),
    }
    path = _resolve_out(args, cfg, "flatnorm.json")
    _write_json(data, path)
    print("wrote %s (flat norm %.12g)" % (path, cert.value))
    return 0


def _verdict(ok):
    return "pass" if ok else "fail"


def _within(proxy, limit):
    return proxy <= limit + VERDICT_REL_TOL * abs(limit) + VERDICT_ABS_TOL


def _run_grid(point_fn, grid, threads):
    """Evaluate one study point per grid value, assembling results in
    grid order so the output does not depend on the thread count."""
    results = [None] * len(grid)
    failures = {}

    def run(i):
        try:
            results[i] = point_fn(grid[i])
        except CurrentLabError as exc:
            failures[i] = exc

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(len(grid))))
    else:
        for i in range(len(grid)):
            run(i)
    rows = [row for chunk in results if chunk for row in chunk]
    error = failures[min(failures)] if failures else None
    return rows, error


def _study_example1(grid, threads):
    grid = [float(g) for g in (grid or (0.2, 0.1, 0.05, 0.02))]
    limit_mass = mass(gen_two_circles(segments=256))

    def point(eps):
        ch = gen_example1_curve(eps, 64)
        a = 2.0 * math.pi * eps / (1.0 + 2.0 * eps)
        L = (4.0 * math.pi / (1.0 + 2.0 * eps)
             + 4.0 * (3.0 - math.cos(a)))
        lam_i = intrinsic_curve_spectrum(ch, "closed", 2).values[1]
        lam_a = ambient_lambda(ch, default_basis_for_chain(ch),
                               2).values[1]
        return [("example1", eps, "mass", mass(ch)),
                ("example1", eps, "lambda2_intrinsic", lam_i),
                ("example1", eps, "lambda2_ambient", lam_a),
                ("example1", eps, "lambda2_target",
                 (2.0 * math.pi / L) ** 2)]

    rows, error = _run_grid(point, grid, threads)
    meta = {"limit_mass": limit_mass, "limit_lambda2": 0.0}
    if error is not None:
        return grid, rows, {"mass_hypothesis": "inconclusive",
                            "neumann_semicontinuity": "inconclusive"}, \
            meta, error
    by = {(p, q): v for (_, p, q, v) in rows}
    e1, e2 = sorted(grid)[:2]
    g1 = by[(e1, "mass")] - limit_mass
    g2 = by[(e2, "mass")] - limit_mass
    extrap = g1 + (g1 - g2) * e1 / (e2 - e1)
    meta["mass_gap_extrapolated"] = extrap
    proxy = max(by[(e1, "lambda2_intrinsic")],
                by[(e2, "lambda2_intrinsic")])
    verdicts = {
        "mass_hypothesis": _verdict(
            abs(extrap) <= VERDICT_REL_TOL * limit_mass + VERDICT_ABS_TOL),
        "neumann_semicontinuity": _verdict(_within(proxy, 0.0)),
    }
    return grid, rows, verdicts, meta, None


def _study_dumbbell(grid, threads):
    grid = [float(g) for g in (grid or (0.05, 0.02, 0.01))]

    def point(eps):
        ch = gen_dumbbell(eps, azimuthal=32, axial=128)
        lam = intrinsic_surface_spectrum(ch, "closed", 3).values[2]
        return [("dumbbell", eps, "mass", mass(ch)),
                ("dumbbell", eps, "lambda3_intrinsic", lam)]

    rows, error = _run_grid(point, grid, threads)
    meta = {"limit_lambda3": 2.0}
    if error is not None:
        return grid, rows, {"neumann_semicontinuity": "inconclusive",
                            "continuity": "inconclusive"}, meta, error
    by = {(p, q): v for (_, p, q, v) in rows}
    e1, e2 = sorted(grid)[:2]
    proxy = max(by[(e1, "lambda3_intrinsic")],
                by[(e2, "lambda3_intrinsic")])
    verdicts = {
        "neumann_semicontinuity": _verdict(_within(proxy, 2.0)),
        "continuity": _verdict(
            abs(proxy - 2.0) <= VERDICT_REL_TOL * 2.0 + VERDICT_ABS_TOL),
    }
    return grid, rows, verdicts, meta, None


def _study_swiss_cheese(grid, threads):
    grid = [int(g) for g in (grid or (1, 2, 3))]

    def point(level):
        ch = gen_swiss_cheese(level)
        lam = intrinsic_surface_spectrum(ch, "dirichlet", 1).values[0]
        verts = ch.complex.vertices[set_of(boundary(ch)).vertex_indices()]
        d = np.minimum.reduce([verts[:, 0], 1.0 - verts[:, 0],
                               verts[:, 1], 1.0 - verts[:, 1]])
        rim = d > 1e-3
        # deepest rim point: the hole boundaries stay this far from the
        # limit square's edge, so they fit in no thin edge neighborhood
        witness = float(d[rim].max()) if rim.any() else 0.0
        return [("swiss_cheese", level, "lambda1_dirichlet", lam),
                ("swiss_cheese", level, "lower_bound", 2.0 ** (0.5 * level)),
                ("swiss_cheese", level, "boundary_witness", witness)]

    rows, error = _run_grid(point, grid, threads)
    meta = {"limit_lambda1": SQUARE_LAMBDA1}
    if error is not None:
        return grid, rows, {"dirichlet_semicontinuity": "inconclusive",
                            "boundary_hypothesis": "inconclusive"}, \
            meta, error
    by = {(p, q): v for (_, p, q, v) in rows}
    i1, i2 = sorted(grid)[-2:]
    proxy = max(by[(i1, "lambda1_dirichlet")],
                by[(i2, "lambda1_dirichlet")])
    # the hole rims would have to crowd into a thin neighborhood of the
    # limit square's edge for semicontinuity to apply; the deepest rim
    # point stays far inside instead
    w_proxy = min(by[(i1, "boundary_witness")],
                  by[(i2, "boundary_witness")])
    verdicts = {
        "dirichlet_semicontinuity": _verdict(_within(proxy,
                                                     SQUARE_LAMBDA1)),
        "boundary_hypothesis": _verdict(w_proxy <= 1e-3),
    }
    return grid, rows, verdicts, meta, None


def _study_refinement(grid, threads):
    grid = [int(g) for g in (grid or (8, 12, 16))]
    circle = gen_circle(segments=256)
    intrinsic = intrinsic_curve_spectrum(circle, "closed", 2).values[1]

    def point(cells):
        basis = make_spline_basis(((-1.05, -1.05), (1.05, 1.05)),
                                  (cells, cells))
        lam = ambient_lambda(circle, basis, 2, order=3,
                             null_threshold=1e-12).values[1]
        return [("refinement", cells, "lambda2_ambient", lam),
                ("refinement", cells, "lambda2_intrinsic", intrinsic)]

    rows, error = _run_grid(point, grid, threads)
    meta = {"box": [[-1.05, -1.05], [1.05, 1.05]], "order": 3,
            "null_threshold": 1e-12}
    if error is not None:
        return grid, rows, {"refinement_monotone": "inconclusive",
                            "upper_bound": "inconclusive"}, meta, error
    seq = [v for (_, _, q, v) in rows if q == "lambda2_ambient"]
    verdicts = {
        "refinement_monotone": _verdict(
            all(a >= b - 1e-9 for a, b in zip(seq, seq[1:]))),
        "upper_bound": _verdict(
            all(v >= intrinsic - 1e-6 for v in seq)),
    }
    return grid, rows, verdicts, meta, None


_STUDIES = {
    "example1": _study_example1,
    "dumbbell": _study_dumbbell,
    "swiss_cheese": _study_swiss_cheese,
    "refinement": _study_refinement,
}


def cmd_study(args):
    cfg = _load_config(args.config)
    family = _require(cfg, "family", str)
    if family not in _STUDIES:
        raise ConfigError("unknown study family %r (known: %s)"
                          % (family, ", ".join(sorted(_STUDIES))))
    grid = cfg.get("grid")
    if grid is not None and (not isinstance(grid, list) or not grid):
        raise ConfigError("'grid' must be a non-empty list")
    threads = getattr(args, "threads", 1) or 1
    grid, rows, verdicts, meta, error = _STUDIES[family](grid, threads)

    csv_path = _resolve_out(args, cfg, "study.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "param", "quantity", "value"])
        for scenario, param, quantity, value in rows:
            writer.writerow([scenario, repr(float(param)), quantity,
                             repr(float(value))])

    report = {
        "family": family,
        "grid": [float(g) for g in grid],
        "rows": [[s, float(p), q, float(v)] for s, p, q, v in rows],
        "verdicts": verdicts,
        "metadata": {
            "seed": int(getattr(args, "seed", 0) or 0),
            "version": __version__,
            "tolerances": {"verdict_rel": VERDICT_REL_TOL,
                           "verdict_abs": VERDICT_ABS_TOL},
            **meta,
        },
    }
    json_path = os.path.splitext(csv_path)[0] + ".json"
    _write_json(report, json_path)
    print("wrote %s and %s" % (csv_path, json_path))
    for name in sorted(verdicts):
        print("verdict %s: %s" % (name, verdicts[name]))
    if error is not None:
        raise error
    return 0


def cmd_verify(args):
    cfg = _load_config(args.config) if args.config else {}
    numbers = cfg.get("criteria")
    if numbers is not None:
        if (not isinstance(numbers, list)
                or not all(isinstance(n, int) for n in numbers)):
            raise ConfigError("'criteria' must be a list of integers")
    try:
        records = run_all(numbers, seed=int(getattr(args, "seed", 0) or 0))
    except ValueError as exc:
        raise ConfigError(str(exc))
    all_ok = all(r["passed"] for r in records)
    for r in records:
        print("criterion %d  %-28s %s  (%.1fs of %.0fs)"
              % (r["criterion"], r["name"],
                 "PASS" if r["passed"] else "FAIL",
                 r["elapsed"], r["budget"]))
        if not r["passed"]:
            for line in r["details"]:
                if line.startswith("FAIL"):
                    print("    " + line)
    report = {
        "passed": all_ok,
        "version": __version__,
        "criteria": [{
            "criterion": r["criterion"],
            "name": r["name"],
            "passed": r["passed"],
            "budget": r["budget"],
            "details": r["details"],
        } for r in records],
    }
    path = _resolve_out(args, cfg, "verify.json")
    _write_json(report, path)
    print("wrote %s" % path)
    return 0 if all_ok else 1


def _build_parser():
    parser = _Parser(prog="currentlab",
                     description="polyhedral chains: mass, flat norm, "
                                 "and spectra of mass measures")
    parser.add_argument("--version", action="version",
                        version="currentlab " + __version__)
    sub = parser.add_subparsers(dest="command")
    specs = (
        ("generate", cmd_generate, "build a scenario chain"),
        ("spectrum", cmd_spectrum, "eigenvalues of a chain"),
        ("flatnorm", cmd_flatnorm, "flat norm with certificate"),
        ("study", cmd_study, "parameter sweep with verdicts"),
        ("verify", cmd_verify, "run the acceptance suite"),
    )
    for name, fn, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="path to a JSON config")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "fn", None) is None:
            raise ConfigError("a subcommand is required "
                              "(generate, spectrum, flatnorm, study, "
                              "verify)")
        return args.fn(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 3
    except CurrentLabError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
