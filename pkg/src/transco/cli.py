"""Command-line front end: ``transco build | figure | verify``.

Configuration is layered: built-in defaults, then a JSON or TOML file given
with ``--config``, then explicit flags. The effective configuration is
echoed to ``<out>/config.echo.json``. Exit codes: 0 ok, 1 verification
failure, 2 domain error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from transco import fidelity as fid
from transco import optimize, transcoherent, verify, wigner
from transco.errors import DomainError, ResourceCapError
from transco.fockcore import (
    GaussianSpec,
    coherent_probabilities,
    make_fock,
    make_gaussian,
    moments,
    suggest_nmax,
    write_distribution_csv,
)
from transco.io import write_csv, write_json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

DEFAULTS = {
    "out": "out",
    "seed": 0,
    "threads": 1,
    "caps": {"nbar": 500.0, "n_max": 1200, "J2": 8},
}

BUILD_KINDS = ("fock", "gaussian", "transcoherent-ground", "transcoherent-excited")
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "tcm-fig4", "tcm-fig5")
SUITES = ("exactness", "oracle", "asymptotics", "nogo", "all")

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_CAP = 0, 1, 2, 3


def load_config(path) -> dict:
    if path is None:
        return {}
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        if path.suffix.lower() == ".toml":
            return tomllib.loads(text.decode())
        return json.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise DomainError(f"cannot parse config {path}: {exc}") from None


def _threads(value) -> int:
    if value == "auto":
        return os.cpu_count() or 1
    try:
        n = int(value)
    except (TypeError, ValueError):
        raise DomainError(f"threads must be a positive integer or 'auto', got {value!r}") from None
    if n < 1:
        raise DomainError(f"threads must be >= 1, got {n}")
    return n


def _seed(value) -> int:
    try:
        s = int(value)
    except (TypeError, ValueError):
        raise DomainError(f"seed must be an integer, got {value!r}") from None
    if not 0 <= s < 2**64:
        raise DomainError(f"seed must fit in 64 unsigned bits, got {s}")
    return s


def effective_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the config file and explicit flags (flags win)."""
    file_cfg = load_config(args.config)
    cfg = {k: (dict(v) if isinstance(v, dict) else v) for k, v in DEFAULTS.items()}
    for key in ("out", "seed", "threads"):
        if key in file_cfg:
            cfg[key] = file_cfg[key]
    cfg["caps"].update(file_cfg.get("caps", {}))
    section = dict(file_cfg.get(args.command, {}))
    for key in ("out", "seed", "threads"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    if getattr(args, "cap_nmax", None) is not None:
        cfg["caps"]["n_max"] = args.cap_nmax
    if getattr(args, "cap_j2", None) is not None:
        cfg["caps"]["J2"] = args.cap_j2
    for key, value in vars(args).items():
        if key in ("config", "out", "seed", "threads", "command", "cap_nmax", "cap_j2") or value is None:
            continue
        section[key] = value
    cfg["command"] = args.command
    cfg["params"] = section
    cfg["seed"] = _seed(cfg["seed"])
    cfg["threads"] = _threads(cfg["threads"])
    return cfg


# --------------------------------------------------------------------- build


def _need(params, key, kind):
    if params.get(key) is None:
        raise DomainError(f"build {kind} needs --{key.replace('_', '-')}")
    return params[key]


def cmd_build(cfg: dict) -> int:
    p = cfg["params"]
    kind = p.get("kind")
    if kind not in BUILD_KINDS:
        raise DomainError(f"unknown build kind {kind!r}; choose from {', '.join(BUILD_KINDS)}")
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    meta = {"kind": kind}
    if kind == "fock":
        n = int(_need(p, "n", kind))
        state = make_fock(n, int(p.get("nmax", n)))
    elif kind == "gaussian":
        nbar = float(_need(p, "nbar", kind))
        var = float(_need(p, "var", kind))
        n_max = int(p.get("nmax") or suggest_nmax(nbar, var))
        state = make_gaussian(GaussianSpec(nbar, var, n_max, float(p.get("phase_step", math.pi / 2))))
    else:
        theta = float(_need(p, "theta", kind))
        m = int(p.get("m", 1))
        if kind == "transcoherent-ground":
            build = transcoherent.build_ground(theta, int(_need(p, "nmax", kind)), m)
        else:
            build = transcoherent.build_excited(theta, int(_need(p, "nmin", kind)), int(p.get("k", 0)), m)
        state = build.state
        meta.update(
            tau=build.tau,
            n_boundary=build.n_boundary,
            n_top=build.n_top,
            truncation_leak=build.truncation_leak,
            exact=build.exact,
        )
        print(f"tau = {build.tau:.17g}")
        if not build.exact:
            print(f"note: series truncated at n={build.n_top}, relative leak {build.truncation_leak:.3g}")
    nbar, var = moments(state)
    meta.update(nbar=nbar, var=var)
    print(f"nbar = {nbar:.10g}  var = {var:.10g}")
    write_json(out / "state.json", {**meta, "state": state.to_dict()})
    write_distribution_csv(out / "distribution.csv", state, with_coherent=True)
    return EXIT_OK


# -------------------------------------------------------------------- figure

# "desk" shrinks grids to laptop size; "paper" uses the full original parameters.
FIGURE_PLANS = {
    "fig1": {
        "desk": {"thetas": list(verify.THETAS), "n_max": 200},
        "paper": {"thetas": list(verify.THETAS), "n_max": 200},
    },
    "fig2": {
        "desk": {"thetas": list(verify.THETAS), "n_max_list": list(range(1, 9)), "n_angular": 512},
        "paper": {"thetas": list(verify.THETAS), "n_max_list": list(range(1, 11)), "n_angular": 512},
    },
    "fig3": {
        "desk": {"nbar": 20.0, "n_max": 400, "Theta": math.pi / 2, "points": 33},
        "paper": {"nbar": 20.0, "n_max": 400, "Theta": math.pi / 2, "points": 50},
    },
    # fig4 carries both the single-atom optimal-pulse table and the multi-atom one
    "fig4": {
        "desk": {
            "nbar": 500.0,
            "n_max": 1200,
            "Thetas": [j * math.pi / 4 for j in range(1, 5)],
            "tcm": {"nbars": [100.0], "J2s": [2, 4, 6], "restarts": 4},
        },
        "paper": {
            "nbar": 500.0,
            "n_max": 1200,
            "Thetas": [j * math.pi / 16 for j in range(1, 17)],
            "tcm": {"nbars": [100.0, 200.0], "J2s": [2, 4, 6, 8], "restarts": 8},
        },
    },
    "fig6": {
        "desk": {"nbars": [50.0], "n_theta": 16},
        "paper": {"nbars": [50.0, 200.0], "n_theta": 16},
    },
    "tcm-fig4": {
        "desk": {"nbars": [100.0], "J2s": [2, 4, 6], "restarts": 4},
        "paper": {"nbars": [100.0, 200.0], "J2s": [2, 4, 6, 8], "restarts": 8},
    },
    "tcm-fig5": {
        "desk": {"nbars": [500.0], "J2s": [2, 4, 8], "restarts": 4},
        "paper": {"nbars": [500.0], "J2s": [2, 4, 8, 16], "restarts": 4},
    },
}
FIGURE_PLANS["fig5"] = FIGURE_PLANS["tcm-fig5"]


def _demands(fig: str, plan: dict) -> dict:
    """Largest ``nbar``, ``n_max`` and ``J2`` a figure run will touch."""
    if fig in ("fig1", "fig2"):
        top = plan.get("n_max", max(plan.get("n_max_list", [0])))
        return {"n_max": top}
    if fig == "fig3":
        return {"nbar": plan["nbar"], "n_max": plan["n_max"]}
    if fig == "fig4":
        tcm_need = _demands("tcm-fig4", plan["tcm"])
        return {**tcm_need, "nbar": max(plan["nbar"], tcm_need["nbar"]), "n_max": max(plan["n_max"], tcm_need["n_max"])}
    if fig == "fig6":
        nb = max(plan["nbars"])
        return {"nbar": nb, "n_max": suggest_nmax(nb, 3 * nb)}
    nb = max(plan["nbars"])
    J2 = max(plan["J2s"])
    return {"nbar": nb, "n_max": suggest_nmax(nb, 3 * nb) + J2, "J2": J2}


def check_caps(fig: str, plan: dict, caps: dict):
    for key, need in _demands(fig, plan).items():
        if key in caps and need > caps[key]:
            raise ResourceCapError(f"{fig}: {key}={need:g} exceeds the configured cap {caps[key]:g}")


def _fig1(plan, cfg, out):
    rows = []
    for theta in plan["thetas"]:
        state = transcoherent.build_ground(theta, plan["n_max"]).state
        coh = coherent_probabilities(moments(state)[0], state.n_max)
        rows += [(theta, n, float(p), float(c)) for n, (p, c) in enumerate(zip(state.probs, coh))]
    write_csv(out / "fig1.csv", ["theta", "n", "prob", "coherent_prob"], rows)
    return {}


def _fig2(plan, cfg, out):
    rows = []
    for theta in plan["thetas"]:
        for n in plan["n_max_list"]:
            state = transcoherent.build_ground(theta, n).state
            grid = wigner.PhaseGrid.for_state(state, n_angular=plan["n_angular"])
            rows.append((n, theta, wigner.negativity(state, grid)))
    wigner.write_fig2_csv(out / "fig2.csv", rows)
    return {}


def _fig3(plan, cfg, out):
    grid = optimize.SweepGrid(
        (optimize.SweepAxis("var_over_nbar", 0.5, 1.3, plan["points"]),),
        "jcm_full_sphere",
        {
            "nbar": plan["nbar"],
            "n_max": plan["n_max"],
            "Theta": plan["Theta"],
            "tau": plan["Theta"] / math.sqrt(plan["nbar"]),
        },
    )
    rows = optimize.sweep(grid, cfg["threads"])
    fid.write_fig3_csv(out / "fig3.csv", rows)
    i = optimize.grid_argmax([r[0] for r in rows], [r[1] for r in rows])
    best = optimize.fig3_optimum(plan["nbar"], plan["n_max"], plan["Theta"], seed=cfg["seed"])
    return {"grid_argmax_var_over_nbar": rows[i][0], "optimum": best.as_dict(), "optimum_var_over_nbar": best.param("var") / plan["nbar"]}


def _fig4(plan, cfg, out):
    rows = optimize.fig4_rows(plan["nbar"], np.array(plan["Thetas"]), plan["n_max"], seed=cfg["seed"])
    write_csv(out / "fig4.csv", optimize.FIG4_HEADER, rows)
    _tcm_optima(plan["tcm"], cfg, out / "fig4-tcm.csv")
    return {}


def _fig6(plan, cfg, out):
    rows = optimize.fig6_rows(tuple(plan["nbars"]), plan["n_theta"], seed=cfg["seed"])
    write_csv(out / "fig6.csv", optimize.FIG6_HEADER, rows)
    return {}


def _tcm_optima(plan, cfg, path):
    rows = []
    for nb in plan["nbars"]:
        rows += [(nb,) + r for r in optimize.tcm_fig4_rows(nb, tuple(plan["J2s"]), plan["restarts"], cfg["seed"])]
    write_csv(path, ["nbar"] + optimize.TCM_FIG4_HEADER, rows)


def _tcm_fig4(plan, cfg, out):
    _tcm_optima(plan, cfg, out / "tcm-fig4.csv")
    return {}


def _tcm_fig5(plan, cfg, out):
    rows = []
    for nb in plan["nbars"]:
        rows += [(nb,) + r for r in optimize.tcm_fig5_rows(nb, tuple(plan["J2s"]), plan["restarts"], cfg["seed"])]
    write_csv(out / "tcm-fig5.csv", ["nbar"] + optimize.TCM_FIG5_HEADER, rows)
    return {}


RUNNERS = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _tcm_fig5,
    "fig6": _fig6,
    "tcm-fig4": _tcm_fig4,
    "tcm-fig5": _tcm_fig5,
}


def cmd_figure(cfg: dict) -> int:
    p = cfg["params"]
    fig = p.get("id")
    if fig not in FIGURE_PLANS:
        raise DomainError(f"unknown figure {fig!r}; choose from {', '.join(FIGURES)}")
    scale = p.get("scale", "desk")
    if scale not in ("desk", "paper"):
        raise DomainError(f"scale must be desk or paper, got {scale!r}")
    plan = {**FIGURE_PLANS[fig][scale], **p.get("overrides", {})}
    check_caps(fig, plan, cfg["caps"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    extra = RUNNERS[fig](plan, cfg, out)
    runtime = time.perf_counter() - t0
    manifest = {"figure": fig, "scale": scale, "params": plan, "seed": cfg["seed"], "runtime_s": runtime, **extra}
    # runtime varies between runs, so it lives only in the manifest, never in CSVs
    write_json(out / f"{fig}.manifest.json", manifest)
    print(f"{fig} ({scale}) written to {out} in {runtime:.2f}s")
    return EXIT_OK


# -------------------------------------------------------------------- verify


def cmd_verify(cfg: dict) -> int:
    suite = cfg["params"].get("suite", "all")
    results = verify.run_suite(suite)
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


COMMANDS = {"build": cmd_build, "figure": cmd_figure, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transco", description="Design and verify field states that rotate atoms cleanly.")
    parser.add_argument("--config", help="JSON or TOML file with defaults for any flag")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--seed", help="64-bit seed for optimizer restarts (default: 0)")
    parser.add_argument("--threads", help="worker threads for sweeps, integer or 'auto' (default: 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a field state and write its JSON and distribution CSV")
    b.add_argument("kind", choices=BUILD_KINDS)
    b.add_argument("--n", type=int, help="Fock level")
    b.add_argument("--nmax", type=int, help="truncation (ground recursion: top level)")
    b.add_argument("--nmin", type=int, help="lowest level of an excited-start recursion")
    b.add_argument("--nbar", type=float)
    b.add_argument("--var", type=float)
    b.add_argument("--phase-step", type=float, dest="phase_step")
    b.add_argument("--theta", type=float, help="target pulse area")
    b.add_argument("--k", type=int, help="excited-start branch index")
    b.add_argument("--m", type=int, help="photon order of the coupling")

    f = sub.add_parser("figure", help="reproduce a figure's dataset as CSV plus a manifest")
    f.add_argument("id", choices=FIGURES)
    f.add_argument("--scale", choices=("desk", "paper"))
    f.add_argument("--cap-nmax", type=int, dest="cap_nmax", help="resource cap on the Fock truncation")
    f.add_argument("--cap-j2", type=int, dest="cap_j2", help="resource cap on the atom number")

    v = sub.add_parser("verify", help="run acceptance checks and print PASS/FAIL lines")
    v.add_argument("suite", choices=SUITES)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args)
        Path(cfg["out"]).mkdir(parents=True, exist_ok=True)
        write_json(Path(cfg["out"]) / "config.echo.json", cfg)
        return COMMANDS[args.command](cfg)
    except ResourceCapError as exc:
        print(f"transco: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except DomainError as exc:
        print(f"transco: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
