"""Command-line front end.

Every command resolves a full configuration (defaults < ``--config`` file <
flags), writes it to ``config.json`` in the output directory and echoes it
in ``summary.json``; re-running with ``--config config.json`` reproduces the
outputs byte for byte.

Exit codes: 0 success, 2 configuration error, 3 tolerance failure,
4 domain error. Failures print a JSON object on standard error.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import numpy as np

from . import balance, characteristics, io, kernel, montecarlo, riemann
from .errors import ConfigError, StochGasError
from .profiles import profile_from_spec, riemann_data_from_spec
from .quadrature import QuadratureConfig

QUAD_DEFAULTS = QuadratureConfig().to_dict()

DEFAULTS = {
    "fields": {
        "profile": {"kind": "riemann", "params": {"rho1": 1.0, "rho2": 1.0, "u1": 0.0, "u2": -1.0}},
        "sigma": [0.01, 0.01],
        "t": [1.0],
        "x": {"min": -2.0, "max": 1.0, "n": 61},
        "quadrature": QUAD_DEFAULTS,
    },
    "mc": {
        "profile": {"kind": "riemann", "params": {"rho1": 1.0, "rho2": 1.0, "u1": 0.0, "u2": -1.0}},
        "sigma": [0.05, 0.05],
        "t": 1.0,
        "n": 1000000,
        "seed": None,
        "window": None,
        "chunk_count": 8,
        "workers": 1,
        "bins": {"min": -3.0, "max": 2.0, "n": 200},
        "export_particles": False,
        "quadrature": QUAD_DEFAULTS,
    },
    "riemann": {
        "profile": {"kind": "riemann", "params": {"rho1": 1.0, "rho2": 1.0, "u1": 0.0, "u2": -1.0}},
        "t": 1.0,
        "x": {"min": -2.0, "max": 1.0, "n": 301},
        "gamma": None,
    },
    "gamma": {
        "ratios": [1.0, 0.1, 0.01, 0.001],
    },
    "residuals": {
        "profile": {"kind": "gaussian-bump", "params": {
            "amplitude": 1.0, "width": 1.0, "center": 0.5, "base": 0.0,
            "velocity": {"kind": "tanh-compression", "params": {"a": 1.0, "amplitude": 1.0}}}},
        "sigma": [0.2, 0.2],
        "grid": {"t_min": 0.5, "t_max": 1.0, "n_t": 5, "x_min": -3.0, "x_max": 3.0,
                 "n_x": 11, "h": 0.05},
        "refine": True,
        "i_sigma_points": 20,
        "totals": {"window": [-10.0, 10.0], "t_list": [0.0, 0.5, 1.0, 1.5, 2.0]},
        "quadrature": QUAD_DEFAULTS,
    },
    "limit": {
        "profile": {"kind": "tanh-compression", "params": {"a": 1.0}},
        "t": 2.0,
        "x": {"min": -2.0, "max": 2.0, "n": 81},
        "scan": characteristics.ScanConfig().to_dict(),
    },
}


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), _value(v)


def _common(p: argparse.ArgumentParser, profile=True, sigma=True, quad=True):
    p.add_argument("--config", type=Path, help="JSON configuration file")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
    if profile:
        p.add_argument("--profile", help="profile kind (riemann, constant, tanh-compression, ...)")
        p.add_argument("--param", action="append", type=_param, default=[],
                       metavar="KEY=VALUE", help="profile parameter (repeatable)")
        p.add_argument("--profile-json", help="full profile spec as JSON")
        p.add_argument("--mollify", type=float, metavar="EPS", help="mollify the profile")
    if sigma:
        p.add_argument("--sigma", type=float, nargs=2, metavar=("S1", "S2"))
    if quad:
        p.add_argument("--rel-tol", type=float)
        p.add_argument("--abs-tol", type=float)
        p.add_argument("--exp-cutoff", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochgas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fields", help="kernel fields rho, u, pi on an (t, x) grid")
    _common(p)
    p.add_argument("--t", type=float, nargs="+")
    p.add_argument("--x", type=float, nargs=3, metavar=("MIN", "MAX", "N"))

    p = sub.add_parser("mc", help="Monte Carlo ensemble binned against the kernel")
    _common(p)
    p.add_argument("--t", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--chunk-count", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--bins", type=float, nargs=3, metavar=("MIN", "MAX", "N"))
    p.add_argument("--export-particles", action="store_true", default=None)

    p = sub.add_parser("riemann", help="exact free-particle fan for compression data")
    _common(p, sigma=False, quad=False)
    p.add_argument("--t", type=float)
    p.add_argument("--x", type=float, nargs=3, metavar=("MIN", "MAX", "N"))
    p.add_argument("--gamma", type=float, help="also report the energy residual at this exponent")

    p = sub.add_parser("gamma", help="adiabatic exponent sweep over density ratios")
    _common(p, profile=False, sigma=False, quad=False)
    p.add_argument("--ratios", type=float, nargs="+")

    p = sub.add_parser("residuals", help="balance-law residuals and conservation")
    _common(p)
    p.add_argument("--grid", type=float, nargs=7,
                   metavar=("T_MIN", "T_MAX", "N_T", "X_MIN", "X_MAX", "N_X", "H"))
    p.add_argument("--no-refine", dest="refine", action="store_false", default=None)
    p.add_argument("--i-sigma-points", type=int)
    p.add_argument("--totals-window", type=float, nargs=2)
    p.add_argument("--t-list", type=float, nargs="+")

    p = sub.add_parser("limit", help="small-noise limit fields along characteristics")
    _common(p, sigma=False, quad=False)
    p.add_argument("--t", type=float)
    p.add_argument("--x", type=float, nargs=3, metavar=("MIN", "MAX", "N"))
    p.add_argument("--resolution", type=float)
    return parser


def _grid3(v):
    return {"min": float(v[0]), "max": float(v[1]), "n": int(v[2])}


def resolve_config(args: argparse.Namespace) -> dict:
    cmd = args.command
    cfg = copy.deepcopy(DEFAULTS[cmd])
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        loaded.pop("command", None)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {cmd}: {sorted(unknown)}")
        for k, v in loaded.items():
            if isinstance(cfg.get(k), dict) and isinstance(v, dict) and k != "profile":
                cfg[k] = {**cfg[k], **v}
            else:
                cfg[k] = v

    a = vars(args)
    if a.get("profile_json"):
        cfg["profile"] = _value(a["profile_json"])
        if not isinstance(cfg["profile"], dict):
            raise ConfigError("--profile-json must be a JSON object")
    elif a.get("profile"):
        cfg["profile"] = {"kind": a["profile"], "params": dict(a.get("param") or [])}
    elif a.get("param"):
        cfg["profile"] = {**cfg["profile"],
                          "params": {**cfg["profile"].get("params", {}), **dict(a["param"])}}
    if a.get("mollify") is not None:
        cfg["profile"] = {"kind": "mollified",
                          "params": {"epsilon": a["mollify"], "base": cfg["profile"]}}
    if a.get("sigma") is not None:
        cfg["sigma"] = list(a["sigma"])
    for flag, key in (("rel_tol", "rel_tol"), ("abs_tol", "abs_tol"), ("exp_cutoff", "exp_cutoff")):
        if a.get(flag) is not None:
            cfg["quadrature"] = {**cfg["quadrature"], key: a[flag]}

    simple = {"t", "n", "seed", "chunk_count", "workers", "export_particles", "refine",
              "i_sigma_points", "ratios", "gamma"}
    for k in simple:
        if a.get(k) is not None and k in cfg:
            cfg[k] = a[k]
    if a.get("window") is not None:
        cfg["window"] = list(a["window"])
    if a.get("x") is not None:
        cfg["x"] = _grid3(a["x"])
    if a.get("bins") is not None:
        cfg["bins"] = _grid3(a["bins"])
    if a.get("grid") is not None:
        g = a["grid"]
        cfg["grid"] = {"t_min": g[0], "t_max": g[1], "n_t": int(g[2]), "x_min": g[3],
                       "x_max": g[4], "n_x": int(g[5]), "h": g[6]}
    if a.get("totals_window") is not None:
        cfg["totals"] = {**cfg["totals"], "window": list(a["totals_window"])}
    if a.get("t_list") is not None:
        cfg["totals"] = {**cfg["totals"], "t_list": list(a["t_list"])}
    if a.get("resolution") is not None:
        cfg["scan"] = {**cfg["scan"], "resolution": a["resolution"]}
    return cfg


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _sigma(cfg) -> kernel.SigmaPair:
    s = cfg["sigma"]
    if not isinstance(s, (list, tuple)) or len(s) != 2:
        raise ConfigError("sigma must be a pair [sigma1, sigma2]")
    return kernel.SigmaPair(float(s[0]), float(s[1]))


def _quad(cfg) -> QuadratureConfig:
    try:
        return QuadratureConfig(**cfg["quadrature"])
    except TypeError as exc:
        raise ConfigError(f"bad quadrature config: {exc}") from None


def _xgrid(spec) -> np.ndarray:
    n = int(spec["n"])
    if n < 1:
        raise ConfigError("grid needs at least one point")
    return np.linspace(float(spec["min"]), float(spec["max"]), n)


def cmd_fields(cfg: dict, out: Path) -> dict:
    profile = profile_from_spec(cfg["profile"])
    sigma, quad = _sigma(cfg), _quad(cfg)
    xs = _xgrid(cfg["x"])
    rows = {k: [] for k in ("t", "x", "rho", "u", "pi", "err")}
    for t in cfg["t"]:
        for x in xs:
            fs = kernel.fields(float(t), float(x), profile, sigma, quad)
            for k, v in zip(rows, (fs.t, fs.x, fs.rho, fs.u, fs.pi, fs.err_estimate)):
                rows[k].append(v)
    io.write_csv(out / "fields.csv", rows)
    return {"points": len(rows["t"]),
            "error_budget": {"max_err_estimate": max(rows["err"]) if rows["err"] else 0.0}}


def _default_window(profile, sigma, t, bins) -> list:
    mom = kernel.transition_moments(t, sigma)
    pad = t * profile.u_max + 1.0 + 10.0 * np.sqrt(mom.var_x)
    return [float(bins["min"] - pad), float(bins["max"] + pad)]


def cmd_mc(cfg: dict, out: Path) -> dict:
    if cfg.get("seed") is None:
        raise ConfigError("mc requires --seed")
    profile = profile_from_spec(cfg["profile"])
    sigma, quad = _sigma(cfg), _quad(cfg)
    t = float(cfg["t"])
    if cfg.get("window") is None:
        if not np.isfinite(profile.u_max):
            raise ConfigError("unbounded velocity profile; give --window")
        cfg["window"] = _default_window(profile, sigma, t, cfg["bins"])
    edges = np.linspace(float(cfg["bins"]["min"]), float(cfg["bins"]["max"]),
                        int(cfg["bins"]["n"]) + 1)
    ens = montecarlo.sample_ensemble(profile, sigma, t, int(cfg["n"]), int(cfg["seed"]),
                                     cfg["window"], int(cfg["chunk_count"]), int(cfg["workers"]))
    binned = montecarlo.estimate_fields(ens, edges)
    io.write_csv(out / "binned.csv", binned.columns())
    cmp = montecarlo.compare_with_kernel(binned, t, profile, sigma, quad)
    io.write_csv(out / "comparison.csv", cmp)
    if cfg.get("export_particles"):
        ens.to_csv(out / "particles.csv")
    return {"window_mass": ens.window_mass,
            "z_rho": montecarlo.z_summary(cmp["z_rho"]),
            "z_u": montecarlo.z_summary(cmp["z_u"]),
            "z_var": montecarlo.z_summary(cmp["z_var"])}


def cmd_riemann(cfg: dict, out: Path) -> dict:
    data = riemann_data_from_spec(cfg["profile"])
    t = float(cfg["t"])
    fan = riemann.solve_compression(data, t)
    xs = _xgrid(cfg["x"])
    rho, u, p = fan.evaluate(t, xs)
    io.write_csv(out / "riemann.csv", {"x": xs, "rho": rho, "u": u, "p": p})
    g_left, g_right = riemann.shock_gammas(data)
    gamma = cfg.get("gamma")
    shocks = {}
    for name, (lft, rgt, D) in {"left": (fan.left, fan.middle, fan.speed_left),
                                "right": (fan.middle, fan.right, fan.speed_right)}.items():
        r = riemann.hugoniot_residuals(lft, rgt, D, gamma)
        shocks[name] = {"speed": D, "r_mass": r.r_mass, "r_momentum": r.r_momentum,
                        "r_energy": r.r_energy}
    return {"fan": fan.to_dict(), "speed_left": fan.speed_left, "speed_right": fan.speed_right,
            "shocks": shocks, "gamma_left": g_left, "gamma_right": g_right}


def cmd_gamma(cfg: dict, out: Path) -> dict:
    rows = riemann.gamma_limit_sweep(cfg["ratios"])
    inverse = riemann.gamma_limit_sweep(cfg["ratios"], inverse=True)
    cols = ("ratio", "gamma_left", "gamma_right", "dev_left", "dev_right")
    io.write_csv(out / "gamma.csv", {k: [r[k] for r in rows] for k in cols})
    io.write_csv(out / "gamma_inverse.csv", {k: [r[k] for r in inverse] for k in cols})
    return {"rho2_over_rho1": rows, "rho1_over_rho2": inverse}


def _i_sigma_points(grid: balance.GridSpec, n: int):
    if n <= 0:
        return []
    ts = np.linspace(grid.t_min, grid.t_max, n)
    xs = np.linspace(grid.x_min, grid.x_max, n)
    # pair t ascending with a permuted x so the points cover the rectangle
    perm = (np.arange(n) * 7) % n
    return [(float(t), float(xs[j])) for t, j in zip(ts, perm)]


def cmd_residuals(cfg: dict, out: Path) -> dict:
    profile = profile_from_spec(cfg["profile"])
    sigma, quad = _sigma(cfg), _quad(cfg)
    try:
        grid = balance.GridSpec(**cfg["grid"])
    except TypeError as exc:
        raise ConfigError(f"bad grid: {exc}") from None
    totals = cfg.get("totals") or {}
    res = balance.balance_residuals(profile, sigma, grid, quad)
    report = balance.residual_report(
        profile, sigma, grid, quad,
        i_sigma_points=_i_sigma_points(grid, int(cfg["i_sigma_points"])) if sigma.sigma2 > 0 else [],
        totals_window=totals.get("window"), t_list=totals.get("t_list", []),
        refine=bool(cfg["refine"]), coarse=res)
    tt, xx = np.meshgrid(grid.t_nodes, grid.x_nodes, indexing="ij")
    io.write_csv(out / "residuals.csv", {
        "t": tt.ravel(), "x": xx.ravel(),
        "continuity": res["continuity_values"].ravel(),
        "momentum": res["momentum_values"].ravel()})
    io.write_json(out / "report.json", report.to_dict())
    return report.to_dict()


def cmd_limit(cfg: dict, out: Path) -> dict:
    profile = profile_from_spec(cfg["profile"])
    scan = characteristics.ScanConfig(**cfg["scan"])
    t = float(cfg["t"])
    xs = _xgrid(cfg["x"])
    rho, u, count = [], [], []
    for x in xs:
        r, v, c = characteristics.limit_fields_with_count(t, float(x), profile, scan)
        rho.append(r)
        u.append(v)
        count.append(c)
    io.write_csv(out / "limit.csv", {"x": xs, "rho_bar": rho, "u_bar": u, "root_count": count})
    bt = characteristics.breaking_time(profile) if profile.is_c1 else None
    return {"t_star": bt.t_star if bt else None, "max_root_count": int(max(count))}


COMMANDS = {"fields": cmd_fields, "mc": cmd_mc, "riemann": cmd_riemann, "gamma": cmd_gamma,
            "residuals": cmd_residuals, "limit": cmd_limit}


def run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = COMMANDS[args.command](cfg, out)
    # written after the command so resolved defaults (e.g. the MC window) are echoed
    echo = {"command": args.command, **cfg}
    io.write_json(out / "config.json", echo)
    io.write_json(out / "summary.json", {"config": echo, "versions": io.versions(),
                                         "results": results})
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except StochGasError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        if getattr(exc, "achieved", None) is not None:
            payload["achieved"] = exc.achieved
        sys.stderr.write(json.dumps(payload) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
