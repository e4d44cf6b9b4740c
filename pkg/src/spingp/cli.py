"""
Command line front end.

Every subcommand builds a :class:`~spingp.output.Table`, writes it as csv
(default), json or svg polylines, and optionally renders a matplotlib figure
next to it.  Values are resolved as: command-line flag, then ``--config``
file, then ``--preset``, then the built-in default.
"""

from __future__ import annotations

import argparse
import ast
import math
import operator
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    BOHR_MAGNETON,
    NEUTRON,
    epsilon_for_physical,
    field_for_speed,
    make_params,
    params_from_kminus,
    q_for_field,
    spin_from_angle,
)
from .geophase import (
    GeometricPhaseError,
    GpValue,
    ParityMismatch,
    highspeed_gp,
    open_path_gp,
    pancharatnam_oracle,
    prebarrier_gp,
    resonant_gp,
    tunnel_gp,
    wrapped_difference,
)
from .output import FORMATS, Table, render
from .quadrature import QuadratureError
from .resonance import (
    pair_for_ratio,
    physical_point,
    resonances_for_kl,
    resonances_in_range,
    spec_from_pair,
)
from .scattering import DegenerateNormalization, amplitude_field, bloch_trajectory, channel_scattering

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4

PRESETS = {
    "fig2": {"command": "resonant-gp", "q": "1.2,3,10", "grid": "0:pi:361"},
    "fig3": {"command": "prebarrier-gp", "kl": "sqrt(10)*pi,4*pi", "grid": "0.01:1:100", "theta": "pi/2"},
    "fig4": {"command": "trajectory", "epsilon": "1.01,2", "kminus_l": "5*pi", "theta": "pi/3", "samples": "401"},
    "fig5": {"command": "tunnel-gp", "epsilon": "1.01,2,5", "kminus_l": "pi", "grid": "0:pi:361"},
}

DEFAULTS = {
    "phi": "0",
    "tol": "1e-9",
    "mesh": "10000",
    "samples": "201",
    "region": "ii",
    "jobs": "1",
    "format": "csv",
}


class UsageError(ValueError):
    pass


# -- numeric expressions ------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "log": math.log, "cos": math.cos, "sin": math.sin}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval_node(node.operand)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise UsageError("unsupported expression element")


def number(text) -> float:
    """Evaluate a numeric expression such as ``sqrt(10)*pi``."""
    try:
        value = _eval_node(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, UsageError, ValueError, ZeroDivisionError, OverflowError) as exc:
        raise UsageError(f"cannot evaluate {text!r}: {exc}") from None
    if not math.isfinite(value):
        raise UsageError(f"{text!r} is not finite")
    return value


def numbers(text):
    return [number(part) for part in str(text).split(",") if part.strip()]


def grid(text):
    """``start:stop:steps`` (inclusive, uniform) or ``start:stop``."""
    parts = str(text).split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"grid must be start:stop[:steps], got {text!r}")
    lo, hi = number(parts[0]), number(parts[1])
    if len(parts) == 2:
        return lo, hi, None
    steps = number(parts[2])
    if steps != int(steps) or steps < 1:
        raise UsageError(f"grid steps must be a positive integer, got {parts[2]!r}")
    if hi < lo:
        raise UsageError(f"grid stop {hi} is below start {lo}")
    return lo, hi, int(steps)


def grid_points(text):
    lo, hi, steps = grid(text)
    if steps is None:
        raise UsageError(f"grid {text!r} needs a step count")
    return np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value.strip("\"'")
    return out


class Settings:
    def __init__(self, args, config, preset):
        self.args = args
        self.config = config
        self.preset = preset

    def raw(self, name):
        val = getattr(self.args, name, None)
        if val is not None:
            return val
        if name in self.config:
            return self.config[name]
        if name in self.preset:
            return self.preset[name]
        return DEFAULTS.get(name)

    def has(self, name):
        return self.raw(name) is not None

    def number(self, name):
        val = self.raw(name)
        if val is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")
        return number(val)

    def numbers(self, name):
        val = self.raw(name)
        if val is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")
        return numbers(val)

    def int(self, name):
        val = self.number(name)
        if val != int(val):
            raise UsageError(f"--{name.replace('_', '-')} must be an integer")
        return int(val)


# -- row workers (module level so they pickle for --jobs) ------------------------

def _failure(exc):
    if isinstance(exc, QuadratureError):
        return "numerical", str(exc)
    return "error", f"{type(exc).__name__}: {exc}"


_ROW_ERRORS = (GeometricPhaseError, DegenerateNormalization, QuadratureError, ValueError)


def _resonant_row(task):
    q_label, n_plus, n_minus, theta, phi, tol = task
    row = dict(q=q_label, n_plus=n_plus, n_minus=n_minus, xi=(n_minus - n_plus) // 2, theta=theta)
    ideal = math.pi * (math.cos(theta) - 1.0)
    try:
        _, _, per_turn = resonant_gp(n_plus, n_minus, spin_from_angle(theta, phi), tol)
    except _ROW_ERRORS as exc:
        status, reason = _failure(exc)
        return dict(row, gp_per_turn=math.nan, gp_ideal=ideal, difference=math.nan, status=status, reason=reason)
    return dict(row, gp_per_turn=per_turn, gp_ideal=ideal, difference=per_turn - ideal, status="ok", reason="")


def _prebarrier_row(task):
    kl, eps, theta, phi, tol, is_res = task
    row = dict(kl=kl, epsilon=eps, resonance=is_res)
    try:
        params = make_params(eps, kl)
        rp, rm = (channel_scattering(params, c).r for c in (+1, -1))
        gp = prebarrier_gp(params, spin_from_angle(theta, phi), tol)
    except _ROW_ERRORS as exc:
        status, reason = _failure(exc)
        return dict(row, r_plus=math.nan, r_minus=math.nan, gamma_i=math.nan,
                    gamma_i_principal=math.nan, status=status, reason=reason)
    return dict(row, r_plus=rp, r_minus=rm, gamma_i=gp.raw, gamma_i_principal=gp.principal,
                status="ok", reason="")


def _tunnel_row(task):
    eps, kml, theta, phi, tol, mesh = task
    row = dict(epsilon=eps, kminus_l=kml, theta=theta)
    try:
        params = params_from_kminus(eps, kml)
        spin = spin_from_angle(theta, phi)
        gp = tunnel_gp(params, spin, tol)
        oracle = pancharatnam_oracle(amplitude_field(params, spin, "ii"), 0.0, math.pi, mesh)
    except _ROW_ERRORS as exc:
        status, reason = _failure(exc)
        return dict(row, gamma=math.nan, gamma_principal=math.nan, oracle=math.nan,
                    oracle_diff=math.nan, status=status, reason=reason)
    return dict(row, gamma=gp.raw, gamma_principal=gp.principal, oracle=oracle,
                oracle_diff=wrapped_difference(gp.raw, oracle), status="ok", reason="")


def _sweep_row(task):
    evaluator, point, var, region, tol, mesh = task
    row = {var: point[var]}
    try:
        spin = spin_from_angle(point["theta"], point["phi"])
        if evaluator == "highspeed":
            gp = highspeed_gp(point["xi"], point["theta"])
        elif evaluator == "resonant":
            gp = resonant_gp(point["n_plus"], point["n_minus"], spin, tol)[0]
        else:
            if "kminus_l" in point:
                params = params_from_kminus(point["epsilon"], point["kminus_l"])
            else:
                params = make_params(point["epsilon"], point["kl"])
            if evaluator == "prebarrier":
                gp = prebarrier_gp(params, spin, tol)
            elif evaluator == "tunnel":
                gp = tunnel_gp(params, spin, tol)
            else:
                field = amplitude_field(params, spin, region)
                s0, s1 = (0.0, math.pi) if region != "i" else (-math.pi, 0.0)
                if evaluator == "oracle":
                    gp = GpValue.of(pancharatnam_oracle(field, s0, s1, mesh))
                else:
                    gp = open_path_gp(field, s0, s1, tol)
    except _ROW_ERRORS as exc:
        status, reason = _failure(exc)
        return dict(row, gamma=math.nan, gamma_principal=math.nan, status=status, reason=reason)
    return dict(row, gamma=gp.raw, gamma_principal=gp.principal, status="ok", reason="")


def _map(func, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [func(t) for t in tasks]


def _fill(table, rows):
    for row in rows:
        table.add(**row)


def _spin_meta(cfg):
    return f"spin: theta={cfg.raw('theta')} phi={cfg.raw('phi')}"


# -- subcommands -------------------------------------------------------------


def cmd_resonant_gp(cfg: Settings) -> Table:
    table = Table(
        "resonant-gp",
        ["q", "n_plus", "n_minus", "xi", "theta", "gp_per_turn", "gp_ideal", "difference", "status", "reason"],
        plot={"x": "theta", "y": ["gp_per_turn"], "group": "q"},
    )
    pairs = []
    if cfg.has("n_plus") or cfg.has("n_minus"):
        spec = spec_from_pair(cfg.int("n_plus"), cfg.int("n_minus"))
        pairs.append((repr(spec.q), spec))
        table.meta.append(f"pair ({spec.n_plus}, {spec.n_minus}) given explicitly")
    else:
        if not cfg.has("q"):
            raise UsageError("resonant-gp needs --n-plus/--n-minus or --q")
        for text in str(cfg.raw("q")).split(","):
            spec, exact = pair_for_ratio(number(text))
            label = text.strip()
            pairs.append((label, spec))
            how = "exact" if exact else "nearest achievable"
            table.meta.append(
                f"q={label} resolved to pair ({spec.n_plus}, {spec.n_minus}) by the parity rule ({how})"
            )
    thetas = grid_points(cfg.raw("grid") or "0:pi:361")
    if thetas.min() < 0 or thetas.max() > math.pi + 1e-12:
        raise UsageError("theta grid must lie in [0, pi]")
    thetas = np.clip(thetas, 0.0, math.pi)
    phi, tol = cfg.number("phi"), cfg.number("tol")
    tasks = [(label, s.n_plus, s.n_minus, float(t), phi, tol) for label, s in pairs for t in thetas]
    _fill(table, _map(_resonant_row, tasks, cfg.int("jobs")))
    return table


def cmd_prebarrier_gp(cfg: Settings) -> Table:
    table = Table(
        "prebarrier-gp",
        ["kl", "epsilon", "r_plus", "r_minus", "gamma_i", "gamma_i_principal", "resonance", "status", "reason"],
        plot={"x": "epsilon", "y": ["gamma_i"], "group": "kl"},
    )
    kls = cfg.numbers("kl")
    eps_grid = grid_points(cfg.raw("grid") or "0.01:1:100")
    if eps_grid.min() <= 0.0:
        raise UsageError("epsilon grid must be strictly positive")
    theta = cfg.number("theta") if cfg.has("theta") else math.pi / 2
    phi, tol = cfg.number("phi"), cfg.number("tol")
    table.meta.append(f"spin: theta={theta!r} phi={phi!r}")
    tasks = []
    for kl in kls:
        res = [s for s in resonances_for_kl(kl) if eps_grid[0] <= s.epsilon <= eps_grid[-1]]
        for s in res:
            table.meta.append(f"kl={kl!r}: transparent at epsilon={s.epsilon_exact} (n+={s.n_plus}, n-={s.n_minus})")
        if not res:
            table.meta.append(f"kl={kl!r}: no nontrivial simultaneous resonance")
        points = sorted(set(float(e) for e in eps_grid) | {s.epsilon for s in res})
        for e in points:
            is_res = any(abs(e - s.epsilon) < 1e-12 for s in res)
            tasks.append((kl, e, theta, phi, tol, is_res))
    _fill(table, _map(_prebarrier_row, tasks, cfg.int("jobs")))
    return table


def _params_list(cfg):
    """``(epsilon, kminus_l)`` pairs from either --kminus-l or --kl."""
    eps = cfg.numbers("epsilon")
    if cfg.has("kminus_l"):
        return [(e, k) for e in eps for k in cfg.numbers("kminus_l")]
    if cfg.has("kl"):
        return [(e, kl * math.sqrt(1.0 + e)) for e in eps for kl in cfg.numbers("kl")]
    raise UsageError("need --kminus-l or --kl")


def cmd_tunnel_gp(cfg: Settings) -> Table:
    table = Table(
        "tunnel-gp",
        ["epsilon", "kminus_l", "theta", "gamma", "gamma_principal", "oracle", "oracle_diff", "status", "reason"],
        plot={"x": "theta", "y": ["gamma"], "group": "epsilon"},
    )
    pts = _params_list(cfg)
    for e, _ in pts:
        if not e > 1.0:
            raise UsageError(f"tunnel-gp needs epsilon > 1, got {e}")
    thetas = np.clip(grid_points(cfg.raw("grid") or "0:pi:361"), 0.0, math.pi)
    phi, tol, mesh = cfg.number("phi"), cfg.number("tol"), cfg.int("mesh")
    table.meta.append(f"spin phase phi={phi!r}; oracle mesh={mesh}")
    tasks = [(e, k, float(t), phi, tol, mesh) for e, k in pts for t in thetas]
    _fill(table, _map(_tunnel_row, tasks, cfg.int("jobs")))
    return table


def cmd_trajectory(cfg: Settings) -> Table:
    table = Table(
        "trajectory",
        ["epsilon", "kminus_l", "s", "n_x", "n_y", "n_z", "norm", "status", "reason"],
        plot={"x": "s", "y": ["n_x", "n_y", "n_z"], "group": "epsilon"},
    )
    region = cfg.raw("region")
    if region not in ("i", "ii"):
        raise UsageError("--region must be i or ii")
    theta = cfg.number("theta") if cfg.has("theta") else math.pi / 3
    phi = cfg.number("phi")
    spin = spin_from_angle(theta, phi)
    table.meta.append(
        f"region {region}; spin (c+, c-) = ({spin.c_plus!r}, {spin.c_minus!r})"
    )
    samples = cfg.int("samples")
    for e, k in _params_list(cfg):
        for smp in bloch_trajectory(params_from_kminus(e, k), spin, region, samples):
            bad = smp.degenerate
            table.add(
                epsilon=e, kminus_l=k, s=smp.s, n_x=smp.n[0], n_y=smp.n[1], n_z=smp.n[2], norm=smp.norm,
                status="error" if bad else "ok", reason="vanishing norm" if bad else "",
            )
    return table


def cmd_units(cfg: Settings) -> Table:
    table = Table(
        "units",
        ["q", "v", "b0", "epsilon", "moment", "speed_scale", "status", "reason"],
        plot=None,
    )
    units = NEUTRON
    if cfg.has("moment"):
        units = NEUTRON.with_moment(cfg.number("moment"))
    scale = NEUTRON.speed_scale_factor(units)
    table.meta.append(
        f"mass={units.mass!r} kg moment={units.moment!r} J/T; speed scale vs neutron sqrt(moment/mu_n)={scale!r}"
    )
    speeds = cfg.numbers("v") if cfg.has("v") else [1.0]
    if cfg.has("b0"):
        for b0 in cfg.numbers("b0"):
            for v in speeds:
                eps = epsilon_for_physical(b0, v, units)
                try:
                    q = q_for_field(b0, v, units)
                    table.add(q=q, v=v, b0=b0, epsilon=eps, moment=units.moment, speed_scale=scale,
                              status="ok", reason="")
                except ValueError as exc:
                    table.add(q=math.nan, v=v, b0=b0, epsilon=eps, moment=units.moment,
                              speed_scale=scale, status="error", reason=str(exc))
        return table
    qs = cfg.numbers("q") if cfg.has("q") else [10.0, 3.0, 1.2]
    for q in qs:
        for v in speeds:
            b0 = field_for_speed(q, v, units)
            table.add(q=q, v=v, b0=b0, epsilon=epsilon_for_physical(b0, v, units), moment=units.moment,
                      speed_scale=scale, status="ok", reason="")
    return table


def cmd_resonances(cfg: Settings) -> Table:
    table = Table(
        "resonances",
        ["kl", "n_plus", "n_minus", "xi", "q", "epsilon", "epsilon_exact", "kappa0_l", "v", "b0"],
        plot=None,
    )
    length = cfg.number("length") if cfg.has("length") else None
    if cfg.has("kl"):
        specs = [s for kl in cfg.numbers("kl") for s in resonances_for_kl(kl)]
    elif cfg.has("grid"):
        lo, hi, _ = grid(cfg.raw("grid"))
        specs = resonances_in_range(lo, hi)
        table.meta.append(f"scan kl in [{lo!r}, {hi!r}]")
    else:
        raise UsageError("resonances needs --kl or --grid lo:hi")
    if length is not None:
        table.meta.append(f"slab length L={length!r} m (neutron)")
    for s in specs:
        v, b0 = physical_point(s, length) if length is not None else ("", "")
        table.add(kl=s.kl, n_plus=s.n_plus, n_minus=s.n_minus, xi=s.xi, q=s.q, epsilon=s.epsilon,
                  epsilon_exact=str(s.epsilon_exact), kappa0_l=s.kappa0_l, v=v, b0=b0)
    if not specs:
        table.meta.append("no nontrivial simultaneous resonance")
    return table


SWEEP_EVALUATORS = ("open-path", "oracle", "resonant", "highspeed", "prebarrier", "tunnel")
SWEEP_VARIABLES = ("theta", "phi", "epsilon", "kl", "kminus_l")


def cmd_sweep(cfg: Settings) -> Table:
    evaluator = cfg.raw("evaluator")
    if evaluator not in SWEEP_EVALUATORS:
        raise UsageError(f"--evaluator must be one of {SWEEP_EVALUATORS}")
    var = (cfg.raw("vary") or "theta").replace("-", "_")
    if var not in SWEEP_VARIABLES:
        raise UsageError(f"--vary must be one of {SWEEP_VARIABLES}")
    values = grid_points(cfg.raw("grid") or ("0:pi:37" if var == "theta" else "0.1:1:10"))
    table = Table(
        "sweep",
        [var, "gamma", "gamma_principal", "status", "reason"],
        plot={"x": var, "y": ["gamma"]},
    )
    base = {"theta": math.pi / 2, "phi": 0.0}
    for name in ("theta", "phi", "epsilon", "kl", "kminus_l"):
        if name != var and cfg.has(name):
            base[name] = cfg.number(name)
    if evaluator == "resonant":
        base["n_plus"], base["n_minus"] = cfg.int("n_plus"), cfg.int("n_minus")
    if evaluator == "highspeed":
        base["xi"] = cfg.int("xi") if cfg.has("xi") else 1
    if evaluator in ("open-path", "oracle", "prebarrier", "tunnel"):
        have = set(base) | {var}
        if "epsilon" not in have or not ({"kl", "kminus_l"} & have):
            raise UsageError(f"{evaluator} needs --epsilon and --kl or --kminus-l")
        if var == "kl":
            base.pop("kminus_l", None)
        if var == "kminus_l":
            base.pop("kl", None)
    table.meta.append(f"evaluator={evaluator} vary={var} fixed=" + " ".join(f"{k}={v!r}" for k, v in sorted(base.items())))
    region, tol, mesh = cfg.raw("region"), cfg.number("tol"), cfg.int("mesh")
    tasks = [(evaluator, dict(base, **{var: float(x)}), var, region, tol, mesh) for x in values]
    _fill(table, _map(_sweep_row, tasks, cfg.int("jobs")))
    return table


COMMANDS = {
    "resonant-gp": (cmd_resonant_gp, "geometric phase per turn under simultaneous resonance"),
    "prebarrier-gp": (cmd_prebarrier_gp, "per-cycle geometric phase in front of the slab"),
    "tunnel-gp": (cmd_tunnel_gp, "slab geometric phase with a tunneling spin-up channel"),
    "trajectory": (cmd_trajectory, "Bloch-vector path through a region"),
    "units": (cmd_units, "convert between resonance ratio, speed and field"),
    "resonances": (cmd_resonances, "list simultaneous resonances for kL"),
    "sweep": (cmd_sweep, "generic one-parameter sweep over any evaluator"),
}


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("parameters (numbers accept expressions such as sqrt(10)*pi; lists are comma separated)")
    for flag in ("--epsilon", "--kl", "--kminus-l", "--theta", "--phi", "--n-plus", "--n-minus", "--q"):
        g.add_argument(flag, default=None)
    g.add_argument("--grid", default=None, help="start:stop:steps, inclusive")
    g.add_argument("--tol", default=None, help="relative quadrature tolerance (default 1e-9)")
    g.add_argument("--mesh", default=None, help="Pancharatnam oracle points (default 10000)")
    o = shared.add_argument_group("output")
    o.add_argument("--format", choices=FORMATS, default=None)
    o.add_argument("--out", default=None, help="output file (default stdout)")
    o.add_argument("--figure", nargs="?", const="", default=None,
                   help="render a matplotlib figure; without a path, next to --out as .png")
    o.add_argument("--preset", choices=sorted(PRESETS), default=None)
    o.add_argument("--config", default=None, help="flat key = value file")
    o.add_argument("--jobs", default=None, help="worker processes for sweeps")

    parser = argparse.ArgumentParser(prog="spingp", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[shared], help=help_text)
        if name == "trajectory":
            p.add_argument("--samples", default=None)
            p.add_argument("--region", default=None, choices=("i", "ii"))
        if name == "units":
            p.add_argument("--v", default=None, help="speed in m/s")
            p.add_argument("--b0", default=None, help="field in T")
            p.add_argument("--moment", default=None, help="magnetic moment override in J/T")
        if name == "resonances":
            p.add_argument("--length", default=None, help="slab width in m, adds speed and field")
        if name == "sweep":
            p.add_argument("--evaluator", default=None, choices=SWEEP_EVALUATORS)
            p.add_argument("--vary", default=None, choices=SWEEP_VARIABLES + ("kminus-l",))
            p.add_argument("--region", default=None, choices=("i", "ii", "iii"))
            p.add_argument("--xi", default=None)
    return parser


def _figure_path(args):
    if args.figure is None:
        return None
    if args.figure:
        return Path(args.figure)
    if not args.out:
        raise UsageError("--figure without a path needs --out")
    return Path(args.out).with_suffix(".png")


def run(argv=None, stdout=None):
    """Run the CLI and return the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = read_config(args.config) if args.config else {}
        preset = {}
        if args.preset:
            preset = dict(PRESETS[args.preset])
            if preset.pop("command") != args.command:
                raise UsageError(f"preset {args.preset} belongs to {PRESETS[args.preset]['command']}")
        cfg = Settings(args, config, preset)
        fmt = cfg.raw("format")
        if fmt not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        figure = _figure_path(args)
        table = COMMANDS[args.command][0](cfg)
        if args.preset:
            table.meta.insert(0, f"preset: {args.preset}")
        text = render(table, fmt)
    except UsageError as exc:
        print(f"spingp {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParityMismatch as exc:
        print(f"spingp {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except QuadratureError as exc:
        print(f"spingp {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GeometricPhaseError, DegenerateNormalization) as exc:
        print(f"spingp {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"spingp {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    if figure is not None and table.plot:
        from .plotting import render_figure

        render_figure(table, figure)

    statuses = {row.get("status", "ok") for row in table.rows}
    if "numerical" in statuses:
        return EXIT_NUMERIC
    if "error" in statuses:
        return EXIT_DOMAIN
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
