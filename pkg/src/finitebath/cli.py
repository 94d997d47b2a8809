"""Command-line experiment driver.

Exit codes: 0 success, 2 usage or invalid parameters, 3 numerical failure.
A ``--config`` JSON file may set any long flag (dashes or underscores);
flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from typing import Sequence

from . import __version__
from . import experiments as ex
from .collisional import FAMILIES
from .engine import POLICIES
from .errors import NumericalError
from .optimizer import AnnealConfig, anneal_energies, anneal_full
from .spectra import engineered_degeneracy
from .svgplot import LogLogPlot

COMMANDS = ("erasure-sweep", "collisional", "bounds", "heat-capacity", "critical", "optimize",
            "fig1", "fig2", "fig3")
DEFAULT_N = {
    "erasure-sweep": [4, 8, 16, 32, 64, 128, 256],
    "collisional": [4, 8, 16, 32, 64, 128, 256, 512, 1024],
    "bounds": [4, 8, 64, 512],
    "heat-capacity": [16, 64, 256],
    "critical": [8, 16, 32, 64],
    "optimize": [4],
    "fig1": [4, 8, 16, 32, 64, 128, 256, 512, 1024],
    "fig2": [16, 32, 64, 128, 256, 512, 1024],
    "fig3": [8, 16, 32, 64, 128, 256],
}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--n", type=int, nargs="+", help="bath sizes (number of qubits)")
    p.add_argument("--n-max", type=int, help="use powers of two from min(--n) (default 4) up to this")
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--policy", choices=POLICIES + ("both",), default="both")
    p.add_argument("--family", help="schedule or spectrum family, command dependent")
    p.add_argument("--q-convention", choices=ex.Q_CONVENTIONS, default="exact")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", help="JSON file of flag defaults")
    return p


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finitebath", description="Finite-bath erasure experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    subs = {}
    for name in COMMANDS:
        subs[name] = sub.add_parser(name, parents=[common])
    subs["fig1"].add_argument("--curves", default=",".join(ex.FIG1_CURVES),
                              help="comma-separated subset of " + ", ".join(ex.FIG1_CURVES))
    subs["critical"].add_argument("--a", type=float, help="ground weight; default matches the q target")
    for name in ("heat-capacity", "fig2"):
        subs[name].add_argument("--gamma-min", type=float, default=0.5)
        subs[name].add_argument("--gamma-max", type=float, default=2.0)
        subs[name].add_argument("--gamma-points", type=int, default=61)
    opt = subs["optimize"]
    opt.add_argument("--steps", type=int, default=AnnealConfig.steps)
    opt.add_argument("--restarts", type=int, default=AnnealConfig.restarts)
    opt.add_argument("--target-q", type=float, help="default: engineered q for --n and --alpha")
    opt.add_argument("--q-penalty-weight", type=float, default=AnnealConfig.q_penalty_weight)
    if config:
        for sp in subs.values():
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in config.items() if k in known})
    return parser


def _load_config(argv: Sequence[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    with open(known.config) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in raw.items()}


def resolve_n(args) -> list[int]:
    if args.n_max is not None:
        n = min(args.n) if args.n else 4
        out = []
        while n <= args.n_max:
            out.append(n)
            n *= 2
    else:
        out = list(args.n) if args.n else DEFAULT_N[args.command]
    if not out:
        raise ValueError("empty n list")
    if any(n < 2 for n in out):
        raise ValueError("every n must be >= 2")
    return out


def _policies(args) -> tuple[str, ...]:
    return POLICIES if args.policy == "both" else (args.policy,)


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


def render_csv(rows: list[dict], columns: Sequence[str], schema: str, meta: dict) -> str:
    buf = io.StringIO()
    extra = "".join(f" {k}={v}" for k, v in meta.items())
    buf.write(f"# schema finitebath.{schema} columns={len(columns)}{extra}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, math.nan)) for c in columns])
    return buf.getvalue()


def render_json(rows: list[dict], columns: Sequence[str], schema: str, meta: dict) -> str:
    def clean(v):
        return None if isinstance(v, float) and not math.isfinite(v) else v
    body = {"schema": f"finitebath.{schema}", "meta": meta,
            "rows": [{c: clean(r.get(c)) for c in columns} for r in rows]}
    return json.dumps(body, indent=2) + "\n"


def _plot(title, ylabel, rows, key, ycol, dashed=()) -> str:
    plot = LogLogPlot(title, "n", ylabel)
    groups: dict[str, list[dict]] = {}
    for r in rows:
        groups.setdefault(r[key], []).append(r)
    for label, rs in groups.items():
        plot.add(label, [r["n"] for r in rs], [r[ycol] for r in rs], dashed=label in dashed)
    return plot.render()


def _svg(command: str, rows: list[dict]) -> str:
    if command in ("erasure-sweep", "collisional"):
        return _plot("Entropy production", "sigma", rows, "policy", "sigma")
    if command == "fig1":
        return _plot("Landauer erasure", "sigma", rows, "curve", "sigma",
                     dashed=("ref_nonint", "ref_rw", "ref_quadratic"))
    if command == "fig2":
        inset = [r for r in rows if r["panel"] == "inset"]
        return _plot("Heat capacity at beta0", "C", inset, "family", "heat_capacity")
    if command == "fig3":
        plot = LogLogPlot("Critical bath", "n", "sigma")
        ns = [r["n"] for r in rows]
        plot.add("critical", ns, [r["sigma"] for r in rows])
        plot.add("1/n guide", ns, [r["guide_inv_n"] for r in rows], dashed=True)
        plot.add("1/n^2 guide", ns, [r["guide_inv_n2"] for r in rows], dashed=True)
        return plot.render()
    raise ValueError(f"--format svg is not available for {command}")


def _run_optimize(args) -> tuple[str, str]:
    n = resolve_n(args)[0]
    target = args.target_q if args.target_q is not None else ex.target_q(n, args.alpha, args.beta,
                                                                         args.q_convention)
    cfg = AnnealConfig(steps=args.steps, restarts=args.restarts, target_q=target,
                       q_penalty_weight=args.q_penalty_weight, seed=args.seed, beta=args.beta)
    mode = args.family or "energies"
    if mode == "energies":
        res = anneal_energies(n, [engineered_degeneracy(i) for i in range(n + 1)], cfg)
    elif mode == "full":
        res = anneal_full(n, cfg)
    else:
        raise ValueError("optimize --family must be 'energies' or 'full'")
    if args.format == "csv":
        return "anneal/1", f"# schema finitebath.anneal/1 n={n} seed={args.seed} target_q={target!r}\n" + res.history_csv()
    if args.format == "svg":
        raise ValueError("--format svg is not available for optimize")
    body = {
        "schema": "finitebath.anneal/1",
        "n": n,
        "mode": mode,
        "config": asdict(cfg),
        "objective": res.objective,
        "initial_objective": res.initial_objective,
        "accepted": res.accepted,
        "outcome": res.outcome.to_record(),
        "spectrum": json.loads(res.spectrum.to_json(args.beta)),
    }
    return "anneal/1", json.dumps(body, indent=2) + "\n"


def run(args) -> str:
    """Execute one parsed command and return the rendered output."""
    if args.threads < 1:
        raise ValueError("--threads must be >= 1")
    if args.command == "optimize":
        return _run_optimize(args)[1]
    n_list = resolve_n(args)
    meta = {"alpha": args.alpha, "beta": args.beta, "q_convention": args.q_convention}
    cmd = args.command
    if cmd == "erasure-sweep":
        rows = ex.erasure_sweep(n_list, args.alpha, args.beta, _policies(args), args.threads)
        key = "erasure"
    elif cmd == "collisional":
        fams = (args.family,) if args.family else FAMILIES
        rows = ex.collisional_sweep(n_list, fams, args.alpha, args.beta, args.q_convention)
        key = "collisional"
    elif cmd == "bounds":
        policy = "level_shift" if args.policy == "both" else args.policy
        rows = ex.bounds_sweep(n_list, args.alpha, args.beta, policy, args.threads)
        key = "bounds"
    elif cmd == "heat-capacity":
        fams = (args.family,) if args.family else ("engineered", "noninteracting")
        grid = ex.gamma_grid(args.gamma_min, args.gamma_max, args.gamma_points)
        rows = ex.heat_rows(n_list, fams, grid, args.alpha, args.beta)
        key = "heat"
    elif cmd == "critical":
        rows = []
        for n in n_list:
            q = ex.target_q(n, args.alpha, args.beta, args.q_convention)
            a = args.a if args.a is not None else ex.critical_a_for_q(n, q)
            rows.append(ex.critical_row(n, a, args.beta, args.q_convention, q))
        key = "critical"
    elif cmd == "fig1":
        curves = [c.strip() for c in args.curves.split(",") if c.strip()]
        rows = ex.fig1_rows(n_list, args.alpha, args.beta, args.q_convention, curves, args.threads)
        key = "fig1"
    elif cmd == "fig2":
        rows = ex.fig2_rows(n_list, args.alpha, args.beta, args.gamma_min, args.gamma_max, args.gamma_points)
        key = "heat"
    elif cmd == "fig3":
        rows = ex.fig3_rows(n_list, args.alpha, args.beta, args.q_convention)
        key = "critical"
    else:  # pragma: no cover - argparse restricts the choices
        raise ValueError(cmd)

    schema, columns = ex.SCHEMAS[key]
    if args.format == "svg":
        return _svg(cmd, rows)
    if args.format == "json":
        return render_json(rows, columns, schema, meta)
    return render_csv(rows, columns, schema, meta)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser(_load_config(argv))
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        text = run(args)
    except NumericalError as exc:
        print(f"numerical failure in {args.command}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error in {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0
