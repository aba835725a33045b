"""Command-line front end.

    kylelab quote    --model mm-insider --rho 1 --branch 1
    kylelab simulate --model ca-insider --paths 10000 --steps 500 --out runs/ca
    kylelab verify   --suite fast --seed 7 --out report.json
    kylelab tables   --out tables/
    kylelab figures  --out figures/

Every command that writes files also writes ``<name>.manifest.json`` next to them;
``kylelab --replay <manifest>`` reruns the recorded command line.
Exit codes: 0 ok, 1 verification failure, 2 domain error, 3 degenerate market, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from . import metrics
from .equilibrium import build_quote
from .errors import DegenerateMarket, DomainError
from .model import ModelKind, ModelParams, params_from_rho_m, validate
from .simulate import EulerOracle, ExactTransition, SimConfig, View, simulate_insider_view, simulate_market_view

log = logging.getLogger("kylelab")

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_DEGENERATE, EXIT_IO = range(5)

KIND_COLUMNS = ("kyle", "ca_insider", "mm_insider", "ca_strategic", "mm_strategic")
KINDS = tuple(ModelKind.parse(k) for k in KIND_COLUMNS)
LANDMARKS = (0.0, 0.5, 1.0, 2.0)


def code_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


@dataclass
class RunManifest:
    command: str
    argv: list
    params: dict | None = None
    kind: str | None = None
    branch: int | None = None
    config: dict | None = None
    seed: int | None = None
    code_version: str = field(default_factory=code_version)
    started: str = field(default_factory=_utc_now)
    finished: str | None = None
    outputs: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def write(self, path: Path) -> Path:
        self.finished = _utc_now()
        body = {k: v for k, v in self.__dict__.items()}
        path.write_text(json.dumps(body, indent=2) + "\n", encoding="utf-8")
        return path


# -- formatting --------------------------------------------------------------------


def fmt(x) -> str:
    """Round-trip safe: 17 significant digits, NA for missing values."""
    if x is None:
        return "NA"
    x = float(x)
    if math.isnan(x):
        return "NA"
    return format(x, ".17g")


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def parse_grid(text: str | None, default):
    """'a:b:n' for a log grid, 'lin:a:b:n' for a linear one, or a comma list."""
    if not text:
        return np.asarray(default, dtype=float)
    text = text.strip()
    try:
        if text.startswith("lin:"):
            a, b, n = text[4:].split(":")
            grid = np.linspace(float(a), float(b), int(n))
        elif ":" in text:
            a, b, n = text.split(":")
            grid = np.logspace(math.log10(float(a)), math.log10(float(b)), int(n))
        else:
            grid = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise DomainError("grid", f"cannot parse grid {text!r}") from exc
    if grid.size == 0 or np.any(~np.isfinite(grid)) or np.any(grid < 0):
        raise DomainError("grid", "grid values must be finite and >= 0")
    return np.unique(grid)


def default_rho_grid():
    return np.unique(np.concatenate([np.logspace(-2, 1, 200), LANDMARKS]))


def default_figure_grid():
    return np.unique(np.concatenate([[0.0], np.logspace(-2, 2, 401), LANDMARKS]))


# -- commands ----------------------------------------------------------------------


def _params(args) -> ModelParams:
    return validate(ModelParams(mu=args.mu, gamma=args.gamma, sigma=args.sigma, rho=args.rho))


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_quote(args) -> int:
    params = _params(args)
    kind = ModelKind.parse(args.model)
    quote = build_quote(params, kind, args.branch)
    body = {"model": kind.value, "branch": args.branch if kind.branched else None, **params.as_dict(), **quote.as_dict()}
    body["rho_m"] = params.rho * params.gamma * params.sigma
    print(json.dumps(body, indent=2))
    return EXIT_OK


def cmd_simulate(args, argv) -> int:
    params = _params(args)
    kind = ModelKind.parse(args.model)
    scheme = EulerOracle(args.eps) if args.scheme == "euler" else ExactTransition()
    config = SimConfig(n_paths=args.paths, n_steps=args.steps, seed=args.seed, scheme=scheme, view=View.parse(args.view))
    quote = build_quote(params, kind, args.branch)
    if config.view is View.MARKET:
        bundle = simulate_market_view(params, quote, kind, config, args.branch)
    else:
        bundle = simulate_insider_view(params, quote, kind, config, args.branch)
    out = _out_dir(args.out)
    manifest = RunManifest(
        "simulate", argv, params.as_dict(), kind.value, args.branch, config.fingerprint(), args.seed,
        extra={"quote": quote.as_dict()},
    )
    t = bundle.grid
    Y_mean = [math.fsum(col) / bundle.n_paths for col in bundle.Y.T]
    P_mean = [math.fsum(col) / bundle.n_paths for col in bundle.P.T]
    if args.format == "csv":
        paths = [write_csv(out / "summary.csv", ("t", "Y", "P"), zip(t, Y_mean, P_mean))]
        if args.full:
            rows = ((i, tk, bundle.Y[i, k], bundle.P[i, k]) for i in range(bundle.n_paths) for k, tk in enumerate(t))
            paths.append(write_csv(out / "paths.csv", ("path", "t", "Y", "P"), ([str(r[0]), *r[1:]] for r in rows)))
        terminal = zip(bundle.V, bundle.P_pre, bundle.dY1, bundle.P1)
        paths.append(write_csv(out / "terminal.csv", ("V", "P_pre", "dY1", "P1"), terminal))
    else:
        body = {"t": [float(x) for x in t], "Y": Y_mean, "P": P_mean}
        if args.full:
            body["paths"] = {"Y": bundle.Y.tolist(), "P": bundle.P.tolist()}
        path = out / "summary.json"
        path.write_text(json.dumps(body) + "\n", encoding="utf-8")
        paths = [path]
    manifest.outputs = [str(p) for p in paths]
    manifest.write(out / "simulate.manifest.json")
    return EXIT_OK


def cmd_verify(args, argv) -> int:
    from . import verify

    params = _params(args)
    reports = verify.run_suite(args.suite, args.seed, params, perturb_se=args.perturb_se)
    meta = {"suite": args.suite, "seed": args.seed, "perturb_se": args.perturb_se, **params.as_dict(),
            "code_version": code_version()}
    text = verify.report_json(reports, meta)
    failed = [r.name for r in reports if not r.verdict]
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        manifest = RunManifest("verify", argv, params.as_dict(), seed=args.seed, extra={"suite": args.suite})
        manifest.outputs = [str(path)]
        manifest.write(path.with_name(path.stem + ".manifest.json"))
    else:
        sys.stdout.write(text)
    for r in reports:
        log.info("%-34s %s", r.name, "pass" if r.verdict else "FAIL")
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_VERIFY


def table_rows(rho_grid):
    """Rows of the three tables at gamma = sigma = 1 (so rho = rho_M)."""
    t1, t3 = [], []
    for rm in rho_grid:
        p = params_from_rho_m(rm)
        depths = []
        for kind in KINDS:
            if not kind.informed and rm == 0:
                depths.append(None)
            else:
                depths.append(metrics.depth(kind, p))
        t1.append([rm, *depths])
        prof = [None if (not k.informed and rm == 0) else metrics.profits_normalized(k, rm) for k in KINDS]
        u, v, pi, d0, delta = metrics.table3_functions(rm)
        t3.append([rm, *prof, metrics.value_of_information("ca", rm), metrics.value_of_information("mm", rm),
                   u, v, pi, d0, delta])
    return t1, t3


def reversal_rows(rho_grid, s_grid, intensity: bool = False):
    rows = []
    for rm in rho_grid:
        p = params_from_rho_m(rm)
        for s in s_grid:
            vals = []
            for kind in KINDS:
                if not kind.informed and rm == 0:
                    vals.append(None)
                    continue
                m = metrics.reversal_M(s, kind, p)
                vals.append(-m if intensity else m)
            rows.append([rm, s, *vals])
    return rows


def cmd_tables(args, argv) -> int:
    rho_grid = parse_grid(args.rho_m_grid, default_rho_grid())
    s_grid = parse_grid(args.s_grid, np.linspace(0.0, 1.0, 11))
    out = _out_dir(args.out)
    t1, t3 = table_rows(rho_grid)
    paths = [
        write_csv(out / "table1.csv", ("rho_m", *(f"depth_{k}" for k in KIND_COLUMNS)), t1),
        write_csv(out / "table2.csv", ("rho_m", "s", *(f"M_{k}" for k in KIND_COLUMNS)), reversal_rows(rho_grid, s_grid)),
        write_csv(
            out / "table3.csv",
            ("rho_m", *(f"profit_{k}" for k in KIND_COLUMNS), "value_of_info_ca", "value_of_info_mm",
             "u", "v", "pi", "Delta0_u", "Delta"),
            t3,
        ),
    ]
    manifest = RunManifest("tables", argv, extra={"rho_m_grid": args.rho_m_grid, "s_grid": args.s_grid})
    manifest.outputs = [str(p) for p in paths]
    manifest.write(out / "tables.manifest.json")
    return EXIT_OK


def figure_data(rho_grid, t_grid):
    """Column data for the six figures; fig6 is computed from fig5's own floats."""
    # at rho_M = 0 the share is its limit 1
    fig1 = [[rm, metrics.adverse_selection_share_rm(rm)] for rm in rho_grid]
    fig2 = [[rm, metrics.relative_depth(rm)] for rm in rho_grid]
    fig3 = [[rm, t, metrics.relative_efficiency(t, rm)] for rm in rho_grid for t in t_grid]
    fig4 = reversal_rows(rho_grid, t_grid, intensity=True)
    ca = metrics.value_of_information("ca", rho_grid)
    mm = metrics.value_of_information("mm", rho_grid)
    fig5 = [[rm, a, b] for rm, a, b in zip(rho_grid, ca, mm)]
    fig6 = [[rm, b - a] for rm, a, b in zip(rho_grid, ca, mm)]
    window = (rho_grid >= 0.1) & (rho_grid <= 100.0)
    flags = {}
    for name, y in (("ca", ca), ("mm", mm)):
        k = metrics.interior_minimum(rho_grid[window], y[window])
        flags[f"fig5_{name}_interior_minimum"] = k is not None
        flags[f"fig5_{name}_argmin_rho_m"] = None if k is None else float(rho_grid[window][k])
    return {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6}, flags


FIGURE_HEADERS = {
    "fig1": ("rho_m", "adverse_selection_share"),
    "fig2": ("rho_m", "relative_depth"),
    "fig3": ("rho_m", "t", "relative_efficiency"),
    "fig4": ("rho_m", "s", *(f"intensity_{k}" for k in KIND_COLUMNS)),
    "fig5": ("rho_m", "value_of_info_ca", "value_of_info_mm"),
    "fig6": ("rho_m", "value_of_info_mm_minus_ca"),
}


def cmd_figures(args, argv) -> int:
    rho_grid = parse_grid(args.rho_m_grid, default_figure_grid())
    t_grid = parse_grid(args.t_grid, np.linspace(0.0, 1.0, 21))
    out = _out_dir(args.out)
    data, flags = figure_data(rho_grid, t_grid)
    paths = [write_csv(out / f"{name}.csv", FIGURE_HEADERS[name], rows) for name, rows in data.items()]
    manifest = RunManifest("figures", argv, extra={"rho_m_grid": args.rho_m_grid, "t_grid": args.t_grid, **flags})
    manifest.outputs = [str(p) for p in paths]
    manifest.write(out / "figures.manifest.json")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def _add_params(p, rho_default=1.0):
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=rho_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kylelab", description=__doc__.splitlines()[0])
    parser.add_argument("--replay", metavar="MANIFEST", help="rerun the command recorded in a manifest")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")
    kinds = [k.value for k in ModelKind]

    q = sub.add_parser("quote", help="equilibrium quote of one model")
    q.add_argument("--model", choices=kinds, required=True)
    q.add_argument("--branch", type=int, choices=(1, 2), default=1)
    _add_params(q)

    s = sub.add_parser("simulate", help="simulate paths and write summaries")
    s.add_argument("--model", choices=kinds, required=True)
    s.add_argument("--branch", type=int, choices=(1, 2), default=1)
    _add_params(s)
    s.add_argument("--paths", type=int, default=10_000)
    s.add_argument("--steps", type=int, default=500)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--view", choices=("insider", "market"), default="insider")
    s.add_argument("--scheme", choices=("exact", "euler"), default="exact")
    s.add_argument("--eps", type=float, default=1e-3, help="terminal cut-off of the Euler oracle")
    s.add_argument("--full", action="store_true", help="also write every path")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out", default="kylelab-sim")

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--suite", choices=("fast", "full"), default="fast")
    v.add_argument("--seed", type=int, default=7)
    _add_params(v)
    v.add_argument("--out", help="report path (stdout if omitted)")
    v.add_argument("--perturb-se", type=float, default=0.0,
                   help="debug: shift every Monte Carlo target by this many standard errors")

    t = sub.add_parser("tables", help="write table1/2/3.csv")
    t.add_argument("--rho-m-grid", help="a:b:n (log), lin:a:b:n or a comma list")
    t.add_argument("--s-grid")
    t.add_argument("--out", default="kylelab-tables")

    f = sub.add_parser("figures", help="write fig1..fig6.csv")
    f.add_argument("--rho-m-grid")
    f.add_argument("--t-grid")
    f.add_argument("--out", default="kylelab-figures")
    return parser


def _recorded_argv(path) -> list:
    try:
        argv = json.loads(Path(path).read_text(encoding="utf-8"))["argv"]
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise OSError(f"{path} is not a run manifest") from exc
    return list(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.replay:
            return main(_recorded_argv(args.replay))
        if args.command is None:
            parser.print_help()
            return EXIT_DOMAIN
        if args.command == "quote":
            return cmd_quote(args)
        handler = {"simulate": cmd_simulate, "verify": cmd_verify, "tables": cmd_tables, "figures": cmd_figures}
        return handler[args.command](args, argv)
    except DegenerateMarket as exc:
        print(f"degenerate market: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DomainError as exc:
        print(f"domain error ({exc.field}): {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
