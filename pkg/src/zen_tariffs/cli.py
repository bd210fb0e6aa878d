"""Command-line scenario runner.

``zen-tariffs run``      one (tariff, export option) cell of a scenario
``zen-tariffs compare``  the grid of tariffs x {no limit, export limit}
``zen-tariffs fixture``  write the synthetic scenario used in the docs

Exit codes: 0 optimal, 1 some compare cells failed, 2 configuration error,
3 infeasible, 4 unbounded, 5 time/iteration limit, 6 backend failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import analysis
from .config import load_scenario
from .errors import BackendUnavailable, ConfigError, ParseError, ValidationError, ZenError
from .model import BuildOptions, build_model
from .solve import BackendConfig, solve
from .tariffs import SCHEMES

log = logging.getLogger("zen_tariffs")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_UNBOUNDED, EXIT_LIMIT, EXIT_BACKEND = range(7)
STATUS_EXIT = {"optimal": EXIT_OK, "infeasible": EXIT_INFEASIBLE, "unbounded": EXIT_UNBOUNDED, "limit": EXIT_LIMIT}
SCHEME_ORDER = ("energy", "tou", "subscribed_capacity", "dynamic")


def parse_limit(text: str) -> float | None:
    if text.lower() == "none":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected kWh/h or 'none', got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("export limit must be positive")
    return value


def cell_label(scheme: str, limit: float | None) -> str:
    return f"{scheme}_nolimit" if limit is None else f"{scheme}_limit{limit:g}"


def _diagnose_infeasible(scenario, scheme, options, backend) -> str:
    if not options.co2_constraint:
        return "model is infeasible"
    relaxed = build_model(scenario.spec, scenario.series, scheme, replace(options, co2_constraint=False))
    if solve(relaxed, backend).status == "optimal":
        return ("model is infeasible because of row co2_balance: imports and fuel emissions cannot be offset "
                "by credited exports")
    return "model is infeasible even without row co2_balance"


def run_cell(config: str, scheme_tag: str | None, limit, backend: BackendConfig, out: str | None,
             use_limit_arg: bool = True) -> tuple[str, str, analysis.SolutionReport | None, str]:
    """Build, solve and report one cell; returns ``(label, status, report, message)``."""
    scenario = load_scenario(config)
    scheme = scenario.scheme
    if scheme_tag is not None and scheme_tag != scheme.tag:
        scheme = SCHEMES[scheme_tag]()
    options = scenario.options
    if use_limit_arg:
        options = replace(options, export_limit=limit)
    label = cell_label(scheme.tag, options.export_limit)
    model = build_model(scenario.spec, scenario.series, scheme, options)
    log.info("%s: %d variables, %d rows", label, model.n_vars, model.n_rows)
    result = solve(model, backend)
    if result.status != "optimal":
        msg = result.message
        if result.status == "infeasible":
            msg = _diagnose_infeasible(scenario, scheme, options, backend)
        return label, result.status, None, msg
    report = analysis.build_report(model, result, scenario.spec, scenario.series, scheme, label=label)
    if out:
        analysis.write_report(report, out)
    return label, "optimal", report, ""


def _backend(args) -> BackendConfig:
    return BackendConfig.from_env(args.backend, time_limit=args.time_limit)


def cmd_run(args) -> int:
    out = Path(args.out) if args.out else None
    limit = None
    if args.export_limit is not None:
        try:
            limit = parse_limit(args.export_limit)
        except argparse.ArgumentTypeError as exc:
            print(f"configuration error: --export-limit: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    label, status, report, msg = run_cell(args.config, args.scheme, limit, _backend(args),
                                          str(out) if out else None, use_limit_arg=args.export_limit is not None)
    if status != "optimal":
        print(f"{label}: {status}: {msg}", file=sys.stderr)
        return STATUS_EXIT.get(status, EXIT_BACKEND)
    print(f"{label}: optimal, total cost {report.total_cost:.2f} EUR, peak import {report.peak_import:.2f} kWh/h"
          + (f", reports in {out}" if out else ""))
    return EXIT_OK


def _cell_job(job):
    config, scheme, limit, backend, out = job
    try:
        return run_cell(config, scheme, limit, backend, out)
    except (BackendUnavailable, ParseError) as exc:
        return cell_label(scheme, limit), "backend_error", None, str(exc)


def write_combined(reports: dict, statuses: dict, schemes, limits, out: Path) -> list[Path]:
    """Investment-delta, max-import and cost/revenue tables over all cells."""
    paths = []
    delta_rows = []
    variants = [s for s in schemes if s != "energy"]
    for limit in limits:
        base = reports.get(cell_label("energy", limit))
        others = [reports[cell_label(s, limit)] for s in variants if cell_label(s, limit) in reports]
        if base is None:
            continue
        for row in analysis.investment_delta_table(others, base):
            line = [row["technology"], row["building"], limit, row["baseline"]]
            for s in variants:
                lab = cell_label(s, limit)
                line.append(row.get(lab) if lab in reports else statuses.get(lab, "not_run"))
            delta_rows.append(line)
    paths.append(analysis.write_csv(out / "investment_delta.csv",
                                    ["technology", "building", "export_limit", "energy_capacity"]
                                    + [f"delta_{s}" for s in variants], delta_rows))
    peak_rows, cost_rows = [], []
    for limit in limits:
        for s in schemes:
            lab = cell_label(s, limit)
            rep = reports.get(lab)
            status = statuses.get(lab, "not_run")
            peak_rows.append([s, limit, status, rep.peak_import if rep else None])
            if rep:
                cost_rows.append([s, limit, status, rep.total_cost, rep.dso_revenue_lifetime]
                                 + [rep.cost_breakdown[k] for k in analysis.COST_COMPONENTS])
            else:
                cost_rows.append([s, limit, status] + [None] * (2 + len(analysis.COST_COMPONENTS)))
    paths.append(analysis.write_csv(out / "max_import.csv", ["scheme", "export_limit", "status", "peak_import_kwh"],
                                    peak_rows))
    paths.append(analysis.write_csv(out / "cost_revenue.csv",
                                    ["scheme", "export_limit", "status", "total_cost", "dso_revenue_lifetime"]
                                    + [f"cost_{k}" for k in analysis.COST_COMPONENTS], cost_rows))
    return paths


def cmd_compare(args) -> int:
    load_scenario(args.config)  # fail fast on configuration errors
    schemes = [s for s in SCHEME_ORDER if s in args.schemes]
    limits = [None] if args.export_limit is None else [None, args.export_limit]
    out = Path(args.out or "results")
    out.mkdir(parents=True, exist_ok=True)
    backend = _backend(args)
    jobs = [(args.config, s, lim, backend, str(out / cell_label(s, lim))) for lim in limits for s in schemes]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [_cell_job(j) for j in jobs]
    reports = {lab: rep for lab, status, rep, _ in results if rep is not None}
    statuses = {lab: status for lab, status, _, _ in results}
    for lab, status, rep, msg in results:
        print(f"{lab}: {status}" + (f" ({msg})" if msg else ""))
    write_combined(reports, statuses, schemes, limits, out)
    failed = [lab for lab, status, _, _ in results if status != "optimal"]
    if failed:
        print(f"failed cells: {', '.join(failed)}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_fixture(args) -> int:
    from .fixtures import write_fixture

    options = {"export_limit": None, "co2_constraint": True}
    path = write_fixture(args.out, args.variant, args.hours, options=options, start=args.start)
    print(path)
    return EXIT_OK


def _schemes(text: str) -> list[str]:
    tags = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in tags if s not in SCHEMES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown schemes {bad}; expected {sorted(SCHEMES)}")
    return tags


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zen-tariffs", description="Neighbourhood investment under grid tariffs")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="scenario JSON file")
        sp.add_argument("--backend", default=None, help="solver backend: highs (default) or scipy")
        sp.add_argument("--out", default=None, help="report directory")
        sp.add_argument("--time-limit", type=float, default=None, help="solver time limit in seconds")

    run = sub.add_parser("run", help="solve one tariff / export-limit cell")
    common(run)
    run.add_argument("--scheme", choices=sorted(SCHEMES), default=None, help="override the config's tariff")
    run.add_argument("--export-limit", default=None, help="kWh/h or 'none' (default: the config's option)")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="solve every tariff with and without the export limit")
    common(cmp_)
    cmp_.add_argument("--schemes", type=_schemes, default=list(SCHEME_ORDER), help="comma-separated tariff tags")
    cmp_.add_argument("--export-limit", type=parse_limit, default=100.0,
                      help="limit for the constrained cells, or 'none' to skip them (default 100)")
    cmp_.add_argument("--jobs", type=int, default=1, help="cells solved in parallel")
    cmp_.set_defaults(func=cmd_compare)

    fx = sub.add_parser("fixture", help="write a synthetic scenario (scenario.json + series.csv)")
    fx.add_argument("--out", required=True)
    fx.add_argument("--variant", choices=("full", "electric"), default="full")
    fx.add_argument("--hours", type=int, default=8760)
    fx.add_argument("--start", type=int, default=0, help="first hour of the year for shorter horizons")
    fx.set_defaults(func=cmd_fixture)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BackendUnavailable, ParseError) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except ZenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
