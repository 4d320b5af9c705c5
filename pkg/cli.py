import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence

import mpmath

import config  # type: ignore
import eulersums
import graphs
import pipeline
import state
import verify
from geometry import mc_weight
from verify import Check


log = logging.getLogger(__name__)

CSV_COLUMNS = ["name", "value", "expected", "tolerance", "pass"]

BASIS_CONSTANTS = {
    "one": lambda: mpmath.mpf(1),
    "zeta3sq_over_pi6": lambda: mpmath.zeta(3) ** 2 / mpmath.pi**6,
    "zeta3": lambda: mpmath.zeta(3),
    "pi2": lambda: mpmath.pi**2,
}


def setup_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


@dataclass
class Report:
    command: str
    inputs: Dict
    results: List[Dict] = field(default_factory=list)
    seed: int = config.SEED
    timestamp: str = ""
    version: str = config.VERSION

    def add(self, check: Check, exact: Optional[str] = None):
        row = check.as_dict()
        if exact is not None:
            row["exact"] = exact
        self.results.append(row)

    @property
    def failed(self) -> bool:
        return any(r["pass"] is False for r in self.results)

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "seed": self.seed,
            "timestamp": self.timestamp,
            "version": self.version,
        }
        return json.dumps(doc, indent=2, ensure_ascii=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in self.results:
            writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in CSV_COLUMNS})
        return buf.getvalue()


def select_graph(selector: str) -> graphs.KGraph:
    """main | bernoulli:<n> | bsub | wheel:<k> | poisson | file:<path>"""
    kind, _, arg = selector.partition(":")
    if kind == "main" and not arg:
        return graphs.build_main_graph()
    if kind == "bsub" and not arg:
        return graphs.build_b_subgraph()
    if kind == "poisson" and not arg:
        return graphs.build_poisson_graph()
    if kind in ("bernoulli", "wheel") and arg.isdigit():
        n = int(arg)
        return graphs.build_bernoulli_graph(n) if kind == "bernoulli" else graphs.build_wheel_graph(n)
    if kind == "file" and arg:
        g = graphs.load(arg)
        problems = graphs.validate(g)
        if problems:
            raise graphs.GraphFormatError(f"{arg}: {'; '.join(problems)}")
        return g
    raise ValueError(f"unknown graph selector {selector!r}")


# ---------------------------------------------------------------------------
# Commands


def cmd_verify(args) -> Report:
    report = Report("verify", {"suite": args.suite, "samples": args.samples}, seed=args.seed)
    for check in verify.run_suite(args.suite, samples=args.samples, seed=args.seed):
        report.add(check)
    return report


def _mc_setup(args, g: graphs.KGraph):
    """(fixed angles, fiber flag, expected value or None) for the selector."""
    kind = args.graph.partition(":")[0]
    if kind == "bernoulli":
        x = 0.5 if args.x is None else args.x
        n = len(g.type_i) - 1
        expected = verify.bernoulli_graph_reference(n, x)
        return {"P": x}, False, expected
    if kind == "bsub":
        if args.alpha is None or args.beta is None:
            raise ValueError("bsub needs --alpha and --beta")
        return {"U": args.alpha, "V": args.beta}, True, pipeline.f_closed_form(args.alpha, args.beta)
    if kind == "wheel" and len(g.type_i) == 2:
        return {}, False, verify.WHEEL_2_WEIGHT
    if kind == "poisson" and args.ordered:
        return {}, False, config.ORIENTATION * 0.5
    return {}, False, None


def cmd_weight_mc(args) -> Report:
    g = select_graph(args.graph)
    fixed, fiber, expected = _mc_setup(args, g)
    inputs = {
        "graph": args.graph,
        "samples": args.samples,
        "ordered": args.ordered,
        "batches": args.batches,
        "fixed": fixed,
        "fiber": fiber,
        "orientation": config.ORIENTATION,
    }
    report = Report("weight mc", inputs, seed=args.seed)
    est = None
    key = None
    if args.cache:
        state.init_db(args.cache)
        key = state.run_key(g, args.samples, args.seed, args.ordered, fixed, fiber, args.batches)
        est = state.get_estimate(args.cache, key)
        if est is not None:
            log.info(f"cache hit {key[:12]}")
    if est is None:
        est = mc_weight(
            g,
            args.samples,
            seed=args.seed,
            ordered=args.ordered,
            fixed=fixed,
            fiber=fiber,
            batches=args.batches,
            progress=args.progress,
        )
        if key is not None:
            state.put_estimate(args.cache, key, g, est)
    if expected is None:
        report.add(Check("weight", est.value))
    else:
        tol = 1e-9 if est.stderr == 0 else 3 * est.stderr
        report.add(Check("weight", est.value, expected, tol))
    report.add(Check("stderr", est.stderr))
    return report


def cmd_weight_pipeline(args) -> Report:
    report = Report("weight pipeline", {"order": args.order, "fit": args.fit})
    value = pipeline.semianalytic_weight(args.order)
    report.add(Check("semianalytic_weight", float(value), eulersums.final_constant(), 1e-6))
    if args.fit:
        try:
            fit = pipeline.rational_fit(value, list(pipeline.headline_basis()))
        except pipeline.NoFitError as e:
            log.error(f"no rational fit: {e}")
            report.add(Check("fit_found", 0.0, 1.0, 0.0))
            return report
        rational, zeta_part = fit.coefficients
        report.add(Check("fit_rational_part", float(rational), -37 / 11340, 0.0), exact=str(rational))
        report.add(Check("fit_zeta3_squared_coefficient", float(zeta_part), 1.0, 0.0), exact=str(zeta_part))
        report.add(Check("fit_residual", fit.residual, 0.0, config.FIT_TOL))
    return report


def cmd_fit(args) -> Report:
    names = [n.strip() for n in args.basis.split(",") if n.strip()]
    unknown = [n for n in names if n not in BASIS_CONSTANTS]
    if unknown:
        raise ValueError(f"unknown basis constants: {', '.join(unknown)}")
    with mpmath.workdps(config.WORK_DPS):
        basis = [BASIS_CONSTANTS[n]() for n in names]
    report = Report("fit", {"value": args.value, "basis": names, "max_den": args.max_den, "tol": args.tol})
    fit = pipeline.rational_fit(float(args.value), basis, max_den=args.max_den, tol=args.tol)
    for name, c in zip(names, fit.coefficients):
        report.add(Check(f"coefficient_{name}", float(c)), exact=str(c))
    report.add(Check("residual", fit.residual, 0.0, args.tol))
    return report


def cmd_graph_show(args) -> Report:
    g = select_graph(args.graph)
    report = Report("graph show", {"graph": args.graph, "json": json.loads(graphs.render(g))})
    report.add(Check("validation_problems", float(len(graphs.validate(g))), 0.0, 0.0))
    report.add(Check("edges", float(len(g.edges))))
    report.add(Check("is_lie_graph", 1.0 if graphs.is_lie_graph(g) else 0.0))
    if len(g.type_ii) >= 1 and len(g.edges) <= 16:
        report.add(Check("gamma_prime_family_size", float(len(graphs.gamma_prime_family(g)))))
    known = graphs.known_weight(g)
    if known is not None:
        report.inputs["known_weight"] = known.text
        if known.value is not None:
            report.add(Check(f"known_weight_{known.kind}", float(known.value)), exact=str(known.value))
        elif known.polynomial is not None:
            report.add(Check(f"known_weight_{known.kind}_at_half", float(known.polynomial(0.5))), exact=str(known.polynomial))
    return report


# ---------------------------------------------------------------------------
# Parser


def _output_flags(p: argparse.ArgumentParser):
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON report (default)")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", help="CSV rows name,value,expected,tolerance,pass")
    p.add_argument("--verbose", action="store_true", help="debug logging")
    p.set_defaults(fmt="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graph_weights", description="Kontsevich graph weights: Monte Carlo and semi-analytic")
    parser.add_argument("--version", action="version", version=config.VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="Run verification suites")
    p.add_argument("--suite", default="all", choices=list(verify.SUITES) + ["all"])
    p.add_argument("--samples", type=int, default=verify.DEFAULT_SAMPLES, help="Monte Carlo samples per estimate")
    p.add_argument("--seed", type=int, default=config.SEED)
    _output_flags(p)
    p.set_defaults(func=cmd_verify)

    w = sub.add_parser("weight", help="Compute a graph weight")
    wsub = w.add_subparsers(dest="method", required=True)

    p = wsub.add_parser("mc", help="Monte Carlo over configuration space")
    p.add_argument("--graph", required=True, help="main | bernoulli:<n> | bsub | wheel:<k> | poisson | file:<path>")
    p.add_argument("--x", type=float, help="boundary angle of P (bernoulli graphs, default 0.5)")
    p.add_argument("--alpha", type=float, help="angle of U (bsub)")
    p.add_argument("--beta", type=float, help="angle of V (bsub)")
    p.add_argument("--samples", type=int, default=verify.DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=config.SEED)
    p.add_argument("--ordered", action="store_true", help="restrict free boundary angles to increasing order")
    p.add_argument("--batches", type=int, default=config.MC_BATCHES)
    p.add_argument("--cache", help="SQLite file for finished estimates")
    p.add_argument("--progress", action="store_true", help="tqdm bar over batches")
    _output_flags(p)
    p.set_defaults(func=cmd_weight_mc)

    p = wsub.add_parser("pipeline", help="Semi-analytic value of the main graph")
    p.add_argument("--order", type=int, default=200, help="series truncation N")
    p.add_argument("--fit", action="store_true", help="certify over [1, zeta(3)^2/pi^6]")
    _output_flags(p)
    p.set_defaults(func=cmd_weight_pipeline)

    p = sub.add_parser("fit", help="Integer-relation fit of a value")
    p.add_argument("value", help="real number")
    p.add_argument("--basis", default="one,zeta3sq_over_pi6", help=f"comma list of {', '.join(BASIS_CONSTANTS)}")
    p.add_argument("--max-den", type=int, default=config.FIT_MAX_DEN)
    p.add_argument("--tol", type=float, default=config.FIT_TOL)
    _output_flags(p)
    p.set_defaults(func=cmd_fit)

    g = sub.add_parser("graph", help="Graph utilities")
    gsub = g.add_subparsers(dest="action", required=True)
    p = gsub.add_parser("show", help="Render, validate and classify a graph")
    p.add_argument("--graph", required=True)
    _output_flags(p)
    p.set_defaults(func=cmd_graph_show)
    return parser


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return int(e.code or 0)
    setup_logging(args.verbose)
    try:
        report = args.func(args)
    except (ValueError, ArithmeticError, OSError) as e:
        log.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    report.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    sys.stdout.write(report.to_csv() if args.fmt == "csv" else report.to_json() + "\n")
    if report.failed:
        log.warning(f"{args.command}: verification failed")
        return 1
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
