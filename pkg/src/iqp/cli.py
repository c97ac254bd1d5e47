"""Command-line drivers tying scenarios, constraint generation and LP queries
into reproducible runs with CSV artifacts."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import lp
from .credal import (
    ConstraintSet,
    constraints_csv,
    farkas_csv,
    feasibility,
    format_number,
    lower_upper,
    measure_csv,
)
from .events import And, Atom, TrajectorySpace, parse_event, parse_expr
from .scenarios import (
    BUILTIN_SCENARIOS,
    ConfigError,
    ScenarioConfig,
    build_constraints,
    build_system,
    config_hash,
    config_json,
    load_config,
)
from .system import QuantumSystem, Region, SSet
from .typicality import make_branch, typicality_report, verify_w11

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


@dataclass
class RunReport:
    command: str
    config_hash: str = ""
    constraints_emitted: int = 0
    constraints_skipped: int = 0
    constraints_filtered: int = 0
    feasible: bool | None = None
    certificate_path: str | None = None
    bounds: list[dict] = field(default_factory=list)
    typicality_rows: int = 0
    branch_rows: int = 0
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "constraints": {
                "emitted": self.constraints_emitted,
                "skipped": self.constraints_skipped,
                "filtered": self.constraints_filtered,
            },
            "feasible": self.feasible,
            "certificate_path": self.certificate_path,
            "bounds": self.bounds,
            "typicality_rows": self.typicality_rows,
            "branch_rows": self.branch_rows,
            "timings": self.timings,
        }


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on usage errors, 2 is taken
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _fmt6(x: float) -> str:
    return f"{0.0 if abs(x) < 5e-10 else x:.6f}"


def _load(args: argparse.Namespace) -> tuple[ScenarioConfig, QuantumSystem, TrajectorySpace]:
    cfg = load_config(args.config)
    system = build_system(cfg)
    return cfg, system, TrajectorySpace.for_system(system)


def _seed(args: argparse.Namespace, cfg: ScenarioConfig) -> int:
    return cfg.seed if args.seed is None else args.seed


def _finish(args: argparse.Namespace, report: RunReport) -> None:
    if getattr(args, "report", None):
        _write(Path(args.report), json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")


def _cmd_scenario(args: argparse.Namespace) -> int:
    builder = BUILTIN_SCENARIOS.get(args.name)
    if builder is None:
        known = ", ".join(sorted(BUILTIN_SCENARIOS))
        print(f"unknown scenario {args.name!r}; built-ins: {known}", file=sys.stderr)
        return EXIT_ERROR
    text = config_json(builder())
    if args.out:
        _write(Path(args.out), text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg, system, space = _load(args)
    print(f"config {config_hash(cfg)[:12]}  m={system.m}  n={system.n}  "
          f"trajectories={space.size}")
    print("time  state amplitudes" + " " * max(0, 22 * system.m - 18) + "singleton weights")
    for t in range(system.n):
        state = system.evolve(t)
        amps = "  ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in state)
        weights = " ".join(
            format_number(system.weight(SSet(t, Region.from_labels([x], system.m))))
            for x in range(system.m)
        )
        print(f"{t:<4}  {amps}  {weights}")
    return EXIT_OK


def _constraints(cfg: ScenarioConfig, system: QuantumSystem, space: TrajectorySpace,
                 report: RunReport) -> ConstraintSet:
    start = time.perf_counter()
    cs = build_constraints(cfg, system, space)
    report.timings["constraints"] = time.perf_counter() - start
    report.constraints_emitted = cs.emitted
    report.constraints_skipped = cs.skipped
    report.constraints_filtered = cs.filtered
    return cs


def _cmd_feasibility(args: argparse.Namespace) -> int:
    cfg, system, space = _load(args)
    report = RunReport(command="feasibility", config_hash=config_hash(cfg))
    outdir = Path(args.outdir)
    cs = _constraints(cfg, system, space, report)
    _write(outdir / "constraints.csv", constraints_csv(cs))

    start = time.perf_counter()
    cert = feasibility(cs)
    report.timings["solve"] = time.perf_counter() - start
    report.feasible = cert.feasible
    print(f"constraints: {cs.emitted} emitted, {cs.skipped} vacuous, "
          f"{cs.filtered} filtered")
    if cert.feasible:
        path = outdir / "certificate.csv"
        _write(path, measure_csv(cert.witness))
        report.certificate_path = str(path)
        print(f"feasible: witness written to {path}")
        _finish(args, report)
        return EXIT_OK
    path = outdir / "farkas.csv"
    _write(path, farkas_csv(cert.farkas, cs))
    report.certificate_path = str(path)
    print(f"infeasible: margin {format_number(cert.farkas.margin)}, "
          f"certificate written to {path}")
    _finish(args, report)
    return EXIT_INFEASIBLE


def _cmd_bounds(args: argparse.Namespace) -> int:
    cfg, system, space = _load(args)
    report = RunReport(command="bounds", config_hash=config_hash(cfg))
    cs = _constraints(cfg, system, space, report)
    exprs = args.event if args.event else list(cfg.events)
    if not exprs:
        print("no events: give --event or declare queries.events", file=sys.stderr)
        return EXIT_ERROR
    events = [parse_event(expr, space) for expr in exprs]

    start = time.perf_counter()
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda a: lower_upper(cs, a), events))
    else:
        results = [lower_upper(cs, a) for a in events]
    report.timings["solve"] = time.perf_counter() - start

    rows = []
    for expr, res in zip(exprs, results):
        if res.status == "infeasible":
            print("infeasible", file=sys.stderr)
            return EXIT_INFEASIBLE
        print(f"{_fmt6(res.lower)}, {_fmt6(res.upper)}")
        rows.append((expr, res))
        report.bounds.append({"event": expr, "lower": res.lower, "upper": res.upper})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["event", "lower", "upper"])
    for expr, res in rows:
        writer.writerow([expr, format_number(res.lower), format_number(res.upper)])
    _write(Path(args.outdir) / "bounds.csv", buf.getvalue())
    _finish(args, report)
    return EXIT_OK


def _parse_pair(expr: str, space: TrajectorySpace) -> tuple[SSet, SSet]:
    tree = parse_expr(expr, space)
    if not (isinstance(tree, And) and isinstance(tree.left, Atom)
            and isinstance(tree.right, Atom)):
        raise ValueError(f"pair must be 'atom & atom', got {expr!r}")

    def to_sset(atom: Atom) -> SSet:
        return SSet(atom.time, Region.from_labels(atom.labels, space.m))

    return to_sset(tree.left), to_sset(tree.right)


def _cmd_typicality(args: argparse.Namespace) -> int:
    cfg, system, space = _load(args)
    report = RunReport(command="typicality", config_hash=config_hash(cfg))
    cs = _constraints(cfg, system, space, report)
    if args.pair:
        pairs = [_parse_pair(expr, space) for expr in args.pair]
    else:
        pairs = [con.origin for con in cs.constraints if len(con.origin) == 2]
    if not pairs:
        print("no pairs: give --pair or a ruleset that generates pairs", file=sys.stderr)
        return EXIT_ERROR
    eps = args.epsilon if args.epsilon is not None else (
        cfg.epsilon if cfg.epsilon is not None else 1e-6
    )

    cert = feasibility(cs)
    if not cert.feasible:
        print("infeasible constraint set; no measure to evaluate", file=sys.stderr)
        return EXIT_INFEASIBLE
    probs = cert.witness.probs

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["pair", "weight", "distance", "relative_distance", "ratio",
                     "epsilon", "fires", "verdict"])
    for s1, s2 in pairs:
        rep = typicality_report(system, space, probs, s1, s2, eps, cfg.tau_norm)
        pair_text = f"({s1.text()} & {s2.text()})"
        verdict = "pass" if rep.passes else "fail"
        writer.writerow([
            pair_text,
            format_number(rep.weight),
            format_number(rep.distance),
            format_number(rep.relative_distance),
            format_number(rep.measured_ratio),
            format_number(rep.epsilon),
            "yes" if rep.qtr_fires else "no",
            verdict,
        ])
        print(f"{pair_text}  ratio={_fmt6(rep.measured_ratio)}  "
              f"rel_dist={rep.relative_distance:.3e}  fires={rep.qtr_fires}  {verdict}")
        report.typicality_rows += 1
    _write(Path(args.outdir) / "typicality.csv", buf.getvalue())
    _finish(args, report)
    return EXIT_OK


def _cmd_branch(args: argparse.Namespace) -> int:
    cfg, system, space = _load(args)
    report = RunReport(command="branch", config_hash=config_hash(cfg))
    decls = [br for br in cfg.branches if args.name is None or br.name == args.name]
    if not decls:
        declared = ", ".join(br.name for br in cfg.branches) or "none"
        print(f"no matching branch (declared: {declared})", file=sys.stderr)
        return EXIT_ERROR
    cs = _constraints(cfg, system, space, report)
    seed = _seed(args, cfg)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["branch", "weight", "epsilon", "expectation", "tail", "delta",
                     "expectation_bound", "tail_bound", "verdict"])
    exit_code = EXIT_OK
    for decl in decls:
        ssets = [SSet(t, Region.from_labels(labels, system.m)) for t, labels in decl.ssets]
        branch = make_branch(system, ssets, cfg.tau_norm)
        delta = args.delta if args.delta is not None else (
            decl.delta if decl.delta is not None else cfg.delta
        )
        w11 = verify_w11(system, space, cs, branch, delta, cfg.samples, seed)
        if w11.passes is None:
            verdict = "vacuous"
        elif w11.passes:
            verdict = "pass"
        else:
            verdict = "fail"
            exit_code = EXIT_ERROR
        writer.writerow([
            decl.name,
            format_number(system.weight(branch.base)),
            format_number(branch.epsilon),
            format_number(w11.worst_expectation),
            format_number(w11.worst_tail),
            format_number(delta),
            format_number(w11.expectation_bound),
            format_number(w11.tail_bound),
            verdict,
        ])
        print(f"{decl.name}: eps={branch.epsilon:.3e}  "
              f"E(Y)>= {format_number(w11.worst_expectation)} "
              f"(bound {format_number(w11.expectation_bound)})  "
              f"tail<= {format_number(w11.worst_tail)} "
              f"(bound {format_number(w11.tail_bound)})  "
              f"samples={w11.n_samples}  {verdict}")
        report.branch_rows += 1
    _write(Path(args.outdir) / "branch.csv", buf.getvalue())
    _finish(args, report)
    return exit_code


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True, help="scenario config JSON")
    sub.add_argument("--outdir", default=".", help="directory for CSV artifacts")
    sub.add_argument("--seed", type=int, default=None,
                     help="override the config's sampling seed (default 42)")
    sub.add_argument("--report", default=None, help="write a run-report JSON here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iqp", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sc = subs.add_parser("scenario", help="emit a built-in scenario config")
    sc.add_argument("name", help="one of: " + ", ".join(sorted(BUILTIN_SCENARIOS)))
    sc.add_argument("--out", default=None, help="write the config here instead of stdout")
    sc.set_defaults(func=_cmd_scenario)

    sim = subs.add_parser("simulate", help="print evolved states and singleton weights")
    _add_common(sim)
    sim.set_defaults(func=_cmd_simulate)

    fe = subs.add_parser("feasibility", help="decide emptiness of the credal set")
    _add_common(fe)
    fe.set_defaults(func=_cmd_feasibility)

    bo = subs.add_parser("bounds", help="lower/upper probability of events")
    _add_common(bo)
    bo.add_argument("--event", action="append", default=None,
                    help="event expression (repeatable; default: config events)")
    bo.add_argument("--jobs", type=int, default=1,
                    help="parallel LP queries; output order stays fixed")
    bo.set_defaults(func=_cmd_bounds)

    ty = subs.add_parser("typicality", help="mutual-typicality reports for sset pairs")
    _add_common(ty)
    ty.add_argument("--pair", action="append", default=None,
                    help="pair as 'atom & atom' (repeatable; default: generated pairs)")
    ty.add_argument("--epsilon", type=float, default=None,
                    help="typicality threshold (default: config epsilon or 1e-6)")
    ty.set_defaults(func=_cmd_typicality)

    br = subs.add_parser("branch", help="branch-following statistics and bound checks")
    _add_common(br)
    br.add_argument("--name", default=None, help="branch to run (default: all declared)")
    br.add_argument("--delta", type=float, default=None, help="tail threshold override")
    br.set_defaults(func=_cmd_branch)
    return parser


def _provenance(exc: BaseException) -> str:
    """Deepest package module in the traceback, for error attribution."""
    origin = "iqp"
    tb = exc.__traceback__
    while tb is not None:
        module = tb.tb_frame.f_globals.get("__name__", "")
        if module.startswith("iqp."):
            origin = module.split(".", 1)[1]
        tb = tb.tb_next
    return origin


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for line in exc.errors:
            print(f"error [scenarios]: {line}", file=sys.stderr)
        return EXIT_ERROR
    except lp.SimplexFailure as exc:
        print(f"error [lp]: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error [{_provenance(exc)}]: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
