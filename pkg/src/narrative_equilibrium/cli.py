"""Command-line front end: ``narrative-eq solve|verify|simulate|sweep|mobilize``.

Exit codes: 0 ok, 1 usage, 2 validation, 3 verification failed, 4 resource
guard.  Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import serialize
from .certifier import DEFAULT_EPS, TREMBLES, verify_equilibrium
from .dynamics import MODES, TIES, check_trace_invariants, limit_estimate, run_dynamics, write_trace_csv
from .errors import MalformedConfig, NarrativeError
from .microfoundation import GroupPopulation, simulate_mobilization
from .society import (
    Narrative,
    Platform,
    Policy,
    bits_of,
    expand_narrative_domain,
    load_and_validate_society,
    parse_rational,
)
from .solver import METHODS, solve, support_sizes

OUTDIR_ENV = "NARRATIVE_EQ_OUTDIR"

EXIT_OK, EXIT_USAGE = 0, 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _output_path(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTDIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _emit(obj, out: str | None) -> None:
    text = serialize.dumps(obj)
    path = _output_path(out)
    if path is None:
        print(text)
    else:
        path.write_text(text + "\n")


def _load(config: str):
    society = load_and_validate_society(Path(config))
    return society, expand_narrative_domain(society)


# -- solve / verify -----------------------------------------------------------

def cmd_solve(args) -> int:
    society, domain = _load(args.config)
    result = solve(society, domain, args.closed_form, check=args.check)
    _emit(serialize.result_to_json(result, society), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    society, domain = _load(args.config)
    candidate = serialize.distribution_from_json(json.loads(Path(args.candidate).read_text()), society.n)
    report = verify_equilibrium(society, domain, candidate, eps=parse_rational(args.eps),
                                tremble=args.tremble)
    _emit(serialize.report_to_json(report), args.out)
    return EXIT_OK if report.passed else 3


# -- simulate -----------------------------------------------------------------

def parse_platform_spec(text: str) -> Platform:
    """``a/C/S`` with comma-separated groups, e.g. ``l/2,3/4`` or ``h/1/0``."""
    parts = text.split("/")
    if len(parts) != 3:
        raise MalformedConfig(f"platform spec {text!r} is not of the form a/C/S")

    def ints(chunk):
        try:
            return [int(x) for x in chunk.split(",") if x.strip()]
        except ValueError as exc:
            raise MalformedConfig(f"bad group list {chunk!r} in {text!r}") from exc

    s = ints(parts[2])
    return Platform(Policy.parse(parts[0]), bits_of(ints(parts[1])),
                    Narrative(0 in s, bits_of(i for i in s if i != 0)))


def cmd_simulate(args) -> int:
    society, domain = _load(args.config)
    equilibrium = solve(society, domain)
    track: list[Platform] = []
    for spec in args.track or []:
        if spec == "all-eq":
            track.extend(equilibrium.distribution.support)
        else:
            track.append(parse_platform_spec(spec))
    track = list(dict.fromkeys(track))
    run = run_dynamics(society, domain, args.steps, args.seed, tie=args.tie, mode=args.mode,
                       track=track, check_every=args.check_every,
                       scratch_every=args.check_every * 1000 if args.check_every else 0)
    trace = run.trace
    if args.trace:
        write_trace_csv(trace, _output_path(args.trace))
    estimate = limit_estimate(trace, parse_rational(args.tail))
    problems = check_trace_invariants(trace, equilibrium.alpha) + trace.warnings
    summary = {
        "steps": args.steps,
        "mode": trace.mode,
        "tie": trace.tie,
        "seed": args.seed,
        "limit": estimate.as_dict(),
        "equilibrium_marginal": [
            {"a": a.value, "C": serialize.groups_of(c), "mass": serialize.rational(m),
             "mass_decimal": float(m)}
            for (a, c), m in equilibrium.marginal.items()
        ],
        "invariant_problems": problems,
    }
    _emit(summary, args.out)
    return EXIT_OK


# -- sweep --------------------------------------------------------------------

def _set_path(data, path: str, value) -> None:
    keys = path.split(".")
    node = data
    for k in keys[:-1]:
        node = node[int(k)] if isinstance(node, list) else node.setdefault(k, {})
    last = keys[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value


def parse_vary(text: str):
    """``path=from:to:steps`` -> (path, list of values); endpoints inclusive."""
    try:
        path, span = text.split("=", 1)
        lo, hi, steps = span.split(":")
        steps = int(steps)
    except ValueError as exc:
        raise MalformedConfig(f"--vary expects path=from:to:steps, got {text!r}") from exc
    if steps < 1:
        raise MalformedConfig("--vary needs at least one step")
    lo, hi = parse_rational(lo), parse_rational(hi)
    if steps == 1:
        values = [lo]
    else:
        values = [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]
    return path, values


def _sweep_point(task):
    raw, path, value = task
    data = copy.deepcopy(raw)
    as_json = int(value) if value.denominator == 1 and path.endswith(".r") else serialize.rational(value)
    row = {"path": path, "value": serialize.rational(value), "value_decimal": float(value)}
    try:
        _set_path(data, path, as_json)
        society = load_and_validate_society(data)
        domain = expand_narrative_domain(society)
        result = solve(society, domain)
        row.update({
            "method": result.method,
            "alpha": serialize.rational(result.alpha),
            "alpha_decimal": float(result.alpha),
            "R": domain.R if domain.K else "",
            "support_size": len(result.distribution),
            "scapegoat_sizes": " ".join(map(str, support_sizes(result))),
            "error": "",
        })
    except (NarrativeError, KeyError, IndexError, TypeError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


SWEEP_COLUMNS = ["path", "value", "value_decimal", "method", "alpha", "alpha_decimal", "R",
                 "support_size", "scapegoat_sizes", "error"]


def cmd_sweep(args) -> int:
    raw = json.loads(Path(args.config).read_text())
    path, values = parse_vary(args.vary)
    tasks = [(raw, path, v) for v in values]
    if args.workers == 1:
        rows = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    out_dir = Path(args.out) if args.out else Path(os.environ.get(OUTDIR_ENV, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / "sweep.csv"
    with target.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, restval="")
        writer.writeheader()
        writer.writerows(rows)
    print(serialize.dumps({"rows": len(rows), "csv": str(target),
                           "failed": sum(1 for r in rows if r["error"])}))
    return EXIT_OK


# -- mobilize -----------------------------------------------------------------

def cmd_mobilize(args) -> int:
    pop = GroupPopulation(parse_rational(args.m), {args.policy: parse_rational(args.cap)})
    report = simulate_mobilization(pop, args.policy, args.p, args.samples, args.seed)
    out = report.as_dict()
    out["implied_potential"] = serialize.rational(pop.potential(args.policy))
    out["within_3_se"] = report.within(3)
    _emit(out, args.out)
    return EXIT_OK


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="narrative-eq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="compute the essential equilibrium")
    p.add_argument("config")
    p.add_argument("--closed-form", default="auto", choices=METHODS)
    p.add_argument("--check", action="store_true", help="cross-check a closed form against the general solver")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="certify a candidate distribution")
    p.add_argument("config")
    p.add_argument("candidate")
    p.add_argument("--eps", default=serialize.rational(DEFAULT_EPS))
    p.add_argument("--tremble", default="graded", choices=TREMBLES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="run the dominant-platform dynamics")
    p.add_argument("config")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--tie", default="canonical", choices=TIES)
    p.add_argument("--mode", default="auto", choices=MODES)
    p.add_argument("--track", nargs="+", metavar="PLATFORM",
                   help="'all-eq' or platform specs a/C/S such as l/2,3/4")
    p.add_argument("--trace", help="CSV file for the sampled trace")
    p.add_argument("--tail", default="1/2", help="tail fraction for the limit estimate")
    p.add_argument("--check-every", type=int, default=0,
                   help="exact mode: run belief monotonicity checks every K steps")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="solve over a grid of one parameter")
    p.add_argument("config")
    p.add_argument("--vary", required=True, help="dotted path=from:to:steps, e.g. f.1.l=2:4:5")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mobilize", help="Monte Carlo turnout for one group")
    p.add_argument("--m", required=True)
    p.add_argument("--cap", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--policy", default="h", choices=["h", "l"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mobilize)
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)
    return code


def run_command(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("UsageError", str(exc), EXIT_USAGE)
    except SystemExit as exc:      # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NarrativeError as exc:
        return _fail(type(exc).__name__, str(exc), exc.exit_code)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(type(exc).__name__, str(exc), 2)


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
