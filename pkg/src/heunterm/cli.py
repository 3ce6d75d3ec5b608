"""Command-line interface: ``heunterm solve | eval | verify``.

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from . import verify as vf
from .confluent import ConfluentHeunParams
from .errors import (
    ConvergenceError,
    DegenerateRecurrenceError,
    HeunTermError,
    OutsideDiskWarning,
)
from .general import GeneralHeunParams
from .pfq import SeriesWindow

SCHEMA = "heunterm/1"
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SINGULAR_GAP = 1e-6

PARAMETER_NAMES = {
    "general": ("a", "alpha", "beta", "gamma", "delta", "epsilon"),
    "confluent": ("alpha", "gamma", "delta", "epsilon"),
}
REQUIRED = {
    "general": ("a", "alpha", "beta", "gamma"),
    "confluent": ("alpha", "gamma", "epsilon"),
}
# the exponent parameter fixed by the termination order
EXPONENT = {"general": "epsilon", "confluent": "delta"}

log = logging.getLogger("heunterm.cli")


class InputError(Exception):
    """Bad request: reported on stderr with exit code 2."""


@dataclasses.dataclass(frozen=True)
class SolveRequest:
    equation: str
    parameters: dict
    N: int
    window: SeriesWindow = SeriesWindow()
    notes: tuple[str, ...] = ()

    def build_params(self):
        p = dict(self.parameters)
        try:
            if self.equation == "general":
                return GeneralHeunParams(**p)
            return ConfluentHeunParams(**p)
        except HeunTermError as exc:
            raise InputError(str(exc)) from exc


# ---------------------------------------------------------------- parsing


def parse_complex(value, name: str = "value") -> complex:
    """Accept numbers, "re", "re+imj" strings, or {"re": .., "im": ..} objects."""
    if isinstance(value, dict):
        try:
            return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise InputError(f"{name}: bad complex object {value!r}") from exc
    if isinstance(value, bool):
        raise InputError(f"{name}: expected a number, got {value!r}")
    if isinstance(value, (int, float, complex)):
        z = complex(value)
    else:
        try:
            z = complex(str(value).replace(" ", ""))
        except ValueError as exc:
            raise InputError(f"{name}: cannot parse {value!r} as a complex number") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"{name}: must be finite")
    return z


def parse_grid(spec: str) -> list[complex]:
    """"start:stop:count" with complex endpoints, both included."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"grid must read start:stop:count, got {spec!r}")
    start, stop = parse_complex(parts[0], "grid start"), parse_complex(parts[1], "grid stop")
    try:
        count = int(parts[2])
    except ValueError as exc:
        raise InputError(f"grid count must be an integer, got {parts[2]!r}") from exc
    if count < 1:
        raise InputError("grid count must be positive")
    if count == 1:
        return [start]
    return [start + (stop - start) * k / (count - 1) for k in range(count)]


def parse_n_range(spec: str) -> list[int]:
    try:
        if ":" in spec or ".." in spec:
            lo, hi = spec.replace("..", ":").split(":")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(spec)]
    except ValueError as exc:
        raise InputError(f"N range must read N or lo:hi, got {spec!r}") from exc
    if not values or min(values) < 0:
        raise InputError(f"N range {spec!r} is empty or negative")
    return values


def _load_request_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read request file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("request file must hold a JSON object")
    # a full solve report is accepted too; its request echo is reused
    return data.get("request", data)


def build_request(args) -> SolveRequest:
    base = _load_request_file(args.request) if getattr(args, "request", None) else {}
    equation = args.equation or base.get("equation")
    if equation not in PARAMETER_NAMES:
        raise InputError("equation must be 'general' or 'confluent'")
    N = args.N if args.N is not None else base.get("N")
    if not isinstance(N, int) or isinstance(N, bool) or N < 0:
        raise InputError(f"N must be a nonnegative integer, got {N!r}")

    raw = dict(base.get("parameters", {}))
    for name in PARAMETER_NAMES[equation]:
        flag = getattr(args, name, None)
        if flag is not None:
            raw[name] = flag
    unknown = set(raw) - set(PARAMETER_NAMES[equation])
    if unknown:
        raise InputError(f"unknown parameters for the {equation} equation: {sorted(unknown)}")
    missing = [n for n in REQUIRED[equation] if n not in raw]
    if missing:
        raise InputError(f"missing parameters for the {equation} equation: {missing}")
    params = {k: parse_complex(v, k) for k, v in raw.items()}

    notes = []
    exponent = EXPONENT[equation]
    if exponent not in params:
        params[exponent] = complex(-N)
        notes.append(f"{exponent} set to -N = {-N} (termination condition)")
        log.info(notes[-1])
    elif abs(params[exponent] + N) > 1e-12:
        raise InputError(
            f"termination condition {exponent} = -N violated: "
            f"{exponent} = {params[exponent]}, N = {N}"
        )
    return SolveRequest(equation, params, N, _window(args, base.get("window")), tuple(notes))


def _window(args, base: dict | None) -> SeriesWindow:
    fields = dict(base or {})
    if args.max_terms is not None:
        fields["max_terms"] = args.max_terms
    if args.tol is not None:
        fields["rel_tol"] = args.tol
    try:
        return SeriesWindow(**fields)
    except (TypeError, HeunTermError) as exc:
        raise InputError(f"bad series window: {exc}") from exc


# ---------------------------------------------------------------- encoding


def cx(z) -> dict:
    z = complex(z)
    return {"re": _num(z.real), "im": _num(z.imag)}


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float):
        return _num(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def dump_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _request_echo(req: SolveRequest) -> dict:
    return {
        "equation": req.equation,
        "N": req.N,
        "parameters": {k: cx(v) for k, v in sorted(req.parameters.items())},
        "window": dataclasses.asdict(req.window),
    }


# ---------------------------------------------------------------- solve


def solution_record(index: int, sol, window: SeriesWindow) -> dict:
    base_p = len(sol.base_upper)
    base_q = len(sol.base_lower)
    spec = sol.solution
    return {
        "index": index,
        "q": cx(sol.chosen_q),
        "d": [cx(x) for x in sol.d],
        "e": [cx(x) for x in sol.e],
        "pfq": {
            "type": spec.label(),
            "omega": cx(spec.omega),
            "base_upper": [cx(x) for x in spec.upper[:base_p]],
            "base_lower": [cx(x) for x in spec.lower[:base_q]],
            "pairs": [
                {"upper": cx(u), "lower": cx(l)}
                for u, l in zip(spec.upper[base_p:], spec.lower[base_q:])
            ],
        },
        "flags": {
            "reduced_order": sol.reduced_order,
            "effective_order": sol.effective_order,
            "degenerate": False,
        },
        "verification": vf.verification_block(sol, window),
    }


def cmd_solve(req: SolveRequest) -> tuple[dict, int]:
    params = req.build_params()
    eq = vf.EQUATIONS[req.equation]
    report = {"schema": SCHEMA, "command": "solve", "version": __version__}
    report["request"] = _request_echo(req)
    report["notes"] = list(req.notes)
    try:
        sols = eq.terminate(params, req.N)
    except DegenerateRecurrenceError as exc:
        report["flags"] = {"degenerate": True}
        report["notes"].append(str(exc))
        report["solutions"] = []
        report["passed"] = False
        return report, EXIT_FAIL
    except HeunTermError as exc:
        raise InputError(str(exc)) from exc
    report["flags"] = {"degenerate": False}
    report["solutions"] = [solution_record(i, s, req.window) for i, s in enumerate(sols)]
    report["passed"] = all(r["verification"]["passed"] for r in report["solutions"])
    return report, EXIT_OK if report["passed"] else EXIT_FAIL


SOLVE_CHECKS = ("closure", "eigenvector_residual", "ode_residual_max", "oracle_max_deviation")


def solve_csv(report: dict) -> str:
    N = report["request"]["N"]
    header = ["index", "q_re", "q_im"]
    header += [f"d{n}_{part}" for n in range(N + 1) for part in ("re", "im")]
    header += [f"e{i}_{part}" for i in range(1, N + 1) for part in ("re", "im")]
    header += ["effective_order", "reduced_order", *SOLVE_CHECKS, "passed"]
    rows = []
    for rec in report["solutions"]:
        row = [rec["index"], rec["q"]["re"], rec["q"]["im"]]
        for z in rec["d"]:
            row += [z["re"], z["im"]]
        e = rec["e"] + [{"re": "", "im": ""}] * (N - len(rec["e"]))
        for z in e:
            row += [z["re"], z["im"]]
        ver = rec["verification"]
        row += [rec["flags"]["effective_order"], rec["flags"]["reduced_order"]]
        row += [_num(ver[k]) for k in SOLVE_CHECKS] + [ver["passed"]]
        rows.append(row)
    return dump_csv(header, rows)


# ---------------------------------------------------------------- eval


def cmd_eval(req: SolveRequest, index: int, points: list[complex]) -> tuple[dict, int]:
    params = req.build_params()
    eq = vf.EQUATIONS[req.equation]
    try:
        sols = eq.terminate(params, req.N)
    except HeunTermError as exc:
        raise InputError(str(exc)) from exc
    if not 0 <= index < len(sols):
        raise InputError(f"solution index {index} out of range 0..{len(sols) - 1}")
    sol = sols[index]
    singular = vf.singular_points(sol.params)
    rows, ok = [], True
    for z in points:
        row = {"z": cx(z), "phi": None, "residual": None, "status": "ok"}
        near = any(abs(z - s) < SINGULAR_GAP for s in singular)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", OutsideDiskWarning)
            try:
                if near and abs(z) < SINGULAR_GAP:
                    row["phi"] = cx(1.0)
                elif not near:
                    vals = [eq.value(sol, z, req.window, k) for k in range(3)]
                    row["phi"] = cx(vals[0])
                    res = eq.residual(*vals, z, sol.params)
                    row["residual"] = vf.oracle.normalized_residual(res, *vals)
            except ConvergenceError:
                row["status"] = "diverged"
        outside = any(issubclass(w.category, OutsideDiskWarning) for w in caught)
        if near:
            row["status"] = "singular"
        elif outside:
            # flagged, not failed: the series makes no promise there
            row["status"] = "outside-disk"
        elif row["status"] == "diverged":
            ok = False
        if row["residual"] is not None and row["residual"] > vf.ODE_TOL and not outside:
            ok = False
        rows.append(row)
    report = {
        "schema": SCHEMA,
        "command": "eval",
        "version": __version__,
        "request": _request_echo(req),
        "notes": list(req.notes),
        "solution": {"index": index, "q": cx(sol.chosen_q), "type": sol.solution.label()},
        "rows": rows,
        "passed": ok,
    }
    return report, EXIT_OK if ok else EXIT_FAIL


def eval_csv(report: dict) -> str:
    header = ["z_re", "z_im", "phi_re", "phi_im", "residual", "status"]
    rows = []
    for r in report["rows"]:
        phi = r["phi"] or {"re": "", "im": ""}
        res = "" if r["residual"] is None else _num(r["residual"])
        rows.append([r["z"]["re"], r["z"]["im"], phi["re"], phi["im"], res, r["status"]])
    return dump_csv(header, rows)


# ---------------------------------------------------------------- verify


def _trial(task) -> dict:
    equation, N, trial, seed, window = task
    rng = np.random.default_rng([seed, N, trial])
    params = vf.SAMPLERS[equation](rng, N)
    outcome = vf.run_trial(equation, params, N, window)
    row = {
        "N": N,
        "trial": trial,
        "status": outcome["status"],
        "parameters": {
            k: cx(getattr(params, k)) for k in PARAMETER_NAMES[equation]
        },
        "solutions": len(outcome["solutions"]),
        "q": [cx(sol.chosen_q) for sol in outcome["solutions"]],
    }
    blocks = outcome.get("blocks", [])
    for key in ("closure", "eigenvector_residual", "ode_residual_max", "oracle_max_deviation"):
        row[key] = max((b[key] for b in blocks), default=None)
    if outcome["status"] == "degenerate":
        row["message"] = outcome["message"]
    return row


def cmd_verify(
    equation: str, Ns: list[int], trials: int, seed: int, window: SeriesWindow, jobs: int = 1
) -> tuple[dict, int]:
    if equation not in vf.SAMPLERS:
        raise InputError("equation must be 'general' or 'confluent'")
    if trials < 1:
        raise InputError("trials must be positive")
    tasks = [(equation, N, t, seed, window) for N in Ns for t in range(trials)]
    if jobs > 1:
        # map() yields in submission order, so the merge is deterministic
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_trial, tasks))
    else:
        rows = [_trial(t) for t in tasks]
    counts = {s: sum(r["status"] == s for r in rows) for s in ("pass", "fail", "degenerate")}
    report = {
        "schema": SCHEMA,
        "command": "verify",
        "version": __version__,
        "request": {
            "equation": equation,
            "N": Ns,
            "trials": trials,
            "seed": seed,
            "window": dataclasses.asdict(window),
        },
        "thresholds": {
            "closure": vf.CLOSURE_TOL,
            "eigenvector_residual": vf.EIGENVECTOR_TOL,
            "ode_residual_max": vf.ODE_TOL,
            "oracle_max_deviation": vf.ORACLE_TOL,
        },
        "rows": rows,
        "summary": counts,
        "passed": counts["fail"] == 0,
    }
    return report, EXIT_OK if report["passed"] else EXIT_FAIL


def verify_csv(report: dict) -> str:
    keys = ("closure", "eigenvector_residual", "ode_residual_max", "oracle_max_deviation")
    header = ["N", "trial", "status", "solutions", *keys]
    rows = [
        [r["N"], r["trial"], r["status"], r["solutions"]]
        + ["" if r[k] is None else _num(r[k]) for k in keys]
        for r in report["rows"]
    ]
    return dump_csv(header, rows)


# ---------------------------------------------------------------- entry point


def _global_flags(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS if suppress else "json")
    parser.add_argument("--tol", type=float, default=default, help="relative series tolerance")
    parser.add_argument("--max-terms", type=int, default=default, help="series term cap")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0)
    parser.add_argument("--out", default=default, help="write the report here instead of stdout")


def _param_flags(parser):
    parser.add_argument("--equation", choices=("general", "confluent"))
    parser.add_argument("-N", "--N", dest="N", type=int, help="termination order")
    parser.add_argument("--request", help="JSON request file (or a previous solve report)")
    for name in ("a", "alpha", "beta", "gamma", "delta", "epsilon"):
        parser.add_argument(f"--{name}", help="complex value, e.g. 1.5 or 1-2j")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heunterm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"heunterm {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="admissible q values and their finite-sum solutions")
    _global_flags(solve, suppress=True)
    _param_flags(solve)

    ev = sub.add_parser("eval", help="evaluate one solution on a z grid")
    _global_flags(ev, suppress=True)
    _param_flags(ev)
    ev.add_argument("--solution", type=int, default=0, help="index into the sorted q list")
    ev.add_argument("--z", action="append", default=[], help="evaluation point (repeatable)")
    ev.add_argument("--grid", help="start:stop:count")

    ver = sub.add_parser("verify", help="randomized verification sweep")
    _global_flags(ver, suppress=True)
    ver.add_argument("--equation", choices=("general", "confluent"), required=True)
    ver.add_argument("--n-range", default="0:2", help="N or lo:hi (inclusive)")
    ver.add_argument("--trials", type=int, default=10)
    ver.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str) -> int:
    sys.stderr.write(dump_json({"schema": SCHEMA, "error": {"type": kind, "message": message}}))
    return EXIT_INPUT


def _attach_signed_values(argv: list[str]) -> list[str]:
    """Rewrite ``--z -1-2j`` as ``--z=-1-2j`` so argparse does not read the value as a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok.startswith("--") and "=" not in tok:
            nxt = next(it, None)
            if nxt is not None and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="heunterm: %(message)s", stream=sys.stderr)
    parser = make_parser()
    try:
        args = parser.parse_args(_attach_signed_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "solve":
            report, code = cmd_solve(build_request(args))
            text = dump_json(report) if args.format == "json" else solve_csv(report)
        elif args.command == "eval":
            points = [parse_complex(z, "z") for z in args.z]
            if args.grid:
                points += parse_grid(args.grid)
            if not points:
                raise InputError("eval needs --z or --grid")
            report, code = cmd_eval(build_request(args), args.solution, points)
            text = dump_json(report) if args.format == "json" else eval_csv(report)
        else:
            window = _window(args, None)
            report, code = cmd_verify(
                args.equation, parse_n_range(args.n_range), args.trials, args.seed, window, args.jobs
            )
            text = dump_json(report) if args.format == "json" else verify_csv(report)
    except InputError as exc:
        return _error("input", str(exc))
    except HeunTermError as exc:
        return _error(type(exc).__name__, str(exc))
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
