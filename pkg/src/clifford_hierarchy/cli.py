"""Command-line front end (``chl``).

Every invocation prints structured records: one JSON object per line with
``--format json``, a header plus rows with ``--format csv``, or short
human-readable lines with ``--format text``.

Exit codes: 0 success, 1 a verification pin failed, 2 usage or parse error,
3 a resource cap was hit.
"""
import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, _config, depth
from .exceptions import HierarchyError, ParseError, ResourceCapError, SchemeInapplicableError
from .expr import parse_gate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


def _jsonable(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v


class Emitter:
    """Buffers each record and writes it in one call so records never interleave."""

    def __init__(self, fmt, stream, command, seed, timing):
        self.fmt = fmt
        self.stream = stream
        self.command = command
        self.seed = seed
        self.timing = timing
        self.start = time.perf_counter()
        self._csv_header = None

    def settings(self, args):
        return {
            "tol": args.tol if args.tol is not None else _config.TOL,
            "kmax": getattr(args, "kmax", None) or _config.KMAX,
            "grid": _config.GRID,
            "env": {name: os.environ.get(name) for name in ("CHL_TOL", "CHL_KMAX")},
        }

    def record(self, args, gate, result, text):
        rec = {
            "command": self.command,
            "gate": gate,
            "result": _jsonable(result),
            "version": __version__,
            "seed": self.seed,
            "settings": self.settings(args),
        }
        if self.timing:
            rec["wall_time"] = round(time.perf_counter() - self.start, 6)
        if self.fmt == "json":
            self.stream.write(json.dumps(rec) + "\n")
        elif self.fmt == "text":
            self.stream.write(text + "\n")
        else:
            self.rows([_flatten(rec)])
        self.stream.flush()

    def rows(self, rows):
        buf = io.StringIO()
        header = list(rows[0].keys())
        w = csv.writer(buf, lineterminator="\n")
        if header != self._csv_header:
            w.writerow(header)
            self._csv_header = header
        for r in rows:
            w.writerow([r.get(h) for h in header])
        self.stream.write(buf.getvalue())
        self.stream.flush()


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def _gate(args):
    return parse_gate(args.gate)


# -- subcommands -----------------------------------------------------------------------


def cmd_level(args, em):
    from .hierarchy import hierarchy_level

    lv = hierarchy_level(_gate(args), args.kmax, args.tol)
    em.record(args, args.gate, lv.to_dict(), f"{args.gate}: level {lv}")
    return EXIT_OK


def _semi_result(u, tol):
    from .hierarchy import is_generalized_semi_clifford, is_semi_clifford

    w = is_semi_clifford(u, tol)
    g = is_generalized_semi_clifford(u, tol)
    return w, g


def cmd_semi(args, em):
    w, g = _semi_result(_gate(args), args.tol)
    res = {
        "semi_clifford": w is not None,
        "witness": w.to_dict() if w else None,
        "generalized": g is not None,
        "generalized_witness": g.to_dict() if g else None,
    }
    head = "semi-Clifford" if w else "not semi-Clifford"
    text = f"{args.gate}: {head}; generalized: {'yes' if g else 'no'}"
    em.record(args, args.gate, res, text)
    return EXIT_OK


def cmd_gsemi(args, em):
    from .hierarchy import is_generalized_semi_clifford

    g = is_generalized_semi_clifford(_gate(args), args.tol)
    res = {"generalized": g is not None, "witness": g.to_dict() if g else None}
    em.record(args, args.gate, res, f"{args.gate}: generalized semi-Clifford: {'yes' if g else 'no'}")
    return EXIT_OK


def cmd_diag(args, em):
    from .hierarchy import diagonal_level, diagonal_phase_profile

    u = _gate(args)
    prof = diagonal_phase_profile(u, args.k, args.tol)
    member = diagonal_level(u, args.k, args.tol)
    res = {
        "k": args.k,
        "exponents": list(prof.exponents),
        "max_residual": prof.max_residual,
        "on_grid": prof.on_grid(args.tol),
        "in_level": member,
    }
    text = f"{args.gate}: exponents {list(prof.exponents)} mod {1 << args.k}; in C_{args.k}: {'yes' if member else 'no'}"
    em.record(args, args.gate, res, text)
    return EXIT_OK


def cmd_depth(args, em):
    scheme = depth.TeleportScheme.parse(args.scheme)
    rep = depth.depth_report(
        _gate(args), name=args.gate, scheme=scheme, trials=args.trials, seed=args.seed,
        state_cap=args.state_cap, k_max=args.kmax, tol=args.tol,
    )
    d = rep.to_dict()
    val = d["exact_expectation"]
    shown = d.get("exact_fraction", val)
    text = f"{args.gate} ({args.scheme}-bit): exact {shown}"
    if isinstance(val, float):
        text += f" = {val:.6g}"
    if rep.trials:
        text += f"; monte carlo {rep.mc_mean:.6g} +/- {rep.mc_stderr:.3g}"
    em.record(args, args.gate, d, text)
    return EXIT_OK


def cmd_qft(args, em):
    b = depth.qft_depth_bound(args.n)
    if em.fmt == "csv":
        rows = [{"j": j, "t1": float(v)} for j, v in b["blocks"]]
        rows.append({"j": "total", "t1": float(b["total"])})
        rows.append({"j": "reference", "t1": float(b["reference"])})
        em.rows(rows)
        return EXIT_OK
    res = {
        "n": args.n,
        "blocks": [{"j": j, "t1": float(v)} for j, v in b["blocks"]],
        "total": float(b["total"]),
        "reference": float(b["reference"]),
    }
    em.record(args, f"qft({args.n})", res, f"qft({args.n}): bound {float(b['total']):.6g}, reference {b['reference']}")
    return EXIT_OK


def cmd_curve(args, em):
    fn = depth.t1_closed_form if args.scheme == "one" else depth.t2_closed_form
    ks = range(args.kmin, args.kmax_curve + 1)
    rows = [{"n": args.n, "k": k, "bound": float(fn(args.n, k))} for k in ks]
    if em.fmt == "csv":
        em.rows(rows)
        return EXIT_OK
    text = "\n".join(f"n={r['n']} k={r['k']}: {r['bound']:.6g}" for r in rows)
    em.record(args, None, {"scheme": args.scheme, "rows": rows}, text)
    return EXIT_OK


def cmd_scan(args, em):
    from .hierarchy import enumerate_diagonal_c3

    rep = enumerate_diagonal_c3()
    text = f"scanned {rep.scanned}; accepted {rep.accepted}; generated {rep.generated}; equal: {rep.sets_equal}"
    em.record(args, None, rep.to_dict(), text)
    return EXIT_OK if rep.sets_equal and rep.grid_ok else EXIT_FAIL


def cmd_verify(args, em):
    from .verify import run_suite

    only = set(args.only) if args.only else None
    failed = 0
    counts = {"pass": 0, "fail": 0, "skipped": 0}
    for check in run_suite(args.suite, only):
        counts[check.status] += 1
        failed += check.status == "fail"
        text = f"[{check.status.upper()}] criterion {check.criterion}: {check.name}"
        em.record(args, None, check.to_dict(), text)
    em.record(args, None, {"suite": args.suite, "summary": counts},
              f"{counts['pass']} passed, {counts['fail']} failed, {counts['skipped']} skipped")
    return EXIT_FAIL if failed else EXIT_OK


# -- parser ------------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--tol", type=float, default=None, help="comparison tolerance (default CHL_TOL or 1e-9)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="include wall time in records")

    p = argparse.ArgumentParser(prog="chl", description="Clifford hierarchy toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def gate_cmd(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("gate", help="gate expression, e.g. 'w_k(4)' or 'compose(h, t)'")
        sp.set_defaults(func=fn)
        return sp

    sp = gate_cmd("level", cmd_level, "hierarchy level of a gate")
    sp.add_argument("--kmax", type=int, default=None)
    gate_cmd("semi", cmd_semi, "semi-Clifford and generalized semi-Clifford tests")
    gate_cmd("gsemi", cmd_gsemi, "generalized semi-Clifford test")
    sp = gate_cmd("diag", cmd_diag, "phase profile of a diagonal gate")
    sp.add_argument("--k", type=int, default=3)
    sp = gate_cmd("depth", cmd_depth, "teleportation depth report")
    sp.add_argument("--scheme", choices=("one", "two"), required=True)
    sp.add_argument("--trials", type=int, default=0)
    sp.add_argument("--state-cap", type=int, default=20000)
    sp.add_argument("--kmax", type=int, default=None)

    sp = sub.add_parser("qft", parents=[common], help="Fourier-transform depth bound")
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_qft)

    sp = sub.add_parser("curve", parents=[common], help="closed-form bound as a function of k")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--scheme", choices=("one", "two"), default="one")
    sp.add_argument("--kmin", type=int, default=3)
    sp.add_argument("--kmax", dest="kmax_curve", type=int, default=12)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("scan-diagonal-c3", parents=[common], help="exhaustive diagonal C_3 scan (n=3)")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", parents=[common], help="run the reproduction checks")
    sp.add_argument("--suite", choices=("fast", "full"), default="fast")
    sp.add_argument("--only", type=int, nargs="*", help="restrict to these criterion numbers")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None, stream=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    stream = sys.stdout if stream is None else stream
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    em = Emitter(args.format, stream, "chl " + " ".join(argv), args.seed, args.timing)
    try:
        return args.func(args, em)
    except ParseError as err:
        sys.stderr.write(f"chl: parse error: {err}\n")
        return EXIT_USAGE
    except ResourceCapError as err:
        sys.stderr.write(f"chl: resource cap: {err} (partial size {err.partial_size})\n")
        return EXIT_CAP
    except (SchemeInapplicableError, HierarchyError) as err:
        sys.stderr.write(f"chl: {err}\n")
        return EXIT_USAGE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
