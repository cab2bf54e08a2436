"""Command-line front end: ``doubleseq <command> [flags]``.

Exit codes: 0 verified/pass, 1 violated/fail, 2 undetermined/inconclusive,
64 usage error (bad flags, unknown gallery names, invalid parameters).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import campaigns
from .functions import FUNCTIONS, function, test_uniform_continuity
from .functions import apply as apply_function
from .oscillation import OscillationParams, check_slowly_oscillating, find_witness
from .sequences import (
    GALLERY,
    DivergenceParams,
    DomainError,
    FactorableGridSequence,
    builtin,
    check_bounded,
    check_cauchy,
    check_definitely_divergent,
    check_pringsheim,
    estimate_pringsheim_limit,
)
from .subsequences import (
    SubsequenceSelector,
    build_double_subsequence,
    matrix_to_csv,
    matrix_to_json,
    spiral_index,
    spiral_position,
)

EXIT_OK, EXIT_FAIL, EXIT_UNDECIDED, EXIT_USAGE = 0, 1, 2, 64

EXIT_CODES = {
    "verified": EXIT_OK, "pass": EXIT_OK, "no-violation-found": EXIT_OK,
    "violated": EXIT_FAIL, "fail": EXIT_FAIL, "divergent": EXIT_FAIL, "violation-found": EXIT_FAIL,
    "undetermined": EXIT_UNDECIDED, "inconclusive": EXIT_UNDECIDED, "no-witness": EXIT_UNDECIDED,
    "refused": EXIT_UNDECIDED,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--seq", help=f"gallery sequence ({', '.join(GALLERY)})")
    p.add_argument("--fn", help=f"gallery function ({', '.join(FUNCTIONS)})")
    p.add_argument("--eps", type=float, help="epsilon (tolerance for `limit`)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--n", type=int, help="threshold N")
    p.add_argument("--horizon", type=int, help="window horizon H")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="write the report here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="doubleseq", description="Window checks for double sequences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("check-so", parents=[common],
                   help="slow oscillation: check one witness, or search for one if --alpha/--delta/--n are missing")
    sub.add_parser("check-cauchy", parents=[common], help="Cauchy condition on a window")
    p = sub.add_parser("check-pringsheim", parents=[common], help="P-convergence to a given limit")
    p.add_argument("--limit", help="scalar limit, or 'x,y' for grids (default: the grid's own limit)")
    p = sub.add_parser("check-bounded", parents=[common], help="|x[k,l]| < M on the window")
    p.add_argument("--bound", type=float, required=True)
    p = sub.add_parser("check-divergent", parents=[common], help="|x[k,l]| > M past (n, n)")
    p.add_argument("--bound", type=float, required=True)
    sub.add_parser("limit", parents=[common], help="estimate a P-limit with tolerance --eps up to --horizon")
    p = sub.add_parser("spiral", parents=[common], help="spiral position of --j, or index of --row/--col")
    p.add_argument("--j", type=int)
    p.add_argument("--row", type=int)
    p.add_argument("--col", type=int)
    p = sub.add_parser("subseq", parents=[common], help="double subsequence laid out on the spiral")
    p.add_argument("--count", type=int, default=9)
    p.add_argument("--rows", default="identity", help="n_j: identity, pow2, square, or a comma list")
    p.add_argument("--cols", default="identity", help="k_j: identity, pow2, square, or a comma list")
    p = sub.add_parser("apply", parents=[common], help="values of f applied to a grid sequence")
    p.add_argument("--size", type=int, default=8, help="emit the first size x size block")
    p = sub.add_parser("uc-test", parents=[common], help="sampled search for uniform-continuity violations")
    p.add_argument("--budget", type=int, default=20000)
    p = sub.add_parser("campaign", parents=[common], help="run a verification campaign")
    p.add_argument("theorem", choices=campaigns.THEOREMS)
    return parser


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


_SELECTORS = {
    "identity": lambda j: j,
    "pow2": lambda j: 2 ** j,
    "square": lambda j: j * j,
}


def _selector(raw: str):
    if raw in _SELECTORS:
        return _SELECTORS[raw]
    try:
        return [int(v) for v in raw.split(",")]
    except ValueError:
        raise UsageError(f"bad selector {raw!r}") from None


def _flat_csv(d: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    for key, val in d.items():
        w.writerow([key, json.dumps(val) if isinstance(val, (dict, list)) else val])
    return buf.getvalue()


def _emit(args, payload: dict, csv_text: str | None = None) -> None:
    text = (csv_text or _flat_csv(payload)) if args.out == "csv" else json.dumps(payload, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_check_so(args):
    _need(args, "seq", "eps", "horizon")
    seq = builtin(args.seq)
    given = [args.alpha, args.delta, args.n]
    if all(v is not None for v in given):
        cert = check_slowly_oscillating(seq, OscillationParams(args.eps, args.alpha, args.delta, args.n, args.horizon))
    elif any(v is not None for v in given):
        raise UsageError("give all of --alpha, --delta, --n or none of them")
    else:
        cert = find_witness(seq, args.eps, args.horizon)
        if cert is None:
            _emit(args, {"status": "no-witness", "sequence": seq.label, "epsilon": args.eps,
                         "horizon": args.horizon})
            return "no-witness"
    _emit(args, {"sequence": seq.label, **cert.to_dict()})
    return cert.status


def _report(args, rep, **extra):
    _emit(args, {**extra, **rep.to_dict()})
    return rep.status


def _cmd_check_cauchy(args):
    _need(args, "seq", "eps", "n", "horizon")
    seq = builtin(args.seq)
    return _report(args, check_cauchy(seq, args.eps, args.n, args.horizon), sequence=seq.label)


def _cmd_check_pringsheim(args):
    _need(args, "seq", "eps", "n", "horizon")
    seq = builtin(args.seq)
    if args.limit is not None:
        try:
            parts = [float(v) for v in args.limit.split(",")]
        except ValueError:
            raise UsageError(f"bad limit {args.limit!r}") from None
        limit = tuple(parts) if len(parts) == 2 else parts[0]
    elif isinstance(seq, FactorableGridSequence) and seq.limit is not None:
        limit = seq.limit
    else:
        raise UsageError("check-pringsheim needs --limit")
    return _report(args, check_pringsheim(seq, limit, args.eps, args.n, args.horizon), sequence=seq.label)


def _cmd_check_bounded(args):
    _need(args, "seq", "horizon")
    seq = builtin(args.seq)
    return _report(args, check_bounded(seq, args.bound, args.horizon), sequence=seq.label)


def _cmd_check_divergent(args):
    _need(args, "seq", "n", "horizon")
    seq = builtin(args.seq)
    rep = check_definitely_divergent(seq, DivergenceParams(args.bound, args.n, args.n, args.horizon))
    return _report(args, rep, sequence=seq.label)


def _cmd_limit(args):
    _need(args, "seq", "eps", "horizon")
    seq = builtin(args.seq)
    return _report(args, estimate_pringsheim_limit(seq, args.eps, args.horizon), sequence=seq.label)


def _cmd_spiral(args):
    if args.j is not None:
        r, c = spiral_position(args.j)
        payload = {"j": args.j, "row": r, "col": c}
        text = f"({r},{c})"
    elif args.row is not None and args.col is not None:
        j = spiral_index(args.row, args.col)
        payload = {"j": j, "row": args.row, "col": args.col}
        text = str(j)
    else:
        raise UsageError("spiral needs --j or both --row and --col")
    if args.out == "csv" or args.output:
        _emit(args, payload)
    else:
        print(text)
    return "verified"


def _cmd_subseq(args):
    _need(args, "seq")
    seq = builtin(args.seq)
    if isinstance(seq, FactorableGridSequence):
        raise UsageError("subseq works on scalar sequences")
    M = build_double_subsequence(seq, SubsequenceSelector(_selector(args.rows), _selector(args.cols)), args.count)
    _emit(args, {"sequence": seq.label, "count": args.count, "matrix": json.loads(matrix_to_json(M))},
          matrix_to_csv(M))
    return "verified"


def _cmd_apply(args):
    _need(args, "seq", "fn")
    grid = builtin(args.seq)
    if not isinstance(grid, FactorableGridSequence):
        raise UsageError("apply needs a grid sequence (recip_grid, log_grid)")
    f = function(args.fn)
    idx = np.arange(1, args.size + 1)
    M = np.ma.MaskedArray(apply_function(f, grid).values(idx[:, None], idx[None, :]))
    _emit(args, {"sequence": grid.label, "function": f.label, "matrix": json.loads(matrix_to_json(M))},
          matrix_to_csv(M))
    return "verified"


def _cmd_uc_test(args):
    _need(args, "fn", "eps")
    f = function(args.fn)
    v = test_uniform_continuity(f, args.eps, args.budget, args.seed)
    _emit(args, {"function": f.label, **v.to_dict()})
    return v.status


def _cmd_campaign(args):
    rep = campaigns.default_campaign(args.theorem, fn=args.fn, seq=args.seq, epsilon=args.eps,
                                     horizon=args.horizon, threshold=args.n, seed=args.seed)
    _emit(args, rep.to_dict())
    return rep.status


COMMANDS = {
    "check-so": _cmd_check_so,
    "check-cauchy": _cmd_check_cauchy,
    "check-pringsheim": _cmd_check_pringsheim,
    "check-bounded": _cmd_check_bounded,
    "check-divergent": _cmd_check_divergent,
    "limit": _cmd_limit,
    "spiral": _cmd_spiral,
    "subseq": _cmd_subseq,
    "apply": _cmd_apply,
    "uc-test": _cmd_uc_test,
    "campaign": _cmd_campaign,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"doubleseq: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"doubleseq: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"doubleseq: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"doubleseq: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_CODES[status]


if __name__ == "__main__":
    sys.exit(main())
