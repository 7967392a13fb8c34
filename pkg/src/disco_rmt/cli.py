"""Command-line entry point: ``disco-rmt <subcommand> [options]``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 failed ``--check`` or built-in assertion.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import experiments as ex
from .limit_moments import BudgetExceeded, moment_table
from .matrix_core import EigenSolverError

log = logging.getLogger("disco_rmt")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ensemble", default="pst", help="pst | wigner | blockcirc:<m> | counterexample")
    common.add_argument("--ensemble-b", default="wigner", help="ensemble for the B blocks")
    common.add_argument("--size", type=int, default=512, help="base order N")
    common.add_argument("--depth", type=_int_list, default=None,
                        help="disco depth d (dsweep: comma-separated list)")
    common.add_argument("--trials", type=int, default=10)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--moments", type=_int_list, default=(2, 4, 6, 8))
    common.add_argument("--bins", type=int, default=None, help="histogram bins (default: Freedman-Diaconis)")
    common.add_argument("--distribution", choices=("gaussian", "rademacher"), default="gaussian")
    common.add_argument("--workers", type=int, default=1, help="threads for concurrent trials")
    common.add_argument("--check", action="store_true",
                        help="exit 3 if a moment misses its exact limit by more than --tol "
                             "(conjecture: if any row is violated)")
    common.add_argument("--tol", type=float, default=None, help="absolute tolerance for --check (default 3 SE)")
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", default=None, help="output path (default: stdout)")
    output.add_argument("--format", choices=("csv", "json"), default="csv")
    output.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="disco-rmt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [
        ("esd", "pooled empirical spectral distribution"),
        ("moments", "empirical moments against exact limits"),
        ("dsweep", "moments across disco depths"),
        ("gaps", "adjacent eigenvalue spacings"),
        ("conjecture", "moment sandwich for D_1(A, B)"),
    ]:
        sub.add_parser(name, parents=[common, output], help=help_)
    cx = sub.add_parser("counterexample", parents=[output], help="exact integer counterexample")
    cx.add_argument("--blocks", type=int, default=10, help="number of 2x2 blocks m")
    lm = sub.add_parser("limit-moments", parents=[output], help="exact limiting moment table")
    lm.add_argument("--depth", type=int, default=1)
    lm.add_argument("--moments", type=_int_list, default=(2, 4, 6, 8))
    return parser


def _config(args) -> ex.ExperimentConfig:
    kwargs = dict(
        experiment=args.command, ensemble=args.ensemble, ensemble_b=args.ensemble_b,
        size=args.size, trials=args.trials, moments=args.moments, bins=args.bins,
        seed=args.seed, distribution=args.distribution, workers=args.workers,
    )
    if args.depth is not None:
        if args.command == "dsweep":
            kwargs["depths"] = args.depth
        elif len(args.depth) != 1:
            raise ex.ConfigError("--depth takes a single value here")
        else:
            kwargs["depth"] = args.depth[0]
    return ex.ExperimentConfig(**kwargs)


def _emit(texts: dict[str, str], out, fmt: str, result=None) -> None:
    if out is None:
        sys.stdout.write(texts[""])
    elif result is not None:
        for path in ex.write_artifacts(result, out, fmt):
            log.info("wrote %s", path)
    else:
        with open(out, "w") as fh:
            fh.write(texts[""])


def _limit_moments(args) -> int:
    tables = [moment_table(s, args.moments, args.depth) for s in ("semicircle", "disco", "gaussian")]
    if args.format == "json":
        text = json.dumps({"depth": args.depth, "tables": [t.to_dict() for t in tables]}, indent=2) + "\n"
    else:
        lines = ["series,two_k,exact_num,exact_den,float"]
        for t in tables:
            lines += [",".join([t.name] + [str(c) for c in row]) for row in t.csv_rows()]
        text = "\n".join(lines) + "\n"
    _emit({"": text}, args.out, args.format)
    if args.out is not None:
        print(f"{'2k':>4} {'semicircle':>12} {'D_' + str(args.depth):>14} {'gaussian':>10}")
        for s, d, g in zip(*(t.rows for t in tables)):
            print(f"{s.two_k:>4} {str(s.value):>12} {str(d.value):>14} {str(g.value):>10}")
    return EXIT_OK


def _check(result, args) -> bool:
    if isinstance(result, ex.ConjectureResult):
        bad = [r for r in result.rows if r.verdict == "violated"]
        for r in bad:
            log.error("sandwich violated at k=%d", r.k)
        return not bad
    ok = True
    for r in getattr(result, "estimates", []):
        if r.exact_limit is None:
            continue
        tol = args.tol if args.tol is not None else 3 * r.std_error
        if math.isnan(tol) or r.abs_dev > tol:
            log.error("moment %d (depth %s): |%.6g - %.6g| > %.3g", r.order, r.depth,
                      r.estimate, r.exact_limit, tol)
            ok = False
    return ok


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "limit-moments":
            return _limit_moments(args)
        if args.command == "counterexample":
            result = ex.run_counterexample(args.blocks)
            for q in result.mismatches():
                log.warning("%s = %d differs from printed %d", q, getattr(result, q), result.printed[q])
        else:
            result = ex.run(_config(args))
        _emit(ex.render(result, args.format), args.out, args.format, result)
        if getattr(args, "check", False) and not _check(result, args):
            return EXIT_CHECK
        return EXIT_OK
    except ex.CheckFailed as exc:
        log.error("%s", exc)
        return EXIT_CHECK
    except (EigenSolverError, FloatingPointError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except (ex.ConfigError, BudgetExceeded, ValueError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
