"""Command line interface: ``permpack <verb> [flags]``.

Exit status: 0 on success, 1 on usage or input errors, 2 when ``verify``
finds a counterexample.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from .core import (
    DEFAULT_MAX_EXHAUSTIVE_N,
    BlockFormatError,
    ExhaustiveBoundError,
    NotLayeredError,
    PatternSpec,
    PermutationError,
    build_from_blocks,
    compositions,
    count_occurrences,
    count_occurrences_layered,
    enumerate_all,
    parse_blocks,
    parse_permutation,
)
from .formulas import density_2beta, density_alpha_alpha
from .search import default_workers, g_k, galvin_ratios, max_over_all, max_over_layered
from .verify import LEMMAS, run_lemma

EXIT_OK, EXIT_USAGE, EXIT_COUNTEREXAMPLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("human", "json", "csv"), default=None)
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes for exhaustive searches (default: CPU count, capped at 8)")
    p.add_argument("--max-exhaustive-n", type=int, default=DEFAULT_MAX_EXHAUSTIVE_N,
                   help="largest n for which all of S_n may be enumerated")
    return p


def _pattern_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pattern", help='explicit pattern, e.g. "1 2 4 3" or "1243"')
    p.add_argument("--family", choices=("aa", "2b", "ab"),
                   help="pattern family: aa = layers (1^a, a); 2b = (1, 1, b); ab = (1^a, b)")
    p.add_argument("--alpha", type=int)
    p.add_argument("--beta", type=int)


def build_parser() -> argparse.ArgumentParser:
    shared = _shared()
    parser = _Parser(prog="permpack", description="Exact packing of layered permutation patterns.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("count", parents=[shared], help="count occurrences of a pattern")
    _pattern_flags(p)
    p.add_argument("--sigma", help="the permutation to search in")
    p.add_argument("--sigma-blocks", help='the permutation as blocks, e.g. "A4,L4"')

    p = sub.add_parser("maximize", parents=[shared], help="maximize occurrences over S_n")
    _pattern_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restrict", choices=("all", "layered"), default="all")
    p.add_argument("--witness-cap", type=int, default=10)

    p = sub.add_parser("gk", parents=[shared], help="maximize tau_2,beta over A1 L1 ... Lk")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("density", parents=[shared], help="closed-form packing density")
    p.add_argument("--family", choices=("aa", "2b"), required=True)
    p.add_argument("--alpha", type=int)
    p.add_argument("--beta", type=int)
    p.add_argument("--converge-to", type=int, default=None,
                   help="also emit the formula-mode ratio table up to this n")
    p.add_argument("--digits", type=int, default=12)

    p = sub.add_parser("ratios", parents=[shared], help="Galvin ratio table")
    _pattern_flags(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "layered", "formula"), default="exhaustive")

    p = sub.add_parser("verify", parents=[shared], help="exhaustive lemma checks")
    p.add_argument("--lemma", choices=LEMMAS, required=True)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--beta", type=int, default=3)
    p.add_argument("--pattern", help="pattern for --lemma galvin (default tau_2,beta)")

    p = sub.add_parser("enumerate", parents=[shared], help="list permutations of size n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--layered", action="store_true")
    return parser


def _resolve_pattern(args) -> PatternSpec:
    family = getattr(args, "family", None)
    if args.pattern and family:
        raise UsageError("give either --pattern or --family, not both")
    if args.pattern:
        return PatternSpec.explicit(parse_permutation(args.pattern))
    if family == "aa":
        if args.alpha is None:
            raise UsageError("--family aa needs --alpha")
        return PatternSpec.tau_alpha_alpha(args.alpha)
    if family == "2b":
        if args.beta is None:
            raise UsageError("--family 2b needs --beta")
        return PatternSpec.tau_2_beta(args.beta)
    if family == "ab":
        if args.alpha is None or args.beta is None:
            raise UsageError("--family ab needs --alpha and --beta")
        return PatternSpec.tau_a_b(args.alpha, args.beta)
    raise UsageError("a pattern is required: --pattern or --family")


def _csv(rows: list[dict], columns: Sequence[str] | None = None) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    cols = list(columns) if columns else list(rows[0])
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in cols})
    return buf.getvalue()


def _search_human(res) -> str:
    lines = [
        f"pattern: {res.pattern.perm} ({res.pattern.name})",
        f"n: {res.n}",
        f"restriction: {res.restriction}",
        f"max_count: {res.max_count}",
        f"space_size: {res.space_size}",
        f"witnesses (lexicographically least, cap {res.witness_cap}):",
    ]
    for w, b in zip(res.witnesses, res.witness_blocks()):
        lines.append(f"  {w}" + (f"    [{b}]" if b else ""))
    for key, val in res.metadata.items():
        lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


def _table_human(table) -> str:
    lines = [f"pattern: {table.pattern.perm} ({table.pattern.name})  mode: {table.mode}",
             "n\tcount\tbinom\tratio\tfloat"]
    for r in table.records():
        lines.append(f"{r['n']}\t{r['count']}\t{r['binom']}\t"
                     f"{r['ratio_num']}/{r['ratio_den']}\t{r['ratio_float']}")
    for f in table.failures:
        lines.append(f"FAILURE: ratio increased from n={f['n_prev']} to n={f['n']}")
    if not table.failures:
        lines.append("nonincreasing: yes")
    return "\n".join(lines) + "\n"


def _cmd_count(args, fmt):
    spec = _resolve_pattern(args)
    if bool(args.sigma) == bool(args.sigma_blocks):
        raise UsageError("give exactly one of --sigma or --sigma-blocks")
    if args.sigma_blocks:
        blocks = parse_blocks(args.sigma_blocks)
        sigma = build_from_blocks(blocks)
        if spec.layers is not None:
            value = count_occurrences_layered(spec.layers, blocks.layer_sizes())
        else:
            value = count_occurrences(spec.perm, sigma)
    else:
        sigma = parse_permutation(args.sigma)
        value = count_occurrences(spec.perm, sigma)
    rec = {"pattern": str(spec.perm), "sigma": str(sigma), "count": value}
    if fmt == "json":
        return json.dumps(rec) + "\n", EXIT_OK
    if fmt == "csv":
        return _csv([rec]), EXIT_OK
    return f"{value}\n", EXIT_OK


def _emit_search(res, fmt):
    if fmt == "json":
        return json.dumps(res.to_json()) + "\n"
    if fmt == "csv":
        return res.to_csv()
    return _search_human(res)


def _cmd_maximize(args, fmt):
    spec = _resolve_pattern(args)
    if args.restrict == "all":
        res = max_over_all(spec, args.n, max_n=args.max_exhaustive_n,
                           witness_cap=args.witness_cap, workers=args.workers)
    else:
        res = max_over_layered(spec, args.n, witness_cap=args.witness_cap, workers=args.workers)
    return _emit_search(res, fmt), EXIT_OK


def _cmd_gk(args, fmt):
    res = g_k(PatternSpec.tau_2_beta(args.beta), args.n, args.k)
    return _emit_search(res, fmt), EXIT_OK


def _cmd_density(args, fmt):
    if args.family == "aa":
        if args.alpha is None:
            raise UsageError("--family aa needs --alpha")
        report = density_alpha_alpha(args.alpha, digits=args.digits)
        if args.converge_to is not None:
            report.convergence = galvin_ratios(PatternSpec.tau_alpha_alpha(args.alpha),
                                               args.converge_to, "formula")
    else:
        if args.beta is None:
            raise UsageError("--family 2b needs --beta")
        report = density_2beta(args.beta, converge_to=args.converge_to, digits=args.digits)
    if fmt == "json":
        return json.dumps(report.to_json()) + "\n", EXIT_OK
    if fmt == "csv":
        rec = {k: v for k, v in report.to_json().items() if k != "convergence"}
        text = _csv([rec])
        if report.convergence is not None:
            text += "\n" + report.convergence.to_csv()
        return text, EXIT_OK
    lines = [
        f"family: {report.family} (parameter {report.parameter})",
        f"density: {report.numerator}/{report.denominator} = {report.float_density}",
    ]
    if report.xi is not None:
        lines.append(f"xi: {report.xi.numerator}/{report.xi.denominator}")
    text = "\n".join(lines) + "\n"
    if report.convergence is not None:
        text += _table_human(report.convergence)
    return text, EXIT_OK


def _cmd_ratios(args, fmt):
    spec = _resolve_pattern(args)
    table = galvin_ratios(spec, args.n_max, args.mode,
                          max_n=args.max_exhaustive_n if args.mode == "exhaustive" else None,
                          workers=args.workers)
    if fmt == "json":
        return json.dumps(table.to_json()) + "\n", EXIT_OK
    if fmt == "csv":
        return table.to_csv(), EXIT_OK
    return _table_human(table), EXIT_OK


def _cmd_verify(args, fmt):
    pattern = PatternSpec.explicit(parse_permutation(args.pattern)) if args.pattern else None
    records = list(run_lemma(args.lemma, args.n_max, args.beta, pattern=pattern,
                             max_n=args.max_exhaustive_n, workers=args.workers))
    failures = [r for r in records if not r["ok"]]
    summary = f"verify {args.lemma}: {len(records)} cases, {len(failures)} failures"
    if fmt == "csv":
        text = _csv(records)
    elif fmt == "human":
        text = "".join(f"FAILURE {json.dumps(r)}\n" for r in failures) + summary + "\n"
    else:
        text = "".join(json.dumps(r) + "\n" for r in records)
    if fmt != "human":
        print(summary, file=args.stderr)
    return text, EXIT_COUNTEREXAMPLE if failures else EXIT_OK


def _cmd_enumerate(args, fmt):
    if args.layered:
        items = []
        for comp in compositions(args.n):
            perm = build_from_blocks(comp)
            items.append({"blocks": str(perm.blocks()), "permutation": str(perm)})
    else:
        items = [{"permutation": str(p)} for p in enumerate_all(args.n, max_n=args.max_exhaustive_n)]
    if fmt == "json":
        return json.dumps(items) + "\n", EXIT_OK
    if fmt == "csv":
        return _csv(items), EXIT_OK
    if args.layered:
        return "".join(f"{it['blocks']}\t{it['permutation']}\n" for it in items), EXIT_OK
    return "".join(it["permutation"] + "\n" for it in items), EXIT_OK


COMMANDS = {
    "count": _cmd_count,
    "maximize": _cmd_maximize,
    "gk": _cmd_gk,
    "density": _cmd_density,
    "ratios": _cmd_ratios,
    "verify": _cmd_verify,
    "enumerate": _cmd_enumerate,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the verb, write the report; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
        if args.workers is None:
            args.workers = default_workers()
        elif args.workers < 1:
            raise UsageError("--workers must be >= 1")
        fmt = args.format or ("json" if args.verb == "verify" else "human")
        args.stderr = stderr
        text, status = COMMANDS[args.verb](args, fmt)
    except UsageError as err:
        print(f"usage error: {err}", file=stderr)
        return EXIT_USAGE
    except (PermutationError, BlockFormatError, ExhaustiveBoundError, NotLayeredError, ValueError) as err:
        print(f"error: {err}", file=stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
