"""Exhaustive verification sweeps.

Each sweep yields flat dict records carrying an ``ok`` flag; a record with
``ok`` False is a counterexample.
"""
from __future__ import annotations

from typing import Iterator

from .core import (
    DEFAULT_MAX_EXHAUSTIVE_N,
    PatternSpec,
    build_from_blocks,
    compositions,
    parse_blocks,
)
from .formulas import binom_inequality_check
from .search import galvin_ratios, max_over_all, max_over_layered
from .transforms import (
    FormulaMismatchError,
    RewriteOutcome,
    absorb_isolated_points,
    from_normal_form,
    merge_A1L1,
    move_point_A1_to_Lk,
    normal_form,
    push_antilayers_left,
    sort_layers,
)

LEMMAS = ("tech", "isolated", "push", "sort", "move", "merge", "restriction", "galvin")

DEFAULT_N_MAX = {
    "tech": 30, "isolated": 12, "push": 12, "sort": 12,
    "move": 18, "merge": 18, "restriction": 8, "galvin": 9,
}


def partitions_ascending(total: int, smallest: int = 2) -> Iterator[tuple[int, ...]]:
    """Nondecreasing tuples of parts >= ``smallest`` summing to ``total``."""
    if total == 0:
        yield ()
        return
    for first in range(smallest, total + 1):
        for rest in partitions_ascending(total - first, first):
            yield (first,) + rest


def layer_compositions(total: int, smallest: int = 2) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of parts >= ``smallest`` summing to ``total``."""
    if total == 0:
        yield ()
        return
    for first in range(smallest, total + 1):
        for rest in layer_compositions(total - first, smallest):
            yield (first,) + rest


def sorted_normal_forms(n_max: int, n_min: int = 1) -> Iterator[tuple[int, tuple[int, ...]]]:
    """All (|A₁|, sorted layers) with total size in [n_min, n_max]."""
    for n in range(n_min, n_max + 1):
        for a in range(0, n + 1):
            for layers in partitions_ascending(n - a):
                yield a, layers


def normal_forms(n_max: int, n_min: int = 1) -> Iterator[tuple[int, tuple[int, ...]]]:
    """All (|A₁|, layers) with layers in any order."""
    for n in range(n_min, n_max + 1):
        for a in range(0, n + 1):
            for layers in layer_compositions(n - a):
                yield a, layers


def move_cases(n_max: int) -> Iterator[tuple[int, tuple[int, ...]]]:
    for a, layers in sorted_normal_forms(n_max):
        if a >= 2 and layers:
            yield a, layers


def merge_cases(n_max: int) -> Iterator[tuple[int, tuple[int, ...]]]:
    for a, layers in sorted_normal_forms(n_max):
        if len(layers) >= 2 and layers[-1] >= a:
            yield a, layers


def _record(lemma: str, beta: int, outcome: RewriteOutcome, ok: bool, **extra) -> dict:
    rec = {"lemma": lemma, "beta": beta}
    rec.update(outcome.to_record())
    rec.update(extra)
    rec["ok"] = ok
    return rec


def _mismatch(lemma: str, beta: int, blocks, err: Exception) -> dict:
    return {
        "lemma": lemma, "beta": beta, "before": str(blocks), "after": None,
        "count_before": None, "count_after": None, "formula_delta": None,
        "hypothesis_satisfied": None, "error": str(err), "ok": False,
    }


def verify_tech(n_max: int = 30) -> Iterator[dict]:
    for n in range(1, n_max + 1):
        for m in range(1, n + 1):
            for l in range(1, m + 1):
                for k in range(0, l):
                    c = binom_inequality_check(k, l, m, n)
                    yield {"lemma": "tech", "k": k, "l": l, "m": m, "n": n,
                           "lhs": c.lhs, "rhs": c.rhs, "ok": c.holds}


def _monotone_sweep(lemma, op, cases, beta) -> Iterator[dict]:
    for sizes in cases:
        out = op(sizes, beta)
        again = op(out.after, beta)
        idempotent = again.after.layer_sizes() == out.after.layer_sizes()
        yield _record(lemma, beta, out, out.count_after >= out.count_before and idempotent,
                      idempotent=idempotent)


def _all_compositions(n_max: int):
    for n in range(1, n_max + 1):
        yield from compositions(n)


def verify_isolated(n_max: int = 12, beta: int = 3) -> Iterator[dict]:
    yield from _monotone_sweep("isolated", absorb_isolated_points, _all_compositions(n_max), beta)


def verify_push(n_max: int = 12, beta: int = 3) -> Iterator[dict]:
    for rec in _monotone_sweep("push", push_antilayers_left, _all_compositions(n_max), beta):
        rec["ok"] = rec["ok"] and normal_form(parse_blocks(rec["after"])) is not None
        yield rec


def verify_sort(n_max: int = 12, beta: int = 3) -> Iterator[dict]:
    cases = ((1,) * a + layers for a, layers in normal_forms(n_max))
    yield from _monotone_sweep("sort", sort_layers, cases, beta)


def verify_move(n_max: int = 18, beta: int = 3) -> Iterator[dict]:
    for a, layers in move_cases(n_max):
        b = from_normal_form(a, layers)
        try:
            out = move_point_A1_to_Lk(b, beta)
        except FormulaMismatchError as err:
            yield _mismatch("move", beta, b, err)
            continue
        strict_needed = out.hypothesis_satisfied
        ok = (not strict_needed) or out.delta > 0
        yield _record("move", beta, out, ok, loss=out.details["loss"], gain=out.details["gain"])


def verify_merge(n_max: int = 18, beta: int = 3) -> Iterator[dict]:
    for a, layers in merge_cases(n_max):
        b = from_normal_form(a, layers)
        try:
            out = merge_A1L1(b, beta)
        except FormulaMismatchError as err:
            yield _mismatch("merge", beta, b, err)
            continue
        ok = (not out.hypothesis_satisfied) or out.formula_delta >= 0
        yield _record("merge", beta, out, ok,
                      Gamma=out.details["Gamma"], Lambda=out.details["Lambda"])


def verify_restriction(
    n_max: int = 8, m_max: int = 5, max_n: int = DEFAULT_MAX_EXHAUSTIVE_N, workers: int = 1,
) -> Iterator[dict]:
    """Layered maximum equals the maximum over all of S_n, per layered pattern."""
    for m in range(1, m_max + 1):
        for comp in compositions(m):
            spec = PatternSpec.explicit(build_from_blocks(comp))
            for n in range(m, n_max + 1):
                lay = max_over_layered(spec, n, workers=workers).max_count
                full = max_over_all(spec, n, max_n=max_n, workers=workers).max_count
                yield {"lemma": "restriction", "pattern": str(spec.perm), "n": n,
                       "layered_max": lay, "all_max": full, "ok": lay == full}


def verify_galvin(
    pattern: PatternSpec, n_max: int = 9, mode: str = "exhaustive",
    max_n: int | None = None, workers: int = 1,
) -> Iterator[dict]:
    table = galvin_ratios(pattern, n_max, mode, max_n=max_n, workers=workers)
    prev = None
    for row, rec in zip(table.rows, table.records()):
        ok = prev is None or row.ratio <= prev
        prev = row.ratio
        yield {"lemma": "galvin", "pattern": str(pattern.perm), "mode": mode, **rec, "ok": ok}


def run_lemma(
    lemma: str,
    n_max: int | None = None,
    beta: int = 3,
    pattern: PatternSpec | None = None,
    max_n: int = DEFAULT_MAX_EXHAUSTIVE_N,
    workers: int = 1,
) -> Iterator[dict]:
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma {lemma!r}; expected one of {', '.join(LEMMAS)}")
    if n_max is None:
        n_max = DEFAULT_N_MAX[lemma]
    if lemma == "tech":
        return verify_tech(n_max)
    if lemma == "isolated":
        return verify_isolated(n_max, beta)
    if lemma == "push":
        return verify_push(n_max, beta)
    if lemma == "sort":
        return verify_sort(n_max, beta)
    if lemma == "move":
        return verify_move(n_max, beta)
    if lemma == "merge":
        return verify_merge(n_max, beta)
    if lemma == "restriction":
        return verify_restriction(n_max, max_n=max_n, workers=workers)
    spec = pattern if pattern is not None else PatternSpec.tau_2_beta(beta)
    return verify_galvin(spec, n_max, max_n=max_n, workers=workers)
