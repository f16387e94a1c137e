"""Maximizing occurrence counts: over all of S_n, over layered permutations,
and over the antilayer-then-k-layers family used for τ_{2,β}.

Searches are split into deterministic chunks.  Chunk results are combined by
taking the larger count and merging witness lists in lexicographic order, an
associative and commutative reduction, so the worker count never changes
the answer.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import _batch
from .core import (
    DEFAULT_MAX_EXHAUSTIVE_N,
    ExhaustiveBoundError,
    NotLayeredError,
    PatternSpec,
    Permutation,
    build_from_blocks,
    compositions,
    count_occurrences,
    count_occurrences_layered,
    decompose_blocks,
)
from .formulas import decimal_string, g_formula_2beta, g_formula_alpha_alpha, iter_formula_2beta

__all__ = [
    "DEFAULT_MAX_LAYERED_N", "DEFAULT_WITNESS_CAP",
    "SearchResult", "RatioRow", "RatioTable",
    "max_over_all", "max_over_layered", "g_k", "galvin_ratios",
    "default_workers",
]

DEFAULT_MAX_LAYERED_N = 24
DEFAULT_WITNESS_CAP = 10


def default_workers(cap: int = 8) -> int:
    return max(1, min(os.cpu_count() or 1, cap))


def _pattern(tau) -> PatternSpec:
    if isinstance(tau, PatternSpec):
        return tau
    return PatternSpec.explicit(tau)


@dataclass
class SearchResult:
    """Exact maximum of g(τ, σ) over a search space, with witnesses.

    Witnesses are the lexicographically smallest maximizers, at most
    ``witness_cap`` of them; each is recounted on construction.
    """

    pattern: PatternSpec
    n: int
    restriction: str
    max_count: int
    witnesses: list[Permutation]
    space_size: int
    witness_cap: int = DEFAULT_WITNESS_CAP
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.witnesses = sorted(self.witnesses)
        for w in self.witnesses:
            got = count_occurrences(self.pattern.perm, w)
            if got != self.max_count:
                raise AssertionError(
                    f"witness {w} has {got} occurrences, expected {self.max_count}"
                )

    def witness_blocks(self) -> list[str | None]:
        out = []
        for w in self.witnesses:
            b = decompose_blocks(w)
            out.append(None if b is None else str(b))
        return out

    def to_json(self) -> dict:
        return {
            "pattern": str(self.pattern.perm),
            "pattern_name": self.pattern.name,
            "n": self.n,
            "restriction": self.restriction,
            "max_count": self.max_count,
            "space_size": self.space_size,
            "witness_cap": self.witness_cap,
            "witnesses": [str(w) for w in self.witnesses],
            "witness_blocks": self.witness_blocks(),
            "metadata": self.metadata,
        }

    CSV_COLUMNS = ("pattern", "n", "restriction", "max_count", "space_size", "witness", "witness_blocks")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        rows = list(zip(self.witnesses, self.witness_blocks())) or [(None, None)]
        for wit, blocks in rows:
            w.writerow([
                str(self.pattern.perm), self.n, self.restriction, self.max_count,
                self.space_size, "" if wit is None else str(wit), blocks or "",
            ])
        return buf.getvalue()


def _reduce(parts: Iterable[tuple[int, list[tuple[int, ...]], int]], cap: int):
    best, wits, size = -1, [], 0
    for b, w, s in parts:
        size += s
        if b > best:
            best, wits = b, list(w)
        elif b == best:
            wits = sorted(wits + list(w))[:cap]
    return best, wits[:cap], size


def _run_chunks(fn: Callable, jobs: Sequence[tuple], workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
        return list(ex.map(fn, *zip(*jobs)))


def max_over_all(
    tau,
    n: int,
    *,
    max_n: int = DEFAULT_MAX_EXHAUSTIVE_N,
    witness_cap: int = DEFAULT_WITNESS_CAP,
    workers: int = 1,
) -> SearchResult:
    """g(τ, n): exhaustive maximum over all n! permutations."""
    spec = _pattern(tau)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > max_n:
        raise ExhaustiveBoundError(
            f"refusing exhaustive search over S_{n}: n exceeds the exhaustive bound {max_n}; "
            f"use restriction=layered for layered patterns"
        )
    tau_vals = spec.perm.values
    jobs = [(tau_vals, n, prefix, witness_cap) for prefix in _batch.chunk_prefixes(n)]
    best, wits, size = _reduce(_run_chunks(_batch.scan_chunk, jobs, workers), witness_cap)
    return SearchResult(
        pattern=spec, n=n, restriction="all", max_count=best,
        witnesses=[Permutation(w) for w in wits], space_size=size,
        witness_cap=witness_cap,
    )


def _scan_layered(tau_layers: tuple[int, ...], n: int, first: int, cap: int):
    """Max over compositions of n whose first part is ``first``.

    Depth-first over the parts, carrying the layered-count DP vector so each
    node costs O(len(tau_layers)).
    """
    p = len(tau_layers)
    best, wits, size = -1, [], 0
    parts = [first]

    def step(f: list[int], s: int) -> list[int]:
        g = f[:]
        for j in range(p, 0, -1):
            if g[j - 1]:
                g[j] += g[j - 1] * math.comb(s, tau_layers[j - 1])
        return g

    def walk(f: list[int], remaining: int):
        nonlocal best, wits, size
        if remaining == 0:
            size += 1
            val = f[p]
            if val > best:
                best, wits = val, [tuple(parts)]
            elif val == best and len(wits) < cap:
                wits.append(tuple(parts))
            return
        for s in range(1, remaining + 1):
            parts.append(s)
            walk(step(f, s), remaining - s)
            parts.pop()

    walk(step([1] + [0] * p, first), n - first)
    perms = sorted(build_from_blocks(c).values for c in wits)[:cap]
    return best, perms, size


def max_over_layered(
    tau,
    n: int,
    *,
    max_n: int = DEFAULT_MAX_LAYERED_N,
    witness_cap: int = DEFAULT_WITNESS_CAP,
    workers: int = 1,
) -> SearchResult:
    """Maximum over the 2^(n-1) layered permutations of size n.

    For a layered pattern this equals g(τ, n), a classical result; the
    equality is checked, not assumed, by the test suite.
    """
    spec = _pattern(tau)
    layers = spec.layers
    if layers is None:
        raise NotLayeredError(
            f"pattern {spec.perm} is not layered; the layered restriction only applies to layered patterns"
        )
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > max_n:
        raise ExhaustiveBoundError(
            f"refusing layered search at n={n}: exceeds the composition bound {max_n}"
        )
    jobs = [(layers, n, first, witness_cap) for first in range(n, 0, -1)]
    best, wits, size = _reduce(_run_chunks(_scan_layered, jobs, workers), witness_cap)
    return SearchResult(
        pattern=spec, n=n, restriction="layered", max_count=best,
        witnesses=[Permutation(w) for w in wits], space_size=size,
        witness_cap=witness_cap,
    )


def _layer_tuples(total: int, k: int, smallest: int = 2):
    """Ordered k-tuples of integers >= smallest summing to total."""
    if k == 0:
        if total == 0:
            yield ()
        return
    for first in range(smallest, total - smallest * (k - 1) + 1):
        for rest in _layer_tuples(total - first, k - 1, smallest):
            yield (first,) + rest


def g_k(tau, n: int, k: int, *, witness_cap: int = DEFAULT_WITNESS_CAP) -> SearchResult:
    """Maximum of g(τ_{2,β}, σ) over σ = A₁ L₁ … L_k with every |L_i| >= 2 and |L_k| >= |A₁|.

    |A₁| = 0 is allowed.  Metadata records, for the optimum, whether it also
    has |A₁| >= 2 and |L_k| >= β, and whether an empty antilayer attains it.
    """
    spec = _pattern(tau)
    beta = spec.two_beta()
    if beta is None:
        raise ValueError(f"g_k is defined for tau_2,beta patterns only, got {spec.perm}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    tau_layers = (1, 1, beta)
    best, structs, space = -1, [], 0
    for a in range(0, n + 1):
        for layers in _layer_tuples(n - a, k):
            if layers[-1] < a:
                continue
            space += 1
            val = count_occurrences_layered(tau_layers, (1,) * a + layers)
            if val > best:
                best, structs = val, [(a, layers)]
            elif val == best:
                structs.append((a, layers))
    meta = {"k": k, "beta": beta, "feasible_structures": space}
    if space == 0:
        meta["infeasible"] = True
        return SearchResult(
            pattern=spec, n=n, restriction=f"antilayer_then_layers({k})", max_count=0,
            witnesses=[], space_size=0, witness_cap=witness_cap, metadata=meta,
        )
    if n < 2 + k * beta:
        meta["below_soft_bound"] = True
    meta["optimum_sizes_flag"] = [
        a >= 2 and layers[-1] >= beta for a, layers in structs
    ]
    meta["optimum_with_empty_antilayer"] = any(a == 0 for a, _ in structs)
    perms = sorted(build_from_blocks((1,) * a + layers) for a, layers in structs)
    meta["maximizers"] = len(perms)
    return SearchResult(
        pattern=spec, n=n, restriction=f"antilayer_then_layers({k})", max_count=best,
        witnesses=perms[:witness_cap], space_size=space, witness_cap=witness_cap,
        metadata=meta,
    )


@dataclass(frozen=True)
class RatioRow:
    n: int
    count: int
    binom: int
    argmax: int | None = None

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.count, self.binom)


@dataclass
class RatioTable:
    """Galvin ratios g(τ, n) / C(n, m); adjacent increases are recorded as failures."""

    pattern: PatternSpec
    mode: str
    rows: list[RatioRow]
    digits: int = 12

    @property
    def failures(self) -> list[dict]:
        out = []
        for prev, cur in zip(self.rows, self.rows[1:]):
            if cur.ratio > prev.ratio:
                out.append({
                    "status": "FAILURE", "n_prev": prev.n, "n": cur.n,
                    "ratio_prev": str(prev.ratio), "ratio": str(cur.ratio),
                })
        return out

    @property
    def nonincreasing(self) -> bool:
        return not self.failures

    CSV_COLUMNS = ("n", "count", "binom", "ratio_num", "ratio_den", "ratio_float")

    def records(self) -> list[dict]:
        return [
            {
                "n": r.n, "count": r.count, "binom": r.binom,
                "ratio_num": r.ratio.numerator, "ratio_den": r.ratio.denominator,
                "ratio_float": decimal_string(r.ratio, self.digits),
            }
            for r in self.rows
        ]

    def to_json(self) -> dict:
        return {
            "pattern": str(self.pattern.perm),
            "pattern_name": self.pattern.name,
            "mode": self.mode,
            "rows": self.records(),
            "failures": self.failures,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.records())
        return buf.getvalue()


def galvin_ratios(
    tau,
    n_max: int,
    mode: str = "exhaustive",
    *,
    max_n: int | None = None,
    workers: int = 1,
) -> RatioTable:
    """Table of g(τ, n)/C(n, m) for n = m..n_max.

    ``mode`` is ``exhaustive`` (all of S_n), ``layered`` or ``formula``.
    Formula mode needs a closed form: τ_{2,β} for every n, τ_{α,α} for even
    n only.
    """
    spec = _pattern(tau)
    m = spec.m
    rows: list[RatioRow] = []
    if mode == "exhaustive":
        bound = DEFAULT_MAX_EXHAUSTIVE_N if max_n is None else max_n
        if n_max > bound:
            raise ExhaustiveBoundError(
                f"refusing exhaustive ratio table to n={n_max}: exceeds the exhaustive bound {bound}"
            )
        for n in range(m, n_max + 1):
            r = max_over_all(spec, n, max_n=bound, workers=workers)
            rows.append(RatioRow(n, r.max_count, math.comb(n, m)))
    elif mode == "layered":
        bound = DEFAULT_MAX_LAYERED_N if max_n is None else max_n
        for n in range(m, n_max + 1):
            r = max_over_layered(spec, n, max_n=bound, workers=workers)
            rows.append(RatioRow(n, r.max_count, math.comb(n, m)))
    elif mode == "formula":
        beta = spec.two_beta()
        alpha = spec.alpha_alpha()
        if spec.family == "aa" or (beta is None and alpha is not None):
            for n in range(m, n_max + 1, 2):
                rows.append(RatioRow(n, g_formula_alpha_alpha(n, alpha), math.comb(n, m), n // 2))
        elif beta is not None:
            for n, val, x in iter_formula_2beta(beta, m, n_max):
                rows.append(RatioRow(n, val, math.comb(n, m), x))
        else:
            raise ValueError(
                f"no closed form for pattern {spec.perm}; formula mode covers tau_alpha,alpha and tau_2,beta"
            )
    else:
        raise ValueError(f"unknown mode {mode!r}; expected exhaustive, layered or formula")
    return RatioTable(spec, mode, rows)


def formula_max(spec: PatternSpec, n: int) -> int:
    """Closed-form g(τ, n) when one is available; used for cross-checks."""
    beta = spec.two_beta()
    if beta is not None:
        return g_formula_2beta(n, beta)[0]
    alpha = spec.alpha_alpha()
    if alpha is not None:
        return g_formula_alpha_alpha(n, alpha)
    raise ValueError(f"no closed form for pattern {spec.perm}")
