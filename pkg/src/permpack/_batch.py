"""Vectorized occurrence counting over blocks of permutations.

Exhaustive search over S_n is split into chunks that fix a prefix of the
first ``n - CHUNK_TAIL`` values; each chunk is a lexicographically ordered
int8 array of at most ``CHUNK_TAIL!`` rows.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import _neighbour_constraints

CHUNK_TAIL = 9


@lru_cache(maxsize=None)
def _index_perms(k: int) -> np.ndarray:
    """All permutations of range(k) in lexicographic order, shape (k!, k)."""
    if k == 0:
        arr = np.zeros((1, 0), dtype=np.int8)
    else:
        arr = np.array(list(itertools.permutations(range(k))), dtype=np.int8)
    arr.setflags(write=False)
    return arr


def chunk_prefixes(n: int) -> list[tuple[int, ...]]:
    depth = max(0, n - CHUNK_TAIL)
    return list(itertools.permutations(range(1, n + 1), depth))


def chunk_array(n: int, prefix: Sequence[int]) -> np.ndarray:
    """Rows of S_n starting with ``prefix``, lexicographic order."""
    rest = np.array(sorted(set(range(1, n + 1)) - set(prefix)), dtype=np.int8)
    tail = rest[_index_perms(len(rest))]
    if not prefix:
        return tail
    head = np.broadcast_to(np.array(prefix, dtype=np.int8), (tail.shape[0], len(prefix)))
    return np.concatenate([head, tail], axis=1)


def count_rows(tau: Sequence[int], rows: np.ndarray) -> np.ndarray:
    """Occurrence count of ``tau`` in every row of ``rows``.

    Same left-to-right extension as ``core.count_occurrences``, carried out
    for all rows at once with a boolean mask per partial embedding.
    """
    m = len(tau)
    nrows, n = rows.shape
    counts = np.zeros(nrows, dtype=np.int64)
    if m == 0:
        counts += 1
        return counts
    if m > n:
        return counts
    cons = _neighbour_constraints(tau)
    cols = [rows[:, p] for p in range(n)]
    pos = [0] * m

    def extend(j: int, start: int, mask: np.ndarray | None) -> None:
        lo, hi = cons[j]
        for p in range(start, n - (m - j) + 1):
            col = cols[p]
            new = mask
            if lo >= 0:
                c = col > cols[pos[lo]]
                new = c if new is None else new & c
            if hi >= 0:
                c = col < cols[pos[hi]]
                new = c if new is None else new & c
            if j == m - 1:
                if new is None:
                    counts[:] += 1
                else:
                    counts[:] += new
                continue
            if new is not None and not new.any():
                continue
            pos[j] = p
            extend(j + 1, p + 1, new)

    extend(0, 0, None)
    return counts


def scan_chunk(tau: Sequence[int], n: int, prefix: Sequence[int], cap: int) -> tuple[int, list[tuple[int, ...]], int]:
    """Max count in one chunk, its first ``cap`` maximizers, and the chunk size."""
    rows = chunk_array(n, prefix)
    counts = count_rows(tau, rows)
    best = int(counts.max())
    idx = np.flatnonzero(counts == best)[:cap]
    return best, [tuple(int(v) for v in rows[i]) for i in idx], rows.shape[0]
