import itertools
import random

import numpy as np

from permpack import _batch
from permpack.core import count_occurrences_naive


def test_chunks_cover_sn_in_order():
    for n in (1, 4, 10):
        rows = [tuple(r) for p in _batch.chunk_prefixes(n) for r in _batch.chunk_array(n, p).tolist()]
        if n <= 9:
            assert rows == list(itertools.permutations(range(1, n + 1)))
        else:
            assert len(rows) == 3628800
            assert rows == sorted(rows)
            assert len(set(rows[:5000])) == 5000


def test_count_rows_matches_naive():
    rng = random.Random(7)
    for n in range(0, 7):
        rows = _batch.chunk_array(n, ())
        for m in range(0, 5):
            for tau in itertools.permutations(range(1, m + 1)):
                got = _batch.count_rows(tau, rows)
                sample = rng.sample(range(len(rows)), min(40, len(rows)))
                for i in sample:
                    assert got[i] == count_occurrences_naive(tau, tuple(rows[i])), (tau, rows[i])


def test_count_rows_random_larger():
    rng = random.Random(11)
    rows = np.array([rng.sample(range(1, 10), 9) for _ in range(60)], dtype=np.int8)
    for tau in [(2, 4, 1, 3), (1, 2, 5, 4, 3), (3, 1, 4, 2), (1,)]:
        got = _batch.count_rows(tau, rows)
        assert got.tolist() == [count_occurrences_naive(tau, tuple(r)) for r in rows]


def test_scan_chunk_witnesses_lexicographic():
    best, wits, size = _batch.scan_chunk((1, 2), 4, (), 3)
    assert (best, size) == (6, 24)
    assert wits == [(1, 2, 3, 4)]
    best, wits, _ = _batch.scan_chunk((2, 1), 3, (), 5)
    assert best == 3 and wits == [(3, 2, 1)]
