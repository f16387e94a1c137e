"""Permutations, layered block structures and exact occurrence counting.

Counts are plain Python ints, so every product of binomials is exact no
matter how large ``n`` gets.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "LAYER", "ANTILAYER", "DEFAULT_MAX_EXHAUSTIVE_N",
    "PermutationError", "BlockFormatError", "ExhaustiveBoundError", "NotLayeredError",
    "Permutation", "Block", "BlockStructure", "PatternSpec",
    "decompose_blocks", "build_from_blocks", "canonical_blocks",
    "count_occurrences", "count_occurrences_naive", "count_occurrences_layered",
    "compositions", "enumerate_layered", "enumerate_all",
    "parse_permutation", "parse_blocks", "standardize",
]

LAYER = "L"
ANTILAYER = "A"

# exhaustive enumeration over S_n is refused above this n unless overridden
DEFAULT_MAX_EXHAUSTIVE_N = 11


class PermutationError(ValueError):
    pass


class BlockFormatError(ValueError):
    pass


class ExhaustiveBoundError(ValueError):
    """Raised when an exhaustive enumeration is asked for above its bound."""


class NotLayeredError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Permutation:
    """A permutation of 1..n in one-line notation.

    Ordering is lexicographic on ``values``.
    """

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        n = len(vals)
        if sorted(vals) != list(range(1, n + 1)):
            seen = set()
            repeated = sorted({v for v in vals if v in seen or seen.add(v)})
            missing = sorted(set(range(1, n + 1)) - set(vals))
            extra = sorted({v for v in vals if not 1 <= v <= n})
            raise PermutationError(
                f"not a bijection on 1..{n}: repeated={repeated} "
                f"missing={missing} out_of_range={extra}"
            )

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __str__(self) -> str:
        return " ".join(map(str, self.values))

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def of(cls, *values: int) -> Permutation:
        return cls(tuple(values))

    def blocks(self) -> BlockStructure | None:
        return decompose_blocks(self)


@dataclass(frozen=True)
class Block:
    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in (LAYER, ANTILAYER):
            raise BlockFormatError(f"unknown block kind {self.kind!r}")
        if self.size < 1:
            raise BlockFormatError(f"block size must be >= 1, got {self.size}")

    def __str__(self) -> str:
        return f"{self.kind}{self.size}"

    def layer_sizes(self) -> tuple[int, ...]:
        if self.kind == ANTILAYER:
            return (1,) * self.size
        return (self.size,)


@dataclass(frozen=True)
class BlockStructure:
    """An ordered list of layers and antilayers describing a layered permutation.

    An antilayer of size s means s consecutive layers of size 1.  Any list of
    blocks is accepted; :meth:`canonical` gives the unique representative
    (no two adjacent antilayers, no run of two or more ``L1`` blocks, every
    antilayer of size >= 2).
    """

    blocks: tuple[Block, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]

    def __str__(self) -> str:
        return ",".join(str(b) for b in self.canonical().blocks)

    @property
    def n(self) -> int:
        return sum(b.size for b in self.blocks)

    def layer_sizes(self) -> tuple[int, ...]:
        """The expanded composition: every antilayer becomes a run of 1s."""
        return tuple(s for b in self.blocks for s in b.layer_sizes())

    def canonical(self) -> BlockStructure:
        return BlockStructure.from_composition(self.layer_sizes())

    def is_canonical(self) -> bool:
        return self.blocks == self.canonical().blocks

    @classmethod
    def from_composition(cls, sizes: Iterable[int]) -> BlockStructure:
        return cls(canonical_blocks(sizes))

    @classmethod
    def parse(cls, text: str) -> BlockStructure:
        return parse_blocks(text)

    def permutation(self) -> Permutation:
        return build_from_blocks(self)


def canonical_blocks(sizes: Iterable[int]) -> tuple[Block, ...]:
    """Canonical blocks for a composition of layer sizes."""
    out: list[Block] = []
    run = 0
    for s in sizes:
        if s < 1:
            raise BlockFormatError(f"layer sizes must be >= 1, got {s}")
        if s == 1:
            run += 1
            continue
        if run:
            out.append(Block(ANTILAYER, run) if run > 1 else Block(LAYER, 1))
            run = 0
        out.append(Block(LAYER, s))
    if run:
        out.append(Block(ANTILAYER, run) if run > 1 else Block(LAYER, 1))
    return tuple(out)


def _layer_runs(values: Sequence[int]) -> tuple[int, ...] | None:
    sizes = []
    i, base, n = 0, 0, len(values)
    while i < n:
        top = values[i]
        size = top - base
        if size < 1 or i + size > n:
            return None
        if tuple(values[i:i + size]) != tuple(range(top, base, -1)):
            return None
        sizes.append(size)
        i += size
        base = top
    return tuple(sizes)


def decompose_blocks(p: Permutation | Sequence[int]) -> BlockStructure | None:
    """Canonical block structure of ``p``, or None when ``p`` is not layered."""
    values = p.values if isinstance(p, Permutation) else tuple(p)
    sizes = _layer_runs(values)
    if sizes is None:
        return None
    return BlockStructure.from_composition(sizes)


def build_from_blocks(b: BlockStructure | Iterable[int]) -> Permutation:
    """The layered permutation with the given blocks (or layer sizes)."""
    sizes = b.layer_sizes() if isinstance(b, BlockStructure) else tuple(b)
    values: list[int] = []
    base = 0
    for s in sizes:
        if s < 1:
            raise BlockFormatError(f"layer sizes must be >= 1, got {s}")
        values.extend(range(base + s, base, -1))
        base += s
    return Permutation(tuple(values))


def standardize(seq: Sequence[int]) -> tuple[int, ...]:
    """Order-isomorphic pattern of ``seq`` on 1..len(seq)."""
    order = sorted(range(len(seq)), key=seq.__getitem__)
    out = [0] * len(seq)
    for rank, idx in enumerate(order, 1):
        out[idx] = rank
    return tuple(out)


def _neighbour_constraints(tau: Sequence[int]) -> list[tuple[int, int]]:
    """For each pattern index j, the earlier indices holding the next smaller
    and next larger pattern values (-1 when absent).

    Checking a new element only against those two keeps the partial
    embedding order-isomorphic, by transitivity.
    """
    cons = []
    for j, v in enumerate(tau):
        lo = hi = -1
        for i in range(j):
            w = tau[i]
            if w < v and (lo < 0 or w > tau[lo]):
                lo = i
            elif w > v and (hi < 0 or w < tau[hi]):
                hi = i
        cons.append((lo, hi))
    return cons


def _values(p) -> tuple[int, ...]:
    return p.values if isinstance(p, Permutation) else tuple(p)


def count_occurrences(tau: Permutation | Sequence[int], sigma: Permutation | Sequence[int]) -> int:
    """Number of occurrences of ``tau`` in ``sigma``.

    Partial embeddings are extended left to right; a position is only tried
    if enough positions remain after it and its value sits between the
    images of the neighbouring pattern values already placed.
    """
    t, s = _values(tau), _values(sigma)
    m, n = len(t), len(s)
    if m == 0:
        return 1
    if m > n:
        return 0
    cons = _neighbour_constraints(t)
    chosen = [0] * m

    def extend(j: int, start: int) -> int:
        lo, hi = cons[j]
        lo_v = chosen[lo] if lo >= 0 else 0
        hi_v = chosen[hi] if hi >= 0 else n + 1
        last = j == m - 1
        total = 0
        for p in range(start, n - (m - j) + 1):
            v = s[p]
            if lo_v < v < hi_v:
                if last:
                    total += 1
                else:
                    chosen[j] = v
                    total += extend(j + 1, p + 1)
        return total

    return extend(0, 0)


def count_occurrences_naive(tau: Permutation | Sequence[int], sigma: Permutation | Sequence[int]) -> int:
    """Subset-scan oracle: standardize every m-subset of positions."""
    t, s = _values(tau), _values(sigma)
    t = standardize(t)
    return sum(
        1 for idx in itertools.combinations(range(len(s)), len(t))
        if standardize([s[i] for i in idx]) == t
    )


def count_occurrences_layered(tau_layers: Sequence[int], sigma_layers: Sequence[int]) -> int:
    """Occurrences of a layered pattern in a layered permutation, by layer sizes.

    Each pattern layer must sit inside one layer of sigma, and distinct
    pattern layers use distinct sigma layers in increasing order, so
    ``f(i, j) = f(i-1, j) + f(i-1, j-1) * C(s_i, t_j)``.
    """
    t = tuple(tau_layers)
    f = [1] + [0] * len(t)
    for s in sigma_layers:
        for j in range(len(t), 0, -1):
            if f[j - 1]:
                f[j] += f[j - 1] * math.comb(s, t[j - 1])
    return f[-1]


def compositions(n: int) -> Iterator[tuple[int, ...]]:
    """All compositions of ``n``, largest first part first (reverse lex).

    ``compositions(3)`` gives (3,), (2, 1), (1, 2), (1, 1, 1).
    """
    if n == 0:
        yield ()
        return
    for first in range(n, 0, -1):
        for rest in compositions(n - first):
            yield (first,) + rest


def enumerate_layered(n: int) -> Iterator[BlockStructure]:
    """Every layered permutation of size n as a canonical BlockStructure, 2^(n-1) total."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    for c in compositions(n):
        yield BlockStructure.from_composition(c)


def enumerate_all(n: int, max_n: int = DEFAULT_MAX_EXHAUSTIVE_N) -> Iterator[Permutation]:
    """All n! permutations in lexicographic order."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n > max_n:
        raise ExhaustiveBoundError(
            f"refusing to enumerate S_{n}: n exceeds the exhaustive bound {max_n}"
        )
    for p in itertools.permutations(range(1, n + 1)):
        yield Permutation(p)


@dataclass(frozen=True)
class PatternSpec:
    """A pattern given explicitly or as one of the layered families.

    ``family`` is one of ``explicit``, ``aa`` (layers 1^a, a), ``2b``
    (layers 1, 1, b) or ``ab`` (layers 1^a, b).
    """

    family: str
    perm: Permutation
    alpha: int | None = None
    beta: int | None = None

    @classmethod
    def explicit(cls, perm: Permutation | Sequence[int]) -> PatternSpec:
        if not isinstance(perm, Permutation):
            perm = Permutation(tuple(perm))
        if len(perm) < 1:
            raise ValueError("pattern must have length >= 1")
        return cls("explicit", perm)

    @classmethod
    def tau_a_b(cls, alpha: int, beta: int) -> PatternSpec:
        if alpha < 0 or beta < 1:
            raise ValueError(f"tau_a_b needs alpha >= 0 and beta >= 1, got ({alpha}, {beta})")
        return cls("ab", build_from_blocks((1,) * alpha + (beta,)), alpha, beta)

    @classmethod
    def tau_alpha_alpha(cls, alpha: int) -> PatternSpec:
        if alpha < 2:
            raise ValueError(f"tau_alpha_alpha needs alpha >= 2, got {alpha}")
        return cls("aa", build_from_blocks((1,) * alpha + (alpha,)), alpha, alpha)

    @classmethod
    def tau_2_beta(cls, beta: int) -> PatternSpec:
        if beta < 2:
            raise ValueError(f"tau_2_beta needs beta >= 2, got {beta}")
        return cls("2b", build_from_blocks((1, 1, beta)), 2, beta)

    @property
    def m(self) -> int:
        return len(self.perm)

    @property
    def layers(self) -> tuple[int, ...] | None:
        """Layer composition, or None for a non-layered pattern."""
        return _layer_runs(self.perm.values)

    @property
    def is_layered(self) -> bool:
        return self.layers is not None

    def two_beta(self) -> int | None:
        """β when the pattern has layers (1, 1, β) with β >= 2."""
        ls = self.layers
        if ls is not None and len(ls) == 3 and ls[:2] == (1, 1) and ls[2] >= 2:
            return ls[2]
        return None

    def alpha_alpha(self) -> int | None:
        """α when the pattern has layers (1^α, α) with α >= 2."""
        ls = self.layers
        if ls is None or len(ls) < 3:
            return None
        a = len(ls) - 1
        if a >= 2 and ls[-1] == a and all(x == 1 for x in ls[:-1]):
            return a
        return None

    @property
    def name(self) -> str:
        if self.family == "aa":
            return f"tau_{self.alpha},{self.alpha}"
        if self.family in ("2b", "ab"):
            return f"tau_{self.alpha},{self.beta}"
        return "".join(map(str, self.perm)) if self.m <= 9 else str(self.perm)

    def __str__(self) -> str:
        return self.name


def parse_permutation(text: str) -> Permutation:
    """Parse one-line notation.

    Accepts whitespace-separated integers ("3 2 1 5 4") or, for n <= 9, a
    compact digit string ("1243").
    """
    tokens = text.split()
    if len(tokens) == 1 and len(tokens[0]) > 1:
        tok = tokens[0]
        if not tok.isdigit():
            raise PermutationError(f"bad permutation token {tok!r}")
        if "0" in tok:
            raise PermutationError(f"compact form cannot contain 0: {tok!r}")
        return Permutation(tuple(int(c) for c in tok))
    values = []
    for tok in tokens:
        if not tok.isdigit():
            raise PermutationError(f"bad permutation token {tok!r}")
        values.append(int(tok))
    if len(values) < 10 and any(len(tok) > 1 for tok in tokens):
        # with fewer than 10 entries every value is a single digit
        raise PermutationError(f"mixed compact and whitespace formats in {text!r}")
    return Permutation(tuple(values))


def parse_blocks(text: str) -> BlockStructure:
    """Parse "L3,L2,A4"; tokens may carry surrounding whitespace."""
    text = text.strip()
    if not text:
        return BlockStructure(())
    blocks = []
    for raw in text.split(","):
        tok = raw.strip()
        kind, num = tok[:1].upper(), tok[1:]
        if kind not in (LAYER, ANTILAYER) or not num.isdigit() or int(num) < 1:
            raise BlockFormatError(f"bad block token {tok!r} (expected L<k> or A<k>, k >= 1)")
        blocks.append(Block(kind, int(num)))
    return BlockStructure(tuple(blocks))
