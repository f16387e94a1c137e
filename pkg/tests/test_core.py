import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permpack.core import (
    ANTILAYER,
    LAYER,
    Block,
    BlockStructure,
    ExhaustiveBoundError,
    PatternSpec,
    Permutation,
    PermutationError,
    BlockFormatError,
    build_from_blocks,
    compositions,
    count_occurrences,
    count_occurrences_layered,
    count_occurrences_naive,
    decompose_blocks,
    enumerate_all,
    enumerate_layered,
    parse_blocks,
    parse_permutation,
    standardize,
)

FIG1 = Permutation((3, 2, 1, 5, 4, 9, 8, 7, 6))
FIG2B = Permutation((2, 1, 4, 3, 6, 5, 10, 9, 8, 7))


@st.composite
def perms(draw, min_n=0, max_n=8):
    n = draw(st.integers(min_n, max_n))
    return Permutation(tuple(draw(st.permutations(range(1, n + 1)))))


@st.composite
def comps(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    parts, left = [], n
    while left:
        s = draw(st.integers(1, left))
        parts.append(s)
        left -= s
    return tuple(parts)


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(PermutationError, match="repeated=\\[2\\]"):
            Permutation((1, 2, 2))
        with pytest.raises(PermutationError, match="missing=\\[2\\]"):
            Permutation((1, 3))

    def test_length_and_order(self):
        assert len(FIG1) == FIG1.n == 9
        assert Permutation((1, 2, 3)) < Permutation((1, 3, 2)) < Permutation((2, 1, 3))

    def test_str_round_trip(self):
        assert parse_permutation(str(FIG1)) == FIG1
        assert str(FIG2B) == "2 1 4 3 6 5 10 9 8 7"
        assert parse_permutation(str(FIG2B)) == FIG2B


class TestParsing:
    def test_fig1_text(self):
        assert parse_permutation("3 2 1 5 4 9 8 7 6") == FIG1

    def test_compact(self):
        assert parse_permutation("1243") == Permutation((1, 2, 4, 3))
        assert parse_permutation("1") == Permutation((1,))

    def test_not_bijection(self):
        with pytest.raises(PermutationError, match="1..2"):
            parse_permutation("1 3")

    @pytest.mark.parametrize("text", ["12 3", "1 2,3", "1a2", "1023"])
    def test_bad_text(self, text):
        with pytest.raises(PermutationError):
            parse_permutation(text)

    def test_blocks(self):
        b = parse_blocks("L3, L2,L4")
        assert b.layer_sizes() == (3, 2, 4)
        assert str(b) == "L3,L2,L4"
        assert parse_blocks("") == BlockStructure(())

    @pytest.mark.parametrize("text", ["L0", "X3", "L", "L3;L2", "A-1"])
    def test_bad_blocks(self, text):
        with pytest.raises(BlockFormatError):
            parse_blocks(text)


class TestBlocks:
    def test_fig1_decomposition(self):
        b = decompose_blocks(FIG1)
        assert b.blocks == (Block(LAYER, 3), Block(LAYER, 2), Block(LAYER, 4))
        assert str(b) == "L3,L2,L4"

    def test_identity_is_one_antilayer(self):
        assert decompose_blocks(Permutation((1, 2, 3))).blocks == (Block(ANTILAYER, 3),)

    def test_not_layered(self):
        assert decompose_blocks(Permutation((2, 3, 1))) is None
        assert decompose_blocks(Permutation((1, 3, 4, 2))) is None

    def test_build_examples(self):
        assert build_from_blocks(parse_blocks("A2,L3")).values == (1, 2, 5, 4, 3)
        assert build_from_blocks(parse_blocks("L3,L2,L4")) == FIG1
        assert build_from_blocks(parse_blocks("A3")).values == (1, 2, 3)
        assert build_from_blocks(BlockStructure(())) == Permutation(())

    def test_canonical_rules(self):
        # lone singleton stays a layer; runs of singletons become one antilayer
        assert str(BlockStructure.from_composition((2, 1, 3))) == "L2,L1,L3"
        assert str(BlockStructure.from_composition((1, 1, 3, 1, 1, 1))) == "A2,L3,A3"
        non_canonical = parse_blocks("A1,L1,A2,L3")
        assert not non_canonical.is_canonical()
        assert str(non_canonical) == "A4,L3"

    def test_bijectivity_exhaustive(self):
        for n in range(0, 13):
            seen = set()
            for c in compositions(n):
                p = build_from_blocks(c)
                b = decompose_blocks(p)
                assert b == BlockStructure.from_composition(c)
                assert b.layer_sizes() == c
                assert build_from_blocks(b) == p
                seen.add(p)
            assert len(seen) == 2 ** max(n - 1, 0)

    @given(comps())
    def test_decompose_build_is_canonicalize(self, c):
        b = BlockStructure(tuple(Block(LAYER, s) for s in c))
        assert decompose_blocks(build_from_blocks(b)) == b.canonical()
        assert str(parse_blocks(str(b))) == str(b)


class TestCounting:
    def test_trivial(self):
        assert count_occurrences((1, 2), (1, 2, 3, 4, 5)) == 10

    def test_1243_in_maximizer(self):
        assert count_occurrences((1, 2, 4, 3), (1, 2, 3, 4, 8, 7, 6, 5)) == math.comb(4, 2) ** 2

    def test_fig2b_climbing(self):
        # value frozen from the subset-scan oracle over all C(10,5) subsets
        assert count_occurrences_naive((1, 2, 5, 4, 3), FIG2B) == 48
        assert count_occurrences((1, 2, 5, 4, 3), FIG2B) == 48

    def test_fig1_decreasing_triples(self):
        assert count_occurrences_naive((3, 2, 1), FIG1) == 5
        assert count_occurrences((3, 2, 1), FIG1) == 5

    def test_fig2a_layers_in_layers(self):
        sigma = (5, 4, 3, 2, 1, 7, 6, 10, 9, 8)
        assert count_occurrences((3, 2, 1, 5, 4), sigma) == count_occurrences_naive((3, 2, 1, 5, 4), sigma)
        assert count_occurrences((3, 2, 1, 5, 4), sigma) == count_occurrences_layered((3, 2), (5, 2, 3))

    def test_zero_and_empty(self):
        assert count_occurrences((1, 2, 3), (1, 2)) == 0
        assert count_occurrences((), (2, 1)) == 1
        assert count_occurrences((), ()) == 1
        assert count_occurrences_layered((), (3, 2)) == 1

    def test_layered_examples(self):
        assert count_occurrences_layered((1, 1, 2), (1, 1, 1, 1, 4)) == 36
        assert count_occurrences_layered((1, 1, 3), (2, 2, 2, 4)) == 48
        assert count_occurrences_layered((3,), (3, 2, 4)) == 5

    def test_layered_equals_general_exhaustive(self):
        for n in range(1, 11):
            sigmas = [(c, build_from_blocks(c)) for c in compositions(n)]
            for m in range(1, 6):
                for t in compositions(m):
                    tau = build_from_blocks(t)
                    for c, sigma in sigmas:
                        assert count_occurrences_layered(t, c) == count_occurrences(tau, sigma), (t, c)

    def test_general_equals_naive_random(self):
        rng = random.Random(20040318)
        for _ in range(300):
            n = rng.randint(0, 10)
            m = rng.randint(1, 5)
            sigma = rng.sample(range(1, n + 1), n)
            tau = rng.sample(range(1, m + 1), m)
            assert count_occurrences(tau, sigma) == count_occurrences_naive(tau, sigma)

    @given(perms(min_n=1))
    def test_self_count(self, tau):
        assert count_occurrences(tau, tau) == 1

    @settings(max_examples=200)
    @given(perms(min_n=1, max_n=4), perms(max_n=9))
    def test_bounds_and_oracle(self, tau, sigma):
        got = count_occurrences(tau, sigma)
        assert got == count_occurrences_naive(tau, sigma)
        assert 0 <= got <= math.comb(len(sigma), len(tau))
        if len(tau) > len(sigma):
            assert got == 0

    def test_all_patterns_partition_subsets(self):
        # every m-subset realizes exactly one pattern
        sigma = (3, 7, 1, 8, 2, 6, 4, 5)
        for m in range(1, 5):
            total = sum(count_occurrences(t, sigma) for t in itertools.permutations(range(1, m + 1)))
            assert total == math.comb(len(sigma), m)

    def test_standardize(self):
        assert standardize((10, 3, 7)) == (3, 1, 2)


class TestEnumeration:
    def test_layered_order_and_counts(self):
        assert [b.layer_sizes() for b in enumerate_layered(3)] == [(3,), (2, 1), (1, 2), (1, 1, 1)]
        assert [str(b) for b in enumerate_layered(1)] == ["L1"]
        assert list(enumerate_layered(0)) == [BlockStructure(())]
        for n in range(1, 13):
            assert sum(1 for _ in enumerate_layered(n)) == 2 ** (n - 1)

    def test_layered_distinct(self):
        seen = [b.layer_sizes() for b in enumerate_layered(8)]
        assert len(seen) == len(set(seen))

    def test_all(self):
        ps = list(enumerate_all(3))
        assert len(ps) == 6
        assert ps[0].values == (1, 2, 3) and ps[-1].values == (3, 2, 1)
        assert ps == sorted(ps)
        assert [p.values for p in enumerate_all(1)] == [(1,)]
        assert sum(1 for _ in enumerate_all(7)) == 5040

    def test_refusal(self):
        with pytest.raises(ExhaustiveBoundError):
            next(enumerate_all(12))
        assert next(enumerate_all(12, max_n=12)).values == tuple(range(1, 13))


class TestPatternSpec:
    def test_families(self):
        assert PatternSpec.tau_2_beta(3).perm.values == (1, 2, 5, 4, 3)
        assert PatternSpec.tau_alpha_alpha(2).perm.values == (1, 2, 4, 3)
        assert PatternSpec.tau_alpha_alpha(3).perm.values == (1, 2, 3, 6, 5, 4)
        ab = PatternSpec.tau_a_b(3, 2)
        assert ab.layers == (1, 1, 1, 2) and ab.m == 5

    def test_detection(self):
        spec = PatternSpec.explicit((1, 2, 4, 3))
        assert spec.two_beta() == 2 and spec.alpha_alpha() == 2
        assert PatternSpec.explicit((2, 4, 1, 3)).layers is None
        assert PatternSpec.tau_alpha_alpha(3).two_beta() is None

    @pytest.mark.parametrize("make", [
        lambda: PatternSpec.tau_alpha_alpha(1),
        lambda: PatternSpec.tau_2_beta(1),
        lambda: PatternSpec.explicit(()),
    ])
    def test_rejects(self, make):
        with pytest.raises(ValueError):
            make()
