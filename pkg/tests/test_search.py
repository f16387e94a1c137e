from fractions import Fraction
from math import comb

import pytest

from permpack.core import (
    ExhaustiveBoundError,
    NotLayeredError,
    PatternSpec,
    Permutation,
    build_from_blocks,
    compositions,
    count_occurrences,
    count_occurrences_layered,
    enumerate_all,
)
from permpack.formulas import g_formula_2beta, g_formula_alpha_alpha
from permpack.search import (
    RatioRow,
    RatioTable,
    SearchResult,
    formula_max,
    g_k,
    galvin_ratios,
    max_over_all,
    max_over_layered,
)

P1243 = PatternSpec.explicit((1, 2, 4, 3))
T23 = PatternSpec.tau_2_beta(3)


def brute_max(tau, n):
    """Independent oracle: plain loop over S_n with the scalar counter."""
    best, wits = -1, []
    for p in enumerate_all(n):
        c = count_occurrences(tau, p)
        if c > best:
            best, wits = c, [p]
        elif c == best:
            wits.append(p)
    return best, wits


class TestMaxOverAll:
    def test_1243_n8(self):
        r = max_over_all(P1243, 8)
        assert r.max_count == 36
        assert Permutation((1, 2, 3, 4, 8, 7, 6, 5)) in r.witnesses
        assert r.space_size == 40320

    def test_identity_pattern(self):
        r = max_over_all((1, 2), 3)
        assert r.max_count == 3 and r.witnesses == [Permutation((1, 2, 3))]

    def test_tau23_n8(self):
        assert max_over_all(T23, 8).max_count == 30 == g_formula_2beta(8, 3)[0]

    @pytest.mark.parametrize("tau", [(1, 2, 4, 3), (2, 4, 1, 3), (1, 3, 2), (3, 1, 2, 4)])
    def test_against_scalar_oracle(self, tau):
        for n in range(1, 8):
            best, wits = brute_max(tau, n)
            r = max_over_all(tau, n)
            assert r.max_count == best
            assert r.witnesses == sorted(wits)[:10]

    def test_refusal(self):
        with pytest.raises(ExhaustiveBoundError, match="layered"):
            max_over_all(P1243, 12)

    def test_deterministic_across_workers(self):
        a = max_over_all(P1243, 10, workers=1)
        b = max_over_all(P1243, 10, workers=2)
        assert (a.max_count, a.witnesses, a.space_size) == (b.max_count, b.witnesses, b.space_size)


class TestMaxOverLayered:
    def test_examples(self):
        r = max_over_layered(T23, 8)
        assert r.max_count == 30 and "A3,L5" in r.witness_blocks()
        r = max_over_layered(P1243, 8)
        assert r.max_count == 36 and "A4,L4" in r.witness_blocks()
        r = max_over_layered((3, 2, 1), 5)
        assert r.max_count == 10 and r.witness_blocks() == ["L5"]

    def test_space_size(self):
        assert max_over_layered(T23, 9).space_size == 2 ** 8

    def test_not_layered(self):
        with pytest.raises(NotLayeredError):
            max_over_layered((2, 4, 1, 3), 6)

    def test_witnesses_are_least_maximizers(self):
        for n in range(4, 11):
            r = max_over_layered(P1243, n)
            vals = {c: count_occurrences_layered((1, 1, 2), c) for c in compositions(n)}
            best = max(vals.values())
            expected = sorted(build_from_blocks(c) for c, v in vals.items() if v == best)[:10]
            assert r.max_count == best and r.witnesses == expected

    def test_workers(self):
        a = max_over_layered(T23, 14, workers=1)
        b = max_over_layered(T23, 14, workers=3)
        assert (a.max_count, a.witnesses) == (b.max_count, b.witnesses)

    def test_restriction_consistency_small(self):
        for m in range(1, 5):
            for c in compositions(m):
                tau = build_from_blocks(c)
                for n in range(m, 8):
                    assert max_over_layered(tau, n).max_count == max_over_all(tau, n).max_count


class TestGk:
    def test_k1(self):
        r = g_k(T23, 10, 1)
        assert r.max_count == 120 and r.witness_blocks() == ["A4,L6"]
        assert r.max_count == max(comb(x, 2) * comb(10 - x, 3) for x in range(11))

    def test_k2_bounded_by_k1(self):
        r = g_k(T23, 10, 2)
        assert r.max_count <= 120
        cand = build_from_blocks((1, 1, 3, 5))
        assert count_occurrences(T23.perm, cand) == 71

    def test_infeasible(self):
        r = g_k(T23, 5, 3)
        assert r.max_count == 0 and r.witnesses == [] and r.metadata["infeasible"]

    def test_requires_two_beta(self):
        with pytest.raises(ValueError):
            g_k(PatternSpec.tau_alpha_alpha(3), 10, 1)

    @pytest.mark.parametrize("beta", [3, 4])
    def test_theorem_gk_le_g1(self, beta):
        spec = PatternSpec.tau_2_beta(beta)
        for n in range(beta + 2, 21):
            g1 = g_k(spec, n, 1)
            assert g1.max_count == g_formula_2beta(n, beta)[0]
            assert all(g1.metadata["optimum_sizes_flag"])
            for k in range(2, n // 2 + 1):
                gk = g_k(spec, n, k)
                if gk.metadata.get("infeasible"):
                    break
                assert gk.max_count <= g1.max_count, (n, k)


class TestRatios:
    def test_identity_pattern_constant(self):
        t = galvin_ratios((1, 2), 6, "exhaustive")
        assert [r.ratio for r in t.rows] == [Fraction(1)] * 5
        assert t.nonincreasing

    def test_1243(self):
        t = galvin_ratios(P1243, 8, "exhaustive")
        assert t.rows[-1].ratio == Fraction(36, 70)
        assert t.nonincreasing

    def test_modes_agree(self):
        ex = galvin_ratios(T23, 9, "exhaustive")
        lay = galvin_ratios(T23, 9, "layered")
        fo = galvin_ratios(T23, 9, "formula")
        assert [r.count for r in ex.rows] == [r.count for r in lay.rows] == [r.count for r in fo.rows]

    def test_formula_alpha_alpha_even_only(self):
        t = galvin_ratios(PatternSpec.tau_alpha_alpha(3), 20, "formula")
        assert [r.n for r in t.rows] == [6, 8, 10, 12, 14, 16, 18, 20]
        assert all(r.count == g_formula_alpha_alpha(r.n, 3) for r in t.rows)
        assert t.nonincreasing

    def test_formula_needs_closed_form(self):
        with pytest.raises(ValueError, match="closed form"):
            galvin_ratios((2, 1, 3), 8, "formula")

    def test_failure_records(self):
        t = RatioTable(T23, "formula", [RatioRow(5, 1, 1), RatioRow(6, 1, 2), RatioRow(7, 1, 1)])
        assert [f["n"] for f in t.failures] == [7]
        assert t.failures[0]["status"] == "FAILURE"

    def test_exhaustive_refusal(self):
        with pytest.raises(ExhaustiveBoundError):
            galvin_ratios(P1243, 12, "exhaustive")

    def test_csv_columns(self):
        text = galvin_ratios(T23, 7, "formula").to_csv()
        assert text.splitlines()[0] == "n,count,binom,ratio_num,ratio_den,ratio_float"
        assert text.splitlines()[-1] == "7,12,21,4,7,0.571428571429"


def test_formula_agreement_with_layered():
    for beta in (2, 3, 4):
        spec = PatternSpec.tau_2_beta(beta)
        for n in range(beta + 2, 15):
            assert max_over_layered(spec, n).max_count == g_formula_2beta(n, beta)[0]
    for alpha in (2, 3):
        spec = PatternSpec.tau_alpha_alpha(alpha)
        for n in range(2 * alpha, 15, 2):
            r = max_over_layered(spec, n)
            assert r.max_count == g_formula_alpha_alpha(n, alpha) == formula_max(spec, n)
            assert f"A{n // 2},L{n // 2}" in r.witness_blocks()


def test_witness_verification_on_construction():
    with pytest.raises(AssertionError):
        SearchResult(P1243, 4, "all", 2, [Permutation((1, 2, 4, 3))], 24)


def test_search_result_serialization():
    r = max_over_all(P1243, 6)
    js = r.to_json()
    assert js["max_count"] == 9 and js["witnesses"][0] == "1 2 3 6 5 4"
    lines = r.to_csv().splitlines()
    assert lines[0] == ",".join(SearchResult.CSV_COLUMNS)
    assert len(lines) == 1 + len(r.witnesses)
