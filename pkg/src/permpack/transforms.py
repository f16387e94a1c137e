"""Structural rewrites of layered permutations for the pattern τ_{2,β}.

Every rewrite recounts occurrences on both sides with the layered counter.
The two rewrites that come with symbolic bookkeeping (moving a point from
the antilayer into the last layer, and merging A₁L₁ into one antilayer)
check that bookkeeping against the recount and raise
:class:`FormulaMismatchError` if they ever disagree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .core import ANTILAYER, LAYER, BlockStructure, count_occurrences_layered

__all__ = [
    "FormulaMismatchError", "NotNormalFormError", "RewriteOutcome",
    "normal_form", "from_normal_form", "count_2beta", "asc2",
    "absorb_isolated_points", "push_antilayers_left", "sort_layers",
    "move_point_A1_to_Lk", "merge_A1L1",
]


class FormulaMismatchError(AssertionError):
    """A symbolic count delta disagreed with the recount."""


class NotNormalFormError(ValueError):
    pass


def count_2beta(sizes, beta: int) -> int:
    """g(τ_{2,β}, σ) for σ given by its layer sizes."""
    return count_occurrences_layered((1, 1, beta), sizes)


def asc2(sizes) -> int:
    """Number of ascending pairs in a layered permutation."""
    total = sum(sizes)
    return (total * total - sum(s * s for s in sizes)) // 2


@dataclass
class RewriteOutcome:
    before: BlockStructure
    after: BlockStructure
    count_before: int
    count_after: int
    formula_delta: int | None = None
    hypothesis_satisfied: bool = True
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.formula_delta is not None and self.delta != self.formula_delta:
            raise FormulaMismatchError(
                f"{self.before} -> {self.after}: recount delta {self.delta} "
                f"!= symbolic delta {self.formula_delta}"
            )

    @property
    def delta(self) -> int:
        return self.count_after - self.count_before

    @property
    def changed(self) -> bool:
        return self.before.layer_sizes() != self.after.layer_sizes()

    RECORD_FIELDS = (
        "before", "after", "count_before", "count_after",
        "formula_delta", "hypothesis_satisfied",
    )

    def to_record(self) -> dict:
        return {
            "before": str(self.before),
            "after": str(self.after),
            "count_before": self.count_before,
            "count_after": self.count_after,
            "formula_delta": self.formula_delta,
            "hypothesis_satisfied": self.hypothesis_satisfied,
        }


def _check_beta(beta: int, least: int = 2) -> None:
    if beta < least:
        raise ValueError(f"beta must be >= {least}, got {beta}")


def _outcome(before_sizes, after_sizes, beta, **kw) -> RewriteOutcome:
    return RewriteOutcome(
        before=BlockStructure.from_composition(before_sizes),
        after=BlockStructure.from_composition(after_sizes),
        count_before=count_2beta(before_sizes, beta),
        count_after=count_2beta(after_sizes, beta),
        **kw,
    )


def _sizes(b) -> tuple[int, ...]:
    return b.layer_sizes() if isinstance(b, BlockStructure) else tuple(b)


def normal_form(b) -> tuple[int, tuple[int, ...]] | None:
    """Split ``A₁ L₁ … L_k`` into (|A₁|, layer sizes), or None if ``b`` is not
    a leading run of singletons followed only by layers of size >= 2."""
    sizes = _sizes(b)
    a = 0
    while a < len(sizes) and sizes[a] == 1:
        a += 1
    layers = sizes[a:]
    if any(s < 2 for s in layers):
        return None
    return a, layers


def from_normal_form(a: int, layers) -> BlockStructure:
    return BlockStructure.from_composition((1,) * a + tuple(layers))


def _require_normal_form(b, op: str) -> tuple[int, tuple[int, ...]]:
    nf = normal_form(b)
    if nf is None:
        raise NotNormalFormError(
            f"{op} needs the form A1 L1 ... Lk (one leading antilayer, then layers of size >= 2); "
            f"got {BlockStructure.from_composition(_sizes(b))}. Apply push_antilayers_left first."
        )
    return nf


def _isolated_index(blocks: list[tuple[str, int]]) -> int | None:
    for i in range(1, len(blocks) - 1):
        kind, size = blocks[i]
        if kind == LAYER and size == 1:
            lk, ls = blocks[i - 1]
            rk, rs = blocks[i + 1]
            if lk == LAYER and ls >= 2 and rk == LAYER and rs >= 2:
                return i
    return None


def absorb_isolated_points(b, beta: int) -> RewriteOutcome:
    """Move every isolated point left past its neighbouring layers until it
    joins an antilayer or reaches the front."""
    _check_beta(beta)
    sizes = _sizes(b)
    cur = BlockStructure.from_composition(sizes)
    steps = 0
    while True:
        blocks = [(blk.kind, blk.size) for blk in cur.blocks]
        i = _isolated_index(blocks)
        if i is None:
            break
        blocks[i - 1], blocks[i] = blocks[i], blocks[i - 1]
        expanded = [s for kind, size in blocks for s in ((1,) * size if kind == ANTILAYER else (size,))]
        cur = BlockStructure.from_composition(expanded)
        steps += 1
    out = _outcome(sizes, cur.layer_sizes(), beta)
    out.details["swaps"] = steps
    return out


def push_antilayers_left(b, beta: int) -> RewriteOutcome:
    """Swap antilayers (and lone singletons) leftward past layers until all
    singleton mass forms one leading antilayer.

    Adjacent swaps never reorder the layers among themselves, so the result
    is the singletons gathered in front of the layers in their original order.
    """
    _check_beta(beta)
    sizes = _sizes(b)
    ones = sum(1 for s in sizes if s == 1)
    layers = tuple(s for s in sizes if s >= 2)
    return _outcome(sizes, (1,) * ones + layers, beta)


def sort_layers(b, beta: int) -> RewriteOutcome:
    """Stable sort of the layers of ``A₁ L₁ … L_k`` into nondecreasing size."""
    _check_beta(beta)
    sizes = _sizes(b)
    a, layers = _require_normal_form(sizes, "sort_layers")
    out = _outcome(sizes, (1,) * a + tuple(sorted(layers)), beta)
    # each adjacent swap of L_i > L_{i+1} changes only the occurrences whose
    # β-layer lies in one of the two; record the prefix data it depends on
    out.details["asc2_prefix_per_layer"] = [
        asc2((1,) * a + layers[:i]) for i in range(len(layers))
    ]
    return out


def move_point_A1_to_Lk(b, beta: int) -> RewriteOutcome:
    """Take the last element of A₁ and make it the top of L_k.

    Reports the loss (as the four-term sum and the two-term sum, which must
    agree) and the gain, both from block sizes alone.  The hypothesis flag is
    |A₁| > |L_k| >= β >= 3 with layers sorted.
    """
    _check_beta(beta)
    sizes = _sizes(b)
    a, layers = _require_normal_form(sizes, "move_point_A1_to_Lk")
    k = len(layers)
    if k == 0:
        raise ValueError(f"move_point_A1_to_Lk needs at least one layer, got {from_normal_form(a, layers)}")
    if a < 2:
        raise ValueError(
            f"move_point_A1_to_Lk needs |A1| >= 2 (the move would empty the antilayer), got |A1|={a}"
        )
    lk = layers[-1]
    head = layers[:-1]
    c_lk_b = comb(lk, beta)
    c_lk_b1 = comb(lk, beta - 1)

    pairs_head = sum(head[i] * comb(head[j], beta) for i in range(k - 1) for j in range(i + 1, k - 1))
    loss_terms = [
        (a - 1) * sum(comb(s, beta) for s in head),
        (a - 1) * c_lk_b,
        pairs_head,
        sum(head) * c_lk_b,
    ]
    loss = sum(loss_terms)
    loss_two_term = (a - 1) * sum(comb(s, beta) for s in layers) + sum(
        layers[i] * comb(layers[j], beta) for i in range(k) for j in range(i + 1, k)
    )
    if loss != loss_two_term:
        raise FormulaMismatchError(f"loss forms disagree: {loss} != {loss_two_term}")

    head_pairs = sum(head[i] * head[j] for i in range(k - 1) for j in range(i + 1, k - 1))
    gain_terms = [
        (a - 1) * sum(head) * c_lk_b1,
        comb(a - 1, 2) * c_lk_b1,
        head_pairs * c_lk_b1,
    ]
    gain = sum(gain_terms)

    is_sorted = list(layers) == sorted(layers)
    hyp = is_sorted and a > lk >= beta >= 3
    out = _outcome(
        sizes, (1,) * (a - 1) + head + (lk + 1,), beta,
        formula_delta=gain - loss, hypothesis_satisfied=hyp,
    )
    out.details.update(
        loss=loss, gain=gain, net=gain - loss,
        loss_terms=loss_terms, gain_terms=gain_terms, sorted=is_sorted,
    )
    return out


def merge_A1L1(b, beta: int) -> RewriteOutcome:
    """Replace A₁ L₁ by one antilayer of size |A₁| + |L₁|.

    With σ* the remaining layers, the loss Λ and gain Γ are computed in full
    (they involve g(τ_{0,β}, σ*) and g(τ_{1,β}, σ*)); the net must equal
    g(τ_{0,β}, σ*)·C(|L₁|, 2) − C(|A₁|, 2)·C(|L₁|, β).  The hypothesis flag
    is: layers sorted, |L_k| >= |A₁|, β >= 3.
    """
    _check_beta(beta)
    sizes = _sizes(b)
    a, layers = _require_normal_form(sizes, "merge_A1L1")
    if len(layers) < 2:
        raise ValueError(
            f"merge_A1L1 needs a nonempty remainder after A1 L1, got {from_normal_form(a, layers)}"
        )
    l1, rest = layers[0], layers[1:]
    g0 = count_occurrences_layered((beta,), rest)
    g1 = count_occurrences_layered((1, beta), rest)
    lam = comb(a, 2) * comb(l1, beta) + g0 * (comb(a, 2) + a * l1) + g1 * (a + l1)
    gam = g0 * comb(a + l1, 2) + g1 * (a + l1)
    net = g0 * comb(l1, 2) - comb(a, 2) * comb(l1, beta)
    if gam - lam != net:
        raise FormulaMismatchError(
            f"full Gamma - Lambda = {gam - lam} but simplified form gives {net}"
        )
    is_sorted = list(layers) == sorted(layers)
    hyp = is_sorted and layers[-1] >= a and beta >= 3
    out = _outcome(sizes, (1,) * (a + l1) + rest, beta, formula_delta=net, hypothesis_satisfied=hyp)
    out.details.update(
        Gamma=gam, Lambda=lam, net=net, g_tau0=g0, g_tau1=g1, sorted=is_sorted,
    )
    return out
