"""Closed forms for the maximum count and packing density of τ_{α,α} and τ_{2,β}."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator

__all__ = [
    "InequalityCheck", "DensityReport",
    "binom_inequality_check", "g_formula_alpha_alpha", "g_formula_2beta",
    "iter_formula_2beta", "density_alpha_alpha", "density_2beta",
    "decimal_string",
]


@dataclass(frozen=True)
class InequalityCheck:
    """C(n,k)·C(m,l) <= C(n,l)·C(m,k) for one (k, l, m, n)."""

    k: int
    l: int
    m: int
    n: int
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def __bool__(self) -> bool:
        return self.holds


def binom_inequality_check(k: int, l: int, m: int, n: int) -> InequalityCheck:
    """Larger sets choosing larger subsets never loses: needs k < l <= m <= n."""
    if k < 0:
        raise ValueError(f"need k >= 0, got k={k}")
    broken = [
        name for name, ok in (("k < l", k < l), ("l <= m", l <= m), ("m <= n", m <= n))
        if not ok
    ]
    if broken:
        raise ValueError(
            f"precondition k < l <= m <= n violated at {', '.join(broken)} "
            f"for (k, l, m, n) = ({k}, {l}, {m}, {n})"
        )
    return InequalityCheck(
        k, l, m, n,
        lhs=comb(n, k) * comb(m, l),
        rhs=comb(n, l) * comb(m, k),
    )


def g_formula_alpha_alpha(total_length: int, alpha: int) -> int:
    """Maximum number of τ_{α,α} in a permutation of even length 2n: C(n, α)^2."""
    if alpha < 2:
        raise ValueError(
            f"alpha must be >= 2 (tau_1,1 = 12 has density 1 and is not covered), got {alpha}"
        )
    if total_length < 0 or total_length % 2:
        raise ValueError(
            f"total_length must be even: the closed form covers lengths 2n only, got {total_length}"
        )
    half = total_length // 2
    return comb(half, alpha) ** 2


def g_formula_2beta(n: int, beta: int) -> tuple[int, int]:
    """max over x of C(x,2)·C(n-x,β), with the smallest maximizing x.

    Every split x in [0..n] is scanned; C(n-x, β) is updated incrementally.
    """
    if beta < 2:
        raise ValueError(f"beta must be >= 2, got {beta}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    best, arg = 0, 0
    right = comb(n - 2, beta) if n >= 2 else 0
    for x in range(2, n + 1):
        r = n - x
        if x > 2:
            # C(r, β) from C(r+1, β)
            right = right * (r + 1 - beta) // (r + 1) if r + 1 > 0 else 0
        if right == 0:
            break
        val = (x * (x - 1) // 2) * right
        if val > best:
            best, arg = val, x
    return best, arg


def _split_value(n: int, x: int, beta: int) -> int:
    if x < 2 or n - x < beta:
        return 0
    return comb(x, 2) * comb(n - x, beta)


def iter_formula_2beta(beta: int, n_min: int, n_max: int) -> Iterator[tuple[int, int, int]]:
    """Yield (n, max count, smallest argmax) for n in [n_min, n_max].

    x -> C(x,2)·C(n-x,β) is log-concave on its support, so a local maximum is
    global; each n starts climbing from the previous argmax instead of
    rescanning all splits.  Agrees with :func:`g_formula_2beta`.
    """
    if beta < 2:
        raise ValueError(f"beta must be >= 2, got {beta}")
    x = 2
    for n in range(max(n_min, 0), n_max + 1):
        if n < beta + 2:
            yield n, 0, 0
            continue
        x = min(max(x, 2), n - beta)
        cur = _split_value(n, x, beta)
        while x + 1 <= n - beta:
            nxt = _split_value(n, x + 1, beta)
            if nxt <= cur:
                break
            x, cur = x + 1, nxt
        while x - 1 >= 2:
            prv = _split_value(n, x - 1, beta)
            if prv < cur:
                break
            x, cur = x - 1, prv
        yield n, cur, x


def decimal_string(value: Fraction, digits: int = 12) -> str:
    """Fixed-point rendering of a nonnegative rational, rounded half up."""
    if value < 0:
        return "-" + decimal_string(-value, digits)
    scale = 10 ** digits
    q = (value.numerator * scale * 2 + value.denominator) // (2 * value.denominator)
    whole, frac = divmod(q, scale)
    if digits == 0:
        return str(whole)
    return f"{whole}.{frac:0{digits}d}"


@dataclass
class DensityReport:
    """Packing density of a pattern family.

    ``numerator``/``denominator`` are the closed form exactly as printed
    (not reduced); ``exact_density`` is the reduced rational.
    """

    family: str
    parameter: int
    numerator: int
    denominator: int
    xi: Fraction | None = None
    convergence: object | None = None  # RatioTable when requested
    digits: int = 12
    extra: dict = field(default_factory=dict)

    @property
    def exact_density(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def float_density(self) -> str:
        return decimal_string(self.exact_density, self.digits)

    def to_json(self) -> dict:
        out = {
            "num": self.numerator,
            "den": self.denominator,
            "float": self.float_density,
        }
        if self.xi is not None:
            out["xi_num"] = self.xi.numerator
            out["xi_den"] = self.xi.denominator
        if self.convergence is not None:
            out["convergence"] = self.convergence.to_json()
        return out


def density_alpha_alpha(alpha: int, digits: int = 12) -> DensityReport:
    """ρ(τ_{α,α}) = C(2α, α) / 4^α; the maximizer splits evenly, so ξ = 1/2."""
    if alpha < 2:
        raise ValueError(
            f"alpha must be >= 2 (tau_1,1 = 12 has density 1, not C(2,1)/4), got {alpha}"
        )
    return DensityReport(
        family="aa", parameter=alpha,
        numerator=comb(2 * alpha, alpha), denominator=4 ** alpha,
        xi=Fraction(1, 2), digits=digits,
    )


def density_2beta(beta: int, converge_to: int | None = None, digits: int = 12) -> DensityReport:
    """ρ(τ_{2,β}) = C(β+2, 2)·(2/(β+2))^2·(β/(β+2))^β, with ξ = 2/(β+2).

    Over a common denominator the closed form is
    C(β+2, 2)·4·β^β / (β+2)^(β+2), which is what ``numerator`` and
    ``denominator`` hold.
    """
    if beta < 2:
        raise ValueError(f"beta must be >= 2, got {beta}")
    report = DensityReport(
        family="2b", parameter=beta,
        numerator=comb(beta + 2, 2) * 4 * beta ** beta,
        denominator=(beta + 2) ** (beta + 2),
        xi=Fraction(2, beta + 2), digits=digits,
    )
    if converge_to is not None:
        from .core import PatternSpec
        from .search import galvin_ratios

        report.convergence = galvin_ratios(PatternSpec.tau_2_beta(beta), converge_to, mode="formula")
    return report
