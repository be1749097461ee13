"""Molien-Weyl integrands for block trace rings and their exact evaluation.

Two evaluators are provided.  ``evaluate_tree_sum`` sums over spanning
in-trees rooted at v1 with fundamental-cycle denominators.
``evaluate_by_reconstruction`` takes the product of all simple-cycle factors
as denominator and recovers the numerator from the constant-term oracle,
checking the residual over a margin of extra degrees.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Dict, Tuple

from .errors import ReconstructionResidualError, TreeFormulaInapplicable
from .exactpoly import (
    ONE_POLY, ZERO, Monomial, Polynomial, RationalSeries, TruncatedSeries, VarId,
    divide_by_one_minus, mul_truncated, specialize, t, z,
)
from .oracle import molien_series_truncated
from .quiver import (
    BlockQuiver, BlockStructure, build_quiver, fundamental_cycle, simple_cycles,
    spanning_in_trees, tree_substitution,
)

log = logging.getLogger(__name__)

PURE = "pure"
MIXED = "mixed"


@dataclass(frozen=True)
class Integrand:
    numerator: Polynomial
    factors: Tuple[Tuple[Monomial, int], ...]
    block_structure: BlockStructure
    quiver: BlockQuiver
    kind: str = PURE
    distinct_labels: bool = True
    repeat: int = 1

    @property
    def normalization(self) -> int:
        return prod(factorial(s) for s in self.block_structure.block_sizes)


def _ratio(u: int, v: int) -> Monomial:
    return Monomial([(z(u), 1), (z(v), -1)])


def weyl_product(bs: BlockStructure) -> Polynomial:
    """K: prod over i != j in the same block of (1 - z_i/z_j)."""
    out = ONE_POLY
    for rng in bs.block_ranges():
        for i in rng:
            for j in rng:
                if i != j:
                    out = out * (ONE_POLY - Polynomial.mono(_ratio(i, j)))
    return out


def conjugation_character(n: int) -> Polynomial:
    """sum over u, v of z_u/z_v."""
    return Polynomial({_ratio(u, v): 1 for u in range(1, n + 1) for v in range(1, n + 1) if u != v}) + n


def build_integrand(bs: BlockStructure, kind: str = PURE, distinct_labels: bool = True, repeat: int = 1) -> Integrand:
    if kind not in (PURE, MIXED):
        raise ValueError(f"unknown kind {kind!r}")
    q = build_quiver(bs, distinct_labels, repeat)
    numerator = weyl_product(bs)
    if kind == MIXED:
        numerator = numerator * conjugation_character(bs.n)
    fac: Dict[Monomial, int] = {}
    for e in q.edges:
        m = _ratio(e.tail, e.head) * Monomial.var(e.label)
        fac[m] = fac.get(m, 0) + 1
    for label in q.loops:
        m = Monomial.var(label)
        fac[m] = fac.get(m, 0) + 1
    return Integrand(numerator, tuple(fac.items()), bs, q, kind, distinct_labels, repeat)


def label_specialization(bs: BlockStructure) -> Dict[VarId, Monomial]:
    """t(u, v, alpha) -> t(gamma(u, v), alpha) for every position label."""
    out = {}
    for u in range(1, bs.n + 1):
        for v in range(1, bs.n + 1):
            a, b = bs.gamma(u, v)
            for alpha in range(1, bs.k(a, b) + 1):
                out[t(u, v, alpha)] = Monomial.var(t(a, b, alpha))
    return out


# spanning-tree evaluation -------------------------------------------------


def _orient(m: Monomial) -> Tuple[Monomial, bool]:
    """Pick the representative of {m, 1/m} used as a denominator key; True if m was inverted."""
    if m.all_positive():
        return m, False
    inv = m.inverse()
    if inv.all_positive():
        return inv, True
    if m.degree > 0:
        return m, False
    if m.degree < 0:
        return inv, True
    first = m.items()[0][1]
    return (m, False) if first > 0 else (inv, True)


def _one_minus(m: Monomial) -> Polynomial:
    return ONE_POLY - Polynomial.mono(m)


def tree_terms(integrand: Integrand, root: int = 1):
    """(tree, numerator|T, {oriented monomial: multiplicity}) for every in-tree."""
    q = integrand.quiver
    out = []
    for tree in spanning_in_trees(q, root):
        sub = tree_substitution(tree, q.n)
        num = integrand.numerator.substitute(sub)
        den: Dict[Monomial, int] = {}
        for e in q.edges:
            if e in tree.tree_edges:
                continue
            w = fundamental_cycle(e, tree).weight
            if w.is_one():
                raise TreeFormulaInapplicable(f"edge {e} closes a cycle of weight 1 with the tree (repeated labels)")
            key, flipped = _orient(w)
            if flipped:
                # 1 - w = -w (1 - 1/w)
                num = (-num).scale_monomial(w.inverse())
            den[key] = den.get(key, 0) + 1
        out.append((tree, num, den))
    return out


def evaluate_tree_sum(integrand: Integrand, root: int = 1) -> RationalSeries:
    """Sum over in-trees T of (f K)|T / prod_{e not in T} (1 - t^{C(e,T)}), times the loop factors.

    Raises TreeFormulaInapplicable when the sum is not a power series in the
    grading variables, which happens for non-trivial K.
    """
    terms = tree_terms(integrand, root)
    common: Dict[Monomial, int] = {}
    for _, _, den in terms:
        for m, e in den.items():
            common[m] = max(common.get(m, 0), e)
    total = ZERO
    for _, num, den in terms:
        part = num
        for m, e in common.items():
            extra = e - den.get(m, 0)
            if extra:
                part = part * _one_minus(m) ** extra
        total = total + part
    # cancel every binomial that the sum's numerator absorbs
    remaining: Dict[Monomial, int] = {}
    for m in sorted(common, key=lambda m: (m.all_positive(), str(m))):
        e = common[m]
        while e:
            quo = divide_by_one_minus(total, m)
            if quo is None:
                break
            total = quo
            e -= 1
        if e:
            remaining[m] = e
    bad = [m for m in remaining if not m.all_positive()]
    if bad:
        raise TreeFormulaInapplicable(f"tree sum keeps non-cycle denominator factors {[str(m) for m in bad]}")
    if total.has_negative_exponents():
        raise TreeFormulaInapplicable("tree sum numerator keeps negative grading exponents")
    for m, e in integrand.factors:
        if not m.has_torus():
            remaining[m] = remaining.get(m, 0) + e
    return RationalSeries(total, remaining, Fraction(1, integrand.normalization))


# reconstruction -----------------------------------------------------------


def cycle_denominator(integrand: Integrand) -> Dict[Monomial, int]:
    out: Dict[Monomial, int] = {}
    for c in simple_cycles(integrand.quiver):
        w = c.weight
        out[w] = out.get(w, 0) + 1
    return out


def evaluate_by_reconstruction(integrand: Integrand, margin: int = 3) -> RationalSeries:
    """Denominator from simple cycles and loops; numerator from the oracle truncation."""
    cyc = cycle_denominator(integrand)
    deg_d = sum(m.degree * e for m, e in cyc.items())
    cap = deg_d + margin
    series = molien_series_truncated(integrand, cap, include_torus_free=False)
    den = ONE_POLY
    for m, e in cyc.items():
        den = den * _one_minus(m) ** e
    product = mul_truncated(den, series.poly, cap)
    numerator = product.truncate(deg_d)
    residual = product - numerator
    if not residual.is_zero():
        worst = min(m.grading_degree for m in residual)
        raise ReconstructionResidualError(
            f"cycle denominator of degree {deg_d} leaves a nonzero residual in degree {worst}", worst)
    fac = dict(cyc)
    for m, e in integrand.factors:
        if not m.has_torus():
            fac[m] = fac.get(m, 0) + e
    return RationalSeries(numerator, fac)


# pipeline -----------------------------------------------------------------


def evaluate(integrand: Integrand, method: str = "auto", margin: int = 3) -> RationalSeries:
    if method == "tree":
        return evaluate_tree_sum(integrand)
    if method == "reconstruct":
        return evaluate_by_reconstruction(integrand, margin)
    if method == "auto":
        if integrand.kind == PURE:
            try:
                return evaluate_tree_sum(integrand)
            except TreeFormulaInapplicable as exc:
                log.info("tree formula inapplicable (%s); using reconstruction", exc)
        return evaluate_by_reconstruction(integrand, margin)
    raise ValueError(f"unknown method {method!r}")


def poincare_series(bs: BlockStructure, kind: str = PURE, method: str = "auto", margin: int = 3,
                    block_labels: bool = True) -> RationalSeries:
    """Evaluate with position labels t(u,v,alpha), then specialize to t(gamma(u,v),alpha)."""
    series = evaluate(build_integrand(bs, kind, distinct_labels=True), method, margin)
    if block_labels and not bs.is_diagonal_idempotent():
        series = specialize(series, label_specialization(bs))
    return series


def poincare_truncated(bs: BlockStructure, kind: str = PURE, cap: int = 6, block_labels: bool = True) -> TruncatedSeries:
    """Oracle-only path; uses block labels directly when asked for them."""
    return molien_series_truncated(build_integrand(bs, kind, distinct_labels=not block_labels), cap)


def repeat_specialization(a: int, b: int, k: int) -> Dict[VarId, Monomial]:
    """t(i, j, (m-1)k + alpha) -> t(i, j, alpha)."""
    out = {}
    for i in range(1, a + 1):
        for j in range(1, a + 1):
            for m in range(1, b + 1):
                for alpha in range(1, k + 1):
                    out[t(i, j, (m - 1) * k + alpha)] = Monomial.var(t(i, j, alpha))
    return out


def block_repeat_series(a: int, b: int, k: int, kind: str = PURE, method: str = "auto", margin: int = 3,
                        block_labels: bool = False) -> RationalSeries:
    """P(a, b, k): the a x a, bk-generic series with copy index m identified away.

    The result is in position labels t(i,j,alpha), which is only a formal
    series when a > 1 (coefficients may be negative).  ``block_labels``
    collapses every position to t(1,1,alpha), giving the actual Poincare series.
    """
    if a < 1 or b < 1 or k < 1:
        raise ValueError("a, b, k must be positive")
    bs = BlockStructure.uniform((a,), b * k)
    series = poincare_series(bs, kind, method, margin, block_labels=False)
    series = specialize(series, repeat_specialization(a, b, k))
    if block_labels:
        series = specialize(series, label_specialization(BlockStructure.uniform((a,), k)))
    return series


def block_repeat_integrand(a: int, b: int, k: int, kind: str = PURE, block_labels: bool = False) -> Integrand:
    """The multiplicity-b integrand: every factor (1 - (z_i/z_j) t(i,j,alpha)) raised to b."""
    return build_integrand(BlockStructure.uniform((a,), k), kind, distinct_labels=not block_labels, repeat=b)
