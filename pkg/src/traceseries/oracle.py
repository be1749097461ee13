"""Independent ground truth: constant-term integration and desk-checkable formulas.

Nothing here uses spanning trees or cycle denominators; the torus integral is
computed by expanding every denominator factor as a geometric series and
keeping the z-free part.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .exactpoly import (
    GRADING, ONE, ONE_POLY, ZERO, Monomial, Polynomial, TruncatedSeries, VarId,
    _collect_vars, _dense, _sparse, geometric_expand, t, z,
)
from .schur import Partition, lambda_plus, partitions_up_to, schur_eval

log = logging.getLogger(__name__)


def molien_series_truncated(integrand, cap: int, include_torus_free: bool = True) -> TruncatedSeries:
    """Constant term in z of numerator / prod factors, divided by the measure normalization.

    ``integrand`` needs ``numerator`` (Polynomial), ``factors`` (sequence of
    (Monomial, multiplicity)) and ``normalization`` (int).  With
    ``include_torus_free=False`` the z-free factors are left out, which is how
    the reconstruction path keeps loop factors symbolic.
    """
    if cap < 0:
        raise ValueError("degree cap must be non-negative")
    torus_factors = [(m, e) for m, e in integrand.factors if m.has_torus()]
    free_factors = [(m, e) for m, e in integrand.factors if not m.has_torus()]

    variables = _collect_vars(list(integrand.numerator) + [m for m, _ in torus_factors])
    index = {v: i for i, v in enumerate(variables)}
    nv = len(variables)
    gmask = [v.sort == GRADING for v in variables]
    tpos = [i for i, v in enumerate(variables) if v.sort != GRADING]

    # apply factors touching the lowest torus variables first so those can be eliminated early
    def order_key(me):
        m = me[0]
        return (min(v.index[0] for v in m.variables() if v.sort != GRADING), str(m))

    torus_factors.sort(key=order_key)
    steps = []
    for m, e in torus_factors:
        vec = _dense(m, index, nv)
        gd = m.grading_degree
        if gd <= 0:
            raise ValueError(f"factor 1 - {m} has no grading content")
        steps.extend([(vec, gd, sum(abs(vec[i]) for i in tpos))] * e)

    last_use = {}
    for k, (vec, _, _) in enumerate(steps):
        for i in tpos:
            if vec[i]:
                last_use[i] = k
    # torus variables of the numerator that no factor touches must already be zero
    idle = [i for i in tpos if i not in last_use]

    def gdeg(vec):
        return sum(x for x, g in zip(vec, gmask) if g)

    work: Dict[Tuple[int, ...], object] = {}
    for m, c in integrand.numerator.items():
        if m.grading_degree <= cap:
            vec = _dense(m, index, nv)
            if any(vec[i] for i in idle):
                continue
            work[vec] = work.get(vec, 0) + c

    # maximal torus L1 change per unit of grading degree among the factors still to come
    rates = [0] * (len(steps) + 1)
    for k in range(len(steps) - 1, -1, -1):
        vec, gd, l1 = steps[k]
        rates[k] = max(rates[k + 1], Fraction(l1, gd))

    for k, (step, sd, _) in enumerate(steps):
        out: Dict[Tuple[int, ...], object] = {}
        for v in sorted(work, key=gdeg):
            c = work[v]
            d = gdeg(v)
            while d <= cap:
                s = out.get(v, 0) + c
                if s:
                    out[v] = s
                else:
                    out.pop(v, None)
                v = tuple(x + y for x, y in zip(v, step))
                d += sd
        done = [i for i in tpos if last_use.get(i) == k]
        rate = rates[k + 1]
        work = {}
        for v, c in out.items():
            if any(v[i] for i in done):
                continue
            l1 = sum(abs(v[i]) for i in tpos)
            if l1 and l1 > rate * (cap - gdeg(v)):
                continue
            work[v] = c
    terms = {}
    for v, c in work.items():
        if any(v[i] for i in tpos):
            continue
        terms[_sparse(v, variables)] = c
    poly = Polynomial(terms)
    if include_torus_free and free_factors:
        poly = geometric_expand(poly, free_factors, cap)
    norm = getattr(integrand, "normalization", 1)
    if norm != 1:
        poly = poly * Fraction(1, norm)
    return TruncatedSeries(poly, cap)


def full_weyl_denominator(n: int) -> Polynomial:
    """prod over i != j of (1 - z_i/z_j)."""
    out = ONE_POLY
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                out = out * (ONE_POLY - Polynomial.mono(Monomial([(z(i), 1), (z(j), -1)])))
    return out


def schur_orthogonality_check(lam: Sequence[int], mu: Sequence[int], n: int) -> Fraction:
    """Constant term of S_lam(z) S_mu(1/z) prod_{i!=j}(1 - z_i/z_j) / n!."""
    lam, mu = Partition(lam), Partition(mu)
    if lam.height > n or mu.height > n:
        raise ValueError("partition height exceeds the number of torus variables")
    zs = [z(i) for i in range(1, n + 1)]
    inv = {v: Monomial.var(v, -1) for v in zs}
    integrand = schur_eval(lam, zs) * schur_eval(mu, zs).substitute(inv) * full_weyl_denominator(n)
    return Fraction(integrand.coefficient(ONE), factorial(n))


# flows --------------------------------------------------------------------


@dataclass(frozen=True)
class FlowMatrix:
    c: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.c)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("flow matrix must be square")
        if any(x < 0 for r in rows for x in r):
            raise ValueError("flow entries must be non-negative")
        object.__setattr__(self, "c", rows)

    @property
    def n(self) -> int:
        return len(self.c)

    def balanced(self) -> bool:
        n = self.n
        return all(sum(self.c[u][v] for v in range(n)) == sum(self.c[v][u] for v in range(n)) for u in range(n))

    def monomial(self, alpha: int = 1) -> Monomial:
        n = self.n
        return Monomial([(t(u + 1, v + 1, alpha), self.c[u][v]) for u in range(n) for v in range(n) if self.c[u][v]])


def flow_coefficient(c: FlowMatrix) -> int:
    """1 for a balanced (conserving) flow on the complete digraph with loops, else 0."""
    return 1 if c.balanced() else 0


# first example: blocks (n, 1), off-diagonal generators only ----------------


def example1_variables(p: int, q: int) -> Tuple[List[VarId], List[VarId]]:
    return [t(1, 2, a) for a in range(1, p + 1)], [t(2, 1, b) for b in range(1, q + 1)]


def mixed_multiplicity(lam: Sequence[int], mu: Sequence[int], n: int, corrected: bool = False) -> int:
    """m(lam, mu) for the mixed first example.

    The default reproduces the published rule.  ``corrected=True`` adds the
    delta(lam, mu) contributed by the constant term of (w + sum z)(1/w + sum 1/z),
    which the published rule omits.
    """
    lam, mu = Partition(lam), Partition(mu)
    if lam.height > n or mu.height > n:
        return 0
    lp, mp = lambda_plus(lam, n), lambda_plus(mu, n)
    if lam in mp or mu in lp:
        return 1
    if lam.size == mu.size:
        return len(set(lp) & set(mp)) + (1 if corrected and lam == mu else 0)
    return 0


def example1_series(n: int, p: int, q: int, cap: int, kind: str = "pure", corrected: bool = False) -> TruncatedSeries:
    tv, uv = example1_variables(p, q)
    poly = ZERO
    if kind == "pure":
        for lam in partitions_up_to(cap // 2, max_height=min(n, p, q)):
            poly = poly + schur_eval(lam, tv) * schur_eval(lam, uv)
    elif kind == "mixed":
        lams = partitions_up_to(cap, max_height=min(n, p))
        mus = partitions_up_to(cap, max_height=min(n, q))
        for lam in lams:
            for mu in mus:
                if lam.size + mu.size > cap:
                    continue
                m = mixed_multiplicity(lam, mu, n, corrected)
                if m:
                    poly = poly + schur_eval(lam, tv) * schur_eval(mu, uv) * m
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return TruncatedSeries(poly, cap)


# trace monomials ------------------------------------------------------------

Matrix = List[List[Fraction]]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if len(a[0]) != len(b):
        raise ValueError("matrix size mismatch")
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    m = [list(map(Fraction, row)) + identity(n)[i] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def cycles_to_perm(cycles: Sequence[Sequence[int]], k: int) -> Tuple[int, ...]:
    """1-based cycle notation to a 1-based image tuple: perm[i-1] = sigma(i)."""
    perm = list(range(1, k + 1))
    seen = set()
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            if a in seen or not 1 <= a <= k:
                raise ValueError(f"bad cycle decomposition {cycles}")
            seen.add(a)
            perm[a - 1] = b
    return tuple(perm)


def perm_cycles(perm: Sequence[int]) -> List[List[int]]:
    seen, out = set(), []
    for i in range(1, len(perm) + 1):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j - 1]
        out.append(cyc)
    return out


def perm_sign(perm: Sequence[int]) -> int:
    return (-1) ** sum(len(c) - 1 for c in perm_cycles(perm))


@dataclass
class TraceMonomialSpec:
    """sigma (1-based image tuple) with one attached matrix per slot."""

    sigma: Tuple[int, ...]
    attachments: Optional[List[Matrix]] = None

    @classmethod
    def from_cycles(cls, cycles, k, attachments=None):
        return cls(cycles_to_perm(cycles, k), attachments)

    def __post_init__(self):
        k = len(self.sigma)
        if sorted(self.sigma) != list(range(1, k + 1)):
            raise ValueError(f"{self.sigma} is not a permutation")
        if self.attachments is not None:
            if len(self.attachments) != k:
                raise ValueError("one attachment per slot required")
            sizes = {len(a) for a in self.attachments} | {len(r) for a in self.attachments for r in a}
            if len(sizes) != 1:
                raise ValueError("attachments must be square and of equal size")


def trace_monomial_eval(spec: TraceMonomialSpec, xs: Sequence[Matrix]) -> Fraction:
    """prod over cycles (i1 .. ia) of sigma^{-1} of tr(y_i1 ... y_ia), y_m = x_m a_m."""
    k = len(spec.sigma)
    if len(xs) != k:
        raise ValueError(f"expected {k} matrices, got {len(xs)}")
    size = len(xs[0])
    if any(len(x) != size or any(len(r) != size for r in x) for x in xs):
        raise ValueError("matrix size mismatch")
    if spec.attachments is not None:
        if len(spec.attachments[0]) != size:
            raise ValueError("attachment size does not match the matrices")
        ys = [matmul(x, a) for x, a in zip(xs, spec.attachments)]
    else:
        ys = list(xs)
    inv = [0] * k
    for i, s in enumerate(spec.sigma, 1):
        inv[s - 1] = i
    out = Fraction(1)
    for cyc in perm_cycles(inv):
        prod = ys[cyc[0] - 1]
        for j in cyc[1:]:
            prod = matmul(prod, ys[j - 1])
        out *= trace(prod)
    return out


def cayley_hamilton_value(xs: Sequence[Matrix]) -> Fraction:
    """C_k(x_1..x_k) = sum over sigma in S_k of sign(sigma) tr_sigma."""
    k = len(xs)
    total = Fraction(0)
    for perm in permutations(range(1, k + 1)):
        total += perm_sign(perm) * trace_monomial_eval(TraceMonomialSpec(perm), xs)
    return total


def random_matrix(rng: random.Random, n: int, bound: int = 5) -> Matrix:
    return [[Fraction(rng.randint(-bound, bound)) for _ in range(n)] for _ in range(n)]


@dataclass
class CayleyHamiltonReport:
    n: int
    seed: int
    trials: int
    zero_on_size_n: bool
    witness_value: Optional[Fraction]

    @property
    def passed(self) -> bool:
        return self.zero_on_size_n and bool(self.witness_value)


def cayley_hamilton_check(n: int, trials: int = 20, seed: int = 0) -> CayleyHamiltonReport:
    """C_{n+1} must vanish on n x n matrices and must not vanish identically on (n+1) x (n+1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    log.info("cayley-hamilton check n=%d seed=%d", n, seed)
    zero = True
    for _ in range(trials):
        xs = [random_matrix(rng, n) for _ in range(n + 1)]
        if cayley_hamilton_value(xs) != 0:
            zero = False
            break
    witness = None
    for _ in range(max(trials, 1)):
        xs = [random_matrix(rng, n + 1) for _ in range(n + 1)]
        val = cayley_hamilton_value(xs)
        if val:
            witness = val
            break
    return CayleyHamiltonReport(n, seed, trials, zero, witness)
