"""Partitions and exact Schur polynomials.

Schur polynomials are built by the branching rule: the cells holding the
largest entry of a semistandard tableau form a horizontal strip, so

    S_lam(x_1..x_m) = sum over horizontal strips lam/mu of S_mu(x_1..x_{m-1}) x_m^{|lam/mu|}

which enumerates tableaux by content without materialising them.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Dict, Iterator, List, Sequence, Tuple

from .exactpoly import (
    ONE_POLY, ZERO, Monomial, Polynomial, TruncatedSeries, VarId, mul_truncated,
)


class Partition(tuple):
    """Weakly decreasing tuple of positive integers."""

    def __new__(cls, parts: Sequence[int] = ()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        return super().__new__(cls, parts)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        text = text.strip().strip("()[] ")
        if not text:
            return cls(())
        return cls(int(x) for x in text.split(","))

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def height(self) -> int:
        return len(self)

    def __str__(self):
        return "(" + ",".join(str(p) for p in self) + ")"

    def __repr__(self):
        return f"Partition{str(self)}"

    def dominates(self, other: "Partition") -> bool:
        a = b = 0
        for i in range(max(len(self), len(other))):
            a += self[i] if i < len(self) else 0
            b += other[i] if i < len(other) else 0
            if a < b:
                return False
        return True


def partitions_of(n: int, max_height: int = None, max_part: int = None) -> Iterator[Partition]:
    """Partitions of n in reverse lexicographic order (largest first part first)."""
    if max_part is None:
        max_part = n
    if max_height is None:
        max_height = n

    def rec(rem, cap, h):
        if rem == 0:
            yield ()
            return
        if h == 0:
            return
        for p in range(min(rem, cap), 0, -1):
            for rest in rec(rem - p, p, h - 1):
                yield (p,) + rest

    for parts in rec(n, max_part, max_height):
        yield Partition(parts)


def partitions_up_to(n: int, max_height: int = None) -> List[Partition]:
    out = []
    for k in range(n + 1):
        out.extend(partitions_of(k, max_height))
    return out


def _horizontal_strips(lam: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
    """All mu with lam/mu a horizontal strip: lam[i+1] <= mu[i] <= lam[i]."""
    ranges = []
    for i, p in enumerate(lam):
        low = lam[i + 1] if i + 1 < len(lam) else 0
        ranges.append(range(low, p + 1))
    for mu in product(*ranges):
        yield tuple(x for x in mu if x)


@lru_cache(maxsize=None)
def _schur_dense(lam: Tuple[int, ...], m: int) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    if len(lam) > m:
        return ()
    if m == 0:
        return (((), 1),) if not lam else ()
    total = sum(lam)
    out: Dict[Tuple[int, ...], int] = {}
    for mu in _horizontal_strips(lam):
        if len(mu) > m - 1:
            continue
        k = total - sum(mu)
        for vec, c in _schur_dense(mu, m - 1):
            key = vec + (k,)
            out[key] = out.get(key, 0) + c
    return tuple(sorted(out.items()))


def schur_eval(lam: Sequence[int], variables: Sequence[VarId]) -> Polynomial:
    """S_lam in the given variables; zero when the height exceeds the variable count."""
    lam = tuple(Partition(lam))
    terms = {}
    for vec, c in _schur_dense(lam, len(variables)):
        m = Monomial([(v, e) for v, e in zip(variables, vec) if e])
        terms[m] = terms.get(m, 0) + c
    return Polynomial(terms)


def complete_homogeneous(k: int, variables: Sequence[VarId]) -> Polynomial:
    if k < 0:
        return ZERO
    if k == 0:
        return ONE_POLY
    return schur_eval((k,), variables)


def schur_jacobi_trudi(lam: Sequence[int], variables: Sequence[VarId]) -> Polynomial:
    """det(h_{lam_i - i + j}); independent cross-check for small partitions."""
    lam = list(Partition(lam))
    k = len(lam)
    if k == 0:
        return ONE_POLY
    h = {}

    def entry(i, j):
        d = lam[i] - i + j
        if d not in h:
            h[d] = complete_homogeneous(d, variables)
        return h[d]

    return _det([[entry(i, j) for j in range(k)] for i in range(k)])


def _det(rows: List[List[Polynomial]]) -> Polynomial:
    # Laplace expansion; only used on matrices of size <= 6
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = ZERO
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def lambda_plus(lam: Sequence[int], n: int) -> List[Partition]:
    """Partitions of height <= n obtained from lam by adding one box (new rows allowed)."""
    lam = list(Partition(lam))
    if len(lam) > n:
        raise ValueError(f"partition {tuple(lam)} has height > {n}")
    out = []
    for i in range(len(lam) + 1):
        if i == len(lam):
            if len(lam) < n:
                out.append(Partition(lam + [1]))
        elif i == 0 or lam[i - 1] > lam[i]:
            new = list(lam)
            new[i] += 1
            out.append(Partition(new))
    return out


def cauchy_truncated(tvars: Sequence[VarId], uvars: Sequence[VarId], cap: int) -> TruncatedSeries:
    """prod over pairs (1 - t_a u_b)^(-1), truncated at total degree ``cap``."""
    poly = ONE_POLY
    for a in tvars:
        for b in uvars:
            m = Monomial([(a, 1), (b, 1)])
            geo = Polynomial({m ** k: 1 for k in range(cap // 2 + 1)})
            poly = mul_truncated(poly, geo, cap)
    return TruncatedSeries(poly, cap)


def cauchy_schur_side(tvars: Sequence[VarId], uvars: Sequence[VarId], cap: int) -> TruncatedSeries:
    """sum over |lam| <= cap/2 of S_lam(t) S_lam(u), the other side of Cauchy's identity."""
    poly = ZERO
    for lam in partitions_up_to(cap // 2, max_height=min(len(tvars), len(uvars))):
        poly = poly + schur_eval(lam, tvars) * schur_eval(lam, uvars)
    return TruncatedSeries(poly, cap)


def boxtimes_eval(lam: Sequence[int], variables: Sequence[VarId], b: int) -> Polynomial:
    """S_lam with each variable repeated b times."""
    if b < 1:
        raise ValueError("repetition count must be >= 1")
    lam = tuple(Partition(lam))
    terms = {}
    for vec, c in _schur_dense(lam, len(variables) * b):
        exps = {}
        for pos, e in enumerate(vec):
            if e:
                v = variables[pos // b]
                exps[v] = exps.get(v, 0) + e
        m = Monomial(exps)
        terms[m] = terms.get(m, 0) + c
    return Polynomial(terms)
