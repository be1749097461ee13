"""Exact sparse Laurent polynomials and rational series in two sorts of variables.

Torus variables ``z<i>`` carry the weights of the diagonal torus; grading
variables ``t(i,j,a)`` carry the multigrading.  Coefficients are ``int`` or
``fractions.Fraction``; no floating point is used anywhere.

A :class:`RationalSeries` is stored as

    coeff * shift * numerator / prod (1 - m)^e

with ``numerator`` a primitive integer polynomial and every ``m`` a monomial
with positive exponents.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

from .errors import MalformedSeriesError, SpecializationPoleError

TORUS = 0
GRADING = 1

Coeff = Union[int, Fraction]


def _norm(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True, order=True)
class VarId:
    sort: int
    index: Tuple[int, ...]

    def __str__(self):
        if self.sort == TORUS:
            return f"z{self.index[0]}"
        return "t(" + ",".join(str(i) for i in self.index) + ")"

    @property
    def is_torus(self) -> bool:
        return self.sort == TORUS


def z(i: int) -> VarId:
    return VarId(TORUS, (i,))


def t(i: int, j: int, a: int = 1) -> VarId:
    return VarId(GRADING, (i, j, a))


class Monomial:
    """Immutable sparse exponent vector; zero exponents are never stored."""

    __slots__ = ("_exps", "_hash")

    def __init__(self, exps: Union[Mapping[VarId, int], Iterable[Tuple[VarId, int]], None] = None):
        if exps is None:
            items = ()
        else:
            d: Dict[VarId, int] = {}
            pairs = exps.items() if isinstance(exps, Mapping) else exps
            for v, e in pairs:
                d[v] = d.get(v, 0) + e
            items = tuple(sorted((v, e) for v, e in d.items() if e))
        self._exps = items
        self._hash = hash(items)

    @classmethod
    def _raw(cls, items: Tuple[Tuple[VarId, int], ...]) -> "Monomial":
        m = cls.__new__(cls)
        m._exps = items
        m._hash = hash(items)
        return m

    @classmethod
    def var(cls, v: VarId, e: int = 1) -> "Monomial":
        return cls._raw(((v, e),)) if e else ONE

    def items(self) -> Tuple[Tuple[VarId, int], ...]:
        return self._exps

    def as_dict(self) -> Dict[VarId, int]:
        return dict(self._exps)

    def exponent(self, v: VarId) -> int:
        for w, e in self._exps:
            if w == v:
                return e
        return 0

    def variables(self) -> Tuple[VarId, ...]:
        return tuple(v for v, _ in self._exps)

    @property
    def degree(self) -> int:
        return sum(e for _, e in self._exps)

    @property
    def torus_degree(self) -> int:
        return sum(e for v, e in self._exps if v.sort == TORUS)

    @property
    def grading_degree(self) -> int:
        return sum(e for v, e in self._exps if v.sort == GRADING)

    def has_torus(self) -> bool:
        return any(v.sort == TORUS for v, _ in self._exps)

    def torus_part(self) -> "Monomial":
        return Monomial._raw(tuple(p for p in self._exps if p[0].sort == TORUS))

    def grading_part(self) -> "Monomial":
        return Monomial._raw(tuple(p for p in self._exps if p[0].sort == GRADING))

    def is_one(self) -> bool:
        return not self._exps

    def all_positive(self) -> bool:
        return all(e > 0 for _, e in self._exps)

    def is_positive(self) -> bool:
        """Non-constant with every exponent positive."""
        return bool(self._exps) and self.all_positive()

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not other._exps:
            return self
        if not self._exps:
            return other
        d = dict(self._exps)
        for v, e in other._exps:
            d[v] = d.get(v, 0) + e
        return Monomial._raw(tuple(sorted((v, e) for v, e in d.items() if e)))

    def __pow__(self, k: int) -> "Monomial":
        if k == 0:
            return ONE
        return Monomial._raw(tuple((v, e * k) for v, e in self._exps))

    def inverse(self) -> "Monomial":
        return self ** -1

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def split_signs(self) -> Tuple["Monomial", "Monomial"]:
        """Return (p, q), both with non-negative exponents, with self = p/q."""
        p = tuple((v, e) for v, e in self._exps if e > 0)
        q = tuple((v, -e) for v, e in self._exps if e < 0)
        return Monomial._raw(p), Monomial._raw(q)

    def divides(self, other: "Monomial") -> bool:
        d = other.as_dict()
        return all(d.get(v, 0) >= e for v, e in self._exps)

    def substitute(self, mapping: Mapping[VarId, "Monomial"]) -> "Monomial":
        out = ONE
        for v, e in self._exps:
            img = mapping.get(v)
            out = out * (img ** e if img is not None else Monomial.var(v, e))
        return out

    def __eq__(self, other):
        return isinstance(other, Monomial) and self._exps == other._exps

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Monomial({self})"

    def __str__(self):
        if not self._exps:
            return "1"
        return "*".join(str(v) if e == 1 else f"{v}^{e}" for v, e in self._exps)


ONE = Monomial()


def monomial(*pairs: Tuple[VarId, int]) -> Monomial:
    return Monomial(pairs)


def tmono(*labels: Tuple[int, int], a: int = 1) -> Monomial:
    """Convenience: ``tmono((1, 2), (2, 1))`` is t(1,2,a)*t(2,1,a)."""
    return Monomial([(t(i, j, a), 1) for i, j in labels])


def _collect_vars(monos: Iterable[Monomial]) -> Tuple[VarId, ...]:
    s = set()
    for m in monos:
        s.update(m.variables())
    return tuple(sorted(s))


def _dense(m: Monomial, index: Mapping[VarId, int], n: int) -> Tuple[int, ...]:
    vec = [0] * n
    for v, e in m.items():
        vec[index[v]] = e
    return tuple(vec)


def _sparse(vec: Sequence[int], variables: Sequence[VarId]) -> Monomial:
    return Monomial._raw(tuple((variables[i], e) for i, e in enumerate(vec) if e))


def grlex_key(m: Monomial, variables: Sequence[VarId]):
    """Sort key for graded lexicographic order over ``variables`` (earlier = more significant)."""
    index = {v: i for i, v in enumerate(variables)}
    return (m.degree, _dense(m, index, len(variables)))


class Polynomial:
    """Immutable sparse Laurent polynomial with exact coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping[Monomial, Coeff], None] = None):
        clean: Dict[Monomial, Coeff] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = _norm(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Coeff]) -> "Polynomial":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Coeff) -> "Polynomial":
        return cls({ONE: c})

    @classmethod
    def var(cls, v: VarId) -> "Polynomial":
        return cls._raw({Monomial.var(v): 1})

    @classmethod
    def mono(cls, m: Monomial, c: Coeff = 1) -> "Polynomial":
        return cls({m: c})

    @property
    def terms(self) -> Mapping[Monomial, Coeff]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, m: Monomial) -> Coeff:
        return self._terms.get(m, 0)

    def variables(self) -> Tuple[VarId, ...]:
        return _collect_vars(self._terms)

    def constant(self) -> Coeff:
        return self._terms.get(ONE, 0)

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, Monomial):
            return Polynomial._raw({other: 1})
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm(s)
            else:
                out.pop(m, None)
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return Polynomial._raw({m: _norm(c * other) for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, Coeff] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial({m: c for m, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = ONE_POLY
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale_monomial(self, m: Monomial) -> "Polynomial":
        if m.is_one():
            return self
        return Polynomial._raw({k * m: c for k, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # structure ----------------------------------------------------------

    def total_degree(self) -> int:
        return max((m.degree for m in self._terms), default=0)

    def min_exponents(self) -> Monomial:
        """Componentwise minimum over all terms (exponent 0 for absent variables)."""
        if not self._terms:
            return ONE
        variables = self.variables()
        mins = {v: 0 for v in variables}
        first = True
        for m in self._terms:
            d = m.as_dict()
            for v in variables:
                e = d.get(v, 0)
                mins[v] = e if first else min(mins[v], e)
            first = False
        return Monomial(mins)

    def has_negative_exponents(self) -> bool:
        return any(e < 0 for m in self._terms for _, e in m.items())

    def truncate(self, cap: int) -> "Polynomial":
        return Polynomial._raw({m: c for m, c in self._terms.items() if m.grading_degree <= cap})

    def torus_constant_term(self) -> "Polynomial":
        """Terms whose every torus exponent is zero."""
        return Polynomial._raw({m: c for m, c in self._terms.items() if not m.has_torus()})

    def substitute(self, mapping: Mapping[VarId, Union[Monomial, "Polynomial"]]) -> "Polynomial":
        mono_map = {v: img for v, img in mapping.items() if isinstance(img, Monomial)}
        poly_map = {v: img for v, img in mapping.items() if isinstance(img, Polynomial)}
        out = ZERO
        acc: Dict[Monomial, Coeff] = {}
        for m, c in self._terms.items():
            if poly_map and any(v in poly_map for v in m.variables()):
                term = Polynomial.const(c)
                rest = []
                for v, e in m.items():
                    if v in poly_map:
                        if e < 0:
                            raise ValueError(f"cannot substitute a polynomial for {v}^{e}")
                        term = term * poly_map[v] ** e
                    else:
                        rest.append((v, e))
                out = out + term.scale_monomial(Monomial(rest).substitute(mono_map))
            else:
                k = m.substitute(mono_map)
                acc[k] = acc.get(k, 0) + c
        return out + Polynomial(acc)

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive over the integers."""
        if not self._terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self._terms.values():
            c = Fraction(c)
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def sorted_terms(self, variables: Sequence[VarId] = None):
        """Terms in descending graded lexicographic order."""
        if variables is None:
            variables = self.variables()
        index = {v: i for i, v in enumerate(variables)}
        n = len(variables)
        return sorted(self._terms.items(), key=lambda mc: (mc[0].degree, _dense(mc[0], index, n)), reverse=True)

    def leading_coefficient(self) -> Coeff:
        return self.sorted_terms()[0][1] if self._terms else 0

    # output -------------------------------------------------------------

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Polynomial({self})"

    def to_text(self, variables: Sequence[VarId] = None) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, (m, c) in enumerate(self.sorted_terms(variables)):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if m.is_one():
                body = str(a)
            elif a == 1:
                body = str(m)
            else:
                body = f"{a}*{m}"
            if k == 0:
                parts.append(body if sign == "+" else "-" + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def to_json(self, variables: Sequence[VarId] = None) -> dict:
        if variables is None:
            variables = self.variables()
        index = {v: i for i, v in enumerate(variables)}
        rows = []
        for m, c in self.sorted_terms(variables):
            c = Fraction(c)
            rows.append([list(_dense(m, index, len(variables))), c.numerator, c.denominator])
        return {"variables": [str(v) for v in variables], "terms": rows}


ZERO = Polynomial()
ONE_POLY = Polynomial.const(1)


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def torus_constant_term(p: Polynomial) -> Polynomial:
    return p.torus_constant_term()


# binomial division ---------------------------------------------------------


def divide_by_one_minus(p: Polynomial, m: Monomial):
    """Exact quotient p / (1 - m) in the Laurent ring, or ``None`` if it does not divide.

    With m = a/b (a, b coprime monomials) this is division of p by the binomial
    b - a; a single binomial is a Groebner basis of its ideal, so the division
    remainder vanishes exactly when the binomial divides.
    """
    if m.is_one():
        raise MalformedSeriesError("division by 1 - 1")
    if p.is_zero():
        return ZERO
    a, b = m.split_signs()
    shift = p.min_exponents()
    base = p.scale_monomial(shift.inverse())
    variables = _collect_vars(list(base) + [a, b])
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    da, db = _dense(a, index, n), _dense(b, index, n)
    # orient the binomial so that its leading term comes first under grlex
    ka, kb = (sum(da), da), (sum(db), db)
    lead, tail, lead_sign = (da, db, -1) if ka > kb else (db, da, 1)
    # g = lead_sign * x^lead - lead_sign * x^tail
    work: Dict[Tuple[int, ...], Coeff] = {_dense(k, index, n): c for k, c in base.items()}
    heap = [(-sum(v), tuple(-x for x in v)) for v in work]
    heapq.heapify(heap)
    quotient: Dict[Tuple[int, ...], Coeff] = {}
    while heap:
        _, negv = heapq.heappop(heap)
        v = tuple(-x for x in negv)
        c = work.pop(v, 0)
        if not c:
            continue
        if any(x < y for x, y in zip(v, lead)):
            return None
        q = tuple(x - y for x, y in zip(v, lead))
        qc = c * lead_sign
        quotient[q] = quotient.get(q, 0) + qc
        w = tuple(x + y for x, y in zip(q, tail))
        nc = work.get(w, 0) + qc * lead_sign
        if nc:
            if w not in work:
                heapq.heappush(heap, (-sum(w), tuple(-x for x in w)))
            work[w] = nc
        else:
            work.pop(w, None)
    quot = Polynomial({_sparse(q, variables): c for q, c in quotient.items()})
    # p = (1 - a/b) * r  <=>  p * b = (b - a) * r ; quotient above is base / (b - a)
    return quot.scale_monomial(b * shift)


# rational series ----------------------------------------------------------

FactorList = Tuple[Tuple[Monomial, int], ...]


def _sort_factors(factors: Mapping[Monomial, int]) -> FactorList:
    variables = _collect_vars(factors)
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    return tuple(sorted(((m, e) for m, e in factors.items() if e),
                        key=lambda me: (me[0].degree, tuple(-x for x in _dense(me[0], index, n)))))


class RationalSeries:
    """coeff * shift * numerator / prod (1 - m)^e in canonical, reduced form."""

    __slots__ = ("coeff", "shift", "numerator", "factors")

    def __init__(self, numerator: Polynomial, factors: Union[Mapping[Monomial, int], Iterable[Tuple[Monomial, int]]] = (),
                 coeff: Coeff = 1, shift: Monomial = ONE, reduce: bool = True):
        fac: Dict[Monomial, int] = {}
        pairs = factors.items() if isinstance(factors, Mapping) else factors
        num = numerator
        c = Fraction(coeff)
        sh = shift
        for m, e in pairs:
            if e == 0:
                continue
            if e < 0:
                raise ValueError("negative factor multiplicity")
            if m.is_one():
                raise MalformedSeriesError("denominator factor 1 - 1")
            if m.has_torus():
                raise MalformedSeriesError(f"torus variable in denominator factor {m}")
            if not m.all_positive():
                # 1 - m = -m (1 - 1/m); keep the orientation with positive exponents
                inv = m.inverse()
                if not inv.is_positive():
                    raise MalformedSeriesError(f"factor 1 - {m} has mixed signs")
                c *= (-1) ** e
                sh = sh * m.inverse() ** e
                m = inv
            fac[m] = fac.get(m, 0) + e
        if num.is_zero():
            self.coeff, self.shift, self.numerator, self.factors = Fraction(0), ONE, ZERO, ()
            return
        low = num.min_exponents()
        if not low.is_one():
            num = num.scale_monomial(low.inverse())
            sh = sh * low
        cont = num.content()
        if num.leading_coefficient() < 0:
            cont = -cont
        if cont != 1:
            num = num * (1 / cont)
            c *= cont
        if reduce:
            for m in list(fac):
                while fac[m]:
                    q = divide_by_one_minus(num, m)
                    if q is None:
                        break
                    num = q
                    fac[m] -= 1
            # quotients stay primitive up to sign, but re-normalize anyway
            low = num.min_exponents()
            if not low.is_one():
                num = num.scale_monomial(low.inverse())
                sh = sh * low
            cont = num.content()
            if num.leading_coefficient() < 0:
                cont = -cont
            if cont != 1:
                num = num * (1 / cont)
                c *= cont
        self.coeff = _norm(c)
        self.shift = sh
        self.numerator = num
        self.factors = _sort_factors(fac)

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalSeries":
        return cls(p)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def variables(self) -> Tuple[VarId, ...]:
        return _collect_vars(list(self.numerator) + [m for m, _ in self.factors] + [self.shift])

    def full_numerator(self) -> Polynomial:
        """coeff * shift * numerator as a single (possibly Laurent) polynomial."""
        return (self.numerator * self.coeff).scale_monomial(self.shift)

    def denominator(self) -> Polynomial:
        out = ONE_POLY
        for m, e in self.factors:
            out = out * (ONE_POLY - Polynomial.mono(m)) ** e
        return out

    def factor_dict(self) -> Dict[Monomial, int]:
        return dict(self.factors)

    def denominator_degree(self) -> int:
        return sum(m.degree * e for m, e in self.factors)

    def key(self):
        return (self.coeff, self.shift, self.numerator, self.factors)

    def __eq__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        if self.key() == other.key():
            return True
        return self.full_numerator() * other.denominator() == other.full_numerator() * self.denominator()

    def __hash__(self):
        raise TypeError("RationalSeries equality is by cross-multiplication; not hashable")

    def __mul__(self, other: "RationalSeries") -> "RationalSeries":
        fac = self.factor_dict()
        for m, e in other.factors:
            fac[m] = fac.get(m, 0) + e
        return RationalSeries(self.numerator * other.numerator, fac, self.coeff * other.coeff, self.shift * other.shift)

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        a, b = self.factor_dict(), other.factor_dict()
        common = {m: max(a.get(m, 0), b.get(m, 0)) for m in set(a) | set(b)}
        na = self.full_numerator()
        nb = other.full_numerator()
        for m, e in common.items():
            one_minus = ONE_POLY - Polynomial.mono(m)
            na = na * one_minus ** (e - a.get(m, 0))
            nb = nb * one_minus ** (e - b.get(m, 0))
        return RationalSeries(na + nb, common)

    def __neg__(self):
        return RationalSeries(self.numerator, self.factors, -self.coeff, self.shift, reduce=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Coeff, m: Monomial = ONE) -> "RationalSeries":
        return RationalSeries(self.numerator, self.factors, self.coeff * c, self.shift * m, reduce=False)

    def specialize(self, mapping: Mapping[VarId, Monomial]) -> "RationalSeries":
        return specialize(self, mapping)

    # output -------------------------------------------------------------

    def numerator_text(self, variables=None) -> str:
        if self.shift.all_positive() or self.shift.is_one():
            return self.full_numerator().to_text(variables)
        pre = Polynomial.mono(self.shift, self.coeff).to_text(variables)
        return f"{pre}*({self.numerator.to_text(variables)})"

    def to_text(self) -> str:
        variables = self.variables()
        num = self.numerator_text(variables)
        if not self.factors:
            return num
        dens = []
        for m, e in self.factors:
            f = f"(1 - {m})"
            dens.append(f if e == 1 else f"{f}^{e}")
        return f"({num}) / ({'*'.join(dens)})"

    __str__ = to_text

    def __repr__(self):
        return f"RationalSeries({self.to_text()})"

    def to_json(self) -> dict:
        variables = self.variables()
        index = {v: i for i, v in enumerate(variables)}
        n = len(variables)
        c = Fraction(self.coeff)
        return {
            "variables": [str(v) for v in variables],
            "prefactor": [list(_dense(self.shift, index, n)), c.numerator, c.denominator],
            "numerator": self.numerator.to_json(variables)["terms"],
            "factors": [[list(_dense(m, index, n)), e] for m, e in self.factors],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# truncated series ---------------------------------------------------------


class TruncatedSeries:
    """Power series known up to and including total grading degree ``cap``."""

    __slots__ = ("cap", "poly")

    def __init__(self, poly: Polynomial, cap: int):
        if cap < 0:
            raise ValueError("degree cap must be non-negative")
        self.cap = cap
        self.poly = poly.truncate(cap)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return TruncatedSeries(self.poly + other.poly, min(self.cap, other.cap))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return TruncatedSeries(self.poly - other.poly, min(self.cap, other.cap))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        cap = min(self.cap, other.cap)
        return TruncatedSeries(mul_truncated(self.poly, other.poly, cap), cap)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.cap == other.cap and self.poly == other.poly

    def coefficient(self, m: Monomial) -> Coeff:
        return self.poly.coefficient(m)

    def restrict(self, cap: int) -> "TruncatedSeries":
        return TruncatedSeries(self.poly, min(cap, self.cap))

    def specialize(self, mapping: Mapping[VarId, Monomial]) -> "TruncatedSeries":
        # sound only for degree-non-decreasing maps, which every caller uses
        return TruncatedSeries(self.poly.substitute(mapping), self.cap)

    def to_text(self) -> str:
        return f"{self.poly.to_text()} + O(deg {self.cap + 1})"

    __str__ = to_text

    def __repr__(self):
        return f"TruncatedSeries({self.to_text()})"

    def to_json(self) -> dict:
        out = self.poly.to_json()
        out["degree_cap"] = self.cap
        return out


def mul_truncated(a: Polynomial, b: Polynomial, cap: int) -> Polynomial:
    variables = _collect_vars(list(a) + list(b))
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    da = [(_dense(m, index, n), m.grading_degree, c) for m, c in a.items()]
    db = sorted(((_dense(m, index, n), m.grading_degree, c) for m, c in b.items()), key=lambda x: x[1])
    out: Dict[Tuple[int, ...], Coeff] = {}
    for va, ga, ca in da:
        for vb, gb, cb in db:
            if ga + gb > cap:
                break
            v = tuple(x + y for x, y in zip(va, vb))
            out[v] = out.get(v, 0) + ca * cb
    return Polynomial({_sparse(v, variables): c for v, c in out.items()})


def geometric_expand(poly: Polynomial, factors: Sequence[Tuple[Monomial, int]], cap: int) -> Polynomial:
    """poly * prod (1 - m)^(-e), truncated at grading degree ``cap``.

    Factor monomials may carry torus variables; only their grading degree
    counts against the cap and it must be positive.
    """
    variables = _collect_vars(list(poly) + [m for m, _ in factors])
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    grading = [v.sort == GRADING for v in variables]

    def gdeg(vec):
        return sum(x for x, g in zip(vec, grading) if g)

    work: Dict[Tuple[int, ...], Coeff] = {}
    for m, c in poly.items():
        if m.grading_degree <= cap:
            work[_dense(m, index, n)] = c
    for m, e in factors:
        step = _dense(m, index, n)
        sd = m.grading_degree
        if sd <= 0:
            raise MalformedSeriesError(f"factor 1 - {m} has grading degree {sd}")
        for _ in range(e):
            work = _times_geometric(work, step, sd, cap, gdeg)
    return Polynomial({_sparse(v, variables): c for v, c in work.items()})


def _times_geometric(work, step, sd, cap, gdeg):
    out: Dict[Tuple[int, ...], Coeff] = {}
    # process by increasing degree: Q = P + m Q
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
    return out


def expand_truncated(r: RationalSeries, cap: int) -> TruncatedSeries:
    for m, _ in r.factors:
        if m.grading_degree < 1:
            raise MalformedSeriesError(f"factor 1 - {m} has grading degree 0")
    inner_cap = cap - r.shift.grading_degree
    if inner_cap < 0:
        return TruncatedSeries(ZERO, cap)
    body = geometric_expand(r.numerator, r.factors, inner_cap)
    return TruncatedSeries((body * r.coeff).scale_monomial(r.shift), cap)


def specialize(obj, mapping: Mapping[VarId, Monomial]):
    """Substitute grading variables by grading monomials in a polynomial or series."""
    if isinstance(obj, Polynomial):
        return obj.substitute(mapping)
    if isinstance(obj, TruncatedSeries):
        return obj.specialize(mapping)
    if isinstance(obj, RationalSeries):
        fac: Dict[Monomial, int] = {}
        for m, e in obj.factors:
            img = m.substitute(mapping)
            if img.is_one():
                raise SpecializationPoleError(f"factor 1 - {m} becomes 1 - 1 under specialization")
            fac[img] = fac.get(img, 0) + e
        num = obj.numerator.substitute(mapping)
        return RationalSeries(num, fac, obj.coeff, obj.shift.substitute(mapping))
    raise TypeError(f"cannot specialize {type(obj).__name__}")


def invert_grading_vars(r: RationalSeries) -> RationalSeries:
    """r with every grading variable t replaced by 1/t, re-canonicalized."""
    inv = {v: Monomial.var(v, -1) for v in r.variables() if v.sort == GRADING}
    num = r.numerator.substitute(inv)
    fac = [(m.inverse(), e) for m, e in r.factors]
    return RationalSeries(num, fac, r.coeff, r.shift.substitute(inv))


def expand_box(r: RationalSeries, cap: int) -> Polynomial:
    """All terms of the expansion of r whose every grading exponent is at most ``cap``.

    Exact because numerator exponents are non-negative and every factor only
    raises exponents, so pruning outside the box never loses a term.
    """
    if not r.shift.is_one() and not r.shift.all_positive():
        raise MalformedSeriesError("box expansion needs a non-negative prefactor")
    variables = _collect_vars(list(r.numerator) + [m for m, _ in r.factors] + [r.shift])
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    shift = _dense(r.shift, index, n)
    work: Dict[Tuple[int, ...], Coeff] = {}
    for m, c in r.numerator.items():
        v = tuple(x + y for x, y in zip(_dense(m, index, n), shift))
        if max(v, default=0) <= cap:
            work[v] = c * r.coeff
    for m, e in r.factors:
        step = _dense(m, index, n)
        for _ in range(e):
            out: Dict[Tuple[int, ...], Coeff] = {}
            for v in sorted(work):
                c = work[v]
                while max(v, default=0) <= cap:
                    out[v] = out.get(v, 0) + c
                    v = tuple(x + y for x, y in zip(v, step))
            work = {v: c for v, c in out.items() if c}
    return Polynomial({_sparse(v, variables): c for v, c in work.items()})


def pole_order_at_one(r: RationalSeries, var: VarId) -> int:
    """Order of the pole along var = 1, counting only factors that are powers of ``var``."""
    order = sum(e for m, e in r.factors if m.variables() == (var,))
    num = r.numerator
    while order > 0:
        q = divide_by_one_minus(num, Monomial.var(var))
        if q is None:
            break
        num = q
        order -= 1
    return order
