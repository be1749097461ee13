"""Decomposition of multigraded series into products of Schur functions.

Each variable group holds the variables t(i,j,.) of one slot.  Peeling off
the lexicographically largest monomial of a symmetric polynomial gives the
leading partition of a Schur product with coefficient 1, so repeated
subtraction yields the multiplicities without a linear solve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

from .errors import DecompositionError
from .exactpoly import ONE_POLY, ZERO, Monomial, Polynomial, TruncatedSeries, VarId
from .schur import Partition, boxtimes_eval, schur_eval

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariableGroup:
    slot: Tuple[int, int]
    vars: Tuple[VarId, ...]


def groups_by_slot(variables: Iterable[VarId]) -> List[VariableGroup]:
    """Group grading variables t(i,j,a) by their slot (i, j)."""
    slots: Dict[Tuple[int, int], List[VarId]] = {}
    for v in sorted(set(variables)):
        slots.setdefault(tuple(v.index[:2]), []).append(v)
    return [VariableGroup(s, tuple(vs)) for s, vs in sorted(slots.items())]


@dataclass
class MultiplicityTable:
    groups: List[VariableGroup]
    degree_cap: int
    entries: Dict[Tuple[Partition, ...], int] = field(default_factory=dict)

    def get(self, *parts) -> int:
        return self.entries.get(tuple(Partition(p) for p in parts), 0)

    def sorted_entries(self):
        def key(item):
            lams = item[0]
            return (sum(l.size for l in lams), tuple(tuple(-x for x in l) for l in lams))
        return sorted(self.entries.items(), key=key)

    def to_text(self) -> str:
        lines = []
        for lams, m in self.sorted_entries():
            lines.append("(" + " | ".join(str(l) for l in lams) + f") : {m}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "groups": [{"slot": list(g.slot), "vars": [str(v) for v in g.vars]} for g in self.groups],
            "degree_cap": self.degree_cap,
            "entries": [[[list(l) for l in lams], m] for lams, m in self.sorted_entries()],
        }


def schur_product(lams: Sequence[Sequence[int]], groups: Sequence[VariableGroup]) -> Polynomial:
    out = ONE_POLY
    for lam, g in zip(lams, groups):
        out = out * schur_eval(lam, g.vars)
        if out.is_zero():
            break
    return out


def _group_vectors(m: Monomial, groups: Sequence[VariableGroup]) -> Tuple[Tuple[int, ...], ...]:
    d = m.as_dict()
    return tuple(tuple(d.get(v, 0) for v in g.vars) for g in groups)


def check_symmetric(poly: Polynomial, groups: Sequence[VariableGroup]) -> None:
    for m, c in poly.items():
        vecs = _group_vectors(m, groups)
        canon = Monomial([(v, e) for g, vec in zip(groups, vecs)
                          for v, e in zip(g.vars, sorted(vec, reverse=True)) if e])
        if poly.coefficient(canon) != c:
            raise DecompositionError(f"series is not symmetric within groups at {m}")


def schur_decompose(s: TruncatedSeries, groups: Sequence[VariableGroup], warn: bool = True) -> MultiplicityTable:
    """Multiplicities of products of Schur functions, one per group, up to the cap of ``s``.

    With ``warn`` a warning is logged for every group with fewer variables
    than the degree cap, since taller partitions cannot be seen there.
    """
    groups = list(groups)
    known = {v for g in groups for v in g.vars}
    stray = [v for v in s.poly.variables() if v not in known]
    if stray:
        raise DecompositionError(f"variables {[str(v) for v in stray]} belong to no group")
    for g in groups:
        if warn and len(g.vars) < s.cap:
            log.warning("group %s has %d variables; partitions of height > %d stay undetected up to degree %d",
                        g.slot, len(g.vars), len(g.vars), s.cap)
    check_symmetric(s.poly, groups)
    order = [v for g in groups for v in g.vars]
    pos = {v: i for i, v in enumerate(order)}

    def lex(m: Monomial):
        vec = [0] * len(order)
        for v, e in m.items():
            vec[pos[v]] = e
        return tuple(vec)

    table = MultiplicityTable(groups, s.cap)
    rest = s.poly
    while not rest.is_zero():
        lead = max(rest, key=lex)
        c = rest.coefficient(lead)
        if not isinstance(c, int) or c < 0:
            raise DecompositionError(f"multiplicity {c} at {lead} is not a non-negative integer")
        lams = tuple(Partition([e for e in vec if e]) for vec in _group_vectors(lead, groups))
        if any(list(l) != [e for e in vec if e] for l, vec in zip(lams, _group_vectors(lead, groups))):
            raise DecompositionError(f"leading monomial {lead} is not dominant")
        table.entries[lams] = c
        rest = rest - schur_product(lams, groups) * c
    return table


def reconstruct(table: MultiplicityTable) -> TruncatedSeries:
    poly = ZERO
    for lams, m in table.entries.items():
        poly = poly + schur_product(lams, table.groups) * m
    return TruncatedSeries(poly, table.degree_cap)


def boxtimes_transform(table: MultiplicityTable, b: int, variables: Sequence[VarId] = None) -> TruncatedSeries:
    """sum of m_lam S_lam^{(x)b}; ``variables`` defaults to the variables of the single group."""
    if len(table.groups) != 1:
        raise DecompositionError("boxtimes transform needs a single-group table")
    if variables is None:
        variables = table.groups[0].vars
    poly = ZERO
    for (lam,), m in table.entries.items():
        poly = poly + boxtimes_eval(lam, variables, b) * m
    return TruncatedSeries(poly, table.degree_cap)
