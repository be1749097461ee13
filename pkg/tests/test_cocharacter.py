import itertools
import logging

import pytest
from hypothesis import given, settings, strategies as st

from traceseries.cocharacter import (
    MultiplicityTable, VariableGroup, boxtimes_transform, groups_by_slot, reconstruct, schur_decompose,
)
from traceseries.errors import DecompositionError
from traceseries.exactpoly import ONE_POLY, Monomial, Polynomial, RationalSeries, TruncatedSeries, expand_truncated, t
from traceseries.molien import block_repeat_series, poincare_series, poincare_truncated
from traceseries.quiver import BlockStructure
from traceseries.schur import Partition, cauchy_truncated, partitions_up_to, schur_eval


def group(i, j, k):
    return VariableGroup((i, j), tuple(t(i, j, a) for a in range(1, k + 1)))


def test_two_by_two_delta():
    s = expand_truncated(poincare_series(BlockStructure.uniform((1, 1))), 6)
    groups = [group(1, 1, 1), group(2, 2, 1), group(1, 2, 1), group(2, 1, 1)]
    table = schur_decompose(s, groups, warn=False)
    for a, b, c, d in itertools.product(range(7), repeat=4):
        if a + b + c + d <= 6:
            parts = [(x,) if x else () for x in (a, b, c, d)]
            assert table.get(*parts) == (1 if c == d else 0)
    assert table.get((), (), (1,), (2,)) == 0


def test_cauchy_delta():
    tg, ug = group(1, 2, 2), group(2, 1, 2)
    table = schur_decompose(cauchy_truncated(tg.vars, ug.vars, 4), [tg, ug], warn=False)
    assert set(table.entries.values()) == {1}
    assert all(lam == mu for lam, mu in table.entries)
    assert len(table.entries) == len(partitions_up_to(2))


def test_constant_series():
    table = schur_decompose(TruncatedSeries(ONE_POLY, 3), [group(1, 1, 2)], warn=False)
    assert table.entries == {(Partition(()),): 1}


def test_asymmetric_input_rejected():
    g = group(1, 1, 2)
    s = TruncatedSeries(Polynomial.var(g.vars[0]), 2)
    with pytest.raises(DecompositionError):
        schur_decompose(s, [g], warn=False)


def test_negative_multiplicity_rejected():
    g = group(1, 1, 2)
    s = TruncatedSeries(-schur_eval((1,), g.vars), 2)
    with pytest.raises(DecompositionError):
        schur_decompose(s, [g], warn=False)


def test_stray_variable_rejected():
    with pytest.raises(DecompositionError):
        schur_decompose(TruncatedSeries(Polynomial.var(t(2, 2)), 2), [group(1, 1, 1)], warn=False)


def test_warning_for_short_groups(caplog):
    with caplog.at_level(logging.WARNING, logger="traceseries.cocharacter"):
        schur_decompose(TruncatedSeries(ONE_POLY, 3), [group(1, 1, 2)])
    assert "2 variables" in caplog.text


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.sampled_from(partitions_up_to(4, max_height=3)), st.integers(1, 5), max_size=6))
def test_round_trip(mults):
    g = group(1, 1, 3)
    poly = Polynomial()
    for lam, m in mults.items():
        poly = poly + schur_eval(lam, g.vars) * m
    s = TruncatedSeries(poly, 4)
    table = schur_decompose(s, [g], warn=False)
    assert {lams[0]: m for lams, m in table.entries.items()} == {Partition(l): m for l, m in mults.items()}
    assert reconstruct(table) == s


def test_extra_variable_keeps_table():
    tables = []
    for k in (2, 3):
        s = poincare_truncated(BlockStructure.uniform((2,), k), cap=5)
        g = VariableGroup((1, 1), tuple(t(1, 1, a) for a in range(1, k + 1)))
        tab = schur_decompose(s, [g], warn=False)
        tables.append({l: m for l, m in tab.entries.items() if l[0].height <= 2})
    assert tables[0] == tables[1]


def test_boxtimes_trivial_and_geometric():
    g = group(1, 1, 1)
    table = MultiplicityTable([g], 4, {(Partition(()),): 1})
    assert boxtimes_transform(table, 3).poly == ONE_POLY
    geo = expand_truncated(RationalSeries(ONE_POLY, {Monomial.var(t(1, 1)): 1}), 5)
    table = schur_decompose(geo, [g], warn=False)
    x = t(1, 1)
    assert boxtimes_transform(table, 2).poly == Polynomial({Monomial.var(x, d): d + 1 for d in range(6)})


def test_boxtimes_matches_block_repeat():
    s = poincare_truncated(BlockStructure.uniform((2,), 2), cap=4)
    table = schur_decompose(s, [group(1, 1, 2)], warn=False)
    boxed = boxtimes_transform(table, 2, [t(1, 1)])
    assert boxed == expand_truncated(block_repeat_series(2, 2, 1, block_labels=True), 4)


def test_table_text_and_json():
    tg, ug = group(1, 2, 1), group(2, 1, 1)
    table = schur_decompose(cauchy_truncated(tg.vars, ug.vars, 4), [tg, ug], warn=False)
    assert table.to_text().splitlines() == ["(() | ()) : 1", "((1) | (1)) : 1", "((2) | (2)) : 1"]
    assert table.to_json()["entries"][1] == [[[1], [1]], 1]


def test_groups_by_slot():
    gs = groups_by_slot([t(2, 1, 2), t(1, 2, 1), t(2, 1, 1)])
    assert [g.slot for g in gs] == [(1, 2), (2, 1)]
    assert gs[1].vars == (t(2, 1, 1), t(2, 1, 2))
