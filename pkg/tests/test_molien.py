import pytest

from traceseries import molien
from traceseries.errors import ConnectivityError, ReconstructionResidualError, TreeFormulaInapplicable
from traceseries.exactpoly import ONE, ONE_POLY, Monomial, Polynomial, RationalSeries, expand_truncated, t, z
from traceseries.molien import (
    MIXED, block_repeat_integrand, block_repeat_series, build_integrand, evaluate,
    evaluate_by_reconstruction, evaluate_tree_sum, poincare_series, weyl_product,
)
from traceseries.oracle import molien_series_truncated
from traceseries.quiver import BlockStructure


def tm(*pairs):
    return Monomial([(t(i, j), 1) for i, j in pairs])


def diag(n, k=1):
    return BlockStructure.uniform((1,) * n, k)


def test_p1_p2():
    assert poincare_series(diag(1)) == RationalSeries(ONE_POLY, {tm((1, 1)): 1})
    assert poincare_series(diag(2)) == RationalSeries(ONE_POLY, {tm((1, 1)): 1, tm((2, 2)): 1, tm((1, 2), (2, 1)): 1})


def test_p3_numerator_and_cycles():
    p3 = poincare_series(diag(3))
    six = tm((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))
    assert p3.full_numerator() == Polynomial({ONE: 1, six: -1})
    assert tm((1, 3), (3, 2), (2, 1)) in p3.factor_dict()


def test_q2():
    q2 = poincare_series(diag(2), MIXED)
    num = Polynomial({ONE: 2, tm((1, 2)): 1, tm((2, 1)): 1})
    assert q2 == RationalSeries(num, {tm((1, 1)): 1, tm((2, 2)): 1, tm((1, 2), (2, 1)): 1})


def test_mixed_numerator_two_vertices():
    i = build_integrand(diag(2), MIXED)
    r = lambda u, v: Monomial([(z(u), 1), (z(v), -1)])
    assert i.numerator == Polynomial({ONE: 2, r(1, 2): 1, r(2, 1): 1})


def test_weyl_product_single_block():
    r = lambda u, v: Monomial([(z(u), 1), (z(v), -1)])
    assert weyl_product(BlockStructure.uniform((2,))) == Polynomial({ONE: 2, r(1, 2): -1, r(2, 1): -1})
    assert weyl_product(diag(3)) == ONE_POLY


def test_one_generic_two_by_two():
    s = poincare_series(BlockStructure.uniform((2,)))
    assert s == RationalSeries(ONE_POLY, {tm((1, 1)): 1, Monomial([(t(1, 1), 2)]): 1})
    mixed = poincare_series(BlockStructure.uniform((2,)), MIXED)
    assert mixed == RationalSeries(Polynomial({ONE: 1, tm((1, 1)): 1}), {tm((1, 1)): 1, Monomial([(t(1, 1), 2)]): 1})


def test_tree_formula_refuses_nontrivial_weyl_factor():
    with pytest.raises(TreeFormulaInapplicable):
        evaluate_tree_sum(build_integrand(BlockStructure.uniform((2,))))


def test_tree_formula_refuses_repeated_labels():
    with pytest.raises(TreeFormulaInapplicable):
        evaluate_tree_sum(build_integrand(diag(2), repeat=2))


@pytest.mark.parametrize("bs", [
    diag(1), diag(2), diag(3), diag(1, 2), diag(2, 2),
    BlockStructure.uniform((2,)), BlockStructure.uniform((2, 1)), BlockStructure.uniform((3,)),
    BlockStructure.uniform((2,), 2), BlockStructure((2, 1), {(1, 2): 1, (2, 1): 1}),
])
def test_paths_agree(bs):
    i = build_integrand(bs)
    recon = evaluate_by_reconstruction(i)
    try:
        tree = evaluate_tree_sum(i)
    except TreeFormulaInapplicable:
        tree = None
    if tree is not None:
        assert tree == recon
    assert expand_truncated(recon, 6) == molien_series_truncated(i, 6)


@pytest.mark.parametrize("n", [2, 3])
def test_mixed_shares_denominator(n):
    assert poincare_series(diag(n), MIXED).factor_dict() == poincare_series(diag(n)).factor_dict()


def test_insufficient_denominator_reports_degree(monkeypatch):
    monkeypatch.setattr(molien, "cycle_denominator", lambda integrand: {})
    with pytest.raises(ReconstructionResidualError) as err:
        evaluate_by_reconstruction(build_integrand(diag(2)))
    assert err.value.degree == 2


def test_connectivity_error_propagates():
    bs = BlockStructure((1, 1), {(1, 2): 1})
    with pytest.raises(ConnectivityError):
        evaluate(build_integrand(bs), "tree")


def test_block_repeat_torus_free():
    s = block_repeat_series(1, 2, 1)
    assert s == RationalSeries(ONE_POLY, {tm((1, 1)): 2})


def test_block_repeat_matches_multiplicity_integrand():
    limit = expand_truncated(block_repeat_series(2, 2, 1), 6)
    assert limit == molien_series_truncated(block_repeat_integrand(2, 2, 1), 6)


def test_block_repeat_block_labels():
    s = block_repeat_series(2, 2, 1, block_labels=True)
    x = t(1, 1)
    assert s == RationalSeries(ONE_POLY, {Monomial.var(x): 2, Monomial.var(x, 2): 3})
    direct = molien_series_truncated(block_repeat_integrand(2, 3, 1, block_labels=True), 4)
    assert [direct.coefficient(Monomial.var(x, d)) for d in range(5)] == [1, 3, 12, 29, 75]
