# tests/test_embedding.py
from fractions import Fraction

import pytest

from inflearn.app.catalog import load_family
from inflearn.app.embedding import (
    IndexOracle,
    OracleRangeError,
    StApprox,
    UnstableLimitError,
    anchor,
    embed_run,
    limit_shape,
    xi_holds,
)
from inflearn.app.informant import canonical_source, shuffled_source
from inflearn.app.learners import UNKNOWN, ConstantLearner, ParityLearner, TwoGraphLearner, make_learner
from inflearn.app.structure import is_substructure


@pytest.fixture(scope="module")
def two_graphs():
    return load_family("two-graphs")


@pytest.fixture(scope="module")
def g2_run(two_graphs):
    src = canonical_source(two_graphs.members[1])
    return embed_run(TwoGraphLearner(), src, IndexOracle({2: 1}), stages=20, n_predicates=2, stride=5)


def test_oracle_parse_and_lookup():
    oracle = IndexOracle.parse("2:1, 5:0,")
    assert oracle.table == {2: 1, 5: 0}
    assert oracle.lookup(5) == 0
    assert oracle.lookup(3) is None
    assert oracle.lookup(UNKNOWN) is None
    assert oracle.targets == [0, 1]


def test_oracle_from_enumeration(two_graphs):
    oracle = IndexOracle.from_enumeration(two_graphs.enumeration, two_graphs, limit=10)
    assert oracle.table == {1: 0, 2: 1}


def test_stage_zero(g2_run):
    first = g2_run[0]
    assert first.stage == 0
    assert first.points == ((Fraction(1),), (Fraction(1),))
    assert first.least_predicates() == []
    assert first.anchors == (anchor(0),)
    assert len(g2_run) == 21


def test_stages_form_a_chain(g2_run):
    structures = [a.to_structure() for a in g2_run]
    for a, b in zip(structures, structures[1:]):
        assert is_substructure(a, b)


def test_converging_learner_fixes_one_least_element(g2_run):
    assert g2_run[-1].conjecture == 2
    assert g2_run[-1].target == 1
    assert limit_shape(g2_run) == 1
    assert xi_holds(g2_run, 1)
    assert not xi_holds(g2_run, 0)
    assert not xi_holds(g2_run, 5)


def test_open_predicates_keep_growing_downward(g2_run):
    lows = [a.points[0][0] for a in g2_run]
    assert all(b < a for a, b in zip(lows, lows[1:]))


def test_non_index_conjectures_leave_every_predicate_open(two_graphs):
    src = canonical_source(two_graphs.members[0])
    run = embed_run(ConstantLearner(UNKNOWN), src, IndexOracle({1: 0}), stages=12, n_predicates=2)
    assert all(not a.least_predicates() for a in run)
    assert limit_shape(run) is None


def test_oscillating_learner_has_no_limit(two_graphs):
    src = canonical_source(two_graphs.members[0])
    run = embed_run(ParityLearner(), src, IndexOracle({0: 0, 1: 1}), stages=16, n_predicates=2)
    assert len(run[-1].least_predicates()) == 1
    assert limit_shape(run) is None


def test_oracle_targets_need_predicates(two_graphs):
    src = canonical_source(two_graphs.members[0])
    with pytest.raises(OracleRangeError):
        embed_run(TwoGraphLearner(), src, IndexOracle({2: 3}), stages=4, n_predicates=2)
    with pytest.raises(ValueError):
        embed_run(TwoGraphLearner(), src, IndexOracle(), stages=0, n_predicates=2)


def test_two_least_elements_are_unstable():
    a = StApprox(3, ((Fraction(1),), (Fraction(1),)), (True, True), (anchor(0),))
    with pytest.raises(UnstableLimitError):
        limit_shape([a])
    with pytest.raises(ValueError):
        limit_shape([])


@pytest.mark.parametrize("name, k", [
    ("two-graphs", 0),
    ("two-graphs", 1),
    pytest.param("orders", 0, marks=pytest.mark.slow),
    pytest.param("orders", 1, marks=pytest.mark.slow),
    pytest.param("orders", 2, marks=pytest.mark.slow),
    pytest.param("orders", 3, marks=pytest.mark.slow),
])
def test_fifty_stages_recover_each_member(name, k):
    fam = load_family(name)
    n = len(fam.members)
    oracle = IndexOracle.from_enumeration(fam.enumeration, fam)
    stride = max(1, fam.spec.horizon // 50)
    learner = make_learner(fam.spec.learner, fam)
    run = embed_run(learner, shuffled_source(fam.members[k], 0), oracle, stages=50, n_predicates=n, stride=stride)
    assert limit_shape(run) == k
    assert [xi_holds(run, i) for i in range(n)] == [i == k for i in range(n)]
    orders = [a.to_structure().reduct(["Leq"]) for a in run]
    for a, b in zip(orders, orders[1:]):
        assert is_substructure(a, b)
