# tests/test_learners.py
import networkx as nx
import pytest

from inflearn.app.catalog import (
    CycleGraph,
    EtaOrder,
    LatticeMember,
    PGroup,
    friedberg_enumeration,
    graph_index,
    load_family,
)
from inflearn.app.informant import InformantPrefix, canonical_source, shuffled_source
from inflearn.app.learners import (
    UNKNOWN,
    ConstantLearner,
    HonestCycleLearner,
    IndexCycleLearner,
    LargestElementLearner,
    LearningRecord,
    ParityLearner,
    Sigma2Learner,
    TwoGraphLearner,
    brute_force_least_pair,
    least_cycle,
    make_learner,
    parse_conjecture,
    run,
)
from inflearn.app.sigma2 import SentenceFamily, family_sentences, parse_sentence
from inflearn.app.structure import GRAPH, ORDER, pair


def _facts(*pairs):
    return tuple((((u, v), b),) for (u, v), b in pairs)


def test_simple_learners():
    p = canonical_source(EtaOrder(1, 1)).prefix(5)
    assert ConstantLearner(7).conjecture(p) == 7
    assert ParityLearner().conjecture(p) == 1
    assert ParityLearner().conjecture(p.take(4)) == 0
    assert LargestElementLearner().conjecture(p.take(0)) == UNKNOWN
    assert LargestElementLearner().conjecture(p) == 2


def test_parse_conjecture():
    assert parse_conjecture(" 12 ") == 12
    assert parse_conjecture("?") == UNKNOWN
    with pytest.raises(ValueError):
        parse_conjecture("twelve")


@pytest.mark.parametrize("learner", [
    ParityLearner(),
    LargestElementLearner(),
    TwoGraphLearner(),
    IndexCycleLearner(),
])
def test_sessions_agree_with_fresh_evaluation(learner):
    src = shuffled_source(CycleGraph(2), 3)
    rec = run(learner, src, 60)
    prefix = src.prefix(60)
    for n in (0, 1, 9, 30, 60):
        assert learner.conjecture(prefix.take(n)) == rec.conjectures[n]


def test_fork_leaves_the_original_alone():
    src = canonical_source(CycleGraph(1))
    s = TwoGraphLearner().session(GRAPH)
    s.extend(src.prefix(2).steps)
    other = s.fork()
    other.extend(src.prefix(10).steps[2:])
    assert s.current == UNKNOWN
    assert s.n == 2
    assert other.current == 1


@pytest.mark.parametrize("i, expected", [(1, 1), (2, 2)])
def test_two_graph_learner(i, expected):
    rec = run(TwoGraphLearner(), canonical_source(CycleGraph(i)), 60)
    assert rec.final == expected
    assert rec.mind_changes == 1


@pytest.mark.parametrize("k", [0, 1])
def test_two_graph_learner_on_fair_informants(k):
    fam = load_family("two-graphs")
    learner = make_learner("two-graph", fam)
    for seed in range(50):
        rec = run(learner, shuffled_source(fam.members[k], seed), 500)
        assert fam.is_correct(k, rec.final), (k, seed, rec.final)
        assert rec.settled()
        assert rec.mind_changes == 1


def test_honest_cycle_learner_sees_longer_cycles():
    rec = run(HonestCycleLearner(), canonical_source(CycleGraph(4)), 100)
    assert rec.final == 4


def test_graph_learners_need_the_graph_signature():
    with pytest.raises(ValueError):
        TwoGraphLearner().session(ORDER)


def test_least_cycle_prefers_small_vertices():
    g = nx.DiGraph([(5, 6), (6, 5), (0, 1), (1, 2), (2, 0)])
    assert least_cycle(g) == (0, 1, 2)
    assert least_cycle(g, max_len=2) == (5, 6)
    assert least_cycle(nx.DiGraph([(0, 1)])) is None


def test_index_cycle_learner_on_the_cycle_family():
    fam = load_family("cycle-graphs")
    learner = make_learner("index-cycle", fam)
    for k, pres in enumerate(fam.members):
        rec = run(learner, canonical_source(pres), 200)
        assert fam.is_correct(k, rec.final)


def test_index_cycle_learner_on_probes():
    fam = load_family("graph-probes")
    learner = make_learner("index-cycle", fam)
    finals = [run(learner, canonical_source(p), 200).final for p in fam.members]
    assert finals == [3, 1, 0, 0]


def test_index_cycle_learner_gives_up_on_a_branching_vertex():
    learner = IndexCycleLearner()
    two_cycle = InformantPrefix(GRAPH, _facts(
        ((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 0),
    ))
    assert learner.conjecture(two_cycle) == graph_index(1)
    grown = two_cycle.extend(_facts(
        ((0, 2), 1), ((1, 2), 0), ((2, 0), 0), ((2, 1), 0), ((2, 2), 0),
    ))
    assert learner.conjecture(grown) == 0


def test_index_cycle_rejects_a_cycle_at_index_zero():
    with pytest.raises(ValueError):
        IndexCycleLearner(friedberg_enumeration("g", [CycleGraph(1)]))


def test_learning_record_statistics():
    rec = LearningRecord((UNKNOWN, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2))
    assert rec.horizon == 12
    assert rec.final == 2
    assert rec.mind_changes == 2
    assert rec.convergence_point == 3
    assert rec.settle_window() == 2
    assert rec.settled()
    assert not rec.settled(window=10)
    frame = rec.to_frame()
    assert list(frame.columns) == ["step", "conjecture", "mind_change"]
    assert frame["mind_change"].sum() == 2
    assert frame["conjecture"].iloc[0] == "?"


def test_short_records_never_settle():
    assert not LearningRecord((0, 0, 0)).settled()


def test_run_needs_a_positive_horizon():
    with pytest.raises(ValueError):
        run(ConstantLearner(), canonical_source(CycleGraph(1)), 0)


def test_sigma2_falls_back_to_zero():
    never = parse_sentence("exists x { Edge(x, x); forall y : !Edge(y, y) }")
    learner = Sigma2Learner(SentenceFamily(((never, 5),)))
    s = learner.session(GRAPH)
    s.extend(InformantPrefix(GRAPH, _facts(
        ((0, 0), 1), ((0, 1), 0), ((1, 0), 0), ((1, 1), 0),
    )).steps)
    assert s.current == 0
    assert learner.explain(s) is None


def test_sigma2_matches_brute_force_on_graphs():
    fam = load_family("two-graphs")
    sentences = family_sentences(fam)
    learner = Sigma2Learner(sentences, fam.enumeration)
    for pres in fam.members:
        src = shuffled_source(pres, 1)
        s = learner.session(GRAPH)
        for n in range(1, 80):
            s.feed(src.step(n - 1))
            if n % 7:
                continue
            i, k = brute_force_least_pair(sentences, s.structure(), 1 << 15)
            assert s.current == sentences.indices[i]
            assert learner.explain(s)[3] == pair(i, k)


def test_sigma2_incremental_matches_fresh():
    fam = load_family("two-graphs")
    learner = make_learner("sigma2", fam)
    prefix = canonical_source(fam.members[1]).prefix(40)
    rec = run(learner, canonical_source(fam.members[1]), 40)
    for n in (5, 13, 27, 40):
        assert learner.conjecture(prefix.take(n)) == rec.conjectures[n]


def test_make_learner_errors():
    with pytest.raises(ValueError, match="bf"):
        make_learner("sigma2", load_family("boolean-algebras"))
    with pytest.raises(ValueError):
        make_learner("sigma2")
    with pytest.raises(ValueError):
        make_learner("oracle")


@pytest.mark.slow
@pytest.mark.parametrize("family", ["orders", "pgroups", "lattices"])
def test_sigma2_learns_the_shipped_families(family):
    fam = load_family(family)
    learner = make_learner("sigma2", fam)
    for k, pres in enumerate(fam.members):
        rec = run(learner, canonical_source(pres), fam.spec.horizon)
        assert fam.is_correct(k, rec.final), (family, k, rec.final)
        assert rec.settled()


@pytest.mark.slow
@pytest.mark.parametrize("family", ["orders", "pgroups", "lattices"])
def test_sigma2_on_fair_informants(family):
    fam = load_family(family)
    learner = make_learner("sigma2", fam)
    for k, pres in enumerate(fam.members):
        for seed in range(20):
            rec = run(learner, shuffled_source(pres, seed), fam.spec.horizon)
            assert fam.is_correct(k, rec.final), (family, k, seed, rec.final)
            assert rec.settled(window=500), (family, k, seed, rec.convergence_point)


def test_member_presentations_are_distinct_types():
    assert EtaOrder(1, 4).descriptor != EtaOrder(4, 1).descriptor
    assert PGroup(1).descriptor != PGroup(2).descriptor
    assert LatticeMember(0).descriptor != LatticeMember(1).descriptor
