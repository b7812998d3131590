# tests/test_locking.py
import pytest

from inflearn.app.catalog import CycleGraph, EtaOrder, load_family
from inflearn.app.informant import DiagramBuilder, InformantPrefix, canonical_source, describes_finite_part
from inflearn.app.learners import (
    ConstantLearner,
    LargestElementLearner,
    ParityLearner,
    TwoGraphLearner,
    make_learner,
    run,
)
from inflearn.app.locking import (
    INCONCLUSIVE,
    LOCKING,
    MIND_CHANGE,
    InconsistentBaseError,
    adversary,
    find_weak_locking,
    incomplete_elements,
    is_locking_up_to,
    shell_tuples,
    shell_unit,
    warmup_base,
)
from inflearn.app.structure import GRAPH


def test_shell_tuples():
    assert shell_tuples(2, 1) == [(0, 1), (1, 0), (1, 1)]
    assert len(shell_tuples(3, 2)) == 27 - 8


def test_shell_unit_completes_the_shell():
    pres = CycleGraph(1)
    b = DiagramBuilder(GRAPH)
    for step in canonical_source(pres).prefix(5).steps:
        b.feed(step)
    assert incomplete_elements(b, 2) == [2, 3]
    unit = shell_unit(b, pres, 3)
    assert len(unit) == 7
    for step in unit:
        b.feed(step)
    assert incomplete_elements(b, 1) == [2]
    assert describes_finite_part(InformantPrefix(GRAPH, tuple(unit)), pres)


def test_constant_learner_locks_at_once():
    pres = EtaOrder(1, 1)
    v = find_weak_locking(ConstantLearner(), pres, InformantPrefix(pres.signature), depth=2, width=3)
    assert v.outcome == LOCKING
    assert v.locking
    assert v.conjecture == 0
    assert v.probes == 3 + 3 * 3
    assert v.moves == 0


def test_parity_learner_has_no_locking_sequence():
    pres = CycleGraph(1)
    base = canonical_source(pres).prefix(3)
    v = find_weak_locking(ParityLearner(), pres, base, max_moves=0)
    assert v.outcome == MIND_CHANGE
    assert v.witness.steps[:3] == base.steps
    assert v.witness_conjecture != v.conjecture
    assert v.sigma == base


def test_moves_follow_the_witness():
    pres = CycleGraph(1)
    v = find_weak_locking(ParityLearner(), pres, InformantPrefix(GRAPH), max_moves=3)
    assert v.outcome == MIND_CHANGE
    assert v.moves == 3
    assert len(v.sigma) == 1 + 3 + 5


def test_two_graph_learner_locks_after_the_first_cycle():
    pres = CycleGraph(1)
    v = find_weak_locking(TwoGraphLearner(), pres, canonical_source(pres).prefix(4), depth=2)
    assert v.locking
    assert v.conjecture == 1


def test_budget_exhaustion_is_inconclusive():
    pres = CycleGraph(1)
    v = find_weak_locking(ConstantLearner(), pres, InformantPrefix(GRAPH), budget=2)
    assert v.outcome == INCONCLUSIVE
    assert v.probes == 2


def test_false_base_is_rejected():
    pres = CycleGraph(1)
    lie = InformantPrefix(GRAPH, ((((0, 0), 1),),))
    with pytest.raises(InconsistentBaseError):
        find_weak_locking(ConstantLearner(), pres, lie)
    with pytest.raises(InconsistentBaseError):
        adversary(ConstantLearner(), pres, base=lie)


def test_adversary_drives_parity_to_the_target():
    pres = CycleGraph(2)
    res = adversary(ParityLearner(), pres, target_changes=10)
    assert res.reached
    assert res.mind_changes == 10
    assert len(res.prefix) == 10
    assert describes_finite_part(res.prefix, pres)


def test_adversary_against_largest_element():
    pres = EtaOrder(2, 2)
    res = adversary(LargestElementLearner(), pres, target_changes=10)
    assert res.reached
    assert describes_finite_part(res.prefix, pres)
    p = res.prefix
    changes = sum(
        1 for n in range(len(p))
        if LargestElementLearner().conjecture(p.take(n)) != LargestElementLearner().conjecture(p.take(n + 1))
    )
    assert changes >= 10
    assert res.mind_changes == 10


def test_adversary_counts_after_the_base():
    pres = CycleGraph(1)
    base = canonical_source(pres).prefix(4)
    res = adversary(ParityLearner(), pres, target_changes=2, base=base)
    assert res.base_length == 4
    assert res.prefix.steps[:4] == base.steps
    assert len(res.prefix) == 6


def test_adversary_is_inconclusive_against_a_constant():
    res = adversary(ConstantLearner(), CycleGraph(1), target_changes=1, budget=50)
    assert res.inconclusive
    assert res.mind_changes == 0


def test_locking_up_to_the_horizon():
    summary = is_locking_up_to(TwoGraphLearner(), CycleGraph(1), n_informants=2, horizon=60, depth=2)
    assert summary.passed
    assert [s.seed for s in summary.sources] == [0, 1]
    for s in summary.sources:
        assert s.n == s.convergence_point


def test_adversary_against_parity():
    res = adversary(ParityLearner(), CycleGraph(2), target_changes=10)
    assert res.reached
    assert res.mind_changes == 10
    assert describes_finite_part(res.prefix, CycleGraph(2))


@pytest.mark.parametrize("family, learner", [
    ("two-graphs", "two-graph"),
    pytest.param("cycle-graphs", "index-cycle", marks=pytest.mark.slow),
])
def test_graph_learners_resist_the_adversary_on_their_family(family, learner):
    fam = load_family(family)
    l = make_learner(learner, fam)
    for pres in fam.members:
        base = warmup_base(l, pres, fam.spec.horizon)
        assert base is not None
        res = adversary(l, pres, target_changes=2, budget=10_000, base=base)
        assert res.inconclusive
        assert res.mind_changes == 0


@pytest.mark.slow
@pytest.mark.parametrize("family", ["orders", "pgroups", "lattices"])
def test_sigma2_resists_the_adversary_on_its_family(family):
    fam = load_family(family)
    l = make_learner("sigma2", fam)
    for k, pres in enumerate(fam.members):
        base = warmup_base(l, pres, fam.spec.horizon)
        assert base is not None, (family, k)
        res = adversary(l, pres, target_changes=2, budget=10_000, base=base)
        assert res.inconclusive, (family, k)


def test_warmup_base_needs_a_settled_run():
    pres = CycleGraph(1)
    base = warmup_base(TwoGraphLearner(), pres, 60)
    assert base is not None
    assert run(TwoGraphLearner(), canonical_source(pres), 60).convergence_point == len(base)
    assert warmup_base(ParityLearner(), pres, 60) is None
    assert warmup_base(TwoGraphLearner(), pres, 1) is None


@pytest.mark.slow
def test_two_graph_learner_locks_on_ten_sources_at_depth_four():
    fam = load_family("two-graphs")
    for pres in fam.members:
        summary = is_locking_up_to(TwoGraphLearner(), pres, n_informants=10, horizon=fam.spec.horizon, depth=4)
        assert summary.passed, str(pres.descriptor)
        assert len(summary.sources) == 10
