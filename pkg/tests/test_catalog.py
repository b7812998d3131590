# tests/test_catalog.py
import math

import pytest

from inflearn.app.catalog import (
    CERTIFICATE_PATH,
    CycleGraph,
    EdgelessGraph,
    EtaOrder,
    FamilyDescriptor,
    LatticeMember,
    NotDecidableError,
    PGroup,
    ProbeGraph,
    UnknownFamilyError,
    builtin_families,
    combine,
    embedding_oracle,
    friedberg_enumeration,
    graph_index,
    honest_graph_enumeration,
    index_set_member,
    indexed_graph_enumeration,
    is_distributive,
    isomorphic,
    load_family,
    rotate,
    top_join_reducible,
)
from inflearn.app.structure import is_substructure
from inflearn.scripts.make_certificate import render


@pytest.mark.parametrize("pres", [
    CycleGraph(1),
    CycleGraph(3),
    EdgelessGraph(),
    ProbeGraph("line-triangle"),
    EtaOrder(2, 3),
    PGroup(1),
    LatticeMember(2),
])
def test_stages_form_a_chain(pres):
    stages = [pres.stage(s) for s in range(4)]
    for a, b in zip(stages, stages[1:]):
        assert is_substructure(a, b)
    for e in stages[-1].domain:
        assert e in pres.stage(pres.elem_stage(e)).domain


def test_cycle_graph_edges():
    g = CycleGraph(2).stage(2)
    assert g.relation("Edge") == {(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)}
    with pytest.raises(ValueError):
        CycleGraph(0)


def test_eta_order_is_linear_with_the_right_ends():
    pres = EtaOrder(2, 1)
    s = pres.stage(3)
    chain = sorted(s.domain, key=pres.key)
    assert chain[:2] == [0, 1]
    assert chain[-1] == 2
    assert len(s.domain) == 2 + 1 + 7
    for x in s.domain:
        for y in s.domain:
            assert pres.truth(0, (x, y)) or pres.truth(0, (y, x))


def test_pgroup_addition():
    g = PGroup(0)
    assert g.q == 2
    assert g.add(0b101, 0b011) == 0b110
    z4 = PGroup(1)
    assert z4.add(3, 1) == 0
    assert z4.add(4 + 3, 4 + 2) == 8 + 1
    with pytest.raises(ValueError):
        PGroup(-1)


def test_unknown_probe():
    with pytest.raises(UnknownFamilyError):
        ProbeGraph("nope")


def test_lattice_cores_are_distributive_and_distinct():
    cores = [LatticeMember(i).core() for i in range(4)]
    for c in cores:
        assert len(c.domain) == 8
        assert is_distributive(c)
        assert top_join_reducible(c)
    for i, a in enumerate(cores):
        for j, b in enumerate(cores):
            assert isomorphic(a, b) == (i == j)


def test_embedding_oracle_finds_embeddings():
    assert embedding_oracle(CycleGraph(1).stage(1), CycleGraph(1).stage(3))
    assert not embedding_oracle(CycleGraph(2).stage(1), CycleGraph(1).stage(3))
    assert not embedding_oracle(CycleGraph(1).stage(3), CycleGraph(1).stage(2))


def test_certificate_file_is_current():
    assert CERTIFICATE_PATH.read_text(encoding="utf-8") == render()


def test_friedberg_enumeration():
    nu = friedberg_enumeration("orders", [EtaOrder(1, 2), EtaOrder(2, 1)])
    assert nu.is_friedberg_upto(10)
    assert nu.get(2) is None
    assert not nu.defined(-1)
    with pytest.raises(IndexError):
        nu(5)
    with pytest.raises(ValueError):
        friedberg_enumeration("dup", [EtaOrder(1, 2), EtaOrder(1, 2)])


def test_combine_and_rotate():
    nu = friedberg_enumeration("a", [EtaOrder(1, 2), EtaOrder(2, 1)])
    mu = rotate(nu, 1)
    assert mu(0).descriptor == nu(1).descriptor
    both = combine(nu, mu)
    assert both(0).descriptor == nu(0).descriptor
    assert both(1).descriptor == mu(0).descriptor
    assert not both.is_friedberg_upto(both.size)
    assert both.same_type(0, 3)


def test_graph_enumerations():
    honest = honest_graph_enumeration()
    assert honest(0).descriptor.summary == ("edgeless",)
    assert honest(3).descriptor.summary == ("cycles", 4)
    indexed = indexed_graph_enumeration()
    assert graph_index(2) == 3
    assert indexed(graph_index(2)).descriptor.summary == ("cycles", 3)
    assert indexed(2).descriptor.summary == ("edgeless",)
    target = FamilyDescriptor("graphs", ("cycles", 2))
    assert index_set_member(indexed, target, 1)
    assert not index_set_member(indexed, target, 5)
    indexed.decidable = False
    with pytest.raises(NotDecidableError):
        index_set_member(indexed, target, 1)


def test_builtin_families_load():
    names = builtin_families()
    assert {"orders", "lattices", "pgroups", "two-graphs", "cycle-graphs", "graph-probes",
            "boolean-algebras", "bf-orders"} <= set(names)
    for name in names:
        fam = load_family(name)
        assert fam.name == name
        assert len(fam.descriptors) == len(fam.spec.members)


def test_family_indices_and_correctness():
    fam = load_family("two-graphs")
    assert [fam.member_index(k) for k in range(2)] == [1, 2]
    assert fam.is_correct(0, 1)
    assert not fam.is_correct(0, 2)
    assert not fam.is_correct(0, "?")
    probes = load_family("graph-probes")
    assert probes.expected(0) == 3
    assert probes.is_correct(2, 0)


def test_descriptor_only_families():
    ba = load_family("boolean-algebras")
    assert not ba.presentable
    assert ba.signature is None
    assert ba.descriptors[-1].summary == ("ba", math.inf)
    assert ba.layout() == "descriptors only"


def test_unknown_family():
    with pytest.raises(UnknownFamilyError):
        load_family("no-such-family")
