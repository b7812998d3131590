# tests/test_structure.py
import itertools

import pytest
from hypothesis import given, strategies as st

from inflearn.app.structure import (
    GRAPH,
    LATTICE,
    ORDER,
    ArityError,
    FiniteStructure,
    Signature,
    SignatureMismatch,
    decode_tuple,
    encode_tuple,
    is_substructure,
    pair,
    pair_upper,
    parse_dump,
    shell_start,
    unary_order_signature,
    unpair,
)


@given(st.integers(1, 5), st.integers(0, 50_000))
def test_decode_then_encode_is_identity(arity, code):
    assert encode_tuple(arity, decode_tuple(arity, code)) == code


@pytest.mark.parametrize("arity", [1, 2, 3])
def test_codes_enumerate_shells_in_order(arity):
    codes = []
    for m in range(5):
        shell = [t for t in itertools.product(range(m + 1), repeat=arity) if max(t) == m]
        shell_codes = sorted(encode_tuple(arity, t) for t in shell)
        assert shell_codes[0] == shell_start(arity, m)
        codes += shell_codes
    assert codes == list(range(len(codes)))


def test_known_codes():
    assert encode_tuple(2, (0, 0)) == 0
    assert encode_tuple(2, (0, 1)) == 1
    assert encode_tuple(2, (1, 0)) == 2
    assert encode_tuple(2, (1, 1)) == 3
    assert encode_tuple(5, (0, 1, 2, 3, 4)) == 1106


def test_lexicographic_inside_a_shell():
    shell = [t for t in itertools.product(range(3), repeat=2) if max(t) == 2]
    assert sorted(shell, key=lambda t: encode_tuple(2, t)) == sorted(shell)


def test_bad_tuples():
    with pytest.raises(ArityError):
        encode_tuple(2, (1, 2, 3))
    with pytest.raises(ValueError):
        encode_tuple(2, (1, -1))
    with pytest.raises(ValueError):
        decode_tuple(2, -3)


@given(st.integers(0, 20), st.integers(0, 1000))
def test_pair_roundtrip(i, k):
    assert unpair(pair(i, k)) == (i, k)


def test_pair_is_onto_an_initial_segment():
    assert sorted(pair(*unpair(n)) for n in range(500)) == list(range(500))
    assert pair(0, 0) == 0
    assert [pair(0, 1), pair(1, 0), pair(1, 1), pair(2, 0), pair(3, 2)] == [2, 1, 5, 3, 39]


@given(st.integers(0, 12), st.integers(0, 5000))
def test_pair_upper_bounds_the_search(i, best):
    u = pair_upper(i, best)
    for k in range(u + 3):
        assert (pair(i, k) < best) == (k < u)


def test_signature_describe_and_parse():
    assert LATTICE.describe() == "Join/3 Meet/3"
    assert Signature.parse("Join/3 Meet/3") == LATTICE
    assert unary_order_signature(2).names == ["Leq", "P0", "P1"]
    with pytest.raises(ValueError):
        Signature((("R", 2), ("R", 1)))
    with pytest.raises(ValueError):
        Signature((("R", 0),))
    with pytest.raises(ValueError):
        Signature.parse("Edge/x")


def _path():
    return FiniteStructure.build(GRAPH, range(3), {"Edge": [(0, 1), (1, 2)]})


def test_truth_is_three_valued():
    g = _path()
    assert g.truth(0, (0, 1)) is True
    assert g.truth(0, (1, 0)) is False
    assert g.truth(0, (0, 7)) is None


def test_construction_checks():
    with pytest.raises(ArityError):
        FiniteStructure.build(GRAPH, range(3), {"Edge": [(0, 1, 2)]})
    with pytest.raises(ValueError):
        FiniteStructure.build(GRAPH, range(2), {"Edge": [(0, 5)]})
    with pytest.raises(SignatureMismatch):
        FiniteStructure.build(GRAPH, range(2), {"Leq": [(0, 1)]})


def test_restrict_and_substructure():
    g = _path()
    small = g.restrict({0, 1})
    assert small.relation("Edge") == {(0, 1)}
    assert is_substructure(small, g)
    assert not is_substructure(g, small)
    other = FiniteStructure.build(GRAPH, {0, 1}, {"Edge": [(1, 0)]})
    assert not is_substructure(other, g)
    with pytest.raises(SignatureMismatch):
        is_substructure(FiniteStructure.empty(ORDER), g)


def test_relabel_and_reduct():
    g = _path().relabel({0: 10})
    assert g.domain == {10, 1, 2}
    assert (10, 1) in g.relation("Edge")
    with pytest.raises(ValueError):
        _path().relabel({0: 1})
    s = FiniteStructure.build(unary_order_signature(1), {0, 1}, {"Leq": [(0, 0)], "P0": [(1,)]})
    assert s.reduct(["P0"]).signature.names == ["P0"]


def test_tuples_cover_the_domain():
    g = _path()
    assert len(list(g.tuples(0))) == 9


def test_dump_reads_back():
    g = _path()
    text = g.dump()
    assert text.splitlines()[0] == "domain: 0 1 2"
    assert parse_dump(GRAPH, text) == g
