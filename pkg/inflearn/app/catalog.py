# inflearn/app/catalog.py
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

import yaml

from inflearn.app.schema import FamilyMember, FamilySpec
from inflearn.app.structure import (
    GRAPH,
    GROUP,
    LATTICE,
    ORDER,
    FiniteStructure,
    Signature,
    Tup,
    pair,
    unpair,
)

log = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parents[1] / "data"
FAMILY_DIR = DATA_DIR / "families"
CERTIFICATE_PATH = DATA_DIR / "lattice_certificate.json"

EMBEDDING_LIMIT = 12


class UnknownFamilyError(ValueError):
    pass


class NotDecidableError(ValueError):
    pass


class EmbeddingSizeError(ValueError):
    pass


@dataclass(frozen=True)
class FamilyDescriptor:
    """
    Names one isomorphism type of a catalog family.
    Equality compares (family, summary) only: equal iff isomorphic within the family.
    """
    family: str
    summary: Tuple
    index: int = field(default=0, compare=False)
    label: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.label or f"{self.family}{self.summary}"


# ----------------------------
# Presentations
# ----------------------------

class Presentation(ABC):
    """
    A computable structure as a chain of finite stages.
    - stage(s) has domain range(stage_size(s)); stages are substructures of later stages
    - element e is present from stage elem_stage(e) on
    - truth(j, t) reads the limit structure; it agrees with every stage containing t
    """

    def __init__(self, signature: Signature, descriptor: FamilyDescriptor) -> None:
        self.signature = signature
        self.descriptor = descriptor
        self._stages: Dict[int, FiniteStructure] = {}

    @abstractmethod
    def stage_size(self, s: int) -> int:
        ...

    @abstractmethod
    def elem_stage(self, e: int) -> int:
        ...

    @abstractmethod
    def _holds(self, j: int, t: Tup) -> bool:
        ...

    def _relations(self, n: int) -> Tuple[Iterable[Tup], ...]:
        """True tuples over range(n); subclasses override when a direct listing is cheaper."""
        return tuple(
            [t for t in product(range(n), repeat=ar) if self._holds(j, t)]
            for j, ar in enumerate(self.signature.arities)
        )

    def stage(self, s: int) -> FiniteStructure:
        if s < 0:
            raise ValueError("stages are naturals")
        st = self._stages.get(s)
        if st is None:
            n = self.stage_size(s)
            rels = tuple(frozenset(r) for r in self._relations(n))
            st = FiniteStructure(self.signature, frozenset(range(n)), rels)
            self._stages[s] = st
        return st

    def truth(self, j: int, t: Tup) -> bool:
        return self._holds(j, tuple(t))

    def stage_for(self, elements: Iterable[int]) -> int:
        """Smallest stage containing all given elements."""
        return max((self.elem_stage(e) for e in elements), default=0)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor}>"


class CycleGraph(Presentation):
    """G_i: infinitely many disjoint directed (i+1)-cycles; stage s holds s of them."""

    def __init__(self, i: int, family: str = "graphs", index: int = 0) -> None:
        if i < 1:
            raise ValueError("G_i needs i >= 1 (cycles of length >= 2)")
        self.i = i
        self.length = i + 1
        super().__init__(GRAPH, FamilyDescriptor(family, ("cycles", self.length), index, f"G{i}"))

    def stage_size(self, s: int) -> int:
        return s * self.length

    def elem_stage(self, e: int) -> int:
        return e // self.length + 1

    def _succ(self, u: int) -> int:
        base = (u // self.length) * self.length
        return base + (u - base + 1) % self.length

    def _holds(self, j: int, t: Tup) -> bool:
        u, v = t
        return v == self._succ(u)

    def _relations(self, n: int):
        return ([(u, self._succ(u)) for u in range(n)],)


class EdgelessGraph(Presentation):
    def __init__(self, family: str = "graphs", index: int = 0) -> None:
        super().__init__(GRAPH, FamilyDescriptor(family, ("edgeless",), index, "edgeless"))

    def stage_size(self, s: int) -> int:
        return s

    def elem_stage(self, e: int) -> int:
        return e + 1

    def _holds(self, j: int, t: Tup) -> bool:
        return False

    def _relations(self, n: int):
        return ([],)


PROBES: Dict[str, Tuple[Tuple[Tup, ...], str, int]] = {
    # name: (core edges, tail kind, first tail vertex)
    "singletons-triangle": (((0, 1), (1, 2), (2, 0)), "isolated", 3),
    "singletons-two-cycle": (((0, 1), (1, 0)), "isolated", 2),
    "triangle-pendant": (((0, 1), (1, 2), (2, 0), (0, 3)), "isolated", 4),
    "line-triangle": (((0, 1), (1, 2), (2, 0)), "path", 3),
    "line": ((), "path", 0),
}


class ProbeGraph(Presentation):
    """Graphs outside the cycle family, used to observe false positives of the graph learners."""

    def __init__(self, name: str, family: str = "graph-probes", index: int = 0) -> None:
        if name not in PROBES:
            raise UnknownFamilyError(f"unknown probe graph {name!r}; known: {', '.join(PROBES)}")
        self.name = name
        core, self.tail, self.tail_start = PROBES[name]
        self.core = frozenset(core)
        super().__init__(GRAPH, FamilyDescriptor(family, ("probe", name), index, name))

    def stage_size(self, s: int) -> int:
        return s

    def elem_stage(self, e: int) -> int:
        return e + 1

    def _holds(self, j: int, t: Tup) -> bool:
        u, v = t
        if (u, v) in self.core:
            return True
        return self.tail == "path" and u >= self.tail_start and v == u + 1

    def _relations(self, n: int):
        edges = [e for e in self.core if e[0] < n and e[1] < n]
        if self.tail == "path":
            edges += [(u, u + 1) for u in range(self.tail_start, n - 1)]
        return (edges,)


class EtaOrder(Presentation):
    """
    The linear order a + eta + b.
    - ids 0..a-1: left endpoints; a..a+b-1: right endpoints; then dyadic rationals in (0,1)
    - dyadic number d lives in stage t = bit_length(d+1) with value (2r+1)/2^t,
      r = d - (2^(t-1) - 1); stage s holds a + b + 2^s - 1 elements
    """

    def __init__(self, a: int, b: int, family: str = "orders", index: int = 0) -> None:
        if a < 0 or b < 0:
            raise ValueError("endpoint counts are naturals")
        self.a, self.b = a, b
        label = f"{a}+eta+{b}"
        super().__init__(ORDER, FamilyDescriptor(family, ("order", a, b), index, label))

    def stage_size(self, s: int) -> int:
        return self.a + self.b + (1 << s) - 1

    def elem_stage(self, e: int) -> int:
        d = e - self.a - self.b
        return 0 if d < 0 else (d + 1).bit_length()

    def key(self, e: int) -> Tuple[int, Fraction]:
        if e < self.a:
            return (0, Fraction(e))
        if e < self.a + self.b:
            return (2, Fraction(e))
        d = e - self.a - self.b
        t = (d + 1).bit_length()
        r = d - ((1 << (t - 1)) - 1)
        return (1, Fraction(2 * r + 1, 1 << t))

    def _holds(self, j: int, t: Tup) -> bool:
        x, y = t
        return self.key(x) <= self.key(y)

    def _relations(self, n: int):
        chain = sorted(range(n), key=self.key)
        return ([(x, y) for k, x in enumerate(chain) for y in chain[k:]],)


class PGroup(Presentation):
    """
    A_i = direct sum of countably many Z(p^(i+1)); q = p^(i+1).
    - element ids are base-q digit vectors (digit d = coordinate d)
    - stage s = Z(q)^s, the ids below q^s
    """

    def __init__(self, i: int, p: int = 2, family: str = "pgroups", index: int = 0) -> None:
        if i < 0 or p < 2:
            raise ValueError("need i >= 0 and a prime p >= 2")
        self.i, self.p = i, p
        self.q = p ** (i + 1)
        label = f"Z({p}^{i + 1})^omega"
        super().__init__(GROUP, FamilyDescriptor(family, ("pgroup", p, i), index, label))

    def stage_size(self, s: int) -> int:
        return self.q ** s

    def elem_stage(self, e: int) -> int:
        s = 0
        while e:
            e //= self.q
            s += 1
        return s

    def add(self, x: int, y: int) -> int:
        out, place = 0, 1
        while x or y:
            out += ((x % self.q + y % self.q) % self.q) * place
            x //= self.q
            y //= self.q
            place *= self.q
        return out

    def _holds(self, j: int, t: Tup) -> bool:
        x, y, z = t
        return self.add(x, y) == z

    def _relations(self, n: int):
        return ([(x, y, self.add(x, y)) for x in range(n) for y in range(n)],)


# ----------------------------
# Lattices
# ----------------------------

# Posets of join-irreducibles: (number of points, strict order pairs x < y).
LATTICE_POSETS: Tuple[Tuple[int, Tuple[Tuple[int, int], ...]], ...] = (
    (3, ()),                                        # antichain: 2^3
    (4, ((0, 1), (1, 2))),                          # 3-chain plus a point: 4 x 2
    (4, ((0, 1), (2, 1), (2, 3))),                  # the N poset
    (6, ((0, 1), (1, 2), (2, 3), (3, 4), (3, 5))),  # 4-chain with two tops
)


def _downsets(n: int, order: Iterable[Tuple[int, int]]) -> List[int]:
    below = {y: {x for x, z in order if z == y} for y in range(n)}
    for k in range(n):
        for y in range(n):
            if k in below[y]:
                below[y] |= below[k]
    masks = []
    for m in range(1 << n):
        if all(all(m >> x & 1 for x in below[y]) for y in range(n) if m >> y & 1):
            masks.append(m)
    return sorted(masks, key=lambda m: (bin(m).count("1"), m))


class LatticeMember(Presentation):
    """
    B_i = D_i with an omega-chain glued above its top.
    - D_i: downset lattice of LATTICE_POSETS[i], ids 0..7 by (popcount, mask)
    - chain element 8+k enters at stage k+1
    """

    def __init__(self, i: int, family: str = "lattices", index: int = 0) -> None:
        if not 0 <= i < len(LATTICE_POSETS):
            raise ValueError(f"lattice member index must be < {len(LATTICE_POSETS)}")
        self.i = i
        self.masks = _downsets(*LATTICE_POSETS[i])
        self.core_size = len(self.masks)
        self._id = {m: k for k, m in enumerate(self.masks)}
        super().__init__(LATTICE, FamilyDescriptor(family, ("lattice", i), index, f"D{i}+omega"))

    def stage_size(self, s: int) -> int:
        return self.core_size + s

    def elem_stage(self, e: int) -> int:
        return max(0, e - self.core_size + 1)

    def join(self, x: int, y: int) -> int:
        if x < self.core_size and y < self.core_size:
            return self._id[self.masks[x] | self.masks[y]]
        return max(x, y)

    def meet(self, x: int, y: int) -> int:
        if x < self.core_size and y < self.core_size:
            return self._id[self.masks[x] & self.masks[y]]
        return min(x, y)

    def _holds(self, j: int, t: Tup) -> bool:
        x, y, z = t
        return (self.join if j == 0 else self.meet)(x, y) == z

    def _relations(self, n: int):
        r = range(n)
        return (
            [(x, y, self.join(x, y)) for x in r for y in r],
            [(x, y, self.meet(x, y)) for x in r for y in r],
        )

    def core(self) -> FiniteStructure:
        return self.stage(0)


# ----------------------------
# Embedding / isomorphism oracle
# ----------------------------

def _tuples_over(elems: List[int], n: int, must: int) -> Iterable[Tup]:
    def rec(k: int, acc: Tup, hit: bool):
        if k == n:
            if hit:
                yield acc
            return
        for x in elems:
            yield from rec(k + 1, acc + (x,), hit or x == must)
    return rec(0, (), False)


def embedding_oracle(a: FiniteStructure, b: FiniteStructure) -> bool:
    """
    Is there an injective f: dom(a) -> dom(b) with a |= P(t) <=> b |= P(f t) for every P, t?
    - exhaustive backtracking; |dom(a)| <= 12
    """
    if a.signature != b.signature:
        return False
    if len(a.domain) > EMBEDDING_LIMIT:
        raise EmbeddingSizeError(
            f"embedding search limited to {EMBEDDING_LIMIT} source elements, got {len(a.domain)}"
        )
    src = sorted(a.domain)
    tgt = sorted(b.domain)
    if len(src) > len(tgt):
        return False
    arities = a.signature.arities
    f: Dict[int, int] = {}
    used = set()

    def ok(x: int) -> bool:
        assigned = list(f)
        for j, n in enumerate(arities):
            for t in _tuples_over(assigned, n, x):
                if a.holds(j, t) != b.holds(j, tuple(f[v] for v in t)):
                    return False
        return True

    def search(k: int) -> bool:
        if k == len(src):
            return True
        x = src[k]
        for y in tgt:
            if y in used:
                continue
            f[x] = y
            used.add(y)
            if ok(x) and search(k + 1):
                return True
            used.discard(y)
            del f[x]
        return False

    return search(0)


def isomorphic(a: FiniteStructure, b: FiniteStructure) -> bool:
    return len(a.domain) == len(b.domain) and embedding_oracle(a, b)


def _operation(s: FiniteStructure, name: str) -> Dict[Tuple[int, int], int]:
    table: Dict[Tuple[int, int], int] = {}
    for x, y, z in s.relation(name):
        if (x, y) in table:
            raise ValueError(f"{name} is not a function at ({x},{y})")
        table[(x, y)] = z
    missing = len(s.domain) ** 2 - len(table)
    if missing:
        raise ValueError(f"{name} is not total ({missing} pairs without a value)")
    return table


def is_distributive(s: FiniteStructure) -> bool:
    """x ^ (y v z) == (x ^ y) v (x ^ z) for all x, y, z."""
    join = _operation(s, "Join")
    meet = _operation(s, "Meet")
    dom = sorted(s.domain)
    return all(
        meet[(x, join[(y, z)])] == join[(meet[(x, y)], meet[(x, z)])]
        for x in dom for y in dom for z in dom
    )


def top_join_reducible(s: FiniteStructure) -> bool:
    join = _operation(s, "Join")
    dom = sorted(s.domain)
    top = next(x for x in dom if all(join[(x, y)] == x for y in dom))
    return any(join[(x, y)] == top for x in dom for y in dom if top not in (x, y))


def certify_lattices(extended_stage: int = 8) -> Dict[str, object]:
    """
    Certificate for the lattice family gate.
    - every D_i is a distributive lattice with a join-reducible top
    - D_i embeds into D_j and into stage `extended_stage` of B_j only when i == j
    """
    members = [LatticeMember(i) for i in range(len(LATTICE_POSETS))]
    rows = []
    for m in members:
        core = m.core()
        rows.append({
            "index": m.i,
            "join_irreducibles": LATTICE_POSETS[m.i][0],
            "size": len(core.domain),
            "distributive": is_distributive(core),
            "top_join_reducible": top_join_reducible(core),
        })
    embeds_core = [[embedding_oracle(a.core(), b.core()) for b in members] for a in members]
    embeds_ext = [
        [embedding_oracle(a.core(), b.stage(extended_stage)) for b in members] for a in members
    ]
    log.info("certified %d lattice members", len(members))
    return {
        "family": "lattices",
        "extended_stage": extended_stage,
        "members": rows,
        "embeds_core": embeds_core,
        "embeds_extended": embeds_ext,
    }


# ----------------------------
# Enumerations
# ----------------------------

@dataclass
class Enumeration:
    """
    Effective list of presentations, e -> nu(e).
    - lookup returns None where nu is undefined (finite lists)
    - decidable: index equivalence can be decided on descriptors
    """
    name: str
    lookup: Callable[[int], Optional[Presentation]]
    size: Optional[int] = None
    decidable: bool = True
    friedberg: bool = False
    _cache: Dict[int, Optional[Presentation]] = field(default_factory=dict, repr=False)

    def __call__(self, e: int) -> Presentation:
        p = self.get(e)
        if p is None:
            raise IndexError(f"{self.name}({e}) is undefined")
        return p

    def get(self, e: int) -> Optional[Presentation]:
        if e < 0:
            return None
        if e not in self._cache:
            self._cache[e] = self.lookup(e)
        return self._cache[e]

    def defined(self, e: int) -> bool:
        return self.get(e) is not None

    def descriptor(self, e: int) -> FamilyDescriptor:
        return self(e).descriptor

    def same_type(self, e1: int, e2: int) -> bool:
        if not self.decidable:
            raise NotDecidableError("index set not decidable at descriptor level")
        return self.descriptor(e1) == self.descriptor(e2)

    def index_of(self, target: FamilyDescriptor, limit: int = 4096) -> Optional[int]:
        stop = limit if self.size is None else min(limit, self.size)
        for e in range(stop):
            p = self.get(e)
            if p is not None and p.descriptor == target:
                return e
        return None

    def is_friedberg_upto(self, limit: int) -> bool:
        seen = set()
        stop = limit if self.size is None else min(limit, self.size)
        for e in range(stop):
            p = self.get(e)
            if p is None:
                continue
            if p.descriptor in seen:
                return False
            seen.add(p.descriptor)
        return True


def friedberg_enumeration(name: str, members: List[Presentation]) -> Enumeration:
    members = list(members)
    descs = [m.descriptor for m in members]
    if len(set(descs)) != len(descs):
        raise ValueError(f"{name}: members are not pairwise non-isomorphic")
    return Enumeration(
        name, lambda e: members[e] if e < len(members) else None,
        size=len(members), decidable=True, friedberg=True,
    )


def combine(nu: Enumeration, mu: Enumeration) -> Enumeration:
    """(nu + mu)(2n) = nu(n), (nu + mu)(2n+1) = mu(n)."""
    size = None
    if nu.size is not None and mu.size is not None:
        size = max(2 * nu.size - 1, 2 * mu.size)

    def lookup(e: int) -> Optional[Presentation]:
        return nu.get(e // 2) if e % 2 == 0 else mu.get(e // 2)

    return Enumeration(
        f"({nu.name}+{mu.name})", lookup, size=size,
        decidable=nu.decidable and mu.decidable, friedberg=False,
    )


def rotate(nu: Enumeration, k: int = 1) -> Enumeration:
    """Finite nu shifted cyclically by k: mu(e) = nu((e + k) mod size)."""
    if nu.size is None:
        raise ValueError("rotate needs a finite enumeration")
    n = nu.size
    return Enumeration(
        f"{nu.name}>>{k}", lambda e: nu.get((e + k) % n) if e < n else None,
        size=n, decidable=nu.decidable, friedberg=nu.friedberg,
    )


def honest_graph_enumeration(family: str = "graphs") -> Enumeration:
    """0 -> edgeless graph, e >= 1 -> G_e."""
    def lookup(e: int) -> Presentation:
        return EdgelessGraph(family, e) if e == 0 else CycleGraph(e, family, e)
    return Enumeration("honest-graphs", lookup, size=None, decidable=True, friedberg=True)


def indexed_graph_enumeration(family: str = "graphs") -> Enumeration:
    """<i,0> -> G_i for i >= 1; every other index names the edgeless graph (outside the family)."""
    def lookup(e: int) -> Presentation:
        i, k = unpair(e)
        if k == 0 and i >= 1:
            return CycleGraph(i, family, e)
        return EdgelessGraph(family, e)
    return Enumeration("indexed-graphs", lookup, size=None, decidable=True, friedberg=False)


def graph_index(i: int) -> int:
    """Index of G_i in the indexed graph enumeration."""
    return pair(i, 0)


def index_set_member(nu: Enumeration, target: FamilyDescriptor, e: int) -> bool:
    if not nu.decidable:
        raise NotDecidableError("index set not decidable at descriptor level")
    p = nu.get(e)
    return p is not None and p.descriptor == target


# ----------------------------
# Family specs
# ----------------------------

@dataclass
class Family:
    spec: FamilySpec
    members: List[Presentation]
    descriptors: List[FamilyDescriptor]
    enumeration: Optional[Enumeration]
    source_path: Optional[Path] = None

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def kind(self) -> str:
        return self.spec.kind

    @property
    def presentable(self) -> bool:
        return bool(self.members)

    @property
    def signature(self) -> Optional[Signature]:
        return self.members[0].signature if self.members else None

    @property
    def sentences_path(self) -> Optional[Path]:
        if not self.spec.sentences:
            return None
        base = self.source_path.parent if self.source_path else FAMILY_DIR
        p = Path(self.spec.sentences)
        return p if p.is_absolute() else (base / p).resolve()

    def member_index(self, k: int) -> Optional[int]:
        """nu-index of member k (None when the member has no index in nu)."""
        if self.enumeration is None:
            return None
        return self.enumeration.index_of(self.descriptors[k])

    def expected(self, k: int) -> Optional[int]:
        m = self.spec.members[k]
        if m.expect is not None:
            return m.expect
        return self.member_index(k)

    def is_correct(self, k: int, conjecture) -> bool:
        """Conjecture names a copy of member k (or equals the probe's recorded expectation)."""
        if self.spec.members[k].expect is not None:
            return conjecture == self.spec.members[k].expect
        if not isinstance(conjecture, int) or self.enumeration is None:
            return False
        p = self.enumeration.get(conjecture)
        return p is not None and p.descriptor == self.descriptors[k]

    def layout(self) -> str:
        if self.enumeration is None:
            return "descriptors only"
        idx = ", ".join(f"{d}->{self.member_index(k)}" for k, d in enumerate(self.descriptors))
        return f"{self.enumeration.name}: {idx}"


def _descriptor_only(spec: FamilySpec, k: int, m: FamilyMember) -> FamilyDescriptor:
    if spec.kind == "boolean-algebra":
        if m.atoms is None:
            raise ValueError(f"{spec.name}[{k}]: boolean-algebra members need 'atoms'")
        return FamilyDescriptor(spec.name, ("ba", m.atoms), k, m.label or f"BA(atoms={m.atoms})")
    if None in (m.t0, m.t2, m.sup_block, m.sup_count):
        raise ValueError(f"{spec.name}[{k}]: order descriptors need t0, t2, sup_block, sup_count")
    return FamilyDescriptor(
        spec.name, ("lo", m.t0, m.t2, m.sup_block, m.sup_count), k,
        m.label or f"LO(t0={m.t0},t2={m.t2})",
    )


def build_member(spec: FamilySpec, k: int, m: FamilyMember) -> Presentation:
    kind, fam = spec.kind, spec.name
    if kind == "graph":
        if m.edgeless:
            return EdgelessGraph(fam, k)
        if m.cycle is None:
            raise ValueError(f"{fam}[{k}]: graph members need 'cycle' or 'edgeless'")
        return CycleGraph(m.cycle, fam, k)
    if kind == "graph-probe":
        if m.probe is None:
            raise ValueError(f"{fam}[{k}]: probe members need 'probe'")
        return ProbeGraph(m.probe, fam, k)
    if kind == "order":
        if m.a is None or m.b is None:
            raise ValueError(f"{fam}[{k}]: order members need 'a' and 'b'")
        return EtaOrder(m.a, m.b, fam, k)
    if kind == "lattice":
        return LatticeMember(m.index if m.index is not None else k, fam, k)
    if kind == "pgroup":
        return PGroup(m.i if m.i is not None else k, m.p, fam, k)
    raise UnknownFamilyError(f"family kind {kind!r} has no presentations")


def family_from_spec(spec: FamilySpec, source_path: Optional[Path] = None) -> Family:
    if spec.kind in ("boolean-algebra", "order-descriptor"):
        descs = [_descriptor_only(spec, k, m) for k, m in enumerate(spec.members)]
        return Family(spec, [], descs, None, source_path)
    members = [build_member(spec, k, m) for k, m in enumerate(spec.members)]
    descs = [p.descriptor for p in members]
    if spec.enumeration == "honest":
        nu = honest_graph_enumeration(spec.name)
    elif spec.enumeration == "indexed":
        nu = indexed_graph_enumeration(spec.name)
    elif spec.enumeration == "friedberg":
        nu = friedberg_enumeration(spec.name, members)
    else:
        nu = None
    return Family(spec, members, descs, nu, source_path)


_FAMILIES: Dict[str, Family] = {}


def builtin_families() -> List[str]:
    return sorted(p.stem for p in FAMILY_DIR.glob("*.yaml"))


def load_spec(path: Union[str, Path]) -> FamilySpec:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise UnknownFamilyError(f"family spec not found: {path}") from e
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: family spec must be a mapping")
    return FamilySpec(**raw)


def load_family(name_or_path: Union[str, Path]) -> Family:
    """Builtin family name (data/families/<name>.yaml) or a path to a spec file."""
    key = str(name_or_path)
    fam = _FAMILIES.get(key)
    if fam is not None:
        return fam
    path = Path(key)
    if not path.suffix:
        path = FAMILY_DIR / f"{key}.yaml"
        if not path.exists():
            raise UnknownFamilyError(
                f"unknown family {key!r}; builtin: {', '.join(builtin_families())}"
            )
    spec = load_spec(path)
    fam = family_from_spec(spec, path.resolve())
    _FAMILIES[key] = fam
    log.debug("loaded family %s (%d members) from %s", fam.name, len(fam.descriptors), path)
    return fam


def stage(pres: Presentation, s: int) -> FiniteStructure:
    return pres.stage(s)
