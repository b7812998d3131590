# inflearn/app/embedding.py
from __future__ import annotations

import bisect
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Deque, Dict, List, Optional, Sequence, Tuple

from inflearn.app.catalog import Enumeration, Family
from inflearn.app.informant import InformantSource
from inflearn.app.learners import Conjecture, Learner
from inflearn.app.sigma2 import CompatibilityChecker, xi_sentence
from inflearn.app.structure import FiniteStructure, unary_order_signature

log = logging.getLogger(__name__)

Point = Tuple[int, Fraction]  # (predicate, rational)


class OracleRangeError(ValueError):
    pass


class UnstableLimitError(ValueError):
    pass


@dataclass(frozen=True)
class IndexOracle:
    """
    Finite stand-in for the index oracle: conjecture e -> member i when e is a nu-index of member i.
    Conjectures outside the table are "not an index".
    """
    table: Dict[int, int] = field(default_factory=dict)

    def lookup(self, t: Conjecture) -> Optional[int]:
        if not isinstance(t, int):
            return None
        return self.table.get(t)

    @property
    def targets(self) -> List[int]:
        return sorted(set(self.table.values()))

    @classmethod
    def from_enumeration(cls, nu: Enumeration, family: Family, limit: int = 1024) -> "IndexOracle":
        """Every e < limit whose nu(e) matches a member descriptor."""
        stop = limit if nu.size is None else min(limit, nu.size)
        table = {}
        for e in range(stop):
            p = nu.get(e)
            if p is None:
                continue
            for k, d in enumerate(family.descriptors):
                if p.descriptor == d:
                    table[e] = k
                    break
        return cls(table)

    @classmethod
    def parse(cls, text: str) -> "IndexOracle":
        """'2:1,5:0' -> {2: 1, 5: 0}."""
        table = {}
        for item in filter(None, (x.strip() for x in text.split(","))):
            e, _, i = item.partition(":")
            table[int(e)] = int(i)
        return cls(table)


@dataclass(frozen=True)
class StApprox:
    """
    Finite stage of the image structure.
    - points[j]: sorted rationals currently in P_j (disjoint copies; no order across predicates)
    - least[j]: P_j is a copy of [q_s; inf) rather than (q_s; inf)
    - ids maps (j, q) to element ids; ids never change between stages
    """
    stage: int
    points: Tuple[Tuple[Fraction, ...], ...]
    least: Tuple[bool, ...]
    anchors: Tuple[Fraction, ...]
    conjecture: Optional[Conjecture] = None
    target: Optional[int] = None
    ids: Dict[Point, int] = field(default_factory=dict, compare=False, repr=False)

    @property
    def n_predicates(self) -> int:
        return len(self.points)

    def least_predicates(self) -> List[int]:
        return [j for j, f in enumerate(self.least) if f]

    def element_ids(self, j: int) -> List[int]:
        return [self.ids[(j, q)] for q in self.points[j]]

    def to_structure(self) -> FiniteStructure:
        sig = unary_order_signature(self.n_predicates)
        leq = []
        unary = []
        for j, pts in enumerate(self.points):
            ids = [self.ids[(j, q)] for q in pts]
            leq += [(ids[a], ids[b]) for a in range(len(ids)) for b in range(a, len(ids))]
            unary.append([(x,) for x in ids])
        rels = {"Leq": leq}
        rels.update({f"P{j}": u for j, u in enumerate(unary)})
        domain = [x for pts_ids in unary for (x,) in pts_ids]
        return FiniteStructure.build(sig, domain, rels)


class _Stages:
    """Mutable construction state behind a run of StApprox snapshots."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.points: List[List[Fraction]] = [[] for _ in range(n)]
        self.least = [False] * n
        self.gaps: List[Deque[Tuple[Fraction, Fraction]]] = [deque() for _ in range(n)]
        self.ids: Dict[Point, int] = {}

    def add(self, j: int, q: Fraction) -> None:
        pts = self.points[j]
        k = bisect.bisect_left(pts, q)
        if k < len(pts) and pts[k] == q:
            return
        pts.insert(k, q)
        self.ids[(j, q)] = len(self.ids)
        if k + 1 < len(pts):
            self.gaps[j].append((q, pts[k + 1]))

    def bisect_oldest(self, j: int) -> None:
        gaps = self.gaps[j]
        if gaps:
            a, b = gaps.popleft()
            mid = (a + b) / 2
            self.add(j, mid)
            gaps.append((a, mid))
            gaps.append((mid, b))

    def snapshot(self, stage: int, anchors: List[Fraction], t: Optional[Conjecture], target: Optional[int]) -> StApprox:
        return StApprox(
            stage,
            tuple(tuple(p) for p in self.points),
            tuple(self.least),
            tuple(anchors),
            t,
            target,
            dict(self.ids),
        )


def anchor(s: int) -> Fraction:
    """q_s = -s: a strictly descending sequence of rationals."""
    return Fraction(-s)


def embed_run(
    l: Learner,
    src: InformantSource,
    oracle: IndexOracle,
    stages: int,
    n_predicates: int,
    stride: int = 1,
) -> List[StApprox]:
    """
    Stages 0..stages of the image of the source's structure.
    - stage 0: every P_j holds the single point 1 of (q_0; inf)
    - stage s+1 reads t = M(I[(s+1) * stride]):
      t not an index -> every P_k grows to (q_{s+1}; inf)
      t indexes j and P_j has no least element -> P_j becomes [q_{s+1}; inf), the rest open
      t indexes j and P_j has a least element -> P_j kept, the rest open
    - each stage also bisects every predicate's oldest gap; every 4th stage adds a point on top
    """
    if stages < 1 or stride < 1:
        raise ValueError("stages and stride must be >= 1")
    if n_predicates < 1:
        raise ValueError("need at least one predicate")
    bad = [i for i in oracle.targets if i >= n_predicates]
    if bad:
        raise OracleRangeError(f"oracle targets {bad} need more than {n_predicates} predicates")

    st = _Stages(n_predicates)
    for j in range(n_predicates):
        st.add(j, Fraction(1))
    anchors = [anchor(0)]
    out = [st.snapshot(0, anchors, None, None)]
    session = l.session(src.signature)
    fed = 0
    for s in range(stages):
        upto = (s + 1) * stride
        while fed < upto:
            session.feed(src.step(fed))
            fed += 1
        t = session.current
        target = oracle.lookup(t)
        q_s, q_next = anchor(s), anchor(s + 1)
        mid = (q_s + q_next) / 2
        anchors.append(q_next)
        for k in range(n_predicates):
            if k == target:
                if not st.least[k]:
                    for q in (q_next, mid, q_s):
                        st.add(k, q)
                    st.least[k] = True
                continue
            st.add(k, q_s)
            st.add(k, mid)
            st.least[k] = False
        for k in range(n_predicates):
            st.bisect_oldest(k)
            if (s + 1) % 4 == 0:
                st.add(k, st.points[k][-1] + 1)
        out.append(st.snapshot(s + 1, anchors, t, target))
    log.debug(
        "embed %s on %s: %d stages, final least=%s",
        l.name, src.describe(), stages, out[-1].least_predicates(),
    )
    return out


def limit_shape(run: Sequence[StApprox]) -> Optional[int]:
    """The predicate with a least element at the final stage and over the last quarter of the run."""
    if not run:
        raise ValueError("empty run")
    final = run[-1]
    flagged = final.least_predicates()
    if len(flagged) > 1:
        raise UnstableLimitError(f"predicates {flagged} all have least elements at stage {final.stage}")
    window = max(1, len(run) // 4)
    for j in flagged:
        if all(a.least[j] for a in run[-window:]):
            return j
    return None


def xi_holds(run: Sequence[StApprox], i: int) -> bool:
    """
    xi_i on the final stage, with the witness drawn from P_i's points that already existed
    at the start of the stability window.
    """
    final = run[-1]
    if i >= final.n_predicates:
        return False
    window = max(1, len(run) // 4)
    start = run[-window]
    checker = CompatibilityChecker(xi_sentence(i), final.to_structure())
    return any(checker.compatible((x,)) for x in start.element_ids(i))
