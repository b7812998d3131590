# inflearn/app/bf.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from inflearn.app.catalog import FamilyDescriptor
from inflearn.app.schema import count_text
from inflearn.app.utils import parse_count

log = logging.getLogger(__name__)

Count = Union[int, float]
INF = math.inf


@dataclass(frozen=True)
class BADescriptor:
    """Infinite Boolean algebra, up to <=_2: its number of atoms (a natural or inf)."""
    atoms: Count

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", parse_count(self.atoms))

    def __str__(self) -> str:
        return f"BA(atoms={count_text(self.atoms)})"


@dataclass(frozen=True)
class LinOrderDescriptor:
    """
    Countably infinite linear order t0 + middle + t2.
    - t0 / t2: size of the finite initial / final segment (inf for omega / omega*)
    - sup_block: supremum of the middle's block sizes (inf when blocks are unbounded)
    - sup_count: number of middle blocks of size sup_block
    """
    t0: Count
    t2: Count
    sup_block: Count = 1
    sup_count: Count = INF

    def __post_init__(self) -> None:
        for name in ("t0", "t2", "sup_block", "sup_count"):
            object.__setattr__(self, name, parse_count(getattr(self, name)))
        if self.sup_block == 0:
            raise ValueError("the middle of an infinite order has blocks of size >= 1")

    @property
    def has_least(self) -> bool:
        return self.t0 >= 1

    @property
    def has_greatest(self) -> bool:
        return self.t2 >= 1

    def __str__(self) -> str:
        return (
            f"LO(t0={count_text(self.t0)}, t2={count_text(self.t2)}, "
            f"sup_block={count_text(self.sup_block)}, sup_count={count_text(self.sup_count)})"
        )


Descriptor = Union[BADescriptor, LinOrderDescriptor]


def le2_ba(a: BADescriptor, b: BADescriptor) -> bool:
    """a <=_2 b iff a has at least as many atoms as b."""
    return a.atoms >= b.atoms


def le2_lo(a: LinOrderDescriptor, b: LinOrderDescriptor) -> Optional[bool]:
    """
    <=_2 on orders by the endpoint/block invariants; None outside the decided cases.
    - an infinite end on a: compare t0 and t2 only
    - otherwise peel the finite ends (a must have at least b's) and compare middles:
      unbounded blocks in a, or a with infinitely many blocks of the common maximal size
    """
    if a == b:
        return True
    if max(a.t0, a.t2) == INF:
        return a.t0 >= b.t0 and a.t2 >= b.t2
    if max(b.t0, b.t2) == INF:
        return None
    if a.t0 < b.t0 or a.t2 < b.t2:
        return False
    if a.sup_block == INF:
        return True
    if b.sup_block <= a.sup_block and a.sup_count == INF:
        return True
    return None


def le2(a: Descriptor, b: Descriptor) -> Optional[bool]:
    if isinstance(a, BADescriptor) and isinstance(b, BADescriptor):
        return le2_ba(a, b)
    if isinstance(a, LinOrderDescriptor) and isinstance(b, LinOrderDescriptor):
        return le2_lo(a, b)
    raise TypeError(f"cannot compare {type(a).__name__} with {type(b).__name__}")


def le2_matrix(members: Sequence[Descriptor]) -> List[List[Optional[bool]]]:
    """m[i][j] = le2(members[i], members[j])."""
    return [[le2(x, y) for y in members] for x in members]


def obstruction_witness(members: Sequence[Descriptor]) -> Optional[Tuple[int, int]]:
    """
    First (i, j), i != j, with members[j] <=_2 members[i].
    Then every Sigma_2 sentence true in members[i] is true in members[j], so no sentence
    separates member i from member j and the list is not learnable from informant.
    """
    if len(members) < 2:
        raise ValueError("an obstruction needs at least two members")
    if len(set(members)) != len(members):
        raise ValueError("members must be pairwise non-isomorphic")
    for i in range(len(members)):
        for j in range(len(members)):
            if i != j and le2(members[j], members[i]) is True:
                log.debug("obstruction: %s <=_2 %s", members[j], members[i])
                return i, j
    return None


def from_family_descriptor(d: FamilyDescriptor) -> Descriptor:
    """Back-and-forth descriptor of a catalog member ('ba', 'lo' and 'order' summaries)."""
    tag = d.summary[0]
    if tag == "ba":
        return BADescriptor(d.summary[1])
    if tag == "lo":
        _, t0, t2, sup_block, sup_count = d.summary
        return LinOrderDescriptor(t0, t2, sup_block, sup_count)
    if tag == "order":
        _, a, b = d.summary
        return LinOrderDescriptor(a, b, 1, INF)
    raise ValueError(f"{d} has no back-and-forth descriptor")


def cell_text(v: Optional[bool]) -> str:
    return "?" if v is None else ("Y" if v else ".")
