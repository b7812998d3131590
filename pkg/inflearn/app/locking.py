# inflearn/app/locking.py
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from inflearn.app.catalog import Presentation
from inflearn.app.informant import (
    CanonicalSource,
    DiagramBuilder,
    InformantPrefix,
    InformantStep,
    describes_finite_part,
    shuffled_source,
)
from inflearn.app.learners import Conjecture, Learner, LearnerSession, run
from inflearn.app.structure import Tup, decode_tuple, shell_start

log = logging.getLogger(__name__)

LOCKING = "locking"
MIND_CHANGE = "mind-change-found"
INCONCLUSIVE = "inconclusive"

DEFAULT_DEPTH = 4
DEFAULT_WIDTH = 6
DEFAULT_BUDGET = 10_000
DEFAULT_MOVES = 8


class InconsistentBaseError(ValueError):
    pass


@dataclass(frozen=True)
class LockingVerdict:
    """
    - locking: every tested extension of `sigma` kept `conjecture`
    - mind-change-found: `witness` extends `sigma` and moves the learner to `witness_conjecture`
    - inconclusive: the probe budget ran out first
    """
    outcome: str
    sigma: InformantPrefix
    conjecture: Conjecture
    witness: Optional[InformantPrefix] = None
    witness_conjecture: Optional[Conjecture] = None
    probes: int = 0
    moves: int = 0

    @property
    def locking(self) -> bool:
        return self.outcome == LOCKING


@dataclass(frozen=True)
class AdversaryResult:
    prefix: InformantPrefix
    mind_changes: int
    probes: int
    reached: bool
    base_length: int = 0

    @property
    def inconclusive(self) -> bool:
        return not self.reached


@dataclass(frozen=True)
class SourceLocking:
    seed: int
    convergence_point: int
    n: Optional[int]

    @property
    def passed(self) -> bool:
        return self.n is not None


@dataclass(frozen=True)
class LockingSummary:
    learner: str
    structure: str
    depth: int
    sources: Tuple[SourceLocking, ...]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sources)


# ----------------------------
# Shell units
# ----------------------------

def shell_tuples(arity: int, m: int) -> List[Tup]:
    return [decode_tuple(arity, c) for c in range(shell_start(arity, m), shell_start(arity, m + 1))]


def incomplete_elements(builder: DiagramBuilder, count: int) -> List[int]:
    """The `count` least elements m whose shell (tuples with maximum m) is not fully decided."""
    known = [Counter(max(t) for t in f) for f in builder.facts]
    out: List[int] = []
    m = 0
    while len(out) < count:
        if any(known[j][m] < (m + 1) ** n - m ** n for j, n in enumerate(builder.arities)):
            out.append(m)
        m += 1
    return out


def shell_unit(builder: DiagramBuilder, pres: Presentation, m: int) -> List[InformantStep]:
    """
    Steps revealing every undecided fact with maximum element m, labelled by the presentation.
    Predicates with fewer new facts repeat their last fact (or the decided fact at (m,...,m)).
    """
    per: List[List[Tuple[Tup, int]]] = []
    for j, n in enumerate(builder.arities):
        facts = builder.facts[j]
        per.append([(t, int(pres.truth(j, t))) for t in shell_tuples(n, m) if t not in facts])
    size = max(len(p) for p in per)
    steps: List[InformantStep] = []
    for k in range(size):
        step = []
        for j, p in enumerate(per):
            if k < len(p):
                step.append(p[k])
            elif p:
                step.append(p[-1])
            else:
                t = (m,) * builder.arities[j]
                step.append((t, int(pres.truth(j, t))))
        steps.append(tuple(step))
    return steps


# ----------------------------
# Extension search
# ----------------------------

@dataclass
class _Found:
    steps: List[InformantStep]
    session: LearnerSession
    conjecture: Conjecture


def _search(
    session: LearnerSession,
    pres: Presentation,
    depth: int,
    width: int,
    budget: int,
) -> Tuple[Optional[_Found], int, bool]:
    """
    Breadth-first over sequences of at most `depth` shell units, `width` candidate elements per level.
    Returns (first mind-changing extension or None, probes used, budget exhausted).
    """
    c0 = session.current
    pool = incomplete_elements(session.builder, width + depth)
    frontier: List[Tuple[LearnerSession, List[InformantStep], Tuple[int, ...]]] = [(session, [], ())]
    probes = 0
    for level in range(depth):
        nxt = []
        for node, steps, path in frontier:
            for m in [e for e in pool if e not in path][:width]:
                if probes >= budget:
                    return None, probes, True
                unit = shell_unit(node.builder, pres, m)
                child = node.fork().extend(unit)
                probes += 1
                if child.current != c0:
                    log.debug("mind change %s -> %s at depth %d via %s", c0, child.current, level + 1, path + (m,))
                    return _Found(steps + unit, child, child.current), probes, False
                if level + 1 < depth:
                    nxt.append((child, steps + unit, path + (m,)))
        frontier = nxt
    return None, probes, False


def find_weak_locking(
    l: Learner,
    pres: Presentation,
    base: InformantPrefix,
    depth: int = DEFAULT_DEPTH,
    budget: int = DEFAULT_BUDGET,
    width: int = DEFAULT_WIDTH,
    max_moves: int = DEFAULT_MOVES,
) -> LockingVerdict:
    """
    Look for a weak locking sequence extending base.
    - candidate sigma starts at base; a mind-changing extension becomes the next candidate
    - after max_moves moves the last witness is reported
    """
    if base.signature != pres.signature or not describes_finite_part(base, pres):
        raise InconsistentBaseError(f"base does not describe a finite part of {pres.descriptor}")
    session = l.session(base.signature).extend(base.steps)
    sigma = base
    probes = 0
    moves = 0
    while True:
        found, used, exhausted = _search(session, pres, depth, width, budget - probes)
        probes += used
        if exhausted:
            log.warning("locking search for %s on %s ran out of budget (%d probes)", l.name, pres.descriptor, probes)
            return LockingVerdict(INCONCLUSIVE, sigma, session.current, probes=probes, moves=moves)
        if found is None:
            return LockingVerdict(LOCKING, sigma, session.current, probes=probes, moves=moves)
        witness = sigma.extend(found.steps)
        if moves >= max_moves:
            return LockingVerdict(
                MIND_CHANGE, sigma, session.current, witness, found.conjecture, probes, moves
            )
        sigma, session = witness, found.session
        moves += 1


def _count_changes(session: LearnerSession, steps: Sequence[InformantStep], out: List[InformantStep],
                   changes: int, target: int) -> int:
    for step in steps:
        if changes >= target:
            break
        before = session.current
        session.feed(step)
        out.append(step)
        if session.current != before:
            changes += 1
    return changes


def warmup_base(
    l: Learner, pres: Presentation, horizon: int, window: Optional[int] = None
) -> Optional[InformantPrefix]:
    """Canonical prefix up to the convergence point, when a canonical run of `horizon` steps settles."""
    canonical = CanonicalSource(pres)
    rec = run(l, canonical, horizon)
    if not rec.settled(window):
        log.info("%s does not settle on %s within %d steps; no warm-up base", l.name, pres.descriptor, horizon)
        return None
    return canonical.prefix(rec.convergence_point)


def adversary(
    l: Learner,
    pres: Presentation,
    target_changes: int = 2,
    budget: int = DEFAULT_BUDGET,
    depth: int = DEFAULT_DEPTH,
    width: int = DEFAULT_WIDTH,
    base: Optional[InformantPrefix] = None,
) -> AdversaryResult:
    """
    Alternate a mind-change search with the next canonical step of pres.
    - mind changes are counted after base; the prefix stops as soon as target_changes is reached
    - every appended fact is true in pres, so the prefix extends to an informant for it
    - a learner that learns pres is only expected to resist from a base at or past its
      convergence point (see warmup_base); from the empty prefix its first conjectures count too
    """
    base = base if base is not None else InformantPrefix(pres.signature)
    if not describes_finite_part(base, pres):
        raise InconsistentBaseError(f"base does not describe a finite part of {pres.descriptor}")
    canonical = CanonicalSource(pres)
    session = l.session(pres.signature).extend(base.steps)
    steps: List[InformantStep] = []
    changes = probes = 0
    m = 0
    while changes < target_changes:
        if probes >= budget:
            break
        found, used, exhausted = _search(session, pres, depth, width, budget - probes)
        probes += used
        if found is not None:
            changes = _count_changes(session, found.steps, steps, changes, target_changes)
            continue
        if exhausted:
            break
        changes = _count_changes(session, [canonical.step(m)], steps, changes, target_changes)
        m += 1
    reached = changes >= target_changes
    prefix = base.extend(steps)
    log.info(
        "adversary %s on %s: %d changes, %d probes, %s",
        l.name, pres.descriptor, changes, probes, "target reached" if reached else "inconclusive",
    )
    return AdversaryResult(prefix, changes, probes, reached, len(base))


def is_locking_up_to(
    l: Learner,
    pres: Presentation,
    n_informants: int,
    horizon: int,
    depth: int = DEFAULT_DEPTH,
    budget: int = DEFAULT_BUDGET,
    width: int = DEFAULT_WIDTH,
) -> LockingSummary:
    """Per seeded source: least n >= convergence point (n <= horizon) with I[n] weakly locking at depth."""
    out = []
    for seed in range(n_informants):
        src = shuffled_source(pres, seed)
        rec = run(l, src, horizon)
        full = src.prefix(horizon)
        hit = None
        for n in range(rec.convergence_point, horizon + 1):
            v = find_weak_locking(l, pres, full.take(n), depth, budget, width, max_moves=0)
            if v.locking:
                hit = n
                break
            if v.outcome == INCONCLUSIVE:
                break
        out.append(SourceLocking(seed, rec.convergence_point, hit))
        log.debug("seed %d: converged@%d locking@%s", seed, rec.convergence_point, hit)
    return LockingSummary(l.name, str(pres.descriptor), depth, tuple(out))
