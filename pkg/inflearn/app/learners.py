# inflearn/app/learners.py
from __future__ import annotations

import copy
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx
import pandas as pd

from inflearn.app.catalog import Enumeration, graph_index
from inflearn.app.informant import DiagramBuilder, InformantPrefix, InformantSource, InformantStep
from inflearn.app.sigma2 import CompatibilityChecker, SentenceFamily, family_sentences
from inflearn.app.structure import GRAPH, FiniteStructure, Signature, Tup, pair, pair_upper

if TYPE_CHECKING:
    from inflearn.app.catalog import Family

log = logging.getLogger(__name__)

UNKNOWN = "?"
Conjecture = Union[int, str]

SETTLE_WINDOW = 500


def conj_text(c: Conjecture) -> str:
    return str(c)


def parse_conjecture(text: str) -> Conjecture:
    text = text.strip()
    return UNKNOWN if text == UNKNOWN else int(text)


# ----------------------------
# Learner contract
# ----------------------------

class LearnerSession:
    """
    Incremental evaluation of one learner along one informant.
    - feed() appends a step; `current` is M(sigma) for the steps fed so far
    - eager learners decide at every step (their output depends on the history)
    """

    def __init__(self, learner: "Learner", signature: Signature) -> None:
        self.learner = learner
        self.signature = signature
        self.builder = DiagramBuilder(signature)
        self.state: Any = learner.initial_state()
        self._current: Optional[Conjecture] = None
        if learner.eager:
            self._current = learner.decide(self)

    @property
    def n(self) -> int:
        return self.builder.n_steps

    def feed(self, step: InformantStep) -> None:
        self.builder.feed(step)
        self._current = None
        if self.learner.eager:
            self._current = self.learner.decide(self)

    def extend(self, steps: Iterable[InformantStep]) -> "LearnerSession":
        for step in steps:
            self.feed(step)
        return self

    @property
    def current(self) -> Conjecture:
        if self._current is None:
            self._current = self.learner.decide(self)
        return self._current

    def structure(self) -> FiniteStructure:
        return self.builder.extract()

    def fork(self) -> "LearnerSession":
        other = LearnerSession.__new__(LearnerSession)
        other.learner = self.learner
        other.signature = self.signature
        other.builder = self.builder.copy()
        other.state = self.learner.copy_state(self.state)
        other._current = self._current
        return other

    copy = fork


class Learner(ABC):
    """A deterministic map from informant prefixes to conjectures in N + {?}."""

    name: str = "learner"
    eager: bool = False

    def initial_state(self) -> Any:
        return None

    def copy_state(self, state: Any) -> Any:
        return copy.copy(state)

    @abstractmethod
    def decide(self, session: LearnerSession) -> Conjecture:
        ...

    def session(self, signature: Signature) -> LearnerSession:
        return LearnerSession(self, signature)

    def conjecture(self, prefix: InformantPrefix) -> Conjecture:
        """From-scratch evaluation: a fresh session fed with every step of the prefix."""
        return self.session(prefix.signature).extend(prefix.steps).current

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class ConstantLearner(Learner):
    name = "constant"

    def __init__(self, value: Conjecture = 0) -> None:
        self.value = value

    def decide(self, session: LearnerSession) -> Conjecture:
        return self.value


class ParityLearner(Learner):
    """Prefix length mod 2: every step flips the conjecture."""

    name = "parity"

    def decide(self, session: LearnerSession) -> Conjecture:
        return session.n % 2


class LargestElementLearner(Learner):
    name = "largest-element"

    def decide(self, session: LearnerSession) -> Conjecture:
        seen = session.builder.mentioned
        return max(seen) if seen else UNKNOWN


# ----------------------------
# Sigma_2 learner
# ----------------------------

@dataclass
class _Sigma2State:
    struct: Optional[FiniteStructure] = None
    lower: List[int] = field(default_factory=list)
    dead: Set[int] = field(default_factory=set)
    winner: Optional[int] = None
    witness: Optional[Tuple[int, Tup, int]] = None
    output: Conjecture = 0


class Sigma2Learner(Learner):
    """
    Least-pair learner for a family of Sigma_2 sentences psi_i with nu-indices e_i.
    - M(sigma) = e_i for the least <i, code(a)> such that psi_i is A_sigma-compatible via a
    - M(sigma) = 0 when no sentence is compatible via any tuple
    - per-sentence lower bounds survive while A_sigma only grows
    """

    name = "sigma2"

    def __init__(self, fam: SentenceFamily, nu: Optional[Enumeration] = None) -> None:
        if nu is not None:
            for e in fam.indices:
                if not nu.defined(e):
                    raise ValueError(f"{nu.name}({e}) is undefined")
        self.fam = fam
        self.nu = nu

    def initial_state(self) -> _Sigma2State:
        return _Sigma2State(lower=[0] * len(self.fam))

    def copy_state(self, state: _Sigma2State) -> _Sigma2State:
        return _Sigma2State(
            state.struct, list(state.lower), set(state.dead), state.winner, state.witness, state.output
        )

    def decide(self, session: LearnerSession) -> Conjecture:
        c = session.structure()
        st: _Sigma2State = session.state
        if st.struct is not None and c == st.struct:
            return st.output
        if st.struct is None or not st.struct.domain <= c.domain:
            st.lower = [0] * len(self.fam)
            st.dead = set()
        st.struct = c
        order = list(range(len(self.fam)))
        if st.winner is not None:
            order.remove(st.winner)
            order.insert(0, st.winner)
        best: Optional[int] = None
        best_i: Optional[int] = None
        best_t: Tup = ()
        for i in order:
            if i in st.dead:
                continue
            upper = None if best is None else pair_upper(i, best)
            if upper is not None and upper <= st.lower[i]:
                continue
            res = CompatibilityChecker(self.fam.sentences[i], c).least_code(st.lower[i], upper)
            if res is None:
                if upper is None:
                    st.dead.add(i)
                else:
                    st.lower[i] = max(st.lower[i], upper)
                continue
            k, t = res
            st.lower[i] = k
            p = pair(i, k)
            if best is None or p < best:
                best, best_i, best_t = p, i, t
        st.winner = best_i
        if best_i is None:
            st.witness = None
            st.output = 0
        else:
            st.witness = (best_i, best_t, st.lower[best_i])
            st.output = self.fam.indices[best_i]
        return st.output

    def explain(self, session: LearnerSession) -> Optional[Tuple[int, Tup, int, int]]:
        """(i, a, code(a), <i, code(a)>) behind the current conjecture; None for the fallback 0."""
        session.current
        w = session.state.witness
        if w is None:
            return None
        i, t, k = w
        return i, t, k, pair(i, k)


def brute_force_least_pair(
    fam: SentenceFamily, c: FiniteStructure, limit: int
) -> Optional[Tuple[int, int]]:
    """Scan pair codes below limit; (i, k) of the first compatible pair."""
    from inflearn.app.structure import decode_tuple, unpair

    checkers = [CompatibilityChecker(s, c) for s in fam.sentences]
    for n in range(limit):
        i, k = unpair(n)
        if i >= len(fam):
            continue
        s = fam.sentences[i]
        if s.arity == 0:
            if k == 0 and checkers[i].root_ok():
                return i, k
            continue
        if checkers[i].compatible(decode_tuple(s.arity, k)):
            return i, k
    return None


# ----------------------------
# Graph learners
# ----------------------------

def _digraph(c: FiniteStructure) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(sorted(c.domain))
    g.add_edges_from(sorted(c.relations[0]))
    return g


def _cycle_key(cyc: List[int]) -> Tuple[int, int, Tuple[int, ...]]:
    k = cyc.index(min(cyc))
    rot = tuple(cyc[k:] + cyc[:k])
    return (max(cyc), len(cyc), rot)


def least_cycle(g: nx.DiGraph, min_len: int = 2, max_len: Optional[int] = None) -> Optional[Tuple[int, ...]]:
    """Least directed simple cycle by (max vertex, length, rotation starting at its min vertex)."""
    best = None
    for cyc in nx.simple_cycles(g, length_bound=max_len):
        if len(cyc) < min_len:
            continue
        key = _cycle_key(list(cyc))
        if best is None or key < best:
            best = key
    return None if best is None else best[2]


class _GraphLearner(Learner):
    eager = True

    def initial_state(self) -> List[Conjecture]:
        return [UNKNOWN]

    def copy_state(self, state: List[Conjecture]) -> List[Conjecture]:
        return list(state)

    def _check_signature(self, session: LearnerSession) -> None:
        if session.signature != GRAPH:
            raise ValueError(f"{self.name} learner needs the graph signature Edge/2")


class TwoGraphLearner(_GraphLearner):
    """'?' until A_sigma shows a 2- or 3-cycle; then 1 or 2 forever."""

    name = "two-graph"

    def decide(self, session: LearnerSession) -> Conjecture:
        self._check_signature(session)
        if session.state[0] != UNKNOWN:
            return session.state[0]
        cyc = least_cycle(_digraph(session.structure()), min_len=2, max_len=3)
        if cyc is not None:
            session.state[0] = len(cyc) - 1
        return session.state[0]


class HonestCycleLearner(_GraphLearner):
    """On the first visible cycle of size n >= 2, output n - 1 forever."""

    name = "honest-cycle"

    def decide(self, session: LearnerSession) -> Conjecture:
        self._check_signature(session)
        if session.state[0] != UNKNOWN:
            return session.state[0]
        cyc = least_cycle(_digraph(session.structure()), min_len=2)
        if cyc is not None:
            session.state[0] = len(cyc) - 1
        return session.state[0]


class IndexCycleLearner(_GraphLearner):
    """
    First cycle of size n: conjecture the index of G_{n-1}. Switch to 0 for good once A_sigma shows
    - a weakly connected component with >= n+1 vertices
    - a vertex with >= 3 distinct neighbours
    - a cycle of size <= n-1 (loops included)
    """

    name = "index-cycle"
    INDEX_SCAN = 1 << 16

    def __init__(self, nu: Optional[Enumeration] = None) -> None:
        if nu is not None:
            p0 = nu.get(0)
            if p0 is not None and p0.descriptor.summary[0] == "cycles":
                raise ValueError(f"{nu.name}(0) must lie outside the cycle family")
        self.nu = nu

    def index_for(self, n: int) -> int:
        if self.nu is None:
            return graph_index(n - 1)
        for e in range(self.INDEX_SCAN):
            p = self.nu.get(e)
            if p is not None and p.descriptor.summary == ("cycles", n):
                return e
        raise ValueError(f"{self.nu.name} has no index below {self.INDEX_SCAN} for {n}-cycles")

    def initial_state(self) -> List[Any]:
        return [UNKNOWN, None]

    @staticmethod
    def refuted(g: nx.DiGraph, n: int) -> bool:
        if any(len(comp) >= n + 1 for comp in nx.weakly_connected_components(g)):
            return True
        for v in g.nodes:
            nbrs = (set(g.successors(v)) | set(g.predecessors(v))) - {v}
            if len(nbrs) >= 3:
                return True
        if n - 1 >= 1:
            for _ in nx.simple_cycles(g, length_bound=n - 1):
                return True
        return False

    def decide(self, session: LearnerSession) -> Conjecture:
        self._check_signature(session)
        conj, n = session.state
        if conj == 0:
            return 0
        g = _digraph(session.structure())
        if conj == UNKNOWN:
            cyc = least_cycle(g, min_len=2)
            if cyc is None:
                return UNKNOWN
            n = len(cyc)
            conj = self.index_for(n)
            session.state[:] = [conj, n]
        if self.refuted(g, n):
            session.state[0] = 0
            return 0
        return conj


# ----------------------------
# Runs
# ----------------------------

@dataclass(frozen=True)
class LearningRecord:
    """p(n) = M(I[n]) for n = 0..horizon."""
    conjectures: Tuple[Conjecture, ...]
    learner: str = ""
    source: str = ""

    @property
    def horizon(self) -> int:
        return len(self.conjectures) - 1

    @property
    def final(self) -> Conjecture:
        return self.conjectures[-1]

    @property
    def mind_changes(self) -> int:
        p = self.conjectures
        return sum(1 for n in range(len(p) - 1) if p[n + 1] != p[n])

    @property
    def convergence_point(self) -> int:
        """Least s0 with p constant on [s0, horizon]; tentative at a finite horizon."""
        p = self.conjectures
        s0 = len(p) - 1
        while s0 > 0 and p[s0 - 1] == p[-1]:
            s0 -= 1
        return s0

    def settle_window(self) -> int:
        return min(SETTLE_WINDOW, self.horizon // 6)

    def settled(self, window: Optional[int] = None) -> bool:
        """The last window+1 conjectures agree (window >= 1)."""
        w = self.settle_window() if window is None else window
        return w >= 1 and self.convergence_point <= self.horizon - w

    def to_frame(self) -> pd.DataFrame:
        p = self.conjectures
        return pd.DataFrame({
            "step": range(len(p)),
            "conjecture": [conj_text(c) for c in p],
            "mind_change": [0] + [int(p[n] != p[n - 1]) for n in range(1, len(p))],
        }, columns=["step", "conjecture", "mind_change"])


def run(l: Learner, src: InformantSource, horizon: int) -> LearningRecord:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    s = l.session(src.signature)
    seq: List[Conjecture] = [s.current]
    for m in range(horizon):
        s.feed(src.step(m))
        seq.append(s.current)
    rec = LearningRecord(tuple(seq), l.name, src.describe())
    log.debug(
        "%s on %s: final=%s changes=%d converged@%d",
        l.name, rec.source, rec.final, rec.mind_changes, rec.convergence_point,
    )
    return rec


def make_learner(name: str, family: Optional["Family"] = None) -> Learner:
    name = name.strip().lower()
    if name == "constant":
        return ConstantLearner()
    if name == "parity":
        return ParityLearner()
    if name == "largest-element":
        return LargestElementLearner()
    if name == "two-graph":
        return TwoGraphLearner()
    if name == "honest-cycle":
        return HonestCycleLearner()
    if name == "index-cycle":
        return IndexCycleLearner(family.enumeration if family is not None else None)
    if name == "sigma2":
        if family is None:
            raise ValueError("the sigma2 learner needs a family with shipped sentences")
        if family.kind == "boolean-algebra":
            raise ValueError(
                "no distinguishing Sigma_2 sentences exist for Boolean algebras; "
                "use `inflearn bf` to print the obstruction witness"
            )
        return Sigma2Learner(family_sentences(family), family.enumeration)
    raise ValueError(f"unknown learner {name!r}")
