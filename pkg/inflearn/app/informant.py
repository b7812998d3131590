# inflearn/app/informant.py
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

import numpy as np

from inflearn.app.structure import (
    ArityError,
    FiniteStructure,
    Signature,
    SignatureMismatch,
    Tup,
    decode_tuple,
)

if TYPE_CHECKING:
    from inflearn.app.catalog import Presentation

log = logging.getLogger(__name__)

Fact = Tuple[Tup, int]
InformantStep = Tuple[Fact, ...]

PROVENANCES = ("canonical", "seeded-random", "adversarial", "replay")


class ReplayFormatError(ValueError):
    pass


def _check_step(signature: Signature, step: InformantStep) -> InformantStep:
    if len(step) != len(signature):
        raise SignatureMismatch(
            f"step has {len(step)} components for signature {signature.describe()}"
        )
    out = []
    for (name, ar), (t, b) in zip(signature.predicates, step):
        t = tuple(int(x) for x in t)
        if len(t) != ar:
            raise ArityError(f"{name}{t} does not have arity {ar}")
        if b not in (0, 1):
            raise ValueError(f"label for {name}{t} must be 0 or 1, got {b!r}")
        out.append((t, int(b)))
    return tuple(out)


@dataclass(frozen=True)
class InformantPrefix:
    """
    Finite informant segment sigma = I[n].
    - one fact per predicate per step
    - inconsistent data is allowed; `consistent` reports it
    """
    signature: Signature
    steps: Tuple[InformantStep, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "steps", tuple(_check_step(self.signature, s) for s in self.steps)
        )

    def __len__(self) -> int:
        return len(self.steps)

    def take(self, n: int) -> "InformantPrefix":
        return InformantPrefix(self.signature, self.steps[:n])

    def extend(self, steps: Iterable[InformantStep]) -> "InformantPrefix":
        return InformantPrefix(self.signature, self.steps + tuple(steps))

    def facts(self) -> Iterable[Tuple[int, Tup, int]]:
        for step in self.steps:
            for j, (t, b) in enumerate(step):
                yield j, t, b

    @property
    def consistent(self) -> bool:
        seen: Dict[Tuple[int, Tup], int] = {}
        for j, t, b in self.facts():
            if seen.setdefault((j, t), b) != b:
                return False
        return True

    def mentioned(self) -> FrozenSet[int]:
        return frozenset(x for _, t, _ in self.facts() for x in t)


def positive_content(p: InformantPrefix) -> Tuple[FrozenSet[Tup], ...]:
    pos: List[Set[Tup]] = [set() for _ in p.signature.predicates]
    for j, t, b in p.facts():
        if b == 1:
            pos[j].add(t)
    return tuple(frozenset(s) for s in pos)


class DiagramBuilder:
    """
    Incremental A_sigma.
    - facts: first occurrence of a tuple wins; a second, different label sets `inconsistent`
    - touch[j][e]: number of distinct decided j-tuples containing e
    - extract(): start from all mentioned elements and drop the largest element that
      still sits in an undecided tuple, until every tuple over the rest is decided
    """

    def __init__(self, signature: Signature) -> None:
        self.signature = signature
        self.arities = signature.arities
        self.facts: List[Dict[Tup, int]] = [dict() for _ in self.arities]
        self.by_elem: List[Dict[int, List[Tup]]] = [dict() for _ in self.arities]
        self.positive: List[List[Tup]] = [[] for _ in self.arities]
        self.mentioned: Set[int] = set()
        self.inconsistent = False
        self.n_steps = 0
        self._cache: Optional[FiniteStructure] = None

    def copy(self) -> "DiagramBuilder":
        other = DiagramBuilder.__new__(DiagramBuilder)
        other.signature = self.signature
        other.arities = self.arities
        other.facts = [dict(f) for f in self.facts]
        other.by_elem = [{e: list(ts) for e, ts in be.items()} for be in self.by_elem]
        other.positive = [list(ts) for ts in self.positive]
        other.mentioned = set(self.mentioned)
        other.inconsistent = self.inconsistent
        other.n_steps = self.n_steps
        other._cache = self._cache
        return other

    def add_fact(self, j: int, t: Tup, b: int) -> None:
        known = self.facts[j].get(t)
        if known is not None:
            if known != b:
                self.inconsistent = True
            return
        self.facts[j][t] = b
        if b == 1:
            self.positive[j].append(t)
        for e in set(t):
            self.by_elem[j].setdefault(e, []).append(t)
        self.mentioned.update(t)
        self._cache = None

    def feed(self, step: InformantStep) -> None:
        for j, (t, b) in enumerate(step):
            self.add_fact(j, t, b)
        self.n_steps += 1

    def label(self, j: int, t: Tup) -> Optional[int]:
        return self.facts[j].get(t)

    def _dirty(self, e: int, cnt: List[Dict[int, int]], k: int) -> bool:
        for j, n in enumerate(self.arities):
            if cnt[j].get(e, 0) < k ** n - (k - 1) ** n:
                return True
        return False

    def extract(self) -> FiniteStructure:
        if self._cache is not None:
            return self._cache
        dom = set(self.mentioned)
        k = len(dom)
        cnt = [{e: len(ts) for e, ts in be.items()} for be in self.by_elem]
        dirty = sorted((e for e in dom if self._dirty(e, cnt, k)), reverse=True)
        removed: List[int] = []
        while dirty:
            for idx, e in enumerate(dirty):
                if self._dirty(e, cnt, k):
                    break
            else:
                break
            for j in range(len(self.arities)):
                for t in self.by_elem[j].get(e, ()):
                    if all(x in dom for x in t):
                        for x in set(t):
                            if x != e:
                                cnt[j][x] -= 1
            dom.discard(e)
            k -= 1
            removed.append(e)
            dirty = dirty[idx + 1:]
        if removed and log.isEnabledFor(logging.DEBUG):
            self._log_discrepancies(dom, removed)
        rels = tuple(
            frozenset(t for t in pos if all(x in dom for x in t))
            for pos in self.positive
        )
        self._cache = FiniteStructure(self.signature, frozenset(dom), rels)
        return self._cache

    def _log_discrepancies(self, dom: Set[int], removed: List[int]) -> None:
        for r in removed:
            trial = sorted(dom | {r})
            if all(
                self.facts[j].get(t) is not None
                for j, n in enumerate(self.arities)
                for t in _tuples_with(trial, n, r)
            ):
                log.debug("A_sigma: element %d could be re-added after greedy removal", r)


def _tuples_with(elems: List[int], n: int, e: int) -> Iterable[Tup]:
    def rec(k: int, acc: Tup, hit: bool):
        if k == n:
            if hit:
                yield acc
            return
        for x in elems:
            yield from rec(k + 1, acc + (x,), hit or x == e)
    return rec(0, (), False)


def extract_structure(p: InformantPrefix) -> FiniteStructure:
    b = DiagramBuilder(p.signature)
    for step in p.steps:
        b.feed(step)
    if b.inconsistent:
        log.debug("extracting from an inconsistent prefix of length %d", len(p))
    return b.extract()


def describes_finite_part(p: InformantPrefix, pres: "Presentation") -> bool:
    """Every fact of p agrees with the presentation's stage truth."""
    if p.signature != pres.signature:
        raise SignatureMismatch(f"{p.signature.describe()} vs {pres.signature.describe()}")
    return all(bool(pres.truth(j, t)) == bool(b) for j, t, b in p.facts())


# ----------------------------
# Sources
# ----------------------------

class InformantSource(ABC):
    """Deterministic step(m) generator; step(m) depends on m and fixed parameters only."""

    provenance: str = "canonical"

    def __init__(self, signature: Signature) -> None:
        self.signature = signature

    @abstractmethod
    def step(self, m: int) -> InformantStep:
        ...

    def prefix(self, n: int) -> InformantPrefix:
        return InformantPrefix(self.signature, tuple(self.step(m) for m in range(n)))

    def describe(self) -> str:
        return self.provenance


class CanonicalSource(InformantSource):
    """Step m labels gamma_j(m) in every component with its truth in the presentation."""

    provenance = "canonical"

    def __init__(self, pres: "Presentation") -> None:
        super().__init__(pres.signature)
        self.pres = pres

    def code_at(self, j: int, m: int) -> int:
        return m

    def step(self, m: int) -> InformantStep:
        out = []
        for j, n in enumerate(self.signature.arities):
            t = decode_tuple(n, self.code_at(j, m))
            out.append((t, 1 if self.pres.truth(j, t) else 0))
        return tuple(out)

    def describe(self) -> str:
        return f"canonical:{self.pres.descriptor.label}"


class ShuffledSource(CanonicalSource):
    """
    Seeded permutation of the canonical order inside windows [2^k - 1, 2^(k+1) - 1).
    - every code appears exactly once per predicate, so the source stays fair
    - the permutation for (seed, j, k) comes from numpy's default_rng
    """

    provenance = "seeded-random"

    def __init__(self, pres: "Presentation", seed: int) -> None:
        super().__init__(pres)
        self.seed = int(seed)
        self._perms: Dict[Tuple[int, int], np.ndarray] = {}

    def _perm(self, j: int, k: int) -> np.ndarray:
        key = (j, k)
        perm = self._perms.get(key)
        if perm is None:
            rng = np.random.default_rng([self.seed, j, k])
            perm = rng.permutation(1 << k)
            self._perms[key] = perm
        return perm

    def code_at(self, j: int, m: int) -> int:
        k = (m + 1).bit_length() - 1
        start = (1 << k) - 1
        return start + int(self._perm(j, k)[m - start])

    def describe(self) -> str:
        return f"shuffled:{self.pres.descriptor.label}:seed={self.seed}"


class ReplaySource(InformantSource):
    """Finite recorded prefix; step(m) past its end raises IndexError."""

    def __init__(self, prefix: InformantPrefix, provenance: str = "replay") -> None:
        super().__init__(prefix.signature)
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        self.provenance = provenance
        self.recorded = prefix

    def __len__(self) -> int:
        return len(self.recorded)

    def step(self, m: int) -> InformantStep:
        return self.recorded.steps[m]


def canonical_source(pres: "Presentation") -> CanonicalSource:
    return CanonicalSource(pres)


def shuffled_source(pres: "Presentation", seed: int) -> ShuffledSource:
    return ShuffledSource(pres, seed)


# ----------------------------
# Replay file format
# ----------------------------

def format_replay(p: InformantPrefix, header: Optional[Dict[str, object]] = None) -> str:
    """
    One step per line: `j:(t,...)=b` fields separated by spaces.
    Header lines start with '#': `# key: value`; the signature is always written first.
    """
    lines = [f"# signature: {p.signature.describe()}"]
    for k, v in (header or {}).items():
        if k != "signature":
            lines.append(f"# {k}: {v}")
    for step in p.steps:
        lines.append(" ".join(
            f"{j}:(" + ",".join(str(x) for x in t) + f")={b}" for j, (t, b) in enumerate(step)
        ))
    return "\n".join(lines) + "\n"


def _parse_field(tok: str, lineno: int) -> Tuple[int, Tup, int]:
    try:
        j_txt, rest = tok.split(":", 1)
        t_txt, b_txt = rest.rsplit("=", 1)
        if not (t_txt.startswith("(") and t_txt.endswith(")")):
            raise ValueError("tuple must be parenthesized")
        t = tuple(int(x) for x in t_txt[1:-1].split(",") if x.strip() != "")
        return int(j_txt), t, int(b_txt)
    except ValueError as e:
        raise ReplayFormatError(f"line {lineno}: bad field {tok!r} ({e})") from e


def parse_replay(text: str) -> Tuple[Dict[str, str], InformantPrefix]:
    header: Dict[str, str] = {}
    steps: List[InformantStep] = []
    signature: Optional[Signature] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
            if key.strip() == "signature":
                signature = Signature.parse(value)
            continue
        if signature is None:
            raise ReplayFormatError(f"line {lineno}: data before '# signature:' header")
        fields = [_parse_field(tok, lineno) for tok in line.split()]
        if [f[0] for f in fields] != list(range(len(signature))):
            raise ReplayFormatError(
                f"line {lineno}: expected components 0..{len(signature) - 1} in order"
            )
        steps.append(tuple((t, b) for _, t, b in fields))
    if signature is None:
        raise ReplayFormatError("missing '# signature:' header")
    try:
        return header, InformantPrefix(signature, tuple(steps))
    except ValueError as e:
        raise ReplayFormatError(str(e)) from e


def save_replay(path: Union[str, Path], p: InformantPrefix, header: Optional[Dict[str, object]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_replay(p, header), encoding="utf-8")
    return path


def load_replay(path: Union[str, Path]) -> Tuple[Dict[str, str], InformantPrefix]:
    return parse_replay(Path(path).read_text(encoding="utf-8"))
