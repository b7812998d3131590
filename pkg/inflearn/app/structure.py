# inflearn/app/structure.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple

Tup = Tuple[int, ...]


class SignatureMismatch(ValueError):
    pass


class ArityError(ValueError):
    pass


# ----------------------------
# Signatures
# ----------------------------

@dataclass(frozen=True)
class Signature:
    """
    Ordered relational signature: ((name, arity), ...).
    - arities >= 1, names unique, at least one predicate.
    """
    predicates: Tuple[Tuple[str, int], ...]

    def __post_init__(self) -> None:
        preds = tuple((str(n), int(a)) for n, a in self.predicates)
        object.__setattr__(self, "predicates", preds)
        if not preds:
            raise ValueError("signature must have at least one predicate")
        names = [n for n, _ in preds]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate predicate names in {names}")
        for n, a in preds:
            if a < 1:
                raise ValueError(f"predicate {n} has arity {a}; arities must be >= 1")

    def __len__(self) -> int:
        return len(self.predicates)

    @property
    def names(self) -> List[str]:
        return [n for n, _ in self.predicates]

    @property
    def arities(self) -> List[int]:
        return [a for _, a in self.predicates]

    def index(self, name: str) -> int:
        for j, (n, _) in enumerate(self.predicates):
            if n == name:
                return j
        raise KeyError(f"unknown predicate {name!r}")

    def arity(self, j: int) -> int:
        return self.predicates[j][1]

    def describe(self) -> str:
        return " ".join(f"{n}/{a}" for n, a in self.predicates)

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Inverse of describe(): 'Edge/2 Leq/2'."""
        preds = []
        for tok in text.split():
            name, _, ar = tok.partition("/")
            if not ar.isdigit():
                raise ValueError(f"bad signature token {tok!r}")
            preds.append((name, int(ar)))
        return cls(tuple(preds))


GRAPH = Signature((("Edge", 2),))
ORDER = Signature((("Leq", 2),))
LATTICE = Signature((("Join", 3), ("Meet", 3)))
GROUP = Signature((("Add", 3),))


def unary_order_signature(n_predicates: int) -> Signature:
    """Leq plus unary P0..P{N-1} (the class used by the embedding stages)."""
    return Signature((("Leq", 2),) + tuple((f"P{j}", 1) for j in range(n_predicates)))


# ----------------------------
# Tuple coding
# ----------------------------

def _shell(code: int, n: int) -> int:
    """Largest m with m**n <= code."""
    m = int(round(code ** (1.0 / n))) if code > 0 else 0
    while m > 0 and m ** n > code:
        m -= 1
    while (m + 1) ** n <= code:
        m += 1
    return m


def encode_tuple(arity: int, t: Iterable[int]) -> int:
    """
    Frozen bijection between arity-tuples and naturals.
    - shells by maximum element: every tuple with max m precedes every tuple with max m+1
    - lexicographic inside a shell; shell m starts at m**arity
    """
    t = tuple(int(x) for x in t)
    if arity < 1 or len(t) != arity:
        raise ArityError(f"tuple {t} does not have arity {arity}")
    if any(x < 0 for x in t):
        raise ValueError(f"tuple {t} has negative entries")
    m = max(t)
    rank = 0
    has_m = False
    for k, v in enumerate(t):
        r = arity - k - 1
        per = (m + 1) ** r if has_m else (m + 1) ** r - m ** r
        rank += v * per
        has_m = has_m or v == m
    return m ** arity + rank


def decode_tuple(arity: int, code: int) -> Tup:
    if arity < 1:
        raise ArityError(f"arity must be >= 1, got {arity}")
    if code < 0:
        raise ValueError(f"codes are naturals, got {code}")
    m = _shell(code, arity)
    rank = code - m ** arity
    out: List[int] = []
    has_m = False
    for k in range(arity):
        r = arity - k - 1
        if has_m:
            per = (m + 1) ** r
            v, rank = divmod(rank, per)
        else:
            per = (m + 1) ** r - m ** r
            block = m * per
            if rank < block:
                v, rank = divmod(rank, per)
            else:
                rank -= block
                v = m
        out.append(v)
        has_m = has_m or v == m
    return tuple(out)


def shell_start(arity: int, m: int) -> int:
    return m ** arity


def pair(i: int, k: int) -> int:
    """
    <i,k> = 2^i (2k+1) - 1; bijective, monotone in both arguments, pair(0,0) = 0.
    Not the Cantor diagonal; pair_upper relies on this 2-adic form. The least-pair order of
    the sigma2 learner is fixed by this function and by the tuple coding.
    """
    if i < 0 or k < 0:
        raise ValueError("pair arguments are naturals")
    return (1 << i) * (2 * k + 1) - 1


def unpair(n: int) -> Tuple[int, int]:
    if n < 0:
        raise ValueError("unpair argument is a natural")
    x = n + 1
    i = (x & -x).bit_length() - 1
    return i, ((x >> i) - 1) // 2


def pair_upper(i: int, best: int) -> int:
    """U such that pair(i, k) < best  <=>  k < U."""
    # pair(i,k) < best  <=>  2^i(2k+1) <= best
    q = best >> i
    if q < 1:
        return 0
    return (q - 1) // 2 + 1


# ----------------------------
# Finite structures
# ----------------------------

@dataclass(frozen=True)
class FiniteStructure:
    """
    Finite relational structure with a complete diagram.
    - relations[j] holds exactly the true tuples of predicate j over domain
    - every other tuple over domain is false (closed world), so the diagram is complete
    """
    signature: Signature
    domain: FrozenSet[int] = frozenset()
    relations: Tuple[FrozenSet[Tup], ...] = field(default=())

    def __post_init__(self) -> None:
        dom = frozenset(int(x) for x in self.domain)
        object.__setattr__(self, "domain", dom)
        rels = tuple(frozenset(tuple(t) for t in r) for r in self.relations)
        if not rels:
            rels = tuple(frozenset() for _ in self.signature.predicates)
        if len(rels) != len(self.signature):
            raise SignatureMismatch(
                f"{len(rels)} relation tables for signature {self.signature.describe()}"
            )
        for (name, ar), rel in zip(self.signature.predicates, rels):
            for t in rel:
                if len(t) != ar:
                    raise ArityError(f"{name}{t} does not have arity {ar}")
                if any(x not in dom for x in t):
                    raise ValueError(f"{name}{t} mentions an element outside the domain")
        object.__setattr__(self, "relations", rels)

    @classmethod
    def build(
        cls,
        signature: Signature,
        domain: Iterable[int],
        relations: Optional[Mapping[str, Iterable[Tup]]] = None,
    ) -> "FiniteStructure":
        relations = relations or {}
        unknown = set(relations) - set(signature.names)
        if unknown:
            raise SignatureMismatch(f"predicates {sorted(unknown)} not in {signature.describe()}")
        rels = tuple(frozenset(relations.get(n, ())) for n in signature.names)
        return cls(signature, frozenset(domain), rels)

    @classmethod
    def empty(cls, signature: Signature) -> "FiniteStructure":
        return cls(signature)

    def __len__(self) -> int:
        return len(self.domain)

    def holds(self, j: int, t: Tup) -> bool:
        return tuple(t) in self.relations[j]

    def truth(self, j: int, t: Tup) -> Optional[bool]:
        """Truth of P_j(t); None when t leaves the domain."""
        if any(x not in self.domain for x in t):
            return None
        return tuple(t) in self.relations[j]

    def relation(self, name: str) -> FrozenSet[Tup]:
        return self.relations[self.signature.index(name)]

    def restrict(self, domain: Iterable[int]) -> "FiniteStructure":
        dom = frozenset(domain) & self.domain
        rels = tuple(frozenset(t for t in r if all(x in dom for x in t)) for r in self.relations)
        return FiniteStructure(self.signature, dom, rels)

    def reduct(self, names: Iterable[str]) -> "FiniteStructure":
        names = list(names)
        sig = Signature(tuple(p for p in self.signature.predicates if p[0] in names))
        rels = tuple(self.relation(n) for n in sig.names)
        return FiniteStructure(sig, self.domain, rels)

    def relabel(self, mapping: Mapping[int, int]) -> "FiniteStructure":
        """Apply an injective renaming of elements (unmapped elements keep their names)."""
        f = lambda x: mapping.get(x, x)  # noqa: E731
        dom = frozenset(f(x) for x in self.domain)
        if len(dom) != len(self.domain):
            raise ValueError("relabel mapping is not injective on the domain")
        rels = tuple(frozenset(tuple(f(x) for x in t) for t in r) for r in self.relations)
        return FiniteStructure(self.signature, dom, rels)

    def tuples(self, j: int) -> Iterator[Tup]:
        """All tuples of predicate j's arity over the domain, lexicographically."""
        ar = self.signature.arity(j)
        elems = sorted(self.domain)
        yield from _product_sorted(elems, ar)

    def dump(self) -> str:
        """Canonical text: sorted domain, then per predicate its sorted true tuples."""
        lines = ["domain: " + " ".join(str(x) for x in sorted(self.domain))]
        for (name, _), rel in zip(self.signature.predicates, self.relations):
            facts = " ".join("(" + ",".join(str(x) for x in t) + ")" for t in sorted(rel))
            lines.append(f"{name}: {facts}".rstrip())
        return "\n".join(lines) + "\n"


def _product_sorted(elems: List[int], n: int) -> Iterator[Tup]:
    if n == 0:
        yield ()
        return
    for head in elems:
        for rest in _product_sorted(elems, n - 1):
            yield (head,) + rest


def is_substructure(a: FiniteStructure, b: FiniteStructure) -> bool:
    """dom(a) <= dom(b) and the tables agree on dom(a)-tuples."""
    if a.signature != b.signature:
        raise SignatureMismatch(
            f"{a.signature.describe()} vs {b.signature.describe()}"
        )
    if not a.domain <= b.domain:
        return False
    for ra, rb in zip(a.relations, b.relations):
        if ra != frozenset(t for t in rb if all(x in a.domain for x in t)):
            return False
    return True


def parse_dump(signature: Signature, text: str) -> FiniteStructure:
    """Read back FiniteStructure.dump() output."""
    domain: List[int] = []
    rels: Dict[str, List[Tup]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        if key == "domain":
            domain = [int(x) for x in rest.split()]
            continue
        facts = []
        for tok in rest.split():
            facts.append(tuple(int(x) for x in tok.strip("()").split(",")))
        rels[key] = facts
    return FiniteStructure.build(signature, domain, rels)
