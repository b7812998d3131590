# inflearn/app/sigma2.py
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import (
    TYPE_CHECKING,
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

from parsy import ParseError, eof, fail, generate, line_info_at, regex, seq, string

from inflearn.app.structure import ArityError, FiniteStructure, Signature, Tup, decode_tuple, encode_tuple

if TYPE_CHECKING:
    from inflearn.app.catalog import Family, Presentation

log = logging.getLogger(__name__)

WITNESSED = "witnessed"
REFUTED = "refuted-for-all-small-tuples"
PENDING = "pending"


class SentenceSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class EvaluationError(ValueError):
    pass


# ----------------------------
# Syntax tree
# ----------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Const:
    value: bool


Formula = Union[Atom, Eq, Not, And, Or, Implies, Const]


@dataclass(frozen=True)
class Conjunct:
    universals: Tuple[str, ...]
    matrix: Formula


@dataclass(frozen=True)
class Sigma2Sentence:
    """exists x1..xn  /\\_j  forall y_j1..y_jm  phi_j  (phi_j quantifier-free)."""
    existentials: Tuple[str, ...]
    conjuncts: Tuple[Conjunct, ...]
    name: str = field(default="", compare=False)

    @property
    def arity(self) -> int:
        return len(self.existentials)

    def __str__(self) -> str:
        return format_sentence(self)


@dataclass(frozen=True)
class SentenceFamily:
    """(psi_i, e_i) pairs: nu(e_i) is the member psi_i singles out."""
    entries: Tuple[Tuple[Sigma2Sentence, int], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("a sentence family needs at least one sentence")
        for _, e in self.entries:
            if e is None or e < 0:
                raise ValueError(f"nu-index {e!r} is not a natural number")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def sentences(self) -> List[Sigma2Sentence]:
        return [s for s, _ in self.entries]

    @property
    def indices(self) -> List[int]:
        return [e for _, e in self.entries]


def free_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in f.parts))
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    return frozenset()


def predicates_of(s: Sigma2Sentence) -> FrozenSet[Tuple[str, int]]:
    out: Set[Tuple[str, int]] = set()

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            out.add((f.pred, len(f.args)))
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                walk(p)
        elif isinstance(f, Implies):
            walk(f.left)
            walk(f.right)

    for c in s.conjuncts:
        walk(c.matrix)
    return frozenset(out)


# ----------------------------
# Parser
# ----------------------------

KEYWORDS = {"exists", "forall", "true", "false"}

whitespace = regex(r"(\s|#[^\n]*)*")
_COMMENT = re.compile(r"#[^\n]*")


def lexeme(p):
    return p << whitespace


def keyword(word: str):
    return lexeme(regex(word + r"(?![A-Za-z0-9_])")).desc(f"'{word}'")


def symbol(s: str):
    return lexeme(string(s)).desc(f"'{s}'")


@generate("variable")
def variable():
    name = yield lexeme(regex(r"[a-z_][A-Za-z0-9_]*"))
    if name in KEYWORDS:
        yield fail("variable (got keyword)")
    return name


predicate_name = lexeme(regex(r"[A-Z][A-Za-z0-9_]*")).desc("predicate name")
sentence_name = lexeme(regex(r"[A-Za-z_][A-Za-z0-9_]*")).desc("sentence name")


def _comparison(left: str, op: str, right: str) -> Formula:
    if op == "=":
        return Eq(left, right)
    if op == "!=":
        return Not(Eq(left, right))
    if op == "<=":
        return Atom("Leq", (left, right))
    return And((Atom("Leq", (left, right)), Not(Eq(left, right))))


atom = seq(
    predicate_name,
    symbol("(") >> variable.sep_by(symbol(","), min=1) << symbol(")"),
).combine(lambda p, args: Atom(p, tuple(args)))

comparison = seq(
    variable, lexeme(regex(r"!=|<=|<|=")).desc("comparison"), variable
).combine(_comparison)


@generate("formula")
def formula():
    left = yield disjunction
    right = yield (symbol("->") >> formula).optional()
    return left if right is None else Implies(left, right)


@generate("disjunction")
def disjunction():
    parts = yield conjunction.sep_by(symbol("|"), min=1)
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


@generate("conjunction")
def conjunction():
    parts = yield unary.sep_by(symbol("&"), min=1)
    return parts[0] if len(parts) == 1 else And(tuple(parts))


@generate("negation")
def unary():
    bang = yield symbol("!").optional()
    if bang is not None:
        body = yield unary
        return Not(body)
    return (yield primary)


primary = (
    symbol("(") >> formula << symbol(")")
    | keyword("true").result(Const(True))
    | keyword("false").result(Const(False))
    | atom
    | comparison
)

conjunct = seq(
    (keyword("forall") >> variable.at_least(1) << symbol(":")).optional(),
    formula,
).combine(lambda us, m: Conjunct(tuple(us or ()), m))


@generate("sentence")
def sentence():
    name = yield (sentence_name << symbol(":=")).optional()
    yield keyword("exists")
    xs = yield variable.many()
    yield symbol("{")
    cs = yield conjunct.sep_by(symbol(";"))
    yield symbol(";").optional()
    yield symbol("}")
    return Sigma2Sentence(tuple(xs), tuple(cs), name or "")


sentence_file = whitespace >> sentence.mark().many() << eof
single_sentence = whitespace >> sentence.mark() << eof


def _syntax_error(text: str, e: ParseError) -> SentenceSyntaxError:
    line, col = line_info_at(text, e.index)
    opened = text.rfind("{", 0, e.index)
    closed = text.rfind("}", 0, e.index)
    if opened > closed:
        window = text[opened:e.index + len("exists") + 1]
        if re.search(r"\bexists\b", _COMMENT.sub("", window)):
            msg = "nested quantifier: matrices must be quantifier-free"
            return SentenceSyntaxError(msg, line + 1, col + 1)
    else:
        head = _COMMENT.sub("", text[closed + 1:e.index + len("forall") + 1])
        if re.search(r"\bforall\b", head):
            msg = "non-prenex input: a sentence must start with 'exists' (forall-exists shape rejected)"
            return SentenceSyntaxError(msg, line + 1, col + 1)
    return SentenceSyntaxError(f"expected {', '.join(sorted(e.expected))}", line + 1, col + 1)


def _check_variables(s: Sigma2Sentence, pos: Tuple[int, int]) -> Sigma2Sentence:
    line, col = pos[0] + 1, pos[1] + 1
    if len(set(s.existentials)) != len(s.existentials):
        raise SentenceSyntaxError("repeated existential variable", line, col)
    declared = set(s.existentials)
    for j, c in enumerate(s.conjuncts):
        if len(set(c.universals)) != len(c.universals):
            raise SentenceSyntaxError(f"conjunct {j}: repeated universal variable", line, col)
        clash = declared & set(c.universals)
        if clash:
            raise SentenceSyntaxError(
                f"conjunct {j}: universal variable(s) {sorted(clash)} shadow existentials", line, col
            )
        undeclared = free_vars(c.matrix) - declared - set(c.universals)
        if undeclared:
            raise SentenceSyntaxError(
                f"conjunct {j}: undeclared variable(s) {sorted(undeclared)}", line, col
            )
    return s


def parse_sentence(text: str) -> Sigma2Sentence:
    try:
        start, s, _ = single_sentence.parse(text)
    except ParseError as e:
        raise _syntax_error(text, e) from None
    return _check_variables(s, start)


def parse_sentences(text: str) -> List[Sigma2Sentence]:
    try:
        marked = sentence_file.parse(text)
    except ParseError as e:
        raise _syntax_error(text, e) from None
    return [_check_variables(s, start) for start, s, _ in marked]


def load_sentences(path: Union[str, Path]) -> List[Sigma2Sentence]:
    return parse_sentences(Path(path).read_text(encoding="utf-8"))


# ----------------------------
# Printer
# ----------------------------

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 5)


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.pred}({', '.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        if isinstance(f.body, Eq):
            return f"{f.body.left} != {f.body.right}"
        inner = format_formula(f.body)
        return "!" + (inner if _prec(f.body) >= 4 else f"({inner})")
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        own = _prec(f)
        return op.join(
            format_formula(p) if _prec(p) > own else f"({format_formula(p)})" for p in f.parts
        )
    if isinstance(f, Implies):
        left = format_formula(f.left)
        if _prec(f.left) <= 1:
            left = f"({left})"
        return f"{left} -> {format_formula(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


def format_conjunct(c: Conjunct) -> str:
    body = format_formula(c.matrix)
    return f"forall {' '.join(c.universals)} : {body}" if c.universals else body


def format_sentence(s: Sigma2Sentence, canonical: bool = False) -> str:
    """Reparsable text; canonical=True sorts the conjuncts by their printed form."""
    parts = [format_conjunct(c) for c in s.conjuncts]
    if canonical:
        parts = sorted(parts)
    head = f"{s.name} := " if s.name else ""
    xs = (" " + " ".join(s.existentials)) if s.existentials else ""
    if not parts:
        return f"{head}exists{xs} {{ }}"
    body = "".join(f"  {p};\n" for p in parts)
    return f"{head}exists{xs} {{\n{body}}}"


# ----------------------------
# Evaluation
# ----------------------------

Env = List[Optional[int]]
Rels = Tuple[FrozenSet[Tup], ...]
Compiled = Callable[[Env, Rels, FrozenSet[int]], Optional[bool]]


def _compile(f: Formula, slots: Mapping[str, int], signature: Signature) -> Compiled:
    """
    Kleene three-valued closure: unassigned or out-of-domain atoms are None.
    Equality is decided as soon as both sides are assigned, in or out of dom; it reads no table.
    """
    if isinstance(f, Atom):
        try:
            j = signature.index(f.pred)
        except KeyError:
            raise EvaluationError(
                f"predicate {f.pred} not in signature {signature.describe()}"
            ) from None
        if signature.arity(j) != len(f.args):
            raise EvaluationError(f"{f.pred} used with {len(f.args)} arguments")
        idx = tuple(slots[v] for v in f.args)

        def atom_fn(env, rels, dom):
            t = tuple(env[i] for i in idx)
            for x in t:
                if x is None or x not in dom:
                    return None
            return t in rels[j]
        return atom_fn
    if isinstance(f, Eq):
        a, b = slots[f.left], slots[f.right]

        def eq_fn(env, rels, dom):
            x, y = env[a], env[b]
            if x is None or y is None:
                return None
            return x == y
        return eq_fn
    if isinstance(f, Const):
        val = f.value
        return lambda env, rels, dom: val
    if isinstance(f, Not):
        body = _compile(f.body, slots, signature)

        def not_fn(env, rels, dom):
            v = body(env, rels, dom)
            return None if v is None else not v
        return not_fn
    if isinstance(f, And):
        parts = [_compile(p, slots, signature) for p in f.parts]

        def and_fn(env, rels, dom):
            unknown = False
            for p in parts:
                v = p(env, rels, dom)
                if v is False:
                    return False
                if v is None:
                    unknown = True
            return None if unknown else True
        return and_fn
    if isinstance(f, Or):
        parts = [_compile(p, slots, signature) for p in f.parts]

        def or_fn(env, rels, dom):
            unknown = False
            for p in parts:
                v = p(env, rels, dom)
                if v is True:
                    return True
                if v is None:
                    unknown = True
            return None if unknown else False
        return or_fn
    if isinstance(f, Implies):
        left = _compile(f.left, slots, signature)
        right = _compile(f.right, slots, signature)

        def imp_fn(env, rels, dom):
            a = left(env, rels, dom)
            if a is False:
                return True
            b = right(env, rels, dom)
            if b is True:
                return True
            if a is True and b is False:
                return False
            return None
        return imp_fn
    raise TypeError(f"not a formula: {f!r}")


def eval_qf(s: FiniteStructure, f: Formula, asg: Mapping[str, int]) -> bool:
    """Two-valued satisfaction; every variable of f must be assigned into dom(s)."""
    names = sorted(free_vars(f))
    for v in names:
        if v not in asg:
            raise EvaluationError(f"variable {v} is unassigned")
        if asg[v] not in s.domain:
            raise EvaluationError(f"{v} = {asg[v]} is outside the domain")
    slots = {v: i for i, v in enumerate(names)}
    fn = _compile(f, slots, s.signature)
    val = fn([asg[v] for v in names], s.relations, s.domain)
    if val is None:
        raise EvaluationError("evaluation is undetermined")
    return val


def _top_parts(f: Formula) -> List[Formula]:
    if isinstance(f, And):
        out: List[Formula] = []
        for p in f.parts:
            out.extend(_top_parts(p))
        return out
    return [f]


@dataclass(frozen=True)
class _Part:
    """One top-level conjunct of a matrix, checked once its last existential is assigned."""
    pid: int
    conj: int
    fn: Compiled
    ex_slots: Tuple[int, ...]
    univ_slots: Tuple[int, ...]
    depth: int


@dataclass(frozen=True)
class CompiledSentence:
    sentence: Sigma2Sentence
    arity: int
    n_slots: int
    parts: Tuple[_Part, ...]


@lru_cache(maxsize=256)
def compile_sentence(psi: Sigma2Sentence, signature: Signature) -> CompiledSentence:
    n = psi.arity
    ex_slots = {v: i for i, v in enumerate(psi.existentials)}
    parts: List[_Part] = []
    width = n
    for j, c in enumerate(psi.conjuncts):
        slots = dict(ex_slots)
        for k, u in enumerate(c.universals):
            slots[u] = n + k
        width = max(width, n + len(c.universals))
        for f in _top_parts(c.matrix):
            fv = free_vars(f)
            exs = tuple(sorted(ex_slots[v] for v in fv if v in ex_slots))
            uvs = tuple(slots[u] for u in c.universals if u in fv)
            parts.append(_Part(
                pid=len(parts), conj=j, fn=_compile(f, slots, signature),
                ex_slots=exs, univ_slots=uvs, depth=exs[-1] if exs else -1,
            ))
    return CompiledSentence(psi, n, width, tuple(parts))


class CompatibilityChecker:
    """
    Compatibility of one sentence with one finite structure c.
    - conjuncts j < |dom(c)| are checked, universals range over dom(c)
    - a part refutes only when its three-valued value is definitely False
    - refutations are memoized on (part, existential values it mentions)
    """

    def __init__(self, psi: Sigma2Sentence, c: FiniteStructure) -> None:
        self.psi = psi
        self.c = c
        self.comp = compile_sentence(psi, c.signature)
        self.n = self.comp.arity
        self.rels = c.relations
        self.dom = c.domain
        self.elems = sorted(c.domain)
        bound = min(len(psi.conjuncts), len(self.elems))
        active = [p for p in self.comp.parts if p.conj < bound]
        self.root = [p for p in active if p.depth < 0]
        self.by_depth: List[List[_Part]] = [[] for _ in range(self.n)]
        for p in active:
            if p.depth >= 0:
                self.by_depth[p.depth].append(p)
        self.memo: Dict[Tuple[int, Tup], bool] = {}
        self.env: Env = [None] * self.comp.n_slots
        self.probes = 0
        self._root_ok: Optional[bool] = None

    def _refutes(self, part: _Part) -> bool:
        env = self.env
        key = (part.pid, tuple(env[s] for s in part.ex_slots))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        us = part.univ_slots
        fn, rels, dom, elems = part.fn, self.rels, self.dom, self.elems

        def search(k: int) -> bool:
            self.probes += 1
            v = fn(env, rels, dom)
            if v is not None:
                return v is False
            if k == len(us):
                return False
            slot = us[k]
            for x in elems:
                env[slot] = x
                if search(k + 1):
                    env[slot] = None
                    return True
            env[slot] = None
            return False

        out = search(0)
        self.memo[key] = out
        return out

    def root_ok(self) -> bool:
        if self._root_ok is None:
            self._root_ok = not any(self._refutes(p) for p in self.root)
        return self._root_ok

    def compatible(self, a: Sequence[int]) -> bool:
        a = tuple(int(x) for x in a)
        if len(a) != self.n:
            raise ArityError(f"sentence has {self.n} existentials, tuple {a} has {len(a)}")
        if not self.root_ok():
            return False
        for k, x in enumerate(a):
            self.env[k] = x
        try:
            return not any(self._refutes(p) for level in self.by_depth for p in level)
        finally:
            for k in range(self.n):
                self.env[k] = None

    def _max_shell(self) -> int:
        return (self.elems[-1] + self.n) if self.elems else self.n - 1

    def least_code(
        self,
        lower: int = 0,
        upper: Optional[int] = None,
        allowed: Optional[FrozenSet[int]] = None,
    ) -> Optional[Tuple[int, Tup]]:
        """
        Least code k with lower <= k (< upper) whose tuple is compatible.
        - codes are visited in increasing order (shell by shell, lexicographic inside)
        - beyond shell max(dom)+n every equality pattern has already occurred, so the search stops there
        - allowed restricts tuple entries to a set of elements
        """
        if not self.root_ok():
            return None
        n = self.n
        if n == 0:
            return (0, ()) if lower == 0 and (upper is None or upper > 0) else None
        lo = decode_tuple(n, lower)
        m0 = max(lo)
        top = self._max_shell()
        if allowed is not None:
            top = min(top, max(allowed, default=-1))
        env = self.env
        stop = object()

        def min_completion(k: int, has_m: bool, m: int) -> int:
            head = tuple(env[:k + 1])
            r = n - k - 1
            if has_m or r == 0:
                tail = (0,) * r
            else:
                tail = (0,) * (r - 1) + (m,)
            return encode_tuple(n, head + tail)

        def rec(k: int, m: int, has_m: bool, tight: bool):
            if k == n:
                t = tuple(env[:n])
                code = encode_tuple(n, t)
                if upper is not None and code >= upper:
                    return stop
                return (code, t)
            r = n - k - 1
            start = lo[k] if tight else 0
            if r == 0 and not has_m:
                values: Iterable[int] = (m,) if start <= m else ()
            else:
                values = range(start, m + 1)
            for v in values:
                if allowed is not None and v not in allowed:
                    continue
                env[k] = v
                now_m = has_m or v == m
                if upper is not None and min_completion(k, now_m, m) >= upper:
                    env[k] = None
                    return stop
                if not any(self._refutes(p) for p in self.by_depth[k]):
                    res = rec(k + 1, m, now_m, tight and v == lo[k])
                    if res is not None:
                        env[k] = None
                        return res
            env[k] = None
            return None

        try:
            for m in range(m0, top + 1):
                if upper is not None and m ** n >= upper:
                    return None
                if allowed is not None and m not in allowed:
                    continue
                res = rec(0, m, False, m == m0)
                if res is stop:
                    return None
                if res is not None:
                    return res
            return None
        finally:
            for k in range(self.n):
                env[k] = None


def compatible(psi: Sigma2Sentence, c: FiniteStructure, a: Sequence[int]) -> bool:
    return CompatibilityChecker(psi, c).compatible(a)


def least_compatible_code(
    psi: Sigma2Sentence, c: FiniteStructure, lower: int = 0, upper: Optional[int] = None
) -> Optional[Tuple[int, Tup]]:
    return CompatibilityChecker(psi, c).least_code(lower, upper)


def holds_in_limit(psi: Sigma2Sentence, pres: "Presentation", bound: int) -> str:
    """
    Semi-decision at a finite bound.
    - checks stage H = min(bound, elem_stage(bound)); candidate tuples range over elements < bound
    - witnessed: an in-domain tuple survives every conjunct over stage H
    - refuted-for-all-small-tuples: every candidate tuple is refuted
    """
    if bound <= 0:
        return PENDING
    h = min(bound, pres.elem_stage(bound))
    c = pres.stage(h)
    checker = CompatibilityChecker(psi, c)
    if psi.arity == 0:
        return WITNESSED if checker.root_ok() else REFUTED
    inside = frozenset(x for x in range(bound) if x in c.domain)
    if checker.least_code(allowed=inside) is not None:
        return WITNESSED
    if len(inside) < bound:
        log.debug("holds_in_limit: stage %d misses elements below %d", h, bound)
        return PENDING
    return REFUTED


# ----------------------------
# Sentence builders
# ----------------------------

def order_sentence_text(begin: int, end: int, name: str = "") -> str:
    """begin consecutive least elements, then end consecutive greatest elements (Leq only)."""
    xs = [f"x{k}" for k in range(1, begin + 1)]
    zs = [f"z{k}" for k in range(1, end + 1)]
    chain = xs + zs
    lines = [" & ".join(f"{a} < {b}" for a, b in zip(chain, chain[1:])) or "true"]
    if xs:
        lines.append(f"forall y : {xs[0]} <= y")
        lines += [f"forall y : !({a} < y & y < {b})" for a, b in zip(xs, xs[1:])]
    if zs:
        lines.append(f"forall y : y <= {zs[-1]}")
        lines += [f"forall y : !({a} < y & y < {b})" for a, b in zip(zs, zs[1:])]
    head = f"{name} := " if name else ""
    body = "".join(f"  {ln};\n" for ln in lines)
    return f"{head}exists {' '.join(chain)} {{\n{body}}}\n"


def group_sentence_text(i: int, name: str = "") -> str:
    """An element of order exactly 2^(i+1) and every element killed by 2^(i+1) (p = 2)."""
    xs = [f"x{k}" for k in range(i + 1)]
    ys = [f"y{k}" for k in range(i + 2)]
    exist = [f"Add({a}, {a}, {b})" for a, b in zip(xs, xs[1:])]
    exist.append(f"!Add({xs[-1]}, {xs[-1]}, {xs[-1]})")
    chain = " & ".join(f"Add({a}, {a}, {b})" for a, b in zip(ys, ys[1:]))
    last = ys[-1]
    head = f"{name} := " if name else ""
    return (
        f"{head}exists {' '.join(xs)} {{\n"
        f"  {' & '.join(exist)};\n"
        f"  forall {' '.join(ys)} : {chain} -> Add({last}, {last}, {last});\n"
        "}\n"
    )


def cycle_sentence_text(length: int, name: str = "") -> str:
    """A directed cycle through `length` distinct elements."""
    xs = [f"x{k}" for k in range(length)]
    facts = [f"{a} != {b}" for k, a in enumerate(xs) for b in xs[k + 1:]]
    facts += [f"Edge({a}, {xs[(k + 1) % length]})" for k, a in enumerate(xs)]
    head = f"{name} := " if name else ""
    return f"{head}exists {' '.join(xs)} {{\n  {' & '.join(facts)};\n}}\n"


def diagram_sentence_text(c: FiniteStructure, name: str = "") -> str:
    """
    Existential diagram of a lattice core: distinct x_a plus Join/Meet facts for all a < b.
    Element ids of c must be 0..n-1.
    """
    n = len(c.domain)
    if sorted(c.domain) != list(range(n)):
        raise ValueError("diagram sentences need domain 0..n-1")
    join = {(x, y): z for x, y, z in c.relation("Join")}
    meet = {(x, y): z for x, y, z in c.relation("Meet")}
    facts = [f"x{a} != x{b}" for a in range(n) for b in range(a + 1, n)]
    for a in range(n):
        for b in range(a + 1, n):
            facts.append(f"Join(x{a}, x{b}, x{join[(a, b)]})")
            facts.append(f"Meet(x{a}, x{b}, x{meet[(a, b)]})")
    head = f"{name} := " if name else ""
    xs = " ".join(f"x{a}" for a in range(n))
    return f"{head}exists {xs} {{\n  " + " &\n  ".join(facts) + ";\n}\n"


def xi_sentence(i: int) -> Sigma2Sentence:
    """P_i has a least element."""
    return parse_sentence(f"xi{i} := exists x {{ P{i}(x); forall y : P{i}(y) -> Leq(x, y) }}")


def family_sentences(family: "Family") -> SentenceFamily:
    """Shipped sentences of a family, paired in member order with the members' nu-indices."""
    path = family.sentences_path
    if path is None:
        raise ValueError(f"family {family.name} ships no sentences")
    sentences = load_sentences(path)
    if len(sentences) != len(family.descriptors):
        raise ValueError(
            f"{path.name}: {len(sentences)} sentences for {len(family.descriptors)} members"
        )
    entries = []
    for k, s in enumerate(sentences):
        e = family.member_index(k)
        if e is None:
            raise ValueError(f"member {k} of {family.name} has no index in its enumeration")
        entries.append((s, e))
    return SentenceFamily(tuple(entries))
