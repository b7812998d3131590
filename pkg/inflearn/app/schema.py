# inflearn/app/schema.py
from __future__ import annotations

import math
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from inflearn.app.utils import parse_count

Count = Union[int, float]  # float only for math.inf

FAMILY_KINDS = (
    "graph",
    "graph-probe",
    "order",
    "order-descriptor",
    "lattice",
    "pgroup",
    "boolean-algebra",
)

LEARNERS = (
    "sigma2",
    "two-graph",
    "honest-cycle",
    "index-cycle",
    "constant",
    "parity",
    "largest-element",
)


def _count(v: Any) -> Optional[Count]:
    if v is None:
        return None
    return parse_count(v)


def _learner_name(v: Optional[str]) -> Optional[str]:
    if v is None:
        return v
    v = v.strip().lower()
    if v not in LEARNERS:
        raise ValueError(f"unknown learner {v!r}; choose from {', '.join(LEARNERS)}")
    return v


class FamilyMember(BaseModel):
    """
    One member of a family-spec file. Which keys matter depends on the family kind:
    - graph: cycle (i >= 1, G_i has (i+1)-cycles) or edgeless
    - graph-probe: probe name, optional expect (final conjecture the learner should settle on)
    - order: a, b (the order a + eta + b)
    - order-descriptor: t0, t2, sup_block, sup_count
    - lattice: index
    - pgroup: i, p
    - boolean-algebra: atoms
    """
    label: Optional[str] = None
    cycle: Optional[int] = None
    edgeless: bool = False
    probe: Optional[str] = None
    expect: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    index: Optional[int] = None
    i: Optional[int] = None
    p: int = 2
    atoms: Optional[Count] = None
    t0: Optional[Count] = None
    t2: Optional[Count] = None
    sup_block: Optional[Count] = None
    sup_count: Optional[Count] = None

    model_config = ConfigDict(extra="ignore")

    @field_validator("atoms", "t0", "t2", "sup_block", "sup_count", mode="before")
    @classmethod
    def _counts(cls, v):
        """- accept naturals, 'inf', 'infinity' or '∞'"""
        return _count(v)

    @field_validator("cycle", "a", "b", "index", "i", "expect")
    @classmethod
    def _natural(cls, v):
        if v is not None and v < 0:
            raise ValueError("must be a natural number")
        return v


class FamilySpec(BaseModel):
    name: str
    kind: Literal[
        "graph", "graph-probe", "order", "order-descriptor", "lattice", "pgroup", "boolean-algebra"
    ]
    enumeration: Literal["friedberg", "honest", "indexed", "none"] = "friedberg"
    learner: Optional[str] = None
    sentences: Optional[str] = None
    horizon: int = 3000
    description: str = ""
    members: List[FamilyMember]

    model_config = ConfigDict(extra="ignore")

    @field_validator("members")
    @classmethod
    def _nonempty(cls, v: List[FamilyMember]) -> List[FamilyMember]:
        if not v:
            raise ValueError("a family needs at least one member")
        return v

    @field_validator("learner")
    @classmethod
    def _learner_known(cls, v: Optional[str]) -> Optional[str]:
        return _learner_name(v)

    @field_validator("horizon")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("horizon must be >= 1")
        return v


class ExperimentConfig(BaseModel):
    """
    Parameters of one CLI experiment.
    - numeric parameters are >= 1 (seed >= 0; n_jobs follows joblib, -1 = all cores)
    - `out`, `steps_csv` and `db_url` are output-only and do not enter the config hash
    """
    family: str = "orders"
    learner: Optional[str] = None
    trials: int = 20
    horizon: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None
    budget: int = 10_000
    depth: int = 4
    width: int = 6
    target: int = 2
    stages: int = 50
    predicates: int = 4
    stride: Optional[int] = None
    window: int = 500
    member: Optional[int] = None
    n_jobs: int = 1
    steps_csv: bool = False
    db_url: Optional[str] = None

    model_config = ConfigDict(extra="ignore")

    @field_validator("learner")
    @classmethod
    def _learner_known(cls, v: Optional[str]) -> Optional[str]:
        return _learner_name(v)

    @field_validator("trials", "budget", "depth", "width", "target", "stages", "predicates", "window")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("horizon", "stride")
    @classmethod
    def _optional_positive(cls, v: Optional[int]) -> Optional[int]:
        """- None means: take it from the family spec"""
        if v is not None and v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("seed", "member")
    @classmethod
    def _natural(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 0:
            raise ValueError("must be >= 0")
        return v

    @field_validator("n_jobs")
    @classmethod
    def _jobs(cls, v: int) -> int:
        if v == 0:
            raise ValueError("n_jobs must be nonzero")
        return v

    def hashed_fields(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"out", "steps_csv", "db_url", "n_jobs"})


class TrialRow(BaseModel):
    family: str
    learner: str
    member: int
    member_label: str
    expected: str
    seed: int
    source: str
    horizon: int
    final_conjecture: str
    convergence_step: int
    mind_changes: int
    settled: bool
    correct: bool
    config_hash: str
    version: str


class MemberSummary(BaseModel):
    member: int
    member_label: str
    trials: int
    correct: int
    settled: int
    max_convergence_step: int
    mean_mind_changes: float


class SimulationSummary(BaseModel):
    family: str
    learner: str
    horizon: int
    trials_per_member: int
    seed: int
    config_hash: str
    version: str
    total: int
    correct: int
    all_correct: bool
    members: List[MemberSummary] = Field(default_factory=list)

    @model_validator(mode="after")
    def _consistent(self) -> "SimulationSummary":
        if self.correct > self.total:
            raise ValueError("more correct trials than trials")
        return self


def count_text(v: Optional[Count]) -> str:
    if v is None:
        return "-"
    return "inf" if v == math.inf else str(int(v))
