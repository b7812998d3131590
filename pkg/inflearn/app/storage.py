# inflearn/app/storage.py
from __future__ import annotations

import datetime as dt
import json
import os
import uuid
from typing import Any, Dict, List, Optional, Tuple

from sqlalchemy import (
    Boolean, Column, DateTime, Integer, String, Text, UniqueConstraint, cast, create_engine, func, select
)
from sqlalchemy.engine import Engine
from sqlalchemy.exc import IntegrityError
from sqlalchemy.orm import declarative_base, sessionmaker

from inflearn.app.schema import TrialRow

ENV_DB_URL = "INFLEARN_DB_URL"

Base = declarative_base()

_ENGINES: Dict[str, Tuple[Engine, sessionmaker]] = {}


class TrialRecord(Base):
    """
    One simulated trial.
    UNIQUE(config_hash, member, seed): re-running an identical config never duplicates rows.
    """
    __tablename__ = "trials"

    id = Column(String, primary_key=True)           # UUID string
    config_hash = Column(String, nullable=False)
    family = Column(String, nullable=False)
    learner = Column(String, nullable=False)
    member = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)
    horizon = Column(Integer, nullable=False)
    final_conjecture = Column(String, nullable=False)
    convergence_step = Column(Integer, nullable=False)
    mind_changes = Column(Integer, nullable=False)
    correct = Column(Boolean, nullable=False)
    row_json = Column(Text, nullable=False)         # the full TrialRow
    created_at = Column(DateTime, default=dt.datetime.utcnow)

    __table_args__ = (
        UniqueConstraint("config_hash", "member", "seed", name="uix_trial"),
    )


def db_url(url: Optional[str] = None) -> Optional[str]:
    """Explicit url, else INFLEARN_DB_URL, else None (persistence off)."""
    return url or os.getenv(ENV_DB_URL) or None


def _session_factory(url: str) -> sessionmaker:
    entry = _ENGINES.get(url)
    if entry is None:
        engine = create_engine(
            url,
            future=True,
            connect_args={"check_same_thread": False} if url.startswith("sqlite") else {},
        )
        Base.metadata.create_all(engine)
        entry = (engine, sessionmaker(bind=engine, future=True))
        _ENGINES[url] = entry
    return entry[1]


def record_trial_or_get(url: str, row: TrialRow) -> Tuple[str, bool]:
    """
    Insert a trial row or return the id of the stored one.
    Returns: (trial_id, created_flag)
    """
    Session = _session_factory(url)
    tid = str(uuid.uuid4())
    rec = TrialRecord(
        id=tid,
        config_hash=row.config_hash,
        family=row.family,
        learner=row.learner,
        member=row.member,
        seed=row.seed,
        horizon=row.horizon,
        final_conjecture=row.final_conjecture,
        convergence_step=row.convergence_step,
        mind_changes=row.mind_changes,
        correct=row.correct,
        row_json=json.dumps(row.model_dump(), sort_keys=True),
    )
    try:
        with Session.begin() as s:
            s.add(rec)
        return tid, True
    except IntegrityError:
        with Session() as s:
            existing = s.execute(
                select(TrialRecord.id).where(
                    TrialRecord.config_hash == row.config_hash,
                    TrialRecord.member == row.member,
                    TrialRecord.seed == row.seed,
                )
            ).first()
            if existing:
                return existing[0], False
            raise


def get_trial(url: str, tid: str) -> Optional[TrialRow]:
    Session = _session_factory(url)
    with Session() as s:
        rec = s.get(TrialRecord, tid)
        if not rec:
            return None
        return TrialRow(**json.loads(rec.row_json))


def trial_summaries(url: str) -> List[Dict[str, Any]]:
    """Per (family, learner): trials, correct, mean mind changes, latest convergence step."""
    Session = _session_factory(url)
    with Session() as s:
        rows = s.execute(
            select(
                TrialRecord.family,
                TrialRecord.learner,
                func.count(TrialRecord.id),
                func.sum(cast(TrialRecord.correct, Integer)),
                func.avg(TrialRecord.mind_changes),
                func.max(TrialRecord.convergence_step),
            )
            .group_by(TrialRecord.family, TrialRecord.learner)
            .order_by(TrialRecord.family, TrialRecord.learner)
        ).all()
    return [
        {
            "family": fam,
            "learner": learner,
            "trials": int(n),
            "correct": int(ok or 0),
            "mean_mind_changes": float(mc or 0.0),
            "max_convergence_step": int(conv or 0),
        }
        for fam, learner, n, ok, mc, conv in rows
    ]
