# inflearn/scripts/cli.py
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
import yaml
from joblib import Parallel, delayed
from pydantic import ValidationError

from inflearn.app.bf import (
    BADescriptor,
    cell_text,
    from_family_descriptor,
    le2_matrix,
    obstruction_witness,
)
from inflearn.app.catalog import Family, builtin_families, load_family
from inflearn.app.embedding import IndexOracle, embed_run, limit_shape, xi_holds
from inflearn.app.informant import (
    InformantPrefix,
    ReplaySource,
    load_replay,
    save_replay,
    shuffled_source,
)
from inflearn.app.learners import LearningRecord, make_learner, run
from inflearn.app.locking import adversary, warmup_base
from inflearn.app.schema import (
    ExperimentConfig,
    MemberSummary,
    SimulationSummary,
    TrialRow,
    count_text,
)
from inflearn.app.storage import db_url, get_trial, record_trial_or_get
from inflearn.app.utils import canonical_json, config_hash, package_version, parse_count

log = logging.getLogger("inflearn")

ENV_LOG_LEVEL = "INFLEARN_LOG_LEVEL"

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_ERROR = 2


def setup_logging(level: Optional[str]) -> None:
    level = (level or os.getenv(ENV_LOG_LEVEL) or "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """YAML file values first, explicit flags on top."""
    data: Dict[str, Any] = {}
    if getattr(args, "config", None):
        raw = yaml.safe_load(Path(args.config).read_text(encoding="utf-8")) or {}
        if not isinstance(raw, dict):
            raise ValueError(f"{args.config}: config must be a mapping")
        data.update(raw)
    for key in ExperimentConfig.model_fields:
        v = getattr(args, key, None)
        if v is not None and v is not False:
            data[key] = v
    return ExperimentConfig(**data)


def _resolve(cfg: ExperimentConfig) -> Tuple[Family, str, int]:
    fam = load_family(cfg.family)
    if fam.kind == "boolean-algebra":
        raise ValueError(
            f"{fam.name}: no distinguishing Sigma_2 sentences exist for Boolean algebras; "
            f"run `inflearn bf --family {cfg.family}` for the obstruction witness"
        )
    if not fam.presentable:
        raise ValueError(f"{fam.name} is given by descriptors only; use `inflearn bf`")
    learner = cfg.learner or fam.spec.learner
    if learner is None:
        raise ValueError(f"{fam.name} names no default learner; pass --learner")
    horizon = cfg.horizon or fam.spec.horizon
    return fam, learner, horizon


def _members(cfg: ExperimentConfig, fam: Family) -> List[int]:
    if cfg.member is None:
        return list(range(len(fam.members)))
    if cfg.member >= len(fam.members):
        raise ValueError(f"{fam.name} has {len(fam.members)} members, no member {cfg.member}")
    return [cfg.member]


# ----------------------------
# simulate
# ----------------------------

def _trial(
    family: str, learner_name: str, k: int, seed: int, horizon: int, window: int, chash: str
) -> Tuple[TrialRow, LearningRecord]:
    fam = load_family(family)
    l = make_learner(learner_name, fam)
    pres = fam.members[k]
    rec = run(l, shuffled_source(pres, seed), horizon)
    settled = rec.settled(min(window, horizon // 6))
    expected = fam.expected(k)
    row = TrialRow(
        family=fam.name,
        learner=l.name,
        member=k,
        member_label=str(fam.descriptors[k]),
        expected="-" if expected is None else str(expected),
        seed=seed,
        source=rec.source,
        horizon=horizon,
        final_conjecture=str(rec.final),
        convergence_step=rec.convergence_point,
        mind_changes=rec.mind_changes,
        settled=settled,
        correct=settled and fam.is_correct(k, rec.final),
        config_hash=chash,
        version=package_version(),
    )
    return row, rec


def summarize(cfg: ExperimentConfig, fam: Family, learner: str, horizon: int,
              rows: Sequence[TrialRow], chash: str) -> SimulationSummary:
    members = []
    for k in sorted({r.member for r in rows}):
        mine = [r for r in rows if r.member == k]
        members.append(MemberSummary(
            member=k,
            member_label=mine[0].member_label,
            trials=len(mine),
            correct=sum(r.correct for r in mine),
            settled=sum(r.settled for r in mine),
            max_convergence_step=max(r.convergence_step for r in mine),
            mean_mind_changes=round(sum(r.mind_changes for r in mine) / len(mine), 6),
        ))
    correct = sum(r.correct for r in rows)
    return SimulationSummary(
        family=fam.name,
        learner=learner,
        horizon=horizon,
        trials_per_member=cfg.trials,
        seed=cfg.seed,
        config_hash=chash,
        version=package_version(),
        total=len(rows),
        correct=correct,
        all_correct=correct == len(rows),
        members=members,
    )


OUTCOME_FIELDS = ("final_conjecture", "convergence_step", "mind_changes", "settled", "correct")


def store_trials(url: str, rows: Sequence[TrialRow]) -> List[TrialRow]:
    """Insert trial rows; returns the stored rows whose outcome differs from this run's."""
    created = 0
    drifted: List[TrialRow] = []
    for r in rows:
        tid, new = record_trial_or_get(url, r)
        if new:
            created += 1
            continue
        stored = get_trial(url, tid)
        if stored is not None and any(getattr(stored, f) != getattr(r, f) for f in OUTCOME_FIELDS):
            log.warning(
                "stored trial %s (member %d, seed %d, version %s) disagrees with this run",
                tid, r.member, r.seed, stored.version,
            )
            drifted.append(stored)
    log.info("stored %d new trial rows (%d already present)", created, len(rows) - created)
    return drifted


def cmd_simulate(cfg: ExperimentConfig) -> int:
    fam, learner, horizon = _resolve(cfg)
    make_learner(learner, fam)
    chash = config_hash(cfg.hashed_fields())
    jobs = [(k, cfg.seed + t) for k in _members(cfg, fam) for t in range(cfg.trials)]
    log.info("simulate %s with %s: %d trials, horizon %d", fam.name, learner, len(jobs), horizon)
    results = Parallel(n_jobs=cfg.n_jobs)(
        delayed(_trial)(cfg.family, learner, k, seed, horizon, cfg.window, chash) for k, seed in jobs
    )
    rows = [r for r, _ in results]
    summary = summarize(cfg, fam, learner, horizon, rows, chash)

    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame([r.model_dump() for r in rows], columns=list(TrialRow.model_fields))
        frame.to_csv(out / "trials.csv", index=False)
        (out / "summary.json").write_text(canonical_json(summary.model_dump()), encoding="utf-8")
        if cfg.steps_csv:
            steps_dir = out / "steps"
            steps_dir.mkdir(exist_ok=True)
            for row, rec in results:
                rec.to_frame().to_csv(steps_dir / f"member{row.member}_seed{row.seed}.csv", index=False)
    url = db_url(cfg.db_url)
    if url:
        store_trials(url, rows)

    sys.stdout.write(canonical_json(summary.model_dump()))
    return EXIT_OK if summary.all_correct else EXIT_VERDICT


# ----------------------------
# adversary / replay
# ----------------------------

def replay_changes(learner_name: str, fam: Family, prefix: InformantPrefix) -> int:
    if len(prefix) == 0:
        return 0
    l = make_learner(learner_name, fam)
    return run(l, ReplaySource(prefix), len(prefix)).mind_changes


def cmd_adversary(cfg: ExperimentConfig, warmup: bool = True) -> int:
    fam, learner, horizon = _resolve(cfg)
    k = cfg.member or 0
    _members(cfg, fam)
    pres = fam.members[k]
    l = make_learner(learner, fam)
    base = warmup_base(l, pres, horizon, min(cfg.window, horizon // 6)) if warmup else None
    res = adversary(l, pres, cfg.target, cfg.budget, cfg.depth, cfg.width, base)
    total = replay_changes(learner, fam, res.prefix)
    report = {
        "family": fam.name,
        "member": k,
        "learner": learner,
        "target": cfg.target,
        "base_length": res.base_length,
        "prefix_length": len(res.prefix),
        "forced_changes": res.mind_changes,
        "mind_changes": total,
        "probes": res.probes,
        "verdict": "target reached" if res.reached else "inconclusive",
        "config_hash": config_hash(cfg.hashed_fields()),
    }
    if cfg.out:
        header = {
            "provenance": "adversarial",
            "family": cfg.family,
            "member": k,
            "learner": learner,
            "mind_changes": total,
            "seed": cfg.seed,
        }
        save_replay(cfg.out, res.prefix, header)
    sys.stdout.write(canonical_json(report))
    return EXIT_VERDICT if res.reached else EXIT_OK


def cmd_replay(path: str, learner: Optional[str] = None) -> int:
    header, prefix = load_replay(path)
    fam = load_family(header.get("family", ""))
    name = learner or header.get("learner")
    if not name:
        raise ValueError(f"{path}: no learner in header; pass --learner")
    if fam.signature is not None and fam.signature != prefix.signature:
        raise ValueError(f"{path}: signature {prefix.signature.describe()} does not fit {fam.name}")
    got = replay_changes(name, fam, prefix)
    recorded = header.get("mind_changes")
    report = {"path": str(path), "learner": name, "steps": len(prefix), "mind_changes": got,
              "recorded": None if recorded is None else int(recorded)}
    sys.stdout.write(canonical_json(report))
    return EXIT_OK if recorded is not None and int(recorded) == got else EXIT_VERDICT


# ----------------------------
# bf
# ----------------------------

def cmd_bf(family: Optional[str], atoms: Optional[str]) -> int:
    if atoms:
        members = [BADescriptor(parse_count(a)) for a in atoms.split(",") if a.strip()]
        title = "boolean algebras"
    elif family:
        fam = load_family(family)
        members = [from_family_descriptor(d) for d in fam.descriptors]
        title = fam.name
    else:
        raise ValueError("bf needs --family or --atoms")
    matrix = le2_matrix(members)
    print(f"{title}: row <=_2 column (Y yes, . no, ? undecided)")
    for i, (m, line) in enumerate(zip(members, matrix)):
        print(f"  [{i}] {' '.join(cell_text(v) for v in line)}  {m}")
    witness = obstruction_witness(members)
    if witness is None:
        print("no obstruction witness")
        return EXIT_OK
    i, j = witness
    print(f"witness ({i}, {j}): {members[j]} <=_2 {members[i]}")
    print(f"  every Sigma_2 sentence true in [{i}] holds in [{j}]: not learnable from informant")
    return EXIT_VERDICT


# ----------------------------
# embed
# ----------------------------

def cmd_embed(cfg: ExperimentConfig, oracle_text: Optional[str] = None) -> int:
    fam, learner, horizon = _resolve(cfg)
    k = cfg.member or 0
    _members(cfg, fam)
    if oracle_text:
        oracle = IndexOracle.parse(oracle_text)
    elif fam.enumeration is not None:
        oracle = IndexOracle.from_enumeration(fam.enumeration, fam)
    else:
        raise ValueError(f"{fam.name} has no enumeration; pass --oracle")
    stride = cfg.stride or max(1, horizon // cfg.stages)
    l = make_learner(learner, fam)
    stages = embed_run(l, shuffled_source(fam.members[k], cfg.seed), oracle, cfg.stages, cfg.predicates, stride)
    shape = limit_shape(stages)
    xi = [xi_holds(stages, i) for i in range(cfg.predicates)]
    ok = shape == k and xi[k] and sum(xi) == 1
    report = {
        "family": fam.name,
        "member": k,
        "learner": learner,
        "stages": cfg.stages,
        "stride": stride,
        "limit_shape": shape,
        "xi": xi,
        "final_conjecture": str(stages[-1].conjecture),
        "correct": ok,
        "config_hash": config_hash(cfg.hashed_fields()),
    }
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "final_stage.txt").write_text(stages[-1].to_structure().dump(), encoding="utf-8")
        (out / "embed.json").write_text(canonical_json(report), encoding="utf-8")
    sys.stdout.write(canonical_json(report))
    return EXIT_OK if ok else EXIT_VERDICT


# ----------------------------
# catalog
# ----------------------------

def cmd_catalog_list() -> int:
    for name in builtin_families():
        fam = load_family(name)
        print(f"{name:16s} {fam.kind:16s} {len(fam.descriptors)} members  learner={fam.spec.learner or '-'}")
        print(f"{'':16s} {fam.layout()}")
    return EXIT_OK


def cmd_catalog_show(family: str, stage: Optional[int] = None) -> int:
    fam = load_family(family)
    print(f"{fam.name} ({fam.kind}): {fam.spec.description.strip()}")
    print(f"  {fam.layout()}")
    for k, d in enumerate(fam.descriptors):
        m = fam.spec.members[k]
        extra = [f"{f}={count_text(getattr(m, f))}" for f in ("atoms", "t0", "t2", "sup_block", "sup_count")
                 if getattr(m, f) is not None]
        print(f"  [{k}] {d} {' '.join(extra)}".rstrip())
        if stage is not None and fam.presentable:
            for line in fam.members[k].stage(stage).dump().splitlines():
                print(f"      {line}")
    return EXIT_OK


# ----------------------------
# parser
# ----------------------------

def _experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML file with ExperimentConfig fields")
    p.add_argument("--family", help="builtin family name or path to a family spec")
    p.add_argument("--learner")
    p.add_argument("--member", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--window", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="inflearn", description="Learning structures from informant, at desk scale")
    ap.add_argument("--log-level", help=f"DEBUG, INFO, WARNING (default from {ENV_LOG_LEVEL})")
    ap.add_argument("--version", action="version", version=f"inflearn {package_version()}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a learner over seeded informants for every family member")
    _experiment_flags(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--n-jobs", dest="n_jobs", type=int)
    p.add_argument("--steps-csv", dest="steps_csv", action="store_true")
    p.add_argument("--db", dest="db_url", help="SQLAlchemy url (default from INFLEARN_DB_URL)")

    p = sub.add_parser("adversary", help="force mind changes with searched extensions")
    _experiment_flags(p)
    p.add_argument("--target", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--no-warmup", dest="no_warmup", action="store_true",
                   help="start from the empty prefix instead of the canonical convergence point")

    p = sub.add_parser("bf", help="<=_2 matrix and obstruction witness")
    p.add_argument("--family")
    p.add_argument("--atoms", help="comma-separated atom counts, e.g. 2,5,inf")

    p = sub.add_parser("embed", help="simulate the embedding into the least-element class")
    _experiment_flags(p)
    p.add_argument("--stages", type=int)
    p.add_argument("--predicates", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--oracle", help="finite oracle table, e.g. '1:0,2:1'")

    p = sub.add_parser("catalog", help="shipped families")
    csub = p.add_subparsers(dest="action", required=True)
    csub.add_parser("list")
    show = csub.add_parser("show")
    show.add_argument("family")
    show.add_argument("--stage", type=int)

    p = sub.add_parser("replay", help="re-run a learner on a saved prefix")
    p.add_argument("path")
    p.add_argument("--learner")
    return ap


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "simulate":
        return cmd_simulate(load_config(args))
    if args.command == "adversary":
        return cmd_adversary(load_config(args), warmup=not args.no_warmup)
    if args.command == "bf":
        return cmd_bf(args.family, args.atoms)
    if args.command == "embed":
        return cmd_embed(load_config(args), args.oracle)
    if args.command == "catalog":
        if args.action == "list":
            return cmd_catalog_list()
        return cmd_catalog_show(args.family, args.stage)
    if args.command == "replay":
        return cmd_replay(args.path, args.learner)
    raise ValueError(f"unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return dispatch(args)
    except (ValueError, OSError, ValidationError) as e:
        print(f"inflearn: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
