# tests/test_schema.py
import math

import pytest
from pydantic import ValidationError

from inflearn.app.schema import ExperimentConfig, FamilySpec, SimulationSummary, count_text
from inflearn.app.utils import canonical_json, config_hash, parse_count


@pytest.mark.parametrize("raw, value", [
    (3, 3), ("7", 7), ("inf", math.inf), ("Infinity", math.inf), ("∞", math.inf), (2.0, 2),
    (math.inf, math.inf),
])
def test_parse_count(raw, value):
    assert parse_count(raw) == value


@pytest.mark.parametrize("raw", [-1, "x", 1.5, True, None])
def test_parse_count_rejects(raw):
    with pytest.raises(ValueError):
        parse_count(raw)


def test_count_text():
    assert count_text(math.inf) == "inf"
    assert count_text(4) == "4"
    assert count_text(None) == "-"


def test_config_hash_ignores_output_fields():
    a = ExperimentConfig(family="two-graphs", out="x", steps_csv=True, n_jobs=4)
    b = ExperimentConfig(family="two-graphs")
    assert config_hash(a.hashed_fields()) == config_hash(b.hashed_fields())
    assert config_hash(b.hashed_fields()) != config_hash(ExperimentConfig(family="orders").hashed_fields())
    assert len(config_hash(b.hashed_fields())) == 16


def test_experiment_config_validation():
    assert ExperimentConfig(learner=" Sigma2 ").learner == "sigma2"
    for bad in ({"trials": 0}, {"horizon": 0}, {"learner": "oracle"}, {"n_jobs": 0}, {"seed": -1}):
        with pytest.raises(ValidationError):
            ExperimentConfig(**bad)
    assert ExperimentConfig(unknown_key=1).family == "orders"


def test_family_spec_validation():
    spec = FamilySpec(name="f", kind="boolean-algebra", members=[{"atoms": "inf"}, {"atoms": 2}])
    assert spec.members[0].atoms == math.inf
    with pytest.raises(ValidationError):
        FamilySpec(name="f", kind="graph", members=[])
    with pytest.raises(ValidationError):
        FamilySpec(name="f", kind="tree", members=[{"cycle": 1}])
    with pytest.raises(ValidationError):
        FamilySpec(name="f", kind="graph", members=[{"cycle": -1}])


def test_summary_consistency():
    fields = dict(family="f", learner="l", horizon=1, trials_per_member=1, seed=0,
                  config_hash="h", version="v", all_correct=False)
    with pytest.raises(ValidationError):
        SimulationSummary(total=1, correct=2, **fields)


def test_canonical_json_is_sorted():
    assert canonical_json({"b": 1, "a": math.inf}) == '{\n  "a": "inf",\n  "b": 1\n}\n'
