# tests/test_storage.py
import pytest

from inflearn.app.schema import TrialRow
from inflearn.app.storage import ENV_DB_URL, db_url, get_trial, record_trial_or_get, trial_summaries


def _row(member=0, seed=0, correct=True, changes=1, chash="abc123"):
    return TrialRow(
        family="two-graphs",
        learner="two-graph",
        member=member,
        member_label="G1",
        expected="1",
        seed=seed,
        source=f"shuffled:G1:seed={seed}",
        horizon=120,
        final_conjecture="1",
        convergence_step=10 + seed,
        mind_changes=changes,
        settled=True,
        correct=correct,
        config_hash=chash,
        version="0.3.0",
    )


@pytest.fixture
def url(tmp_path):
    return f"sqlite:///{tmp_path / 'trials.db'}"


def test_insert_or_get(url):
    tid, created = record_trial_or_get(url, _row())
    assert created
    again, created_again = record_trial_or_get(url, _row())
    assert again == tid
    assert not created_again
    other, created_other = record_trial_or_get(url, _row(seed=1))
    assert created_other
    assert other != tid


def test_rows_read_back(url):
    row = _row(member=1, seed=3)
    tid, _ = record_trial_or_get(url, row)
    assert get_trial(url, tid) == row
    assert get_trial(url, "missing") is None


def test_summaries(url):
    record_trial_or_get(url, _row(seed=0, changes=1))
    record_trial_or_get(url, _row(seed=1, changes=3, correct=False))
    [summary] = trial_summaries(url)
    assert summary["family"] == "two-graphs"
    assert summary["trials"] == 2
    assert summary["correct"] == 1
    assert summary["mean_mind_changes"] == pytest.approx(2.0)
    assert summary["max_convergence_step"] == 11


def test_db_url_resolution(monkeypatch):
    monkeypatch.delenv(ENV_DB_URL, raising=False)
    assert db_url() is None
    monkeypatch.setenv(ENV_DB_URL, "sqlite://")
    assert db_url() == "sqlite://"
    assert db_url("sqlite:///x.db") == "sqlite:///x.db"
