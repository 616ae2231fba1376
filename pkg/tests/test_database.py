import pytest
from sqlmodel import Session, select

from randtext.database import RunLedger, get_engine, ledger_path
from randtext.errors import EmptyCorpusError
from randtext.models import Run
from randtext.schemas import Settings


def runs(database_path):
    with Session(get_engine(database_path)) as session:
        return session.exec(select(Run)).all()


def test_completed_run_is_recorded(tmp_path):
    database_path = str(tmp_path / "ledger.db")
    with RunLedger(database_path).record("simulate") as run:
        run.seed = 7
        run.n_symbols = 1000

    [row] = runs(database_path)
    assert row.command == "simulate"
    assert row.status == "completed"
    assert row.seed == 7
    assert row.n_symbols == 1000
    assert row.finished_at is not None
    assert row.id.startswith("run_")


def test_failed_run_keeps_the_error(tmp_path):
    database_path = str(tmp_path / "ledger.db")
    with pytest.raises(EmptyCorpusError):
        with RunLedger(database_path).record("analyze"):
            raise EmptyCorpusError("no letters left after normalization")

    [row] = runs(database_path)
    assert row.status == "failed"
    assert row.error_summary.startswith("Corpus Vacío")
    assert "no letters" in row.error_summary


def test_disabled_ledger_records_nothing(tmp_path):
    settings = Settings.model_validate({"ledger": {"enabled": False}, "global": {"output_dir": str(tmp_path)}})
    ledger = RunLedger.from_settings(settings)
    assert ledger.engine is None
    with ledger.record("predict") as run:
        pass
    assert run.status == "completed"
    assert not (tmp_path / "randtext.db").exists()


def test_ledger_path(tmp_path):
    settings = Settings.model_validate({"global": {"output_dir": str(tmp_path)}})
    assert ledger_path(settings) == str(tmp_path / "randtext.db")
    settings = Settings.model_validate({"ledger": {"path": "elsewhere.db"}})
    assert ledger_path(settings) == "elsewhere.db"
