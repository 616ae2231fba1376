import os
from contextlib import contextmanager
from datetime import datetime
from functools import lru_cache
from typing import Iterator, Optional

from sqlalchemy.engine import Engine
from sqlmodel import Session, SQLModel, create_engine

from .errors import describe_error
from .logger import get_logger
from .models import Run
from .schemas import Settings

logger = get_logger(__name__)

DATABASE_FILE = "randtext.db"


def ledger_path(settings: Settings) -> str:
    if settings.ledger.path:
        return settings.ledger.path
    if settings.storage.type == "local":
        return os.path.join(settings.global_.output_dir, DATABASE_FILE)
    return os.path.join("data", DATABASE_FILE)


@lru_cache(maxsize=None)
def get_engine(database_path: str) -> Engine:
    parent = os.path.dirname(database_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    engine = create_engine(f"sqlite:///{database_path}")
    SQLModel.metadata.create_all(engine)
    return engine


class RunLedger:
    """Records one Run row per command invocation; a disabled ledger records nothing."""

    def __init__(self, database_path: Optional[str]):
        self.engine = get_engine(database_path) if database_path else None

    @classmethod
    def from_settings(cls, settings: Settings) -> "RunLedger":
        if not settings.ledger.enabled:
            return cls(None)
        return cls(ledger_path(settings))

    @contextmanager
    def record(self, command: str, **fields) -> Iterator[Run]:
        run = Run(command=command, **fields)
        if self.engine is None:
            yield run
            run.status = "completed"
            return

        with Session(self.engine) as session:
            session.add(run)
            session.commit()
            session.refresh(run)
            logger.debug(f"Ledger run {run.id} started for command '{command}'.")
            try:
                yield run
                run.status = "completed"
            except Exception as e:
                run.status = "failed"
                run.error_summary = describe_error(e).summary[:500]
                raise
            finally:
                run.finished_at = datetime.utcnow()
                session.add(run)
                session.commit()
                logger.info(f"Ledger run {run.id} finished. Status: {run.status}.")
