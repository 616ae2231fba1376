import json
import os
import sys
from typing import Optional

from pydantic import BaseModel

from ..logger import get_logger
from ..schemas import StatsDocument
from ..storage import StorageProvider

logger = get_logger(__name__)


def emit(text: str) -> None:
    """Writes a report to standard output; logs go to standard error."""
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    sys.stdout.flush()


def to_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2, by_alias=True) + "\n"


def write_text(path: str, text: str) -> str:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path


def load_document(path: str) -> StatsDocument:
    with open(path, encoding="utf-8") as f:
        return StatsDocument.model_validate(json.load(f))


def publish(storage: StorageProvider, staged_path: str, name: Optional[str] = None) -> str:
    """Hands a staged file to the storage provider and returns where it ended up."""
    location = storage.save(staged_path, name or os.path.basename(staged_path))
    logger.info(f"Wrote {location}")
    return location
