import uuid
from datetime import datetime
from typing import Optional

from sqlmodel import Field, SQLModel


class Run(SQLModel, table=True):
    id: str = Field(default_factory=lambda: f"run_{uuid.uuid4().hex[:6]}", primary_key=True)
    command: str = Field(index=True)
    status: str = Field(default="running", index=True)
    started_at: datetime = Field(default_factory=datetime.utcnow)
    finished_at: Optional[datetime] = None
    params: Optional[str] = None
    n_symbols: Optional[int] = None
    seed: Optional[int] = None
    prng_version: Optional[str] = None
    output_location: Optional[str] = None
    checksum: Optional[str] = None
    error_summary: Optional[str] = None
