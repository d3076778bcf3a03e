"""SQLAlchemy models for the local run ledger."""

import json
import os
from datetime import datetime
from pathlib import Path
from typing import Optional, Sequence

from sqlalchemy import Column, DateTime, Float, Integer, String, Text, create_engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

Base = declarative_base()

DB_ENV_VAR = "IFSLAB_DB"


class RunRecord(Base):
    """One invocation of an ifslab subcommand."""
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    subcommand = Column(String, nullable=False)
    spec_hash = Column(String)  # empty when the config failed to load
    master_seed = Column(String)  # u64 does not fit a signed SQLite integer
    workers = Column(Integer, default=1)
    output_format = Column(String)
    out_dir = Column(String)
    exit_code = Column(Integer, nullable=False)
    verdict = Column(Text)
    output_files = Column(Text)  # JSON list
    started_at = Column(DateTime, default=datetime.utcnow)
    duration_s = Column(Float)

    @property
    def files(self) -> list[str]:
        return json.loads(self.output_files) if self.output_files else []

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "subcommand": self.subcommand,
            "spec_hash": self.spec_hash,
            "master_seed": self.master_seed,
            "workers": self.workers,
            "format": self.output_format,
            "out_dir": self.out_dir,
            "exit_code": self.exit_code,
            "verdict": self.verdict,
            "files": self.files,
            "started_at": self.started_at.isoformat() if self.started_at else None,
            "duration_s": self.duration_s,
        }


# Database setup
_engine = None
_SessionLocal = None


def default_db_path() -> Path:
    override = os.environ.get(DB_ENV_VAR)
    if override:
        return Path(override).expanduser()
    return Path.home() / ".ifslab" / "runs.db"


def init_db(db_path: Optional[Path] = None) -> None:
    """Initialize the database."""
    global _engine, _SessionLocal

    if db_path is None:
        db_path = default_db_path()

    db_path = Path(db_path)
    db_path.parent.mkdir(parents=True, exist_ok=True)

    _engine = create_engine(f"sqlite:///{db_path}", echo=False)
    Base.metadata.create_all(_engine)
    _SessionLocal = sessionmaker(bind=_engine)


def get_session() -> Session:
    """Get a database session."""
    global _SessionLocal

    if _SessionLocal is None:
        init_db()

    return _SessionLocal()


def record_run(
    subcommand: str,
    exit_code: int,
    *,
    spec_hash: Optional[str] = None,
    master_seed: Optional[int] = None,
    workers: int = 1,
    output_format: Optional[str] = None,
    out_dir: Optional[str] = None,
    verdict: Optional[str] = None,
    output_files: Sequence[str] = (),
    started_at: Optional[datetime] = None,
    duration_s: Optional[float] = None,
) -> RunRecord:
    session = get_session()
    try:
        record = RunRecord(
            subcommand=subcommand,
            spec_hash=spec_hash,
            master_seed=None if master_seed is None else str(master_seed),
            workers=workers,
            output_format=output_format,
            out_dir=out_dir,
            exit_code=exit_code,
            verdict=verdict,
            output_files=json.dumps(list(output_files)),
            started_at=started_at or datetime.utcnow(),
            duration_s=duration_s,
        )
        session.add(record)
        session.commit()
        session.refresh(record)
        session.expunge(record)
        return record
    finally:
        session.close()


def recent_runs(limit: int = 20) -> list[RunRecord]:
    session = get_session()
    try:
        runs = session.query(RunRecord).order_by(RunRecord.id.desc()).limit(limit).all()
        for r in runs:
            session.expunge(r)
        return runs
    finally:
        session.close()
