"""Run ledger."""

from .models import RunRecord, get_session, init_db, recent_runs, record_run

__all__ = ["RunRecord", "get_session", "init_db", "recent_runs", "record_run"]
