"""Unit tests for ifslab.database.models module."""

from datetime import datetime, timedelta

from ifslab.database.models import RunRecord, default_db_path, get_session, record_run, recent_runs


class TestRunRecord:
    """Tests for the run ledger."""

    def test_record_and_read_back(self):
        """Test that a recorded run is stored with its files."""
        record_run(
            "validate", 0, spec_hash="ab" * 32, master_seed=7, output_format="json",
            out_dir="results", verdict="ok", output_files=["results/validate.json"],
        )
        session = get_session()
        try:
            stored = session.query(RunRecord).filter_by(subcommand="validate").one()
            assert stored.exit_code == 0
            assert stored.files == ["results/validate.json"]
            assert stored.master_seed == "7"
        finally:
            session.close()

    def test_full_width_seed(self):
        """Test that a u64 seed survives as text."""
        record = record_run("simulate", 0, master_seed=2**64 - 1)
        assert record.master_seed == str(2**64 - 1)

    def test_defaults(self):
        """Test optional columns."""
        record = record_run("sync", 2)
        assert record.workers == 1
        assert record.files == []
        assert record.spec_hash is None
        assert record.started_at is not None

    def test_recent_runs_newest_first(self):
        """Test ordering and the limit."""
        start = datetime(2026, 1, 1)
        for i, name in enumerate(["validate", "simulate", "dual"]):
            record_run(name, 0, started_at=start + timedelta(seconds=i))
        runs = recent_runs()
        assert [r.subcommand for r in runs] == ["dual", "simulate", "validate"]
        assert len(recent_runs(limit=2)) == 2

    def test_to_dict(self):
        """Test the JSON form used by the history command."""
        record = record_run("couple", 1, master_seed=3, duration_s=0.5, output_files=["a.json"])
        data = record.to_dict()
        assert data["subcommand"] == "couple"
        assert data["exit_code"] == 1
        assert data["master_seed"] == "3"
        assert data["files"] == ["a.json"]
        assert data["duration_s"] == 0.5
        assert isinstance(data["started_at"], str)

    def test_db_path_from_environment(self, isolated_database):
        """Test the IFSLAB_DB override."""
        assert default_db_path() == isolated_database
