"""Pytest fixtures for ifslab tests."""

import json
import logging
import math
import shutil
import tempfile
from pathlib import Path
from typing import Generator

import pytest

import ifslab.database.models as models_module
from ifslab.engine import IFS
from ifslab.engine.observables import Harmonic
from ifslab.engine.streams import set_workers
from ifslab.geometry import Arnold, PiecewiseLinear, Rotation
from ifslab.log import LOGGER_NAME

REPO_ROOT = Path(__file__).resolve().parent.parent
GOLDEN = math.sqrt(2) - 1


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture(autouse=True)
def isolated_database(temp_dir, monkeypatch):
    """Point the run ledger at a temp file for every test."""
    db_path = temp_dir / "test_runs.db"
    monkeypatch.setenv("IFSLAB_DB", str(db_path))

    models_module._engine = None
    models_module._SessionLocal = None

    from ifslab.database.models import init_db
    init_db(db_path)

    yield db_path

    models_module._engine = None
    models_module._SessionLocal = None


@pytest.fixture(autouse=True)
def single_worker():
    """Tests run in-process unless they set workers themselves."""
    set_workers(1)
    yield
    set_workers(1)


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers the CLI attached to the package logger."""
    yield
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)


@pytest.fixture
def demo_ifs() -> IFS:
    """Two Arnold maps with equal weights: minimal, with a contracting arc."""
    return IFS((Arnold(0.0, 0.7), Arnold(GOLDEN, 0.25)), (0.5, 0.5))


@pytest.fixture
def rotation_ifs() -> IFS:
    """Two irrational rotations: isometries, Lebesgue measure invariant."""
    return IFS((Rotation(GOLDEN), Rotation(math.sqrt(3) - 1)), (0.5, 0.5))


@pytest.fixture
def half_turn_ifs() -> IFS:
    """R_{1/2} and the identity, equal weights."""
    return IFS((Rotation(0.5), Rotation(0.0)), (0.5, 0.5))


@pytest.fixture
def pwl_map() -> PiecewiseLinear:
    return PiecewiseLinear(((0.0, 0.0), (0.5, 0.25)))


@pytest.fixture
def cosine() -> Harmonic:
    """f(x) = cos(2 pi x)."""
    return Harmonic(a=(1.0,))


@pytest.fixture
def small_config(temp_dir: Path) -> Path:
    """Demo system with every section cut down to run in seconds."""
    data = {
        "maps": [
            {"type": "arnold", "theta": 0.0, "eps": 0.7},
            {"type": "arnold", "theta": GOLDEN, "eps": 0.25},
        ],
        "probs": [0.5, 0.5],
        "observables": [{"type": "harmonic", "a": [1.0]}],
        "simulate": {"n": 50},
        "stationary": {"burn_in": 200, "count": 2000},
        "dual": {"n": 6, "samples": 500},
        "eprop": {"deltas": [0.1, 0.01], "n_max": 6},
        "sync": {"arc_count": 8, "depth": 16, "trials": 200, "m_max": 8, "x_grid": 16,
                 "stationary_count": 2000, "minimality_depth": 10},
        "stability": {"n_list": [0, 5, 20], "samples": 1000},
        "unique": {"starts": [0.0, 0.5], "n": 2000, "cesaro_n_list": [1, 10], "cesaro_samples": 200,
                   "stationary_count": 2000},
        "mw": {"n_list": [1, 2, 4, 6, 8], "x_count": 8, "stationary_count": 2000},
        "clt": {"n_list": [50], "replicates": 200, "burn_in": 100, "stationary_count": 2000},
        "couple": {"n": 20, "replicates": 100, "n_list": [5, 10, 20]},
        "chi": {"inverse_count": 2000, "burn_in": 100, "pairs": 10, "probes": 3},
    }
    path = temp_dir / "small.json"
    path.write_text(json.dumps(data))
    return path


@pytest.fixture
def rotations_config(temp_dir: Path) -> Path:
    data = json.loads((REPO_ROOT / "configs" / "rotations.json").read_text())
    data["sync"] = {"arc_count": 4, "depth": 16, "trials": 200}
    path = temp_dir / "rotations.json"
    path.write_text(json.dumps(data))
    return path


@pytest.fixture
def demo_config_path() -> Path:
    return REPO_ROOT / "configs" / "demo.json"
