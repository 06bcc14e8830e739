import os
import sys
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

# CLI runs stay in-process unless the caller asks otherwise
os.environ.setdefault("CAYLEY_WORKERS", "1")

from src.enumeration.point_counter import PointCounter  # noqa: E402
from src.geometry.cayley_surface import CayleyPoint  # noqa: E402
from src.orchestration.cayley_pipeline import CayleyPipeline  # noqa: E402


@pytest.fixture
def counter():
    return PointCounter(oracle_limit=300, torsor_limit=100000, workers=1)


@pytest.fixture
def pipeline():
    return CayleyPipeline("test", workers=1, oracle_limit=300, torsor_limit=100000, empirical_budget=10 ** 6)


@pytest.fixture
def worked_point():
    """(2, 3, 6, -1) with its torsor coordinates."""
    return CayleyPoint(2, 3, 6, -1), (-1, -1, -1, 1), (1, 2, 1, 3, 1, 1)
