import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).parent.parent))

from idlewatch.core import DetectorParams  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture()
def params() -> DetectorParams:
    """Default detector parameters, r=30 h=1 m=10."""
    return DetectorParams()


@pytest.fixture()
def data_dir() -> Path:
    return DATA_DIR
