import sys
from pathlib import Path

import pytest

APP_DIR = Path(__file__).resolve().parent.parent

# Tests import `src...` the same way main.py does
sys.path.insert(0, str(APP_DIR))


@pytest.fixture
def problems_dir() -> Path:
    """Shipped problem documents."""
    return APP_DIR / 'problems'
