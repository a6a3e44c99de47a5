"""
Shared fixtures for the root-level test scripts.
"""
import sys
from pathlib import Path

import pytest

# Add the src directory to Python path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from ultracenter.core import UltrametricSpace  # noqa: E402

X4_ROWS = [
    ["0", "3", "1", "3"],
    ["3", "0", "3", "2"],
    ["1", "3", "0", "3"],
    ["3", "2", "3", "0"],
]

Y4_ROWS = [
    ["0", "2", "3", "3"],
    ["2", "0", "3", "3"],
    ["3", "3", "0", "2"],
    ["3", "3", "2", "0"],
]


@pytest.fixture
def x4() -> UltrametricSpace:
    """Four points a, b, c, d with d(a,c)=1, d(b,d)=2 and every other pair at 3."""
    return UltrametricSpace.from_rows(["a", "b", "c", "d"], X4_ROWS)


@pytest.fixture
def y4() -> UltrametricSpace:
    """Two pairs at distance 2, pairs 3 apart."""
    return UltrametricSpace.from_rows(["a", "b", "c", "d"], Y4_ROWS)
