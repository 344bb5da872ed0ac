import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def warm_jit():
    """Compile the accelerated kernels once so timing tests measure search work only."""
    from sigmalab.search import busy_beaver

    busy_beaver(2, 2)
