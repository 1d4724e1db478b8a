import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from giantfluct.graphproc import make_rng  # noqa: E402


@pytest.fixture
def rng():
    return make_rng(12345)
