import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import make_tree, named_tree  # noqa: E402


@pytest.fixture
def tree():
    return make_tree()


@pytest.fixture
def oecd_tree():
    return named_tree()
