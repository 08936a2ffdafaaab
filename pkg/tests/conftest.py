import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stub_backend import StubBackend


@pytest.fixture
def backend():
    stub = StubBackend().start()
    yield stub
    stub.stop()
