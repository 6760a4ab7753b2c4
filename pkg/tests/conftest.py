import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from exspacings._kernels import warmup


@pytest.fixture(scope="session", autouse=True)
def _jit_warmup():
    """Compile the sampling kernel once so timed tests measure runtime, not
    jit compilation."""
    warmup()
