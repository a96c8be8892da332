import math
import sys
from functools import lru_cache

import pytest

from sarrus_dpm.builder import build_mechanism

PLATONIC = ("tetrahedron", "cube", "dodecahedron")
DEG = math.pi / 180.0


@lru_cache(maxsize=None)
def built(kind: str):
    return build_mechanism(kind)


@pytest.fixture(params=PLATONIC)
def platonic(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
