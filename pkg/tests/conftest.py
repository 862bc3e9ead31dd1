import os

import pytest
from hypothesis import HealthCheck, settings

from gmab.engine import NATIVE_AVAILABLE

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

BACKENDS = ["python"] + (["native"] if NATIVE_AVAILABLE else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


class ScriptedStream:
    """Stand-in for RandomStream that replays fixed values per method."""

    def __init__(self, uniforms=(), normals=(), integers=()):
        self.uniforms = list(uniforms)
        self.normals = list(normals)
        self.ints = list(integers)

    def random(self):
        return self.uniforms.pop(0)

    def normal(self):
        return self.normals.pop(0)

    def integers(self, n):
        v = self.ints.pop(0)
        assert 0 <= v < n
        return v

    def shuffle(self, items):
        pass
