import json

import pytest

from lelong.cache import get_cache
from tests.factories import s_eps_spec


@pytest.fixture
def s_eps_file(tmp_path):
    path = tmp_path / "s_eps.json"
    path.write_text(json.dumps(s_eps_spec()))
    return path


@pytest.fixture(autouse=True)
def _fresh_cache():
    get_cache().clear()
    yield
    get_cache().clear()
