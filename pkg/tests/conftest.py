import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings


settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("fast", max_examples=25, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"
TOY = DATA / "toy"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def toy_dir() -> Path:
    return TOY


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def templates_path() -> Path:
    return DATA / "templates.json"

