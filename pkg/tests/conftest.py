"""Pytest config."""
from pathlib import Path

from pytest import fixture

CONFIGS = Path(__file__).parent / "configs"


@fixture(scope="session")
def configs() -> Path:
    """Directory of the JSON configurations shared by the acceptance tests."""
    return CONFIGS
