from pathlib import Path

import pytest

from kgforge.pipeline import PipelineConfig, build_state

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_config() -> PipelineConfig:
    return PipelineConfig.load(FIXTURES / "config.json")


@pytest.fixture(scope="session")
def corpus():
    """Full build over the bundled synthetic corpus, shared across tests."""
    return build_state(PipelineConfig.load(FIXTURES / "config.json"))
