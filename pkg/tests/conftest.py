from __future__ import annotations

import pytest

from semcast.config import RunConfig
from semcast.dataset import TraceDataset


@pytest.fixture(scope="session")
def dataset() -> TraceDataset:
    return TraceDataset.bundled()


@pytest.fixture(scope="session")
def config() -> RunConfig:
    return RunConfig()
