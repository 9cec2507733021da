import os
import random

import pytest

SEED = int(os.environ.get("THETA_SEED", "20261019"))


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    # THETA_SEED pins hypothesis too, unless --hypothesis-seed was given
    if getattr(config.option, "hypothesis_seed", None) is None:
        config.option.hypothesis_seed = str(SEED)


@pytest.fixture
def rng():
    return random.Random(SEED)
