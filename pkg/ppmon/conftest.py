import builtins
from unittest.mock import patch

import pytest

from ppmon.log.tests._utils import outcome_log, recovery_log
from ppmon.pipeline import TrainingConfig, train


@pytest.fixture
def rich_not_installed():
    # patch import so that it raises an ImportError when trying to import
    # rich. This works because rich is only imported lazily.
    orig_import = builtins.__import__

    def mock_import(name, *args, **kwargs):
        if name == "rich" or name.startswith("rich."):
            raise ImportError
        return orig_import(name, *args, **kwargs)

    with patch("builtins.__import__", side_effect=mock_import):
        yield


@pytest.fixture
def recovery():
    return recovery_log()


@pytest.fixture(scope="session")
def small_outcome_log():
    return outcome_log(n_traces=80, seed=3)


@pytest.fixture(scope="session")
def outcome_model(small_outcome_log):
    # a single cluster whose tree splits on risk; read-only, shared by the
    # monitor, evaluation and cli tests
    config = TrainingConfig.from_instance(
        "mbased_dt", formula='F("ok")', k_min=1, k_max=1
    )
    return train(small_outcome_log, config)
