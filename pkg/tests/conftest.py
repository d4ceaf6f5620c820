"""Test configuration and fixtures."""

import os

os.environ.setdefault("IIDGAN_ENVIRONMENT", "test")
os.environ.setdefault("IIDGAN_LOG_LEVEL", "WARNING")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from src.losses import GauVariant  # noqa: E402
from src.neuralcore import Activation, mlp_new  # noqa: E402
from src.schemas import ExperimentConfig, TrainConfig  # noqa: E402
from src.synthdata import Rng  # noqa: E402
from src.utils.logging import configure_logging  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def logging_to_stderr():
    """Route library log calls to stderr even when no command configured logging."""
    configure_logging()


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow", action="store_true", default=False, help="run full-length training tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    """Seeded random source."""
    return Rng(1234)


@pytest.fixture
def np_rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_net(rng):
    """A 3-4-2 network with a leaky hidden layer and tanh output."""
    return mlp_new([3, 4, 2], [Activation.LEAKY_RELU, Activation.TANH], rng)


@pytest.fixture
def tiny_config():
    """Small networks and few steps for fast end-to-end runs."""
    return TrainConfig(
        hidden_sizes=[8, 8],
        batch_size=16,
        steps=6,
        eval_every=3,
        gau_variant=GauVariant.W2_MD,
        seed=3,
    )


@pytest.fixture
def experiment_config(tmp_path):
    return ExperimentConfig(
        hidden_sizes=[8, 8],
        batch_size=16,
        steps=4,
        eval_every=2,
        seeds=[0, 1],
        n_gen=400,
        n_real=50,
        output_dir=str(tmp_path / "run"),
    )


@pytest.fixture
def write_config(tmp_path):
    """Write an ExperimentConfig (or a raw string) to a JSON file and return its path."""

    def _write(config: ExperimentConfig | str, name: str = "config.json") -> str:
        path = tmp_path / name
        text = config if isinstance(config, str) else config.model_dump_json(exclude_none=True)
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write
