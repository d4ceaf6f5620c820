"""Checkpoints: one JSON document per network and optimizer plus a manifest."""

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.losses import GauVariant
from src.neuralcore import (
    NetworkFormatError,
    adam_from_dict,
    adam_to_dict,
    mlp_from_dict,
    mlp_to_dict,
)
from src.neuralcore.serialization import read_json, write_json
from src.schemas import SCHEMA_VERSION, TrainConfig
from src.synthdata import Rng
from src.training.errors import CheckpointError
from src.training.state import TrainerState
from src.utils.logging import get_logger

logger = get_logger(__name__)

MANIFEST_NAME = "manifest.json"


class NetworkFiles(BaseModel):
    model_config = ConfigDict(extra="forbid")

    network: str = Field(min_length=1)
    optimizer: str = Field(min_length=1)


class CheckpointManifest(BaseModel):
    """Contents of manifest.json."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    step: int = Field(ge=0)
    config: TrainConfig
    rng_state: dict[str, dict[str, Any]]
    networks: dict[str, NetworkFiles]

    @model_validator(mode="after")
    def check_contents(self) -> "CheckpointManifest":
        if set(self.rng_state) != {"train", "data"}:
            raise ValueError("rng_state must hold the train and data streams")
        expected = {"g", "f", "d"}
        if self.config.gau_variant is GauVariant.ZDISC:
            expected.add("dz")
        if set(self.networks) != expected:
            raise ValueError(
                f"manifest lists networks {sorted(self.networks)}, expected {sorted(expected)}"
            )
        return self


def save_checkpoint(state: TrainerState, cfg: TrainConfig, directory: str | Path) -> Path:
    """Write ``state`` under ``directory``; returns the manifest path."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        files = {}
        for name, net in state.networks().items():
            entry = NetworkFiles(network=f"{name}.json", optimizer=f"{name}.adam.json")
            write_json(directory / entry.network, mlp_to_dict(net))
            write_json(directory / entry.optimizer, adam_to_dict(state.adam[name]))
            files[name] = entry
        manifest = CheckpointManifest(
            step=state.step,
            config=cfg,
            rng_state={"train": state.rng.get_state(), "data": state.data_rng.get_state()},
            networks=files,
        )
        path = directory / MANIFEST_NAME
        write_json(path, manifest.model_dump(mode="json"))
    except (OSError, ValueError) as e:
        raise CheckpointError(f"cannot write checkpoint to {directory}: {e}") from e

    logger.debug("Checkpoint saved", path=str(path), step=state.step)
    return path


def load_checkpoint(manifest_path: str | Path) -> tuple[TrainerState, TrainConfig]:
    """Rebuild the trainer state and its config from a manifest."""
    manifest_path = Path(manifest_path)
    try:
        manifest = CheckpointManifest.model_validate(read_json(manifest_path))
        nets = {}
        for name, entry in manifest.networks.items():
            net = mlp_from_dict(read_json(manifest_path.parent / entry.network))
            opt = adam_from_dict(read_json(manifest_path.parent / entry.optimizer), net)
            nets[name] = (net, opt)
        rng = Rng.from_state(manifest.config.seed, manifest.rng_state["train"])
        data_rng = Rng.from_state(manifest.config.seed, manifest.rng_state["data"])
    except (NetworkFormatError, ValidationError) as e:
        raise CheckpointError(f"corrupt checkpoint {manifest_path}: {e}") from e
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"invalid generator state in {manifest_path}: {e}") from e

    cfg = manifest.config
    shapes = {
        "g": (cfg.latent_dim, cfg.target_dim),
        "f": (cfg.target_dim, cfg.latent_dim),
        "d": (cfg.target_dim, 1),
        "dz": (cfg.latent_dim, 1),
    }
    for name, (net, _) in nets.items():
        if (net.in_features, net.out_features) != shapes[name]:
            raise CheckpointError(
                f"network {name} maps {net.in_features}->{net.out_features}, "
                f"config expects {shapes[name][0]}->{shapes[name][1]}"
            )

    state = TrainerState(
        g=nets["g"][0],
        f=nets["f"][0],
        d=nets["d"][0],
        dz=nets["dz"][0] if "dz" in nets else None,
        rng=rng,
        data_rng=data_rng,
        adam={name: opt for name, (_, opt) in nets.items()},
        step=manifest.step,
    )
    logger.debug("Checkpoint loaded", path=str(manifest_path), step=state.step)
    return state, cfg
