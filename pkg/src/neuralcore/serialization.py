"""JSON codec for networks and optimizer state.

Network documents look like::

    {"layers": [{"rows": 100, "cols": 2, "weight": [...row-major...],
                 "bias": [...], "activation": "relu"}, ...]}

Floats are written with ``repr`` precision so finite values round-trip exactly.
"""

import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.neuralcore.errors import NetworkFormatError
from src.neuralcore.layers import DEFAULT_LEAKY_SLOPE, Activation, AffineLayer, Mlp
from src.neuralcore.optim import AdamState


class LayerRecord(BaseModel):
    """One affine layer as stored on disk."""

    model_config = ConfigDict(extra="forbid")

    rows: int = Field(gt=0)
    cols: int = Field(gt=0)
    weight: list[float]
    bias: list[float]
    activation: Activation
    slope: float | None = None

    @model_validator(mode="after")
    def check_lengths(self) -> "LayerRecord":
        if len(self.weight) != self.rows * self.cols:
            raise ValueError(
                f"weight holds {len(self.weight)} values, expected {self.rows}x{self.cols}"
            )
        if len(self.bias) != self.rows:
            raise ValueError(f"bias holds {len(self.bias)} values, expected {self.rows}")
        if not np.all(np.isfinite(self.weight)) or not np.all(np.isfinite(self.bias)):
            raise ValueError("layer parameters must be finite")
        return self


class NetworkRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    layers: list[LayerRecord] = Field(min_length=1)


class AdamRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(gt=0)
    beta1: float = Field(ge=0, lt=1)
    beta2: float = Field(ge=0, lt=1)
    epsilon: float = Field(gt=0)
    step: int = Field(ge=0)
    first_moments: list[list[float]]
    second_moments: list[list[float]]


def mlp_to_dict(net: Mlp) -> dict[str, Any]:
    layers = []
    for layer in net.layers:
        record: dict[str, Any] = {
            "rows": layer.out_features,
            "cols": layer.in_features,
            "weight": layer.weight.reshape(-1).tolist(),
            "bias": layer.bias.tolist(),
            "activation": layer.activation.value,
        }
        if layer.activation is Activation.LEAKY_RELU:
            record["slope"] = layer.slope
        layers.append(record)
    return {"layers": layers}


def mlp_from_dict(document: Any) -> Mlp:
    try:
        record = NetworkRecord.model_validate(document)
    except ValidationError as e:
        raise NetworkFormatError(f"invalid network document: {e}") from e
    layers = [
        AffineLayer(
            np.array(layer.weight, dtype=np.float64).reshape(layer.rows, layer.cols),
            np.array(layer.bias, dtype=np.float64),
            layer.activation,
            layer.slope if layer.slope is not None else DEFAULT_LEAKY_SLOPE,
        )
        for layer in record.layers
    ]
    try:
        return Mlp(layers)
    except ValueError as e:
        raise NetworkFormatError(str(e)) from e


def adam_to_dict(state: AdamState) -> dict[str, Any]:
    return {
        "learning_rate": state.learning_rate,
        "beta1": state.beta1,
        "beta2": state.beta2,
        "epsilon": state.epsilon,
        "step": state.step,
        "first_moments": [m.reshape(-1).tolist() for m in state.first_moments],
        "second_moments": [v.reshape(-1).tolist() for v in state.second_moments],
    }


def adam_from_dict(document: Any, net: Mlp) -> AdamState:
    """Rebuild optimizer state; moment shapes are taken from ``net``."""
    try:
        record = AdamRecord.model_validate(document)
    except ValidationError as e:
        raise NetworkFormatError(f"invalid optimizer document: {e}") from e

    shapes = [p.shape for p, _ in net.parameters()]
    moments: list[list[np.ndarray]] = []
    for flat_list in (record.first_moments, record.second_moments):
        if len(flat_list) != len(shapes):
            raise NetworkFormatError(
                f"optimizer holds {len(flat_list)} tensors, network has {len(shapes)}"
            )
        tensors = []
        for flat, shape in zip(flat_list, shapes):
            arr = np.array(flat, dtype=np.float64)
            if arr.size != int(np.prod(shape)):
                raise NetworkFormatError(f"moment of size {arr.size} does not fit shape {shape}")
            tensors.append(arr.reshape(shape))
        moments.append(tensors)
    if any(np.any(v < 0) for v in moments[1]):
        raise NetworkFormatError("second moments must be non-negative")

    return AdamState(
        learning_rate=record.learning_rate,
        beta1=record.beta1,
        beta2=record.beta2,
        epsilon=record.epsilon,
        step=record.step,
        first_moments=moments[0],
        second_moments=moments[1],
    )


def write_json(path: Path, document: Any) -> None:
    path.write_text(json.dumps(document, allow_nan=False) + "\n", encoding="utf-8")


def read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise NetworkFormatError(f"cannot read {path}: {e}") from e


def save_mlp(net: Mlp, path: Path) -> None:
    write_json(path, mlp_to_dict(net))


def load_mlp(path: Path) -> Mlp:
    return mlp_from_dict(read_json(path))
