"""Dense float64 networks with exact backpropagation and Adam."""

from src.neuralcore.errors import (
    MissingForwardError,
    NetworkFormatError,
    NeuralCoreError,
    NonFiniteError,
    ShapeMismatchError,
)
from src.neuralcore.layers import (
    Activation,
    AffineLayer,
    Mlp,
    RandomSource,
    backward,
    forward,
    mlp_new,
)
from src.neuralcore.matrix import Matrix, Vector, as_matrix, ensure_finite
from src.neuralcore.optim import AdamState, LrSchedule, adam_step, scheduled_learning_rate
from src.neuralcore.serialization import (
    adam_from_dict,
    adam_to_dict,
    load_mlp,
    mlp_from_dict,
    mlp_to_dict,
    save_mlp,
)
