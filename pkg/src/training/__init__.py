"""Training loop, trainer state and checkpoints."""

from src.training.checkpoint import MANIFEST_NAME, load_checkpoint, save_checkpoint
from src.training.errors import CheckpointError, TrainingDivergedError
from src.training.state import TrainerState
from src.training.trainer import train, train_step, trainer_new, update_discriminator
