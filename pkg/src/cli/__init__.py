"""Config-driven experiment runner."""

from src.cli.main import (
    EXIT_CHECKPOINT,
    EXIT_CONFIG,
    EXIT_DIVERGED,
    EXIT_OK,
    cmd_dataset,
    cmd_eval,
    cmd_iidtest,
    cmd_qq,
    cmd_sweep,
    cmd_train,
    main,
)
from src.schemas import ConfigError
