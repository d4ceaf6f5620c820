"""Mutable state of one IID-GAN training run."""

from dataclasses import dataclass, field

from src.neuralcore import AdamState, Mlp
from src.synthdata import Rng


@dataclass
class TrainerState:
    """Generator G, inverse F, discriminator D and the optional latent discriminator D_z.

    ``adam`` is keyed by network name. ``rng`` feeds the latent draws of
    train_step; ``data_rng`` feeds the real batches sampled by train, so runs
    that differ only in their Gaussian term see the same data.
    """

    g: Mlp
    f: Mlp
    d: Mlp
    rng: Rng
    data_rng: Rng
    dz: Mlp | None = None
    adam: dict[str, AdamState] = field(default_factory=dict)
    step: int = 0

    def networks(self) -> dict[str, Mlp]:
        nets = {"g": self.g, "f": self.f, "d": self.d}
        if self.dz is not None:
            nets["dz"] = self.dz
        return nets
