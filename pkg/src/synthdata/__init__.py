"""Ground-truth target mixtures and the seeded source sampler."""

from src.synthdata.mixtures import (
    Dataset,
    GaussianMixture,
    grid_mixture,
    mixture_for,
    ring_mixture,
    sample_mixture,
    sample_mixture_labeled,
)
from src.synthdata.rng import Rng, box_muller, sample_standard_normal
