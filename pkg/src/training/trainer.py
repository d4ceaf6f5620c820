"""Alternating optimisation of D, the optional D_z, and the joint G+F objective."""

from collections.abc import Callable

import numpy as np

from src.losses import (
    GauVariant,
    LossError,
    cycle_l1,
    recon_loss,
    d_loss,
    d_loss_grad,
    g_adv_loss,
    g_adv_loss_grad,
    gaussian_consistency,
    total_objective,
)
from src.neuralcore import Activation, AdamState, Mlp, NonFiniteError, adam_step, as_matrix, mlp_new
from src.schemas import StepReport, TrainConfig
from src.synthdata import Rng, sample_mixture, sample_standard_normal
from src.training.errors import TrainingDivergedError
from src.training.state import TrainerState
from src.utils.logging import get_logger

logger = get_logger(__name__)

Sink = Callable[[TrainerState], None]


def _build(sizes: list[int], head: Activation, rng: Rng, init_scale: float = 1.0) -> Mlp:
    activations = [Activation.RELU] * (len(sizes) - 2) + [head]
    return mlp_new(sizes, activations, rng, init_scale=init_scale)


def _adam(net: Mlp, cfg: TrainConfig) -> AdamState:
    return AdamState.for_network(
        net, learning_rate=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, epsilon=cfg.adam_epsilon
    )


def trainer_new(cfg: TrainConfig) -> TrainerState:
    """Fresh networks and optimizers, fully determined by ``cfg.seed``."""
    hidden = list(cfg.hidden_sizes)
    m, d = cfg.latent_dim, cfg.target_dim
    init = Rng.derive(cfg.seed, "init")

    g = _build([m, *hidden, d], Activation.IDENTITY, init, cfg.generator_init_scale)
    f = _build([d, *hidden, m], Activation.IDENTITY, init)
    disc = _build([d, *hidden, 1], Activation.SIGMOID, init)
    dz = None
    if cfg.gau_variant is GauVariant.ZDISC:
        dz = _build([m, *hidden, 1], Activation.SIGMOID, init)

    state = TrainerState(
        g=g,
        f=f,
        d=disc,
        dz=dz,
        rng=Rng.derive(cfg.seed, "train"),
        data_rng=Rng.derive(cfg.seed, "data"),
    )
    state.adam = {name: _adam(net, cfg) for name, net in state.networks().items()}
    logger.debug(
        "Trainer initialised",
        seed=cfg.seed,
        variant=cfg.gau_variant.value,
        parameters={name: net.parameter_count() for name, net in state.networks().items()},
    )
    return state


def update_discriminator(net: Mlp, opt: AdamState, real: np.ndarray, fake: np.ndarray) -> float:
    """One Adam step of ``net`` on the binary cross-entropy of real vs fake rows."""
    n_real = real.shape[0]
    probs = net.forward(np.vstack([real, fake]))[:, 0]
    p_real, p_fake = probs[:n_real], probs[n_real:]
    value = d_loss(p_real, p_fake)
    grad_real, grad_fake = d_loss_grad(p_real, p_fake)
    net.backward(np.concatenate([grad_real, grad_fake])[:, None])
    adam_step(net, opt)
    return value


def _adversarial_input_grad(disc: Mlp, inputs: np.ndarray) -> tuple[float, np.ndarray]:
    """Non-saturating generator loss through a frozen discriminator and its input gradient."""
    probs = disc.forward(inputs)[:, 0]
    value = g_adv_loss(probs)
    return value, disc.backward(g_adv_loss_grad(probs)[:, None], accumulate=False)


def _check_finite(step: int, **values: float | None) -> None:
    for name, value in values.items():
        if value is not None and not np.isfinite(value):
            raise TrainingDivergedError(step, name)


def train_step(state: TrainerState, cfg: TrainConfig, real_batch: np.ndarray) -> StepReport:
    """One alternating update: D, then D_z (ZDisc only), then G and F jointly."""
    step = state.step + 1
    real = as_matrix(real_batch, cols=cfg.target_dim, name="real batch")
    n = real.shape[0]
    if n < 2:
        raise ValueError(f"real batch needs at least 2 rows, got {n}")
    weights = cfg.loss_weights()
    m = cfg.latent_dim
    for opt in state.adam.values():
        opt.learning_rate = cfg.learning_rate(step)

    try:
        for _ in range(cfg.d_steps):
            fake = state.g.predict(sample_standard_normal(n, m, state.rng))
            disc_value = update_discriminator(state.d, state.adam["d"], real, fake)

        dz_value = None
        if state.dz is not None:
            prior = sample_standard_normal(n, m, state.rng)
            dz_value = update_discriminator(
                state.dz, state.adam["dz"], prior, state.f.predict(real)
            )

        # Latent side: z -> G -> D for the adversarial term, z -> G -> F -> z for the cycle.
        z = sample_standard_normal(n, m, state.rng)
        x_fake = state.g.forward(z)
        adv_value, grad_x_fake = _adversarial_input_grad(state.d, x_fake)
        z_cycled = state.f.forward(x_fake)
        _, grad_z_cycled = cycle_l1(z, z_cycled)
        grad_x_fake = grad_x_fake + state.f.backward(weights.lambda_re * grad_z_cycled)
        state.g.backward(grad_x_fake)

        # Data side: x -> F -> G -> x for the cycle, and the consistency term on F(x).
        z_tilde = state.f.forward(real)
        x_cycled = state.g.forward(z_tilde)
        _, grad_x_cycled = cycle_l1(real, x_cycled)
        grad_z_tilde = state.g.backward(weights.lambda_re * weights.dim_ratio * grad_x_cycled)

        if cfg.gau_variant.uses_estimate:
            gau_value, grad_gau = gaussian_consistency(z_tilde, cfg.gau_variant, cfg.pnorm_p)
        elif cfg.gau_variant is GauVariant.ZDISC:
            assert state.dz is not None
            gau_value, grad_gau = _adversarial_input_grad(state.dz, z_tilde)
        else:
            gau_value, grad_gau = 0.0, np.zeros_like(z_tilde)
        state.f.backward(grad_z_tilde + weights.lambda_gau * grad_gau)

        recon_value = recon_loss(z, z_cycled, real, x_cycled, weights.dim_ratio)
        total = total_objective(adv_value, recon_value, gau_value, weights)
        _check_finite(
            step,
            d_loss=disc_value,
            dz_loss=dz_value,
            g_adv=adv_value,
            recon=recon_value,
            gau=gau_value,
            total=total,
        )

        adam_step(state.g, state.adam["g"])
        adam_step(state.f, state.adam["f"])
    except NonFiniteError as e:
        raise TrainingDivergedError(step, e.what or "network output", str(e)) from e
    except LossError as e:
        raise TrainingDivergedError(step, "gau", str(e)) from e

    state.step = step
    return StepReport(
        step=step,
        d_loss=disc_value,
        dz_loss=dz_value,
        g_adv=adv_value,
        recon=recon_value,
        gau=gau_value,
        total=total,
    )


def train(
    cfg: TrainConfig, sink: Sink | None = None, state: TrainerState | None = None
) -> TrainerState:
    """Run train_step until ``cfg.steps``, calling ``sink`` every ``eval_every`` steps.

    A fresh run calls ``sink`` once before the first step. Passing ``state``
    resumes from it; the sink is not re-invoked at the resume point.
    """
    state = state if state is not None else trainer_new(cfg)
    mix = cfg.mixture()
    if state.step > cfg.steps:
        raise ValueError(f"state is at step {state.step}, beyond the configured {cfg.steps}")

    logger.info(
        "Starting training",
        seed=cfg.seed,
        variant=cfg.gau_variant.value,
        dataset=cfg.dataset.value,
        start_step=state.step,
        steps=cfg.steps,
    )
    if state.step == 0 and sink is not None:
        sink(state)

    report = None
    while state.step < cfg.steps:
        report = train_step(state, cfg, sample_mixture(mix, cfg.batch_size, state.data_rng))
        if state.step % cfg.eval_every == 0 or state.step == cfg.steps:
            logger.info(
                "Training progress",
                step=report.step,
                d_loss=round(report.d_loss, 5),
                g_adv=round(report.g_adv, 5),
                recon=round(report.recon, 5),
                gau=round(report.gau, 5),
            )
            if sink is not None:
                sink(state)

    logger.info("Training completed", seed=cfg.seed, step=state.step)
    return state
