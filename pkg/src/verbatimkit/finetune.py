"""Fine-tuning hyperparameter bundles and manifest emission.

Nothing here trains a model. The module pins every configuration number
used for the low-rank adapter runs in one machine-checkable place and
computes the derived quantities (effective batch size, adapter update
scale), so downstream training harnesses consume a canonical manifest
instead of scattering magic numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import DomainError, ValidationError


class Projection(str, Enum):
    """Transformer submodules a low-rank adapter can target."""

    QUERY = "query"
    KEY = "key"
    VALUE = "value"
    OUTPUT = "output"
    FFN1 = "ffn1"
    FFN2 = "ffn2"


ALL_PROJECTIONS = frozenset(Projection)


def rslora_scale(rank: int, alpha: float) -> float:
    """Rank-stabilized adapter update scale: alpha / sqrt(rank)."""
    if rank < 1:
        raise DomainError(f"rank must be >= 1, got {rank}")
    return alpha / math.sqrt(rank)


def standard_lora_scale(rank: int, alpha: float) -> float:
    """Conventional adapter update scale: alpha / rank."""
    if rank < 1:
        raise DomainError(f"rank must be >= 1, got {rank}")
    return alpha / rank


@dataclass(frozen=True)
class LoraSpec:
    """Low-rank adapter shape and scaling convention."""

    rank: int
    alpha: float
    dropout: float = 0.0
    target_projections: frozenset[Projection] = ALL_PROJECTIONS
    rank_stabilized: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "target_projections", frozenset(self.target_projections))
        if self.rank < 1:
            raise ValidationError(f"rank must be >= 1, got {self.rank}")
        if self.alpha <= 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValidationError(f"dropout must be in [0, 1), got {self.dropout}")
        if not self.target_projections:
            raise ValidationError("target_projections must not be empty")

    @property
    def scale(self) -> float:
        if self.rank_stabilized:
            return rslora_scale(self.rank, self.alpha)
        return standard_lora_scale(self.rank, self.alpha)


@dataclass(frozen=True)
class OptimizerSpec:
    """AdamW hyperparameters."""

    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be positive, got {self.learning_rate}")
        for name, beta in (("beta1", self.beta1), ("beta2", self.beta2)):
            if not 0.0 < beta < 1.0:
                raise ValidationError(f"{name} must be in (0, 1), got {beta}")


class PresetName(str, Enum):
    CHALLENGE = "challenge"
    POST_CHALLENGE = "post_challenge"


@dataclass(frozen=True)
class SchedulePreset:
    """Batching and step schedule for one training run."""

    name: PresetName
    per_device_batch: int
    grad_accum_steps: int
    total_steps: int
    approx_epochs: float
    eval_every_steps: int | None = None

    def __post_init__(self) -> None:
        if self.per_device_batch < 1 or self.grad_accum_steps < 1:
            raise ValidationError("effective batch (per_device_batch x grad_accum_steps) must be positive")
        if self.total_steps < 1:
            raise ValidationError(f"total_steps must be >= 1, got {self.total_steps}")
        if self.eval_every_steps is not None and self.eval_every_steps < 1:
            raise ValidationError(f"eval_every_steps must be >= 1, got {self.eval_every_steps}")

    @property
    def effective_batch(self) -> int:
        return self.per_device_batch * self.grad_accum_steps


DEFAULT_LORA = LoraSpec(
    rank=32,
    alpha=8.0,
    dropout=0.05,
    target_projections=ALL_PROJECTIONS,
    rank_stabilized=True,
)

DEFAULT_OPTIMIZER = OptimizerSpec(
    learning_rate=7e-5,
    beta1=0.9,
    beta2=0.98,
    epsilon=1e-6,
    weight_decay=0.01,
)

CHALLENGE = SchedulePreset(
    name=PresetName.CHALLENGE,
    per_device_batch=32,
    grad_accum_steps=32,
    total_steps=28,
    approx_epochs=4.5,
    eval_every_steps=None,
)

POST_CHALLENGE = SchedulePreset(
    name=PresetName.POST_CHALLENGE,
    per_device_batch=32,
    grad_accum_steps=1,
    total_steps=732,
    approx_epochs=6.0,
    eval_every_steps=122,
)

_PRESETS = {
    "challenge": CHALLENGE,
    "post_challenge": POST_CHALLENGE,
    "post-challenge": POST_CHALLENGE,
}


def builtin_preset(name: str) -> SchedulePreset:
    try:
        return _PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose challenge or post-challenge") from None


def emit_manifest(
    preset: SchedulePreset,
    lora: LoraSpec = DEFAULT_LORA,
    optimizer: OptimizerSpec = DEFAULT_OPTIMIZER,
) -> dict:
    """Deterministic JSON-ready manifest with all fields plus derived values."""
    return {
        "preset": preset.name.value,
        "schedule": {
            "per_device_batch": preset.per_device_batch,
            "grad_accum_steps": preset.grad_accum_steps,
            "effective_batch": preset.effective_batch,
            "total_steps": preset.total_steps,
            "approx_epochs": preset.approx_epochs,
            "eval_every_steps": preset.eval_every_steps,
        },
        "lora": {
            "rank": lora.rank,
            "alpha": lora.alpha,
            "dropout": lora.dropout,
            "target_projections": sorted(p.value for p in lora.target_projections),
            "rank_stabilized": lora.rank_stabilized,
            "scale": lora.scale,
            "standard_scale": standard_lora_scale(lora.rank, lora.alpha),
        },
        "optimizer": {
            "learning_rate": optimizer.learning_rate,
            "beta1": optimizer.beta1,
            "beta2": optimizer.beta2,
            "epsilon": optimizer.epsilon,
            "weight_decay": optimizer.weight_decay,
        },
    }


def specs_from_manifest(doc: Mapping) -> tuple[SchedulePreset, LoraSpec, OptimizerSpec]:
    """Rebuild the configuration bundle from a manifest, checking derived fields."""
    try:
        schedule = doc["schedule"]
        lora_doc = doc["lora"]
        opt_doc = doc["optimizer"]
        preset = SchedulePreset(
            name=PresetName(doc["preset"]),
            per_device_batch=schedule["per_device_batch"],
            grad_accum_steps=schedule["grad_accum_steps"],
            total_steps=schedule["total_steps"],
            approx_epochs=schedule["approx_epochs"],
            eval_every_steps=schedule["eval_every_steps"],
        )
        lora = LoraSpec(
            rank=lora_doc["rank"],
            alpha=lora_doc["alpha"],
            dropout=lora_doc["dropout"],
            target_projections=frozenset(Projection(p) for p in lora_doc["target_projections"]),
            rank_stabilized=lora_doc["rank_stabilized"],
        )
        optimizer = OptimizerSpec(
            learning_rate=opt_doc["learning_rate"],
            beta1=opt_doc["beta1"],
            beta2=opt_doc["beta2"],
            epsilon=opt_doc["epsilon"],
            weight_decay=opt_doc["weight_decay"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed manifest: {exc}") from None
    if schedule["effective_batch"] != preset.effective_batch:
        raise ValidationError("manifest effective_batch disagrees with batch x accumulation")
    if not math.isclose(lora_doc["scale"], lora.scale, rel_tol=1e-12):
        raise ValidationError("manifest scale disagrees with the adapter convention")
    return preset, lora, optimizer
