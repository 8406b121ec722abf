"""Reconstruction-only pretraining on a fixed set of shapes"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.autodiff import Adam, Tensor, no_grad, parameters_of
from src.errors import InvalidArgumentError
from src.losses import aux_loss, patch_losses
from src.models.cloud import PointCloud
from src.models.config import EncoderConfig, Precision
from src.tokenizer import PatchBatch, pack_patch_sets, patchify
from src.transformer import EncodeMode, PointPatchEncoder, build_decoder_masks

logger = logging.getLogger(__name__)

# Masks used to score progress stay fixed for the whole run
_SCORE_MASK_SEED = 12345


@dataclass
class PretrainResult:
    steps: int
    initial_chamfer: float
    final_chamfer: float
    history: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def reduction(self) -> float:
        """Relative drop of the mean Chamfer distance"""
        if self.initial_chamfer == 0.0:
            return 0.0
        return 1.0 - self.final_chamfer / self.initial_chamfer


class AuxPretrainer:
    """
    Trains tokenizer, encoder, decoder and head with the masked
    reconstruction loss alone.

    Every shape is patchified once with its own seed, so the targets never
    change; only the random token masks are redrawn each step.
    """

    def __init__(
        self,
        config: EncoderConfig,
        shapes: Sequence[PointCloud],
        lr: float = 1e-3,
        precision: Precision = Precision.FLOAT32,
        color_loss_enabled: bool = True,
        color_weight: float = 1.0,
        seed: int = 0
    ):
        if not shapes:
            raise InvalidArgumentError("pretraining needs at least one shape")
        self.config = config
        self.dtype = np.float64 if Precision(precision) == Precision.FLOAT64 else np.float32
        self.color_enabled = config.color and color_loss_enabled
        self.color_weight = color_weight
        self.step_count = 0

        init_seq, patch_seq, mask_seq = np.random.SeedSequence(seed).spawn(3)
        self.model = PointPatchEncoder(config, np.random.default_rng(init_seq), dtype=self.dtype)
        self.mask_rng = np.random.default_rng(mask_seq)

        patch_seeds = np.random.default_rng(patch_seq).integers(0, 2**31 - 1, size=len(shapes))
        self.batch: PatchBatch = pack_patch_sets([
            patchify(shape, config.num_centroids, config.patch_size, int(s), config.morton_bits)
            for shape, s in zip(shapes, patch_seeds)
        ])
        self.score_masks = build_decoder_masks(
            self.batch.n_real,
            self.batch.max_patches,
            config.mask_ratio,
            config.prefix_fraction,
            np.random.default_rng(_SCORE_MASK_SEED)
        )
        self.optimizer = Adam(
            parameters_of(self.model.tokenizer, self.model.encoder, *self.model.reconstruction_parameters()),
            lr=lr
        )

    def predict(self, masks: np.ndarray) -> Tensor:
        tokens = self.model.tokenize(self.batch)
        encoded = self.model.encode(tokens, EncodeMode.RECONSTRUCTION, masks)
        return self.model.decode_and_predict(encoded)

    def loss(self, masks: np.ndarray) -> Tensor:
        return aux_loss(
            self.predict(masks),
            self.batch.patches,
            color_enabled=self.color_enabled,
            valid=~self.batch.is_padding,
            color_weight=self.color_weight
        )

    def mean_chamfer(self) -> float:
        """Mean Chamfer over real patches under the fixed scoring masks"""
        with no_grad():
            predicted = self.predict(self.score_masks)
            chamfer, _ = patch_losses(predicted, self.batch.patches, with_color=False)
        valid = ~self.batch.is_padding
        return float(chamfer.data[valid].mean())

    def step(self) -> float:
        masks = build_decoder_masks(
            self.batch.n_real,
            self.batch.max_patches,
            self.config.mask_ratio,
            self.config.prefix_fraction,
            self.mask_rng
        )
        self.optimizer.zero_grad()
        loss = self.loss(masks)
        loss.backward()
        self.optimizer.step()
        self.step_count += 1
        return loss.item()

    def run(self, steps: int, log_every: int = 100) -> PretrainResult:
        """
        Run `steps` optimizer steps.

        Returns:
            PretrainResult with the scoring Chamfer before and after
        """
        if steps < 0:
            raise InvalidArgumentError(f"steps must be >= 0, got {steps}")
        initial = self.mean_chamfer()
        history: List[Tuple[int, float]] = [(self.step_count, initial)]
        logger.info(f"[AuxPretrainer] Step 0 mean Chamfer {initial:.6g} on {self.batch.batch_size} shapes")

        for i in range(1, steps + 1):
            loss = self.step()
            if i % log_every == 0 or i == steps:
                score = self.mean_chamfer()
                history.append((self.step_count, score))
                logger.info(f"[AuxPretrainer] Step {i}: loss={loss:.6g} mean Chamfer={score:.6g}")

        final = history[-1][1]
        return PretrainResult(steps, initial, final, history)

    def state_dict(self, extra: Optional[Dict[str, Any]] = None) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
        """Encoder-only checkpoint readable by `load_encoder`"""
        tensors = {f"encoder.{name}": array for name, array in self.model.state_dict().items()}
        meta = {
            "kind": "encoder",
            "encoder_config": self.config.model_dump(mode="json"),
            "precision": "float64" if self.dtype == np.float64 else "float32",
            "step_count": self.step_count,
        }
        meta.update(extra or {})
        return tensors, meta
