"""Tests for reconstruction-only pretraining"""

import numpy as np
import pytest

from src.api import load_encoder, run_pretrain_aux
from src.envs import synthetic_shapes
from src.errors import InvalidArgumentError
from src.memory import write_checkpoint
from src.models.config import EncoderConfig, Precision, RunConfig
from src.orchestrator import AuxPretrainer, PretrainResult

SMALL = EncoderConfig(
    num_centroids=8, patch_size=8, embed_dim=12, num_layers=1, decoder_layers=1, num_heads=2, mlp_ratio=2
)


@pytest.fixture
def shapes():
    return synthetic_shapes(3, 64, seed=0)


def make_pretrainer(shapes, config=SMALL, **kwargs):
    return AuxPretrainer(config, shapes, lr=1e-3, precision=Precision.FLOAT64, seed=0, **kwargs)


class TestAuxPretrainer:
    def test_step_returns_finite_loss(self, shapes):
        pretrainer = make_pretrainer(shapes)
        loss = pretrainer.step()
        assert np.isfinite(loss) and loss > 0.0
        assert pretrainer.step_count == 1

    def test_same_seed_same_losses(self, shapes):
        a, b = make_pretrainer(shapes), make_pretrainer(shapes)
        assert [a.step() for _ in range(3)] == [b.step() for _ in range(3)]

    def test_scoring_masks_are_fixed(self, shapes):
        pretrainer = make_pretrainer(shapes)
        assert pretrainer.mean_chamfer() == pretrainer.mean_chamfer()

    def test_run_zero_steps(self, shapes):
        result = make_pretrainer(shapes).run(0)
        assert result.final_chamfer == result.initial_chamfer
        assert result.reduction == 0.0
        assert len(result.history) == 1

    def test_run_logs_history(self, shapes):
        result = make_pretrainer(shapes).run(4, log_every=2)
        assert [step for step, _ in result.history] == [0, 2, 4]
        assert result.final_chamfer == result.history[-1][1]

    def test_invalid_arguments(self, shapes):
        with pytest.raises(InvalidArgumentError):
            make_pretrainer([])
        with pytest.raises(InvalidArgumentError):
            make_pretrainer(shapes).run(-1)

    def test_color_shapes(self):
        config = SMALL.model_copy(update={"color": True})
        pretrainer = make_pretrainer(synthetic_shapes(2, 64, seed=1, color=True), config)
        assert pretrainer.color_enabled
        assert np.isfinite(pretrainer.step())

    def test_checkpoint_loads_as_encoder(self, shapes, tmp_path):
        pretrainer = make_pretrainer(shapes)
        pretrainer.step()
        tensors, meta = pretrainer.state_dict({"shapes": 3})
        path = write_checkpoint(tmp_path / "encoder.ckpt", tensors, meta)

        encoder, loaded_meta = load_encoder(path)
        assert loaded_meta["kind"] == "encoder"
        assert loaded_meta["shapes"] == 3
        assert encoder.config == SMALL
        for name, array in pretrainer.model.state_dict().items():
            np.testing.assert_array_equal(encoder.state_dict()[name], array)


def test_reduction():
    assert PretrainResult(10, 2.0, 0.5).reduction == pytest.approx(0.75)


def test_run_pretrain_aux_writes_checkpoint(tmp_path):
    config = RunConfig(encoder=SMALL)
    out = tmp_path / "pretrained.ckpt"
    result = run_pretrain_aux(config, shapes=2, steps=2, points=64, out=out)
    assert result.steps == 2
    assert load_encoder(out)[1]["points"] == 64


@pytest.mark.slow
def test_reconstruction_learns():
    """Mean Chamfer on 32 fixed shapes halves within 2000 steps"""
    config = EncoderConfig(
        num_centroids=16, patch_size=16, embed_dim=48, num_layers=2, decoder_layers=1, num_heads=4
    )
    pretrainer = AuxPretrainer(config, synthetic_shapes(32, 256, seed=0), lr=1e-3, seed=0)
    result = pretrainer.run(2000, log_every=500)
    assert result.reduction >= 0.5
