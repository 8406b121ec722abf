"""
Desk-scale learning targets.

Each run takes tens of minutes on a CPU, so everything here is marked
slow and deselected by default; run with `pytest -m slow`.
"""

from pathlib import Path
from statistics import median

import pytest

from src.api import run_evaluation
from src.orchestrator import Trainer
from src.validation import load_run_config

pytestmark = pytest.mark.slow

PRESETS = Path(__file__).resolve().parent.parent / "config"
SEEDS = (0, 1, 2, 3)


def train(preset: str, seed: int, out: Path) -> Trainer:
    config = load_run_config(PRESETS / preset).model_copy(update={"seed": seed, "output_dir": str(out)})
    trainer = Trainer(config)
    trainer.run()
    return trainer


def final_success(trainer: Trainer, episodes: int = 100) -> float:
    latest = trainer.output_dir / "checkpoints" / "latest.ckpt"
    return run_evaluation(latest, episodes, seed=10_000).success_rate


def steps_to(trainer: Trainer, threshold: float) -> float:
    for row in trainer.recorder.evals():
        if row["eval_success_rate"] >= threshold:
            return row["step"]
    return float("inf")


def majority(flags) -> bool:
    flags = list(flags)
    return sum(flags) > len(flags) / 2


def test_point_reach(tmp_path):
    rates = [final_success(train("desk_point_reach.yaml", seed, tmp_path / str(seed))) for seed in SEEDS]
    assert majority(rate >= 0.9 for rate in rates), rates


def test_color_must_reach_the_policy(tmp_path):
    with_color = [final_success(train("desk_color_touch.yaml", s, tmp_path / f"c{s}")) for s in SEEDS]
    zeroed = [final_success(train("desk_color_touch_no_color.yaml", s, tmp_path / f"z{s}")) for s in SEEDS]
    assert majority(rate >= 0.8 for rate in with_color), with_color
    assert majority(rate <= 0.55 for rate in zeroed), zeroed


def test_aux_speeds_up_learning(tmp_path):
    with_aux = [steps_to(train("desk_color_touch.yaml", s, tmp_path / f"a{s}"), 0.8) for s in SEEDS]
    without = [steps_to(train("desk_color_touch_no_aux.yaml", s, tmp_path / f"n{s}"), 0.8) for s in SEEDS]
    assert median(with_aux) <= median(without), (with_aux, without)


def test_long_run_is_reproducible(tmp_path):
    config = load_run_config(PRESETS / "desk_point_reach.yaml").model_copy(update={"total_steps": 1000})
    Trainer(config, tmp_path / "a").run()
    Trainer(config, tmp_path / "b").run()
    assert (tmp_path / "a" / "metrics.csv").read_bytes() == (tmp_path / "b" / "metrics.csv").read_bytes()
