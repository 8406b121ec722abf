"""
Single entry points for training, evaluation, reconstruction and benchmarks.

Used by the CLI. Every dependency (environment, agent, encoder, buffer)
is built from a RunConfig or from checkpoint metadata; nothing is global.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.agents import BaseAgent, RandomPolicy, SACAgent, ScriptedReachPolicy
from src.autodiff import no_grad
from src.envs import PointCloudEnv, export_trace, make_env, synthetic_shapes
from src.errors import CheckpointError, InvalidArgumentError
from src.export import (
    ReconstructionReport,
    ReconstructionReportExporter,
    patch_to_cloud,
    write_point_cloud,
)
from src.losses import patch_losses
from src.memory import read_checkpoint, write_checkpoint
from src.models.cloud import PointCloud
from src.models.config import EncoderConfig, EnvConfig, EnvName, Precision, RunConfig
from src.orchestrator import (
    AuxPretrainer,
    BenchRow,
    EvalResult,
    PretrainResult,
    Trainer,
    benchmark_kernel,
    evaluate_policy,
    rows_to_csv,
)
from src.parser import read_point_cloud
from src.tokenizer import pack_patch_sets, patchify
from src.transformer import EncodeMode, PointPatchEncoder, build_decoder_mask
from src.validation import load_run_config

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
STUB_POLICIES = ("scripted", "random")


def _strip(tensors: Dict[str, np.ndarray], prefix: str) -> Dict[str, np.ndarray]:
    return {name[len(prefix):]: array for name, array in tensors.items() if name.startswith(prefix)}


def _as_config(config: Union[RunConfig, PathLike]) -> RunConfig:
    return config if isinstance(config, RunConfig) else load_run_config(config)


def _create_env_config(meta: Dict[str, Any], env_name: Optional[str] = None) -> EnvConfig:
    """Environment of a checkpoint, optionally renamed"""
    kind = meta.get("kind")
    if kind == "run":
        env_config = RunConfig.model_validate(meta["run_config"]).env
    elif "env_config" in meta:
        env_config = EnvConfig.model_validate(meta["env_config"])
    elif env_name is None:
        raise CheckpointError(f"checkpoint of kind {kind!r} names no environment; pass one explicitly")
    else:
        env_config = EnvConfig()
    if env_name is not None:
        env_config = env_config.model_copy(update={"name": EnvName(env_name)})
    return env_config


def _create_policy(tensors: Dict[str, np.ndarray], meta: Dict[str, Any], env: PointCloudEnv) -> BaseAgent:
    """Rebuild the policy stored in a checkpoint and check it fits the environment"""
    kind = meta.get("kind")
    if kind == "scripted":
        return ScriptedReachPolicy(env.goal_position, env.agent_position, env.config.step_size)
    if kind == "random":
        return RandomPolicy(env.action_dim, int(meta.get("seed", 0)))
    if kind == "run":
        tensors, meta = _strip(tensors, "agent."), meta["agent"]
    elif kind != "sac":
        raise CheckpointError(f"checkpoint of kind {kind!r} holds no policy")

    agent = SACAgent.from_state_dict(tensors, meta)
    if agent.action_dim != env.action_dim:
        raise CheckpointError(f"agent has {agent.action_dim} actions, {env.name} expects {env.action_dim}")
    if agent.state_dim not in (None, env.state_dim):
        raise CheckpointError(f"agent expects state width {agent.state_dim}, {env.name} provides {env.state_dim}")
    if agent.encoder_config.color != env.config.emits_color:
        raise CheckpointError(
            f"agent was trained {'with' if agent.encoder_config.color else 'without'} colors "
            f"but {env.name} {'emits' if env.config.emits_color else 'does not emit'} them"
        )
    return agent


def load_encoder(path: PathLike) -> Tuple[PointPatchEncoder, Dict[str, Any]]:
    """
    Encoder stored in a run, agent or pretraining checkpoint.

    Returns:
        (encoder, meta of the encoder's owner)
    """
    tensors, meta = read_checkpoint(path)
    kind = meta.get("kind")
    if kind == "run":
        tensors, meta = _strip(tensors, "agent."), meta["agent"]
        kind = meta.get("kind")
    if kind == "sac":
        precision = meta["agent_config"].get("precision", Precision.FLOAT32.value)
    elif kind == "encoder":
        precision = meta.get("precision", Precision.FLOAT32.value)
    else:
        raise CheckpointError(f"checkpoint of kind {kind!r} holds no encoder")

    config = EncoderConfig.model_validate(meta["encoder_config"])
    dtype = np.float64 if precision == Precision.FLOAT64.value else np.float32
    encoder = PointPatchEncoder(config, np.random.default_rng(0), dtype=dtype)
    try:
        encoder.load_state_dict(_strip(tensors, "encoder."))
    except InvalidArgumentError as exc:
        raise CheckpointError(f"encoder weights do not match their config: {exc}")
    return encoder, meta


# ---------------------------------------------------------------- training


def run_training(
    config: Union[RunConfig, PathLike],
    resume: Optional[PathLike] = None,
    output_dir: Optional[PathLike] = None
) -> Dict[str, Any]:
    """
    Train an agent and write metrics, manifest, summary and checkpoints.

    Args:
        config: RunConfig or path to a YAML config
        resume: Run checkpoint to continue from
        output_dir: Overrides config.output_dir

    Returns:
        Run summary
    """
    config = _as_config(config)
    trainer = Trainer(config, output_dir)
    return trainer.run(resume)


def run_pretrain_aux(
    config: Union[RunConfig, PathLike],
    shapes: int = 32,
    steps: int = 2000,
    points: int = 512,
    out: Optional[PathLike] = None,
    seed: Optional[int] = None
) -> PretrainResult:
    """Train the reconstruction objective alone on synthetic shapes; optionally save the encoder"""
    config = _as_config(config)
    seed = config.seed if seed is None else seed
    clouds = synthetic_shapes(shapes, points, seed, color=config.encoder.color)
    pretrainer = AuxPretrainer(
        config.encoder,
        clouds,
        lr=config.agent.lr,
        precision=config.agent.precision,
        color_loss_enabled=config.agent.color_loss_enabled,
        color_weight=config.agent.color_weight,
        seed=seed
    )
    result = pretrainer.run(steps)
    if out is not None:
        tensors, meta = pretrainer.state_dict({"shapes": shapes, "points": points, "seed": seed})
        write_checkpoint(out, tensors, meta)
    return result


# -------------------------------------------------------------- evaluation


def create_stub(out: PathLike, env_name: str = EnvName.POINT_REACH.value, policy: str = "scripted", seed: int = 0) -> Path:
    """Checkpoint holding a non-learning policy bound to an environment"""
    if policy not in STUB_POLICIES:
        raise InvalidArgumentError(f"unknown stub policy {policy!r}; known: {list(STUB_POLICIES)}")
    env_config = EnvConfig(name=EnvName(env_name))
    meta = {"kind": policy, "env_config": env_config.model_dump(mode="json"), "seed": seed}
    return write_checkpoint(out, {}, meta)


def run_evaluation(
    checkpoint: PathLike,
    episodes: int,
    seed: int = 0,
    env_name: Optional[str] = None
) -> EvalResult:
    """
    Evaluate a checkpointed policy in deterministic mode.

    Raises:
        InvalidArgumentError: If episodes < 1
        CheckpointError: If the checkpoint does not fit the environment
    """
    if episodes < 1:
        raise InvalidArgumentError(f"evaluation needs at least one episode, got {episodes}")
    tensors, meta = read_checkpoint(checkpoint)
    env = make_env(_create_env_config(meta, env_name))
    policy = _create_policy(tensors, meta, env)
    return evaluate_policy(env, policy, episodes, seed)


def run_export_trace(
    config: Union[RunConfig, PathLike],
    out_dir: PathLike,
    episodes: int = 1,
    checkpoint: Optional[PathLike] = None,
    seed: int = 0
) -> List[Path]:
    """Write episode observations; the policy comes from `checkpoint` or is uniform random"""
    config = _as_config(config)
    env = make_env(config.env)
    if checkpoint is None:
        policy: BaseAgent = RandomPolicy(env.action_dim, seed)
    else:
        tensors, meta = read_checkpoint(checkpoint)
        policy = _create_policy(tensors, meta, env)
    return export_trace(env, policy, out_dir, episodes, seed)


# ---------------------------------------------------------- reconstruction


def run_reconstruction(
    checkpoint: PathLike,
    cloud_path: PathLike,
    out_dir: PathLike,
    seed: int = 0
) -> ReconstructionReport:
    """
    Mask, reconstruct and score one cloud.

    Writes `truth.xyz` and `predicted.xyz` (all patches, scene frame),
    `patches/` with one file per patch and side, and the report as
    `report.md` / `report.json`.

    Raises:
        CloudParseError: Malformed cloud file
        CheckpointError: Feature width differs from the checkpoint's
    """
    encoder, _ = load_encoder(checkpoint)
    config = encoder.config
    cloud = read_point_cloud(cloud_path)
    cloud.require_non_empty(str(cloud_path))
    if cloud.feature_dim != config.point_feature_dim:
        raise CheckpointError(
            f"{cloud_path} has {cloud.feature_dim} features per point, "
            f"the checkpoint expects {config.point_feature_dim}"
        )

    patch_set = patchify(cloud, config.num_centroids, config.patch_size, seed, config.morton_bits)
    batch = pack_patch_sets([patch_set])
    n_real = int(batch.n_real[0])
    mask = build_decoder_mask(n_real, 0, config.mask_ratio, config.prefix_fraction, seed)
    with no_grad():
        tokens = encoder.tokenize(batch)
        encoded = encoder.encode(tokens, EncodeMode.RECONSTRUCTION, mask.visible[None])
        predicted = encoder.decode_and_predict(encoded).data[0, :n_real].astype(np.float64)
    truth = batch.real_patches(0)
    chamfer, color = patch_losses(predicted, truth, with_color=config.color)

    out_dir = Path(out_dir)
    centroids = batch.centroids[0, :n_real]
    predicted_clouds = [patch_to_cloud(predicted[i], centroids[i]) for i in range(n_real)]
    truth_clouds = [patch_to_cloud(truth[i], centroids[i]) for i in range(n_real)]
    for i in range(n_real):
        write_point_cloud(out_dir / "patches" / f"predicted_{i:03d}.xyz", predicted_clouds[i], f"patch {i} predicted")
        write_point_cloud(out_dir / "patches" / f"truth_{i:03d}.xyz", truth_clouds[i], f"patch {i} ground truth")
    write_point_cloud(out_dir / "predicted.xyz", _merge(predicted_clouds), f"reconstruction of {cloud_path}")
    write_point_cloud(out_dir / "truth.xyz", _merge(truth_clouds), f"patches of {cloud_path}")

    report = ReconstructionReport(
        checkpoint=str(checkpoint),
        cloud=str(cloud_path),
        num_points=cloud.num_points,
        num_patches=n_real,
        patch_size=config.patch_size,
        mask_ratio=config.mask_ratio,
        prefix_fraction=config.prefix_fraction,
        hidden_tokens=[int(t) for t in mask.hidden],
        chamfer=[float(v) for v in chamfer.data],
        color=None if color is None else [float(v) for v in color.data]
    )
    exporter = ReconstructionReportExporter()
    (out_dir / "report.md").write_text(exporter.export(report), encoding="utf-8")
    (out_dir / "report.json").write_text(exporter.export_json(report), encoding="utf-8")
    logger.info(f"[Reconstruct] {cloud_path}: {n_real} patches, mean Chamfer {report.mean_chamfer:.6g}")
    return report


def _merge(clouds: List[PointCloud]) -> PointCloud:
    positions = np.concatenate([c.positions for c in clouds])
    colors = np.concatenate([c.colors for c in clouds]) if clouds[0].has_colors else None
    return PointCloud(positions, colors)


# -------------------------------------------------------------- benchmarks


def run_benchmark(kernel: str, sizes: Sequence[int], out: Optional[PathLike] = None, seed: int = 0) -> List[BenchRow]:
    """Median-of-7 timings per size; written as CSV when `out` is given"""
    rows = benchmark_kernel(kernel, sizes, seed=seed)
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(rows_to_csv(rows), encoding="utf-8")
    return rows
