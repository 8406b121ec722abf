"""Soft Actor-Critic on point-patch embeddings"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.autodiff import Adam, Parameter, Tensor, mse, no_grad, parameters_of
from src.errors import CheckpointError, InvalidArgumentError
from src.losses import aux_loss
from src.memory.replay_buffer import ReplayBuffer
from src.models.cloud import PointCloud
from src.models.config import AgentConfig, EncoderConfig, Precision
from src.models.transition import TransitionBatch
from src.tokenizer import PatchBatch, TokenSequence, pack_patch_sets, patchify_batch
from src.transformer import EncodeMode, PointPatchEncoder, StateFusion, build_decoder_masks
from .base import BaseAgent
from .networks import Actor, TwinCritic

logger = logging.getLogger(__name__)

RNG_STREAMS = ("replay", "tokenizer", "masking", "policy")


@dataclass
class Observation:
    """A packed observation batch and its optional state vectors"""
    patches: PatchBatch
    states: Optional[np.ndarray]


class SACAgent(BaseAgent):
    """
    SAC with a shared point-patch encoder.

    Gradient routing: the critic loss (plus the auxiliary reconstruction
    loss) trains the tokenizer, encoder, pooling and state fusion; the
    actor only ever sees detached embeddings; decoder, head and SOS token
    are reached by the auxiliary loss alone. Target networks are copies of
    the twin Q heads; next-observation embeddings come from the live
    encoder without gradient tracking.
    """

    name = "sac"

    def __init__(
        self,
        encoder_config: EncoderConfig,
        agent_config: AgentConfig,
        action_dim: int,
        state_dim: Optional[int] = None,
        aux: bool = True,
        seed: int = 0
    ):
        self.encoder_config = encoder_config
        self.config = agent_config
        self.action_dim = action_dim
        self.state_dim = state_dim
        self.aux = aux
        self.seed = seed
        self.dtype = np.float64 if agent_config.precision == Precision.FLOAT64 else np.float32
        self.target_entropy = (
            agent_config.target_entropy if agent_config.target_entropy is not None else -float(action_dim)
        )
        self.step_count = 0

        init_seq, *stream_seqs = np.random.SeedSequence(seed).spawn(1 + len(RNG_STREAMS))
        init_rng = np.random.default_rng(init_seq)
        self.rngs: Dict[str, np.random.Generator] = {
            name: np.random.default_rng(s) for name, s in zip(RNG_STREAMS, stream_seqs)
        }

        width = encoder_config.embed_dim
        self.encoder = PointPatchEncoder(encoder_config, init_rng, dtype=self.dtype)
        self.fusion = StateFusion(state_dim, width, init_rng, dtype=self.dtype) if state_dim else None
        fused_dim = 2 * width if state_dim else width
        hidden = agent_config.hidden_width
        layers = agent_config.num_layers
        self.actor = Actor(
            fused_dim,
            action_dim,
            hidden,
            layers,
            init_rng,
            log_std_bounds=(agent_config.log_std_min, agent_config.log_std_max),
            dtype=self.dtype
        )
        self.critic = TwinCritic(fused_dim, action_dim, hidden, layers, init_rng, dtype=self.dtype)
        self.target_critic = TwinCritic(fused_dim, action_dim, hidden, layers, init_rng, dtype=self.dtype)
        self.target_critic.copy_from(self.critic)
        self.log_alpha = Parameter(np.array(np.log(agent_config.alpha_init), dtype=self.dtype))

        self.critic_optimizer = Adam(self.critic_parameters(), lr=agent_config.lr)
        self.actor_optimizer = Adam(self.actor.parameters(), lr=agent_config.lr)
        self.alpha_optimizer = Adam([self.log_alpha], lr=agent_config.alpha_lr)

        logger.info(
            f"[SACAgent] Built agent: D={width}, fused={fused_dim}, actions={action_dim}, "
            f"aux={aux}, params={self.num_parameters()}"
        )

    # ------------------------------------------------------------ bookkeeping

    def critic_parameters(self) -> List[Parameter]:
        """Everything the critic optimizer steps: critics, encoder side, reconstruction side"""
        return parameters_of(
            self.critic,
            self.encoder.tokenizer,
            self.encoder.encoder,
            self.encoder.pool,
            self.fusion,
            self.encoder.sos,
            self.encoder.relative,
            self.encoder.decoder,
            self.encoder.head
        )

    def num_parameters(self) -> int:
        modules = [self.encoder, self.fusion, self.actor, self.critic]
        return sum(m.num_parameters() for m in modules if m is not None) + 1

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha.data))

    def zero_grad(self):
        for p in parameters_of(self.encoder, self.fusion, self.actor, self.critic, self.log_alpha):
            p.grad = None

    # -------------------------------------------------------------- embedding

    def observe(self, clouds: Sequence[PointCloud], states: Optional[np.ndarray]) -> Observation:
        """Patchify and pack clouds with the tokenizer RNG stream"""
        patch_sets = patchify_batch(
            clouds,
            self.encoder_config.num_centroids,
            self.encoder_config.patch_size,
            self.rngs["tokenizer"],
            self.encoder_config.morton_bits
        )
        return Observation(pack_patch_sets(patch_sets), states)

    def fuse(self, pooled: Tensor, states: Optional[np.ndarray]) -> Tensor:
        if self.fusion is None:
            return pooled
        if states is None:
            raise InvalidArgumentError("this agent was built with a state input but got no state")
        return self.fusion(pooled, states)

    def embed(self, observation: Observation, tokens: Optional[TokenSequence] = None) -> Tensor:
        """Fused RL embedding (B, E); reuses `tokens` when given"""
        tokens = tokens if tokens is not None else self.encoder.tokenize(observation.patches)
        pooled = self.encoder.encode(tokens, EncodeMode.RL).pooled
        return self.fuse(pooled, observation.states)

    # ------------------------------------------------------------------ policy

    def actor_forward(
        self,
        embedding: Tensor,
        deterministic: bool = False,
        noise: Optional[np.ndarray] = None
    ) -> Tuple[Tensor, Tensor]:
        """(action, log_prob) from a detached embedding"""
        return self.actor(embedding.detach(), self.rngs["policy"], deterministic, noise)

    def act(self, observation: PointCloud, state: Optional[np.ndarray] = None, deterministic: bool = False) -> np.ndarray:
        states = None if state is None else np.asarray(state, dtype=np.float64)[None, :]
        with no_grad():
            embedding = self.embed(self.observe([observation], states))
            action, _ = self.actor_forward(embedding, deterministic)
        return action.data[0].astype(np.float64)

    # ---------------------------------------------------------------- targets

    def critic_target(self, batch: TransitionBatch, noise: Optional[np.ndarray] = None) -> np.ndarray:
        """
        y = r + gamma (1 - done) (min Q'(s', a') - alpha log pi(a'|s')), untracked.

        Args:
            batch: Sampled transitions
            noise: Optional explicit policy noise for a'

        Returns:
            (B,) targets
        """
        rewards = np.asarray(batch.rewards, dtype=np.float64)
        dones = np.asarray(batch.dones, dtype=np.float64)
        with no_grad():
            next_embedding = self.embed(self.observe(batch.next_obs, batch.next_states))
            next_action, next_log_prob = self.actor_forward(next_embedding, noise=noise)
            next_q = self.target_critic.min_q(next_embedding, next_action)
            soft_value = next_q.data.astype(np.float64) - self.alpha * next_log_prob.data.astype(np.float64)
        return (rewards + self.config.gamma * (1.0 - dones) * soft_value).astype(self.dtype)

    # ----------------------------------------------------------------- losses

    def critic_loss(self, embedding: Tensor, actions: np.ndarray, targets: np.ndarray) -> Tuple[Tensor, Tensor, Tensor]:
        q1, q2 = self.critic(embedding, Tensor(np.asarray(actions, dtype=self.dtype)))
        y = Tensor(targets)
        return mse(q1, y) + mse(q2, y), q1, q2

    def reconstruction_loss(self, observation: Observation, tokens: TokenSequence) -> Tensor:
        patches = observation.patches
        masks = build_decoder_masks(
            patches.n_real,
            patches.max_patches,
            self.encoder_config.mask_ratio,
            self.encoder_config.prefix_fraction,
            self.rngs["masking"]
        )
        encoded = self.encoder.encode(tokens, EncodeMode.RECONSTRUCTION, masks)
        predicted = self.encoder.decode_and_predict(encoded)
        return aux_loss(
            predicted,
            patches.patches,
            color_enabled=self.encoder_config.color and self.config.color_loss_enabled,
            valid=~patches.is_padding,
            color_weight=self.config.color_weight
        )

    def actor_loss(self, embedding: Tensor) -> Tuple[Tensor, Tensor]:
        """E[alpha log pi - min Q] on the detached embedding; returns (loss, log_prob)"""
        detached = embedding.detach()
        action, log_prob = self.actor_forward(detached)
        q = self.critic.min_q(detached, action)
        return (log_prob * self.alpha - q).mean(), log_prob

    def alpha_loss(self, log_prob: Tensor) -> Tensor:
        entropy_gap = log_prob.data + self.target_entropy
        return (self.log_alpha.exp() * entropy_gap * -1.0).mean()

    # ----------------------------------------------------------------- update

    def update_step(self, buffer: ReplayBuffer) -> Dict[str, float]:
        """
        One SAC update: critic (+ aux), actor, temperature, target critics.

        Returns:
            Scalar metrics; {"skipped": 1.0, "buffer_size": n} when the
            buffer holds fewer than batch_size transitions
        """
        size = len(buffer)
        if size < self.config.batch_size:
            logger.warning(
                f"[SACAgent] Skipping update: buffer holds {size} < batch_size {self.config.batch_size}"
            )
            return {"skipped": 1.0, "buffer_size": float(size)}

        batch = buffer.sample(self.config.batch_size, self.rngs["replay"])
        targets = self.critic_target(batch)

        observation = self.observe(batch.obs, batch.states)
        tokens = self.encoder.tokenize(observation.patches)
        embedding = self.embed(observation, tokens)

        critic_loss, q1, q2 = self.critic_loss(embedding, batch.actions, targets)
        total = critic_loss
        aux_value = 0.0
        if self.aux:
            reconstruction = self.reconstruction_loss(observation, tokens)
            aux_value = reconstruction.item()
            total = total + reconstruction * self.config.aux_weight

        self.zero_grad()
        total.backward()
        self.critic_optimizer.step()

        self.zero_grad()
        actor_loss, log_prob = self.actor_loss(embedding)
        actor_loss.backward()
        self.actor_optimizer.step()

        self.zero_grad()
        alpha_loss = self.alpha_loss(log_prob)
        alpha_loss.backward()
        self.alpha_optimizer.step()

        self.target_critic.soft_update(self.critic, self.config.tau)
        self.zero_grad()
        self.step_count += 1

        return {
            "critic_loss": critic_loss.item(),
            "actor_loss": actor_loss.item(),
            "alpha_loss": alpha_loss.item(),
            "aux_loss": aux_value,
            "alpha": self.alpha,
            "q1_mean": float(q1.data.mean()),
            "q2_mean": float(q2.data.mean()),
            "target_mean": float(np.mean(targets)),
            "log_prob_mean": float(log_prob.data.mean()),
        }

    # ------------------------------------------------------------ checkpoints

    def _modules(self) -> Dict[str, Any]:
        modules = {
            "encoder": self.encoder,
            "actor": self.actor,
            "critic": self.critic,
            "target_critic": self.target_critic,
        }
        if self.fusion is not None:
            modules["fusion"] = self.fusion
        return modules

    def _optimizers(self) -> Dict[str, Adam]:
        return {"critic": self.critic_optimizer, "actor": self.actor_optimizer, "alpha": self.alpha_optimizer}

    def state_dict(self) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
        """(tensors, meta) covering parameters, optimizer moments, RNG streams and step count"""
        tensors: Dict[str, np.ndarray] = {"log_alpha": self.log_alpha.data.copy()}
        for prefix, module in self._modules().items():
            for name, array in module.state_dict().items():
                tensors[f"{prefix}.{name}"] = array
        for prefix, optimizer in self._optimizers().items():
            for name, array in optimizer.state_dict().items():
                tensors[f"optim.{prefix}.{name}"] = array
        meta = {
            "kind": self.name,
            "encoder_config": self.encoder_config.model_dump(mode="json"),
            "agent_config": self.config.model_dump(mode="json"),
            "action_dim": self.action_dim,
            "state_dim": self.state_dim,
            "aux": self.aux,
            "seed": self.seed,
            "step_count": self.step_count,
            "rng": {name: rng.bit_generator.state for name, rng in self.rngs.items()},
        }
        return tensors, meta

    def load_state_dict(self, tensors: Dict[str, np.ndarray], meta: Dict[str, Any]):
        try:
            self.log_alpha.data = tensors["log_alpha"].astype(self.dtype)
            for prefix, module in self._modules().items():
                module.load_state_dict(_strip(tensors, f"{prefix}."))
            for prefix, optimizer in self._optimizers().items():
                optimizer.load_state_dict(_strip(tensors, f"optim.{prefix}."))
        except (KeyError, InvalidArgumentError) as exc:
            raise CheckpointError(f"checkpoint does not match this agent: {exc}")
        for name, state in meta.get("rng", {}).items():
            self.rngs[name].bit_generator.state = state
        self.step_count = int(meta.get("step_count", 0))

    @classmethod
    def from_state_dict(cls, tensors: Dict[str, np.ndarray], meta: Dict[str, Any]) -> "SACAgent":
        agent = cls(
            EncoderConfig(**meta["encoder_config"]),
            AgentConfig(**meta["agent_config"]),
            action_dim=int(meta["action_dim"]),
            state_dim=meta.get("state_dim"),
            aux=bool(meta.get("aux", True)),
            seed=int(meta.get("seed", 0))
        )
        agent.load_state_dict(tensors, meta)
        return agent


def _strip(tensors: Dict[str, np.ndarray], prefix: str) -> Dict[str, np.ndarray]:
    return {name[len(prefix):]: array for name, array in tensors.items() if name.startswith(prefix)}
