//! Deep Q-Learning baseline: dense ReLU network, experience replay,
//! epsilon-greedy exploration, Adam, and a periodically synced target network.

mod net;
mod replay;

pub use net::{QNetwork, HIDDEN_WIDTH};
pub use replay::{ReplayBuffer, Transition};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Env, EnvKind};

/// Baseline hyper-parameters. Defaults are the standard values used for both
/// environments; everything is config-exposed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DqlConfig {
    pub learning_rate: f64,
    /// Discount factor in (0, 1].
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Per-episode multiplicative decay of epsilon.
    pub epsilon_decay: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Target network sync period, in TD updates.
    pub target_sync_interval: u64,
    pub max_episodes: usize,
    /// Stop once an episode reaches this accumulated reward.
    pub stop_at_reward: Option<f64>,
}

impl Default for DqlConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            gamma: 0.99,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay: 0.995,
            batch_size: 64,
            buffer_capacity: 100_000,
            target_sync_interval: 100,
            max_episodes: 1000,
            stop_at_reward: None,
        }
    }
}

impl DqlConfig {
    /// Panics on out-of-range hyper-parameters.
    pub fn assert_valid(&self) {
        assert!(self.gamma > 0.0 && self.gamma <= 1.0, "gamma must be in (0, 1]");
        assert!(
            (0.0..=1.0).contains(&self.epsilon_start) && (0.0..=1.0).contains(&self.epsilon_end),
            "epsilon bounds must be in [0, 1]"
        );
        assert!(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0, "epsilon_decay in (0, 1]");
        assert!(self.learning_rate > 0.0, "learning_rate must be > 0");
        assert!(self.batch_size >= 1, "batch_size must be >= 1");
        assert!(self.buffer_capacity >= 1, "buffer_capacity must be >= 1");
        assert!(self.target_sync_interval >= 1, "target_sync_interval must be >= 1");
    }
}

/// One row of the reward-per-episode series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub reward: f64,
    /// Exploration rate in effect during the episode.
    pub epsilon: f64,
}

/// Outcome of a DQL training run.
#[derive(Debug, Clone)]
pub struct DqlTrainResult {
    pub episodes: Vec<EpisodeRecord>,
    pub best_net: QNetwork,
    pub best_reward: f64,
    /// Episode at which the best reward was first reached.
    pub best_episode: usize,
}

/// Epsilon-greedy over Q-values; greedy ties break to the lowest index.
pub fn epsilon_greedy(q_values: &[f64], epsilon: f64, rng: &mut impl Rng) -> usize {
    if rng.random::<f64>() < epsilon {
        rng.random_range(0..q_values.len())
    } else {
        argmax(q_values)
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

/// Bellman targets `y = r + gamma * max_a Q_target(s', a) * (1 - done)`.
pub fn compute_targets(target_net: &QNetwork, batch: &[&Transition], gamma: f64) -> Vec<f64> {
    batch
        .iter()
        .map(|t| {
            if t.done {
                t.reward
            } else {
                let next_q = target_net.forward(&t.next_obs);
                t.reward + gamma * next_q[argmax(&next_q)]
            }
        })
        .collect()
}

/// Mean-squared TD loss on the taken actions and its gradient w.r.t. every
/// network parameter (flat, same layout as [`QNetwork::params`]).
pub fn loss_and_grads(net: &QNetwork, batch: &[&Transition], targets: &[f64]) -> (f64, Vec<f64>) {
    assert!(!batch.is_empty(), "empty batch");
    assert_eq!(batch.len(), targets.len(), "batch/target length mismatch");

    let mut grads = vec![0.0; net.n_params()];
    let mut loss = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for (t, &y) in batch.iter().zip(targets) {
        let activations = net.forward_cached(&t.obs);
        let q = activations.last().expect("output layer");
        let err = q[t.action] - y;
        loss += err * err * scale;

        let mut d_out = vec![0.0; q.len()];
        d_out[t.action] = 2.0 * err * scale;
        net.backward_into(&activations, &d_out, &mut grads);
    }
    (loss, grads)
}

/// One TD update: compute targets from the target network, take the MSE
/// gradient on the online network and apply one Adam step. Returns the loss.
pub fn td_update(
    net: &mut QNetwork,
    batch: &[&Transition],
    target_net: &QNetwork,
    config: &DqlConfig,
) -> f64 {
    let targets = compute_targets(target_net, batch, config.gamma);
    let (loss, grads) = loss_and_grads(net, batch, &targets);
    net.adam_apply(&grads, config.learning_rate);
    loss
}

/// Standard DQL training loop. Episode `k` resets the environment with
/// seed `seed + k`; exploration noise comes from an independent stream
/// derived from `seed`.
pub fn dql_train(
    kind: EnvKind,
    hidden_layers: usize,
    config: &DqlConfig,
    seed: u64,
) -> DqlTrainResult {
    config.assert_valid();
    let obs_dim = kind.obs_dim();
    let n_actions = kind.n_actions();

    let mut init_rng = ChaCha8Rng::seed_from_u64(seed ^ NET_STREAM);
    let mut action_rng = ChaCha8Rng::seed_from_u64(seed ^ EXPLORE_STREAM);
    let mut net = QNetwork::new(obs_dim, n_actions, hidden_layers, &mut init_rng);
    let mut target_net = net.clone();
    let mut buffer = ReplayBuffer::new(config.buffer_capacity);

    let mut epsilon = config.epsilon_start;
    let mut updates = 0u64;
    let mut episodes = Vec::with_capacity(config.max_episodes);
    let mut best_reward = f64::NEG_INFINITY;
    let mut best_net = net.clone();
    let mut best_episode = 0;

    let mut env = Env::new(kind);
    for episode in 0..config.max_episodes {
        let mut obs = env.reset(seed.wrapping_add(episode as u64)).values;
        let mut episode_reward = 0.0;
        loop {
            let q = net.forward(&obs);
            let action = epsilon_greedy(&q, epsilon, &mut action_rng);
            let outcome = env.step(action).expect("live episode, valid action");
            episode_reward += outcome.reward;

            let next_obs = outcome.observation.values.clone();
            buffer.push(Transition {
                obs: std::mem::take(&mut obs),
                action,
                reward: outcome.reward,
                // Bootstrapping is masked only on true terminations, not on
                // step-budget truncations.
                done: outcome.terminated,
                next_obs: next_obs.clone(),
            });
            obs = next_obs;

            if buffer.len() >= config.batch_size {
                let batch = buffer.sample(config.batch_size, &mut action_rng);
                td_update(&mut net, &batch, &target_net, config);
                updates += 1;
                if updates.is_multiple_of(config.target_sync_interval) {
                    target_net = net.clone();
                }
            }

            if outcome.is_done() {
                break;
            }
        }

        episodes.push(EpisodeRecord { episode, reward: episode_reward, epsilon });
        if episode_reward > best_reward {
            best_reward = episode_reward;
            best_net = net.clone();
            best_episode = episode;
        }
        epsilon = (epsilon * config.epsilon_decay).max(config.epsilon_end);

        if let Some(stop) = config.stop_at_reward {
            if episode_reward >= stop {
                break;
            }
        }
    }

    DqlTrainResult { episodes, best_net, best_reward, best_episode }
}

const NET_STREAM: u64 = 0x6e65745f_696e6974; // "net_init"
const EXPLORE_STREAM: u64 = 0x6578706c_6f726521; // "explore!"
