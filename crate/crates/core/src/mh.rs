//! Reward-driven Metropolis-Hastings training.
//!
//! Each iteration proposes a Gaussian perturbation of every learnable
//! parameter, rolls out one (or more) episodes for the proposal and for the
//! previous parameters, treats the accumulated rewards as pseudo-likelihoods
//! and accepts the proposal with probability `min(p, 1)` where
//! `p = (L1 * P1) / (L2 * P2)`. The best reward ever observed and the
//! parameters that earned it are tracked on the side; the best parameters are
//! what gets deployed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::env::{run_episode, EnvKind, DEFAULT_T_MAX};
use crate::snn::{ParamTensor, SnnPolicy};

/// Prior over the flattened parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum PriorKind {
    /// Improper flat prior: the ratio always cancels to 1.
    Flat,
    /// Zero-mean isotropic Gaussian with the given standard deviation.
    Gaussian { sigma: f64 },
}

/// Sampler configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    /// Number of MH iterations (two episode evaluations each).
    pub n_iter: usize,
    /// Standard deviation of the Gaussian proposal on every parameter.
    pub proposal_sigma: f64,
    pub prior: PriorKind,
    /// Subtracted from accumulated rewards so pseudo-likelihoods are strictly
    /// positive (0 for CartPole, -501 for Acrobot).
    pub reward_floor: f64,
    pub base_seed: u64,
    /// Episodes averaged per reward evaluation; 1 matches the plain scheme.
    pub episodes_per_eval: usize,
    /// Evaluate proposal and previous parameters under the same episode seed
    /// (common random numbers). Disable for fully independent evaluations.
    pub common_random_numbers: bool,
    /// Record-keeping variant: store the post-decision chain state as the
    /// best parameters instead of the proposal that achieved the record.
    pub literal_best_rule: bool,
}

impl MhConfig {
    /// Defaults for an environment (per-environment reward floor and budget).
    pub fn for_env(kind: EnvKind) -> Self {
        let (n_iter, reward_floor) = match kind {
            EnvKind::CartPole => (500, 0.0),
            EnvKind::Acrobot => (1000, -501.0),
        };
        Self {
            n_iter,
            proposal_sigma: 0.1,
            prior: PriorKind::Flat,
            reward_floor,
            base_seed: 0,
            episodes_per_eval: 1,
            common_random_numbers: true,
            literal_best_rule: false,
        }
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.n_iter < 1 {
            return Err(TrainError::InvalidConfig("n_iter must be >= 1".into()));
        }
        if !self.proposal_sigma.is_finite() || self.proposal_sigma <= 0.0 {
            return Err(TrainError::InvalidConfig("proposal_sigma must be > 0".into()));
        }
        if self.episodes_per_eval < 1 {
            return Err(TrainError::InvalidConfig("episodes_per_eval must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-iteration log entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub iteration: usize,
    /// Accumulated reward of the proposal, R(W').
    pub reward_proposal: f64,
    /// Accumulated reward of the previous parameters, re-evaluated this
    /// iteration under the same seed as the proposal.
    pub reward_previous: f64,
    pub acceptance_ratio: f64,
    pub accepted: bool,
    pub best_reward_so_far: f64,
}

/// Outcome of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub best_params: ParamTensor,
    pub best_reward: f64,
    /// Reward of the initial parameters, evaluated before the first iteration.
    pub initial_reward: f64,
    pub chain: Vec<ChainRecord>,
}

impl TrainResult {
    /// Iteration at which the best reward was first reached (0 = initial
    /// evaluation).
    pub fn best_iteration(&self) -> usize {
        if self.initial_reward >= self.best_reward {
            return 0;
        }
        self.chain
            .iter()
            .find(|rec| rec.reward_proposal >= self.best_reward)
            .map(|rec| rec.iteration)
            .unwrap_or(0)
    }

    /// Episodes consumed up to and including the best iteration: one initial
    /// evaluation plus two per iteration.
    pub fn best_episode(&self) -> usize {
        let n = self.best_iteration();
        if n == 0 {
            1
        } else {
            1 + 2 * n
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "accumulated reward {reward} is not above the reward floor {floor}; \
         lower the floor so pseudo-likelihoods stay positive"
    )]
    RewardFloor { reward: f64, floor: f64 },
}

/// Gaussian proposal: every scalar parameter receives independent additive
/// `N(0, sigma^2)` noise; `alpha_decay` and `mu` are then clamped back into
/// range. The proposal is symmetric in the unclamped space.
pub fn propose(prev: &ParamTensor, sigma: f64, rng: &mut impl Rng) -> ParamTensor {
    assert!(sigma > 0.0, "proposal sigma must be > 0");
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    let mut next = prev.clone();
    for w in next.w_in.iter_mut().chain(next.w_lateral.iter_mut()) {
        *w += normal.sample(rng);
    }
    next.alpha_decay += normal.sample(rng);
    next.mu += normal.sample(rng);
    next.clamp_constraints();
    next
}

/// Shift an accumulated reward into a strictly positive pseudo-likelihood.
///
/// With a floor of 0 this is the raw accumulated reward; environments with
/// negative rewards use a floor below their worst possible episode.
pub fn pseudo_likelihood(accumulated_reward: f64, reward_floor: f64) -> Result<f64, TrainError> {
    if accumulated_reward <= reward_floor {
        return Err(TrainError::RewardFloor { reward: accumulated_reward, floor: reward_floor });
    }
    Ok(accumulated_reward - reward_floor)
}

/// Unnormalized prior density of the flattened parameter vector.
/// Normalization constants cancel in the acceptance ratio.
pub fn prior_density(params: &ParamTensor, prior: &PriorKind) -> f64 {
    match prior {
        PriorKind::Flat => 1.0,
        PriorKind::Gaussian { sigma } => {
            let sq_norm: f64 = params.flatten().iter().map(|v| v * v).sum();
            (-sq_norm / (2.0 * sigma * sigma)).exp()
        }
    }
}

/// The MH acceptance ratio `p = (l1 * p1) / (l2 * p2)`.
///
/// All inputs must be strictly positive; `pseudo_likelihood` guarantees this
/// for the likelihood terms.
pub fn acceptance_ratio(l1: f64, l2: f64, p1: f64, p2: f64) -> f64 {
    assert!(
        l1 > 0.0 && l2 > 0.0 && p1 > 0.0 && p2 > 0.0,
        "acceptance ratio requires positive inputs (l1={l1}, l2={l2}, p1={p1}, p2={p2})"
    );
    (l1 * p1) / (l2 * p2)
}

/// Bernoulli accept step: returns `u < min(p, 1)` for `u ~ Uniform(0, 1)`.
/// Always true for `p >= 1`.
pub fn mh_accept(p: f64, rng: &mut impl Rng) -> bool {
    assert!(p >= 0.0, "acceptance probability must be non-negative");
    let u: f64 = rng.random();
    u < p.min(1.0)
}

/// Draw initial parameters for a chain: weights from `N(0, weight_sigma^2)`
/// with fixed initial decay and threshold, on a stream derived from the
/// chain's base seed (distinct from the proposal and accept streams).
pub fn init_params(
    kind: EnvKind,
    base_seed: u64,
    weight_sigma: f64,
    alpha_decay: f64,
    mu: f64,
) -> ParamTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed ^ INIT_STREAM);
    ParamTensor::random_init(kind.obs_dim(), kind.n_actions(), weight_sigma, alpha_decay, mu, &mut rng)
}

/// Mean accumulated reward of the spiking policy over `episodes_per_eval`
/// episodes seeded `seed, seed+1, ...`. One episode reproduces the plain
/// single-rollout evaluation.
pub fn evaluate_reward(
    params: &ParamTensor,
    kind: EnvKind,
    t_snn: usize,
    seed: u64,
    episodes_per_eval: usize,
) -> f64 {
    assert!(episodes_per_eval >= 1, "episodes_per_eval must be >= 1");
    let mut policy = SnnPolicy::new(params, t_snn);
    let mut total = 0.0;
    for k in 0..episodes_per_eval {
        let (reward, _) =
            run_episode(kind, &mut policy, seed.wrapping_add(k as u64), DEFAULT_T_MAX)
                .expect("spiking policy emits valid actions");
        total += reward;
    }
    total / episodes_per_eval as f64
}

/// Train the spiking policy on an environment. Iteration `n` evaluates with
/// episode seed `base_seed + n`; the initial parameters are evaluated once
/// with `base_seed` before the chain starts.
pub fn train(
    kind: EnvKind,
    init_params: &ParamTensor,
    t_snn: usize,
    config: &MhConfig,
) -> Result<TrainResult, TrainError> {
    train_with_observer(kind, init_params, t_snn, config, |_, _| {})
}

/// [`train`] with a per-iteration callback. The callback receives each chain
/// record and, when the record set a new best, the parameters that achieved
/// it (for checkpointing).
pub fn train_with_observer(
    kind: EnvKind,
    init_params: &ParamTensor,
    t_snn: usize,
    config: &MhConfig,
    observer: impl FnMut(&ChainRecord, Option<&ParamTensor>),
) -> Result<TrainResult, TrainError> {
    let episodes = config.episodes_per_eval;
    train_on(
        |params: &ParamTensor, seed: u64| evaluate_reward(params, kind, t_snn, seed, episodes),
        init_params,
        config,
        observer,
    )
}

/// The sampler itself, generic over the reward evaluator so stub objectives
/// can drive it in tests. `evaluate(params, seed)` must be deterministic in
/// its inputs for runs to be reproducible.
///
/// Proposal noise and acceptance draws come from two independent streams
/// derived from `base_seed`, so the proposal sequence is unaffected by how
/// acceptance decisions fall.
pub fn train_on<E, O>(
    mut evaluate: E,
    init_params: &ParamTensor,
    config: &MhConfig,
    mut observer: O,
) -> Result<TrainResult, TrainError>
where
    E: FnMut(&ParamTensor, u64) -> f64,
    O: FnMut(&ChainRecord, Option<&ParamTensor>),
{
    config.validate()?;

    let mut proposal_rng = ChaCha8Rng::seed_from_u64(config.base_seed ^ PROPOSAL_STREAM);
    let mut accept_rng = ChaCha8Rng::seed_from_u64(config.base_seed ^ ACCEPT_STREAM);

    let mut current = init_params.clone();
    let initial_reward = evaluate(&current, config.base_seed);
    let mut best_reward = initial_reward;
    let mut best_params = current.clone();

    let mut chain = Vec::with_capacity(config.n_iter);
    for n in 1..=config.n_iter {
        let proposal = propose(&current, config.proposal_sigma, &mut proposal_rng);

        let seed = config.base_seed.wrapping_add(n as u64);
        let reward_proposal = evaluate(&proposal, seed);
        let prev_seed = if config.common_random_numbers { seed } else { splitmix64(seed) };
        let reward_previous = evaluate(&current, prev_seed);

        let l1 = pseudo_likelihood(reward_proposal, config.reward_floor)?;
        let l2 = pseudo_likelihood(reward_previous, config.reward_floor)?;
        let p1 = prior_density(&proposal, &config.prior);
        let p2 = prior_density(&current, &config.prior);
        let p = acceptance_ratio(l1, l2, p1, p2);
        let accepted = mh_accept(p, &mut accept_rng);

        if accepted {
            current = proposal.clone();
        }

        let mut improved = false;
        if reward_proposal > best_reward {
            best_reward = reward_proposal;
            best_params = if config.literal_best_rule { current.clone() } else { proposal };
            improved = true;
        }

        let record = ChainRecord {
            iteration: n,
            reward_proposal,
            reward_previous,
            acceptance_ratio: p,
            accepted,
            best_reward_so_far: best_reward,
        };
        observer(&record, improved.then_some(&best_params));
        chain.push(record);
    }

    Ok(TrainResult { best_params, best_reward, initial_reward, chain })
}

const PROPOSAL_STREAM: u64 = 0x70726f70_6f73616c; // "proposal"
const ACCEPT_STREAM: u64 = 0x61636365_70742121; // "accept!!"
const INIT_STREAM: u64 = 0x696e6974_5f772121; // "init_w!!"

/// SplitMix64 finalizer; derives the independent-evaluation seed when common
/// random numbers are disabled.
fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
