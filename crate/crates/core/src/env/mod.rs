//! Classic-control environments with Gym-conformant episodic semantics.
//!
//! Both environments are plain state machines: `reset` seeds the initial
//! state, `step` advances the physics one control interval and reports the
//! reward plus termination/truncation flags. Identical `(kind, seed, action
//! sequence)` triples produce bit-identical trajectories, which the
//! Metropolis-Hastings trainer relies on for common-random-number reward
//! comparisons.

mod acrobot;
mod cartpole;

pub use acrobot::{AcrobotEnv, AcrobotState};
pub use cartpole::{CartPoleEnv, CartPoleState};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Default step budget per episode (both environments truncate at 500 steps).
pub const DEFAULT_T_MAX: u32 = 500;

/// Which environment to instantiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    CartPole,
    Acrobot,
}

impl EnvKind {
    /// Dimension of the observation vector fed to policies.
    pub fn obs_dim(self) -> usize {
        match self {
            EnvKind::CartPole => 4,
            EnvKind::Acrobot => 6,
        }
    }

    /// Number of discrete actions.
    pub fn n_actions(self) -> usize {
        match self {
            EnvKind::CartPole => 2,
            EnvKind::Acrobot => 3,
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvKind::CartPole => write!(f, "cartpole"),
            EnvKind::Acrobot => write!(f, "acrobot"),
        }
    }
}

impl FromStr for EnvKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cartpole" => Ok(EnvKind::CartPole),
            "acrobot" => Ok(EnvKind::Acrobot),
            other => Err(format!("unknown environment '{other}' (expected cartpole|acrobot)")),
        }
    }
}

/// Observation vector handed to the policy.
///
/// CartPole exposes the raw 4-dimensional state; Acrobot exposes
/// `(cos th1, sin th1, cos th2, sin th2, th1_dot, th2_dot)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub values: Vec<f64>,
}

impl Observation {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    /// Goal or failure condition met on this step.
    pub terminated: bool,
    /// Step budget exhausted on this step.
    pub truncated: bool,
}

impl StepOutcome {
    /// The episode is over after this step.
    pub fn is_done(&self) -> bool {
        self.terminated || self.truncated
    }
}

/// Contract violations when driving an environment.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvError {
    #[error("step called on a finished episode; call reset first")]
    EpisodeFinished,
    #[error("invalid action {action} for {env} (valid: 0..{n_actions})")]
    InvalidAction {
        env: EnvKind,
        action: usize,
        n_actions: usize,
    },
}

/// A single environment instance behind one dispatching interface.
#[derive(Debug, Clone)]
pub enum Env {
    CartPole(CartPoleEnv),
    Acrobot(AcrobotEnv),
}

impl Env {
    pub fn new(kind: EnvKind) -> Self {
        Self::with_max_steps(kind, DEFAULT_T_MAX)
    }

    pub fn with_max_steps(kind: EnvKind, max_steps: u32) -> Self {
        match kind {
            EnvKind::CartPole => Env::CartPole(CartPoleEnv::with_max_steps(max_steps)),
            EnvKind::Acrobot => Env::Acrobot(AcrobotEnv::with_max_steps(max_steps)),
        }
    }

    pub fn kind(&self) -> EnvKind {
        match self {
            Env::CartPole(_) => EnvKind::CartPole,
            Env::Acrobot(_) => EnvKind::Acrobot,
        }
    }

    /// Draw a fresh initial state. Same seed, same initial state.
    pub fn reset(&mut self, seed: u64) -> Observation {
        match self {
            Env::CartPole(env) => env.reset(seed),
            Env::Acrobot(env) => env.reset(seed),
        }
    }

    pub fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        match self {
            Env::CartPole(env) => env.step(action),
            Env::Acrobot(env) => env.step(action),
        }
    }

    pub fn obs_dim(&self) -> usize {
        self.kind().obs_dim()
    }

    pub fn n_actions(&self) -> usize {
        self.kind().n_actions()
    }
}

/// An action-selection function with per-episode internal state.
pub trait Policy {
    /// Reset internal state (e.g. membrane potentials) at episode start.
    fn begin_episode(&mut self);

    /// Pick an action for the observation, updating internal state.
    fn act(&mut self, obs: &Observation) -> usize;
}

/// Blanket impl so stateless closures can act as policies in tests and evals.
impl<F: FnMut(&Observation) -> usize> Policy for F {
    fn begin_episode(&mut self) {}

    fn act(&mut self, obs: &Observation) -> usize {
        self(obs)
    }
}

/// Run one full episode and return `(accumulated reward, steps taken)`.
///
/// The policy's internal state is reset at episode start. The accumulated
/// reward is the sum of per-step rewards until termination or truncation at
/// `t_max` steps.
pub fn run_episode(
    kind: EnvKind,
    policy: &mut impl Policy,
    seed: u64,
    t_max: u32,
) -> Result<(f64, u32), EnvError> {
    let mut env = Env::with_max_steps(kind, t_max);
    let mut obs = env.reset(seed);
    policy.begin_episode();

    let mut total = 0.0;
    let mut steps = 0u32;
    loop {
        let action = policy.act(&obs);
        let outcome = env.step(action)?;
        total += outcome.reward;
        steps += 1;
        if outcome.is_done() {
            return Ok((total, steps));
        }
        obs = outcome.observation;
    }
}
