//! One-layer recurrent spiking policy with leaky integrate-and-fire neurons.
//!
//! The observation enters as an analog current through `w_in`; each output
//! neuron's spikes feed back to the whole output layer through `w_lateral`.
//! One output neuron corresponds to one action, and the action with the most
//! spikes across the micro-steps of a control interval is selected.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::env::{Observation, Policy};

/// Lower clamp for the spiking threshold.
pub const MU_MIN: f64 = 1e-3;

/// All learnable parameters of the spiking policy.
///
/// Serializes to a flat JSON object (`w_in` and `w_lateral` row-major) used
/// for checkpointing best parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamTensor {
    /// Input weights, row-major `(obs_dim x n_actions)`.
    pub w_in: Vec<f64>,
    /// Lateral recurrence weights, row-major `(n_actions x n_actions)`.
    pub w_lateral: Vec<f64>,
    /// Membrane leakage constant, clamped to [0, 1].
    pub alpha_decay: f64,
    /// Spiking threshold, clamped to [MU_MIN, inf).
    pub mu: f64,
    pub obs_dim: usize,
    pub n_actions: usize,
}

impl ParamTensor {
    pub fn zeros(obs_dim: usize, n_actions: usize) -> Self {
        Self {
            w_in: vec![0.0; obs_dim * n_actions],
            w_lateral: vec![0.0; n_actions * n_actions],
            alpha_decay: 0.9,
            mu: 1.0,
            obs_dim,
            n_actions,
        }
    }

    /// Gaussian-initialized weights with fixed initial decay and threshold.
    pub fn random_init(
        obs_dim: usize,
        n_actions: usize,
        weight_sigma: f64,
        alpha_decay: f64,
        mu: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let normal = Normal::new(0.0, weight_sigma).expect("weight_sigma must be finite and >= 0");
        let mut params = Self {
            w_in: (0..obs_dim * n_actions).map(|_| normal.sample(rng)).collect(),
            w_lateral: (0..n_actions * n_actions).map(|_| normal.sample(rng)).collect(),
            alpha_decay,
            mu,
            obs_dim,
            n_actions,
        };
        params.clamp_constraints();
        params
    }

    /// Enforce the parameter-range invariants in place.
    pub fn clamp_constraints(&mut self) {
        self.alpha_decay = self.alpha_decay.clamp(0.0, 1.0);
        self.mu = self.mu.max(MU_MIN);
    }

    /// Weight from input `i` to output neuron `j`.
    pub fn w_in_at(&self, i: usize, j: usize) -> f64 {
        self.w_in[i * self.n_actions + j]
    }

    /// Weight from output neuron `k`'s spike to output neuron `j`.
    pub fn w_lateral_at(&self, k: usize, j: usize) -> f64 {
        self.w_lateral[k * self.n_actions + j]
    }

    /// All parameters flattened in (w_in, w_lateral, alpha_decay, mu) order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.n_params());
        flat.extend_from_slice(&self.w_in);
        flat.extend_from_slice(&self.w_lateral);
        flat.push(self.alpha_decay);
        flat.push(self.mu);
        flat
    }

    pub fn n_params(&self) -> usize {
        self.obs_dim * self.n_actions + self.n_actions * self.n_actions + 2
    }

    pub fn n_neurons(&self) -> usize {
        self.obs_dim + self.n_actions
    }

    /// Check shape consistency and finiteness, e.g. after deserializing.
    pub fn validate(&self) -> Result<(), String> {
        if self.w_in.len() != self.obs_dim * self.n_actions {
            return Err(format!(
                "w_in has {} entries, expected {} ({}x{})",
                self.w_in.len(),
                self.obs_dim * self.n_actions,
                self.obs_dim,
                self.n_actions
            ));
        }
        if self.w_lateral.len() != self.n_actions * self.n_actions {
            return Err(format!(
                "w_lateral has {} entries, expected {} ({}x{})",
                self.w_lateral.len(),
                self.n_actions * self.n_actions,
                self.n_actions,
                self.n_actions
            ));
        }
        let all_finite = self.w_in.iter().chain(self.w_lateral.iter()).all(|v| v.is_finite())
            && self.alpha_decay.is_finite()
            && self.mu.is_finite();
        if !all_finite {
            return Err("parameters contain non-finite values".to_string());
        }
        if !(0.0..=1.0).contains(&self.alpha_decay) {
            return Err(format!("alpha_decay {} outside [0, 1]", self.alpha_decay));
        }
        if self.mu < MU_MIN {
            return Err(format!("mu {} below minimum {MU_MIN}", self.mu));
        }
        Ok(())
    }
}

/// Membrane potentials and the previous micro-step's spikes.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronState {
    /// Membrane potential per output neuron.
    pub v: Vec<f64>,
    /// Binary spike output of the previous micro-step.
    pub last_spikes: Vec<bool>,
}

impl NeuronState {
    pub fn zeros(n_actions: usize) -> Self {
        Self { v: vec![0.0; n_actions], last_spikes: vec![false; n_actions] }
    }

    pub fn reset(&mut self) {
        self.v.fill(0.0);
        self.last_spikes.fill(false);
    }
}

/// Static policy configuration: micro-steps per control step plus topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnnConfig {
    /// Internal SNN micro-steps per environment step (>= 1).
    pub t_snn: usize,
    pub obs_dim: usize,
    pub n_actions: usize,
}

pub const DEFAULT_T_SNN: usize = 5;

impl SnnConfig {
    pub fn new(obs_dim: usize, n_actions: usize, t_snn: usize) -> Self {
        assert!(t_snn >= 1, "t_snn must be >= 1");
        Self { t_snn, obs_dim, n_actions }
    }

    pub fn for_params(params: &ParamTensor, t_snn: usize) -> Self {
        Self::new(params.obs_dim, params.n_actions, t_snn)
    }
}

/// Neuron count of the one-layer topology (inputs are pass-through).
pub fn neuron_count(config: &SnnConfig) -> usize {
    config.obs_dim + config.n_actions
}

/// Learnable parameter count: input weights + lateral weights + decay + threshold.
pub fn param_count(config: &SnnConfig) -> usize {
    config.obs_dim * config.n_actions + config.n_actions * config.n_actions + 2
}

/// Total input current per output neuron:
/// `J = w_in^T * obs + w_lateral^T * last_spikes`.
///
/// Observation components enter as analog currents; there is no spike
/// encoding of inputs. Panics on dimension mismatch.
pub fn compute_input_current(
    obs: &Observation,
    last_spikes: &[bool],
    params: &ParamTensor,
) -> Vec<f64> {
    assert_eq!(obs.len(), params.obs_dim, "observation dimension mismatch");
    assert_eq!(last_spikes.len(), params.n_actions, "spike vector dimension mismatch");

    let mut current = vec![0.0; params.n_actions];
    for (i, &x) in obs.values.iter().enumerate() {
        for (j, c) in current.iter_mut().enumerate() {
            *c += params.w_in_at(i, j) * x;
        }
    }
    for (k, &spiked) in last_spikes.iter().enumerate() {
        if spiked {
            for (j, c) in current.iter_mut().enumerate() {
                *c += params.w_lateral_at(k, j);
            }
        }
    }
    current
}

/// One leaky integrate-and-fire micro-step:
/// `v <- alpha * v + (1 - alpha) * J`; a neuron whose potential reaches the
/// threshold `mu` spikes and resets its potential to zero.
///
/// Panics on non-finite input current (contract violation).
pub fn lif_step(state: &mut NeuronState, current: &[f64], params: &ParamTensor) {
    assert_eq!(current.len(), state.v.len(), "current dimension mismatch");
    let alpha = params.alpha_decay;
    for (i, &j) in current.iter().enumerate() {
        assert!(j.is_finite(), "non-finite input current at neuron {i}");
        let v = alpha * state.v[i] + (1.0 - alpha) * j;
        if v >= params.mu {
            state.last_spikes[i] = true;
            state.v[i] = 0.0;
        } else {
            state.last_spikes[i] = false;
            state.v[i] = v;
        }
    }
}

/// Run `t_snn` micro-steps with the observation held fixed and pick the
/// action whose neuron spiked most. Ties break on the higher final membrane
/// potential, then on the lower neuron index.
///
/// The updated neuron state carries across environment steps within an
/// episode; reset it at episode start.
pub fn select_action(
    obs: &Observation,
    state: &mut NeuronState,
    params: &ParamTensor,
    config: &SnnConfig,
) -> usize {
    assert_eq!(obs.len(), config.obs_dim, "observation dimension mismatch");
    let mut spike_counts = vec![0u32; params.n_actions];
    for _ in 0..config.t_snn {
        let current = compute_input_current(obs, &state.last_spikes, params);
        lif_step(state, &current, params);
        for (count, &spiked) in spike_counts.iter_mut().zip(&state.last_spikes) {
            if spiked {
                *count += 1;
            }
        }
    }

    let mut best = 0;
    for i in 1..params.n_actions {
        if spike_counts[i] > spike_counts[best]
            || (spike_counts[i] == spike_counts[best] && state.v[i] > state.v[best])
        {
            best = i;
        }
    }
    best
}

/// A spiking policy bound to a parameter tensor, usable with
/// [`crate::env::run_episode`].
#[derive(Debug, Clone)]
pub struct SnnPolicy<'a> {
    params: &'a ParamTensor,
    config: SnnConfig,
    state: NeuronState,
}

impl<'a> SnnPolicy<'a> {
    pub fn new(params: &'a ParamTensor, t_snn: usize) -> Self {
        Self {
            params,
            config: SnnConfig::for_params(params, t_snn),
            state: NeuronState::zeros(params.n_actions),
        }
    }

    pub fn state(&self) -> &NeuronState {
        &self.state
    }
}

impl Policy for SnnPolicy<'_> {
    fn begin_episode(&mut self) {
        self.state.reset();
    }

    fn act(&mut self, obs: &Observation) -> usize {
        select_action(obs, &mut self.state, self.params, &self.config)
    }
}
