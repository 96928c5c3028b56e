//! Gradient-free reinforcement learning for spiking policies.
//!
//! This crate trains a one-layer recurrent spiking neural network to control
//! classic dynamical agents (CartPole, Acrobot) with reward-driven
//! Metropolis-Hastings sampling: parameter perturbations are proposed from a
//! Gaussian and accepted or rejected based on the episodic reward they earn,
//! so no gradients ever flow through the spike nonlinearity. A compact Deep
//! Q-Learning baseline (dense ReLU network, experience replay, epsilon-greedy,
//! Adam) is included for comparison runs.
//!
//! The pieces compose bottom-up:
//!
//! - [`env`] — deterministic, seed-reproducible CartPole and Acrobot dynamics
//!   behind one episodic interface.
//! - [`snn`] — the leaky integrate-and-fire policy: input weights, lateral
//!   recurrence, spike-count action readout.
//! - [`mh`] — the Metropolis-Hastings trainer: propose, evaluate episodic
//!   reward as a pseudo-likelihood, accept/reject, track the best parameters.
//! - [`dql`] — the Deep Q-Learning baseline with manual backpropagation.
//!
//! The companion `spike-mh-cli` crate layers experiment orchestration, CSV
//! logging and plotting on top.

pub mod dql;
pub mod env;
pub mod mh;
pub mod snn;
