//! CartPole-v1 dynamics: a force-actuated cart balancing an inverted pendulum.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EnvError, EnvKind, Observation, StepOutcome, DEFAULT_T_MAX};

const GRAVITY: f64 = 9.8;
const MASS_CART: f64 = 1.0;
const MASS_POLE: f64 = 0.1;
const TOTAL_MASS: f64 = MASS_CART + MASS_POLE;
/// Half the pole length.
const LENGTH: f64 = 0.5;
const POLE_MASS_LENGTH: f64 = MASS_POLE * LENGTH;
const FORCE_MAG: f64 = 10.0;
/// Control interval in seconds.
const TAU: f64 = 0.02;

/// Episode fails when the cart leaves `|x| <= 2.4`.
pub const X_THRESHOLD: f64 = 2.4;
/// Episode fails when the pole tilts past 12 degrees (~0.2095 rad).
pub const THETA_THRESHOLD: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;

const RESET_BOUND: f64 = 0.05;

/// Physical state of the cart-pole system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartPoleState {
    /// Cart position (m).
    pub x: f64,
    /// Cart velocity (m/s).
    pub x_dot: f64,
    /// Pole angle from vertical (rad).
    pub theta: f64,
    /// Pole angular velocity (rad/s).
    pub theta_dot: f64,
}

impl CartPoleState {
    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.x_dot, self.theta, self.theta_dot]
    }

    /// True when the state violates the position or angle bounds.
    pub fn is_terminal(&self) -> bool {
        self.x < -X_THRESHOLD
            || self.x > X_THRESHOLD
            || self.theta < -THETA_THRESHOLD
            || self.theta > THETA_THRESHOLD
    }
}

/// Advance the physics one control interval.
///
/// Semi-explicit Euler with the old derivatives used for the position
/// updates, matching the reference CartPole-v1 integrator. Action 0 pushes
/// left (-10 N), action 1 pushes right (+10 N).
pub fn physics_step(state: CartPoleState, action: usize) -> CartPoleState {
    let force = if action == 1 { FORCE_MAG } else { -FORCE_MAG };
    let cos_theta = state.theta.cos();
    let sin_theta = state.theta.sin();

    let temp =
        (force + POLE_MASS_LENGTH * state.theta_dot * state.theta_dot * sin_theta) / TOTAL_MASS;
    let theta_acc = (GRAVITY * sin_theta - cos_theta * temp)
        / (LENGTH * (4.0 / 3.0 - MASS_POLE * cos_theta * cos_theta / TOTAL_MASS));
    let x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_theta / TOTAL_MASS;

    CartPoleState {
        x: state.x + TAU * state.x_dot,
        x_dot: state.x_dot + TAU * x_acc,
        theta: state.theta + TAU * state.theta_dot,
        theta_dot: state.theta_dot + TAU * theta_acc,
    }
}

/// Episodic CartPole environment. Reward is +1.0 on every step taken,
/// including the step that terminates or truncates the episode, so the
/// accumulated reward equals the number of steps survived (max 500).
#[derive(Debug, Clone)]
pub struct CartPoleEnv {
    state: CartPoleState,
    steps: u32,
    max_steps: u32,
    done: bool,
}

impl CartPoleEnv {
    pub fn new() -> Self {
        Self::with_max_steps(DEFAULT_T_MAX)
    }

    pub fn with_max_steps(max_steps: u32) -> Self {
        Self {
            state: CartPoleState { x: 0.0, x_dot: 0.0, theta: 0.0, theta_dot: 0.0 },
            steps: 0,
            max_steps,
            done: true,
        }
    }

    /// Draw all four state fields i.i.d. uniform from [-0.05, 0.05].
    pub fn reset(&mut self, seed: u64) -> Observation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.state = CartPoleState {
            x: rng.random_range(-RESET_BOUND..=RESET_BOUND),
            x_dot: rng.random_range(-RESET_BOUND..=RESET_BOUND),
            theta: rng.random_range(-RESET_BOUND..=RESET_BOUND),
            theta_dot: rng.random_range(-RESET_BOUND..=RESET_BOUND),
        };
        self.steps = 0;
        self.done = false;
        self.observation()
    }

    /// Start an episode from an explicit state (fixture replay, edge cases).
    pub fn reset_to(&mut self, state: CartPoleState) -> Observation {
        self.state = state;
        self.steps = 0;
        self.done = false;
        self.observation()
    }

    pub fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeFinished);
        }
        if action >= 2 {
            return Err(EnvError::InvalidAction { env: EnvKind::CartPole, action, n_actions: 2 });
        }

        self.state = physics_step(self.state, action);
        self.steps += 1;

        let terminated = self.state.is_terminal();
        let truncated = !terminated && self.steps >= self.max_steps;
        self.done = terminated || truncated;

        Ok(StepOutcome { observation: self.observation(), reward: 1.0, terminated, truncated })
    }

    pub fn state(&self) -> CartPoleState {
        self.state
    }

    pub fn observation(&self) -> Observation {
        Observation::new(self.state.as_array().to_vec())
    }
}

impl Default for CartPoleEnv {
    fn default() -> Self {
        Self::new()
    }
}
