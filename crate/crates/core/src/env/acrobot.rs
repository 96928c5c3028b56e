//! Acrobot-v1 dynamics: a two-link pendulum actuated only at the second joint.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EnvError, EnvKind, Observation, StepOutcome, DEFAULT_T_MAX};

const LINK_MASS: f64 = 1.0;
const LINK_LENGTH: f64 = 1.0;
const LINK_COM: f64 = 0.5;
const LINK_MOI: f64 = 1.0;
const GRAVITY: f64 = 9.8;
/// Control interval in seconds (one RK4 step per control step).
const DT: f64 = 0.2;

pub const MAX_VEL_1: f64 = 4.0 * PI;
pub const MAX_VEL_2: f64 = 9.0 * PI;

/// Torque applied to the second joint per action index.
const AVAIL_TORQUE: [f64; 3] = [-1.0, 0.0, 1.0];

const RESET_BOUND: f64 = 0.1;

/// Physical state of the two-link pendulum. Angles are measured from the
/// hanging-down position; `theta2` is relative to the first link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcrobotState {
    pub theta1: f64,
    pub theta2: f64,
    /// Bounded to [-4*pi, 4*pi].
    pub theta1_dot: f64,
    /// Bounded to [-9*pi, 9*pi].
    pub theta2_dot: f64,
}

impl AcrobotState {
    pub fn as_array(&self) -> [f64; 4] {
        [self.theta1, self.theta2, self.theta1_dot, self.theta2_dot]
    }

    /// Goal: the free tip swings above the goal line, i.e.
    /// `-cos(th1) - cos(th1 + th2) > 1`.
    pub fn is_terminal(&self) -> bool {
        -self.theta1.cos() - (self.theta1 + self.theta2).cos() > 1.0
    }
}

/// Equations of motion ("book" variant with full inertia terms).
/// Returns the derivative of `[theta1, theta2, theta1_dot, theta2_dot]`.
fn dynamics(s: [f64; 4], torque: f64) -> [f64; 4] {
    let m1 = LINK_MASS;
    let m2 = LINK_MASS;
    let l1 = LINK_LENGTH;
    let lc1 = LINK_COM;
    let lc2 = LINK_COM;
    let i1 = LINK_MOI;
    let i2 = LINK_MOI;
    let g = GRAVITY;
    let [theta1, theta2, dtheta1, dtheta2] = s;

    let d1 =
        m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos()) + i1 + i2;
    let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + i2;
    let phi2 = m2 * lc2 * g * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * theta2.sin()
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * theta2.sin()
        + (m1 * lc1 + m2 * l1) * g * (theta1 - PI / 2.0).cos()
        + phi2;
    let ddtheta2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * theta2.sin()
        - phi2)
        / (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
    let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;

    [dtheta1, dtheta2, ddtheta1, ddtheta2]
}

/// Wrap `x` into [lo, hi] by shifting whole periods, as the reference does.
fn wrap(mut x: f64, lo: f64, hi: f64) -> f64 {
    let diff = hi - lo;
    while x > hi {
        x -= diff;
    }
    while x < lo {
        x += diff;
    }
    x
}

fn bound(x: f64, lo: f64, hi: f64) -> f64 {
    x.clamp(lo, hi)
}

/// Advance the physics one control interval: a single fixed-step RK4
/// integration over `DT`, then wrap angles to [-pi, pi] and clip velocities.
pub fn physics_step(state: AcrobotState, action: usize) -> AcrobotState {
    let torque = AVAIL_TORQUE[action];
    let y0 = state.as_array();
    let dt2 = DT / 2.0;

    let k1 = dynamics(y0, torque);
    let k2 = dynamics(add_scaled(y0, k1, dt2), torque);
    let k3 = dynamics(add_scaled(y0, k2, dt2), torque);
    let k4 = dynamics(add_scaled(y0, k3, DT), torque);

    let mut ns = [0.0; 4];
    for i in 0..4 {
        ns[i] = y0[i] + DT / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    AcrobotState {
        theta1: wrap(ns[0], -PI, PI),
        theta2: wrap(ns[1], -PI, PI),
        theta1_dot: bound(ns[2], -MAX_VEL_1, MAX_VEL_1),
        theta2_dot: bound(ns[3], -MAX_VEL_2, MAX_VEL_2),
    }
}

fn add_scaled(y: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

/// Episodic Acrobot environment. Reward is -1.0 per step until the goal line
/// is crossed, which ends the episode with reward 0.0 on that step.
#[derive(Debug, Clone)]
pub struct AcrobotEnv {
    state: AcrobotState,
    steps: u32,
    max_steps: u32,
    done: bool,
}

impl AcrobotEnv {
    pub fn new() -> Self {
        Self::with_max_steps(DEFAULT_T_MAX)
    }

    pub fn with_max_steps(max_steps: u32) -> Self {
        Self {
            state: AcrobotState { theta1: 0.0, theta2: 0.0, theta1_dot: 0.0, theta2_dot: 0.0 },
            steps: 0,
            max_steps,
            done: true,
        }
    }

    /// Draw all four state fields i.i.d. uniform from [-0.1, 0.1].
    pub fn reset(&mut self, seed: u64) -> Observation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.state = AcrobotState {
            theta1: rng.random_range(-RESET_BOUND..=RESET_BOUND),
            theta2: rng.random_range(-RESET_BOUND..=RESET_BOUND),
            theta1_dot: rng.random_range(-RESET_BOUND..=RESET_BOUND),
            theta2_dot: rng.random_range(-RESET_BOUND..=RESET_BOUND),
        };
        self.steps = 0;
        self.done = false;
        self.observation()
    }

    /// Start an episode from an explicit state (fixture replay, edge cases).
    pub fn reset_to(&mut self, state: AcrobotState) -> Observation {
        self.state = state;
        self.steps = 0;
        self.done = false;
        self.observation()
    }

    pub fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeFinished);
        }
        if action >= 3 {
            return Err(EnvError::InvalidAction { env: EnvKind::Acrobot, action, n_actions: 3 });
        }

        self.state = physics_step(self.state, action);
        self.steps += 1;

        let terminated = self.state.is_terminal();
        let truncated = !terminated && self.steps >= self.max_steps;
        self.done = terminated || truncated;
        let reward = if terminated { 0.0 } else { -1.0 };

        Ok(StepOutcome { observation: self.observation(), reward, terminated, truncated })
    }

    pub fn state(&self) -> AcrobotState {
        self.state
    }

    pub fn observation(&self) -> Observation {
        let s = &self.state;
        Observation::new(vec![
            s.theta1.cos(),
            s.theta1.sin(),
            s.theta2.cos(),
            s.theta2.sin(),
            s.theta1_dot,
            s.theta2_dot,
        ])
    }
}

impl Default for AcrobotEnv {
    fn default() -> Self {
        Self::new()
    }
}
