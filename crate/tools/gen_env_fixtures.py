#!/usr/bin/env python3
"""Generate reference trajectory fixtures for the CartPole-v1 and Acrobot-v1 dynamics.

Transcribes the standard float64 dynamics (semi-implicit Euler for CartPole,
single-step RK4 with angle wrapping and velocity bounds for Acrobot) and records
short random-action trajectories as JSON. The Rust environment tests replay these
fixtures and must match every state component to 1e-6.

Run from the repository root:

    python3 tools/gen_env_fixtures.py
"""

import json
import math
import random
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"


# ---------------------------------------------------------------------------
# CartPole-v1
# ---------------------------------------------------------------------------

GRAVITY = 9.8
MASS_CART = 1.0
MASS_POLE = 0.1
TOTAL_MASS = MASS_CART + MASS_POLE
LENGTH = 0.5  # half pole length
POLE_MASS_LENGTH = MASS_POLE * LENGTH
FORCE_MAG = 10.0
TAU = 0.02
THETA_THRESHOLD = 12.0 * 2.0 * math.pi / 360.0
X_THRESHOLD = 2.4


def cartpole_step(state, action):
    x, x_dot, theta, theta_dot = state
    force = FORCE_MAG if action == 1 else -FORCE_MAG
    costheta = math.cos(theta)
    sintheta = math.sin(theta)

    temp = (force + POLE_MASS_LENGTH * theta_dot**2 * sintheta) / TOTAL_MASS
    thetaacc = (GRAVITY * sintheta - costheta * temp) / (
        LENGTH * (4.0 / 3.0 - MASS_POLE * costheta**2 / TOTAL_MASS)
    )
    xacc = temp - POLE_MASS_LENGTH * thetaacc * costheta / TOTAL_MASS

    x = x + TAU * x_dot
    x_dot = x_dot + TAU * xacc
    theta = theta + TAU * theta_dot
    theta_dot = theta_dot + TAU * thetaacc

    terminated = (
        x < -X_THRESHOLD or x > X_THRESHOLD or theta < -THETA_THRESHOLD or theta > THETA_THRESHOLD
    )
    reward = 1.0
    return [x, x_dot, theta, theta_dot], reward, terminated


# ---------------------------------------------------------------------------
# Acrobot-v1 ("book" dynamics variant)
# ---------------------------------------------------------------------------

LINK_MASS = 1.0
LINK_LENGTH = 1.0
LINK_COM = 0.5
LINK_MOI = 1.0
ACRO_G = 9.8
ACRO_DT = 0.2
MAX_VEL_1 = 4.0 * math.pi
MAX_VEL_2 = 9.0 * math.pi
AVAIL_TORQUE = [-1.0, 0.0, 1.0]


def acrobot_dsdt(s, torque):
    m1 = m2 = LINK_MASS
    l1 = LINK_LENGTH
    lc1 = lc2 = LINK_COM
    i1 = i2 = LINK_MOI
    g = ACRO_G
    theta1, theta2, dtheta1, dtheta2 = s

    d1 = m1 * lc1**2 + m2 * (l1**2 + lc2**2 + 2.0 * l1 * lc2 * math.cos(theta2)) + i1 + i2
    d2 = m2 * (lc2**2 + l1 * lc2 * math.cos(theta2)) + i2
    phi2 = m2 * lc2 * g * math.cos(theta1 + theta2 - math.pi / 2.0)
    phi1 = (
        -m2 * l1 * lc2 * dtheta2**2 * math.sin(theta2)
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * math.sin(theta2)
        + (m1 * lc1 + m2 * l1) * g * math.cos(theta1 - math.pi / 2.0)
        + phi2
    )
    ddtheta2 = (
        torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1**2 * math.sin(theta2) - phi2
    ) / (m2 * lc2**2 + i2 - d2**2 / d1)
    ddtheta1 = -(d2 * ddtheta2 + phi1) / d1
    return [dtheta1, dtheta2, ddtheta1, ddtheta2]


def wrap(x, lo, hi):
    diff = hi - lo
    while x > hi:
        x -= diff
    while x < lo:
        x += diff
    return x


def bound(x, lo, hi):
    return min(max(x, lo), hi)


def acrobot_step(state, action):
    torque = AVAIL_TORQUE[action]
    dt = ACRO_DT
    dt2 = dt / 2.0

    y0 = list(state)
    k1 = acrobot_dsdt(y0, torque)
    k2 = acrobot_dsdt([y0[i] + dt2 * k1[i] for i in range(4)], torque)
    k3 = acrobot_dsdt([y0[i] + dt2 * k2[i] for i in range(4)], torque)
    k4 = acrobot_dsdt([y0[i] + dt * k3[i] for i in range(4)], torque)
    ns = [y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(4)]

    ns[0] = wrap(ns[0], -math.pi, math.pi)
    ns[1] = wrap(ns[1], -math.pi, math.pi)
    ns[2] = bound(ns[2], -MAX_VEL_1, MAX_VEL_1)
    ns[3] = bound(ns[3], -MAX_VEL_2, MAX_VEL_2)

    terminated = -math.cos(ns[0]) - math.cos(ns[1] + ns[0]) > 1.0
    reward = 0.0 if terminated else -1.0
    return ns, reward, terminated


# ---------------------------------------------------------------------------
# Fixture emission
# ---------------------------------------------------------------------------


def make_trajectory(step_fn, initial_state, actions):
    state = list(initial_state)
    states, rewards, terminated_flags = [], [], []
    for a in actions:
        state, reward, terminated = step_fn(state, a)
        states.append(list(state))
        rewards.append(reward)
        terminated_flags.append(terminated)
        if terminated:
            break
    return {
        "initial_state": list(initial_state),
        "actions": actions[: len(states)],
        "states": states,
        "rewards": rewards,
        "terminated": terminated_flags,
    }


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240917)
    n_steps = 20

    cartpole_trajs = []
    # Deterministic hand-checkable trajectory from the origin.
    cartpole_trajs.append(make_trajectory(cartpole_step, [0.0, 0.0, 0.0, 0.0], [1] * n_steps))
    for _ in range(3):
        init = [rng.uniform(-0.05, 0.05) for _ in range(4)]
        actions = [rng.randrange(2) for _ in range(n_steps)]
        cartpole_trajs.append(make_trajectory(cartpole_step, init, actions))

    acrobot_trajs = []
    acrobot_trajs.append(make_trajectory(acrobot_step, [0.0, 0.0, 0.0, 0.0], [2] * n_steps))
    for _ in range(3):
        init = [rng.uniform(-0.1, 0.1) for _ in range(4)]
        actions = [rng.randrange(3) for _ in range(n_steps)]
        acrobot_trajs.append(make_trajectory(acrobot_step, init, actions))

    with open(OUT_DIR / "cartpole_reference.json", "w") as f:
        json.dump({"env": "cartpole", "trajectories": cartpole_trajs}, f, indent=1)
    with open(OUT_DIR / "acrobot_reference.json", "w") as f:
        json.dump({"env": "acrobot", "trajectories": acrobot_trajs}, f, indent=1)

    # Single-step sanity values, printed for eyeballing against hand evaluation.
    s, r, t = cartpole_step([0.0, 0.0, 0.0, 0.0], 1)
    print("cartpole (0,0,0,0) action=1 ->", s, r, t)
    s, r, t = acrobot_step([0.0, 0.0, 0.0, 0.0], 1)
    print("acrobot  (0,0,0,0) action=1 ->", s, r, t)
    print("wrote fixtures to", OUT_DIR)


if __name__ == "__main__":
    main()
