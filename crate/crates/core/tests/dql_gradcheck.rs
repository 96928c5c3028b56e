//! Backpropagation integrity: analytic gradients vs central finite
//! differences, and Q-learning convergence on a toy MDP with a value
//! iteration oracle.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spike_mh::dql::{
    compute_targets, loss_and_grads, td_update, DqlConfig, QNetwork, ReplayBuffer, Transition,
};

fn random_transition(obs_dim: usize, n_actions: usize, rng: &mut impl Rng) -> Transition {
    Transition {
        obs: (0..obs_dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
        action: rng.random_range(0..n_actions),
        reward: rng.random_range(-2.0..2.0),
        next_obs: (0..obs_dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
        done: rng.random::<f64>() < 0.2,
    }
}

#[test]
fn backprop_matches_central_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let h = 1e-5;
    let mut worst = 0.0f64;

    for case in 0..100 {
        let obs_dim = rng.random_range(2..6);
        let n_actions = rng.random_range(2..4);
        let hidden_layers = case % 4;
        let mut net = QNetwork::new(obs_dim, n_actions, hidden_layers, &mut rng);
        let target_net = QNetwork::new(obs_dim, n_actions, hidden_layers, &mut rng);

        let transitions: Vec<Transition> =
            (0..3).map(|_| random_transition(obs_dim, n_actions, &mut rng)).collect();
        let batch: Vec<&Transition> = transitions.iter().collect();
        let targets = compute_targets(&target_net, &batch, 0.99);

        let (_, analytic) = loss_and_grads(&net, &batch, &targets);

        // Probe a subset of parameters per case to keep the test quick.
        let n_params = net.n_params();
        let probes: Vec<usize> =
            (0..20).map(|_| rng.random_range(0..n_params)).collect();
        for i in probes {
            let original = net.params()[i];
            net.params_mut()[i] = original + h;
            let (loss_plus, _) = loss_and_grads(&net, &batch, &targets);
            net.params_mut()[i] = original - h;
            let (loss_minus, _) = loss_and_grads(&net, &batch, &targets);
            net.params_mut()[i] = original;

            let numeric = (loss_plus - loss_minus) / (2.0 * h);
            let rel = (analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(1.0);
            worst = worst.max(rel);
            assert!(
                rel < 1e-5,
                "case {case} param {i}: analytic {} vs numeric {} (rel err {rel})",
                analytic[i],
                numeric
            );
        }
    }
    println!("max relative gradient error over probes: {worst:.3e}");
}

/// Deterministic 2-state, 2-action MDP.
/// s0: a0 -> (s0, +1), a1 -> (s1, 0); s1: a0 -> (s0, 0), a1 -> (s1, +2).
fn toy_mdp(state: usize, action: usize) -> (usize, f64) {
    match (state, action) {
        (0, 0) => (0, 1.0),
        (0, 1) => (1, 0.0),
        (1, 0) => (0, 0.0),
        (1, 1) => (1, 2.0),
        _ => unreachable!("2 states, 2 actions"),
    }
}

fn one_hot(state: usize) -> Vec<f64> {
    let mut v = vec![0.0; 2];
    v[state] = 1.0;
    v
}

#[test]
fn q_learning_converges_to_bellman_fixed_point() {
    let gamma = 0.9;

    // Oracle: value iteration to the fixed point.
    let mut q_star = [[0.0f64; 2]; 2];
    for _ in 0..2000 {
        let mut next = q_star;
        for (s, row) in next.iter_mut().enumerate() {
            for (a, value) in row.iter_mut().enumerate() {
                let (s2, r) = toy_mdp(s, a);
                *value = r + gamma * q_star[s2][0].max(q_star[s2][1]);
            }
        }
        q_star = next;
    }
    // Closed form: Q*(s1,a1) = 2/(1-gamma) = 20.
    assert!((q_star[1][1] - 20.0).abs() < 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut net = QNetwork::new(2, 2, 0, &mut rng);
    let mut buffer = ReplayBuffer::new(4);
    for s in 0..2 {
        for a in 0..2 {
            let (s2, r) = toy_mdp(s, a);
            buffer.push(Transition {
                obs: one_hot(s),
                action: a,
                reward: r,
                next_obs: one_hot(s2),
                done: false,
            });
        }
    }

    let mut config = DqlConfig { gamma, batch_size: 4, ..DqlConfig::default() };
    let mut target_net = net.clone();
    // Annealed learning rate so Adam settles well inside the tolerance.
    for (phase, lr) in [(0, 1e-2), (1, 1e-3), (2, 1e-4)] {
        config.learning_rate = lr;
        let _ = phase;
        for update in 0..8000 {
            let batch = buffer.sample(4, &mut rng);
            td_update(&mut net, &batch, &target_net, &config);
            if update % 50 == 0 {
                target_net = net.clone();
            }
        }
        target_net = net.clone();
    }

    for (s, oracle_row) in q_star.iter().enumerate() {
        let q = net.forward(&one_hot(s));
        for (a, &oracle) in oracle_row.iter().enumerate() {
            assert!(
                (q[a] - oracle).abs() < 1e-3,
                "Q({s},{a}) = {} but oracle says {oracle}",
                q[a]
            );
        }
    }
}
