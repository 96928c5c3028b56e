//! Acceptance suite. Each criterion runs as one test at its stated tolerance
//! and prints a `[PASS]`/`[FAIL]` line (visible with `--nocapture`).
//!
//! Shared training runs are computed once and reused across criteria.

use std::sync::OnceLock;

use spike_mh::dql::{
    compute_targets, dql_train, loss_and_grads, DqlConfig, QNetwork, Transition,
};
use spike_mh::env::{AcrobotEnv, AcrobotState, CartPoleEnv, CartPoleState, EnvKind, Observation};
use spike_mh::mh::{
    acceptance_ratio, init_params, mh_accept, propose, train, MhConfig, TrainResult,
};
use spike_mh::snn::{
    lif_step, select_action, NeuronState, ParamTensor, SnnConfig, DEFAULT_T_SNN,
};
use spike_mh_cli::moving_average;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn check(name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {detail}");
    assert!(pass, "acceptance {name}: {detail}");
}

fn mh_runs(kind: EnvKind) -> &'static Vec<TrainResult> {
    static CARTPOLE: OnceLock<Vec<TrainResult>> = OnceLock::new();
    static ACROBOT: OnceLock<Vec<TrainResult>> = OnceLock::new();
    let cell = match kind {
        EnvKind::CartPole => &CARTPOLE,
        EnvKind::Acrobot => &ACROBOT,
    };
    cell.get_or_init(|| {
        SEEDS
            .iter()
            .map(|&seed| {
                let config = MhConfig::for_env(kind).with_seed(seed);
                let init = init_params(kind, seed, 0.5, 0.9, 1.0);
                train(kind, &init, DEFAULT_T_SNN, &config).expect("training run")
            })
            .collect()
    })
}

/// Criterion 1: 6-neuron CartPole policy reaches the 500 ceiling on at least
/// 3 of 5 seeds within 500 iterations; the best seed within 150 iterations.
#[test]
fn criterion_1_cartpole_mh_snn_solves() {
    let runs = mh_runs(EnvKind::CartPole);
    let solved: Vec<(u64, usize)> = SEEDS
        .iter()
        .zip(runs)
        .filter(|(_, r)| r.best_reward >= 500.0)
        .map(|(&s, r)| (s, r.best_iteration()))
        .collect();
    let fastest = solved.iter().map(|&(_, it)| it).min();

    let pass = solved.len() >= 3 && fastest.is_some_and(|it| it <= 150);
    check(
        "criterion 1 (CartPole MH-SNN)",
        pass,
        &format!(
            "{}/5 seeds reached 500 within 500 iterations; fastest at iteration {:?} (need >=3 and <=150): {:?}",
            solved.len(),
            fastest,
            solved
        ),
    );
}

/// Criterion 2: 9-neuron Acrobot policy, median best reward over 5 seeds at
/// least -110 within 1000 iterations.
#[test]
fn criterion_2_acrobot_mh_snn_reward() {
    let runs = mh_runs(EnvKind::Acrobot);
    let mut bests: Vec<f64> = runs.iter().map(|r| r.best_reward).collect();
    bests.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = bests[bests.len() / 2];

    check(
        "criterion 2 (Acrobot MH-SNN)",
        median >= -110.0,
        &format!("median best reward over 5 seeds = {median} (need >= -110); bests {bests:?}"),
    );
}

/// Criterion 3: the MH kernel samples the 1-D standard normal with
/// histogram TV distance < 0.05 (1e5 samples, 1e3 burn-in, 20 bins).
#[test]
fn criterion_3_mh_kernel_tv_distance() {
    use rand_like::*;
    mod rand_like {
        pub use rand_chacha::rand_core::SeedableRng;
        pub use rand_chacha::ChaCha8Rng;
    }
    use statrs::distribution::{ContinuousCDF, Normal};

    let density = |theta: f64| (-0.5 * theta * theta).exp();
    let mut proposal_rng = ChaCha8Rng::seed_from_u64(20240917);
    let mut accept_rng = ChaCha8Rng::seed_from_u64(20240917 ^ 0xacce97);
    let mut current = ParamTensor::zeros(1, 1);

    let (burn_in, n_samples, n_bins) = (1_000, 100_000, 20);
    let (lo, hi) = (-4.0, 4.0);
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for step in 0..(burn_in + n_samples) {
        let proposal = propose(&current, 2.0, &mut proposal_rng);
        let p = acceptance_ratio(density(proposal.w_in[0]), density(current.w_in[0]), 1.0, 1.0);
        if mh_accept(p, &mut accept_rng) {
            current = proposal;
        }
        if step >= burn_in {
            let theta = current.w_in[0];
            if theta >= lo && theta < hi {
                counts[((theta - lo) / width) as usize] += 1;
            }
        }
    }

    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut tv = 0.0;
    for (i, &count) in counts.iter().enumerate() {
        let a = lo + i as f64 * width;
        let analytic = normal.cdf(a + width) - normal.cdf(a);
        tv += (count as f64 / n_samples as f64 - analytic).abs();
    }
    tv /= 2.0;

    check(
        "criterion 3 (MH kernel correctness)",
        tv < 0.05,
        &format!("TV distance to the standard normal = {tv:.4} (need < 0.05)"),
    );
}

/// Criterion 4: replayed reference trajectories agree to 1e-6 per component.
#[test]
fn criterion_4_env_conformance() {
    #[derive(serde::Deserialize)]
    struct FixtureFile {
        trajectories: Vec<Trajectory>,
    }
    #[derive(serde::Deserialize)]
    struct Trajectory {
        initial_state: [f64; 4],
        actions: Vec<usize>,
        states: Vec<[f64; 4]>,
    }
    fn load(name: &str) -> FixtureFile {
        let path = format!("{}/../core/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        serde_json::from_str(&std::fs::read_to_string(&path).expect("fixture file"))
            .expect("fixture parses")
    }

    let mut worst = 0.0f64;
    for traj in load("cartpole_reference.json").trajectories {
        let mut env = CartPoleEnv::new();
        let [x, x_dot, theta, theta_dot] = traj.initial_state;
        env.reset_to(CartPoleState { x, x_dot, theta, theta_dot });
        for (step, &action) in traj.actions.iter().enumerate() {
            env.step(action).expect("live episode");
            for (a, e) in env.state().as_array().iter().zip(&traj.states[step]) {
                worst = worst.max((a - e).abs());
            }
        }
    }
    for traj in load("acrobot_reference.json").trajectories {
        let mut env = AcrobotEnv::new();
        let [theta1, theta2, theta1_dot, theta2_dot] = traj.initial_state;
        env.reset_to(AcrobotState { theta1, theta2, theta1_dot, theta2_dot });
        for (step, &action) in traj.actions.iter().enumerate() {
            env.step(action).expect("live episode");
            for (a, e) in env.state().as_array().iter().zip(&traj.states[step]) {
                worst = worst.max((a - e).abs());
            }
        }
    }

    check(
        "criterion 4 (environment conformance)",
        worst <= 1e-6,
        &format!("max state deviation from reference trajectories = {worst:.3e} (need <= 1e-6)"),
    );
}

/// Criterion 5: backprop vs central finite differences, max relative error
/// < 1e-5 over 100 random cases.
#[test]
fn criterion_5_dql_gradient_integrity() {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for case in 0..100 {
        let obs_dim = rng.random_range(2..6);
        let n_actions = rng.random_range(2..4);
        let mut net = QNetwork::new(obs_dim, n_actions, case % 4, &mut rng);
        let target_net = QNetwork::new(obs_dim, n_actions, case % 4, &mut rng);
        let transitions: Vec<Transition> = (0..3)
            .map(|_| Transition {
                obs: (0..obs_dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
                action: rng.random_range(0..n_actions),
                reward: rng.random_range(-2.0..2.0),
                next_obs: (0..obs_dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
                done: rng.random::<f64>() < 0.2,
            })
            .collect();
        let batch: Vec<&Transition> = transitions.iter().collect();
        let targets = compute_targets(&target_net, &batch, 0.99);
        let (_, analytic) = loss_and_grads(&net, &batch, &targets);

        let n_params = net.n_params();
        for _ in 0..20 {
            let i = rng.random_range(0..n_params);
            let original = net.params()[i];
            net.params_mut()[i] = original + h;
            let (plus, _) = loss_and_grads(&net, &batch, &targets);
            net.params_mut()[i] = original - h;
            let (minus, _) = loss_and_grads(&net, &batch, &targets);
            net.params_mut()[i] = original;
            let numeric = (plus - minus) / (2.0 * h);
            let rel = (analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(1.0);
            worst = worst.max(rel);
        }
    }

    check(
        "criterion 5 (DQL gradient integrity)",
        worst < 1e-5,
        &format!("max relative backprop error over 100 cases = {worst:.3e} (need < 1e-5)"),
    );
}

/// Criterion 6a: 3-hidden-layer DQL reaches 500 on CartPole for at least one
/// of 5 seeds within 2000 episodes.
#[test]
fn criterion_6a_dql_three_layers_solves_cartpole() {
    let config =
        DqlConfig { max_episodes: 2000, stop_at_reward: Some(500.0), ..DqlConfig::default() };
    let mut solved = None;
    for &seed in &SEEDS {
        let result = dql_train(EnvKind::CartPole, 3, &config, seed);
        if result.best_reward >= 500.0 {
            solved = Some((seed, result.best_episode));
            break;
        }
    }

    check(
        "criterion 6a (3-hidden-layer DQL solves CartPole)",
        solved.is_some(),
        &format!("first success (seed, episode) = {solved:?} within 2000 episodes"),
    );
}

/// Criterion 6b: the 1-hidden-layer DQL smoothed plateau stays below the
/// MH-SNN's on both environments.
///
/// Plateau = the maximum of the width-50 moving average, taken over seeds.
/// The MH series is the chain-state reward (the re-evaluation of the current
/// parameters each iteration): that is the reward the agent's deployed
/// parameters earn while training, the analogue of DQL's episode rewards.
/// Proposal rewards would only lower the MH plateau further.
#[test]
fn criterion_6b_dql_one_layer_plateau_ordering() {
    fn plateau(series: &[f64], window: usize) -> f64 {
        moving_average(series, window).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    let mut detail = String::new();
    let mut pass = true;
    for kind in [EnvKind::CartPole, EnvKind::Acrobot] {
        let mh_plateau = mh_runs(kind)
            .iter()
            .map(|r| {
                let series: Vec<f64> = r.chain.iter().map(|rec| rec.reward_previous).collect();
                plateau(&series, 50)
            })
            .fold(f64::NEG_INFINITY, f64::max);

        let max_episodes = match kind {
            EnvKind::CartPole => 1000,
            EnvKind::Acrobot => 600,
        };
        let config = DqlConfig { max_episodes, ..DqlConfig::default() };
        let dql_plateau = [1u64, 2, 3]
            .iter()
            .map(|&seed| {
                let result = dql_train(kind, 1, &config, seed);
                let series: Vec<f64> = result.episodes.iter().map(|e| e.reward).collect();
                plateau(&series, 50)
            })
            .fold(f64::NEG_INFINITY, f64::max);

        if mh_plateau <= dql_plateau {
            pass = false;
        }
        detail.push_str(&format!(
            "{kind}: MH-SNN plateau {mh_plateau:.1} vs 1-layer DQL plateau {dql_plateau:.1}; "
        ));
    }
    detail.push_str("(need MH-SNN strictly above DQL on both)");

    check("criterion 6b (1-hidden-layer DQL plateau ordering)", pass, &detail);
}

/// Criterion 7: identical configs produce byte-identical CSV logs.
#[test]
fn criterion_7_run_determinism() {
    use spike_mh_cli::config::{ConfigFile, ExperimentConfig, Overrides};
    use spike_mh_cli::run_experiment;

    let toml_text = r#"
        [experiment]
        env = "acrobot"
        algo = "mh-snn"
        seeds = [21, 22]

        [mh]
        n_iter = 40
    "#;
    let file: ConfigFile = toml::from_str(toml_text).unwrap();
    let run = |dir: &std::path::Path| {
        let overrides = Overrides { out_dir: Some(dir.to_path_buf()), ..Default::default() };
        let config = ExperimentConfig::resolve(&file, &overrides).unwrap();
        run_experiment(&config).unwrap();
    };
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run(dir_a.path());
    run(dir_b.path());

    let mut compared = 0;
    let mut identical = true;
    for seed in [21u64, 22] {
        let name = format!("mh-snn_acrobot_seed{seed}.csv");
        let a = std::fs::read(dir_a.path().join(&name)).unwrap();
        let b = std::fs::read(dir_b.path().join(&name)).unwrap();
        identical &= a == b;
        compared += 1;
    }

    let dql_file: ConfigFile = toml::from_str(
        r#"
        [experiment]
        env = "cartpole"
        algo = "dql"
        seeds = [3]

        [dql]
        max_episodes = 4
        batch_size = 16
        "#,
    )
    .unwrap();
    let dql_run = |dir: &std::path::Path| {
        let overrides = Overrides { out_dir: Some(dir.to_path_buf()), ..Default::default() };
        let config = ExperimentConfig::resolve(&dql_file, &overrides).unwrap();
        run_experiment(&config).unwrap();
    };
    let dir_c = tempfile::tempdir().unwrap();
    let dir_d = tempfile::tempdir().unwrap();
    dql_run(dir_c.path());
    dql_run(dir_d.path());
    let a = std::fs::read(dir_c.path().join("dql_cartpole_seed3.csv")).unwrap();
    let b = std::fs::read(dir_d.path().join("dql_cartpole_seed3.csv")).unwrap();
    identical &= a == b;
    compared += 1;

    check(
        "criterion 7 (determinism)",
        identical,
        &format!("{compared} CSV logs byte-identical across repeated runs"),
    );
}

/// Criterion 8: the analytic LIF examples hold exactly.
#[test]
fn criterion_8_lif_unit_suite() {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let params_with = |alpha: f64, mu: f64| ParamTensor {
        w_in: vec![0.0; 4],
        w_lateral: vec![0.0; 4],
        alpha_decay: alpha,
        mu,
        obs_dim: 2,
        n_actions: 2,
    };

    // Zero-input fixed point.
    let mut state = NeuronState::zeros(2);
    lif_step(&mut state, &[0.0, 0.0], &params_with(0.7, 0.5));
    let zero_fixed = state.v == vec![0.0, 0.0] && state.last_spikes == vec![false, false];

    // Hand-evaluated update: 0.5*0.8 + 0.5*2.0 = 1.4 >= 1.0 -> spike + reset.
    let mut state = NeuronState { v: vec![0.8, 0.8], last_spikes: vec![false, false] };
    lif_step(&mut state, &[2.0, 0.0], &params_with(0.5, 1.0));
    let spike_reset = state.last_spikes == vec![true, false]
        && state.v[0] == 0.0
        && (state.v[1] - 0.4).abs() < 1e-15;

    // alpha = 1: input is ignored, a zero-initialized network never spikes.
    let mut state = NeuronState::zeros(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut alpha_one_silent = true;
    for _ in 0..100 {
        let current = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
        lif_step(&mut state, &current, &params_with(1.0, 0.5));
        alpha_one_silent &= state.v == vec![0.0, 0.0] && !state.last_spikes.iter().any(|&s| s);
    }

    // alpha = 0: spike iff J >= mu, including the equality boundary.
    let mut state = NeuronState::zeros(2);
    lif_step(&mut state, &[1.0, 1.0 - 1e-12], &params_with(0.0, 1.0));
    let alpha_zero_threshold = state.last_spikes == vec![true, false];

    // Scale invariance of the action readout across 200 random policies.
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let config = SnnConfig::new(4, 2, DEFAULT_T_SNN);
    let mut scale_invariant = true;
    for _ in 0..200 {
        let params = ParamTensor {
            w_in: (0..8).map(|_| rng.random_range(-1.0..1.0)).collect(),
            w_lateral: (0..4).map(|_| rng.random_range(-1.0..1.0)).collect(),
            alpha_decay: rng.random_range(0.0..1.0),
            mu: rng.random_range(0.05..1.5),
            obs_dim: 4,
            n_actions: 2,
        };
        let c: f64 = rng.random_range(0.2..8.0);
        let scaled = ParamTensor {
            w_in: params.w_in.iter().map(|w| w * c).collect(),
            w_lateral: params.w_lateral.iter().map(|w| w * c).collect(),
            mu: params.mu * c,
            ..params.clone()
        };
        let obs = Observation::new((0..4).map(|_| rng.random_range(-2.0..2.0)).collect());
        let mut state_a = NeuronState::zeros(2);
        let mut state_b = NeuronState::zeros(2);
        for _ in 0..4 {
            let a = select_action(&obs, &mut state_a, &params, &config);
            let b = select_action(&obs, &mut state_b, &scaled, &config);
            scale_invariant &= a == b && state_a.last_spikes == state_b.last_spikes;
        }
    }

    let all = [
        ("zero-input fixed point", zero_fixed),
        ("threshold crossing resets to zero", spike_reset),
        ("alpha=1 ignores input", alpha_one_silent),
        ("alpha=0 spikes iff J >= mu", alpha_zero_threshold),
        ("scale invariance of action selection", scale_invariant),
    ];
    let failures: Vec<&str> = all.iter().filter(|(_, ok)| !ok).map(|&(n, _)| n).collect();
    check(
        "criterion 8 (LIF unit suite)",
        failures.is_empty(),
        &format!("{} analytic checks, failures: {failures:?}", all.len()),
    );
}
