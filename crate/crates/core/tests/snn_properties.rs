//! Spiking-policy properties: binary spikes with reset, and invariance of the
//! action readout under joint positive rescaling of weights and threshold.

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spike_mh::env::Observation;
use spike_mh::snn::{lif_step, select_action, NeuronState, ParamTensor, SnnConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// After any micro-step, a spiking neuron sits at exactly 0 and a silent
    /// one stays strictly below the threshold.
    #[test]
    fn spikes_are_binary_with_reset(
        v0 in proptest::collection::vec(-2.0f64..2.0, 3),
        current in proptest::collection::vec(-5.0f64..5.0, 3),
        alpha in 0.0f64..=1.0,
        mu in 0.01f64..2.0,
    ) {
        let params = ParamTensor {
            w_in: vec![0.0; 9],
            w_lateral: vec![0.0; 9],
            alpha_decay: alpha,
            mu,
            obs_dim: 3,
            n_actions: 3,
        };
        let mut state = NeuronState { v: v0, last_spikes: vec![false; 3] };
        lif_step(&mut state, &current, &params);
        for i in 0..3 {
            if state.last_spikes[i] {
                prop_assert_eq!(state.v[i], 0.0);
            } else {
                prop_assert!(state.v[i] < mu);
            }
        }
    }
}

fn random_params(rng: &mut impl Rng) -> ParamTensor {
    ParamTensor {
        w_in: (0..8).map(|_| rng.random_range(-1.0..1.0)).collect(),
        w_lateral: (0..4).map(|_| rng.random_range(-1.0..1.0)).collect(),
        alpha_decay: rng.random_range(0.0..1.0),
        mu: rng.random_range(0.05..1.5),
        obs_dim: 4,
        n_actions: 2,
    }
}

#[test]
fn action_selection_is_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let config = SnnConfig::new(4, 2, 5);
    for _ in 0..200 {
        let params = random_params(&mut rng);
        let c = rng.random_range(0.2..8.0);
        let scaled = ParamTensor {
            w_in: params.w_in.iter().map(|w| w * c).collect(),
            w_lateral: params.w_lateral.iter().map(|w| w * c).collect(),
            alpha_decay: params.alpha_decay,
            mu: params.mu * c,
            obs_dim: 4,
            n_actions: 2,
        };
        let obs = Observation::new((0..4).map(|_| rng.random_range(-2.0..2.0)).collect());

        let mut state_a = NeuronState::zeros(2);
        let mut state_b = NeuronState::zeros(2);
        // Carry state across several control steps to cover the recurrent path.
        for step in 0..4 {
            let a = select_action(&obs, &mut state_a, &params, &config);
            let b = select_action(&obs, &mut state_b, &scaled, &config);
            assert_eq!(a, b, "actions diverged at step {step} for scale {c}");
            assert_eq!(
                state_a.last_spikes, state_b.last_spikes,
                "spike trains diverged at step {step} for scale {c}"
            );
        }
    }
}
