//! Dense ReLU Q-network with manual forward/backward passes and Adam.
//!
//! Parameters live in one flat vector (per-layer weights row-major, then
//! biases), which keeps the Adam step and finite-difference checks trivial.

use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Units per hidden layer.
pub const HIDDEN_WIDTH: usize = 16;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// Q-value network: `obs_dim -> [HIDDEN_WIDTH, ReLU] x hidden_layers ->
/// n_actions` with a linear output layer.
#[derive(Debug, Clone)]
pub struct QNetwork {
    obs_dim: usize,
    n_actions: usize,
    /// Per-layer (fan_in, fan_out).
    dims: Vec<(usize, usize)>,
    /// Per-layer (weight offset, bias offset) into `params`.
    offsets: Vec<(usize, usize)>,
    params: Vec<f64>,
    adam_m: Vec<f64>,
    adam_v: Vec<f64>,
    adam_step: u64,
}

impl QNetwork {
    /// He-initialized network with `hidden_layers` hidden layers (0 gives a
    /// single linear layer).
    pub fn new(obs_dim: usize, n_actions: usize, hidden_layers: usize, rng: &mut impl Rng) -> Self {
        let mut dims = Vec::with_capacity(hidden_layers + 1);
        let mut prev = obs_dim;
        for _ in 0..hidden_layers {
            dims.push((prev, HIDDEN_WIDTH));
            prev = HIDDEN_WIDTH;
        }
        dims.push((prev, n_actions));

        let mut offsets = Vec::with_capacity(dims.len());
        let mut total = 0;
        for &(fan_in, fan_out) in &dims {
            offsets.push((total, total + fan_in * fan_out));
            total += fan_in * fan_out + fan_out;
        }

        let mut params = vec![0.0; total];
        for (&(fan_in, fan_out), &(w_off, _)) in dims.iter().zip(&offsets) {
            let scale = (2.0 / fan_in as f64).sqrt();
            let normal = Normal::new(0.0, scale).expect("finite scale");
            for w in &mut params[w_off..w_off + fan_in * fan_out] {
                *w = normal.sample(rng);
            }
        }

        Self {
            obs_dim,
            n_actions,
            dims,
            offsets,
            adam_m: vec![0.0; total],
            adam_v: vec![0.0; total],
            adam_step: 0,
            params,
        }
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn hidden_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Mutable parameter access (finite-difference tests, custom setups).
    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Q-values for one observation: dense forward pass, ReLU on hidden
    /// layers, linear output.
    pub fn forward(&self, obs: &[f64]) -> Vec<f64> {
        assert_eq!(obs.len(), self.obs_dim, "observation dimension mismatch");
        let mut x = obs.to_vec();
        for (layer, &(fan_in, fan_out)) in self.dims.iter().enumerate() {
            let last = layer == self.dims.len() - 1;
            x = self.layer_forward(layer, fan_in, fan_out, &x, last);
        }
        x
    }

    /// Forward pass keeping every layer's post-activation for backprop.
    /// `activations[0]` is the input; `activations.last()` the Q-values.
    pub(crate) fn forward_cached(&self, obs: &[f64]) -> Vec<Vec<f64>> {
        assert_eq!(obs.len(), self.obs_dim, "observation dimension mismatch");
        let mut activations = Vec::with_capacity(self.dims.len() + 1);
        activations.push(obs.to_vec());
        for (layer, &(fan_in, fan_out)) in self.dims.iter().enumerate() {
            let last = layer == self.dims.len() - 1;
            let x = activations.last().expect("non-empty");
            let out = self.layer_forward(layer, fan_in, fan_out, x, last);
            activations.push(out);
        }
        activations
    }

    fn layer_forward(
        &self,
        layer: usize,
        fan_in: usize,
        fan_out: usize,
        x: &[f64],
        linear: bool,
    ) -> Vec<f64> {
        let (w_off, b_off) = self.offsets[layer];
        let w = &self.params[w_off..w_off + fan_in * fan_out];
        let b = &self.params[b_off..b_off + fan_out];
        let mut z = b.to_vec();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &w[i * fan_out..(i + 1) * fan_out];
            for (zj, &wij) in z.iter_mut().zip(row) {
                *zj += xi * wij;
            }
        }
        if !linear {
            for zj in &mut z {
                *zj = zj.max(0.0);
            }
        }
        z
    }

    /// Backpropagate `d_out` (gradient of the loss w.r.t. the Q-value output
    /// of one sample) through cached activations, accumulating into `grads`.
    pub(crate) fn backward_into(
        &self,
        activations: &[Vec<f64>],
        d_out: &[f64],
        grads: &mut [f64],
    ) {
        let n_layers = self.dims.len();
        let mut delta = d_out.to_vec();
        for layer in (0..n_layers).rev() {
            let (fan_in, fan_out) = self.dims[layer];
            let (w_off, b_off) = self.offsets[layer];
            let input = &activations[layer];

            // dL/db += delta; dL/dW += input^T delta
            for j in 0..fan_out {
                grads[b_off + j] += delta[j];
            }
            for (i, &ai) in input.iter().enumerate() {
                if ai == 0.0 {
                    continue;
                }
                let row = &mut grads[w_off + i * fan_out..w_off + (i + 1) * fan_out];
                for (g, &dj) in row.iter_mut().zip(&delta) {
                    *g += ai * dj;
                }
            }

            if layer > 0 {
                let w = &self.params[w_off..w_off + fan_in * fan_out];
                let mut prev = vec![0.0; fan_in];
                for (i, p) in prev.iter_mut().enumerate() {
                    let row = &w[i * fan_out..(i + 1) * fan_out];
                    *p = row.iter().zip(&delta).map(|(wij, dj)| wij * dj).sum();
                }
                // ReLU gate: the previous layer's post-activation is zero
                // exactly where its pre-activation was clipped.
                for (p, &a) in prev.iter_mut().zip(&activations[layer]) {
                    if a == 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
    }

    /// One Adam update with bias correction (beta1 = 0.9, beta2 = 0.999,
    /// eps = 1e-8).
    pub fn adam_apply(&mut self, grads: &[f64], learning_rate: f64) {
        assert_eq!(grads.len(), self.params.len(), "gradient length mismatch");
        self.adam_step += 1;
        let t = self.adam_step as i32;
        let m_corr = 1.0 - ADAM_BETA1.powi(t);
        let v_corr = 1.0 - ADAM_BETA2.powi(t);
        for (((p, &g), m), v) in
            self.params.iter_mut().zip(grads).zip(&mut self.adam_m).zip(&mut self.adam_v)
        {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / m_corr;
            let v_hat = *v / v_corr;
            *p -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}
