//! FIFO experience replay with uniform minibatch sampling.

use rand::seq::index;
use rand::Rng;

/// One stored interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_obs: Vec<f64>,
    /// Terminal transition: the bootstrap term is masked out.
    pub done: bool,
}

/// Ring buffer of transitions. Once full, the oldest entries are overwritten.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    data: Vec<Transition>,
    capacity: usize,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "replay capacity must be >= 1");
        Self { data: Vec::with_capacity(capacity.min(4096)), capacity, cursor: 0 }
    }

    pub fn push(&mut self, transition: Transition) {
        if self.data.len() < self.capacity {
            self.data.push(transition);
        } else {
            self.data[self.cursor] = transition;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Uniform sample of `batch_size` distinct transitions (fewer when the
    /// buffer holds fewer entries).
    pub fn sample(&self, batch_size: usize, rng: &mut impl Rng) -> Vec<&Transition> {
        let n = batch_size.min(self.data.len());
        index::sample(rng, self.data.len(), n).iter().map(|i| &self.data[i]).collect()
    }
}
