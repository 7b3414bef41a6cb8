use rand::Rng;

use super::AgentError;

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: Vec<f64>,
    pub a: usize,
    pub r: f64,
    pub s_next: Vec<f64>,
    pub done: bool,
}

/// A sampled minibatch with states stored row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Batch {
    pub dim: usize,
    pub states: Vec<f64>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub next_states: Vec<f64>,
    pub dones: Vec<bool>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn push(&mut self, t: &Transition) {
        self.states.extend_from_slice(&t.s);
        self.actions.push(t.a);
        self.rewards.push(t.r);
        self.next_states.extend_from_slice(&t.s_next);
        self.dones.push(t.done);
    }

    pub fn from_transitions(dim: usize, ts: &[Transition]) -> Self {
        let mut b = Self {
            dim,
            ..Self::default()
        };
        ts.iter().for_each(|t| b.push(t));
        b
    }
}

/// Fixed-capacity ring buffer; the oldest transition is overwritten first.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    dim: usize,
    capacity: usize,
    states: Vec<f64>,
    next_states: Vec<f64>,
    actions: Vec<usize>,
    rewards: Vec<f64>,
    dones: Vec<bool>,
    head: usize,
    len: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, dim: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            dim,
            capacity,
            states: vec![0.0; capacity * dim],
            next_states: vec![0.0; capacity * dim],
            actions: vec![0; capacity],
            rewards: vec![0.0; capacity],
            dones: vec![false; capacity],
            head: 0,
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: Transition) -> Result<(), AgentError> {
        for s in [&t.s, &t.s_next] {
            if s.len() != self.dim {
                return Err(AgentError::DimensionMismatch {
                    expected: self.dim,
                    found: s.len(),
                });
            }
        }
        let i = self.head;
        let d = self.dim;
        self.states[i * d..(i + 1) * d].copy_from_slice(&t.s);
        self.next_states[i * d..(i + 1) * d].copy_from_slice(&t.s_next);
        self.actions[i] = t.a;
        self.rewards[i] = t.r;
        self.dones[i] = t.done;
        self.head = (self.head + 1) % self.capacity;
        self.len = (self.len + 1).min(self.capacity);
        Ok(())
    }

    /// Transition in slot `i` (storage order, not age order).
    pub fn get(&self, i: usize) -> Option<Transition> {
        if i >= self.len {
            return None;
        }
        let d = self.dim;
        Some(Transition {
            s: self.states[i * d..(i + 1) * d].to_vec(),
            a: self.actions[i],
            r: self.rewards[i],
            s_next: self.next_states[i * d..(i + 1) * d].to_vec(),
            done: self.dones[i],
        })
    }

    /// Slot indices drawn uniformly with replacement.
    pub fn sample_indices(&self, rng: &mut impl Rng, n: usize) -> Vec<usize> {
        (0..n).map(|_| rng.gen_range(0..self.len)).collect()
    }

    pub fn sample(&self, rng: &mut impl Rng, n: usize) -> Result<Batch, AgentError> {
        if self.len == 0 || n == 0 {
            return Err(AgentError::EmptyBatch);
        }
        let d = self.dim;
        let mut b = Batch {
            dim: d,
            states: Vec::with_capacity(n * d),
            actions: Vec::with_capacity(n),
            rewards: Vec::with_capacity(n),
            next_states: Vec::with_capacity(n * d),
            dones: Vec::with_capacity(n),
        };
        for i in self.sample_indices(rng, n) {
            b.states.extend_from_slice(&self.states[i * d..(i + 1) * d]);
            b.next_states
                .extend_from_slice(&self.next_states[i * d..(i + 1) * d]);
            b.actions.push(self.actions[i]);
            b.rewards.push(self.rewards[i]);
            b.dones.push(self.dones[i]);
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn tagged(k: usize) -> Transition {
        Transition {
            s: vec![k as f64, 0.0],
            a: k % 5,
            r: k as f64,
            s_next: vec![k as f64 + 1.0, 0.0],
            done: k.is_multiple_of(7),
        }
    }

    #[test]
    fn overwrite_drops_the_oldest() {
        let cap = 50;
        let m = 17;
        let mut buf = ReplayBuffer::new(cap, 2);
        for k in 0..cap + m {
            buf.push(tagged(k)).unwrap();
        }
        assert_eq!(buf.len(), cap);
        let present: Vec<usize> = (0..cap).map(|i| buf.get(i).unwrap().r as usize).collect();
        for k in 0..m {
            assert!(!present.contains(&k));
        }
        for k in m..cap + m {
            assert!(present.contains(&k));
        }
        assert_eq!(buf.get(0).unwrap(), tagged(cap));
    }

    #[test]
    fn wrong_dimension_rejected() {
        let mut buf = ReplayBuffer::new(4, 3);
        assert!(buf.push(tagged(1)).is_err());
        assert!(buf.is_empty());
    }

    #[test]
    fn sampling_is_uniform() {
        let cap = 1000;
        let mut buf = ReplayBuffer::new(cap, 2);
        for k in 0..cap {
            buf.push(tagged(k)).unwrap();
        }
        let n = 100_000;
        let mut counts = vec![0usize; cap];
        for i in buf.sample_indices(&mut ChaCha8Rng::seed_from_u64(42), n) {
            counts[i] += 1;
        }
        let expected = n as f64 / cap as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let p = 1.0 - ChiSquared::new((cap - 1) as f64).unwrap().cdf(chi2);
        assert!(p > 0.001, "chi2 {chi2} p {p}");
    }

    #[test]
    fn sampled_batch_is_consistent() {
        let mut buf = ReplayBuffer::new(10, 2);
        for k in 0..10 {
            buf.push(tagged(k)).unwrap();
        }
        let b = buf.sample(&mut ChaCha8Rng::seed_from_u64(1), 32).unwrap();
        assert_eq!(b.len(), 32);
        for i in 0..32 {
            let k = b.rewards[i] as usize;
            assert_eq!(b.states[2 * i], k as f64);
            assert_eq!(b.next_states[2 * i], k as f64 + 1.0);
            assert_eq!(b.actions[i], k % 5);
            assert_eq!(b.dones[i], k.is_multiple_of(7));
        }
        assert!(ReplayBuffer::new(3, 2)
            .sample(&mut ChaCha8Rng::seed_from_u64(1), 4)
            .is_err());
    }
}
