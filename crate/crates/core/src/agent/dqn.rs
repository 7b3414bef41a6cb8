use rand::Rng;

use super::{Adam, AgentError, Batch, QNetwork};
use crate::env::N_ACTIONS;

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if v > q[best] {
            best = i;
        }
    }
    best
}

/// ε-greedy action for the feature vector `obs`.
pub fn act(
    net: &QNetwork,
    obs: &[f64],
    epsilon: f64,
    rng: &mut impl Rng,
) -> Result<usize, AgentError> {
    if rng.gen::<f64>() < epsilon {
        return Ok(rng.gen_range(0..N_ACTIONS));
    }
    Ok(argmax(&net.forward(obs)?))
}

/// `y_i = r_i + γ max_a Q⁻(s'_i, a)`, without the bootstrap on terminal
/// transitions.
pub fn td_targets(batch: &Batch, target: &QNetwork, gamma: f64) -> Result<Vec<f64>, AgentError> {
    if batch.is_empty() {
        return Err(AgentError::EmptyBatch);
    }
    if batch.dim != target.input_dim() {
        return Err(AgentError::DimensionMismatch {
            expected: target.input_dim(),
            found: batch.dim,
        });
    }
    let q = target.predict_batch(&batch.next_states, batch.len());
    let k = target.output_dim();
    Ok((0..batch.len())
        .map(|i| {
            if batch.dones[i] {
                batch.rewards[i]
            } else {
                let best = q[i * k..(i + 1) * k]
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max);
                batch.rewards[i] + gamma * best
            }
        })
        .collect())
}

/// `θ⁻ ← τθ + (1 − τ)θ⁻`.
pub fn polyak(target: &mut QNetwork, net: &QNetwork, tau: f64) -> Result<(), AgentError> {
    if !target.same_shape(net) {
        return Err(AgentError::ShapeMismatch);
    }
    if tau == 1.0 {
        target.clone_from(net);
        return Ok(());
    }
    for (t, p) in target.parameters_mut().zip(net.parameters()) {
        *t += tau * (p - *t);
    }
    Ok(())
}

/// Online network, target network and optimizer state.
#[derive(Debug, Clone)]
pub struct Learner {
    pub net: QNetwork,
    pub target: QNetwork,
    pub adam: Adam,
    grad: QNetwork,
}

impl Learner {
    /// Target starts as a copy of the online network.
    pub fn new(net: QNetwork) -> Self {
        Self {
            target: net.clone(),
            adam: Adam::new(net.parameter_count()),
            grad: QNetwork::zeros(&net.widths()).expect("valid widths"),
            net,
        }
    }

    pub fn updates(&self) -> u64 {
        self.adam.steps()
    }

    /// One Adam step on the mean squared TD error; returns the loss before
    /// the step.
    pub fn update(&mut self, batch: &Batch, gamma: f64, lr: f64) -> Result<f64, AgentError> {
        let targets = td_targets(batch, &self.target, gamma)?;
        let loss =
            self.net
                .td_loss_and_grad(&batch.states, &batch.actions, &targets, &mut self.grad);
        if !loss.is_finite() {
            return Err(AgentError::NonFiniteLoss {
                episode: 0,
                update: self.updates(),
                last_good: None,
            });
        }
        self.adam.step(&mut self.net, &self.grad, lr);
        Ok(loss)
    }

    pub fn soft_update(&mut self, tau: f64) -> Result<(), AgentError> {
        polyak(&mut self.target, &self.net, tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::Transition;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net_with_output_bias(bias: [f64; 5]) -> QNetwork {
        let mut net = QNetwork::zeros(&[3, 4, 5]).unwrap();
        net.layers_mut()[1].biases = bias.to_vec();
        net
    }

    fn random_net(seed: u64) -> QNetwork {
        QNetwork::new(&[3, 8, 8, 5], &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    fn random_batch(seed: u64, n: usize) -> Batch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ts: Vec<_> = (0..n)
            .map(|_| Transition {
                s: (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                a: rng.gen_range(0..5),
                r: rng.gen_range(-2.0..2.0),
                s_next: (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                done: rng.gen_bool(0.2),
            })
            .collect();
        Batch::from_transitions(3, &ts)
    }

    #[test]
    fn greedy_action_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = net_with_output_bias([0.1, 0.9, 0.2, 0.2, 0.2]);
        assert_eq!(act(&net, &[0.0; 3], 0.0, &mut rng).unwrap(), 1);
        let tied = net_with_output_bias([0.3, 0.7, 0.2, 0.7, 0.7]);
        assert_eq!(act(&tied, &[0.0; 3], 0.0, &mut rng).unwrap(), 1);
        assert_eq!(argmax(&[1.0; 5]), 0);
    }

    #[test]
    fn greedy_choice_invariant_to_positive_affine_rescaling() {
        let q = [0.3, -1.2, 0.31, 0.0, 0.29];
        let scaled: Vec<f64> = q.iter().map(|v| 3.7 * v - 12.0).collect();
        assert_eq!(argmax(&q), argmax(&scaled));
    }

    #[test]
    fn full_exploration_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let net = net_with_output_bias([5.0, 0.0, 0.0, 0.0, 0.0]);
        let n = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..n {
            counts[act(&net, &[0.0; 3], 1.0, &mut rng).unwrap()] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.2).abs() <= 0.01, "{counts:?}");
        }
    }

    #[test]
    fn td_target_examples() {
        let target = net_with_output_bias([0.0, 2.0, 1.0, -1.0, 0.5]);
        let t = |r: f64, done: bool| Transition {
            s: vec![0.0; 3],
            a: 0,
            r,
            s_next: vec![0.0; 3],
            done,
        };
        let batch = Batch::from_transitions(3, &[t(20.0, true), t(1.0, false)]);
        let y = td_targets(&batch, &target, 0.97).unwrap();
        assert_eq!(y[0], 20.0);
        assert!((y[1] - 2.94).abs() < 1e-12);
        let y0 = td_targets(&batch, &target, 0.0).unwrap();
        assert_eq!(y0, vec![20.0, 1.0]);
        assert!(td_targets(&Batch::default(), &target, 0.9).is_err());
    }

    #[test]
    fn polyak_examples() {
        let mut a = QNetwork::zeros(&[1, 1]).unwrap();
        let mut b = a.clone();
        b.parameters_mut().for_each(|p| *p = 1.0);
        polyak(&mut a, &b, 0.01).unwrap();
        assert!(a.parameters().all(|&p| p == 0.01));

        let net = random_net(1);
        let mut same = net.clone();
        polyak(&mut same, &net, 0.01).unwrap();
        assert_eq!(same, net);

        let mut hard = random_net(2);
        polyak(&mut hard, &net, 1.0).unwrap();
        assert_eq!(hard, net);

        let mut wrong = QNetwork::zeros(&[3, 4, 5]).unwrap();
        assert!(matches!(
            polyak(&mut wrong, &net, 0.5),
            Err(AgentError::ShapeMismatch)
        ));
    }

    #[test]
    fn polyak_contracts_geometrically() {
        let net = random_net(3);
        let mut target = random_net(4);
        let gap = |t: &QNetwork| {
            t.parameters()
                .zip(net.parameters())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let d0 = gap(&target);
        for k in 1..=200 {
            polyak(&mut target, &net, 0.01).unwrap();
            let expected = d0 * 0.99f64.powi(k);
            assert!((gap(&target) - expected).abs() <= 1e-12 * d0, "k={k}");
        }
    }

    #[test]
    fn loss_gradient_matches_central_differences() {
        let net = random_net(5);
        let batch = random_batch(6, 16);
        let targets = td_targets(&batch, &random_net(7), 0.97).unwrap();
        let mut grad = QNetwork::zeros(&net.widths()).unwrap();
        net.td_loss_and_grad(&batch.states, &batch.actions, &targets, &mut grad);
        let loss_of = |n: &QNetwork| {
            let mut g = QNetwork::zeros(&n.widths()).unwrap();
            n.td_loss_and_grad(&batch.states, &batch.actions, &targets, &mut g)
        };
        let h = 1e-5;
        for (i, g) in grad.parameters().enumerate() {
            let mut plus = net.clone();
            let mut minus = net.clone();
            *plus.parameters_mut().nth(i).unwrap() += h;
            *minus.parameters_mut().nth(i).unwrap() -= h;
            let fd = (loss_of(&plus) - loss_of(&minus)) / (2.0 * h);
            let err = (fd - g).abs() / fd.abs().max(g.abs()).max(1e-6);
            assert!(err <= 1e-5, "param {i}: fd {fd} analytic {g}");
        }
    }

    #[test]
    fn matched_targets_give_zero_loss_and_no_change() {
        let net = random_net(9);
        let mut learner = Learner::new(net.clone());
        // terminal transitions whose reward equals the current prediction
        let mut batch = random_batch(10, 8);
        batch.dones.iter_mut().for_each(|d| *d = true);
        let q = net.predict_batch(&batch.states, batch.len());
        for i in 0..batch.len() {
            batch.rewards[i] = q[i * 5 + batch.actions[i]];
        }
        let loss = learner.update(&batch, 0.97, 1e-3).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(learner.net, net);
    }

    #[test]
    fn overfitting_one_batch_decreases_loss() {
        let mut learner = Learner::new(random_net(11));
        let mut batch = random_batch(12, 32);
        batch.dones.iter_mut().for_each(|d| *d = true);
        let losses: Vec<f64> = (0..200)
            .map(|_| learner.update(&batch, 0.97, 1e-3).unwrap())
            .collect();
        for w in losses[10..].windows(2) {
            assert!(w[1] < w[0], "{} -> {}", w[0], w[1]);
        }
        assert!(
            losses[199] < 0.6 * losses[0],
            "{} -> {}",
            losses[0],
            losses[199]
        );
    }

    #[test]
    fn non_finite_loss_is_reported() {
        let mut learner = Learner::new(random_net(13));
        let mut batch = random_batch(14, 4);
        batch.rewards[0] = f64::NAN;
        batch.dones[0] = true;
        assert!(matches!(
            learner.update(&batch, 0.97, 1e-3),
            Err(AgentError::NonFiniteLoss { .. })
        ));
    }
}
