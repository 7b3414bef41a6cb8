//! Fully connected Q-network with tanh hidden layers and a linear head.

use rand::Rng;

use super::AgentError;

/// One affine layer. `weights` is row-major with shape `(outputs, inputs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    fn row(&self, o: usize) -> &[f64] {
        &self.weights[o * self.inputs..(o + 1) * self.inputs]
    }

    fn forward_into(&self, input: &[f64], out: &mut [f64]) {
        for (o, slot) in out.iter_mut().enumerate() {
            *slot = self.biases[o] + dot(self.row(o), input);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    layers: Vec<Dense>,
}

impl QNetwork {
    /// Network with the given layer widths, e.g. `[7, 128, 128, 5]`,
    /// initialized uniformly in `±1/sqrt(fan_in)`.
    pub fn new(widths: &[usize], rng: &mut impl Rng) -> Result<Self, AgentError> {
        let mut net = Self::zeros(widths)?;
        for layer in &mut net.layers {
            let bound = 1.0 / (layer.inputs as f64).sqrt();
            for w in layer.weights.iter_mut().chain(layer.biases.iter_mut()) {
                *w = rng.gen_range(-bound..bound);
            }
        }
        Ok(net)
    }

    pub fn zeros(widths: &[usize]) -> Result<Self, AgentError> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(AgentError::InvalidShape(format!("{widths:?}")));
        }
        Ok(Self {
            layers: widths
                .windows(2)
                .map(|w| Dense::zeros(w[0], w[1]))
                .collect(),
        })
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.layers[0].inputs];
        w.extend(self.layers.iter().map(|l| l.outputs));
        w
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().outputs
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Parameters in storage order: layer by layer, weights then biases.
    pub fn parameters(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.biases.iter()))
    }

    pub fn parameters_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.widths() == other.widths()
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, AgentError> {
        if input.len() != self.input_dim() {
            return Err(AgentError::DimensionMismatch {
                expected: self.input_dim(),
                found: input.len(),
            });
        }
        let mut a = input.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; layer.outputs];
            layer.forward_into(&a, &mut z);
            if i < last {
                z.iter_mut().for_each(|v| *v = v.tanh());
            }
            a = z;
        }
        Ok(a)
    }

    /// Forward pass over a row-major batch, keeping every activation.
    fn forward_batch(&self, inputs: &[f64], batch: usize) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(inputs.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let prev = acts.last().unwrap();
            let mut out = vec![0.0; batch * layer.outputs];
            for b in 0..batch {
                let x = &prev[b * layer.inputs..(b + 1) * layer.inputs];
                let y = &mut out[b * layer.outputs..(b + 1) * layer.outputs];
                layer.forward_into(x, y);
                if i < last {
                    y.iter_mut().for_each(|v| *v = v.tanh());
                }
            }
            acts.push(out);
        }
        acts
    }

    /// Q-values for a row-major batch of inputs.
    pub fn predict_batch(&self, inputs: &[f64], batch: usize) -> Vec<f64> {
        self.forward_batch(inputs, batch).pop().unwrap()
    }

    /// Mean squared TD error on the taken actions,
    /// `mean_i (Q(s_i, a_i) - y_i)^2`, and its gradient written into `grad`
    /// (same shape as `self`).
    pub fn td_loss_and_grad(
        &self,
        inputs: &[f64],
        actions: &[usize],
        targets: &[f64],
        grad: &mut QNetwork,
    ) -> f64 {
        let batch = actions.len();
        let acts = self.forward_batch(inputs, batch);
        let q = acts.last().unwrap();
        let outputs = self.output_dim();

        let mut delta = vec![0.0; batch * outputs];
        let mut loss = 0.0;
        for b in 0..batch {
            let err = q[b * outputs + actions[b]] - targets[b];
            loss += err * err;
            delta[b * outputs + actions[b]] = 2.0 * err / batch as f64;
        }
        loss /= batch as f64;

        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let g = &mut grad.layers[l];
            g.weights.iter_mut().for_each(|w| *w = 0.0);
            g.biases.iter_mut().for_each(|w| *w = 0.0);
            let input = &acts[l];
            for b in 0..batch {
                let d = &delta[b * layer.outputs..(b + 1) * layer.outputs];
                let x = &input[b * layer.inputs..(b + 1) * layer.inputs];
                for (o, &dz) in d.iter().enumerate() {
                    if dz == 0.0 {
                        continue;
                    }
                    g.biases[o] += dz;
                    let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (w, xi) in row.iter_mut().zip(x) {
                        *w += dz * xi;
                    }
                }
            }
            if l == 0 {
                break;
            }
            // back through the affine map, then through tanh of the layer below
            let mut below = vec![0.0; batch * layer.inputs];
            for b in 0..batch {
                let d = &delta[b * layer.outputs..(b + 1) * layer.outputs];
                let out = &mut below[b * layer.inputs..(b + 1) * layer.inputs];
                for (o, &dz) in d.iter().enumerate() {
                    if dz == 0.0 {
                        continue;
                    }
                    for (v, w) in out.iter_mut().zip(layer.row(o)) {
                        *v += dz * w;
                    }
                }
                let a = &input[b * layer.inputs..(b + 1) * layer.inputs];
                for (v, ai) in out.iter_mut().zip(a) {
                    *v *= 1.0 - ai * ai;
                }
            }
            delta = below;
        }
        loss
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_net(seed: u64) -> QNetwork {
        QNetwork::new(&[4, 6, 5, 3], &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = QNetwork::zeros(&[7, 128, 128, 5]).unwrap();
        assert_eq!(net.forward(&[1.0; 7]).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn output_bias_passes_through() {
        let mut net = small_net(1);
        let last = net.layers.len() - 1;
        for l in &mut net.layers[..last] {
            l.weights.iter_mut().for_each(|w| *w = 0.0);
        }
        net.layers[last].weights.iter_mut().for_each(|w| *w = 0.0);
        net.layers[last].biases = vec![0.5, -1.0, 2.0];
        assert_eq!(
            net.forward(&[3.0, 1.0, -2.0, 0.1]).unwrap(),
            vec![0.5, -1.0, 2.0]
        );
    }

    #[test]
    fn dimension_mismatch() {
        let net = small_net(1);
        assert!(matches!(
            net.forward(&[1.0; 5]),
            Err(AgentError::DimensionMismatch {
                expected: 4,
                found: 5
            })
        ));
    }

    #[test]
    fn batch_matches_single() {
        let net = small_net(2);
        let xs = [0.1, -0.2, 0.3, 0.9, 1.0, 2.0, -1.0, 0.0];
        let batch = net.predict_batch(&xs, 2);
        assert_eq!(&batch[..3], net.forward(&xs[..4]).unwrap().as_slice());
        assert_eq!(&batch[3..], net.forward(&xs[4..]).unwrap().as_slice());
    }

    #[test]
    fn forward_gradient_matches_central_differences() {
        // dQ_a/dθ through the loss with target 0 and batch 1: L = Q_a^2,
        // so dQ_a/dθ = dL/dθ / (2 Q_a)
        let net = small_net(3);
        let x = [0.3, -0.7, 0.2, 0.5];
        let mut grad = QNetwork::zeros(&net.widths()).unwrap();
        for action in 0..3 {
            net.td_loss_and_grad(&x, &[action], &[0.0], &mut grad);
            let q = net.forward(&x).unwrap()[action];
            let h = 1e-5;
            for (i, g) in grad.parameters().enumerate() {
                let mut plus = net.clone();
                let mut minus = net.clone();
                *plus.parameters_mut().nth(i).unwrap() += h;
                *minus.parameters_mut().nth(i).unwrap() -= h;
                let fd = (plus.forward(&x).unwrap()[action] - minus.forward(&x).unwrap()[action])
                    / (2.0 * h);
                let analytic = g / (2.0 * q);
                let err = (fd - analytic).abs() / fd.abs().max(analytic.abs()).max(1e-6);
                assert!(err <= 1e-5, "param {i}: fd {fd} analytic {analytic}");
            }
        }
    }
}
