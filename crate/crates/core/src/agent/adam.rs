use super::QNetwork;

/// Adam with bias-corrected moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(parameter_count: usize) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; parameter_count],
            v: vec![0.0; parameter_count],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, net: &mut QNetwork, grad: &QNetwork, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for (((p, g), m), v) in net
            .parameters_mut()
            .zip(grad.parameters())
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr_against_gradient_sign() {
        let mut net = QNetwork::zeros(&[1, 1]).unwrap();
        let mut grad = QNetwork::zeros(&[1, 1]).unwrap();
        grad.layers_mut()[0].weights[0] = 3.0;
        grad.layers_mut()[0].biases[0] = -0.2;
        let mut adam = Adam::new(2);
        adam.step(&mut net, &grad, 0.01);
        let l = &net.layers()[0];
        assert!((l.weights[0] + 0.01).abs() < 1e-9);
        assert!((l.biases[0] - 0.01).abs() < 1e-9);
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut net = QNetwork::zeros(&[2, 3, 1]).unwrap();
        net.parameters_mut()
            .enumerate()
            .for_each(|(i, p)| *p = i as f64 * 0.1);
        let before = net.clone();
        let grad = QNetwork::zeros(&[2, 3, 1]).unwrap();
        let mut adam = Adam::new(net.parameter_count());
        adam.step(&mut net, &grad, 1e-3);
        assert_eq!(net, before);
    }
}
