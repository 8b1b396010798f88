use super::net::{Grads, Mlp};

/// Adam over the layers of one [`Mlp`].
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(net: &Mlp, lr: f64, eps: f64) -> Self {
        let n = net.param_count();
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps,
            step: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    pub fn steps(&self) -> i32 {
        self.step
    }

    pub fn step(&mut self, net: &mut Mlp, grads: &Grads) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let mut k = 0;
        for (layer, g) in net.layers_mut().iter_mut().zip(&grads.layers) {
            let params = layer.weight.iter_mut().chain(layer.bias.iter_mut());
            let gs = g.weight.iter().chain(g.bias.iter());
            for (p, &g) in params.zip(gs) {
                let m = &mut self.m[k];
                let v = &mut self.v[k];
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
                k += 1;
            }
        }
    }
}
