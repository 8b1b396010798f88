//! Dense ReLU networks with an exact reverse pass.
//!
//! Two layouts are supported:
//!
//! - `SingleLayer`: `x -> relu(W1 x) -> Wo h`
//! - `D2rl`: `depth` hidden layers where every hidden layer after the first
//!   sees `[h_prev, x]`; the output layer is a plain linear map of the last
//!   hidden activations.
//!
//! Batches are rows of an `Array2`. Weights are stored `out x in`.

use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    SingleLayer { width: usize },
    D2rl { width: usize, depth: usize },
}

impl Architecture {
    pub fn width(&self) -> usize {
        match *self {
            Architecture::SingleLayer { width } | Architecture::D2rl { width, .. } => width,
        }
    }

    pub fn depth(&self) -> usize {
        match *self {
            Architecture::SingleLayer { .. } => 1,
            Architecture::D2rl { depth, .. } => depth,
        }
    }

    fn is_dense(&self) -> bool {
        matches!(self, Architecture::D2rl { .. })
    }

    /// Input width of hidden layer `i`.
    pub fn hidden_input(&self, i: usize, input_dim: usize) -> usize {
        if i == 0 || !self.is_dense() {
            if i == 0 {
                input_dim
            } else {
                self.width()
            }
        } else {
            self.width() + input_dim
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weight: Array2::zeros((outputs, inputs)),
            bias: Array1::zeros(outputs),
        }
    }

    /// Orthogonal rows (or columns, whichever is shorter) scaled by `gain`.
    pub fn orthogonal<R: Rng + ?Sized>(inputs: usize, outputs: usize, gain: f64, rng: &mut R) -> Self {
        let mut w = Array2::from_shape_simple_fn((outputs, inputs), || rng.sample::<f64, _>(StandardNormal));
        let transpose = outputs > inputs;
        if transpose {
            w = w.reversed_axes().as_standard_layout().into_owned();
        }
        // modified Gram-Schmidt over the rows
        let rows = w.nrows();
        for i in 0..rows {
            for j in 0..i {
                let proj = w.row(i).dot(&w.row(j));
                let rj = w.row(j).to_owned();
                w.row_mut(i).scaled_add(-proj, &rj);
            }
            let norm = w.row(i).dot(&w.row(i)).sqrt();
            if norm > 1e-12 {
                w.row_mut(i).mapv_inplace(|v| v / norm);
            }
        }
        if transpose {
            w = w.reversed_axes().as_standard_layout().into_owned();
        }
        w.mapv_inplace(|v| v * gain);
        Self {
            weight: w,
            bias: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weight.nrows()
    }

    fn forward(&self, x: &ArrayView2<f64>) -> Array2<f64> {
        let out = x.dot(&self.weight.t()) + &self.bias;
        if out.is_standard_layout() {
            out
        } else {
            out.as_standard_layout().into_owned()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    arch: Architecture,
    input_dim: usize,
    output_dim: usize,
    /// Hidden layers followed by the output layer.
    layers: Vec<Dense>,
}

/// Activations kept for the reverse pass.
#[derive(Debug, Clone)]
pub struct Cache {
    inputs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
}

/// Gradients laid out like [`Mlp`] layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Grads {
    pub layers: Vec<Dense>,
}

impl Grads {
    pub fn norm(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.weight.iter().chain(l.bias.iter()).map(|g| g * g).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, k: f64) {
        for l in &mut self.layers {
            l.weight.mapv_inplace(|g| g * k);
            l.bias.mapv_inplace(|g| g * k);
        }
    }

    pub fn flat(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weight.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weight.iter().chain(l.bias.iter()).all(|g| g.is_finite()))
    }
}

impl Mlp {
    /// Randomly initialized network. Hidden layers use gain `sqrt(2)`, the
    /// output layer `output_gain`.
    pub fn new<R: Rng + ?Sized>(
        arch: Architecture,
        input_dim: usize,
        output_dim: usize,
        output_gain: f64,
        rng: &mut R,
    ) -> Self {
        let mut layers = Vec::with_capacity(arch.depth() + 1);
        for i in 0..arch.depth() {
            layers.push(Dense::orthogonal(
                arch.hidden_input(i, input_dim),
                arch.width(),
                std::f64::consts::SQRT_2,
                rng,
            ));
        }
        layers.push(Dense::orthogonal(arch.width(), output_dim, output_gain, rng));
        Self {
            arch,
            input_dim,
            output_dim,
            layers,
        }
    }

    /// All-zero network of the given shape.
    pub fn zeros(arch: Architecture, input_dim: usize, output_dim: usize) -> Self {
        let mut layers: Vec<Dense> = (0..arch.depth())
            .map(|i| Dense::zeros(arch.hidden_input(i, input_dim), arch.width()))
            .collect();
        layers.push(Dense::zeros(arch.width(), output_dim));
        Self {
            arch,
            input_dim,
            output_dim,
            layers,
        }
    }

    pub fn from_layers(arch: Architecture, layers: Vec<Dense>) -> Option<Self> {
        let input_dim = layers.first()?.inputs();
        let output_dim = layers.last()?.outputs();
        let net = Self::zeros(arch, input_dim, output_dim);
        let shapes_match = net.layers.len() == layers.len()
            && net
                .layers
                .iter()
                .zip(&layers)
                .all(|(a, b)| a.weight.dim() == b.weight.dim() && a.bias.len() == b.bias.len());
        shapes_match.then_some(Self { layers, ..net })
    }

    pub fn architecture(&self) -> Architecture {
        self.arch
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weight.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    /// Mutable reference to the `k`-th parameter in [`Mlp::params`] order.
    pub fn param_mut(&mut self, mut k: usize) -> &mut f64 {
        for l in &mut self.layers {
            let nw = l.weight.len();
            if k < nw {
                return l.weight.iter_mut().nth(k).unwrap();
            }
            k -= nw;
            if k < l.bias.len() {
                return &mut l.bias[k];
            }
            k -= l.bias.len();
        }
        panic!("parameter index out of range");
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        self.forward_cached(x).0
    }

    pub fn forward_one(&self, x: &[f64]) -> Vec<f64> {
        let view = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
        self.forward(view).into_raw_vec_and_offset().0
    }

    pub fn forward_cached(&self, x: ArrayView2<f64>) -> (Array2<f64>, Cache) {
        let depth = self.layers.len() - 1;
        let mut cache = Cache {
            inputs: Vec::with_capacity(depth + 1),
            pre: Vec::with_capacity(depth),
        };
        let mut h: Option<Array2<f64>> = None;
        for i in 0..depth {
            let input = match (&h, self.arch.is_dense()) {
                (None, _) => x.to_owned(),
                (Some(prev), true) => concatenate(Axis(1), &[prev.view(), x]).expect("row counts agree"),
                (Some(prev), false) => prev.clone(),
            };
            let z = self.layers[i].forward(&input.view());
            h = Some(z.mapv(|v| v.max(0.0)));
            cache.inputs.push(input);
            cache.pre.push(z);
        }
        let last = h.unwrap_or_else(|| x.to_owned());
        let out = self.layers[depth].forward(&last.view());
        cache.inputs.push(last);
        (out, cache)
    }

    /// Reverse pass for `d_out = dL/d(output)`, summed over the batch rows.
    pub fn backward(&self, cache: &Cache, d_out: &Array2<f64>) -> Grads {
        let depth = self.layers.len() - 1;
        let width = self.arch.width();
        let mut grads: Vec<Dense> = Vec::with_capacity(depth + 1);
        let mut g = d_out.clone();
        for i in (0..=depth).rev() {
            let input = &cache.inputs[i];
            grads.push(Dense {
                weight: g.t().dot(input),
                bias: g.sum_axis(Axis(0)),
            });
            if i == 0 {
                break;
            }
            let d_in = g.dot(&self.layers[i].weight);
            let d_h = if i < depth && self.arch.is_dense() {
                d_in.slice(s![.., ..width]).to_owned()
            } else {
                d_in
            };
            let pre = &cache.pre[i - 1];
            g = ndarray::Zip::from(&d_h)
                .and(pre)
                .map_collect(|&d, &z| if z > 0.0 { d } else { 0.0 });
        }
        grads.reverse();
        Grads { layers: grads }
    }
}
