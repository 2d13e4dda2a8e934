//! Fully connected rectifier network with an Adam optimizer.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::DialRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Dense<T> {
    /// `fan_in × fan_out`
    pub w: Array2<T>,
    pub b: Array1<T>,
}

/// Hidden layers use ReLU, the output layer is linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Mlp<T> {
    pub layers: Vec<Dense<T>>,
}

/// Gradients laid out like [`Mlp::layers`].
pub type Grads<T> = Vec<(Array2<T>, Array1<T>)>;

fn relu_in_place<T: Scalar>(a: &mut Array2<T>) {
    a.mapv_inplace(|v| v.max(T::zero()));
}

impl<T: Scalar> Mlp<T> {
    /// `sizes` = input, hidden..., output. Weights uniform in
    /// ±sqrt(6 / (fan_in + fan_out)), biases zero.
    pub fn new(sizes: &[usize], rng: &mut DialRng) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Config(format!("bad layer sizes {sizes:?}")));
        }
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (i, o) = (w[0], w[1]);
                let limit = (6.0 / (i + o) as f64).sqrt();
                let w = Array2::from_shape_simple_fn((i, o), || T::of(rng.random_range(-limit..=limit)));
                Dense { w, b: Array1::zeros(o) }
            })
            .collect();
        Ok(Self { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("at least one layer").w.ncols()
    }

    pub fn predict(&self, x: &[T]) -> Vec<T> {
        let mut h: Array1<T> = ArrayView1::from(x).to_owned();
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            h = h.dot(&layer.w) + &layer.b;
            if k < last {
                h.mapv_inplace(|v| v.max(T::zero()));
            }
        }
        h.to_vec()
    }

    /// Batched forward pass; rows are samples.
    pub fn forward(&self, x: ArrayView2<T>) -> Array2<T> {
        self.activations(x).pop().expect("output layer")
    }

    /// Input followed by every layer's post-activation output.
    fn activations(&self, x: ArrayView2<T>) -> Vec<Array2<T>> {
        let mut acts = vec![x.to_owned()];
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = acts[k].dot(&layer.w) + &layer.b;
            if k < last {
                relu_in_place(&mut z);
            }
            acts.push(z);
        }
        acts
    }

    /// Forward pass plus backpropagation of `d_out(outputs)`, the loss
    /// gradient with respect to the network outputs.
    pub fn gradients(&self, x: ArrayView2<T>, d_out: impl FnOnce(&Array2<T>) -> Array2<T>) -> (Array2<T>, Grads<T>) {
        let acts = self.activations(x);
        let out = acts.last().expect("output").clone();
        let mut delta = d_out(&out);
        let mut grads: Grads<T> = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let gw = acts[k].t().dot(&delta);
            let gb = delta.sum_axis(Axis(0));
            grads.push((gw, gb));
            if k > 0 {
                let mut back = delta.dot(&self.layers[k].w.t());
                Zip::from(&mut back).and(&acts[k]).for_each(|d, a| {
                    if *a <= T::zero() {
                        *d = T::zero();
                    }
                });
                delta = back;
            }
        }
        grads.reverse();
        (out, grads)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Adam<T> {
    pub config: AdamConfig,
    m: Grads<T>,
    v: Grads<T>,
    steps: u64,
}

impl<T: Scalar> Adam<T> {
    pub fn new(config: AdamConfig, net: &Mlp<T>) -> Self {
        let zeros = || {
            net.layers
                .iter()
                .map(|l| (Array2::zeros(l.w.raw_dim()), Array1::zeros(l.b.raw_dim())))
                .collect::<Grads<T>>()
        };
        Self { config, m: zeros(), v: zeros(), steps: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn step(&mut self, net: &mut Mlp<T>, grads: &Grads<T>) {
        self.steps += 1;
        let c = self.config;
        let t = self.steps as i32;
        let b1 = T::of(c.beta1);
        let b2 = T::of(c.beta2);
        let one = T::one();
        // bias corrections folded into the step size
        let lr = T::of(c.learning_rate * (1.0 - c.beta2.powi(t)).sqrt() / (1.0 - c.beta1.powi(t)));
        let eps = T::of(c.epsilon);
        for (((layer, g), m), v) in net.layers.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            Zip::from(&mut layer.w).and(&g.0).and(&mut m.0).and(&mut v.0).for_each(|w, g, m, v| {
                *m = b1 * *m + (one - b1) * *g;
                *v = b2 * *v + (one - b2) * *g * *g;
                *w -= lr * *m / (v.sqrt() + eps);
            });
            Zip::from(&mut layer.b).and(&g.1).and(&mut m.1).and(&mut v.1).for_each(|w, g, m, v| {
                *m = b1 * *m + (one - b1) * *g;
                *v = b2 * *v + (one - b2) * *g * *g;
                *w -= lr * *m / (v.sqrt() + eps);
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use ndarray::array;

    #[test]
    fn init_is_bounded_and_biases_zero() {
        let net = Mlp::<f64>::new(&[90, 300, 100, 29], &mut seeded(1)).unwrap();
        let limit = (6.0f64 / 390.0).sqrt();
        assert!(net.layers[0].w.iter().all(|w| w.abs() <= limit));
        assert!(net.layers.iter().all(|l| l.b.iter().all(|b| *b == 0.0)));
        assert_eq!((net.input_dim(), net.output_dim()), (90, 29));
        assert!(Mlp::<f64>::new(&[3], &mut seeded(1)).is_err());
    }

    #[test]
    fn predict_matches_batched_forward() {
        let net = Mlp::<f64>::new(&[3, 5, 2], &mut seeded(2)).unwrap();
        let x = array![[0.1, -0.4, 0.9], [1.0, 0.0, 0.5]];
        let batch = net.forward(x.view());
        for r in 0..2 {
            let single = net.predict(x.row(r).as_slice().unwrap());
            for c in 0..2 {
                assert!((single[c] - batch[[r, c]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let net = Mlp::<f64>::new(&[3, 4, 2], &mut seeded(3)).unwrap();
        let x = array![[0.3, -0.2, 0.8], [0.5, 0.1, -0.7]];
        let loss = |n: &Mlp<f64>| n.forward(x.view()).iter().map(|v| v * v).sum::<f64>() / 2.0;
        let (_, grads) = net.gradients(x.view(), |out| out.clone());
        let h = 1e-6;
        for (k, (gw, _)) in grads.iter().enumerate() {
            for idx in [(0, 0), (1, 1), (2, 0)] {
                if idx.0 >= net.layers[k].w.nrows() || idx.1 >= net.layers[k].w.ncols() {
                    continue;
                }
                let mut plus = net.clone();
                plus.layers[k].w[idx] += h;
                let mut minus = net.clone();
                minus.layers[k].w[idx] -= h;
                let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
                assert!((numeric - gw[idx]).abs() < 1e-5, "layer {k} {idx:?}");
            }
        }
    }

    #[test]
    fn adam_reduces_a_quadratic_loss() {
        let mut net = Mlp::<f64>::new(&[2, 4, 1], &mut seeded(4)).unwrap();
        let mut opt = Adam::new(AdamConfig { learning_rate: 0.01, ..AdamConfig::default() }, &net);
        let x = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let y = array![[1.0], [2.0], [3.0]];
        let mse = |n: &Mlp<f64>| (n.forward(x.view()) - &y).mapv(|d| d * d).mean().unwrap();
        let before = mse(&net);
        for _ in 0..500 {
            let (_, g) = net.gradients(x.view(), |out| (out - &y) * (2.0 / 3.0));
            opt.step(&mut net, &g);
        }
        assert!(mse(&net) < before * 0.05);
        assert_eq!(opt.steps(), 500);
    }
}
