//! Episodic GP-SARSA with an approximately-linearly-dependent dictionary.
//!
//! The kernel is `s·⟨b̂, b̂'⟩·[a = a']` on unit-normalized belief vectors. The
//! Kronecker delta makes the dictionary Gram matrix block diagonal by action,
//! so its inverse is kept per action. The posterior coefficients `α̃` and
//! covariance factor `C̃` couple all points through the temporal-difference
//! structure and are dense.

use ndarray::{Array1, Array2};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{masked_argmax, Learner, Phase, Transition};
use crate::dialog::ActionMask;
use crate::error::{Error, Result};
use crate::rng::DialRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpConfig {
    /// Observation noise standard deviation.
    pub sigma: f64,
    /// Admission threshold on the squared projection residual.
    pub nu: f64,
    pub gamma: f64,
    /// Posterior standard deviation multiplier during training.
    pub exploration_scale: f64,
    /// Signal variance `s` of the kernel.
    pub kernel_scale: f64,
    /// Once reached, no further points are admitted.
    pub max_dictionary: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self { sigma: 5.0, nu: 0.01, gamma: 1.0, exploration_scale: 3.0, kernel_scale: 1.0, max_dictionary: 1500 }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma > 0.0
            && self.nu >= 0.0
            && (0.0..=1.0).contains(&self.gamma)
            && self.exploration_scale >= 0.0
            && self.kernel_scale > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("bad GP configuration {self:?}")))
        }
    }
}

/// Sparse vector over dictionary indices.
type Sparse<T> = Vec<(usize, T)>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct Block<T> {
    /// Global dictionary indices of this action's points.
    members: Vec<usize>,
    points: Vec<Vec<T>>,
    kinv: Array2<T>,
}

impl<T: Scalar> Block<T> {
    fn empty() -> Self {
        Self { members: Vec::new(), points: Vec::new(), kinv: Array2::zeros((0, 0)) }
    }
}

/// Recursion state carried between the steps of one dialogue.
#[derive(Debug, Clone)]
struct Trace<T> {
    action: usize,
    point: Vec<T>,
    /// `K̃⁻¹ k̃(x_{t-1})`, sparse in the block of `action`.
    g: Sparse<T>,
    c: Vec<T>,
    d: T,
    inv_v: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GpSarsa<T> {
    pub config: GpConfig,
    n_actions: usize,
    blocks: Vec<Block<T>>,
    alpha: Vec<T>,
    cov: Array2<T>,
    #[serde(skip)]
    trace: Option<Trace<T>>,
    dialogues: usize,
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn sparse_dot<T: Scalar>(s: &Sparse<T>, dense: &[T]) -> T {
    s.iter().map(|(i, v)| *v * dense[*i]).sum()
}

impl<T: Scalar> GpSarsa<T> {
    pub fn new(n_actions: usize, config: GpConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            n_actions,
            blocks: (0..n_actions).map(|_| Block::empty()).collect(),
            alpha: Vec::new(),
            cov: Array2::zeros((0, 0)),
            trace: None,
            dialogues: 0,
        })
    }

    pub fn dictionary_len(&self) -> usize {
        self.alpha.len()
    }

    fn normalize(&self, b: &[T]) -> Vec<T> {
        let norm = dot(b, b).sqrt();
        if norm > T::zero() {
            b.iter().map(|x| *x / norm).collect()
        } else {
            b.to_vec()
        }
    }

    fn self_kernel(&self, point: &[T]) -> T {
        T::of(self.config.kernel_scale) * dot(point, point)
    }

    /// Kernel values against the points of `action`'s block, in block order.
    fn kvec(&self, action: usize, point: &[T]) -> Vec<T> {
        let s = T::of(self.config.kernel_scale);
        self.blocks[action].points.iter().map(|p| s * dot(p, point)).collect()
    }

    fn to_global(&self, action: usize, local: &[T]) -> Sparse<T> {
        self.blocks[action].members.iter().copied().zip(local.iter().copied()).collect()
    }

    /// `K_a⁻¹ k`, in block order.
    fn project(&self, action: usize, k: &[T]) -> Vec<T> {
        let kinv = &self.blocks[action].kinv;
        if k.is_empty() {
            return Vec::new();
        }
        kinv.dot(&Array1::from(k.to_vec())).to_vec()
    }

    /// Posterior mean and variance of Q at a normalized point.
    fn posterior(&self, action: usize, point: &[T]) -> (T, T) {
        let k = self.kvec(action, point);
        let members = &self.blocks[action].members;
        let mean = members.iter().zip(&k).map(|(i, v)| *v * self.alpha[*i]).sum();
        let mut quad = T::zero();
        for (a, ka) in members.iter().zip(&k) {
            let row = self.cov.row(*a);
            quad += *ka * members.iter().zip(&k).map(|(b, kb)| row[*b] * *kb).sum::<T>();
        }
        (mean, (self.self_kernel(point) - quad).max(T::zero()))
    }

    /// Posterior mean and variance of Q(b, a) for a raw feature vector.
    pub fn query(&self, features: &[T], action: usize) -> (T, T) {
        self.posterior(action, &self.normalize(features))
    }

    fn cov_times(&self, s: &Sparse<T>) -> Vec<T> {
        let n = self.alpha.len();
        let mut out = vec![T::zero(); n];
        for (j, v) in s {
            let col = self.cov.column(*j);
            for (o, c) in out.iter_mut().zip(col.iter()) {
                *o += *c * *v;
            }
        }
        out
    }

    /// Adds a point to the dictionary given its projection `g` (block order)
    /// and residual `delta`. Returns its global index.
    fn admit(&mut self, action: usize, point: Vec<T>, g: &[T], delta: T) -> usize {
        let index = self.alpha.len();
        let block = &mut self.blocks[action];
        let m = block.members.len();
        let mut kinv = Array2::zeros((m + 1, m + 1));
        for i in 0..m {
            for j in 0..m {
                kinv[[i, j]] = block.kinv[[i, j]] + g[i] * g[j] / delta;
            }
            kinv[[i, m]] = -g[i] / delta;
            kinv[[m, i]] = -g[i] / delta;
        }
        kinv[[m, m]] = T::one() / delta;
        block.kinv = kinv;
        block.members.push(index);
        block.points.push(point);

        self.alpha.push(T::zero());
        let mut cov = Array2::zeros((index + 1, index + 1));
        cov.slice_mut(ndarray::s![..index, ..index]).assign(&self.cov);
        self.cov = cov;
        if let Some(tr) = &mut self.trace {
            tr.c.push(T::zero());
        }
        index
    }

    /// Projection and residual of a point against its action block; admits
    /// it when the residual exceeds ν and there is room.
    fn consider(&mut self, action: usize, point: &[T]) -> (Vec<T>, Vec<T>, Option<usize>) {
        let k = self.kvec(action, point);
        let g = self.project(action, &k);
        let delta = self.self_kernel(point) - dot(&k, &g);
        let room = self.alpha.len() < self.config.max_dictionary;
        if delta > T::of(self.config.nu) && room {
            let idx = self.admit(action, point.to_vec(), &g, delta);
            (k, g, Some(idx))
        } else {
            (k, g, None)
        }
    }

    fn start(&mut self, action: usize, point: Vec<T>) {
        let (_, g, added) = self.consider(action, &point);
        let g = match added {
            Some(i) => vec![(i, T::one())],
            None => self.to_global(action, &g),
        };
        self.trace =
            Some(Trace { action, point, g, c: vec![T::zero(); self.alpha.len()], d: T::zero(), inv_v: T::zero() });
    }

    fn step(&mut self, r: T, next: Option<(usize, Vec<T>)>) {
        let tr = self.trace.take().expect("trace started");
        let gamma = T::of(self.config.gamma);
        let sigma2 = T::of(self.config.sigma * self.config.sigma);
        let coef = gamma * sigma2 * tr.inv_v;
        let k_prev = self.to_global(tr.action, &self.kvec(tr.action, &tr.point));

        let (dk, h, dk_tt, diag, g_next) = match &next {
            None => {
                let dk_tt = sparse_dot_sparse(&tr.g, &k_prev);
                (k_prev.clone(), tr.g.clone(), dk_tt, sigma2, None)
            }
            Some((a, point)) => {
                let k_local = self.kvec(*a, point);
                let g_local = self.project(*a, &k_local);
                let delta = self.self_kernel(point) - dot(&k_local, &g_local);
                let k_next = self.to_global(*a, &k_local);
                let mut dk = k_prev.clone();
                dk.extend(k_next.iter().map(|(i, v)| (*i, -gamma * *v)));
                let diag = (T::one() + gamma * gamma) * sigma2;
                let room = self.alpha.len() < self.config.max_dictionary;
                if delta > T::of(self.config.nu) && room {
                    let k_tt = self.self_kernel(point);
                    let dk_tt = sparse_dot_sparse(&tr.g, &k_prev)
                        - T::of(2.0) * gamma * sparse_dot_sparse(&tr.g, &k_next)
                        + gamma * gamma * k_tt;
                    let idx = self.admit(*a, point.clone(), &g_local, delta);
                    let mut h = tr.g.clone();
                    h.push((idx, -gamma));
                    (dk, h, dk_tt, diag, Some(vec![(idx, T::one())]))
                } else {
                    let g_next = self.to_global(*a, &g_local);
                    let mut h = tr.g.clone();
                    h.extend(g_next.iter().map(|(i, v)| (*i, -gamma * *v)));
                    let dk_tt = sparse_dot_sparse(&h, &dk);
                    (dk, h, dk_tt, diag, Some(g_next))
                }
            }
        };

        // admission may have grown the dictionary since the trace was saved
        let n = self.alpha.len();
        let mut c_prev = tr.c;
        c_prev.resize(n, T::zero());

        let c_dk = self.cov_times(&dk);
        let d = coef * tr.d + r - sparse_dot(&dk, &self.alpha);
        let mut c: Vec<T> = c_prev.iter().zip(&c_dk).map(|(p, q)| coef * *p - *q).collect();
        for (i, v) in &h {
            c[*i] += *v;
        }
        let v = diag + dk_tt - sparse_dot(&dk, &c_dk) + T::of(2.0) * coef * sparse_dot(&dk, &c_prev)
            - coef * gamma * sigma2;

        for (a, ci) in self.alpha.iter_mut().zip(&c) {
            *a += *ci * d / v;
        }
        for i in 0..n {
            if c[i] == T::zero() {
                continue;
            }
            let ci = c[i] / v;
            let mut row = self.cov.row_mut(i);
            for (x, cj) in row.iter_mut().zip(&c) {
                *x += ci * *cj;
            }
        }

        match (next, g_next) {
            (Some((action, point)), Some(g)) => {
                self.trace = Some(Trace { action, point, g, c, d, inv_v: T::one() / v });
            }
            _ => {
                self.dialogues += 1;
            }
        }
    }
}

fn sparse_dot_sparse<T: Scalar>(a: &Sparse<T>, b: &Sparse<T>) -> T {
    let mut s = T::zero();
    for (i, x) in a {
        for (j, y) in b {
            if i == j {
                s += *x * *y;
            }
        }
    }
    s
}

impl<T: Scalar> Learner<T> for GpSarsa<T> {
    fn select_action(&mut self, features: &[T], mask: &ActionMask, phase: Phase, rng: &mut DialRng) -> Result<usize> {
        let point = self.normalize(features);
        if phase == Phase::Test {
            let q: Vec<T> = (0..self.n_actions).map(|a| self.posterior(a, &point).0).collect();
            return masked_argmax(&q, mask);
        }
        let scale = self.config.exploration_scale;
        let mut sampled = vec![T::neg_infinity(); self.n_actions];
        for a in mask.allowed_indices() {
            let (mean, var) = self.posterior(a, &point);
            let sd = scale * var.as_f64().sqrt();
            let draw = if sd > 0.0 {
                Normal::new(mean.as_f64(), sd).expect("finite normal").sample(rng)
            } else {
                mean.as_f64()
            };
            sampled[a] = T::of(draw);
        }
        masked_argmax(&sampled, mask)
    }

    fn observe(&mut self, t: &Transition<T>, _rng: &mut DialRng) {
        let point = self.normalize(&t.b);
        let in_step = self.trace.as_ref().is_some_and(|tr| tr.action == t.a && tr.point == point);
        if !in_step {
            self.start(t.a, point);
        }
        let next = t.next.as_ref().map(|n| (n.a, self.normalize(&n.b)));
        self.step(t.r, next);
    }

    fn dialogues(&self) -> usize {
        self.dialogues
    }

    fn q_values(&self, features: &[T]) -> Vec<T> {
        let point = self.normalize(features);
        (0..self.n_actions).map(|a| self.posterior(a, &point).0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rl::Successor;
    use crate::rng::seeded;

    fn terminal(b: Vec<f64>, a: usize, r: f64) -> Transition<f64> {
        Transition { b, a, r, next: None }
    }

    #[test]
    fn prior_is_zero_mean_unit_scale() {
        let gp = GpSarsa::<f64>::new(3, GpConfig::default()).unwrap();
        let (m, v) = gp.query(&[0.2, 0.4, 0.4], 1);
        assert_eq!(m, 0.0);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_terminal_point_converges_to_its_reward() {
        let cfg = GpConfig { sigma: 1.0, ..GpConfig::default() };
        let mut gp = GpSarsa::<f64>::new(2, cfg).unwrap();
        let b = vec![0.6, 0.8];
        let mut rng = seeded(0);
        let (_, prior_var) = gp.query(&b, 0);
        for _ in 0..400 {
            gp.observe(&terminal(b.clone(), 0, 15.0), &mut rng);
        }
        let (m, v) = gp.query(&b, 0);
        assert!((m - 15.0).abs() < 0.5, "{m}");
        assert!(v < prior_var);
        assert_eq!(gp.dictionary_len(), 1);
        assert_eq!(gp.dialogues(), 400);
        // the delta kernel keeps other actions at the prior
        assert_eq!(gp.query(&b, 1).0, 0.0);
    }

    #[test]
    fn multi_step_dialogue_propagates_value_backwards() {
        let cfg = GpConfig { sigma: 0.5, ..GpConfig::default() };
        let mut gp = GpSarsa::<f64>::new(2, cfg).unwrap();
        let b0 = vec![1.0, 0.0, 0.0];
        let b1 = vec![0.0, 1.0, 0.0];
        let mut rng = seeded(1);
        for _ in 0..300 {
            gp.observe(
                &Transition {
                    b: b0.clone(),
                    a: 0,
                    r: -1.0,
                    next: Some(Successor { b: b1.clone(), a: 1, mask: ActionMask::all(2) }),
                },
                &mut rng,
            );
            gp.observe(&terminal(b1.clone(), 1, 19.0), &mut rng);
        }
        assert!((gp.query(&b1, 1).0 - 19.0).abs() < 0.5);
        assert!((gp.query(&b0, 0).0 - 18.0).abs() < 0.5);
        assert_eq!(gp.dialogues(), 300);
    }
}
