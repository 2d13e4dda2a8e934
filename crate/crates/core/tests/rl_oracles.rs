//! Learners checked against independent computations.

use dialmark::dialog::ActionMask;
use dialmark::rl::{Dqn, DqnConfig, EpsilonSchedule, GpConfig, GpSarsa, Learner, Phase, Successor, Transition};
use dialmark::rng::seeded;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// With every point admitted and γ = 1, the episodic GP-TD posterior equals
/// ordinary GP regression on the returns-to-go with noise σ².
#[test]
fn gp_sarsa_matches_regression_on_returns_to_go() {
    let dim = 16;
    let sigma: f64 = 0.7;
    let scale = 2.0;
    let cfg = GpConfig { sigma, nu: 1e-12, gamma: 1.0, kernel_scale: scale, ..GpConfig::default() };
    let mut gp = GpSarsa::<f64>::new(2, cfg).unwrap();
    let mut rng = seeded(42);
    let mut points: Vec<(Vec<f64>, usize)> = Vec::new();
    let mut returns: Vec<f64> = Vec::new();

    for len in [3usize, 2, 4] {
        let steps: Vec<(Vec<f64>, usize, f64)> = (0..len)
            .map(|_| {
                let b: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
                (b, rng.random_range(0..2), rng.random_range(-2.0..10.0))
            })
            .collect();
        let mut g = 0.0;
        let mut to_go = vec![0.0; len];
        for t in (0..len).rev() {
            g += steps[t].2;
            to_go[t] = g;
        }
        for t in 0..len {
            let next = steps.get(t + 1).map(|(b, a, _)| Successor { b: b.clone(), a: *a, mask: ActionMask::all(2) });
            let (b, a, r) = &steps[t];
            gp.observe(&Transition { b: b.clone(), a: *a, r: *r, next }, &mut rng);
            points.push((unit(b), *a));
        }
        returns.extend(to_go);
    }
    assert_eq!(gp.dictionary_len(), points.len());

    let n = points.len();
    let kern = |x: &(Vec<f64>, usize), y: &(Vec<f64>, usize)| {
        if x.1 == y.1 {
            scale * x.0.iter().zip(&y.0).map(|(p, q)| p * q).sum::<f64>()
        } else {
            0.0
        }
    };
    let k = DMatrix::from_fn(n, n, |i, j| kern(&points[i], &points[j]));
    let noisy = (k + DMatrix::identity(n, n) * sigma * sigma).try_inverse().unwrap();
    let y = DVector::from_vec(returns);

    let mut queries = points.clone();
    for a in 0..2 {
        queries.push((unit(&(0..dim).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>()), a));
    }
    for q in &queries {
        let kx = DVector::from_fn(n, |i, _| kern(q, &points[i]));
        let mean = (kx.transpose() * &noisy * &y)[0];
        let var = kern(q, q) - (kx.transpose() * &noisy * &kx)[0];
        let (m, v) = gp.query(&q.0, q.1);
        assert!((m - mean).abs() < 1e-8, "mean {m} vs {mean}");
        assert!((v - var).abs() < 1e-8, "var {v} vs {var}");
    }
}

#[test]
fn gp_variance_shrinks_once_a_point_is_admitted() {
    let mut gp = GpSarsa::<f64>::new(3, GpConfig::default()).unwrap();
    let b = vec![0.2, 0.5, 0.3, 0.0];
    let (_, prior) = gp.query(&b, 2);
    gp.observe(&Transition { b: b.clone(), a: 2, r: 4.0, next: None }, &mut seeded(0));
    let (_, post) = gp.query(&b, 2);
    assert!(post < prior);
    assert_eq!(gp.query(&b, 1), (0.0, prior));
}

fn toy_transition(b: [f64; 2], a: usize, r: f64, next: Option<[f64; 2]>) -> Transition<f64> {
    Transition { b: b.to_vec(), a, r, next: next.map(|n| Successor { b: n.to_vec(), a: 0, mask: ActionMask::all(2) }) }
}

#[test]
fn one_gradient_step_lowers_td_loss() {
    let mut improved = 0;
    for trial in 0..100u64 {
        let mut rng = seeded(1000 + trial);
        let config = DqnConfig { hidden: vec![4], batch_size: 8, replay_capacity: 8, ..DqnConfig::default() };
        let mut dqn = Dqn::<f64>::new(2, 3, config, &mut rng).unwrap();
        let batch: Vec<Transition<f64>> = (0..8)
            .map(|_| {
                let b = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let next = if rng.random_bool(0.5) {
                    None
                } else {
                    Some([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                };
                toy_transition(b, rng.random_range(0..3), rng.random_range(-1.0..1.0), next)
            })
            .collect();
        let refs: Vec<&Transition<f64>> = batch.iter().collect();
        let before = dqn.td_loss(&refs);
        dqn.train_on(&refs);
        if dqn.td_loss(&refs) < before {
            improved += 1;
        }
    }
    assert!(improved >= 95, "{improved}/100");
}

/// Two states, two actions, γ = 1. From s0, action 0 ends with reward 1 and
/// action 1 moves to s1 with reward 0. From s1, action 0 ends with reward 5
/// and action 1 ends with reward -2.
struct Toy;

impl Toy {
    const S: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

    fn step(state: usize, action: usize) -> (f64, Option<usize>) {
        match (state, action) {
            (0, 0) => (1.0, None),
            (0, _) => (0.0, Some(1)),
            (_, 0) => (5.0, None),
            _ => (-2.0, None),
        }
    }

    fn value_iteration() -> [[f64; 2]; 2] {
        let mut q = [[0.0f64; 2]; 2];
        for _ in 0..10 {
            for s in 0..2 {
                for a in 0..2 {
                    let (r, next) = Self::step(s, a);
                    q[s][a] = r + next.map_or(0.0, |n| q[n][0].max(q[n][1]));
                }
            }
        }
        q
    }
}

#[test]
fn dqn_learns_the_greedy_optimal_toy_policy() {
    let q_star = Toy::value_iteration();
    let optimal: Vec<usize> = q_star.iter().map(|q| if q[1] > q[0] { 1 } else { 0 }).collect();
    assert_eq!(optimal, vec![1, 0]);

    let mask = ActionMask::all(2);
    let mut solved = 0;
    for seed in 0..10u64 {
        let mut rng = seeded(seed);
        let config = DqnConfig {
            hidden: vec![16],
            batch_size: 16,
            replay_capacity: 500,
            target_sync: 50,
            epsilon: EpsilonSchedule { start: 0.5, end: 0.05, horizon: 2000 },
            ..DqnConfig::default()
        };
        let mut dqn = Dqn::<f64>::new(2, 2, config, &mut rng).unwrap();
        for _ in 0..2000 {
            let mut s = 0;
            let mut a = dqn.select_action(&Toy::S[s], &mask, Phase::Train, &mut rng).unwrap();
            loop {
                let (r, next) = Toy::step(s, a);
                match next {
                    None => {
                        dqn.observe(&toy_transition(Toy::S[s], a, r, None), &mut rng);
                        break;
                    }
                    Some(n) => {
                        let a_next = dqn.select_action(&Toy::S[n], &mask, Phase::Train, &mut rng).unwrap();
                        dqn.observe(&toy_transition(Toy::S[s], a, r, Some(Toy::S[n])), &mut rng);
                        s = n;
                        a = a_next;
                    }
                }
            }
        }
        let greedy: Vec<usize> =
            (0..2).map(|s| dqn.select_action(&Toy::S[s], &mask, Phase::Test, &mut rng).unwrap()).collect();
        if greedy == optimal {
            solved += 1;
        }
    }
    assert!(solved >= 9, "{solved}/10");
}
