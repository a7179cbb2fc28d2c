//! Direct maximisation of F(s) = Σ_l μ_l t_l↓(s), where t↓ are the k²
//! products s_i s_j of a Schmidt vector sorted descending.
//!
//! The search runs on squared coefficients x = s², which live on the
//! probability simplex. Moves transfer mass between two coordinates, so
//! every iterate stays feasible without a projection step; the iterate
//! is re-sorted after each accepted move.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::osd::OscSpectrum;
use crate::qstate::SchmidtVector;

const MAX_SWEEPS: usize = 10_000;
const MIN_IMPROVEMENT: f64 = 1e-12;
const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-12;

/// The products s_i s_j, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpectrum(Vec<f64>);

impl ProductSpectrum {
    pub fn new(s: &SchmidtVector) -> Self {
        let s = s.as_slice();
        let mut t = Vec::with_capacity(s.len() * s.len());
        for &a in s {
            for &b in s {
                t.push(a * b);
            }
        }
        t.sort_by(|a, b| b.total_cmp(a));
        Self(t)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub best_s: SchmidtVector,
    pub best_value: f64,
    pub restarts: usize,
    /// Sweeps summed over all restarts.
    pub iterations: usize,
}

/// Σ_l μ_l t_l↓ with μ zero-padded to the number of products.
pub fn eval_f(mu: &OscSpectrum, s: &SchmidtVector) -> f64 {
    let t = ProductSpectrum::new(s);
    t.values().iter().enumerate().map(|(l, t)| mu.mu(l + 1) * t).sum()
}

/// F as a function of squared coefficients. `mu` must have length k², `buf` is scratch.
fn eval_squares(mu: &[f64], x: &[f64], buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    for (i, &xi) in x.iter().enumerate() {
        buf.push(xi);
        for &xj in &x[i + 1..] {
            let t = (xi * xj).sqrt();
            buf.push(t);
            buf.push(t);
        }
    }
    buf.sort_unstable_by(|a, b| b.total_cmp(a));
    mu.iter().zip(buf.iter()).map(|(m, t)| m * t).sum()
}

fn sort_desc(x: &mut [f64]) {
    x.sort_unstable_by(|a, b| b.total_cmp(a));
}

/// Compass search over pair transfers. Returns the local maximum and the sweep count.
fn ascend(mu: &[f64], mut x: Vec<f64>, buf: &mut Vec<f64>) -> (Vec<f64>, f64, usize) {
    let k = x.len();
    sort_desc(&mut x);
    let mut value = eval_squares(mu, &x, buf);
    if k == 1 {
        return (x, value, 0);
    }
    let mut step = INITIAL_STEP;
    let mut trial = x.clone();
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && step >= MIN_STEP {
        sweeps += 1;
        let start = value;
        for i in 0..k {
            for j in 0..k {
                if i == j || x[j] == 0.0 {
                    continue;
                }
                let t = step.min(x[j]);
                trial.copy_from_slice(&x);
                trial[i] += t;
                trial[j] -= t;
                let v = eval_squares(mu, &trial, buf);
                if v > value {
                    value = v;
                    sort_desc(&mut trial);
                    x.copy_from_slice(&trial);
                }
            }
        }
        if value - start < MIN_IMPROVEMENT {
            step *= 0.5;
        }
    }
    (x, value, sweeps)
}

fn dirichlet_point<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    x
}

/// Multistart maximisation of F over Schmidt vectors of length `k`.
///
/// Starts are the uniform vector, e₁, then `restarts − 2` flat Dirichlet
/// draws from `rng`. Ties go to the earliest start.
pub fn maximize_f<R: Rng + ?Sized>(mu: &OscSpectrum, k: usize, restarts: usize, rng: &mut R) -> Result<OptimResult> {
    if k == 0 {
        return Err(Error::Domain("Schmidt vector length must be at least 1".into()));
    }
    if restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let mu_padded = mu.padded(k * k);
    let mut buf = Vec::with_capacity(k * k);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut iterations = 0;
    for r in 0..restarts {
        let start = match r {
            0 => vec![1.0 / k as f64; k],
            1 => {
                let mut e = vec![0.0; k];
                e[0] = 1.0;
                e
            }
            _ => dirichlet_point(k, rng),
        };
        let (x, value, sweeps) = ascend(&mu_padded, start, &mut buf);
        iterations += sweeps;
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((x, value));
        }
    }
    let (x, _) = best.expect("restarts >= 1");
    let best_s = SchmidtVector::from_squares(&x)?;
    let best_value = eval_f(mu, &best_s);
    Ok(OptimResult { best_s, best_value, restarts, iterations })
}

/// Exhaustive search over ordered squared coefficients on the lattice
/// x = n / resolution, for k ≤ 3.
pub fn grid_oracle(mu: &OscSpectrum, k: usize, resolution: usize) -> Result<f64> {
    if !(1..=3).contains(&k) {
        return Err(Error::Unsupported(format!("grid oracle needs 1 <= k <= 3, got {k}")));
    }
    if resolution == 0 || resolution > 200 {
        return Err(Error::Domain(format!("grid resolution must be in 1..=200, got {resolution}")));
    }
    let mu_padded = mu.padded(k * k);
    let n = resolution;
    let scale = 1.0 / n as f64;
    let mut buf = Vec::with_capacity(k * k);
    let mut best = f64::NEG_INFINITY;
    let mut visit = |x: &[f64]| {
        best = best.max(eval_squares(&mu_padded, x, &mut buf));
    };
    match k {
        1 => visit(&[1.0]),
        2 => {
            for a in n.div_ceil(2)..=n {
                visit(&[a as f64 * scale, (n - a) as f64 * scale]);
            }
        }
        _ => {
            for a in n.div_ceil(3)..=n {
                for b in 0..=a.min(n - a) {
                    let c = n - a - b;
                    if c > b {
                        continue;
                    }
                    visit(&[a as f64 * scale, b as f64 * scale, c as f64 * scale]);
                }
            }
        }
    }
    Ok(best)
}
