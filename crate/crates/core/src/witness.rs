//! Schmidt-number witnesses built from the operator Schmidt coefficients
//! of a target operator X.
//!
//! For a target X with OSC μ, the witness λ·𝕀 − X is nonnegative on every
//! state of Schmidt number at most k as long as λ bounds
//! max_s Σ_l μ_l t_l↓(s). The exact λ comes from the arrangement matrices
//! for k ≤ 4; θ ≤ ζ ≤ η ≤ P are closed-form upper bounds obtained by
//! feeding the canonical arrangement matrix to the row-sum bounds in
//! [`crate::specbounds`].

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::optim;
use crate::osd::{self, OscSpectrum};
use crate::qstate::BipartiteState;
use crate::specbounds::{self, NonnegativeMatrix};

/// Default slack for the coefficient chain.
pub const CHAIN_SLACK: f64 = 1e-9;

const K3_PATTERNS: [[usize; 9]; 2] = [[1, 2, 4, 3, 6, 7, 5, 8, 9], [1, 2, 5, 3, 4, 7, 6, 8, 9]];

#[rustfmt::skip]
const K4_PATTERNS: [[usize; 16]; 12] = [
    [1, 2, 4, 6, 3, 8, 9, 11, 5, 10, 13, 14, 7, 12, 15, 16],
    [1, 2, 4, 6, 3, 8, 9, 12, 5, 10, 11, 14, 7, 13, 15, 16],
    [1, 2, 4, 10, 3, 6, 7, 12, 5, 8, 9, 14, 11, 13, 15, 16],
    [1, 2, 5, 10, 3, 4, 7, 12, 6, 8, 9, 14, 11, 13, 15, 16],
    [1, 2, 4, 9, 3, 6, 7, 12, 5, 8, 11, 14, 10, 13, 15, 16],
    [1, 2, 5, 9, 3, 4, 7, 12, 6, 8, 11, 14, 10, 13, 15, 16],
    [1, 2, 4, 9, 3, 6, 7, 11, 5, 8, 13, 14, 10, 12, 15, 16],
    [1, 2, 5, 9, 3, 4, 7, 11, 6, 8, 13, 14, 10, 12, 15, 16],
    [1, 2, 4, 7, 3, 6, 9, 12, 5, 10, 11, 14, 8, 13, 15, 16],
    [1, 2, 5, 7, 3, 4, 9, 12, 6, 10, 11, 14, 8, 13, 15, 16],
    [1, 2, 4, 7, 3, 6, 9, 11, 5, 10, 13, 14, 8, 12, 15, 16],
    [1, 2, 5, 7, 3, 4, 9, 11, 6, 10, 13, 14, 8, 12, 15, 16],
];

/// A k×k placement of the 1-based OSC subscripts 1..=k².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementPattern {
    k: usize,
    /// Row-major.
    indices: Vec<usize>,
}

impl ArrangementPattern {
    pub fn new(k: usize, indices: Vec<usize>) -> Result<Self> {
        if k == 0 || indices.len() != k * k {
            return Err(Error::Size(format!("{} indices for a {k}x{k} pattern", indices.len())));
        }
        let mut seen = vec![false; k * k];
        for &i in &indices {
            if i == 0 || i > k * k || std::mem::replace(&mut seen[i - 1], true) {
                return Err(Error::Domain(format!("pattern is not a bijection onto 1..={}: {indices:?}", k * k)));
            }
        }
        Ok(Self { k, indices })
    }

    /// The arrangement induced by s₁² ≥ s₁s₂ ≥ … ≥ s_k².
    pub fn canonical(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Size("pattern order must be at least 1".into()));
        }
        let mut indices = vec![0; k * k];
        for i in 1..=k {
            let offset = (i - 1) * (2 * k - i + 1);
            indices[(i - 1) * k + (i - 1)] = offset + 1;
            for j in i + 1..=k {
                indices[(i - 1) * k + (j - 1)] = offset + 2 * (j - i);
                indices[(j - 1) * k + (i - 1)] = offset + 2 * (j - i) + 1;
            }
        }
        Self::new(k, indices)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Subscript at 0-based `(row, col)`.
    pub fn index(&self, row: usize, col: usize) -> usize {
        self.indices[row * self.k + col]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.indices.chunks(self.k).map(<[usize]>::to_vec).collect()
    }

    pub fn realize(&self, mu: &OscSpectrum) -> ArrangementMatrix {
        let values = DMatrix::from_fn(self.k, self.k, |r, c| mu.mu(self.index(r, c)));
        ArrangementMatrix { pattern: self.clone(), values }
    }
}

/// An arrangement pattern filled with a concrete spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrangementMatrix {
    pattern: ArrangementPattern,
    values: DMatrix<f64>,
}

impl ArrangementMatrix {
    pub fn pattern(&self) -> &ArrangementPattern {
        &self.pattern
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn symmetrized(&self) -> DMatrix<f64> {
        (&self.values + self.values.transpose()) * 0.5
    }

    /// max over the unit sphere of sᵀ M s.
    pub fn max_quadratic_form(&self) -> f64 {
        linalg::max_symmetric_eigenvalue(&self.symmetrized())
    }

    pub fn perron_root(&self) -> f64 {
        let m = NonnegativeMatrix::new(self.values.clone()).expect("OSC entries are nonnegative");
        specbounds::spectral_radius(&m)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.values.row_iter().map(|r| r.sum()).collect()
    }
}

pub fn canonical_matrix(mu: &OscSpectrum, k: usize) -> Result<ArrangementMatrix> {
    Ok(ArrangementPattern::canonical(k)?.realize(mu))
}

/// The arrangements among which the maximiser of F must lie; canonical first.
pub fn arrangement_set(k: usize) -> Result<Vec<ArrangementPattern>> {
    match k {
        2 => Ok(vec![ArrangementPattern::canonical(2)?]),
        3 => K3_PATTERNS.iter().map(|p| ArrangementPattern::new(3, p.to_vec())).collect(),
        4 => K4_PATTERNS.iter().map(|p| ArrangementPattern::new(4, p.to_vec())).collect(),
        _ => Err(Error::Unsupported(format!("no arrangement set for k = {k}; use the numeric maximiser"))),
    }
}

/// ½(μ₁ + μ₄ + √((μ₁ − μ₄)² + (μ₂ + μ₃)²)).
pub fn lambda3_closed_form(mu: &OscSpectrum) -> f64 {
    let (a, b, c, d) = (mu.mu(1), mu.mu(2), mu.mu(3), mu.mu(4));
    0.5 * (a + d + ((a - d).powi(2) + (b + c).powi(2)).sqrt())
}

/// λ_{k+1}: the largest eigenvalue over the symmetrized arrangement matrices.
pub fn lambda_exact(mu: &OscSpectrum, k: usize) -> Result<f64> {
    if k == 2 {
        return Ok(lambda3_closed_form(mu));
    }
    Ok(arrangement_set(k)?.iter().map(|p| p.realize(mu).max_quadratic_form()).fold(f64::NEG_INFINITY, f64::max))
}

/// Perron root of the unsymmetrized canonical matrix. Not an upper bound on F
/// in general; kept as a diagnostic.
pub fn canonical_perron_root(mu: &OscSpectrum, k: usize) -> Result<f64> {
    Ok(canonical_matrix(mu, k)?.perron_root())
}

/// P: μ₁ + μ₂ + μ₄ + … + μ_{2k−2}.
pub fn first_row_sum(mu: &OscSpectrum, k: usize) -> f64 {
    mu.mu(1) + (1..k).map(|j| mu.mu(2 * j)).sum::<f64>()
}

/// p: the canonical last row, ending in μ_{k²}.
pub fn last_row_sum(mu: &OscSpectrum, k: usize) -> f64 {
    let below: f64 = (1..k).map(|j| mu.mu((j - 1) * (2 * k - j + 1) + 2 * (k - j) + 1)).sum();
    below + mu.mu(k * k)
}

fn row_sum_triple(mu: &OscSpectrum, k: usize) -> (f64, f64, f64) {
    (first_row_sum(mu, k), last_row_sum(mu, k), mu.mu(k * k))
}

pub fn theta(mu: &OscSpectrum, k: usize) -> f64 {
    let (big_p, p, m) = row_sum_triple(mu, k);
    specbounds::brauer_upper(big_p, p, m)
}

pub fn zeta(mu: &OscSpectrum, k: usize) -> f64 {
    let (big_p, p, m) = row_sum_triple(mu, k);
    specbounds::ostrowski_upper(big_p, p, m)
}

/// P − m(1 − √(p/P)), i.e. Ledermann's upper bound with δ = p/P.
pub fn eta(mu: &OscSpectrum, k: usize) -> f64 {
    let (big_p, p, m) = row_sum_triple(mu, k);
    if m == 0.0 || big_p <= 0.0 {
        return big_p;
    }
    big_p - m * (1.0 - (p / big_p).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCoefficients {
    /// The Schmidt number k + 1 these coefficients certify.
    pub target_sn: usize,
    pub lambda: Option<f64>,
    pub lambda_numeric: Option<f64>,
    pub theta: f64,
    pub zeta: f64,
    pub eta: f64,
    pub big_p: f64,
}

impl WitnessCoefficients {
    /// λ̂ ≤ λ ≤ θ ≤ ζ ≤ η ≤ P, each comparison with `slack`.
    pub fn check_chain(&self, slack: f64) -> Result<()> {
        let mut chain: Vec<(&str, f64)> = Vec::with_capacity(6);
        if let Some(v) = self.lambda_numeric {
            chain.push(("lambda_numeric", v));
        }
        if let Some(v) = self.lambda {
            chain.push(("lambda", v));
        }
        chain.extend([("theta", self.theta), ("zeta", self.zeta), ("eta", self.eta), ("P", self.big_p)]);
        for w in chain.windows(2) {
            let ((a, x), (b, y)) = (w[0], w[1]);
            if x.is_nan() || y.is_nan() || x > y + slack {
                return Err(Error::Chain(format!("{a} = {x} exceeds {b} = {y}")));
            }
        }
        Ok(())
    }

    /// The tightest coefficient available.
    pub fn best(&self) -> f64 {
        self.lambda.or(self.lambda_numeric).unwrap_or(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientOptions {
    pub with_numeric: bool,
    pub restarts: usize,
}

impl Default for CoefficientOptions {
    fn default() -> Self {
        Self { with_numeric: false, restarts: 32 }
    }
}

/// The coefficient bundle for a target operator. λ is exact for k ≤ 4;
/// λ̂ is computed when requested and always for k ≥ 5.
pub fn coefficients<R: Rng + ?Sized>(
    target: &BipartiteState,
    k: usize,
    opts: &CoefficientOptions,
    rng: &mut R,
) -> Result<WitnessCoefficients> {
    coefficients_from_spectrum(&osd::osc(target), k, opts, rng)
}

pub fn coefficients_from_spectrum<R: Rng + ?Sized>(
    mu: &OscSpectrum,
    k: usize,
    opts: &CoefficientOptions,
    rng: &mut R,
) -> Result<WitnessCoefficients> {
    if k < 2 {
        return Err(Error::Domain(format!("witness order k must be at least 2, got {k}")));
    }
    let lambda = if k <= 4 { Some(lambda_exact(mu, k)?) } else { None };
    let lambda_numeric =
        if opts.with_numeric || k >= 5 { Some(optim::maximize_f(mu, k, opts.restarts, rng)?.best_value) } else { None };
    Ok(WitnessCoefficients {
        target_sn: k + 1,
        lambda,
        lambda_numeric,
        theta: theta(mu, k),
        zeta: zeta(mu, k),
        eta: eta(mu, k),
        big_p: first_row_sum(mu, k),
    })
}

/// Which coefficient multiplies the identity in c·𝕀 − X.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessMethod {
    Lambda,
    Theta,
    Zeta,
    Eta,
    BigP,
    /// μ₁(X): an entanglement witness (Schmidt number 2).
    Mu1,
    Fixed(f64),
}

impl fmt::Display for WitnessMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lambda => f.write_str("lambda"),
            Self::Theta => f.write_str("theta"),
            Self::Zeta => f.write_str("zeta"),
            Self::Eta => f.write_str("eta"),
            Self::BigP => f.write_str("P"),
            Self::Mu1 => f.write_str("mu1"),
            Self::Fixed(c) => write!(f, "fixed:{c}"),
        }
    }
}

impl FromStr for WitnessMethod {
    type Err = Error;

    /// Accepts `lambda`, `theta`, `zeta`, `eta`, `P`/`bigP`, `mu1`, and
    /// `fixed:<c>` where `c` is a decimal or a fraction `a/b`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(Self::Lambda),
            "theta" => Ok(Self::Theta),
            "zeta" => Ok(Self::Zeta),
            "eta" => Ok(Self::Eta),
            "P" | "bigP" | "big_p" => Ok(Self::BigP),
            "mu1" => Ok(Self::Mu1),
            _ => {
                let c = s
                    .strip_prefix("fixed:")
                    .and_then(parse_real)
                    .ok_or_else(|| Error::Unsupported(format!("unknown witness method {s:?}")))?;
                Ok(Self::Fixed(c))
            }
        }
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            (b != 0.0).then(|| a / b)
        }
        None => s.trim().parse().ok(),
    }
}

/// c·𝕀 − X.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtWitness {
    pub coefficient: f64,
    pub target: BipartiteState,
    /// A negative value on a state certifies Schmidt number at least this.
    pub target_sn: usize,
    pub method: WitnessMethod,
}

impl SchmidtWitness {
    pub fn certifies(&self, value: f64) -> bool {
        value < 0.0
    }
}

/// Witness for Schmidt number k + 1 (or 2 for [`WitnessMethod::Mu1`]).
pub fn build_witness(target: &BipartiteState, k: usize, method: WitnessMethod) -> Result<SchmidtWitness> {
    if k < 1 {
        return Err(Error::Domain("witness order k must be at least 1".into()));
    }
    let mu = osd::osc(target);
    let (coefficient, target_sn) = match method {
        WitnessMethod::Lambda if k >= 5 => {
            return Err(Error::Unsupported(format!(
                "exact lambda is only available for k <= 4 (got {k}); use theta, zeta, eta or P"
            )))
        }
        WitnessMethod::Lambda if k == 1 => (mu.mu(1), 2),
        WitnessMethod::Lambda => (lambda_exact(&mu, k)?, k + 1),
        WitnessMethod::Theta => (theta(&mu, k), k + 1),
        WitnessMethod::Zeta => (zeta(&mu, k), k + 1),
        WitnessMethod::Eta => (eta(&mu, k), k + 1),
        WitnessMethod::BigP => (first_row_sum(&mu, k), k + 1),
        WitnessMethod::Mu1 => (mu.mu(1), 2),
        WitnessMethod::Fixed(c) => {
            if c < 0.0 || !c.is_finite() {
                return Err(Error::Domain(format!("witness coefficient must be finite and nonnegative, got {c}")));
            }
            (c, k + 1)
        }
    };
    Ok(SchmidtWitness { coefficient, target: target.clone(), target_sn, method })
}

/// Tr(W ρ) = c·Tr ρ − Tr(X ρ).
pub fn evaluate_witness(w: &SchmidtWitness, rho: &BipartiteState) -> Result<f64> {
    let overlap = w.target.trace_with(rho)?;
    let trace: f64 = rho.matrix().diagonal().iter().map(|z| z.re).sum();
    Ok(w.coefficient * trace - overlap.re)
}

/// k/n: the largest overlap of a Schmidt-number-k state with a maximally
/// entangled state of local dimension n.
pub fn fidelity_bound(k: usize, n: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("fidelity bound needs 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(k as f64 / n as f64)
}
