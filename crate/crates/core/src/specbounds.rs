//! Perron root of a nonnegative matrix and the classical row-sum bounds
//! of Frobenius, Ledermann, Ostrowski and Brauer.
//!
//! All four bounds are expressed through the row sums `P_r`, their
//! extremes `p ≤ P`, and the smallest entry `m`.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Row sums closer than this are treated as equal.
const EQUAL_SUMS_TOL: f64 = 1e-14;

/// A square matrix with finite, nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegativeMatrix(DMatrix<f64>);

impl NonnegativeMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "expected a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if let Some(bad) = m.iter().find(|x| **x < 0.0 || !x.is_finite()) {
            return Err(Error::Domain(format!("matrix entry {bad} is negative or not finite")));
        }
        Ok(Self(m))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowSumStats {
    pub row_sums: Vec<f64>,
    /// Smallest row sum.
    pub min_sum: f64,
    /// Largest row sum.
    pub max_sum: f64,
    /// Smallest entry.
    pub min_entry: f64,
}

impl RowSumStats {
    fn all_equal(&self) -> bool {
        self.max_sum - self.min_sum < EQUAL_SUMS_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    Frobenius,
    Ledermann,
    Ostrowski,
    Brauer,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 4] = [Self::Frobenius, Self::Ledermann, Self::Ostrowski, Self::Brauer];

    pub fn name(self) -> &'static str {
        match self {
            Self::Frobenius => "frobenius",
            Self::Ledermann => "ledermann",
            Self::Ostrowski => "ostrowski",
            Self::Brauer => "brauer",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `lower ≤ ρ(M) ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
    pub method: BoundMethod,
}

impl BoundPair {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && value <= self.upper + slack
    }
}

pub fn row_sum_stats(m: &NonnegativeMatrix) -> RowSumStats {
    let a = m.as_matrix();
    let row_sums: Vec<f64> = a.row_iter().map(|r| r.sum()).collect();
    let min_sum = row_sums.iter().copied().fold(f64::INFINITY, f64::min);
    let max_sum = row_sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_entry = a.iter().copied().fold(f64::INFINITY, f64::min);
    RowSumStats { row_sums, min_sum, max_sum, min_entry }
}

/// Perron root: the largest eigenvalue modulus.
pub fn spectral_radius(m: &NonnegativeMatrix) -> f64 {
    let a = m.as_matrix();
    if a.nrows() == 1 {
        return a[(0, 0)];
    }
    if a == &a.transpose() {
        return crate::linalg::max_symmetric_eigenvalue(a).max(0.0);
    }
    a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_bounds(m: &NonnegativeMatrix) -> BoundPair {
    let s = row_sum_stats(m);
    let lower = if s.all_equal() { s.max_sum } else { s.min_sum };
    BoundPair { lower, upper: s.max_sum, method: BoundMethod::Frobenius }
}

/// Ledermann with δ = max over P_r < P_s of P_r / P_s.
pub fn ledermann_bounds(m: &NonnegativeMatrix) -> BoundPair {
    let s = row_sum_stats(m);
    let method = BoundMethod::Ledermann;
    if s.all_equal() {
        return BoundPair { lower: s.max_sum, upper: s.max_sum, method };
    }
    if s.min_entry == 0.0 {
        return BoundPair { lower: s.min_sum, upper: s.max_sum, method };
    }
    // For a fixed P_r the best partner is the next larger distinct sum.
    let mut sorted = s.row_sums.clone();
    sorted.sort_by(f64::total_cmp);
    let delta = sorted.windows(2).filter(|w| w[1] - w[0] >= EQUAL_SUMS_TOL).map(|w| w[0] / w[1]).fold(0.0, f64::max);
    ledermann_pair(s.min_sum, s.max_sum, s.min_entry, delta)
}

fn ledermann_pair(p: f64, big_p: f64, m: f64, delta: f64) -> BoundPair {
    let root = delta.sqrt();
    BoundPair { lower: p + m * (1.0 / root - 1.0), upper: big_p - m * (1.0 - root), method: BoundMethod::Ledermann }
}

pub fn ostrowski_bounds(m: &NonnegativeMatrix) -> BoundPair {
    let s = row_sum_stats(m);
    let method = BoundMethod::Ostrowski;
    let (p, big_p, mm) = (s.min_sum, s.max_sum, s.min_entry);
    if s.all_equal() {
        return BoundPair { lower: big_p, upper: big_p, method };
    }
    if mm == 0.0 {
        return BoundPair { lower: p, upper: big_p, method };
    }
    if p - mm <= 0.0 {
        // σ → 0: the upper bound tends to P − m, the lower one is clamped at p.
        return BoundPair { lower: p, upper: big_p - mm, method };
    }
    let sigma = ((p - mm) / (big_p - mm)).sqrt();
    BoundPair { lower: p + mm * (1.0 / sigma - 1.0), upper: ostrowski_upper(big_p, p, mm), method }
}

/// P − m(1 − σ), σ = √((p − m)/(P − m)).
pub(crate) fn ostrowski_upper(big_p: f64, p: f64, m: f64) -> f64 {
    if m == 0.0 || big_p - p < EQUAL_SUMS_TOL {
        return big_p;
    }
    let sigma = ((p - m).max(0.0) / (big_p - m)).sqrt();
    big_p - m * (1.0 - sigma)
}

/// P − m(1 − 1/g) with g = (P − 2m + √(P² − 4m(P − p))) / (2(p − m)).
pub(crate) fn brauer_upper(big_p: f64, p: f64, m: f64) -> f64 {
    if m == 0.0 || big_p - p < EQUAL_SUMS_TOL {
        return big_p;
    }
    // 1/g, which is 0 in the p = m limit.
    let inv_g = 2.0 * (p - m).max(0.0) / (big_p - 2.0 * m + (big_p * big_p - 4.0 * m * (big_p - p)).sqrt());
    big_p - m * (1.0 - inv_g)
}

/// Brauer's pair. The lower bound uses h = (−p + 2m + √(p² + 4m(P − p)))/(2m).
pub fn brauer_bounds(m: &NonnegativeMatrix) -> BoundPair {
    let s = row_sum_stats(m);
    let method = BoundMethod::Brauer;
    let (p, big_p, mm) = (s.min_sum, s.max_sum, s.min_entry);
    if s.all_equal() {
        return BoundPair { lower: big_p, upper: big_p, method };
    }
    if mm == 0.0 {
        return BoundPair { lower: p, upper: big_p, method };
    }
    let h = (-p + 2.0 * mm + (p * p + 4.0 * mm * (big_p - p)).sqrt()) / (2.0 * mm);
    BoundPair { lower: p + mm * (h - 1.0), upper: brauer_upper(big_p, p, mm), method }
}

pub fn bounds(m: &NonnegativeMatrix, method: BoundMethod) -> BoundPair {
    match method {
        BoundMethod::Frobenius => frobenius_bounds(m),
        BoundMethod::Ledermann => ledermann_bounds(m),
        BoundMethod::Ostrowski => ostrowski_bounds(m),
        BoundMethod::Brauer => brauer_bounds(m),
    }
}

pub fn all_bounds(m: &NonnegativeMatrix) -> [BoundPair; 4] {
    BoundMethod::ALL.map(|method| bounds(m, method))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_by_two() -> NonnegativeMatrix {
        NonnegativeMatrix::from_row_slice(2, &[1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn stats_examples() {
        let s = row_sum_stats(&two_by_two());
        assert_eq!(s.row_sums, vec![3.0, 7.0]);
        assert_eq!((s.min_sum, s.max_sum, s.min_entry), (3.0, 7.0, 1.0));

        let ones = NonnegativeMatrix::new(DMatrix::from_element(3, 3, 1.0)).unwrap();
        let s = row_sum_stats(&ones);
        assert_eq!((s.min_sum, s.max_sum, s.min_entry), (3.0, 3.0, 1.0));

        let zero = NonnegativeMatrix::new(DMatrix::zeros(3, 3)).unwrap();
        let s = row_sum_stats(&zero);
        assert_eq!((s.min_sum, s.max_sum, s.min_entry), (0.0, 0.0, 0.0));
    }

    #[test]
    fn negative_entries_rejected() {
        assert!(matches!(NonnegativeMatrix::from_row_slice(2, &[1.0, -2.0, 3.0, 4.0]), Err(Error::Domain(_))));
        assert!(NonnegativeMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn spectral_radius_examples() {
        // (5 + √33) / 2
        assert_abs_diff_eq!(spectral_radius(&two_by_two()), 5.372_281_323_269_014, epsilon = 1e-9);
        for k in 1..=5 {
            let ones = NonnegativeMatrix::new(DMatrix::from_element(k, k, 1.0)).unwrap();
            assert_abs_diff_eq!(spectral_radius(&ones), k as f64, epsilon = 1e-12);
        }
        let diag = NonnegativeMatrix::new(DMatrix::from_diagonal(&nalgebra::dvector![3.5, 1.25])).unwrap();
        assert_abs_diff_eq!(spectral_radius(&diag), 3.5, epsilon = 1e-14);
    }

    #[test]
    fn two_by_two_bounds() {
        let m = two_by_two();
        let rho = spectral_radius(&m);
        let f = frobenius_bounds(&m);
        assert_eq!((f.lower, f.upper), (3.0, 7.0));

        let l = ledermann_bounds(&m);
        assert_abs_diff_eq!(l.upper, 7.0 - (1.0 - (3.0f64 / 7.0).sqrt()), epsilon = 1e-14);
        assert_abs_diff_eq!(l.upper, 6.6547, epsilon = 1e-4);

        let o = ostrowski_bounds(&m);
        assert_abs_diff_eq!(o.upper, 7.0 - (1.0 - (2.0f64 / 6.0).sqrt()), epsilon = 1e-14);
        assert_abs_diff_eq!(o.upper, 6.5774, epsilon = 1e-4);

        let b = brauer_bounds(&m);
        assert!(b.upper < o.upper);
        // h = (−3 + 2 + √(9 + 16)) / 2 = 2, lower = 3 + 1 = 4.
        assert_abs_diff_eq!(b.lower, 4.0, epsilon = 1e-14);
        for pair in [f, l, o, b] {
            assert!(pair.contains(rho, 1e-9), "{pair:?}");
        }
    }

    #[test]
    fn equal_row_sums_are_exact() {
        let m = NonnegativeMatrix::from_row_slice(3, &[1.0, 2.0, 3.0, 3.0, 1.0, 2.0, 2.0, 3.0, 1.0]).unwrap();
        for pair in all_bounds(&m) {
            assert_eq!((pair.lower, pair.upper), (6.0, 6.0), "{}", pair.method);
        }
        assert_abs_diff_eq!(spectral_radius(&m), 6.0, epsilon = 1e-9);

        // Row sums that agree only up to rounding.
        let m = NonnegativeMatrix::from_row_slice(3, &[0.1, 0.2, 0.7, 0.7, 0.1, 0.2, 0.2, 0.7, 0.1]).unwrap();
        let s = row_sum_stats(&m);
        for pair in all_bounds(&m) {
            assert_eq!((pair.lower, pair.upper), (s.max_sum, s.max_sum), "{}", pair.method);
        }
    }

    #[test]
    fn zero_min_entry_reduces_to_frobenius() {
        let m = NonnegativeMatrix::from_row_slice(3, &[0.0, 2.0, 3.0, 1.0, 1.0, 2.0, 2.0, 5.0, 1.0]).unwrap();
        let f = frobenius_bounds(&m);
        for pair in all_bounds(&m) {
            assert_eq!((pair.lower, pair.upper), (f.lower, f.upper), "{}", pair.method);
        }
    }

    #[test]
    fn upper_limits_at_min_sum_equal_min_entry() {
        // p = m > 0 cannot occur for a matrix of order ≥ 2; the helpers are also
        // fed arbitrary spectra by the witness module.
        assert_eq!(ostrowski_upper(3.0, 1.0, 1.0), 2.0);
        assert_eq!(brauer_upper(3.0, 1.0, 1.0), 2.0);
        assert_eq!(ostrowski_upper(3.0, 2.0, 0.0), 3.0);
        assert_eq!(brauer_upper(3.0, 3.0, 0.5), 3.0);
    }

    #[test]
    fn sandwich_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let n = rng.random_range(2..7);
            let m = NonnegativeMatrix::new(DMatrix::from_fn(n, n, |_, _| rng.random::<f64>())).unwrap();
            let rho = spectral_radius(&m);
            for pair in all_bounds(&m) {
                assert!(pair.lower <= pair.upper + 1e-12);
                assert!(pair.contains(rho, 1e-9), "{pair:?} vs {rho}");
            }
        }
    }
}
