//! Operator Schmidt decomposition: realignment, correlation matrices in
//! explicit local operator bases, and the OSC spectrum.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ZERO};
use crate::qstate::{self, BipartiteState};

/// Relative threshold below which an OSC counts as numerically zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Operator Schmidt coefficients μ₁ ≥ μ₂ ≥ … ≥ 0 of an operator, with the
/// purity Tr(ρ²) of the operator they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct OscSpectrum {
    mu: Vec<f64>,
    source_purity: f64,
}

impl OscSpectrum {
    /// Spectrum from raw coefficients; sorts them and takes Σμ² as purity.
    pub fn from_values(mut mu: Vec<f64>) -> Result<Self> {
        if mu.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Domain("operator Schmidt coefficients must be finite and nonnegative".into()));
        }
        mu.sort_by(|a, b| b.total_cmp(a));
        let source_purity = mu.iter().map(|x| x * x).sum();
        Ok(Self { mu, source_purity })
    }

    pub fn values(&self) -> &[f64] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// μ_i with 1-based `i`; zero past the end of the spectrum.
    pub fn mu(&self, i: usize) -> f64 {
        assert!(i >= 1, "OSC indices are 1-based");
        self.mu.get(i - 1).copied().unwrap_or(0.0)
    }

    /// The first `n` coefficients, zero-padded.
    pub fn padded(&self, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.mu.iter().copied().take(n).collect();
        v.resize(n, 0.0);
        v
    }

    pub fn source_purity(&self) -> f64 {
        self.source_purity
    }

    pub fn is_numerically_zero(&self, i: usize) -> bool {
        self.mu(i) < ZERO_THRESHOLD * self.mu(1)
    }

    /// Number of coefficients above the numerical zero threshold.
    pub fn numerical_rank(&self) -> usize {
        (1..=self.mu.len()).filter(|&i| !self.is_numerically_zero(i)).count()
    }

    pub fn sum(&self) -> f64 {
        self.mu.iter().sum()
    }
}

/// A matrix indexed by pairs of local operator-basis elements, `dim_a² × dim_b²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    dim_a: usize,
    dim_b: usize,
    entries: CMatrix,
}

impl CorrelationMatrix {
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.entries)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }
}

/// Realignment R[(i,j),(k,l)] = ⟨ik|ρ|jl⟩, rows `i·dA + j`, columns `k·dB + l`.
pub fn realign_matrix(dim_a: usize, dim_b: usize, rho: &CMatrix) -> CMatrix {
    CMatrix::from_fn(dim_a * dim_a, dim_b * dim_b, |r, c| {
        let (i, j) = (r / dim_a, r % dim_a);
        let (k, l) = (c / dim_b, c % dim_b);
        rho[(i * dim_b + k, j * dim_b + l)]
    })
}

pub fn realign(state: &BipartiteState) -> CorrelationMatrix {
    CorrelationMatrix {
        dim_a: state.dim_a(),
        dim_b: state.dim_b(),
        entries: realign_matrix(state.dim_a(), state.dim_b(), state.matrix()),
    }
}

/// Operator Schmidt coefficients: singular values of the realigned matrix.
pub fn osc(state: &BipartiteState) -> OscSpectrum {
    let mu = realign(state).singular_values();
    OscSpectrum { mu, source_purity: qstate::purity(state) }
}

/// Σ μ_i; a value above one certifies entanglement.
pub fn ccnr_value(state: &BipartiteState) -> f64 {
    osc(state).sum()
}

/// One term μ A ⊗ B of the operator Schmidt decomposition.
#[derive(Debug, Clone)]
pub struct OsdTerm {
    pub coefficient: f64,
    pub a: CMatrix,
    pub b: CMatrix,
}

/// Full decomposition ρ = Σ μ_i A_i ⊗ B_i with HS-orthonormal factors
/// reshaped from the singular vectors. Only useful for inspection; the
/// witness coefficients need the μ_i alone.
pub fn operator_schmidt_decomposition(state: &BipartiteState) -> Vec<OsdTerm> {
    let (da, db) = (state.dim_a(), state.dim_b());
    let svd = realign(state).entries.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut terms: Vec<OsdTerm> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(t, &mu)| OsdTerm {
            coefficient: mu,
            a: CMatrix::from_fn(da, da, |i, j| u[(i * da + j, t)]),
            // R = U Σ Vᴴ, so B is the t-th row of Vᴴ reshaped.
            b: CMatrix::from_fn(db, db, |k, l| v_t[(t, k * db + l)]),
        })
        .collect();
    terms.sort_by(|x, y| y.coefficient.total_cmp(&x.coefficient));
    terms
}

/// A Hilbert–Schmidt orthonormal basis of d × d matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Gram matrix G_ij = Tr(E_i† E_j).
    pub fn gram(&self) -> CMatrix {
        let n = self.elements.len();
        CMatrix::from_fn(n, n, |i, j| {
            self.elements[i].iter().zip(self.elements[j].iter()).map(|(a, b)| a.conj() * b).sum()
        })
    }
}

/// The matrix units |i⟩⟨j|, ordered row-major.
pub fn matrix_unit_basis(d: usize) -> Result<OperatorBasis> {
    if d == 0 {
        return Err(Error::Dimension("basis dimension must be positive".into()));
    }
    let elements = (0..d * d)
        .map(|idx| {
            let mut e = CMatrix::from_element(d, d, ZERO);
            e[(idx / d, idx % d)] = linalg::ONE;
            e
        })
        .collect();
    Ok(OperatorBasis { dim: d, elements })
}

/// I/√d followed by the generalised Gell-Mann matrices scaled to unit HS
/// norm: symmetric, antisymmetric, then diagonal.
pub fn gellmann_basis(d: usize) -> Result<OperatorBasis> {
    if d < 2 {
        return Err(Error::Dimension(format!("Gell-Mann basis needs d >= 2, got {d}")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(d * d);
    elements.push(CMatrix::identity(d, d).scale(1.0 / (d as f64).sqrt()));
    for j in 0..d {
        for k in j + 1..d {
            let mut e = CMatrix::from_element(d, d, ZERO);
            e[(j, k)] = Complex64::new(h, 0.0);
            e[(k, j)] = Complex64::new(h, 0.0);
            elements.push(e);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut e = CMatrix::from_element(d, d, ZERO);
            e[(j, k)] = Complex64::new(0.0, -h);
            e[(k, j)] = Complex64::new(0.0, h);
            elements.push(e);
        }
    }
    for l in 1..d {
        let c = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut e = CMatrix::from_element(d, d, ZERO);
        for j in 0..l {
            e[(j, j)] = Complex64::new(c, 0.0);
        }
        e[(l, l)] = Complex64::new(-(l as f64) * c, 0.0);
        elements.push(e);
    }
    Ok(OperatorBasis { dim: d, elements })
}

/// C[k, l] = Tr((C_k† ⊗ D_l†) ρ), evaluated entry by entry.
pub fn correlation_matrix(
    state: &BipartiteState,
    basis_a: &OperatorBasis,
    basis_b: &OperatorBasis,
) -> Result<CorrelationMatrix> {
    let (da, db) = (state.dim_a(), state.dim_b());
    if basis_a.dim != da || basis_b.dim != db {
        return Err(Error::Dimension(format!(
            "bases of size {} and {} for a {da} x {db} state",
            basis_a.dim, basis_b.dim
        )));
    }
    let rho = state.matrix();
    let entries = CMatrix::from_fn(basis_a.elements.len(), basis_b.elements.len(), |k, l| {
        let c = &basis_a.elements[k];
        let d = &basis_b.elements[l];
        // (C† ⊗ D†)[(a,b),(i,j)] = conj(C[i,a]) conj(D[j,b]); trace against ρ[(i,j),(a,b)].
        let mut acc = ZERO;
        for a in 0..da {
            for i in 0..da {
                let ca = c[(i, a)].conj();
                if ca == ZERO {
                    continue;
                }
                for b in 0..db {
                    for j in 0..db {
                        acc += ca * d[(j, b)].conj() * rho[(i * db + j, a * db + b)];
                    }
                }
            }
        }
        acc
    });
    Ok(CorrelationMatrix { dim_a: da, dim_b: db, entries })
}
