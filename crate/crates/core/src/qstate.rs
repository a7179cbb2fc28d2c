//! Bipartite states: validated density matrices, pure states, the named
//! example states and seeded random ensembles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};

/// Relative Hermiticity tolerance: max|ρ − ρ†| ≤ tol · max|ρ|.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Absolute tolerance on |Tr ρ − 1|.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue, relative to Tr ρ.
pub const PSD_TOL: f64 = 1e-10;
/// Norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;

/// An operator on a `dim_a ⊗ dim_b` system.
///
/// Constructed through [`BipartiteState::new`] it is a density matrix
/// (Hermitian, unit trace, PSD). Witness targets only need to be Hermitian
/// and go through [`BipartiteState::hermitian`], which skips the trace and
/// positivity checks and sets the `hermitian_only` flag.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix,
    hermitian_only: bool,
}

impl BipartiteState {
    pub fn new(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Result<Self> {
        Self::validated(dim_a, dim_b, matrix, false)
    }

    pub fn hermitian(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Result<Self> {
        Self::validated(dim_a, dim_b, matrix, true)
    }

    fn validated(dim_a: usize, dim_b: usize, matrix: CMatrix, hermitian_only: bool) -> Result<Self> {
        if dim_a < 2 || dim_b < 2 {
            return Err(Error::Dimension(format!("local dimensions must be at least 2, got {dim_a} x {dim_b}")));
        }
        let n = dim_a * dim_b;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension(format!(
                "expected a {n}x{n} matrix for {dim_a} x {dim_b}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation {
                check: "finite",
                detail: "matrix contains NaN or infinite entries".into(),
            });
        }
        let scale = linalg::max_abs(&matrix);
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::Validation {
                check: "hermitian",
                detail: format!("max|rho - rho^dagger| = {defect:e} exceeds {:e}", HERMITIAN_TOL * scale),
            });
        }
        if !hermitian_only {
            let tr = matrix.trace();
            if (tr - ONE).norm() > TRACE_TOL {
                return Err(Error::Validation {
                    check: "unit-trace",
                    detail: format!("trace is {} + {}i", tr.re, tr.im),
                });
            }
            let min_ev = linalg::hermitian_eigenvalues(&matrix)[0];
            if min_ev < -PSD_TOL * tr.re {
                return Err(Error::Validation { check: "psd", detail: format!("smallest eigenvalue {min_ev:e}") });
            }
        }
        Ok(Self { dim_a, dim_b, matrix, hermitian_only })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Total dimension `dim_a · dim_b`.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_hermitian_only(&self) -> bool {
        self.hermitian_only
    }

    /// Identity divided by the total dimension.
    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Result<Self> {
        let n = dim_a * dim_b;
        Self::new(dim_a, dim_b, linalg::identity(n).scale(1.0 / n as f64))
    }

    pub fn from_pure(psi: &PureBipartite) -> Self {
        Self { dim_a: psi.dim_a, dim_b: psi.dim_b, matrix: psi.projector(), hermitian_only: false }
    }

    /// `c · X` as a Hermitian target.
    pub fn scaled(&self, c: f64) -> Self {
        Self { dim_a: self.dim_a, dim_b: self.dim_b, matrix: self.matrix.scale(c), hermitian_only: true }
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn local_unitary(&self, u: &CMatrix, v: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim_a || v.nrows() != self.dim_b {
            return Err(Error::Dimension("local unitary size mismatch".into()));
        }
        let w = u.kronecker(v);
        let mut out = &w * &self.matrix * w.adjoint();
        hermitize(&mut out);
        Ok(Self { matrix: out, ..self.clone() })
    }

    /// Tr(self · other), for operators on the same system.
    pub fn trace_with(&self, other: &BipartiteState) -> Result<Complex64> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::Dimension(format!(
                "operator on {}x{} paired with state on {}x{}",
                self.dim_a, self.dim_b, other.dim_a, other.dim_b
            )));
        }
        Ok(linalg::trace_of_product(&self.matrix, &other.matrix))
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn expectation(&self, psi: &PureBipartite) -> Result<f64> {
        if self.dim_a != psi.dim_a || self.dim_b != psi.dim_b {
            return Err(Error::Dimension("pure state and operator act on different systems".into()));
        }
        let v = &psi.amplitudes;
        Ok(v.dotc(&(&self.matrix * v)).re)
    }
}

/// Replace `m` by its Hermitian part.
fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// A normalised vector on `dim_a ⊗ dim_b`, index `i · dim_b + k` for `|i⟩|k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureBipartite {
    dim_a: usize,
    dim_b: usize,
    amplitudes: DVector<Complex64>,
}

impl PureBipartite {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || amplitudes.len() != dim_a * dim_b {
            return Err(Error::Dimension(format!("{} amplitudes for a {dim_a} x {dim_b} system", amplitudes.len())));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation { check: "unit-norm", detail: format!("norm is {norm}") });
        }
        Ok(Self { dim_a, dim_b, amplitudes })
    }

    /// Normalises `amplitudes` before validation.
    pub fn normalized(dim_a: usize, dim_b: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalise a zero or non-finite vector".into()));
        }
        Self::new(dim_a, dim_b, amplitudes.unscale(norm))
    }

    /// The product state `|i⟩ ⊗ |k⟩`.
    pub fn basis(dim_a: usize, dim_b: usize, i: usize, k: usize) -> Result<Self> {
        if i >= dim_a || k >= dim_b {
            return Err(Error::Dimension(format!("|{i}{k}> outside {dim_a} x {dim_b}")));
        }
        let mut v = DVector::from_element(dim_a * dim_b, ZERO);
        v[i * dim_b + k] = ONE;
        Self::new(dim_a, dim_b, v)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// The `dim_a × dim_b` coefficient matrix Ψ with ψ = Σ Ψ_{ik} |i⟩|k⟩.
    pub fn amplitude_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |i, k| self.amplitudes[i * self.dim_b + k])
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> CMatrix {
        let v = &self.amplitudes;
        v * v.adjoint()
    }
}

/// Schmidt coefficients s₁ ≥ … ≥ s_k ≥ 0 with Σ s_i² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtVector(Vec<f64>);

impl SchmidtVector {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Size("empty Schmidt vector".into()));
        }
        if s.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Validation { check: "nonnegative", detail: format!("{s:?}") });
        }
        if s.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Validation { check: "descending", detail: format!("{s:?}") });
        }
        let total: f64 = s.iter().map(|x| x * x).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation { check: "unit-norm", detail: format!("sum of squares {total}") });
        }
        Ok(Self(s))
    }

    /// From squared coefficients (a point of the simplex, any order).
    pub fn from_squares(squares: &[f64]) -> Result<Self> {
        let total: f64 = squares.iter().sum();
        if total <= 0.0 || !total.is_finite() || squares.iter().any(|&x| x < 0.0 || x.is_nan()) {
            return Err(Error::Domain("squares must be nonnegative with positive sum".into()));
        }
        let mut s: Vec<f64> = squares.iter().map(|x| (x / total).sqrt()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        Self::new(s)
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / (k as f64).sqrt(); k])
    }

    /// (1, 0, …, 0).
    pub fn leading(k: usize) -> Self {
        let mut s = vec![0.0; k];
        s[0] = 1.0;
        Self(s)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// (1/√n) Σ_{i<n} |ii⟩ on n ⊗ n.
pub fn max_entangled(n: usize) -> Result<PureBipartite> {
    if n < 2 {
        return Err(Error::Dimension(format!("maximally entangled state needs n >= 2, got {n}")));
    }
    let mut v = DVector::from_element(n * n, ZERO);
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for i in 0..n {
        v[i * n + i] = amp;
    }
    PureBipartite::new(n, n, v)
}

/// ½ P[(1/√r) Σ_{i<r} |ii⟩] + ¼ (|ab⟩ + |ba⟩)(⟨ab| + ⟨ba|) on d ⊗ d.
fn phi_plus_with_swap_pair(d: usize, r: usize, a: usize, b: usize) -> CMatrix {
    let mut phi = DVector::from_element(d * d, ZERO);
    let amp = Complex64::new(1.0 / (r as f64).sqrt(), 0.0);
    for i in 0..r {
        phi[i * d + i] = amp;
    }
    let mut pair = DVector::from_element(d * d, ZERO);
    pair[a * d + b] += ONE;
    pair[b * d + a] += ONE;
    (&phi * phi.adjoint()).scale(0.5) + (&pair * pair.adjoint()).scale(0.25)
}

/// The two-ququart example state: ½|φ₃⁺⟩⟨φ₃⁺| + ¼(|23⟩+|32⟩)(⟨23|+⟨32|).
pub fn rho0() -> BipartiteState {
    BipartiteState::new(4, 4, phi_plus_with_swap_pair(4, 3, 2, 3)).expect("rho0 is a valid density matrix")
}

/// ½|φ⁺⟩⟨φ⁺| + ¼(|k−2,k−1⟩+|k−1,k−2⟩)(…)† on k ⊗ k.
pub fn rho_family(k: usize) -> Result<BipartiteState> {
    if k < 2 {
        return Err(Error::Dimension(format!("rho_family needs k >= 2, got {k}")));
    }
    BipartiteState::new(k, k, phi_plus_with_swap_pair(k, k, k - 2, k - 1))
}

/// How the constituents of a random mixture are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixingWeights {
    /// 1/nPure each.
    #[default]
    Equal,
    /// Weights drawn from the flat Dirichlet distribution.
    FlatDirichlet,
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state on `dim_a ⊗ dim_b`.
pub fn random_pure<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> PureBipartite {
    let v = DVector::from_fn(dim_a * dim_b, |_, _| complex_normal(rng));
    PureBipartite::normalized(dim_a, dim_b, v).expect("gaussian vector is nonzero")
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) moved into Q.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Squared coefficients uniform on the simplex, then sorted.
pub fn random_schmidt_vector<R: Rng + ?Sized>(k: usize, rng: &mut R) -> SchmidtVector {
    let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    SchmidtVector::from_squares(&draws).expect("exponential draws are positive")
}

fn dirichlet_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

fn mix_pure_states<R, F>(
    d: usize,
    n_pure: usize,
    weights: MixingWeights,
    rng: &mut R,
    mut draw: F,
) -> Result<BipartiteState>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> PureBipartite,
{
    if n_pure == 0 {
        return Err(Error::Size("a mixture needs at least one pure state".into()));
    }
    let w = match weights {
        MixingWeights::Equal => vec![1.0 / n_pure as f64; n_pure],
        MixingWeights::FlatDirichlet => dirichlet_weights(n_pure, rng),
    };
    let n = d * d;
    let mut rho = CMatrix::from_element(n, n, ZERO);
    for wi in w {
        let psi = draw(rng);
        let v = psi.amplitudes();
        rho.gerc(Complex64::new(wi, 0.0), v, v, ONE);
    }
    BipartiteState::new(d, d, rho)
}

/// Equal-weight mixture of `n_pure` Haar pure states on d ⊗ d.
pub fn random_mixed<R: Rng + ?Sized>(d: usize, n_pure: usize, rng: &mut R) -> Result<BipartiteState> {
    random_mixed_weighted(d, n_pure, MixingWeights::Equal, rng)
}

pub fn random_mixed_weighted<R: Rng + ?Sized>(
    d: usize,
    n_pure: usize,
    weights: MixingWeights,
    rng: &mut R,
) -> Result<BipartiteState> {
    if d < 2 {
        return Err(Error::Dimension(format!("local dimension must be at least 2, got {d}")));
    }
    mix_pure_states(d, n_pure, weights, rng, |r| random_pure(d, d, r))
}

/// Σ_{i<k} s_i U|i⟩ ⊗ V|i⟩ with random Schmidt vector and Haar U, V.
pub fn random_schmidt_rank_pure<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<PureBipartite> {
    if k == 0 || k > d {
        return Err(Error::Rank { rank: k, dim: d });
    }
    let s = random_schmidt_vector(k, rng);
    let u = haar_unitary(d, rng);
    let v = haar_unitary(d, rng);
    let mut psi = DVector::from_element(d * d, ZERO);
    for (i, &si) in s.as_slice().iter().enumerate() {
        for a in 0..d {
            let ua = u[(a, i)] * si;
            for b in 0..d {
                psi[a * d + b] += ua * v[(b, i)];
            }
        }
    }
    PureBipartite::normalized(d, d, psi)
}

/// Mixture of `n_pure` pure states of Schmidt rank at most `k`, a member of S_k.
pub fn random_sn_bounded<R: Rng + ?Sized>(d: usize, k: usize, n_pure: usize, rng: &mut R) -> Result<BipartiteState> {
    if k == 0 || k > d {
        return Err(Error::Rank { rank: k, dim: d });
    }
    if d < 2 {
        return Err(Error::Dimension(format!("local dimension must be at least 2, got {d}")));
    }
    mix_pure_states(d, n_pure, MixingWeights::Equal, rng, |r| {
        random_schmidt_rank_pure(d, k, r).expect("rank checked above")
    })
}

/// Random Hermitian matrix (GUE-like), scaled to unit Frobenius norm.
pub fn random_hermitian<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> Result<BipartiteState> {
    let n = dim_a * dim_b;
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let mut h = (&g + g.adjoint()).scale(0.5);
    let norm = h.norm();
    h.unscale_mut(norm);
    hermitize(&mut h);
    BipartiteState::hermitian(dim_a, dim_b, h)
}

/// ρ^Γ: transpose of the B factor, ρ^Γ[(i,l),(j,k)] = ρ[(i,k),(j,l)].
pub fn partial_transpose(state: &BipartiteState) -> CMatrix {
    let (da, db) = (state.dim_a, state.dim_b);
    let rho = &state.matrix;
    CMatrix::from_fn(da * db, da * db, |r, c| {
        let (i, l) = (r / db, r % db);
        let (j, k) = (c / db, c % db);
        rho[(i * db + k, j * db + l)]
    })
}

/// Tr(ρ²), computed as the squared Frobenius norm of a Hermitian matrix.
pub fn purity(state: &BipartiteState) -> f64 {
    state.matrix.norm_squared()
}

/// Singular values of the amplitude matrix, descending, length min(dA, dB).
pub fn schmidt_coefficients(psi: &PureBipartite) -> SchmidtVector {
    let mut s = linalg::singular_values(&psi.amplitude_matrix());
    s.resize(psi.dim_a.min(psi.dim_b), 0.0);
    // Renormalise away rounding so the SchmidtVector invariant holds exactly.
    let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut s {
        *x /= norm;
    }
    SchmidtVector::new(s).expect("singular values are sorted and nonnegative")
}

/// ρ_A ⊗ ρ_B.
pub fn product_state(rho_a: &CMatrix, rho_b: &CMatrix) -> Result<BipartiteState> {
    BipartiteState::new(rho_a.nrows(), rho_b.nrows(), rho_a.kronecker(rho_b))
}

/// Diagonal single-qudit density matrix from probabilities.
pub fn diagonal_density(probs: &[f64]) -> CMatrix {
    let v = DVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)));
    DMatrix::from_diagonal(&v)
}
