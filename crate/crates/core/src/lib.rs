//! Schmidt-number certification toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`]: bipartite density matrices, pure states, named example
//!   states and seeded random ensembles.
//! * [`osd`]: realignment, correlation matrices and the operator Schmidt
//!   coefficient (OSC) spectrum.
//! * [`specbounds`]: Perron root and the classical row-sum bounds for
//!   nonnegative matrices.
//! * [`witness`]: arrangement matrices, the exact coefficient λ for small
//!   orders and the closed-form upper bounds θ, ζ, η and P.
//! * [`optim`]: direct maximisation of the ordered-product functional, the
//!   numeric route to λ for any order.

pub mod error;
pub mod linalg;
pub mod optim;
pub mod osd;
pub mod qstate;
pub mod specbounds;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use optim::{eval_f, grid_oracle, maximize_f, OptimResult, ProductSpectrum};
pub use osd::{
    ccnr_value, correlation_matrix, gellmann_basis, matrix_unit_basis, osc, realign, CorrelationMatrix, OperatorBasis,
    OscSpectrum,
};
pub use qstate::{BipartiteState, PureBipartite, SchmidtVector};
pub use specbounds::{BoundMethod, BoundPair, NonnegativeMatrix, RowSumStats};
pub use witness::{
    build_witness, coefficients, evaluate_witness, ArrangementMatrix, ArrangementPattern, CoefficientOptions,
    SchmidtWitness, WitnessCoefficients, WitnessMethod,
};
