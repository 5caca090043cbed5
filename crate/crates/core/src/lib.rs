//! TE/TM cut-off modes of a rectangular hollow metallic waveguide, computed two
//! ways: a classical dense eigensolve of the shifted-grid finite-difference
//! operator, and variational quantum deflation (VQD) run on an exact
//! statevector simulator.
//!
//! The core math is generic over the scalar type (see [`scalar::Scalar`]);
//! concrete `f64` aliases are exported at the crate root and are what the CLI
//! and the experiment drivers use.

pub mod decomp;
pub mod eigoracle;
pub mod experiments;
pub mod fdm;
pub mod optim;
pub mod qsim;
pub mod scalar;
pub mod vqd;

mod matrix;

pub use matrix::DenseMatrix;
pub use scalar::Scalar;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid waveguide spec: {0}")]
    InvalidSpec(String),
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not symmetric: max |A - A^T| = {0}")]
    NotSymmetric(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigenvalue {lambda} below -{tol}: operator should be positive semidefinite")]
    NegativeEigenvalue { lambda: f64, tol: f64 },
    #[error("invalid mode indices ({m},{n}) for {family}")]
    InvalidModeIndices { m: usize, n: usize, family: String },
    #[error("qubit index {0} out of range for {1}-qubit state")]
    QubitOutOfRange(usize, usize),
    #[error("parameter index {0} out of range ({1} parameters)")]
    ParamOutOfRange(usize, usize),
    #[error("Jacobi eigensolver did not converge: residual {residual} after {sweeps} sweeps")]
    NoConvergence { residual: f64, sweeps: usize },
    #[error("problem size {0} qubits exceeds dense cap of {1}")]
    SizeCap(usize, usize),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("gradient self-check failed: relative error {0}")]
    GradientCheck(f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `f64` aliases used by the CLI and experiment drivers.
pub type DenseMatrix64 = DenseMatrix<f64>;
pub type StateVector64 = qsim::StateVector<f64>;
pub type AnsatzCircuit64 = qsim::AnsatzCircuit<f64>;
pub type EigenDecomposition64 = eigoracle::EigenDecomposition<f64>;
pub type DecomposedHamiltonian64 = decomp::DecomposedHamiltonian<f64>;
pub type VqdResult64 = vqd::VqdResult<f64>;
