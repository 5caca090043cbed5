//! Shifted-grid finite-difference operators for the waveguide cross section.
//!
//! The 1D second-derivative operators on a grid shifted half a cell off the
//! metallic walls are symmetric tridiagonal with interior stencil (-1, 2, -1)
//! and corner diagonal 3 (Dirichlet) or 1 (Neumann). The 2D TE/TM operators
//! are Kronecker sums of the 1D operators, with per-axis factors 1/dx^2 and
//! 1/dy^2 restoring the physical grid steps.

use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Speed of light in vacuum, m/s (CODATA exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ModeFamily {
    Te,
    Tm,
}

impl ModeFamily {
    pub fn boundary(self) -> BoundaryCondition {
        match self {
            // E_z vanishes on the wall; H_z has vanishing normal derivative.
            ModeFamily::Tm => BoundaryCondition::Dirichlet,
            ModeFamily::Te => BoundaryCondition::Neumann,
        }
    }
}

impl std::fmt::Display for ModeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeFamily::Te => write!(f, "TE"),
            ModeFamily::Tm => write!(f, "TM"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Problem definition: geometry, grid resolution (as qubit counts) and mode
/// family.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WaveguideSpec {
    /// x-extent in meters.
    pub width_a: f64,
    /// y-extent in meters.
    pub height_b: f64,
    /// Qubits along x; the grid has 2^n_x points.
    pub n_x: usize,
    /// Qubits along y.
    pub n_y: usize,
    pub family: ModeFamily,
}

impl WaveguideSpec {
    pub fn new(width_a: f64, height_b: f64, n_x: usize, n_y: usize, family: ModeFamily) -> Result<Self> {
        let spec = Self {
            width_a,
            height_b,
            n_x,
            n_y,
            family,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width_a > 0.0 && self.width_a.is_finite()) {
            return Err(Error::InvalidSpec(format!("width_a = {}", self.width_a)));
        }
        if !(self.height_b > 0.0 && self.height_b.is_finite()) {
            return Err(Error::InvalidSpec(format!("height_b = {}", self.height_b)));
        }
        if self.n_x == 0 || self.n_y == 0 {
            return Err(Error::InvalidSpec(format!(
                "qubit counts must be >= 1, got n_x={} n_y={}",
                self.n_x, self.n_y
            )));
        }
        Ok(())
    }

    pub fn total_qubits(&self) -> usize {
        self.n_x + self.n_y
    }

    pub fn dx(&self) -> f64 {
        self.width_a / (1u64 << self.n_x) as f64
    }

    pub fn dy(&self) -> f64 {
        self.height_b / (1u64 << self.n_y) as f64
    }

    /// 1/dx^2, the x-axis scale factor of the assembled operator.
    pub fn scale_x(&self) -> f64 {
        1.0 / (self.dx() * self.dx())
    }

    /// 1/dy^2.
    pub fn scale_y(&self) -> f64 {
        1.0 / (self.dy() * self.dy())
    }
}

/// Unit-step 1D operator on 2^n_t shifted-grid points.
pub fn build_1d_operator<S: Scalar>(n_t: usize, bc: BoundaryCondition) -> Result<DenseMatrix<S>> {
    if n_t == 0 {
        return Err(Error::InvalidSpec(
            "1D operator needs n_t >= 1 (2x2 minimum)".into(),
        ));
    }
    let n = 1usize << n_t;
    let mut m = DenseMatrix::zeros(n, n);
    let two = S::lit(2.0);
    let neg_one = -S::one();
    for i in 0..n {
        m[(i, i)] = two;
        if i > 0 {
            m[(i, i - 1)] = neg_one;
        }
        if i + 1 < n {
            m[(i, i + 1)] = neg_one;
        }
    }
    let corner = match bc {
        BoundaryCondition::Dirichlet => S::lit(3.0),
        BoundaryCondition::Neumann => S::one(),
    };
    m[(0, 0)] = corner;
    m[(n - 1, n - 1)] = corner;
    Ok(m)
}

/// Closed-form spectrum of the unit-step 1D operator: 4 sin^2(m pi / 2N) with
/// m in 1..=N for Dirichlet and 0..N for Neumann. Returned ascending.
pub fn closed_form_1d_spectrum<S: Scalar>(n_t: usize, bc: BoundaryCondition) -> Vec<S> {
    let n = 1usize << n_t;
    let four = S::lit(4.0);
    let half_pi_over_n = S::PI() / S::lit(2.0 * n as f64);
    let range: Vec<usize> = match bc {
        BoundaryCondition::Dirichlet => (1..=n).collect(),
        BoundaryCondition::Neumann => (0..n).collect(),
    };
    range
        .into_iter()
        .map(|m| {
            let s = (S::lit(m as f64) * half_pi_over_n).sin();
            four * s * s
        })
        .collect()
}

/// Physical 2D operator: s_x (I ⊗ M_x) + s_y (M_y ⊗ I), x qubits least
/// significant. Units 1/m^2.
pub fn assemble_2d<S: Scalar>(spec: &WaveguideSpec) -> Result<DenseMatrix<S>> {
    spec.validate()?;
    let bc = spec.family.boundary();
    let mx = build_1d_operator::<S>(spec.n_x, bc)?;
    let my = build_1d_operator::<S>(spec.n_y, bc)?;
    let ix = DenseMatrix::identity(1 << spec.n_x);
    let iy = DenseMatrix::identity(1 << spec.n_y);
    let sx = S::lit(spec.scale_x());
    let sy = S::lit(spec.scale_y());
    Ok(iy.kron(&mx).scale(sx).add(&my.kron(&ix).scale(sy)))
}

/// Cut-off frequency in Hz from a transverse eigenvalue in 1/m^2.
///
/// `norm_scale` sets the clip tolerance for round-off negatives: eigenvalues
/// below -1e-9 * norm_scale are rejected, small negatives are clipped to 0.
pub fn eigenvalue_to_cutoff<S: Scalar>(lambda: S, norm_scale: S) -> Result<S> {
    let tol = S::lit(1e-9) * norm_scale;
    if lambda < -tol {
        return Err(Error::NegativeEigenvalue {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let lam = lambda.max(S::zero());
    Ok(S::lit(SPEED_OF_LIGHT) * lam.sqrt() / (S::lit(2.0) * S::PI()))
}

/// Exact cut-off of mode (m, n): f = (c/2) sqrt((m/a)^2 + (n/b)^2).
pub fn analytic_cutoff(spec: &WaveguideSpec, m: usize, n: usize) -> Result<f64> {
    spec.validate()?;
    let valid = match spec.family {
        ModeFamily::Te => (m, n) != (0, 0),
        ModeFamily::Tm => m >= 1 && n >= 1,
    };
    if !valid {
        return Err(Error::InvalidModeIndices {
            m,
            n,
            family: spec.family.to_string(),
        });
    }
    let fx = m as f64 / spec.width_a;
    let fy = n as f64 / spec.height_b;
    Ok(SPEED_OF_LIGHT / 2.0 * (fx * fx + fy * fy).sqrt())
}
