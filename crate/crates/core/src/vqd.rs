//! Variational quantum deflation driver: the penalized cost function, its
//! analytic gradient evaluated through the term decomposition, and the
//! sequential deflation loop with multi-trial orchestration.

use crate::decomp::{decompose, Conjugation, DecomposedHamiltonian};
use crate::eigoracle::{eigenspace_fidelity, eigensolve_symmetric, EigenDecomposition};
use crate::fdm::{
    assemble_2d, closed_form_1d_spectrum, eigenvalue_to_cutoff, ModeFamily, WaveguideSpec,
};
use crate::optim::{minimize, OptimizationTrace, OptimizerConfig};
use crate::qsim::{
    AnsatzCircuit, RegisterLayout, ShiftDirection, ShiftImplementation, ShiftRegister, StateVector,
};
use crate::scalar::Scalar;
use crate::{Error, Result};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GradientMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone)]
pub struct VqdConfig<S> {
    pub spec: WaveguideSpec,
    /// Ansatz depth; `None` means n_x + n_y layers.
    pub layers: Option<usize>,
    /// Number of eigenlevels to extract, from the bottom of the spectrum.
    pub modes: usize,
    /// Overlap penalty coefficient; `None` selects 1.25 * 4 (s_x + s_y),
    /// a strict upper bound on the spectral spread.
    pub beta: Option<S>,
    pub trials: usize,
    pub seed: u64,
    pub gradient_mode: GradientMode,
    pub optimizer: Option<OptimizerConfig<S>>,
}

impl<S: Scalar> VqdConfig<S> {
    pub fn new(spec: WaveguideSpec, modes: usize) -> Self {
        Self {
            spec,
            layers: None,
            modes,
            beta: None,
            trials: 5,
            seed: 1,
            gradient_mode: GradientMode::Analytic,
            optimizer: None,
        }
    }

    pub fn effective_layers(&self) -> usize {
        self.layers.unwrap_or(self.spec.total_qubits())
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials >= 1".into()));
        }
        if self.modes == 0 || self.modes > 1usize << self.spec.total_qubits() {
            return Err(Error::InvalidConfig(format!(
                "modes must be in 1..=2^n, got {}",
                self.modes
            )));
        }
        if self.effective_layers() == 0 {
            return Err(Error::InvalidConfig("layers >= 1".into()));
        }
        if let Some(beta) = self.beta {
            if beta <= S::zero() || !beta.is_finite() {
                return Err(Error::InvalidConfig("beta must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Default penalty coefficient: strictly above the largest possible
/// eigenvalue gap (each 1D factor's spectrum lies in [0, 4 s]).
pub fn default_beta<S: Scalar>(spec: &WaveguideSpec) -> S {
    S::lit(1.25) * S::lit(4.0) * (S::lit(spec.scale_x()) + S::lit(spec.scale_y()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ModeClassification {
    Correct,
    ConvergedHigherMode,
    IncorrectMinimum,
}

impl std::fmt::Display for ModeClassification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeClassification::Correct => write!(f, "correct"),
            ModeClassification::ConvergedHigherMode => write!(f, "higher-mode"),
            ModeClassification::IncorrectMinimum => write!(f, "incorrect-minimum"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialSummary<S> {
    pub trial: usize,
    pub final_cost: S,
    pub energy: S,
    pub fidelity: S,
    pub classification: ModeClassification,
}

#[derive(Debug, Clone)]
pub struct VqdResult<S> {
    pub mode_index: usize,
    pub theta: Vec<S>,
    /// <psi| M |psi> at the accepted parameters, units 1/m^2.
    pub energy: S,
    pub cutoff_hz: S,
    /// Fidelity against the eigenspace of the k-th classical eigenvalue.
    pub fidelity: S,
    pub classification: ModeClassification,
    pub trace: OptimizationTrace<S>,
    pub trials: Vec<TrialSummary<S>>,
}

/// Cost and gradient evaluator for one deflation level.
pub struct VqdEngine<S> {
    decomp: DecomposedHamiltonian<S>,
    layout: RegisterLayout,
    layers: usize,
    beta: S,
}

impl<S: Scalar> VqdEngine<S> {
    pub fn new(spec: &WaveguideSpec, layers: usize, beta: Option<S>) -> Result<Self> {
        Ok(Self {
            decomp: decompose(spec)?,
            layout: RegisterLayout { n_x: spec.n_x, n_y: spec.n_y },
            layers,
            beta: beta.unwrap_or_else(|| default_beta(spec)),
        })
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn decomposition(&self) -> &DecomposedHamiltonian<S> {
        &self.decomp
    }

    pub fn param_count(&self) -> usize {
        self.layers * self.decomp.total_qubits()
    }

    pub fn circuit(&self, theta: &[S]) -> Result<AnsatzCircuit<S>> {
        AnsatzCircuit::new(self.decomp.total_qubits(), self.layers, theta.to_vec())
    }

    fn conjugated(&self, psi: &StateVector<S>, conj: Conjugation) -> StateVector<S> {
        let mut phi = psi.clone();
        let reg = match conj {
            Conjugation::None => return phi,
            Conjugation::V => ShiftRegister::X,
            Conjugation::W => ShiftRegister::Y,
        };
        phi.apply_cyclic_shift(
            self.layout,
            reg,
            ShiftDirection::Forward,
            ShiftImplementation::DirectPermutation,
        )
        .expect("layout consistent with state");
        phi
    }

    /// <psi| M |psi> via the constant-plus-conjugated-terms decomposition.
    pub fn hamiltonian_expectation(&self, psi: &StateVector<S>) -> Result<S> {
        let mut total = self.decomp.constant;
        for group in &self.decomp.groups {
            let phi = self.conjugated(psi, group.conjugation);
            for term in &group.terms {
                total += self.decomp.axis_scale(term.axis) * phi.expectation(&term.observable)?;
            }
        }
        Ok(total)
    }

    /// Re <u| M |v> term-wise; used by the analytic gradient.
    fn hamiltonian_matrix_element(&self, u: &StateVector<S>, v: &StateVector<S>) -> Result<S> {
        let mut total = self.decomp.constant * u.overlap(v)?.re;
        for group in &self.decomp.groups {
            let cu = self.conjugated(u, group.conjugation);
            let cv = self.conjugated(v, group.conjugation);
            for term in &group.terms {
                total += self.decomp.axis_scale(term.axis) * cu.matrix_element(&cv, &term.observable)?;
            }
        }
        Ok(total)
    }

    /// Penalized cost F_k at `theta` given the k previously accepted states.
    pub fn cost(&self, theta: &[S], deflation: &[StateVector<S>]) -> Result<S> {
        let psi = self.circuit(theta)?.prepare();
        let mut f = self.hamiltonian_expectation(&psi)?;
        for prior in deflation {
            f += self.beta * psi.overlap(prior)?.norm_sqr();
        }
        Ok(f)
    }

    /// Analytic gradient: dF/dtheta_j = <d_j psi| A |psi> with
    /// A = M + beta sum |psi_i><psi_i|, where |d_j psi> is the pi-shifted
    /// circuit state and the product-rule factor 2 cancels its built-in 1/2.
    pub fn gradient(&self, theta: &[S], deflation: &[StateVector<S>]) -> Result<Vec<S>> {
        let circuit = self.circuit(theta)?;
        let psi = circuit.prepare();
        let prior_overlaps: Vec<num_complex::Complex<S>> = deflation
            .iter()
            .map(|p| p.overlap(&psi))
            .collect::<Result<_>>()?;
        let mut grad = Vec::with_capacity(circuit.param_count());
        for j in 0..circuit.param_count() {
            let d = circuit.derivative_state(j)?;
            let mut g = self.hamiltonian_matrix_element(&d, &psi)?;
            for (prior, pv) in deflation.iter().zip(&prior_overlaps) {
                g += self.beta * (d.overlap(prior)? * pv).re;
            }
            grad.push(g);
        }
        Ok(grad)
    }

    /// Central-difference gradient of the penalized cost.
    pub fn finite_difference_gradient(
        &self,
        theta: &[S],
        deflation: &[StateVector<S>],
        eps: S,
    ) -> Result<Vec<S>> {
        let mut grad = Vec::with_capacity(theta.len());
        let mut work = theta.to_vec();
        for j in 0..theta.len() {
            work[j] = theta[j] + eps;
            let up = self.cost(&work, deflation)?;
            work[j] = theta[j] - eps;
            let dn = self.cost(&work, deflation)?;
            work[j] = theta[j];
            grad.push((up - dn) / (S::lit(2.0) * eps));
        }
        Ok(grad)
    }
}

/// Physical (m, n) mode labels nearest to an eigenvalue, from the closed-form
/// Kronecker-sum spectrum. Degenerate buckets return the full label set.
pub fn mode_label(spec: &WaveguideSpec, eigenvalue: f64, tol: f64) -> Vec<(usize, usize)> {
    let bc = spec.family.boundary();
    let mu_x = closed_form_1d_spectrum::<f64>(spec.n_x, bc);
    let mu_y = closed_form_1d_spectrum::<f64>(spec.n_y, bc);
    // Dirichlet index i corresponds to mode m = i + 1, Neumann to m = i.
    let base = match spec.family {
        ModeFamily::Tm => 1,
        ModeFamily::Te => 0,
    };
    let s_x = spec.scale_x();
    let s_y = spec.scale_y();
    let mut entries: Vec<((usize, usize), f64)> = Vec::new();
    for (i, &mx) in mu_x.iter().enumerate() {
        for (j, &my) in mu_y.iter().enumerate() {
            entries.push(((i + base, j + base), s_x * mx + s_y * my));
        }
    }
    let best = entries
        .iter()
        .map(|(_, lam)| (lam - eigenvalue).abs())
        .fold(f64::INFINITY, f64::min);
    let mut labels: Vec<(usize, usize)> = entries
        .into_iter()
        .filter(|(_, lam)| (lam - eigenvalue).abs() <= best + tol)
        .map(|(l, _)| l)
        .collect();
    labels.sort();
    labels
}

fn classify<S: Scalar>(
    state: &StateVector<S>,
    eig: &EigenDecomposition<S>,
    k: usize,
    deg_tol: S,
) -> Result<(S, ModeClassification)> {
    let threshold = S::lit(0.95);
    let lambda_k = eig.values()[k];
    let fid = eigenspace_fidelity(state, eig, lambda_k, deg_tol)?;
    if fid >= threshold {
        return Ok((fid, ModeClassification::Correct));
    }
    // distinct higher eigenvalues
    let mut lam = lambda_k;
    for &v in eig.values().iter() {
        if v > lam + deg_tol {
            lam = v;
            let f = eigenspace_fidelity(state, eig, v, deg_tol)?;
            if f >= threshold {
                return Ok((fid, ModeClassification::ConvergedHigherMode));
            }
        }
    }
    Ok((fid, ModeClassification::IncorrectMinimum))
}

struct TrialRun<S> {
    theta: Vec<S>,
    cost: S,
    trace: OptimizationTrace<S>,
}

/// Run the full deflation loop: for k = 0..modes-1, `trials` independent
/// seeded minimizations, keeping the lowest-cost trial per level.
pub fn solve<S: Scalar>(cfg: &VqdConfig<S>) -> Result<Vec<VqdResult<S>>> {
    cfg.validate()?;
    let layers = cfg.effective_layers();
    let engine = VqdEngine::new(&cfg.spec, layers, cfg.beta)?;
    let matrix = assemble_2d::<S>(&cfg.spec)?;
    let eig = eigensolve_symmetric(&matrix)?;
    let norm = matrix.max_abs();
    let deg_tol = S::lit(1e-6) * norm;

    if cfg.gradient_mode == GradientMode::Analytic {
        startup_gradient_check(&engine, cfg.seed)?;
    }

    let opt_cfg = cfg.optimizer.unwrap_or_else(|| OptimizerConfig {
        // gradient scale follows the operator scale
        grad_tol: S::lit(1e-8) * norm.max(S::one()),
        ..OptimizerConfig::default()
    });
    let param_count = engine.param_count();

    let mut deflation: Vec<StateVector<S>> = Vec::new();
    let mut results = Vec::new();

    for k in 0..cfg.modes {
        let runs: Vec<Result<TrialRun<S>>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(((k as u64) << 32) | trial as u64);
                let dist = Uniform::new_inclusive(-std::f64::consts::PI, std::f64::consts::PI);
                let theta0: Vec<S> = (0..param_count)
                    .map(|_| S::lit(dist.sample(&mut rng)))
                    .collect();
                let f = |x: &[S]| engine.cost(x, &deflation).unwrap_or(S::infinity());
                let eps = S::lit(1e-5);
                let g = |x: &[S]| match cfg.gradient_mode {
                    GradientMode::Analytic => engine.gradient(x, &deflation),
                    GradientMode::FiniteDifference => {
                        engine.finite_difference_gradient(x, &deflation, eps)
                    }
                }
                .unwrap_or_else(|_| vec![S::nan(); x.len()]);
                let m = minimize(f, g, &theta0, &opt_cfg)?;
                Ok(TrialRun { theta: m.x, cost: m.cost, trace: m.trace })
            })
            .collect();

        let mut best: Option<(usize, TrialRun<S>)> = None;
        let mut summaries = Vec::with_capacity(cfg.trials);
        let mut first_err = None;
        for (trial, run) in runs.into_iter().enumerate() {
            match run {
                Ok(r) => {
                    let state = engine.circuit(&r.theta)?.prepare();
                    let energy = engine.hamiltonian_expectation(&state)?;
                    let (fid, class) = classify(&state, &eig, k, deg_tol)?;
                    summaries.push(TrialSummary {
                        trial,
                        final_cost: r.cost,
                        energy,
                        fidelity: fid,
                        classification: class,
                    });
                    let better = match &best {
                        None => true,
                        Some((_, b)) => r.cost < b.cost,
                    };
                    if better {
                        best = Some((trial, r));
                    }
                }
                Err(e) => {
                    if first_err.is_none() {
                        first_err = Some(e);
                    }
                }
            }
        }
        let (_, best_run) = match best {
            Some(b) => b,
            None => return Err(first_err.expect("at least one trial attempted")),
        };

        let state = engine.circuit(&best_run.theta)?.prepare();
        let energy = engine.hamiltonian_expectation(&state)?;
        let (fidelity, classification) = classify(&state, &eig, k, deg_tol)?;
        let cutoff_hz = eigenvalue_to_cutoff(energy, norm)?;
        results.push(VqdResult {
            mode_index: k,
            theta: best_run.theta,
            energy,
            cutoff_hz,
            fidelity,
            classification,
            trace: best_run.trace,
            trials: summaries,
        });
        deflation.push(state);
    }
    Ok(results)
}

/// One-time self-check of the analytic gradient against central differences
/// at a random point; aborts the run when they disagree.
fn startup_gradient_check<S: Scalar>(engine: &VqdEngine<S>, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e1f_c0de);
    let dist = Uniform::new_inclusive(-std::f64::consts::PI, std::f64::consts::PI);
    let theta: Vec<S> = (0..engine.param_count())
        .map(|_| S::lit(dist.sample(&mut rng)))
        .collect();
    let analytic = engine.gradient(&theta, &[])?;
    let fd = engine.finite_difference_gradient(&theta, &[], S::lit(1e-5))?;
    let scale = analytic
        .iter()
        .fold(S::zero(), |m, &x| m.max(x.abs()))
        .max(S::one());
    for (a, f) in analytic.iter().zip(&fd) {
        let rel = (*a - *f).abs() / scale;
        if rel > S::lit(1e-4) {
            return Err(Error::GradientCheck(rel.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(())
}
