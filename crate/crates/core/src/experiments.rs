//! Experiment workflows behind the CLI subcommands: the mode table with field
//! heatmaps, the qubit-convergence sweep, the layer/success-rate study, and
//! the cross-module validation suite. All artifacts are plain CSV/SVG/text
//! files, deterministic for a fixed seed and config.

use crate::decomp::{decompose, pauli_decompose, pauli_string_dense, reconstruct_dense};
use crate::eigoracle::eigensolve_symmetric;
use crate::fdm::{
    analytic_cutoff, assemble_2d, build_1d_operator, closed_form_1d_spectrum, eigenvalue_to_cutoff,
    BoundaryCondition, ModeFamily, WaveguideSpec,
};
use crate::qsim::{
    AnsatzCircuit, RegisterLayout, ShiftDirection, ShiftImplementation, ShiftRegister, StateVector,
};
use crate::vqd::{mode_label, solve, GradientMode, ModeClassification, VqdConfig, VqdResult};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Dense-oracle feasibility cap on n_x + n_y.
pub const QUBIT_CAP: usize = 12;

fn default_width() -> f64 {
    15e-3
}
fn default_height() -> f64 {
    10e-3
}
fn default_nx() -> usize {
    4
}
fn default_ny() -> usize {
    3
}
fn default_trials() -> usize {
    5
}
fn default_seed() -> u64 {
    1
}
fn default_modes() -> usize {
    2
}
fn default_gradient() -> GradientMode {
    GradientMode::Analytic
}

/// Experiment configuration; JSON keys mirror the CLI flags (flag wins).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_width")]
    pub width_a_m: f64,
    #[serde(default = "default_height")]
    pub height_b_m: f64,
    #[serde(default = "default_nx")]
    pub n_x: usize,
    #[serde(default = "default_ny")]
    pub n_y: usize,
    /// Ansatz depth; defaults to n_x + n_y.
    #[serde(default)]
    pub layers: Option<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Physical modes to extract per family.
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// Restrict to one family; both when absent.
    #[serde(default)]
    pub family: Option<ModeFamily>,
    #[serde(default = "default_gradient")]
    pub gradient: GradientMode,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x + self.n_y > QUBIT_CAP {
            return Err(Error::SizeCap(self.n_x + self.n_y, QUBIT_CAP));
        }
        self.spec(ModeFamily::Te)?.validate()
    }

    pub fn spec(&self, family: ModeFamily) -> Result<WaveguideSpec> {
        WaveguideSpec::new(self.width_a_m, self.height_b_m, self.n_x, self.n_y, family)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    fn families(&self) -> Vec<ModeFamily> {
        match self.family {
            Some(f) => vec![f],
            None => vec![ModeFamily::Te, ModeFamily::Tm],
        }
    }
}

/// One row of the mode comparison table.
#[derive(Debug, Clone)]
pub struct ModeTableRow {
    pub label: String,
    pub vqa_cutoff_ghz: f64,
    pub classical_cutoff_ghz: f64,
    pub analytic_cutoff_ghz: f64,
    pub rel_err_vqa_vs_classical: f64,
    pub rel_err_classical_vs_analytic: f64,
    /// Converged field amplitudes for the heatmap, sign-normalized.
    pub field: Vec<f64>,
    pub n_x: usize,
    pub n_y: usize,
}

/// Six significant digits, fixed notation.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

fn label_string(family: ModeFamily, labels: &[(usize, usize)]) -> String {
    labels
        .iter()
        .map(|(m, n)| format!("{family}{m}{n}"))
        .collect::<Vec<_>>()
        .join("/")
}

/// Physical eigenlevel indices for a family: TE skips the nonphysical
/// constant zero mode at the bottom of its spectrum.
fn physical_level_offset(family: ModeFamily) -> usize {
    match family {
        ModeFamily::Te => 1,
        ModeFamily::Tm => 0,
    }
}

/// Mode-table workflow: VQD vs classical vs analytic cut-offs, plus one SVG
/// field heatmap per mode. Returns the rows in the order written.
pub fn cmd_modes(cfg: &RunConfig) -> Result<Vec<ModeTableRow>> {
    cfg.validate()?;
    let out = cfg.out_dir();
    fs::create_dir_all(&out)?;
    let mut rows = Vec::new();

    for family in cfg.families() {
        let spec = cfg.spec(family)?;
        let matrix = assemble_2d::<f64>(&spec)?;
        let eig = eigensolve_symmetric(&matrix)?;
        let norm = matrix.max_abs();
        let deg_tol = 1e-6 * norm;
        let offset = physical_level_offset(family);

        let mut vqd_cfg = VqdConfig::<f64>::new(spec, cfg.modes + offset);
        vqd_cfg.layers = cfg.layers;
        vqd_cfg.trials = cfg.trials;
        vqd_cfg.seed = cfg.seed;
        vqd_cfg.gradient_mode = cfg.gradient;
        let results = solve(&vqd_cfg)?;

        for (i, res) in results.iter().enumerate().skip(offset) {
            let k = i;
            let classical_hz = eigenvalue_to_cutoff(eig.values()[k], norm)?;
            let labels = mode_label(&spec, eig.values()[k], deg_tol);
            let label = label_string(family, &labels);
            let (m, n) = labels[0];
            let analytic_hz = analytic_cutoff(&spec, m, n)?;
            let field = sign_normalized_field(res, &spec)?;
            rows.push(ModeTableRow {
                label,
                vqa_cutoff_ghz: res.cutoff_hz / 1e9,
                classical_cutoff_ghz: classical_hz / 1e9,
                analytic_cutoff_ghz: analytic_hz / 1e9,
                rel_err_vqa_vs_classical: if classical_hz > 0.0 {
                    (res.cutoff_hz - classical_hz).abs() / classical_hz
                } else {
                    res.cutoff_hz.abs()
                },
                rel_err_classical_vs_analytic: (classical_hz - analytic_hz).abs() / analytic_hz,
                field,
                n_x: spec.n_x,
                n_y: spec.n_y,
            });
        }
    }

    rows.sort_by(|a, b| a.analytic_cutoff_ghz.partial_cmp(&b.analytic_cutoff_ghz).unwrap());

    let mut csv = String::from(
        "mode,vqa_cutoff_ghz,classical_cutoff_ghz,analytic_cutoff_ghz,rel_err_vqa_vs_classical,rel_err_classical_vs_analytic\n",
    );
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.label,
            sig6(r.vqa_cutoff_ghz),
            sig6(r.classical_cutoff_ghz),
            sig6(r.analytic_cutoff_ghz),
            sci(r.rel_err_vqa_vs_classical),
            sci(r.rel_err_classical_vs_analytic),
        )
        .unwrap();
        let svg = field_heatmap_svg(&r.field, r.n_x, r.n_y);
        fs::write(out.join(format!("mode_{}.svg", r.label.replace('/', "_"))), svg)?;
    }
    fs::write(out.join("modes.csv"), csv)?;
    Ok(rows)
}

/// Converged statevector amplitudes with the global sign fixed so the
/// largest-magnitude cell is positive.
fn sign_normalized_field(res: &VqdResult<f64>, spec: &WaveguideSpec) -> Result<Vec<f64>> {
    let circuit = AnsatzCircuit::new(
        spec.total_qubits(),
        res.theta.len() / spec.total_qubits(),
        res.theta.clone(),
    )?;
    let mut field = circuit.prepare().real_amplitudes();
    let (mut peak, mut peak_abs) = (0.0, 0.0);
    for &v in &field {
        if v.abs() > peak_abs {
            peak_abs = v.abs();
            peak = v;
        }
    }
    if peak < 0.0 {
        for v in &mut field {
            *v = -*v;
        }
    }
    Ok(field)
}

/// SVG diverging-color heatmap of a real field on the 2^n_y x 2^n_x grid
/// (x least significant, y index 0 drawn at the bottom).
pub fn field_heatmap_svg(field: &[f64], n_x: usize, n_y: usize) -> String {
    let cols = 1usize << n_x;
    let rows = 1usize << n_y;
    assert_eq!(field.len(), cols * rows);
    let cell = 24usize;
    let peak = field.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n",
        cols * cell,
        rows * cell
    );
    for iy in 0..rows {
        for ix in 0..cols {
            let v = field[(iy << n_x) | ix] / peak;
            let (r, g, b) = diverging_color(v);
            // flip vertically so y grows upward
            let y = (rows - 1 - iy) * cell;
            writeln!(
                svg,
                "  <rect x=\"{}\" y=\"{}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({r},{g},{b})\"><title>{:.6e}</title></rect>",
                ix * cell,
                y,
                field[(iy << n_x) | ix],
            )
            .unwrap();
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Blue-white-red scale for t in [-1, 1].
fn diverging_color(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(-1.0, 1.0);
    let blend = |a: f64, b: f64, u: f64| (a + (b - a) * u).round() as u8;
    if t < 0.0 {
        let u = -t;
        (blend(255.0, 59.0, u), blend(255.0, 76.0, u), blend(255.0, 192.0, u))
    } else {
        (blend(255.0, 180.0, t), blend(255.0, 4.0, t), blend(255.0, 38.0, t))
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n_x: usize,
    pub n_y: usize,
    pub mode: String,
    pub rel_diff: f64,
}

/// Convergence study: relative difference of the discretized TE10 / TM11
/// cut-offs against the analytic values over a grid of qubit counts. The
/// classical path is authoritative (discretization error is
/// optimizer-independent); `with_vqd` appends VQD rows for the same cells.
pub fn cmd_sweep(
    cfg: &RunConfig,
    nx_range: (usize, usize),
    ny_range: (usize, usize),
    with_vqd: bool,
) -> Result<Vec<SweepRow>> {
    let out = cfg.out_dir();
    fs::create_dir_all(&out)?;
    let mut rows = Vec::new();
    for n_x in nx_range.0..=nx_range.1 {
        for n_y in ny_range.0..=ny_range.1 {
            if n_x + n_y > QUBIT_CAP {
                return Err(Error::SizeCap(n_x + n_y, QUBIT_CAP));
            }
            for (family, level, m, n, name) in [
                (ModeFamily::Te, 1usize, 1usize, 0usize, "TE10"),
                (ModeFamily::Tm, 0, 1, 1, "TM11"),
            ] {
                let spec = WaveguideSpec::new(cfg.width_a_m, cfg.height_b_m, n_x, n_y, family)?;
                let matrix = assemble_2d::<f64>(&spec)?;
                let eig = eigensolve_symmetric(&matrix)?;
                let classical = eigenvalue_to_cutoff(eig.values()[level], matrix.max_abs())?;
                let analytic = analytic_cutoff(&spec, m, n)?;
                rows.push(SweepRow {
                    n_x,
                    n_y,
                    mode: name.to_string(),
                    rel_diff: (classical - analytic).abs() / analytic,
                });
                if with_vqd {
                    let mut vqd_cfg = VqdConfig::<f64>::new(spec, level + 1);
                    vqd_cfg.trials = cfg.trials;
                    vqd_cfg.seed = cfg.seed;
                    vqd_cfg.layers = cfg.layers;
                    vqd_cfg.gradient_mode = cfg.gradient;
                    let res = solve(&vqd_cfg)?;
                    let vqa = res[level].cutoff_hz;
                    rows.push(SweepRow {
                        n_x,
                        n_y,
                        mode: format!("{name}-vqd"),
                        rel_diff: (vqa - analytic).abs() / analytic,
                    });
                }
            }
        }
    }
    let mut csv = String::from("nx,ny,mode,rel_diff\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{}", r.n_x, r.n_y, r.mode, sci(r.rel_diff)).unwrap();
    }
    fs::write(out.join("sweep.csv"), csv)?;
    Ok(rows)
}

/// The six (n_x, n_y) scenarios of the layer study. The source material does
/// not enumerate its six; this set is our reconstruction.
pub const LAYER_SCENARIOS: [(usize, usize); 6] = [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (2, 3)];

#[derive(Debug, Clone)]
pub struct LayerStudyRow {
    pub n_x: usize,
    pub n_y: usize,
    pub layers: usize,
    pub trials: usize,
    pub n_correct: usize,
    pub n_higher: usize,
    pub n_incorrect: usize,
    pub success_rate: f64,
    pub color: String,
}

/// Success-rate study for the TM11 target across ansatz depths.
pub fn cmd_layers(cfg: &RunConfig, layer_range: (usize, usize)) -> Result<Vec<LayerStudyRow>> {
    let out = cfg.out_dir();
    fs::create_dir_all(&out)?;
    let mut rows = Vec::new();
    for (n_x, n_y) in LAYER_SCENARIOS {
        for layers in layer_range.0..=layer_range.1 {
            let spec = WaveguideSpec::new(cfg.width_a_m, cfg.height_b_m, n_x, n_y, ModeFamily::Tm)?;
            let mut vqd_cfg = VqdConfig::<f64>::new(spec, 1);
            vqd_cfg.trials = cfg.trials;
            vqd_cfg.seed = cfg.seed;
            vqd_cfg.layers = Some(layers);
            vqd_cfg.gradient_mode = cfg.gradient;
            let res = solve(&vqd_cfg)?;
            let trials = &res[0].trials;
            let count = |c: ModeClassification| trials.iter().filter(|t| t.classification == c).count();
            let n_correct = count(ModeClassification::Correct);
            let n_higher = count(ModeClassification::ConvergedHigherMode);
            let n_incorrect = count(ModeClassification::IncorrectMinimum);
            let total = trials.len();
            let color = if n_correct == total {
                "green"
            } else if 2 * n_higher >= total {
                "amber"
            } else if 2 * n_incorrect >= total {
                "red"
            } else {
                "mixed"
            };
            rows.push(LayerStudyRow {
                n_x,
                n_y,
                layers,
                trials: total,
                n_correct,
                n_higher,
                n_incorrect,
                success_rate: n_correct as f64 / total as f64,
                color: color.to_string(),
            });
        }
    }
    let mut csv =
        String::from("nx,ny,layers,trials,n_correct,n_higher,n_incorrect,success_rate,color\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            r.n_x, r.n_y, r.layers, r.trials, r.n_correct, r.n_higher, r.n_incorrect,
            sci(r.success_rate), r.color
        )
        .unwrap();
    }
    fs::write(out.join("layers.csv"), csv)?;
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub module: String,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    fn record(&mut self, module: &str, name: &str, residual: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            module: module.to_string(),
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut text = String::new();
        for c in &self.checks {
            writeln!(
                text,
                "[{}] {} / {}: residual {} (tol {})",
                if c.pass { "PASS" } else { "FAIL" },
                c.module,
                c.name,
                sci(c.residual),
                sci(c.tolerance),
            )
            .unwrap();
        }
        writeln!(
            text,
            "{}: {} of {} checks passed",
            if self.all_pass() { "OK" } else { "FAILED" },
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        )
        .unwrap();
        text
    }
}

fn unit_spec(n_x: usize, n_y: usize, family: ModeFamily) -> WaveguideSpec {
    WaveguideSpec::new((1u32 << n_x) as f64, (1u32 << n_y) as f64, n_x, n_y, family)
        .expect("valid unit spec")
}

/// Cross-module oracle suite. `inject_fault` perturbs one decomposition
/// coefficient by 1e-6 so the equivalence check must fail (debug aid).
pub fn run_validation(inject_fault: bool) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();

    // 1D spectra against the closed form
    let mut worst = 0.0f64;
    for n_t in 1..=5 {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let m = build_1d_operator::<f64>(n_t, bc)?;
            let eig = eigensolve_symmetric(&m)?;
            let closed = closed_form_1d_spectrum::<f64>(n_t, bc);
            for (got, want) in eig.values().iter().zip(closed) {
                worst = worst.max((got - want).abs());
            }
        }
    }
    report.record("fdm", "1d-spectrum-closed-form", worst, 1e-10);

    // Kronecker-sum spectrum of the assembly
    let mut worst = 0.0f64;
    for family in [ModeFamily::Te, ModeFamily::Tm] {
        let spec = unit_spec(2, 2, family);
        let m = assemble_2d::<f64>(&spec)?;
        let eig = eigensolve_symmetric(&m)?;
        let bc = family.boundary();
        let mu = closed_form_1d_spectrum::<f64>(2, bc);
        let mut expected: Vec<f64> = mu
            .iter()
            .flat_map(|&a| mu.iter().map(move |&b| a + b))
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let scale = m.max_abs();
        for (got, want) in eig.values().iter().zip(expected) {
            worst = worst.max((got - want).abs() / scale);
        }
    }
    report.record("fdm", "kronecker-sum-spectrum", worst, 1e-9);

    // decomposition equivalence
    let mut worst = 0.0f64;
    for family in [ModeFamily::Te, ModeFamily::Tm] {
        for n_x in 1..=3 {
            for n_y in 1..=3 {
                let spec = unit_spec(n_x, n_y, family);
                let mut d = decompose::<f64>(&spec)?;
                if inject_fault {
                    d.groups[0].terms[0].observable.coefficient += 1e-6;
                }
                let recon = reconstruct_dense(&d)?;
                let direct = assemble_2d::<f64>(&spec)?;
                worst = worst.max(recon.sub(&direct).max_abs());
            }
        }
    }
    report.record("decomp", "decomposition-equivalence", worst, 1e-12);

    // Pauli reconstruction
    let mut worst = 0.0f64;
    for family in [ModeFamily::Te, ModeFamily::Tm] {
        for (n_x, n_y) in [(1, 1), (2, 1), (2, 2)] {
            let spec = unit_spec(n_x, n_y, family);
            let m = assemble_2d::<f64>(&spec)?;
            let terms = pauli_decompose(&m)?;
            let dim = m.rows();
            let mut recon = crate::DenseMatrix::zeros(dim, dim);
            for (label, c) in &terms {
                recon = recon.add(&pauli_string_dense::<f64>(label)?.scale(*c));
            }
            worst = worst.max(recon.sub(&m).max_abs());
        }
    }
    report.record("decomp", "pauli-reconstruction", worst, 1e-10);

    // analytic gradient vs central differences
    let engine = crate::vqd::VqdEngine::<f64>::new(&unit_spec(2, 2, ModeFamily::Tm), 3, None)?;
    use rand::distributions::{Distribution, Uniform};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
    let dist = Uniform::new_inclusive(-std::f64::consts::PI, std::f64::consts::PI);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let theta: Vec<f64> = (0..engine.param_count()).map(|_| dist.sample(&mut rng)).collect();
        let a = engine.gradient(&theta, &[])?;
        let fd = engine.finite_difference_gradient(&theta, &[], 1e-5)?;
        let scale = a.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for (x, y) in a.iter().zip(&fd) {
            worst = worst.max((x - y).abs() / scale);
        }
    }
    report.record("vqd", "analytic-vs-fd-gradient", worst, 1e-6);

    // simulator integrity: norm preservation and real amplitudes
    let mut worst_norm = 0.0f64;
    let mut worst_imag = 0.0f64;
    for trial in 0..5u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(100 + trial);
        let theta: Vec<f64> = (0..16).map(|_| dist.sample(&mut rng)).collect();
        let circuit = AnsatzCircuit::new(4, 4, theta)?;
        let mut s = circuit.prepare();
        let layout = RegisterLayout { n_x: 2, n_y: 2 };
        s.apply_cyclic_shift(
            layout,
            ShiftRegister::X,
            ShiftDirection::Forward,
            ShiftImplementation::GateProduct,
        )?;
        worst_norm = worst_norm.max((s.norm_sqr() - 1.0).abs());
        worst_imag = worst_imag.max(s.max_imag());
    }
    report.record("qsim", "norm-preservation", worst_norm, 1e-12);
    report.record("qsim", "real-amplitude-invariant", worst_imag, 1e-14);

    // shift realizations agree on every basis state, k <= 4
    let mut worst = 0.0f64;
    for k in 1..=4usize {
        let layout = RegisterLayout { n_x: k, n_y: 0 };
        for basis in 0..1usize << k {
            let mut direct = StateVector::<f64>::zero_state(k);
            let mut gates = StateVector::<f64>::zero_state(k);
            for q in 0..k {
                if basis >> q & 1 == 1 {
                    direct.apply_x(q)?;
                    gates.apply_x(q)?;
                }
            }
            direct.apply_cyclic_shift(
                layout,
                ShiftRegister::X,
                ShiftDirection::Forward,
                ShiftImplementation::DirectPermutation,
            )?;
            gates.apply_cyclic_shift(
                layout,
                ShiftRegister::X,
                ShiftDirection::Forward,
                ShiftImplementation::GateProduct,
            )?;
            for (a, b) in direct.amplitudes().iter().zip(gates.amplitudes()) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    report.record("qsim", "shift-permutation-equivalence", worst, 0.0);

    // decomposition-path cost equals dense quadratic form
    let mut worst = 0.0f64;
    for family in [ModeFamily::Te, ModeFamily::Tm] {
        let spec = unit_spec(2, 2, family);
        let engine = crate::vqd::VqdEngine::<f64>::new(&spec, 2, None)?;
        let m = assemble_2d::<f64>(&spec)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..5 {
            let theta: Vec<f64> = (0..8).map(|_| dist.sample(&mut rng)).collect();
            let psi = engine.circuit(&theta)?.prepare();
            let v = psi.real_amplitudes();
            let mv = m.matvec(&v);
            let dense: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
            worst = worst.max((engine.cost(&theta, &[])? - dense).abs() / m.max_abs());
        }
    }
    report.record("vqd", "cost-vs-dense-quadratic-form", worst, 1e-10);

    Ok(report)
}

/// Run the validation suite and write `validate.txt`; returns the report.
pub fn cmd_validate(cfg: &RunConfig, inject_fault: bool) -> Result<ValidationReport> {
    let out = cfg.out_dir();
    fs::create_dir_all(&out)?;
    let report = run_validation(inject_fault)?;
    fs::write(out.join("validate.txt"), report.render())?;
    Ok(report)
}
