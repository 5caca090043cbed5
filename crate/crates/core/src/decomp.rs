//! Constant-plus-conjugated-terms representation of the 2D operator.
//!
//! The assembled operator is rewritten as
//!
//! ```text
//! M = (2 s_x + 2 s_y) I  +  s H_1 + s H_2
//!     + V^T (s H_3 + s H_4 + s H_5) V
//!     + W^T (s H_6 + s H_7 + s H_8) W
//! ```
//!
//! with V, W cyclic shifts of the x and y registers and each H an observable
//! whose expectation is computable in O(2^n) from a statevector. The term
//! count is eight regardless of qubit count, in contrast to the Pauli-basis
//! expansion whose term count grows with n (kept here as a test oracle).

use crate::fdm::{ModeFamily, WaveguideSpec};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use crate::{Error, Result};

const DENSE_QUBIT_CAP: usize = 12;
const PAULI_QUBIT_CAP: usize = 6;

/// Contiguous run of qubits, possibly empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitBlock {
    pub start: usize,
    pub len: usize,
}

impl QubitBlock {
    pub fn mask(&self) -> usize {
        if self.len == 0 {
            0
        } else {
            ((1usize << self.len) - 1) << self.start
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    /// Pauli X on a single qubit.
    XOnQubit { qubit: usize },
    /// |0...0><0...0| on a qubit block, times X on a disjoint qubit.
    ZeroProjectorBlockTimesX { block: QubitBlock, x_qubit: usize },
    /// |0...0><0...0| on a qubit block.
    ZeroProjectorBlock { block: QubitBlock },
    Identity,
}

/// One of the simple Hamiltonians of the decomposition, with its sign/weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleObservable<S> {
    pub kind: ObservableKind,
    pub coefficient: S,
}

impl<S: Scalar> SimpleObservable<S> {
    pub fn new(kind: ObservableKind, coefficient: S) -> Self {
        Self { kind, coefficient }
    }
}

/// Unitary wrapped around a term group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjugation {
    /// No conjugation.
    None,
    /// Cyclic shift of the x register.
    V,
    /// Cyclic shift of the y register.
    W,
}

/// Which axis scale factor (s_x or s_y) multiplies a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTerm<S> {
    pub observable: SimpleObservable<S>,
    pub axis: Axis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermGroup<S> {
    pub conjugation: Conjugation,
    pub terms: Vec<ScaledTerm<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedHamiltonian<S> {
    pub spec: WaveguideSpec,
    /// The (2 s_x + 2 s_y) I term.
    pub constant: S,
    pub scale_x: S,
    pub scale_y: S,
    /// Exactly three groups: un-conjugated, V-conjugated, W-conjugated.
    pub groups: Vec<TermGroup<S>>,
}

impl<S: Scalar> DecomposedHamiltonian<S> {
    pub fn total_qubits(&self) -> usize {
        self.spec.total_qubits()
    }

    pub fn axis_scale(&self, axis: Axis) -> S {
        match axis {
            Axis::X => self.scale_x,
            Axis::Y => self.scale_y,
        }
    }

    pub fn term_count(&self) -> usize {
        self.groups.iter().map(|g| g.terms.len()).sum()
    }
}

/// Sign constant b_j of the pure projector terms: +1 for TM, -1 for TE.
pub fn family_sign<S: Scalar>(family: ModeFamily) -> S {
    match family {
        ModeFamily::Tm => S::one(),
        ModeFamily::Te => -S::one(),
    }
}

/// Build the eight-term decomposition for a waveguide spec.
pub fn decompose<S: Scalar>(spec: &WaveguideSpec) -> Result<DecomposedHamiltonian<S>> {
    spec.validate()?;
    let (n_x, n_y) = (spec.n_x, spec.n_y);
    let s_x = S::lit(spec.scale_x());
    let s_y = S::lit(spec.scale_y());
    let b = family_sign::<S>(spec.family);
    let neg = -S::one();

    // lowest qubit of each register
    let x0 = 0;
    let y0 = n_x;
    // high qubits of each register (empty when the register is one qubit)
    let x_high = QubitBlock { start: 1, len: n_x - 1 };
    let y_high = QubitBlock { start: n_x + 1, len: n_y - 1 };

    let x_term = |kind, coeff| ScaledTerm {
        observable: SimpleObservable::new(kind, coeff),
        axis: Axis::X,
    };
    let y_term = |kind, coeff| ScaledTerm {
        observable: SimpleObservable::new(kind, coeff),
        axis: Axis::Y,
    };

    let groups = vec![
        TermGroup {
            conjugation: Conjugation::None,
            terms: vec![
                x_term(ObservableKind::XOnQubit { qubit: x0 }, neg),
                y_term(ObservableKind::XOnQubit { qubit: y0 }, neg),
            ],
        },
        TermGroup {
            conjugation: Conjugation::V,
            terms: vec![
                x_term(ObservableKind::XOnQubit { qubit: x0 }, neg),
                x_term(
                    ObservableKind::ZeroProjectorBlockTimesX { block: x_high, x_qubit: x0 },
                    S::one(),
                ),
                x_term(ObservableKind::ZeroProjectorBlock { block: x_high }, b),
            ],
        },
        TermGroup {
            conjugation: Conjugation::W,
            terms: vec![
                y_term(ObservableKind::XOnQubit { qubit: y0 }, neg),
                y_term(
                    ObservableKind::ZeroProjectorBlockTimesX { block: y_high, x_qubit: y0 },
                    S::one(),
                ),
                y_term(ObservableKind::ZeroProjectorBlock { block: y_high }, b),
            ],
        },
    ];

    Ok(DecomposedHamiltonian {
        spec: *spec,
        constant: S::lit(2.0) * (s_x + s_y),
        scale_x: s_x,
        scale_y: s_y,
        groups,
    })
}

/// Dense matrix of a single observable (coefficient included).
pub fn dense_observable<S: Scalar>(obs: &SimpleObservable<S>, n: usize) -> Result<DenseMatrix<S>> {
    if n > DENSE_QUBIT_CAP {
        return Err(Error::SizeCap(n, DENSE_QUBIT_CAP));
    }
    let dim = 1usize << n;
    let mut m = DenseMatrix::zeros(dim, dim);
    let c = obs.coefficient;
    match obs.kind {
        ObservableKind::Identity => {
            for i in 0..dim {
                m[(i, i)] = c;
            }
        }
        ObservableKind::XOnQubit { qubit } => {
            check_qubit(qubit, n)?;
            let bit = 1usize << qubit;
            for i in 0..dim {
                m[(i ^ bit, i)] = c;
            }
        }
        ObservableKind::ZeroProjectorBlock { block } => {
            let mask = block.mask();
            for i in 0..dim {
                if i & mask == 0 {
                    m[(i, i)] = c;
                }
            }
        }
        ObservableKind::ZeroProjectorBlockTimesX { block, x_qubit } => {
            check_qubit(x_qubit, n)?;
            let mask = block.mask();
            let bit = 1usize << x_qubit;
            for i in 0..dim {
                if i & mask == 0 {
                    m[(i ^ bit, i)] = c;
                }
            }
        }
    }
    Ok(m)
}

fn check_qubit(q: usize, n: usize) -> Result<()> {
    if q >= n {
        Err(Error::QubitOutOfRange(q, n))
    } else {
        Ok(())
    }
}

/// Permutation matrix of the cyclic shift on one register (x: low `n_x`
/// qubits, y: high `n_y` qubits), index i -> i+1 mod register size.
fn shift_matrix<S: Scalar>(d: &DecomposedHamiltonian<S>, conj: Conjugation) -> DenseMatrix<S> {
    let n = d.total_qubits();
    let dim = 1usize << n;
    let mut p = DenseMatrix::zeros(dim, dim);
    let (offset, len) = match conj {
        Conjugation::None => {
            return DenseMatrix::identity(dim);
        }
        Conjugation::V => (0, d.spec.n_x),
        Conjugation::W => (d.spec.n_x, d.spec.n_y),
    };
    let size = 1usize << len;
    let mask = (size - 1) << offset;
    for i in 0..dim {
        let reg = (i & mask) >> offset;
        let j = (i & !mask) | (((reg + 1) % size) << offset);
        p[(j, i)] = S::one();
    }
    p
}

/// Explicit dense reconstruction: constant I + sum over groups of
/// U^T (sum of scaled terms) U. Test oracle for the decomposition.
pub fn reconstruct_dense<S: Scalar>(d: &DecomposedHamiltonian<S>) -> Result<DenseMatrix<S>> {
    let n = d.total_qubits();
    if n > DENSE_QUBIT_CAP {
        return Err(Error::SizeCap(n, DENSE_QUBIT_CAP));
    }
    let dim = 1usize << n;
    let mut m = DenseMatrix::identity(dim).scale(d.constant);
    for group in &d.groups {
        let mut inner = DenseMatrix::zeros(dim, dim);
        for term in &group.terms {
            let h = dense_observable(&term.observable, n)?;
            inner = inner.add(&h.scale(d.axis_scale(term.axis)));
        }
        let u = shift_matrix(d, group.conjugation);
        // real permutation: U^dag = U^T
        m = m.add(&u.transpose().matmul(&inner).matmul(&u));
    }
    Ok(m)
}

/// Pauli-basis expansion c_P = tr(P M) / 2^n over all n-qubit Pauli strings.
/// Exponential-cost oracle, capped at 6 qubits. Returns strings written with
/// the highest qubit leftmost, filtered to |c_P| > 1e-12.
pub fn pauli_decompose<S: Scalar>(m: &DenseMatrix<S>) -> Result<Vec<(String, S)>> {
    let dim = m.rows();
    if dim != m.cols() || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > PAULI_QUBIT_CAP {
        return Err(Error::SizeCap(n, PAULI_QUBIT_CAP));
    }
    let cutoff = S::lit(1e-12);
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        // per-column action of the Pauli string: P|k> = phase(k) |k ^ flip>
        let mut flip = 0usize;
        let mut re_tr = S::zero();
        let mut im_tr = S::zero();
        let digits: Vec<usize> = (0..n).map(|q| (code >> (2 * q)) & 3).collect();
        for (q, &p) in digits.iter().enumerate() {
            if p == 1 || p == 2 {
                flip |= 1 << q;
            }
        }
        for k in 0..dim {
            // phase(k) = prod over qubits: Z -> (-1)^bit, Y -> i (-1)^bit... Y|0>=i|1>, Y|1>=-i|0>
            let mut phase_re = S::one();
            let mut phase_im = S::zero();
            let mut negate = false;
            let mut y_quarter = 0usize; // powers of i from Y factors
            for (q, &p) in digits.iter().enumerate() {
                let bit = (k >> q) & 1;
                match p {
                    2 => {
                        y_quarter += 1;
                        if bit == 1 {
                            negate = !negate;
                        }
                    }
                    3 => {
                        if bit == 1 {
                            negate = !negate;
                        }
                    }
                    _ => {}
                }
            }
            match y_quarter % 4 {
                0 => {}
                1 => {
                    phase_im = phase_re;
                    phase_re = S::zero();
                }
                2 => phase_re = -phase_re,
                _ => {
                    phase_im = -phase_re;
                    phase_re = S::zero();
                }
            }
            if negate {
                phase_re = -phase_re;
                phase_im = -phase_im;
            }
            let entry = m[(k, k ^ flip)];
            re_tr += phase_re * entry;
            im_tr += phase_im * entry;
        }
        let scale = S::lit(1.0 / dim as f64);
        let c_re = re_tr * scale;
        let c_im = im_tr * scale;
        if c_im.abs() > S::lit(1e-9) {
            return Err(Error::NonFinite(format!(
                "complex Pauli coefficient on real symmetric input: im = {}",
                c_im
            )));
        }
        if c_re.abs() > cutoff {
            let label: String = (0..n)
                .rev()
                .map(|q| match digits[q] {
                    0 => 'I',
                    1 => 'X',
                    2 => 'Y',
                    _ => 'Z',
                })
                .collect();
            out.push((label, c_re));
        }
    }
    Ok(out)
}

/// Dense matrix of one Pauli string (highest qubit leftmost), oracle-side
/// helper for reconstruction checks. Strings with an odd number of Y factors
/// are rejected (they are imaginary and never appear for symmetric input).
pub fn pauli_string_dense<S: Scalar>(label: &str) -> Result<DenseMatrix<S>> {
    let n = label.len();
    let dim = 1usize << n;
    let y_count = label.chars().filter(|&c| c == 'Y').count();
    if y_count % 2 != 0 {
        return Err(Error::NonFinite(format!("imaginary Pauli string {label}")));
    }
    let mut m = DenseMatrix::zeros(dim, dim);
    let chars: Vec<char> = label.chars().rev().collect(); // chars[q] acts on qubit q
    for k in 0..dim {
        let mut flip = 0usize;
        let mut negate = false;
        let mut y_quarter = 0usize;
        for (q, &c) in chars.iter().enumerate() {
            let bit = (k >> q) & 1;
            match c {
                'X' => flip |= 1 << q,
                'Y' => {
                    flip |= 1 << q;
                    y_quarter += 1;
                    if bit == 1 {
                        negate = !negate;
                    }
                }
                'Z' => {
                    if bit == 1 {
                        negate = !negate;
                    }
                }
                _ => {}
            }
        }
        let mut val = S::one();
        if y_quarter % 4 == 2 {
            val = -val;
        }
        if negate {
            val = -val;
        }
        m[(k ^ flip, k)] = val;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdm::{assemble_2d, ModeFamily, WaveguideSpec};

    fn unit_spec(n_x: usize, n_y: usize, family: ModeFamily) -> WaveguideSpec {
        // unit grid steps: a = 2^n_x, b = 2^n_y meters
        WaveguideSpec::new((1u32 << n_x) as f64, (1u32 << n_y) as f64, n_x, n_y, family).unwrap()
    }

    #[test]
    fn structure_is_three_groups_eight_terms() {
        let d = decompose::<f64>(&unit_spec(2, 3, ModeFamily::Tm)).unwrap();
        assert_eq!(d.groups.len(), 3);
        assert_eq!(d.term_count(), 8);
        assert_eq!(d.groups[0].conjugation, Conjugation::None);
        assert_eq!(d.groups[1].conjugation, Conjugation::V);
        assert_eq!(d.groups[2].conjugation, Conjugation::W);
        assert_eq!(d.constant, 4.0);
    }

    #[test]
    fn projector_sign_follows_family() {
        let tm = decompose::<f64>(&unit_spec(2, 2, ModeFamily::Tm)).unwrap();
        let te = decompose::<f64>(&unit_spec(2, 2, ModeFamily::Te)).unwrap();
        // last term of the V group is the pure projector H_5
        assert_eq!(tm.groups[1].terms[2].observable.coefficient, 1.0);
        assert_eq!(te.groups[1].terms[2].observable.coefficient, -1.0);
    }

    #[test]
    fn reconstruction_matches_hand_4x4() {
        let d = decompose::<f64>(&unit_spec(1, 1, ModeFamily::Tm)).unwrap();
        let m = reconstruct_dense(&d).unwrap();
        let expected = [
            [6.0, -1.0, -1.0, 0.0],
            [-1.0, 6.0, 0.0, -1.0],
            [-1.0, 0.0, 6.0, -1.0],
            [0.0, -1.0, -1.0, 6.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((m[(i, j)] - expected[i][j]).abs() < 1e-12, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn reconstruction_matches_assembly_all_small_sizes() {
        for family in [ModeFamily::Te, ModeFamily::Tm] {
            for n_x in 1..=3 {
                for n_y in 1..=3 {
                    let spec = unit_spec(n_x, n_y, family);
                    let d = decompose::<f64>(&spec).unwrap();
                    let recon = reconstruct_dense(&d).unwrap();
                    let direct = assemble_2d::<f64>(&spec).unwrap();
                    let diff = recon.sub(&direct).max_abs();
                    assert!(diff < 1e-12, "{family} n_x={n_x} n_y={n_y}: diff {diff}");
                }
            }
        }
    }

    #[test]
    fn reconstruction_matches_physical_scales() {
        let spec = WaveguideSpec::new(15e-3, 10e-3, 3, 2, ModeFamily::Te).unwrap();
        let d = decompose::<f64>(&spec).unwrap();
        let recon = reconstruct_dense(&d).unwrap();
        let direct = assemble_2d::<f64>(&spec).unwrap();
        let rel = recon.sub(&direct).max_abs() / direct.max_abs();
        assert!(rel < 1e-12, "relative diff {rel}");
    }

    #[test]
    fn pauli_single_qubit_dirichlet() {
        let m = DenseMatrix::from_rows(&[&[3.0, -1.0], &[-1.0, 3.0]]);
        let mut terms = pauli_decompose(&m).unwrap();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0], ("I".to_string(), 3.0));
        assert_eq!(terms[1], ("X".to_string(), -1.0));
    }

    #[test]
    fn pauli_identity_two_qubits() {
        let m = DenseMatrix::<f64>::identity(4);
        let terms = pauli_decompose(&m).unwrap();
        assert_eq!(terms, vec![("II".to_string(), 1.0)]);
    }

    #[test]
    fn pauli_reconstructs_assembly() {
        let spec = unit_spec(1, 1, ModeFamily::Tm);
        let m = assemble_2d::<f64>(&spec).unwrap();
        let terms = pauli_decompose(&m).unwrap();
        let mut recon = DenseMatrix::zeros(4, 4);
        for (label, c) in &terms {
            recon = recon.add(&pauli_string_dense::<f64>(label).unwrap().scale(*c));
        }
        assert!(recon.sub(&m).max_abs() < 1e-10);
    }

    #[test]
    fn term_count_constant_vs_pauli_growth() {
        let mut pauli_counts = Vec::new();
        for n in 2..=5 {
            let n_x = n / 2;
            let n_y = n - n_x;
            let spec = unit_spec(n_x, n_y, ModeFamily::Tm);
            let d = decompose::<f64>(&spec).unwrap();
            assert_eq!(d.term_count(), 8, "decomposition term count must not grow");
            let m = assemble_2d::<f64>(&spec).unwrap();
            pauli_counts.push(pauli_decompose(&m).unwrap().len());
        }
        for w in pauli_counts.windows(2) {
            assert!(w[1] > w[0], "Pauli term count should grow with n: {pauli_counts:?}");
        }
    }

    #[test]
    fn pauli_rejects_bad_dimension() {
        let m = DenseMatrix::<f64>::zeros(3, 3);
        assert!(pauli_decompose(&m).is_err());
    }

    #[test]
    fn constant_only_reconstruction() {
        let spec = unit_spec(1, 1, ModeFamily::Tm);
        let mut d = decompose::<f64>(&spec).unwrap();
        for g in &mut d.groups {
            g.terms.clear();
        }
        let m = reconstruct_dense(&d).unwrap();
        assert_eq!(m, DenseMatrix::identity(4).scale(4.0));
    }
}
