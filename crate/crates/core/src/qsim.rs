//! Exact statevector simulator: 2^n complex amplitudes, Ry/CNOT/MCX gates,
//! the layered Ry + linear-CNOT ansatz, cyclic register shifts, and
//! observable expectations and matrix elements.
//!
//! Bit convention everywhere: qubit q is bit q of the basis index, the x
//! register occupies the low n_x bits and the y register the bits above it.

use crate::decomp::{ObservableKind, SimpleObservable};
use crate::scalar::Scalar;
use crate::{Error, Result};
use num_complex::Complex;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<S> {
    n: usize,
    amps: Vec<Complex<S>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub n_x: usize,
    pub n_y: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftRegister {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    Forward,
    Inverse,
}

/// How the cyclic shift is realized; the two must agree (tested property).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftImplementation {
    /// Index permutation applied in one pass.
    DirectPermutation,
    /// Product of multi-controlled-X gates, largest with k-1 controls.
    GateProduct,
}

impl<S: Scalar> StateVector<S> {
    /// |0...0> on n qubits.
    pub fn zero_state(n: usize) -> Self {
        let mut amps = vec![Complex::new(S::zero(), S::zero()); 1 << n];
        amps[0] = Complex::new(S::one(), S::zero());
        Self { n, amps }
    }

    /// State with the given real amplitudes (must be normalized).
    pub fn from_real(values: &[S]) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(values.len()));
        }
        let norm: S = values.iter().map(|&x| x * x).sum();
        if (norm - S::one()).abs() > S::lit(1e-9) {
            return Err(Error::NonFinite(format!("unnormalized input, |v|^2 = {norm}")));
        }
        Ok(Self {
            n: values.len().trailing_zeros() as usize,
            amps: values.iter().map(|&x| Complex::new(x, S::zero())).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<S>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> S {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Real parts of the amplitudes (the ansatz keeps states real).
    pub fn real_amplitudes(&self) -> Vec<S> {
        self.amps.iter().map(|a| a.re).collect()
    }

    pub fn max_imag(&self) -> S {
        self.amps.iter().fold(S::zero(), |m, a| m.max(a.im.abs()))
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::QubitOutOfRange(q, self.n))
        } else {
            Ok(())
        }
    }

    pub fn apply_ry(&mut self, qubit: usize, theta: S) -> Result<()> {
        self.check_qubit(qubit)?;
        let half = theta * S::lit(0.5);
        let c = half.cos();
        let s = half.sin();
        let bit = 1usize << qubit;
        for i in 0..self.dim() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = a0 * c - a1 * s;
                self.amps[i | bit] = a0 * s + a1 * c;
            }
        }
        Ok(())
    }

    pub fn apply_x(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        for i in 0..self.dim() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.apply_mcx(1usize << control, target)
    }

    /// X on `target` conditioned on every qubit in `control_mask` being 1.
    pub fn apply_mcx(&mut self, control_mask: usize, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        if control_mask >> self.n != 0 {
            return Err(Error::QubitOutOfRange(self.n, self.n));
        }
        let bit = 1usize << target;
        debug_assert_eq!(control_mask & bit, 0);
        for i in 0..self.dim() {
            if i & bit == 0 && i & control_mask == control_mask {
                self.amps.swap(i, i | bit);
            }
        }
        Ok(())
    }

    /// Cyclic shift i -> (i +/- 1) mod 2^k on one register.
    pub fn apply_cyclic_shift(
        &mut self,
        layout: RegisterLayout,
        register: ShiftRegister,
        direction: ShiftDirection,
        realization: ShiftImplementation,
    ) -> Result<()> {
        if layout.n_x + layout.n_y != self.n {
            return Err(Error::DimensionMismatch(format!(
                "layout {}+{} vs {} qubits",
                layout.n_x, layout.n_y, self.n
            )));
        }
        let (offset, len) = match register {
            ShiftRegister::X => (0, layout.n_x),
            ShiftRegister::Y => (layout.n_x, layout.n_y),
        };
        match realization {
            ShiftImplementation::DirectPermutation => {
                self.shift_direct(offset, len, direction);
            }
            ShiftImplementation::GateProduct => {
                self.shift_gate_product(offset, len, direction)?;
            }
        }
        Ok(())
    }

    fn shift_direct(&mut self, offset: usize, len: usize, direction: ShiftDirection) {
        let size = 1usize << len;
        let mask = (size - 1) << offset;
        let mut out = vec![Complex::new(S::zero(), S::zero()); self.dim()];
        for i in 0..self.dim() {
            let reg = (i & mask) >> offset;
            let shifted = match direction {
                ShiftDirection::Forward => (reg + 1) % size,
                ShiftDirection::Inverse => (reg + size - 1) % size,
            };
            out[(i & !mask) | (shifted << offset)] = self.amps[i];
        }
        self.amps = out;
    }

    /// Increment circuit: MCX with controls on all lower register qubits,
    /// applied top bit first, then X on the lowest register qubit. The
    /// inverse runs the involutive gates in reverse order.
    fn shift_gate_product(&mut self, offset: usize, len: usize, direction: ShiftDirection) -> Result<()> {
        match direction {
            ShiftDirection::Forward => {
                for t in (1..len).rev() {
                    let controls = ((1usize << t) - 1) << offset;
                    self.apply_mcx(controls, offset + t)?;
                }
                self.apply_x(offset)?;
            }
            ShiftDirection::Inverse => {
                self.apply_x(offset)?;
                for t in 1..len {
                    let controls = ((1usize << t) - 1) << offset;
                    self.apply_mcx(controls, offset + t)?;
                }
            }
        }
        Ok(())
    }

    /// <self|other>.
    pub fn overlap(&self, other: &Self) -> Result<Complex<S>> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(S::zero(), S::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    /// <psi| H |psi> for a simple observable (coefficient included). The
    /// imaginary residue is asserted small and discarded.
    pub fn expectation(&self, obs: &SimpleObservable<S>) -> Result<S> {
        let me = self.matrix_element_complex(self, obs)?;
        debug_assert!(me.im.abs() < S::lit(1e-12) * (S::one() + me.re.abs()));
        Ok(me.re)
    }

    /// Re <self| H |other>, the bilinear form used by the analytic gradient.
    pub fn matrix_element(&self, other: &Self, obs: &SimpleObservable<S>) -> Result<S> {
        Ok(self.matrix_element_complex(other, obs)?.re)
    }

    fn matrix_element_complex(&self, other: &Self, obs: &SimpleObservable<S>) -> Result<Complex<S>> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        let zero = Complex::new(S::zero(), S::zero());
        let acc = match obs.kind {
            ObservableKind::Identity => self.overlap(other)?,
            ObservableKind::XOnQubit { qubit } => {
                self.check_qubit(qubit)?;
                let bit = 1usize << qubit;
                (0..self.dim()).fold(zero, |acc, i| {
                    acc + self.amps[i].conj() * other.amps[i ^ bit]
                })
            }
            ObservableKind::ZeroProjectorBlock { block } => {
                let mask = block.mask();
                (0..self.dim())
                    .filter(|i| i & mask == 0)
                    .fold(zero, |acc, i| acc + self.amps[i].conj() * other.amps[i])
            }
            ObservableKind::ZeroProjectorBlockTimesX { block, x_qubit } => {
                self.check_qubit(x_qubit)?;
                let mask = block.mask();
                let bit = 1usize << x_qubit;
                (0..self.dim())
                    .filter(|i| i & mask == 0)
                    .fold(zero, |acc, i| acc + self.amps[i].conj() * other.amps[i ^ bit])
            }
        };
        Ok(acc * obs.coefficient)
    }
}

/// Layered hardware-efficient ansatz: per layer, Ry on every qubit then a
/// linear chain of CNOTs (control q, target q+1).
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit<S> {
    pub n: usize,
    pub layers: usize,
    /// L * n angles, indexed (layer, qubit) as theta[layer * n + qubit].
    pub theta: Vec<S>,
}

impl<S: Scalar> AnsatzCircuit<S> {
    pub fn new(n: usize, layers: usize, theta: Vec<S>) -> Result<Self> {
        if theta.len() != n * layers {
            return Err(Error::DimensionMismatch(format!(
                "expected {} parameters, got {}",
                n * layers,
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("ansatz angle".into()));
        }
        Ok(Self { n, layers, theta })
    }

    pub fn param_count(&self) -> usize {
        self.theta.len()
    }

    pub fn prepare(&self) -> StateVector<S> {
        let mut s = StateVector::zero_state(self.n);
        for layer in 0..self.layers {
            for q in 0..self.n {
                s.apply_ry(q, self.theta[layer * self.n + q]).expect("qubit in range");
            }
            for q in 0..self.n.saturating_sub(1) {
                s.apply_cnot(q, q + 1).expect("qubit in range");
            }
        }
        s
    }

    /// Normalized derivative state: the circuit with parameter j shifted by
    /// pi. The true derivative is half of this state.
    pub fn derivative_state(&self, j: usize) -> Result<StateVector<S>> {
        if j >= self.theta.len() {
            return Err(Error::ParamOutOfRange(j, self.theta.len()));
        }
        let mut shifted = self.clone();
        shifted.theta[j] += S::PI();
        Ok(shifted.prepare())
    }
}
