//! Dense statevector simulator.
//!
//! Basis states are indexed little-endian: qubit `q` of index `i` is bit
//! `(i >> q) & 1`. Rotation gates follow the half-angle convention
//! `R_sigma(theta) = exp(-i * theta * sigma / 2)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::error::{Error, Result};

/// Hard cap on qubit count; 2^20 amplitudes is the largest state we simulate.
pub const MAX_QUBITS: usize = 20;

/// Rotation axis for parameterized single-qubit gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "X"),
            Axis::Y => write!(f, "Y"),
            Axis::Z => write!(f, "Z"),
        }
    }
}

/// Pure state of `n_qubits` qubits as a dense complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// All-zeros computational basis state.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from raw amplitudes; length must be a power of two and
    /// the norm must be 1 within 1e-8.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, qubit: usize) {
        assert!(
            qubit < self.n_qubits,
            "qubit index {} out of range for {} qubits",
            qubit,
            self.n_qubits
        );
    }

    /// Applies an arbitrary 2x2 matrix `[[u00, u01], [u10, u11]]` to `qubit`.
    pub fn apply_single_qubit(
        &mut self,
        qubit: usize,
        u00: Complex64,
        u01: Complex64,
        u10: Complex64,
        u11: Complex64,
    ) {
        self.check_qubit(qubit);
        let step = 1 << qubit;
        // Pairs (j, j + step) differ only in the target bit.
        for base in (0..self.amps.len()).step_by(step << 1) {
            for j in base..base + step {
                let k = j + step;
                let a = self.amps[j];
                let b = self.amps[k];
                self.amps[j] = u00 * a + u01 * b;
                self.amps[k] = u10 * a + u11 * b;
            }
        }
    }

    /// Rotation `exp(-i * theta * sigma_axis / 2)` on `qubit`.
    pub fn apply_rotation(&mut self, axis: Axis, qubit: usize, theta: f64) {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let zero = Complex64::new(0.0, 0.0);
        match axis {
            Axis::X => self.apply_single_qubit(
                qubit,
                Complex64::new(c, 0.0),
                Complex64::new(0.0, -s),
                Complex64::new(0.0, -s),
                Complex64::new(c, 0.0),
            ),
            Axis::Y => self.apply_single_qubit(
                qubit,
                Complex64::new(c, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(c, 0.0),
            ),
            Axis::Z => self.apply_single_qubit(
                qubit,
                Complex64::new(c, -s),
                zero,
                zero,
                Complex64::new(c, s),
            ),
        }
    }

    pub fn apply_hadamard(&mut self, qubit: usize) {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_single_qubit(qubit, h, h, h, -h);
    }

    pub fn apply_x(&mut self, qubit: usize) {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        self.apply_single_qubit(qubit, zero, one, one, zero);
    }

    /// CNOT with the given control and target qubits.
    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        self.check_qubit(control);
        self.check_qubit(target);
        assert!(control != target, "control and target must differ");
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    /// Controlled-Z; symmetric in its two qubits.
    pub fn apply_cz(&mut self, a: usize, b: usize) {
        self.check_qubit(a);
        self.check_qubit(b);
        assert!(a != b, "control and target must differ");
        let mask = (1usize << a) | (1usize << b);
        for i in 0..self.amps.len() {
            if i & mask == mask {
                self.amps[i] = -self.amps[i];
            }
        }
    }

    /// Inner product `<self|other>`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Squared overlap `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Measurement probabilities over all 2^n basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probability_of(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    /// Draws `shots` basis-state samples; deterministic for a given seed.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> BTreeMap<usize, u64> {
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c <= u);
            let idx = idx.min(self.amps.len() - 1);
            *counts.entry(idx).or_insert(0) += 1;
        }
        counts
    }
}
