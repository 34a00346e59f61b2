//! Classical and quantum Fisher information with quantum-resource
//! accounting, plus the spectral diagnostics that compare them.
//!
//! All derivatives use the parameter-shift rule for half-angle rotations:
//! d/dt f(t) = (f(t + pi/2) - f(t - pi/2)) / 2.

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    sample_random_measurement, AnsatzFamily, Connectivity, MeasurementBasis, ParameterizedCircuit,
};
use crate::error::{Error, Result};
use crate::hamiltonian::PauliHamiltonian;
use crate::linalg;

/// Outcome probabilities below this are dropped from classical Fisher sums.
pub const DEFAULT_PROB_FLOOR: f64 = 1e-12;

/// Step for finite-difference Hessians.
pub const DEFAULT_HESSIAN_STEP: f64 = 1e-4;

/// Running count of quantum-state preparations a hardware run would need.
/// Simulator-only diagnostics leave it untouched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCounter {
    preparations: u64,
}

impl ResourceCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, preparations: u64) {
        self.preparations += preparations;
    }

    pub fn total(&self) -> u64 {
        self.preparations
    }
}

/// Which information matrix a `FisherMatrix` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FisherKind {
    Quantum,
    Classical { basis: String },
    ReducedQuantum { subset: Vec<usize> },
}

/// Symmetric m x m information matrix tagged with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    pub kind: FisherKind,
    pub entries: Array2<f64>,
}

impl FisherMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct FisherMatrixRepr {
    m: usize,
    kind: FisherKind,
    entries: Vec<f64>,
}

impl Serialize for FisherMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FisherMatrixRepr {
            m: self.dim(),
            kind: self.kind.clone(),
            entries: self.entries.iter().cloned().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FisherMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FisherMatrixRepr::deserialize(deserializer)?;
        if repr.entries.len() != repr.m * repr.m {
            return Err(serde::de::Error::custom(format!(
                "expected {} entries, got {}",
                repr.m * repr.m,
                repr.entries.len()
            )));
        }
        let entries = Array2::from_shape_vec((repr.m, repr.m), repr.entries)
            .map_err(serde::de::Error::custom)?;
        Ok(FisherMatrix {
            kind: repr.kind,
            entries,
        })
    }
}

fn check_params(circuit: &ParameterizedCircuit, params: &[f64]) -> Result<()> {
    if params.len() != circuit.n_params() {
        return Err(Error::ParameterCount {
            expected: circuit.n_params(),
            actual: params.len(),
        });
    }
    Ok(())
}

/// Loss gradient by parameter shift over the index subset; entries outside
/// the subset stay zero. Costs 2 |subset| preparations.
pub fn gradient_parameter_shift_subset(
    circuit: &ParameterizedCircuit,
    hamiltonian: &PauliHamiltonian,
    params: &[f64],
    subset: &[usize],
    counter: &mut ResourceCounter,
) -> Result<Array1<f64>> {
    check_params(circuit, params)?;
    validate_subset(subset, circuit.n_params())?;
    let mut gradient = Array1::zeros(circuit.n_params());
    for &j in subset {
        let plus = hamiltonian.loss(&circuit.evaluate_shifted(params, j, FRAC_PI_2)?)?;
        let minus = hamiltonian.loss(&circuit.evaluate_shifted(params, j, -FRAC_PI_2)?)?;
        gradient[j] = 0.5 * (plus - minus);
    }
    counter.record(2 * subset.len() as u64);
    Ok(gradient)
}

/// Full loss gradient by parameter shift. Costs 2m preparations.
pub fn gradient_parameter_shift(
    circuit: &ParameterizedCircuit,
    hamiltonian: &PauliHamiltonian,
    params: &[f64],
    counter: &mut ResourceCounter,
) -> Result<Array1<f64>> {
    let full: Vec<usize> = (0..circuit.n_params()).collect();
    gradient_parameter_shift_subset(circuit, hamiltonian, params, &full, counter)
}

/// Outcome distribution and its parameter-shift Jacobian (2^n rows, m
/// columns) under the measurement basis. Costs 2m + 1 preparations.
pub fn probability_jacobian(
    circuit: &ParameterizedCircuit,
    basis: &MeasurementBasis,
    params: &[f64],
    counter: &mut ResourceCounter,
) -> Result<(Vec<f64>, Array2<f64>)> {
    check_params(circuit, params)?;
    let m = circuit.n_params();
    let probs = basis.probabilities(&circuit.evaluate(params)?)?;
    let dim = probs.len();
    let mut jacobian = Array2::zeros((dim, m));
    for j in 0..m {
        let plus = basis.probabilities(&circuit.evaluate_shifted(params, j, FRAC_PI_2)?)?;
        let minus = basis.probabilities(&circuit.evaluate_shifted(params, j, -FRAC_PI_2)?)?;
        for l in 0..dim {
            jacobian[(l, j)] = 0.5 * (plus[l] - minus[l]);
        }
    }
    counter.record(2 * m as u64 + 1);
    Ok((probs, jacobian))
}

/// Classical Fisher information of the outcome distribution in `basis`:
/// sum over outcomes with probability >= `prob_floor` of the scaled outer
/// product of distribution derivatives. Costs 2m + 1 preparations.
pub fn cfim(
    circuit: &ParameterizedCircuit,
    basis: &MeasurementBasis,
    params: &[f64],
    prob_floor: f64,
    counter: &mut ResourceCounter,
) -> Result<FisherMatrix> {
    let (probs, jacobian) = probability_jacobian(circuit, basis, params, counter)?;
    let m = circuit.n_params();
    let mut entries = Array2::zeros((m, m));
    for (l, &p) in probs.iter().enumerate() {
        if p < prob_floor {
            continue;
        }
        let w = 1.0 / p;
        for i in 0..m {
            let ji = jacobian[(l, i)];
            for j in i..m {
                entries[(i, j)] += w * ji * jacobian[(l, j)];
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            entries[(i, j)] = entries[(j, i)];
        }
    }
    Ok(FisherMatrix {
        kind: FisherKind::Classical {
            basis: basis.label.clone(),
        },
        entries,
    })
}

/// Quantum Fisher information from exact derivative states:
/// 4 Re[<d_i|d_j> - <d_i|psi><psi|d_j>] with |d_j> = (|psi(+pi)> -
/// |psi(-pi)>) / 4, exact for half-angle rotations because the pi-shifted
/// gate equals -i times the generator. Simulator diagnostic; no counter
/// effect.
pub fn qfim_exact(circuit: &ParameterizedCircuit, params: &[f64]) -> Result<FisherMatrix> {
    check_params(circuit, params)?;
    let m = circuit.n_params();
    let base = circuit.evaluate(params)?;
    let dim = base.dim();
    let mut derivatives: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for j in 0..m {
        let plus = circuit.evaluate_shifted(params, j, PI)?;
        let minus = circuit.evaluate_shifted(params, j, -PI)?;
        let d: Vec<Complex64> = (0..dim)
            .map(|k| 0.25 * (plus.amplitudes()[k] - minus.amplitudes()[k]))
            .collect();
        derivatives.push(d);
    }
    let overlaps: Vec<Complex64> = derivatives
        .iter()
        .map(|d| {
            d.iter()
                .zip(base.amplitudes())
                .map(|(di, bi)| di.conj() * bi)
                .sum()
        })
        .collect();
    let mut entries = Array2::zeros((m, m));
    for i in 0..m {
        for j in i..m {
            let mut gram = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                gram += derivatives[i][k].conj() * derivatives[j][k];
            }
            let berry = overlaps[i] * overlaps[j].conj();
            let value = 4.0 * (gram.re - berry.re);
            entries[(i, j)] = value;
            entries[(j, i)] = value;
        }
    }
    Ok(FisherMatrix {
        kind: FisherKind::Quantum,
        entries,
    })
}

fn validate_subset(subset: &[usize], m: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("parameter subset is empty".into()));
    }
    for pair in subset.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidArgument(
                "parameter subset must be strictly increasing".into(),
            ));
        }
    }
    let last = *subset.last().unwrap();
    if last >= m {
        return Err(Error::ParameterCount {
            expected: m,
            actual: last + 1,
        });
    }
    Ok(())
}

/// Shared kernel for the overlap-based quantum Fisher information. Fills
/// the subset x subset block of an m x m matrix from four shifted
/// fidelities per parameter pair and records 2 l (l + 1) preparations.
fn qfim_overlap_block(
    circuit: &ParameterizedCircuit,
    params: &[f64],
    subset: &[usize],
    counter: &mut ResourceCounter,
) -> Result<Array2<f64>> {
    check_params(circuit, params)?;
    let m = circuit.n_params();
    validate_subset(subset, m)?;
    let base = circuit.evaluate(params)?;
    let mut entries = Array2::zeros((m, m));
    let shifted_fidelity = |a: usize, da: f64, b: usize, db: f64| -> Result<f64> {
        let mut shifted = params.to_vec();
        shifted[a] += da;
        shifted[b] += db;
        base.fidelity(&circuit.evaluate(&shifted)?)
    };
    for (idx, &a) in subset.iter().enumerate() {
        for &b in &subset[idx..] {
            let fpp = shifted_fidelity(a, FRAC_PI_2, b, FRAC_PI_2)?;
            let fpm = shifted_fidelity(a, FRAC_PI_2, b, -FRAC_PI_2)?;
            let fmp = shifted_fidelity(a, -FRAC_PI_2, b, FRAC_PI_2)?;
            let fmm = shifted_fidelity(a, -FRAC_PI_2, b, -FRAC_PI_2)?;
            // second-order shift rule for the infidelity metric
            let value = -0.5 * (fpp - fpm - fmp + fmm);
            entries[(a, b)] = value;
            entries[(b, a)] = value;
        }
    }
    let l = subset.len() as u64;
    counter.record(2 * l * (l + 1));
    Ok(entries)
}

/// Quantum Fisher information from shifted state fidelities, the route a
/// hardware run would take. Costs 2m(m + 1) preparations.
pub fn qfim_parameter_shift(
    circuit: &ParameterizedCircuit,
    params: &[f64],
    counter: &mut ResourceCounter,
) -> Result<FisherMatrix> {
    let full: Vec<usize> = (0..circuit.n_params()).collect();
    let entries = qfim_overlap_block(circuit, params, &full, counter)?;
    Ok(FisherMatrix {
        kind: FisherKind::Quantum,
        entries,
    })
}

/// Quantum Fisher information restricted to a parameter subset: the
/// subset x subset block is computed, everything else is zero. Costs
/// 2 l (l + 1) preparations.
pub fn reduced_qfim(
    circuit: &ParameterizedCircuit,
    params: &[f64],
    subset: &[usize],
    counter: &mut ResourceCounter,
) -> Result<FisherMatrix> {
    let entries = qfim_overlap_block(circuit, params, subset, counter)?;
    Ok(FisherMatrix {
        kind: FisherKind::ReducedQuantum {
            subset: subset.to_vec(),
        },
        entries,
    })
}

/// Central-difference Hessian of the loss, symmetric by construction.
/// Simulator diagnostic; no counter effect.
pub fn hessian_finite_difference(
    circuit: &ParameterizedCircuit,
    hamiltonian: &PauliHamiltonian,
    params: &[f64],
    step: f64,
) -> Result<Array2<f64>> {
    check_params(circuit, params)?;
    let m = circuit.n_params();
    let loss_at = |shifts: &[(usize, f64)]| -> Result<f64> {
        let mut shifted = params.to_vec();
        for &(idx, delta) in shifts {
            shifted[idx] += delta;
        }
        hamiltonian.loss(&circuit.evaluate(&shifted)?)
    };
    let base = loss_at(&[])?;
    let mut hessian = Array2::zeros((m, m));
    for i in 0..m {
        let plus = loss_at(&[(i, step)])?;
        let minus = loss_at(&[(i, -step)])?;
        hessian[(i, i)] = (plus - 2.0 * base + minus) / (step * step);
        for j in i + 1..m {
            let pp = loss_at(&[(i, step), (j, step)])?;
            let pm = loss_at(&[(i, step), (j, -step)])?;
            let mp = loss_at(&[(i, -step), (j, step)])?;
            let mm = loss_at(&[(i, -step), (j, -step)])?;
            let value = (pp - pm - mp + mm) / (4.0 * step * step);
            hessian[(i, j)] = value;
            hessian[(j, i)] = value;
        }
    }
    Ok(hessian)
}

fn check_same_dim(a: &Array2<f64>, b: &Array2<f64>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::MatrixShape {
            rows: b.nrows(),
            cols: b.ncols(),
            expected: a.nrows(),
        });
    }
    Ok(())
}

/// Loewner order check `a <= b`: the minimum eigenvalue of b - a is
/// at least -tol.
pub fn loewner_leq(a: &Array2<f64>, b: &Array2<f64>, tol: f64) -> Result<bool> {
    check_same_dim(a, b)?;
    Ok(linalg::min_eigenvalue(&(b - a))? >= -tol)
}

/// Null-space containment report for N(fq) vs N(fc).
#[derive(Debug, Clone)]
pub struct NullSpaceReport {
    pub contained: bool,
    pub kernel_dim: usize,
    pub max_violation: f64,
}

/// Checks that every eigenvector of `fq` with eigenvalue below `tol` is
/// also (numerically) annihilated by `fc`.
pub fn null_space_containment(
    fq: &Array2<f64>,
    fc: &Array2<f64>,
    tol: f64,
) -> Result<NullSpaceReport> {
    check_same_dim(fq, fc)?;
    let decomp = linalg::eigh(fq)?;
    let n = decomp.dim();
    let mut kernel_dim = 0;
    let mut max_violation: f64 = 0.0;
    for k in 0..n {
        if decomp.eigenvalues[k] >= tol {
            continue;
        }
        kernel_dim += 1;
        // quadratic form v^T fc v
        let mut quad = 0.0;
        for i in 0..n {
            let vi = decomp.eigenvectors[(i, k)];
            for j in 0..n {
                quad += vi * fc[(i, j)] * decomp.eigenvectors[(j, k)];
            }
        }
        max_violation = max_violation.max(quad.abs());
    }
    Ok(NullSpaceReport {
        contained: max_violation < tol,
        kernel_dim,
        max_violation,
    })
}

/// Frobenius distance between the classical matrix and half the quantum
/// one.
pub fn fisher_distance(fc: &Array2<f64>, fq: &Array2<f64>) -> Result<f64> {
    check_same_dim(fc, fq)?;
    let diff = fc - &(fq * 0.5);
    Ok(linalg::frobenius_norm(&diff))
}

/// Sufficient-decrease test for a natural-gradient step: with P the cutoff
/// pseudoinverse of `f`, checks eta P H P <= 2 P on the range of P. PSD
/// slack is 1e-9.
pub fn descent_condition(
    f: &Array2<f64>,
    hessian: &Array2<f64>,
    eta: f64,
    cutoff: f64,
) -> Result<bool> {
    check_same_dim(f, hessian)?;
    let decomp = linalg::eigh(f)?;
    let n = decomp.dim();
    let retained: Vec<usize> = (0..n)
        .filter(|&k| decomp.eigenvalues[k].abs() > cutoff)
        .collect();
    if retained.is_empty() {
        return Ok(true);
    }
    let r = retained.len();
    // project the Hessian onto retained eigenvectors: S = V^T H V
    let mut s = Array2::zeros((r, r));
    for (a, &ka) in retained.iter().enumerate() {
        for (b, &kb) in retained.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                let vi = decomp.eigenvectors[(i, ka)];
                for j in 0..n {
                    acc += vi * hessian[(i, j)] * decomp.eigenvectors[(j, kb)];
                }
            }
            s[(a, b)] = acc;
        }
    }
    // 2 Lambda^-1 - eta Lambda^-1 S Lambda^-1 must be PSD
    let mut condition = Array2::zeros((r, r));
    for a in 0..r {
        let la = decomp.eigenvalues[retained[a]];
        for b in 0..r {
            let lb = decomp.eigenvalues[retained[b]];
            condition[(a, b)] = -eta * s[(a, b)] / (la * lb);
        }
        condition[(a, a)] += 2.0 / la;
    }
    linalg::is_psd(&condition, 1e-9)
}

/// Random search for the measurement basis maximizing the classical Fisher
/// trace at `params`. Returns the best basis and its trace. Seed stream is
/// derived per trial, so results are reproducible.
pub fn trace_objective_search(
    circuit: &ParameterizedCircuit,
    params: &[f64],
    family: AnsatzFamily,
    connectivity: Connectivity,
    layers: usize,
    trials: usize,
    seed: u64,
) -> Result<(MeasurementBasis, f64)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trace search needs trials >= 1".into()));
    }
    let mut best: Option<(MeasurementBasis, f64)> = None;
    for t in 0..trials {
        let basis = sample_random_measurement(
            family,
            connectivity,
            circuit.n_qubits(),
            layers,
            crate::derive_seed(seed, t as u64),
        )?;
        let mut scratch = ResourceCounter::new();
        let trace = cfim(circuit, &basis, params, DEFAULT_PROB_FLOOR, &mut scratch)?.trace();
        match &best {
            Some((_, t_best)) if trace <= *t_best => {}
            _ => best = Some((basis, trace)),
        }
    }
    Ok(best.unwrap())
}
