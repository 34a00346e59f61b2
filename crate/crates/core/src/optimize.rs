//! The optimizer family: plain gradient descent, quantum natural gradient,
//! random natural gradient (natural gradient on the classical Fisher matrix
//! of a freshly drawn random measurement each iteration), and
//! stochastic-coordinate natural gradient (quantum natural gradient on a
//! random parameter subset each iteration).

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};

use crate::circuit::{
    sample_random_measurement, AnsatzFamily, AnsatzSpec, Connectivity, MeasurementBasis,
    ParameterizedCircuit,
};
use crate::error::{Error, Result};
use crate::fisher::{
    cfim, gradient_parameter_shift, gradient_parameter_shift_subset, qfim_parameter_shift,
    reduced_qfim, ResourceCounter, DEFAULT_PROB_FLOOR,
};
use crate::hamiltonian::PauliHamiltonian;
use crate::linalg;

/// Eigenvalue cutoff for the natural-gradient pseudoinverse.
pub const DEFAULT_PINV_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(rename = "gd")]
    GradientDescent,
    #[serde(rename = "qng")]
    QuantumNaturalGradient,
    #[serde(rename = "rng")]
    RandomNaturalGradient,
    #[serde(rename = "scqng")]
    StochasticCoordinateNaturalGradient,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::GradientDescent => "gd",
            Method::QuantumNaturalGradient => "qng",
            Method::RandomNaturalGradient => "rng",
            Method::StochasticCoordinateNaturalGradient => "scqng",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(Method::GradientDescent),
            "qng" => Ok(Method::QuantumNaturalGradient),
            "rng" => Ok(Method::RandomNaturalGradient),
            "scqng" => Ok(Method::StochasticCoordinateNaturalGradient),
            other => Err(Error::InvalidArgument(format!(
                "unknown method '{other}' (expected gd, qng, rng, or scqng)"
            ))),
        }
    }
}

/// Where the random-natural-gradient measurement basis comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasurementStrategy {
    /// Fresh random basis every iteration.
    Random {
        family: AnsatzFamily,
        connectivity: Connectivity,
        layers: usize,
    },
    /// Fixed computational basis every iteration.
    Computational,
}

impl MeasurementStrategy {
    /// Default for a given ansatz: same family and connectivity, one layer
    /// fewer (at least one).
    pub fn default_for(spec: &AnsatzSpec) -> Self {
        MeasurementStrategy::Random {
            family: spec.family,
            connectivity: spec.connectivity,
            layers: spec.layers.saturating_sub(1).max(1),
        }
    }
}

fn default_pinv_cutoff() -> f64 {
    DEFAULT_PINV_CUTOFF
}

fn default_prob_floor() -> f64 {
    DEFAULT_PROB_FLOOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    pub learning_rate: f64,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default = "default_pinv_cutoff")]
    pub pinv_cutoff: f64,
    #[serde(default = "default_prob_floor")]
    pub prob_floor: f64,
    /// Rescale each step to unit length in the local metric.
    #[serde(default)]
    pub normalize_step: bool,
    /// Coordinate-subset size for the stochastic-coordinate method;
    /// defaults to ceil(m / 2).
    #[serde(default)]
    pub subset_size: Option<usize>,
    /// Compute the full gradient even when updating only a subset. Changes
    /// the preparation count from 2l to 2m per iteration.
    #[serde(default)]
    pub subset_full_gradient: bool,
    /// Basis source for the random-natural-gradient method.
    #[serde(default)]
    pub measurement: Option<MeasurementStrategy>,
}

impl OptimizerConfig {
    pub fn new(method: Method, learning_rate: f64, iterations: usize, seed: u64) -> Self {
        Self {
            method,
            learning_rate,
            iterations,
            seed,
            pinv_cutoff: DEFAULT_PINV_CUTOFF,
            prob_floor: DEFAULT_PROB_FLOOR,
            normalize_step: false,
            subset_size: None,
            subset_full_gradient: false,
            measurement: None,
        }
    }
}

/// Per-iteration trace entry. Record 0 is the initial point; entry k holds
/// the loss after update k and the cumulative preparation count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub loss: f64,
    #[serde(rename = "grad_norm")]
    pub gradient_norm: f64,
    pub step_norm: f64,
    pub preparations: u64,
    pub diagnostics: String,
}

#[derive(Debug, Clone)]
pub struct OptimizerRun {
    pub method: Method,
    pub records: Vec<IterationRecord>,
    pub final_params: Vec<f64>,
    pub preparations: u64,
}

impl OptimizerRun {
    pub fn initial_loss(&self) -> f64 {
        self.records[0].loss
    }

    pub fn final_loss(&self) -> f64 {
        self.records.last().unwrap().loss
    }
}

/// One update step from a gradient and an optional information matrix:
/// plain `-eta * g` without one, `-eta * pinv(F) * g` with one. With
/// `normalize`, the step is divided by the metric length
/// `sqrt(g^T pinv(F) g)` (or `|g|` without a matrix).
pub fn compute_step(
    gradient: &Array1<f64>,
    info: Option<&Array2<f64>>,
    learning_rate: f64,
    pinv_cutoff: f64,
    normalize: bool,
) -> Result<Array1<f64>> {
    match info {
        None => {
            let mut step = gradient * (-learning_rate);
            if normalize {
                let norm = gradient.dot(gradient).sqrt();
                if norm > 0.0 {
                    step /= norm;
                }
            }
            Ok(step)
        }
        Some(f) => {
            let pinv = linalg::pinv_cutoff(f, pinv_cutoff)?;
            let natural = pinv.dot(gradient);
            let mut step = &natural * (-learning_rate);
            if normalize {
                let metric_sq = gradient.dot(&natural).max(0.0);
                let scale = metric_sq.sqrt();
                if scale > 0.0 {
                    step /= scale;
                }
            }
            Ok(step)
        }
    }
}

/// Uniform random l-subset of {0, ..., m-1}, returned sorted. Deterministic
/// per seed.
pub fn sample_subset(m: usize, l: usize, seed: u64) -> Result<Vec<usize>> {
    if l == 0 || l > m {
        return Err(Error::InvalidArgument(format!(
            "subset size {l} must be between 1 and {m}"
        )));
    }
    let mut indices: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..l {
        let j = rng.gen_range(i..m);
        indices.swap(i, j);
    }
    let mut subset = indices[..l].to_vec();
    subset.sort_unstable();
    Ok(subset)
}

/// Probability that a fixed l-subset is covered by a uniform draw of size
/// l + k: C(l + k, l) / C(m, l), evaluated through log-factorials.
pub fn subset_coverage_probability(m: usize, l: usize, k: usize) -> Result<f64> {
    if l == 0 || l + k > m {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= l and l + k <= m, got m={m}, l={l}, k={k}"
        )));
    }
    let ln_fact = |x: usize| -> f64 { (2..=x).map(|i| (i as f64).ln()).sum() };
    Ok((ln_fact(l + k) - ln_fact(k) + ln_fact(m - l) - ln_fact(m)).exp())
}

fn validate_run_config(
    circuit: &ParameterizedCircuit,
    theta0: &[f64],
    config: &OptimizerConfig,
) -> Result<()> {
    let m = circuit.n_params();
    if theta0.len() != m {
        return Err(Error::ParameterCount {
            expected: m,
            actual: theta0.len(),
        });
    }
    if !(config.learning_rate > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be positive, got {}",
            config.learning_rate
        )));
    }
    if let Some(l) = config.subset_size {
        if l == 0 || l > m {
            return Err(Error::InvalidArgument(format!(
                "subset size {l} must be between 1 and {m}"
            )));
        }
    }
    if config.method == Method::RandomNaturalGradient && config.measurement.is_none() {
        return Err(Error::InvalidArgument(
            "random natural gradient needs a measurement strategy".into(),
        ));
    }
    Ok(())
}

/// Runs the configured optimizer for a fixed iteration count. Per-iteration
/// randomness (measurement bases, coordinate subsets) comes from a seed
/// stream derived from `config.seed` and the iteration index.
pub fn run(
    circuit: &ParameterizedCircuit,
    hamiltonian: &PauliHamiltonian,
    theta0: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizerRun> {
    validate_run_config(circuit, theta0, config)?;
    let m = circuit.n_params();
    let n = circuit.n_qubits();
    let mut params = theta0.to_vec();
    let mut counter = ResourceCounter::new();
    let mut records = Vec::with_capacity(config.iterations + 1);
    records.push(IterationRecord {
        iteration: 0,
        loss: hamiltonian.loss(&circuit.evaluate(&params)?)?,
        gradient_norm: 0.0,
        step_norm: 0.0,
        preparations: 0,
        diagnostics: String::new(),
    });
    for k in 0..config.iterations {
        let iter_seed = crate::derive_seed(config.seed, k as u64);
        let (gradient, info, diagnostics) = match config.method {
            Method::GradientDescent => {
                let g = gradient_parameter_shift(circuit, hamiltonian, &params, &mut counter)?;
                (g, None, String::new())
            }
            Method::QuantumNaturalGradient => {
                let g = gradient_parameter_shift(circuit, hamiltonian, &params, &mut counter)?;
                let f = qfim_parameter_shift(circuit, &params, &mut counter)?;
                (g, Some(f.entries), String::new())
            }
            Method::RandomNaturalGradient => {
                let g = gradient_parameter_shift(circuit, hamiltonian, &params, &mut counter)?;
                let basis = match config.measurement.unwrap() {
                    MeasurementStrategy::Random {
                        family,
                        connectivity,
                        layers,
                    } => sample_random_measurement(family, connectivity, n, layers, iter_seed)?,
                    MeasurementStrategy::Computational => MeasurementBasis::computational(n)?,
                };
                let f = cfim(circuit, &basis, &params, config.prob_floor, &mut counter)?;
                (g, Some(f.entries), basis.label)
            }
            Method::StochasticCoordinateNaturalGradient => {
                let l = config.subset_size.unwrap_or((m + 1) / 2);
                let subset = sample_subset(m, l, iter_seed)?;
                let g = if config.subset_full_gradient {
                    gradient_parameter_shift(circuit, hamiltonian, &params, &mut counter)?
                } else {
                    gradient_parameter_shift_subset(
                        circuit,
                        hamiltonian,
                        &params,
                        &subset,
                        &mut counter,
                    )?
                };
                let f = reduced_qfim(circuit, &params, &subset, &mut counter)?;
                let label = format!(
                    "subset={}",
                    subset
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join("+")
                );
                (g, Some(f.entries), label)
            }
        };
        let step = compute_step(
            &gradient,
            info.as_ref(),
            config.learning_rate,
            config.pinv_cutoff,
            config.normalize_step,
        )?;
        for (p, s) in params.iter_mut().zip(step.iter()) {
            *p += s;
        }
        records.push(IterationRecord {
            iteration: k + 1,
            loss: hamiltonian.loss(&circuit.evaluate(&params)?)?,
            gradient_norm: gradient.dot(&gradient).sqrt(),
            step_norm: step.dot(&step).sqrt(),
            preparations: counter.total(),
            diagnostics,
        });
    }
    Ok(OptimizerRun {
        method: config.method,
        records,
        final_params: params,
        preparations: counter.total(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_ansatz, Gate};
    use crate::hamiltonian::{Pauli, PauliString};
    use crate::statevector::Axis;

    fn small_setup() -> (ParameterizedCircuit, PauliHamiltonian, Vec<f64>) {
        let spec = AnsatzSpec::new(AnsatzFamily::RyCz, 3, 1);
        let circuit = build_ansatz(&spec).unwrap();
        let theta0: Vec<f64> = (0..circuit.n_params())
            .map(|i| 0.4 + 0.5 * i as f64)
            .collect();
        let h = crate::problems::number_partitioning_hamiltonian(&[3, 5, 8]).unwrap();
        (circuit, h, theta0)
    }

    #[test]
    fn gd_converges_on_single_qubit() {
        let circuit = ParameterizedCircuit::new(
            1,
            vec![Gate::Rotation {
                axis: Axis::Y,
                qubit: 0,
                param: 0,
            }],
        )
        .unwrap();
        let h = PauliHamiltonian::new(
            1,
            vec![PauliString::from_sites(1, 1.0, &[(0, Pauli::Z)]).unwrap()],
            0.0,
        )
        .unwrap();
        let config = OptimizerConfig::new(Method::GradientDescent, 0.3, 60, 1);
        let run = run(&circuit, &h, &[2.0], &config).unwrap();
        assert_eq!(run.records.len(), 61);
        assert!((run.initial_loss() - (2.0f64).cos()).abs() < 1e-12);
        assert!(run.final_loss() < -0.999);
        assert_eq!(run.preparations, 60 * 2);
    }

    #[test]
    fn per_method_preparation_accounting() {
        let (circuit, h, theta0) = small_setup();
        let m = circuit.n_params() as u64;
        let k = 4u64;
        let gd = OptimizerConfig::new(Method::GradientDescent, 0.05, k as usize, 3);
        assert_eq!(run(&circuit, &h, &theta0, &gd).unwrap().preparations, k * 2 * m);
        let qng = OptimizerConfig::new(Method::QuantumNaturalGradient, 0.05, k as usize, 3);
        assert_eq!(
            run(&circuit, &h, &theta0, &qng).unwrap().preparations,
            k * (2 * m + 2 * m * (m + 1))
        );
        let mut rng_cfg = OptimizerConfig::new(Method::RandomNaturalGradient, 0.05, k as usize, 3);
        rng_cfg.measurement = Some(MeasurementStrategy::Random {
            family: AnsatzFamily::RyCz,
            connectivity: Connectivity::Ring,
            layers: 1,
        });
        assert_eq!(
            run(&circuit, &h, &theta0, &rng_cfg).unwrap().preparations,
            k * (4 * m + 1)
        );
        let mut sc = OptimizerConfig::new(
            Method::StochasticCoordinateNaturalGradient,
            0.05,
            k as usize,
            3,
        );
        sc.subset_size = Some(2);
        assert_eq!(
            run(&circuit, &h, &theta0, &sc).unwrap().preparations,
            k * (2 * 2 + 2 * 2 * 3)
        );
    }

    #[test]
    fn rng_runs_deterministically_per_seed() {
        let (circuit, h, theta0) = small_setup();
        let mut config = OptimizerConfig::new(Method::RandomNaturalGradient, 0.05, 5, 11);
        config.measurement = Some(MeasurementStrategy::Random {
            family: AnsatzFamily::RyCz,
            connectivity: Connectivity::Ring,
            layers: 1,
        });
        let a = run(&circuit, &h, &theta0, &config).unwrap();
        let b = run(&circuit, &h, &theta0, &config).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.loss.to_bits(), rb.loss.to_bits());
            assert_eq!(ra, rb);
        }
        let mut other = config.clone();
        other.seed = 12;
        let c = run(&circuit, &h, &theta0, &other).unwrap();
        assert_ne!(
            a.final_loss().to_bits(),
            c.final_loss().to_bits(),
            "different seeds should draw different bases"
        );
    }

    #[test]
    fn scqng_with_full_subset_matches_qng_bitwise() {
        let (circuit, h, theta0) = small_setup();
        let m = circuit.n_params();
        let qng = OptimizerConfig::new(Method::QuantumNaturalGradient, 0.05, 6, 21);
        let mut sc = OptimizerConfig::new(Method::StochasticCoordinateNaturalGradient, 0.05, 6, 21);
        sc.subset_size = Some(m);
        let a = run(&circuit, &h, &theta0, &qng).unwrap();
        let b = run(&circuit, &h, &theta0, &sc).unwrap();
        assert_eq!(a.preparations, b.preparations);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.loss.to_bits(), rb.loss.to_bits());
            assert_eq!(ra.gradient_norm.to_bits(), rb.gradient_norm.to_bits());
            assert_eq!(ra.step_norm.to_bits(), rb.step_norm.to_bits());
            assert_eq!(ra.preparations, rb.preparations);
        }
        for (pa, pb) in a.final_params.iter().zip(&b.final_params) {
            assert_eq!(pa.to_bits(), pb.to_bits());
        }
    }

    #[test]
    fn scqng_leaves_off_subset_coordinates_unchanged() {
        let (circuit, h, theta0) = small_setup();
        let mut config =
            OptimizerConfig::new(Method::StochasticCoordinateNaturalGradient, 0.05, 1, 33);
        config.subset_size = Some(2);
        let result = run(&circuit, &h, &theta0, &config).unwrap();
        let subset = sample_subset(circuit.n_params(), 2, crate::derive_seed(33, 0)).unwrap();
        for j in 0..circuit.n_params() {
            if !subset.contains(&j) {
                assert_eq!(result.final_params[j].to_bits(), theta0[j].to_bits());
            }
        }
    }

    #[test]
    fn compute_step_directions() {
        let g = Array1::from(vec![1.0, 1.0]);
        let step = compute_step(&g, None, 0.1, 1e-4, false).unwrap();
        assert_eq!(step.to_vec(), vec![-0.1, -0.1]);
        let mut f = Array2::zeros((2, 2));
        f[(0, 0)] = 2.0;
        f[(1, 1)] = 1e-6;
        let nat = compute_step(&g, Some(&f), 0.1, 1e-4, false).unwrap();
        assert_eq!(nat.to_vec(), vec![-0.05, -0.0]);
    }

    #[test]
    fn normalized_step_has_unit_metric_length() {
        let g = Array1::from(vec![0.3, -0.4]);
        let eta = 0.05;
        let step = compute_step(&g, None, eta, 1e-4, true).unwrap();
        assert!((step.dot(&step).sqrt() - eta).abs() < 1e-12);
        let mut f = Array2::zeros((2, 2));
        f[(0, 0)] = 4.0;
        f[(1, 1)] = 1.0;
        let nat = compute_step(&g, Some(&f), eta, 1e-4, true).unwrap();
        // |F^(1/2) step| should equal eta for a full-rank metric
        let metric_len = (4.0 * nat[0] * nat[0] + nat[1] * nat[1]).sqrt();
        assert!((metric_len - eta).abs() < 1e-12);
    }

    #[test]
    fn subset_sampling_canonical_and_uniform() {
        let s = sample_subset(10, 4, 7).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.iter().all(|&i| i < 10));
        assert_eq!(s, sample_subset(10, 4, 7).unwrap());
        assert_eq!(sample_subset(5, 5, 3).unwrap(), vec![0, 1, 2, 3, 4]);

        let draws = 50_000u64;
        let mut counts = std::collections::HashMap::new();
        for d in 0..draws {
            let s = sample_subset(5, 2, d).unwrap();
            *counts.entry((s[0], s[1])).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 10);
        for (&pair, &c) in &counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.1).abs() < 0.008, "pair {pair:?}: {freq}");
        }
    }

    #[test]
    fn coverage_probability_reference_values() {
        assert!((subset_coverage_probability(4, 2, 0).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!((subset_coverage_probability(5, 2, 1).unwrap() - 0.3).abs() < 1e-12);
        assert!((subset_coverage_probability(6, 2, 4).unwrap() - 1.0).abs() < 1e-12);
        assert!(subset_coverage_probability(5, 2, 4).is_err());
        assert!(subset_coverage_probability(5, 0, 1).is_err());
    }

    #[test]
    fn coverage_probability_matches_enumeration() {
        // m = 6, l = 2, k = 2: C(4, 2) / C(6, 4) = 6 / 15
        let p = subset_coverage_probability(6, 2, 2).unwrap();
        assert!((p - 0.4).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs_rejected() {
        let (circuit, h, theta0) = small_setup();
        let bad_eta = OptimizerConfig::new(Method::GradientDescent, 0.0, 3, 1);
        assert!(run(&circuit, &h, &theta0, &bad_eta).is_err());
        let rng_without_basis = OptimizerConfig::new(Method::RandomNaturalGradient, 0.05, 3, 1);
        assert!(run(&circuit, &h, &theta0, &rng_without_basis).is_err());
        let mut bad_subset =
            OptimizerConfig::new(Method::StochasticCoordinateNaturalGradient, 0.05, 3, 1);
        bad_subset.subset_size = Some(0);
        assert!(run(&circuit, &h, &theta0, &bad_subset).is_err());
    }

    #[test]
    fn method_string_round_trip() {
        for m in [
            Method::GradientDescent,
            Method::QuantumNaturalGradient,
            Method::RandomNaturalGradient,
            Method::StochasticCoordinateNaturalGradient,
        ] {
            let s = m.to_string();
            assert_eq!(s.parse::<Method>().unwrap(), m);
        }
        assert!("nope".parse::<Method>().is_err());
    }
}
