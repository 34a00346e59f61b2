//! Benchmark campaigns: instance realization, shared-initialization runs
//! across optimizers, trace files, and Fisher-structure analyses.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as IoWrite};
use std::path::Path;

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::circuit::{
    build_ansatz, sample_random_measurement, AnsatzFamily, AnsatzSpec, Connectivity,
    MeasurementBasis, ParameterizedCircuit,
};
use crate::error::{Error, Result};
use crate::fisher::{cfim, fisher_distance, qfim_exact, ResourceCounter, DEFAULT_PROB_FLOOR};
use crate::hamiltonian::GroundInfo;
use crate::optimize::{
    self, IterationRecord, MeasurementStrategy, Method, OptimizerConfig, OptimizerRun,
};
use crate::problems::{
    heisenberg_hamiltonian, random_maxcut, random_number_partitioning, ProblemInstance,
};
use crate::statevector::Statevector;
use crate::{derive_seed, linalg};

/// Seed streams. Instance content, initial angles, and per-optimizer runs
/// draw from disjoint streams of the campaign seed.
const THETA_STREAM: u64 = 101;
const OPTIMIZER_STREAM_BASE: u64 = 200;

fn default_coupling() -> f64 {
    1.0
}

fn default_degeneracy_tol() -> f64 {
    1e-9
}

/// Recipe for drawing problem instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    MaxCut {
        n_vertices: usize,
        #[serde(default)]
        weighted: bool,
    },
    NumberPartitioning {
        n_numbers: usize,
    },
    Heisenberg {
        n_sites: usize,
        #[serde(default = "default_coupling")]
        coupling: f64,
        #[serde(default = "default_coupling")]
        field: f64,
    },
}

impl ProblemSpec {
    pub fn n_qubits(&self) -> usize {
        match self {
            ProblemSpec::MaxCut { n_vertices, .. } => *n_vertices,
            ProblemSpec::NumberPartitioning { n_numbers } => *n_numbers,
            ProblemSpec::Heisenberg { n_sites, .. } => *n_sites,
        }
    }

    /// Draws a concrete instance. Heisenberg chains are deterministic, so
    /// the seed only matters for the random kinds.
    pub fn realize(&self, seed: u64) -> Result<ProblemInstance> {
        match self {
            ProblemSpec::MaxCut {
                n_vertices,
                weighted,
            } => random_maxcut(*n_vertices, *weighted, seed),
            ProblemSpec::NumberPartitioning { n_numbers } => {
                random_number_partitioning(*n_numbers, seed)
            }
            ProblemSpec::Heisenberg {
                n_sites,
                coupling,
                field,
            } => Ok(ProblemInstance::Heisenberg {
                n_sites: *n_sites,
                coupling: *coupling,
                field: *field,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub instances: usize,
    pub problem: ProblemSpec,
    pub ansatz: AnsatzSpec,
    pub optimizers: Vec<OptimizerConfig>,
    #[serde(default = "default_degeneracy_tol")]
    pub degeneracy_tol: f64,
}

/// Per-run metrics for one (instance, optimizer) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub instance: usize,
    pub method: String,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub best_loss: f64,
    pub relative_error: f64,
    /// True when the optimal energy is zero and `relative_error` holds the
    /// absolute error instead.
    pub absolute_error_fallback: bool,
    pub overlap: f64,
    pub iterations: usize,
    pub preparations: u64,
    pub trace_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub method: String,
    pub instances: usize,
    pub mean_final_loss: f64,
    pub mean_relative_error: f64,
    pub mean_overlap: f64,
    pub mean_preparations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub name: String,
    pub seed: u64,
    pub optimal_energies: Vec<f64>,
    pub runs: Vec<RunSummary>,
    pub aggregates: Vec<AggregateSummary>,
}

/// Probability of finding the optimum in the final state: summed ground-set
/// probability for diagonal problems, fidelity with the exact ground state
/// otherwise.
pub fn overlap_with_optimal(state: &Statevector, ground: &GroundInfo) -> Result<f64> {
    let value = match &ground.state {
        Some(ground_state) => state.fidelity(ground_state)?,
        None => {
            if ground.indices.is_empty() {
                return Err(Error::InvalidArgument(
                    "ground set is empty for a diagonal problem".into(),
                ));
            }
            let probs = state.probabilities();
            ground.indices.iter().map(|&i| probs[i]).sum()
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// (loss - e_opt) / |e_opt|, falling back to the absolute error (flagged
/// true) when the optimum is zero.
pub fn relative_error(loss: f64, e_opt: f64) -> (f64, bool) {
    if e_opt.abs() > 1e-12 {
        ((loss - e_opt) / e_opt.abs(), false)
    } else {
        ((loss - e_opt).abs(), true)
    }
}

/// Unique per-optimizer labels: the method name, suffixed with the config
/// position when a method appears more than once.
fn method_labels(optimizers: &[OptimizerConfig]) -> Vec<String> {
    let names: Vec<String> = optimizers.iter().map(|o| o.method.to_string()).collect();
    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            if names.iter().filter(|n| *n == name).count() > 1 {
                format!("{name}-{i}")
            } else {
                name.clone()
            }
        })
        .collect()
}

fn trace_file_name(instance: &ProblemInstance, seed: u64, label: &str) -> String {
    format!(
        "{}_n{}_seed{}_{}.csv",
        instance.kind_name(),
        instance.n_qubits(),
        seed,
        label
    )
}

/// Initial angles, uniform on [0, 2pi)^m.
pub fn draw_initial_parameters(m: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
        .collect()
}

pub fn write_trace_csv(path: &Path, records: &[IterationRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for record in records {
        writer
            .serialize(record)
            .map_err(|e| Error::InvalidArgument(format!("csv write failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidArgument(format!("csv flush failed: {e}")))?;
    Ok(())
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<IterationRecord>> {
    let mut reader = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let mut records = Vec::new();
    for row in reader.deserialize() {
        records.push(row.map_err(|e| Error::InvalidArgument(format!("csv read failed: {e}")))?);
    }
    Ok(records)
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let reader = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(reader)?)
}

/// Runs every configured optimizer on every instance from a shared initial
/// point per instance. Per-run seeds derive from the campaign seed, the
/// instance index, and the optimizer position; the seed field on the
/// individual optimizer configs is ignored. With an output directory, each
/// run's trace lands in a CSV file and the report in
/// `<name>_summary.json`.
pub fn run_benchmark(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<BenchmarkReport> {
    if config.instances == 0 {
        return Err(Error::InvalidArgument("need at least one instance".into()));
    }
    if config.optimizers.is_empty() {
        return Err(Error::InvalidArgument("need at least one optimizer".into()));
    }
    config.ansatz.validate()?;
    if config.ansatz.n_qubits != config.problem.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: config.ansatz.n_qubits,
            right: config.problem.n_qubits(),
        });
    }
    let circuit = build_ansatz(&config.ansatz)?;
    let labels = method_labels(&config.optimizers);
    let mut optimal_energies = Vec::with_capacity(config.instances);
    let mut runs = Vec::new();
    for inst in 0..config.instances {
        let instance_seed = derive_seed(config.seed, inst as u64);
        let instance = config.problem.realize(instance_seed)?;
        let hamiltonian = instance.hamiltonian()?;
        let ground = hamiltonian.exact_ground(config.degeneracy_tol)?;
        optimal_energies.push(ground.energy);
        let theta0 =
            draw_initial_parameters(circuit.n_params(), derive_seed(instance_seed, THETA_STREAM));
        for (oi, base) in config.optimizers.iter().enumerate() {
            let mut opt = base.clone();
            opt.seed = derive_seed(instance_seed, OPTIMIZER_STREAM_BASE + oi as u64);
            if opt.method == Method::RandomNaturalGradient && opt.measurement.is_none() {
                opt.measurement = Some(MeasurementStrategy::default_for(&config.ansatz));
            }
            let run = optimize::run(&circuit, &hamiltonian, &theta0, &opt)?;
            let final_state = circuit.evaluate(&run.final_params)?;
            let overlap = overlap_with_optimal(&final_state, &ground)?;
            let (rel_err, fallback) = relative_error(run.final_loss(), ground.energy);
            let best_loss = run
                .records
                .iter()
                .map(|r| r.loss)
                .fold(f64::INFINITY, f64::min);
            let trace_file = match out_dir {
                Some(dir) => {
                    let name = trace_file_name(&instance, instance_seed, &labels[oi]);
                    write_trace_csv(&dir.join(&name), &run.records)?;
                    Some(name)
                }
                None => None,
            };
            runs.push(RunSummary {
                instance: inst,
                method: labels[oi].clone(),
                initial_loss: run.initial_loss(),
                final_loss: run.final_loss(),
                best_loss,
                relative_error: rel_err,
                absolute_error_fallback: fallback,
                overlap,
                iterations: opt.iterations,
                preparations: run.preparations,
                trace_file,
            });
        }
    }
    let mut aggregates = Vec::with_capacity(labels.len());
    for label in &labels {
        let group: Vec<&RunSummary> = runs.iter().filter(|r| &r.method == label).collect();
        let count = group.len() as f64;
        aggregates.push(AggregateSummary {
            method: label.clone(),
            instances: group.len(),
            mean_final_loss: group.iter().map(|r| r.final_loss).sum::<f64>() / count,
            mean_relative_error: group.iter().map(|r| r.relative_error).sum::<f64>() / count,
            mean_overlap: group.iter().map(|r| r.overlap).sum::<f64>() / count,
            mean_preparations: group.iter().map(|r| r.preparations as f64).sum::<f64>() / count,
        });
    }
    let report = BenchmarkReport {
        name: config.name.clone(),
        seed: config.seed,
        optimal_energies,
        runs,
        aggregates,
    };
    if let Some(dir) = out_dir {
        save_json(&dir.join(format!("{}_summary.json", config.name)), &report)?;
    }
    Ok(report)
}

/// Frobenius distances of sampled classical Fisher matrices from half the
/// quantum one, grouped by measurement-circuit depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub measurement_layers: usize,
    pub distances: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
}

pub fn distance_by_measurement_layers(
    circuit: &ParameterizedCircuit,
    theta: &[f64],
    family: AnsatzFamily,
    connectivity: Connectivity,
    layer_counts: &[usize],
    bases_per_layer: usize,
    seed: u64,
) -> Result<Vec<DistanceProfile>> {
    if bases_per_layer == 0 {
        return Err(Error::InvalidArgument("need at least one basis".into()));
    }
    let fq = qfim_exact(circuit, theta)?;
    let mut profiles = Vec::with_capacity(layer_counts.len());
    for (li, &layers) in layer_counts.iter().enumerate() {
        let mut distances = Vec::with_capacity(bases_per_layer);
        for b in 0..bases_per_layer {
            let basis_seed = derive_seed(seed, (li * bases_per_layer + b) as u64);
            let basis = sample_random_measurement(
                family,
                connectivity,
                circuit.n_qubits(),
                layers,
                basis_seed,
            )?;
            let mut scratch = ResourceCounter::new();
            let fc = cfim(circuit, &basis, theta, DEFAULT_PROB_FLOOR, &mut scratch)?;
            distances.push(fisher_distance(&fc.entries, &fq.entries)?);
        }
        let mean = distances.iter().sum::<f64>() / distances.len() as f64;
        let var = if distances.len() > 1 {
            distances.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>()
                / (distances.len() - 1) as f64
        } else {
            0.0
        };
        profiles.push(DistanceProfile {
            measurement_layers: layers,
            distances,
            mean,
            std_dev: var.sqrt(),
        });
    }
    Ok(profiles)
}

/// Fisher ranks at a random point for one ansatz depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankProfile {
    pub ansatz_layers: usize,
    pub n_params: usize,
    pub rank_qfim: usize,
    pub rank_cfim_z: usize,
    pub rank_cfim_random: usize,
}

pub fn rank_by_ansatz_layers(
    family: AnsatzFamily,
    connectivity: Connectivity,
    n_qubits: usize,
    layer_counts: &[usize],
    rank_tol: f64,
    seed: u64,
) -> Result<Vec<RankProfile>> {
    let mut profiles = Vec::with_capacity(layer_counts.len());
    for &layers in layer_counts {
        let spec = AnsatzSpec {
            family,
            n_qubits,
            layers,
            connectivity,
            second_axis: crate::statevector::Axis::Z,
        };
        let circuit = build_ansatz(&spec)?;
        let theta =
            draw_initial_parameters(circuit.n_params(), derive_seed(seed, layers as u64));
        let fq = qfim_exact(&circuit, &theta)?;
        let mut scratch = ResourceCounter::new();
        let z_basis = MeasurementBasis::computational(n_qubits)?;
        let fc_z = cfim(&circuit, &z_basis, &theta, DEFAULT_PROB_FLOOR, &mut scratch)?;
        let random_basis = sample_random_measurement(
            family,
            connectivity,
            n_qubits,
            layers.saturating_sub(1).max(1),
            derive_seed(seed, 1000 + layers as u64),
        )?;
        let fc_r = cfim(
            &circuit,
            &random_basis,
            &theta,
            DEFAULT_PROB_FLOOR,
            &mut scratch,
        )?;
        profiles.push(RankProfile {
            ansatz_layers: layers,
            n_params: circuit.n_params(),
            rank_qfim: linalg::rank_tol(&fq.entries, rank_tol)?,
            rank_cfim_z: linalg::rank_tol(&fc_z.entries, rank_tol)?,
            rank_cfim_random: linalg::rank_tol(&fc_r.entries, rank_tol)?,
        });
    }
    Ok(profiles)
}

/// Convergence comparison on a Heisenberg chain: random-basis natural
/// gradient, quantum natural gradient, and fixed computational-basis
/// natural gradient, all from one initial point.
pub fn three_way_convergence(
    n_sites: usize,
    coupling: f64,
    field: f64,
    ansatz: &AnsatzSpec,
    eta: f64,
    iterations: usize,
    seed: u64,
) -> Result<Vec<(String, OptimizerRun)>> {
    if ansatz.n_qubits != n_sites {
        return Err(Error::QubitCountMismatch {
            left: ansatz.n_qubits,
            right: n_sites,
        });
    }
    let hamiltonian = heisenberg_hamiltonian(n_sites, coupling, field)?;
    let circuit = build_ansatz(ansatz)?;
    let theta0 = draw_initial_parameters(circuit.n_params(), derive_seed(seed, THETA_STREAM));
    let mut runs = Vec::with_capacity(3);
    let mut rng_cfg = OptimizerConfig::new(
        Method::RandomNaturalGradient,
        eta,
        iterations,
        derive_seed(seed, OPTIMIZER_STREAM_BASE),
    );
    rng_cfg.measurement = Some(MeasurementStrategy::default_for(ansatz));
    runs.push((
        "rng".to_string(),
        optimize::run(&circuit, &hamiltonian, &theta0, &rng_cfg)?,
    ));
    let qng_cfg = OptimizerConfig::new(
        Method::QuantumNaturalGradient,
        eta,
        iterations,
        derive_seed(seed, OPTIMIZER_STREAM_BASE + 1),
    );
    runs.push((
        "qng".to_string(),
        optimize::run(&circuit, &hamiltonian, &theta0, &qng_cfg)?,
    ));
    let mut z_cfg = OptimizerConfig::new(
        Method::RandomNaturalGradient,
        eta,
        iterations,
        derive_seed(seed, OPTIMIZER_STREAM_BASE + 2),
    );
    z_cfg.measurement = Some(MeasurementStrategy::Computational);
    runs.push((
        "zbasis_ng".to_string(),
        optimize::run(&circuit, &hamiltonian, &theta0, &z_cfg)?,
    ));
    Ok(runs)
}
