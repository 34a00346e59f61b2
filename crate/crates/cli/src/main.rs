//! Command-line harness: instance generation, benchmark campaigns, Fisher
//! analyses, and trace comparison.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use natgrad::circuit::{build_ansatz, AnsatzFamily, AnsatzSpec, Connectivity};
use natgrad::experiment::{
    distance_by_measurement_layers, draw_initial_parameters, load_json, rank_by_ansatz_layers,
    read_trace_csv, run_benchmark, save_json, three_way_convergence, write_trace_csv,
    ExperimentConfig, ProblemSpec,
};
use natgrad::{derive_seed, Result};

#[derive(Parser)]
#[command(
    name = "natgrad",
    version,
    about = "Natural-gradient optimizer benchmarks for variational quantum circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Maxcut,
    NumberPartitioning,
    Heisenberg,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random problem instance and write it as JSON
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 8)]
        qubits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random edge weights in (0, 1] instead of unit weights (maxcut)
        #[arg(long)]
        weighted: bool,
        /// Bond coupling (heisenberg)
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
        /// Transverse field (heisenberg)
        #[arg(long, default_value_t = 1.0)]
        field: f64,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a benchmark campaign described by a JSON config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for traces and the summary
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the campaign seed
        #[arg(long)]
        seed: Option<u64>,
        /// Keep only optimizers with this method (gd, qng, rng, scqng)
        #[arg(long)]
        method: Option<String>,
        /// Override every optimizer's learning rate
        #[arg(long)]
        eta: Option<f64>,
        /// Override every optimizer's iteration count
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Fisher-structure analyses: distance profiles by measurement depth,
    /// rank tables by ansatz depth, and a three-way convergence comparison
    /// on a Heisenberg chain
    Analyze {
        #[arg(long, default_value_t = 6)]
        qubits: usize,
        /// Ansatz depth; measurement depths sweep 1..=layers
        #[arg(long, default_value_t = 3)]
        layers: usize,
        /// Random bases per measurement depth
        #[arg(long, default_value_t = 50)]
        bases: usize,
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        #[arg(long, default_value_t = 60)]
        iters: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "analysis")]
        out: PathBuf,
    },
    /// Summarize existing trace CSVs side by side
    Compare {
        /// Trace CSV files written by `run` or `analyze`
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Optional JSON output path
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            kind,
            qubits,
            seed,
            weighted,
            coupling,
            field,
            out,
        } => generate(kind, qubits, seed, weighted, coupling, field, &out),
        Command::Run {
            config,
            out,
            seed,
            method,
            eta,
            iters,
        } => run(&config, &out, seed, method, eta, iters),
        Command::Analyze {
            qubits,
            layers,
            bases,
            eta,
            iters,
            seed,
            out,
        } => analyze(qubits, layers, bases, eta, iters, seed, &out),
        Command::Compare { traces, out } => compare(&traces, out.as_deref()),
    }
}

fn generate(
    kind: Kind,
    qubits: usize,
    seed: u64,
    weighted: bool,
    coupling: f64,
    field: f64,
    out: &Path,
) -> Result<()> {
    let spec = match kind {
        Kind::Maxcut => ProblemSpec::MaxCut {
            n_vertices: qubits,
            weighted,
        },
        Kind::NumberPartitioning => ProblemSpec::NumberPartitioning { n_numbers: qubits },
        Kind::Heisenberg => ProblemSpec::Heisenberg {
            n_sites: qubits,
            coupling,
            field,
        },
    };
    let instance = spec.realize(seed)?;
    std::fs::create_dir_all(out)?;
    let path = out.join(format!(
        "{}_n{}_seed{}.json",
        instance.kind_name(),
        instance.n_qubits(),
        seed
    ));
    save_json(&path, &instance)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(
    config_path: &Path,
    out: &Path,
    seed: Option<u64>,
    method: Option<String>,
    eta: Option<f64>,
    iters: Option<usize>,
) -> Result<()> {
    let mut config: ExperimentConfig = load_json(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(method) = method {
        let wanted = method.parse::<natgrad::optimize::Method>()?;
        config.optimizers.retain(|o| o.method == wanted);
    }
    for opt in &mut config.optimizers {
        if let Some(eta) = eta {
            opt.learning_rate = eta;
        }
        if let Some(iters) = iters {
            opt.iterations = iters;
        }
    }
    std::fs::create_dir_all(out)?;
    let report = run_benchmark(&config, Some(out))?;
    println!(
        "{} | {} instances | optimal energies {:?}",
        report.name,
        report.optimal_energies.len(),
        report.optimal_energies
    );
    println!(
        "{:<10} {:>14} {:>14} {:>12} {:>14}",
        "method", "mean_loss", "mean_rel_err", "mean_overlap", "mean_preps"
    );
    for agg in &report.aggregates {
        println!(
            "{:<10} {:>14.8} {:>14.8} {:>12.6} {:>14.1}",
            agg.method,
            agg.mean_final_loss,
            agg.mean_relative_error,
            agg.mean_overlap,
            agg.mean_preparations
        );
    }
    println!("summary: {}", out.join(format!("{}_summary.json", report.name)).display());
    Ok(())
}

fn analyze(
    qubits: usize,
    layers: usize,
    bases: usize,
    eta: f64,
    iters: usize,
    seed: u64,
    out: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let family = AnsatzFamily::RyRzCnot;
    let connectivity = Connectivity::Ring;
    let ansatz = AnsatzSpec::new(family, qubits, layers);
    let circuit = build_ansatz(&ansatz)?;
    let theta = draw_initial_parameters(circuit.n_params(), derive_seed(seed, 101));
    let layer_counts: Vec<usize> = (1..=layers).collect();

    let distances = distance_by_measurement_layers(
        &circuit,
        &theta,
        family,
        connectivity,
        &layer_counts,
        bases,
        derive_seed(seed, 1),
    )?;
    save_json(&out.join("distance_by_layers.json"), &distances)?;
    println!("{:<18} {:>12} {:>12}", "measurement_layers", "mean_dist", "std_dev");
    for p in &distances {
        println!(
            "{:<18} {:>12.6} {:>12.6}",
            p.measurement_layers, p.mean, p.std_dev
        );
    }

    let ranks = rank_by_ansatz_layers(
        family,
        connectivity,
        qubits,
        &layer_counts,
        1e-8,
        derive_seed(seed, 2),
    )?;
    save_json(&out.join("rank_by_layers.json"), &ranks)?;
    println!(
        "{:<14} {:>8} {:>10} {:>10} {:>12}",
        "ansatz_layers", "params", "rank_qfim", "rank_z", "rank_random"
    );
    for r in &ranks {
        println!(
            "{:<14} {:>8} {:>10} {:>10} {:>12}",
            r.ansatz_layers, r.n_params, r.rank_qfim, r.rank_cfim_z, r.rank_cfim_random
        );
    }

    let runs = three_way_convergence(qubits, 1.0, 1.0, &ansatz, eta, iters, derive_seed(seed, 3))?;
    println!("{:<12} {:>14} {:>14} {:>12}", "method", "initial_loss", "final_loss", "preps");
    for (label, run) in &runs {
        let path = out.join(format!("convergence_{label}.csv"));
        write_trace_csv(&path, &run.records)?;
        println!(
            "{:<12} {:>14.8} {:>14.8} {:>12}",
            label,
            run.initial_loss(),
            run.final_loss(),
            run.preparations
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceSummary {
    file: String,
    iterations: usize,
    initial_loss: f64,
    final_loss: f64,
    best_loss: f64,
    preparations: u64,
}

fn compare(traces: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let mut summaries = Vec::with_capacity(traces.len());
    println!(
        "{:<40} {:>6} {:>14} {:>14} {:>14} {:>12}",
        "trace", "iters", "initial_loss", "final_loss", "best_loss", "preps"
    );
    for path in traces {
        let records = read_trace_csv(path)?;
        if records.is_empty() {
            return Err(natgrad::Error::InvalidArgument(format!(
                "{} holds no records",
                path.display()
            )));
        }
        let best_loss = records.iter().map(|r| r.loss).fold(f64::INFINITY, f64::min);
        let last = records.last().unwrap();
        let summary = TraceSummary {
            file: path.display().to_string(),
            iterations: last.iteration,
            initial_loss: records[0].loss,
            final_loss: last.loss,
            best_loss,
            preparations: last.preparations,
        };
        println!(
            "{:<40} {:>6} {:>14.8} {:>14.8} {:>14.8} {:>12}",
            summary.file,
            summary.iterations,
            summary.initial_loss,
            summary.final_loss,
            summary.best_loss,
            summary.preparations
        );
        summaries.push(summary);
    }
    if let Some(path) = out {
        save_json(path, &summaries)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
