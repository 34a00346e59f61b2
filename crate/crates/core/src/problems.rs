//! Benchmark problem instances: MaxCut, number partitioning, and the
//! Heisenberg chain, plus seeded random instance generation.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Pauli, PauliHamiltonian, PauliString};

/// One benchmark instance, self-describing and serializable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemInstance {
    MaxCut {
        n_vertices: usize,
        /// Edges as (u, v, weight) with u < v, sorted lexicographically.
        edges: Vec<(usize, usize, f64)>,
    },
    NumberPartitioning {
        numbers: Vec<u64>,
    },
    Heisenberg {
        n_sites: usize,
        coupling: f64,
        field: f64,
    },
}

impl ProblemInstance {
    pub fn n_qubits(&self) -> usize {
        match self {
            ProblemInstance::MaxCut { n_vertices, .. } => *n_vertices,
            ProblemInstance::NumberPartitioning { numbers } => numbers.len(),
            ProblemInstance::Heisenberg { n_sites, .. } => *n_sites,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        !matches!(self, ProblemInstance::Heisenberg { .. })
    }

    /// Short tag used in output file names.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ProblemInstance::MaxCut { .. } => "maxcut",
            ProblemInstance::NumberPartitioning { .. } => "number_partitioning",
            ProblemInstance::Heisenberg { .. } => "heisenberg",
        }
    }

    pub fn hamiltonian(&self) -> Result<PauliHamiltonian> {
        match self {
            ProblemInstance::MaxCut { n_vertices, edges } => {
                maxcut_hamiltonian(*n_vertices, edges)
            }
            ProblemInstance::NumberPartitioning { numbers } => {
                number_partitioning_hamiltonian(numbers)
            }
            ProblemInstance::Heisenberg {
                n_sites,
                coupling,
                field,
            } => heisenberg_hamiltonian(*n_sites, *coupling, *field),
        }
    }
}

/// MaxCut cost Hamiltonian: for each edge a term (w/2) Z_u Z_v, with offset
/// -sum(w/2). Its diagonal at bitstring b is minus the cut weight of b.
pub fn maxcut_hamiltonian(n_vertices: usize, edges: &[(usize, usize, f64)]) -> Result<PauliHamiltonian> {
    if n_vertices < 2 {
        return Err(Error::InvalidArgument("MaxCut needs at least 2 vertices".into()));
    }
    let mut terms = Vec::with_capacity(edges.len());
    let mut offset = 0.0;
    for &(u, v, w) in edges {
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
        }
        if w <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "edge ({u}, {v}) has non-positive weight {w}"
            )));
        }
        terms.push(PauliString::from_sites(
            n_vertices,
            w / 2.0,
            &[(u, Pauli::Z), (v, Pauli::Z)],
        )?);
        offset -= w / 2.0;
    }
    PauliHamiltonian::new(n_vertices, terms, offset)
}

/// Cut weight of the bipartition encoded by bitstring `b` (bit q = side of
/// vertex q).
pub fn cut_weight(edges: &[(usize, usize, f64)], b: usize) -> f64 {
    let mut total = 0.0;
    for &(u, v, w) in edges {
        if (b >> u) & 1 != (b >> v) & 1 {
            total += w;
        }
    }
    total
}

/// Number partitioning Hamiltonian: sum over ordered pairs i != j of
/// n_i n_j Z_i Z_j (each unordered pair twice) plus the constant sum of
/// n_i^2. Its diagonal at b is the squared signed-sum (sum_i s_i n_i)^2.
pub fn number_partitioning_hamiltonian(numbers: &[u64]) -> Result<PauliHamiltonian> {
    let n = numbers.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "number partitioning needs at least 2 numbers".into(),
        ));
    }
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let coeff = 2.0 * (numbers[i] as f64) * (numbers[j] as f64);
            terms.push(PauliString::from_sites(
                n,
                coeff,
                &[(i, Pauli::Z), (j, Pauli::Z)],
            )?);
        }
    }
    let offset: f64 = numbers.iter().map(|&x| (x * x) as f64).sum();
    PauliHamiltonian::new(n, terms, offset)
}

/// Signed-sum residue (sum_i s_i n_i)^2 for bitstring `b`, in exact integer
/// arithmetic.
pub fn partition_residue_squared(numbers: &[u64], b: usize) -> i64 {
    let mut signed = 0i64;
    for (i, &x) in numbers.iter().enumerate() {
        if (b >> i) & 1 == 0 {
            signed += x as i64;
        } else {
            signed -= x as i64;
        }
    }
    signed * signed
}

/// Heisenberg XXX open chain: J * sum_i (XX + YY + ZZ) on neighbouring
/// sites plus a transverse field h * sum_i X_i.
pub fn heisenberg_hamiltonian(n_sites: usize, coupling: f64, field: f64) -> Result<PauliHamiltonian> {
    if n_sites < 2 {
        return Err(Error::InvalidArgument(
            "Heisenberg chain needs at least 2 sites".into(),
        ));
    }
    let mut terms = Vec::new();
    for i in 0..n_sites - 1 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            terms.push(PauliString::from_sites(
                n_sites,
                coupling,
                &[(i, p), (i + 1, p)],
            )?);
        }
    }
    if field != 0.0 {
        for i in 0..n_sites {
            terms.push(PauliString::from_sites(n_sites, field, &[(i, Pauli::X)])?);
        }
    }
    PauliHamiltonian::new(n_sites, terms, 0.0)
}

/// Uniform random d-regular simple graph via the pairing model with
/// rejection; edges come back normalized (u < v) and sorted.
pub fn random_regular_graph(n: usize, degree: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if degree >= n {
        return Err(Error::InvalidArgument(format!(
            "degree {degree} needs more than {n} vertices"
        )));
    }
    if n * degree % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "no {degree}-regular graph on {n} vertices exists"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree)).collect();
    for _attempt in 0..10_000 {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * degree / 2);
        let mut simple = true;
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v {
                simple = false;
                break;
            }
            edges.push((u, v));
        }
        if simple {
            edges.sort_unstable();
            if edges.windows(2).all(|w| w[0] != w[1]) {
                return Ok(edges);
            }
        }
    }
    Err(Error::InvalidArgument(
        "pairing model failed to produce a simple graph".into(),
    ))
}

/// Random 3-regular MaxCut instance; weights are i.i.d. uniform on (0, 1]
/// when `weighted`, otherwise all 1.
pub fn random_maxcut(n_vertices: usize, weighted: bool, seed: u64) -> Result<ProblemInstance> {
    let edges = random_regular_graph(n_vertices, 3, seed)?;
    // weight stream continues after the graph draw for a single-seed instance
    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, 1));
    let edges = edges
        .into_iter()
        .map(|(u, v)| {
            let w = if weighted { 1.0 - rng.gen::<f64>() } else { 1.0 };
            (u, v, w)
        })
        .collect();
    Ok(ProblemInstance::MaxCut {
        n_vertices,
        edges,
    })
}

/// Random number-partitioning instance with integers uniform on [1, 25].
pub fn random_number_partitioning(n_numbers: usize, seed: u64) -> Result<ProblemInstance> {
    if n_numbers < 2 {
        return Err(Error::InvalidArgument(
            "number partitioning needs at least 2 numbers".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let numbers = (0..n_numbers).map(|_| rng.gen_range(1..=25)).collect();
    Ok(ProblemInstance::NumberPartitioning { numbers })
}
