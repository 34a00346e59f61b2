//! Parameterized circuits, hardware-efficient ansatz builders, and random
//! measurement bases.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Axis, Statevector, MAX_QUBITS};

/// One circuit element: a parameterized Pauli rotation or a fixed entangler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    Rotation { axis: Axis, qubit: usize, param: usize },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
}

/// Gate list over a fixed qubit count with a dense parameter index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterizedCircuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl ParameterizedCircuit {
    /// Validates qubit bounds and that parameter indices cover `[0, m)` with
    /// no gaps.
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut max_param = None;
        for gate in &gates {
            let qubits: [usize; 2] = match *gate {
                Gate::Rotation { qubit, param, .. } => {
                    max_param = Some(max_param.map_or(param, |m: usize| m.max(param)));
                    [qubit, qubit]
                }
                Gate::Cnot { control, target } => {
                    if control == target {
                        return Err(Error::InvalidArgument(
                            "CNOT control and target must differ".into(),
                        ));
                    }
                    [control, target]
                }
                Gate::Cz { a, b } => {
                    if a == b {
                        return Err(Error::InvalidArgument("CZ qubits must differ".into()));
                    }
                    [a, b]
                }
            };
            for q in qubits {
                if q >= n_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        n_qubits,
                    });
                }
            }
        }
        let n_params = max_param.map_or(0, |m| m + 1);
        let mut seen = vec![false; n_params];
        for gate in &gates {
            if let Gate::Rotation { param, .. } = gate {
                seen[*param] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "parameter index {missing} is never used"
            )));
        }
        Ok(Self {
            n_qubits,
            n_params,
            gates,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Applies the circuit to `state` in place.
    pub fn apply(&self, state: &mut Statevector, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::ParameterCount {
                expected: self.n_params,
                actual: params.len(),
            });
        }
        for gate in &self.gates {
            match *gate {
                Gate::Rotation { axis, qubit, param } => {
                    state.apply_rotation(axis, qubit, params[param])
                }
                Gate::Cnot { control, target } => state.apply_cnot(control, target),
                Gate::Cz { a, b } => state.apply_cz(a, b),
            }
        }
        Ok(())
    }

    /// Prepares `U(params)|0...0>`.
    pub fn evaluate(&self, params: &[f64]) -> Result<Statevector> {
        let mut state = Statevector::new(self.n_qubits)?;
        self.apply(&mut state, params)?;
        Ok(state)
    }

    /// Prepares the state with `shift` added to parameter `param`.
    pub fn evaluate_shifted(&self, params: &[f64], param: usize, shift: f64) -> Result<Statevector> {
        let mut shifted = params.to_vec();
        shifted[param] += shift;
        self.evaluate(&shifted)
    }
}

/// Ansatz family, named for its rotation block and entangling gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzFamily {
    /// Per layer: Ry then a second rotation on every qubit, then a CNOT block.
    RyRzCnot,
    /// Initial Ry column, then per layer a CZ block followed by a Ry column.
    RyCz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    /// Nearest-neighbour pairs with wrap-around to qubit 0.
    Ring,
    /// Every pair (i, j), i < j, in lexicographic order.
    AllToAll,
}

/// Ansatz description; `second_axis` selects the second rotation of the
/// RyRzCnot family (Z by default, X as the variant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub family: AnsatzFamily,
    pub n_qubits: usize,
    pub layers: usize,
    #[serde(default = "default_connectivity")]
    pub connectivity: Connectivity,
    #[serde(default = "default_second_axis")]
    pub second_axis: Axis,
}

fn default_connectivity() -> Connectivity {
    Connectivity::Ring
}

fn default_second_axis() -> Axis {
    Axis::Z
}

impl AnsatzSpec {
    pub fn new(family: AnsatzFamily, n_qubits: usize, layers: usize) -> Self {
        Self {
            family,
            n_qubits,
            layers,
            connectivity: Connectivity::Ring,
            second_axis: Axis::Z,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::InvalidArgument(
                "ansatz needs at least 2 qubits".into(),
            ));
        }
        if self.n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: self.n_qubits,
                max: MAX_QUBITS,
            });
        }
        if self.layers == 0 {
            return Err(Error::InvalidArgument("ansatz needs at least 1 layer".into()));
        }
        Ok(())
    }
}

/// Parameter count of the ansatz: `2 n p` for RyRzCnot, `(p + 1) n` for RyCz.
pub fn param_count(spec: &AnsatzSpec) -> usize {
    match spec.family {
        AnsatzFamily::RyRzCnot => 2 * spec.n_qubits * spec.layers,
        AnsatzFamily::RyCz => (spec.layers + 1) * spec.n_qubits,
    }
}

/// Entangled qubit pairs in circuit order.
///
/// Ring order for CNOT blocks follows the circuit diagram: even-offset pairs,
/// then odd-offset pairs, then the wrap-around pair. The degenerate n = 2
/// ring has a single pair.
fn entangler_pairs(n: usize, connectivity: Connectivity, staircase: bool) -> Vec<(usize, usize)> {
    match connectivity {
        Connectivity::AllToAll => {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push((i, j));
                }
            }
            pairs
        }
        Connectivity::Ring => {
            if n == 2 {
                return vec![(0, 1)];
            }
            if staircase {
                let mut pairs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
                pairs.push((n - 1, 0));
                pairs
            } else {
                let mut pairs: Vec<_> = (0..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
                pairs.extend((1..n - 1).step_by(2).map(|i| (i, i + 1)));
                pairs.push((n - 1, 0));
                pairs
            }
        }
    }
}

/// Builds the hardware-efficient ansatz for `spec`; parameter indices are
/// assigned sequentially in gate order.
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<ParameterizedCircuit> {
    spec.validate()?;
    let n = spec.n_qubits;
    let mut gates = Vec::new();
    let mut param = 0;
    let mut rotation = |gates: &mut Vec<Gate>, axis: Axis, qubit: usize| {
        gates.push(Gate::Rotation {
            axis,
            qubit,
            param,
        });
        param += 1;
    };
    match spec.family {
        AnsatzFamily::RyRzCnot => {
            for _ in 0..spec.layers {
                for q in 0..n {
                    rotation(&mut gates, Axis::Y, q);
                    rotation(&mut gates, spec.second_axis, q);
                }
                for (c, t) in entangler_pairs(n, spec.connectivity, false) {
                    gates.push(Gate::Cnot {
                        control: c,
                        target: t,
                    });
                }
            }
        }
        AnsatzFamily::RyCz => {
            for q in 0..n {
                rotation(&mut gates, Axis::Y, q);
            }
            for _ in 0..spec.layers {
                for (a, b) in entangler_pairs(n, spec.connectivity, true) {
                    gates.push(Gate::Cz { a, b });
                }
                for q in 0..n {
                    rotation(&mut gates, Axis::Y, q);
                }
            }
        }
    }
    let circuit = ParameterizedCircuit::new(n, gates)?;
    debug_assert_eq!(circuit.n_params(), param_count(spec));
    Ok(circuit)
}

/// Measurement basis: a fixed unitary applied before sampling in the
/// computational basis. An empty circuit is the computational basis itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub circuit: ParameterizedCircuit,
    pub angles: Vec<f64>,
    pub label: String,
}

impl MeasurementBasis {
    /// Computational (Z) basis; applies nothing, so probabilities pass
    /// through bit for bit.
    pub fn computational(n_qubits: usize) -> Result<Self> {
        Ok(Self {
            circuit: ParameterizedCircuit::new(n_qubits, Vec::new())?,
            angles: Vec::new(),
            label: "computational".into(),
        })
    }

    pub fn is_computational(&self) -> bool {
        self.circuit.gates().is_empty()
    }

    /// Outcome distribution of `state` measured in this basis.
    pub fn probabilities(&self, state: &Statevector) -> Result<Vec<f64>> {
        if state.n_qubits() != self.circuit.n_qubits() {
            return Err(Error::QubitCountMismatch {
                left: state.n_qubits(),
                right: self.circuit.n_qubits(),
            });
        }
        if self.is_computational() {
            return Ok(state.probabilities());
        }
        let mut rotated = state.clone();
        self.circuit.apply(&mut rotated, &self.angles)?;
        Ok(rotated.probabilities())
    }
}

/// Draws a random measurement basis: the ansatz architecture of
/// `(family, connectivity)` with every rotation axis uniform over {X, Y, Z}
/// and angles i.i.d. uniform on `[0, 2pi)`. Deterministic per seed.
pub fn sample_random_measurement(
    family: AnsatzFamily,
    connectivity: Connectivity,
    n_qubits: usize,
    layers: usize,
    seed: u64,
) -> Result<MeasurementBasis> {
    let spec = AnsatzSpec {
        family,
        n_qubits,
        layers,
        connectivity,
        second_axis: Axis::Z,
    };
    let template = build_ansatz(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gates = template
        .gates()
        .iter()
        .map(|gate| match *gate {
            Gate::Rotation { qubit, param, .. } => {
                let axis = match rng.gen_range(0..3) {
                    0 => Axis::X,
                    1 => Axis::Y,
                    _ => Axis::Z,
                };
                Gate::Rotation { axis, qubit, param }
            }
            fixed => fixed,
        })
        .collect();
    let circuit = ParameterizedCircuit::new(n_qubits, gates)?;
    let angles = (0..circuit.n_params())
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    Ok(MeasurementBasis {
        circuit,
        angles,
        label: format!("random(seed={seed}, layers={layers})"),
    })
}
