//! Pauli-string Hamiltonians: expectation values, diagonal energies, and
//! exact ground-state data.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::statevector::Statevector;

/// Dense diagonalization is quadratic in state size; past 14 qubits it is
/// out of reach.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl std::fmt::Display for Pauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pauli::I => write!(f, "I"),
            Pauli::X => write!(f, "X"),
            Pauli::Y => write!(f, "Y"),
            Pauli::Z => write!(f, "Z"),
        }
    }
}

/// Real-weighted tensor product of single-qubit Paulis; index q of `paulis`
/// acts on qubit q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub coefficient: f64,
    pub paulis: Vec<Pauli>,
}

impl PauliString {
    pub fn new(coefficient: f64, paulis: Vec<Pauli>) -> Self {
        Self {
            coefficient,
            paulis,
        }
    }

    /// String that is identity everywhere except the listed qubit sites.
    pub fn from_sites(n_qubits: usize, coefficient: f64, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut paulis = vec![Pauli::I; n_qubits];
        for &(q, p) in sites {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits,
                });
            }
            paulis[q] = p;
        }
        Ok(Self {
            coefficient,
            paulis,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.paulis.len()
    }

    pub fn is_diagonal(&self) -> bool {
        self.paulis.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    /// Bit masks used by application and expectation: qubits flipped (X, Y),
    /// qubits contributing a (-1)^bit sign (Y, Z), and the Y count.
    fn masks(&self) -> (usize, usize, u32) {
        let mut xmask = 0usize;
        let mut sign_mask = 0usize;
        let mut y_count = 0u32;
        for (q, p) in self.paulis.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => xmask |= 1 << q,
                Pauli::Y => {
                    xmask |= 1 << q;
                    sign_mask |= 1 << q;
                    y_count += 1;
                }
                Pauli::Z => sign_mask |= 1 << q,
            }
        }
        (xmask, sign_mask, y_count)
    }

    /// `<state| c P |state>`; Hermitian, so the imaginary residue is pure
    /// rounding and is checked before being dropped.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::QubitCountMismatch {
                left: state.n_qubits(),
                right: self.n_qubits(),
            });
        }
        let (xmask, sign_mask, y_count) = self.masks();
        let amps = state.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, amp) in amps.iter().enumerate() {
            let signed = if (i & sign_mask).count_ones() % 2 == 0 {
                *amp
            } else {
                -amp
            };
            acc += amps[i ^ xmask].conj() * signed;
        }
        let phase = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let value = phase * acc * self.coefficient;
        debug_assert!(
            value.im.abs() < 1e-10 * (1.0 + self.coefficient.abs()),
            "expectation of a Hermitian term must be real, got {value}"
        );
        Ok(value.re)
    }
}

/// Weighted sum of Pauli strings plus a scalar offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliString>,
    offset: f64,
}

/// Exact spectral data at the bottom of the spectrum. Diagonal Hamiltonians
/// report the degenerate set of minimizing basis states; others report one
/// ground eigenvector.
#[derive(Debug, Clone)]
pub struct GroundInfo {
    pub energy: f64,
    pub indices: Vec<usize>,
    pub state: Option<Statevector>,
}

impl PauliHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<PauliString>, offset: f64) -> Result<Self> {
        for term in &terms {
            if term.n_qubits() != n_qubits {
                return Err(Error::QubitCountMismatch {
                    left: n_qubits,
                    right: term.n_qubits(),
                });
            }
        }
        Ok(Self {
            n_qubits,
            terms,
            offset,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.is_diagonal())
    }

    /// `<state| H |state>`, accumulated in term order with the offset last.
    pub fn loss(&self, state: &Statevector) -> Result<f64> {
        let mut acc = 0.0;
        for term in &self.terms {
            acc += term.expectation(state)?;
        }
        Ok(acc + self.offset)
    }

    /// All 2^n diagonal entries; only defined when every term is diagonal.
    pub fn diagonal_energies(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::InvalidArgument(
                "diagonal energies require a diagonal Hamiltonian".into(),
            ));
        }
        let dim = 1usize << self.n_qubits;
        let masks: Vec<(f64, usize)> = self
            .terms
            .iter()
            .map(|t| {
                let (_, sign_mask, _) = t.masks();
                (t.coefficient, sign_mask)
            })
            .collect();
        let mut energies = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut acc = 0.0;
            for &(c, mask) in &masks {
                if (i & mask).count_ones() % 2 == 0 {
                    acc += c;
                } else {
                    acc -= c;
                }
            }
            energies.push(acc + self.offset);
        }
        Ok(energies)
    }

    /// Dense matrix of the Hamiltonian, row-major over basis indices.
    pub fn dense_matrix(&self) -> Result<Vec<Complex64>> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                n: self.n_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
        for term in &self.terms {
            let (xmask, sign_mask, y_count) = term.masks();
            let phase = match y_count % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            for col in 0..dim {
                let row = col ^ xmask;
                let sign = if (col & sign_mask).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                matrix[row * dim + col] += phase * (term.coefficient * sign);
            }
        }
        for i in 0..dim {
            matrix[i * dim + i] += self.offset;
        }
        Ok(matrix)
    }

    /// Smallest eigenvalue and its eigenspace data. Diagonal Hamiltonians
    /// are scanned directly; `degeneracy_tol` widens the reported ground
    /// set. Non-diagonal ones go through dense diagonalization via the
    /// standard real symmetric embedding of a Hermitian matrix.
    pub fn exact_ground(&self, degeneracy_tol: f64) -> Result<GroundInfo> {
        if self.is_diagonal() {
            let energies = self.diagonal_energies()?;
            let energy = energies.iter().cloned().fold(f64::INFINITY, f64::min);
            let indices = energies
                .iter()
                .enumerate()
                .filter(|(_, &e)| e <= energy + degeneracy_tol)
                .map(|(i, _)| i)
                .collect();
            return Ok(GroundInfo {
                energy,
                indices,
                state: None,
            });
        }
        let dim = 1usize << self.n_qubits;
        let matrix = self.dense_matrix()?;
        // H = A + iB embeds as [[A, -B], [B, A]]; eigenvalues double up and
        // an eigenvector [x; y] of the embedding gives x + iy for H.
        let mut embedded = Array2::zeros((2 * dim, 2 * dim));
        for r in 0..dim {
            for c in 0..dim {
                let entry = matrix[r * dim + c];
                embedded[(r, c)] = entry.re;
                embedded[(dim + r, dim + c)] = entry.re;
                embedded[(r, dim + c)] = -entry.im;
                embedded[(dim + r, c)] = entry.im;
            }
        }
        let decomp = linalg::eigh(&embedded)?;
        let last = 2 * dim - 1;
        let energy = decomp.eigenvalues[last];
        let mut amps = Vec::with_capacity(dim);
        for k in 0..dim {
            amps.push(Complex64::new(
                decomp.eigenvectors[(k, last)],
                decomp.eigenvectors[(dim + k, last)],
            ));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Ok(GroundInfo {
            energy,
            indices: Vec::new(),
            state: Some(Statevector::from_amplitudes(amps)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::Axis;
    use rand::Rng;
    use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn single(n: usize, q: usize, p: Pauli) -> PauliString {
        PauliString::from_sites(n, 1.0, &[(q, p)]).unwrap()
    }

    #[test]
    fn z_expectation_is_cos_theta() {
        let mut sv = Statevector::new(1).unwrap();
        sv.apply_rotation(Axis::Y, 0, FRAC_PI_3);
        let z = single(1, 0, Pauli::Z);
        assert!((z.expectation(&sv).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn x_expectation_on_plus_state() {
        let mut sv = Statevector::new(1).unwrap();
        sv.apply_hadamard(0);
        let x = single(1, 0, Pauli::X);
        assert!((x.expectation(&sv).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn y_expectation_after_rx() {
        let mut sv = Statevector::new(1).unwrap();
        sv.apply_rotation(Axis::X, 0, FRAC_PI_2);
        let y = single(1, 0, Pauli::Y);
        assert!((y.expectation(&sv).unwrap() + 1.0).abs() < 1e-12);
    }

    /// Dense-matrix oracle: expectation must match the quadratic form of the
    /// Kronecker-product matrix.
    #[test]
    fn expectation_matches_dense_oracle() {
        fn pauli_matrix(p: Pauli) -> [[Complex64; 2]; 2] {
            let zero = Complex64::new(0.0, 0.0);
            let one = Complex64::new(1.0, 0.0);
            let i = Complex64::new(0.0, 1.0);
            match p {
                Pauli::I => [[one, zero], [zero, one]],
                Pauli::X => [[zero, one], [one, zero]],
                Pauli::Y => [[zero, -i], [i, zero]],
                Pauli::Z => [[one, zero], [zero, -one]],
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = rng.gen_range(1..=5);
            let dim = 1usize << n;
            let mut sv = Statevector::new(n).unwrap();
            for q in 0..n {
                sv.apply_rotation(Axis::Y, q, rng.gen_range(0.0..6.0));
                sv.apply_rotation(Axis::X, q, rng.gen_range(0.0..6.0));
                if n > 1 {
                    sv.apply_cnot(q, (q + 1) % n);
                }
            }
            let paulis: Vec<Pauli> = (0..n)
                .map(|_| match rng.gen_range(0..4) {
                    0 => Pauli::I,
                    1 => Pauli::X,
                    2 => Pauli::Y,
                    _ => Pauli::Z,
                })
                .collect();
            let coeff = rng.gen_range(-2.0..2.0);
            let string = PauliString::new(coeff, paulis.clone());
            // dense = P(n-1) kron ... kron P(0) for little-endian indexing
            let mut dense = vec![Complex64::new(0.0, 0.0); dim * dim];
            for r in 0..dim {
                for c in 0..dim {
                    let mut v = Complex64::new(coeff, 0.0);
                    for (q, p) in paulis.iter().enumerate() {
                        let m = pauli_matrix(*p);
                        v *= m[(r >> q) & 1][(c >> q) & 1];
                    }
                    dense[r * dim + c] = v;
                }
            }
            let amps = sv.amplitudes();
            let mut expected = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                for c in 0..dim {
                    expected += amps[r].conj() * dense[r * dim + c] * amps[c];
                }
            }
            let got = string.expectation(&sv).unwrap();
            assert!(
                (got - expected.re).abs() < 1e-10,
                "{got} vs {}",
                expected.re
            );
        }
    }

    #[test]
    fn loss_sums_terms_and_offset() {
        let mut sv = Statevector::new(2).unwrap();
        sv.apply_rotation(Axis::Y, 0, FRAC_PI_3);
        let h = PauliHamiltonian::new(
            2,
            vec![
                PauliString::from_sites(2, 2.0, &[(0, Pauli::Z)]).unwrap(),
                PauliString::from_sites(2, 1.0, &[(1, Pauli::Z)]).unwrap(),
            ],
            -0.25,
        )
        .unwrap();
        // 2 cos(pi/3) + 1 - 0.25
        assert!((h.loss(&sv).unwrap() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn diagonal_energies_match_signs() {
        let h = PauliHamiltonian::new(
            2,
            vec![PauliString::from_sites(2, 0.5, &[(0, Pauli::Z), (1, Pauli::Z)]).unwrap()],
            -0.5,
        )
        .unwrap();
        let e = h.diagonal_energies().unwrap();
        assert_eq!(e, vec![0.0, -1.0, -1.0, 0.0]);
    }

    #[test]
    fn diagonal_energies_reject_off_diagonal_terms() {
        let h = PauliHamiltonian::new(1, vec![single(1, 0, Pauli::X)], 0.0).unwrap();
        assert!(h.diagonal_energies().is_err());
    }

    #[test]
    fn exact_ground_diagonal_single_edge() {
        let h = PauliHamiltonian::new(
            2,
            vec![PauliString::from_sites(2, 0.5, &[(0, Pauli::Z), (1, Pauli::Z)]).unwrap()],
            -0.5,
        )
        .unwrap();
        let g = h.exact_ground(1e-9).unwrap();
        assert_eq!(g.energy, -1.0);
        assert_eq!(g.indices, vec![1, 2]);
        assert!(g.state.is_none());
    }

    #[test]
    fn exact_ground_heisenberg_two_sites() {
        // XX + YY + ZZ on two qubits: singlet at -3, triplet at +1.
        let terms = vec![
            PauliString::from_sites(2, 1.0, &[(0, Pauli::X), (1, Pauli::X)]).unwrap(),
            PauliString::from_sites(2, 1.0, &[(0, Pauli::Y), (1, Pauli::Y)]).unwrap(),
            PauliString::from_sites(2, 1.0, &[(0, Pauli::Z), (1, Pauli::Z)]).unwrap(),
        ];
        let h = PauliHamiltonian::new(2, terms, 0.0).unwrap();
        let g = h.exact_ground(1e-9).unwrap();
        assert!((g.energy + 3.0).abs() < 1e-9);
        let state = g.state.unwrap();
        // singlet (|01> - |10>)/sqrt(2) up to phase
        let amps = state.amplitudes();
        assert!(amps[0].norm() < 1e-8);
        assert!(amps[3].norm() < 1e-8);
        assert!((amps[1].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert!((amps[1] + amps[2]).norm() < 1e-8);
        // eigenvector residual check against the dense matrix
        let dense = h.dense_matrix().unwrap();
        for r in 0..4 {
            let mut hv = Complex64::new(0.0, 0.0);
            for c in 0..4 {
                hv += dense[r * 4 + c] * amps[c];
            }
            assert!((hv - amps[r] * g.energy).norm() < 1e-8);
        }
    }

    #[test]
    fn exact_ground_matches_loss_at_ground_state() {
        let terms = vec![
            PauliString::from_sites(3, 0.7, &[(0, Pauli::X), (1, Pauli::X)]).unwrap(),
            PauliString::from_sites(3, 0.7, &[(1, Pauli::Z), (2, Pauli::Z)]).unwrap(),
            PauliString::from_sites(3, -0.4, &[(0, Pauli::Y)]).unwrap(),
            PauliString::from_sites(3, 0.3, &[(2, Pauli::X)]).unwrap(),
        ];
        let h = PauliHamiltonian::new(3, terms, 0.1).unwrap();
        let g = h.exact_ground(1e-9).unwrap();
        let state = g.state.unwrap();
        assert!((h.loss(&state).unwrap() - g.energy).abs() < 1e-8);
    }

    #[test]
    fn hamiltonian_serde_round_trip() {
        let h = PauliHamiltonian::new(
            2,
            vec![PauliString::from_sites(2, 0.5, &[(0, Pauli::Z), (1, Pauli::Z)]).unwrap()],
            -0.5,
        )
        .unwrap();
        let json = serde_json::to_string(&h).unwrap();
        let back: PauliHamiltonian = serde_json::from_str(&json).unwrap();
        assert_eq!(h, back);
    }
}
