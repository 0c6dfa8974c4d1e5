//! Pair probes: quasi-concurrence and the mutual-information probe `Fr`,
//! plus the spin-flip machinery they share with the Wootters concurrence.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    entropy_bits, hermitian_eigensystem, subsets, ComplexMatrix, DensityMatrix, StateVector, C64,
};
use crate::states::State;

/// Eigenvalues of `ρ` at or below this are dropped from its support before
/// the spin-flip spectrum is formed.
pub const SUPPORT_CUTOFF: f64 = 1e-14;
/// Eigenvalues of `√ρ ρ̃ √ρ` at or below this are set to zero; their square
/// roots (below ~3e-8) are not resolvable in double precision.
pub const FLIP_SPECTRUM_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeKind {
    QuasiConcurrence,
    MutualInfoFr,
}

impl ProbeKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ProbeKind::QuasiConcurrence => "qc",
            ProbeKind::MutualInfoFr => "fr",
        }
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ProbeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "qc" | "quasi-concurrence" => Ok(ProbeKind::QuasiConcurrence),
            "fr" | "mutual-info" => Ok(ProbeKind::MutualInfoFr),
            other => Err(format!("unknown probe `{other}` (expected `fr` or `qc`)")),
        }
    }
}

/// Square roots of the eigenvalues of `ρ ρ̃`, descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtEigenvalues(pub [f64; 4]);

impl SqrtEigenvalues {
    pub fn lambda(&self) -> [f64; 4] {
        self.0
    }
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() != 2 {
        return Err(Error::QubitCountMismatch {
            expected: 2,
            found: rho.n_qubits(),
        });
    }
    Ok(())
}

/// `σ2 ⊗ σ2` is real: `|00> ↔ −|11>`, `|01> ↔ |10>`.
fn sigma_yy() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// `ρ̃ = (σ2 ⊗ σ2) ρ̄ (σ2 ⊗ σ2)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_two_qubits(rho)?;
    let yy = sigma_yy();
    Ok(yy.mul(&rho.matrix().conj()).mul(&yy))
}

/// `λ_i = sqrt(eig(√ρ ρ̃ √ρ))`, descending.
///
/// With `ρ = W W†`, `W = V √P` over the support of `ρ`, the matrix
/// `√ρ ρ̃ √ρ = V (W† ρ̃ W) V†`, so the spectrum is taken from the
/// `rank × rank` block `W† ρ̃ W`.
pub fn sqrt_spectrum(rho: &DensityMatrix) -> Result<SqrtEigenvalues> {
    let flipped = spin_flip(rho)?;
    let eig = rho.eigensystem();
    let support: Vec<usize> = (0..4).filter(|&k| eig.values[k] > SUPPORT_CUTOFF).collect();
    let r = support.len();
    // columns of W
    let w: Vec<Vec<C64>> = support
        .iter()
        .map(|&k| {
            let s = eig.values[k].sqrt();
            eig.vectors.column(k).into_iter().map(|z| z * s).collect()
        })
        .collect();
    let fw: Vec<Vec<C64>> = w.iter().map(|col| flipped.apply(col)).collect();
    let mut block = ComplexMatrix::zeros(r);
    for i in 0..r {
        for j in 0..r {
            block[(i, j)] = w[i].iter().zip(&fw[j]).map(|(a, b)| a.conj() * b).sum();
        }
    }
    let mut lambda = [0.0; 4];
    if r > 0 {
        let mu = hermitian_eigensystem(&block.hermitian_part())?.values;
        for (slot, m) in lambda.iter_mut().zip(mu) {
            *slot = if m > FLIP_SPECTRUM_CUTOFF {
                m.sqrt()
            } else {
                0.0
            };
        }
    }
    Ok(SqrtEigenvalues(lambda))
}

/// `Q_C = λ1 + λ2 − λ3 − λ4`.
pub fn quasi_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let [l1, l2, l3, l4] = sqrt_spectrum(rho)?.0;
    Ok(l1 + l2 - l3 - l4)
}

/// `C = max{0, λ1 − λ2 − λ3 − λ4}`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let [l1, l2, l3, l4] = sqrt_spectrum(rho)?.0;
    Ok((l1 - l2 - l3 - l4).max(0.0))
}

/// `2|α0 β1 − α1 β0|` of a pure two-qubit state.
pub fn pure_concurrence(psi: &StateVector) -> Result<f64> {
    if psi.n_qubits() != 2 {
        return Err(Error::QubitCountMismatch {
            expected: 2,
            found: psi.n_qubits(),
        });
    }
    let a = psi.amplitudes();
    Ok(2.0 * (a[0] * a[3] - a[1] * a[2]).norm())
}

fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

/// Entanglement of formation from the Wootters concurrence, in bits.
pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64> {
    let c = wootters_concurrence(rho)?.min(1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0))
}

/// `Fr = ½ (S(ρ_A) + S(ρ_B) − S(ρ_AB))`, in bits.
pub fn fr_probe(rho_ab: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho_ab)?;
    let sa = rho_ab.partial_trace(&[0])?.von_neumann_entropy();
    let sb = rho_ab.partial_trace(&[1])?.von_neumann_entropy();
    let sab = rho_ab.von_neumann_entropy();
    Ok((0.5 * (sa + sb - sab)).max(0.0))
}

pub fn probe_value(probe: ProbeKind, rho_ab: &DensityMatrix) -> Result<f64> {
    match probe {
        ProbeKind::QuasiConcurrence => quasi_concurrence(rho_ab),
        ProbeKind::MutualInfoFr => fr_probe(rho_ab),
    }
}

/// Anything that can hand out two-qubit reductions.
pub trait PairReductions: Sync {
    fn n_qubits(&self) -> usize;
    fn pair_reduction(&self, a: usize, b: usize) -> Result<DensityMatrix>;
}

impl PairReductions for StateVector {
    fn n_qubits(&self) -> usize {
        StateVector::n_qubits(self)
    }

    fn pair_reduction(&self, a: usize, b: usize) -> Result<DensityMatrix> {
        self.reduced(&[a, b])
    }
}

impl PairReductions for DensityMatrix {
    fn n_qubits(&self) -> usize {
        DensityMatrix::n_qubits(self)
    }

    fn pair_reduction(&self, a: usize, b: usize) -> Result<DensityMatrix> {
        self.partial_trace(&[a, b])
    }
}

impl PairReductions for State {
    fn n_qubits(&self) -> usize {
        State::n_qubits(self)
    }

    fn pair_reduction(&self, a: usize, b: usize) -> Result<DensityMatrix> {
        match self {
            State::Pure(psi) => psi.pair_reduction(a, b),
            State::Mixed(rho) => rho.pair_reduction(a, b),
        }
    }
}

/// Probe values for every unordered qubit pair `a < b`, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairProbeMatrix {
    n_qubits: usize,
    probe: ProbeKind,
    values: Vec<f64>,
}

impl PairProbeMatrix {
    /// Wraps precomputed values in lexicographic pair order.
    pub fn from_values(n_qubits: usize, probe: ProbeKind, values: Vec<f64>) -> Result<Self> {
        let expected = n_qubits * n_qubits.saturating_sub(1) / 2;
        if n_qubits < 2 || values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n_qubits,
            probe,
            values,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probe(&self) -> ProbeKind {
        self.probe
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pair_count(&self) -> usize {
        self.values.len()
    }

    fn slot(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let n = self.n_qubits;
        a * (2 * n - a - 1) / 2 + (b - a - 1)
    }

    /// `P(a, b)`; symmetric in its arguments.
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        (a != b && a < self.n_qubits && b < self.n_qubits).then(|| self.values[self.slot(a, b)])
    }

    /// `(a, b, P(a, b))` with `a < b`, lexicographic.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        subsets(self.n_qubits, 2)
            .into_iter()
            .zip(&self.values)
            .map(|(ab, &v)| (ab[0], ab[1], v))
    }
}

/// Applies `probe` to every pair reduction. Pairs are evaluated in parallel
/// and assembled in lexicographic order.
pub fn pair_probe_matrix<R: PairReductions + ?Sized>(
    state: &R,
    probe: ProbeKind,
) -> Result<PairProbeMatrix> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
            range: "[2, ∞)",
        });
    }
    let values = subsets(n, 2)
        .par_iter()
        .map(|ab| probe_value(probe, &state.pair_reduction(ab[0], ab[1])?))
        .collect::<Result<Vec<f64>>>()?;
    PairProbeMatrix::from_values(n, probe, values)
}
