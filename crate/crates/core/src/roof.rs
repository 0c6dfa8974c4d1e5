//! Convex-roof extension of the pair-averaged measures to mixed states.
//!
//! Decompositions of `ρ = Σ λ_j |e_j><e_j|` are parametrized by `k × r`
//! isometries `u`: `ψ̃_i = Σ_j u_ij √λ_j |e_j>`, `p_i = ‖ψ̃_i‖²`. The
//! decomposition-averaged measure is minimized by an adaptive coordinate
//! search over the real and imaginary parts of `u`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, StateVector, C64};
use crate::measures::{arithmetic_measure, geometric_measure};
use crate::probes::{
    entanglement_of_formation, pair_probe_matrix, pure_concurrence, wootters_concurrence, ProbeKind,
};

/// Eigenvalues of `ρ` above this span its support.
pub const RANK_CUTOFF: f64 = 1e-10;
pub const ISOMETRY_TOL: f64 = 1e-8;
pub const MAX_ROOF_QUBITS: usize = 4;
pub const DEFAULT_BUDGET: usize = 20_000;
pub const DEFAULT_RESTARTS: usize = 8;
/// Agreement with the two-qubit closed form needed to label a value exact.
pub const ORACLE_CONFIRM_TOL: f64 = 2e-3;

const INITIAL_STEP: f64 = 0.25;
const MAX_STEP: f64 = 1.0;
const MIN_STEP: f64 = 1e-8;
const WEIGHT_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Average {
    Arithmetic,
    Geometric,
}

impl fmt::Display for Average {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Average::Arithmetic => "arithmetic",
            Average::Geometric => "geometric",
        })
    }
}

impl FromStr for Average {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "arithmetic" | "m" => Ok(Average::Arithmetic),
            "geometric" | "g" => Ok(Average::Geometric),
            other => Err(format!(
                "unknown average `{other}` (expected `arithmetic` or `geometric`)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Best value found; the true roof may be lower.
    UpperBound,
    /// Two-qubit value matching the Wootters closed form.
    WoottersConfirmed,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::UpperBound => "roof-upper-bound",
            BoundKind::WoottersConfirmed => "wootters-confirmed",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A `k × r` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Isometry {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// `[I_r; 0]`.
    pub fn padded_identity(rows: usize, cols: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); rows * cols];
        for j in 0..cols.min(rows) {
            data[j * cols + j] = C64::new(1.0, 0.0);
        }
        Self { rows, cols, data }
    }

    /// Haar-random isometry: Gaussian entries orthonormalized column by column.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        loop {
            let data = (0..rows * cols)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let mut u = Self { rows, cols, data };
            if u.orthonormalize() {
                return u;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    /// `max |u†u − I|`.
    pub fn defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.cols {
            for b in 0..self.cols {
                let g: C64 = (0..self.rows)
                    .map(|i| self.get(i, a).conj() * self.get(i, b))
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Modified Gram-Schmidt on the columns (the `Q` of a thin QR).
    /// Returns false if a column collapses.
    fn orthonormalize(&mut self) -> bool {
        let (k, r) = (self.rows, self.cols);
        for j in 0..r {
            for prev in 0..j {
                let dot: C64 = (0..k)
                    .map(|i| self.data[i * r + prev].conj() * self.data[i * r + j])
                    .sum();
                for i in 0..k {
                    let d = self.data[i * r + prev] * dot;
                    self.data[i * r + j] -= d;
                }
            }
            let norm = (0..k)
                .map(|i| self.data[i * r + j].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if norm.is_nan() || norm <= 1e-8 {
                return false;
            }
            for i in 0..k {
                self.data[i * r + j] /= norm;
            }
        }
        true
    }

    fn param(&self, idx: usize) -> f64 {
        let z = self.data[idx / 2];
        if idx.is_multiple_of(2) {
            z.re
        } else {
            z.im
        }
    }

    fn set_param(&mut self, idx: usize, value: f64) {
        let z = &mut self.data[idx / 2];
        if idx.is_multiple_of(2) {
            z.re = value;
        } else {
            z.im = value;
        }
    }

    fn param_count(&self) -> usize {
        2 * self.data.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    pub states: Vec<StateVector>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `Σ p_i |ψ_i><ψ_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.states[0].dim();
        let mut acc = ComplexMatrix::zeros(dim);
        for (p, psi) in self.weights.iter().zip(&self.states) {
            acc = acc.add(&ComplexMatrix::outer(psi.amplitudes()).scale(C64::new(*p, 0.0)));
        }
        acc
    }
}

/// Eigen-support of a density matrix: `√λ_j e_j` for `λ_j > 1e-10`.
#[derive(Debug, Clone)]
struct Support {
    n_qubits: usize,
    scaled: Vec<Vec<C64>>,
}

impl Support {
    fn of(rho: &DensityMatrix) -> Result<Self> {
        let eig = rho.eigensystem();
        let scaled: Vec<Vec<C64>> = (0..rho.dim())
            .filter(|&j| eig.values[j] > RANK_CUTOFF)
            .map(|j| {
                let s = eig.values[j].sqrt();
                eig.vectors.column(j).into_iter().map(|z| z * s).collect()
            })
            .collect();
        if scaled.is_empty() {
            return Err(Error::ZeroRank);
        }
        Ok(Self {
            n_qubits: rho.n_qubits(),
            scaled,
        })
    }

    fn rank(&self) -> usize {
        self.scaled.len()
    }

    /// `(p_i, ψ̃_i / √p_i)` for every row of `u` with non-negligible weight.
    fn elements(&self, u: &Isometry) -> impl Iterator<Item = (f64, StateVector)> + '_ {
        let dim = 1usize << self.n_qubits;
        let r = self.rank();
        let u = u.clone();
        (0..u.rows).filter_map(move |i| {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            for j in 0..r {
                let c = u.get(i, j);
                for (slot, e) in v.iter_mut().zip(&self.scaled[j]) {
                    *slot += c * e;
                }
            }
            let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            (p > WEIGHT_FLOOR).then(|| {
                let s = p.sqrt();
                v.iter_mut().for_each(|z| *z /= s);
                (p, StateVector::from_parts_unchecked(self.n_qubits, v))
            })
        })
    }
}

pub fn decomposition_from_isometry(rho: &DensityMatrix, u: &Isometry) -> Result<Decomposition> {
    let support = Support::of(rho)?;
    let r = support.rank();
    if u.cols != r || u.rows < r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: u.cols,
        });
    }
    let defect = u.defect();
    if defect > ISOMETRY_TOL {
        return Err(Error::NotIsometry(defect));
    }
    let (weights, states) = support.elements(u).unzip();
    Ok(Decomposition { weights, states })
}

/// Pure-state `M` or `G` for the given probe.
pub fn pure_measure(psi: &StateVector, probe: ProbeKind, average: Average) -> Result<f64> {
    if psi.n_qubits() == 2 {
        // single pair, normalization 1: both averages equal the pair value
        return match probe {
            ProbeKind::QuasiConcurrence => pure_concurrence(psi),
            ProbeKind::MutualInfoFr => Ok(psi.reduced(&[0])?.von_neumann_entropy()),
        };
    }
    let pm = pair_probe_matrix(psi, probe)?;
    Ok(match average {
        Average::Arithmetic => arithmetic_measure(&pm),
        Average::Geometric => geometric_measure(&pm),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofOptions {
    pub probe: ProbeKind,
    pub average: Average,
    /// Objective evaluations per local search.
    pub budget: usize,
    /// Local searches per decomposition size.
    pub restarts: usize,
    pub seed: u64,
    /// Largest decomposition size tried; defaults to `min(2r, r²)`.
    pub k_max: Option<usize>,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            probe: ProbeKind::QuasiConcurrence,
            average: Average::Arithmetic,
            budget: DEFAULT_BUDGET,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            k_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofResult {
    pub value: f64,
    pub best: Decomposition,
    /// Independent local searches run, over all decomposition sizes.
    pub restarts_used: usize,
    /// The winning search stopped on step size rather than budget.
    pub converged: bool,
    pub k: usize,
    pub bound_kind: BoundKind,
    /// Value of the eigendecomposition itself.
    pub initial_value: f64,
}

/// One objective evaluation, as seen by an observer.
pub struct RoofStep<'a> {
    pub k: usize,
    pub restart: usize,
    pub value: f64,
    pub isometry: &'a Isometry,
}

struct Search {
    value: f64,
    u: Isometry,
    converged: bool,
}

struct Objective<'a> {
    support: &'a Support,
    probe: ProbeKind,
    average: Average,
}

impl Objective<'_> {
    fn eval(&self, u: &Isometry) -> Result<f64> {
        let mut acc = 0.0;
        for (p, psi) in self.support.elements(u) {
            acc += p * pure_measure(&psi, self.probe, self.average)?;
        }
        Ok(acc)
    }
}

fn local_search(
    obj: &Objective<'_>,
    start: Isometry,
    budget: usize,
    observe: &dyn Fn(&Isometry, f64),
) -> Result<Search> {
    let mut u = start;
    let mut value = obj.eval(&u)?;
    observe(&u, value);
    let mut used = 1;
    let n = u.param_count();
    let mut steps = vec![INITIAL_STEP; n];
    let mut converged = false;
    'outer: while used < budget {
        if steps.iter().all(|&s| s < MIN_STEP) {
            converged = true;
            break;
        }
        for (idx, step) in steps.iter_mut().enumerate() {
            if *step < MIN_STEP {
                continue;
            }
            let mut improved = false;
            for sign in [1.0, -1.0] {
                if used >= budget {
                    break 'outer;
                }
                let mut trial = u.clone();
                trial.set_param(idx, u.param(idx) + sign * *step);
                if !trial.orthonormalize() {
                    continue;
                }
                let v = obj.eval(&trial)?;
                used += 1;
                observe(&trial, v);
                if v < value {
                    u = trial;
                    value = v;
                    improved = true;
                    break;
                }
            }
            *step = if improved {
                (*step * 2.0).min(MAX_STEP)
            } else {
                *step * 0.5
            };
        }
    }
    Ok(Search {
        value,
        u,
        converged,
    })
}

fn restart_rng(seed: u64, k: usize, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | restart as u64);
    rng
}

pub fn roof_measure(rho: &DensityMatrix, options: &RoofOptions) -> Result<RoofResult> {
    roof_measure_observed(rho, options, &|_| {})
}

/// As [`roof_measure`], reporting every evaluated decomposition to `observer`.
/// The observer is called from worker threads.
pub fn roof_measure_observed(
    rho: &DensityMatrix,
    options: &RoofOptions,
    observer: &(dyn Fn(RoofStep<'_>) + Sync),
) -> Result<RoofResult> {
    let n = rho.n_qubits();
    if n > MAX_ROOF_QUBITS {
        return Err(Error::ParameterOutOfRange {
            name: "n_qubits",
            value: n as f64,
            range: "[1, 4]",
        });
    }
    if options.budget == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "budget",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    if options.restarts == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "restarts",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let support = Support::of(rho)?;
    let r = support.rank();
    let k_max = options.k_max.unwrap_or((2 * r).min(r * r));
    if k_max < r {
        return Err(Error::ParameterOutOfRange {
            name: "k_max",
            value: k_max as f64,
            range: "[rank, ∞)",
        });
    }
    let obj = Objective {
        support: &support,
        probe: options.probe,
        average: options.average,
    };
    let eigen = Isometry::padded_identity(r, r);
    let initial_value = obj.eval(&eigen)?;
    observer(RoofStep {
        k: r,
        restart: 0,
        value: initial_value,
        isometry: &eigen,
    });

    let runs: Vec<(usize, usize)> = if r == 1 {
        // every decomposition of a pure state is the state itself
        Vec::new()
    } else {
        (r..=k_max)
            .flat_map(|k| (0..options.restarts).map(move |i| (k, i)))
            .collect()
    };
    let results = runs
        .par_iter()
        .map(|&(k, restart)| {
            let start = if restart == 0 {
                Isometry::padded_identity(k, r)
            } else {
                Isometry::random(k, r, &mut restart_rng(options.seed, k, restart))
            };
            let observe = |u: &Isometry, value: f64| {
                observer(RoofStep {
                    k,
                    restart,
                    value,
                    isometry: u,
                })
            };
            local_search(&obj, start, options.budget, &observe).map(|s| (k, s))
        })
        .collect::<Result<Vec<_>>>()?;

    // ties keep the earliest run, in (k, restart) order
    let mut best: Option<(usize, Search)> = None;
    for (k, s) in results {
        if best.as_ref().is_none_or(|(_, b)| s.value < b.value) {
            best = Some((k, s));
        }
    }
    let (k, search) = match best {
        Some((k, s)) if s.value <= initial_value => (k, s),
        _ => (
            r,
            Search {
                value: initial_value,
                u: eigen,
                converged: true,
            },
        ),
    };
    let (weights, states) = support.elements(&search.u).unzip();
    let bound_kind = match two_qubit_oracle(rho, options.probe)? {
        Some(exact) if (search.value - exact).abs() <= ORACLE_CONFIRM_TOL => {
            BoundKind::WoottersConfirmed
        }
        _ => BoundKind::UpperBound,
    };
    Ok(RoofResult {
        value: search.value,
        best: Decomposition { weights, states },
        restarts_used: runs.len(),
        converged: search.converged,
        k,
        bound_kind,
        initial_value,
    })
}

/// Closed-form two-qubit roofs: the Wootters concurrence for `Q_C`, the
/// entanglement of formation for `Fr`.
pub fn two_qubit_oracle(rho: &DensityMatrix, probe: ProbeKind) -> Result<Option<f64>> {
    if rho.n_qubits() != 2 {
        return Ok(None);
    }
    Ok(Some(match probe {
        ProbeKind::QuasiConcurrence => wootters_concurrence(rho)?,
        ProbeKind::MutualInfoFr => entanglement_of_formation(rho)?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_bell, make_random_pure, make_werner};

    fn fast(probe: ProbeKind) -> RoofOptions {
        RoofOptions {
            probe,
            budget: 3000,
            restarts: 3,
            seed: 5,
            ..RoofOptions::default()
        }
    }

    #[test]
    fn identity_isometry_gives_eigendecomposition() {
        let rho = make_werner(0.5).unwrap();
        let d = decomposition_from_isometry(&rho, &Isometry::padded_identity(4, 4)).unwrap();
        let mut w = d.weights.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in w.iter().zip([0.625, 0.125, 0.125, 0.125]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(d.reconstruct().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn rank_one_decompositions_are_the_state() {
        let bell = make_bell(0).unwrap();
        let rho = bell.projector();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = Isometry::random(3, 1, &mut rng);
        let d = decomposition_from_isometry(&rho, &u).unwrap();
        for psi in &d.states {
            let overlap: C64 = psi
                .amplitudes()
                .iter()
                .zip(bell.amplitudes())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_isometries_reconstruct() {
        let rho = make_werner(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 4..=8 {
            let u = Isometry::random(k, 4, &mut rng);
            assert!(u.defect() < 1e-12);
            let d = decomposition_from_isometry(&rho, &u).unwrap();
            assert!(d.reconstruct().max_abs_diff(rho.matrix()) < 1e-10);
            assert!((d.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_isometry_rejected() {
        let rho = make_werner(0.5).unwrap();
        let mut u = Isometry::padded_identity(4, 4);
        u.set_param(0, 1.1);
        assert!(matches!(
            decomposition_from_isometry(&rho, &u),
            Err(Error::NotIsometry(_))
        ));
        let wrong = Isometry::padded_identity(4, 3);
        assert!(decomposition_from_isometry(&rho, &wrong).is_err());
    }

    #[test]
    fn zero_rank_rejected() {
        let zero = DensityMatrix::from_matrix_unchecked(2, ComplexMatrix::zeros(4));
        assert_eq!(
            roof_measure(&zero, &fast(ProbeKind::QuasiConcurrence)),
            Err(Error::ZeroRank)
        );
    }

    #[test]
    fn pure_state_roof_is_the_pure_measure() {
        for seed in 0..5 {
            let psi = make_random_pure(3, seed).unwrap();
            for probe in [ProbeKind::QuasiConcurrence, ProbeKind::MutualInfoFr] {
                let res = roof_measure(&psi.projector(), &fast(probe)).unwrap();
                let direct = pure_measure(&psi, probe, Average::Arithmetic).unwrap();
                assert!((res.value - direct).abs() < 1e-10);
                assert_eq!(res.k, 1);
            }
        }
    }

    #[test]
    fn roof_never_exceeds_eigendecomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..3 {
            let a = crate::states::random_pure_with(3, &mut rng)
                .reduced(&[0, 1])
                .unwrap();
            let res = roof_measure(&a, &fast(ProbeKind::MutualInfoFr)).unwrap();
            assert!(res.value <= res.initial_value + 1e-12);
        }
    }

    #[test]
    fn seed_determinism() {
        let rho = make_werner(0.6).unwrap();
        let a = roof_measure(&rho, &fast(ProbeKind::QuasiConcurrence)).unwrap();
        let b = roof_measure(&rho, &fast(ProbeKind::QuasiConcurrence)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn average_parsing() {
        assert_eq!("geometric".parse::<Average>().unwrap(), Average::Geometric);
        assert!("median".parse::<Average>().is_err());
    }
}
