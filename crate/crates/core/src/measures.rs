//! Pair-averaged measures `M` (arithmetic) and `G` (geometric) and the
//! entanglement-type classification built on them.

use std::fmt;

use crate::error::{Error, Result};
use crate::probes::{pair_probe_matrix, PairReductions, ProbeKind};
use crate::states::MAX_QUBITS;

pub use crate::probes::PairProbeMatrix;

/// Pair values below this make `G` exactly zero.
pub const GEOMETRIC_ZERO_THRESHOLD: f64 = 1e-12;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Slack allowed above 1 before a report is flagged.
pub const UNIT_BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    FullyFactorizable,
    PartiallyEntangled,
    GloballyEntangled,
}

impl ClassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::FullyFactorizable => "fully-factorizable",
            ClassLabel::PartiallyEntangled => "partially-entangled",
            ClassLabel::GloballyEntangled => "globally-entangled",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Homogeneity {
    Homogeneous,
    Heterogeneous,
}

impl Homogeneity {
    pub fn as_str(self) -> &'static str {
        match self {
            Homogeneity::Homogeneous => "homogeneous",
            Homogeneity::Heterogeneous => "heterogeneous",
        }
    }
}

impl fmt::Display for Homogeneity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `N(P)`: 1 for the quasi-concurrence; for `Fr`, 1 at `n = 2` and `d` otherwise.
pub fn normalization(probe: ProbeKind, n: usize, d: usize) -> Result<f64> {
    if d != 2 {
        return Err(Error::QuditNormalization(d));
    }
    if n < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
            range: "[2, ∞)",
        });
    }
    Ok(match probe {
        ProbeKind::QuasiConcurrence => 1.0,
        ProbeKind::MutualInfoFr if n == 2 => 1.0,
        ProbeKind::MutualInfoFr => d as f64,
    })
}

fn qubit_normalization(pm: &PairProbeMatrix) -> f64 {
    // the matrix guarantees n >= 2
    normalization(pm.probe(), pm.n_qubits(), 2).expect("valid pair matrix")
}

/// Unnormalized mean of the pair values.
pub fn mean_pair_value(pm: &PairProbeMatrix) -> f64 {
    pm.values().iter().sum::<f64>() / pm.pair_count() as f64
}

/// Unnormalized geometric mean, computed in log space; 0 if any value is
/// below [`GEOMETRIC_ZERO_THRESHOLD`].
pub fn geometric_mean_pair_value(pm: &PairProbeMatrix) -> f64 {
    let v = pm.values();
    if v.iter().any(|&x| x < GEOMETRIC_ZERO_THRESHOLD) {
        return 0.0;
    }
    (v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64).exp()
}

/// `M = N(P) · mean P(A,B)`.
pub fn arithmetic_measure(pm: &PairProbeMatrix) -> f64 {
    qubit_normalization(pm) * mean_pair_value(pm)
}

/// `G = N(P) · (∏ P(A,B))^(1/C(N,2))`.
pub fn geometric_measure(pm: &PairProbeMatrix) -> f64 {
    qubit_normalization(pm) * geometric_mean_pair_value(pm)
}

pub fn classify(pm: &PairProbeMatrix, tol: f64) -> Result<(ClassLabel, Homogeneity)> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "tol",
            value: tol,
            range: "(0, ∞)",
        });
    }
    let v = pm.values();
    let above = v.iter().filter(|&&x| x > tol).count();
    let label = if above == v.len() {
        ClassLabel::GloballyEntangled
    } else if above == 0 {
        ClassLabel::FullyFactorizable
    } else {
        ClassLabel::PartiallyEntangled
    };
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let homogeneity = if max - min <= tol {
        Homogeneity::Homogeneous
    } else {
        Homogeneity::Heterogeneous
    };
    Ok((label, homogeneity))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub pairs: PairProbeMatrix,
    pub m: f64,
    pub g: f64,
    pub normalization: f64,
    pub pair_count: usize,
    pub classification: ClassLabel,
    pub homogeneity: Homogeneity,
    pub tolerance: f64,
    /// `m` or `g` above `1 + 1e-9`; recorded, never clamped.
    pub exceeds_unit_bound: bool,
}

impl MeasureReport {
    pub fn from_pairs(pairs: PairProbeMatrix, tol: f64) -> Result<Self> {
        let (classification, homogeneity) = classify(&pairs, tol)?;
        let m = arithmetic_measure(&pairs);
        let g = geometric_measure(&pairs);
        Ok(Self {
            normalization: qubit_normalization(&pairs),
            pair_count: pairs.pair_count(),
            m,
            g,
            classification,
            homogeneity,
            tolerance: tol,
            exceeds_unit_bound: m > 1.0 + UNIT_BOUND_SLACK || g > 1.0 + UNIT_BOUND_SLACK,
            pairs,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.pairs.n_qubits()
    }

    pub fn probe(&self) -> ProbeKind {
        self.pairs.probe()
    }
}

pub fn measure_report<R: PairReductions + ?Sized>(
    state: &R,
    probe: ProbeKind,
    tol: f64,
) -> Result<MeasureReport> {
    let n = state.n_qubits();
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::ParameterOutOfRange {
            name: "n_qubits",
            value: n as f64,
            range: "[2, 12]",
        });
    }
    MeasureReport::from_pairs(pair_probe_matrix(state, probe)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{permute_state, Permutation};
    use crate::linalg::StateVector;
    use crate::probes::wootters_concurrence;
    use crate::states::{
        make_epr_pair_product, make_ghz, make_mems_purification, make_random_pure, make_w,
    };

    const PROBES: [ProbeKind; 2] = [ProbeKind::QuasiConcurrence, ProbeKind::MutualInfoFr];

    #[test]
    fn normalization_table() {
        assert_eq!(normalization(ProbeKind::MutualInfoFr, 2, 2).unwrap(), 1.0);
        assert_eq!(normalization(ProbeKind::MutualInfoFr, 5, 2).unwrap(), 2.0);
        for n in 2..10 {
            assert_eq!(
                normalization(ProbeKind::QuasiConcurrence, n, 2).unwrap(),
                1.0
            );
        }
        assert_eq!(
            normalization(ProbeKind::MutualInfoFr, 3, 3),
            Err(Error::QuditNormalization(3))
        );
    }

    #[test]
    fn ghz_reports() {
        for n in 3..=8 {
            for probe in PROBES {
                let r = measure_report(&make_ghz(n).unwrap(), probe, DEFAULT_TOLERANCE).unwrap();
                assert!(
                    (r.m - 1.0).abs() < 1e-9 && (r.g - 1.0).abs() < 1e-9,
                    "{n} {probe}"
                );
                assert_eq!(r.classification, ClassLabel::GloballyEntangled);
                assert_eq!(r.homogeneity, Homogeneity::Homogeneous);
                assert!(!r.exceeds_unit_bound);
            }
        }
    }

    #[test]
    fn epr_pair_product_report() {
        let r = measure_report(&make_epr_pair_product(), ProbeKind::MutualInfoFr, 1e-9).unwrap();
        assert!((r.m - 2.0 / 3.0).abs() < 1e-10);
        assert_eq!(r.g, 0.0);
        assert_eq!(r.classification, ClassLabel::PartiallyEntangled);
        assert_eq!(r.homogeneity, Homogeneity::Heterogeneous);
        assert_eq!(r.pair_count, 6);
    }

    #[test]
    fn factorizable_report() {
        for probe in PROBES {
            let r = measure_report(&StateVector::basis(4, 0).unwrap(), probe, 1e-9).unwrap();
            assert_eq!((r.m, r.g), (0.0, 0.0));
            assert_eq!(r.classification, ClassLabel::FullyFactorizable);
            assert_eq!(r.homogeneity, Homogeneity::Homogeneous);
        }
    }

    #[test]
    fn w3_reports() {
        let w = make_w(3).unwrap();
        let fr = measure_report(&w, ProbeKind::MutualInfoFr, 1e-9).unwrap();
        let expected = 3f64.log2() - 2.0 / 3.0;
        assert!((fr.m - expected).abs() < 1e-12 && (fr.g - expected).abs() < 1e-12);
        let qc = measure_report(&w, ProbeKind::QuasiConcurrence, 1e-9).unwrap();
        assert!((qc.m - qc.g).abs() < 1e-12);
        assert!((qc.m - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mems_reports() {
        // frozen from an independent numpy evaluation
        let golden = [
            (0.90, 0.593734158212, 0.298340979044),
            (0.95, 0.616091592274, 0.201442512506),
            (0.99, 0.649225410809, 0.073236085735),
        ];
        for (x, m, g) in golden {
            let r = measure_report(
                &make_mems_purification(x).unwrap(),
                ProbeKind::MutualInfoFr,
                1e-9,
            )
            .unwrap();
            assert!((r.m - m).abs() < 1e-10, "x={x}: m={}", r.m);
            assert!((r.g - g).abs() < 1e-10, "x={x}: g={}", r.g);
            let p = &r.pairs;
            assert!((p.get(0, 1).unwrap() - p.get(2, 3).unwrap()).abs() < 1e-12);
            assert!(p.get(0, 1).unwrap() > 0.5);
            for (a, b) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
                assert!(p.get(a, b).unwrap() < 0.25);
            }
        }
    }

    #[test]
    fn two_qubit_measures_reduce_to_concurrence() {
        for seed in 0..100 {
            let psi = make_random_pure(2, seed).unwrap();
            let c = wootters_concurrence(&psi.projector()).unwrap();
            let r = measure_report(&psi, ProbeKind::QuasiConcurrence, 1e-9).unwrap();
            assert!((r.m - c).abs() < 1e-10 && (r.g - c).abs() < 1e-10);
        }
    }

    #[test]
    fn measures_are_relabeling_invariant() {
        let perms = Permutation::all(4);
        for seed in 0..20 {
            let psi = make_random_pure(4, 1000 + seed).unwrap();
            let moved = permute_state(&psi, &perms[(7 * seed as usize + 3) % 24]).unwrap();
            for probe in PROBES {
                let a = measure_report(&psi, probe, 1e-9).unwrap();
                let b = measure_report(&moved, probe, 1e-9).unwrap();
                assert!((a.m - b.m).abs() < 1e-10 && (a.g - b.g).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn geometric_threshold_and_classification_edges() {
        let pm =
            PairProbeMatrix::from_values(3, ProbeKind::QuasiConcurrence, vec![0.5, 0.5, 5e-13])
                .unwrap();
        assert_eq!(geometric_measure(&pm), 0.0);
        assert_eq!(
            classify(&pm, 1e-9).unwrap().0,
            ClassLabel::PartiallyEntangled
        );
        assert!(classify(&pm, 0.0).is_err());

        // 66 small factors would underflow a direct product
        let pm =
            PairProbeMatrix::from_values(12, ProbeKind::QuasiConcurrence, vec![1e-6; 66]).unwrap();
        assert!((geometric_measure(&pm) - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn report_rejects_sizes_out_of_range() {
        let one = StateVector::basis(1, 0).unwrap();
        assert!(measure_report(&one, ProbeKind::MutualInfoFr, 1e-9).is_err());
    }
}
