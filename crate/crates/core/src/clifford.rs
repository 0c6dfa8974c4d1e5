//! Hopf-like maps built from Clifford-algebra coordinates of 2- and 3-qubit
//! states, their permutation family, and the K-invariants.
//!
//! The quaternion/octonion products are never formed as an algebra: each map
//! image is stored as its complex component slots, which is all the
//! invariants need.
//!
//! Amplitude names follow the usual labeling. Two qubits:
//! `α0|00> + α1|01> + β0|10> + β1|11>`. Three qubits:
//! `α0|000> + α1|001> + β0|010> + β1|011> + δ0|100> + δ1|101> + γ0|110> + γ1|111>`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{binomial, subsets, StateVector, C64};

/// Image of the two-qubit map `(q1, q2) ↦ (2 q2 q̄1, |q1|² − |q2|²)` with
/// `q1 = α0 + α1 i2`, `q2 = β0 + β1 i2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapImage2 {
    /// `2(β0 ᾱ0 + β1 ᾱ1)`, twice the conjugated off-diagonal of ρ1.
    pub c_off: C64,
    /// `2(β1 α0 − β0 α1)`, the `i2` slot; its modulus is the concurrence.
    pub c_conc: C64,
    /// `ρ1(00) − ρ1(11)`.
    pub z: f64,
}

/// Image of the three-qubit map `(o1, o2) ↦ (2 o2 ō1, |o1|² − |o2|²)` as
/// `(2C1 + 2C2 i2 + 2C3 i4 + 2C4 i6, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapImage3 {
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
    pub c4: C64,
    /// `ρk(00) − ρk(11)` for the distinguished qubit `k`.
    pub z: f64,
}

/// Common view of the map images.
pub trait HopfImage {
    /// `|image|²`; equals one for normalized input.
    fn norm_sqr(&self) -> f64;

    /// `K = 1 − |first slot|² − z²`.
    fn k_invariant(&self) -> f64;

    /// `K` as the sum of the entanglement slots, e.g. `|2C2|² + |2C3|² + |2C4|²`.
    fn k_from_components(&self) -> f64;
}

impl HopfImage for MapImage2 {
    fn norm_sqr(&self) -> f64 {
        self.c_off.norm_sqr() + self.c_conc.norm_sqr() + self.z * self.z
    }

    fn k_invariant(&self) -> f64 {
        1.0 - self.c_off.norm_sqr() - self.z * self.z
    }

    fn k_from_components(&self) -> f64 {
        self.c_conc.norm_sqr()
    }
}

impl HopfImage for MapImage3 {
    fn norm_sqr(&self) -> f64 {
        4.0 * (self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr() + self.c4.norm_sqr())
            + self.z * self.z
    }

    fn k_invariant(&self) -> f64 {
        1.0 - 4.0 * self.c1.norm_sqr() - self.z * self.z
    }

    fn k_from_components(&self) -> f64 {
        4.0 * (self.c2.norm_sqr() + self.c3.norm_sqr() + self.c4.norm_sqr())
    }
}

/// A relabeling of qubits: qubit `i` moves to position `image[i]` (0-based).
///
/// The one-line label `(312)` lists `image[i] + 1` for each qubit and matches
/// the usual notation: `(213)` swaps the first two qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(image));
            }
            seen[i] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// Transposition of qubits `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::InvalidPermutation(image));
        }
        image.swap(a, b);
        Ok(Self { image })
    }

    /// Parses the one-line label, e.g. `(312)` or `312`. Single-digit qubit
    /// numbers only.
    pub fn from_label(label: &str) -> Result<Self> {
        let digits = label.trim().trim_start_matches('(').trim_end_matches(')');
        let image = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d >= 1)
                    .map(|d| d as usize - 1)
                    .ok_or_else(|| Error::InvalidPermutation(vec![]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(image)
    }

    pub fn label(&self) -> String {
        let body: String = self.image.iter().map(|i| (i + 1).to_string()).collect();
        format!("({body})")
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, qubit: usize) -> usize {
        self.image[qubit]
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Permutation) -> Result<Permutation> {
        if self.len() != first.len() {
            return Err(Error::InvalidPermutation(first.image.clone()));
        }
        Ok(Permutation {
            image: first.image.iter().map(|&i| self.image[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { image: inv }
    }

    /// The original qubit that lands in position 0, i.e. the qubit whose
    /// reduced density matrix the permuted map describes.
    pub fn distinguished_qubit(&self) -> usize {
        self.image
            .iter()
            .position(|&p| p == 0)
            .expect("permutation is a bijection")
    }

    /// All `n!` permutations in lexicographic order of their images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation { image: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..n)
                .rev()
                .find(|&j| cur[j] > cur[i - 1])
                .expect("pivot exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
    }

    /// The six elements of S3 in the order identity, (213), (321), (132),
    /// (312), (231).
    pub fn s3() -> [Permutation; 6] {
        ["(123)", "(213)", "(321)", "(132)", "(312)", "(231)"]
            .map(|l| Permutation::from_label(l).expect("valid label"))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Moves the amplitude at bitstring `b` to the bitstring whose position
/// `perm(i)` holds bit `b_i`.
pub fn permute_state(psi: &StateVector, perm: &Permutation) -> Result<StateVector> {
    let n = psi.n_qubits();
    if perm.len() != n {
        return Err(Error::QubitCountMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    let amps = psi.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (b, &a) in amps.iter().enumerate() {
        let mut target = 0usize;
        for q in 0..n {
            let bit = (b >> (n - 1 - q)) & 1;
            target |= bit << (n - 1 - perm.apply(q));
        }
        out[target] = a;
    }
    Ok(StateVector::from_parts_unchecked(n, out))
}

fn require_qubits(psi: &StateVector, n: usize) -> Result<()> {
    if psi.n_qubits() != n {
        return Err(Error::QubitCountMismatch {
            expected: n,
            found: psi.n_qubits(),
        });
    }
    Ok(())
}

pub fn two_qubit_map(psi: &StateVector) -> Result<MapImage2> {
    require_qubits(psi, 2)?;
    let [a0, a1, b0, b1]: [C64; 4] = psi.amplitudes().try_into().expect("length 4");
    Ok(MapImage2 {
        c_off: (b0 * a0.conj() + b1 * a1.conj()) * 2.0,
        c_conc: (b1 * a0 - b0 * a1) * 2.0,
        z: a0.norm_sqr() + a1.norm_sqr() - b0.norm_sqr() - b1.norm_sqr(),
    })
}

/// The map with the qubits exchanged (`α1 ↔ β0`), describing qubit 2.
pub fn two_qubit_map_swapped(psi: &StateVector) -> Result<MapImage2> {
    require_qubits(psi, 2)?;
    let swapped = permute_state(psi, &Permutation::swap(2, 0, 1)?)?;
    two_qubit_map(&swapped)
}

/// Eight amplitudes in the order α0 α1 β0 β1 δ0 δ1 γ0 γ1.
struct Amps3 {
    a0: C64,
    a1: C64,
    b0: C64,
    b1: C64,
    d0: C64,
    d1: C64,
    g0: C64,
    g1: C64,
}

impl Amps3 {
    fn of(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self {
            a0: a[0],
            a1: a[1],
            b0: a[2],
            b1: a[3],
            d0: a[4],
            d1: a[5],
            g0: a[6],
            g1: a[7],
        }
    }
}

/// Population difference of qubit `k`: weight with bit `k` = 0 minus bit `k` = 1.
fn population_difference(psi: &StateVector, k: usize) -> f64 {
    let n = psi.n_qubits();
    psi.amplitudes()
        .iter()
        .enumerate()
        .map(|(b, z)| {
            if (b >> (n - 1 - k)) & 1 == 0 {
                z.norm_sqr()
            } else {
                -z.norm_sqr()
            }
        })
        .sum()
}

pub fn three_qubit_map(psi: &StateVector) -> Result<MapImage3> {
    require_qubits(psi, 3)?;
    let Amps3 {
        a0,
        a1,
        b0,
        b1,
        d0,
        d1,
        g0,
        g1,
    } = Amps3::of(psi);
    let c = |z: C64| z.conj();
    Ok(MapImage3 {
        c1: c(a0) * d0 + d1 * c(a1) + g0 * c(b0) + c(b1) * g1,
        c2: -a1 * d0 + d1 * a0 - (c(b1) * c(g0) - c(g1) * c(b0)),
        c3: -b0 * d0 + g0 * a0 - (c(a1) * c(g1) - c(d1) * c(b1)),
        c4: -c(d1) * c(b0) + c(a1) * c(g0) - (b1 * d0 - g1 * a0),
        z: population_difference(psi, 0),
    })
}

/// The map of the relabeled state: `three_qubit_map(permute_state(psi, perm))`.
pub fn permuted_three_qubit_map(psi: &StateVector, perm: &Permutation) -> Result<MapImage3> {
    require_qubits(psi, 3)?;
    if perm.len() != 3 {
        return Err(Error::InvalidPermutation(perm.image().to_vec()));
    }
    three_qubit_map(&permute_state(psi, perm)?)
}

/// The permuted maps written out directly in the original amplitudes, one
/// coefficient list per element of S3. Independent of [`permute_state`].
///
/// `z` is the population difference of the distinguished qubit: qubit 1 for
/// (123) and (132), qubit 2 for (213) and (312), qubit 3 for (321) and (231).
pub fn explicit_permuted_map(psi: &StateVector, perm: &Permutation) -> Result<MapImage3> {
    require_qubits(psi, 3)?;
    let Amps3 {
        a0,
        a1,
        b0,
        b1,
        d0,
        d1,
        g0,
        g1,
    } = Amps3::of(psi);
    let c = |z: C64| z.conj();
    let (c1, c2, c3, c4, qubit) = match perm.label().as_str() {
        "(123)" => return three_qubit_map(psi),
        "(213)" => (
            c(a0) * b0 + b1 * c(a1) + g0 * c(d0) + c(d1) * g1,
            b1 * a0 - a1 * b0 + c(g1) * c(d0) - c(d1) * c(g0),
            g0 * a0 - b0 * d0 + (c(b1) * c(d1) - c(g1) * c(a1)),
            -b0 * d1 + c(g0) * c(a1) - c(b1) * c(d0) + g1 * a0,
            1,
        ),
        "(321)" => (
            c(a0) * a1 + b1 * c(b0) + d1 * c(d0) + c(g0) * g1,
            d1 * a0 - d0 * a1 + c(g1) * c(b0) - c(g0) * c(b1),
            b1 * a0 - b0 * a1 + c(d1) * c(g0) - c(d0) * c(g1),
            -g0 * a1 - c(d1) * c(b0) + c(b1) * c(d0) + g1 * a0,
            2,
        ),
        "(132)" => (
            c(a0) * d0 + g0 * c(b0) + d1 * c(a1) + c(b1) * g1,
            g0 * a0 - b0 * d0 - (c(b1) * c(d1) - c(g1) * c(a1)),
            d1 * a0 - d0 * a1 - (c(b0) * c(g1) - c(g0) * c(b1)),
            c(b0) * c(d1) - c(g0) * c(a1) - (b1 * d0 - g1 * a0),
            0,
        ),
        "(312)" => (
            c(a0) * b0 + b1 * c(a1) + g0 * c(d0) + c(d1) * g1,
            g0 * a0 - d0 * b0 + c(g1) * c(a1) - c(d1) * c(b1),
            b1 * a0 - a1 * b0 + c(g0) * c(d1) - c(d0) * c(g1),
            -b0 * d1 - c(g0) * c(a1) + c(b1) * c(d0) + g1 * a0,
            1,
        ),
        "(231)" => (
            c(a0) * a1 + b1 * c(b0) + d1 * c(d0) + c(g0) * g1,
            b1 * a0 - b0 * a1 + c(g1) * c(d0) - c(g0) * c(d1),
            d1 * a0 - d0 * a1 + c(b1) * c(g0) - c(b0) * c(g1),
            c(b0) * c(d1) - g0 * a1 - c(b1) * c(d0) + g1 * a0,
            2,
        ),
        _ => return Err(Error::InvalidPermutation(perm.image().to_vec())),
    };
    Ok(MapImage3 {
        c1,
        c2,
        c3,
        c4,
        z: population_difference(psi, qubit),
    })
}

/// `Q_k = 2(1 − Tr[ρ_k²])` for every qubit `k`.
pub fn qubit_k_invariants(psi: &StateVector) -> Vec<f64> {
    (0..psi.n_qubits())
        .map(|k| {
            let p = psi.reduced_purity(&[k]).expect("qubit index in range");
            2.0 * (1.0 - p)
        })
        .collect()
}

/// `K` of the first qubit from its reduced matrix:
/// `1 − 4|ρ(01)|² − (ρ(00) − ρ(11))²`.
fn first_qubit_k(psi: &StateVector) -> f64 {
    let rho = psi.reduced(&[0]).expect("qubit 0 exists");
    let m = rho.matrix();
    let z = m[(0, 0)].re - m[(1, 1)].re;
    1.0 - 4.0 * m[(0, 1)].norm_sqr() - z * z
}

/// The K-invariant of the map of `permute_state(psi, perm)`: the map images
/// for 2 and 3 qubits, the first-qubit norm identity beyond that.
pub fn permuted_k(psi: &StateVector, perm: &Permutation) -> Result<f64> {
    let permuted = permute_state(psi, perm)?;
    Ok(match psi.n_qubits() {
        2 => two_qubit_map(&permuted)?.k_invariant(),
        3 => three_qubit_map(&permuted)?.k_invariant(),
        _ => first_qubit_k(&permuted),
    })
}

/// Largest register for which [`meyer_wallach`] also evaluates the `N!` average.
pub const PERMUTATION_AVERAGE_MAX_QUBITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeyerWallach {
    /// `(1/N) Σ_k 2(1 − Tr[ρ_k²])`.
    pub value: f64,
    /// `(1/N!) Σ_σ K_σ`, present for `N ≤ 4`.
    pub permutation_average: Option<f64>,
}

/// Average of `K` over all `N!` relabelings of the register.
pub fn meyer_wallach_permutation_average(psi: &StateVector) -> Result<f64> {
    let perms = Permutation::all(psi.n_qubits());
    let total = perms
        .iter()
        .map(|p| permuted_k(psi, p))
        .sum::<Result<f64>>()?;
    Ok(total / perms.len() as f64)
}

pub fn meyer_wallach(psi: &StateVector) -> Result<MeyerWallach> {
    let n = psi.n_qubits();
    if n < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
            range: "[2, ∞)",
        });
    }
    let ks = qubit_k_invariants(psi);
    let value = ks.iter().sum::<f64>() / n as f64;
    let permutation_average = if n <= PERMUTATION_AVERAGE_MAX_QUBITS {
        Some(meyer_wallach_permutation_average(psi)?)
    } else {
        None
    };
    Ok(MeyerWallach {
        value,
        permutation_average,
    })
}

/// `Q_m = C(N,m)^{-1} Σ_{|S|=m} 2^m/(2^m − 1) (1 − Tr[ρ_S²])`.
pub fn scott_q(psi: &StateVector, m: usize) -> Result<f64> {
    let n = psi.n_qubits();
    if m < 1 || m > n / 2 {
        return Err(Error::ParameterOutOfRange {
            name: "m",
            value: m as f64,
            range: "[1, floor(N/2)]",
        });
    }
    let weight = (1u64 << m) as f64 / ((1u64 << m) - 1) as f64;
    let terms: Vec<f64> = subsets(n, m)
        .par_iter()
        .map(|s| {
            let p = psi.reduced_purity(s).expect("subset indices in range");
            weight * (1.0 - p)
        })
        .collect();
    Ok(terms.iter().sum::<f64>() / binomial(n, m) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_bell, make_epr_pair_product, make_ghz, make_random_pure, make_w};

    const ONE: C64 = C64::new(1.0, 0.0);
    const ZERO: C64 = C64::new(0.0, 0.0);

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn single_qubit_purity(psi: &StateVector, k: usize) -> f64 {
        psi.reduced_purity(&[k]).unwrap()
    }

    #[test]
    fn bell_two_qubit_map() {
        let img = two_qubit_map(&make_bell(0).unwrap()).unwrap();
        assert!(close(img.c_off, ZERO, 1e-15));
        assert!(close(img.c_conc, ONE, 1e-15));
        assert!(img.z.abs() < 1e-15);
        let sw = two_qubit_map_swapped(&make_bell(0).unwrap()).unwrap();
        assert!(close(sw.c_conc, ONE, 1e-15));
    }

    #[test]
    fn basis_two_qubit_maps() {
        for idx in [0, 1] {
            let img = two_qubit_map(&StateVector::basis(2, idx).unwrap()).unwrap();
            assert_eq!(img.c_off, ZERO);
            assert_eq!(img.c_conc, ZERO);
            assert_eq!(img.z, 1.0);
        }
        assert!(two_qubit_map(&make_ghz(3).unwrap()).is_err());
    }

    #[test]
    fn swapped_map_of_product_reads_second_qubit() {
        let a = StateVector::normalized(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let b = StateVector::normalized(vec![C64::new(0.28, 0.0), C64::new(0.96, 0.0)]).unwrap();
        let img = two_qubit_map_swapped(&a.tensor(&b)).unwrap();
        assert!(img.c_conc.norm() < 1e-15);
        assert!((img.z - (0.28f64.powi(2) - 0.96f64.powi(2))).abs() < 1e-14);
        let img1 = two_qubit_map(&a.tensor(&b)).unwrap();
        assert!((img1.z - (0.36 - 0.64)).abs() < 1e-14);
    }

    #[test]
    fn two_qubit_map_invariants_on_random_states() {
        for seed in 0..1000 {
            let psi = make_random_pure(2, seed).unwrap();
            let img = two_qubit_map(&psi).unwrap();
            let sw = two_qubit_map_swapped(&psi).unwrap();
            assert!((img.norm_sqr() - 1.0).abs() < 1e-10);
            assert!((sw.norm_sqr() - 1.0).abs() < 1e-10);
            assert!(close(img.c_conc, sw.c_conc, 1e-12));
            assert!((img.k_invariant() - img.k_from_components()).abs() < 1e-10);
            let kq = 2.0 * (1.0 - single_qubit_purity(&psi, 0));
            assert!((img.k_invariant() - kq).abs() < 1e-10);
            // c_off holds twice the conjugated off-diagonal of the reduced matrix
            let r1 = psi.reduced(&[0]).unwrap();
            assert!(close(img.c_off, r1.matrix()[(0, 1)].conj() * 2.0, 1e-12));
            let r2 = psi.reduced(&[1]).unwrap();
            assert!(close(sw.c_off, r2.matrix()[(0, 1)].conj() * 2.0, 1e-12));
        }
    }

    #[test]
    fn three_qubit_map_examples() {
        let img = three_qubit_map(&StateVector::basis(3, 0).unwrap()).unwrap();
        assert_eq!([img.c1, img.c2, img.c3, img.c4], [ZERO; 4]);
        assert_eq!(img.z, 1.0);
        assert_eq!(img.k_invariant(), 0.0);

        let ghz = three_qubit_map(&make_ghz(3).unwrap()).unwrap();
        for c in [ghz.c1, ghz.c2, ghz.c3] {
            assert!(c.norm() < 1e-15);
        }
        assert!(close(ghz.c4, C64::new(0.5, 0.0), 1e-15));
        assert!(ghz.z.abs() < 1e-15);
        assert!((ghz.k_invariant() - 1.0).abs() < 1e-15);
        assert!(three_qubit_map(&make_bell(0).unwrap()).is_err());
    }

    #[test]
    fn three_qubit_map_z_matches_partial_trace() {
        for seed in 0..200 {
            let psi = make_random_pure(3, seed).unwrap();
            let img = three_qubit_map(&psi).unwrap();
            let m = psi.projector().partial_trace(&[0]).unwrap();
            let z = m.matrix()[(0, 0)].re - m.matrix()[(1, 1)].re;
            assert!((img.z - z).abs() < 1e-12);
            assert!(close(img.c1, m.matrix()[(0, 1)].conj(), 1e-12));
        }
    }

    /// Embeds a single-qubit factor at `single` and a two-qubit factor on the
    /// remaining qubits (ascending order).
    fn embed(single: usize, s: &StateVector, pair: &StateVector) -> StateVector {
        let others: Vec<usize> = (0..3).filter(|&q| q != single).collect();
        let amps = (0..8)
            .map(|b: usize| {
                let bit = |q: usize| (b >> (2 - q)) & 1;
                s.amplitudes()[bit(single)] * pair.amplitudes()[bit(others[0]) * 2 + bit(others[1])]
            })
            .collect();
        StateVector::new(amps).unwrap()
    }

    #[test]
    fn factorization_patterns() {
        for seed in 0..100 {
            let s = make_random_pure(1, 3 * seed).unwrap();
            let pair = make_random_pure(2, 3 * seed + 1).unwrap();
            // |Ψ1> ⊗ |Ψ23>: C2 = C3 = C4 = 0
            let img = three_qubit_map(&embed(0, &s, &pair)).unwrap();
            assert!(img.c2.norm() < 1e-12 && img.c3.norm() < 1e-12 && img.c4.norm() < 1e-12);
            // |Ψ2> ⊗ |Ψ13>: C3 = 0, C2 and C4 generically nonzero
            let img = three_qubit_map(&embed(1, &s, &pair)).unwrap();
            assert!(img.c3.norm() < 1e-12);
            assert!(img.c2.norm() > 1e-6 && img.c4.norm() > 1e-6);
            // |Ψ12> ⊗ |Ψ3>: C2 = 0, C3 and C4 generically nonzero
            let img = three_qubit_map(&embed(2, &s, &pair)).unwrap();
            assert!(img.c2.norm() < 1e-12);
            assert!(img.c3.norm() > 1e-6 && img.c4.norm() > 1e-6);
            // full product
            let t = make_random_pure(1, 3 * seed + 2).unwrap();
            let u = make_random_pure(1, 3 * seed + 5000).unwrap();
            let img = three_qubit_map(&s.tensor(&t).tensor(&u)).unwrap();
            assert!(img.c2.norm() < 1e-12 && img.c3.norm() < 1e-12 && img.c4.norm() < 1e-12);
        }
    }

    #[test]
    fn swap23_map_of_qubit2_factor_shows_qubit3_pattern() {
        // (132) exchanges qubits 2 and 3, turning |Ψ2>⊗|Ψ13> into the
        // |Ψ12>⊗|Ψ3> pattern.
        let perm = Permutation::from_label("(132)").unwrap();
        for seed in 0..50 {
            let s = make_random_pure(1, seed).unwrap();
            let pair = make_random_pure(2, seed + 100).unwrap();
            let img = permuted_three_qubit_map(&embed(1, &s, &pair), &perm).unwrap();
            assert!(img.c2.norm() < 1e-12);
            assert!(img.c3.norm() > 1e-6 && img.c4.norm() > 1e-6);
        }
    }

    #[test]
    fn identity_permutation_is_the_plain_map() {
        let psi = make_random_pure(3, 1).unwrap();
        let id = Permutation::identity(3);
        assert_eq!(
            permuted_three_qubit_map(&psi, &id).unwrap(),
            three_qubit_map(&psi).unwrap()
        );
        assert_eq!(
            explicit_permuted_map(&psi, &id).unwrap(),
            three_qubit_map(&psi).unwrap()
        );
    }

    #[test]
    fn explicit_and_permuted_paths_agree() {
        for seed in 0..200 {
            let psi = make_random_pure(3, seed).unwrap();
            for perm in Permutation::s3() {
                let a = permuted_three_qubit_map(&psi, &perm).unwrap();
                let b = explicit_permuted_map(&psi, &perm).unwrap();
                for (x, y) in [(a.c1, b.c1), (a.c2, b.c2), (a.c3, b.c3), (a.c4, b.c4)] {
                    assert!(close(x, y, 1e-12), "{perm}: {x} vs {y}");
                }
                assert!((a.z - b.z).abs() < 1e-12);
                let k = perm.distinguished_qubit();
                let kq = 2.0 * (1.0 - single_qubit_purity(&psi, k));
                assert!((a.k_invariant() - kq).abs() < 1e-10);
                assert!((a.k_from_components() - kq).abs() < 1e-10);
                assert!((a.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn distinguished_qubits_of_s3() {
        let expect = [0, 1, 2, 0, 1, 2];
        for (perm, k) in Permutation::s3().iter().zip(expect) {
            assert_eq!(perm.distinguished_qubit(), k, "{perm}");
        }
        assert!(explicit_permuted_map(&make_ghz(3).unwrap(), &Permutation::identity(4)).is_err());
    }

    #[test]
    fn permutation_basics() {
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(4).len(), 24);
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert_eq!(
            Permutation::from_label("(312)").unwrap().image(),
            &[2, 0, 1]
        );
        let p = Permutation::from_label("(2314)").unwrap();
        assert_eq!(p.after(&p.inverse()).unwrap(), Permutation::identity(4));
    }

    #[test]
    fn permute_state_examples() {
        let psi = make_random_pure(3, 9).unwrap();
        assert_eq!(permute_state(&psi, &Permutation::identity(3)).unwrap(), psi);
        let s01 = StateVector::basis(2, 0b01).unwrap();
        let swapped = permute_state(&s01, &Permutation::swap(2, 0, 1).unwrap()).unwrap();
        assert_eq!(swapped, StateVector::basis(2, 0b10).unwrap());
        assert!(permute_state(&psi, &Permutation::identity(2)).is_err());
    }

    #[test]
    fn permute_state_is_a_group_action() {
        let perms = Permutation::all(4);
        for seed in 0..20 {
            let psi = make_random_pure(4, seed).unwrap();
            let sigma = &perms[(7 * seed as usize) % 24];
            let tau = &perms[(5 * seed as usize + 3) % 24];
            let lhs = permute_state(&permute_state(&psi, sigma).unwrap(), tau).unwrap();
            let rhs = permute_state(&psi, &tau.after(sigma).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert!((lhs.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn k_invariant_examples() {
        let ghz = three_qubit_map(&make_ghz(3).unwrap()).unwrap();
        assert!((ghz.k_invariant() - 1.0).abs() < 1e-15);
        assert!((ghz.k_from_components() - 1.0).abs() < 1e-15);
        for seed in 0..1000 {
            let psi = make_random_pure(3, seed).unwrap();
            let img = three_qubit_map(&psi).unwrap();
            let kq = 2.0 * (1.0 - single_qubit_purity(&psi, 0));
            assert!((img.k_invariant() - kq).abs() < 1e-10);
            assert!((img.k_invariant() - img.k_from_components()).abs() < 1e-10);
        }
    }

    #[test]
    fn meyer_wallach_examples() {
        for n in 3..=8 {
            let mw = meyer_wallach(&make_ghz(n).unwrap()).unwrap();
            assert!((mw.value - 1.0).abs() < 1e-12, "n = {n}");
        }
        let mw = meyer_wallach(&make_epr_pair_product()).unwrap();
        assert!((mw.value - 1.0).abs() < 1e-12);
        assert!((mw.permutation_average.unwrap() - 1.0).abs() < 1e-12);
        let mw = meyer_wallach(&make_w(3).unwrap()).unwrap();
        assert!((mw.value - 8.0 / 9.0).abs() < 1e-12);
        assert!((mw.permutation_average.unwrap() - 8.0 / 9.0).abs() < 1e-12);
        assert!(meyer_wallach(&StateVector::basis(1, 0).unwrap()).is_err());
        assert!(meyer_wallach(&make_ghz(5).unwrap())
            .unwrap()
            .permutation_average
            .is_none());
    }

    #[test]
    fn meyer_wallach_paths_agree_and_stay_in_range() {
        for n in 2..=4 {
            for seed in 0..50 {
                let psi = make_random_pure(n, seed).unwrap();
                let mw = meyer_wallach(&psi).unwrap();
                assert!((mw.value - mw.permutation_average.unwrap()).abs() < 1e-12);
                assert!((0.0..=1.0 + 1e-12).contains(&mw.value));
            }
        }
    }

    #[test]
    fn meyer_wallach_vanishes_on_products() {
        for seed in 0..30 {
            let mut psi = make_random_pure(1, seed).unwrap();
            for j in 1..4 {
                psi = psi.tensor(&make_random_pure(1, 1000 * j + seed).unwrap());
            }
            assert!(meyer_wallach(&psi).unwrap().value.abs() < 1e-12);
        }
    }

    #[test]
    fn scott_examples() {
        for n in 2..=8 {
            assert!((scott_q(&make_ghz(n).unwrap(), 1).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((scott_q(&make_ghz(4).unwrap(), 2).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let prod = StateVector::basis(4, 0b0110).unwrap();
        assert!(scott_q(&prod, 1).unwrap().abs() < 1e-15);
        assert!(scott_q(&make_ghz(4).unwrap(), 3).is_err());
        assert!(scott_q(&make_ghz(4).unwrap(), 0).is_err());
    }

    #[test]
    fn scott_q1_equals_meyer_wallach() {
        for seed in 0..20 {
            let psi = make_random_pure(5, seed).unwrap();
            let q1 = scott_q(&psi, 1).unwrap();
            let mw = meyer_wallach(&psi).unwrap().value;
            assert!((q1 - mw).abs() < 1e-12);
        }
    }
}
