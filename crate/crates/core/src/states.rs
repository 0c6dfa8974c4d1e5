//! Named benchmark states, random states, and the JSON state formats.
//!
//! State JSON: `{"n_qubits": 2, "amplitudes": [[re, im], ...]}`.
//! Density JSON: `{"n_qubits": 2, "rows": [[[re, im], ...], ...]}`.
//! Both use the big-endian qubit order of [`crate::linalg`].

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{qubits_for_len, ComplexMatrix, DensityMatrix, StateVector, C64, ZERO};

/// Largest register accepted by [`make_random_pure`] and the report builders.
pub const MAX_QUBITS: usize = 12;

/// Allowed deviation of the norm (state) or trace (density) in parsed input.
/// Inputs within this distance are renormalized exactly.
pub const INPUT_NORM_TOL: f64 = 1e-4;
/// Allowed `|ρ - ρ†|` entry deviation in parsed density matrices.
pub const INPUT_HERMITIAN_TOL: f64 = 1e-9;
/// Allowed negative eigenvalue in parsed density matrices before clamping.
pub const INPUT_NEGATIVE_TOL: f64 = 1e-6;

/// A resolved state: pure or mixed.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl State {
    pub fn n_qubits(&self) -> usize {
        match self {
            State::Pure(psi) => psi.n_qubits(),
            State::Mixed(rho) => rho.n_qubits(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(psi) => psi.projector(),
            State::Mixed(rho) => rho.clone(),
        }
    }
}

/// Description of a state, either by name and parameters or explicitly.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Ghz(usize),
    W(usize),
    /// 0: Φ+, 1: Φ−, 2: Ψ+, 3: Ψ−.
    Bell(usize),
    /// Φ+ on qubits (0,1) times Φ+ on qubits (2,3).
    EprPairProduct,
    Mems(f64),
    Werner(f64),
    /// Computational basis state given as a bitstring, qubit 0 first.
    Basis(Vec<bool>),
    /// Product of single-qubit factors `a|0> + b|1>`, each normalized.
    Product(Vec<(C64, C64)>),
    Random {
        n_qubits: usize,
        seed: u64,
    },
    Amplitudes(Vec<C64>),
}

impl StateSpec {
    pub fn resolve(&self) -> Result<State> {
        Ok(match self {
            StateSpec::Ghz(n) => State::Pure(make_ghz(*n)?),
            StateSpec::W(n) => State::Pure(make_w(*n)?),
            StateSpec::Bell(k) => State::Pure(make_bell(*k)?),
            StateSpec::EprPairProduct => State::Pure(make_epr_pair_product()),
            StateSpec::Mems(x) => State::Pure(make_mems_purification(*x)?),
            StateSpec::Werner(p) => State::Mixed(make_werner(*p)?),
            StateSpec::Basis(bits) => State::Pure(make_basis(bits)?),
            StateSpec::Product(factors) => State::Pure(make_product(factors)?),
            StateSpec::Random { n_qubits, seed } => {
                State::Pure(make_random_pure(*n_qubits, *seed)?)
            }
            StateSpec::Amplitudes(a) => State::Pure(StateVector::normalized(a.clone())?),
        })
    }
}

fn spec_err(s: &str) -> Error {
    Error::UnknownStateSpec(s.to_string())
}

/// Parses `ghz:4`, `w:3`, `bell:1`, `epr-pair`, `mems:0.9`, `werner:0.5`,
/// `basis:0101`, `zero:4`, `product:1,0;0.6,0.8`, `random:5:12345`.
impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        let int = |r: Option<&str>| -> Result<usize> {
            r.and_then(|v| v.parse().ok()).ok_or_else(|| spec_err(s))
        };
        let real = |r: Option<&str>| -> Result<f64> {
            r.and_then(|v| v.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| spec_err(s))
        };
        match name {
            "ghz" => Ok(StateSpec::Ghz(int(rest)?)),
            "w" => Ok(StateSpec::W(int(rest)?)),
            "bell" => Ok(StateSpec::Bell(int(rest)?)),
            "epr-pair" | "epr2" if rest.is_none() => Ok(StateSpec::EprPairProduct),
            "mems" => Ok(StateSpec::Mems(real(rest)?)),
            "werner" => Ok(StateSpec::Werner(real(rest)?)),
            "zero" => Ok(StateSpec::Basis(vec![false; int(rest)?])),
            "basis" => {
                let bits = rest.ok_or_else(|| spec_err(s))?;
                if bits.is_empty() {
                    return Err(spec_err(s));
                }
                bits.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(spec_err(s)),
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(StateSpec::Basis)
            }
            "product" => {
                let body = rest.ok_or_else(|| spec_err(s))?;
                let factors = body
                    .split(';')
                    .map(|f| {
                        let (a, b) = f.split_once(',').ok_or_else(|| spec_err(s))?;
                        let a: f64 = a.trim().parse().map_err(|_| spec_err(s))?;
                        let b: f64 = b.trim().parse().map_err(|_| spec_err(s))?;
                        Ok((C64::new(a, 0.0), C64::new(b, 0.0)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(StateSpec::Product(factors))
            }
            "random" => {
                let (n, seed) = rest
                    .and_then(|r| r.split_once(':'))
                    .ok_or_else(|| spec_err(s))?;
                Ok(StateSpec::Random {
                    n_qubits: n.parse().map_err(|_| spec_err(s))?,
                    seed: seed.parse().map_err(|_| spec_err(s))?,
                })
            }
            _ => Err(spec_err(s)),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Ghz(n) => write!(f, "ghz:{n}"),
            StateSpec::W(n) => write!(f, "w:{n}"),
            StateSpec::Bell(k) => write!(f, "bell:{k}"),
            StateSpec::EprPairProduct => write!(f, "epr-pair"),
            StateSpec::Mems(x) => write!(f, "mems:{x}"),
            StateSpec::Werner(p) => write!(f, "werner:{p}"),
            StateSpec::Basis(bits) => {
                let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "basis:{s}")
            }
            StateSpec::Product(factors) => {
                let parts: Vec<String> = factors
                    .iter()
                    .map(|(a, b)| format!("{},{}", a.re, b.re))
                    .collect();
                write!(f, "product:{}", parts.join(";"))
            }
            StateSpec::Random { n_qubits, seed } => write!(f, "random:{n_qubits}:{seed}"),
            StateSpec::Amplitudes(a) => write!(f, "amplitudes[{}]", a.len()),
        }
    }
}

fn check_register(name: &'static str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::ParameterOutOfRange {
            name,
            value: n as f64,
            range: if min == 2 { "[2, ∞)" } else { "[1, ∞)" },
        });
    }
    Ok(())
}

fn check_unit_interval(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::ParameterOutOfRange {
            name,
            value: x,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `(|0...0> + |1...1>) / √2`.
pub fn make_ghz(n: usize) -> Result<StateVector> {
    check_register("n", n, 2)?;
    let dim = 1usize << n;
    let mut a = vec![ZERO; dim];
    a[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    a[dim - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
    Ok(StateVector::from_parts_unchecked(n, a))
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn make_w(n: usize) -> Result<StateVector> {
    check_register("n", n, 2)?;
    let dim = 1usize << n;
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut a = vec![ZERO; dim];
    for q in 0..n {
        a[1 << q] = amp;
    }
    Ok(StateVector::from_parts_unchecked(n, a))
}

pub fn make_bell(index: usize) -> Result<StateVector> {
    let h = FRAC_1_SQRT_2;
    let a = match index {
        0 => [h, 0.0, 0.0, h],
        1 => [h, 0.0, 0.0, -h],
        2 => [0.0, h, h, 0.0],
        3 => [0.0, h, -h, 0.0],
        _ => {
            return Err(Error::ParameterOutOfRange {
                name: "bell index",
                value: index as f64,
                range: "{0, 1, 2, 3}",
            })
        }
    };
    Ok(StateVector::from_parts_unchecked(
        2,
        a.iter().map(|&x| C64::new(x, 0.0)).collect(),
    ))
}

/// Φ+ ⊗ Φ+ on four qubits.
pub fn make_epr_pair_product() -> StateVector {
    let bell = make_bell(0).expect("index 0 is valid");
    bell.tensor(&bell)
}

/// `√(1−x)|0101> + (√x/2)(|0000> + |0011> + |1100> + |1111>)`.
pub fn make_mems_purification(x: f64) -> Result<StateVector> {
    check_unit_interval("x", x)?;
    let mut a = vec![ZERO; 16];
    a[0b0101] = C64::new((1.0 - x).sqrt(), 0.0);
    let q = x.sqrt() / 2.0;
    for idx in [0b0000, 0b0011, 0b1100, 0b1111] {
        a[idx] = C64::new(q, 0.0);
    }
    Ok(StateVector::from_parts_unchecked(4, a))
}

/// `p|ψ−><ψ−| + (1−p) I/4`.
pub fn make_werner(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let singlet = make_bell(3)?.projector().into_matrix();
    let mixed = ComplexMatrix::from_diag(&[0.25; 4]);
    let m = singlet
        .scale(C64::new(p, 0.0))
        .add(&mixed.scale(C64::new(1.0 - p, 0.0)));
    Ok(DensityMatrix::from_matrix_unchecked(2, m))
}

pub fn make_basis(bits: &[bool]) -> Result<StateVector> {
    check_register("n", bits.len(), 1)?;
    let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    StateVector::basis(bits.len(), index)
}

/// Tensor product of single-qubit factors `a|0> + b|1>`, qubit 0 first.
pub fn make_product(factors: &[(C64, C64)]) -> Result<StateVector> {
    check_register("n", factors.len(), 1)?;
    let mut out: Option<StateVector> = None;
    for &(a, b) in factors {
        let f = StateVector::normalized(vec![a, b])?;
        out = Some(match out {
            None => f,
            Some(acc) => acc.tensor(&f),
        });
    }
    Ok(out.expect("at least one factor"))
}

/// Haar-random pure state on `n_qubits`, deterministic per `seed`.
///
/// Draws `2^n` complex amplitudes with independent standard normal real and
/// imaginary parts (real first) from `ChaCha8Rng::seed_from_u64(seed)`, then
/// normalizes.
pub fn make_random_pure(n_qubits: usize, seed: u64) -> Result<StateVector> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n_qubits as f64,
            range: "[1, 12]",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_pure_with(n_qubits, &mut rng))
}

/// Haar-random pure state from a caller-owned generator.
pub fn random_pure_with<R: rand::Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> StateVector {
    let amps: Vec<C64> = (0..1usize << n_qubits)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    StateVector::normalized(amps).expect("Gaussian vector is nonzero with probability one")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub n_qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub n_qubits: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl From<&StateVector> for StateJson {
    fn from(psi: &StateVector) -> Self {
        Self {
            n_qubits: psi.n_qubits(),
            amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl From<&DensityMatrix> for DensityJson {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        Self {
            n_qubits: rho.n_qubits(),
            rows: (0..m.dim())
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

/// JSON value for either kind of state, with full `f64` precision.
pub fn state_to_json(state: &State) -> serde_json::Value {
    match state {
        State::Pure(psi) => serde_json::to_value(StateJson::from(psi)),
        State::Mixed(rho) => serde_json::to_value(DensityJson::from(rho)),
    }
    .expect("state JSON is always serializable")
}

/// Parses the state or density JSON format.
///
/// The norm (or trace) may deviate from one by up to [`INPUT_NORM_TOL`]; the
/// result is renormalized exactly. Density matrices are additionally projected
/// onto their Hermitian part and small negative eigenvalues are clamped.
pub fn parse_state(text: &str) -> Result<State> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::MalformedJson(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::MalformedJson("expected a JSON object".into()))?;
    if obj.contains_key("amplitudes") {
        let s: StateJson =
            serde_json::from_value(value).map_err(|e| Error::MalformedJson(e.to_string()))?;
        parse_state_json(s).map(State::Pure)
    } else if obj.contains_key("rows") {
        let d: DensityJson =
            serde_json::from_value(value).map_err(|e| Error::MalformedJson(e.to_string()))?;
        parse_density_json(d).map(State::Mixed)
    } else {
        Err(Error::MalformedJson(
            "expected an `amplitudes` or `rows` field".into(),
        ))
    }
}

fn to_complex(pair: &[f64; 2]) -> Result<C64> {
    if pair.iter().all(|x| x.is_finite()) {
        Ok(C64::new(pair[0], pair[1]))
    } else {
        Err(Error::NonFinite)
    }
}

fn parse_state_json(s: StateJson) -> Result<StateVector> {
    let n = qubits_for_len(s.amplitudes.len())?;
    if n != s.n_qubits {
        return Err(Error::QubitCountMismatch {
            expected: s.n_qubits,
            found: n,
        });
    }
    let amps = s
        .amplitudes
        .iter()
        .map(to_complex)
        .collect::<Result<Vec<_>>>()?;
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    StateVector::normalized(amps)
}

fn parse_density_json(d: DensityJson) -> Result<DensityMatrix> {
    let n = qubits_for_len(d.rows.len())?;
    if n != d.n_qubits {
        return Err(Error::QubitCountMismatch {
            expected: d.n_qubits,
            found: n,
        });
    }
    let rows = d
        .rows
        .iter()
        .map(|r| r.iter().map(to_complex).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let m = ComplexMatrix::from_rows(rows)?;
    let defect = m.hermiticity_defect();
    if defect > INPUT_HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > INPUT_NORM_TOL || tr.im.abs() > INPUT_NORM_TOL {
        return Err(Error::InvalidTrace(tr.re));
    }
    let eig = crate::linalg::hermitian_eigensystem(&m.hermitian_part())?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -INPUT_NEGATIVE_TOL {
        return Err(Error::NotPositive(min));
    }
    let clamped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let rebuilt = crate::linalg::Eigensystem {
        values: clamped.iter().map(|v| v / total).collect(),
        vectors: eig.vectors,
    }
    .reconstruct()
    .hermitian_part();
    Ok(DensityMatrix::from_matrix_unchecked(n, rebuilt))
}
