//! Dense complex kernels for small registers.
//!
//! Basis states are labeled big-endian: qubit 0 is the most significant bit
//! of the basis index, so `|q0 q1 ... q(n-1)>` has index
//! `q0 * 2^(n-1) + ... + q(n-1)`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance used for the Hermiticity / trace invariants of [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-12;
/// Eigenvalues above `-NEGATIVE_EIGEN_TOL` are accepted as round-off and clamped.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as zero in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data of length `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    row,
                    cols: r.len(),
                });
            }
            data.extend(r);
        }
        Self::from_vec(dim, data)
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in apply");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the high-order bits.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    /// `Tr[A^2]` for Hermitian `A`, i.e. the squared Frobenius norm.
    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }

    /// `V f(Λ) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each pivot `(p, q)` is rotated away with the unitary
/// `[[c, s], [-s e^{-iφ}, c e^{-iφ}]]`, where `φ = arg h_pq`: the phase factor
/// makes the 2x2 block real symmetric and `(c, s)` is the usual real Jacobi
/// rotation for that block.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<Eigensystem> {
    let defect = h.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    if h.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonFinite);
    }
    let n = h.dim();
    let mut a = h.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_sqr().sqrt().max(f64::MIN_POSITIVE);
    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e_minus = phase.conj();
                let e_plus = phase;

                // A <- A J (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * e_minus * s;
                    a[(k, q)] = akp * s + akq * e_minus * c;
                }
                // A <- J† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * e_plus * s;
                    a[(q, k)] = apk * s + aqk * e_plus * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                // V <- V J
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * e_minus * s;
                    v[(k, q)] = vkp * s + vkq * e_minus * c;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)];
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// Normalized pure state on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

/// Returns `log2(len)` if `len` is a power of two of at least 2.
pub(crate) fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::LengthNotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within `1e-12`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Divides by the norm. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = norm(&amplitudes);
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if n_qubits == 0 || index >= dim {
            return Err(Error::QubitIndexOutOfRange { index, n_qubits });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub(crate) fn from_parts_unchecked(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `self ⊗ other`; the qubits of `self` come first.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    /// `|ψ><ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }

    /// Reduced density matrix on `keep`, computed from the amplitudes without
    /// forming the full projector. The kept qubits appear in the given order.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let layout = SubsetLayout::new(self.n_qubits, keep)?;
        let kd = layout.kept.len();
        let mut m = ComplexMatrix::zeros(kd);
        for r in 0..kd {
            for c in r..kd {
                let mut acc = ZERO;
                for &t in &layout.traced {
                    acc += self.amplitudes[layout.kept[r] | t]
                        * self.amplitudes[layout.kept[c] | t].conj();
                }
                m[(r, c)] = acc;
                m[(c, r)] = acc.conj();
            }
            m[(r, r)].im = 0.0;
        }
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            matrix: m,
        })
    }

    /// Purity of the reduction onto `keep`.
    pub fn reduced_purity(&self, keep: &[usize]) -> Result<f64> {
        Ok(self.reduced(keep)?.purity())
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Precomputed basis offsets splitting a register into kept and traced qubits.
struct SubsetLayout {
    /// Full-register offset contributed by each kept-subsystem index.
    kept: Vec<usize>,
    /// Full-register offset contributed by each traced-subsystem index.
    traced: Vec<usize>,
}

impl SubsetLayout {
    fn new(n_qubits: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut seen = vec![false; n_qubits];
        for &q in keep {
            if q >= n_qubits {
                return Err(Error::QubitIndexOutOfRange { index: q, n_qubits });
            }
            if seen[q] {
                return Err(Error::DuplicateQubitIndex(q));
            }
            seen[q] = true;
        }
        let rest: Vec<usize> = (0..n_qubits).filter(|&q| !seen[q]).collect();
        Ok(Self {
            kept: offsets(n_qubits, keep),
            traced: offsets(n_qubits, &rest),
        })
    }
}

/// For each index `x` of the subsystem on `qubits` (first listed = most
/// significant), the corresponding bit pattern in the full register.
fn offsets(n_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|x| {
            qubits.iter().enumerate().fold(0usize, |acc, (j, &q)| {
                let bit = (x >> (k - 1 - j)) & 1;
                acc | (bit << (n_qubits - 1 - q))
            })
        })
        .collect()
}

/// Hermitian, positive semidefinite, unit-trace matrix over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants at the default tolerances.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DENSITY_TOL, NEGATIVE_EIGEN_TOL)
    }

    /// Validates Hermiticity and trace within `tol` and eigenvalues
    /// `>= -neg_tol`. The stored matrix is the Hermitian part of the input.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64, neg_tol: f64) -> Result<Self> {
        let n_qubits = qubits_for_len(matrix.dim())?;
        if matrix
            .as_slice()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidTrace(tr.re));
        }
        let matrix = matrix.hermitian_part();
        let eig = hermitian_eigensystem(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -neg_tol {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), 1 << n_qubits);
        Self { n_qubits, matrix }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: ComplexMatrix::from_diag(&vec![1.0 / dim as f64; dim]),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Reduced density matrix on `keep`, tracing out every other qubit.
    /// The kept qubits appear in the given order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let layout = SubsetLayout::new(self.n_qubits, keep)?;
        let kd = layout.kept.len();
        let mut m = ComplexMatrix::zeros(kd);
        for r in 0..kd {
            for c in 0..kd {
                let mut acc = ZERO;
                for &t in &layout.traced {
                    acc += self.matrix[(layout.kept[r] | t, layout.kept[c] | t)];
                }
                m[(r, c)] = acc;
            }
        }
        Ok(Self {
            n_qubits: keep.len(),
            matrix: m,
        })
    }

    /// Eigensystem with eigenvalues clamped at zero.
    pub fn eigensystem(&self) -> Eigensystem {
        let mut eig = hermitian_eigensystem(&self.matrix)
            .expect("density matrix is Hermitian by construction");
        for v in &mut eig.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        eig
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigensystem().values
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.matrix.frobenius_sqr()
    }

    /// Von Neumann entropy in bits.
    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_bits(&self.eigenvalues())
    }

    /// `√ρ`, from the clamped spectrum.
    pub fn sqrt(&self) -> ComplexMatrix {
        self.eigensystem().map_values(f64::sqrt)
    }
}

/// `-Σ λ log2 λ`, skipping eigenvalues below [`ENTROPY_CUTOFF`].
pub fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > ENTROPY_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Binomial coefficient for small arguments.
pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k == 0 || k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
