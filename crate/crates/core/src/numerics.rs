//! Dense complex linear algebra for small quantum systems.
//!
//! Everything here works on [`ComplexMatrix`], a thin wrapper over a dynamically
//! sized `nalgebra` matrix. Entries always cross the API boundary in row-major
//! order so that serialized matrices are byte-for-byte reproducible.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Maximum tolerated `|m - m^dag|` entry for a matrix to count as Hermitian.
pub const TOL_HERM: f64 = 1e-9;
/// Eigenvalues down to `-TOL_PSD` are accepted as zero.
pub const TOL_PSD: f64 = 1e-9;
/// Reconstruction tolerance for spectral decompositions.
pub const TOL_RECON: f64 = 1e-10;
/// Eigenvalues below this (relative to `max(1, lambda_max)`) are roundoff and get
/// zeroed before taking square roots. Keeping them would put `sqrt(1e-16) ~ 1e-8`
/// of noise into every fidelity involving a rank-deficient state.
pub const SPECTRAL_FLOOR: f64 = 1e-13;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix with explicit row and column counts.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if let Some(index) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(rows.len(), cols, entries)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// `|v><v|` for an arbitrary (not necessarily normalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        Self::outer_pair(v, v)
    }

    /// `|u><v|`.
    pub fn outer_pair(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Column matrix holding `v`.
    pub fn column(v: &[C64]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i])
    }

    pub(crate) fn from_nalgebra(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub(crate) fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.inner[(row, col)] = value;
    }

    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn column_vec(&self, col: usize) -> Vec<C64> {
        self.inner.column(col).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.inner.shape() != other.inner.shape() {
            return f64::INFINITY;
        }
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U^dag U - I|`.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.cols()))
    }

    /// `v^dag M v` for a vector `v`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.rows() {
            let mut row = ZERO;
            for (j, vj) in v.iter().enumerate().take(self.cols()) {
                row += self.inner[(i, j)] * vj;
            }
            acc += v[i].conj() * row;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.inner[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Sub-block of `rows` starting at `row_offset`, all columns.
    pub fn row_block(&self, row_offset: usize, rows: usize) -> Self {
        Self {
            inner: self.inner.rows(row_offset, rows).into_owned(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, " ")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "matrix product shape mismatch");
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

/// Ordered subsystem dimensions of a composite space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Shape("at least one subsystem is required".into()));
        }
        if dims.contains(&0) {
            return Err(Error::Shape(format!("subsystem dimensions must be positive: {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn bipartite(first: usize, second: usize) -> Result<Self> {
        Self::new(vec![first, second])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }
}

/// Kronecker product: `out[(i*rb + k, j*cb + l)] = a[i,j] * b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_nalgebra(a.as_nalgebra().kronecker(b.as_nalgebra()))
}

/// Traces out every factor of `shape` not listed in `keep`.
///
/// The kept factors appear in the result in ascending order regardless of how
/// `keep` is ordered.
pub fn partial_trace(m: &ComplexMatrix, shape: &SubsystemShape, keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if shape.total() != m.rows() {
        return Err(Error::DimensionMismatch {
            context: "partial trace shape",
            expected: shape.total(),
            found: m.rows(),
        });
    }
    let n = shape.len();
    let mut kept = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::Shape(format!("keep index {k} out of range for {n} subsystems")));
        }
        kept[k] = true;
    }

    let dims = shape.dims();
    // strides of the row-major multi-index
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kept_dim: usize = (0..n).filter(|&i| kept[i]).map(|i| dims[i]).product();
    let traced_dim = shape.total() / kept_dim;

    // full index for every (kept, traced) pair
    let offsets = |flat: usize, select: bool| -> usize {
        let mut rem = flat;
        let mut offset = 0;
        for i in (0..n).rev() {
            if kept[i] == select {
                offset += (rem % dims[i]) * strides[i];
                rem /= dims[i];
            }
        }
        offset
    };
    let kept_offsets: Vec<usize> = (0..kept_dim).map(|k| offsets(k, true)).collect();
    let traced_offsets: Vec<usize> = (0..traced_dim).map(|t| offsets(t, false)).collect();

    let inner = m.as_nalgebra();
    let out = DMatrix::from_fn(kept_dim, kept_dim, |r, c| {
        traced_offsets
            .iter()
            .map(|&t| inner[(kept_offsets[r] + t, kept_offsets[c] + t)])
            .sum()
    });
    Ok(ComplexMatrix::from_nalgebra(out))
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V f(diag(lambda)) V^dag`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.vectors.as_nalgebra();
        let n = v.nrows();
        let mut scaled = v.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        ComplexMatrix::from_nalgebra(scaled * v.adjoint())
    }
}

pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    let deviation = m.hermitian_deviation();
    if deviation > TOL_HERM {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(herm_eig_unchecked(m))
}

/// Eigendecomposition of the Hermitian part of `m`, skipping the Hermiticity check.
pub(crate) fn herm_eig_unchecked(m: &ComplexMatrix) -> HermEig {
    let a = m.as_nalgebra();
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermEig {
        values,
        vectors: ComplexMatrix::from_nalgebra(vectors),
    }
}

/// Principal square root of a positive semidefinite matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -TOL_PSD {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(sqrt_from_eig(&eig))
}

pub(crate) fn sqrt_from_eig(eig: &HermEig) -> ComplexMatrix {
    let floor = SPECTRAL_FLOOR * eig.values.first().copied().unwrap_or(0.0).max(1.0);
    eig.reconstruct_with(|x| if x <= floor { 0.0 } else { x.sqrt() })
}

/// Singular values, unordered.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    m.as_nalgebra().singular_values().iter().copied().collect()
}

/// Orthonormalizes the columns of `m` by modified Gram-Schmidt with one
/// re-orthogonalization pass. Returns `None` if the columns are numerically
/// dependent.
///
/// Equivalent to the `Q` factor of a QR decomposition whose `R` has a real
/// positive diagonal.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let rows = m.rows();
    let mut columns: Vec<Vec<C64>> = (0..m.cols()).map(|j| m.column_vec(j)).collect();
    for j in 0..columns.len() {
        let scale = norm(&columns[j]);
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = columns.split_at_mut(j);
                project_out(&mut rest[0], &done[i]);
            }
        }
        let n = norm(&columns[j]);
        if scale == 0.0 || n.is_nan() || n <= 1e-10 * scale {
            return None;
        }
        columns[j].iter_mut().for_each(|z| *z /= n);
    }
    Some(ComplexMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i]))
}

/// Extends orthonormal `columns` to an orthonormal basis of `C^dim`, drawing
/// candidates from the canonical basis in order.
pub fn complete_basis(columns: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = columns.to_vec();
    let mut extra = Vec::new();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        for _ in 0..2 {
            for b in &basis {
                project_out(&mut v, b);
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|z| *z /= n);
            basis.push(v.clone());
            extra.push(v);
        }
    }
    extra
}

fn project_out(v: &mut [C64], against: &[C64]) {
    let overlap: C64 = against.iter().zip(v.iter()).map(|(a, x)| a.conj() * x).sum();
    for (x, a) in v.iter_mut().zip(against) {
        *x -= overlap * a;
    }
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Deterministic generator for a seed; every sampler in the crate goes through this.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Ginibre matrix, filled row-major.
pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::from_row_major(rows, cols, entries).expect("gaussian entries are finite")
}

/// Haar-distributed isometry `C^cols -> C^rows` (QR of a Ginibre matrix with
/// the `R` diagonal made real positive).
pub fn haar_isometry<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    loop {
        let g = gaussian_matrix(rows, cols, rng);
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}
