//! Small dense complex matrices and a cyclic Jacobi eigenvalue solver.
//!
//! Everything here is sized for the 2x2 .. 16x16 problems that appear in
//! qubit channel analysis. Hermitian eigenvalues are computed by running real
//! Jacobi sweeps on the 2n x 2n symmetric embedding
//!
//! ```text
//! M = A + iB   ->   [ A  -B ]
//!                   [ B   A ]
//! ```
//!
//! whose spectrum is the spectrum of `M` with every eigenvalue doubled.
//! Embeddings up to 8x8 (i.e. 4x4 complex input) run on a stack buffer.

use std::fmt;
use std::ops::{Index, IndexMut};

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for `M[i][j] == conj(M[j][i])`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default slack for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-10;
/// Jacobi sweep cap; exceeding it is reported as a convergence failure.
pub const MAX_SWEEPS: usize = 100;

const STACK_DIM: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli matrices indexed 0..=3 as (identity, sigma_x, sigma_y, sigma_z).
pub const PAULI: [[[Complex64; 2]; 2]; 4] = [
    [[ONE, ZERO], [ZERO, ONE]],
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]],
];

/// Pauli matrix `k` (0 = identity) as a [`ComplexMatrix`].
pub fn pauli(k: usize) -> ComplexMatrix {
    let p = PAULI[k];
    ComplexMatrix::from_array(p)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_array<const N: usize>(a: [[Complex64; N]; N]) -> Self {
        Self {
            rows: N,
            cols: N,
            data: a.iter().flatten().copied().collect(),
        }
    }

    /// Square matrix from real entries in row-major nested slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare(n, r.len()));
            }
            data.extend(r.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Ok(Self { rows: n, cols: n, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare(self.rows, self.cols))
        }
    }

    pub fn trace(&self) -> Result<Complex64> {
        let n = self.require_square()?;
        Ok((0..n).map(|i| self[(i, i)]).sum())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &ComplexMatrix) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Largest `|M[i][j] - conj(M[j][i])|`.
    pub fn hermiticity_defect(&self) -> Result<f64> {
        let n = self.require_square()?;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Ok(worst)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect().is_ok_and(|d| d <= tol)
    }

    /// Largest absolute entry difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Real eigenvalues sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.0.first().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.0.last().copied()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Cyclic Jacobi on a row-major real symmetric `n x n` buffer. On success the
/// eigenvalues sit on the diagonal.
fn jacobi_in_place(a: &mut [f64], n: usize) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 || n < 2 {
        return Ok(());
    }
    let threshold = f64::EPSILON * frob;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if (2.0 * off).sqrt() <= threshold {
            return Ok(());
        }

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

fn check_symmetric(a: &[f64], n: usize) -> Result<()> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{n}x{n} symmetric matrix needs {} entries, got {}",
            n * n,
            a.len()
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((a[i * n + j] - a[j * n + i]).abs());
        }
    }
    if worst > HERMITIAN_TOL {
        return Err(Error::NotHermitian(worst));
    }
    Ok(())
}

/// Eigenvalues of a real symmetric `n x n` matrix given row-major.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Spectrum> {
    check_symmetric(a, n)?;
    let mut buf = a.to_vec();
    jacobi_in_place(&mut buf, n)?;
    Ok(Spectrum::from_unsorted((0..n).map(|i| buf[i * n + i]).collect()))
}

/// Allocation-free 3x3 real symmetric eigenvalues, descending.
pub fn symmetric_eigenvalues3(m: &[[f64; 3]; 3]) -> Result<[f64; 3]> {
    let mut buf = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            buf[i * 3 + j] = m[i][j];
        }
    }
    check_symmetric(&buf, 3)?;
    jacobi_in_place(&mut buf, 3)?;
    let mut ev = [buf[0], buf[4], buf[8]];
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.require_square()?;
    let defect = m.hermiticity_defect()?;
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let dim = 2 * n;
    let mut stack = [0.0f64; STACK_DIM * STACK_DIM];
    let mut heap = Vec::new();
    let buf: &mut [f64] = if dim <= STACK_DIM {
        &mut stack[..dim * dim]
    } else {
        heap.resize(dim * dim, 0.0);
        &mut heap
    };
    for i in 0..n {
        for j in 0..n {
            // symmetrize away sub-tolerance noise
            let re = 0.5 * (m[(i, j)].re + m[(j, i)].re);
            let im = 0.5 * (m[(i, j)].im - m[(j, i)].im);
            buf[i * dim + j] = re;
            buf[(i + n) * dim + (j + n)] = re;
            buf[i * dim + (j + n)] = -im;
            buf[(i + n) * dim + j] = im;
        }
    }
    jacobi_in_place(buf, dim)?;
    let mut doubled: Vec<f64> = (0..dim).map(|i| buf[i * dim + i]).collect();
    doubled.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum(doubled.into_iter().step_by(2).collect()))
}

/// True iff the smallest eigenvalue of Hermitian `m` is at least `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    let spectrum = hermitian_eigenvalues(m)?;
    Ok(spectrum.min().is_none_or(|min| min >= -tol))
}
