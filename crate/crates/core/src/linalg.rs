//! Small dense matrices with the symmetric spectral machinery the bound
//! checks rely on: cyclic Jacobi eigen-decomposition, spectral inverses and
//! square roots, the Loewner-order test and the Kailath form of the Woodbury
//! identity.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use libm::{fabs, sqrt};

use crate::error::{ensure_finite, Error, Result};

/// Off-diagonal Frobenius norm, relative to the full norm, at which Jacobi stops.
pub const JACOBI_TOLERANCE: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Inverses are refused once the condition estimate exceeds this.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    /// Single column matrix.
    pub fn column(v: &[f64]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Single row matrix.
    pub fn row(v: &[f64]) -> Self {
        Matrix { rows: 1, cols: v.len(), data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v)).collect())
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: rhs.rows * rhs.cols });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|a| a * a).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(fabs(*a)))
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| fabs(self.get(i, j))).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Inverse of a general square matrix by Gauss-Jordan elimination with
    /// partial pivoting. `factor` names the matrix in the singularity error.
    pub fn inverse(&self, factor: &'static str) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        ensure_finite(&self.data, factor)?;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        let scale = self.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular { factor, condition: f64::INFINITY });
        }
        for col in 0..n {
            let pivot_row =
                (col..n).max_by(|&x, &y| fabs(a[x * n + col]).total_cmp(&fabs(a[y * n + col]))).unwrap_or(col);
            let pivot = a[pivot_row * n + col];
            if fabs(pivot) <= f64::EPSILON * scale {
                return Err(Error::Singular { factor, condition: f64::INFINITY });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                    inv.swap(col * n + j, pivot_row * n + j);
                }
            }
            let p = 1.0 / pivot;
            for j in 0..n {
                a[col * n + j] *= p;
                inv[col * n + j] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    inv[r * n + j] -= f * inv[col * n + j];
                }
            }
        }
        let inv = Matrix { rows: n, cols: n, data: inv };
        let condition = self.norm_1() * inv.norm_1();
        if !condition.is_finite() || condition > CONDITION_LIMIT {
            return Err(Error::Singular { factor, condition });
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

/// Square symmetric matrix. Every constructor symmetrizes its input, so the
/// stored entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Builds from row-major entries, replacing `M` by `(M + Mᵀ)/2`.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        SymMatrix::from_matrix(Matrix::from_vec(dim, dim, data)?)
    }

    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        if m.rows == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut m = m;
        symmetrize(&mut m);
        Ok(SymMatrix(m))
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        SymMatrix::from_matrix(Matrix::from_rows(rows)?)
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix(Matrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(Matrix::identity(dim))
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        SymMatrix(Matrix::identity(dim).scale(s))
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in d.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        SymMatrix(m)
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        let n = v.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * v[j];
            }
        }
        SymMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0.data
    }

    pub fn is_finite(&self) -> bool {
        self.0.data.iter().all(|v| v.is_finite())
    }

    pub fn add(&self, rhs: &SymMatrix) -> Result<SymMatrix> {
        Ok(SymMatrix(self.0.add(&rhs.0)?))
    }

    pub fn sub(&self, rhs: &SymMatrix) -> Result<SymMatrix> {
        Ok(SymMatrix(self.0.sub(&rhs.0)?))
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix(self.0.scale(s))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.0.mul_vec(v)
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &[f64]) -> Result<f64> {
        Ok(dot(v, &self.mul_vec(v)?))
    }

    /// `S M S` for symmetric `S` (self) and `M`, symmetrized.
    pub fn congruence(&self, middle: &SymMatrix) -> Result<SymMatrix> {
        SymMatrix::from_matrix(self.0.mul(&middle.0)?.mul(&self.0)?)
    }

    /// `S v vᵀ S` for symmetric `S`.
    pub fn outer_congruence(&self, v: &[f64]) -> Result<SymMatrix> {
        Ok(SymMatrix::outer(&self.mul_vec(v)?))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn eigen(&self) -> Result<SpectralDecomposition> {
        sym_eigen(self)
    }

    /// `(min, max)` eigenvalue.
    pub fn eigen_range(&self) -> Result<(f64, f64)> {
        let e = sym_eigen(self)?;
        Ok((e.min(), e.max()))
    }

    /// Spectral inverse. Refused when an eigenvalue is zero or the ratio of
    /// extreme eigenvalue magnitudes exceeds [`CONDITION_LIMIT`].
    pub fn inverse(&self, factor: &'static str) -> Result<SymMatrix> {
        sym_eigen(self)?.inverse(factor)
    }

    /// Principal square root of a PSD matrix. Eigenvalues down to
    /// `-1e-12·(1 + max|λ|)` are treated as zero.
    pub fn sqrt_psd(&self, what: &'static str) -> Result<SymMatrix> {
        let e = sym_eigen(self)?;
        let floor = -1e-12 * (1.0 + e.spectral_radius());
        if e.min() < floor {
            return Err(Error::NotPositiveSemidefinite { what, min_eigenvalue: e.min() });
        }
        Ok(e.map(|l| sqrt(l.max(0.0))))
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

fn symmetrize(m: &mut Matrix) {
    let n = m.rows;
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.data[i * n + j] + m.data[j * n + i]);
            m.data[i * n + j] = avg;
            m.data[j * n + i] = avg;
        }
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as the
/// columns of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: Matrix,
}

impl SpectralDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn spectral_radius(&self) -> f64 {
        fabs(self.min()).max(fabs(self.max()))
    }

    /// `Q f(Λ) Qᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.eigenvalues.len();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|l| f(*l)).collect();
        let q = &self.basis;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|k| q.get(i, k) * fl[k] * q.get(j, k)).sum();
                out.data[i * n + j] = s;
                out.data[j * n + i] = s;
            }
        }
        SymMatrix(out)
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|l| l)
    }

    pub fn inverse(&self, factor: &'static str) -> Result<SymMatrix> {
        let smallest = self.eigenvalues.iter().fold(f64::INFINITY, |m, l| m.min(fabs(*l)));
        let condition = self.spectral_radius() / smallest;
        if smallest == 0.0 || !condition.is_finite() || condition > CONDITION_LIMIT {
            return Err(Error::Singular { factor, condition });
        }
        Ok(self.map(|l| 1.0 / l))
    }
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius
/// norm falls below [`JACOBI_TOLERANCE`] times the full norm.
pub fn sym_eigen(m: &SymMatrix) -> Result<SpectralDecomposition> {
    ensure_finite(m.as_slice(), "symmetric matrix")?;
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut v = Matrix::identity(n).data;
    let total = m.frobenius_norm();

    if total > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a, n) <= JACOBI_TOLERANCE * total {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + sqrt(theta * theta + 1.0))
                    } else {
                        -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    };
                    let c = 1.0 / sqrt(t * t + 1.0);
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
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues = order.iter().map(|&i| a[i * n + i]).collect();
    let mut basis = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            basis.data[row * n + col] = v[row * n + src];
        }
    }
    Ok(SpectralDecomposition { eigenvalues, basis })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sqrt(s)
}

/// `(A + BC)⁻¹` computed as `A⁻¹ − A⁻¹B(I + CA⁻¹B)⁻¹CA⁻¹`.
///
/// `A` is inverted spectrally and the inner `M×M` factor by pivoted
/// elimination; either one failing the condition limit yields
/// [`Error::Singular`] naming it (`"A"` or `"I + C A^-1 B"`).
pub fn kailath_inverse(a: &SymMatrix, b: &Matrix, c: &Matrix) -> Result<Matrix> {
    let n = a.dim();
    if b.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.rows() });
    }
    if c.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.cols() });
    }
    if c.rows() != b.cols() {
        return Err(Error::DimensionMismatch { expected: b.cols(), found: c.rows() });
    }
    ensure_finite(b.as_slice(), "B")?;
    ensure_finite(c.as_slice(), "C")?;
    let a_inv = a.inverse("A")?.into_matrix();
    let a_inv_b = a_inv.mul(b)?;
    let c_a_inv = c.mul(&a_inv)?;
    let inner = Matrix::identity(b.cols()).add(&c.mul(&a_inv_b)?)?;
    let inner_inv = inner.inverse("I + C A^-1 B")?;
    let correction = a_inv_b.mul(&inner_inv)?.mul(&c_a_inv)?;
    a_inv.sub(&correction)
}

/// Loewner-order test `m1 ⪯ m2`: true when `λ_min(m2 − m1) ≥ −tol·(1 + ρ(m2 − m1))`.
pub fn psd_order(m1: &SymMatrix, m2: &SymMatrix, tol: f64) -> Result<bool> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch { expected: m1.dim(), found: m2.dim() });
    }
    let e = sym_eigen(&m2.sub(m1)?)?;
    Ok(e.min() >= -tol * (1.0 + e.spectral_radius()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    sqrt(dot(v, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        fabs(a - b) <= tol
    }

    #[test]
    fn diagonal_matrix_eigen() {
        let e = sym_eigen(&SymMatrix::diagonal(&[5.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 5.0]);
        // columns are ±e2, ±e1
        assert!(close(fabs(e.basis.get(1, 0)), 1.0, 1e-15));
        assert!(close(fabs(e.basis.get(0, 1)), 1.0, 1e-15));
    }

    #[test]
    fn swap_matrix_eigen() {
        let m = SymMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = sym_eigen(&m).unwrap();
        assert!(close(e.eigenvalues[0], -1.0, 1e-14));
        assert!(close(e.eigenvalues[1], 1.0, 1e-14));
    }

    #[test]
    fn identity_eigen() {
        let e = sym_eigen(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn non_finite_rejected() {
        let m = SymMatrix::new(2, vec![1.0, f64::NAN, f64::NAN, 1.0]).unwrap();
        assert!(matches!(sym_eigen(&m), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn constructor_symmetrizes() {
        let m = SymMatrix::new(2, vec![1.0, 2.0, 4.0, 1.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
        assert!(matches!(SymMatrix::new(0, vec![]), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn kailath_sherman_morrison_case() {
        let a = SymMatrix::identity(2);
        let b = Matrix::column(&[1.0, 0.0]);
        let c = Matrix::row(&[1.0, 0.0]);
        let inv = kailath_inverse(&a, &b, &c).unwrap();
        let expected = [0.5, 0.0, 0.0, 1.0];
        for (x, y) in inv.as_slice().iter().zip(expected) {
            assert!(close(*x, y, 1e-15));
        }
    }

    #[test]
    fn kailath_zero_update() {
        let a = SymMatrix::scaled_identity(2, 2.0);
        let inv = kailath_inverse(&a, &Matrix::zeros(2, 2), &Matrix::zeros(2, 2)).unwrap();
        assert_eq!(inv.as_slice(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn kailath_names_singular_factor() {
        let a = SymMatrix::diagonal(&[1.0, 0.0]);
        let err = kailath_inverse(&a, &Matrix::zeros(2, 1), &Matrix::zeros(1, 2)).unwrap_err();
        assert!(matches!(err, Error::Singular { factor: "A", .. }));

        // I + C A^-1 B = 1 + (-1) = 0
        let a = SymMatrix::identity(1);
        let err = kailath_inverse(&a, &Matrix::column(&[1.0]), &Matrix::row(&[-1.0])).unwrap_err();
        assert!(matches!(err, Error::Singular { factor: "I + C A^-1 B", .. }));
    }

    #[test]
    fn psd_order_examples() {
        let i = SymMatrix::identity(3);
        let two = SymMatrix::scaled_identity(3, 2.0);
        assert!(psd_order(&i, &two, 1e-12).unwrap());
        assert!(!psd_order(&two, &i, 1e-12).unwrap());
        assert!(psd_order(&i, &i, 1e-12).unwrap());
        assert!(matches!(psd_order(&i, &SymMatrix::identity(2), 1e-12), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sqrt_and_inverse() {
        let m = SymMatrix::from_rows(&[&[4.0, 1.0], &[1.0, 3.0]]).unwrap();
        let r = m.sqrt_psd("m").unwrap();
        let back = r.congruence(&SymMatrix::identity(2)).unwrap();
        for (x, y) in back.as_slice().iter().zip(m.as_slice()) {
            assert!(close(*x, *y, 1e-13));
        }
        let inv = m.inverse("m").unwrap();
        let prod = m.as_matrix().mul(inv.as_matrix()).unwrap();
        for (x, y) in prod.as_slice().iter().zip(Matrix::identity(2).as_slice()) {
            assert!(close(*x, *y, 1e-14));
        }
        let neg = SymMatrix::diagonal(&[1.0, -0.5]);
        assert!(matches!(neg.sqrt_psd("neg"), Err(Error::NotPositiveSemidefinite { .. })));
    }

    #[test]
    fn general_inverse_rejects_singular() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(m.inverse("m"), Err(Error::Singular { .. })));
    }
}
