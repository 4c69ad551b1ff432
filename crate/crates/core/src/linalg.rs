//! Dense complex Hermitian and real matrix kernels.
//!
//! Everything here is sized for the small matrices this crate works with
//! (observables on a handful of qubits, SDP blocks of dimension at most a few
//! dozen), so the algorithms favour robustness over asymptotic speed: the
//! eigensolver is a cyclic complex Jacobi method and the real inverse is plain
//! Gaussian elimination with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Tolerance for accepting a matrix as Hermitian, relative to `max(1, max|a_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Negative eigenvalues smaller than this in magnitude are treated as zero.
pub const EIGEN_CLAMP: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, r) in dst.iter_mut().zip(row) {
                    *d += a * r;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `self += s * rhs`
    pub fn axpy(&mut self, s: f64, rhs: &Self) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `Re Tr(self * rhs)` without forming the product.
    pub fn re_trace_product(&self, rhs: &Self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                let b = rhs.data[k * n + i];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(A + A*) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (a, b) = (self.n, rhs.n);
        Self::from_fn(a * b, |i, j| self[(i / b, j / b)] * rhs[(i % b, j % b)])
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// A d×d complex self-adjoint matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity and symmetrizes away round-off.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::Empty { what: "matrix" });
        }
        let asym = m.max_asymmetry();
        if asym > HERMITIAN_TOL * m.max_abs().max(1.0) || !asym.is_finite() {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Builds from separate real and imaginary parts, row-major.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let n = re.len();
        if im.len() != n {
            return Err(Error::ShapeMismatch {
                what: "imaginary part rows",
                expected: n,
                found: im.len(),
            });
        }
        for row in re.iter().chain(im) {
            if row.len() != n {
                return Err(Error::ShapeMismatch {
                    what: "matrix row length",
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Self::new(CMatrix::from_fn(n, |i, j| Complex64::new(re[i][j], im[i][j])))
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let zeros: Vec<Vec<f64>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
        Self::from_parts(rows, &zeros)
    }

    /// Takes the Hermitian part of an arbitrary square matrix; never fails.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self(CMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::zero()
            }
        }))
    }

    /// Rank-one projector `|v><v|` (v is not normalized).
    pub fn outer(v: &[Complex64]) -> Self {
        Self(CMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_cmatrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_cmatrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn re_rows(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.0[(i, j)].re).collect()).collect()
    }

    pub fn im_rows(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.0[(i, j)].im).collect()).collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self(self.0.add(&rhs.0))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self(self.0.sub(&rhs.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn axpy(&mut self, s: f64, rhs: &Self) {
        self.0.axpy(s, &rhs.0)
    }

    /// Real linear combination `Σ c_k H_k`; all terms must share a dimension.
    pub fn combination<'a>(dim: usize, terms: impl IntoIterator<Item = (f64, &'a Self)>) -> Self {
        let mut acc = Self::zeros(dim);
        for (c, h) in terms {
            if c != 0.0 {
                acc.axpy(c, h);
            }
        }
        acc
    }

    pub fn matmul(&self, rhs: &Self) -> CMatrix {
        self.0.matmul(&rhs.0)
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        Self(self.0.kron(&rhs.0))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Hilbert–Schmidt inner product `Tr(A B)`, real for Hermitian arguments.
    pub fn inner(&self, rhs: &Self) -> f64 {
        self.0.re_trace_product(&rhs.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    /// Expectation `<v|H|v>`.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let hv = self.0.mul_vec(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

/// Eigendecomposition `H = V diag(λ) V*` with eigenvalues sorted descending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: CMatrix,
}

impl Eigen {
    /// Reassembles `V diag(f(λ)) V*`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let m = CMatrix::from_fn(n, |i, j| {
            let mut acc = Complex64::zero();
            for k in 0..n {
                if fv[k] != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * fv[k];
                }
            }
            acc
        });
        HermitianMatrix::from_hermitian_part(&m)
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<Eigen> {
    let n = h.dim();
    let mut a = h.0.hermitian_part();
    let mut v = CMatrix::identity(n);

    let scale = a.frobenius_norm();
    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while off > 4.0 * f64::EPSILON * scale && off > f64::MIN_POSITIVE {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        let next = off_diagonal_norm(&a);
        if next >= off {
            // Rotations only ever shrink the off-diagonal mass, so a stall
            // means the round-off floor has been reached.
            if next <= 1e-10 * scale {
                break;
            }
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: next,
            });
        }
        off = next;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase that makes the (p, q) entry real and positive.
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.dim();
    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A <- G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::zero();
    a[(q, p)] = Complex64::zero();
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Matrix absolute value `|H| = V diag(|λ|) V*`.
pub fn matrix_abs(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = hermitian_eig(h)?;
    Ok(e.map(f64::abs))
}

/// Positive part `H⁺`, so that `H = H⁺ - (-H)⁺` and `|H| = H⁺ + (-H)⁺`.
pub fn positive_part(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = hermitian_eig(h)?;
    Ok(e.map(|l| if l > 0.0 { l } else { 0.0 }))
}

/// Hermitian sign `V diag(sign λ) V*` with `sign(0) = +1`.
pub fn hermitian_sign(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = hermitian_eig(h)?;
    Ok(e.map(|l| if l < 0.0 { -1.0 } else { 1.0 }))
}

/// Projects onto the PSD cone by zeroing negative eigenvalues.
pub fn psd_projection(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    positive_part(h)
}

pub fn lambda_max(h: &HermitianMatrix) -> Result<f64> {
    Ok(hermitian_eig(h)?.values[0])
}

pub fn lambda_min(h: &HermitianMatrix) -> Result<f64> {
    let e = hermitian_eig(h)?;
    Ok(*e.values.last().expect("dim >= 1"))
}

/// Operator (Schatten-∞) norm `max |λ|`.
pub fn operator_norm(h: &HermitianMatrix) -> Result<f64> {
    let e = hermitian_eig(h)?;
    Ok(e.values.iter().fold(0.0f64, |m, l| m.max(l.abs())))
}

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(m: &CMatrix) -> Option<CMatrix> {
    let n = m.dim();
    let mut l = CMatrix::zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return None;
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_triangular_inverse(l: &CMatrix) -> CMatrix {
    let n = l.dim();
    let mut inv = CMatrix::zeros(n);
    for j in 0..n {
        inv[(j, j)] = Complex64::new(1.0, 0.0) / l[(j, j)];
        for i in (j + 1)..n {
            let mut s = Complex64::zero();
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Real matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Empty { what: "matrix" });
        }
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch {
                    what: "matrix row length",
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
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

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.cols, rhs.rows);
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `Mᵀ v`
    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)] * v[i]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Determinant via partial-pivoting LU; zero for non-square input.
    pub fn determinant(&self) -> f64 {
        if !self.is_square() {
            return 0.0;
        }
        match lu_inverse(self) {
            Ok((_, det)) => det,
            Err(Error::Singular { det }) => det,
            Err(_) => 0.0,
        }
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Singularity threshold: `|det| < 1e-12 · (max|m_ij|)^N`.
pub fn singularity_threshold(m: &RealMatrix) -> f64 {
    1e-12 * m.max_abs().powi(m.rows() as i32)
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn real_inverse(m: &RealMatrix) -> Result<RealMatrix> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            what: "square matrix columns",
            expected: m.rows(),
            found: m.cols(),
        });
    }
    lu_inverse(m).map(|(inv, _)| inv)
}

fn lu_inverse(m: &RealMatrix) -> Result<(RealMatrix, f64)> {
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = RealMatrix::identity(n);
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .expect("non-empty range");
        if a[(pivot, col)] == 0.0 {
            return Err(Error::Singular { det: 0.0 });
        }
        if pivot != col {
            for j in 0..n {
                a.data.swap(pivot * n + j, col * n + j);
                inv.data.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for j in 0..n {
            a[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[(i, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[(i, j)] -= f * a[(col, j)];
                inv[(i, j)] -= f * inv[(col, j)];
            }
        }
    }
    if det.abs() < singularity_threshold(m) || !det.is_finite() {
        return Err(Error::Singular { det: det.abs() });
    }
    Ok((inv, det))
}

/// Solves `A x = b` for symmetric positive definite `A` (row-major, n×n).
/// Returns `None` when the Cholesky factorization breaks down.
pub(crate) fn spd_solve(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return None;
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Some(y)
}

/// Orthonormal basis of the d×d Hermitian matrices under `Tr(AB)`.
///
/// The first element is `I/√d`; the remaining `d² - 1` are traceless
/// (generalized Gell-Mann matrices, normalized).
pub fn hermitian_basis(d: usize) -> Vec<HermitianMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    basis.push(HermitianMatrix::identity(d).scale(1.0 / (d as f64).sqrt()));
    let r = core::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = CMatrix::zeros(d);
            s[(j, k)] = Complex64::new(r, 0.0);
            s[(k, j)] = Complex64::new(r, 0.0);
            basis.push(HermitianMatrix(s));
            let mut a = CMatrix::zeros(d);
            a[(j, k)] = Complex64::new(0.0, -r);
            a[(k, j)] = Complex64::new(0.0, r);
            basis.push(HermitianMatrix(a));
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for v in diag.iter_mut().take(l) {
            *v = norm;
        }
        diag[l] = -(l as f64) * norm;
        basis.push(HermitianMatrix::diagonal(&diag));
    }
    basis
}

/// Coordinates of `h` in [`hermitian_basis`].
pub fn basis_coordinates(h: &HermitianMatrix, basis: &[HermitianMatrix]) -> Vec<f64> {
    basis.iter().map(|b| b.inner(h)).collect()
}
