//! Small dense linear algebra: Jacobi eigensolver, Pfaffians, antisymmetric
//! singular values.
//!
//! Matrices here are tiny (at most a few dozen rows), so everything is plain
//! row-major `Vec<f64>` storage without blocking.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix with `M = -M^T` holding exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymMatrix(Matrix);

impl AntisymMatrix {
    /// Validates exact antisymmetry (zero diagonal, mirrored entries).
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "antisymmetric matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        for i in 0..m.rows {
            for j in i..m.cols {
                if m[(i, j)] != -m[(j, i)] {
                    return Err(Error::domain(format!(
                        "entries ({i},{j}) and ({j},{i}) are not negatives of each other"
                    )));
                }
            }
        }
        Ok(AntisymMatrix(m))
    }

    /// Builds from the strictly upper triangle, filled row by row.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Dimension(format!(
                "{} upper entries for dimension {n}",
                upper.len()
            )));
        }
        let mut m = Matrix::zeros(n, n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap();
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        Ok(AntisymMatrix(m))
    }

    /// Builds from `f(i, j)` evaluated for `i < j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        AntisymMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// `O M O^T`, which stays antisymmetric up to rounding; the result is
    /// re-antisymmetrized from its upper triangle.
    pub fn conjugate(&self, o: &Matrix) -> Result<Self> {
        let t = o.matmul(&self.0)?.matmul(&o.transpose())?;
        Ok(AntisymMatrix::from_upper_fn(self.dim(), |i, j| {
            0.5 * (t[(i, j)] - t[(j, i)])
        }))
    }
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: Matrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-14;

/// Cyclic Jacobi eigensolver for a symmetric matrix.
///
/// Iterates until the off-diagonal Frobenius norm drops below
/// `1e-14 * ||S||_F`. Only the upper triangle is assumed symmetric; the lower
/// one is ignored.
pub fn sym_eigen(s: &Matrix) -> Result<SymEigen> {
    if !s.is_square() {
        return Err(Error::Dimension(format!(
            "eigensolver needs a square matrix, got {}x{}",
            s.rows, s.cols
        )));
    }
    let n = s.rows;
    let mut a = symmetrized(s);
    let mut v = Matrix::identity(n);
    jacobi(n, &mut a.data, Some(&mut v.data))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>> {
    if !s.is_square() {
        return Err(Error::Dimension(format!(
            "eigensolver needs a square matrix, got {}x{}",
            s.rows, s.cols
        )));
    }
    let mut a = symmetrized(s);
    jacobi(s.rows, &mut a.data, None)?;
    let mut values: Vec<f64> = (0..s.rows).map(|i| a[(i, i)]).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn symmetrized(s: &Matrix) -> Matrix {
    Matrix::from_fn(s.rows, s.cols, |i, j| if i <= j { s[(i, j)] } else { s[(j, i)] })
}

fn jacobi(n: usize, a: &mut [f64], mut v: Option<&mut [f64]>) -> Result<()> {
    let fro = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(a) <= JACOBI_REL_TOL * fro {
            return Ok(());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
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
                if let Some(v) = v.as_deref_mut() {
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
    let residual = off(a);
    if residual <= JACOBI_REL_TOL * fro {
        Ok(())
    } else {
        Err(Error::convergence("Jacobi sweeps", 0.0, residual))
    }
}

/// Singular values of an antisymmetric matrix, grouped in +-pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPairs {
    pub n_pairs: usize,
    /// Descending, one entry per pair.
    pub singular_values: Vec<f64>,
    pub nu_zero_modes: usize,
    /// Largest spread between the two eigenvalues of `M^T M` forming a pair.
    pub max_pair_gap: f64,
}

/// Singular values of antisymmetric `M` of size `2n + nu`.
///
/// Diagonalises `M^T M = -M^2`, drops the `nu` smallest eigenvalues, averages
/// the remaining ones in adjacent pairs and takes square roots.
pub fn singular_values_antisym(m: &AntisymMatrix, nu: usize) -> Result<SpectrumPairs> {
    let dim = m.dim();
    if nu > dim || (dim - nu) % 2 != 0 {
        return Err(Error::Parity(format!(
            "dimension {dim} cannot hold {nu} zero modes plus pairs"
        )));
    }
    let mtm = gram(m.matrix());
    let ev = sym_eigenvalues(&mtm)?;
    Ok(pair_up(&ev, nu))
}

/// `M^T M` for a square matrix.
pub(crate) fn gram(m: &Matrix) -> Matrix {
    let n = m.rows;
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in 0..n {
                s += m[(k, i)] * m[(k, j)];
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

fn pair_up(ev: &[f64], nu: usize) -> SpectrumPairs {
    let rest = &ev[nu..];
    let n_pairs = rest.len() / 2;
    let mut sv = Vec::with_capacity(n_pairs);
    let mut gap = 0.0f64;
    for k in 0..n_pairs {
        let (a, b) = (rest[2 * k], rest[2 * k + 1]);
        gap = gap.max((b - a).abs());
        sv.push((0.5 * (a + b)).max(0.0).sqrt());
    }
    sv.sort_by(|a, b| b.total_cmp(a));
    SpectrumPairs {
        n_pairs,
        singular_values: sv,
        nu_zero_modes: nu,
        max_pair_gap: gap,
    }
}

/// Pfaffian by Parlett-Reid tridiagonalisation with partial pivoting.
///
/// Odd dimension is a parity error; see [`pfaffian_or_zero`].
pub fn pfaffian(m: &AntisymMatrix) -> Result<f64> {
    if m.dim() % 2 == 1 {
        return Err(Error::Parity(format!(
            "Pfaffian of odd dimension {}",
            m.dim()
        )));
    }
    let mut work = m.matrix().data.clone();
    Ok(pfaffian_in_place(m.dim(), &mut work))
}

/// Like [`pfaffian`] but returns 0 for odd dimension.
pub fn pfaffian_or_zero(m: &AntisymMatrix) -> f64 {
    if m.dim() % 2 == 1 {
        return 0.0;
    }
    let mut work = m.matrix().data.clone();
    pfaffian_in_place(m.dim(), &mut work)
}

/// Parlett-Reid on a row-major antisymmetric buffer, destroying it.
///
/// The caller guarantees antisymmetry and even `n`.
pub(crate) fn pfaffian_in_place(n: usize, a: &mut [f64]) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    debug_assert!(n % 2 == 0);
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        // pivot the largest entry of column k below the diagonal into row k+1
        let mut kp = k + 1;
        let mut best = a[(k + 1) * n + k].abs();
        for r in k + 2..n {
            let v = a[r * n + k].abs();
            if v > best {
                best = v;
                kp = r;
            }
        }
        if kp != k + 1 {
            for c in 0..n {
                a.swap((k + 1) * n + c, kp * n + c);
            }
            for r in 0..n {
                a.swap(r * n + k + 1, r * n + kp);
            }
            pf = -pf;
        }
        let pivot = a[k * n + k + 1];
        if pivot == 0.0 {
            return 0.0;
        }
        pf *= pivot;
        if k + 2 < n {
            // tau = A[k, k+2:] / A[k, k+1]
            // A[k+2:, k+2:] += tau (x) A[k+2:, k+1] - A[k+2:, k+1] (x) tau
            for i in k + 2..n {
                let tau_i = a[k * n + i] / pivot;
                let col_i = a[i * n + k + 1];
                for j in k + 2..n {
                    let tau_j = a[k * n + j] / pivot;
                    let col_j = a[j * n + k + 1];
                    a[i * n + j] += tau_i * col_j - col_i * tau_j;
                }
            }
        }
        k += 2;
    }
    pf
}

/// Largest dimension accepted by [`pfaffian_recursive`].
pub const PFAFFIAN_RECURSIVE_MAX: usize = 10;

/// Pfaffian by expansion along the first row. Exponential cost, used as a
/// reference for small matrices.
pub fn pfaffian_recursive(m: &AntisymMatrix) -> Result<f64> {
    let n = m.dim();
    if n > PFAFFIAN_RECURSIVE_MAX {
        return Err(Error::SizeLimit(format!(
            "recursive Pfaffian limited to N <= {PFAFFIAN_RECURSIVE_MAX}, got {n}"
        )));
    }
    if n % 2 == 1 {
        return Err(Error::Parity(format!("Pfaffian of odd dimension {n}")));
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(pf_expand(m.matrix(), &idx))
}

fn pf_expand(m: &Matrix, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    let first = idx[0];
    let mut total = 0.0;
    for k in 1..idx.len() {
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(i, _)| i + 1 != k)
            .map(|(_, &v)| v)
            .collect();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * m[(first, idx[k])] * pf_expand(m, &rest);
    }
    total
}

/// Determinant by LU with partial pivoting.
pub fn determinant(m: &Matrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut a = m.data.clone();
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        for r in k + 1..n {
            if a[r * n + k].abs() > a[p * n + k].abs() {
                p = r;
            }
        }
        if a[p * n + k] == 0.0 {
            return Ok(0.0);
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        for r in k + 1..n {
            let f = a[r * n + k] / piv;
            if f != 0.0 {
                for c in k + 1..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
            }
        }
    }
    Ok(det)
}

/// `prod_{a<b} (x_b^2 - x_a^2)`.
pub fn vandermonde_sq(x: &[f64]) -> f64 {
    let mut prod = 1.0;
    for b in 0..x.len() {
        for a in 0..b {
            prod *= x[b] * x[b] - x[a] * x[a];
        }
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_pfaffian() {
        let m = AntisymMatrix::from_upper(2, &[3.5]).unwrap();
        assert_eq!(pfaffian(&m).unwrap(), 3.5);
        assert_eq!(pfaffian_recursive(&m).unwrap(), 3.5);
    }

    #[test]
    fn block_diagonal_pfaffian() {
        let m = AntisymMatrix::from_upper_fn(4, |i, j| match (i, j) {
            (0, 1) => 2.0,
            (2, 3) => -1.5,
            _ => 0.0,
        });
        assert!((pfaffian(&m).unwrap() + 3.0).abs() < 1e-15);
    }

    #[test]
    fn four_by_four_expansion() {
        let (a, b, c, d, e, f) = (1.3, -0.7, 2.1, 0.4, -1.9, 0.8);
        let m = AntisymMatrix::from_upper(4, &[a, b, c, d, e, f]).unwrap();
        let want = a * f - b * e + c * d;
        assert!((pfaffian_recursive(&m).unwrap() - want).abs() < 1e-14);
        assert!((pfaffian(&m).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn odd_dimension() {
        let m = AntisymMatrix::from_upper(3, &[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(pfaffian(&m), Err(Error::Parity(_))));
        assert_eq!(pfaffian_or_zero(&m), 0.0);
    }

    #[test]
    fn recursive_size_limit() {
        let m = AntisymMatrix::from_upper_fn(12, |i, j| (i + 2 * j) as f64);
        assert!(matches!(pfaffian_recursive(&m), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn vandermonde_values() {
        assert_eq!(vandermonde_sq(&[1.0, 2.0]), 3.0);
        assert_eq!(vandermonde_sq(&[0.7]), 1.0);
        assert_eq!(vandermonde_sq(&[1.0, 2.0, 3.0]), 120.0);
    }

    #[test]
    fn eigen_rejects_rectangular() {
        assert!(matches!(
            sym_eigen(&Matrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn eigen_of_known_matrix() {
        let s = Matrix::from_vec(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = sym_eigen(&s).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_spectrum() {
        let m = AntisymMatrix::from_upper_fn(5, |_, _| 0.0);
        let sp = singular_values_antisym(&m, 1).unwrap();
        assert_eq!(sp.singular_values, vec![0.0, 0.0]);
        assert!(matches!(
            singular_values_antisym(&m, 0),
            Err(Error::Parity(_))
        ));
    }
}
