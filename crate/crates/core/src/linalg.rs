//! Small dense linear algebra: the matrices here are at most a few dozen rows
//! (configuration spaces of a handful of bodies in dimension ≤ 3).

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Planar rotation by `angle` radians.
    pub fn rotation2(angle: S) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_rows(2, 2, vec![c, -s, s, c])
    }

    pub fn diag(values: &[S]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Block-diagonal sum `a ⊕ b`.
    pub fn direct_sum(a: &Self, b: &Self) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for r in 0..a.rows {
            for c in 0..a.cols {
                m[(r, c)] = a[(r, c)];
            }
        }
        for r in 0..b.rows {
            for c in 0..b.cols {
                m[(a.rows + r, a.cols + c)] = b[(r, c)];
            }
        }
        m
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

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shapes");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == S::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] = out[(r, c)] + a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shapes");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    /// Writes `self · v` into `out` without allocating.
    pub fn mul_vec_into(&self, v: &[S], out: &mut [S]) {
        for (r, o) in out.iter_mut().enumerate().take(self.rows) {
            *o = dot(self.row(r), v);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| *a * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> S {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, a| m.max(a.abs()))
    }

    /// `max |QᵀQ − I|`.
    pub fn orthogonality_defect(&self) -> S {
        let qtq = self.transpose().mul(self);
        qtq.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn is_identity(&self, tol: S) -> bool {
        self.is_square() && self.max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = S::one();
        for k in 0..n {
            let mut p = k;
            for r in k + 1..n {
                if a[r * n + k].abs() > a[p * n + k].abs() {
                    p = r;
                }
            }
            if a[p * n + k] == S::zero() {
                return S::zero();
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det = det * pivot;
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                for c in k..n {
                    a[r * n + c] = a[r * n + c] - f * a[k * n + c];
                }
            }
        }
        det
    }

    /// Symmetrized copy `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        let half = S::lit(0.5);
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)]) * half)
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        Self::from_fn(rows, columns.len(), |r, c| columns[c][r])
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + *x * *y)
}

#[inline]
pub fn norm<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * *xi;
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second component.
pub fn symmetric_eigen<S: Scalar>(a: &Mat<S>) -> (Vec<S>, Mat<S>) {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.symmetrized();
    let mut v = Mat::identity(n);
    let eps = S::epsilon();
    for _sweep in 0..100 {
        let mut off = S::zero();
        let mut total = S::zero();
        for r in 0..n {
            for c in 0..n {
                let x = m[(r, c)] * m[(r, c)];
                total = total + x;
                if r != c {
                    off = off + x;
                }
            }
        }
        if off <= eps * eps * total || off == S::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= S::min_positive_value() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (S::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Orthonormal basis of the range of a symmetric positive semidefinite
/// matrix: eigenvectors whose eigenvalue exceeds `threshold`.
pub fn psd_range_basis<S: Scalar>(a: &Mat<S>, threshold: S) -> Vec<Vec<S>> {
    let (values, vectors) = symmetric_eigen(a);
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > threshold)
        .map(|(c, _)| vectors.column(c))
        .collect()
}

/// Modified Gram–Schmidt; drops vectors whose residual norm falls below `tol`.
pub fn orthonormalize<S: Scalar>(vectors: &[Vec<S>], tol: S) -> Vec<Vec<S>> {
    let mut basis: Vec<Vec<S>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _pass in 0..2 {
            for b in &basis {
                let proj = dot(&w, b);
                axpy(-proj, b, &mut w);
            }
        }
        let nw = norm(&w);
        if nw > tol {
            for x in w.iter_mut() {
                *x = *x / nw;
            }
            basis.push(w);
        }
    }
    basis
}

/// Orthogonal projector `B Bᵀ` onto the span of an orthonormal basis in `R^dim`.
pub fn projector_from_basis<S: Scalar>(dim: usize, basis: &[Vec<S>]) -> Mat<S> {
    Mat::from_fn(dim, dim, |r, c| {
        basis.iter().fold(S::zero(), |acc, b| acc + b[r] * b[c])
    })
}
