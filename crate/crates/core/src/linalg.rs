//! Small dense linear algebra: vectors in R^n, n×n matrices, a Jacobi
//! eigensolver for symmetric matrices, and least-squares solves.
//!
//! Everything here is sized for desk-scale geometry (n ≤ 8 or so, solve
//! systems with at most a few hundred rows), so the implementations favour
//! determinism and clarity over asymptotics.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A point or direction in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Self {
        Vector(components)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// Standard basis vector e_i (0-indexed).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// Lexicographic comparison by coordinates, the convention used to
    /// canonically order simplex vertices.
    pub fn lex_cmp(&self, other: &Vector) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    }

    /// Outer product v ⊗ w as an n×n matrix.
    pub fn outer(&self, other: &Vector) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.0[i] * other.0[j];
            }
        }
        m
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// Dense n×n real matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n);
            data.extend(r);
        }
        Matrix { n, data }
    }

    /// Matrix whose columns are the given vectors (must be n of them).
    pub fn from_columns(cols: &[Vector]) -> Self {
        let n = cols.len();
        let mut m = Matrix::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.dim(), n);
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        debug_assert_eq!(v.dim(), self.n);
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for j in 0..self.n {
                s += self[(i, j)] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Symmetrize in place: (A + Aᵀ)/2.
    pub fn symmetrized(&self) -> Matrix {
        self.add(&self.transpose()).scale(0.5)
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.n).map(|i| self[(i, j)]).collect())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul<&Vector> for &Matrix {
    type Output = Vector;
    fn mul(self, v: &Vector) -> Vector {
        self.apply(v)
    }
}

/// Determinant of a square matrix given as rows, by LU with partial pivoting.
/// `rows` need not be n×n of the ambient space; it is k×k.
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let k = rows.len();
    if k == 0 {
        return 1.0;
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut sign = 1.0;
    let mut d = 1.0;
    for col in 0..k {
        let (pivot_row, pivot_val) = (col..k)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pivot_val == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            sign = -sign;
        }
        d *= a[col][col];
        for r in (col + 1)..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    sign * d
}

/// Gram–Schmidt orthonormalization. Returns an orthonormal basis of the span
/// of `vecs`; near-dependent inputs are skipped (relative tolerance).
pub fn orthonormalize(vecs: &[Vector], tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for b in &basis {
            let c = w.dot(b);
            w = &w - &b.scale(c);
        }
        // second pass for numerical hygiene
        for b in &basis {
            let c = w.dot(b);
            w = &w - &b.scale(c);
        }
        let scale = v.norm().max(1.0);
        if w.norm() > tol * scale {
            basis.push(w.normalized().unwrap());
        }
    }
    basis
}

/// Completes `basis` (assumed orthonormal) to an orthonormal basis of R^n,
/// trying coordinate directions first.
pub fn complete_basis(basis: &[Vector], n: usize) -> Vec<Vector> {
    let mut full: Vec<Vector> = basis.to_vec();
    let mut i = 0;
    while full.len() < n && i < n {
        let mut w = Vector::basis(n, i);
        for b in &full {
            let c = w.dot(b);
            w = &w - &b.scale(c);
        }
        for b in &full {
            let c = w.dot(b);
            w = &w - &b.scale(c);
        }
        if w.norm() > 1e-8 {
            full.push(w.normalized().unwrap());
        }
        i += 1;
    }
    assert_eq!(full.len(), n, "basis completion failed");
    full
}

/// Projection of `v` onto the span of the orthonormal set `basis`.
pub fn project_onto(v: &Vector, basis: &[Vector]) -> Vector {
    let mut out = Vector::zeros(v.dim());
    for b in basis {
        out = &out + &b.scale(v.dot(b));
    }
    out
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues sorted by |µ| descending.
    pub values: Vec<f64>,
    /// Matching orthonormal eigenvectors; sign fixed so the component of
    /// largest magnitude is positive (ties broken by first such index).
    pub vectors: Vec<Vector>,
}

/// Cyclic Jacobi rotations for a symmetric matrix. Deterministic for a given
/// input; converges quadratically for the small sizes used here.
pub fn sym_eigen(a: &Matrix, tol: f64) -> Result<SymEigen> {
    if !a.is_symmetric(1e-7 * (1.0 + a.norm())) {
        return Err(Error::Precondition("matrix is not symmetric".into()));
    }
    let n = a.n;
    let mut d = a.symmetrized();
    let mut v = Matrix::identity(n);
    let off = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let scale = a.norm().max(1e-300);
    for _sweep in 0..100 {
        if off(&d) <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = d[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (d[(q, q)] - d[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // rotate rows/cols p,q of d
                for k in 0..n {
                    let dkp = d[(k, p)];
                    let dkq = d[(k, q)];
                    d[(k, p)] = c * dkp - s * dkq;
                    d[(k, q)] = s * dkp + c * dkq;
                }
                for k in 0..n {
                    let dpk = d[(p, k)];
                    let dqk = d[(q, k)];
                    d[(p, k)] = c * dpk - s * dqk;
                    d[(q, k)] = s * dpk + c * dqk;
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
    let mut pairs: Vec<(f64, Vector)> =
        (0..n).map(|i| (d[(i, i)], v.column(i))).collect();
    pairs.sort_by(|x, y| y.0.abs().total_cmp(&x.0.abs()));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for (mu, mut vec) in pairs {
        // sign convention: largest-magnitude component positive
        let mut best = 0usize;
        for i in 1..n {
            if vec[i].abs() > vec[best].abs() {
                best = i;
            }
        }
        if vec[best] < 0.0 {
            vec = vec.scale(-1.0);
        }
        values.push(mu);
        vectors.push(vec);
    }
    Ok(SymEigen { values, vectors })
}

impl SymEigen {
    pub fn reconstruct(&self, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for (mu, v) in self.values.iter().zip(&self.vectors) {
            m = m.add(&v.outer(v).scale(*mu));
        }
        m
    }
}

/// Minimum-norm least-squares solution of `A x = b` where `A` is given as
/// `rows` (each of length `cols`). Uses the eigendecomposition of A Aᵀ, which
/// is adequate for the small, well-scaled systems the constructions produce.
pub fn lstsq(rows: &[Vec<f64>], b: &[f64], cols: usize) -> Result<Vec<f64>> {
    let m = rows.len();
    assert_eq!(b.len(), m);
    if m == 0 {
        return Ok(vec![0.0; cols]);
    }
    // G = A Aᵀ (m×m), y = G⁺ b, x = Aᵀ y
    let mut g = Matrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let mut s = 0.0;
            for k in 0..cols {
                s += rows[i][k] * rows[j][k];
            }
            g[(i, j)] = s;
            g[(j, i)] = s;
        }
    }
    let eig = sym_eigen(&g, 1e-13)?;
    let max = eig.values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let cutoff = 1e-12 * max.max(1e-300);
    let mut y = vec![0.0; m];
    for (mu, v) in eig.values.iter().zip(&eig.vectors) {
        if mu.abs() <= cutoff {
            continue;
        }
        let c = b.iter().zip(&v.0).map(|(bi, vi)| bi * vi).sum::<f64>() / mu;
        for i in 0..m {
            y[i] += c * v[i];
        }
    }
    let mut x = vec![0.0; cols];
    for i in 0..m {
        for k in 0..cols {
            x[k] += rows[i][k] * y[i];
        }
    }
    Ok(x)
}

/// Residual ‖A x − b‖ for a candidate least-squares solution.
pub fn lstsq_residual(rows: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for (row, bi) in rows.iter().zip(b) {
        let r: f64 = row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() - bi;
        s += r * r;
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for _ in 0..30 {
                let mut a = Matrix::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        let x: f64 = rng.gen_range(-2.0..2.0);
                        a[(i, j)] = x;
                        a[(j, i)] = x;
                    }
                }
                let e = sym_eigen(&a, 1e-14).unwrap();
                let r = e.reconstruct(n);
                assert!(r.sub(&a).norm() < 1e-8, "n={n} err={}", r.sub(&a).norm());
                for i in 0..n {
                    for j in 0..n {
                        let d = e.vectors[i].dot(&e.vectors[j]);
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((d - want).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn rank_one_eigenpair() {
        // λ v⊗v has eigenpair (λ, ±v)
        let v = Vector::new(vec![0.6, 0.8]);
        let a = v.outer(&v).scale(3.0);
        let e = sym_eigen(&a, 1e-14).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-10);
        assert!(e.values[1].abs() < 1e-10);
        let dot = e.vectors[0].dot(&v).abs();
        assert!((dot - 1.0).abs() < 1e-10);
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(det(&[]), 1.0);
        assert!((det(&[vec![1.0, 1.0], vec![1.0, 2.0]]) - 1.0).abs() < 1e-14);
        assert!(det(&[vec![1.0, 2.0], vec![2.0, 4.0]]).abs() < 1e-14);
    }

    #[test]
    fn lstsq_solves_square_system() {
        let rows = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let b = vec![5.0, 10.0];
        let x = lstsq(&rows, &b, 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 3.0).abs() < 1e-9);
        assert!(lstsq_residual(&rows, &b, &x) < 1e-9);
    }

    #[test]
    fn lstsq_underdetermined_picks_a_solution() {
        let rows = vec![vec![1.0, 1.0, 0.0]];
        let b = vec![2.0];
        let x = lstsq(&rows, &b, 3).unwrap();
        assert!(lstsq_residual(&rows, &b, &x) < 1e-10);
    }
}
