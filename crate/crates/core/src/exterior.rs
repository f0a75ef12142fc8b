//! Exterior algebra over R^n.
//!
//! Multivectors and multicovectors are stored on the basis of strictly
//! increasing index subsets, listed in colexicographic order. The left
//! interior multiplication ⌞ : ⋀_k × ⋀^{k−1} → ⋀_1 is *defined* by the
//! duality identity dβ(ζ ⌞ φ) = (φ ∧ dβ)(ζ), evaluated against all basis
//! vectors β; the beam-force machinery tests its geometric consequences
//! rather than assuming a combinatorial contraction formula.

use crate::error::{Error, Result};
use crate::linalg::{det, Vector};

/// All strictly increasing k-subsets of {0..n-1} in colexicographic order.
pub fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, out: &mut Vec<Vec<usize>>, acc: &mut Vec<usize>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        let lo = acc.last().map(|x| x + 1).unwrap_or(0);
        for i in lo..n {
            acc.push(i);
            rec(n, k, out, acc);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let mut acc = Vec::new();
    if k <= n {
        rec(n, k, &mut out, &mut acc);
    }
    // colex: compare reversed subsets
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as usize
}

/// Position of a sorted subset in colex order.
fn subset_index(subset: &[usize]) -> usize {
    // colex rank: Σ C(s_i, i+1)
    subset
        .iter()
        .enumerate()
        .map(|(i, &s)| binomial(s, i + 1))
        .sum()
}

/// Sign of merging two disjoint increasing subsets into one sorted subset:
/// (−1)^{#\{(s,t) ∈ S×T : s > t\}}.
fn merge_sign(s: &[usize], t: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for &a in s {
        for &b in t {
            if a > b {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Shared storage for alternating tensors (vectors and covectors have the
/// same component layout under the standard inner product).
#[derive(Debug, Clone, PartialEq)]
pub struct Alternating {
    pub dim: usize,
    pub grade: usize,
    pub components: Vec<f64>,
}

impl Alternating {
    pub fn zero(dim: usize, grade: usize) -> Self {
        Alternating { dim, grade, components: vec![0.0; binomial(dim, grade)] }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        Alternating { dim, grade: 0, components: vec![value] }
    }

    pub fn from_vector(v: &Vector) -> Self {
        Alternating { dim: v.dim(), grade: 1, components: v.0.clone() }
    }

    /// Simple element v_1 ∧ … ∧ v_k.
    pub fn from_vectors(vectors: &[Vector], dim: usize) -> Self {
        let mut acc = Alternating::scalar(dim, 1.0);
        for v in vectors {
            acc = acc.wedge(&Alternating::from_vector(v)).expect("grade overflow");
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Alternating {
            dim: self.dim,
            grade: self.grade,
            components: self.components.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.grade), (other.dim, other.grade));
        Alternating {
            dim: self.dim,
            grade: self.grade,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch("wedge of different ambient dims".into()));
        }
        let (p, q, n) = (self.grade, other.grade, self.dim);
        if p + q > n {
            return Err(Error::GradeMismatch(format!(
                "wedge grade overflow: {p} + {q} > {n}"
            )));
        }
        let s_subsets = index_subsets(n, p);
        let t_subsets = index_subsets(n, q);
        let mut out = Alternating::zero(n, p + q);
        for (si, s) in s_subsets.iter().enumerate() {
            let a = self.components[si];
            if a == 0.0 {
                continue;
            }
            for (ti, t) in t_subsets.iter().enumerate() {
                let b = other.components[ti];
                if b == 0.0 {
                    continue;
                }
                if s.iter().any(|x| t.contains(x)) {
                    continue;
                }
                let sign = merge_sign(s, t);
                let mut merged: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
                merged.sort_unstable();
                let idx = subset_index(&merged);
                out.components[idx] += sign * a * b;
            }
        }
        Ok(out)
    }
}

/// Element of ⋀_k R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiVector(pub Alternating);

/// Element of ⋀^k R^n in the dual basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCovector(pub Alternating);

impl MultiVector {
    pub fn zero(dim: usize, grade: usize) -> Self {
        MultiVector(Alternating::zero(dim, grade))
    }

    pub fn from_vector(v: &Vector) -> Self {
        MultiVector(Alternating::from_vector(v))
    }

    /// ζ = v_1 ∧ … ∧ v_k.
    pub fn from_vectors(vectors: &[Vector], dim: usize) -> Self {
        MultiVector(Alternating::from_vectors(vectors, dim))
    }

    pub fn grade(&self) -> usize {
        self.0.grade
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn wedge(&self, other: &MultiVector) -> Result<MultiVector> {
        Ok(MultiVector(self.0.wedge(&other.0)?))
    }

    pub fn scale(&self, s: f64) -> MultiVector {
        MultiVector(self.0.scale(s))
    }

    pub fn add(&self, other: &MultiVector) -> MultiVector {
        MultiVector(self.0.add(&other.0))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl MultiCovector {
    pub fn zero(dim: usize, grade: usize) -> Self {
        MultiCovector(Alternating::zero(dim, grade))
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        MultiCovector(Alternating::scalar(dim, value))
    }

    pub fn grade(&self) -> usize {
        self.0.grade
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn wedge(&self, other: &MultiCovector) -> Result<MultiCovector> {
        Ok(MultiCovector(self.0.wedge(&other.0)?))
    }

    pub fn scale(&self, s: f64) -> MultiCovector {
        MultiCovector(self.0.scale(s))
    }

    pub fn add(&self, other: &MultiCovector) -> MultiCovector {
        MultiCovector(self.0.add(&other.0))
    }
}

/// d(w): the covector dual to w under the standard inner product.
pub fn dual(v: &Vector) -> MultiCovector {
    MultiCovector(Alternating::from_vector(v))
}

/// Duality pairing ⟨φ, ζ⟩. On simple elements this equals det[φ_i(v_j)].
pub fn pair(phi: &MultiCovector, zeta: &MultiVector) -> Result<f64> {
    if phi.grade() != zeta.grade() || phi.dim() != zeta.dim() {
        return Err(Error::GradeMismatch("pairing needs equal grade and dim".into()));
    }
    Ok(phi
        .0
        .components
        .iter()
        .zip(&zeta.0.components)
        .map(|(a, b)| a * b)
        .sum())
}

/// Left interior multiplication ζ ⌞ φ for ζ of grade k and φ of grade k−1:
/// the unique vector u with dβ(u) = (φ ∧ dβ)(ζ) for every β, found by
/// evaluating the right side on the n basis vectors.
pub fn interior_left(zeta: &MultiVector, phi: &MultiCovector) -> Result<Vector> {
    let n = zeta.dim();
    if phi.dim() != n {
        return Err(Error::DimensionMismatch("interior_left dims differ".into()));
    }
    if zeta.grade() == 0 || phi.grade() + 1 != zeta.grade() {
        return Err(Error::GradeMismatch(format!(
            "interior_left needs grades (k, k-1), got ({}, {})",
            zeta.grade(),
            phi.grade()
        )));
    }
    let mut u = Vector::zeros(n);
    for b in 0..n {
        let beta = dual(&Vector::basis(n, b));
        let full = phi.wedge(&beta)?;
        u[b] = pair(&full, zeta)?;
    }
    Ok(u)
}

/// √det(G) with G_{ij} = ⟨v_i, v_j⟩: the k-volume of the parallelepiped
/// spanned by the vectors. Returns 0 for dependent sets.
pub fn gram_volume(vectors: &[Vector]) -> f64 {
    let k = vectors.len();
    if k == 0 {
        return 1.0;
    }
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = vectors[i].dot(&vectors[j]);
        }
    }
    det(&g).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vector {
        Vector::basis(n, i)
    }

    #[test]
    fn dual_of_basis_and_zero() {
        let d = dual(&e(3, 0));
        assert_eq!(d.0.components, vec![1.0, 0.0, 0.0]);
        let z = dual(&Vector::zeros(2));
        assert_eq!(z.0.components, vec![0.0, 0.0]);
    }

    #[test]
    fn dual_pairs_against_basis() {
        // (2,−1) in R²: verified by pairing against all basis vectors
        let v = Vector::new(vec![2.0, -1.0]);
        let d = dual(&v);
        for i in 0..2 {
            let p = pair(&d, &MultiVector::from_vector(&e(2, i))).unwrap();
            assert!((p - v[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn wedge_basis_and_antisymmetry() {
        let n = 3;
        let e1 = MultiVector::from_vector(&e(n, 0));
        let e2 = MultiVector::from_vector(&e(n, 1));
        let w12 = e1.wedge(&e2).unwrap();
        // basis e_{12} has coefficient +1
        let subsets = index_subsets(n, 2);
        let idx = subsets.iter().position(|s| s == &vec![0, 1]).unwrap();
        assert_eq!(w12.0.components[idx], 1.0);
        let w21 = e2.wedge(&e1).unwrap();
        assert_eq!(w21.0.components[idx], -1.0);
    }

    #[test]
    fn wedge_bilinear_example() {
        // (e1+e2) ∧ (e1−e2) = −2 e_{12} in R³
        let n = 3;
        let a = MultiVector::from_vector(&(&e(n, 0) + &e(n, 1)));
        let b = MultiVector::from_vector(&(&e(n, 0) - &e(n, 1)));
        let w = a.wedge(&b).unwrap();
        let subsets = index_subsets(n, 2);
        for (i, s) in subsets.iter().enumerate() {
            let want = if s == &vec![0, 1] { -2.0 } else { 0.0 };
            assert!((w.0.components[i] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn wedge_grade_overflow_rejected() {
        let n = 2;
        let a = MultiVector::from_vectors(&[e(n, 0), e(n, 1)], n);
        assert!(a.wedge(&MultiVector::from_vector(&e(n, 0))).is_err());
    }

    #[test]
    fn pairing_matches_determinant() {
        // pair(dη, ζ) with ζ from (1,0,0),(1,1,0), dη from duals of (0,1,0),(1,0,0)
        let n = 3;
        let zeta = MultiVector::from_vectors(
            &[Vector::new(vec![1.0, 0.0, 0.0]), Vector::new(vec![1.0, 1.0, 0.0])],
            n,
        );
        let eta = dual(&Vector::new(vec![0.0, 1.0, 0.0]))
            .wedge(&dual(&Vector::new(vec![1.0, 0.0, 0.0])))
            .unwrap();
        // det[[η_i(v_j)]] = det[[0,1],[1,1]] = −1
        let want = det(&[vec![0.0, 1.0], vec![1.0, 1.0]]);
        let got = pair(&eta, &zeta).unwrap();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn pair_signs_on_simple_elements() {
        let n = 2;
        let de12 = dual(&e(n, 0)).wedge(&dual(&e(n, 1))).unwrap();
        let e12 = MultiVector::from_vectors(&[e(n, 0), e(n, 1)], n);
        let e21 = MultiVector::from_vectors(&[e(n, 1), e(n, 0)], n);
        assert!((pair(&de12, &e12).unwrap() - 1.0).abs() < 1e-15);
        assert!((pair(&de12, &e21).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn interior_left_basis_cases() {
        // (e1∧e2) ⌞ de1 → ±e2 by the defining pairing; check against the
        // duality identity itself rather than a guessed sign.
        let n = 2;
        let zeta = MultiVector::from_vectors(&[e(n, 0), e(n, 1)], n);
        for phi_vec in [e(n, 0), e(n, 1)] {
            let phi = dual(&phi_vec);
            let u = interior_left(&zeta, &phi).unwrap();
            for b in 0..n {
                let beta = e(n, b);
                let lhs = u[b];
                let rhs = pair(&phi.wedge(&dual(&beta)).unwrap(), &zeta).unwrap();
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
        // explicit values under the φ-first convention
        let u = interior_left(&zeta, &dual(&e(n, 0))).unwrap();
        assert!((u[1] - 1.0).abs() < 1e-14 && u[0].abs() < 1e-14);
        let u = interior_left(&zeta, &dual(&e(n, 1))).unwrap();
        assert!((u[0] + 1.0).abs() < 1e-14 && u[1].abs() < 1e-14);
    }

    #[test]
    fn interior_left_with_zero_covector() {
        let n = 3;
        let zeta = MultiVector::from_vectors(&[e(n, 0), e(n, 1)], n);
        let u = interior_left(&zeta, &MultiCovector::zero(n, 1)).unwrap();
        assert!(u.is_zero(0.0));
    }

    #[test]
    fn gram_volume_cases() {
        assert!((gram_volume(&[e(2, 0), e(2, 1)]) - 1.0).abs() < 1e-15);
        assert!(gram_volume(&[e(2, 0), e(2, 0)]).abs() < 1e-12);
        let v = gram_volume(&[Vector::new(vec![1.0, 0.0]), Vector::new(vec![1.0, 1.0])]);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hodge_star_relationship_when_n_equals_k() {
        // When n = k the contraction with the volume element acts like the
        // Hodge star: in R², ζ = e1∧e2 sends de1 ↦ e2 and de2 ↦ −e1.
        let n = 2;
        let zeta = MultiVector::from_vectors(&[e(n, 0), e(n, 1)], n);
        let u1 = interior_left(&zeta, &dual(&e(n, 0))).unwrap();
        let u2 = interior_left(&zeta, &dual(&e(n, 1))).unwrap();
        assert!((&u1 - &e(n, 1)).is_zero(1e-14));
        assert!((&u2 - &e(n, 0).scale(-1.0)).is_zero(1e-14));
        // R³: ζ = e1∧e2∧e3 sends de1∧de2 ↦ e3 = ⋆(e1∧e2)
        let n = 3;
        let zeta3 = MultiVector::from_vectors(&[e(n, 0), e(n, 1), e(n, 2)], n);
        let phi = dual(&e(n, 0)).wedge(&dual(&e(n, 1))).unwrap();
        let u = interior_left(&zeta3, &phi).unwrap();
        assert!((&u - &e(n, 2)).is_zero(1e-14));
    }
}
