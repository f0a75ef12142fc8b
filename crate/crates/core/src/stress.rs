//! Stress tensors and stressed chains: symmetric (or, for boundary parts,
//! general) n×n coefficients tensored with oriented simplices, together with
//! the structural predicates, mass functionals, and the view of a stressed
//! chain as a vector-valued current.
//!
//! Two masses coexist and are reported separately. The nuclear mass weighs
//! each term by the sum of |eigenvalues| (the construction cost); the
//! operator/current mass weighs it by max |eigenvalue| (the dual norm
//! against comass-one vector forms). They agree on rank-1 coefficients and
//! differ for rank ≥ 2; no equality between them is asserted anywhere.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::chains::{integrate, PolyChain, PolyForm, Simplex};
use crate::error::{Error, Result};
use crate::exterior::binomial;
use crate::linalg::{orthonormalize, project_onto, sym_eigen, Matrix, Vector};
use crate::DROP_TOL;

/// Relative eigenvalue threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Spectral decomposition of a symmetric stress tensor, eigenvalues sorted
/// by |µ| descending, eigenvector signs fixed deterministically.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vector>,
}

/// Eigendecomposition with the crate's deterministic conventions.
pub fn spectral(a: &Matrix) -> Result<SpectralDecomp> {
    let e = sym_eigen(a, 1e-14)?;
    Ok(SpectralDecomp { eigenvalues: e.values, eigenvectors: e.vectors })
}

impl SpectralDecomp {
    pub fn reconstruct(&self, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for (mu, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m = m.add(&v.outer(v).scale(*mu));
        }
        m
    }
}

/// Orthonormal basis of the simplex's tangent space.
pub fn tangent_basis(s: &Simplex) -> Vec<Vector> {
    orthonormalize(&s.edge_vectors(), 1e-10)
}

/// True iff every eigenvector of `a` carrying a nonzero eigenvalue lies in
/// the tangent space of `s`. Implemented as the projection residual
/// ‖A − Π A Π‖ ≤ tol·‖A‖, which is equivalent for symmetric tensors and
/// robust to clustered eigenvalues.
pub fn is_structural(a: &Matrix, s: &Simplex, tol: f64) -> bool {
    let norm = a.norm();
    if norm <= DROP_TOL {
        return true;
    }
    let basis = tangent_basis(s);
    let residual = structural_residual(a, &basis);
    residual <= tol.max(1e-12) * norm
}

/// ‖A − Π A Π‖ for Π the projection onto span(basis).
pub fn structural_residual(a: &Matrix, basis: &[Vector]) -> f64 {
    let n = a.n;
    let mut proj = Matrix::zeros(n);
    for b in basis {
        proj = proj.add(&b.outer(b));
    }
    let pap = proj.matmul(a).matmul(&proj);
    a.sub(&pap).norm()
}

/// Generalized Cauchy stress tensor test for a (k−1)-simplex: rank(A) ≤ k
/// and the nonzero eigenspace, padded from the tangent space when rank < k,
/// contains the tangent space — equivalently dim(range(A) + tangent) ≤ k.
pub fn is_generalized_cauchy(a: &Matrix, tau: &Simplex, k: usize, tol: f64) -> bool {
    if tau.grade() + 1 != k {
        return false;
    }
    let norm = a.norm();
    if norm <= DROP_TOL {
        return true;
    }
    let eig = match spectral(a) {
        Ok(e) => e,
        Err(_) => return false,
    };
    let max = eig.eigenvalues[0].abs();
    let threshold = tol.max(RANK_TOL) * max;
    let mut spanning: Vec<Vector> = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(mu, _)| mu.abs() > threshold)
        .map(|(_, v)| v.clone())
        .collect();
    if spanning.len() > k {
        return false;
    }
    spanning.extend(tangent_basis(tau));
    orthonormalize(&spanning, 1e-7).len() <= k
}

/// A stressed polyhedral k-chain: matrix coefficients on oriented simplices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StressedChain {
    pub dim: usize,
    pub grade: usize,
    pub terms: Vec<(Matrix, Simplex)>,
}

impl StressedChain {
    pub fn zero(dim: usize, grade: usize) -> Self {
        StressedChain { dim, grade, terms: Vec::new() }
    }

    pub fn from_terms(dim: usize, grade: usize, terms: Vec<(Matrix, Simplex)>) -> Result<Self> {
        for (a, s) in &terms {
            if s.dim() != dim || s.grade() != grade || a.n != dim {
                return Err(Error::GradeMismatch("stressed chain term".into()));
            }
        }
        Ok(StressedChain { dim, grade, terms })
    }

    pub fn add(&self, other: &StressedChain) -> StressedChain {
        assert_eq!((self.dim, self.grade), (other.dim, other.grade));
        let mut terms = self.terms.clone();
        terms.extend(other.terms.clone());
        StressedChain { dim: self.dim, grade: self.grade, terms }
    }

    pub fn scale(&self, s: f64) -> StressedChain {
        StressedChain {
            dim: self.dim,
            grade: self.grade,
            terms: self.terms.iter().map(|(a, sx)| (a.scale(s), sx.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &StressedChain) -> StressedChain {
        self.add(&other.scale(-1.0))
    }

    /// Canonical form: sorted vertices (orientation sign folded into the
    /// matrix), merged duplicates, terms with tiny coefficients dropped.
    pub fn canonicalize(&self) -> StressedChain {
        let mut map: BTreeMap<Vec<u64>, (Matrix, Simplex)> = BTreeMap::new();
        for (a, s) in &self.terms {
            let (sorted, sign) = s.canonical();
            let key: Vec<u64> = sorted
                .vertices
                .iter()
                .flat_map(|v| {
                    v.0.iter().map(|&c| (if c == 0.0 { 0.0 } else { c }).to_bits())
                })
                .collect();
            let entry = map
                .entry(key)
                .or_insert_with(|| (Matrix::zeros(self.dim), sorted));
            entry.0 = entry.0.add(&a.scale(sign));
        }
        let terms = map
            .into_values()
            .filter(|(a, _)| a.norm() > DROP_TOL)
            .collect();
        StressedChain { dim: self.dim, grade: self.grade, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.canonicalize().terms.is_empty()
    }

    pub fn max_coeff(&self) -> f64 {
        self.canonicalize()
            .terms
            .iter()
            .map(|(a, _)| a.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_structural(&self, tol: f64) -> bool {
        self.terms.iter().all(|(a, s)| is_structural(a, s, tol))
    }

    /// Forget coefficients term-by-term into a scalar chain with the given
    /// per-term weights.
    pub fn to_polychain(&self, weights: &[f64]) -> PolyChain {
        PolyChain {
            dim: self.dim,
            grade: self.grade,
            terms: self
                .terms
                .iter()
                .zip(weights)
                .map(|((_, s), &w)| (w, s.clone()))
                .collect(),
        }
    }
}

/// Coefficient-preserving boundary: ∂(Σ A_i ⊗ σ_i) = Σ A_i ⊗ ∂σ_i.
pub fn boundary_stressed(p: &StressedChain) -> Result<StressedChain> {
    if p.grade == 0 {
        return Err(Error::GradeMismatch("boundary of a stressed 0-chain".into()));
    }
    let mut terms = Vec::new();
    for (a, s) in &p.terms {
        for i in 0..=s.grade() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            terms.push((a.scale(sign), s.face(i)));
        }
    }
    Ok(StressedChain { dim: p.dim, grade: p.grade - 1, terms }.canonicalize())
}

/// Nuclear mass: Σ_i (Σ_j |µ_j(A_i)|) · vol(σ_i). Coefficients must be
/// symmetric.
pub fn mass_nuclear(p: &StressedChain) -> Result<f64> {
    let mut total = 0.0;
    for (a, s) in &p.terms {
        let eig = spectral(a)?;
        let weight: f64 = eig.eigenvalues.iter().map(|m| m.abs()).sum();
        total += weight * s.volume();
    }
    Ok(total)
}

/// Operator/current mass: Σ_i max_j |µ_j(A_i)| · vol(σ_i).
pub fn mass_operator(p: &StressedChain) -> Result<f64> {
    let mut total = 0.0;
    for (a, s) in &p.terms {
        let eig = spectral(a)?;
        let weight = eig.eigenvalues.first().map(|m| m.abs()).unwrap_or(0.0);
        total += weight * s.volume();
    }
    Ok(total)
}

/// An R^n-valued k-form: one polynomial k-form per coordinate.
#[derive(Debug, Clone)]
pub struct VectorForm {
    pub components: Vec<PolyForm>,
}

impl VectorForm {
    pub fn new(components: Vec<PolyForm>) -> Self {
        VectorForm { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn grade(&self) -> usize {
        self.components[0].grade
    }

    /// v ⊗ ω.
    pub fn from_tensor(v: &Vector, omega: &PolyForm) -> Self {
        VectorForm {
            components: v.0.iter().map(|&c| omega.scale(c)).collect(),
        }
    }

    pub fn exterior_derivative(&self) -> VectorForm {
        VectorForm {
            components: self
                .components
                .iter()
                .map(crate::chains::exterior_derivative)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> VectorForm {
        VectorForm { components: self.components.iter().map(|p| p.scale(s)).collect() }
    }
}

/// T(Ω) = Σ_i A_i (∫_{σ_i} ω_1, …, ∫_{σ_i} ω_n).
pub fn evaluate_current(p: &StressedChain, omega: &VectorForm) -> Result<Vector> {
    if omega.dim() != p.dim || omega.grade() != p.grade {
        return Err(Error::GradeMismatch("evaluate_current grade/dim".into()));
    }
    let mut out = Vector::zeros(p.dim);
    for (a, s) in &p.terms {
        let chain = PolyChain::from_simplex(s.clone());
        let integrals = Vector::new(
            omega
                .components
                .iter()
                .map(|w| integrate(&chain, w))
                .collect::<Result<Vec<f64>>>()?,
        );
        out = &out + &a.apply(&integrals);
    }
    Ok(out)
}

/// Equality of stressed chains as Sym-valued currents: both sides evaluate
/// `trials` random polynomial vector forms to the same value.
pub fn stressed_currents_equal(
    p: &StressedChain,
    q: &StressedChain,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<bool> {
    use rand::SeedableRng;
    if p.dim != q.dim || p.grade != q.grade {
        return Err(Error::GradeMismatch("stressed_currents_equal grade/dim".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let extent = p
        .terms
        .iter()
        .chain(&q.terms)
        .flat_map(|(_, s)| s.vertices.iter())
        .map(|v| v.norm())
        .fold(1.0, f64::max);
    let mass_scale: f64 = p
        .terms
        .iter()
        .chain(&q.terms)
        .map(|(a, s)| a.norm() * s.volume())
        .sum::<f64>()
        .max(1e-9)
        * (1.0 + extent * extent);
    for _ in 0..trials {
        let omega = VectorForm::new(
            (0..p.dim)
                .map(|_| crate::chains::random_polyform(p.dim, p.grade, 1, &mut rng))
                .collect(),
        );
        let vp = evaluate_current(p, &omega)?;
        let vq = evaluate_current(q, &omega)?;
        if (&vp - &vq).norm() > tol * mass_scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Comass of a constant k-covector given by its components in the increasing
/// subset basis: sup φ(X_1∧…∧X_k) over orthonormal frames, estimated by
/// random restarts plus alternating maximization (a lower bound).
pub fn covector_comass(
    components: &[f64],
    dim: usize,
    grade: usize,
    restarts: usize,
    iters: usize,
    rng: &mut impl rand::Rng,
) -> f64 {
    use crate::exterior::{pair, MultiCovector, MultiVector};
    use crate::exterior::Alternating;
    if grade == 0 {
        return components[0].abs();
    }
    let phi = MultiCovector(Alternating {
        dim,
        grade,
        components: components.to_vec(),
    });
    let euclid: f64 = components.iter().map(|c| c * c).sum::<f64>().sqrt();
    if euclid == 0.0 {
        return 0.0;
    }
    let mut best: f64 = 0.0;
    for _ in 0..restarts {
        // random orthonormal frame
        let mut frame: Vec<Vector> = Vec::new();
        while frame.len() < grade {
            let v = Vector::new((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let candidates: Vec<Vector> =
                frame.iter().cloned().chain(std::iter::once(v)).collect();
            let onb = orthonormalize(&candidates, 1e-8);
            if onb.len() == frame.len() + 1 {
                frame = onb;
            }
        }
        for _ in 0..iters {
            for slot in 0..grade {
                // gradient of φ(X_1∧…∧X_k) in the slot: evaluate against basis
                let mut g = Vector::zeros(dim);
                for b in 0..dim {
                    let mut vs = frame.clone();
                    vs[slot] = Vector::basis(dim, b);
                    let zeta = MultiVector::from_vectors(&vs, dim);
                    g[b] = pair(&phi, &zeta).unwrap();
                }
                // project out the other slots and renormalize
                let others: Vec<Vector> = frame
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != slot)
                    .map(|(_, v)| v.clone())
                    .collect();
                let mut w = &g - &project_onto(&g, &others);
                if w.norm() < 1e-13 {
                    continue;
                }
                w = w.normalized().unwrap();
                frame[slot] = w;
            }
        }
        let zeta = MultiVector::from_vectors(&frame, dim);
        let val = pair(&phi, &zeta).unwrap().abs();
        best = best.max(val);
    }
    // the Euclidean norm is itself a valid lower bound for decomposables;
    // keep the larger of the two estimates
    best.max(euclid / (binomial(dim, grade) as f64).sqrt())
}

/// Lower-bound estimate of the comass 𝐌(Ω) = √(Σ_j 𝐌(ω_j)²): maximize each
/// component's pointwise covector comass over the sample points.
pub fn comass_form_estimate(
    omega: &VectorForm,
    sample_points: &[Vector],
    inner_iters: usize,
    seed: u64,
) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dim = omega.dim();
    let grade = omega.grade();
    let mut sum_sq = 0.0;
    for comp in &omega.components {
        let mut m: f64 = 0.0;
        for x in sample_points {
            let vals = comp.eval_at(x);
            let c = covector_comass(&vals, dim, grade, 4, inner_iters, &mut rng);
            m = m.max(c);
        }
        sum_sq += m * m;
    }
    sum_sq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{boundary, random_polyform};
    use rand::{Rng, SeedableRng};

    fn pt(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec())
    }

    fn seg(a: &[f64], b: &[f64]) -> Simplex {
        Simplex::new(vec![pt(a), pt(b)]).unwrap()
    }

    fn d_e(n: usize, i: usize) -> Matrix {
        let e = Vector::basis(n, i);
        e.outer(&e)
    }

    #[test]
    fn spectral_examples() {
        // e1⊗e1: µ = (1, 0), v1 = e1
        let e = spectral(&d_e(2, 0)).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(e.eigenvalues[1].abs() < 1e-12);
        assert!((e.eigenvectors[0].dot(&Vector::basis(2, 0)).abs() - 1.0).abs() < 1e-10);

        // identity: µ = (1,1), any orthonormal pair
        let e = spectral(&Matrix::identity(2)).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-12);

        // rank-1 λ v⊗v reconstructs
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let v = Vector::new((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .normalized()
                .unwrap();
            let a = v.outer(&v).scale(-1.7);
            let e = spectral(&a).unwrap();
            assert!(e.reconstruct(3).sub(&a).norm() < 1e-8);
            assert!((e.eigenvalues[0] + 1.7).abs() < 1e-9);
            assert!((e.eigenvectors[0].dot(&v).abs() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn spectral_rejects_nonsymmetric() {
        let mut a = Matrix::zeros(2);
        a[(0, 1)] = 1.0;
        assert!(spectral(&a).is_err());
    }

    #[test]
    fn structural_spring_cases() {
        let horizontal = seg(&[0.0, 0.0], &[1.0, 0.0]);
        // compressed spring along its own axis: structural
        assert!(is_structural(&d_e(2, 0), &horizontal, 1e-9));
        // transverse stress on the same segment: not structural
        assert!(!is_structural(&d_e(2, 1), &horizontal, 1e-9));
        // zero tensor: structural on anything
        assert!(is_structural(&Matrix::zeros(2), &horizontal, 1e-9));
    }

    #[test]
    fn generalized_cauchy_cases() {
        let tau = seg(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]);
        let k = 2;
        // v1 along τ, v2 ⊥ τ: the special case
        let a = d_e(3, 0).add(&d_e(3, 1).scale(2.0));
        assert!(is_generalized_cauchy(&a, &tau, k, 1e-9));
        // rank k+1: rejected
        let full = d_e(3, 0).add(&d_e(3, 1)).add(&d_e(3, 2));
        assert!(!is_generalized_cauchy(&full, &tau, k, 1e-9));
        // nonzero eigenspace missing τ's direction entirely: the span of
        // {v, tangent} exceeds k when rank is already k
        let b = d_e(3, 1).add(&d_e(3, 2).scale(0.5));
        assert!(!is_generalized_cauchy(&b, &tau, k, 1e-9));
        // rank < k admitted by padding
        assert!(is_generalized_cauchy(&d_e(3, 0), &tau, k, 1e-9));
        assert!(is_generalized_cauchy(&d_e(3, 1), &tau, k, 1e-9));
    }

    fn rectangle_chain(a: f64, b: f64, c: f64, d: f64) -> StressedChain {
        // counterclockwise rectangle [a,b]×[c,d] as two triangles, both with
        // coefficient D_{e1}
        let t1 = Simplex::new(vec![pt(&[a, c]), pt(&[b, c]), pt(&[b, d])]).unwrap();
        let t2 = Simplex::new(vec![pt(&[a, c]), pt(&[b, d]), pt(&[a, d])]).unwrap();
        StressedChain::from_terms(2, 2, vec![(d_e(2, 0), t1), (d_e(2, 0), t2)]).unwrap()
    }

    #[test]
    fn rectangle_boundary_has_four_edges_and_no_diagonal() {
        let s = rectangle_chain(0.0, 2.0, 0.0, 1.0);
        let b = boundary_stressed(&s).unwrap();
        assert_eq!(b.terms.len(), 4, "diagonal must cancel");
        for (coeff, edge) in &b.terms {
            // every surviving edge coefficient is ±D_{e1}
            assert!(coeff.sub(&d_e(2, 0)).norm() < 1e-12 || coeff.add(&d_e(2, 0)).norm() < 1e-12);
            // and no edge is the diagonal
            let v0 = &edge.vertices[0];
            let v1 = &edge.vertices[1];
            let along = v1 - v0;
            assert!(
                along[0].abs() < 1e-12 || along[1].abs() < 1e-12,
                "diagonal edge survived"
            );
        }
    }

    #[test]
    fn stressed_boundary_squared_zero() {
        let s = rectangle_chain(-1.0, 1.0, 0.0, 3.0);
        let b = boundary_stressed(&s).unwrap();
        let bb = boundary_stressed(&b).unwrap();
        assert!(bb.is_zero());
    }

    #[test]
    fn grade0_boundary_terms() {
        let a = d_e(2, 0).scale(2.0);
        let chain =
            StressedChain::from_terms(2, 1, vec![(a.clone(), seg(&[0.0, 0.0], &[1.0, 0.0]))])
                .unwrap();
        let b = boundary_stressed(&chain).unwrap();
        assert_eq!(b.grade, 0);
        assert_eq!(b.terms.len(), 2);
    }

    #[test]
    fn masses() {
        // spring κ, length L: mass κ·L
        let kappa = 3.0;
        let spring = StressedChain::from_terms(
            2,
            1,
            vec![(d_e(2, 0).scale(kappa), seg(&[0.0, 0.0], &[2.0, 0.0]))],
        )
        .unwrap();
        assert!((mass_nuclear(&spring).unwrap() - kappa * 2.0).abs() < 1e-12);
        assert!((mass_operator(&spring).unwrap() - kappa * 2.0).abs() < 1e-12);
        assert!((mass_nuclear(&StressedChain::zero(2, 1)).unwrap()).abs() == 0.0);

        // (e1⊗e1 + 2 e2⊗e2) on the unit right triangle
        let tri = Simplex::new(vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])]).unwrap();
        let a = d_e(2, 0).add(&d_e(2, 1).scale(2.0));
        let chain = StressedChain::from_terms(2, 2, vec![(a, tri)]).unwrap();
        assert!((mass_nuclear(&chain).unwrap() - 1.5).abs() < 1e-12);
        assert!((mass_operator(&chain).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mass_operator_bounded_by_nuclear() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = 3;
            let mut m = Matrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let x = rng.gen_range(-1.0..1.0);
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
            let verts: Vec<Vector> = (0..3)
                .map(|_| Vector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                .collect();
            if let Ok(s) = Simplex::new(verts) {
                let c = StressedChain::from_terms(n, 2, vec![(m, s)]).unwrap();
                assert!(mass_operator(&c).unwrap() <= mass_nuclear(&c).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn mass_norm_properties() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let tri = Simplex::new(vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.1]), pt(&[0.3, 1.0])]).unwrap();
        for _ in 0..10 {
            let mut a = Matrix::zeros(2);
            let mut b = Matrix::zeros(2);
            for i in 0..2 {
                for j in i..2 {
                    let x = rng.gen_range(-1.0..1.0);
                    a[(i, j)] = x;
                    a[(j, i)] = x;
                    let y = rng.gen_range(-1.0..1.0);
                    b[(i, j)] = y;
                    b[(j, i)] = y;
                }
            }
            let ca = StressedChain::from_terms(2, 2, vec![(a.clone(), tri.clone())]).unwrap();
            let cb = StressedChain::from_terms(2, 2, vec![(b.clone(), tri.clone())]).unwrap();
            let cab =
                StressedChain::from_terms(2, 2, vec![(a.add(&b), tri.clone())]).unwrap();
            // triangle inequality and absolute homogeneity
            assert!(
                mass_nuclear(&cab).unwrap()
                    <= mass_nuclear(&ca).unwrap() + mass_nuclear(&cb).unwrap() + 1e-10
            );
            assert!(
                mass_operator(&cab).unwrap()
                    <= mass_operator(&ca).unwrap() + mass_operator(&cb).unwrap() + 1e-10
            );
            let t = -1.7;
            assert!(
                (mass_nuclear(&ca.scale(t)).unwrap() - t.abs() * mass_nuclear(&ca).unwrap())
                    .abs()
                    < 1e-10
            );
        }
    }

    #[test]
    fn current_evaluation_of_simple_tensor() {
        // (A⊗σ)(v⊗ω) = A(v)·∫_σ ω
        let tri = Simplex::new(vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.0, 1.0])]).unwrap();
        let a = d_e(2, 0).add(&d_e(2, 1).scale(-0.5));
        let p = StressedChain::from_terms(2, 2, vec![(a.clone(), tri.clone())]).unwrap();
        let v = pt(&[0.7, -0.2]);
        let omega = PolyForm::constant(2, 2, &[2.0]);
        let vf = VectorForm::from_tensor(&v, &omega);
        let got = evaluate_current(&p, &vf).unwrap();
        let integral =
            integrate(&PolyChain::from_simplex(tri), &omega).unwrap();
        let want = a.apply(&v.scale(integral));
        assert!((&got - &want).is_zero(1e-12));

        // zero form gives the zero vector
        let zero = VectorForm::new(vec![PolyForm::zero(2, 2); 2]);
        assert!(evaluate_current(&p, &zero).unwrap().is_zero(0.0));
    }

    #[test]
    fn current_boundary_compatibility() {
        // evaluate_current(∂P, Ω) = evaluate_current(P, dΩ)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let verts: Vec<Vector> = (0..3)
                .map(|_| Vector::new((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                .collect();
            let Ok(s) = Simplex::new(verts) else { continue };
            let mut a = Matrix::zeros(3);
            for i in 0..3 {
                for j in i..3 {
                    let x = rng.gen_range(-1.0..1.0);
                    a[(i, j)] = x;
                    a[(j, i)] = x;
                }
            }
            let p = StressedChain::from_terms(3, 2, vec![(a, s)]).unwrap();
            let omega = VectorForm::new(
                (0..3)
                    .map(|_| random_polyform(3, 1, 2, &mut rng))
                    .collect(),
            );
            let lhs = evaluate_current(&boundary_stressed(&p).unwrap(), &omega).unwrap();
            let rhs = evaluate_current(&p, &omega.exterior_derivative()).unwrap();
            let scale = 1.0 + lhs.norm().max(rhs.norm());
            assert!((&lhs - &rhs).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn comass_of_decomposable_is_euclidean() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        // constant dx1∧dx2 in R³ has comass exactly 1
        let c = covector_comass(&[1.0, 0.0, 0.0], 3, 2, 6, 30, &mut rng);
        assert!((c - 1.0).abs() < 1e-6, "comass {c}");
    }

    #[test]
    fn comass_euclidean_sandwich() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let n = 4;
            let k = 2;
            let count = binomial(n, k);
            let comps: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let euclid: f64 = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
            let cm = covector_comass(&comps, n, k, 8, 40, &mut rng);
            let upper = (binomial(n, k) as f64).sqrt() * euclid;
            assert!(cm <= upper + 1e-9, "comass above C(n,k)^1/2 bound");
            // the estimator is a lower bound of the true comass, which is
            // ≥ |φ|/√C(n,k); our floor guarantees at least that
            assert!(cm >= euclid / (binomial(n, k) as f64).sqrt() - 1e-12);
        }
    }

    #[test]
    fn current_bounded_by_operator_mass_times_comass() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..10 {
            let verts: Vec<Vector> = (0..3)
                .map(|_| Vector::new((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                .collect();
            let Ok(s) = Simplex::new(verts) else { continue };
            let mut a = Matrix::zeros(3);
            for i in 0..3 {
                for j in i..3 {
                    let x = rng.gen_range(-1.0..1.0);
                    a[(i, j)] = x;
                    a[(j, i)] = x;
                }
            }
            let p = StressedChain::from_terms(3, 2, vec![(a, s.clone())]).unwrap();
            // constant vector forms: the comass estimate is reliable there
            let omega = VectorForm::new(
                (0..3)
                    .map(|_| {
                        let vals: Vec<f64> =
                            (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        PolyForm::constant(3, 2, &vals)
                    })
                    .collect(),
            );
            let val = evaluate_current(&p, &omega).unwrap().norm();
            let points: Vec<Vector> = s.vertices.clone();
            let m_omega = comass_form_estimate(&omega, &points, 40, 7);
            let m_t = mass_operator(&p).unwrap();
            assert!(
                val <= m_t * m_omega * (1.0 + 1e-6) + 1e-9,
                "duality violated: {val} > {m_t}·{m_omega}"
            );
        }
    }
}
