//! Oriented simplices, real-coefficient polyhedral chains, the boundary
//! operator, cone and prism constructions, and exact integration of
//! polynomial differential forms over chains.
//!
//! Chain equality modulo subdivision is decided by a randomized integration
//! oracle: two chains are equivalent iff they integrate every polynomial
//! test form to the same value. Polynomial integration over a simplex is
//! exact (affine pullback plus the Dirichlet formula for monomials), which
//! makes the oracle robust.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exterior::{binomial, gram_volume, index_subsets};
use crate::linalg::{det, Vector};
use crate::DROP_TOL;

/// An oriented k-simplex: k+1 affinely independent vertices in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    pub vertices: Vec<Vector>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::DegenerateSimplex("no vertices".into()));
        }
        let n = vertices[0].dim();
        if vertices.iter().any(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch("simplex vertices".into()));
        }
        if vertices.len() > n + 1 {
            return Err(Error::GradeMismatch(format!(
                "grade {} exceeds ambient dim {}",
                vertices.len() - 1,
                n
            )));
        }
        let s = Simplex { vertices };
        let edges = s.edge_vectors();
        let scale = s.extent().max(1.0);
        let vol = gram_volume(&edges);
        if !edges.is_empty() && vol <= 1e-12 * scale.powi(edges.len() as i32) {
            return Err(Error::DegenerateSimplex(format!(
                "gram volume {vol} too small for {:?}",
                s.vertices
            )));
        }
        Ok(s)
    }

    pub fn grade(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    /// Edge vectors a_i − a_0 for i = 1..k.
    pub fn edge_vectors(&self) -> Vec<Vector> {
        self.vertices[1..].iter().map(|v| v - &self.vertices[0]).collect()
    }

    fn extent(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Arithmetic mean of the vertices.
    pub fn barycenter(&self) -> Vector {
        let mut b = Vector::zeros(self.dim());
        for v in &self.vertices {
            b = &b + v;
        }
        b.scale(1.0 / self.vertices.len() as f64)
    }

    /// k-dimensional Hausdorff volume: √Gram(edges)/k!.
    pub fn volume(&self) -> f64 {
        let k = self.grade();
        gram_volume(&self.edge_vectors()) / factorial(k)
    }

    /// Face obtained by omitting vertex i (caller keeps track of the
    /// boundary sign (−1)^i).
    pub fn face(&self, i: usize) -> Simplex {
        let mut verts = self.vertices.clone();
        verts.remove(i);
        Simplex { vertices: verts }
    }

    /// Translate by t.
    pub fn translated(&self, t: &Vector) -> Simplex {
        Simplex { vertices: self.vertices.iter().map(|v| v + t).collect() }
    }

    /// Key identifying the unoriented point set, for merging.
    fn sorted_key(&self) -> (Vec<u64>, f64) {
        let mut idx: Vec<usize> = (0..self.vertices.len()).collect();
        idx.sort_by(|&a, &b| self.vertices[a].lex_cmp(&self.vertices[b]));
        let sign = permutation_sign(&idx);
        let mut key = Vec::new();
        for &i in &idx {
            for &c in &self.vertices[i].0 {
                // normalize -0.0 so it merges with 0.0
                key.push((if c == 0.0 { 0.0 } else { c }).to_bits());
            }
        }
        (key, sign)
    }

    /// Same simplex with lexicographically sorted vertices; returns the
    /// orientation sign relating the sorted order to the given one.
    pub fn canonical(&self) -> (Simplex, f64) {
        let mut idx: Vec<usize> = (0..self.vertices.len()).collect();
        idx.sort_by(|&a, &b| self.vertices[a].lex_cmp(&self.vertices[b]));
        let sign = permutation_sign(&idx);
        let verts = idx.iter().map(|&i| self.vertices[i].clone()).collect();
        (Simplex { vertices: verts }, sign)
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// A polyhedral k-chain: a finite real combination of oriented k-simplices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyChain {
    pub dim: usize,
    pub grade: usize,
    pub terms: Vec<(f64, Simplex)>,
}

impl PolyChain {
    pub fn zero(dim: usize, grade: usize) -> Self {
        PolyChain { dim, grade, terms: Vec::new() }
    }

    pub fn from_simplex(s: Simplex) -> Self {
        PolyChain { dim: s.dim(), grade: s.grade(), terms: vec![(1.0, s)] }
    }

    pub fn from_terms(dim: usize, grade: usize, terms: Vec<(f64, Simplex)>) -> Result<Self> {
        for (_, s) in &terms {
            if s.dim() != dim || s.grade() != grade {
                return Err(Error::GradeMismatch("chain term grade/dim".into()));
            }
        }
        Ok(PolyChain { dim, grade, terms })
    }

    pub fn add(&self, other: &PolyChain) -> PolyChain {
        assert_eq!((self.dim, self.grade), (other.dim, other.grade));
        let mut terms = self.terms.clone();
        terms.extend(other.terms.clone());
        PolyChain { dim: self.dim, grade: self.grade, terms }
    }

    pub fn scale(&self, s: f64) -> PolyChain {
        PolyChain {
            dim: self.dim,
            grade: self.grade,
            terms: self.terms.iter().map(|(c, sx)| (c * s, sx.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &PolyChain) -> PolyChain {
        self.add(&other.scale(-1.0))
    }

    /// Canonical form: vertices of each simplex sorted lexicographically
    /// (sign absorbed into the coefficient), identical simplices merged,
    /// coefficients below 1e−12 dropped.
    pub fn canonicalize(&self) -> PolyChain {
        let mut map: BTreeMap<Vec<u64>, (f64, Simplex)> = BTreeMap::new();
        for (c, s) in &self.terms {
            let (key, sign) = s.sorted_key();
            let entry = map.entry(key).or_insert_with(|| {
                let (sorted, _) = s.canonical();
                (0.0, sorted)
            });
            entry.0 += c * sign;
        }
        let terms = map
            .into_values()
            .filter(|(c, _)| c.abs() > DROP_TOL)
            .map(|(c, s)| (c, s))
            .collect();
        PolyChain { dim: self.dim, grade: self.grade, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.canonicalize().terms.is_empty()
    }

    /// Largest coefficient magnitude in canonical form.
    pub fn max_coeff(&self) -> f64 {
        self.canonicalize()
            .terms
            .iter()
            .map(|(c, _)| c.abs())
            .fold(0.0, f64::max)
    }
}

/// ∂[a_0,…,a_k] = Σ_i (−1)^i [a_0,…,â_i,…,a_k], extended linearly.
pub fn boundary(c: &PolyChain) -> Result<PolyChain> {
    if c.grade == 0 {
        return Err(Error::GradeMismatch("boundary of a 0-chain".into()));
    }
    let mut terms = Vec::new();
    for (coeff, s) in &c.terms {
        for i in 0..=s.grade() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            terms.push((coeff * sign, s.face(i)));
        }
    }
    Ok(PolyChain { dim: c.dim, grade: c.grade - 1, terms }.canonicalize())
}

/// Cone w ∗ c: σ ↦ [w, σ] extended linearly. Rejects w inside the affine
/// hull of any simplex of c.
pub fn cone(w: &Vector, c: &PolyChain) -> Result<PolyChain> {
    let mut terms = Vec::new();
    for (coeff, s) in &c.terms {
        let mut verts = vec![w.clone()];
        verts.extend(s.vertices.clone());
        let coned = Simplex::new(verts).map_err(|_| {
            Error::DegenerateSimplex(format!(
                "cone apex lies in the affine hull of {:?}",
                s.vertices
            ))
        })?;
        terms.push((*coeff, coned));
    }
    Ok(PolyChain { dim: c.dim, grade: c.grade + 1, terms })
}

/// Staircase triangulation of the region swept between `base` and `top`,
/// where `top` pairs vertex-for-vertex with `base`:
/// Σ_j (−1)^j [b_0,…,b_j, t_j,…,t_{k−1}].
/// Its boundary is top − base plus lateral terms (the staircase over ∂base).
pub fn prism_between(base: &Simplex, top_vertices: &[Vector]) -> Result<PolyChain> {
    let kv = base.vertices.len();
    assert_eq!(top_vertices.len(), kv);
    let mut terms = Vec::new();
    for j in 0..kv {
        let mut verts: Vec<Vector> = base.vertices[..=j].to_vec();
        verts.extend(top_vertices[j..].iter().cloned());
        let s = Simplex::new(verts)
            .map_err(|e| Error::DegenerateSimplex(format!("degenerate prism: {e}")))?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        terms.push((sign, s));
    }
    Ok(PolyChain { dim: base.dim(), grade: base.grade() + 1, terms })
}

/// Prism over `base` with translation `offset`.
pub fn prism(base: &Simplex, offset: &Vector) -> Result<PolyChain> {
    let top: Vec<Vector> = base.vertices.iter().map(|v| v + offset).collect();
    prism_between(base, &top)
}

// ---------------------------------------------------------------------------
// polynomial differential forms
// ---------------------------------------------------------------------------

/// Multivariate polynomial in n variables, sparse monomial list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub nvars: usize,
    /// (coefficient, exponent vector)
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        if c == 0.0 {
            Self::zero(nvars)
        } else {
            Polynomial { nvars, terms: vec![(c, vec![0; nvars])] }
        }
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Polynomial { nvars, terms: vec![(1.0, e)] }
    }

    pub fn compress(&self) -> Polynomial {
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (c, e) in &self.terms {
            *map.entry(e.clone()).or_insert(0.0) += c;
        }
        Polynomial {
            nvars: self.nvars,
            terms: map
                .into_iter()
                .filter(|(_, c)| c.abs() > 0.0)
                .map(|(e, c)| (c, e))
                .collect(),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.clone());
        Polynomial { nvars: self.nvars, terms }.compress()
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(c, e)| (c * s, e.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms = Vec::new();
        for (c1, e1) in &self.terms {
            for (c2, e2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                terms.push((c1 * c2, e));
            }
        }
        Polynomial { nvars: self.nvars, terms }.compress()
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * e
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| x[i].powi(p as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn partial(&self, i: usize) -> Polynomial {
        let mut terms = Vec::new();
        for (c, e) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            terms.push((c * e[i] as f64, e2));
        }
        Polynomial { nvars: self.nvars, terms }.compress()
    }

    /// Substitute x_j = a_j0 + Σ_i a_ji t_i (affine map into `tvars`
    /// variables). `affine[j]` has length tvars + 1, constant first.
    pub fn compose_affine(&self, affine: &[Vec<f64>], tvars: usize) -> Polynomial {
        let mut out = Polynomial::zero(tvars);
        for (c, e) in &self.terms {
            let mut term = Polynomial::constant(tvars, *c);
            for (j, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let mut lin = Polynomial::constant(tvars, affine[j][0]);
                for i in 0..tvars {
                    lin = lin.add(&Polynomial::variable(tvars, i).scale(affine[j][i + 1]));
                }
                for _ in 0..p {
                    term = term.mul(&lin);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Exact integral over the standard simplex Δ_k = {t ≥ 0, Σt ≤ 1} in
    /// `nvars` variables, via ∫ t^α dt = (Πα_i!)/(k + |α|)!.
    pub fn integrate_standard_simplex(&self) -> f64 {
        let k = self.nvars;
        self.terms
            .iter()
            .map(|(c, e)| {
                let total: u32 = e.iter().sum();
                let num: f64 = e.iter().map(|&a| factorial(a as usize)).product();
                c * num / factorial(k + total as usize)
            })
            .sum()
    }
}

/// A k-form on R^n with polynomial coefficients: one polynomial per
/// increasing k-subset (colex order, matching `exterior`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyForm {
    pub dim: usize,
    pub grade: usize,
    pub components: Vec<Polynomial>,
}

impl PolyForm {
    pub fn zero(dim: usize, grade: usize) -> Self {
        PolyForm {
            dim,
            grade,
            components: vec![Polynomial::zero(dim); binomial(dim, grade)],
        }
    }

    /// Constant form with the given component values.
    pub fn constant(dim: usize, grade: usize, values: &[f64]) -> Self {
        PolyForm {
            dim,
            grade,
            components: values
                .iter()
                .map(|&v| Polynomial::constant(dim, v))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> PolyForm {
        PolyForm {
            dim: self.dim,
            grade: self.grade,
            components: self.components.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        assert_eq!((self.dim, self.grade), (other.dim, other.grade));
        PolyForm {
            dim: self.dim,
            grade: self.grade,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    /// Evaluate the coefficient array at a point (a constant covector).
    pub fn eval_at(&self, x: &Vector) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }
}

/// Exact ∫_c ω by affine pullback to the standard simplex.
pub fn integrate(c: &PolyChain, omega: &PolyForm) -> Result<f64> {
    if c.dim != omega.dim || c.grade != omega.grade {
        return Err(Error::GradeMismatch("integrate grade/dim mismatch".into()));
    }
    let k = c.grade;
    let n = c.dim;
    let subsets = index_subsets(n, k);
    let mut total = 0.0;
    for (coeff, s) in &c.terms {
        let a0 = &s.vertices[0];
        let edges = s.edge_vectors();
        // affine map x_j = a0_j + Σ_i edges_i[j] t_i
        let affine: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut row = vec![a0[j]];
                row.extend(edges.iter().map(|e| e[j]));
                row
            })
            .collect();
        let mut integral = 0.0;
        for (si, subset) in subsets.iter().enumerate() {
            let p = &omega.components[si];
            if p.terms.is_empty() {
                continue;
            }
            // det of the k×k minor of the Jacobian on rows `subset`
            let minor: Vec<Vec<f64>> = subset
                .iter()
                .map(|&row| edges.iter().map(|e| e[row]).collect())
                .collect();
            let jac = det(&minor);
            if jac == 0.0 {
                continue;
            }
            let pulled = p.compose_affine(&affine, k);
            integral += jac * pulled.integrate_standard_simplex();
        }
        total += coeff * integral;
    }
    Ok(total)
}

/// Symbolic exterior derivative: d(p dx_S) = Σ_j (∂p/∂x_j) dx_j ∧ dx_S.
pub fn exterior_derivative(omega: &PolyForm) -> PolyForm {
    let n = omega.dim;
    let k = omega.grade;
    assert!(k < n, "exterior derivative of a top form");
    let subsets_k = index_subsets(n, k);
    let subsets_k1 = index_subsets(n, k + 1);
    let index_of: BTreeMap<Vec<usize>, usize> = subsets_k1
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut out = PolyForm::zero(n, k + 1);
    for (si, subset) in subsets_k.iter().enumerate() {
        let p = &omega.components[si];
        for j in 0..n {
            if subset.contains(&j) {
                continue;
            }
            let dp = p.partial(j);
            if dp.terms.is_empty() {
                continue;
            }
            // sign of sorting j into the subset: dx_j ∧ dx_S
            let pos = subset.iter().filter(|&&s| s < j).count();
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            let mut merged = subset.clone();
            merged.push(j);
            merged.sort_unstable();
            let idx = index_of[&merged];
            out.components[idx] = out.components[idx].add(&dp.scale(sign));
        }
    }
    out
}

/// Random polynomial form of bounded degree, for the equivalence and Stokes
/// oracles. Deterministic for a given rng state.
pub fn random_polyform<R: rand::Rng>(
    dim: usize,
    grade: usize,
    max_degree: u32,
    rng: &mut R,
) -> PolyForm {
    let subsets = index_subsets(dim, grade);
    let mut components = Vec::with_capacity(subsets.len());
    for _ in &subsets {
        let mut p = Polynomial::zero(dim);
        // a few random monomials each
        for _ in 0..3 {
            let c: f64 = rng.gen_range(-1.0..1.0);
            let e: Vec<u32> = (0..dim)
                .map(|_| rng.gen_range(0..=max_degree.min(2)))
                .collect();
            let total: u32 = e.iter().sum();
            if total > max_degree {
                continue;
            }
            p.terms.push((c, e));
        }
        components.push(p.compress());
    }
    PolyForm { dim, grade, components }
}

/// True iff the chains integrate `trials` random bounded-degree polynomial
/// forms to the same value (tolerance scaled by the magnitudes involved).
/// This realizes equality in the quotient by subdivision and orientation.
pub fn chains_equivalent(c1: &PolyChain, c2: &PolyChain, trials: usize, seed: u64) -> Result<bool> {
    if c1.dim != c2.dim || c1.grade != c2.grade {
        return Err(Error::GradeMismatch("chains_equivalent grade/dim".into()));
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let scale: f64 = c1
        .terms
        .iter()
        .chain(&c2.terms)
        .map(|(c, s)| c.abs() * s.volume() * (1.0 + s.extent().powi(2)))
        .sum::<f64>()
        .max(1.0);
    for _ in 0..trials {
        let omega = random_polyform(c1.dim, c1.grade, 2, &mut rng);
        let i1 = integrate(c1, &omega)?;
        let i2 = integrate(c2, &omega)?;
        if (i1 - i2).abs() > 1e-9 * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn pt(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec())
    }

    fn simplex(verts: &[&[f64]]) -> Simplex {
        Simplex::new(verts.iter().map(|v| pt(v)).collect()).unwrap()
    }

    fn random_simplex<R: Rng>(n: usize, k: usize, rng: &mut R) -> Simplex {
        loop {
            let verts: Vec<Vector> = (0..=k)
                .map(|_| Vector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                .collect();
            if let Ok(s) = Simplex::new(verts) {
                return s;
            }
        }
    }

    #[test]
    fn boundary_of_triangle() {
        let t = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let b = boundary(&PolyChain::from_simplex(t)).unwrap();
        // [a1,a2] − [a0,a2] + [a0,a1]
        assert_eq!(b.terms.len(), 3);
        let direct = PolyChain::from_terms(
            2,
            1,
            vec![
                (1.0, simplex(&[&[1.0, 0.0], &[0.0, 1.0]])),
                (-1.0, simplex(&[&[0.0, 0.0], &[0.0, 1.0]])),
                (1.0, simplex(&[&[0.0, 0.0], &[1.0, 0.0]])),
            ],
        )
        .unwrap();
        assert!(b.sub(&direct).is_zero());
    }

    #[test]
    fn subdivision_relation_has_zero_boundary() {
        // ∂([a,c] + [c,b] − [a,b]) = 0 with c interior
        let a = pt(&[0.0, 0.0]);
        let b = pt(&[2.0, 1.0]);
        let c = pt(&[1.0, 0.5]);
        let chain = PolyChain::from_terms(
            2,
            1,
            vec![
                (1.0, Simplex::new(vec![a.clone(), c.clone()]).unwrap()),
                (1.0, Simplex::new(vec![c, b.clone()]).unwrap()),
                (-1.0, Simplex::new(vec![a, b]).unwrap()),
            ],
        )
        .unwrap();
        assert!(boundary(&chain).unwrap().is_zero());
    }

    #[test]
    fn boundary_squared_vanishes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = random_simplex(4, 3, &mut rng);
        let c = PolyChain::from_simplex(s);
        let bb = boundary(&boundary(&c).unwrap()).unwrap();
        assert!(bb.is_zero());
    }

    #[test]
    fn integrate_basics() {
        // ∫ over [0, e1] of dx1 = 1
        let seg = simplex(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let mut omega = PolyForm::zero(2, 1);
        omega.components[0] = Polynomial::constant(2, 1.0);
        let v = integrate(&PolyChain::from_simplex(seg), &omega).unwrap();
        assert!((v - 1.0).abs() < 1e-14);

        // ∫ over [0, e1, e2] of dx1∧dx2 = 1/2
        let tri = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let area = PolyForm::constant(2, 2, &[1.0]);
        let v = integrate(&PolyChain::from_simplex(tri.clone()), &area).unwrap();
        assert!((v - 0.5).abs() < 1e-14);

        // ∫ over [0, e1, e2] of x1 dx1∧dx2 = 1/6
        let mut omega = PolyForm::zero(2, 2);
        omega.components[0] = Polynomial::variable(2, 0);
        let v = integrate(&PolyChain::from_simplex(tri), &omega).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn exterior_derivative_cases() {
        // d(x2 dx1) = −dx1∧dx2
        let mut omega = PolyForm::zero(2, 1);
        omega.components[0] = Polynomial::variable(2, 1);
        let d = exterior_derivative(&omega);
        assert_eq!(d.components[0].terms, vec![(-1.0, vec![0, 0])]);

        // d(constant form) = 0
        let c = PolyForm::constant(3, 1, &[1.0, 2.0, 3.0]);
        let d = exterior_derivative(&c);
        assert!(d.components.iter().all(|p| p.terms.is_empty()));

        // d(x1x2 dx1 + x1² dx2) = (2x1 − x1) dx1∧dx2 = x1 dx1∧dx2
        let mut omega = PolyForm::zero(2, 1);
        omega.components[0] = Polynomial {
            nvars: 2,
            terms: vec![(1.0, vec![1, 1])],
        };
        omega.components[1] = Polynomial {
            nvars: 2,
            terms: vec![(1.0, vec![2, 0])],
        };
        let d = exterior_derivative(&omega);
        assert_eq!(d.components[0].terms, vec![(1.0, vec![1, 0])]);
    }

    #[test]
    fn dd_is_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let omega = random_polyform(4, 1, 2, &mut rng);
        let dd = exterior_derivative(&exterior_derivative(&omega));
        for p in &dd.components {
            for (c, _) in &p.terms {
                assert!(c.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stokes_on_random_chains() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            for k in 1..=n.min(3) {
                let s = random_simplex(n, k, &mut rng);
                let c = PolyChain::from_simplex(s);
                let omega = random_polyform(n, k - 1, 2, &mut rng);
                let lhs = integrate(&boundary(&c).unwrap(), &omega).unwrap();
                let rhs = integrate(&c, &exterior_derivative(&omega)).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs().max(rhs.abs())),
                    "stokes failed n={n} k={k}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn equivalence_under_subdivision() {
        // [a,b] vs [a,c]+[c,b] with c the midpoint
        let a = pt(&[0.0, 0.0]);
        let b = pt(&[1.0, 1.0]);
        let c = pt(&[0.5, 0.5]);
        let whole = PolyChain::from_simplex(Simplex::new(vec![a.clone(), b.clone()]).unwrap());
        let split = PolyChain::from_terms(
            2,
            1,
            vec![
                (1.0, Simplex::new(vec![a.clone(), c.clone()]).unwrap()),
                (1.0, Simplex::new(vec![c, b.clone()]).unwrap()),
            ],
        )
        .unwrap();
        assert!(chains_equivalent(&whole, &split, 12, 42).unwrap());
        // reversed orientation is not equivalent
        let reversed = PolyChain::from_simplex(Simplex::new(vec![b, a]).unwrap());
        assert!(!chains_equivalent(&whole, &reversed, 12, 42).unwrap());
    }

    #[test]
    fn equivalence_under_barycentric_subdivision() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let t = random_simplex(3, 2, &mut rng);
        let bc = t.barycenter();
        // subdivide into 3 triangles [bc, face_i] with the boundary signs
        let mut parts = Vec::new();
        for i in 0..3 {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let mut verts = vec![bc.clone()];
            verts.extend(t.face(i).vertices);
            parts.push((sign, Simplex::new(verts).unwrap()));
        }
        let subdivided = PolyChain::from_terms(3, 2, parts).unwrap();
        let whole = PolyChain::from_simplex(t);
        assert!(chains_equivalent(&whole, &subdivided, 12, 7).unwrap());
    }

    #[test]
    fn barycenter_and_volume() {
        let seg = simplex(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!((&seg.barycenter() - &pt(&[0.5, 0.0])).is_zero(1e-15));
        assert!((seg.volume() - 1.0).abs() < 1e-15);
        let tri = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!((tri.volume() - 0.5).abs() < 1e-15);
        let tet = simplex(&[
            &[0.0, 0.0, 0.0],
            &[2.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0],
            &[0.0, 0.0, 2.0],
        ]);
        assert!((tet.volume() - 8.0 / 6.0).abs() < 1e-12);
        let std3 = simplex(&[
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
        ]);
        assert!((&std3.barycenter() - &pt(&[1.0 / 3.0; 3])).is_zero(1e-15));
    }

    #[test]
    fn cone_identity() {
        // ∂(w ∗ c) = c − w ∗ ∂c, exactly in canonical form
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let s = random_simplex(3, 2, &mut rng);
        let c = PolyChain::from_simplex(s);
        let w = pt(&[1.5, -0.3, 2.0]);
        let coned = cone(&w, &c).unwrap();
        let lhs = boundary(&coned).unwrap();
        let rhs = c.sub(&cone(&w, &boundary(&c).unwrap()).unwrap());
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn cone_over_closed_square_loop() {
        // closed square loop: ∂(cone) = loop
        let corners = [
            pt(&[0.0, 0.0]),
            pt(&[1.0, 0.0]),
            pt(&[1.0, 1.0]),
            pt(&[0.0, 1.0]),
        ];
        let mut terms = Vec::new();
        for i in 0..4 {
            let a = corners[i].clone();
            let b = corners[(i + 1) % 4].clone();
            terms.push((1.0, Simplex::new(vec![a, b]).unwrap()));
        }
        let loop_chain = PolyChain::from_terms(2, 1, terms).unwrap();
        assert!(boundary(&loop_chain).unwrap().is_zero());
        let w = pt(&[0.3, 0.4]);
        let filled = cone(&w, &loop_chain).unwrap();
        assert!(boundary(&filled).unwrap().sub(&loop_chain).is_zero());
    }

    #[test]
    fn cone_rejects_degenerate_apex() {
        let seg = simplex(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let c = PolyChain::from_simplex(seg);
        // apex on the segment's line
        assert!(cone(&pt(&[2.0, 0.0]), &c).is_err());
    }

    #[test]
    fn cone_over_empty_chain() {
        let c = PolyChain::zero(2, 0);
        let coned = cone(&pt(&[0.0, 1.0]), &c).unwrap();
        assert!(coned.terms.is_empty());
    }

    #[test]
    fn prism_boundary_structure() {
        // prism over segment: ∂P − (top − base) has only lateral edges
        let base = simplex(&[&[0.0, 0.0, 0.0], &[1.0, 0.3, 0.0]]);
        let v = pt(&[0.1, 0.2, 1.0]);
        let p = prism(&base, &v).unwrap();
        let top = base.translated(&v);
        let b = boundary(&p).unwrap();
        let ends = PolyChain::from_simplex(top.clone())
            .sub(&PolyChain::from_simplex(base.clone()));
        let lateral = b.sub(&ends).canonicalize();
        // every lateral edge contains exactly one base and one top vertex
        for (_, s) in &lateral.terms {
            let in_base = s
                .vertices
                .iter()
                .filter(|x| base.vertices.iter().any(|y| (&(*x).clone() - y).is_zero(1e-12)))
                .count();
            let in_top = s
                .vertices
                .iter()
                .filter(|x| top.vertices.iter().any(|y| (&(*x).clone() - y).is_zero(1e-12)))
                .count();
            assert_eq!(in_base + in_top, s.vertices.len());
            assert!(in_base >= 1 && in_top >= 1, "face not lateral");
        }
    }

    #[test]
    fn prism_over_point_is_segment() {
        let base = Simplex::new(vec![pt(&[1.0, 2.0])]).unwrap();
        let p = prism(&base, &pt(&[0.0, 1.0])).unwrap();
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms[0].1.grade(), 1);
    }

    #[test]
    fn prism_equivalent_to_square_diagonal_split() {
        // prism over [0,e1] with offset e2 ~ the square split along either
        // diagonal, oriented compatibly with ∂(prism) = top − base + sides
        let base = simplex(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let p = prism(&base, &pt(&[0.0, 1.0])).unwrap();
        let other_diag = PolyChain::from_terms(
            2,
            2,
            vec![
                (-1.0, simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]])),
                (-1.0, simplex(&[&[0.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]])),
            ],
        )
        .unwrap();
        assert!(chains_equivalent(&p, &other_diag, 12, 3).unwrap());
        // and with the prism's own diagonal
        let same_diag = PolyChain::from_terms(
            2,
            2,
            vec![
                (1.0, simplex(&[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])),
                (1.0, simplex(&[&[0.0, 0.0], &[1.0, 1.0], &[1.0, 0.0]])),
            ],
        )
        .unwrap();
        assert!(chains_equivalent(&p, &same_diag, 12, 4).unwrap());
    }

    proptest::proptest! {
        #[test]
        fn prop_boundary_squared_zero(seed in 0u64..200) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..=5usize);
            let k = rng.gen_range(2..=n);
            let s = random_simplex(n, k, &mut rng);
            let c = PolyChain::from_simplex(s).scale(rng.gen_range(-2.0..2.0));
            let bb = boundary(&boundary(&c).unwrap()).unwrap();
            proptest::prop_assert!(bb.max_coeff() < 1e-12);
        }
    }
}
