//! Minimum-mass truss solver for the one-dimensional case: a linear program
//! over spring coefficients on a fixed ground structure, minimizing
//! Σ |λ_e| · L_e subject to equilibrium at every free node.
//!
//! The LP is solved by positive/negative splitting and a dense two-phase
//! simplex with Bland's rule; the contract is optimality against brute-force
//! vertex enumeration, not any particular pivot sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Node set, candidate edges, loads, and support markers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundStructure {
    pub nodes: Vec<Vector>,
    pub candidate_edges: Vec<(usize, usize)>,
    /// (node index, applied force)
    pub loads: Vec<(usize, Vector)>,
    /// true = support (reaction absorbed), false = free
    pub supports: Vec<bool>,
}

impl GroundStructure {
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.supports.len() != n {
            return Err(Error::Schema("supports length must match nodes".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &self.candidate_edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Schema(format!("invalid edge ({a}, {b})")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::Schema(format!("duplicate edge ({a}, {b})")));
            }
            if (&self.nodes[a] - &self.nodes[b]).norm() < 1e-12 {
                return Err(Error::Schema(format!("edge ({a}, {b}) has zero length")));
            }
        }
        for &(i, _) in &self.loads {
            if i >= n {
                return Err(Error::Schema(format!("load at missing node {i}")));
            }
        }
        Ok(())
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (a, b) = self.candidate_edges[e];
        (&self.nodes[b] - &self.nodes[a]).norm()
    }

    pub fn load_at(&self, node: usize) -> Vector {
        let dim = self.nodes[0].dim();
        let mut f = Vector::zeros(dim);
        for (i, l) in &self.loads {
            if *i == node {
                f = &f + l;
            }
        }
        f
    }
}

/// Solved member coefficients and the resulting mass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrussSolution {
    /// λ_e per candidate edge, in the convention Σ_j λ_ij û_ij = F_i at
    /// every free node.
    pub lambda: Vec<f64>,
    /// Σ |λ_e| · L_e.
    pub mass: f64,
    /// Per free node, ‖Σ λ û − F‖ after the solve.
    pub residuals: Vec<(usize, f64)>,
}

/// Dense two-phase simplex for min cᵀx, Ax = b, x ≥ 0 with Bland's rule.
/// Returns None when infeasible.
fn simplex(a: &[Vec<f64>], b: &[f64], c: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = a.len();
    let n = c.len();
    if m == 0 {
        return Some(vec![0.0; n]);
    }
    // tableau columns: [x (n) | artificials (m) | rhs]
    let rhs_col = n + m;
    let mut t = vec![vec![0.0; n + m + 1]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][rhs_col] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // phase-1 objective: minimize Σ artificials (reduced against the basis)
    for j in 0..=rhs_col {
        let mut s = 0.0;
        for i in 0..m {
            s += t[i][j];
        }
        t[m][j] = -s;
    }
    for i in 0..m {
        t[m][n + i] = 0.0;
    }

    fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], m: usize, row: usize, col: usize) {
        let piv = t[row][col];
        for v in t[row].iter_mut() {
            *v /= piv;
        }
        for i in 0..=m {
            if i == row {
                continue;
            }
            let f = t[i][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..t[i].len() {
                let delta = f * t[row][j];
                t[i][j] -= delta;
            }
        }
        basis[row] = col;
    }

    fn run(t: &mut [Vec<f64>], basis: &mut [usize], m: usize, cols: usize, tol: f64) -> bool {
        let rhs = t[0].len() - 1;
        for _ in 0..50_000 {
            // Bland: smallest index with negative reduced cost
            let mut enter = None;
            for j in 0..cols {
                if t[m][j] < -tol {
                    enter = Some(j);
                    break;
                }
            }
            let Some(col) = enter else { return true };
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..m {
                if t[i][col] > tol {
                    let ratio = t[i][rhs] / t[i][col];
                    let better = ratio < best - 1e-12
                        || (ratio < best + 1e-12
                            && leave.map_or(true, |l: usize| basis[i] < basis[l]));
                    if better {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(row) = leave else { return false };
            pivot(t, basis, m, row, col);
        }
        false
    }

    if !run(&mut t, &mut basis, m, n + m, tol) {
        return None;
    }
    let bscale = 1.0 + b.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if t[m][rhs_col].abs() > 1e-7 * bscale {
        return None; // infeasible: artificials cannot vanish
    }
    // drive leftover artificials out of the basis where possible
    for i in 0..m {
        if basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| t[i][j].abs() > tol) {
                pivot(&mut t, &mut basis, m, i, col);
            }
        }
    }
    // phase 2
    for j in 0..=rhs_col {
        t[m][j] = 0.0;
    }
    for (j, &cj) in c.iter().enumerate() {
        t[m][j] = cj;
    }
    for i in 0..m {
        if basis[i] < n {
            let f = t[m][basis[i]];
            if f != 0.0 {
                for j in 0..=rhs_col {
                    let delta = f * t[i][j];
                    t[m][j] -= delta;
                }
            }
        }
    }
    if !run(&mut t, &mut basis, m, n, tol) {
        return None;
    }
    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][rhs_col];
        }
    }
    Some(x)
}

/// Equilibrium rows (one per free-node coordinate): columns are signed
/// edge direction cosines.
fn equilibrium_rows(gs: &GroundStructure) -> (Vec<Vec<f64>>, Vec<f64>, Vec<usize>) {
    let dim = gs.nodes[0].dim();
    let free: Vec<usize> = (0..gs.nodes.len()).filter(|&i| !gs.supports[i]).collect();
    let ne = gs.candidate_edges.len();
    let mut rows = vec![vec![0.0; ne]; free.len() * dim];
    let mut rhs = vec![0.0; free.len() * dim];
    for (fi, &node) in free.iter().enumerate() {
        let load = gs.load_at(node);
        for c in 0..dim {
            rhs[fi * dim + c] = load[c];
        }
        for (e, &(a, b)) in gs.candidate_edges.iter().enumerate() {
            let other = if a == node {
                Some(b)
            } else if b == node {
                Some(a)
            } else {
                None
            };
            if let Some(o) = other {
                let u = (&gs.nodes[o] - &gs.nodes[node]).normalized().unwrap();
                for c in 0..dim {
                    rows[fi * dim + c][e] += u[c];
                }
            }
        }
    }
    (rows, rhs, free)
}

/// Minimum-mass member coefficients: λ minimizing Σ|λ_e|L_e subject to node
/// equilibrium at the free nodes, by LP with positive/negative splitting.
pub fn minimize_truss(gs: &GroundStructure, tol: f64) -> Result<TrussSolution> {
    gs.validate()?;
    let (rows, rhs, free) = equilibrium_rows(gs);
    let ne = gs.candidate_edges.len();
    let mut a = Vec::with_capacity(rows.len());
    for r in &rows {
        let mut row = Vec::with_capacity(2 * ne);
        row.extend(r.iter().copied());
        row.extend(r.iter().map(|v| -v));
        a.push(row);
    }
    let mut c = Vec::with_capacity(2 * ne);
    for e in 0..ne {
        c.push(gs.edge_length(e));
    }
    for e in 0..ne {
        c.push(gs.edge_length(e));
    }
    let x = simplex(&a, &rhs, &c, 1e-11).ok_or_else(|| {
        let report: Vec<String> = free
            .iter()
            .filter(|&&i| gs.load_at(i).norm() > 0.0)
            .map(|&i| format!("node {i} carries load {:?}", gs.load_at(i).0))
            .collect();
        Error::Solver(format!(
            "no equilibrium member assignment exists on the candidate set ({})",
            report.join("; ")
        ))
    })?;
    let lambda: Vec<f64> = (0..ne).map(|e| x[e] - x[ne + e]).collect();
    let mass: f64 = lambda
        .iter()
        .enumerate()
        .map(|(e, l)| l.abs() * gs.edge_length(e))
        .sum();
    let forces = node_forces(gs, &lambda);
    let mut residuals = Vec::new();
    for &i in &free {
        let r = (&forces[i] - &gs.load_at(i)).norm();
        if r > tol.max(1e-9) * (1.0 + gs.load_at(i).norm()) {
            return Err(Error::InternalVerification(format!(
                "solved truss violates equilibrium at node {i} by {r:.3e}"
            )));
        }
        residuals.push((i, r));
    }
    Ok(TrussSolution { lambda, mass, residuals })
}

fn node_forces(gs: &GroundStructure, lambda: &[f64]) -> Vec<Vector> {
    let dim = gs.nodes[0].dim();
    let mut out = vec![Vector::zeros(dim); gs.nodes.len()];
    for (e, &(a, b)) in gs.candidate_edges.iter().enumerate() {
        if lambda[e] == 0.0 {
            continue;
        }
        let u = (&gs.nodes[b] - &gs.nodes[a]).normalized().unwrap();
        out[a] = &out[a] + &u.scale(lambda[e]);
        out[b] = &out[b] - &u.scale(lambda[e]);
    }
    out
}

/// Net spring force per node: Σ_j λ_ij û_ij. At free nodes this reproduces
/// the loads to solver tolerance.
pub fn truss_boundary(ts: &TrussSolution, gs: &GroundStructure) -> Vec<(usize, Vector)> {
    node_forces(gs, &ts.lambda).into_iter().enumerate().collect()
}

/// Brute-force oracle: enumerate basic solutions over edge subsets and take
/// the minimum feasible mass. Intended for instances with few edges.
pub fn brute_force_optimum(gs: &GroundStructure) -> Option<f64> {
    let (rows, rhs, _) = equilibrium_rows(gs);
    let ne = gs.candidate_edges.len();
    let m = rows.len();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1u32 << ne) {
        let cols: Vec<usize> = (0..ne).filter(|e| mask & (1 << e) != 0).collect();
        if cols.len() > m + 2 {
            continue;
        }
        let sub: Vec<Vec<f64>> = rows.iter().map(|r| cols.iter().map(|&e| r[e]).collect()).collect();
        let Ok(x) = crate::linalg::lstsq(&sub, &rhs, cols.len()) else { continue };
        if crate::linalg::lstsq_residual(&sub, &rhs, &x) > 1e-8 * (1.0 + rhs.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            continue;
        }
        let mass: f64 = cols
            .iter()
            .zip(&x)
            .map(|(&e, l)| l.abs() * gs.edge_length(e))
            .sum();
        best = Some(best.map_or(mass, |b: f64| b.min(mass)));
    }
    best
}
