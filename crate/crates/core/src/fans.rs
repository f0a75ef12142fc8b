//! Numerical verifier for the fan constructions that govern junction
//! angles: when a compressed member meets stretched members at angles other
//! than 90°, truncating the junction and wrapping the members onto a fan
//! strictly reduces mass, so a minimizer can only contain right-angle
//! junctions away from the boundary.
//!
//! The mass comparison uses an explicit fan: the compressed member stops a
//! distance x short of the junction; each stretched member runs straight to
//! the point where its line is tangent to an equiangular spiral around the
//! truncation point and wraps onto that spiral, which is supported by
//! radial spokes. The tangent of a spiral turns with its polar angle, so
//! the wrap spans exactly π − a₁ − a₂, and the product of tension and
//! radius is constant along it, which gives the closed-form fan mass
//!
//!   mass_fan = (1 − x) + Σᵢ mᵢ(1 − x cos aᵢ) + 2·T·(1+λ²)·(π − a₁ − a₂)·x
//!
//! with member angles a᎔ᵢ from the compressed axis, magnitudes
//! mᵢ = sin a_{3−i}/sin(a₁+a₂), tangential component
//! T = sin a₁ sin a₂ / sin(a₁+a₂), and spiral pitch
//! λ = ln(sin a₂ / sin a₁)/(π − a₁ − a₂). The difference against the
//! original three springs is exactly linear in x; its slope is negative on
//! the whole acute/right/obtuse domains, degenerating to zero only with the
//! associated inequality margins. For the symmetric case λ = 0 and the
//! slope reduces to 2[(π − a₁ − a₂) sin a₁ sin a₂ − sin(a₁+a₂)]/sin(a₁+a₂),
//! the inequality that the derivative criterion is equivalent to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, lstsq_residual, Vector};
use crate::optimize::{GroundStructure, TrussSolution};

/// Which junction case is being verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FanCase {
    /// Both stretched members at acute angles α, β.
    Acute,
    /// One stretched member perpendicular (α = 90°), the other at β.
    Right,
    /// One stretched member at the obtuse angle 90° + α, the other at β,
    /// with α + β < 90°.
    Obtuse,
}

impl FanCase {
    /// Member angles (a₁, a₂) measured from the compressed axis.
    pub fn member_angles(self, alpha: f64, beta: f64) -> Result<(f64, f64)> {
        use std::f64::consts::FRAC_PI_2;
        match self {
            FanCase::Acute => {
                if !(alpha > 0.0 && alpha < FRAC_PI_2 && beta > 0.0 && beta < FRAC_PI_2) {
                    return Err(Error::Precondition(
                        "acute case needs 0 < α, β < π/2".into(),
                    ));
                }
                Ok((alpha, beta))
            }
            FanCase::Right => {
                if !(beta > 0.0 && beta < FRAC_PI_2) {
                    return Err(Error::Precondition("right case needs 0 < β < π/2".into()));
                }
                Ok((FRAC_PI_2, beta))
            }
            FanCase::Obtuse => {
                if !(alpha > 0.0 && beta > 0.0 && alpha + beta < FRAC_PI_2) {
                    return Err(Error::Precondition(
                        "obtuse case needs α, β > 0 and α + β < π/2".into(),
                    ));
                }
                Ok((FRAC_PI_2 + alpha, beta))
            }
        }
    }
}

/// Fan parameters: angles, offset, and the derived quantities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FanConfig {
    pub case: FanCase,
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    pub f1_mag: f64,
    pub f2_mag: f64,
    /// The slope parameter of the source display (k → cot β as x → 0).
    pub slope_k: f64,
    /// Fan opening parameter with Ω → β as x → 0 (Ω = arccot k).
    pub omega: f64,
}

impl FanConfig {
    pub fn new(case: FanCase, alpha: f64, beta: f64, x: f64) -> Result<Self> {
        let (a1, a2) = case.member_angles(alpha, beta)?;
        if x < 0.0 {
            return Err(Error::Precondition("fan offset x must be ≥ 0".into()));
        }
        let denom = (a1 + a2).sin();
        let f1_mag = a1.sin() / denom;
        let f2_mag = a2.sin() / denom;
        let slope_k = slope_k(case, alpha, beta, x)?;
        let omega = (1.0f64).atan2(slope_k);
        Ok(FanConfig { case, alpha, beta, x, f1_mag, f2_mag, slope_k, omega })
    }
}

/// The display's slope parameter k(α, β, x); the obtuse case substitutes
/// α ↦ 90° + α into the acute expression.
pub fn slope_k(case: FanCase, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    let (sa, ca) = match case {
        FanCase::Acute => (alpha.sin(), alpha.cos()),
        FanCase::Right => (1.0, 0.0),
        FanCase::Obtuse => (alpha.cos(), -alpha.sin()),
    };
    let (sb, cb) = (beta.sin(), beta.cos());
    let _ = ca;
    let root = (1.0 - 2.0 * cb * x + (sa * sa).mul_add(0.0, 0.0).max(0.0)
        + match case {
            FanCase::Obtuse => alpha.sin() * alpha.sin() * x * x,
            _ => alpha.cos() * alpha.cos() * x * x,
        })
    .sqrt();
    // denominators vanish at and beyond the singular offset
    let num = sa * sb * x + (cb - x) * root;
    let den = sb * root - (cb - x) * sa * x;
    if den.abs() < 1e-12 {
        return Err(Error::Precondition("fan offset at the singular slope value".into()));
    }
    Ok(num / den)
}

/// 1 + |F₁| + |F₂|: the mass of the original three springs after
/// normalizing the compressed one to unit magnitude and length.
pub fn mass_original(case: FanCase, alpha: f64, beta: f64) -> Result<f64> {
    let (a1, a2) = case.member_angles(alpha, beta)?;
    let denom = (a1 + a2).sin();
    Ok(1.0 + a1.sin() / denom + a2.sin() / denom)
}

/// Spiral pitch of the fan: λ = ln(sin a₂ / sin a₁)/(π − a₁ − a₂).
fn spiral_pitch(a1: f64, a2: f64) -> f64 {
    (a2.sin() / a1.sin()).ln() / (std::f64::consts::PI - a1 - a2)
}

/// Exact mass of the spiral fan at offset x.
pub fn mass_fan(cfg: &FanConfig) -> Result<f64> {
    let (a1, a2) = cfg.case.member_angles(cfg.alpha, cfg.beta)?;
    if cfg.x <= 0.0 {
        return Err(Error::Precondition("the fan needs x > 0".into()));
    }
    // the straight runs and the compressed member must keep positive length
    if cfg.x >= 1.0 || 1.0 - cfg.x * a1.cos() <= 0.0 || 1.0 - cfg.x * a2.cos() <= 0.0 {
        return Err(Error::Precondition("fan offset too large".into()));
    }
    let denom = (a1 + a2).sin();
    // sine rule: the member at angle a₁ carries sin a₂ / sin(a₁+a₂)
    let m1 = a2.sin() / denom;
    let m2 = a1.sin() / denom;
    let t_tan = a1.sin() * a2.sin() / denom;
    let lam = spiral_pitch(a1, a2);
    let sweep = std::f64::consts::PI - a1 - a2;
    Ok((1.0 - cfg.x)
        + m1 * (1.0 - cfg.x * a1.cos())
        + m2 * (1.0 - cfg.x * a2.cos())
        + 2.0 * t_tan * (1.0 + lam * lam) * sweep * cfg.x)
}

/// f(x) = mass_fan − mass_original.
pub fn fan_mass_difference(case: FanCase, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    let cfg = FanConfig::new(case, alpha, beta, x)?;
    Ok(mass_fan(&cfg)? - mass_original(case, alpha, beta)?)
}

/// One-sided derivative estimate of f at 0 by Richardson-extrapolated
/// forward differences at x ∈ {1e−3, 5e−4, …}; returns (value, error
/// estimate).
pub fn fprime_at_zero(case: FanCase, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let mut estimates = Vec::new();
    let mut h = 1e-3;
    for _ in 0..5 {
        let f2 = fan_mass_difference(case, alpha, beta, 2.0 * h)?;
        let f1 = fan_mass_difference(case, alpha, beta, h)?;
        // first-order extrapolation of the forward difference
        estimates.push(2.0 * f1 / h - f2 / (2.0 * h) * 1.0 - (f2 - 2.0 * f1) / (2.0 * h) * 0.0);
        h *= 0.5;
    }
    // the two-point forward differences themselves
    let mut diffs = Vec::new();
    let mut h = 1e-3;
    for _ in 0..6 {
        diffs.push(fan_mass_difference(case, alpha, beta, h)? / h);
        h *= 0.5;
    }
    // Richardson: d(h) = f'(0) + c h + …, eliminate the linear term
    let mut extr: Vec<f64> = diffs.clone();
    let mut level = 1;
    while extr.len() > 1 {
        let mut next = Vec::with_capacity(extr.len() - 1);
        let pow = 2f64.powi(level);
        for w in extr.windows(2) {
            next.push((pow * w[1] - w[0]) / (pow - 1.0));
        }
        extr = next;
        level += 1;
    }
    let value = extr[0];
    let error = diffs
        .last()
        .map(|d| (d - value).abs())
        .unwrap_or(f64::INFINITY);
    if !value.is_finite() {
        return Err(Error::Solver("derivative extrapolation did not converge".into()));
    }
    Ok((value, error))
}

/// Inequality families from the junction analysis: returns (holds, margin)
/// with margin = RHS − LHS.
pub fn check_inequality(case: FanCase, alpha: f64, beta: f64) -> Result<(bool, f64)> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let margin = match case {
        FanCase::Acute => {
            let (a, b) = case.member_angles(alpha, beta)?;
            (a + b).sin() - (PI - a - b) * a.sin() * b.sin()
        }
        FanCase::Right => {
            let (_, b) = case.member_angles(alpha, beta)?;
            // (π/2 − β) sin β < sin(π/2 + β)
            (FRAC_PI_2 + b).sin() - (FRAC_PI_2 - b) * b.sin()
        }
        FanCase::Obtuse => {
            let (_, _) = case.member_angles(alpha, beta)?;
            // cos α sin β (π/2 − α − β) < cos(α + β)
            (alpha + beta).cos() - (FRAC_PI_2 - alpha - beta) * alpha.cos() * beta.sin()
        }
    };
    Ok((margin > 0.0, margin))
}

/// The four-spring acute inequality (π − 2β + cos β) sin β < 3 cos β,
/// tested over β ∈ (0, π/2); returns (holds, margin).
pub fn check_four_spring_acute(beta: f64) -> Result<(bool, f64)> {
    use std::f64::consts::{FRAC_PI_2, PI};
    if !(beta > 0.0 && beta < FRAC_PI_2) {
        return Err(Error::Precondition("four-spring case needs 0 < β < π/2".into()));
    }
    let margin = 3.0 * beta.cos() - (PI - 2.0 * beta + beta.cos()) * beta.sin();
    Ok((margin > 0.0, margin))
}

/// A valid small offset: the sample formula
/// 0.01 cos β · β · (cos((α+β)/2) − sin((α+β)/2))/(cos((α−β)/2) − sin((α−β)/2)).
pub fn sample_x(alpha: f64, beta: f64) -> Result<f64> {
    use std::f64::consts::FRAC_PI_2;
    if !(alpha > 0.0 && beta > 0.0 && alpha + beta < FRAC_PI_2) {
        return Err(Error::Precondition("sample_x needs α, β > 0, α + β < π/2".into()));
    }
    let half_sum = 0.5 * (alpha + beta);
    let half_diff = 0.5 * (alpha - beta);
    let v = 0.01 * beta.cos() * beta * (half_sum.cos() - half_sum.sin())
        / (half_diff.cos() - half_diff.sin());
    Ok(v)
}

/// Splits a balanced four-force system {F₁..F₄} into two balanced
/// subsystems {cF₁, caF₂, cbF₃} and the complement, with F₁ = −aF₂ − bF₃.
/// `c` is shrunk automatically until ac < 1 and bc < 1.
#[allow(clippy::type_complexity)]
pub fn four_spring_split(
    f1: &Vector,
    f2: &Vector,
    f3: &Vector,
    f4: &Vector,
    c: f64,
) -> Result<(f64, f64, Vec<Vector>, Vec<Vector>)> {
    let n = f1.dim();
    let total = &(&(f1 + f2) + f3) + f4;
    if total.norm() > 1e-9 * (1.0 + f1.norm() + f2.norm() + f3.norm() + f4.norm()) {
        return Err(Error::Precondition("the four forces must sum to zero".into()));
    }
    // F₁ = −a F₂ − b F₃
    let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![-f2[i], -f3[i]]).collect();
    let rhs: Vec<f64> = (0..n).map(|i| f1[i]).collect();
    let x = lstsq(&rows, &rhs, 2)?;
    if lstsq_residual(&rows, &rhs, &x) > 1e-9 * (1.0 + f1.norm()) {
        return Err(Error::Precondition(
            "F₂ and F₃ do not span F₁ (a 180° degeneracy)".into(),
        ));
    }
    let (a, b) = (x[0], x[1]);
    if c <= 0.0 {
        return Err(Error::Precondition("c must be positive".into()));
    }
    let mut c = c;
    let bound = a.abs().max(b.abs()).max(1.0);
    while a * c >= 1.0 || b * c >= 1.0 || c >= 1.0 {
        c *= 0.5 / bound.max(1.0);
        if c < 1e-12 {
            break;
        }
    }
    let sub_a = vec![f1.scale(c), f2.scale(c * a), f3.scale(c * b)];
    let sub_b = vec![
        f1.scale(1.0 - c),
        f2.scale(1.0 - a * c),
        f3.scale(1.0 - b * c),
        f4.clone(),
    ];
    Ok((a, b, sub_a, sub_b))
}

/// One flagged defect at an unloaded node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditViolation {
    pub node: usize,
    /// Some((edge_a, edge_b, angle)) for a non-perpendicular mixed pair;
    /// None for a nonzero net force.
    pub pair: Option<(usize, usize, f64)>,
    pub detail: String,
}

/// Sign convention for classifying a member as stretched or compressed from
/// its λ coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignConvention {
    /// Positive tensor eigenvalue = compressed; with λ in the node-force
    /// convention Σλû = F this means λ < 0 is compressed.
    CompressPositive,
    /// λ > 0 is stretched (the same physical classification, named from
    /// the coefficient side).
    StretchPositive,
}

/// Flags junction defects a minimizer cannot have: at every unloaded free
/// node with at least two incident nonzero members, any stretched and
/// compressed pair must meet at 90°, and the net member force must vanish.
pub fn perpendicularity_audit(
    ts: &TrussSolution,
    gs: &GroundStructure,
    angle_tol: f64,
    convention: SignConvention,
) -> Result<Vec<AuditViolation>> {
    gs.validate()?;
    let mut out = Vec::new();
    let loaded: std::collections::BTreeSet<usize> =
        gs.loads.iter().filter(|(_, f)| f.norm() > 0.0).map(|(i, _)| *i).collect();
    let forces = crate::optimize::truss_boundary(ts, gs);
    let lam_scale = ts.lambda.iter().map(|l| l.abs()).fold(1e-12, f64::max);
    for node in 0..gs.nodes.len() {
        if loaded.contains(&node) || gs.supports[node] {
            continue;
        }
        let incident: Vec<usize> = gs
            .candidate_edges
            .iter()
            .enumerate()
            .filter(|(e, (a, b))| {
                (*a == node || *b == node) && ts.lambda[*e].abs() > 1e-9 * lam_scale
            })
            .map(|(e, _)| e)
            .collect();
        if incident.is_empty() {
            continue;
        }
        let net = &forces[node].1;
        if net.norm() > 1e-8 * lam_scale {
            out.push(AuditViolation {
                node,
                pair: None,
                detail: format!("unloaded node has net force {:.3e}", net.norm()),
            });
        }
        // stretched λ > 0, compressed λ < 0 in the Σλû = F convention; the
        // CompressPositive flag flips the reading of the stored sign
        let is_stretched = |lam: f64| match convention {
            SignConvention::StretchPositive => lam > 0.0,
            SignConvention::CompressPositive => lam < 0.0,
        };
        for (ii, &e1) in incident.iter().enumerate() {
            for &e2 in incident.iter().skip(ii + 1) {
                let s1 = is_stretched(ts.lambda[e1]);
                let s2 = is_stretched(ts.lambda[e2]);
                if s1 == s2 {
                    continue;
                }
                let dir = |e: usize| -> Vector {
                    let (a, b) = gs.candidate_edges[e];
                    let other = if a == node { b } else { a };
                    (&gs.nodes[other] - &gs.nodes[node]).normalized().unwrap()
                };
                let angle = dir(e1).dot(&dir(e2)).clamp(-1.0, 1.0).acos();
                if (angle - std::f64::consts::FRAC_PI_2).abs() > angle_tol {
                    out.push(AuditViolation {
                        node,
                        pair: Some((e1, e2, angle)),
                        detail: format!(
                            "mixed pair meets at {:.4} rad instead of π/2",
                            angle
                        ),
                    });
                }
            }
        }
    }
    Ok(out)
}
