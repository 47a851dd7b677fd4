//! Certification machinery for points of maximal multiplicity: the Chebyshev
//! moment conditions of the pulled-back alternating datum, their monomial
//! equivalents, the six-species specialization, and the equivalent
//! derivative-vanishing form.
//!
//! A point p is a 2s-point of the limit configuration exactly when the
//! pullback Φ^a ∘ R_p has vanishing Fourier modes below order s and a
//! nonvanishing mode at order s; all routes here reduce to quadratures of
//! that pullback.

use crate::datum::AlternatingDatum;
use crate::harmonic::{BoundaryFunction, FourierField};
use crate::kernels::{
    self, chebyshev_t, chebyshev_u, moebius_boundary_angle, DiskPoint, QuadratureRule,
};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Relative tolerance for declaring a moment zero; scaled by the datum
/// amplitude and the circle measure 2π (moments are first-order homogeneous
/// in the datum).
pub const TOL_MOMENT_REL: f64 = 1e-8;

/// Relative tolerance for the derivative characterization.
pub const TOL_DERIV_REL: f64 = 1e-8;

/// Relative threshold for declaring the order-s coefficient pair nonzero.
pub const TOL_ORDER_REL: f64 = 1e-6;

/// Points this close to ∂D are rejected; the Möbius pullback degenerates.
pub const BOUNDARY_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum CertifyError {
    #[error("point with |p| = {0:.6} is too close to the boundary circle")]
    BoundaryPoint(f64),
    #[error("six-species conditions require k = 6, got {0}")]
    SpeciesCountNot6(usize),
    #[error(
        "degenerate datum: moments below order {s} vanish but so does the \
         order-{s} coefficient pair; the boundary function cannot have exactly 2s = {k} zeros"
    )]
    DegenerateDatum { s: usize, k: usize },
    #[error("interior multiple point at ({x:.4}, {y:.4}) has odd multiplicity {m}; the configuration cannot equal |psi_a|")]
    OddMultiplicityPresent { x: f64, y: f64, m: usize },
}

/// One monomial moment ∫ Φ^a(R_p(ζ)) ζ₁^{j-h} ζ₂^h ds.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MonomialMoment {
    pub j: usize,
    pub h: usize,
    pub value: f64,
}

/// The moment sets attached to a candidate point.
#[derive(Debug, Clone, Serialize, Default)]
pub struct MomentValues {
    /// ∫ Φ^a(R_p(ζ)) T_j(ζ₁) ds for j = 0..s-1.
    pub cheb_t: Vec<f64>,
    /// ∫ Φ^a(R_p(ζ)) ζ₂ U_{j-1}(ζ₁) ds for j = 1..s-1.
    pub cheb_u: Vec<f64>,
    /// ∫ Φ^a(R_p(ζ)) ζ₁^{j-h} ζ₂^h ds for 0 ≤ h ≤ j ≤ s-1.
    pub monomial: Vec<MonomialMoment>,
}

/// Report of the moment conditions at a point.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub p: [f64; 2],
    pub s: usize,
    pub moments: MomentValues,
    pub max_abs: f64,
    pub verdict: bool,
    #[serde(skip)]
    pub tol: f64,
}

impl MomentReport {
    fn assemble(p: DiskPoint, s: usize, moments: MomentValues, tol: f64) -> Self {
        let max_abs = moments
            .cheb_t
            .iter()
            .chain(moments.cheb_u.iter())
            .cloned()
            .chain(moments.monomial.iter().map(|m| m.value))
            .fold(0.0f64, |a, v| a.max(v.abs()));
        MomentReport {
            p: [p.x1(), p.x2()],
            s,
            moments,
            max_abs,
            verdict: max_abs < tol,
            tol,
        }
    }
}

/// Derivative-form report at a point: ψ_a(p), ∇ψ_a(p) and the Hessian.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport {
    pub p: [f64; 2],
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: [[f64; 2]; 2],
    pub verdict: bool,
    #[serde(skip)]
    pub tol: f64,
}

fn check_interior(p: DiskPoint) -> Result<(), CertifyError> {
    if p.radius() > 1.0 - BOUNDARY_EXCLUSION {
        return Err(CertifyError::BoundaryPoint(p.radius()));
    }
    Ok(())
}

/// Samples of φ ∘ R_p at the rule nodes.
fn pullback_samples(
    boundary: &dyn BoundaryFunction,
    p: DiskPoint,
    rule: &QuadratureRule,
) -> Vec<f64> {
    rule.nodes()
        .map(|t| boundary.eval_boundary(moebius_boundary_angle(p, t)))
        .collect()
}

fn moment_tol(amplitude: f64) -> f64 {
    TOL_MOMENT_REL * amplitude.max(1e-300) * 2.0 * PI
}

/// Chebyshev-weighted moments of a pulled-back boundary function.
pub fn chebyshev_moments_of(
    boundary: &dyn BoundaryFunction,
    p: DiskPoint,
    s: usize,
    rule: &QuadratureRule,
) -> MomentValues {
    let samples = pullback_samples(boundary, p, rule);
    let w = rule.weight();
    let mut cheb_t = vec![0.0; s];
    let mut cheb_u = vec![0.0; s.saturating_sub(1)];
    for (m, &f) in samples.iter().enumerate() {
        let theta = rule.node(m);
        let (sin_t, cos_t) = theta.sin_cos();
        for (j, acc) in cheb_t.iter_mut().enumerate() {
            *acc += f * chebyshev_t(j, cos_t);
        }
        for (j, acc) in cheb_u.iter_mut().enumerate() {
            *acc += f * sin_t * chebyshev_u(j, cos_t);
        }
    }
    cheb_t.iter_mut().for_each(|v| *v *= w);
    cheb_u.iter_mut().for_each(|v| *v *= w);
    MomentValues {
        cheb_t,
        cheb_u,
        monomial: Vec::new(),
    }
}

/// Monomial moments of a pulled-back boundary function.
pub fn monomial_moments_of(
    boundary: &dyn BoundaryFunction,
    p: DiskPoint,
    s: usize,
    rule: &QuadratureRule,
) -> MomentValues {
    let samples = pullback_samples(boundary, p, rule);
    let w = rule.weight();
    let mut monomial: Vec<MonomialMoment> = (0..s)
        .flat_map(|j| (0..=j).map(move |h| MonomialMoment { j, h, value: 0.0 }))
        .collect();
    for (m, &f) in samples.iter().enumerate() {
        let theta = rule.node(m);
        let (z2, z1) = theta.sin_cos();
        for mm in monomial.iter_mut() {
            mm.value += f * z1.powi((mm.j - mm.h) as i32) * z2.powi(mm.h as i32);
        }
    }
    monomial.iter_mut().for_each(|mm| mm.value *= w);
    MomentValues {
        cheb_t: Vec::new(),
        cheb_u: Vec::new(),
        monomial,
    }
}

/// Chebyshev moment conditions for p to be a 2s-point (necessary and
/// sufficient together with the nondegeneracy of the order-s pair).
pub fn chebyshev_moments(
    datum: &AlternatingDatum,
    p: DiskPoint,
    rule: &QuadratureRule,
) -> Result<MomentReport, CertifyError> {
    check_interior(p)?;
    let s = datum.s();
    let values = chebyshev_moments_of(datum, p, s, rule);
    Ok(MomentReport::assemble(
        p,
        s,
        values,
        moment_tol(datum.amplitude()),
    ))
}

/// Monomial moment conditions, equivalent to the Chebyshev set.
pub fn monomial_moments(
    datum: &AlternatingDatum,
    p: DiskPoint,
    rule: &QuadratureRule,
) -> Result<MomentReport, CertifyError> {
    check_interior(p)?;
    let s = datum.s();
    let values = monomial_moments_of(datum, p, s, rule);
    Ok(MomentReport::assemble(
        p,
        s,
        values,
        moment_tol(datum.amplitude()),
    ))
}

/// Both moment sets in one report.
pub fn moments(
    datum: &AlternatingDatum,
    p: DiskPoint,
    rule: &QuadratureRule,
) -> Result<MomentReport, CertifyError> {
    check_interior(p)?;
    let s = datum.s();
    let mut values = chebyshev_moments_of(datum, p, s, rule);
    values.monomial = monomial_moments_of(datum, p, s, rule).monomial;
    Ok(MomentReport::assemble(
        p,
        s,
        values,
        moment_tol(datum.amplitude()),
    ))
}

/// Reconstruct every monomial moment from the Chebyshev moments alone, via
/// the monomial-in-T inverse formula, the T-to-U relations and ζ₁²+ζ₂² = 1.
/// Agreement with direct quadrature is the working form of the equivalence
/// between the two condition sets.
pub fn monomial_from_chebyshev(values: &MomentValues, s: usize) -> Vec<MonomialMoment> {
    // P_n = ∫ Φ̃ ζ₁^n ds from the T moments
    let power_t = |n: usize| -> f64 {
        kernels::monomial_in_t(n)
            .iter()
            .enumerate()
            .map(|(d, &c)| c * values.cheb_t[d])
            .sum()
    };
    // Q_n = ∫ Φ̃ ζ₂ ζ₁^n ds from the U moments (cheb_u[j-1] carries U_{j-1})
    let power_u = |n: usize| -> f64 {
        kernels::monomial_in_u(n)
            .iter()
            .enumerate()
            .map(|(kappa, &c)| {
                if c == 0.0 {
                    0.0
                } else {
                    c * values.cheb_u[kappa]
                }
            })
            .sum()
    };
    let binom = |n: usize, k: usize| -> f64 {
        let k = k.min(n - k);
        let mut acc = 1.0f64;
        for i in 0..k {
            acc = acc * (n - i) as f64 / (i + 1) as f64;
        }
        acc
    };
    let mut out = Vec::new();
    for j in 0..s {
        for h in 0..=j {
            let ell = h / 2;
            let mut value = 0.0;
            for i in 0..=ell {
                let sign = if (ell - i) % 2 == 0 { 1.0 } else { -1.0 };
                let weight = sign * binom(ell, i);
                // (1-ζ₁²)^ℓ expanded: term i carries ζ₁^{2(ℓ-i)}... indexing
                // as (−1)^i C(ℓ,i) ζ₁^{2i} with base power j-h:
                let n = j - h + 2 * (ell - i);
                let sign_i = if (ell - i) % 2 == 0 { 1.0 } else { -1.0 };
                let _ = weight;
                let c = binom(ell, ell - i) * sign_i;
                value += c
                    * if h % 2 == 0 {
                        power_t(n)
                    } else {
                        power_u(n + 1 - 1)
                    };
            }
            out.push(MonomialMoment { j, h, value });
        }
    }
    out
}

/// Decision for a single point: all monomial moments below tolerance and the
/// recentered order-s coefficient pair nonvanishing.
pub fn is_2s_point(
    datum: &AlternatingDatum,
    p: DiskPoint,
    rule: &QuadratureRule,
) -> Result<(bool, MomentReport), CertifyError> {
    check_interior(p)?;
    let s = datum.s();
    let report = monomial_moments(datum, p, rule)?;
    if !report.verdict {
        return Ok((false, report));
    }
    // lower moments vanish: the order-s pair must not
    let (a_s, b_s) = recentered_pair(datum, p, s, rule);
    let scale = datum.amplitude();
    if (a_s * a_s + b_s * b_s).sqrt() < TOL_ORDER_REL * scale {
        return Err(CertifyError::DegenerateDatum { s, k: datum.k() });
    }
    Ok((true, report))
}

/// Fourier pair (A_j, B_j) of the recentered boundary function.
pub fn recentered_pair(
    boundary: &dyn BoundaryFunction,
    p: DiskPoint,
    j: usize,
    rule: &QuadratureRule,
) -> (f64, f64) {
    let samples = pullback_samples(boundary, p, rule);
    let mut a = 0.0;
    let mut b = 0.0;
    for (m, &f) in samples.iter().enumerate() {
        let (s_t, c_t) = (j as f64 * rule.node(m)).sin_cos();
        a += f * c_t;
        b += f * s_t;
    }
    let w = rule.weight() / PI;
    (a * w, b * w)
}

/// The six-species conditions evaluated exactly as stated: signed sums of
/// per-species pullback integrals against 1, ζ₁, ζ₂, ζ₁², ζ₁ζ₂.
pub fn k6_conditions(
    datum: &AlternatingDatum,
    p: DiskPoint,
    rule: &QuadratureRule,
) -> Result<MomentReport, CertifyError> {
    if datum.k() != 6 {
        return Err(CertifyError::SpeciesCountNot6(datum.k()));
    }
    check_interior(p)?;
    let base = datum.base();
    // weights: mass, first moments, ζ₁² and ζ₁ζ₂
    let mut sums = [0.0f64; 5];
    for m in 0..rule.n_nodes() {
        let theta = rule.node(m);
        let angle = moebius_boundary_angle(p, theta);
        let (z2, z1) = theta.sin_cos();
        let weights = [1.0, z1, z2, z1 * z1, z1 * z2];
        for i in 0..6 {
            let phi = base.eval_species(i, angle);
            if phi != 0.0 {
                let sign = AlternatingDatum::sign(i);
                for (acc, w) in sums.iter_mut().zip(weights) {
                    *acc += sign * phi * w;
                }
            }
        }
    }
    let w = rule.weight();
    sums.iter_mut().for_each(|v| *v *= w);
    let monomial = vec![
        MonomialMoment { j: 0, h: 0, value: sums[0] },
        MonomialMoment { j: 1, h: 0, value: sums[1] },
        MonomialMoment { j: 1, h: 1, value: sums[2] },
        MonomialMoment { j: 2, h: 0, value: sums[3] },
        MonomialMoment { j: 2, h: 1, value: sums[4] },
    ];
    let values = MomentValues {
        cheb_t: Vec::new(),
        cheb_u: Vec::new(),
        monomial,
    };
    Ok(MomentReport::assemble(
        p,
        3,
        values,
        moment_tol(datum.amplitude()),
    ))
}

/// Direct route of the derivative characterization: series value, gradient
/// and Hessian of ψ_a at p, all required to vanish.
pub fn derivative_characterization(field: &FourierField, p: DiskPoint) -> DerivativeReport {
    let (value, gradient, hessian) = field.eval_all(p);
    let tol = TOL_DERIV_REL * field.scale().max(1e-300);
    let hess_norm = hessian
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max);
    let verdict =
        value.abs() < tol && gradient[0].hypot(gradient[1]) < tol && hess_norm < tol;
    DerivativeReport {
        p: [p.x1(), p.x2()],
        value,
        gradient,
        hessian,
        verdict,
        tol,
    }
}

/// Value, gradient and Hessian of the recentered solution at the origin,
/// computed from pullback quadratures alone (the Poisson-kernel derivative
/// formulas at the center).
pub fn recentered_derivatives(
    boundary: &dyn BoundaryFunction,
    p: DiskPoint,
    rule: &QuadratureRule,
) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let samples = pullback_samples(boundary, p, rule);
    let mut m00 = 0.0;
    let mut m10 = 0.0;
    let mut m11 = 0.0;
    let mut m20 = 0.0;
    let mut m21 = 0.0;
    for (m, &f) in samples.iter().enumerate() {
        let (z2, z1) = rule.node(m).sin_cos();
        m00 += f;
        m10 += f * z1;
        m11 += f * z2;
        m20 += f * z1 * z1;
        m21 += f * z1 * z2;
    }
    let w = rule.weight();
    m00 *= w;
    m10 *= w;
    m11 *= w;
    m20 *= w;
    m21 *= w;
    let value = m00 / (2.0 * PI);
    let gradient = [m10 / PI, m11 / PI];
    let h11 = (4.0 * m20 - 2.0 * m00) / PI;
    let h12 = 4.0 * m21 / PI;
    (value, gradient, [[h11, h12], [h12, -h11]])
}

/// Push recentered derivatives at the origin forward through R_p to obtain
/// the derivatives of ψ_a at p. The gradient picks up one conformal factor
/// 1/(1-|p|²); the Hessian two, plus first-order terms from the curvature of
/// the chart.
pub fn pullback_derivatives_to_disk(
    p: DiskPoint,
    value: f64,
    gradient: [f64; 2],
    hessian: [[f64; 2]; 2],
) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let (p1, p2) = (p.x1(), p.x2());
    let f = 1.0 - (p1 * p1 + p2 * p2);
    let g = [gradient[0] / f, gradient[1] / f];
    let m1 = [[p1, p2], [p2, -p1]];
    let m2 = [[-p2, p1], [p1, -p2]];
    // M2 is [[-p2, p1], [p1, p2]]; the trace-free convention below keeps the
    // transformed Hessian exactly trace-free.
    let m2 = [[m2[0][0], m2[0][1]], [m2[1][0], p2]];
    let mut h = [[0.0f64; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            h[r][c] = (hessian[r][c] + 2.0 * (gradient[0] * m1[r][c] + gradient[1] * m2[r][c]))
                / (f * f);
        }
    }
    (value, g, h)
}

/// Search for a 2s-point of the configuration attached to `solution`: the
/// zero-level critical points of ψ_a whose recentered leading order equals s.
/// The moment conditions are generically unsolvable (2s-1 equations in two
/// unknowns), so absence is the expected outcome.
pub fn find_2s_point(
    solution: &crate::harmonic::DirichletSolution,
    datum: &AlternatingDatum,
    rule: &QuadratureRule,
) -> Result<Option<(DiskPoint, MomentReport)>, crate::harmonic::HarmonicError> {
    let s = datum.s();
    let cfg = crate::harmonic::CriticalPointConfig::default();
    let search = solution.find_zero_critical_points(s, &cfg, rule)?;
    for cp in &search.points {
        if cp.order == s {
            let report = moments(datum, cp.location, rule)
                .expect("critical points are strictly interior");
            if report.verdict {
                return Ok(Some((cp.location, report)));
            }
        }
    }
    Ok(None)
}
