//! The Dirichlet problem -Δψ = 0 on the unit disk via Fourier series:
//! coefficient extraction by periodic quadrature, pointwise evaluation with
//! derivatives, Möbius recentering, and the search for zero-level critical
//! points.
//!
//! The Fourier series is the primary representation; direct Poisson-kernel
//! quadrature is kept as an independent cross-check (see
//! [`DirichletSolution::poisson_eval`]).

use crate::datum::AlternatingDatum;
use crate::kernels::{moebius_boundary_angle, DiskPoint, QuadratureRule};
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc as Shared;
use thiserror::Error;

/// Default series truncation order.
pub const DEFAULT_TRUNCATION: usize = 256;

/// Relative tail-energy threshold above which a solve is flagged as
/// under-resolved.
pub const TAIL_ENERGY_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Error, PartialEq)]
pub enum HarmonicError {
    #[error("found {found} zero-level critical points; a datum with 2s = {k} boundary zeros admits at most {bound}")]
    TooManyCriticalPoints { found: usize, bound: usize, k: usize },
}

/// Truncated Fourier representation of a harmonic function on the disk:
/// ψ(r, θ) = A_0/2 + Σ_{j=1}^N (A_j cos jθ + B_j sin jθ) r^j.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl FourierField {
    pub fn from_coefficients(a: Vec<f64>, b: Vec<f64>) -> Self {
        assert_eq!(a.len(), b.len(), "coefficient arrays must align");
        assert!(!a.is_empty());
        Self { a, b }
    }

    /// Field with a single mode: A_j = amplitude (cosine) or B_j = amplitude.
    pub fn pure_mode(j: usize, amplitude: f64, sine: bool) -> Self {
        let mut a = vec![0.0; j + 1];
        let mut b = vec![0.0; j + 1];
        if sine {
            b[j] = amplitude;
        } else if j == 0 {
            a[0] = 2.0 * amplitude;
        } else {
            a[j] = amplitude;
        }
        Self { a, b }
    }

    /// Truncation order N.
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    /// (A_j, B_j).
    pub fn coeff(&self, j: usize) -> (f64, f64) {
        (self.a[j], self.b[j])
    }

    /// Euclidean norm of the coefficient vector; the scale used by relative
    /// tolerances.
    pub fn scale(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter())
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// ψ(p).
    pub fn eval(&self, p: DiskPoint) -> f64 {
        self.eval_all(p).0
    }

    /// ∇ψ(p) in Cartesian coordinates.
    pub fn gradient(&self, p: DiskPoint) -> [f64; 2] {
        self.eval_all(p).1
    }

    /// Hessian of ψ at p; trace-free by construction.
    pub fn hessian(&self, p: DiskPoint) -> [[f64; 2]; 2] {
        self.eval_all(p).2
    }

    /// Value, gradient and Hessian in a single pass over the modes.
    ///
    /// Each mode is A_j Re z^j + B_j Im z^j; derivatives follow from
    /// d/dz z^j = j z^{j-1}, so the powers of z are shared across the three
    /// quantities.
    pub fn eval_all(&self, p: DiskPoint) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let (x, y) = (p.x1(), p.x2());
        let n = self.order();
        let mut val = 0.5 * self.a[0];
        let mut gx = 0.0;
        let mut gy = 0.0;
        let mut h11 = 0.0;
        let mut h12 = 0.0;
        // w = z^{j-1}, wp = z^{j-2}
        let (mut w_r, mut w_i) = (1.0f64, 0.0f64);
        let (mut wp_r, mut wp_i) = (0.0f64, 0.0f64);
        for j in 1..=n {
            let (aj, bj) = (self.a[j], self.b[j]);
            let jf = j as f64;
            gx += jf * (aj * w_r + bj * w_i);
            gy += jf * (bj * w_r - aj * w_i);
            if j >= 2 {
                let c = jf * (jf - 1.0);
                h11 += c * (aj * wp_r + bj * wp_i);
                h12 += c * (bj * wp_r - aj * wp_i);
            }
            let z_r = w_r * x - w_i * y;
            let z_i = w_r * y + w_i * x;
            val += aj * z_r + bj * z_i;
            (wp_r, wp_i) = (w_r, w_i);
            (w_r, w_i) = (z_r, z_i);
        }
        (val, [gx, gy], [[h11, h12], [h12, -h11]])
    }
}

/// A boundary function on the unit circle, sampled by angle.
pub trait BoundaryFunction: Send + Sync {
    fn eval_boundary(&self, theta: f64) -> f64;
}

impl BoundaryFunction for AlternatingDatum {
    fn eval_boundary(&self, theta: f64) -> f64 {
        self.eval(theta)
    }
}

/// Boundary function given by a closure.
pub struct FnBoundary<F>(pub F);

impl<F: Fn(f64) -> f64 + Send + Sync> BoundaryFunction for FnBoundary<F> {
    fn eval_boundary(&self, theta: f64) -> f64 {
        (self.0)(theta)
    }
}

/// Boundary trace of a truncated series (exact for polynomial data).
pub struct SeriesBoundary(pub FourierField);

impl BoundaryFunction for SeriesBoundary {
    fn eval_boundary(&self, theta: f64) -> f64 {
        let mut v = 0.5 * self.0.a[0];
        for j in 1..=self.0.order() {
            let (s, c) = (j as f64 * theta).sin_cos();
            v += self.0.a[j] * c + self.0.b[j] * s;
        }
        v
    }
}

/// Möbius pullback of another boundary function: θ ↦ φ(arg R_p(e^{iθ})).
struct MoebiusBoundary {
    inner: Shared<dyn BoundaryFunction>,
    p: DiskPoint,
}

impl BoundaryFunction for MoebiusBoundary {
    fn eval_boundary(&self, theta: f64) -> f64 {
        self.inner
            .eval_boundary(moebius_boundary_angle(self.p, theta))
    }
}

/// A solved Dirichlet problem: the Fourier coefficients together with the
/// boundary function they came from (kept so the solution can be recentered
/// without losing boundary accuracy).
#[derive(Clone)]
pub struct DirichletSolution {
    pub field: FourierField,
    boundary: Shared<dyn BoundaryFunction>,
    /// Coefficient energy in the last octave (N/2, N], relative to the total;
    /// a crude tail estimate for the truncation error.
    pub tail_energy: f64,
    /// Set when `tail_energy` exceeds [`TAIL_ENERGY_THRESHOLD`].
    pub truncation_warning: bool,
}

impl fmt::Debug for DirichletSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletSolution")
            .field("order", &self.field.order())
            .field("tail_energy", &self.tail_energy)
            .field("truncation_warning", &self.truncation_warning)
            .finish()
    }
}

/// Solve -Δψ = 0, ψ = φ on ∂D: A_j = (1/π)∫ φ cos jθ dθ, B_j likewise with
/// sin, by the trapezoid rule.
pub fn solve_dirichlet(
    boundary: Shared<dyn BoundaryFunction>,
    n_modes: usize,
    rule: &QuadratureRule,
) -> DirichletSolution {
    assert!(n_modes >= 1);
    assert!(
        rule.n_nodes() > 2 * n_modes,
        "quadrature must resolve all requested modes"
    );
    let samples: Vec<f64> = rule.nodes().map(|t| boundary.eval_boundary(t)).collect();
    let field = project_modes(&samples, n_modes, rule);
    let (tail_energy, truncation_warning) = tail_estimate(&field);
    DirichletSolution {
        field,
        boundary,
        tail_energy,
        truncation_warning,
    }
}

fn project_modes(samples: &[f64], n_modes: usize, rule: &QuadratureRule) -> FourierField {
    let n = rule.n_nodes();
    let mut a = vec![0.0; n_modes + 1];
    let mut b = vec![0.0; n_modes + 1];
    for (m, &s) in samples.iter().enumerate() {
        let theta = rule.node(m);
        let (dc, ds) = (theta.cos(), theta.sin());
        // cos(jθ), sin(jθ) by angle addition
        let (mut c, mut si) = (1.0f64, 0.0f64);
        a[0] += s;
        for j in 1..=n_modes {
            let c_next = c * dc - si * ds;
            let s_next = si * dc + c * ds;
            (c, si) = (c_next, s_next);
            a[j] += s * c;
            b[j] += s * si;
        }
    }
    let w = 2.0 / n as f64; // (1/π) · (2π/n)
    for j in 0..=n_modes {
        a[j] *= w;
        b[j] *= w;
    }
    // Snap coefficients below the quadrature rounding floor to exact zero.
    // Summation noise (~n·eps) would otherwise displace degenerate critical
    // points of spectrally sparse data by noise^{1/(order-1)}.
    let cmax = a
        .iter()
        .chain(b.iter())
        .map(|c| c.abs())
        .fold(0.0, f64::max);
    let floor = 1e-14 * cmax;
    for c in a.iter_mut().chain(b.iter_mut()) {
        if c.abs() < floor {
            *c = 0.0;
        }
    }
    FourierField { a, b }
}

fn tail_estimate(field: &FourierField) -> (f64, bool) {
    let n = field.order();
    let energy = |lo: usize, hi: usize| -> f64 {
        (lo..=hi)
            .map(|j| field.a[j] * field.a[j] + field.b[j] * field.b[j])
            .sum()
    };
    let total = energy(0, n) + 1e-300;
    let tail = energy(n / 2 + 1, n) / total;
    (tail, tail > TAIL_ENERGY_THRESHOLD)
}

/// Options for the zero-level critical point search.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPointConfig {
    /// Seeding grid resolution (polar, seed_grid × seed_grid).
    pub seed_grid: usize,
    /// |ψ| acceptance tolerance, relative to the field scale.
    pub tol_value: f64,
    /// |∇ψ| acceptance tolerance, relative to the field scale.
    pub tol_gradient: f64,
    /// Threshold for declaring a recentered coefficient pair nonzero,
    /// relative to the field scale.
    pub tol_order: f64,
    /// Points closer than this are merged.
    pub dedup_radius: f64,
    /// Points within this distance of ∂D are rejected; the Möbius
    /// recentering degenerates there.
    pub boundary_margin: f64,
    pub max_iterations: usize,
}

impl Default for CriticalPointConfig {
    fn default() -> Self {
        Self {
            seed_grid: 64,
            tol_value: 1e-8,
            tol_gradient: 1e-8,
            tol_order: 1e-6,
            dedup_radius: 1e-4,
            boundary_margin: 1e-6,
            max_iterations: 200,
        }
    }
}

/// A zero-level critical point of ψ, with the leading order of the recentered
/// expansion (order s means the point is a 2s-point of |ψ|).
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub location: DiskPoint,
    pub residual_value: f64,
    pub residual_gradient: f64,
    /// Smallest j ≥ 1 with (A_j, B_j) ≠ (0, 0) after recentering; ≥ 2 for a
    /// genuine zero-level critical point.
    pub order: usize,
}

/// Result of the critical point search.
#[derive(Debug, Clone)]
pub struct CriticalPointSearch {
    pub points: Vec<CriticalPoint>,
    /// Seeds whose Newton iteration left the disk or failed to settle.
    pub failed_seeds: usize,
}

impl DirichletSolution {
    /// Convenience constructor from an alternating datum with defaults.
    pub fn solve_alternating(datum: &AlternatingDatum, n_modes: usize, rule: &QuadratureRule) -> Self {
        solve_dirichlet(Shared::new(datum.clone()), n_modes, rule)
    }

    pub fn boundary(&self) -> &Shared<dyn BoundaryFunction> {
        &self.boundary
    }

    /// The solution of the pulled-back problem with boundary datum
    /// φ ∘ R_p; its value at the origin equals ψ(p).
    pub fn recenter(&self, p: DiskPoint, n_modes: usize, rule: &QuadratureRule) -> DirichletSolution {
        let boundary = Shared::new(MoebiusBoundary {
            inner: self.boundary.clone(),
            p,
        });
        solve_dirichlet(boundary, n_modes, rule)
    }

    /// Independent evaluation route: the Poisson integral
    /// (1 - |p|²)/(2π) ∫ φ(η)/|p - η|² ds_η.
    pub fn poisson_eval(&self, p: DiskPoint, rule: &QuadratureRule) -> f64 {
        let (x, y) = (p.x1(), p.x2());
        let r2 = x * x + y * y;
        let integral = rule.integrate(|t| {
            let (s, c) = t.sin_cos();
            let d2 = 1.0 - 2.0 * (x * c + y * s) + r2;
            self.boundary.eval_boundary(t) / d2
        });
        (1.0 - r2) / (2.0 * std::f64::consts::PI) * integral
    }

    /// Locate the zero-level critical points of ψ by Newton iteration on ∇ψ
    /// from a polar seed grid. `s` is the half species count of the
    /// underlying alternating datum; at most s - 1 points can exist, and
    /// finding more is a hard error.
    pub fn find_zero_critical_points(
        &self,
        s: usize,
        cfg: &CriticalPointConfig,
        rule: &QuadratureRule,
    ) -> Result<CriticalPointSearch, HarmonicError> {
        let field = &self.field;
        let scale = field.scale().max(1e-300);
        let g = cfg.seed_grid;
        let seeds: Vec<(f64, f64)> = (0..g * g)
            .map(|idx| {
                let (i, j) = (idx / g, idx % g);
                let r = 0.97 * (i as f64 + 0.5) / g as f64;
                let t = 2.0 * std::f64::consts::PI * j as f64 / g as f64;
                (r * t.cos(), r * t.sin())
            })
            .collect();

        let polished: Vec<Option<(f64, f64)>> = seeds
            .par_iter()
            .map(|&(x, y)| newton_polish(field, x, y, cfg))
            .collect();
        let failed_seeds = polished.iter().filter(|p| p.is_none()).count();

        let mut candidates: Vec<(f64, f64)> = polished
            .into_iter()
            .flatten()
            .filter(|&(x, y)| {
                if x.hypot(y) >= 1.0 - cfg.boundary_margin {
                    return false;
                }
                let p = DiskPoint::new(x, y).expect("inside disk by the check above");
                let (v, grad, _) = field.eval_all(p);
                v.abs() < cfg.tol_value * scale
                    && grad[0].hypot(grad[1]) < cfg.tol_gradient * scale
            })
            .collect();
        // Deterministic merge: sort lexicographically, then cluster greedily.
        candidates.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        let mut reps: Vec<(f64, f64)> = Vec::new();
        for c in candidates {
            if !reps
                .iter()
                .any(|r| (r.0 - c.0).hypot(r.1 - c.1) < cfg.dedup_radius)
            {
                reps.push(c);
            }
        }

        let mut points = Vec::new();
        for (x, y) in reps {
            let location = DiskPoint::new(x, y).expect("checked above");
            let (v, grad, _) = field.eval_all(location);
            let recentered = self.recenter(location, field.order(), rule);
            let order = leading_order(&recentered.field, cfg.tol_order * scale);
            match order {
                Some(order) if order >= 2 => points.push(CriticalPoint {
                    location,
                    residual_value: v.abs(),
                    residual_gradient: grad[0].hypot(grad[1]),
                    order,
                }),
                // order 1 would mean a nonzero gradient slipped through the
                // tolerance; not a critical point.
                _ => {}
            }
        }

        let bound = s.saturating_sub(1);
        if points.len() > bound {
            return Err(HarmonicError::TooManyCriticalPoints {
                found: points.len(),
                bound,
                k: 2 * s,
            });
        }
        Ok(CriticalPointSearch {
            points,
            failed_seeds,
        })
    }
}

/// Smallest j ≥ 1 whose coefficient pair exceeds the threshold.
fn leading_order(field: &FourierField, threshold: f64) -> Option<usize> {
    (1..=field.order()).find(|&j| {
        let (a, b) = field.coeff(j);
        a * a + b * b > threshold * threshold
    })
}

/// Newton iteration on ∇ψ with the analytic Hessian; falls back to Armijo
/// gradient descent on ½|∇ψ|² when the Hessian is singular relative to its
/// own magnitude. Returns the converged location, or None if the iterate
/// leaves the disk or fails to settle.
fn newton_polish(
    field: &FourierField,
    mut x: f64,
    mut y: f64,
    cfg: &CriticalPointConfig,
) -> Option<(f64, f64)> {
    const STEP_CAP: f64 = 0.25;
    const CONVERGED: f64 = 1e-13;
    for _ in 0..cfg.max_iterations {
        let p = DiskPoint::new(x, y).ok()?;
        let (_, g, h) = field.eval_all(p);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let hnorm2 = h[0][0] * h[0][0] + 2.0 * h[0][1] * h[0][1] + h[1][1] * h[1][1];
        let (mut dx, mut dy);
        if det.abs() > 1e-10 * hnorm2 {
            dx = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
            dy = -(h[0][0] * g[1] - h[0][1] * g[0]) / det;
            let len = dx.hypot(dy);
            if len > STEP_CAP {
                dx *= STEP_CAP / len;
                dy *= STEP_CAP / len;
            }
        } else {
            // descend E = ½|∇ψ|²; ∇E = H ∇ψ
            let ex = h[0][0] * g[0] + h[0][1] * g[1];
            let ey = h[0][1] * g[0] + h[1][1] * g[1];
            let e0 = 0.5 * (g[0] * g[0] + g[1] * g[1]);
            let slope = ex * ex + ey * ey;
            if slope == 0.0 {
                return Some((x, y)); // exactly stationary
            }
            let mut t = (STEP_CAP / slope.sqrt()).min(1.0);
            let mut accepted = false;
            for _ in 0..40 {
                let (cx, cy) = (x - t * ex, y - t * ey);
                if let Ok(q) = DiskPoint::new(cx, cy) {
                    let (_, gq, _) = field.eval_all(q);
                    let eq = 0.5 * (gq[0] * gq[0] + gq[1] * gq[1]);
                    if eq <= e0 - 1e-4 * t * slope {
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return Some((x, y)); // stuck at the current minimizer
            }
            dx = -t * ex;
            dy = -t * ey;
        }
        x += dx;
        y += dy;
        if x.hypot(y) >= 1.0 - 1e-9 {
            return None;
        }
        if dx.hypot(dy) < CONVERGED {
            return Some((x, y));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos_boundary(j: usize) -> Shared<dyn BoundaryFunction> {
        Shared::new(FnBoundary(move |t: f64| (j as f64 * t).cos()))
    }

    fn default_rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    #[test]
    fn cos3_projects_to_single_mode() {
        let sol = solve_dirichlet(cos_boundary(3), 16, &default_rule());
        for j in 0..=16 {
            let (a, b) = sol.field.coeff(j);
            let expect = if j == 3 { 1.0 } else { 0.0 };
            assert!((a - expect).abs() < 1e-12, "A_{j}");
            assert!(b.abs() < 1e-12, "B_{j}");
        }
    }

    #[test]
    fn constant_datum_extends_to_constant() {
        let sol = solve_dirichlet(Shared::new(FnBoundary(|_| 1.0)), 8, &default_rule());
        assert!((sol.field.coeff(0).0 - 2.0).abs() < 1e-12);
        for i in 0..10 {
            let p = DiskPoint::new(0.09 * i as f64, -0.05 * i as f64).unwrap();
            assert!((sol.field.eval(p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_k6_coefficients_vanish_below_mode_three() {
        let datum = AlternatingDatum::symmetric(3, 1.0);
        let fine = QuadratureRule::new(1 << 15).unwrap();
        let sol = DirichletSolution::solve_alternating(&datum, 64, &fine);
        let coarse = DirichletSolution::solve_alternating(&datum, 64, &default_rule());
        for j in 0..=2 {
            let (a, b) = sol.field.coeff(j);
            assert!(a.abs() < 1e-12 && b.abs() < 1e-12, "mode {j}");
        }
        let (a3, b3) = sol.field.coeff(3);
        assert!(a3.abs() < 1e-12);
        assert!(b3.abs() > 0.5); // Φ^a = -sin(3θ) so B_3 = -1
        // cross-check at two quadrature resolutions
        let (a3c, b3c) = coarse.field.coeff(3);
        assert!((a3 - a3c).abs() < 1e-10 && (b3 - b3c).abs() < 1e-10);
    }

    #[test]
    fn eval_matches_monomial_harmonics() {
        let sol = solve_dirichlet(cos_boundary(3), 8, &default_rule());
        for i in 0..20 {
            let r = 0.045 * (i as f64 + 1.0);
            let th = 0.3 + 0.29 * i as f64;
            let p = DiskPoint::new(r * th.cos(), r * th.sin()).unwrap();
            assert!((sol.field.eval(p) - r.powi(3) * (3.0 * th).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn value_at_origin_is_circle_mean() {
        let datum = AlternatingDatum::cosine_mode(2, 1.3);
        let sol = DirichletSolution::solve_alternating(&datum, 64, &default_rule());
        let mean = default_rule().integrate(|t| datum.eval(t)) / (2.0 * PI);
        assert!((sol.field.eval(DiskPoint::origin()) - mean).abs() < 1e-12);
    }

    #[test]
    fn eval_x1_field() {
        // datum cos θ extends to ψ = x1
        let sol = solve_dirichlet(cos_boundary(1), 8, &default_rule());
        let p = DiskPoint::new(0.3, 0.4).unwrap();
        assert!((sol.field.eval(p) - 0.3).abs() < 1e-12);
        let g = sol.field.gradient(p);
        assert!((g[0] - 1.0).abs() < 1e-12 && g[1].abs() < 1e-12);
        let h = sol.field.hessian(p);
        assert!(h.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn derivatives_of_mode_two_and_three() {
        let sol3 = solve_dirichlet(cos_boundary(3), 8, &default_rule());
        let g = sol3.field.gradient(DiskPoint::origin());
        assert!(g[0].abs() < 1e-12 && g[1].abs() < 1e-12);
        let h = sol3.field.hessian(DiskPoint::origin());
        assert!(h.iter().flatten().all(|v| v.abs() < 1e-12));

        // ψ = x1² - x2²
        let sol2 = solve_dirichlet(cos_boundary(2), 8, &default_rule());
        let h = sol2.field.hessian(DiskPoint::origin());
        assert!((h[0][0] - 2.0).abs() < 1e-12);
        assert!((h[1][1] + 2.0).abs() < 1e-12);
        assert!(h[0][1].abs() < 1e-12);
    }

    #[test]
    fn gradient_hessian_match_finite_differences() {
        let datum = AlternatingDatum::symmetric(3, 1.0);
        let sol = DirichletSolution::solve_alternating(&datum, DEFAULT_TRUNCATION, &default_rule());
        let f = &sol.field;
        for i in 0..25 {
            let r = 0.035 * (i as f64 + 1.0);
            let th = 0.7 * i as f64;
            let (x, y) = (r * th.cos(), r * th.sin());
            let at = |x: f64, y: f64| f.eval(DiskPoint::new(x, y).unwrap());
            let h = 1e-5;
            let gx = (at(x + h, y) - at(x - h, y)) / (2.0 * h);
            let gy = (at(x, y + h) - at(x, y - h)) / (2.0 * h);
            let g = f.gradient(DiskPoint::new(x, y).unwrap());
            let gn = g[0].hypot(g[1]).max(1e-3);
            assert!((g[0] - gx).abs() / gn < 1e-6 && (g[1] - gy).abs() / gn < 1e-6);

            let h2 = 1e-4;
            let hxx = (at(x + h2, y) - 2.0 * at(x, y) + at(x - h2, y)) / (h2 * h2);
            let hxy = (at(x + h2, y + h2) - at(x + h2, y - h2) - at(x - h2, y + h2)
                + at(x - h2, y - h2))
                / (4.0 * h2 * h2);
            let hess = f.hessian(DiskPoint::new(x, y).unwrap());
            let hn = hess.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max).max(1e-2);
            assert!((hess[0][0] - hxx).abs() / hn < 1e-4);
            assert!((hess[0][1] - hxy).abs() / hn < 1e-4);
        }
    }

    #[test]
    fn discrete_laplacian_vanishes() {
        let datum = AlternatingDatum::cosine_mode(3, 1.0);
        let sol = DirichletSolution::solve_alternating(&datum, 64, &default_rule());
        let f = &sol.field;
        let h = 1e-3;
        for i in 0..100 {
            let r = 0.009 * (i as f64 + 0.5);
            let th = 2.22 * i as f64;
            let (x, y) = (0.8 * r.sqrt() * th.cos(), 0.8 * r.sqrt() * th.sin());
            let at = |x: f64, y: f64| f.eval(DiskPoint::new(x, y).unwrap());
            let lap = (at(x + h, y) + at(x - h, y) + at(x, y + h) + at(x, y - h)
                - 4.0 * at(x, y))
                / (h * h);
            assert!(lap.abs() < 1e-6, "laplacian {lap} at ({x},{y})");
        }
    }

    #[test]
    fn mean_value_property_on_interior_circles() {
        let datum = AlternatingDatum::symmetric(2, 1.0);
        let sol = DirichletSolution::solve_alternating(&datum, DEFAULT_TRUNCATION, &default_rule());
        let f = &sol.field;
        let centers = [(0.0, 0.0), (0.3, -0.2), (-0.5, 0.1)];
        for (cx, cy) in centers {
            let rho = 0.3;
            let rule = QuadratureRule::new(512).unwrap();
            let avg = rule.integrate(|t| {
                f.eval(DiskPoint::new(cx + rho * t.cos(), cy + rho * t.sin()).unwrap())
            }) / (2.0 * PI);
            let center = f.eval(DiskPoint::new(cx, cy).unwrap());
            assert!((avg - center).abs() < 1e-8, "center ({cx},{cy})");
        }
    }

    #[test]
    fn series_agrees_with_poisson_quadrature() {
        let datum = AlternatingDatum::symmetric(3, 1.0);
        let sol = DirichletSolution::solve_alternating(&datum, DEFAULT_TRUNCATION, &default_rule());
        for (x, y) in [(0.0, 0.0), (0.4, 0.1), (-0.2, -0.6), (0.7, 0.0)] {
            let p = DiskPoint::new(x, y).unwrap();
            let series = sol.field.eval(p);
            let poisson = sol.poisson_eval(p, &QuadratureRule::new(8192).unwrap());
            assert!((series - poisson).abs() < 1e-8, "at ({x},{y})");
        }
    }

    #[test]
    fn recenter_at_origin_is_identity() {
        let datum = AlternatingDatum::cosine_mode(3, 1.0);
        let sol = DirichletSolution::solve_alternating(&datum, 32, &default_rule());
        let re = sol.recenter(DiskPoint::origin(), 32, &default_rule());
        for j in 0..=32 {
            let (a0, b0) = sol.field.coeff(j);
            let (a1, b1) = re.field.coeff(j);
            assert!((a0 - a1).abs() < 1e-12 && (b0 - b1).abs() < 1e-12);
        }
    }

    #[test]
    fn recenter_moves_value_to_origin() {
        // ψ = x1: recentering at (0.5, 0) puts ψ(p) = 0.5 at the origin
        let sol = solve_dirichlet(cos_boundary(1), 16, &default_rule());
        let p = DiskPoint::new(0.5, 0.0).unwrap();
        let re = sol.recenter(p, 16, &default_rule());
        assert!((re.field.eval(DiskPoint::origin()) - 0.5).abs() < 1e-12);

        // mean value at the recentered origin: A_0 = 2 ψ(p)
        let sol3 = solve_dirichlet(cos_boundary(3), 16, &default_rule());
        let q = DiskPoint::new(0.2, 0.0).unwrap();
        let re3 = sol3.recenter(q, 16, &default_rule());
        assert!((re3.field.coeff(0).0 - 0.016).abs() < 1e-12);
    }

    #[test]
    fn recentered_eval_matches_original() {
        let datum = AlternatingDatum::symmetric(3, 1.0);
        let sol = DirichletSolution::solve_alternating(&datum, DEFAULT_TRUNCATION, &default_rule());
        let p = DiskPoint::new(0.31, -0.44).unwrap();
        let re = sol.recenter(p, DEFAULT_TRUNCATION, &default_rule());
        assert!((re.field.eval(DiskPoint::origin()) - sol.field.eval(p)).abs() < 1e-10);
    }

    #[test]
    fn tail_energy_flags_underresolved_solves() {
        // An asymmetric tiling has a full 1/j² spectrum, so six modes are
        // far too few; a pure-mode datum would be trivially resolved.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let datum = AlternatingDatum::random(3, 0.2, &mut rng);
        let under = DirichletSolution::solve_alternating(&datum, 6, &default_rule());
        assert!(under.truncation_warning, "tail {}", under.tail_energy);
        let fine = DirichletSolution::solve_alternating(&datum, DEFAULT_TRUNCATION, &default_rule());
        assert!(!fine.truncation_warning);
    }

    #[test]
    fn boundary_sign_changes_even_near_boundary() {
        let datum = AlternatingDatum::symmetric(3, 1.0);
        let sol = DirichletSolution::solve_alternating(&datum, DEFAULT_TRUNCATION, &default_rule());
        for r in [0.5, 0.9, 0.999] {
            let n = 4096;
            let vals: Vec<f64> = (0..n)
                .map(|m| {
                    let t = 2.0 * PI * m as f64 / n as f64;
                    sol.field
                        .eval(DiskPoint::new(r * t.cos(), r * t.sin()).unwrap())
                })
                .collect();
            let changes = (0..n)
                .filter(|&i| vals[i].signum() != vals[(i + 1) % n].signum())
                .count();
            assert!(changes >= 2 && changes % 2 == 0, "r={r}: {changes}");
        }
    }

    #[test]
    fn critical_points_of_pure_modes() {
        let rule = default_rule();
        for s in 2..=4usize {
            let datum = AlternatingDatum::cosine_mode(s, 1.0);
            let sol = DirichletSolution::solve_alternating(&datum, 64, &rule);
            let found = sol
                .find_zero_critical_points(s, &CriticalPointConfig::default(), &rule)
                .unwrap();
            assert_eq!(found.points.len(), 1, "s={s}");
            let cp = &found.points[0];
            assert!(cp.location.radius() < 1e-6, "s={s}: |q|={}", cp.location.radius());
            assert_eq!(cp.order, s);
        }
    }

    #[test]
    fn no_critical_points_for_single_interface() {
        let rule = default_rule();
        let sol = solve_dirichlet(cos_boundary(1), 16, &rule);
        let found = sol
            .find_zero_critical_points(1, &CriticalPointConfig::default(), &rule)
            .unwrap();
        assert!(found.points.is_empty());
    }

    #[test]
    fn order_two_point_of_saddle_field() {
        // ψ = Re z²: one zero-level critical point at the origin, order 2.
        // Brute-force oracle: grid minimization of |ψ| + |∇ψ|.
        let rule = default_rule();
        let sol = solve_dirichlet(cos_boundary(2), 16, &rule);
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let g = 101;
        for i in 0..g {
            for j in 0..g {
                let (x, y) = (-0.9 + 1.8 * i as f64 / (g - 1) as f64, -0.9 + 1.8 * j as f64 / (g - 1) as f64);
                if x.hypot(y) >= 0.95 {
                    continue;
                }
                let p = DiskPoint::new(x, y).unwrap();
                let (v, gr, _) = sol.field.eval_all(p);
                let m = v.abs() + gr[0].hypot(gr[1]);
                if m < best.0 {
                    best = (m, x, y);
                }
            }
        }
        assert!(best.1.hypot(best.2) < 0.02, "oracle minimum near origin");

        let found = sol
            .find_zero_critical_points(3, &CriticalPointConfig::default(), &rule)
            .unwrap();
        assert_eq!(found.points.len(), 1);
        assert!(found.points[0].location.radius() < 1e-8);
        assert_eq!(found.points[0].order, 2);
    }

    #[test]
    fn too_many_critical_points_is_fatal() {
        // A degree-4 saddle has an order-4 zero-level critical point, which
        // cannot arise from a 4-zero alternating datum (bound s-1 = 1 holds),
        // but claiming s = 1 makes any found point exceed the bound.
        let rule = default_rule();
        let sol = solve_dirichlet(cos_boundary(2), 16, &rule);
        let err = sol
            .find_zero_critical_points(1, &CriticalPointConfig::default(), &rule)
            .unwrap_err();
        assert_eq!(
            err,
            HarmonicError::TooManyCriticalPoints {
                found: 1,
                bound: 0,
                k: 2
            }
        );
    }
}
