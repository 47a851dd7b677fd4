//! Shared numerical kernels: Chebyshev polynomials of both kinds, the Möbius
//! disk automorphism and periodic quadrature on the unit circle.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// How far outside the closed disk (or interval) an input may stray before it
/// is considered invalid rather than a rounding artifact.
pub const CLAMP_SLACK: f64 = 1e-12;

/// Points closer than this to ∂D are rejected as interior points.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("point ({0}, {1}) is not strictly inside the unit disk")]
    PointOutsideDisk(f64, f64),
    #[error("quadrature rule must have at least one node")]
    EmptyRule,
    #[error("sample count {got} does not match rule size {expected}")]
    SampleCountMismatch { got: usize, expected: usize },
}

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    x1: f64,
    x2: f64,
}

impl DiskPoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self, KernelError> {
        let r2 = x1 * x1 + x2 * x2;
        let max = 1.0 - BOUNDARY_MARGIN;
        if !r2.is_finite() || r2 >= max * max {
            return Err(KernelError::PointOutsideDisk(x1, x2));
        }
        Ok(Self { x1, x2 })
    }

    pub fn origin() -> Self {
        Self { x1: 0.0, x2: 0.0 }
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn radius(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn angle(&self) -> f64 {
        self.x2.atan2(self.x1)
    }

    pub fn dist(&self, other: &DiskPoint) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

/// A point on the unit circle, stored by its angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint {
    theta: f64,
}

impl CirclePoint {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Cartesian coordinates ζ = (cos θ, sin θ).
    pub fn zeta(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }
}

/// Uniform (trapezoid) quadrature rule on the circle: nodes θ_m = 2πm/n with
/// equal weights 2π/n. Spectrally accurate for smooth periodic integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    n_nodes: usize,
}

impl QuadratureRule {
    pub fn new(n_nodes: usize) -> Result<Self, KernelError> {
        if n_nodes == 0 {
            return Err(KernelError::EmptyRule);
        }
        Ok(Self { n_nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.n_nodes as f64
    }

    pub fn node(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.n_nodes as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes).map(move |m| self.node(m))
    }

    /// ∫_{∂D} f ds ≈ Σ_m f(θ_m) · 2π/n.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let w = self.weight();
        self.nodes().map(|t| f(t)).sum::<f64>() * w
    }

    /// Integrate a function already sampled at the rule nodes.
    pub fn integrate_samples(&self, samples: &[f64]) -> Result<f64, KernelError> {
        if samples.len() != self.n_nodes {
            return Err(KernelError::SampleCountMismatch {
                got: samples.len(),
                expected: self.n_nodes,
            });
        }
        Ok(samples.iter().sum::<f64>() * self.weight())
    }
}

impl Default for QuadratureRule {
    /// 4096 nodes: enough for ~1e-12 accuracy on the Möbius pullbacks of
    /// Lipschitz boundary data used throughout.
    fn default() -> Self {
        Self { n_nodes: 4096 }
    }
}

fn clamp_unit(x: f64) -> f64 {
    debug_assert!(
        x.abs() <= 1.0 + 1e-9,
        "Chebyshev argument {x} far outside [-1, 1]"
    );
    x.clamp(-1.0, 1.0)
}

/// Chebyshev polynomial of the first kind, T_j(x), by three-term recurrence.
///
/// The recurrence (rather than the trig identity T_j(cos θ) = cos jθ) keeps
/// evaluation deterministic across platforms; the identity is used in tests.
pub fn chebyshev_t(j: usize, x: f64) -> f64 {
    let x = clamp_unit(x);
    match j {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for _ in 2..=j {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Chebyshev polynomial of the second kind, U_j(x); satisfies
/// sin θ · U_{j-1}(cos θ) = sin jθ.
pub fn chebyshev_u(j: usize, x: f64) -> f64 {
    let x = clamp_unit(x);
    match j {
        0 => 1.0,
        1 => 2.0 * x,
        _ => {
            let mut prev = 1.0;
            let mut cur = 2.0 * x;
            for _ in 2..=j {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Coefficients c_0..c_j of the expansion x^j = Σ_i c_i T_i(x).
///
/// c_i = 2^{1-j} · C(j, (j-i)/2) for j-i even (halved at i = 0), else 0.
pub fn monomial_in_t(j: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; j + 1];
    if j == 0 {
        coeffs[0] = 1.0;
        return coeffs;
    }
    let scale = (2.0f64).powi(1 - (j as i32));
    for i in (j % 2..=j).step_by(2) {
        let mut c = scale * binomial(j, (j - i) / 2);
        if i == 0 {
            c *= 0.5;
        }
        coeffs[i] = c;
    }
    coeffs
}

/// Coefficients e_0..e_j of the expansion T_j(x) = Σ_κ e_κ U_κ(x):
/// T_0 = U_0, T_1 = U_1/2 and T_j = (U_j - U_{j-2})/2 for j ≥ 2.
pub fn chebyshev_t_in_u(j: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; j + 1];
    match j {
        0 => coeffs[0] = 1.0,
        1 => coeffs[1] = 0.5,
        _ => {
            coeffs[j] = 0.5;
            coeffs[j - 2] = -0.5;
        }
    }
    coeffs
}

/// Coefficients e_0..e_j of x^j = Σ_κ e_κ U_κ(x), via [`monomial_in_t`] and
/// [`chebyshev_t_in_u`].
pub fn monomial_in_u(j: usize) -> Vec<f64> {
    let t_coeffs = monomial_in_t(j);
    let mut coeffs = vec![0.0; j + 1];
    for (i, &c) in t_coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (kappa, &e) in chebyshev_t_in_u(i).iter().enumerate() {
            coeffs[kappa] += c * e;
        }
    }
    coeffs
}

/// The disk automorphism R_p(ζ) = (ζ + p) / (p̄ζ + 1), written out in real
/// arithmetic. Maps the closed disk onto itself with R_p(0) = p and
/// |R_p(ζ)| = 1 whenever |ζ| = 1.
pub fn moebius(p: DiskPoint, zeta: (f64, f64)) -> (f64, f64) {
    let (a, b) = zeta;
    let (p1, p2) = (p.x1(), p.x2());
    // numerator ζ + p, denominator p̄ζ + 1
    let nr = a + p1;
    let ni = b + p2;
    let dr = p1 * a + p2 * b + 1.0;
    let di = p1 * b - p2 * a;
    let den = dr * dr + di * di;
    debug_assert!(den > 0.0, "Möbius denominator vanished for |p| < 1");
    ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
}

/// Boundary restriction of [`moebius`]: the angle of R_p(e^{iθ}).
pub fn moebius_boundary_angle(p: DiskPoint, theta: f64) -> f64 {
    let (x, y) = moebius(p, (theta.cos(), theta.sin()));
    y.atan2(x)
}

/// Shorthand for integrating a sampled function against the rule.
pub fn circle_integral(rule: &QuadratureRule, samples: &[f64]) -> Result<f64, KernelError> {
    rule.integrate_samples(samples)
}
