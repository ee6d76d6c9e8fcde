//! Collision integrals along parabolic ejections and their circle averages.

mod ejection;
mod series;

pub use ejection::{
    circle_average_variation, delta_action_expansion, homothetic_ejection, standard_variation, CircleAverage,
    EjectionFixture, ExpansionResult,
};
pub use series::{
    binomial_neg, binomial_tail_bound, eval_stilde_series, fourier_average_check, fourier_average_quadrature,
    negativity_bound, series_sum_bound, stilde_series, AveragingResult, SeriesValue,
};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breaks, Tolerance};

/// Relative closeness of the ray to the origin below which a single
/// evaluation is treated as near-singular.
pub const NEAR_SINGULAR_RATIO: f64 = 1e-3;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `S(ξ, δ)` with an error estimate, without the near-singular guard.
///
/// With `u = t^{2/(2+α)}` the integral becomes
/// `(2+α)/2 ∫_0^∞ [(|ξ|²u² + 2(ξ·δ)u + |δ|²)^{−α/2} − |ξ|^{−α}u^{−α}] u^{α/2} du`.
/// The second term is integrated in closed form up to a cut `U`; beyond `U`
/// the difference is expanded in Gegenbauer polynomials of `ξ·δ/(|ξ||δ|)`.
pub fn eval_s_raw(xi: &[f64], delta: &[f64], alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    if xi.len() != delta.len() {
        return Err(Error::InvalidArgument("ξ and δ must have the same dimension".into()));
    }
    let q = norm(xi);
    let r = norm(delta);
    if q == 0.0 || !q.is_finite() {
        return Err(Error::InvalidArgument("ξ must be non-zero".into()));
    }
    if r == 0.0 {
        return Ok((0.0, 0.0));
    }
    let p = dot(xi, delta);
    let beta = 2.0 / (2.0 + alpha);
    let lam = alpha / 2.0;
    let cut = 8f64.powf(beta).max(4.0 * r / q);
    // |uξ + δ|² = (qu + p/q)² + b², b the distance from δ to the line of ξ.
    let b2: f64 = xi
        .iter()
        .zip(delta)
        .map(|(x, y)| {
            let w = y - p / (q * q) * x;
            w * w
        })
        .sum();
    let g = |u: f64| {
        let a = q * u + p / q;
        (a * a + b2).powf(-lam) * u.powf(lam)
    };
    let mut breaks = Vec::new();
    if p < 0.0 {
        breaks.push(-p / (q * q));
    }
    let scale = q.powf(-alpha) * cut.powf(1.0 - lam);
    let body = integrate_with_breaks(g, 0.0, cut, &breaks, Tolerance::new(1e-14 * scale.max(1.0), 1e-13));
    let singular = q.powf(-alpha) * cut.powf(1.0 - lam) / (1.0 - lam);

    // Tail: q^{−α} Σ_n C_n(x) (r/q)^n U^{1−α/2−n} / (n − 1 + α/2), x = −p/(q r).
    let x = -p / (q * r);
    let h = r / (q * cut);
    let mut c_prev = 1.0;
    let mut c = 2.0 * lam * x;
    let mut c1_prev = 1.0;
    let mut c1 = 2.0 * lam;
    let mut hn = h;
    let mut tail = 0.0;
    let mut remainder = f64::INFINITY;
    for n in 1..400usize {
        let nf = n as f64;
        tail += scale * hn * c / (nf - 1.0 + lam);
        // |C_m(x)| ≤ C_m(1) and C_{m+1}(1)/C_m(1) = (m+α)/(m+1) < 3/2, so the
        // rest is dominated by a geometric series of ratio 3h/2 ≤ 3/8.
        let next_bound = scale * hn * h * c1_next(c1, c1_prev, nf + 1.0, lam) / (nf + lam) / (1.0 - 1.5 * h);
        if next_bound < 1e-17 * scale.max(1e-300) {
            remainder = next_bound;
            break;
        }
        let c_next = (2.0 * x * (nf + lam) * c - (nf + 2.0 * lam - 1.0) * c_prev) / (nf + 1.0);
        c_prev = c;
        c = c_next;
        let c1n = c1_next(c1, c1_prev, nf + 1.0, lam);
        c1_prev = c1;
        c1 = c1n;
        hn *= h;
    }
    let value = 0.5 * (2.0 + alpha) * (body.value - singular + tail);
    let error = 0.5 * (2.0 + alpha) * (body.error + remainder);
    Ok((value, error))
}

/// `C_{n}^λ(1)` from `C_{n−1}(1)`, `C_{n−2}(1)`.
fn c1_next(c1: f64, c1_prev: f64, n: f64, lam: f64) -> f64 {
    (2.0 * (n + lam - 1.0) * c1 - (n + 2.0 * lam - 2.0) * c1_prev) / n
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!(
            "alpha must lie in (0, 2), got {alpha}"
        )))
    }
}

/// `S(ξ, δ) = ∫_0^∞ |t^{2/(2+α)}ξ + δ|^{−α} − |t^{2/(2+α)}ξ|^{−α} dt`.
///
/// Rejects rays passing within `1e−3 |δ|` of the origin when `α ≥ 1`, since the
/// integral then diverges or is numerically meaningless; warns for `α < 1`.
pub fn eval_s_quadrature(xi: &[f64], delta: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let q = norm(xi);
    let r = norm(delta);
    if q == 0.0 || r == 0.0 {
        return Err(Error::InvalidArgument("ξ and δ must be non-zero".into()));
    }
    let p = dot(xi, delta);
    if p < 0.0 {
        let miss = (r * r - p * p / (q * q)).max(0.0).sqrt();
        if miss < NEAR_SINGULAR_RATIO * r {
            if alpha >= 1.0 {
                return Err(Error::Singular(format!(
                    "ray passes within {miss:e} of the origin; not integrable for alpha = {alpha}"
                )));
            }
            log::warn!("near-singular S evaluation: closest approach {miss:e}, alpha = {alpha}");
        }
    }
    Ok(eval_s_raw(xi, delta, alpha)?.0)
}

/// Circle `{radius (cos θ e1 + sin θ e2)}` with `e1, e2` orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct Circle {
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub radius: f64,
}

impl Circle {
    pub fn new(e1: Vec<f64>, e2: Vec<f64>, radius: f64) -> Result<Self> {
        let ok = e1.len() == e2.len()
            && (norm(&e1) - 1.0).abs() < 1e-10
            && (norm(&e2) - 1.0).abs() < 1e-10
            && dot(&e1, &e2).abs() < 1e-10;
        if !ok {
            return Err(Error::InvalidArgument("circle axes must be orthonormal".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("circle radius must be positive".into()));
        }
        Ok(Self { e1, e2, radius })
    }

    /// Unit circle in the first two coordinates of `R^d`.
    pub fn unit_xy(d: usize) -> Self {
        let mut e1 = vec![0.0; d];
        let mut e2 = vec![0.0; d];
        e1[0] = 1.0;
        e2[1] = 1.0;
        Self { e1, e2, radius: 1.0 }
    }

    pub fn point(&self, theta: f64) -> Vec<f64> {
        let (s, c) = theta.sin_cos();
        self.e1
            .iter()
            .zip(&self.e2)
            .map(|(a, b)| self.radius * (c * a + s * b))
            .collect()
    }
}

/// Average of `S(ξ, ·)` over a circle, by adaptive quadrature in the angle.
///
/// The in-plane axes are turned so that `ξ` projects on the first; the
/// integrand is then even in the angle and is integrated on `[0, π]` with
/// `θ = π − s²`, which smooths the integrable singularity at `θ = π` that
/// appears when `ξ` lies in the plane.
pub fn eval_stilde_quadrature(xi: &[f64], circle: &Circle, alpha: f64) -> Result<f64> {
    Ok(eval_stilde_quadrature_detail(xi, circle, alpha)?.0)
}

/// Value and number of `S` evaluations.
pub(crate) fn eval_stilde_quadrature_detail(xi: &[f64], circle: &Circle, alpha: f64) -> Result<(f64, usize)> {
    check_alpha(alpha)?;
    if xi.len() != circle.e1.len() {
        return Err(Error::InvalidArgument(
            "ξ and the circle must share the dimension".into(),
        ));
    }
    let q = norm(xi);
    if q == 0.0 {
        return Err(Error::InvalidArgument("ξ must be non-zero".into()));
    }
    let c1 = dot(xi, &circle.e1);
    let c2 = dot(xi, &circle.e2);
    let rho = c1.hypot(c2);
    let (f1, f2): (Vec<f64>, Vec<f64>) = if rho > 1e-14 * q {
        let (a, b) = (c1 / rho, c2 / rho);
        (
            circle.e1.iter().zip(&circle.e2).map(|(x, y)| a * x + b * y).collect(),
            circle.e1.iter().zip(&circle.e2).map(|(x, y)| -b * x + a * y).collect(),
        )
    } else {
        (circle.e1.clone(), circle.e2.clone())
    };
    let turned = Circle {
        e1: f1,
        e2: f2,
        radius: circle.radius,
    };
    let mut failure = None;
    let f = |s: f64| {
        let theta = std::f64::consts::PI - s * s;
        match eval_s_raw(xi, &turned.point(theta), alpha) {
            Ok((v, _)) => 2.0 * s * v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let res = integrate(f, 0.0, std::f64::consts::PI.sqrt(), Tolerance::new(1e-12, 1e-11));
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((res.value / std::f64::consts::PI, res.intervals * 15))
}

/// `S̃(ξ_γ, S)` on the unit circle of the `xy`-plane, `ξ_γ = (cos γ, 0, sin γ)`.
pub fn gamma_profile(alpha: f64, gammas: &[f64]) -> Result<Vec<f64>> {
    let circle = Circle::unit_xy(3);
    gammas
        .iter()
        .map(|&g| {
            if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&g) {
                return Err(Error::InvalidArgument(format!("γ = {g} outside [0, π/2]")));
            }
            eval_stilde_quadrature(&[g.cos(), 0.0, g.sin()], &circle, alpha)
        })
        .collect()
}
