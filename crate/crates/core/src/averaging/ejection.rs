//! Homothetic parabolic ejections and the standard variation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_alpha, dot, eval_s_raw, norm};
use crate::error::{Error, Result};
use crate::group::GroupAction;
use crate::quadrature::{integrate_with_breaks, Tolerance};
use crate::symmetry::{homogeneous_orbits, iota_embedding, RotatingCircleWitness};

/// A normalized configuration `s̄` (centered, `Σ m|s̄|² = 1`) ejected as `(κt)^{2/(2+α)} s̄`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EjectionFixture {
    /// Positions `s̄_i`, body-major, `d` components each.
    pub central_config: Vec<f64>,
    pub d: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub masses: Vec<f64>,
}

impl EjectionFixture {
    pub fn new(central_config: Vec<f64>, d: usize, masses: Vec<f64>, alpha: f64, kappa: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let k = masses.len();
        if d == 0 || central_config.len() != k * d || k < 2 {
            return Err(Error::InvalidArgument(
                "configuration must have k ≥ 2 bodies of dimension d".into(),
            ));
        }
        if masses.iter().any(|m| !(*m > 0.0)) || !(kappa > 0.0) {
            return Err(Error::InvalidArgument("masses and κ must be positive".into()));
        }
        let f = Self {
            central_config,
            d,
            kappa,
            alpha,
            masses,
        };
        let total: f64 = f.masses.iter().sum();
        for c in 0..d {
            let com: f64 = (0..k).map(|i| f.masses[i] * f.body(i)[c]).sum::<f64>() / total;
            if com.abs() > 1e-12 {
                return Err(Error::InvalidArgument("configuration must be centered".into()));
            }
        }
        let inertia: f64 = (0..k).map(|i| f.masses[i] * dot(f.body(i), f.body(i))).sum();
        if (inertia - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "configuration must have unit inertia, got {inertia}"
            )));
        }
        for i in 0..k {
            for j in i + 1..k {
                if f.pair(i, j).iter().all(|v| v.abs() < 1e-12) {
                    return Err(Error::Collision {
                        sample: 0,
                        i,
                        j,
                        distance: 0.0,
                    });
                }
            }
        }
        Ok(f)
    }

    /// Three unit masses at the vertices of an equilateral triangle in the
    /// `xy`-plane of `R³` with `|s̄_i| = 1/√3`; the edges point at 0°, 60°, 120°.
    pub fn equilateral(alpha: f64, kappa: f64) -> Result<Self> {
        let r = 1.0 / 3f64.sqrt();
        let mut s = Vec::with_capacity(9);
        for deg in [90.0f64, 210.0, 330.0] {
            let a = deg.to_radians();
            s.extend([r * a.cos(), r * a.sin(), 0.0]);
        }
        Self::new(s, 3, vec![1.0; 3], alpha, kappa)
    }

    /// The same configuration with `κ` chosen so that the ejection solves the
    /// equations of motion, `κ² = (2+α)² U(s̄)/2`.
    pub fn with_parabolic_kappa(mut self) -> Self {
        self.kappa = (2.0 + self.alpha) * (self.central_potential() / 2.0).sqrt();
        self
    }

    pub fn bodies(&self) -> usize {
        self.masses.len()
    }

    pub fn body(&self, i: usize) -> &[f64] {
        &self.central_config[i * self.d..(i + 1) * self.d]
    }

    fn pair(&self, i: usize, j: usize) -> Vec<f64> {
        self.body(i).iter().zip(self.body(j)).map(|(a, b)| a - b).collect()
    }

    /// `U(s̄) = Σ_{i<j} m_i m_j |s̄_i − s̄_j|^{−α}`.
    pub fn central_potential(&self) -> f64 {
        let k = self.bodies();
        let mut u = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                u += self.masses[i] * self.masses[j] * norm(&self.pair(i, j)).powf(-self.alpha);
            }
        }
        u
    }

    fn beta(&self) -> f64 {
        2.0 / (2.0 + self.alpha)
    }

    pub fn radius(&self, t: f64) -> f64 {
        (self.kappa * t).powf(self.beta())
    }

    pub fn radial_speed(&self, t: f64) -> f64 {
        let b = self.beta();
        b * self.kappa * (self.kappa * t).powf(b - 1.0)
    }

    /// `I = Σ m |q̄|²`.
    pub fn inertia(&self, t: f64) -> f64 {
        self.radius(t).powi(2)
    }

    pub fn kinetic(&self, t: f64) -> f64 {
        0.5 * self.radial_speed(t).powi(2)
    }

    pub fn potential(&self, t: f64) -> f64 {
        self.radius(t).powf(-self.alpha) * self.central_potential()
    }
}

/// Positions `(κt)^{2/(2+α)} s̄`.
pub fn homothetic_ejection(fixture: &EjectionFixture, t: f64) -> Vec<f64> {
    let r = if t > 0.0 { fixture.radius(t) } else { 0.0 };
    fixture.central_config.iter().map(|s| r * s).collect()
}

/// `δ` on `[0, T − |δ|]`, then `(T − t) δ/|δ|` on `[T − |δ|, T]`, zero afterwards.
pub fn standard_variation(delta: &[f64], period: f64, t: f64) -> Result<Vec<f64>> {
    let r = norm(delta);
    if r >= period {
        return Err(Error::InvalidArgument(format!(
            "|δ| = {r} must be smaller than T = {period}"
        )));
    }
    let w = if t <= period - r {
        1.0
    } else if t <= period {
        (period - t) / r
    } else {
        0.0
    };
    Ok(delta.iter().map(|v| w * v).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    /// `A(q̄ + v^δ) − A(q̄)` on `[0, T]`.
    pub numeric: f64,
    /// `κ^{−1} Σ_{i<j} m_i m_j S(s̄_i − s̄_j, δ_i − δ_j)`.
    pub prediction: f64,
    pub residual: f64,
}

fn tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-12)
}

/// `∫_0^τ |(κt)^β ξ + δ|^{−α} − |(κt)^β ξ|^{−α} dt`, the singular part in closed form.
fn plateau_integral(xi: &[f64], delta: &[f64], alpha: f64, kappa: f64, tau: f64) -> Result<f64> {
    let beta = 2.0 / (2.0 + alpha);
    let q = norm(xi);
    let p = dot(xi, delta);
    let mut breaks = Vec::new();
    if p < 0.0 {
        let u = -p / (q * q);
        breaks.push(u.powf(1.0 / beta) / kappa);
    }
    let mut closest = f64::INFINITY;
    let f = |t: f64| {
        let u = (kappa * t).powf(beta);
        let v: Vec<f64> = xi.iter().zip(delta).map(|(a, b)| u * a + b).collect();
        let r = norm(&v);
        closest = closest.min(r);
        r.powf(-alpha)
    };
    let main = integrate_with_breaks(f, 0.0, tau, &breaks, tol()).value;
    if closest < crate::loops::COLLISION_THRESHOLD {
        return Err(Error::Singular("varied path collides".into()));
    }
    let e = 1.0 - alpha * beta;
    let singular = q.powf(-alpha) * kappa.powf(-alpha * beta) * tau.powf(e) / e;
    Ok(main - singular)
}

/// Action variation of the standard variation against its first-order prediction.
pub fn delta_action_expansion(fixture: &EjectionFixture, delta: &[f64], period: f64) -> Result<ExpansionResult> {
    let (k, d, a, kap) = (fixture.bodies(), fixture.d, fixture.alpha, fixture.kappa);
    if delta.len() != k * d {
        return Err(Error::InvalidArgument(
            "δ must be a configuration of the fixture's bodies".into(),
        ));
    }
    let eps = norm(delta);
    if eps == 0.0 {
        return Ok(ExpansionResult {
            numeric: 0.0,
            prediction: 0.0,
            residual: 0.0,
        });
    }
    if eps >= period {
        return Err(Error::InvalidArgument(format!(
            "|δ| = {eps} must be smaller than T = {period}"
        )));
    }
    let t0 = period - eps;
    let m = &fixture.masses;
    let beta = 2.0 / (2.0 + a);
    let rad = |t: f64| (kap * t).powf(beta);

    // Kinetic part: the variation moves only on the ramp, with velocity −δ/|δ|.
    let mut dk = 0.0;
    for i in 0..k {
        let di = &delta[i * d..(i + 1) * d];
        let s = fixture.body(i);
        dk += m[i] * (0.5 * dot(di, di) / eps - dot(di, s) / eps * (rad(period) - rad(t0)));
    }

    let mut du = 0.0;
    let mut prediction = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            let xi = fixture.pair(i, j);
            let dij: Vec<f64> = (0..d).map(|c| delta[i * d + c] - delta[j * d + c]).collect();
            let mm = m[i] * m[j];
            if dij.iter().all(|v| *v == 0.0) {
                continue;
            }
            let plateau = plateau_integral(&xi, &dij, a, kap, t0)?;
            let ramp = integrate_with_breaks(
                |t: f64| {
                    let w = (period - t) / eps;
                    let u = rad(t);
                    let v: Vec<f64> = xi.iter().zip(&dij).map(|(x, y)| u * x + w * y).collect();
                    norm(&v).powf(-a) - (u * norm(&xi)).powf(-a)
                },
                t0,
                period,
                &[],
                tol(),
            )
            .value;
            du += mm * (plateau + ramp);
            prediction += mm * eval_s_raw(&xi, &dij, a)?.0 / kap;
        }
    }
    let numeric = dk + du;
    Ok(ExpansionResult {
        numeric,
        prediction,
        residual: (numeric - prediction).abs(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleAverage {
    /// Trapezoidal mean of the action variation over the circle samples.
    pub mean: f64,
    /// Mean of the first-order predictions at the same samples.
    pub prediction_mean: f64,
    /// Sample with the smallest action variation and its value.
    pub argmin: Vec<f64>,
    pub min_value: f64,
    pub values: Vec<f64>,
}

/// Averages the action variation `A(q̄ + v^{ι_i(p)}) − A(q̄)` over `p` on the
/// circle of the witness scaled to `radius`, the cluster being all bodies.
pub fn circle_average_variation<S: crate::Scalar>(
    fixture: &EjectionFixture,
    action: &GroupAction<S>,
    witness: &RotatingCircleWitness,
    period: f64,
    samples: usize,
    radius: f64,
) -> Result<CircleAverage> {
    if samples < 8 {
        return Err(Error::InvalidArgument("at least 8 circle samples are required".into()));
    }
    if action.n() != fixture.bodies() || action.d() != fixture.d {
        return Err(Error::InvalidArgument("fixture and action disagree on n or d".into()));
    }
    let h = &witness.subgroup;
    let i = witness.index;
    let orbit = homogeneous_orbits(action, h)
        .into_iter()
        .find(|o| o.contains(&i))
        .unwrap_or_default();
    let [e1, e2] = &witness.plane;
    let results: Vec<Result<(Vec<f64>, ExpansionResult)>> = (0..samples)
        .into_par_iter()
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            let p: Vec<f64> = e1
                .iter()
                .zip(e2)
                .map(|(a, b)| radius * (th.cos() * a + th.sin() * b))
                .collect();
            let ps: Vec<S> = p.iter().map(|v| S::lit(*v)).collect();
            let delta: Vec<f64> = iota_embedding(action, h, &orbit, i, &ps)?
                .iter()
                .map(|v| v.to_f64_lossy())
                .collect();
            Ok((p, delta_action_expansion(fixture, &delta, period)?))
        })
        .collect();
    let mut values = Vec::with_capacity(samples);
    let mut preds = Vec::with_capacity(samples);
    let mut best = (f64::INFINITY, Vec::new());
    for r in results {
        let (p, e) = r?;
        if e.numeric < best.0 {
            best = (e.numeric, p);
        }
        values.push(e.numeric);
        preds.push(e.prediction);
    }
    let mean = values.iter().sum::<f64>() / samples as f64;
    let prediction_mean = preds.iter().sum::<f64>() / samples as f64;
    Ok(CircleAverage {
        mean,
        prediction_mean,
        argmin: best.1,
        min_value: best.0,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_variation_shape() {
        let d = [0.3, 0.4];
        assert_eq!(standard_variation(&d, 1.0, 0.0).unwrap(), vec![0.3, 0.4]);
        assert_eq!(standard_variation(&d, 1.0, 1.0).unwrap(), vec![0.0, 0.0]);
        let mid = standard_variation(&d, 1.0, 1.0 - 0.25).unwrap();
        assert!((mid[0] - 0.15).abs() < 1e-15 && (mid[1] - 0.2).abs() < 1e-15);
        assert!(standard_variation(&[1.0, 0.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn ejection_laws() {
        let f = EjectionFixture::equilateral(1.0, 1.0).unwrap().with_parabolic_kappa();
        assert!(homothetic_ejection(&f, 0.0).iter().all(|v| *v == 0.0));
        for t in [0.01, 0.5, 3.0] {
            assert!((f.inertia(t) - (f.kappa * t).powf(4.0 / 3.0)).abs() < 1e-12 * f.inertia(t));
            let (k, u) = (f.kinetic(t), f.potential(t));
            assert!((k - u).abs() <= 1e-10 * u);
        }
    }

    #[test]
    fn expansion_zero_and_scaling() {
        let f = EjectionFixture::equilateral(1.0, 1.0).unwrap();
        let z = delta_action_expansion(&f, &[0.0; 9], 1.0).unwrap();
        assert_eq!((z.numeric, z.prediction), (0.0, 0.0));
        let mut d = vec![0.0; 9];
        d[1] = 0.01;
        d[2] = 0.02;
        let a = delta_action_expansion(&f, &d, 1.0).unwrap();
        let d2: Vec<f64> = d.iter().map(|v| 2.0 * v).collect();
        let b = delta_action_expansion(&f, &d2, 1.0).unwrap();
        assert!((b.prediction / a.prediction - 2f64.sqrt()).abs() < 1e-8);
    }

    fn trivial_witness(plane: [Vec<f64>; 2]) -> (GroupAction<f64>, RotatingCircleWitness) {
        let a = GroupAction::trivial(crate::group::SystemParams::unit_masses(3, 3, 1.0, 1.0)).unwrap();
        let w = RotatingCircleWitness {
            index: 0,
            subgroup: a.trivial_subgroup(),
            plane,
            rotation_angles: vec![0.0],
        };
        (a, w)
    }

    #[test]
    fn circle_average_is_negative() {
        let f = EjectionFixture::equilateral(1.0, 1.0).unwrap();
        for plane in [
            [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            [vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
            [vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        ] {
            let (a, w) = trivial_witness(plane);
            let c = circle_average_variation(&f, &a, &w, 1.0, 16, 0.02).unwrap();
            assert!(c.mean < 0.0 && c.prediction_mean < 0.0, "{c:?}");
            assert_eq!(c.values.len(), 16);
            assert!(c.values.iter().all(|v| *v >= c.min_value));
        }
    }

    #[test]
    fn circle_average_refines_spectrally_off_the_collision_plane() {
        let f = EjectionFixture::equilateral(1.0, 1.0).unwrap();
        let (a, w) = trivial_witness([vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let c1 = circle_average_variation(&f, &a, &w, 1.0, 64, 0.02).unwrap();
        let c2 = circle_average_variation(&f, &a, &w, 1.0, 128, 0.02).unwrap();
        assert!((c1.mean - c2.mean).abs() <= 1e-6);
    }
}
