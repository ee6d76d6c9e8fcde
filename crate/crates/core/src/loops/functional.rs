use serde::{Deserialize, Serialize};

use super::{distance, EquivariantLoop, Spectral};
use crate::error::{Error, Result};
use crate::group::SystemParams;
use crate::linalg::Mat;
use crate::Scalar;

/// Pairwise distances below this count as collisions.
pub const COLLISION_THRESHOLD: f64 = 1e-9;

/// Pairwise (cascade) summation, for reductions whose order must not depend on scheduling.
pub fn pairwise_sum<S: Scalar>(v: &[S]) -> S {
    if v.len() <= 16 {
        return v.iter().fold(S::zero(), |a, b| a + *b);
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// The discretized action `(T/M) Σ_j (K + U)(t_j)` on samples of a fixed layout.
///
/// Optionally mollified, `U_ε = Σ m_i m_j (r² + ε²)^{−α/2}`, and optionally in a
/// frame rotating with the skew matrix `Ω`.
#[derive(Clone, Debug)]
pub struct ActionFunctional<S: Scalar> {
    params: SystemParams<S>,
    samples: usize,
    spectral: Spectral<S>,
    epsilon: S,
    omega: Option<Mat<S>>,
}

/// Integrated kinetic and potential parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionParts<S> {
    pub kinetic: S,
    pub potential: S,
}

impl<S: Scalar> ActionParts<S> {
    pub fn total(&self) -> S {
        self.kinetic + self.potential
    }
}

impl<S: Scalar> ActionFunctional<S> {
    pub fn new(params: SystemParams<S>, samples: usize) -> Self {
        let spectral = Spectral::new(samples, params.period);
        Self {
            params,
            samples,
            spectral,
            epsilon: S::zero(),
            omega: None,
        }
    }

    pub fn for_loop(x: &EquivariantLoop<S>) -> Self {
        Self::new(x.params.clone(), x.samples())
    }

    pub fn with_mollifier(mut self, epsilon: S) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn set_mollifier(&mut self, epsilon: S) {
        self.epsilon = epsilon;
    }

    pub fn with_rotating_frame(mut self, omega: Mat<S>) -> Result<Self> {
        let d = self.params.d;
        if omega.rows() != d || omega.cols() != d {
            return Err(Error::InvalidArgument(format!("rotating frame must be {d}×{d}")));
        }
        if omega.add(&omega.transpose()).max_abs() > S::lit(1e-12) * (S::one() + omega.max_abs()) {
            return Err(Error::InvalidArgument("rotating frame matrix is not skew".into()));
        }
        self.omega = Some(omega);
        Ok(self)
    }

    pub fn params(&self) -> &SystemParams<S> {
        &self.params
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn spectral(&self) -> &Spectral<S> {
        &self.spectral
    }

    fn width(&self) -> usize {
        self.params.n * self.params.d
    }

    fn weight(&self) -> S {
        self.params.period / S::from_usize_lossy(self.samples)
    }

    fn check_collisions(&self, x: &[S]) -> Result<()> {
        let (n, d) = (self.params.n, self.params.d);
        let thr = S::lit(COLLISION_THRESHOLD);
        for j in 0..self.samples {
            let c = &x[j * n * d..(j + 1) * n * d];
            for i in 0..n {
                for k in i + 1..n {
                    let r = distance(&c[i * d..(i + 1) * d], &c[k * d..(k + 1) * d]);
                    if !(r >= thr) {
                        return Err(Error::Collision {
                            sample: j,
                            i: i + 1,
                            j: k + 1,
                            distance: r.to_f64_lossy(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Velocities `ẋ + Ωx` at every sample, and the plain first derivative.
    fn velocities(&self, x: &[S]) -> (Vec<S>, Vec<S>, Vec<S>) {
        let w = self.width();
        let (d1, d2) = self.spectral.derivatives(x, w);
        let mut v = d1.clone();
        if let Some(om) = &self.omega {
            let d = self.params.d;
            for chunk in 0..self.samples * self.params.n {
                let off = chunk * d;
                let ox = om.mul_vec(&x[off..off + d]);
                for a in 0..d {
                    v[off + a] = v[off + a] + ox[a];
                }
            }
        }
        (v, d1, d2)
    }

    fn sample_kinetic(&self, v: &[S], j: usize) -> S {
        let (n, d) = (self.params.n, self.params.d);
        let half = S::lit(0.5);
        (0..n)
            .map(|i| {
                let off = (j * n + i) * d;
                half * self.params.masses[i] * crate::linalg::dot(&v[off..off + d], &v[off..off + d])
            })
            .sum()
    }

    fn pair_potential(&self, r2: S) -> S {
        let e2 = self.epsilon * self.epsilon;
        (r2 + e2).powf(-self.params.alpha / S::lit(2.0))
    }

    fn sample_potential(&self, x: &[S], j: usize) -> S {
        let (n, d) = (self.params.n, self.params.d);
        let c = &x[j * n * d..(j + 1) * n * d];
        let mut u = S::zero();
        for i in 0..n {
            for k in i + 1..n {
                let r = distance(&c[i * d..(i + 1) * d], &c[k * d..(k + 1) * d]);
                u = u + self.params.masses[i] * self.params.masses[k] * self.pair_potential(r * r);
            }
        }
        u
    }

    /// `∂U/∂x` at sample `j`, written into `out` (length `n d`).
    fn sample_potential_gradient(&self, x: &[S], j: usize, out: &mut [S]) {
        let (n, d) = (self.params.n, self.params.d);
        let c = &x[j * n * d..(j + 1) * n * d];
        let alpha = self.params.alpha;
        let e2 = self.epsilon * self.epsilon;
        for v in out.iter_mut() {
            *v = S::zero();
        }
        for i in 0..n {
            for k in i + 1..n {
                let mut r2 = S::zero();
                for a in 0..d {
                    let t = c[i * d + a] - c[k * d + a];
                    r2 = r2 + t * t;
                }
                let f = -alpha
                    * self.params.masses[i]
                    * self.params.masses[k]
                    * (r2 + e2).powf(-alpha / S::lit(2.0) - S::one());
                for a in 0..d {
                    let t = (c[i * d + a] - c[k * d + a]) * f;
                    out[i * d + a] = out[i * d + a] + t;
                    out[k * d + a] = out[k * d + a] - t;
                }
            }
        }
    }

    fn check_layout(&self, x: &[S]) -> Result<()> {
        if x.len() != self.samples * self.width() {
            return Err(Error::InvalidArgument(format!(
                "expected {} sample values, got {}",
                self.samples * self.width(),
                x.len()
            )));
        }
        Ok(())
    }

    pub fn parts(&self, x: &[S]) -> Result<ActionParts<S>> {
        self.check_layout(x)?;
        self.check_collisions(x)?;
        let (v, _, _) = self.velocities(x);
        let kin: Vec<S> = (0..self.samples).map(|j| self.sample_kinetic(&v, j)).collect();
        let pot: Vec<S> = (0..self.samples).map(|j| self.sample_potential(x, j)).collect();
        let h = self.weight();
        Ok(ActionParts {
            kinetic: h * pairwise_sum(&kin),
            potential: h * pairwise_sum(&pot),
        })
    }

    pub fn value(&self, x: &[S]) -> Result<S> {
        Ok(self.parts(x)?.total())
    }

    /// Action and its gradient with respect to the samples.
    pub fn value_and_gradient(&self, x: &[S]) -> Result<(S, Vec<S>)> {
        self.check_layout(x)?;
        self.check_collisions(x)?;
        let (n, d) = (self.params.n, self.params.d);
        let w = n * d;
        let (v, d1, d2) = self.velocities(x);
        let h = self.weight();
        let mut kin = Vec::with_capacity(self.samples);
        let mut pot = Vec::with_capacity(self.samples);
        // −m (D + Ω)² x = −m (D²x + 2Ω Dx + Ω² x)
        let mut accel = d2;
        if let Some(om) = &self.omega {
            let om2 = om.mul(om);
            for chunk in 0..self.samples * n {
                let off = chunk * d;
                let a1 = om.mul_vec(&d1[off..off + d]);
                let a2 = om2.mul_vec(&x[off..off + d]);
                for a in 0..d {
                    accel[off + a] = accel[off + a] + S::lit(2.0) * a1[a] + a2[a];
                }
            }
        }
        let mut grad = vec![S::zero(); self.samples * w];
        let mut du = vec![S::zero(); w];
        for j in 0..self.samples {
            kin.push(self.sample_kinetic(&v, j));
            pot.push(self.sample_potential(x, j));
            self.sample_potential_gradient(x, j, &mut du);
            for i in 0..n {
                let m = self.params.masses[i];
                for a in 0..d {
                    let idx = j * w + i * d + a;
                    grad[idx] = h * (du[i * d + a] - m * accel[idx]);
                }
            }
        }
        Ok((h * (pairwise_sum(&kin) + pairwise_sum(&pot)), grad))
    }

    /// Relative L² norm of `m ẍ − ∂U/∂x` (in the rotating frame, of the
    /// corresponding Euler–Lagrange expression).
    pub fn newton_residual(&self, x: &[S]) -> Result<S> {
        let (_, grad) = self.value_and_gradient(x)?;
        let w = self.width();
        let mut du = vec![S::zero(); w];
        let mut force2 = Vec::with_capacity(self.samples);
        for j in 0..self.samples {
            self.sample_potential_gradient(x, j, &mut du);
            force2.push(du.iter().map(|v| *v * *v).sum::<S>());
        }
        let h = self.weight();
        let res2: Vec<S> = grad.iter().map(|g| (*g / h) * (*g / h)).collect();
        Ok((pairwise_sum(&res2) / pairwise_sum(&force2)).sqrt())
    }

    /// Energy `K − U` per sample.
    pub fn energy(&self, x: &[S]) -> Result<(Vec<S>, Vec<S>, Vec<S>)> {
        self.check_layout(x)?;
        self.check_collisions(x)?;
        let (v, _, _) = self.velocities(x);
        let kin: Vec<S> = (0..self.samples).map(|j| self.sample_kinetic(&v, j)).collect();
        let pot: Vec<S> = (0..self.samples).map(|j| self.sample_potential(x, j)).collect();
        let e = kin.iter().zip(&pot).map(|(k, u)| *k - *u).collect();
        Ok((e, kin, pot))
    }
}

/// Discretized action of a loop, optionally in a rotating frame.
pub fn action_value<S: Scalar>(x: &EquivariantLoop<S>, omega: Option<&Mat<S>>) -> Result<S> {
    let mut f = ActionFunctional::for_loop(x);
    if let Some(om) = omega {
        f = f.with_rotating_frame(om.clone())?;
    }
    f.value(x.positions())
}

/// Gradient of the discretized action, as a loop-shaped array (not re-centered).
pub fn action_gradient<S: Scalar>(x: &EquivariantLoop<S>) -> Result<Vec<S>> {
    Ok(ActionFunctional::for_loop(x).value_and_gradient(x.positions())?.1)
}

pub fn newton_residual<S: Scalar>(x: &EquivariantLoop<S>) -> Result<S> {
    ActionFunctional::for_loop(x).newton_residual(x.positions())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySeries {
    pub energy: Vec<f64>,
    /// `max_j |E_j − mean E| / mean_j (K + U)`.
    pub drift: f64,
}

pub fn energy_series<S: Scalar>(x: &EquivariantLoop<S>) -> Result<EnergySeries> {
    let (e, k, u) = ActionFunctional::for_loop(x).energy(x.positions())?;
    let m = S::from_usize_lossy(e.len());
    let mean = pairwise_sum(&e) / m;
    let scale: Vec<S> = k.iter().zip(&u).map(|(a, b)| *a + *b).collect();
    let scale = pairwise_sum(&scale) / m;
    let dev = e.iter().fold(S::zero(), |acc, v| acc.max((*v - mean).abs()));
    Ok(EnergySeries {
        energy: e.iter().map(|v| v.to_f64_lossy()).collect(),
        drift: (dev / scale).to_f64_lossy(),
    })
}

/// Verification bundle for a loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub action: f64,
    pub kinetic_integral: f64,
    pub potential_integral: f64,
    pub min_pairwise_distance: f64,
    pub newton_residual: f64,
    pub energy_drift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivariance_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_norm: Option<f64>,
}

pub fn action_report<S: Scalar>(x: &EquivariantLoop<S>) -> Result<ActionReport> {
    let f = ActionFunctional::for_loop(x);
    let parts = f.parts(x.positions())?;
    Ok(ActionReport {
        action: parts.total().to_f64_lossy(),
        kinetic_integral: parts.kinetic.to_f64_lossy(),
        potential_integral: parts.potential.to_f64_lossy(),
        min_pairwise_distance: x.min_pairwise_distance().to_f64_lossy(),
        newton_residual: f.newton_residual(x.positions())?.to_f64_lossy(),
        energy_drift: energy_series(x)?.drift,
        equivariance_residual: None,
        gradient_norm: None,
    })
}

/// Time series of partial quantities for a cluster `k` of bodies and its complement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSeries {
    pub kinetic: Vec<f64>,
    pub potential: Vec<f64>,
    pub energy: Vec<f64>,
    /// Interaction between the cluster and its complement.
    pub cross_potential: Vec<f64>,
    /// Moment of inertia about the cluster's own center of mass.
    pub inertia: Vec<f64>,
    /// False where a pair inside the cluster, or across it, collides.
    pub valid: Vec<bool>,
}

/// Partial kinetic energy, potential, energy, cross potential and inertia of cluster `k`
/// (0-based indices). Potentials at collisions are reported as `+∞` with `valid = false`.
pub fn partial_quantities<S: Scalar>(x: &EquivariantLoop<S>, k: &[usize]) -> Result<PartialSeries> {
    let (n, d) = (x.n(), x.d());
    if k.iter().any(|&i| i >= n) {
        return Err(Error::InvalidArgument("cluster index out of range".into()));
    }
    let mut in_k = vec![false; n];
    for &i in k {
        in_k[i] = true;
    }
    let m = x.samples();
    let v = Spectral::new(m, x.period()).first_derivative(x.positions(), n * d);
    let masses = x.masses();
    let alpha = x.params.alpha;
    let thr = S::lit(COLLISION_THRESHOLD);
    let mut out = PartialSeries {
        kinetic: Vec::with_capacity(m),
        potential: Vec::with_capacity(m),
        energy: Vec::with_capacity(m),
        cross_potential: Vec::with_capacity(m),
        inertia: Vec::with_capacity(m),
        valid: Vec::with_capacity(m),
    };
    for j in 0..m {
        let mut kin = S::zero();
        for &i in k {
            let off = (j * n + i) * d;
            kin = kin + S::lit(0.5) * masses[i] * crate::linalg::dot(&v[off..off + d], &v[off..off + d]);
        }
        let mut valid = true;
        let mut uk = S::zero();
        let mut ux = S::zero();
        for a in 0..n {
            for b in a + 1..n {
                let inside = in_k[a] && in_k[b];
                let cross = in_k[a] != in_k[b];
                if !inside && !cross {
                    continue;
                }
                let r = distance(x.body(j, a), x.body(j, b));
                let term = if r < thr {
                    valid = false;
                    S::infinity()
                } else {
                    masses[a] * masses[b] * r.powf(-alpha)
                };
                if inside {
                    uk = uk + term;
                } else {
                    ux = ux + term;
                }
            }
        }
        let m0: S = k.iter().map(|&i| masses[i]).sum();
        let mut inertia = S::zero();
        if !k.is_empty() {
            let mut c = vec![S::zero(); d];
            for &i in k {
                for a in 0..d {
                    c[a] = c[a] + masses[i] * x.body(j, i)[a];
                }
            }
            for a in c.iter_mut() {
                *a = *a / m0;
            }
            for &i in k {
                let r = distance(x.body(j, i), &c);
                inertia = inertia + masses[i] * r * r;
            }
        }
        out.kinetic.push(kin.to_f64_lossy());
        out.potential.push(uk.to_f64_lossy());
        out.energy.push((kin - uk).to_f64_lossy());
        out.cross_potential.push(ux.to_f64_lossy());
        out.inertia.push(inertia.to_f64_lossy());
        out.valid.push(valid);
    }
    Ok(out)
}
