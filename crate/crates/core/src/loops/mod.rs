//! Sampled loops in configuration space and the action functional on them.

mod functional;
mod spectral;

pub use functional::{
    action_gradient, action_report, action_value, energy_series, newton_residual, pairwise_sum, partial_quantities,
    ActionFunctional, ActionReport, EnergySeries, PartialSeries, COLLISION_THRESHOLD,
};
pub use spectral::Spectral;

use crate::error::{Error, Result};
use crate::group::{GroupAction, SystemParams};
use crate::Scalar;

/// A loop sampled at `t_j = j T / M`, positions stored as `[sample][body][coordinate]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantLoop<S> {
    pub params: SystemParams<S>,
    samples: usize,
    positions: Vec<S>,
}

/// Removes the component along `(m_1 e, …, m_n e)` for each coordinate direction `e`,
/// so that `Σ m_i x_i = 0`. This is the Euclidean orthogonal projection.
pub(crate) fn center_config<S: Scalar>(x: &mut [S], masses: &[S], d: usize) {
    let m2: S = masses.iter().map(|m| *m * *m).sum();
    for a in 0..d {
        let s: S = masses.iter().enumerate().map(|(i, m)| *m * x[i * d + a]).sum();
        let f = s / m2;
        for (i, m) in masses.iter().enumerate() {
            x[i * d + a] = x[i * d + a] - f * *m;
        }
    }
}

impl<S: Scalar> EquivariantLoop<S> {
    /// Builds a loop from raw samples; the samples are centered.
    pub fn new(params: SystemParams<S>, samples: usize, positions: Vec<S>) -> Result<Self> {
        let width = params.n * params.d;
        if samples == 0 || positions.len() != samples * width {
            return Err(Error::InvalidArgument(format!(
                "expected {} position values for {samples} samples, got {}",
                samples * width,
                positions.len()
            )));
        }
        if positions.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite position".into()));
        }
        let mut lp = Self {
            params,
            samples,
            positions,
        };
        lp.center();
        Ok(lp)
    }

    /// Samples `f(t, body)` (a `d`-vector) at the grid times.
    pub fn from_fn(params: SystemParams<S>, samples: usize, mut f: impl FnMut(S, usize) -> Vec<S>) -> Result<Self> {
        let (n, d) = (params.n, params.d);
        let mut pos = Vec::with_capacity(samples * n * d);
        for j in 0..samples {
            let t = params.period * S::from_usize_lossy(j) / S::from_usize_lossy(samples);
            for i in 0..n {
                let v = f(t, i);
                if v.len() != d {
                    return Err(Error::InvalidArgument(format!(
                        "position function returned {} coordinates, expected {d}",
                        v.len()
                    )));
                }
                pos.extend(v);
            }
        }
        Self::new(params, samples, pos)
    }

    /// Loop with the parameters of `action`, checked for grid compatibility.
    pub fn for_action(action: &GroupAction<S>, samples: usize, positions: Vec<S>) -> Result<Self> {
        check_grid(action, samples)?;
        Self::new(action.params.clone(), samples, positions)
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            params: self.params.clone(),
            samples: self.samples,
            positions: vec![S::zero(); self.positions.len()],
        }
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn period(&self) -> S {
        self.params.period
    }

    pub fn masses(&self) -> &[S] {
        &self.params.masses
    }

    pub fn time(&self, j: usize) -> S {
        self.params.period * S::from_usize_lossy(j) / S::from_usize_lossy(self.samples)
    }

    pub fn positions(&self) -> &[S] {
        &self.positions
    }

    /// Replaces the samples, re-centering them.
    pub fn set_positions(&mut self, positions: Vec<S>) {
        assert_eq!(positions.len(), self.positions.len());
        self.positions = positions;
        self.center();
    }

    /// Configuration at sample `j` (`n d` values).
    pub fn config(&self, j: usize) -> &[S] {
        let w = self.n() * self.d();
        &self.positions[j * w..(j + 1) * w]
    }

    /// Position of body `i` at sample `j`.
    pub fn body(&self, j: usize, i: usize) -> &[S] {
        let d = self.d();
        let off = (j * self.n() + i) * d;
        &self.positions[off..off + d]
    }

    fn center(&mut self) {
        let w = self.n() * self.d();
        let d = self.d();
        let masses = self.params.masses.clone();
        for chunk in self.positions.chunks_mut(w) {
            center_config(chunk, &masses, d);
        }
    }

    pub fn max_center_of_mass(&self) -> S {
        let d = self.d();
        let mut worst = S::zero();
        for j in 0..self.samples {
            for a in 0..d {
                let s: S = (0..self.n()).map(|i| self.params.masses[i] * self.body(j, i)[a]).sum();
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    /// Smallest distance between two bodies over all samples.
    pub fn min_pairwise_distance(&self) -> S {
        let mut best = S::infinity();
        for j in 0..self.samples {
            for i in 0..self.n() {
                for k in i + 1..self.n() {
                    best = best.min(distance(self.body(j, i), self.body(j, k)));
                }
            }
        }
        best
    }

    /// `Σ_j Σ_i m_i |x_i(t_j)|² / M`.
    pub fn mean_inertia(&self) -> S {
        let mut total = S::zero();
        for j in 0..self.samples {
            for i in 0..self.n() {
                let b = self.body(j, i);
                total = total + self.params.masses[i] * crate::linalg::dot(b, b);
            }
        }
        total / S::from_usize_lossy(self.samples)
    }

    /// `∫ |ẋ|² + |x|² dt` by the trapezoid rule, with spectral derivatives.
    pub fn h1_norm_squared(&self) -> S {
        let v = Spectral::new(self.samples, self.period()).first_derivative(&self.positions, self.n() * self.d());
        let h = self.period() / S::from_usize_lossy(self.samples);
        let s: Vec<S> = v.iter().zip(&self.positions).map(|(a, b)| *a * *a + *b * *b).collect();
        h * pairwise_sum(&s)
    }

    /// Euclidean inner product of the sample vectors.
    pub fn dot(&self, other: &Self) -> S {
        pairwise_sum(
            &self
                .positions
                .iter()
                .zip(&other.positions)
                .map(|(a, b)| *a * *b)
                .collect::<Vec<_>>(),
        )
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: S, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.positions.iter_mut().zip(&other.positions) {
            *a = *a + s * *b;
        }
        out.center();
        out
    }

    pub fn scaled(&self, s: S) -> Self {
        let mut out = self.clone();
        for a in out.positions.iter_mut() {
            *a = *a * s;
        }
        out
    }

    /// Maximum absolute difference of samples.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        self.positions
            .iter()
            .zip(&other.positions)
            .fold(S::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

#[inline]
pub(crate) fn distance<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
        .sqrt()
}

/// Errors unless every time transform of the group permutes the `samples`-point grid.
pub fn check_grid<S: Scalar>(action: &GroupAction<S>, samples: usize) -> Result<()> {
    let req = action.grid_requirement();
    if samples % req != 0 {
        return Err(Error::GridIncompatible { samples, required: req });
    }
    Ok(())
}

/// Smallest grid-compatible sample count that is at least `min`.
pub fn compatible_samples<S: Scalar>(action: &GroupAction<S>, min: usize) -> usize {
    let req = action.grid_requirement().max(1);
    min.div_ceil(req).max(1) * req
}

/// `(g·x)(t) = g x(g⁻¹ t)`, evaluated on the grid.
pub fn act_on_loop<S: Scalar>(action: &GroupAction<S>, g: usize, x: &EquivariantLoop<S>) -> Result<EquivariantLoop<S>> {
    let m = x.samples();
    let map = action.element(g).tau.grid_map(m)?;
    let w = x.n() * x.d();
    let mut out = vec![S::zero(); m * w];
    for j in 0..m {
        let moved = action.act_on_config(g, x.config(j));
        let target = map[j];
        out[target * w..(target + 1) * w].copy_from_slice(&moved);
    }
    Ok(EquivariantLoop {
        params: x.params.clone(),
        samples: m,
        positions: out,
    })
}

/// Orthogonal projection onto equivariant loops: `(1/|G|) Σ_g g·x`.
pub fn project_equivariant<S: Scalar>(x: &EquivariantLoop<S>, action: &GroupAction<S>) -> Result<EquivariantLoop<S>> {
    check_grid(action, x.samples())?;
    if x.n() != action.n() || x.d() != action.d() {
        return Err(Error::InvalidArgument("loop and action disagree on n or d".into()));
    }
    let mut acc = vec![S::zero(); x.positions.len()];
    for g in 0..action.order() {
        let gx = act_on_loop(action, g, x)?;
        for (a, b) in acc.iter_mut().zip(&gx.positions) {
            *a = *a + *b;
        }
    }
    let inv = S::one() / S::from_usize_lossy(action.order());
    for a in acc.iter_mut() {
        *a = *a * inv;
    }
    let mut out = EquivariantLoop {
        params: x.params.clone(),
        samples: x.samples,
        positions: acc,
    };
    out.center();
    Ok(out)
}

/// `max_{g, j, i} |ρ(g) x_{σ(g⁻¹)(i)}(t_j) − x_i(τ(g) t_j)|`.
pub fn equivariance_residual<S: Scalar>(x: &EquivariantLoop<S>, action: &GroupAction<S>) -> Result<S> {
    check_grid(action, x.samples())?;
    let mut worst = S::zero();
    for g in 0..action.order() {
        let gx = act_on_loop(action, g, x)?;
        worst = worst.max(gx.max_abs_diff(x));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{close_group, GroupElement, DEFAULT_CAP};
    use crate::linalg::Mat;
    use crate::perm::IndexPermutation;
    use crate::time::TimeTransform;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn choreo3() -> GroupAction<f64> {
        let g = GroupElement {
            tau: TimeTransform::rotation(1, 3),
            rho: Mat::identity(2),
            sigma: IndexPermutation::parse_cycles("(1,2,3)", 3).unwrap(),
        };
        close_group(SystemParams::unit_masses(3, 2, 1.0, 1.0), vec![g], DEFAULT_CAP).unwrap()
    }

    fn random_loop(params: SystemParams<f64>, m: usize, seed: u64) -> EquivariantLoop<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = params.n * params.d;
        EquivariantLoop::new(params, m, (0..m * w).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn construction_centers() {
        let params = SystemParams::new(3, 2, 1.0, 1.0, vec![1.0, 2.0, 3.0]).unwrap();
        let lp = random_loop(params, 12, 1);
        assert!(lp.max_center_of_mass() < 1e-14);
    }

    #[test]
    fn choreography_projection() {
        let a = choreo3();
        let lp = random_loop(a.params.clone(), 24, 7);
        let p = project_equivariant(&lp, &a).unwrap();
        assert!(equivariance_residual(&p, &a).unwrap() < 1e-14);
        // x_{i+1}(t + T/3) = x_i(t); sample shift of 8 on 24 points.
        for j in 0..24 {
            for i in 0..3 {
                let a1 = p.body((j + 8) % 24, (i + 1) % 3);
                let b1 = p.body(j, i);
                for k in 0..2 {
                    assert!((a1[k] - b1[k]).abs() < 1e-14);
                }
            }
        }
        let pp = project_equivariant(&p, &a).unwrap();
        assert!(pp.max_abs_diff(&p) < 1e-15);
    }

    #[test]
    fn grid_checks() {
        let a = choreo3();
        assert!(project_equivariant(&random_loop(a.params.clone(), 16, 2), &a).is_err());
        assert_eq!(compatible_samples(&a, 256), 258);
        assert_eq!(compatible_samples(&a, 3), 3);
    }
}
