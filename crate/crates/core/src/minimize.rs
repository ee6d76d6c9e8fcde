//! Projected limited-memory quasi-Newton minimization of the equivariant action.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupAction;
use crate::linalg::Mat;
use crate::loops::{
    action_report, check_grid, equivariance_residual, ActionFunctional, ActionReport, EquivariantLoop, Spectral,
};
use crate::symmetry::coercivity_test;
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizeConfig {
    pub samples: usize,
    /// Iteration cap per mollifier phase.
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// Tolerance of the mollified phases before the last one.
    pub intermediate_tolerance: f64,
    pub seed: u64,
    pub fourier_mode_cap: usize,
    pub mollifier_schedule: Vec<f64>,
    pub backtracking_factor: f64,
    pub sufficient_decrease: f64,
    pub memory: usize,
    /// Stop as diverging once the mean inertia exceeds this multiple of its start value.
    pub divergence_inertia_factor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotating_frame: Option<Vec<Vec<f64>>>,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            samples: 256,
            max_iterations: 5000,
            gradient_tolerance: 1e-8,
            intermediate_tolerance: 1e-4,
            seed: 0,
            fourier_mode_cap: 3,
            mollifier_schedule: vec![0.05, 0.01, 0.002, 0.0],
            backtracking_factor: 0.5,
            sufficient_decrease: 1e-4,
            memory: 10,
            divergence_inertia_factor: 1e6,
            rotating_frame: None,
        }
    }
}

impl MinimizeConfig {
    pub fn validate(&self) -> Result<()> {
        let s = &self.mollifier_schedule;
        if s.is_empty() || *s.last().unwrap() != 0.0 {
            return Err(Error::InvalidArgument("mollifier schedule must end with 0".into()));
        }
        if s.windows(2).any(|w| !(w[0] > w[1])) || s.iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::InvalidArgument(
                "mollifier schedule must be strictly decreasing".into(),
            ));
        }
        if !(self.backtracking_factor > 0.0 && self.backtracking_factor < 1.0) {
            return Err(Error::InvalidArgument("backtracking factor must lie in (0, 1)".into()));
        }
        if !(self.sufficient_decrease > 0.0 && self.sufficient_decrease < 1.0) {
            return Err(Error::InvalidArgument(
                "sufficient-decrease constant must lie in (0, 1)".into(),
            ));
        }
        if !(self.gradient_tolerance > 0.0) || self.memory == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidArgument(
                "tolerance, memory and iteration cap must be positive".into(),
            ));
        }
        if self.fourier_mode_cap == 0 {
            return Err(Error::InvalidArgument("fourier_mode_cap must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    MaxIterations,
    LineSearchFailed,
    Diverging,
}

#[derive(Clone, Debug)]
pub struct MinimizeResult<S> {
    pub loop_: EquivariantLoop<S>,
    pub report: ActionReport,
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Action after every accepted step, all phases concatenated.
    pub history: Vec<f64>,
    /// Index in `history` where each phase ends.
    pub phase_ends: Vec<usize>,
    /// Mean inertia after every accepted step.
    pub inertia_history: Vec<f64>,
    pub seed: u64,
}

/// Orthogonal projection onto centered equivariant sample vectors.
struct Projector<'a, S: Scalar> {
    action: &'a GroupAction<S>,
    maps: Vec<Vec<usize>>,
    samples: usize,
}

impl<'a, S: Scalar> Projector<'a, S> {
    fn new(action: &'a GroupAction<S>, samples: usize) -> Result<Self> {
        check_grid(action, samples)?;
        let maps = action
            .elements()
            .iter()
            .map(|e| e.tau.grid_map(samples))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { action, maps, samples })
    }

    fn apply(&self, x: &[S]) -> Vec<S> {
        let w = self.action.n() * self.action.d();
        let mut acc = vec![S::zero(); x.len()];
        for (g, map) in self.maps.iter().enumerate() {
            for j in 0..self.samples {
                let moved = self.action.act_on_config(g, &x[j * w..(j + 1) * w]);
                let t = map[j] * w;
                for (a, b) in acc[t..t + w].iter_mut().zip(&moved) {
                    *a = *a + *b;
                }
            }
        }
        let inv = S::one() / S::from_usize_lossy(self.maps.len());
        let (masses, d) = (self.action.masses(), self.action.d());
        for j in 0..self.samples {
            let c = &mut acc[j * w..(j + 1) * w];
            for v in c.iter_mut() {
                *v = *v * inv;
            }
            crate::loops::center_config(c, masses, d);
        }
        acc
    }
}

fn dotv<S: Scalar>(a: &[S], b: &[S]) -> S {
    let prods: Vec<S> = a.iter().zip(b).map(|(x, y)| *x * *y).collect();
    crate::loops::pairwise_sum(&prods)
}

fn mean_inertia<S: Scalar>(x: &[S], masses: &[S], d: usize, samples: usize) -> f64 {
    let n = masses.len();
    let mut total = 0.0;
    for j in 0..samples {
        for i in 0..n {
            let off = (j * n + i) * d;
            let r2: S = x[off..off + d].iter().map(|v| *v * *v).sum();
            total += (masses[i] * r2).to_f64_lossy();
        }
    }
    total / samples as f64
}

/// A random, centered, equivariant loop with unit mean inertia and no near-collisions.
pub fn seed_loop<S: Scalar>(action: &GroupAction<S>, config: &MinimizeConfig) -> Result<EquivariantLoop<S>> {
    config.validate()?;
    if !coercivity_test(action) {
        log::warn!("action is not coercive; the minimizer may escape to infinity");
    }
    let m = config.samples;
    let proj = Projector::new(action, m)?;
    let (n, d) = (action.n(), action.d());
    let period = action.period().to_f64_lossy();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    const ATTEMPTS: usize = 100;
    for attempt in 0..ATTEMPTS {
        // Raise the mode cap if the low modes are killed by the symmetry.
        let cap = (config.fourier_mode_cap << (attempt / 10)).min(m / 2).max(1);
        let coeffs: Vec<f64> = (0..n * d * (2 * cap + 1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut pos = vec![S::zero(); m * n * d];
        for j in 0..m {
            let t = period * j as f64 / m as f64;
            for c in 0..n * d {
                let base = c * (2 * cap + 1);
                let mut v = coeffs[base];
                for k in 1..=cap {
                    let w = 2.0 * std::f64::consts::PI * k as f64 * t / period;
                    v += (coeffs[base + 2 * k - 1] * w.cos() + coeffs[base + 2 * k] * w.sin()) / k as f64;
                }
                pos[j * n * d + c] = S::lit(v);
            }
        }
        let p = proj.apply(&pos);
        let inertia = mean_inertia(&p, action.masses(), d, m);
        if !(inertia > 1e-20) {
            continue;
        }
        let scale = S::lit(inertia.sqrt().recip());
        let p: Vec<S> = p.iter().map(|v| *v * scale).collect();
        let lp = EquivariantLoop::new(action.params.clone(), m, p)?;
        if lp.min_pairwise_distance().to_f64_lossy() >= 1e-3 {
            return Ok(lp);
        }
    }
    Err(Error::SeedFailure { attempts: ATTEMPTS })
}

struct Problem<'a, S: Scalar> {
    functional: ActionFunctional<S>,
    proj: Projector<'a, S>,
    precond: Vec<S>,
    spectral: Spectral<S>,
    width: usize,
}

impl<'a, S: Scalar> Problem<'a, S> {
    /// Projected gradient and value, or `None` at collisions / non-finite values.
    fn eval(&self, x: &[S]) -> Option<(S, Vec<S>)> {
        let (f, g) = self.functional.value_and_gradient(x).ok()?;
        if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((f, self.proj.apply(&g)))
    }

    /// Inverse of the kinetic Hessian (shifted on the constant mode), as a Fourier multiplier.
    fn precondition(&self, g: &[S]) -> Vec<S> {
        let out = self
            .spectral
            .apply_real_multiplier(g, self.width, |w| self.multiplier(w));
        self.proj.apply(&out)
    }

    fn multiplier(&self, w: S) -> S {
        let base = self.precond[0];
        let shift = self.precond[1];
        S::one() / (base * (w * w + shift))
    }
}

struct PhaseOutcome {
    termination: Termination,
    iterations: usize,
    gradient_norm: f64,
}

fn run_phase<S: Scalar>(
    prob: &Problem<'_, S>,
    x: &mut Vec<S>,
    config: &MinimizeConfig,
    tol: f64,
    history: &mut Vec<f64>,
    inertia: &mut Vec<f64>,
    inertia0: f64,
) -> Result<PhaseOutcome> {
    let params = prob.functional.params();
    let (masses, d, m) = (params.masses.clone(), params.d, prob.functional.samples());
    let (mut f, mut g) = prob
        .eval(x)
        .ok_or_else(|| Error::InvalidArgument("starting loop collides or has non-finite action".into()))?;
    let mut s_hist: Vec<Vec<S>> = Vec::new();
    let mut y_hist: Vec<Vec<S>> = Vec::new();
    let mut rho_hist: Vec<S> = Vec::new();
    let c1 = S::lit(config.sufficient_decrease);
    let shrink = S::lit(config.backtracking_factor);
    let mut it = 0;
    loop {
        let gnorm = dotv(&g, &g).sqrt().to_f64_lossy();
        if gnorm <= tol {
            return Ok(PhaseOutcome {
                termination: Termination::Converged,
                iterations: it,
                gradient_norm: gnorm,
            });
        }
        if it >= config.max_iterations {
            return Ok(PhaseOutcome {
                termination: Termination::MaxIterations,
                iterations: it,
                gradient_norm: gnorm,
            });
        }
        let mut accepted = false;
        for attempt in 0..2 {
            if attempt == 1 {
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
            }
            let p = two_loop(prob, &g, &s_hist, &y_hist, &rho_hist);
            let slope = dotv(&g, &p);
            if !(slope < S::zero()) {
                continue;
            }
            let slack = S::lit(1e-12) * f.abs();
            let mut step = S::one();
            for _ in 0..60 {
                let trial: Vec<S> = x.iter().zip(&p).map(|(a, b)| *a + step * *b).collect();
                if let Some((ft, gt)) = prob.eval(&trial) {
                    if ft <= f + c1 * step * slope + slack {
                        let s: Vec<S> = p.iter().map(|v| step * *v).collect();
                        let y: Vec<S> = gt.iter().zip(&g).map(|(a, b)| *a - *b).collect();
                        let sy = dotv(&s, &y);
                        if sy > S::lit(1e-300) {
                            if s_hist.len() == config.memory {
                                s_hist.remove(0);
                                y_hist.remove(0);
                                rho_hist.remove(0);
                            }
                            s_hist.push(s);
                            y_hist.push(y);
                            rho_hist.push(S::one() / sy);
                        }
                        *x = trial;
                        f = ft;
                        g = gt;
                        accepted = true;
                        break;
                    }
                }
                step = step * shrink;
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            return Ok(PhaseOutcome {
                termination: Termination::LineSearchFailed,
                iterations: it,
                gradient_norm: dotv(&g, &g).sqrt().to_f64_lossy(),
            });
        }
        it += 1;
        history.push(f.to_f64_lossy());
        let inr = mean_inertia(x, &masses, d, m);
        inertia.push(inr);
        if inr > config.divergence_inertia_factor * inertia0 {
            return Ok(PhaseOutcome {
                termination: Termination::Diverging,
                iterations: it,
                gradient_norm: dotv(&g, &g).sqrt().to_f64_lossy(),
            });
        }
    }
}

/// Limited-memory inverse-Hessian times `−g`, with the kinetic preconditioner
/// as the initial matrix.
fn two_loop<S: Scalar>(prob: &Problem<'_, S>, g: &[S], s: &[Vec<S>], y: &[Vec<S>], rho: &[S]) -> Vec<S> {
    let k = s.len();
    let mut q: Vec<S> = g.to_vec();
    let mut a = vec![S::zero(); k];
    for i in (0..k).rev() {
        a[i] = rho[i] * dotv(&s[i], &q);
        for (qv, yv) in q.iter_mut().zip(&y[i]) {
            *qv = *qv - a[i] * *yv;
        }
    }
    let mut r = prob.precondition(&q);
    for i in 0..k {
        let b = rho[i] * dotv(&y[i], &r);
        for (rv, sv) in r.iter_mut().zip(&s[i]) {
            *rv = *rv + (a[i] - b) * *sv;
        }
    }
    r.iter().map(|v| -*v).collect()
}

/// Minimizes the action over loops equivariant under `action`, starting from
/// [`seed_loop`] and annealing the mollifier down to the exact potential.
pub fn minimize<S: Scalar>(action: &GroupAction<S>, config: &MinimizeConfig) -> Result<MinimizeResult<S>> {
    let start = seed_loop(action, config)?;
    minimize_from(action, start, config)
}

/// As [`minimize`], from a given starting loop (which is projected first).
pub fn minimize_from<S: Scalar>(
    action: &GroupAction<S>,
    start: EquivariantLoop<S>,
    config: &MinimizeConfig,
) -> Result<MinimizeResult<S>> {
    config.validate()?;
    let m = start.samples();
    let proj = Projector::new(action, m)?;
    let mut functional = ActionFunctional::new(action.params.clone(), m);
    if let Some(rows) = &config.rotating_frame {
        let d = action.d();
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument(format!("rotating frame must be {d}×{d}")));
        }
        let om = Mat::from_rows(d, d, rows.iter().flatten().map(|v| S::lit(*v)).collect());
        functional = functional.with_rotating_frame(om)?;
    }
    let period = action.period();
    let h = period / S::from_usize_lossy(m);
    let mbar = action.params.total_mass() / S::from_usize_lossy(action.n());
    let w0 = S::lit(2.0) * S::PI() / period;
    let mut prob = Problem {
        functional,
        proj,
        precond: vec![h * mbar, w0 * w0],
        spectral: Spectral::new(m, period),
        width: action.n() * action.d(),
    };
    let mut x = prob.proj.apply(start.positions());
    let masses = action.masses().to_vec();
    let inertia0 = mean_inertia(&x, &masses, action.d(), m);
    let mut history = Vec::new();
    let mut inertia = Vec::new();
    let mut phase_ends = Vec::new();
    let mut iterations = 0;
    let mut last = None;
    let phases = config.mollifier_schedule.len();
    for (k, &eps) in config.mollifier_schedule.iter().enumerate() {
        prob.functional.set_mollifier(S::lit(eps));
        let tol = if k + 1 == phases {
            config.gradient_tolerance
        } else {
            config.intermediate_tolerance.max(config.gradient_tolerance)
        };
        let out = run_phase(&prob, &mut x, config, tol, &mut history, &mut inertia, inertia0)?;
        iterations += out.iterations;
        phase_ends.push(history.len());
        log::info!(
            "phase ε = {eps}: {:?} after {} iterations, |g| = {:.3e}",
            out.termination,
            out.iterations,
            out.gradient_norm
        );
        let stop = out.termination == Termination::Diverging;
        last = Some(out);
        if stop {
            break;
        }
    }
    let out = last.expect("schedule is non-empty");
    let lp = EquivariantLoop::new(action.params.clone(), m, x)?;
    let mut report = action_report(&lp)?;
    report.equivariance_residual = Some(equivariance_residual(&lp, action)?.to_f64_lossy());
    report.gradient_norm = Some(out.gradient_norm);
    let converged =
        out.termination == Termination::Converged && report.min_pairwise_distance > crate::loops::COLLISION_THRESHOLD;
    Ok(MinimizeResult {
        loop_: lp,
        report,
        converged,
        termination: out.termination,
        iterations,
        gradient_norm: out.gradient_norm,
        history,
        phase_ends,
        inertia_history: inertia,
        seed: config.seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub converged: bool,
    pub action: Option<f64>,
    pub min_pairwise_distance: Option<f64>,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimumCluster {
    pub action: f64,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct MultiSeedResult<S> {
    /// Lowest-action converged run, or the lowest-action run if none converged.
    pub best: MinimizeResult<S>,
    pub runs: Vec<RunSummary>,
    /// Converged runs grouped by action value (relative gap ≤ 1e−4), lowest first.
    pub clusters: Vec<MinimumCluster>,
}

pub const CLUSTER_TOL: f64 = 1e-4;

/// Runs [`minimize`] for seeds `seed, seed+1, …` in parallel.
pub fn multi_seed<S: Scalar>(
    action: &GroupAction<S>,
    config: &MinimizeConfig,
    count: usize,
) -> Result<MultiSeedResult<S>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be ≥ 1".into()));
    }
    config.validate()?;
    check_grid(action, config.samples)?;
    let mut runs: Vec<(u64, Result<MinimizeResult<S>>)> = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let cfg = MinimizeConfig {
                seed: config.seed + k,
                ..config.clone()
            };
            (cfg.seed, minimize(action, &cfg))
        })
        .collect();
    runs.sort_by_key(|(s, _)| *s);
    let summaries: Vec<RunSummary> = runs
        .iter()
        .map(|(seed, r)| match r {
            Ok(r) => RunSummary {
                seed: *seed,
                converged: r.converged,
                action: Some(r.report.action),
                min_pairwise_distance: Some(r.report.min_pairwise_distance),
                iterations: r.iterations,
                error: None,
            },
            Err(e) => RunSummary {
                seed: *seed,
                converged: false,
                action: None,
                min_pairwise_distance: None,
                iterations: 0,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let mut ok: Vec<MinimizeResult<S>> = runs.into_iter().filter_map(|(_, r)| r.ok()).collect();
    if ok.is_empty() {
        return Err(Error::AllRunsFailed { count });
    }
    let mut conv: Vec<(f64, u64)> = ok
        .iter()
        .filter(|r| r.converged)
        .map(|r| (r.report.action, r.seed))
        .collect();
    conv.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut clusters: Vec<MinimumCluster> = Vec::new();
    for (a, s) in conv {
        match clusters.last_mut() {
            Some(c) if (a - c.action).abs() <= CLUSTER_TOL * c.action.abs() => c.seeds.push(s),
            _ => clusters.push(MinimumCluster {
                action: a,
                seeds: vec![s],
            }),
        }
    }
    let key = |r: &MinimizeResult<S>| (!r.converged, r.report.action);
    let best_idx = (0..ok.len())
        .min_by(|&i, &j| {
            let (a, b) = (key(&ok[i]), key(&ok[j]));
            a.0.cmp(&b.0).then(a.1.total_cmp(&b.1))
        })
        .expect("non-empty");
    let best = ok.swap_remove(best_idx);
    Ok(MultiSeedResult {
        best,
        runs: summaries,
        clusters,
    })
}

/// `[A(x + hv) − 2A(x) + A(x − hv)] / h²`, refined by one Richardson step with `h/2`.
pub fn hessian_quadratic_form<S: Scalar>(x: &EquivariantLoop<S>, v: &EquivariantLoop<S>, h: S) -> Result<S> {
    if x.samples() != v.samples() || x.n() != v.n() || x.d() != v.d() {
        return Err(Error::InvalidArgument(
            "loop and direction must share the layout".into(),
        ));
    }
    let f = ActionFunctional::for_loop(x);
    hessian_with(|y| f.value(y), x.positions(), v.positions(), h)
}

/// The same stencil for an arbitrary functional on sample vectors.
pub fn hessian_with<S: Scalar>(mut a: impl FnMut(&[S]) -> Result<S>, x: &[S], v: &[S], h: S) -> Result<S> {
    let a0 = a(x)?;
    let mut second = |step: S| -> Result<S> {
        let plus: Vec<S> = x.iter().zip(v).map(|(p, q)| *p + step * *q).collect();
        let minus: Vec<S> = x.iter().zip(v).map(|(p, q)| *p - step * *q).collect();
        Ok((a(&plus)? - S::lit(2.0) * a0 + a(&minus)?) / (step * step))
    };
    let d1 = second(h)?;
    let d2 = second(h / S::lit(2.0))?;
    Ok((S::lit(4.0) * d2 - d1) / S::lit(3.0))
}
