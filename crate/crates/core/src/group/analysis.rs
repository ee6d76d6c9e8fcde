use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{GroupAction, Subgroup, IDENTITY_TOL};
use crate::linalg::{psd_range_basis, Mat};
use crate::time::{frac, TimeTransform};
use crate::Scalar;

/// Eigenvalue threshold for the rank of projectors onto fixed spaces.
pub const RANK_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Tau,
    Rho,
    Sigma,
}

/// Elements whose chosen component acts trivially.
pub fn kernel<S: Scalar>(action: &GroupAction<S>, which: Kernel) -> Subgroup {
    let tol = S::lit(IDENTITY_TOL);
    Subgroup::from_members(
        action
            .elements()
            .iter()
            .enumerate()
            .filter(|(_, e)| match which {
                Kernel::Tau => e.tau.is_identity(),
                Kernel::Rho => e.rho.is_identity(tol),
                Kernel::Sigma => e.sigma.is_identity(),
            })
            .map(|(g, _)| g)
            .collect(),
    )
}

/// Euclidean orthogonal projector onto centered configurations `Σ m_i x_i = 0`.
pub fn centering_projector<S: Scalar>(masses: &[S], d: usize) -> Mat<S> {
    let n = masses.len();
    let m2: S = masses.iter().map(|m| *m * *m).sum();
    Mat::from_fn(n * d, n * d, |r, c| {
        let (i, a) = (r / d, r % d);
        let (j, b) = (c / d, c % d);
        let id = if r == c { S::one() } else { S::zero() };
        if a == b {
            id - masses[i] * masses[j] / m2
        } else {
            id
        }
    })
}

/// Orthogonal projector onto `X^H`, the centered configurations fixed by `H`.
pub fn fixed_space_projector<S: Scalar>(action: &GroupAction<S>, h: &Subgroup) -> Mat<S> {
    let dim = action.n() * action.d();
    let mut avg = Mat::zeros(dim, dim);
    for &g in h.members() {
        avg = avg.add(&action.config_matrix(g));
    }
    let avg = avg.scale(S::one() / S::from_usize_lossy(h.order()));
    avg.mul(&centering_projector(action.masses(), action.d())).symmetrized()
}

/// Orthonormal basis of `X^H` as flat configurations of length `n d`.
pub fn fixed_config_space<S: Scalar>(action: &GroupAction<S>, h: &Subgroup) -> Vec<Vec<S>> {
    psd_range_basis(&fixed_space_projector(action, h), S::lit(RANK_THRESHOLD))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionType {
    Cyclic,
    Brake,
    Dihedral,
}

impl std::fmt::Display for ActionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Cyclic => "cyclic",
            Self::Brake => "brake",
            Self::Dihedral => "dihedral",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub action_type: ActionType,
    /// Number of distinct time-isotropy subgroups.
    pub isotropy_count: usize,
}

fn distinct_time_images<S: Scalar>(action: &GroupAction<S>) -> Vec<TimeTransform> {
    let mut out: Vec<TimeTransform> = Vec::new();
    for e in action.elements() {
        if !out.contains(&e.tau) {
            out.push(e.tau);
        }
    }
    out
}

pub fn classify_action_type<S: Scalar>(action: &GroupAction<S>) -> Classification {
    let images = distinct_time_images(action);
    let reflections = images.iter().filter(|t| t.is_reflection()).count();
    let action_type = match reflections {
        0 => ActionType::Cyclic,
        1 => ActionType::Brake,
        _ => ActionType::Dihedral,
    };
    let isotropy_count = time_isotropy_subgroups(action).len();
    Classification {
        action_type,
        isotropy_count,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropyEntry {
    /// Representative time, as a fraction of the period.
    pub time: Rational64,
    pub subgroup: Subgroup,
    pub maximal: bool,
    pub minimal: bool,
}

/// Sorted, deduplicated reflection fixed points in `[0, 1)`.
fn reflection_points<S: Scalar>(action: &GroupAction<S>) -> Vec<Rational64> {
    let mut pts: Vec<Rational64> = action
        .elements()
        .iter()
        .flat_map(|e| e.tau.fixed_points())
        .map(frac)
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

/// A time fixed by no reflection.
fn generic_time(points: &[Rational64]) -> Rational64 {
    match points {
        [] => Rational64::zero(),
        [a] => frac(*a + Rational64::new(1, 2)),
        [a, b, ..] => (*a + *b) / 2,
    }
}

/// One entry per distinct time-isotropy subgroup; `ker τ` (the generic isotropy) is listed first.
pub fn time_isotropy_subgroups<S: Scalar>(action: &GroupAction<S>) -> Vec<IsotropyEntry> {
    let points = reflection_points(action);
    let generic = generic_time(&points);
    let mut found: Vec<(Rational64, Subgroup)> = vec![(generic, action.time_stabilizer(generic))];
    for p in points {
        let h = action.time_stabilizer(p);
        if !found.iter().any(|(_, s)| *s == h) {
            found.push((p, h));
        }
    }
    let subgroups: Vec<Subgroup> = found.iter().map(|(_, s)| s.clone()).collect();
    found
        .into_iter()
        .enumerate()
        .map(|(k, (time, subgroup))| {
            let maximal = !subgroups.iter().any(|o| *o != subgroup && subgroup.is_subset_of(o));
            IsotropyEntry {
                time,
                subgroup,
                maximal,
                minimal: k == 0,
            }
        })
        .collect()
}

/// Closed time interval (as fractions of the period) whose translates tile the circle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalDomain {
    pub start: Rational64,
    pub end: Rational64,
    pub start_isotropy: Subgroup,
    pub end_isotropy: Subgroup,
}

impl FundamentalDomain {
    pub fn length(&self) -> Rational64 {
        self.end - self.start
    }

    pub fn start_time(&self, period: f64) -> f64 {
        crate::time::rat_to_f64(self.start) * period
    }

    pub fn end_time(&self, period: f64) -> f64 {
        crate::time::rat_to_f64(self.end) * period
    }
}

pub fn fundamental_domain<S: Scalar>(action: &GroupAction<S>) -> FundamentalDomain {
    let points = reflection_points(action);
    if points.is_empty() {
        let kt = kernel(action, Kernel::Tau);
        let len = Rational64::new(1, action.time_quotient_order() as i64);
        return FundamentalDomain {
            start: Rational64::zero(),
            end: len,
            start_isotropy: kt.clone(),
            end_isotropy: kt,
        };
    }
    let (a, b) = (
        points[0],
        points.get(1).copied().unwrap_or(points[0] + Rational64::one()),
    );
    FundamentalDomain {
        start: a,
        end: b,
        start_isotropy: action.time_stabilizer(a),
        end_isotropy: action.time_stabilizer(b),
    }
}

/// Sufficient tests for reducibility. The general condition is not decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducibilityReport {
    /// `ker τ ∩ ker ρ ∩ ker σ = 1`.
    pub kernel_intersection_trivial: bool,
    /// Some `g ≠ 1` with trivial time and index action but `ρ(g) ≠ I`: every body
    /// is confined to the proper subspace `V^g`.
    pub fixed_subspace_trigger: bool,
    /// `ker ρ ∩ ker σ` contains a nontrivial time rotation (or has more than two
    /// elements): every equivariant loop is a reparametrization `y(kt)`.
    pub time_rescaling_trigger: bool,
}

impl ReducibilityReport {
    pub fn reducible_detected(&self) -> bool {
        self.fixed_subspace_trigger || self.time_rescaling_trigger
    }
}

pub fn reducibility_check<S: Scalar>(action: &GroupAction<S>) -> ReducibilityReport {
    let kt = kernel(action, Kernel::Tau);
    let kr = kernel(action, Kernel::Rho);
    let ks = kernel(action, Kernel::Sigma);
    let tol = S::lit(IDENTITY_TOL);
    let kernel_intersection_trivial = kt.intersect(&kr).intersect(&ks).is_trivial();
    let fixed_subspace_trigger = kt
        .intersect(&ks)
        .members()
        .iter()
        .any(|&g| g != 0 && !action.element(g).rho.is_identity(tol));
    let rs = kr.intersect(&ks);
    let time_rescaling_trigger = rs.order() > 2
        || rs.members().iter().any(|&g| {
            let t = action.element(g).tau;
            !t.is_reflection() && !t.is_identity()
        });
    ReducibilityReport {
        kernel_intersection_trivial,
        fixed_subspace_trigger,
        time_rescaling_trigger,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionVerdict {
    Bound,
    NotDetected,
    Unknown,
}

impl std::fmt::Display for CollisionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Bound => "bound",
            Self::NotDetected => "not-detected",
            Self::Unknown => "unknown",
        })
    }
}

/// Rank of `b ↦ b_i − b_j` restricted to the span of `basis`.
fn pair_difference_rank<S: Scalar>(basis: &[Vec<S>], d: usize, i: usize, j: usize) -> usize {
    if basis.is_empty() {
        return 0;
    }
    let k = basis.len();
    let diffs: Vec<Vec<S>> = basis
        .iter()
        .map(|b| (0..d).map(|a| b[i * d + a] - b[j * d + a]).collect())
        .collect();
    let gram = Mat::from_fn(k, k, |r, c| crate::linalg::dot(&diffs[r], &diffs[c]));
    psd_range_basis(&gram, S::lit(RANK_THRESHOLD)).len()
}

/// True when every configuration of the span has a pair of coinciding bodies.
fn span_inside_collisions<S: Scalar>(basis: &[Vec<S>], n: usize, d: usize) -> bool {
    (0..n).any(|i| (i + 1..n).any(|j| pair_difference_rank(basis, d, i, j) == 0))
}

pub fn bound_to_collisions_check<S: Scalar>(action: &GroupAction<S>) -> CollisionVerdict {
    let (n, d) = (action.n(), action.d());
    let kt = kernel(action, Kernel::Tau);
    let kr = kernel(action, Kernel::Rho);
    if !kt.intersect(&kr).is_trivial() {
        return CollisionVerdict::Bound;
    }
    let class = classify_action_type(action);
    if class.action_type != ActionType::Cyclic {
        let whole = action.whole();
        for entry in time_isotropy_subgroups(action) {
            let h = entry.subgroup;
            if h == whole || h.intersect(&kr).is_trivial() {
                continue;
            }
            if span_inside_collisions(&fixed_config_space(action, &h), n, d) {
                return CollisionVerdict::Bound;
            }
        }
    }
    let generic = fixed_config_space(action, &kt);
    if span_inside_collisions(&generic, n, d) {
        return CollisionVerdict::Bound;
    }
    let codim_one = (0..n).any(|i| (i + 1..n).any(|j| pair_difference_rank(&generic, d, i, j) == 1));
    if codim_one {
        CollisionVerdict::Unknown
    } else {
        CollisionVerdict::NotDetected
    }
}
