//! Coercivity, rotating circles and the orbit embedding.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{
    classify_action_type, fixed_config_space, kernel, time_isotropy_subgroups, ActionType, GroupAction, Kernel,
    Subgroup,
};
use crate::linalg::{dot, norm, orthonormalize, psd_range_basis, symmetric_eigen, Mat};
use crate::Scalar;

/// Tolerance for plane invariance, rotation determinants and fixedness.
pub const WITNESS_TOL: f64 = 1e-8;
/// Relative gap below which commutant eigenvalues are treated as equal.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-7;
/// Random commutant elements tried before a plane is declared absent.
pub const COMMUTANT_TRIALS: usize = 3;
/// Seed used by the convenience wrappers.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// A plane in `V^{H_i}` on which every element of `H` acts as a rotation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotatingCircleWitness {
    pub index: usize,
    pub subgroup: Subgroup,
    /// Orthonormal pair spanning the plane.
    pub plane: [Vec<f64>; 2],
    /// Rotation angle of each member of `subgroup` on the plane, in the same order.
    pub rotation_angles: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropyRcp {
    /// Representative time, as a fraction of the period.
    pub time: String,
    pub order: usize,
    pub maximal: bool,
    /// Whether σ is the identity on all of the subgroup.
    pub trivial_on_indices: bool,
    /// Indices (0-based) admitting a rotating circle.
    pub movable: Vec<usize>,
    pub rcp: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub coercive: bool,
    pub fixed_space_dim: usize,
    pub action_type: ActionType,
    pub ker_tau: IsotropyRcp,
    pub maximal_isotropy: Vec<IsotropyRcp>,
    /// All maximal time-isotropy subgroups have the rotating circle property.
    pub max_isotropy_rcp: bool,
    /// Every maximal time-isotropy subgroup has the property or acts trivially
    /// on the indices, so minimizers are collision-free.
    pub collisionless_minimizer_criterion: bool,
}

/// `X^G = 0`.
pub fn coercivity_test<S: Scalar>(action: &GroupAction<S>) -> bool {
    fixed_config_space(action, &action.whole()).is_empty()
}

/// `{g ∈ H : σ(g)(i) = i}`.
pub fn index_isotropy<S: Scalar>(action: &GroupAction<S>, h: &Subgroup, i: usize) -> Subgroup {
    h.filter(|g| action.element(g).sigma.apply(i) == i)
}

/// Orbits of `H` on the indices, each sorted, ordered by smallest element.
pub fn homogeneous_orbits<S: Scalar>(action: &GroupAction<S>, h: &Subgroup) -> Vec<Vec<usize>> {
    let n = action.n();
    let mut seen = vec![false; n];
    let mut orbits = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let mut orbit: Vec<usize> = h.members().iter().map(|&g| action.element(g).sigma.apply(i)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &j in &orbit {
            seen[j] = true;
        }
        orbits.push(orbit);
    }
    orbits
}

/// Orthonormal basis of the vectors of `V` fixed by every element of `h`.
fn fixed_vectors<S: Scalar>(action: &GroupAction<S>, h: &Subgroup) -> Vec<Vec<S>> {
    let d = action.d();
    let mut avg = Mat::zeros(d, d);
    for &g in h.members() {
        avg = avg.add(&action.element(g).rho);
    }
    let avg = avg.scale(S::one() / S::from_usize_lossy(h.order())).symmetrized();
    psd_range_basis(&avg, S::lit(0.5))
}

/// Matrix of `ρ(g)` in the orthonormal basis `b` of an invariant subspace.
fn restrict<S: Scalar>(rho: &Mat<S>, b: &[Vec<S>]) -> Mat<S> {
    let imgs: Vec<Vec<S>> = b.iter().map(|v| rho.mul_vec(v)).collect();
    Mat::from_fn(b.len(), b.len(), |r, c| dot(&b[r], &imgs[c]))
}

/// Largest component of `ρ(g) P` orthogonal to `P`, and `|det ρ(g)|_P − 1|`.
fn plane_defects<S: Scalar>(rho: &Mat<S>, plane: &[Vec<S>]) -> (S, S) {
    let mut leak = S::zero();
    for v in plane {
        let mut w = rho.mul_vec(v);
        for b in plane {
            let c = dot(&w, b);
            crate::linalg::axpy(-c, b, &mut w);
        }
        leak = leak.max(norm(&w));
    }
    let r = restrict(rho, plane);
    (leak, (r.det() - S::one()).abs())
}

fn witness<S: Scalar>(
    action: &GroupAction<S>,
    h: &Subgroup,
    i: usize,
    plane: [Vec<S>; 2],
) -> Option<RotatingCircleWitness> {
    let tol = S::lit(WITNESS_TOL);
    let mut angles = Vec::with_capacity(h.order());
    for &g in h.members() {
        let rho = &action.element(g).rho;
        let (leak, det) = plane_defects(rho, &plane);
        if leak > tol || det > tol {
            return None;
        }
        let r = restrict(rho, &plane);
        angles.push(r[(1, 0)].to_f64_lossy().atan2(r[(0, 0)].to_f64_lossy()));
    }
    let to_f64 = |v: &Vec<S>| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<f64>>();
    Some(RotatingCircleWitness {
        index: i,
        subgroup: h.clone(),
        plane: [to_f64(&plane[0]), to_f64(&plane[1])],
        rotation_angles: angles,
    })
}

/// Lifts coordinates in the basis `b` back to `V`.
fn lift<S: Scalar>(b: &[Vec<S>], coords: &[S]) -> Vec<S> {
    let d = b[0].len();
    let mut out = vec![S::zero(); d];
    for (v, &c) in b.iter().zip(coords) {
        crate::linalg::axpy(c, v, &mut out);
    }
    out
}

fn random_symmetric<S: Scalar, R: Rng + ?Sized>(w: usize, rng: &mut R) -> Mat<S> {
    let a = Mat::from_fn(w, w, |_, _| S::lit(rng.gen_range(-1.0..1.0)));
    a.symmetrized()
}

/// Splits `R^w` into eigenspaces of a random element of the commutant of `mats`.
fn commutant_split<S: Scalar, R: Rng + ?Sized>(mats: &[Mat<S>], rng: &mut R) -> Vec<Vec<Vec<S>>> {
    let w = mats[0].rows();
    let a = random_symmetric::<S, R>(w, rng);
    let mut c = Mat::zeros(w, w);
    for r in mats {
        c = c.add(&r.mul(&a).mul(&r.transpose()));
    }
    let (vals, vecs) = symmetric_eigen(&c.symmetrized());
    let scale = vals
        .iter()
        .fold(S::zero(), |m, v| m.max(v.abs()))
        .max(S::min_positive_value());
    let tol = S::lit(EIGEN_CLUSTER_TOL) * scale;
    let mut pieces: Vec<Vec<Vec<S>>> = Vec::new();
    let mut last: Option<S> = None;
    for (k, &v) in vals.iter().enumerate() {
        match last {
            Some(l) if v - l <= tol => pieces.last_mut().unwrap().push(vecs.column(k)),
            _ => pieces.push(vec![vecs.column(k)]),
        }
        last = Some(v);
    }
    pieces
}

/// Whether each matrix acts on the piece `e` (orthonormal, in restricted
/// coordinates) as `±1`, returning the signs.
fn scalar_character<S: Scalar>(mats: &[Mat<S>], e: &[Vec<S>]) -> Option<Vec<i8>> {
    let tol = S::lit(WITNESS_TOL);
    let mut chars = Vec::with_capacity(mats.len());
    for r in mats {
        let res = restrict(r, e);
        let s = res[(0, 0)];
        let sign = if s > S::zero() { 1 } else { -1 };
        let target = Mat::identity(e.len()).scale(S::lit(f64::from(sign)));
        if res.max_abs_diff(&target) > tol {
            return None;
        }
        chars.push(sign);
    }
    Some(chars)
}

/// Searches for a circle in `V^{H_i}` rotating under `H`.
///
/// Any `H`-invariant plane inside `V^{H_i}` lies in `V^N`, `N` the normal
/// closure of `H_i` in `H`, so the search runs on `V^N`, where `H` acts.
pub fn find_rotating_circle<S: Scalar, R: Rng + ?Sized>(
    action: &GroupAction<S>,
    h: &Subgroup,
    i: usize,
    rng: &mut R,
) -> Option<RotatingCircleWitness> {
    let hi = index_isotropy(action, h, i);
    let normal = action.normal_closure(&hi, h);
    let d = action.d();
    let b = if normal.is_trivial() {
        (0..d)
            .map(|k| (0..d).map(|c| if c == k { S::one() } else { S::zero() }).collect())
            .collect()
    } else {
        fixed_vectors(action, &normal)
    };
    let w = b.len();
    if w < 2 {
        return None;
    }
    if d == 2 {
        return witness(action, h, i, [b[0].clone(), b[1].clone()]);
    }
    let mats: Vec<Mat<S>> = h
        .members()
        .iter()
        .map(|&g| restrict(&action.element(g).rho, &b))
        .collect();
    // Vectors fixed by all of H: any plane among them rotates by angle 0.
    let fixed = fixed_vectors(action, h);
    if fixed.len() >= 2 {
        return witness(action, h, i, [fixed[0].clone(), fixed[1].clone()]);
    }
    for _ in 0..COMMUTANT_TRIALS {
        let pieces = commutant_split(&mats, rng);
        let mut lines: Vec<(Vec<i8>, Vec<S>)> = Vec::new();
        for e in &pieces {
            if let Some(chars) = scalar_character(&mats, e) {
                if e.len() >= 2 {
                    let plane = [lift(&b, &e[0]), lift(&b, &e[1])];
                    if let Some(wt) = witness(action, h, i, plane) {
                        return Some(wt);
                    }
                }
                for v in e {
                    lines.push((chars.clone(), lift(&b, v)));
                }
            } else if e.len() == 2 {
                let plane = [lift(&b, &e[0]), lift(&b, &e[1])];
                if let Some(wt) = witness(action, h, i, plane) {
                    return Some(wt);
                }
            }
        }
        // Two lines with the same character span a plane where each g acts as ±I.
        for (a, (ca, va)) in lines.iter().enumerate() {
            for (cb, vb) in &lines[a + 1..] {
                if ca == cb {
                    let plane = orthonormalize(&[va.clone(), vb.clone()], S::lit(WITNESS_TOL));
                    if plane.len() == 2 {
                        if let Some(wt) = witness(action, h, i, [plane[0].clone(), plane[1].clone()]) {
                            return Some(wt);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Maximum leakage and determinant defect of a witness over its subgroup, and
/// the largest deviation of the plane from `V^{H_i}`.
pub fn witness_defects<S: Scalar>(action: &GroupAction<S>, w: &RotatingCircleWitness) -> (f64, f64, f64) {
    let plane: Vec<Vec<S>> = w.plane.iter().map(|v| v.iter().map(|x| S::lit(*x)).collect()).collect();
    let mut leak = 0f64;
    let mut det = 0f64;
    for &g in w.subgroup.members() {
        let (l, dd) = plane_defects(&action.element(g).rho, &plane);
        leak = leak.max(l.to_f64_lossy());
        det = det.max(dd.to_f64_lossy());
    }
    let mut fix = 0f64;
    for &g in index_isotropy(action, &w.subgroup, w.index).members() {
        let rho = &action.element(g).rho;
        for v in &plane {
            let img = rho.mul_vec(v);
            let dev = img
                .iter()
                .zip(v)
                .fold(0f64, |m, (a, b)| m.max((*a - *b).abs().to_f64_lossy()));
            fix = fix.max(dev);
        }
    }
    (leak, det, fix)
}

/// The witness for `σ(h)(i)` obtained by moving the plane with `ρ(h)`.
pub fn transport_witness<S: Scalar>(
    action: &GroupAction<S>,
    w: &RotatingCircleWitness,
    h: usize,
) -> RotatingCircleWitness {
    let rho = &action.element(h).rho;
    let mv = |v: &Vec<f64>| -> Vec<f64> {
        let s: Vec<S> = v.iter().map(|x| S::lit(*x)).collect();
        rho.mul_vec(&s).iter().map(|x| x.to_f64_lossy()).collect()
    };
    RotatingCircleWitness {
        index: action.element(h).sigma.apply(w.index),
        subgroup: w.subgroup.clone(),
        plane: [mv(&w.plane[0]), mv(&w.plane[1])],
        rotation_angles: w.rotation_angles.clone(),
    }
}

/// Indices admitting a rotating circle under `h`.
pub fn movable_indices<S: Scalar, R: Rng + ?Sized>(action: &GroupAction<S>, h: &Subgroup, rng: &mut R) -> Vec<usize> {
    (0..action.n())
        .filter(|&i| find_rotating_circle(action, h, i, rng).is_some())
        .collect()
}

fn isotropy_rcp<S: Scalar, R: Rng + ?Sized>(
    action: &GroupAction<S>,
    time: String,
    h: &Subgroup,
    maximal: bool,
    rng: &mut R,
) -> IsotropyRcp {
    let movable = movable_indices(action, h, rng);
    IsotropyRcp {
        time,
        order: h.order(),
        maximal,
        trivial_on_indices: h.members().iter().all(|&g| action.element(g).sigma.is_identity()),
        rcp: movable.len() + 1 >= action.n(),
        movable,
    }
}

/// Rotating circle property of each maximal time-isotropy subgroup and of `ker τ`.
pub fn rotating_circle_property<S: Scalar, R: Rng + ?Sized>(action: &GroupAction<S>, rng: &mut R) -> SymmetryReport {
    let entries = time_isotropy_subgroups(action);
    let ktau = kernel(action, Kernel::Tau);
    let ker_maximal = entries.iter().any(|e| e.maximal && e.subgroup == ktau);
    let ker_tau = isotropy_rcp(action, "generic".into(), &ktau, ker_maximal, rng);
    let maximal_isotropy: Vec<IsotropyRcp> = entries
        .iter()
        .filter(|e| e.maximal)
        .map(|e| {
            if e.subgroup == ktau {
                IsotropyRcp {
                    time: e.time.to_string(),
                    ..ker_tau.clone()
                }
            } else {
                isotropy_rcp(action, e.time.to_string(), &e.subgroup, true, rng)
            }
        })
        .collect();
    let fixed_space_dim = fixed_config_space(action, &action.whole()).len();
    SymmetryReport {
        coercive: fixed_space_dim == 0,
        fixed_space_dim,
        action_type: classify_action_type(action).action_type,
        max_isotropy_rcp: maximal_isotropy.iter().all(|e| e.rcp),
        collisionless_minimizer_criterion: maximal_isotropy.iter().all(|e| e.rcp || e.trivial_on_indices),
        ker_tau,
        maximal_isotropy,
    }
}

/// [`rotating_circle_property`] with a generator seeded by `seed`.
pub fn symmetry_report<S: Scalar>(action: &GroupAction<S>, seed: u64) -> SymmetryReport {
    rotating_circle_property(action, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The `H`-equivariant configuration supported on the orbit `k` of `i` with
/// `x_j = ρ(h) p` for any `h ∈ H` sending `i` to `j`.
pub fn iota_embedding<S: Scalar>(
    action: &GroupAction<S>,
    h: &Subgroup,
    k: &[usize],
    i: usize,
    p: &[S],
) -> Result<Vec<S>> {
    let (n, d) = (action.n(), action.d());
    if p.len() != d {
        return Err(Error::InvalidArgument(format!("p must have {d} components")));
    }
    if i >= n {
        return Err(Error::InvalidArgument(format!("index {i} out of range")));
    }
    let orbit = homogeneous_orbits(action, h)
        .into_iter()
        .find(|o| o.contains(&i))
        .unwrap_or_default();
    let mut ks = k.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks != orbit {
        return Err(Error::InvalidArgument(format!(
            "index set {k:?} is not the orbit {orbit:?} of {i}"
        )));
    }
    let tol = S::lit(WITNESS_TOL);
    for &g in index_isotropy(action, h, i).members() {
        let img = action.element(g).rho.mul_vec(p);
        let dev = img.iter().zip(p).fold(S::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        if dev > tol {
            return Err(Error::InvalidArgument(format!(
                "p is not fixed by the isotropy of index {i} (deviation {dev:e})"
            )));
        }
    }
    let mut x = vec![S::zero(); n * d];
    let mut done = vec![false; n];
    for &g in h.members() {
        let e = action.element(g);
        let j = e.sigma.apply(i);
        if !done[j] {
            done[j] = true;
            x[j * d..(j + 1) * d].copy_from_slice(&e.rho.mul_vec(p));
        }
    }
    Ok(x)
}

/// Same embedding, but choosing for each `j` the *last* element of `H` that
/// sends `i` to `j`; used to check independence of the choice.
pub fn iota_embedding_alt<S: Scalar>(action: &GroupAction<S>, h: &Subgroup, i: usize, p: &[S]) -> Vec<S> {
    let (n, d) = (action.n(), action.d());
    let mut x = vec![S::zero(); n * d];
    for &g in h.members() {
        let e = action.element(g);
        let j = e.sigma.apply(i);
        x[j * d..(j + 1) * d].copy_from_slice(&e.rho.mul_vec(p));
    }
    x
}
