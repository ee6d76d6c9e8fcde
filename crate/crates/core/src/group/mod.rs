//! Finite groups acting on the time circle, on space and on the body indices.

mod analysis;
mod config;

pub use analysis::{
    bound_to_collisions_check, classify_action_type, fixed_config_space, fundamental_domain, kernel,
    reducibility_check, time_isotropy_subgroups, ActionType, Classification, CollisionVerdict, FundamentalDomain,
    IsotropyEntry, Kernel, ReducibilityReport,
};
pub use config::{ActionConfig, GeneratorSpec, RhoSpec};

use std::collections::HashMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::perm::IndexPermutation;
use crate::time::TimeTransform;
use crate::Scalar;

/// Default bound on the number of elements produced by [`close_group`].
pub const DEFAULT_CAP: usize = 10_000;
/// Orthogonality tolerance for generator matrices.
pub const INPUT_ORTHOGONALITY_TOL: f64 = 1e-9;
/// Orthogonality tolerance for matrices obtained as products.
pub const PRODUCT_ORTHOGONALITY_TOL: f64 = 1e-8;
/// Two products with equal time and index parts are the same element when
/// their space matrices agree to this tolerance.
const MATRIX_MATCH_TOL: f64 = 1e-8;
/// Tolerance for "this matrix is the identity" in kernel computations.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<S> {
    pub tau: TimeTransform,
    pub rho: Mat<S>,
    pub sigma: IndexPermutation,
}

impl<S: Scalar> GroupElement<S> {
    pub fn identity(n: usize, d: usize) -> Self {
        Self {
            tau: TimeTransform::identity(),
            rho: Mat::identity(d),
            sigma: IndexPermutation::identity(n),
        }
    }

    /// Componentwise product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            tau: self.tau.compose(&other.tau),
            rho: self.rho.mul(&other.rho),
            sigma: self.sigma.compose(&other.sigma),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.tau.is_identity() && self.sigma.is_identity() && self.rho.is_identity(S::lit(IDENTITY_TOL))
    }

    fn same_as(&self, other: &Self) -> bool {
        self.tau == other.tau
            && self.sigma == other.sigma
            && self.rho.max_abs_diff(&other.rho) <= S::lit(MATRIX_MATCH_TOL)
    }
}

/// Physical data accompanying the group: bodies, dimension, exponent, masses, period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SystemParams<S> {
    pub n: usize,
    pub d: usize,
    pub alpha: S,
    pub period: S,
    pub masses: Vec<S>,
}

impl<S: Scalar> SystemParams<S> {
    pub fn new(n: usize, d: usize, alpha: S, period: S, masses: Vec<S>) -> Result<Self> {
        let p = Self {
            n,
            d,
            alpha,
            period,
            masses,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn unit_masses(n: usize, d: usize, alpha: S, period: S) -> Self {
        Self {
            n,
            d,
            alpha,
            period,
            masses: vec![S::one(); n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidAction(format!("need at least 2 bodies, got {}", self.n)));
        }
        if self.d < 2 {
            return Err(Error::InvalidAction(format!("dimension must be ≥ 2, got {}", self.d)));
        }
        if !(self.alpha > S::zero() && self.alpha < S::lit(2.0)) {
            return Err(Error::InvalidAction(format!(
                "alpha must lie in (0, 2), got {}",
                self.alpha
            )));
        }
        if !(self.period > S::zero()) || !self.period.is_finite() {
            return Err(Error::InvalidAction(format!(
                "period must be positive, got {}",
                self.period
            )));
        }
        if self.masses.len() != self.n {
            return Err(Error::InvalidAction(format!(
                "expected {} masses, got {}",
                self.n,
                self.masses.len()
            )));
        }
        if self.masses.iter().any(|m| !(*m > S::zero()) || !m.is_finite()) {
            return Err(Error::InvalidAction("masses must be positive".into()));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> S {
        self.masses.iter().copied().sum()
    }
}

/// A finite group together with its action on loops. Element 0 is the identity.
#[derive(Clone, Debug)]
pub struct GroupAction<S> {
    pub params: SystemParams<S>,
    elements: Vec<GroupElement<S>>,
    generators: Vec<GroupElement<S>>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

/// Generates the group spanned by `generators` and validates it.
pub fn close_group<S: Scalar>(
    params: SystemParams<S>,
    generators: Vec<GroupElement<S>>,
    cap: usize,
) -> Result<GroupAction<S>> {
    params.validate()?;
    let (n, d) = (params.n, params.d);
    for (k, g) in generators.iter().enumerate() {
        if g.rho.rows() != d || g.rho.cols() != d {
            return Err(Error::InvalidAction(format!(
                "generator {k}: space matrix is {}×{}, expected {d}×{d}",
                g.rho.rows(),
                g.rho.cols()
            )));
        }
        if g.sigma.len() != n {
            return Err(Error::InvalidAction(format!(
                "generator {k}: permutation acts on {} indices, expected {n}",
                g.sigma.len()
            )));
        }
        let dev = g.rho.orthogonality_defect();
        if !(dev <= S::lit(INPUT_ORTHOGONALITY_TOL)) {
            return Err(Error::NotOrthogonal {
                generator: k,
                deviation: dev.to_f64_lossy(),
            });
        }
        for i in 0..n {
            let j = g.sigma.apply(i);
            let (mi, mj) = (params.masses[i], params.masses[j]);
            if (mi - mj).abs() > S::lit(1e-12) * mi.max(mj) {
                return Err(Error::MassMismatch {
                    generator: k,
                    from: i + 1,
                    to: j + 1,
                });
            }
        }
    }

    let mut elements = vec![GroupElement::identity(n, d)];
    let mut index: HashMap<(TimeTransform, IndexPermutation), Vec<usize>> = HashMap::new();
    index.insert((elements[0].tau, elements[0].sigma.clone()), vec![0]);
    let lookup = |elements: &[GroupElement<S>],
                  index: &HashMap<(TimeTransform, IndexPermutation), Vec<usize>>,
                  g: &GroupElement<S>| {
        index
            .get(&(g.tau, g.sigma.clone()))
            .and_then(|cands| cands.iter().copied().find(|&c| elements[c].same_as(g)))
    };

    let mut frontier = 0;
    while frontier < elements.len() {
        for gen in &generators {
            let prod = elements[frontier].compose(gen);
            if lookup(&elements, &index, &prod).is_none() {
                if elements.len() >= cap {
                    return Err(Error::CapExceeded { cap });
                }
                let dev = prod.rho.orthogonality_defect();
                if !(dev <= S::lit(PRODUCT_ORTHOGONALITY_TOL)) {
                    return Err(Error::NotOrthogonal {
                        generator: elements.len(),
                        deviation: dev.to_f64_lossy(),
                    });
                }
                index
                    .entry((prod.tau, prod.sigma.clone()))
                    .or_default()
                    .push(elements.len());
                elements.push(prod);
            }
        }
        frontier += 1;
    }

    let order = elements.len();
    let mut table = vec![vec![0usize; order]; order];
    for a in 0..order {
        for b in 0..order {
            let prod = elements[a].compose(&elements[b]);
            table[a][b] = lookup(&elements, &index, &prod).ok_or_else(|| {
                Error::InvalidAction(format!(
                    "product of elements {a} and {b} does not match any element; space matrices are inconsistent with the time/index parts"
                ))
            })?;
        }
    }
    let mut inverses = vec![usize::MAX; order];
    for a in 0..order {
        inverses[a] = (0..order)
            .find(|&b| table[a][b] == 0)
            .ok_or_else(|| Error::InvalidAction(format!("element {a} has no inverse")))?;
    }

    Ok(GroupAction {
        params,
        elements,
        generators,
        table,
        inverses,
    })
}

impl<S: Scalar> GroupAction<S> {
    /// The trivial group acting on the given system.
    pub fn trivial(params: SystemParams<S>) -> Result<Self> {
        close_group(params, Vec::new(), 1)
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn alpha(&self) -> S {
        self.params.alpha
    }

    pub fn period(&self) -> S {
        self.params.period
    }

    pub fn masses(&self) -> &[S] {
        &self.params.masses
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement<S>] {
        &self.elements
    }

    pub fn element(&self, g: usize) -> &GroupElement<S> {
        &self.elements[g]
    }

    pub fn generators(&self) -> &[GroupElement<S>] {
        &self.generators
    }

    /// Index of `a · b`.
    #[inline]
    pub fn product(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    #[inline]
    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// Index of the element matching `g`, if it belongs to the group.
    pub fn find(&self, g: &GroupElement<S>) -> Option<usize> {
        self.elements.iter().position(|e| e.same_as(g))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_members((0..self.order()).collect())
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_members(vec![0])
    }

    /// Acts on a configuration stored as `n` consecutive `d`-vectors:
    /// `(g x)_i = ρ(g) x_{σ(g⁻¹)(i)}`, i.e. `(g x)_{σ(g)(j)} = ρ(g) x_j`.
    pub fn act_on_config(&self, g: usize, x: &[S]) -> Vec<S> {
        let (n, d) = (self.n(), self.d());
        let e = &self.elements[g];
        let mut out = vec![S::zero(); n * d];
        for j in 0..n {
            let i = e.sigma.apply(j);
            e.rho.mul_vec_into(&x[j * d..(j + 1) * d], &mut out[i * d..(i + 1) * d]);
        }
        out
    }

    /// Matrix of `g` on the configuration space `R^{n d}`.
    pub fn config_matrix(&self, g: usize) -> Mat<S> {
        let (n, d) = (self.n(), self.d());
        let e = &self.elements[g];
        let mut m = Mat::zeros(n * d, n * d);
        for j in 0..n {
            let i = e.sigma.apply(j);
            for r in 0..d {
                for c in 0..d {
                    m[(i * d + r, j * d + c)] = e.rho[(r, c)];
                }
            }
        }
        m
    }

    /// Number of distinct time transforms, `|G / ker τ|`.
    pub fn time_quotient_order(&self) -> usize {
        let mut seen: Vec<TimeTransform> = Vec::new();
        for e in &self.elements {
            if !seen.contains(&e.tau) {
                seen.push(e.tau);
            }
        }
        seen.len()
    }

    /// Least sample count for which every time transform permutes the uniform grid.
    pub fn grid_requirement(&self) -> usize {
        crate::time::lcm_all(self.elements.iter().map(|e| e.tau.grid_denominator())) as usize
    }

    /// Stabilizer of the time fraction `f`.
    pub fn time_stabilizer(&self, f: Rational64) -> Subgroup {
        Subgroup::from_members(
            (0..self.order())
                .filter(|&g| self.elements[g].tau.apply(f) == crate::time::frac(f))
                .collect(),
        )
    }

    /// Smallest subgroup containing the listed elements.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Subgroup {
        let mut members = vec![0usize];
        let mut in_set = vec![false; self.order()];
        in_set[0] = true;
        let mut k = 0;
        while k < members.len() {
            let a = members[k];
            for &g in gens {
                let p = self.product(a, g);
                if !in_set[p] {
                    in_set[p] = true;
                    members.push(p);
                }
            }
            k += 1;
        }
        Subgroup::from_members(members)
    }

    /// Normal closure of `k` inside `h`: generated by `x y x⁻¹`, `x ∈ h`, `y ∈ k`.
    pub fn normal_closure(&self, k: &Subgroup, h: &Subgroup) -> Subgroup {
        let mut gens = Vec::new();
        for &x in h.members() {
            for &y in k.members() {
                gens.push(self.product(self.product(x, y), self.inverse(x)));
            }
        }
        gens.sort_unstable();
        gens.dedup();
        self.generated_subgroup(&gens)
    }

    /// Checks that `sub` is closed under products and inverses.
    pub fn is_subgroup(&self, sub: &Subgroup) -> bool {
        sub.contains(0)
            && sub.members().iter().all(|&a| {
                sub.contains(self.inverse(a)) && sub.members().iter().all(|&b| sub.contains(self.product(a, b)))
            })
    }
}

/// A subgroup, represented by the sorted indices of its elements in the parent action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    members: Vec<usize>,
}

impl Subgroup {
    pub fn from_members(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() <= 1
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self {
            members: self.members.iter().copied().filter(|g| other.contains(*g)).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.members.iter().all(|g| other.contains(*g))
    }

    /// Elements of this subgroup satisfying a predicate (the result is a subgroup
    /// whenever the predicate defines one).
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        Self {
            members: self.members.iter().copied().filter(|g| keep(*g)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(num: i64, den: i64) -> TimeTransform {
        TimeTransform::rotation(num, den)
    }

    fn choreo(n: usize) -> GroupAction<f64> {
        let cycle = format!("({})", (1..=n).map(|i| i.to_string()).collect::<Vec<_>>().join(","));
        let g = GroupElement {
            tau: rot(1, n as i64),
            rho: Mat::identity(2),
            sigma: IndexPermutation::parse_cycles(&cycle, n).unwrap(),
        };
        close_group(SystemParams::unit_masses(n, 2, 1.0, 1.0), vec![g], DEFAULT_CAP).unwrap()
    }

    #[test]
    fn closes_cyclic_group() {
        let a = choreo(5);
        assert_eq!(a.order(), 5);
        for g in 0..5 {
            assert_eq!(a.product(g, a.inverse(g)), 0);
        }
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let a = close_group::<f64>(SystemParams::unit_masses(3, 2, 1.0, 1.0), vec![], DEFAULT_CAP).unwrap();
        assert_eq!(a.order(), 1);
        assert!(a.element(0).is_identity());
    }

    #[test]
    fn rejects_irrational_rotation_by_cap() {
        let g = GroupElement {
            tau: TimeTransform::identity(),
            rho: Mat::rotation2(1.0f64),
            sigma: IndexPermutation::identity(2),
        };
        let err = close_group(SystemParams::unit_masses(2, 2, 1.0, 1.0), vec![g], 500).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 500 }));
    }

    #[test]
    fn rejects_non_orthogonal_and_mass_mismatch() {
        let g = GroupElement {
            tau: TimeTransform::identity(),
            rho: Mat::diag(&[1.0, 2.0]),
            sigma: IndexPermutation::identity(2),
        };
        assert!(matches!(
            close_group(SystemParams::unit_masses(2, 2, 1.0, 1.0), vec![g], 10),
            Err(Error::NotOrthogonal { .. })
        ));
        let g = GroupElement {
            tau: rot(1, 2),
            rho: Mat::identity(2),
            sigma: IndexPermutation::parse_cycles("(1,2)", 2).unwrap(),
        };
        let params = SystemParams::new(2, 2, 1.0, 1.0, vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            close_group(params, vec![g], 10),
            Err(Error::MassMismatch { .. })
        ));
    }

    #[test]
    fn config_action_matches_matrix() {
        let a = choreo(3);
        let x: Vec<f64> = (0..6).map(|k| k as f64 * 0.3 - 0.7).collect();
        for g in 0..a.order() {
            let direct = a.act_on_config(g, &x);
            let via = a.config_matrix(g).mul_vec(&x);
            for (u, v) in direct.iter().zip(&via) {
                assert!((u - v).abs() < 1e-15);
            }
            // homomorphism on configurations
            for h in 0..a.order() {
                let lhs = a.act_on_config(a.product(g, h), &x);
                let rhs = a.act_on_config(g, &a.act_on_config(h, &x));
                for (u, v) in lhs.iter().zip(&rhs) {
                    assert!((u - v).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn normal_closure_of_trivial_is_trivial() {
        let a = choreo(4);
        let nc = a.normal_closure(&a.trivial_subgroup(), &a.whole());
        assert!(nc.is_trivial());
        assert!(a.is_subgroup(&a.generated_subgroup(&[2])));
        assert_eq!(a.generated_subgroup(&[2]).order(), 2);
    }
}
