//! Built-in symmetry groups, their expected properties and reference loops.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ActionConfig, ActionType, GeneratorSpec, GroupAction, RhoSpec, SystemParams};
use crate::loops::EquivariantLoop;
use crate::time::{TimeKind, TimeSpec};
use crate::Scalar;

/// Optional parameters of a catalog entry; unset fields take the entry's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CatalogParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl CatalogParams {
    pub fn with_n(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::default()
        }
    }

    pub fn with_k(k: usize) -> Self {
        Self {
            k: Some(k),
            ..Self::default()
        }
    }

    pub fn with_q(q: usize) -> Self {
        Self {
            q: Some(q),
            ..Self::default()
        }
    }

    fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(1.0)
    }
}

/// Properties of an entry's action as stated for the example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedFacts {
    pub order: usize,
    pub coercive: bool,
    pub action_type: ActionType,
    /// Rotating circle property of the maximal time-isotropy subgroups, where stated.
    pub max_isotropy_rcp: Option<bool>,
    /// Rotating circle property of `ker τ`, where stated.
    pub ker_tau_rcp: Option<bool>,
    /// Whether every maximal isotropy subgroup has the property or acts trivially
    /// on the indices, where stated.
    pub collisionless_criterion: Option<bool>,
    /// Set when excluding boundary collisions needs level estimates not reproduced here.
    pub boundary_collisions_unresolved: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameter names with their defaults and allowed ranges.
    pub parameters: &'static str,
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "choreography",
        summary: "Z_n: cyclic shift of the bodies by a rotation of time, trivial on space",
        parameters: "n ≥ 2 (default 3), d ≥ 2 (default 2)",
    },
    CatalogEntry {
        name: "eight_dihedral",
        summary: "D_2n figure-eight symmetry for odd n",
        parameters: "n odd ≥ 3 (default 3)",
    },
    CatalogEntry {
        name: "eight_cyclic",
        summary: "C_2n choreography with a space reflection at half period, odd n",
        parameters: "n odd ≥ 3 (default 3)",
    },
    CatalogEntry {
        name: "four_body_odd",
        summary: "D_4q × C_2 four-body action, odd q",
        parameters: "q odd ≥ 3 (default 3)",
    },
    CatalogEntry {
        name: "four_body_even",
        summary: "D_2q × C_2 four-body action, even q",
        parameters: "q even ≥ 4 (default 4)",
    },
    CatalogEntry {
        name: "hiphop_z2",
        summary: "Z_2 acting antipodally on space and on time, trivially on the bodies",
        parameters: "n ≥ 2 (default 3)",
    },
    CatalogEntry {
        name: "hiphop",
        summary: "C_n × C_2 generalized hip-hop in space, even n; g_1 rotates by 2π/n and flips z",
        parameters: "n even ≥ 4 (default 4)",
    },
    CatalogEntry {
        name: "hiphop_printed",
        summary: "as hiphop but with g_1 a plain rotation about z; every equivariant loop is planar",
        parameters: "n even ≥ 4 (default 4)",
    },
    CatalogEntry {
        name: "two_triangles_planar",
        summary: "D_6 × C_3 on six bodies in the plane",
        parameters: "none",
    },
    CatalogEntry {
        name: "two_triangles_spatial",
        summary: "D_6 × C_3 × C_2 on six bodies in space",
        parameters: "none",
    },
    CatalogEntry {
        name: "nonplanar_choreo",
        summary: "C_6k three-body action in space, period 2π",
        parameters: "k ≥ 2 (default 2)",
    },
    CatalogEntry {
        name: "nonplanar_choreo_p",
        summary: "C_6k three-body action with space rotation pπ/(3k), period 2π",
        parameters: "k ≥ 2 (default 2), p ≠ 0 (default 1)",
    },
];

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}

fn rot(num: i64, den: i64) -> TimeSpec {
    TimeSpec {
        kind: TimeKind::Rotation,
        num,
        den,
    }
}

fn refl(num: i64, den: i64) -> TimeSpec {
    TimeSpec {
        kind: TimeKind::Reflection,
        num,
        den,
    }
}

fn mat(rows: Vec<Vec<f64>>) -> RhoSpec {
    RhoSpec::Nested(rows)
}

fn identity(d: usize) -> RhoSpec {
    mat((0..d)
        .map(|r| (0..d).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect())
}

fn diag(v: &[f64]) -> RhoSpec {
    let d = v.len();
    mat((0..d)
        .map(|r| (0..d).map(|c| if r == c { v[r] } else { 0.0 }).collect())
        .collect())
}

fn rot2(angle: f64) -> RhoSpec {
    let (s, c) = angle.sin_cos();
    mat(vec![vec![c, -s], vec![s, c]])
}

/// Rotation about the third axis with a given action `z_sign` on that axis.
fn rot_z(angle: f64, z_sign: f64) -> RhoSpec {
    let (s, c) = angle.sin_cos();
    mat(vec![vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, z_sign]])
}

fn gen(tau: TimeSpec, rho: RhoSpec, sigma: impl Into<String>) -> GeneratorSpec {
    GeneratorSpec {
        tau,
        rho,
        sigma: sigma.into(),
    }
}

fn full_cycle(n: usize) -> String {
    format!("({})", (1..=n).map(|i| i.to_string()).collect::<Vec<_>>().join(","))
}

fn out_of_range(msg: impl Into<String>) -> Error {
    Error::ParameterOutOfRange(msg.into())
}

fn config(name: &str, n: usize, d: usize, alpha: f64, period: f64, generators: Vec<GeneratorSpec>) -> ActionConfig {
    ActionConfig {
        name: Some(name.to_string()),
        n,
        d,
        alpha,
        period,
        masses: vec![1.0; n],
        generators,
    }
}

/// Generator description of a catalog entry, with unit masses.
pub fn catalog_config(name: &str, params: &CatalogParams) -> Result<ActionConfig> {
    let alpha = params.alpha();
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(out_of_range(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    let odd_n = |default: usize| -> Result<usize> {
        let n = params.n.unwrap_or(default);
        if n < 3 || n % 2 == 0 {
            return Err(out_of_range(format!("{name}: n must be odd and ≥ 3, got {n}")));
        }
        Ok(n)
    };
    let cfg = match name {
        "choreography" => {
            let n = params.n.unwrap_or(3);
            let d = params.d.unwrap_or(2);
            if n < 2 || d < 2 {
                return Err(out_of_range("choreography: need n ≥ 2 and d ≥ 2"));
            }
            config(
                name,
                n,
                d,
                alpha,
                1.0,
                vec![gen(rot(1, n as i64), identity(d), full_cycle(n))],
            )
        }
        "eight_dihedral" => {
            let n = odd_n(3)?;
            // g_1 reverses 1..n−1 pairwise and fixes body n.
            let pairs: String = (1..=(n - 1) / 2).map(|i| format!("({},{})", i, n - i)).collect();
            config(
                name,
                n,
                2,
                alpha,
                1.0,
                vec![
                    gen(refl(1, 8), diag(&[-1.0, -1.0]), pairs),
                    gen(rot(1, n as i64), identity(2), full_cycle(n)),
                ],
            )
        }
        "eight_cyclic" => {
            let n = odd_n(3)?;
            let ni = n as i64;
            // τ(g_1 g_2) is the rotation by 1/(2n) of the period.
            config(
                name,
                n,
                2,
                alpha,
                1.0,
                vec![
                    gen(rot(1, 2), diag(&[-1.0, 1.0]), "()"),
                    gen(rot(ni + 1, 2 * ni), identity(2), full_cycle(n)),
                ],
            )
        }
        "four_body_odd" | "four_body_even" => {
            let odd = name == "four_body_odd";
            let q = params.q.unwrap_or(if odd { 3 } else { 4 });
            if odd && (q < 3 || q % 2 == 0) {
                return Err(out_of_range(format!("four_body_odd: q must be odd and ≥ 3, got {q}")));
            }
            if !odd && (q < 4 || q % 2 == 1) {
                return Err(out_of_range(format!("four_body_even: q must be even and ≥ 4, got {q}")));
            }
            let den = if odd { 2 * q } else { q } as i64;
            config(
                name,
                4,
                2,
                alpha,
                1.0,
                vec![
                    gen(refl(0, 1), diag(&[1.0, -1.0]), "(1,2)(3,4)"),
                    gen(rot(1, den), rot2(2.0 * PI / den as f64), "(1,3)(2,4)"),
                    gen(rot(0, 1), diag(&[-1.0, -1.0]), "(1,2)(3,4)"),
                ],
            )
        }
        "hiphop_z2" => {
            let n = params.n.unwrap_or(3);
            if n < 2 {
                return Err(out_of_range("hiphop_z2: need n ≥ 2"));
            }
            config(
                name,
                n,
                3,
                alpha,
                1.0,
                vec![gen(rot(1, 2), diag(&[-1.0, -1.0, -1.0]), "()")],
            )
        }
        "hiphop" | "hiphop_printed" => {
            let n = params.n.unwrap_or(4);
            if n < 4 || n % 2 == 1 {
                return Err(out_of_range(format!("{name}: n must be even and ≥ 4, got {n}")));
            }
            let z_sign = if name == "hiphop" { -1.0 } else { 1.0 };
            config(
                name,
                n,
                3,
                alpha,
                1.0,
                vec![
                    gen(rot(0, 1), rot_z(2.0 * PI / n as f64, z_sign), full_cycle(n)),
                    gen(rot(1, 2), diag(&[-1.0, -1.0, -1.0]), "()"),
                ],
            )
        }
        "two_triangles_planar" => config(
            name,
            6,
            2,
            alpha,
            1.0,
            vec![
                gen(rot(1, 3), identity(2), "(1,3,2)(4,5,6)"),
                gen(refl(1, 8), diag(&[-1.0, -1.0]), "(1,4)(2,5)(3,6)"),
                gen(rot(0, 1), rot2(2.0 * PI / 3.0), "(1,2,3)(4,5,6)"),
            ],
        ),
        "two_triangles_spatial" => config(
            name,
            6,
            3,
            alpha,
            1.0,
            vec![
                gen(rot(1, 3), identity(3), "(1,3,2)(4,5,6)"),
                gen(refl(1, 8), diag(&[-1.0, -1.0, 1.0]), "(1,4)(2,5)(3,6)"),
                gen(rot(0, 1), rot_z(2.0 * PI / 3.0, 1.0), "(1,2,3)(4,5,6)"),
                gen(rot(1, 2), diag(&[1.0, 1.0, -1.0]), "()"),
            ],
        ),
        "nonplanar_choreo" | "nonplanar_choreo_p" => {
            let k = params.k.unwrap_or(2);
            if k < 2 {
                return Err(out_of_range(format!("{name}: k must be ≥ 2, got {k}")));
            }
            let p = if name == "nonplanar_choreo" {
                if params.p.is_some_and(|p| p != 3) {
                    return Err(out_of_range("nonplanar_choreo has p = 3; use nonplanar_choreo_p"));
                }
                3
            } else {
                params.p.unwrap_or(1)
            };
            if p == 0 {
                return Err(out_of_range("p must be non-zero"));
            }
            let angle = p as f64 * PI / (3.0 * k as f64);
            config(
                name,
                3,
                3,
                alpha,
                2.0 * PI,
                vec![gen(rot(1, 6 * k as i64), rot_z(angle, -1.0), "(1,2,3)")],
            )
        }
        _ => return Err(Error::UnknownCatalogEntry(name.to_string())),
    };
    Ok(cfg)
}

/// Builds the group action of a catalog entry.
pub fn catalog_build<S: Scalar>(name: &str, params: &CatalogParams) -> Result<GroupAction<S>> {
    catalog_config(name, params)?.build()
}

/// Properties recorded for the example, for the given parameters.
pub fn expected_facts(name: &str, params: &CatalogParams) -> Result<ExpectedFacts> {
    let cfg = catalog_config(name, params)?;
    let n = cfg.n;
    let base = |order, action_type| ExpectedFacts {
        order,
        coercive: true,
        action_type,
        max_isotropy_rcp: None,
        ker_tau_rcp: None,
        collisionless_criterion: None,
        boundary_collisions_unresolved: false,
    };
    let facts = match name {
        // Cyclic type with trivial ker τ: the trivial group has the property.
        "choreography" => ExpectedFacts {
            max_isotropy_rcp: Some(true),
            ker_tau_rcp: Some(true),
            collisionless_criterion: Some(true),
            ..base(n, ActionType::Cyclic)
        },
        "eight_dihedral" => ExpectedFacts {
            max_isotropy_rcp: Some(true),
            ker_tau_rcp: Some(true),
            collisionless_criterion: Some(true),
            ..base(2 * n, ActionType::Dihedral)
        },
        "eight_cyclic" => ExpectedFacts {
            ker_tau_rcp: Some(true),
            collisionless_criterion: Some(true),
            ..base(2 * n, ActionType::Cyclic)
        },
        "four_body_odd" | "four_body_even" => {
            let q = params.q.unwrap_or(if name == "four_body_odd" { 3 } else { 4 });
            let order = if name == "four_body_odd" { 8 * q } else { 4 * q };
            ExpectedFacts {
                max_isotropy_rcp: Some(false),
                ker_tau_rcp: Some(true),
                collisionless_criterion: Some(false),
                boundary_collisions_unresolved: true,
                ..base(order, ActionType::Dihedral)
            }
        }
        "hiphop_z2" => ExpectedFacts {
            collisionless_criterion: Some(true),
            ..base(2, ActionType::Cyclic)
        },
        "hiphop" | "hiphop_printed" => ExpectedFacts {
            ker_tau_rcp: Some(true),
            ..base(2 * n, ActionType::Cyclic)
        },
        "two_triangles_planar" => ExpectedFacts {
            max_isotropy_rcp: Some(true),
            collisionless_criterion: Some(true),
            ..base(18, ActionType::Dihedral)
        },
        "two_triangles_spatial" => ExpectedFacts {
            collisionless_criterion: Some(true),
            ..base(36, ActionType::Dihedral)
        },
        "nonplanar_choreo" => {
            let k = params.k.unwrap_or(2);
            ExpectedFacts {
                collisionless_criterion: Some(true),
                ..base(6 * k, ActionType::Cyclic)
            }
        }
        "nonplanar_choreo_p" => {
            let k = params.k.unwrap_or(2) as i64;
            let p = params.p.unwrap_or(1);
            // ρ(c)³ fixes a horizontal vector iff p ≡ 0 (mod 2k); the resulting
            // triangle is centered unless its vertices coincide.
            let coercive = !(p % (2 * k) == 0 && (p / (2 * k)) % 3 != 0);
            ExpectedFacts {
                coercive,
                ..base(6 * k as usize, ActionType::Cyclic)
            }
        }
        _ => return Err(Error::UnknownCatalogEntry(name.to_string())),
    };
    Ok(facts)
}

/// Angular velocity `p − 2k` of the rotating equilateral triangle for the
/// three-body spatial actions (`p = 3` for the non-planar choreography).
pub fn lagrange_angular_velocity(k: usize, p: i64) -> i64 {
    p - 2 * k as i64
}

/// Radius at which an equilateral triangle of unit masses rotating at angular
/// velocity `ω` is a relative equilibrium: `R^{α+2} = α 3^{−α/2} / ω²`.
pub fn lagrange_radius(alpha: f64, omega: f64) -> f64 {
    (alpha * 3f64.powf(-alpha / 2.0) / (omega * omega)).powf(1.0 / (2.0 + alpha))
}

/// Radius `(α 3^{−α/2} / (2ω²))^{1/(2+α)}` as printed with the example; this
/// triangle is *not* a solution (see [`lagrange_radius`]).
pub fn lagrange_radius_printed(alpha: f64, omega: f64) -> f64 {
    (alpha * 3f64.powf(-alpha / 2.0) / (2.0 * omega * omega)).powf(1.0 / (2.0 + alpha))
}

fn rotating_triangle<S: Scalar>(
    k: usize,
    p: i64,
    alpha: f64,
    samples: usize,
    radius: f64,
) -> Result<EquivariantLoop<S>> {
    let omega = lagrange_angular_velocity(k, p) as f64;
    let action: GroupAction<S> = catalog_build(
        "nonplanar_choreo_p",
        &CatalogParams {
            k: Some(k),
            p: Some(p),
            alpha: Some(alpha),
            ..CatalogParams::default()
        },
    )?;
    crate::loops::check_grid(&action, samples)?;
    let params = SystemParams::unit_masses(3, 3, S::lit(alpha), S::lit(2.0 * PI));
    // Body i+1 leads body i by a third of a turn.
    EquivariantLoop::from_fn(params, samples, |t, i| {
        let th = omega * t.to_f64_lossy() + 2.0 * PI * i as f64 / 3.0;
        vec![S::lit(radius * th.cos()), S::lit(radius * th.sin()), S::zero()]
    })
}

fn check_lagrange_args(k: usize, alpha: f64, omega: i64) -> Result<()> {
    if k < 2 {
        return Err(out_of_range(format!("k must be ≥ 2, got {k}")));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(out_of_range(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    if omega == 0 {
        return Err(out_of_range(
            "p = 2k: the triangle does not rotate, no relative equilibrium",
        ));
    }
    Ok(())
}

/// The rotating Lagrange triangle in `Λ^G` for the non-planar choreography
/// action (`T = 2π`), at the relative-equilibrium radius.
pub fn lagrange_reference<S: Scalar>(k: usize, alpha: f64, samples: usize) -> Result<EquivariantLoop<S>> {
    lagrange_reference_p(k, 3, alpha, samples)
}

/// As [`lagrange_reference`], for the action with space rotation `pπ/(3k)`.
pub fn lagrange_reference_p<S: Scalar>(k: usize, p: i64, alpha: f64, samples: usize) -> Result<EquivariantLoop<S>> {
    let omega = lagrange_angular_velocity(k, p);
    check_lagrange_args(k, alpha, omega)?;
    rotating_triangle(k, p, alpha, samples, lagrange_radius(alpha, omega as f64))
}

/// The same triangle at the printed radius, which differs by a factor `2^{−1/(2+α)}`.
pub fn lagrange_reference_printed_radius<S: Scalar>(
    k: usize,
    alpha: f64,
    samples: usize,
) -> Result<EquivariantLoop<S>> {
    let omega = lagrange_angular_velocity(k, 3);
    check_lagrange_args(k, alpha, omega)?;
    rotating_triangle(k, 3, alpha, samples, lagrange_radius_printed(alpha, omega as f64))
}

/// Vertical variation `v_i = (0, 0, φ(c^{s_i} t))` with `φ(t) = sin(k t)` and
/// `c t = t + 2π/(6k)`; the shifts are `s = (0, 2, −2)`, which is the assignment
/// equivariant under `ρ(c) v_{σ(c)⁻¹(i)}(t) = v_i(c t)`.
pub fn variation_direction<S: Scalar>(k: usize, samples: usize) -> Result<EquivariantLoop<S>> {
    if k < 2 {
        return Err(out_of_range(format!("k must be ≥ 2, got {k}")));
    }
    let params = SystemParams::unit_masses(3, 3, S::lit(1.0), S::lit(2.0 * PI));
    let step = 2.0 * PI / (6.0 * k as f64);
    let shifts = [0.0, 2.0, -2.0];
    EquivariantLoop::from_fn(params, samples, |t, i| {
        let s = t.to_f64_lossy() + shifts[i] * step;
        vec![S::zero(), S::zero(), S::lit((k as f64 * s).sin())]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{classify_action_type, kernel, Kernel};
    use crate::loops::{equivariance_residual, newton_residual};

    #[test]
    fn every_entry_builds_with_expected_order_and_type() {
        for e in ENTRIES {
            let p = CatalogParams::default();
            let a: GroupAction<f64> = catalog_build(e.name, &p).unwrap();
            let f = expected_facts(e.name, &p).unwrap();
            assert_eq!(a.order(), f.order, "{}", e.name);
            assert_eq!(classify_action_type(&a).action_type, f.action_type, "{}", e.name);
        }
    }

    #[test]
    fn eight_generators() {
        let a: GroupAction<f64> = catalog_build("eight_dihedral", &CatalogParams::with_n(3)).unwrap();
        assert_eq!(a.generators()[0].sigma.to_string(), "(1,2)");
        assert_eq!(a.generators()[1].sigma.to_string(), "(1,2,3)");
        let a5: GroupAction<f64> = catalog_build("eight_dihedral", &CatalogParams::with_n(5)).unwrap();
        assert_eq!(a5.generators()[0].sigma.to_string(), "(1,4)(2,3)");
        assert_eq!(a5.order(), 10);
    }

    #[test]
    fn parameter_ranges() {
        assert!(catalog_config("eight_dihedral", &CatalogParams::with_n(4)).is_err());
        assert!(catalog_config("four_body_odd", &CatalogParams::with_q(4)).is_err());
        assert!(catalog_config("four_body_even", &CatalogParams::with_q(3)).is_err());
        assert!(catalog_config("hiphop", &CatalogParams::with_n(5)).is_err());
        assert!(catalog_config("nonplanar_choreo", &CatalogParams::with_k(1)).is_err());
        assert!(matches!(
            catalog_config("nope", &CatalogParams::default()),
            Err(Error::UnknownCatalogEntry(_))
        ));
    }

    #[test]
    fn four_body_kernel() {
        let a: GroupAction<f64> = catalog_build("four_body_odd", &CatalogParams::default()).unwrap();
        assert_eq!(kernel(&a, Kernel::Tau).order(), 2);
    }

    #[test]
    fn lagrange_triangle_is_equivariant_solution() {
        for (k, alpha) in [(2, 1.0), (3, 1.5)] {
            let lp: EquivariantLoop<f64> = lagrange_reference(k, alpha, 144).unwrap();
            let a: GroupAction<f64> = catalog_build(
                "nonplanar_choreo",
                &CatalogParams {
                    k: Some(k),
                    alpha: Some(alpha),
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(equivariance_residual(&lp, &a).unwrap() < 1e-12);
            assert!(newton_residual(&lp).unwrap() < 1e-10);
        }
        let bad: EquivariantLoop<f64> = lagrange_reference_printed_radius(3, 1.0, 144).unwrap();
        assert!(newton_residual(&bad).unwrap() > 0.1);
    }

    #[test]
    fn variation_is_equivariant_and_antiperiodic() {
        for k in [2, 3, 4] {
            let v: EquivariantLoop<f64> = variation_direction(k, 24 * k).unwrap();
            let a: GroupAction<f64> = catalog_build("nonplanar_choreo", &CatalogParams::with_k(k)).unwrap();
            assert!(equivariance_residual(&v, &a).unwrap() < 1e-12);
            // φ(c³ t) = −φ(t): a shift by 3 of the 6k steps.
            let m = v.samples();
            let shift = m / (2 * k);
            for j in 0..m {
                let a1 = v.body((j + shift) % m, 0)[2];
                assert!((a1 + v.body(j, 0)[2]).abs() < 1e-12);
            }
        }
    }
}
