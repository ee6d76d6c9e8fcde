use nalgebra::DMatrix;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symorb::catalog::{catalog_build, CatalogParams, ENTRIES};
use symorb::group::{
    classify_action_type, close_group, fixed_config_space, fundamental_domain, kernel, ActionType, GroupAction,
    GroupElement, Kernel, SystemParams,
};
use symorb::linalg::Mat;
use symorb::perm::IndexPermutation;
use symorb::symmetry::{
    coercivity_test, find_rotating_circle, homogeneous_orbits, index_isotropy, iota_embedding, iota_embedding_alt,
    movable_indices, symmetry_report, transport_witness, witness_defects,
};
use symorb::time::TimeTransform;

fn catalog_actions() -> Vec<(String, GroupAction<f64>)> {
    let mut out: Vec<(String, GroupAction<f64>)> = ENTRIES
        .iter()
        .map(|e| {
            (
                e.name.to_string(),
                catalog_build(e.name, &CatalogParams::default()).unwrap(),
            )
        })
        .collect();
    out.push((
        "eight_dihedral n=5".into(),
        catalog_build("eight_dihedral", &CatalogParams::with_n(5)).unwrap(),
    ));
    out.push((
        "four_body_odd q=5".into(),
        catalog_build("four_body_odd", &CatalogParams::with_q(5)).unwrap(),
    ));
    out.push((
        "nonplanar_choreo k=3".into(),
        catalog_build("nonplanar_choreo", &CatalogParams::with_k(3)).unwrap(),
    ));
    out
}

#[test]
fn group_axioms_on_catalog() {
    for (name, a) in catalog_actions() {
        let g = a.order();
        assert!(a.element(0).is_identity(), "{name}");
        for x in 0..g {
            let inv = a.inverse(x);
            assert_eq!(a.product(x, inv), 0, "{name}");
            assert_eq!(a.product(0, x), x);
            assert!(a.element(x).rho.orthogonality_defect() <= 1e-8, "{name}");
        }
        // Associativity on a spread of triples.
        for x in (0..g).step_by(1 + g / 7) {
            for y in (0..g).step_by(1 + g / 5) {
                for z in 0..g {
                    assert_eq!(a.product(a.product(x, y), z), a.product(x, a.product(y, z)), "{name}");
                }
            }
        }
        for x in 0..g {
            for y in 0..g {
                let c = a.element(x).compose(a.element(y));
                assert_eq!(a.find(&c), Some(a.product(x, y)));
            }
        }
    }
}

#[test]
fn classification_and_fundamental_domain() {
    for (name, a) in catalog_actions() {
        let c = classify_action_type(&a);
        match c.action_type {
            ActionType::Cyclic => assert_eq!(c.isotropy_count, 1, "{name}"),
            ActionType::Brake => assert_eq!(c.isotropy_count, 2, "{name}"),
            ActionType::Dihedral => assert!(c.isotropy_count >= 3, "{name}"),
        }
        let quotient = a.order() / kernel(&a, Kernel::Tau).order();
        let fd = fundamental_domain(&a);
        assert_eq!(fd.length(), Rational64::new(1, quotient as i64), "{name}");
    }
}

#[test]
fn fixed_spaces_are_pointwise_fixed() {
    for (name, a) in catalog_actions() {
        for h in [a.whole(), kernel(&a, Kernel::Tau), a.trivial_subgroup()] {
            let basis = fixed_config_space(&a, &h);
            for b in &basis {
                for &g in h.members() {
                    let gb = a.act_on_config(g, b);
                    let dev = gb.iter().zip(b).fold(0f64, |m, (x, y)| m.max((x - y).abs()));
                    assert!(dev <= 1e-8, "{name}: {dev}");
                }
            }
        }
        assert_eq!(fixed_config_space(&a, &a.trivial_subgroup()).len(), a.d() * (a.n() - 1));
    }
}

/// Dimension of `{x : C_g x = x for the generators, Σ m_i x_i = 0}` from an SVD of
/// the stacked constraints.
fn null_space_dim(a: &GroupAction<f64>) -> usize {
    let w = a.n() * a.d();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for g in 0..a.order() {
        let c = a.config_matrix(g);
        for r in 0..w {
            rows.push((0..w).map(|k| c.row(r)[k] - if r == k { 1.0 } else { 0.0 }).collect());
        }
    }
    for e in 0..a.d() {
        let mut r = vec![0.0; w];
        for i in 0..a.n() {
            r[i * a.d() + e] = a.masses()[i];
        }
        rows.push(r);
    }
    let m = DMatrix::from_fn(rows.len(), w, |i, j| rows[i][j]);
    let sv = m.svd(false, false).singular_values;
    w - sv.iter().filter(|s| **s > 1e-9).count()
}

fn signed_permutation(d: usize, perm: &[usize], signs: &[bool]) -> Mat<f64> {
    Mat::from_fn(d, d, |r, c| {
        if perm[c] == r {
            if signs[c] {
                -1.0
            } else {
                1.0
            }
        } else {
            0.0
        }
    })
}

prop_compose! {
    fn generator(n: usize, d: usize)(
        reflect in any::<bool>(),
        num in 0i64..6,
        den in 1i64..5,
        perm in Just((0..d).collect::<Vec<_>>()).prop_shuffle(),
        signs in proptest::collection::vec(any::<bool>(), d),
        sigma in Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
    ) -> GroupElement<f64> {
        GroupElement {
            tau: if reflect { TimeTransform::reflection(num, den) } else { TimeTransform::rotation(num, den) },
            rho: signed_permutation(d, &perm, &signs),
            sigma: IndexPermutation::from_images(sigma).unwrap(),
        }
    }
}

fn random_action() -> impl Strategy<Value = GroupAction<f64>> {
    (2usize..=4, 2usize..=3)
        .prop_flat_map(|(n, d)| (Just(n), Just(d), proptest::collection::vec(generator(n, d), 0..3)))
        .prop_filter_map("group too large", |(n, d, gens)| {
            close_group(SystemParams::unit_masses(n, d, 1.0, 1.0), gens, 2000).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coercivity_matches_null_space_oracle(a in random_action()) {
        let dim = fixed_config_space(&a, &a.whole()).len();
        prop_assert_eq!(dim, null_space_dim(&a));
        prop_assert_eq!(coercivity_test(&a), dim == 0);
    }

    #[test]
    fn witnesses_are_valid_and_transport(a in random_action(), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = a.whole();
        for i in 0..a.n() {
            if let Some(w) = find_rotating_circle(&a, &h, i, &mut rng) {
                let (leak, det, fix) = witness_defects(&a, &w);
                prop_assert!(leak <= 1e-8 && det <= 1e-8 && fix <= 1e-8);
                for &g in h.members() {
                    let t = transport_witness(&a, &w, g);
                    let (leak, det, fix) = witness_defects(&a, &t);
                    prop_assert!(leak <= 1e-8 && det <= 1e-8 && fix <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn iota_embedding_is_fixed_and_choice_free(a in random_action(), p in proptest::collection::vec(-1.0f64..1.0, 3)) {
        let h = a.whole();
        let d = a.d();
        for orbit in homogeneous_orbits(&a, &h) {
            let i = orbit[0];
            // Project p onto the fixed space of the isotropy so the embedding is defined.
            let hi = index_isotropy(&a, &h, i);
            let mut q = vec![0.0; d];
            for &g in hi.members() {
                let img = a.element(g).rho.mul_vec(&p[..d]);
                for (x, y) in q.iter_mut().zip(&img) {
                    *x += y / hi.order() as f64;
                }
            }
            let x = iota_embedding(&a, &h, &orbit, i, &q).unwrap();
            let y = iota_embedding_alt(&a, &h, i, &q);
            prop_assert!(x.iter().zip(&y).all(|(u, v)| (u - v).abs() <= 1e-10));
            for &g in h.members() {
                let gx = a.act_on_config(g, &x);
                prop_assert!(gx.iter().zip(&x).all(|(u, v)| (u - v).abs() <= 1e-8));
            }
        }
    }
}

#[test]
fn rcp_passes_to_subgroups() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, a) in catalog_actions() {
        let report = symmetry_report(&a, 11);
        let entries = symorb::group::time_isotropy_subgroups(&a);
        for (e, r) in entries.iter().filter(|e| e.maximal).zip(&report.maximal_isotropy) {
            if !r.rcp {
                continue;
            }
            let mut subs = vec![a.trivial_subgroup()];
            for &g in e.subgroup.members() {
                subs.push(a.generated_subgroup(&[g]));
            }
            for k in subs {
                assert!(k.is_subset_of(&e.subgroup));
                let mv = movable_indices(&a, &k, &mut rng);
                assert!(
                    mv.len() + 1 >= a.n(),
                    "{name}: subgroup {:?} movable {mv:?}",
                    k.members()
                );
            }
        }
    }
}

#[test]
fn witness_transport_on_catalog() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, a) in catalog_actions() {
        for e in symorb::group::time_isotropy_subgroups(&a).iter().filter(|e| e.maximal) {
            for i in 0..a.n() {
                let Some(w) = find_rotating_circle(&a, &e.subgroup, i, &mut rng) else {
                    continue;
                };
                for &g in e.subgroup.members() {
                    let t = transport_witness(&a, &w, g);
                    let (leak, det, fix) = witness_defects(&a, &t);
                    assert!(leak <= 1e-8 && det <= 1e-8 && fix <= 1e-8, "{name}");
                }
            }
        }
    }
}
