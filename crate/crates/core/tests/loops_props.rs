use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symorb::catalog::{catalog_build, CatalogParams};
use symorb::group::{GroupAction, SystemParams};
use symorb::loops::{
    act_on_loop, action_value, partial_quantities, project_equivariant, ActionFunctional, EquivariantLoop,
};
use symorb::minimize::{seed_loop, MinimizeConfig};
use symorb::trajectory::{read_trajectory, write_trajectory};

fn action(name: &str) -> GroupAction<f64> {
    let p = if name == "hiphop" {
        CatalogParams::with_n(4)
    } else {
        CatalogParams::default()
    };
    catalog_build(name, &p).unwrap()
}

fn random_loop(a: &GroupAction<f64>, m: usize, seed: u64) -> EquivariantLoop<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = (0..m * a.n() * a.d()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    EquivariantLoop::for_action(a, m, pos).unwrap()
}

fn equivariant_loop(a: &GroupAction<f64>, m: usize, seed: u64) -> EquivariantLoop<f64> {
    seed_loop(
        a,
        &MinimizeConfig {
            samples: m,
            seed,
            ..Default::default()
        },
    )
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn gradient_matches_finite_differences() {
    let names = ["choreography", "eight_dihedral", "hiphop", "nonplanar_choreo"];
    let mut worst = 0f64;
    for k in 0..20u64 {
        let a = action(names[k as usize % names.len()]);
        let m = symorb::loops::compatible_samples(&a, 48);
        let x = equivariant_loop(&a, m, k);
        let f = ActionFunctional::for_loop(&x);
        let (_, g) = f.value_and_gradient(x.positions()).unwrap();
        let v = project_equivariant(&random_loop(&a, m, 100 + k), &a).unwrap();
        let h = 1e-5;
        let plus = x.add_scaled(h, &v);
        let minus = x.add_scaled(-h, &v);
        let fd = (f.value(plus.positions()).unwrap() - f.value(minus.positions()).unwrap()) / (2.0 * h);
        let an: f64 = g.iter().zip(v.positions()).map(|(a, b)| a * b).sum();
        worst = worst.max(rel(fd, an));
    }
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn projection_is_idempotent_orthogonal_and_h1_contracting() {
    for (k, name) in ["choreography", "eight_dihedral", "hiphop", "two_triangles_spatial"]
        .iter()
        .enumerate()
    {
        let a = action(name);
        let m = symorb::loops::compatible_samples(&a, 36);
        let x = random_loop(&a, m, k as u64);
        let y = random_loop(&a, m, 50 + k as u64);
        let px = project_equivariant(&x, &a).unwrap();
        let ppx = project_equivariant(&px, &a).unwrap();
        assert!(ppx.max_abs_diff(&px) <= 1e-13);
        let py = project_equivariant(&y, &a).unwrap();
        let resid = x.add_scaled(-1.0, &px);
        assert!(resid.dot(&py).abs() <= 1e-12 * (x.dot(&x) * py.dot(&py)).sqrt());
        assert!(px.h1_norm_squared() <= x.h1_norm_squared() * (1.0 + 1e-14));
    }
}

#[test]
fn action_is_group_invariant() {
    for name in ["eight_dihedral", "hiphop", "four_body_odd", "two_triangles_planar"] {
        let a = action(name);
        let m = symorb::loops::compatible_samples(&a, 48);
        let x = random_loop(&a, m, 7);
        let base = action_value(&x, None).unwrap();
        for g in 0..a.order() {
            let gx = act_on_loop(&a, g, &x).unwrap();
            assert!(
                (action_value(&gx, None).unwrap() - base).abs() <= 1e-10 * base.max(1.0),
                "{name} {g}"
            );
        }
    }
}

#[test]
fn gradient_commutes_with_projection() {
    for name in ["choreography", "eight_dihedral", "hiphop"] {
        let a = action(name);
        let m = symorb::loops::compatible_samples(&a, 48);
        let x = equivariant_loop(&a, m, 3);
        let f = ActionFunctional::for_loop(&x);
        let (_, g) = f.value_and_gradient(x.positions()).unwrap();
        let gl = EquivariantLoop::new(x.params.clone(), m, g.clone()).unwrap();
        let pg = project_equivariant(&gl, &a).unwrap();
        let diff = pg
            .positions()
            .iter()
            .zip(&g)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-9, "{name}: {diff}");
    }
}

#[test]
fn trapezoid_self_convergence_on_smooth_loops() {
    let p = SystemParams::unit_masses(3, 2, 1.0, 1.0);
    let f = |t: f64, i: usize| {
        let ph = 2.0 * std::f64::consts::PI * (t + i as f64 / 3.0);
        vec![ph.cos() + 0.2 * (2.0 * ph).sin(), ph.sin() - 0.1 * (3.0 * ph).cos()]
    };
    let a1 = action_value(&EquivariantLoop::from_fn(p.clone(), 96, f).unwrap(), None).unwrap();
    let a2 = action_value(&EquivariantLoop::from_fn(p, 192, f).unwrap(), None).unwrap();
    assert!(rel(a1, a2) <= 1e-10, "{a1} {a2}");
}

#[test]
fn partial_quantity_partition() {
    let a = action("hiphop");
    let x = equivariant_loop(&a, 64, 2);
    let f = ActionFunctional::for_loop(&x);
    let (_, k_total, u_total) = f.energy(x.positions()).unwrap();
    for k in [vec![0, 1], vec![0, 2, 3], vec![1]] {
        let comp: Vec<usize> = (0..4).filter(|i| !k.contains(i)).collect();
        let pk = partial_quantities(&x, &k).unwrap();
        let pc = partial_quantities(&x, &comp).unwrap();
        for j in 0..64 {
            assert!((pk.kinetic[j] + pc.kinetic[j] - k_total[j]).abs() <= 1e-12 * k_total[j]);
            let u = pk.potential[j] + pc.potential[j] + pk.cross_potential[j];
            assert!((u - u_total[j]).abs() <= 1e-12 * u_total[j]);
            assert_eq!(pk.cross_potential[j], pc.cross_potential[j]);
        }
    }
    let all = partial_quantities(&x, &[0, 1, 2, 3]).unwrap();
    let single = partial_quantities(&x, &[2]).unwrap();
    for j in 0..64 {
        assert_eq!(all.cross_potential[j], 0.0);
        assert_eq!(single.potential[j], 0.0);
        assert!(single.inertia[j].abs() <= 1e-30);
    }
}

#[test]
fn trajectory_round_trip_is_exact() {
    let a = action("eight_dihedral");
    let x = equivariant_loop(&a, 72, 4);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.csv");
    write_trajectory(&p, &x, None).unwrap();
    let raw = read_trajectory(&p).unwrap();
    assert_eq!(raw.positions, x.positions());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projected_loops_are_equivariant(seed in any::<u64>(), which in 0usize..4) {
        let a = action(["choreography", "eight_dihedral", "hiphop", "nonplanar_choreo_p"][which]);
        let m = symorb::loops::compatible_samples(&a, 24);
        let x = project_equivariant(&random_loop(&a, m, seed), &a).unwrap();
        prop_assert!(symorb::loops::equivariance_residual(&x, &a).unwrap() <= 1e-12);
        prop_assert!(x.max_center_of_mass() <= 1e-13);
    }

    #[test]
    fn action_scales_homogeneously(seed in any::<u64>(), lambda in 0.3f64..3.0) {
        // A(λx) on a loop of period T: kinetic part ∝ λ², potential ∝ λ^{−α}.
        let a = action("choreography");
        let x = random_loop(&a, 30, seed);
        let f = ActionFunctional::for_loop(&x);
        let p = f.parts(x.positions()).unwrap();
        let y = x.scaled(lambda);
        let q = f.parts(y.positions()).unwrap();
        prop_assert!(rel(q.kinetic, lambda * lambda * p.kinetic) <= 1e-12);
        prop_assert!(rel(q.potential, lambda.powf(-1.0) * p.potential) <= 1e-12);
    }
}
