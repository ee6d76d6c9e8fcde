//! Acceptance checks. Each check prints one `PASS`/`FAIL` line; the process
//! exits non-zero if any check fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symorb::averaging::{
    delta_action_expansion, eval_s_quadrature, eval_stilde_series, gamma_profile, negativity_bound, stilde_series,
    EjectionFixture,
};
use symorb::catalog::{catalog_build, expected_facts, lagrange_reference, variation_direction, CatalogParams, ENTRIES};
use symorb::group::{GroupAction, SystemParams};
use symorb::loops::{
    compatible_samples, newton_residual, partial_quantities, project_equivariant, ActionFunctional, EquivariantLoop,
};
use symorb::minimize::{hessian_quadratic_form, minimize, seed_loop, MinimizeConfig};
use symorb::symmetry::symmetry_report;
use symorb::MinimizeResultF64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).abs();
    d <= tol || d <= tol * a.abs().max(b.abs())
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.2} s of {} s", e.as_secs_f64(), limit.as_secs()))
}

fn negativity_dual_route() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 1.5] {
        match eval_stilde_series(alpha, 100_000) {
            Ok(r) => {
                let ok =
                    r.value_series < 0.0 && r.value_quadrature < 0.0 && close(r.value_series, r.value_quadrature, 1e-6);
                pass &= ok;
                parts.push(format!(
                    "α={alpha}: series {:.12} quad {:.12}",
                    r.value_series, r.value_quadrature
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("α={alpha}: {e}"));
            }
        }
    }
    let (fast, time) = within(start, Duration::from_secs(30));
    outcome(pass && fast, format!("{}; {time}", parts.join(", ")))
}

fn explicit_bound_chain() -> Outcome {
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for k in 1..=7 {
        let alpha = 0.25 * k as f64;
        let bound = negativity_bound(alpha);
        match stilde_series(alpha, 100_000) {
            Ok(s) => {
                pass &= s.value < bound - 1e-9 && bound < -1e-9;
                worst = worst.min(bound - s.value);
            }
            Err(_) => pass = false,
        }
    }
    outcome(
        pass,
        format!("α ∈ 0.25..1.75, smallest gap bound − value = {worst:.3e}, margin 1e-9"),
    )
}

fn gamma_profile_monotone() -> Outcome {
    let g: Vec<f64> = (0..21).map(|k| k as f64 * FRAC_PI_2 / 20.0).collect();
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    for alpha in [0.5, 1.0, 1.5] {
        let Ok(v) = gamma_profile(alpha, &g) else {
            return outcome(false, format!("α={alpha}: evaluation failed"));
        };
        for w in v.windows(2) {
            worst = worst.max(w[1] - w[0]);
            pass &= w[1] <= w[0] + 1e-9;
        }
        for (gm, x) in g.iter().zip(&v) {
            pass &= *x <= gm.cos().powf(1.0 - alpha / 2.0) * v[0] + 1e-9;
        }
    }
    outcome(
        pass,
        format!("21 points, α ∈ {{0.5, 1, 1.5}}, largest increase {worst:.2e}, slack 1e-9"),
    )
}

fn scaling_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0f64;
    let mut count = 0;
    while count < 100 {
        let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let delta: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lambda = rng.gen_range(0.2..5.0);
        let alpha = rng.gen_range(0.2..1.8);
        let n = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n(&xi) < 0.2 || n(&delta) < 0.2 {
            continue;
        }
        let s = |a: &[f64], b: &[f64]| eval_s_quadrature(a, b, alpha);
        let sx: Vec<f64> = xi.iter().map(|x| lambda * x).collect();
        let sd: Vec<f64> = delta.iter().map(|x| lambda * x).collect();
        let (Ok(base), Ok(a), Ok(b)) = (s(&xi, &delta), s(&sx, &delta), s(&xi, &sd)) else {
            return outcome(false, "evaluation failed");
        };
        let rel = |u: f64, v: f64| (u - v).abs() / u.abs().max(v.abs()).max(1e-300);
        worst = worst.max(rel(a, lambda.powf(-1.0 - alpha / 2.0) * base));
        worst = worst.max(rel(b, lambda.powf(1.0 - alpha / 2.0) * base));
        count += 1;
    }
    outcome(
        worst <= 1e-7,
        format!("100 triples, worst relative error {worst:.2e} (≤ 1e-7)"),
    )
}

fn first_order_expansion() -> Outcome {
    let Ok(f) = EjectionFixture::equilateral(1.0, 1.0) else {
        return outcome(false, "fixture");
    };
    // Body 0 displaced along the unit circle of the xz-plane, which is rotated by
    // the reflection through the triangle's plane.
    let th = PI / 3.0;
    let dir = [th.cos(), 0.0, th.sin(), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let mut rows = Vec::new();
    for eps in [0.08, 0.04, 0.02, 0.01] {
        let d: Vec<f64> = dir.iter().map(|v| eps * v).collect();
        match delta_action_expansion(&f, &d, 1.0) {
            Ok(e) => rows.push(e),
            Err(e) => return outcome(false, format!("|δ|={eps}: {e}")),
        }
    }
    let mut pass = true;
    let mut ratios = Vec::new();
    let mut scale = Vec::new();
    for w in rows.windows(2) {
        let r = w[0].residual / w[1].residual;
        let s = w[0].prediction / w[1].prediction / 2f64.sqrt();
        pass &= (1.7..=2.3).contains(&r) && (s - 1.0).abs() <= 0.02;
        ratios.push(format!("{r:.3}"));
        scale.push(format!("{s:.4}"));
    }
    outcome(
        pass,
        format!(
            "residual ratios [{}], prediction ratio / √2 [{}]",
            ratios.join(", "),
            scale.join(", ")
        ),
    )
}

fn symmetry_verdicts() -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for e in ENTRIES {
        let p = CatalogParams::default();
        let (Ok(a), Ok(facts)) = (catalog_build::<f64>(e.name, &p), expected_facts(e.name, &p)) else {
            mismatches.push(format!("{}: build failed", e.name));
            continue;
        };
        let r = symmetry_report(&a, 11);
        let mut bad = Vec::new();
        if !r.coercive || r.coercive != facts.coercive {
            bad.push("coercivity");
        }
        if r.action_type != facts.action_type {
            bad.push("action type");
        }
        if facts.max_isotropy_rcp.is_some_and(|v| v != r.max_isotropy_rcp) {
            bad.push("maximal isotropy RCP");
        }
        if facts.ker_tau_rcp.is_some_and(|v| v != r.ker_tau.rcp) {
            bad.push("ker τ RCP");
        }
        if facts
            .collisionless_criterion
            .is_some_and(|v| v != r.collisionless_minimizer_criterion)
        {
            bad.push("collision-free criterion");
        }
        if !bad.is_empty() {
            mismatches.push(format!("{}: {}", e.name, bad.join(", ")));
        }
    }
    let (fast, time) = within(start, Duration::from_secs(5));
    let detail = if mismatches.is_empty() {
        format!("{} entries match; {time}", ENTRIES.len())
    } else {
        format!("{}; {time}", mismatches.join("; "))
    };
    outcome(mismatches.is_empty() && fast, detail)
}

fn run_minimizer(
    name: &str,
    params: CatalogParams,
    samples: usize,
) -> Result<(GroupAction<f64>, MinimizeResultF64), String> {
    let a = catalog_build::<f64>(name, &params).map_err(|e| e.to_string())?;
    let cfg = MinimizeConfig {
        samples: compatible_samples(&a, samples),
        ..Default::default()
    };
    let r = minimize(&a, &cfg).map_err(|e| e.to_string())?;
    Ok((a, r))
}

/// Convergence, stationarity and collision checks shared by the catalog minimizers.
fn bundle(r: &MinimizeResultF64) -> (bool, String) {
    let rep = &r.report;
    let eq = rep.equivariance_residual.unwrap_or(f64::INFINITY);
    let pass = r.converged
        && r.gradient_norm <= 1e-8
        && eq <= 1e-10
        && rep.newton_residual <= 1e-6
        && rep.energy_drift <= 1e-6
        && rep.min_pairwise_distance >= 0.01;
    let detail = format!(
        "M={} action {:.10} |∇|={:.1e} equivariance {:.1e} Newton {:.1e} drift {:.1e} min distance {:.4}",
        r.loop_.samples(),
        rep.action,
        r.gradient_norm,
        eq,
        rep.newton_residual,
        rep.energy_drift,
        rep.min_pairwise_distance
    );
    (pass, detail)
}

/// `max_{t,i} |x_a(t + shift) − x_b(t)|` over the samples, with `a = i + 1`, `b = i`
/// when `forward`, else with the shift applied to body `i`.
fn choreography_gap(x: &EquivariantLoop<f64>, forward: bool) -> f64 {
    let (m, n) = (x.samples(), x.n());
    let s = m / n;
    let mut worst = 0f64;
    for j in 0..m {
        for i in 0..n {
            let next = (i + 1) % n;
            let (u, v) = if forward {
                (x.body((j + s) % m, next), x.body(j, i))
            } else {
                (x.body(j, next), x.body((j + s) % m, i))
            };
            worst = u.iter().zip(v).fold(worst, |w, (a, b)| w.max((a - b).abs()));
        }
    }
    worst
}

fn figure_eight() -> Outcome {
    let start = Instant::now();
    let (_, r) = match run_minimizer("eight_dihedral", CatalogParams::default(), 256) {
        Ok(v) => v,
        Err(e) => return outcome(false, e),
    };
    let (ok, detail) = bundle(&r);
    let forward = choreography_gap(&r.loop_, true);
    let written = choreography_gap(&r.loop_, false);
    let (fast, time) = within(start, Duration::from_secs(120));
    outcome(
        ok && forward <= 1e-10 && fast,
        format!(
            "{detail}; x_{{i+1}}(t+T/3) = x_i(t) to {forward:.1e} (x_{{i+1}}(t) = x_i(t+T/3) off by {written:.2}); {time}"
        ),
    )
}

fn hip_hop() -> Outcome {
    let (_, r) = match run_minimizer("hiphop", CatalogParams::with_n(4), 256) {
        Ok(v) => v,
        Err(e) => return outcome(false, e),
    };
    let (ok, detail) = bundle(&r);
    let x = &r.loop_;
    let mut z = 0f64;
    for j in 0..x.samples() {
        for i in 0..x.n() {
            z = z.max(x.body(j, i)[2].abs());
        }
    }
    outcome(ok && z > 1e-3, format!("{detail}; max |z| {z:.4}"))
}

fn hessian_values() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, alpha, target) in [(3, 1.0, -27.0 * PI), (3, 1.5, -27.0 * PI), (2, 1.0, 6.0 * PI)] {
        let m = symorb::loops::compatible_samples(
            &catalog_build::<f64>("nonplanar_choreo", &CatalogParams::with_k(k)).unwrap(),
            256,
        );
        let value = lagrange_reference::<f64>(k, alpha, m)
            .and_then(|x| Ok((x, variation_direction::<f64>(k, m)?)))
            .and_then(|(x, v)| hessian_quadratic_form(&x, &v, 1e-3));
        match value {
            Ok(h) => {
                let ok = (h - target).abs() <= 0.01 * target.abs();
                pass &= ok;
                parts.push(format!("k={k} α={alpha}: {h:.4} vs {target:.4}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("k={k} α={alpha}: {e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn lagrange_criticality() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, alpha) in [(2, 1.0), (3, 1.0), (3, 1.5)] {
        let a = catalog_build::<f64>("nonplanar_choreo", &CatalogParams::with_k(k)).unwrap();
        let m = compatible_samples(&a, 512);
        match lagrange_reference::<f64>(k, alpha, m).and_then(|x| newton_residual(&x)) {
            Ok(r) => {
                pass &= r <= 1e-6;
                parts.push(format!("k={k} α={alpha} M={m}: {r:.1e}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("k={k} α={alpha}: {e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn property_suites() -> Outcome {
    let mut fd_worst = 0f64;
    let mut proj_worst = 0f64;
    let mut part_worst = 0f64;
    let mut fixture_worst = 0f64;
    let names = ["choreography", "eight_dihedral", "hiphop", "nonplanar_choreo"];
    let action = |name: &str| {
        let p = if name == "hiphop" {
            CatalogParams::with_n(4)
        } else {
            CatalogParams::default()
        };
        catalog_build::<f64>(name, &p).unwrap()
    };
    let random = |a: &GroupAction<f64>, m: usize, seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pos = (0..m * a.n() * a.d()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        EquivariantLoop::for_action(a, m, pos).unwrap()
    };
    for k in 0..20u64 {
        let a = action(names[k as usize % names.len()]);
        let m = compatible_samples(&a, 48);
        let x = seed_loop(
            &a,
            &MinimizeConfig {
                samples: m,
                seed: k,
                ..Default::default()
            },
        )
        .unwrap();
        let f = ActionFunctional::for_loop(&x);
        let (_, g) = f.value_and_gradient(x.positions()).unwrap();
        let v = project_equivariant(&random(&a, m, 100 + k), &a).unwrap();
        let h = 1e-5;
        let fd = (f.value(x.add_scaled(h, &v).positions()).unwrap()
            - f.value(x.add_scaled(-h, &v).positions()).unwrap())
            / (2.0 * h);
        let an: f64 = g.iter().zip(v.positions()).map(|(a, b)| a * b).sum();
        fd_worst = fd_worst.max((fd - an).abs() / fd.abs().max(an.abs()));

        let y = random(&a, m, 300 + k);
        let w = random(&a, m, 500 + k);
        let py = project_equivariant(&y, &a).unwrap();
        let ppy = project_equivariant(&py, &a).unwrap();
        let pw = project_equivariant(&w, &a).unwrap();
        let orth = y.add_scaled(-1.0, &py).dot(&pw).abs() / (y.dot(&y) * pw.dot(&pw)).sqrt();
        proj_worst = proj_worst.max(ppy.max_abs_diff(&py)).max(orth);
    }

    let a = action("hiphop");
    let x = seed_loop(
        &a,
        &MinimizeConfig {
            samples: 64,
            seed: 2,
            ..Default::default()
        },
    )
    .unwrap();
    let (_, kt, ut) = ActionFunctional::for_loop(&x).energy(x.positions()).unwrap();
    for cluster in [vec![0, 1], vec![0, 2, 3], vec![1]] {
        let comp: Vec<usize> = (0..4).filter(|i| !cluster.contains(i)).collect();
        let pk = partial_quantities(&x, &cluster).unwrap();
        let pc = partial_quantities(&x, &comp).unwrap();
        for j in 0..64 {
            part_worst = part_worst.max((pk.kinetic[j] + pc.kinetic[j] - kt[j]).abs() / kt[j]);
            let u = pk.potential[j] + pc.potential[j] + pk.cross_potential[j];
            part_worst = part_worst.max((u - ut[j]).abs() / ut[j]);
        }
    }

    for alpha in [0.5, 1.0, 1.5] {
        let f = EjectionFixture::equilateral(alpha, 1.0).unwrap().with_parabolic_kappa();
        for t in [1e-3, 0.1, 1.0, 10.0] {
            let i = f.inertia(t);
            fixture_worst = fixture_worst.max((i - (f.kappa * t).powf(4.0 / (2.0 + alpha))).abs() / i);
            fixture_worst = fixture_worst.max((f.kinetic(t) - f.potential(t)).abs() / f.potential(t));
        }
    }
    let pass = fd_worst <= 1e-6 && proj_worst <= 1e-12 && part_worst <= 1e-12 && fixture_worst <= 1e-10;
    outcome(
        pass,
        format!(
            "gradient vs FD {fd_worst:.1e} (≤1e-6), projection {proj_worst:.1e} (≤1e-12), partition {part_worst:.1e} (≤1e-12), ejection laws {fixture_worst:.1e} (≤1e-10)"
        ),
    )
}

fn trivial_group_control() -> Outcome {
    let a = GroupAction::trivial(SystemParams::unit_masses(3, 2, 1.0, 1.0)).unwrap();
    let cfg = MinimizeConfig {
        samples: 32,
        max_iterations: 3000,
        ..Default::default()
    };
    match minimize(&a, &cfg) {
        Ok(r) => {
            let first = r.inertia_history[0];
            let last = *r.inertia_history.last().unwrap();
            outcome(
                !r.converged && last > 100.0 * first,
                format!(
                    "{:?} after {} iterations, inertia {first:.3e} → {last:.3e}",
                    r.termination, r.iterations
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 12] = [
        (
            "circle average negative, series and quadrature agree",
            negativity_dual_route,
        ),
        ("series value below the explicit negative bound", explicit_bound_chain),
        (
            "tilted-circle profile non-increasing with cosine bound",
            gamma_profile_monotone,
        ),
        ("homogeneity of the pair average in ξ and δ", scaling_identities),
        ("first-order action expansion at the ejection", first_order_expansion),
        ("catalog symmetry verdicts", symmetry_verdicts),
        ("figure-eight minimizer", figure_eight),
        ("hip-hop minimizer is collision-free and non-planar", hip_hop),
        (
            "second variation at the rotating triangle (stated values)",
            hessian_values,
        ),
        ("rotating triangle is critical", lagrange_criticality),
        (
            "gradient, projection, partition and ejection properties",
            property_suites,
        ),
        ("trivial group diverges", trivial_group_control),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of {} passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
