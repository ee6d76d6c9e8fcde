use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use symorb::averaging::{circle_average_variation, eval_stilde_series, gamma_profile, EjectionFixture};
use symorb::catalog::{self, CatalogParams};
use symorb::group::{bound_to_collisions_check, fundamental_domain, ActionConfig, GroupAction, SystemParams};
use symorb::loops::compatible_samples;
use symorb::minimize::{multi_seed, MinimizeConfig};
use symorb::symmetry::{symmetry_report, RotatingCircleWitness, DEFAULT_SEED};
use symorb::trajectory::{verify_trajectory, write_trajectory, VerifyThresholds};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "symorb", version, about = "Symmetric periodic orbits of the n-body problem")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in example actions.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Symmetry report of an action given as a JSON file or a catalog name.
    Analyze {
        target: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Seed for the randomized invariant-plane search.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Minimize the equivariant action.
    Minimize(MinimizeArgs),
    /// Compare the series and quadrature routes of the circle average.
    Averaging(AveragingArgs),
    /// Recompute the verification bundle of a trajectory file.
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum CatalogCommand {
    List,
    Show {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args, Clone, Default)]
struct ParamArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<i64>,
    #[arg(long)]
    alpha: Option<f64>,
}

impl ParamArgs {
    fn to_params(&self) -> CatalogParams {
        CatalogParams {
            n: self.n,
            d: self.d,
            k: self.k,
            q: self.q,
            p: self.p,
            alpha: self.alpha,
        }
    }
}

#[derive(Args)]
struct MinimizeArgs {
    /// JSON action file or catalog name.
    #[arg(long)]
    config: String,
    #[command(flatten)]
    params: ParamArgs,
    /// Sample count; defaults to the smallest compatible count ≥ 256.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Trajectory CSV of the best run; a JSON sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AveragingArgs {
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Number of points of the γ-profile on [0, π/2].
    #[arg(long, default_value_t = 21)]
    gamma_steps: usize,
    #[arg(long, default_value_t = 100_000)]
    truncation: usize,
    /// Circle samples for the averaged ejection variation.
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

enum Failure {
    Input(String),
}

impl From<symorb::Error> for Failure {
    fn from(e: symorb::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn emit(json: bool, value: &Value, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("json"));
    } else {
        print!("{}", text());
    }
}

fn load_action(target: &str, params: &CatalogParams) -> Result<(ActionConfig, bool), Failure> {
    let path = Path::new(target);
    if path.is_file() {
        return Ok((ActionConfig::from_path(path)?, false));
    }
    match catalog::catalog_config(target, params) {
        Ok(c) => Ok((c, true)),
        Err(symorb::Error::UnknownCatalogEntry(_)) => Err(Failure::Input(format!(
            "`{target}` is neither a readable file nor a catalog entry"
        ))),
        Err(e) => Err(e.into()),
    }
}

fn catalog_cmd(json: bool, cmd: CatalogCommand) -> Outcome {
    match cmd {
        CatalogCommand::List => {
            let v: Vec<Value> = catalog::ENTRIES
                .iter()
                .map(|e| json!({"name": e.name, "summary": e.summary, "parameters": e.parameters}))
                .collect();
            emit(json, &Value::Array(v), || {
                catalog::ENTRIES
                    .iter()
                    .map(|e| {
                        format!(
                            "{:<22} {}\n{:<22} parameters: {}\n",
                            e.name, e.summary, "", e.parameters
                        )
                    })
                    .collect()
            });
        }
        CatalogCommand::Show { name, params } => {
            let p = params.to_params();
            let entry = catalog::entry(&name)?;
            let cfg = catalog::catalog_config(&name, &p)?;
            let facts = catalog::expected_facts(&name, &p)?;
            let v = json!({"name": entry.name, "summary": entry.summary, "parameters": entry.parameters,
                           "config": cfg, "expected": facts});
            emit(json, &v, || {
                format!(
                    "{}: {}\nparameters: {}\nexpected: order {}, coercive {}, {} action type\nconfig:\n{}\n",
                    entry.name,
                    entry.summary,
                    entry.parameters,
                    facts.order,
                    facts.coercive,
                    facts.action_type,
                    cfg.to_json_pretty()
                )
            });
        }
    }
    Ok(true)
}

fn analyze(json: bool, target: &str, params: &ParamArgs, seed: u64) -> Outcome {
    let p = params.to_params();
    let (cfg, from_catalog) = load_action(target, &p)?;
    let action: GroupAction<f64> = cfg.build()?;
    let report = symmetry_report(&action, seed);
    let domain = fundamental_domain(&action);
    let collisions = bound_to_collisions_check(&action);
    let mut agrees = None;
    if from_catalog {
        let f = catalog::expected_facts(target, &p)?;
        agrees = Some(
            f.order == action.order()
                && f.coercive == report.coercive
                && f.action_type == report.action_type
                && f.max_isotropy_rcp.map_or(true, |b| b == report.max_isotropy_rcp)
                && f.ker_tau_rcp.map_or(true, |b| b == report.ker_tau.rcp)
                && f.collisionless_criterion
                    .map_or(true, |b| b == report.collisionless_minimizer_criterion),
        );
    }
    let v = json!({"order": action.order(), "report": report,
                   "fundamental_domain": {"start": domain.start_time(1.0), "end": domain.end_time(1.0)},
                   "bound_to_collisions": collisions.to_string(), "matches_expected": agrees});
    emit(json, &v, || {
        let mut s = format!(
            "order {}\ncoercive {} (dim X^G = {})\naction type {}\nfundamental domain [{:.6}, {:.6}]·T\nbound to collisions: {}\n",
            action.order(),
            report.coercive,
            report.fixed_space_dim,
            report.action_type,
            domain.start_time(1.0),
            domain.end_time(1.0),
            collisions
        );
        s += &format!(
            "ker τ: order {}, rotating circles for bodies {:?}, RCP {}\n",
            report.ker_tau.order, report.ker_tau.movable, report.ker_tau.rcp
        );
        for h in &report.maximal_isotropy {
            s += &format!(
                "isotropy at t = {}: order {}, trivial on indices {}, rotating circles for bodies {:?}, RCP {}\n",
                h.time, h.order, h.trivial_on_indices, h.movable, h.rcp
            );
        }
        s += &format!(
            "maximal isotropy RCP {}\ncollision-free minimizer criterion {}\n",
            report.max_isotropy_rcp, report.collisionless_minimizer_criterion
        );
        if let Some(a) = agrees {
            s += &format!("matches recorded facts: {a}\n");
        }
        s
    });
    Ok(agrees.unwrap_or(true))
}

fn minimize_cmd(json: bool, a: &MinimizeArgs) -> Outcome {
    let (cfg, _) = load_action(&a.config, &a.params.to_params())?;
    let action: GroupAction<f64> = cfg.build()?;
    let samples = a.samples.unwrap_or_else(|| compatible_samples(&action, 256));
    let mut config = MinimizeConfig {
        samples,
        seed: a.seed,
        gradient_tolerance: a.tol,
        ..Default::default()
    };
    if let Some(m) = a.max_iterations {
        config.max_iterations = m;
    }
    config.validate()?;
    let res = multi_seed(&action, &config, a.count)?;
    let best = &res.best;
    let ok = best.converged;
    let mut written = None;
    if let Some(out) = &a.out {
        written = Some(write_trajectory(out, &best.loop_, Some(&cfg))?);
    }
    let v = json!({"samples": samples, "converged": ok, "best_seed": best.seed,
                   "termination": best.termination, "iterations": best.iterations,
                   "report": best.report, "runs": res.runs, "clusters": res.clusters,
                   "trajectory": a.out, "sidecar": written});
    emit(json, &v, || {
        let mut s = format!(
            "{:>6} {:>10} {:>20} {:>12} {:>6}\n",
            "seed", "converged", "action", "min dist", "iter"
        );
        for r in &res.runs {
            s += &format!(
                "{:>6} {:>10} {:>20} {:>12} {:>6}{}\n",
                r.seed,
                r.converged,
                r.action.map_or("-".into(), |x| format!("{x:.12}")),
                r.min_pairwise_distance.map_or("-".into(), |x| format!("{x:.6}")),
                r.iterations,
                r.error.as_ref().map_or(String::new(), |e| format!("  {e}"))
            );
        }
        for c in &res.clusters {
            s += &format!("cluster action {:.12}: seeds {:?}\n", c.action, c.seeds);
        }
        let r = &best.report;
        s += &format!(
            "best seed {} ({:?}): action {:.12}, |g| {:.3e}, newton {:.3e}, drift {:.3e}, equivariance {:.3e}, min dist {:.6}\n",
            best.seed,
            best.termination,
            r.action,
            best.gradient_norm,
            r.newton_residual,
            r.energy_drift,
            r.equivariance_residual.unwrap_or(f64::NAN),
            r.min_pairwise_distance
        );
        if let Some(p) = &a.out {
            s += &format!("wrote {}\n", p.display());
        }
        s
    });
    Ok(ok)
}

fn averaging_cmd(json: bool, a: &AveragingArgs) -> Outcome {
    let alphas = if a.alphas.is_empty() {
        vec![0.5, 1.0, 1.5]
    } else {
        a.alphas.clone()
    };
    if a.gamma_steps < 2 {
        return Err(Failure::Input("--gamma-steps must be ≥ 2".into()));
    }
    let gammas: Vec<f64> = (0..a.gamma_steps)
        .map(|k| k as f64 * std::f64::consts::FRAC_PI_2 / (a.gamma_steps - 1) as f64)
        .collect();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for &alpha in &alphas {
        let r = eval_stilde_series(alpha, a.truncation)?;
        let prof = gamma_profile(alpha, &gammas)?;
        let monotone = prof.windows(2).all(|w| w[1] <= w[0] + 1e-9);
        let cos_bound = gammas
            .iter()
            .zip(&prof)
            .all(|(g, v)| *v <= g.cos().powf(1.0 - alpha / 2.0) * prof[0] + 1e-9);
        let fixture = EjectionFixture::equilateral(alpha, 1.0)?;
        let trivial = GroupAction::<f64>::trivial(SystemParams::unit_masses(3, 3, alpha, 1.0))?;
        let witness = RotatingCircleWitness {
            index: 0,
            subgroup: trivial.trivial_subgroup(),
            plane: [vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
            rotation_angles: vec![0.0],
        };
        let circ = circle_average_variation(&fixture, &trivial, &witness, 1.0, a.samples, 0.02)?;
        let agree = r.value_series < 0.0 && r.value_quadrature < 0.0 && r.discrepancy <= 1e-6;
        let ok = agree && r.bound_holds && monotone && cos_bound && circ.mean < 0.0;
        all_ok &= ok;
        rows.push((r, monotone, cos_bound, circ.mean, ok));
    }
    let v = Value::Array(
        rows.iter()
            .map(|(r, m, c, circ, ok)| {
                json!({"result": r, "gamma_monotone": m, "gamma_cos_bound": c,
                       "circle_average_variation": circ, "pass": ok})
            })
            .collect(),
    );
    emit(json, &v, || {
        let mut s = format!(
            "{:>6} {:>18} {:>18} {:>10} {:>12} {:>6} {:>6} {:>12} {}\n",
            "alpha", "series", "quadrature", "discrep.", "bound", "γ-mono", "γ-cos", "circle avg", "result"
        );
        for (r, m, c, circ, ok) in &rows {
            s += &format!(
                "{:>6} {:>18.12} {:>18.12} {:>10.2e} {:>12.6} {:>6} {:>6} {:>12.6} {}\n",
                r.alpha,
                r.value_series,
                r.value_quadrature,
                r.discrepancy,
                r.bound,
                m,
                c,
                circ,
                if *ok { "pass" } else { "FAIL" }
            );
        }
        s
    });
    Ok(all_ok)
}

fn verify_cmd(json: bool, file: &Path) -> Outcome {
    let out = verify_trajectory(file, &VerifyThresholds::default())?;
    emit(json, &serde_json::to_value(&out).expect("json"), || {
        let mut s = String::new();
        for c in &out.checks {
            s += &format!(
                "{:<24} {:>12.3e} (threshold {:.1e}) {}\n",
                c.name,
                c.value,
                c.threshold,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        s += &format!(
            "action {:.12}\n{}\n",
            out.report.action,
            if out.pass { "PASS" } else { "FAIL" }
        );
        s
    });
    Ok(out.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let json = cli.json;
    let outcome = match cli.command {
        Command::Catalog { command } => catalog_cmd(json, command),
        Command::Analyze { target, params, seed } => analyze(json, &target, &params, seed),
        Command::Minimize(a) => minimize_cmd(json, &a),
        Command::Averaging(a) => averaging_cmd(json, &a),
        Command::Verify { file } => verify_cmd(json, &file),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
