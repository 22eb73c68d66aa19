#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gapbound::bounds::envelope::DEFAULT_ENVELOPE_TOL;
use gapbound::bounds::{
    chebyshev_weights, chebyshev_weights_from_norms, g_expectations, theorem1_bound, theorem2_bound, variance_bound,
    verify_envelope, BoundReport, EnvelopeCheck, WeightFunction, DEFAULT_S,
};
use gapbound::eigen::{lowest_two, write_spectrum, SpectrumResult, DEFAULT_DEGENERACY_TOL, DEFAULT_RESIDUAL_TOL};
use gapbound::experiment::{
    emit_plot, log_spaced_grid, read_sweep_csv, run_fuzz, run_sweep, FuzzConfig, FuzzError, FuzzFamily, SweepConfig,
};
use gapbound::lattice::parse_model;
use gapbound::{density, HoppingEnvelope, ModelSpec};

#[derive(Parser)]
#[command(
    name = "gapbound",
    version,
    about = "Spectral gap and ground-state localization bounds for lattice Hamiltonians"
)]
struct Cli {
    /// TOML file with [sweep] and [fuzz] defaults; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground state, first excited state and gap of a model file.
    Solve {
        model: PathBuf,
        /// Write the full spectrum, one `index value` line per eigenvalue.
        #[arg(long)]
        spectrum: Option<PathBuf>,
        /// Write the ground-state density as `x,p_x`.
        #[arg(long)]
        density: Option<PathBuf>,
    },
    /// Evaluate and check every localization bound on a model file.
    Bounds {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_S)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.5)]
        grid_step: f64,
        /// Declared envelope prefactor; fitted to the model when omitted.
        #[arg(long)]
        cv: Option<f64>,
        /// Declared nearest-neighbor bound; read off the model when omitted.
        #[arg(long)]
        v0: Option<f64>,
        /// Write the per-radius envelope comparison to this CSV.
        #[arg(long)]
        envelope_csv: Option<PathBuf>,
    },
    /// Impurity-chain sweep over h0.
    Sweep {
        #[arg(long = "L", visible_alias = "l")]
        l: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        h0_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        h0_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, conflicts_with = "fit_cv")]
        cv: Option<f64>,
        /// Fit the envelope prefactor to each model instead of using `--cv`.
        #[arg(long)]
        fit_cv: bool,
        #[arg(long)]
        v0: Option<f64>,
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized invariant checks.
    Fuzz {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// `nn` or `envelope`.
        #[arg(long)]
        family: Option<FuzzFamily>,
        #[arg(long)]
        min_sites: Option<usize>,
        #[arg(long)]
        max_sites: Option<usize>,
        #[arg(long)]
        max_n0: Option<usize>,
        #[arg(long)]
        cv: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        v0: Option<f64>,
        /// Generate norms up to this multiple of the declared bound.
        #[arg(long)]
        hopping_scale: Option<f64>,
    },
    /// Two-panel SVG of the ratio columns of a sweep CSV.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    /// Bad input, configuration or I/O. Exit code 1.
    Invalid(String),
    /// A checked inequality or invariant does not hold. Exit code 2.
    Invariant(String),
}

impl Failure {
    fn invalid(e: impl ToString) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    let result = configure_threads().and_then(|_| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("invariant failure: {m}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Outcome {
    let Ok(value) = std::env::var("GAPBOUND_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("GAPBOUND_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(Failure::invalid)
}

fn run(cli: Cli) -> Outcome {
    let file = config::load(cli.config.as_deref()).map_err(Failure::Invalid)?;
    match cli.command {
        Command::Solve { model, spectrum, density } => solve(&model, spectrum.as_deref(), density.as_deref()),
        Command::Bounds { model, s, mu, grid_step, cv, v0, envelope_csv } => {
            bounds(&model, s, mu, grid_step, cv, v0, envelope_csv.as_deref())
        }
        Command::Sweep { l, h0_min, h0_max, points, s, mu, cv, fit_cv, v0, grid_step, out } => {
            let f = file.sweep;
            let defaults = SweepConfig::default();
            let fit_cv = fit_cv || (cv.is_none() && f.fit_cv.unwrap_or(false));
            let config = SweepConfig {
                l: l.or(f.l).unwrap_or(defaults.l),
                h0_grid: log_spaced_grid(
                    h0_min.or(f.h0_min).unwrap_or(-1.0),
                    h0_max.or(f.h0_max).unwrap_or(-0.01),
                    points.or(f.points).unwrap_or(100),
                )
                .map_err(Failure::invalid)?,
                s: s.or(f.s).unwrap_or(defaults.s),
                mu: mu.or(f.mu).unwrap_or(defaults.mu),
                cv: if fit_cv { None } else { cv.or(f.cv).or(defaults.cv) },
                v0: v0.or(f.v0).or(defaults.v0),
                grid_step: grid_step.or(f.grid_step).unwrap_or(defaults.grid_step),
                tolerance: defaults.tolerance,
                output_path: out.or(f.out),
            };
            sweep(&config)
        }
        Command::Fuzz { seed, trials, family, min_sites, max_sites, max_n0, cv, mu, v0, hopping_scale } => {
            let f = file.fuzz;
            let d = FuzzConfig::default();
            let family = match family {
                Some(family) => family,
                None => f.family.as_deref().map(str::parse).transpose().map_err(Failure::Invalid)?.unwrap_or(d.family),
            };
            let config = FuzzConfig {
                seed: seed.or(f.seed).unwrap_or(d.seed),
                trials: trials.or(f.trials).unwrap_or(d.trials),
                size_range: (
                    min_sites.or(f.min_sites).unwrap_or(d.size_range.0),
                    max_sites.or(f.max_sites).unwrap_or(d.size_range.1),
                ),
                n0_range: (f.min_n0.unwrap_or(d.n0_range.0), max_n0.or(f.max_n0).unwrap_or(d.n0_range.1)),
                family,
                cv: cv.or(f.cv).unwrap_or(d.cv),
                mu: mu.or(f.mu).unwrap_or(d.mu),
                v0: v0.or(f.v0).unwrap_or(d.v0),
                max_range: f.max_range.unwrap_or(d.max_range),
                hopping_scale: hopping_scale.or(f.hopping_scale).unwrap_or(d.hopping_scale),
            };
            fuzz(&config)
        }
        Command::Plot { csv, out } => plot(&csv, &out),
    }
}

fn load_model(path: &Path) -> Result<ModelSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn solve_model(spec: &ModelSpec) -> Result<SpectrumResult, Failure> {
    lowest_two(&spec.assemble(), DEFAULT_RESIDUAL_TOL, DEFAULT_DEGENERACY_TOL).map_err(Failure::invalid)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Invalid(format!("{}: {e}", path.display()))
}

fn solve(model: &Path, spectrum: Option<&Path>, density_out: Option<&Path>) -> Outcome {
    let spec = load_model(model)?;
    let r = solve_model(&spec)?;
    let profile = density(&r.psi0, &spec).map_err(Failure::invalid)?;
    let stats = profile.position_stats();
    println!("model: {}", spec.label());
    println!("sites: {}", spec.sites());
    println!("internal_dim: {}", spec.internal_dim());
    println!("E0: {:.16e}", r.e0);
    println!("E1: {:.16e}", r.e1);
    println!("gap: {:.16e}", r.gap);
    println!("residual0: {:.3e}", r.residual0);
    println!("residual1: {:.3e}", r.residual1);
    println!("mean_x: {:.16e}", stats.mean);
    println!("deltaX: {:.16e}", stats.std_dev());
    if let Some(path) = spectrum {
        let mut out = create(path)?;
        write_spectrum(&mut out, &r.spectrum).and_then(|_| out.flush()).map_err(io_err(path))?;
    }
    if let Some(path) = density_out {
        let mut out = create(path)?;
        profile.write_csv(&mut out).and_then(|_| out.flush()).map_err(io_err(path))?;
    }
    Ok(())
}

fn bounds(
    model: &Path,
    s: f64,
    mu: f64,
    grid_step: f64,
    cv: Option<f64>,
    v0: Option<f64>,
    envelope_csv: Option<&Path>,
) -> Outcome {
    let spec = load_model(model)?;
    let r = solve_model(&spec)?;
    let profile = density(&r.psi0, &spec).map_err(Failure::invalid)?;
    let stats = profile.position_stats();
    let delta_x = stats.std_dev();
    let mut problems = Vec::new();

    let rep =
        g_expectations(&r.psi0, &spec, &WeightFunction::position(spec.sites()), r.gap).map_err(Failure::invalid)?;
    println!("complementary: lhs {:.6e} rhs {:.6e} slack {:.3e}", rep.lhs, rep.rhs, rep.slack);
    if !rep.holds(1e-9) || !rep.routes_agree(1e-9) {
        problems.push("gap-fluctuation inequality".to_string());
    }

    let norm_weights = chebyshev_weights_from_norms(&spec);
    let var_bound =
        variance_bound(norm_weights.iter().copied().fold(0.0, f64::max), r.gap).map_err(Failure::invalid)?;
    println!("variance: {:.6e} <= {:.6e}", stats.variance, var_bound);
    if stats.variance > var_bound * (1.0 + 1e-12) {
        problems.push("variance bound".to_string());
    }

    let envelope = match cv {
        Some(cv) => {
            let env = HoppingEnvelope::new(cv, mu).map_err(Failure::invalid)?;
            if !env.admits(&spec) {
                return Err(Failure::Invalid(format!("model violates the declared envelope Cv={cv}, mu={mu}")));
            }
            Some(env)
        }
        None => spec.fit_envelope(mu).ok(),
    };
    let nn = match (spec.check_nearest_neighbor(), v0) {
        (Ok(actual), Some(v0)) if actual.v0 > v0 * (1.0 + 1e-12) => {
            return Err(Failure::Invalid(format!("largest hopping norm {} exceeds the declared V0={v0}", actual.v0)));
        }
        (Ok(_), Some(v0)) => Some(v0),
        (Ok(actual), None) if actual.v0 > 0.0 => Some(actual.v0),
        (Err(e), Some(_)) => return Err(Failure::invalid(e)),
        _ => None,
    };
    if let Some(env) = &envelope {
        let w = chebyshev_weights(env, spec.sites());
        let b = variance_bound(w.iter().copied().fold(0.0, f64::max), r.gap).map_err(Failure::invalid)?;
        println!("variance (envelope Cv={:.6e}, mu={}): {:.6e} <= {:.6e}", env.cv, env.mu, stats.variance, b);
        if stats.variance > b * (1.0 + 1e-12) {
            problems.push("variance bound (envelope)".to_string());
        }
    }

    let mut checks: Vec<EnvelopeCheck> = Vec::new();
    println!("{}", BoundReport::CSV_HEADER);
    if let Some(env) = &envelope {
        let b = theorem1_bound(env, r.gap, s, delta_x).map_err(Failure::invalid)?;
        println!("{}", BoundReport::new(&b, r.gap, delta_x).csv_row());
        checks.push(
            verify_envelope(&profile, stats.mean, &b, grid_step, DEFAULT_ENVELOPE_TOL).map_err(Failure::invalid)?,
        );
    }
    if let Some(v0) = nn {
        let b = theorem2_bound(v0, r.gap, s, delta_x).map_err(Failure::invalid)?;
        println!("{}", BoundReport::new(&b, r.gap, delta_x).csv_row());
        checks.push(
            verify_envelope(&profile, stats.mean, &b, grid_step, DEFAULT_ENVELOPE_TOL).map_err(Failure::invalid)?,
        );
    }
    for check in &checks {
        println!("{}: {} radii checked, {} violations", check.kind, check.r_grid.len(), check.violations.len());
        if !check.passed() {
            problems.push(format!("{} tail envelope", check.kind));
        }
    }
    if let Some(path) = envelope_csv {
        let mut out = create(path)?;
        for check in &checks {
            writeln!(out, "# {}", check.kind).map_err(io_err(path))?;
            check.write_csv(&mut out).map_err(io_err(path))?;
        }
        out.flush().map_err(io_err(path))?;
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(format!("violated: {}", problems.join(", "))))
    }
}

fn sweep(config: &SweepConfig) -> Outcome {
    let rows = run_sweep(config).map_err(Failure::invalid)?;
    let v1: usize = rows.iter().map(|r| r.violations1).sum();
    let v2: usize = rows.iter().map(|r| r.violations2).sum();
    let misordered = rows.iter().filter(|r| !(r.ratio2 <= r.ratio1)).count();
    eprintln!("rows: {}", rows.len());
    eprintln!("envelope violations: theorem1 {v1}, theorem2 {v2}");
    eprintln!("rows with ratio2 > ratio1: {misordered}");
    if config.output_path.is_none() {
        let stdout = std::io::stdout();
        gapbound::experiment::write_sweep_csv(stdout.lock(), &rows).map_err(Failure::invalid)?;
    }
    if v1 + v2 > 0 {
        return Err(Failure::Invariant(format!("{} envelope violations in sweep", v1 + v2)));
    }
    Ok(())
}

fn fuzz(config: &FuzzConfig) -> Outcome {
    match run_fuzz(config) {
        Ok(report) => {
            print!("{}", report.render());
            Ok(())
        }
        Err(e @ FuzzError::Invariant { .. }) => Err(Failure::Invariant(e.to_string())),
        Err(e) => Err(Failure::invalid(e)),
    }
}

fn plot(csv: &Path, out: &Path) -> Outcome {
    let file = File::open(csv).map_err(io_err(csv))?;
    let rows = read_sweep_csv(file).map_err(Failure::invalid)?;
    emit_plot(&rows, out).map_err(Failure::invalid)
}
