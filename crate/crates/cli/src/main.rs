use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand};

use fga_inchworm::bath::{BathSpec, OhmicSpec};
use fga_inchworm::dyson::{truncation_estimate, EstimatorParams};
use fga_inchworm::model::SimConfig;
use fga_inchworm::pipeline::{self, RunOptions};
use fga_inchworm::scenario::{cost_estimate, Scenario, COST_LIMIT};
use fga_inchworm::{checks, output, Error, Result};

const VALIDATION_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "fga-inchworm", version, about = "Open-system dynamics of a particle coupled to a harmonic bath")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate beams, solve all pair coefficients, write densities.
    Run(RunArgs),
    /// Run the built-in property checks.
    Validate,
    /// Print the truncation bound for orders 1, 3 and 5.
    Estimate(EstimateArgs),
    /// Dump the bath correlation B~(dtau) as CSV.
    BathCorr(BathCorrArgs),
}

#[derive(Args)]
struct Source {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset: validity, harmonic, two_peak, double_well, custom.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Coupling strength; pins a sweep to this one value.
    #[arg(long)]
    xi: Option<f64>,
}

impl Source {
    fn scenario(&self) -> Scenario {
        self.scenario.unwrap_or(Scenario::Custom)
    }

    /// The config file if given, else the scenario preset.
    fn base(&self) -> Result<SimConfig> {
        match (&self.config, self.scenario().preset()) {
            (Some(path), _) => SimConfig::load(path),
            (None, Some(preset)) => Ok(preset),
            (None, None) => Err(Error::config("pass --config or a preset --scenario")),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Truncation order; pins the double-well pair to this one value.
    #[arg(long = "m-bar")]
    m_bar: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write the reduced density rho.csv.
    #[arg(long)]
    dump_rho: bool,
    /// Also write beam trajectories beams.csv.
    #[arg(long)]
    dump_beams: bool,
    /// Also write the pair coefficients coeffs.csv.
    #[arg(long)]
    dump_coeffs: bool,
    /// Run even when the cost estimate is above the safety limit.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: Source,
    /// Semiclassical parameter when no config or scenario is given.
    #[arg(long, default_value_t = 1.0 / 64.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    q_max: f64,
    #[arg(long, default_value_t = 1.0)]
    g_max: f64,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, default_value_t = 5.0)]
    end: f64,
}

#[derive(Args)]
struct BathCorrArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 5.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bath and epsilon from a config or preset, else the standard bath at
/// the given epsilon and `xi` (default 1.6).
fn bath_for(source: &Source, epsilon: f64) -> Result<BathSpec> {
    let (mut spec, beta, eps) = match (&source.config, source.scenario().preset()) {
        (None, None) => (
            OhmicSpec { xi: 1.6, omega_c: 2.5, omega_max: 10.0, modes: 400 },
            5.0,
            epsilon,
        ),
        _ => {
            let cfg = source.base()?;
            (cfg.ohmic(), cfg.bath.beta, cfg.epsilon)
        }
    };
    if let Some(xi) = source.xi {
        spec.xi = xi;
    }
    spec.discretize(beta, eps)
}

fn run(args: &RunArgs) -> Result<u8> {
    let base = args.source.base()?;
    let scenario = args.source.scenario();
    let runs = scenario.runs(&base, args.source.xi, args.m_bar);
    for (_, cfg) in &runs {
        cfg.validate()?;
        let cost = cost_estimate(cfg);
        eprintln!("cost estimate {cost:.3e} (limit {COST_LIMIT:.0e})");
        if cost > COST_LIMIT && !args.force {
            return Err(Error::config(format!(
                "estimated cost {cost:.3e} exceeds {COST_LIMIT:.0e}; pass --force to run anyway"
            )));
        }
    }
    let nested = runs.len() > 1;
    for (label, cfg) in &runs {
        let dir = if nested { args.out.join(label) } else { args.out.clone() };
        std::fs::create_dir_all(&dir)?;
        eprintln!("[{label}] xi = {}, M = {}, writing to {}", cfg.bath.xi, cfg.inchworm.m_bar, dir.display());
        run_one(args, scenario, cfg, &dir)?;
    }
    Ok(0)
}

fn run_one(args: &RunArgs, scenario: Scenario, cfg: &SimConfig, dir: &Path) -> Result<()> {
    output::write_config(&dir.join("config.toml"), cfg)?;
    let last = AtomicUsize::new(0);
    let progress = |done: usize, total: usize| {
        let tenth = 10 * done / total;
        if last.fetch_max(tenth, Ordering::Relaxed) < tenth {
            eprintln!("  pairs {done}/{total}");
        }
    };
    let opts = RunOptions {
        with_rho: args.dump_rho,
        progress: Some(&progress),
    };
    let out = pipeline::run(cfg, opts)?;
    output::write_density(&dir.join("f.csv"), &out.density)?;
    output::write_diagnostics(&dir.join("diagnostics.csv"), &out.density)?;
    output::write_timing(&dir.join("timing.json"), &out.timing)?;
    if args.dump_rho {
        output::write_rho(&dir.join("rho.csv"), &out.density)?;
    }
    if args.dump_beams {
        output::write_beams(&dir.join("beams.csv"), &out.beams)?;
    }
    if args.dump_coeffs {
        output::write_coefficients(&dir.join("coeffs.csv"), &out.coeffs)?;
    }
    if scenario == Scenario::Validity {
        let reference = pipeline::spectral_reference(cfg)?;
        output::write_reference(&dir.join("sp2.csv"), &out.density.times, &out.density.x, &reference)?;
    }
    for (t, m) in out.density.times.iter().zip(&out.density.mass) {
        eprintln!("  t = {t}: mass {m:.6}");
    }
    let t = out.timing;
    eprintln!(
        "  propagate {:.2}s, inchworm {:.2}s, assemble {:.2}s",
        t.propagate, t.inchworm, t.assemble
    );
    Ok(())
}

fn validate() -> Result<u8> {
    let mut failed = false;
    for c in checks::run_all()? {
        println!("{c}");
        failed |= !c.pass;
    }
    Ok(if failed { VALIDATION_FAILURE } else { 0 })
}

fn estimate(args: &EstimateArgs) -> Result<u8> {
    let bath = bath_for(&args.source, args.epsilon)?;
    println!("m,bound");
    for m in [1, 3, 5] {
        let params = EstimatorParams {
            q_max: args.q_max,
            g_max: args.g_max,
            start: args.start,
            end: args.end,
            m,
            dt: if m <= 3 { 0.05 } else { 0.2 },
        };
        println!("{m},{}", truncation_estimate(&params, &bath)?);
    }
    Ok(0)
}

fn bath_corr(args: &BathCorrArgs) -> Result<u8> {
    let bath = bath_for(&args.source, args.epsilon)?;
    if !(args.step > 0.0 && args.tau_max >= 0.0) {
        return Err(Error::config("need --step > 0 and --tau-max >= 0"));
    }
    let mut w: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(w, "dtau,abs,re,im")?;
    let n = (args.tau_max / args.step).round() as usize;
    for i in 0..=n {
        let d = i as f64 * args.step;
        let b = bath.correlation_tilde(d);
        writeln!(w, "{d},{},{},{}", b.norm(), b.re, b.im)?;
    }
    w.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Validate => validate(),
        Command::Estimate(args) => estimate(args),
        Command::BathCorr(args) => bath_corr(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
