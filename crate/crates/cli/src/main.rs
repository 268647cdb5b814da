use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gplab_cli::report::fmt_f64;
use gplab_cli::{emit_plotdata, run, Experiment, ExperimentConfig, PlotKind, RunReport};
use gplab_core::field::io::read_snapshot;
use gplab_core::field::RadialField;

#[derive(Parser)]
#[command(name = "gplab", version, about = "Gross-Pitaevskii normal-form numerical lab")]
struct Cli {
    /// key = value file applied over the experiment defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (config key `output_dir`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a catalog symbol band by band against its stated exponents
    SymbolCheck(SymbolCheckArgs),
    /// Measure dyadic Strichartz constants of the free flow and fit slopes in k
    StrichartzScan(ScanArgs),
    /// Decay of the localized kernel in the stationary and far windows
    KernelDecay(DecayArgs),
    /// Bessel envelope, remainder and dual-method checks
    BesselCheck(BesselArgs),
    /// Evolve a seeded random state; energy CSV and optional snapshots
    Evolve(EvolveArgs),
    /// Normal-form identities: N31 forms, m-equation residual orders, quintic sum
    NormalformVerify(VerifyArgs),
    /// Cauchy indicator of the pulled-back profile
    Scatter(ScatterArgs),
    /// Print a snapshot as CSV
    FieldDump {
        file: PathBuf,
        /// Print the spectrum instead of physical values
        #[arg(long)]
        frequency: bool,
    },
    /// Compare two snapshots on the same grid
    FieldDiff {
        a: PathBuf,
        b: PathBuf,
        /// Exit nonzero when the relative L2 distance exceeds this
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Plot data and an SVG for a finished run
    Plot {
        /// Run directory holding report.json (defaults to --out)
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        kind: String,
    },
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SymbolCheckArgs {
    #[arg(long)]
    name: Option<String>,
    /// Symbol parameter; repeatable
    #[arg(long)]
    param: Vec<String>,
    #[arg(long)]
    kmin: Option<String>,
    #[arg(long)]
    kmax: Option<String>,
    #[arg(long)]
    grid_points: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ScanArgs {
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long)]
    kmin: Option<String>,
    #[arg(long)]
    kmax: Option<String>,
    /// Comma-separated q:r pairs, e.g. 2:5,2:6,inf:2
    #[arg(long)]
    qr: Option<String>,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    window: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct DecayArgs {
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long)]
    param: Vec<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    tmin: Option<String>,
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long)]
    points: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BesselArgs {
    #[arg(long)]
    numax: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    #[arg(long)]
    points: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EvolveArgs {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    snapshot_every: Option<String>,
    #[arg(long)]
    energy_every: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ScatterArgs {
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    tmin: Option<String>,
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    #[arg(long)]
    sample_every: Option<String>,
}

type Overrides = Vec<(&'static str, Option<String>)>;

fn list(v: &[String]) -> Option<String> {
    (!v.is_empty()).then(|| v.join(","))
}

impl Cmd {
    fn experiment(&self) -> Option<(Experiment, Overrides)> {
        Some(match self {
            Cmd::SymbolCheck(a) => (
                Experiment::SymbolCheck,
                vec![
                    ("name", a.name.clone()),
                    ("param", list(&a.param)),
                    ("kmin", a.kmin.clone()),
                    ("kmax", a.kmax.clone()),
                    ("grid_points", a.grid_points.clone()),
                ],
            ),
            Cmd::StrichartzScan(a) => (
                Experiment::StrichartzScan,
                vec![
                    ("symbol", a.symbol.clone()),
                    ("kmin", a.kmin.clone()),
                    ("kmax", a.kmax.clone()),
                    ("qr", a.qr.clone()),
                    ("profile", a.profile.clone()),
                    ("samples", a.samples.clone()),
                    ("window", a.window.clone()),
                ],
            ),
            Cmd::KernelDecay(a) => (
                Experiment::KernelDecay,
                vec![
                    ("symbol", a.symbol.clone()),
                    ("param", list(&a.param)),
                    ("k", a.k.clone()),
                    ("tmin", a.tmin.clone()),
                    ("tmax", a.tmax.clone()),
                    ("points", a.points.clone()),
                ],
            ),
            Cmd::BesselCheck(a) => (
                Experiment::BesselCheck,
                vec![("numax", a.numax.clone()), ("rmax", a.rmax.clone()), ("points", a.points.clone())],
            ),
            Cmd::Evolve(a) => (
                Experiment::Evolve,
                vec![
                    ("n", a.n.clone()),
                    ("rmax", a.rmax.clone()),
                    ("dt", a.dt.clone()),
                    ("steps", a.steps.clone()),
                    ("delta", a.delta.clone()),
                    ("scheme", a.scheme.clone()),
                    ("snapshot_every", a.snapshot_every.clone()),
                    ("energy_every", a.energy_every.clone()),
                ],
            ),
            Cmd::NormalformVerify(a) => (
                Experiment::NormalformVerify,
                vec![
                    ("trials", a.trials.clone()),
                    ("n", a.n.clone()),
                    ("rmax", a.rmax.clone()),
                    ("amplitude", a.amplitude.clone()),
                ],
            ),
            Cmd::Scatter(a) => (
                Experiment::Scatter,
                vec![
                    ("delta", a.delta.clone()),
                    ("tmin", a.tmin.clone()),
                    ("tmax", a.tmax.clone()),
                    ("dt", a.dt.clone()),
                    ("n", a.n.clone()),
                    ("rmax", a.rmax.clone()),
                    ("sample_every", a.sample_every.clone()),
                ],
            ),
            _ => return None,
        })
    }
}

/// Defaults, then the config file, then subcommand flags, then `--seed`/`--out`.
fn build_config(cli: &Cli, exp: Experiment, overrides: Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(exp);
    if let Some(p) = &cli.config {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        cfg.apply_text(&text).with_context(|| format!("in {}", p.display()))?;
    }
    for (k, v) in overrides {
        if let Some(v) = v {
            cfg.set(k, &v).with_context(|| format!("--{}", k.replace('_', "-")))?;
        }
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    cfg.check()?;
    Ok(cfg)
}

fn print_report(r: &RunReport, dir: &Path) {
    for c in &r.checks {
        let tag = match (c.enabled, c.pass) {
            (false, _) => "SKIP",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        let note = if c.note.is_empty() { String::new() } else { format!(" ({})", c.note) };
        println!("{tag} {}: {}{note}", c.name, fmt_f64(c.measured));
    }
    println!("{} in {:.2}s, report {}", r.experiment, r.wall_time_s, dir.join(gplab_cli::report::REPORT_FILE).display());
}

fn load_field(p: &Path) -> Result<(RadialField<f64>, f64)> {
    let mut f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
    read_snapshot::<f64, _>(&mut f, None).with_context(|| format!("reading {}", p.display()))
}

fn field_dump(file: &Path, frequency: bool) -> Result<()> {
    let (field, t) = load_field(file)?;
    let g = field.grid().clone();
    let (label, axis, f) = if frequency {
        ("rho", g.rho().to_vec(), field.to_frequency())
    } else {
        ("r", g.r().to_vec(), field.to_physical())
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "# n={} r_max={} t={}", g.n(), fmt_f64(g.r_max()), fmt_f64(t))?;
    writeln!(out, "{label},re,im")?;
    for (x, v) in axis.iter().zip(f.data()) {
        writeln!(out, "{},{},{}", fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im))?;
    }
    Ok(())
}

fn field_diff(a: &Path, b: &Path, tol: Option<f64>) -> Result<bool> {
    let (fa, ta) = load_field(a)?;
    let (fb, tb) = load_field(b)?;
    if fa.grid().n() != fb.grid().n() || fa.grid().r_max() != fb.grid().r_max() {
        bail!("grids differ: n={} r_max={} vs n={} r_max={}", fa.grid().n(), fa.grid().r_max(), fb.grid().n(), fb.grid().r_max());
    }
    // bring b onto a's grid object so the field arithmetic accepts it
    let fb = RadialField::from_data(fa.grid(), fb.rep(), fb.data().to_vec())?;
    let rel = fa.rel_l2_distance(&fb);
    let max = (&fa.to_physical() - &fb.to_physical()).max_abs();
    println!("rel_l2,max_abs,dt");
    println!("{},{},{}", fmt_f64(rel), fmt_f64(max), fmt_f64(ta - tb));
    Ok(tol.is_none_or(|t| rel <= t))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // a closed stdout (e.g. piped into `head`) is not a failure
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: &Cli) -> Result<bool> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    if let Some((exp, overrides)) = cli.cmd.experiment() {
        let cfg = build_config(cli, exp, overrides)?;
        let report = run(&cfg)?;
        print_report(&report, &cfg.output_dir);
        return Ok(report.pass);
    }
    match &cli.cmd {
        Cmd::FieldDump { file, frequency } => field_dump(file, *frequency).map(|_| true),
        Cmd::FieldDiff { a, b, tol } => field_diff(a, b, *tol),
        Cmd::Plot { report, kind } => {
            let dir = report.clone().or_else(|| cli.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let r = RunReport::load(&dir)?;
            for p in emit_plotdata(&r, &dir, kind.parse::<PlotKind>()?)? {
                println!("{}", p.display());
            }
            Ok(true)
        }
        _ => unreachable!("experiments handled above"),
    }
}
