use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use qscomb::config::{load_config, SimulationConfig};
use qscomb::dressed::{DressedAtom, PumpParams};
use qscomb::response::Response;
use qscomb::run::{run_sweep, simulate, write_simulation, write_sweep};
use qscomb::specfun::{Hyp2F1, Hyp2F1Params};
use qscomb::validation::{run_suite, Suite};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qscomb",
    version,
    about = "Probe pulse-train formation in a pump-dressed two-level gas"
)]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, env = "QSCOMB_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Envelope at the configured depth, with metrics, plot and manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write timing.json (not covered by the manifest).
        #[arg(long)]
        timing: bool,
    },
    /// Train metrics while one numeric config field takes each listed value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted path such as medium.rho.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Oracle comparison suites; exit code 4 on any breach.
    Validate {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        /// Write the report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Special-function evaluation.
    Specfun {
        #[command(subcommand)]
        command: SpecfunCommand,
    },
    /// Dressed-atom amplitudes.
    Atom {
        #[command(subcommand)]
        command: AtomCommand,
    },
    /// Response integrals.
    Response {
        #[command(subcommand)]
        command: ResponseCommand,
    },
}

#[derive(Subcommand)]
enum SpecfunCommand {
    /// ₂F₁(a, b; c; u) and the transformation used; complex values as `re,im`.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
    },
}

#[derive(Args)]
struct TraceRange {
    /// Start, in units of T.
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    from: f64,
    /// End, in units of T.
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = 201)]
    n: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AtomCommand {
    /// f(t), g(t) on a uniform grid.
    Trace {
        #[arg(long, conflicts_with_all = ["v0", "delta", "switch_time"])]
        config: Option<PathBuf>,
        #[arg(long)]
        v0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[arg(long = "T")]
        switch_time: Option<f64>,
        #[command(flatten)]
        range: TraceRange,
    },
}

#[derive(Subcommand)]
enum ResponseCommand {
    /// σ₁, σ₂, θ₁, θ₂ and R(τ) on a uniform grid.
    Trace {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        range: TraceRange,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: qscomb::Error| e.to_string())
}

fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    let mut parts = s.split(',').map(str::trim);
    let re: f64 = parts
        .next()
        .unwrap_or("")
        .parse()
        .with_context(|| format!("bad number in {s:?}"))?;
    let im: f64 = match parts.next() {
        Some(p) => p.parse().with_context(|| format!("bad number in {s:?}"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        bail!("expected `re` or `re,im`, got {s:?}");
    }
    Ok(Complex64::new(re, im))
}

fn grid(range: &TraceRange, t: f64) -> anyhow::Result<Vec<f64>> {
    if range.n < 2 || range.to <= range.from {
        return Err(qscomb::Error::config(
            "range",
            "n ≥ 2 and from < to",
            format!("n={} [{}, {}]", range.n, range.from, range.to),
        )
        .into());
    }
    Ok((0..range.n)
        .map(|i| (range.from + (range.to - range.from) * i as f64 / (range.n - 1) as f64) * t)
        .collect())
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load(path: &Path) -> anyhow::Result<SimulationConfig> {
    load_config(path).map_err(anyhow::Error::from)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Simulate { config, out, timing } => {
            let cfg = load(&config)?;
            let start = Instant::now();
            let result = simulate(&cfg)?;
            let elapsed = start.elapsed().as_secs_f64();
            let manifest = write_simulation(&result, &out)?;
            if timing {
                let t = format!("{{\n  \"wall_s\": {elapsed}\n}}\n");
                std::fs::write(out.join("timing.json"), t)?;
            }
            match &result.metrics {
                Ok(m) => println!(
                    "period {:.6e} s  fwhm {:.6e} s  contrast {:.6}  mean gain {:.6}  peaks {}",
                    m.repetition_period, m.peak_fwhm, m.contrast, m.mean_gain, m.n_peaks
                ),
                Err(e) => println!("no train metrics: {e}"),
            }
            log::info!("wrote {} files to {}", manifest.files.len() + 1, out.display());
            Ok(0)
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let cfg = load(&config)?;
            let rows = run_sweep(&cfg, &param, &values)?;
            write_sweep(&cfg, &param, &rows, &out)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{} rows, {failed} without metrics", rows.len());
            Ok(0)
        }
        Command::Validate { suite, report } => {
            let r = run_suite(suite)?;
            for c in &r.checks {
                println!("{c}");
            }
            if let Some(p) = report {
                std::fs::write(&p, serde_json_string(&r)?)?;
            }
            println!("suite {}: {}", r.suite, if r.passed() { "passed" } else { "FAILED" });
            Ok(if r.passed() { 0 } else { EXIT_VALIDATION })
        }
        Command::Specfun {
            command: SpecfunCommand::Eval { a, b, c, u },
        } => {
            let p = Hyp2F1Params::new(parse_complex(&a)?, parse_complex(&b)?, parse_complex(&c)?);
            let h = Hyp2F1::new(p)?;
            let v = h.eval(u)?;
            println!("{:.17e} {:+.17e}i  branch={}", v.re, v.im, h.branch(u));
            Ok(0)
        }
        Command::Atom {
            command:
                AtomCommand::Trace {
                    config,
                    v0,
                    delta,
                    switch_time,
                    range,
                },
        } => {
            let pump = match (config, v0, delta, switch_time) {
                (Some(c), ..) => load(&c)?.pump,
                (None, Some(v0), Some(delta), Some(t)) => {
                    let p = PumpParams::new(v0, delta, t);
                    p.validate()?;
                    p
                }
                _ => {
                    return Err(qscomb::Error::config(
                        "atom trace",
                        "--config or all of --v0 --delta --T",
                        "incomplete",
                    )
                    .into())
                }
            };
            let atom = DressedAtom::new(pump)?;
            let mut s = String::from("t_s,re_f,im_f,re_g,im_g,norm_defect\n");
            for t in grid(&range, pump.switch_time)? {
                let a = atom.amplitudes(t)?;
                s.push_str(&format!(
                    "{t:e},{:e},{:e},{:e},{:e},{:e}\n",
                    a.f.re,
                    a.f.im,
                    a.g.re,
                    a.g.im,
                    a.norm_defect()
                ));
            }
            emit(&range.out, &s)?;
            Ok(0)
        }
        Command::Response {
            command: ResponseCommand::Trace { config, range },
        } => {
            let cfg = load(&config)?;
            let resp = Response::new(&cfg.pump, &cfg.probe, &cfg.medium, cfg.mode, cfg.regime, Some(cfg.t0))?;
            let taus = grid(&range, cfg.pump.switch_time)?;
            let ints = resp.trace(&taus)?;
            let mut s = String::from(
                "tau_s,re_sigma1,im_sigma1,re_sigma2,im_sigma2,re_theta1,im_theta1,re_theta2,im_theta2,re_R,im_R\n",
            );
            for (t, i) in taus.iter().zip(&ints) {
                let r = resp.response(*t, &resp.amplitudes(*t)?, i);
                s.push_str(&format!(
                    "{t:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                    i.sigma1.re,
                    i.sigma1.im,
                    i.sigma2.re,
                    i.sigma2.im,
                    i.theta1.re,
                    i.theta1.im,
                    i.theta2.re,
                    i.theta2.im,
                    r.re,
                    r.im
                ));
            }
            emit(&range.out, &s)?;
            Ok(0)
        }
    }
}

fn serde_json_string(r: &qscomb::validation::SuiteReport) -> anyhow::Result<String> {
    // the core crate owns serde_json; go through its error type
    qscomb::validation::report_json(r).map_err(Into::into)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qscomb::Error>() {
        Some(e) if e.is_config() || matches!(e, qscomb::Error::Io(_)) => EXIT_CONFIG,
        Some(_) => EXIT_NUMERIC,
        None => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
