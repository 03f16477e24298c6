//! `phasecorr`: correlation reports, figure sweeps, heterodyne Monte Carlo
//! runs and two-mode composite checks.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical
//! failure or a failed tolerance check. An infeasible convex fit is reported
//! inside the output and does not fail the run.

mod composite;
mod config;
mod error;
mod figure;
mod output;
mod pairs;
mod report;
mod sample;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{check_b, check_schedule, load, CompositeSpec, Format, GridOverride, RunConfig, StateSpec};
use crate::error::{config, CliError};
use crate::output::Outcome;

#[derive(Parser, Debug)]
#[command(name = "phasecorr", version, about, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantum, measured, causal and reference correlations of one state.
    Report(StateArgs),
    /// Ratio of measured to causal local correlation over a parameter sweep.
    Figure(FigureArgs),
    /// Simulated heterodyne readings and their estimates.
    Sample(StateArgs),
    /// Pair-marginal verification for EPR and entangled coherent states.
    Composite(CompositeArgs),
}

#[derive(Args, Debug)]
struct StateArgs {
    /// Run configuration (TOML, or JSON with a .json extension).
    #[arg(long)]
    config: Option<PathBuf>,
    /// State specification file.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    b: Option<f64>,
    /// Comma-separated list of b values.
    #[arg(long, value_delimiter = ',')]
    b_schedule: Option<Vec<f64>>,
    #[arg(long)]
    grid_n: Option<usize>,
    /// Half-width of the position grid around the state's mean.
    #[arg(long)]
    grid_span: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Bins per axis for sampled conditional means.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where `sample` writes its JSON summary (default: standard output).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated b/Δq values.
    #[arg(long, value_delimiter = ',')]
    b_schedule: Option<Vec<f64>>,
    /// Comma-separated ΔqΔp values, each at least 1/2.
    #[arg(long, value_delimiter = ',')]
    dqdp_schedule: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Epr,
    EntangledCoherent,
}

#[derive(Args, Debug)]
struct CompositeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    alpha1: Option<f64>,
    #[arg(long)]
    alpha2: Option<f64>,
    #[arg(long)]
    q0: Option<f64>,
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Displacement of the first factor as `re,im`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    /// Displacement of the second factor as `re,im`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Option<Vec<f64>>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    /// Extra coordinate pair to verify, e.g. `q1-q2,p1+p2`; repeatable.
    #[arg(long)]
    pair: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn base_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    path.as_deref().map(load).transpose().map(Option::unwrap_or_default)
}

fn state_and_grid(a: &StateArgs, c: &RunConfig) -> Result<(StateSpec, GridOverride), CliError> {
    let state = match &a.state {
        Some(path) => load::<StateSpec>(path)?,
        None => c
            .state
            .clone()
            .ok_or_else(|| config("no state given (use --state or a [state] table)"))?,
    };
    state.validate()?;
    let base = c.grid.unwrap_or_default();
    let grid = GridOverride {
        n: a.grid_n.or(base.n),
        span: a.grid_span.or(base.span),
    };
    grid.validate()?;
    Ok((state, grid))
}

fn report_settings(a: &StateArgs) -> Result<report::ReportSettings, CliError> {
    if a.samples.is_some() || a.seed.is_some() || a.bins.is_some() || a.summary.is_some() {
        return Err(config("--samples, --seed, --bins and --summary apply to sample only"));
    }
    let c = base_config(&a.config)?;
    let (state, grid) = state_and_grid(a, &c)?;
    if a.b.is_some() && a.b_schedule.is_some() {
        return Err(config("give either --b or --b-schedule, not both"));
    }
    let b_values = match (&a.b_schedule, a.b, &c.b_schedule, c.b) {
        (Some(s), _, _, _) => s.clone(),
        (None, Some(b), _, _) => vec![b],
        (None, None, Some(s), _) => s.clone(),
        (None, None, None, Some(b)) => vec![b],
        (None, None, None, None) => vec![1.0],
    };
    check_schedule("b", &b_values)?;
    Ok(report::ReportSettings {
        state,
        grid,
        b_values,
        format: a.format.or(c.format).unwrap_or_default(),
        out: a.out.clone().or(c.out),
    })
}

fn sample_settings(a: &StateArgs) -> Result<sample::SampleSettings, CliError> {
    let c = base_config(&a.config)?;
    let (state, grid) = state_and_grid(a, &c)?;
    if a.b_schedule.is_some() || (a.b.is_none() && c.b_schedule.is_some()) {
        return Err(config("sample takes a single b"));
    }
    if a.format.or(c.format).is_some_and(|f| f != Format::Csv) {
        return Err(config(
            "sample writes CSV samples and a JSON summary; --format json is not accepted",
        ));
    }
    let samples = a.samples.or(c.samples).unwrap_or(sample::DEFAULT_SAMPLES);
    let required = phasecorr_core::arthurs_kelly::MIN_ESTIMATE_SAMPLES;
    if samples < required {
        return Err(config(format!("need at least {required} samples, got {samples}")));
    }
    let bins = a.bins.or(c.bins).unwrap_or(sample::DEFAULT_BINS);
    if bins == 0 {
        return Err(config("bins must be positive"));
    }
    Ok(sample::SampleSettings {
        state,
        grid,
        b: check_b(a.b.or(c.b).unwrap_or(1.0))?,
        samples,
        seed: a.seed.or(c.seed).unwrap_or(sample::DEFAULT_SEED),
        bins,
        out: a.out.clone().or(c.out),
        summary: a.summary.clone().or(c.summary),
    })
}

fn figure_settings(a: &FigureArgs) -> Result<figure::FigureSettings, CliError> {
    let c = base_config(&a.config)?;
    let b_over_dq = a
        .b_schedule
        .clone()
        .or(c.b_schedule)
        .unwrap_or_else(|| figure::DEFAULT_B_OVER_DQ.to_vec());
    let dqdp = a
        .dqdp_schedule
        .clone()
        .or(c.dqdp_schedule)
        .unwrap_or_else(|| figure::DEFAULT_DQDP.to_vec());
    check_schedule("b/dq schedule", &b_over_dq)?;
    check_schedule("dqdp schedule", &dqdp)?;
    if let Some(v) = dqdp.iter().find(|&&v| v < 0.5) {
        return Err(config(format!("uncertainty products must be at least 1/2, got {v}")));
    }
    Ok(figure::FigureSettings {
        b_over_dq,
        dqdp,
        format: a.format.or(c.format).unwrap_or(Format::Csv),
        out: a.out.clone().or(c.out),
    })
}

fn pair_args(raw: &[String]) -> Result<Vec<[String; 2]>, CliError> {
    raw.iter()
        .map(|p| {
            p.split_once(',')
                .map(|(x, y)| [x.to_string(), y.to_string()])
                .ok_or_else(|| config(format!("--pair expects `x,y`, got `{p}`")))
        })
        .collect()
}

fn complex_arg(name: &str, v: &Option<Vec<f64>>) -> Result<Option<[f64; 2]>, CliError> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[re, im]) => Ok(Some([re, im])),
        Some(other) => Err(config(format!("--{name} takes `re,im`, got {} values", other.len()))),
    }
}

fn composite_settings(a: &CompositeArgs) -> Result<composite::CompositeSettings, CliError> {
    let c = base_config(&a.config)?;
    let mut spec = match (a.kind, c.composite) {
        (Some(Kind::Epr), Some(s @ CompositeSpec::Epr { .. })) => s,
        (Some(Kind::EntangledCoherent), Some(s @ CompositeSpec::EntangledCoherent { .. })) => s,
        (Some(Kind::Epr), _) => CompositeSpec::Epr {
            alpha1: 1.0,
            alpha2: 1.0,
            q0: 0.0,
            p0: 0.0,
            pairs: Vec::new(),
        },
        (Some(Kind::EntangledCoherent), _) => CompositeSpec::EntangledCoherent {
            m: 0,
            n: 0,
            alpha: [0.0; 2],
            beta: [0.0; 2],
            omega: 1.0,
            t0: 0.0,
            pairs: Vec::new(),
        },
        (None, Some(s)) => s,
        (None, None) => return Err(config("no composite kind given (use --kind or a [composite] table)")),
    };
    let extra = pair_args(&a.pair)?;
    match &mut spec {
        CompositeSpec::Epr {
            alpha1,
            alpha2,
            q0,
            p0,
            pairs,
        } => {
            if a.m.is_some()
                || a.n.is_some()
                || a.alpha.is_some()
                || a.beta.is_some()
                || a.omega.is_some()
                || a.t0.is_some()
            {
                return Err(config(
                    "--m, --n, --alpha, --beta, --omega and --t0 apply to entangled-coherent only",
                ));
            }
            *alpha1 = a.alpha1.unwrap_or(*alpha1);
            *alpha2 = a.alpha2.unwrap_or(*alpha2);
            *q0 = a.q0.unwrap_or(*q0);
            *p0 = a.p0.unwrap_or(*p0);
            pairs.extend(extra);
        }
        CompositeSpec::EntangledCoherent {
            m,
            n,
            alpha,
            beta,
            omega,
            t0,
            pairs,
        } => {
            if a.alpha1.is_some() || a.alpha2.is_some() || a.q0.is_some() || a.p0.is_some() {
                return Err(config("--alpha1, --alpha2, --q0 and --p0 apply to epr only"));
            }
            *m = a.m.unwrap_or(*m);
            *n = a.n.unwrap_or(*n);
            *alpha = complex_arg("alpha", &a.alpha)?.unwrap_or(*alpha);
            *beta = complex_arg("beta", &a.beta)?.unwrap_or(*beta);
            *omega = a.omega.unwrap_or(*omega);
            *t0 = a.t0.unwrap_or(*t0);
            pairs.extend(extra);
        }
    }
    let pairs = match &spec {
        CompositeSpec::Epr { pairs, .. } | CompositeSpec::EntangledCoherent { pairs, .. } => pairs,
    };
    for [x, y] in pairs {
        pairs::parse_pair(&format!("{x},{y}")).map_err(config)?;
    }
    Ok(composite::CompositeSettings {
        spec,
        out: a.out.clone().or(c.out),
    })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Report(a) => report::run(&report_settings(a)?),
        Command::Figure(a) => figure::run(&figure_settings(a)?),
        Command::Sample(a) => sample::run(&sample_settings(a)?),
        Command::Composite(a) => composite::run(&composite_settings(a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|o| output::write_all(&o.documents).map(|_| o));
    match outcome {
        Ok(o) if o.failed_checks.is_empty() => ExitCode::SUCCESS,
        Ok(o) => {
            eprintln!("phasecorr: tolerance checks failed: {}", o.failed_checks.join(", "));
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("phasecorr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
