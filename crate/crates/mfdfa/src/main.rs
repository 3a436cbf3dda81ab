use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfdfa::analysis::PipelineParams;
use mfdfa::pipeline::{run_pipeline, InputMode, RunConfig};
use mfdfa::report::{emit_plot_data, emit_report, read_report, ReportFormat};
use mfdfa::surrogates::{Aggregation, SurrogateKind};
use mfdfa::synth::{synth_command, SynthModel};
use mfdfa::{verify, Error, DATA_DIR_ENV};

#[derive(Parser)]
#[command(name = "mfdfa", version, about = "Multifractal detrended fluctuation analysis of return series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse one or more series and write the report, width table and plot data.
    Analyze(AnalyzeArgs),
    /// Write a synthetic return series usable with `--mode returns`.
    Synth(SynthArgs),
    /// Compare a report against the published INR widths.
    Verify {
        /// Report written by `analyze`.
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input file; relative paths that do not exist are looked up in $MFDFA_DATA_DIR.
    #[arg(long)]
    input: PathBuf,
    /// Column(s) to analyse, comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    column: Vec<String>,
    #[arg(long, value_enum, default_value = "prices")]
    mode: Mode,
    /// Scale grid as MIN:MAX:COUNT.
    #[arg(long, default_value = "16:1024:19")]
    scales: String,
    /// Moment grid as MIN:MAX:STEP.
    #[arg(long, default_value = "-5:5:0.25", allow_hyphen_values = true)]
    q: String,
    /// Detrending polynomial order (1-3).
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Surrogate kinds, comma separated; pass `none` for none.
    #[arg(long, value_delimiter = ',', default_value = "shuffle,phase")]
    surrogates: Vec<SurrogateArg>,
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    #[arg(long, value_enum, default_value = "mean-of-widths")]
    aggregation: AggregationArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run surrogate realizations on one thread.
    #[arg(long)]
    serial: bool,
    #[arg(long, default_value = "mfdfa-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Prices,
    Returns,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SurrogateArg {
    Shuffle,
    Phase,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregationArg {
    MeanOfWidths,
    WidthOfMeanSpectrum,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Series length for the noise models.
    #[arg(long, default_value_t = 4726)]
    length: usize,
    /// Degrees of freedom of the Student-t model.
    #[arg(long, default_value_t = 3.0)]
    dof: f64,
    /// Cascade levels (length 2^levels).
    #[arg(long, default_value_t = 13)]
    levels: u32,
    /// Cascade multiplier in (0.5, 1).
    #[arg(long, default_value_t = 0.6)]
    weight: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    WhiteNoise,
    StudentT,
    Cascade,
}

fn split3<T: std::str::FromStr, U: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T, U), Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("{what} must look like MIN:MAX:N, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((
        parts[0].trim().parse().map_err(|_| bad())?,
        parts[1].trim().parse().map_err(|_| bad())?,
        parts[2].trim().parse().map_err(|_| bad())?,
    ))
}

fn resolve_input(input: &Path) -> PathBuf {
    if input.is_relative() && !input.exists() {
        if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
            return Path::new(&dir).join(input);
        }
    }
    input.to_path_buf()
}

fn analyze(args: AnalyzeArgs) -> Result<(), Error> {
    let (scale_min, scale_max, scale_count) = split3::<usize, usize>(&args.scales, "--scales")?;
    let (q_min, q_max, q_step) = split3::<f64, f64>(&args.q, "--q")?;
    let surrogates = args
        .surrogates
        .iter()
        .filter_map(|s| match s {
            SurrogateArg::Shuffle => Some(SurrogateKind::Shuffle),
            SurrogateArg::Phase => Some(SurrogateKind::PhaseRandomize),
            SurrogateArg::None => None,
        })
        .collect();
    let cfg = RunConfig {
        input: resolve_input(&args.input),
        columns: args.column,
        mode: match args.mode {
            Mode::Prices => InputMode::Prices,
            Mode::Returns => InputMode::Returns,
        },
        params: PipelineParams {
            scale_min,
            scale_max,
            scale_count,
            q_min,
            q_max,
            q_step,
            detrend_order: args.order,
            ..PipelineParams::default()
        },
        surrogates,
        realizations: args.realizations,
        aggregation: match args.aggregation {
            AggregationArg::MeanOfWidths => Aggregation::MeanOfWidths,
            AggregationArg::WidthOfMeanSpectrum => Aggregation::WidthOfMeanSpectrum,
        },
        master_seed: args.seed,
        parallel: !args.serial,
    };
    let report = run_pipeline(&cfg)?;
    for s in &report.series {
        if s.validation.zero_warning {
            eprintln!(
                "warning: {} has {:.1}% zero returns",
                s.name,
                100.0 * s.validation.zero_fraction
            );
        }
        if s.skipped_rows > 0 {
            eprintln!("note: {} skipped {} blank or non-numeric rows", s.name, s.skipped_rows);
        }
    }
    emit_report(&report, &args.out.join("report.json"), ReportFormat::Json)?;
    emit_report(&report, &args.out.join("table1.tsv"), ReportFormat::Table)?;
    emit_plot_data(&report, &args.out)?;
    print!("{}", mfdfa::report::summary_table(&report));
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    let model = match args.model {
        Model::WhiteNoise => SynthModel::WhiteNoise { length: args.length },
        Model::StudentT => SynthModel::StudentT { length: args.length, dof: args.dof },
        Model::Cascade => SynthModel::Cascade { levels: args.levels, weight: args.weight },
    };
    let series = synth_command(model, args.seed, &args.out)?;
    eprintln!("wrote {} values to {}", series.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Synth(args) => synth(args),
        Command::Verify { report } => match read_report(&report) {
            Ok(report) => {
                let outcomes = verify::verify(&report);
                for o in &outcomes {
                    println!("{}", o.line());
                }
                return if outcomes.iter().all(|o| o.passed) { ExitCode::SUCCESS } else { ExitCode::from(1) };
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
