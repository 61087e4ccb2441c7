//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 schedule not
//! finite, 3 verification mismatch.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::{self, DelayAnalysis, DutyCycleConfig};
use crate::error::Error;
use crate::experiment::{self, SweepSpec};
use crate::frame::{self, Pressure, SensorFrame};
use crate::planner::{self, Candidates, Objective, PlanRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_FINITE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tpms-delay", version, about = "Worst-case delay analysis for duty-cycled TPMS gateways")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form worst-case analysis of one configuration.
    Analyze(AnalyzeArgs),
    /// Check the closed forms against the slot-walking oracle.
    Verify(VerifyArgs),
    /// Analytic vs simulated delays over an (S, N) grid.
    Sweep(SweepArgs),
    /// Cumulative correctness rate of one metric in a sweep dataset.
    Ccr(CcrArgs),
    /// Longest sleep meeting a delay budget.
    Plan(PlanArgs),
    /// Encode or decode a 10-byte sensor frame.
    #[command(subcommand)]
    Frame(FrameCommand),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TextFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, env = "TPMS_CL")]
    cl: u64,
    #[arg(long, default_value_t = 1)]
    w: u64,
    #[arg(long)]
    s: u64,
    #[arg(long, default_value_t = 1)]
    n: u64,
    #[arg(long, env = "TPMS_SLOT_DURATION", default_value_t = 1.0)]
    slot_duration: f64,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 64)]
    max_cl: u64,
    /// Perturb the closed form to confirm mismatches are caught.
    #[arg(long)]
    inject_fault: bool,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, env = "TPMS_CL", default_value_t = 32)]
    cl: u64,
    #[arg(long = "s-values", value_delimiter = ',', default_values_t = [2u64, 6, 30])]
    s_values: Vec<u64>,
    #[arg(long = "n-values", value_delimiter = ',', default_values_t = [4u64, 8, 12, 16, 20, 24, 28, 32])]
    n_values: Vec<u64>,
    #[arg(long, env = "TPMS_TRIALS", default_value_t = 10_000)]
    trials: u64,
    #[arg(long, env = "TPMS_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, env = "TPMS_SLOT_DURATION", default_value_t = 1.0)]
    slot_duration: f64,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also run schedules where some phases are never heard.
    #[arg(long)]
    allow_infinite: bool,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct CcrArgs {
    dataset: PathBuf,
    #[arg(long, default_value = "worst")]
    metric: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ObjectiveArg {
    Worst,
    Expected,
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// Delay budget in slots.
    #[arg(long)]
    budget: u64,
    #[arg(long, default_value_t = 1)]
    n: u64,
    #[arg(long, env = "TPMS_CL", conflicts_with_all = ["cl_range", "cl_list"])]
    cl: Option<u64>,
    /// Inclusive range `MIN..MAX` searched exhaustively.
    #[arg(long, value_parser = parse_range, conflicts_with = "cl_list")]
    cl_range: Option<(u64, u64)>,
    /// Candidates tried in the given order.
    #[arg(long, value_delimiter = ',')]
    cl_list: Vec<u64>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Worst)]
    objective: ObjectiveArg,
    #[arg(long)]
    prefer_smaller_cl: bool,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

fn parse_range(text: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("expected MIN..MAX, got `{text}`"))?;
    let hi = hi.trim_start_matches('=');
    let parse = |v: &str| v.trim().parse::<u64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

#[derive(Subcommand, Debug)]
enum FrameCommand {
    /// Print the hex encoding of a frame given as flags or JSON.
    Encode(EncodeArgs),
    /// Print the JSON form of a hex-encoded frame.
    Decode {
        hex: String,
    },
}

#[derive(Args, Debug)]
struct EncodeArgs {
    /// Whole frame as JSON; overrides the field flags.
    #[arg(long)]
    json: Option<String>,
    #[arg(long, default_value_t = 0)]
    id: u32,
    /// kPa, multiple of 0.25.
    #[arg(long, default_value_t = 0.0)]
    pressure: f64,
    /// °C.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    temperature: i16,
    #[arg(long)]
    alert: bool,
    #[arg(long, default_value_t = 100)]
    battery: u8,
    #[arg(long, default_value_t = 0)]
    status: u8,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotFinite { .. } => EXIT_NOT_FINITE,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_USAGE, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: EXIT_USAGE, message: e.to_string() }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };

    let result = match cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Ccr(a) => ccr(a, out),
        Command::Plan(a) => plan(a, out),
        Command::Frame(a) => frame_cmd(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn render_analysis(a: &DelayAnalysis, out: &mut dyn Write) -> std::io::Result<()> {
    let c = &a.config;
    writeln!(out, "c_l={} w={} s={} n={} slot_duration={}", c.c_l(), c.w(), c.s(), c.n_sensors(), c.slot_duration())?;
    writeln!(out, "finite={}", a.finite)?;
    if !a.finite {
        let g = crate::cycle::gcd(c.c_l(), c.period()).unwrap_or(0);
        writeln!(out, "reason=gcd(C_L={}, W+S={}) = {g}: some arrival phases are never received", c.c_l(), c.period())?;
    }
    let int = |v: Option<u64>| v.map_or("n/a".to_string(), |v| v.to_string());
    let real = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
    writeln!(out, "t_max={}", int(a.t_max))?;
    writeln!(out, "c_l_min={}", int(a.c_l_min))?;
    writeln!(out, "n_sleep_min={}", int(a.n_sleep_min))?;
    writeln!(out, "w_delay={}", int(a.w_delay))?;
    writeln!(out, "wait_after_arrival={}", int(a.wait_after_arrival))?;
    writeln!(out, "pr_success={:.6}", a.pr_success)?;
    writeln!(out, "pr_collision={:.6}", a.pr_collision)?;
    writeln!(out, "expected_worst_delay={}", real(a.expected_worst_delay))?;
    writeln!(out, "average_delay={}", real(a.average_delay))?;
    writeln!(out, "power_saving_pct={:.4}", a.power_saving_ratio)?;
    writeln!(out, "w_delay_sec={}", real(a.w_delay_seconds))?;
    writeln!(out, "expected_worst_delay_sec={}", real(a.expected_worst_delay_seconds))
}

fn analyze(args: AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let config = DutyCycleConfig::general(args.cl, args.w, args.s, args.n)?.with_slot_duration(args.slot_duration)?;
    let analysis = analytics::analyze(&config)?;
    match args.format {
        TextFormat::Text => render_analysis(&analysis, out)?,
        TextFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&analysis)?)?,
    }
    Ok(if analysis.finite { EXIT_OK } else { EXIT_NOT_FINITE })
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let summary = experiment::verify_range(args.max_cl, args.inject_fault)?;
    match args.format {
        TextFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?,
        TextFormat::Text => {
            writeln!(
                out,
                "checked={} finite={} mismatches={}",
                summary.checked,
                summary.finite,
                summary.mismatches.len()
            )?;
            for m in &summary.mismatches {
                writeln!(
                    out,
                    "mismatch c_l={} s={} finiteness={} t_max={} w_delay={} c_l_min={} n_sleep_min={}",
                    m.c_l, m.s, m.finiteness_match, m.t_max_match, m.w_delay_match, m.c_l_min_match, m.n_sleep_min_match
                )?;
            }
            writeln!(out, "{}", if summary.passed() { "PASS" } else { "FAIL" })?;
        }
    }
    Ok(if summary.passed() { EXIT_OK } else { EXIT_MISMATCH })
}

fn sweep(args: SweepArgs, out: &mut dyn Write) -> CmdResult {
    let spec = SweepSpec {
        s_values: args.s_values,
        n_values: args.n_values,
        c_l: args.cl,
        trials: args.trials,
        base_seed: args.seed,
        slot_duration: args.slot_duration,
        allow_infinite: args.allow_infinite,
        parallel: !args.sequential,
    };
    let dataset = experiment::run_sweep(&spec)?;
    let mut sink: Box<dyn Write + '_> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(out),
    };
    match args.format {
        DataFormat::Csv => experiment::write_csv(&dataset, &mut sink)?,
        DataFormat::Json => experiment::write_json(&dataset, &mut sink)?,
    }
    sink.flush()?;
    Ok(EXIT_OK)
}

fn ccr(args: CcrArgs, out: &mut dyn Write) -> CmdResult {
    let dataset = experiment::read_dataset(File::open(&args.dataset)?)?;
    let value = experiment::dataset_ccr(&dataset, &args.metric)?;
    writeln!(out, "metric={} ccr={value:.4}", args.metric)?;
    Ok(EXIT_OK)
}

fn plan(args: PlanArgs, out: &mut dyn Write) -> CmdResult {
    let candidates = match (args.cl, args.cl_range, args.cl_list.is_empty()) {
        (Some(c), _, _) => Candidates::Fixed(c),
        (None, Some((min, max)), _) => Candidates::Range { min, max },
        (None, None, false) => Candidates::Ordered(args.cl_list),
        (None, None, true) => {
            return Err(Failure { code: EXIT_USAGE, message: "one of --cl, --cl-range or --cl-list is required".into() })
        }
    };
    let request = PlanRequest {
        delay_budget: args.budget,
        n_sensors: args.n,
        candidates,
        objective: match args.objective {
            ObjectiveArg::Worst => Objective::BoundWorstDelay,
            ObjectiveArg::Expected => Objective::BoundExpectedDelay,
        },
        prefer_smaller_cl: args.prefer_smaller_cl,
    };
    let result = planner::plan(&request)?;
    match args.format {
        TextFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?,
        TextFormat::Text => {
            writeln!(out, "feasible={}", result.feasible)?;
            writeln!(out, "c_l={}", result.c_l)?;
            writeln!(out, "s={}", result.s)?;
            writeln!(out, "achieved_delay={:.4}", result.achieved_delay)?;
            writeln!(out, "power_saving_pct={:.4}", result.power_saving_ratio)?;
        }
    }
    Ok(EXIT_OK)
}

fn frame_cmd(cmd: FrameCommand, out: &mut dyn Write) -> CmdResult {
    match cmd {
        FrameCommand::Encode(a) => {
            let f = match a.json {
                Some(json) => serde_json::from_str::<SensorFrame>(&json)?,
                None => SensorFrame {
                    sensor_id: a.id,
                    pressure: Pressure::from_kpa(a.pressure)?,
                    temperature: a.temperature,
                    alert: a.alert,
                    battery: a.battery,
                    status: a.status,
                },
            };
            writeln!(out, "{}", frame::to_hex(&frame::encode(&f)?))?;
        }
        FrameCommand::Decode { hex } => {
            let f = frame::decode(&frame::from_hex(&hex)?)?;
            writeln!(out, "{}", serde_json::to_string(&f)?)?;
        }
    }
    Ok(EXIT_OK)
}
