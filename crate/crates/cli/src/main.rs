use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::AtomicBool;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sciq_core::bus::{ConstantLength, ControllerNode, SpineNode};
use sciq_core::harness::{
    self, comparison_table, jump_experiment, load_config, locktest, peak_report, polyfit2, preprocess,
    read_samples, resolve_spine, write_samples, HarnessConfig, HarnessError, LockScenario,
};
use sciq_core::lock::replay::{write_trace, TraceRow};
use sciq_core::lock::{LockCommand, LockState, SpineController};
use sciq_core::sim::{run_jump_trial, Scenario, SimFault, SpineMode, TrialConfig, TrialFailure};
use sciq_core::spine::{ModelError, SampleDirection};

#[derive(Parser)]
#[command(name = "sciq", version, about = "Compliant spine experiments: characterization, lock tests, jump trials, spine bus nodes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Simulated force-gauge sweeps with slider friction
    Characterize {
        /// weak|medium|strong or a spine TOML file
        #[arg(long)]
        spine: Option<String>,
        #[arg(long)]
        trials: Option<u32>,
        /// Slider friction, N
        #[arg(long)]
        f0: Option<f64>,
        /// Gauge noise std-dev, N
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        clogging: bool,
    },
    /// Decimate and outlier-filter gauge samples
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        decimation: Option<usize>,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Quadratic fit per sweep direction
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Scripted lock/unlock scenario
    Locktest {
        #[arg(value_parser = parse_scenario)]
        scenario: LockScenario,
    },
    /// Batch of seeded jump trials
    Jump {
        /// rigid|locked|compliant|both
        #[arg(long, default_value = "both")]
        mode: String,
        /// nominal|tilted_landing
        #[arg(long, default_value = "nominal", value_parser = parse_trial_scenario)]
        scenario: Scenario,
        #[arg(long)]
        trials: Option<u32>,
        /// Run trials one after another
        #[arg(long)]
        serial: bool,
        /// Print the mode comparison table to stderr
        #[arg(long)]
        table: bool,
        /// Write the time series of trial 0 of each mode here
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Force peak of a spine configuration
    Peak {
        #[arg(long)]
        spine: Option<String>,
    },
    /// Spine node: ticks the lock logic and publishes state
    ServeSpine {
        /// Ticks to run (default: forever)
        #[arg(long)]
        ticks: Option<u64>,
        /// Length reported by both sensors, m
        #[arg(long, default_value_t = 0.08)]
        length: f64,
        #[arg(long)]
        locked: bool,
    },
    /// Controller node: optionally sends a command, prints received state
    ServeController {
        /// stay-unlocked|stay-locked|lock|unlock
        #[arg(long, value_parser = parse_command)]
        send: Option<LockCommand>,
        /// Listening time, s
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
    },
}

fn parse_scenario(s: &str) -> Result<LockScenario, String> {
    s.parse()
}

fn parse_trial_scenario(s: &str) -> Result<Scenario, String> {
    s.parse()
}

fn parse_command(s: &str) -> Result<LockCommand, String> {
    match s {
        "stay-unlocked" => Ok(LockCommand::StayUnlocked),
        "stay-locked" => Ok(LockCommand::StayLocked),
        "lock" => Ok(LockCommand::Lock),
        "unlock" => Ok(LockCommand::Unlock),
        other => Err(format!("unknown command '{other}'")),
    }
}

fn parse_modes(s: &str) -> Result<Vec<SpineMode>> {
    if s == "both" {
        return Ok(vec![SpineMode::Rigid, SpineMode::Compliant]);
    }
    s.split(',')
        .map(|m| m.trim().parse::<SpineMode>().map_err(|e| HarnessError::Config(e).into()))
        .collect()
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(mut w: impl Write, v: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn open_input(p: &Path) -> Result<File> {
    File::open(p).with_context(|| format!("opening {}", p.display()))
}

fn run(cli: Cli) -> Result<()> {
    let common = cli.common;
    let cfg = match &common.config {
        Some(p) => load_config(p)?,
        None => HarnessConfig::default(),
    };
    let out_path = common.out.as_deref();

    match cli.cmd {
        Command::Characterize { spine, trials, f0, sigma, points, clogging } => {
            let spine_cfg = match spine {
                Some(s) => resolve_spine(&s)?,
                None => cfg.spine_config()?,
            };
            let mut opts = cfg.characterize.clone();
            opts.trials = trials.unwrap_or(opts.trials);
            opts.friction_f0 = f0.unwrap_or(opts.friction_f0);
            opts.sigma = sigma.unwrap_or(opts.sigma);
            opts.points = points.unwrap_or(opts.points);
            opts.clogging |= clogging;
            opts.seed = common.seed.unwrap_or(opts.seed);
            let run = harness::characterize(&spine_cfg, &opts)?;
            if run.extension_clogged {
                log::warn!("friction exceeds spine force on the sweep; extension readings suppressed");
            }
            let w = output(out_path)?;
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => write_samples(w, &run.samples)?,
                Format::Json => write_json(w, &serde_json::json!({ "schema_version": harness::SCHEMA_VERSION, "run": run }))?,
            }
        }
        Command::Preprocess { input, decimation, k } => {
            let samples = read_samples(open_input(&input)?)?;
            let report = preprocess(
                &samples,
                decimation.unwrap_or(cfg.preprocess.decimation),
                k.unwrap_or(cfg.preprocess.outlier_k),
            )?;
            log::info!("{} samples, {} after decimation, {} outliers removed", report.input, report.decimated, report.removed.len());
            let w = output(out_path)?;
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => write_samples(w, &report.kept)?,
                Format::Json => write_json(w, &serde_json::json!({ "schema_version": harness::SCHEMA_VERSION, "report": report }))?,
            }
        }
        Command::Fit { input } => {
            let samples = read_samples(open_input(&input)?)?;
            let mut fits = Vec::new();
            for dir in [SampleDirection::Compression, SampleDirection::Extension, SampleDirection::Model] {
                let pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.direction == dir).map(|s| (s.h_m, s.f_n)).collect();
                if !pts.is_empty() {
                    fits.push(polyfit2(&pts, Some(dir))?);
                }
            }
            if fits.is_empty() {
                return Err(HarnessError::Data("no samples to fit".into()).into());
            }
            let mut w = output(out_path)?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => write_json(w, &serde_json::json!({ "schema_version": harness::SCHEMA_VERSION, "fits": fits }))?,
                Format::Csv => {
                    writeln!(w, "direction,a0,a1,a2,residual_rms,n")?;
                    for f in &fits {
                        let dir = serde_json::to_value(f.direction)?;
                        writeln!(w, "{},{},{},{},{},{}", dir.as_str().unwrap_or(""), f.a0, f.a1, f.a2, f.residual_rms, f.n)?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Locktest { scenario } => {
            let run = locktest(scenario, &cfg.lock)?;
            log::info!(
                "final {} with {} engage / {} retract",
                run.final_state.label(),
                run.engage_count,
                run.retract_count
            );
            let w = output(out_path)?;
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => write_trace(w, &run.trace)?,
                Format::Json => write_json(w, &serde_json::json!({ "schema_version": harness::SCHEMA_VERSION, "run": run }))?,
            }
        }
        Command::Jump { mode, scenario, trials, serial, table, trace_dir } => {
            let modes = parse_modes(&mode)?;
            let trials = trials.unwrap_or(cfg.jump.trials);
            let seed = common.seed.unwrap_or(cfg.jump.sim.seed);
            let base = &cfg.jump.sim;
            let exp = jump_experiment(base, &modes, scenario, trials, seed, cfg.jump.parallel && !serial)?;
            if let Some(dir) = trace_dir {
                std::fs::create_dir_all(&dir)?;
                for &m in &modes {
                    let tc = TrialConfig { mode: m, scenario, seed: harness::derive_trial_seed(seed, 0), ..base.clone() };
                    let log = match run_jump_trial(&tc) {
                        Ok(o) => o.log,
                        Err(f) => f.log,
                    };
                    let path = dir.join(format!("{}_{}_trial0.csv", m.label(), scenario.label()));
                    log.write_csv(BufWriter::new(File::create(&path)?))?;
                }
            }
            if table {
                eprint!("{}", comparison_table(&exp));
            }
            let mut w = output(out_path)?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => write_json(w, &exp)?,
                Format::Csv => {
                    writeln!(w, "mode,trial,seed,max_height,max_vz,peak_landing_decel,min_spine_length,touchdown_spine_length,front_foot_slip,success,fault")?;
                    for r in &exp.records {
                        match &r.metrics {
                            Some(m) => writeln!(
                                w,
                                "{},{},{},{},{},{},{},{},{},{},",
                                r.mode.label(), r.trial, r.seed, m.max_height, m.max_vz, m.peak_landing_decel,
                                m.min_spine_length, m.touchdown_spine_length, m.front_foot_slip, m.success
                            )?,
                            None => writeln!(
                                w,
                                "{},{},{},,,,,,,false,\"{}\"",
                                r.mode.label(), r.trial, r.seed,
                                r.fault.as_deref().unwrap_or("").replace('"', "'")
                            )?,
                        }
                    }
                    w.flush()?;
                }
            }
            if exp.summaries.iter().all(|s| s.completed == 0) {
                bail!(SimFault::Config("every trial faulted".into()));
            }
        }
        Command::Peak { spine } => {
            let spine_cfg = match spine {
                Some(s) => resolve_spine(&s)?,
                None => cfg.spine_config()?,
            };
            let report = peak_report(&spine_cfg)?;
            let mut w = output(out_path)?;
            match common.format {
                None => {
                    write!(w, "{report}")?;
                    w.flush()?;
                }
                Some(Format::Json) => write_json(w, &report)?,
                Some(Format::Csv) => {
                    let v = serde_json::to_value(&report)?;
                    writeln!(w, "key,value")?;
                    for (k, val) in v.as_object().into_iter().flatten() {
                        let cell = match val {
                            serde_json::Value::Null => String::new(),
                            serde_json::Value::String(s) => s.clone(),
                            other => other.to_string(),
                        };
                        writeln!(w, "{k},{cell}")?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::ServeSpine { ticks, length, locked } => {
            let bus = cfg.bus.clone().with_env_overrides();
            let initial = if locked {
                let hole = sciq_core::lock::nearest_hole(length, &cfg.lock.holes)?;
                LockState::Locked { h_lock: hole }
            } else {
                LockState::Unlocked
            };
            let ctrl = SpineController::new(cfg.lock.clone(), initial, length)?;
            let mut node = SpineNode::new(ctrl, ConstantLength(length), &bus)?;
            log::info!("spine node publishing to {}, commands on {}", bus.state_endpoint(), bus.cmd_endpoint());
            let stop = AtomicBool::new(false);
            let outputs = node.run(ticks, &stop)?;
            if out_path.is_some() || common.format.is_some() {
                let rows: Vec<TraceRow> = outputs.iter().map(|o| TraceRow::from_output(o, None)).collect();
                let w = output(out_path)?;
                match common.format.unwrap_or(Format::Csv) {
                    Format::Csv => write_trace(w, &rows)?,
                    Format::Json => write_json(w, &rows)?,
                }
            }
            log::info!("spine node stopped after {} ticks, {} commands", outputs.len(), node.commands_seen());
        }
        Command::ServeController { send, duration } => {
            let bus = cfg.bus.clone().with_env_overrides();
            let mut node = ControllerNode::new(&bus)?;
            let start = Instant::now();
            if let Some(cmd) = send {
                let seq = node.send(cmd, 0)?;
                log::info!("sent {cmd:?} as seq {seq} to {}", bus.cmd_endpoint());
            }
            let mut w = output(out_path)?;
            writeln!(w, "seq,h_est_m,lock_state,health,alarm")?;
            let until = start + Duration::from_secs_f64(duration.max(0.0));
            while let Some(left) = until.checked_duration_since(Instant::now()) {
                if let Some((seq, s)) = node.next_state(left)? {
                    writeln!(w, "{seq},{},{:?},{:?},{}", s.h_est_m(), s.lock_state, s.health, s.alarm as u8)?;
                }
            }
            w.flush()?;
            let st = node.subscriber_stats();
            log::info!("received {} frames ({} stale, {} dropped)", st.received, st.stale, st.dropped);
        }
    }
    Ok(())
}

/// 2 for configuration problems, 3 for spine-model domain errors, 4 for
/// simulator faults, 1 for anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(h) = cause.downcast_ref::<HarnessError>() {
            return match h {
                HarnessError::Config(_) | HarnessError::Lock(_) => 2,
                HarnessError::Model(ModelError::Config(_)) => 2,
                HarnessError::Model(_) => 3,
                HarnessError::Sim(_) => 4,
                _ => 1,
            };
        }
        if let Some(m) = cause.downcast_ref::<ModelError>() {
            return if matches!(m, ModelError::Config(_)) { 2 } else { 3 };
        }
        if cause.downcast_ref::<SimFault>().is_some() || cause.downcast_ref::<TrialFailure>().is_some() {
            return 4;
        }
        if cause.downcast_ref::<sciq_core::lock::LockError>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
