use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use causal_bandits::env::EnvSpec;
use causal_bandits::harness::{
    builtin_experiment, inspect_env, run_experiment, ExperimentConfig, RunOptions, BUILTIN_NAMES,
};
use causal_bandits::Error;
use clap::{Parser, Subcommand};

/// Causal bandit experiments.
#[derive(Parser)]
#[command(name = "causal-bandits", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in experiment or a JSON experiment config and write a CSV.
    Run {
        /// Built-in name (see `list`) or path to a config file.
        target: String,
        /// Override the number of trials.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path [default: ./results/<name>.csv].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads [default: available parallelism].
        #[arg(long)]
        jobs: Option<usize>,
        /// Use the config's full-scale trial count.
        #[arg(long)]
        full_scale: bool,
        /// Also write every trial's result as JSON to this path.
        #[arg(long)]
        dump_trials: Option<PathBuf>,
    },
    /// Print exact arm means, gaps and structural facts of an environment.
    Inspect {
        /// Built-in name, experiment config, or environment JSON file.
        target: String,
        /// Grid value to apply for experiment configs [default: first value].
        #[arg(long)]
        sweep_value: Option<f64>,
    },
    /// List the built-in experiments.
    List,
}

/// Exit 2 for bad input, 1 for failures during a run.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn from_error(err: Error, source: &Source) -> Self {
        let code = if err.is_config() { 2 } else { 1 };
        Failure { code, message: source.diagnose(&err) }
    }

    fn config(message: String) -> Self {
        Failure { code: 2, message }
    }

    fn runtime(message: String) -> Self {
        Failure { code: 1, message }
    }
}

/// Where a config came from, for error messages.
enum Source {
    Builtin(String),
    File { path: PathBuf, text: String },
}

impl Source {
    fn load(target: &str) -> Result<Self, Failure> {
        if BUILTIN_NAMES.contains(&target) {
            return Ok(Source::Builtin(target.to_string()));
        }
        let path = PathBuf::from(target);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(Source::File { path, text }),
            Err(e) => Err(Failure::config(format!(
                "{target}: cannot read config ({e}); built-in experiments are {}",
                BUILTIN_NAMES.join(", ")
            ))),
        }
    }

    fn label(&self) -> String {
        match self {
            Source::Builtin(name) => name.clone(),
            Source::File { path, .. } => path.display().to_string(),
        }
    }

    /// Prefixes the error with `file:line:` when it can be located.
    fn diagnose(&self, err: &Error) -> String {
        let Source::File { text, .. } = self else {
            return format!("{}: {err}", self.label());
        };
        let line = match err {
            Error::Json(e) if e.line() > 0 => Some(e.line()),
            Error::Config(msg) => msg
                .split_once(':')
                .and_then(|(field, _)| find_key_line(text, field)),
            _ => None,
        };
        match line {
            Some(n) => format!("{}:{n}: {err}", self.label()),
            None => format!("{}: {err}", self.label()),
        }
    }

    fn config(&self) -> Result<ExperimentConfig, Failure> {
        match self {
            Source::Builtin(name) => builtin_experiment(name),
            Source::File { text, .. } => ExperimentConfig::from_json(text),
        }
        .map_err(|e| Failure::from_error(e, self))
    }
}

/// 1-based line of the first `"key":` in `text`.
fn find_key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{}\"", key.trim());
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { target, trials, seed, out, jobs, full_scale, dump_trials } => {
            cmd_run(&target, trials, seed, out, jobs, full_scale, dump_trials)
        }
        Command::Inspect { target, sweep_value } => cmd_inspect(&target, sweep_value),
        Command::List => cmd_list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_list() -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    for name in BUILTIN_NAMES {
        let cfg = builtin_experiment(name).expect("built-in configs are valid");
        let labels: Vec<&str> = cfg.policies.iter().map(|p| p.label()).collect();
        writeln!(
            stdout,
            "{name:<6} {} over {} ({} points), {} trials: {}",
            cfg.metric.name(),
            cfg.sweep.variable.name(),
            cfg.sweep.values.len(),
            cfg.trials,
            labels.join(", ")
        )
        .map_err(|e| Failure::runtime(e.to_string()))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    target: &str,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    full_scale: bool,
    dump_trials: Option<PathBuf>,
) -> Result<(), Failure> {
    if jobs == Some(0) {
        return Err(Failure::config("--jobs must be at least 1".into()));
    }
    let source = Source::load(target)?;
    let config = source.config()?.with_overrides(trials, seed, full_scale);
    let out = out.unwrap_or_else(|| Path::new("results").join(format!("{}.csv", config.name)));

    let step = std::sync::atomic::AtomicUsize::new(0);
    let progress = |done: usize, total: usize| {
        let pct = done * 20 / total.max(1);
        if step.fetch_max(pct, std::sync::atomic::Ordering::Relaxed) < pct || done == total {
            eprint!("\r{}: {done}/{total} runs", config.name);
            if done == total {
                eprintln!();
            }
        }
    };
    let output = run_experiment(&config, &RunOptions { jobs, progress: Some(&progress) })
        .map_err(|e| Failure::from_error(e, &source))?;

    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))?;
    }
    let file = fs::File::create(&out).map_err(|e| Failure::runtime(format!("{}: {e}", out.display())))?;
    output
        .write_csv(io::BufWriter::new(file))
        .map_err(|e| Failure::runtime(format!("{}: {e}", out.display())))?;
    if let Some(path) = dump_trials {
        fs::write(&path, output.trials_json())
            .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    }

    let mut stdout = io::stdout().lock();
    let mut print = || -> io::Result<()> {
        writeln!(
            stdout,
            "{:<24} {:>12} {:>14} {:>12}",
            "policy",
            config.sweep.variable.name(),
            "mean",
            "stderr"
        )?;
        for row in &output.rows {
            writeln!(
                stdout,
                "{:<24} {:>12} {:>14.6} {:>12.6}",
                row.policy, row.sweep_value, row.mean, row.stderr
            )?;
        }
        Ok(())
    };
    print().map_err(|e| Failure::runtime(e.to_string()))?;
    if output.rows.iter().any(|r| r.stderr_is_degenerate()) {
        eprintln!("note: a single trial per point; stderr is reported as 0");
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn cmd_inspect(target: &str, sweep_value: Option<f64>) -> Result<(), Failure> {
    let source = Source::load(target)?;
    let spec = match &source {
        Source::File { text, .. } if !looks_like_experiment(text) => {
            EnvSpec::from_json(text).map_err(|e| Failure::from_error(e, &source))?
        }
        _ => {
            let config = source.config()?;
            let value = sweep_value.or(config.sweep.values.first().copied()).ok_or_else(|| {
                Failure::config(format!("{}: sweep has no values", source.label()))
            })?;
            config.env_spec_at(value).map_err(|e| Failure::from_error(e, &source))?
        }
    };
    let env = spec.build().map_err(|e| Failure::from_error(e, &source))?;
    let report = inspect_env(&env).map_err(|e| Failure::from_error(e, &source))?;
    print!("{report}");
    Ok(())
}

fn looks_like_experiment(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text)
        .map(|v| v.get("env").is_some())
        .unwrap_or(false)
}
