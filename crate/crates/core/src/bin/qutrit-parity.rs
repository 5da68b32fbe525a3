use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qutrit_parity::experiment::{cmd_compile, cmd_run, cmd_sweep, Mode, RunConfig, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(version, about = "Permutation parity on a single spin-1 qutrit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algorithm for one permutation.
    Run {
        #[command(flatten)]
        common: Common,
        /// Standard name (f1..f6) or Cauchy text such as "(1 0 -1 / 0 1 -1)".
        #[arg(long)]
        permutation: Option<String>,
    },
    /// Run all six permutations and tabulate the verdicts.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Compile a named gate to a pulse program.
    Compile {
        /// F, Finv, I, S12, S23, S13 or U1..U6.
        gate: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, help = output_dir_help())]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, help = output_dir_help())]
    output_dir: Option<PathBuf>,
    /// Gaussian flip-angle error per pulse, degrees.
    #[arg(long)]
    noise_sigma_deg: Option<f64>,
}

fn output_dir_help() -> String {
    format!("Output directory [default: ${OUTPUT_DIR_ENV}, else ./qutrit-parity-out]")
}

fn load(path: Option<&PathBuf>) -> qutrit_parity::Result<RunConfig> {
    path.map_or_else(|| Ok(RunConfig::default()), |p| RunConfig::load(p))
}

impl Common {
    fn config(&self) -> qutrit_parity::Result<RunConfig> {
        let mut c = load(self.config.as_ref())?;
        if let Some(m) = self.mode {
            c.mode = m;
        }
        if let Some(s) = self.seed {
            c.noise.seed = s;
        }
        if let Some(d) = &self.output_dir {
            c.output_dir = Some(d.clone());
        }
        if let Some(s) = self.noise_sigma_deg {
            c.noise.pulse_angle_sigma_deg = s;
        }
        Ok(c)
    }
}

fn execute(cli: Cli) -> qutrit_parity::Result<i32> {
    match cli.command {
        Command::Run { common, permutation } => {
            let mut c = common.config()?;
            if permutation.is_some() {
                c.permutation = permutation;
            }
            let out = cmd_run(&c)?;
            let r = &out.record;
            match r.verdict {
                Some(v) => println!("{} {}: {v}", r.permutation, r.cauchy),
                None => println!("{} {}: unclassifiable", r.permutation, r.cauchy),
            }
            Ok(out.status.code())
        }
        Command::Sweep { common, repetitions } => {
            let mut c = common.config()?;
            if let Some(n) = repetitions {
                c.noise.repetitions = n;
            }
            let s = cmd_sweep(&c)?;
            println!("accuracy {}/{} = {}", s.correct, s.total, s.accuracy);
            if s.unclassifiable > 0 {
                println!("unclassifiable {}", s.unclassifiable);
            }
            Ok(s.status().code())
        }
        Command::Compile {
            gate,
            config,
            output_dir,
        } => {
            let mut c = load(config.as_ref())?;
            if output_dir.is_some() {
                c.output_dir = output_dir;
            }
            let (seq, _) = cmd_compile(&gate, &c.resolved_output_dir())?;
            println!(
                "{}: {} events, fidelity {}, phase_exact {}",
                seq.gate.name,
                seq.events.len(),
                seq.fidelity,
                seq.phase_exact
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
