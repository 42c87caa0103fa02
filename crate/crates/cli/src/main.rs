use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ssbjt_cli::{
    cmd_compare, cmd_coverage, cmd_field, cmd_fringe, cmd_select, parse_thresholds, CliError,
    RunContext,
};
use ssbjt_core::Scheme;

#[derive(Debug, Parser)]
#[command(
    name = "ssbjt",
    version,
    about = "Joint SSB transmission coverage simulator"
)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "SSBJT_OUT", default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Independent,
    JointFixed,
    JointEnhanced,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Independent => Scheme::Independent,
            SchemeArg::JointFixed => Scheme::JointFixed,
            SchemeArg::JointEnhanced => Scheme::JointEnhanced,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-cell SNR map of one scheme.
    Field {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "joint-fixed")]
        scheme: SchemeArg,
        /// Coverage threshold used by beam selection, dB.
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        gamma_ref: f64,
        /// Dominance threshold for the enhanced scheme.
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
    },
    /// Joint versus independent SNR gain maps, plan and summary.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Also evaluate the enhanced scheme with this dominance threshold.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        gamma_ref: f64,
    },
    /// Coverage probability against a threshold sweep.
    Coverage {
        #[arg(long)]
        config: PathBuf,
        /// `start:step:stop` or a comma-separated list, dB.
        #[arg(long, default_value = "0:0.5:20", allow_hyphen_values = true)]
        thresholds: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        gamma_ref: f64,
    },
    /// SNR along the line between two BSs, per phase row and combined.
    Fringe {
        #[arg(long)]
        config: PathBuf,
    },
    /// Greedy beam-tuple selection only.
    Select {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        gamma_ref: f64,
        #[arg(long)]
        alpha: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let ctx = RunContext::from_env(cli.threads);
    let out = &cli.out;
    match cli.command {
        Command::Field {
            config,
            scheme,
            gamma_ref,
            alpha,
        } => cmd_field(&config, scheme.into(), out, gamma_ref, alpha, &ctx),
        Command::Compare {
            config,
            alpha,
            gamma_ref,
        } => cmd_compare(&config, out, alpha, gamma_ref, &ctx),
        Command::Coverage {
            config,
            thresholds,
            alpha,
            gamma_ref,
        } => {
            let t = parse_thresholds(&thresholds)?;
            cmd_coverage(&config, &t, out, alpha, gamma_ref, &ctx)
        }
        Command::Fringe { config } => cmd_fringe(&config, out, &ctx),
        Command::Select {
            config,
            gamma_ref,
            alpha,
        } => cmd_select(&config, out, gamma_ref, alpha, &ctx),
    }
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
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
