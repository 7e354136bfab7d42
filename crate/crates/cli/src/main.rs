mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use commands::Ctx;
use config::Config;
use output::{OutDir, RunManifest, MANIFEST_NAME, MANIFEST_SCHEMA};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "fbplab", version, about = "Batch experiments for the fourth-order free boundary problem")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// flat key = value config
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// extra key=value pairs applied after the config file
    #[arg(long = "set", global = true)]
    sets: Vec<String>,
    #[arg(long, global = true, default_value = "fbplab-out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// overwrite existing outputs
    #[arg(long, global = true)]
    force: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// buckling eigenvalues of a segment
    Modes,
    /// samples of a homogeneous profile
    Homog,
    /// W, N, R and E/r² of a profile or a stored field
    Weiss,
    /// closed-form W₀ against the grid value on Goursat fields
    Goursat,
    /// epiperimetric competitor report
    Epi,
    /// discrete minimizer of the energy with clamped data
    Solve,
    /// first buckling eigenvalue over a family of plates
    Buckling,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Modes => "modes",
            Cmd::Homog => "homog",
            Cmd::Weiss => "weiss",
            Cmd::Goursat => "goursat",
            Cmd::Epi => "epi",
            Cmd::Solve => "solve",
            Cmd::Buckling => "buckling",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(fbplab::Error),
}

impl From<fbplab::Error> for CliError {
    fn from(e: fbplab::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => f.write_str(s),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let name = cli.cmd.name();
    let cfg = Config::load(name, cli.config.as_deref(), &cli.sets)?;
    let mut ctx = Ctx {
        cfg,
        jobs: cli.jobs.max(1),
        seed: cli.seed,
        force: cli.force,
        out: cli.out.clone(),
        inputs: cli.config.iter().cloned().collect(),
    };
    let out: OutDir = match cli.cmd {
        Cmd::Modes => commands::modes(&mut ctx)?,
        Cmd::Homog => commands::homog(&mut ctx)?,
        Cmd::Weiss => commands::weiss(&mut ctx)?,
        Cmd::Goursat => commands::goursat(&mut ctx)?,
        Cmd::Epi => commands::epi(&mut ctx)?,
        Cmd::Solve => commands::solve(&mut ctx)?,
        Cmd::Buckling => commands::buckling(&mut ctx)?,
    };
    let inputs = ctx
        .inputs
        .iter()
        .map(|p| {
            Ok(output::FileHash {
                path: p.display().to_string(),
                sha256: output::sha256_file(p)?,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA,
        subcommand: name.into(),
        tool_version: env!("CARGO_PKG_VERSION"),
        config: ctx.cfg.values,
        seed: ctx.seed,
        jobs: ctx.jobs,
        inputs,
        outputs: out.hashes()?,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let s = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Usage(e.to_string()))?;
    std::fs::write(out.dir.join(MANIFEST_NAME), s + "\n")
        .map_err(|e| CliError::Usage(format!("cannot write manifest: {e}")))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fbplab: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).code(), 2);
        assert_eq!(CliError::Core(fbplab::Error::Precondition("x".into())).code(), 2);
        assert_eq!(CliError::Core(fbplab::Error::Domain("x".into())).code(), 2);
        assert_eq!(CliError::Core(fbplab::Error::Numerical("x".into())).code(), 3);
        assert_eq!(CliError::Core(fbplab::Error::Truncation("x".into())).code(), 3);
    }

    #[test]
    fn numbers_and_config_lines() {
        use std::f64::consts::PI;
        assert_eq!(config::parse_number("2pi"), Some(2.0 * PI));
        assert_eq!(config::parse_number("0.5*pi"), Some(0.5 * PI));
        assert_eq!(config::parse_number("t1"), Some(fbplab::angular_modes::t1()));
        assert_eq!(config::parse_number("1e-3"), Some(1e-3));
        assert_eq!(config::parse_number("x"), None);
        let c = Config::load("modes", None, &["omega = t1 # comment".into()]).unwrap();
        assert_eq!(c.str("omega"), "t1");
        assert_eq!(c.str("n_max"), "4");
        assert!(Config::load("modes", None, &["nope=1".into()]).is_err());
        assert!(Config::load("modes", None, &["omega".into()]).is_err());
    }

    #[test]
    fn every_subcommand_has_defaults() {
        for c in ["modes", "homog", "weiss", "goursat", "epi", "solve", "buckling"] {
            assert!(config::DEFAULTS.iter().any(|d| d.0 == c), "{c}");
        }
    }
}
