use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use codeattn_cli::{
    cmd_analyze, cmd_lint_corpus, cmd_replay, cmd_sensitivity, cmd_validate_aoi, CliError, Overrides, RunManifest,
};
use codeattn_service::{StudyConfig, StudyService};

#[derive(Parser)]
#[command(name = "codeattn", version, about = "Developer and model attention over buggy code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ManifestArgs {
    /// Run manifest (TOML)
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Session file or directory
    #[arg(long)]
    sessions: Option<PathBuf>,
    /// Model dump file or directory
    #[arg(long)]
    dumps: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n_bins: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl ManifestArgs {
    fn resolve(self) -> Result<RunManifest, CliError> {
        let overrides = Overrides {
            corpus: self.corpus,
            sessions: self.sessions,
            dumps: self.dumps,
            output: self.output,
            alpha: self.alpha,
            n_bins: self.n_bins,
            seed: self.seed,
        };
        let base = match &self.manifest {
            Some(p) => RunManifest::load(p)?,
            None => {
                let need = |v: &Option<PathBuf>, name: &str| {
                    v.clone()
                        .ok_or_else(|| CliError::Input(format!("--{name} is required without --manifest")))
                };
                RunManifest::new(
                    need(&overrides.corpus, "corpus")?,
                    need(&overrides.sessions, "sessions")?,
                    need(&overrides.output, "output")?,
                )
            }
        };
        Ok(base.apply(overrides))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Correlations, shares, DFU and temporal profiles for a cohort
    Analyze(ManifestArgs),
    /// Attention vector and heat rendering of one session
    Replay {
        #[arg(long)]
        corpus: PathBuf,
        session: PathBuf,
    },
    /// Attention share inside areas of interest
    ValidateAoi {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        sessions: PathBuf,
        #[arg(long)]
        aoi: PathBuf,
    },
    /// Mean correlations under simulated window sizes
    Sensitivity {
        #[command(flatten)]
        manifest: ManifestArgs,
        /// Window sizes, 1..=7
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4, 5, 6, 7])]
        windows: Vec<usize>,
    },
    /// Run the study HTTP service
    Serve(ServeArgs),
    /// Check that a corpus loads and summarise its tokens
    LintCorpus {
        corpus: PathBuf,
    },
}

#[derive(Args)]
struct ServeArgs {
    /// Service config (TOML); flags and environment override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "CODEATTN_CORPUS")]
    corpus: Option<PathBuf>,
    #[arg(long, env = "CODEATTN_STORAGE_DIR")]
    storage_dir: Option<PathBuf>,
    #[arg(long, env = "CODEATTN_LISTEN")]
    listen: Option<std::net::SocketAddr>,
    #[arg(long, env = "CODEATTN_TASKS_PER_PARTICIPANT")]
    tasks_per_participant: Option<usize>,
    #[arg(long, env = "CODEATTN_SEED")]
    seed: Option<u64>,
}

fn serve(args: ServeArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            toml::from_str::<StudyConfig>(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
        }
        None => {
            let corpus = args.corpus.clone().ok_or_else(|| CliError::Input("--corpus is required".into()))?;
            let storage = args
                .storage_dir
                .clone()
                .ok_or_else(|| CliError::Input("--storage-dir is required".into()))?;
            StudyConfig::new(corpus, storage)
        }
    };
    config.corpus = args.corpus.unwrap_or(config.corpus);
    config.storage_dir = args.storage_dir.unwrap_or(config.storage_dir);
    config.listen = args.listen.unwrap_or(config.listen);
    config.tasks_per_participant = args.tasks_per_participant.unwrap_or(config.tasks_per_participant);
    config.seed = args.seed.unwrap_or(config.seed);

    let service = StudyService::open(config).map_err(|e| CliError::Input(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    runtime
        .block_on(codeattn_service::http::run(service))
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => {
            let out = cmd_analyze(&args.resolve()?)?;
            print!("{}", out.text);
        }
        Command::Replay { corpus, session } => print!("{}", cmd_replay(&corpus, &session)?),
        Command::ValidateAoi { corpus, sessions, aoi } => print!("{}", cmd_validate_aoi(&corpus, &sessions, &aoi)?.text),
        Command::Sensitivity { manifest, windows } => print!("{}", cmd_sensitivity(&manifest.resolve()?, &windows)?.to_csv()),
        Command::Serve(args) => serve(args)?,
        Command::LintCorpus { corpus } => print!("{}", cmd_lint_corpus(&corpus)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
