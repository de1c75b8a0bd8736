//! `vso`: batch front-end over vso-core.
//!
//! Exit codes: 0 success, 1 validation failure or core error, 2 usage error.
//! Core errors are printed to stderr as `error[Code]: message`.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vso_core::{
    compare_configurations, count_configurations, enumerate_configurations, generate_script, store,
    Configuration, Criterion, DslVocabulary, Endpoint, Environment, KnowledgeBase,
};
use vso_service::{AppState, ServiceConfig};

#[derive(Parser)]
#[command(
    name = "vso",
    version,
    about = "Compose virtual simulation objects and generate workflow scripts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a catalog; exit 0 iff it is clean. The report goes to stderr.
    Validate { catalog: PathBuf },
    /// Edit an environment file: add instances, connections, or every
    /// current suggestion.
    Compose {
        #[command(flatten)]
        files: EnvFiles,
        /// Image to instantiate (repeatable).
        #[arg(long = "instantiate", value_name = "IMAGE")]
        instantiate: Vec<String>,
        /// `SOURCE=TARGET` endpoint pair to connect (repeatable).
        #[arg(long = "connect", value_name = "SOURCE=TARGET")]
        connect: Vec<String>,
        /// Apply all suggestions in order, skipping invalidated ones.
        #[arg(long)]
        auto_connect: bool,
        /// Output file; defaults to overwriting --env.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the configuration count, then one configuration key per line.
    Enumerate {
        #[command(flatten)]
        files: EnvFiles,
        /// Print at most this many keys.
        #[arg(long, default_value_t = 10_000)]
        limit: usize,
    },
    /// Rank configurations by estimated time.
    Compare {
        #[command(flatten)]
        files: EnvFiles,
        #[arg(long, default_value = "total", value_name = "total|critical-path")]
        criterion: String,
        #[arg(long, default_value_t = 1.0)]
        data_units: f64,
    },
    /// Generate a workflow script.
    Generate {
        #[command(flatten)]
        files: EnvFiles,
        /// Vocabulary file; the generic vocabulary when omitted.
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Configuration key; the environment's current choices when omitted.
        #[arg(long)]
        config: Option<String>,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "VSO_ADDR", default_value = vso_service::DEFAULT_ADDR)]
        addr: SocketAddr,
        #[arg(long, env = "VSO_CATALOG")]
        catalog: PathBuf,
        /// Additional vocabulary files (repeatable).
        #[arg(long)]
        vocab: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct EnvFiles {
    #[arg(long)]
    catalog: PathBuf,
    /// Environment file; created by `compose` if missing.
    #[arg(long)]
    env: PathBuf,
}

enum Failure {
    Core(vso_core::Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
    Other(String),
}

impl From<vso_core::Error> for Failure {
    fn from(e: vso_core::Error) -> Self {
        Failure::Core(e)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn knowledge(path: &Path) -> Result<KnowledgeBase, Failure> {
    Ok(KnowledgeBase::new(store::load_catalog(&read(path)?)?)?)
}

fn environment(path: &Path, kb: &KnowledgeBase) -> Result<Environment, Failure> {
    let env = store::load_environment(&read(path)?)?;
    let report = env.validate(kb);
    if !report.is_clean() {
        return Err(vso_core::Error::ValidationFailed(report).into());
    }
    Ok(env)
}

fn load(files: &EnvFiles) -> Result<(KnowledgeBase, Environment), Failure> {
    let kb = knowledge(&files.catalog)?;
    let env = environment(&files.env, &kb)?;
    Ok((kb, env))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { catalog } => {
            let (catalog, report) = store::parse_catalog(&read(&catalog)?)?;
            if !report.is_clean() {
                return Err(vso_core::Error::ValidationFailed(report).into());
            }
            println!(
                "ok: {} images, {} models, {} methods, {} implementing packages",
                catalog.images.len(),
                catalog.models.len(),
                catalog.methods.len(),
                catalog.implementing_packages.len()
            );
        }
        Command::Compose {
            files,
            instantiate,
            connect,
            auto_connect,
            output,
        } => {
            let kb = knowledge(&files.catalog)?;
            let mut env = if files.env.exists() {
                environment(&files.env, &kb)?
            } else {
                let id = files
                    .env
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "env".into());
                Environment::for_knowledge(id, &kb)
            };
            for image in &instantiate {
                println!("instance {}", env.instantiate(&kb, image)?);
            }
            for pair in &connect {
                let (src, tgt) = pair.split_once('=').ok_or_else(|| {
                    Failure::Usage(format!("--connect expects SOURCE=TARGET, got `{pair}`"))
                })?;
                let (src, tgt): (Endpoint, Endpoint) = (src.parse()?, tgt.parse()?);
                env.connect(&kb, &src, &tgt)?;
                println!("connected {src} -> {tgt}");
            }
            if auto_connect {
                for c in env.apply_all_suggestions(&kb)? {
                    println!("connected {} -> {}", c.source, c.target);
                }
            }
            write(
                output.as_deref().unwrap_or(&files.env),
                &store::save_environment(&env),
            )?;
        }
        Command::Enumerate { files, limit } => {
            let (kb, env) = load(&files)?;
            let count = count_configurations(&env, &kb)?;
            println!("{count}");
            if count <= limit as u128 {
                for c in enumerate_configurations(&env, &kb)? {
                    println!("{}", c.key());
                }
            } else {
                eprintln!("{count} configurations exceed --limit {limit}; keys not listed");
            }
        }
        Command::Compare {
            files,
            criterion,
            data_units,
        } => {
            let criterion: Criterion = criterion.parse()?;
            let (kb, env) = load(&files)?;
            let configs = enumerate_configurations(&env, &kb)?;
            let reports = compare_configurations(&env, &kb, &configs, criterion, data_units)?;
            println!("rank\t{criterion}\ttotal\tcritical_path\tpackages\tconfiguration\tnotes");
            for (i, r) in reports.iter().enumerate() {
                let mut notes = Vec::new();
                if !r.missing_perf.is_empty() {
                    notes.push(format!("no perf: {}", r.missing_perf.join(",")));
                }
                if let Some(e) = &r.error {
                    notes.push(e.clone());
                }
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    i + 1,
                    r.value(criterion),
                    r.total_time,
                    r.critical_path_time,
                    r.package_count,
                    r.key,
                    notes.join("; ")
                );
            }
        }
        Command::Generate {
            files,
            vocab,
            config,
            output,
        } => {
            let (kb, env) = load(&files)?;
            let vocab = match vocab {
                Some(p) => store::load_vocabulary(&read(&p)?)?,
                None => DslVocabulary::generic(kb.catalog()),
            };
            let config = match config {
                Some(k) => Configuration::parse_key(&k)?,
                None => Configuration::current(&env),
            };
            let script = generate_script(&env, &kb, &config, &vocab)?;
            match output {
                Some(p) => write(&p, script.text.as_bytes())?,
                None => print!("{}", script.text),
            }
        }
        Command::Serve { addr, catalog, vocab } => {
            let config = ServiceConfig {
                addr,
                catalog,
                vocabularies: vocab,
            };
            let state: AppState = config.load_state().map_err(Failure::Other)?;
            eprintln!("listening on http://{addr}/v1/");
            tokio::runtime::Runtime::new()
                .and_then(|rt| rt.block_on(vso_service::serve(addr, state)))
                .map_err(|e| Failure::Other(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error[Io]: {}: {e}", path.display());
            ExitCode::from(1)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
