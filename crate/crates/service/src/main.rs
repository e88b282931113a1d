use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use cinebot_service::convert::{convert, MovieLensFiles};
use cinebot_service::store::DEFAULT_TTL_HOURS;
use cinebot_service::{api, repl, replay, Engine, EngineFiles, SeedSource, Service, SessionStore, TranscriptDoc};

/// Conversational movie recommender.
#[derive(Parser)]
#[command(name = "cinebot", version)]
struct Cli {
    #[command(flatten)]
    data: DataArgs,
    /// Address the HTTP API listens on.
    #[arg(long, env = "CINEBOT_LISTEN", default_value = "127.0.0.1:8080")]
    listen: String,
    /// Directory for session snapshots and transcripts.
    #[arg(long, env = "CINEBOT_SESSION_DIR", default_value = "sessions")]
    session_dir: PathBuf,
    /// Keep sessions in memory only.
    #[arg(long, env = "CINEBOT_NO_PERSIST")]
    no_persist: bool,
    /// Hours a session may stay idle before it is discarded.
    #[arg(long, env = "CINEBOT_SESSION_TTL_HOURS", default_value_t = DEFAULT_TTL_HOURS)]
    session_ttl_hours: i64,
    /// Base seed for sessions created without one.
    #[arg(long, env = "CINEBOT_SEED")]
    seed: Option<u64>,
    /// Chat in the terminal instead of serving HTTP.
    #[arg(long, env = "CINEBOT_REPL")]
    repl: bool,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args)]
struct DataArgs {
    /// Catalog in JSON lines; defaults to the bundled sample.
    #[arg(long, env = "CINEBOT_CATALOG")]
    catalog: Option<PathBuf>,
    /// NLG template file.
    #[arg(long, env = "CINEBOT_TEMPLATES")]
    templates: Option<PathBuf>,
    /// NLU pattern registry.
    #[arg(long, env = "CINEBOT_PATTERNS")]
    patterns: Option<PathBuf>,
    /// Dialogue policy configuration.
    #[arg(long, env = "CINEBOT_POLICY")]
    policy: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert a MovieLens CSV export into a catalog file.
    ConvertMovielens {
        #[arg(long)]
        movies: PathBuf,
        #[arg(long)]
        ratings: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        links: Option<PathBuf>,
        /// Skip movies with fewer ratings than this.
        #[arg(long, default_value_t = 1)]
        min_votes: u64,
        /// Output file; stdout if omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Replay a structured transcript and print the resulting state.
    Replay { transcript: PathBuf },
}

fn engine(data: &DataArgs) -> anyhow::Result<Engine> {
    Engine::load(&EngineFiles {
        catalog: data.catalog.clone(),
        templates: data.templates.clone(),
        patterns: data.patterns.clone(),
        policy: data.policy.clone(),
    })
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();

    match &cli.command {
        Some(Cmd::ConvertMovielens { movies, ratings, tags, links, min_votes, out }) => {
            let files = MovieLensFiles {
                movies: movies.clone(),
                ratings: ratings.clone(),
                tags: tags.clone(),
                links: links.clone(),
            };
            let report = match out {
                Some(path) => {
                    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
                    convert(&files, *min_votes, &mut w)?
                }
                None => convert(&files, *min_votes, &mut std::io::stdout().lock())?,
            };
            eprintln!("{}", serde_json::to_string(&report)?);
            return Ok(());
        }
        Some(Cmd::Replay { transcript }) => {
            let text = std::fs::read_to_string(transcript).with_context(|| format!("reading {}", transcript.display()))?;
            let doc: TranscriptDoc = serde_json::from_str(&text)?;
            let session = replay(&engine(&cli.data)?, &doc)?;
            println!("{}", serde_json::to_string_pretty(&session.conversation)?);
            return Ok(());
        }
        None => {}
    }

    let engine = Arc::new(engine(&cli.data)?);
    let dir = (!cli.no_persist).then(|| cli.session_dir.clone());
    let store = SessionStore::new(dir, chrono::Duration::hours(cli.session_ttl_hours))?;
    let seeds = cli.seed.map_or(SeedSource::Random, SeedSource::fixed);
    let service = Arc::new(Service::new(engine, store, seeds));

    if cli.repl {
        let stdin = tokio::io::BufReader::new(tokio::io::stdin());
        return repl::run(&service, None, stdin, tokio::io::stdout()).await;
    }

    let purger = service.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(std::time::Duration::from_secs(600));
        loop {
            tick.tick().await;
            match purger.store().purge_expired().await {
                Ok(0) => {}
                Ok(n) => tracing::info!(removed = n, "expired sessions purged"),
                Err(e) => tracing::warn!("purge failed: {e}"),
            }
        }
    });

    let listener = tokio::net::TcpListener::bind(&cli.listen)
        .await
        .with_context(|| format!("binding {}", cli.listen))?;
    tracing::info!(addr = %cli.listen, "listening");
    axum::serve(listener, api::router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
