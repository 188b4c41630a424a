use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use critique_core::simulate::{run_study, Policy, StudyConfig, StudyReport};
use critique_core::synthetic::{generate_synthetic, SyntheticConfig};
use critique_core::{BackendKind, System, FIXTURE_DIR};
use critique_server::{app, AppState, ServeConfig};

#[derive(Parser)]
#[command(name = "critique", version, about = "Multi-step critiquing recommender")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API (and the UI bundle, if given).
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory with reviews.jsonl and items.jsonl. Defaults to the bundled fixture.
        #[arg(long)]
        data: Option<PathBuf>,
        /// TOML file with core settings and optional [[categories]].
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built UI bundle served under `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
    /// Run the simulated-user study and print its metrics.
    Simulate {
        /// Corpus directory; without it a default synthetic corpus is generated from --seed.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        sessions: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value = "per_item")]
        backend: BackendKind,
        /// target_driven or random; both when omitted.
        #[arg(long)]
        policy: Option<Policy>,
        /// Write the full reports as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(data: Option<PathBuf>, config: Option<PathBuf>, seed: Option<u64>) -> Result<(System, ServeConfig), String> {
    let config = match config {
        Some(path) => ServeConfig::load(path)?,
        None => ServeConfig::default(),
    };
    let system = match (data, seed) {
        (Some(dir), _) => System::from_dir(dir, config.core.clone()),
        (None, None) => System::from_dir(FIXTURE_DIR, config.core.clone()),
        (None, Some(seed)) => {
            let (corpus, catalog) = generate_synthetic(&SyntheticConfig {
                seed,
                ..SyntheticConfig::default()
            })
            .map_err(|e| e.to_string())?;
            System::build(corpus, catalog, config.core.clone(), Default::default())
        }
    }
    .map_err(|e| e.to_string())?;
    Ok((system, config))
}

async fn serve(
    port: u16,
    host: String,
    data: Option<PathBuf>,
    config: Option<PathBuf>,
    static_dir: Option<PathBuf>,
) -> Result<(), String> {
    let (system, config) = load(data, config, None)?;
    eprintln!(
        "loaded {} reviews, {} items in {} destinations, {} keyphrases",
        system.corpus.len(),
        system.catalog().len(),
        system.catalog().destinations().len(),
        system.vocab().len()
    );
    let mut state = AppState::new(system);
    if let Some(categories) = config.categories {
        state = state.with_categories(categories)?;
    }
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| format!("bad address: {e}"))?;
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| e.to_string())?;
    eprintln!(
        "listening on http://{}",
        listener.local_addr().map_err(|e| e.to_string())?
    );
    axum::serve(listener, app(state, static_dir))
        .await
        .map_err(|e| e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    data: Option<PathBuf>,
    config: Option<PathBuf>,
    seed: u64,
    sessions: usize,
    steps: usize,
    backend: BackendKind,
    policy: Option<Policy>,
    out: Option<PathBuf>,
) -> Result<(), String> {
    let synthetic = data.is_none().then_some(seed);
    let (system, _) = load(data, config, synthetic)?;
    let policies = match policy {
        Some(p) => vec![p],
        None => vec![Policy::TargetDriven, Policy::Random],
    };
    let mut reports: Vec<StudyReport> = Vec::new();
    for policy in policies {
        let report = run_study(
            &system,
            StudyConfig {
                seed,
                sessions,
                max_steps: steps,
                policy,
                backend,
            },
        )
        .map_err(|e| e.to_string())?;
        let m = &report.metrics;
        println!(
            "{backend} {policy:?}: success {:.3}, mean rank {:.2} -> {:.2} over {} sessions",
            m.success_rate, m.mean_initial_rank, m.mean_final_rank, m.sessions
        );
        reports.push(report);
    }
    if let [a, b] = reports.as_slice() {
        if b.metrics.success_rate > 0.0 {
            println!("success ratio: {:.2}", a.metrics.success_rate / b.metrics.success_rate);
        }
    }
    if let Some(path) = out {
        let body = serde_json::to_string_pretty(&reports).map_err(|e| e.to_string())?;
        std::fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Serve {
            port,
            host,
            data,
            config,
            static_dir,
        } => tokio::runtime::Runtime::new()
            .map_err(|e| e.to_string())
            .and_then(|rt| rt.block_on(serve(port, host, data, config, static_dir))),
        Command::Simulate {
            data,
            config,
            seed,
            sessions,
            steps,
            backend,
            policy,
            out,
        } => simulate(data, config, seed, sessions, steps, backend, policy, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
