use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::Parser;
use touchscope_core::layout::RingRadii;
use touchscope_service::{router, AppState, ServiceConfig, SessionStore};
use tracing_subscriber::EnvFilter;

#[derive(Debug, Parser)]
#[command(name = "touchscope-serve", about = "Serve touch sessions over HTTP")]
struct Args {
    /// Directory holding uploaded sessions.
    #[arg(long, env = "TOUCHSCOPE_STORE", default_value = "touchscope-store")]
    store: PathBuf,
    #[arg(long, env = "TOUCHSCOPE_BIND", default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Resampling size when a cluster request gives none.
    #[arg(long, env = "TOUCHSCOPE_N_SAMPLES", default_value_t = 32)]
    n_samples: usize,
    /// Default touch,move,lift ring radii.
    #[arg(long, env = "TOUCHSCOPE_RING_RADII", default_value = "0.30,0.42,0.54")]
    ring_radii: String,
}

fn parse_radii(s: &str) -> anyhow::Result<RingRadii> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad ring radii {s:?}"))?;
    let [touch, moving, lift] = values[..] else {
        bail!("expected three ring radii, got {}", values.len());
    };
    Ok(RingRadii {
        touch,
        moving,
        lift,
    })
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")),
        )
        .init();
    let args = Args::parse();
    if args.n_samples < 2 {
        bail!("--n-samples must be at least 2");
    }
    let store = SessionStore::open(&args.store)
        .with_context(|| format!("opening store at {}", args.store.display()))?;
    let state = AppState {
        store: Arc::new(store),
        config: ServiceConfig {
            default_samples: args.n_samples,
            ring_radii: parse_radii(&args.ring_radii)?,
        },
    };
    let listener = tokio::net::TcpListener::bind(args.bind)
        .await
        .with_context(|| format!("binding {}", args.bind))?;
    tracing::info!(addr = %args.bind, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
