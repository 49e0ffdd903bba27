use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use touchscope_cli::{
    cmd_cluster, cmd_ingest, cmd_layout, cmd_synth, cmd_verify_ui, expand_logs, load_log,
    load_logs, read_regions, ClusterOptions,
};
use touchscope_core::layout::RingRadii;
use touchscope_core::metrics::{DEFAULT_SAMPLES, DEFAULT_WEIGHT_EUCLID};
use touchscope_core::{EventFilter, LayoutConfig, SemanticRegion};

#[derive(Debug, Parser)]
#[command(name = "touchscope", version, about = "Analyse touch interaction logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Dots {
    Touch,
    Move,
    Lift,
    All,
}

impl From<Dots> for EventFilter {
    fn from(d: Dots) -> Self {
        match d {
            Dots::Touch => EventFilter::Down,
            Dots::Move => EventFilter::Move,
            Dots::Lift => EventFilter::Up,
            Dots::All => EventFilter::All,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse logs and print a summary per session.
    Ingest {
        /// Log files or directories of *.log files.
        #[arg(required = true)]
        logs: Vec<PathBuf>,
    },
    /// Fit confidence regions to UI elements and report their placement.
    VerifyUi {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long)]
        regions: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.95, 0.99])]
        confidence: Vec<f64>,
        /// Which events count as touches of a region.
        #[arg(long, value_enum, default_value = "touch")]
        dots: Dots,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster movement gestures and describe each cluster.
    Cluster {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long, default_value_t = 13)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        n_samples: usize,
        #[arg(long, default_value_t = DEFAULT_WEIGHT_EUCLID)]
        weight_euclid: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Drop gestures shorter than this; defaults to twice the fitted
        /// joystick radius (needs a "joystick" region), else 150 px.
        #[arg(long)]
        min_length_px: Option<f64>,
        /// Subtract each trajectory's mean before the cosine term.
        #[arg(long)]
        center_cosine: bool,
        #[arg(long)]
        regions: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the radial timeline of one session.
    Layout {
        log: PathBuf,
        #[arg(long)]
        regions: Option<PathBuf>,
        /// touch,move,lift ring radii.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        rings: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the scripted fixture logs and regions files.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn regions_or_empty(path: Option<&Path>) -> Result<Vec<SemanticRegion>> {
    path.map(read_regions)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { logs } => {
            let paths = expand_logs(&logs)?;
            let sessions = paths
                .iter()
                .map(|p| load_log(p))
                .collect::<Result<Vec<_>>>()?;
            print!("{}", cmd_ingest(&sessions));
        }
        Command::VerifyUi {
            logs,
            regions,
            confidence,
            dots,
            out,
        } => {
            let sessions = load_logs(&logs)?;
            let regions = read_regions(&regions)?;
            let result = cmd_verify_ui(&sessions, &regions, &confidence, dots.into())?;
            let text = result.table.to_text();
            print!("{text}");
            if let Some(dir) = out {
                write_out(&dir, "ui-report.txt", &text)?;
                write_out(&dir, "ui-overlay.svg", &result.overlay_svg)?;
            }
        }
        Command::Cluster {
            logs,
            k,
            n_samples,
            weight_euclid,
            seed,
            min_length_px,
            center_cosine,
            regions,
            out,
        } => {
            let sessions = load_logs(&logs)?;
            let regions = regions_or_empty(regions.as_deref())?;
            let opts = ClusterOptions {
                k,
                n_samples,
                weight_euclid,
                seed,
                min_length_px,
                center_cosine,
            };
            let result = cmd_cluster(&sessions, &regions, &opts)?;
            let text = result.report.to_text();
            print!("{text}");
            if let Some(dir) = out {
                write_out(&dir, "cluster-report.txt", &text)?;
                write_out(&dir, "clusters.svg", &result.svg)?;
            }
        }
        Command::Layout {
            log,
            regions,
            rings,
            out,
        } => {
            let session = load_log(&log)?;
            let regions = regions_or_empty(regions.as_deref())?;
            let mut config = LayoutConfig::default();
            if let Some([touch, moving, lift]) = rings.as_deref() {
                config.ring_radii = RingRadii {
                    touch: *touch,
                    moving: *moving,
                    lift: *lift,
                };
            }
            let result = cmd_layout(&session, &regions, &config)?;
            print!("{}", result.summary);
            if let Some(dir) = out {
                let id = &session.session_id;
                write_out(&dir, &format!("{id}-layout.txt"), &result.summary)?;
                write_out(&dir, &format!("{id}-layout.svg"), &result.svg)?;
            }
        }
        Command::Synth { out, seed } => {
            for path in cmd_synth(&out, seed)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
