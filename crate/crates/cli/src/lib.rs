//! Batch commands behind the `touchscope` binary. Each command returns its
//! outputs as strings so callers decide where they go.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use touchscope_core::clustering::{kmeans, region_metrics, KMeansConfig, Side};
use touchscope_core::report::{
    layout_summary, ClusterReport, RegionRow, ReportTable, RowOutcome, SessionSummary,
};
use touchscope_core::svg::{cluster_svg, radial_layout_svg, region_overlay_svg};
use touchscope_core::synth;
use touchscope_core::{
    build_layout_with_regions, confidence_region, event_points, load_session, serialize_log,
    session_vectors, DeviceProfile, DistanceConfig, EventFilter, LayoutConfig, Point,
    SemanticRegion, Session,
};

/// Minimum movement length used when no joystick region is available.
pub const FALLBACK_MIN_LENGTH_PX: f64 = 150.0;
/// Confidence used to size the joystick for the default length filter.
pub const JOYSTICK_CONFIDENCE: f64 = 0.95;
pub const SVG_WIDTH: f64 = 960.0;
pub const LAYOUT_SIZE: f64 = 800.0;

/// Expand files and directories (their `*.log` entries, sorted) into log paths.
pub fn expand_logs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut logs: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|e| e.extension().is_some_and(|x| x == "log"))
                .collect();
            logs.sort();
            out.extend(logs);
        } else {
            out.push(p.clone());
        }
    }
    ensure!(!out.is_empty(), "no log files given");
    Ok(out)
}

fn session_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "session".into())
}

pub fn load_log(path: &Path) -> Result<Session> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    load_session(&session_id(path), &bytes).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_logs(paths: &[PathBuf]) -> Result<Vec<Session>> {
    expand_logs(paths)?.iter().map(|p| load_log(p)).collect()
}

/// Parse a regions file: one `label,ring,cx,cy,r` per line; blank lines and
/// `#` comments are skipped. Region ids follow line order.
pub fn parse_regions(text: &str) -> Result<Vec<SemanticRegion>> {
    let mut regions = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [label, ring, cx, cy, r] = fields[..] else {
            bail!("regions line {}: expected label,ring,cx,cy,r", n + 1);
        };
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("regions line {}: bad number {s:?}", n + 1))
        };
        regions.push(SemanticRegion {
            region_id: regions.len() as u32,
            label: label.to_string(),
            ring_index: ring
                .parse()
                .with_context(|| format!("regions line {}: bad ring {ring:?}", n + 1))?,
            center: Point::new(num(cx)?, num(cy)?),
            radius: num(r)?,
        });
    }
    Ok(regions)
}

pub fn read_regions(path: &Path) -> Result<Vec<SemanticRegion>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_regions(&text)
}

/// One summary line per log, followed by the validation report of any log
/// with rejected records.
pub fn cmd_ingest(sessions: &[Session]) -> String {
    let mut out = String::new();
    for s in sessions {
        out.push_str(&SessionSummary::of(s).to_line());
        out.push('\n');
        if !s.report.rejects.is_empty() {
            for line in s.report.to_text().lines() {
                out.push_str("  ");
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}

fn common_device(sessions: &[Session]) -> Result<DeviceProfile> {
    let first = sessions.first().context("no sessions")?.device;
    for s in sessions {
        ensure!(
            s.device == first,
            "session {} was recorded on a different device",
            s.session_id
        );
    }
    Ok(first)
}

fn pooled_points(sessions: &[Session], filter: EventFilter) -> Vec<Point> {
    sessions
        .iter()
        .flat_map(|s| event_points(s, filter))
        .collect()
}

pub fn dots_label(filter: EventFilter) -> &'static str {
    match filter {
        EventFilter::All => "all",
        EventFilter::Down => "touch",
        EventFilter::Move => "move",
        EventFilter::Up => "lift",
    }
}

pub struct VerifyOutput {
    pub table: ReportTable,
    pub overlay_svg: String,
}

/// Fit every region at every confidence over the pooled events of all
/// sessions. Regions that cannot be fitted become flagged rows.
pub fn cmd_verify_ui(
    sessions: &[Session],
    regions: &[SemanticRegion],
    confidences: &[f64],
    dots: EventFilter,
) -> Result<VerifyOutput> {
    ensure!(!regions.is_empty(), "no regions to verify");
    ensure!(!confidences.is_empty(), "no confidence levels given");
    let device = common_device(sessions)?;
    let points = pooled_points(sessions, dots);
    let mut table = ReportTable::default();
    let mut fitted = Vec::new();
    for region in regions {
        for &c in confidences {
            let fit = confidence_region(&points, region.center, region.radius, c).and_then(|r| {
                let side = Side::nearest(region.center, &device);
                region_metrics(&r, &device, side).map(|m| (r, m))
            });
            let row = match fit {
                Ok((r, metrics)) => {
                    fitted.push((format!("{} c={c}", region.label), r.clone()));
                    RegionRow {
                        label: region.label.clone(),
                        dots: dots_label(dots).into(),
                        outcome: RowOutcome::Fitted { region: r, metrics },
                    }
                }
                Err(e) => RegionRow::flagged(
                    &region.label,
                    dots_label(dots),
                    c,
                    region.radius,
                    points.len(),
                    &e,
                ),
            };
            table.rows.push(row);
        }
    }
    let overlay_svg = region_overlay_svg(&device, &points, &fitted, SVG_WIDTH);
    Ok(VerifyOutput { table, overlay_svg })
}

/// Default movement-length cut: twice the fitted joystick radius when a
/// region labelled "joystick" exists and can be fitted, else
/// [`FALLBACK_MIN_LENGTH_PX`].
pub fn default_min_length(sessions: &[Session], regions: &[SemanticRegion]) -> f64 {
    let Some(joystick) = regions
        .iter()
        .find(|r| r.label.eq_ignore_ascii_case("joystick"))
    else {
        return FALLBACK_MIN_LENGTH_PX;
    };
    let points = pooled_points(sessions, EventFilter::Down);
    confidence_region(
        &points,
        joystick.center,
        joystick.radius,
        JOYSTICK_CONFIDENCE,
    )
    .map(|r| 2.0 * r.new_radius)
    .unwrap_or(FALLBACK_MIN_LENGTH_PX)
}

#[derive(Debug, Clone, Copy)]
pub struct ClusterOptions {
    pub k: usize,
    pub n_samples: usize,
    pub weight_euclid: f64,
    pub seed: u64,
    pub min_length_px: Option<f64>,
    pub center_cosine: bool,
}

pub struct ClusterOutput {
    pub report: ClusterReport,
    pub svg: String,
}

pub fn cmd_cluster(
    sessions: &[Session],
    regions: &[SemanticRegion],
    opts: &ClusterOptions,
) -> Result<ClusterOutput> {
    let device = common_device(sessions)?;
    let min_length = opts
        .min_length_px
        .unwrap_or_else(|| default_min_length(sessions, regions));
    let mut distance = DistanceConfig::for_device(&device)
        .with_samples(opts.n_samples)
        .with_weight(opts.weight_euclid);
    distance.center_cosine = opts.center_cosine;
    distance.validate()?;

    let mut vectors = Vec::new();
    let mut names = Vec::new();
    for s in sessions {
        for v in session_vectors(s, opts.n_samples, min_length)? {
            names.push(format!("{}:{}", s.session_id, v.gesture_id));
            vectors.push(v);
        }
    }
    ensure!(
        vectors.len() >= opts.k,
        "only {} gestures are at least {min_length:.1} px long, fewer than k = {}",
        vectors.len(),
        opts.k
    );
    let config = KMeansConfig {
        seed: opts.seed,
        distance,
        ..KMeansConfig::default()
    };
    let result = kmeans(&vectors, opts.k, &config)?;
    let report = ClusterReport::build(&result, &vectors, &names, &distance, min_length);
    let svg = cluster_svg(&device, &result.centroids, &result.sizes, SVG_WIDTH);
    Ok(ClusterOutput { report, svg })
}

pub struct LayoutOutput {
    pub summary: String,
    pub svg: String,
}

pub fn cmd_layout(
    session: &Session,
    regions: &[SemanticRegion],
    config: &LayoutConfig,
) -> Result<LayoutOutput> {
    let layout = build_layout_with_regions(session, regions, config)
        .with_context(|| format!("laying out {}", session.session_id))?;
    Ok(LayoutOutput {
        summary: layout_summary(&layout),
        svg: radial_layout_svg(&layout, session, LAYOUT_SIZE),
    })
}

/// Write the scripted fixtures: novice and expert logs, a two-motif log,
/// the 45-session corpus and the regions files.
pub fn cmd_synth(out: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut write = |rel: &str, text: &str| -> Result<()> {
        let path = out.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    write(
        "novice.log",
        &serialize_log(&synth::novice_session(seed).session),
    )?;
    write(
        "expert.log",
        &serialize_log(&synth::expert_session(seed).session),
    )?;
    let (motifs, labels) = synth::two_motif_session(seed, 20);
    write("two-motif.log", &serialize_log(&motifs))?;
    let manifest: String = labels.iter().map(|(id, l)| format!("{id},{l}\n")).collect();
    write("two-motif.labels", &manifest)?;
    write(
        "skills.regions",
        &synth::regions_file(&synth::skill_regions()),
    )?;
    write("ui.regions", &synth::regions_file(&synth::ui_regions()))?;
    let (corpus, entries) = synth::ui_study_corpus(seed);
    for s in &corpus {
        write(&format!("corpus/{}.log", s.session_id), &serialize_log(s))?;
    }
    let manifest: String = entries
        .iter()
        .map(|e| format!("{},{},{}\n", e.session_id, e.gestures, e.events))
        .collect();
    write("corpus/manifest.csv", &manifest)?;
    Ok(written)
}
