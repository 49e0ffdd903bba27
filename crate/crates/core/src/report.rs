//! Plain-text reports. Output is byte-stable for identical inputs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterResult, ConfidenceRegion, UiMetrics};
use crate::error::Error;
use crate::ingest::Session;
use crate::layout::{RadialLayout, Ring};
use crate::metrics::{combined_distance, DistanceConfig, GestureVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub events: usize,
    pub gestures: usize,
    pub orphans: usize,
    pub rejects: usize,
    pub force_closed: usize,
    pub duration_ms: f64,
}

impl SessionSummary {
    pub fn of(session: &Session) -> Self {
        Self {
            session_id: session.session_id.clone(),
            events: session.events.len(),
            gestures: session.gestures.len(),
            orphans: session.report.orphans.len(),
            rejects: session.report.rejects.len(),
            force_closed: session.report.force_closed.len(),
            duration_ms: session.duration(),
        }
    }

    pub fn to_line(&self) -> String {
        let plural = if self.gestures == 1 { "" } else { "s" };
        format!(
            "{}: {} events, {} gesture{plural}, {} orphans, {} rejected, {} force-closed, {:.1} ms",
            self.session_id,
            self.events,
            self.gestures,
            self.orphans,
            self.rejects,
            self.force_closed,
            self.duration_ms
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowOutcome {
    Fitted {
        region: ConfidenceRegion,
        metrics: UiMetrics,
    },
    /// The region could not be fitted; the row is kept and marked.
    Flagged {
        confidence: f64,
        selection_radius: f64,
        sampling_count: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub label: String,
    /// Which dots were fitted: "touch", "move", ...
    pub dots: String,
    pub outcome: RowOutcome,
}

impl RegionRow {
    pub fn flagged(
        label: &str,
        dots: &str,
        confidence: f64,
        selection_radius: f64,
        sampling_count: usize,
        error: &Error,
    ) -> Self {
        Self {
            label: label.to_string(),
            dots: dots.to_string(),
            outcome: RowOutcome::Flagged {
                confidence,
                selection_radius,
                sampling_count,
                reason: error.code().to_string(),
            },
        }
    }
}

/// Region fits laid out like a UI verification table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportTable {
    pub rows: Vec<RegionRow>,
}

impl ReportTable {
    pub const COLUMNS: [&'static str; 15] = [
        "region",
        "dots",
        "confidence",
        "original radius",
        "sampling number",
        "original center",
        "original number",
        "new center",
        "new radius",
        "new number",
        "edge",
        "distance to edge (mm)",
        "distance to bottom (mm)",
        "diameter (mm)",
        "note",
    ];

    pub fn to_text(&self) -> String {
        let mut out = Self::COLUMNS.join(" | ");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = match &row.outcome {
                RowOutcome::Fitted { region, metrics } => vec![
                    row.label.clone(),
                    row.dots.clone(),
                    format!("{:.2}", region.confidence),
                    format!("{:.3}", region.selection_radius),
                    region.sampling_count.to_string(),
                    format!(
                        "({:.3}, {:.3})",
                        region.original_center.x, region.original_center.y
                    ),
                    region.original_count.to_string(),
                    format!("({:.3}, {:.3})", region.new_center.x, region.new_center.y),
                    format!("{:.3}", region.new_radius),
                    region.new_count.to_string(),
                    metrics.side.label().to_string(),
                    format!("{:.2}", metrics.distance_to_side),
                    format!("{:.2}", metrics.distance_to_bottom),
                    format!("{:.2}", metrics.diameter),
                    String::new(),
                ],
                RowOutcome::Flagged {
                    confidence,
                    selection_radius,
                    sampling_count,
                    reason,
                } => vec![
                    row.label.clone(),
                    row.dots.clone(),
                    format!("{confidence:.2}"),
                    format!("{selection_radius:.3}"),
                    sampling_count.to_string(),
                    "-".into(),
                    "0".into(),
                    "-".into(),
                    "-".into(),
                    "0".into(),
                    "-".into(),
                    "-".into(),
                    "-".into(),
                    "-".into(),
                    format!("FLAGGED {reason}"),
                ],
            };
            out.push_str(cells.join(" | ").trim_end());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub index: usize,
    pub size: usize,
    /// Label of the member closest to the centroid.
    pub exemplar: String,
    pub exemplar_distance: f64,
    pub mean_source_length: f64,
    pub centroid_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub k: usize,
    pub n_samples: usize,
    pub weight_euclid: f64,
    pub seed: u64,
    pub min_length_px: f64,
    pub vectors: usize,
    pub inertia: f64,
    pub iterations: usize,
    pub clusters: Vec<ClusterSummary>,
}

impl ClusterReport {
    /// `names[i]` labels `vectors[i]` (e.g. `session:gesture`).
    pub fn build(
        result: &ClusterResult,
        vectors: &[GestureVector],
        names: &[String],
        distance: &DistanceConfig,
        min_length_px: f64,
    ) -> Self {
        let clusters = (0..result.k)
            .map(|j| {
                let members: Vec<usize> = result
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|&(_, &l)| l == j)
                    .map(|(i, _)| i)
                    .collect();
                let centroid = &result.centroids[j];
                let mut best = (usize::MAX, f64::INFINITY);
                for &i in &members {
                    let d =
                        combined_distance(&vectors[i], centroid, distance).unwrap_or(f64::INFINITY);
                    if d < best.1 {
                        best = (i, d);
                    }
                }
                let mean_len = members
                    .iter()
                    .map(|&i| vectors[i].source_length)
                    .sum::<f64>()
                    / members.len().max(1) as f64;
                ClusterSummary {
                    index: j,
                    size: members.len(),
                    exemplar: names.get(best.0).cloned().unwrap_or_else(|| "-".into()),
                    exemplar_distance: best.1,
                    mean_source_length: mean_len,
                    centroid_length: centroid.source_length,
                }
            })
            .collect();
        Self {
            k: result.k,
            n_samples: vectors.first().map_or(0, GestureVector::len),
            weight_euclid: distance.weight_euclid,
            seed: result.seed,
            min_length_px,
            vectors: vectors.len(),
            inertia: result.inertia,
            iterations: result.iterations,
            clusters,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "k={} n_samples={} weight_euclid={:.3} seed={} min_length_px={:.1}",
            self.k, self.n_samples, self.weight_euclid, self.seed, self.min_length_px
        );
        let _ = writeln!(
            out,
            "vectors={} inertia={:.6} iterations={}",
            self.vectors, self.inertia, self.iterations
        );
        let _ = writeln!(
            out,
            "cluster | size | exemplar | exemplar distance | mean length (px) | centroid length (px)"
        );
        for c in &self.clusters {
            let _ = writeln!(
                out,
                "{} | {} | {} | {:.6} | {:.1} | {:.1}",
                c.index,
                c.size,
                c.exemplar,
                c.exemplar_distance,
                c.mean_source_length,
                c.centroid_length
            );
        }
        out
    }
}

/// Counts per ring plus one line per arc and per semantic ring.
pub fn layout_summary(layout: &RadialLayout) -> String {
    let mut out = String::new();
    let count = |ring: Ring| layout.dots.iter().filter(|d| d.ring == ring).count();
    let _ = writeln!(
        out,
        "period_ms={:.1}..{:.1} dots={} touch={} move={} lift={} arcs={} semantic_rings={} semantic_dots={}",
        layout.period.0,
        layout.period.1,
        layout.dots.len(),
        count(Ring::Touch),
        count(Ring::Move),
        count(Ring::Lift),
        layout.arcs.len(),
        layout.semantic_rings.len(),
        layout.semantic_dots.len()
    );
    for a in &layout.arcs {
        let _ = writeln!(
            out,
            "arc {} start={:.3}deg end={:.3}deg duration={:.1}ms height={:.4}",
            a.gesture_id,
            a.start_angle.to_degrees(),
            a.end_angle.to_degrees(),
            a.duration,
            a.height
        );
    }
    for r in &layout.semantic_rings {
        let n = layout
            .semantic_dots
            .iter()
            .filter(|d| d.region_id == r.region_id)
            .count();
        let _ = writeln!(
            out,
            "semantic ring {} \"{}\" radius={:.3} dots={}",
            r.ring_index, r.label, r.radius, n
        );
    }
    out
}
