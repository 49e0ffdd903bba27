//! Analytics engine for multi-touch interaction logs recorded from
//! joystick-driven mobile games.
//!
//! The pipeline is:
//!
//! 1. [`ingest`] parses line-delimited touch logs into a [`Session`] and
//!    segments the events into per-finger [`Gesture`]s.
//! 2. [`metrics`] resamples gestures to fixed-length [`GestureVector`]s and
//!    compares them with Euclidean, cosine and combined distances.
//! 3. [`clustering`] groups gesture vectors with k-means and fits
//!    coverage-based [`ConfidenceRegion`]s around touch hotspots.
//! 4. [`layout`] arranges a session on a clockwise radial timeline, maps
//!    user-defined screen regions to outer semantic rings, bins heat maps and
//!    answers spatial queries.
//! 5. [`report`] and [`svg`] turn those results into stable text tables and
//!    static SVG documents.
//!
//! [`synth`] produces deterministic synthetic sessions for tests, demos and
//! golden-file comparisons.

pub mod clustering;
pub mod geom;
pub mod ingest;
pub mod layout;
pub mod metrics;
pub mod report;
pub mod svg;
pub mod synth;

mod error;

pub use clustering::{
    confidence_region, kmeans, region_metrics, retained_count, ClusterResult, ConfidenceRegion,
    KMeansConfig, Side, UiMetrics,
};
pub use error::{Error, Result};
pub use geom::Point;
pub use ingest::{
    load_session, parse_log, px_to_mm, segment_gestures, serialize_log, Action, Axis,
    DeviceProfile, Gesture, Orientation, Session, TouchEvent, ValidationReport,
};
pub use layout::{
    assign_semantic_axes, build_layout_with_regions, build_radial_layout, event_points, heatmap,
    spatial_query, Area, EventFilter, HeatmapGrid, LayoutConfig, QueryMode, QueryResult,
    RadialLayout, SemanticRegion,
};
pub use metrics::{
    combined_distance, cosine_similarity, euclid_distance, path_length, resample, session_vectors,
    DistanceConfig, GestureVector,
};
