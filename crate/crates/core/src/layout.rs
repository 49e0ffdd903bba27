//! Radial spatiotemporal layout, semantic rings, spatial queries and heat
//! maps.
//!
//! Layout coordinates are resolution independent: the layout circle has
//! radius 1 and is centred on the origin, with y growing downward to match
//! screen space. Time runs clockwise from 12 o'clock, so a timestamp at
//! angle `a` on a ring of radius `r` sits at `(r sin a, -r cos a)`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ingest::{Action, DeviceProfile, Session};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingRadii {
    pub touch: f64,
    #[serde(rename = "move")]
    pub moving: f64,
    pub lift: f64,
}

impl Default for RingRadii {
    fn default() -> Self {
        Self {
            touch: 0.30,
            moving: 0.42,
            lift: 0.54,
        }
    }
}

impl RingRadii {
    pub fn for_action(&self, action: Action) -> f64 {
        match action {
            Action::Down => self.touch,
            Action::Move => self.moving,
            Action::Up => self.lift,
        }
    }
}

/// Which events a semantic region picks up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticMembership {
    /// Only finger-down events (a skill press is a tap).
    #[default]
    DownOnly,
    AllEvents,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub ring_radii: RingRadii,
    /// Radial depth of the longest gesture's arc, in layout units.
    pub max_arc_height: f64,
    pub semantic_base: f64,
    pub semantic_step: f64,
    #[serde(default)]
    pub semantic_membership: SemanticMembership,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            ring_radii: RingRadii::default(),
            max_arc_height: 0.25,
            semantic_base: 0.62,
            semantic_step: 0.07,
            semantic_membership: SemanticMembership::DownOnly,
        }
    }
}

impl LayoutConfig {
    pub fn semantic_radius(&self, ring_index: u32) -> f64 {
        self.semantic_base + self.semantic_step * ring_index as f64
    }

    fn validate(&self) -> Result<()> {
        let r = self.ring_radii;
        let ordered = 0.0 < r.touch
            && r.touch < r.moving
            && r.moving < r.lift
            && r.lift < self.semantic_base
            && self.semantic_step > 0.0;
        if !ordered || !(self.max_arc_height >= 0.0 && self.max_arc_height <= r.touch) {
            return Err(Error::InvalidLayoutConfig(
                "ring radii must satisfy 0 < touch < move < lift < semantic base, \
                 with 0 <= max arc height <= touch"
                    .into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ring {
    Touch,
    Move,
    Lift,
}

impl From<Action> for Ring {
    fn from(a: Action) -> Self {
        match a {
            Action::Down => Ring::Touch,
            Action::Move => Ring::Move,
            Action::Up => Ring::Lift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dot {
    pub event_index: usize,
    pub gesture_id: Option<u32>,
    pub ring: Ring,
    pub t: f64,
    pub angle: f64,
    pub pos: Point,
}

/// Cubic Bezier joining a gesture's touch dot to its lift dot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureArc {
    pub gesture_id: u32,
    pub duration: f64,
    pub start_angle: f64,
    pub end_angle: f64,
    /// Depth of both control points inside the touch ring.
    pub height: f64,
    pub from: Point,
    pub control1: Point,
    pub control2: Point,
    pub to: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticRing {
    pub region_id: u32,
    pub label: String,
    pub ring_index: u32,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticDot {
    pub event_index: usize,
    pub gesture_id: Option<u32>,
    pub region_id: u32,
    pub ring_index: u32,
    pub t: f64,
    pub angle: f64,
    pub pos: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticAxes {
    pub rings: Vec<SemanticRing>,
    pub dots: Vec<SemanticDot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialLayout {
    pub period: (f64, f64),
    pub ring_radii: RingRadii,
    pub dots: Vec<Dot>,
    pub arcs: Vec<GestureArc>,
    pub semantic_rings: Vec<SemanticRing>,
    pub semantic_dots: Vec<SemanticDot>,
}

/// A user-drawn screen circle tagged with a meaning ("Normal Attack").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticRegion {
    pub region_id: u32,
    pub label: String,
    pub center: Point,
    pub radius: f64,
    /// Which outer semantic ring hosts this region, 0 = innermost.
    pub ring_index: u32,
}

impl SemanticRegion {
    pub fn contains(&self, p: Point) -> bool {
        p.distance(self.center) <= self.radius
    }
}

pub fn polar(radius: f64, angle: f64) -> Point {
    Point::new(radius * angle.sin(), -radius * angle.cos())
}

struct Clock {
    start: f64,
    span: f64,
}

impl Clock {
    fn for_session(session: &Session) -> Result<Self> {
        let (start, end) = session.period().ok_or(Error::DegeneratePeriod)?;
        if end <= start {
            return Err(Error::DegeneratePeriod);
        }
        Ok(Self {
            start,
            span: end - start,
        })
    }

    fn angle(&self, t: f64) -> f64 {
        (TAU * (t - self.start) / self.span).clamp(0.0, TAU)
    }
}

/// Lay a segmented session out on the radial timeline: one dot per event on
/// its action's ring and one arc per gesture.
pub fn build_radial_layout(session: &Session, config: &LayoutConfig) -> Result<RadialLayout> {
    config.validate()?;
    let clock = Clock::for_session(session)?;
    let rings = config.ring_radii;
    let owners = session.event_owners();

    let dots = session
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let angle = clock.angle(e.t);
            Dot {
                event_index: i,
                gesture_id: owners[i],
                ring: e.action.into(),
                t: e.t,
                angle,
                pos: polar(rings.for_action(e.action), angle),
            }
        })
        .collect();

    let longest = session
        .gestures
        .iter()
        .map(|g| g.duration())
        .fold(0.0, f64::max);
    let arcs = session
        .gestures
        .iter()
        .map(|g| {
            let start_angle = clock.angle(g.start_t);
            let end_angle = clock.angle(g.end_t);
            let height = if longest > 0.0 {
                config.max_arc_height * g.duration() / longest
            } else {
                0.0
            };
            let span = end_angle - start_angle;
            let inner = rings.touch - height;
            GestureArc {
                gesture_id: g.gesture_id,
                duration: g.duration(),
                start_angle,
                end_angle,
                height,
                from: polar(rings.touch, start_angle),
                control1: polar(inner, start_angle + span / 3.0),
                control2: polar(inner, start_angle + 2.0 * span / 3.0),
                to: polar(rings.lift, end_angle),
            }
        })
        .collect();

    Ok(RadialLayout {
        period: (clock.start, clock.start + clock.span),
        ring_radii: rings,
        dots,
        arcs,
        semantic_rings: Vec::new(),
        semantic_dots: Vec::new(),
    })
}

/// Check region geometry: inside the screen, one ring each, no overlaps
/// (circles that merely touch are allowed).
pub fn validate_regions(regions: &[SemanticRegion], device: &DeviceProfile) -> Result<()> {
    let mut rings = BTreeSet::new();
    for r in regions {
        let c = r.center;
        let fits = r.radius.is_finite()
            && r.radius >= 0.0
            && c.x - r.radius >= 0.0
            && c.y - r.radius >= 0.0
            && c.x + r.radius <= device.width_px
            && c.y + r.radius <= device.height_px;
        if !fits {
            return Err(Error::OutOfBounds { x: c.x, y: c.y });
        }
        if !rings.insert(r.ring_index) {
            return Err(Error::DuplicateRing(r.ring_index));
        }
    }
    for (i, a) in regions.iter().enumerate() {
        for b in &regions[i + 1..] {
            if a.center.distance(b.center) < a.radius + b.radius {
                return Err(Error::AmbiguousRegions(a.region_id, b.region_id));
            }
        }
    }
    Ok(())
}

/// Project events that land inside user-defined regions onto the regions'
/// semantic rings.
pub fn assign_semantic_axes(
    session: &Session,
    regions: &[SemanticRegion],
    config: &LayoutConfig,
) -> Result<SemanticAxes> {
    validate_regions(regions, &session.device)?;
    let mut ordered: Vec<&SemanticRegion> = regions.iter().collect();
    ordered.sort_by_key(|r| r.ring_index);
    let rings = ordered
        .iter()
        .map(|r| SemanticRing {
            region_id: r.region_id,
            label: r.label.clone(),
            ring_index: r.ring_index,
            radius: config.semantic_radius(r.ring_index),
        })
        .collect();
    if regions.is_empty() {
        return Ok(SemanticAxes {
            rings,
            dots: Vec::new(),
        });
    }

    let clock = Clock::for_session(session)?;
    let owners = session.event_owners();
    let mut dots = Vec::new();
    for (i, e) in session.events.iter().enumerate() {
        if config.semantic_membership == SemanticMembership::DownOnly && e.action != Action::Down {
            continue;
        }
        let p = e.position();
        // regions are disjoint, so at most one matches
        if let Some(r) = ordered.iter().find(|r| r.contains(p)) {
            let angle = clock.angle(e.t);
            let radius = config.semantic_radius(r.ring_index);
            dots.push(SemanticDot {
                event_index: i,
                gesture_id: owners[i],
                region_id: r.region_id,
                ring_index: r.ring_index,
                t: e.t,
                angle,
                pos: polar(radius, angle),
            });
        }
    }
    Ok(SemanticAxes { rings, dots })
}

/// Radial layout with semantic rings attached.
pub fn build_layout_with_regions(
    session: &Session,
    regions: &[SemanticRegion],
    config: &LayoutConfig,
) -> Result<RadialLayout> {
    let mut layout = build_radial_layout(session, config)?;
    let axes = assign_semantic_axes(session, regions, config)?;
    layout.semantic_rings = axes.rings;
    layout.semantic_dots = axes.dots;
    Ok(layout)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Area {
    Circle { center: Point, radius: f64 },
    Rect { min: Point, max: Point },
}

impl Area {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Area::Circle { center, radius } => p.distance(center) <= radius,
            Area::Rect { min, max } => {
                let (x0, x1) = (min.x.min(max.x), min.x.max(max.x));
                let (y0, y1) = (min.y.min(max.y), min.y.max(max.y));
                (x0..=x1).contains(&p.x) && (y0..=y1).contains(&p.y)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryMode {
    /// Gestures whose first point lies in the area.
    #[default]
    StartIn,
    /// Gestures with any point in the area.
    AnyIn,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QueryResult {
    pub gesture_ids: Vec<u32>,
    /// Every event of the matched gestures, ascending.
    pub event_indices: Vec<usize>,
}

pub fn spatial_query(session: &Session, area: &Area, mode: QueryMode) -> QueryResult {
    let mut result = QueryResult::default();
    for g in &session.gestures {
        let hit = match mode {
            QueryMode::StartIn => area.contains(g.first_position()),
            QueryMode::AnyIn => g.points.iter().any(|p| area.contains(p.position())),
        };
        if hit {
            result.gesture_ids.push(g.gesture_id);
            result.event_indices.extend_from_slice(&g.event_indices);
        }
    }
    result.event_indices.sort_unstable();
    result
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventFilter {
    #[default]
    All,
    #[serde(alias = "touch")]
    Down,
    Move,
    #[serde(alias = "lift")]
    Up,
}

impl EventFilter {
    pub fn accepts(self, action: Action) -> bool {
        match self {
            EventFilter::All => true,
            EventFilter::Down => action == Action::Down,
            EventFilter::Move => action == Action::Move,
            EventFilter::Up => action == Action::Up,
        }
    }
}

impl std::str::FromStr for EventFilter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all" => Ok(EventFilter::All),
            "down" | "touch" => Ok(EventFilter::Down),
            "move" => Ok(EventFilter::Move),
            "up" | "lift" => Ok(EventFilter::Up),
            other => Err(format!("unknown event filter {other:?}")),
        }
    }
}

/// Positions of the events passing `filter`, in event order.
pub fn event_points(session: &Session, filter: EventFilter) -> Vec<Point> {
    session
        .events
        .iter()
        .filter(|e| filter.accepts(e.action))
        .map(|e| e.position())
        .collect()
}

/// Screen-space event counts, row-major (`counts[row * cols + col]`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub cols: usize,
    pub rows: usize,
    pub counts: Vec<u64>,
    pub max_count: u64,
    pub total: u64,
}

impl HeatmapGrid {
    pub fn get(&self, col: usize, row: usize) -> u64 {
        self.counts[row * self.cols + col]
    }
}

/// Cell index along one axis: cells are `(lo, hi]`, the first also
/// includes 0, and anything past either edge is clamped.
fn bin(v: f64, extent: f64, cells: usize) -> usize {
    let scaled = (v / extent * cells as f64).ceil() - 1.0;
    if scaled.is_nan() || scaled < 0.0 {
        0
    } else {
        (scaled as usize).min(cells - 1)
    }
}

pub fn heatmap(
    session: &Session,
    cols: usize,
    rows: usize,
    filter: EventFilter,
) -> Result<HeatmapGrid> {
    if cols == 0 || rows == 0 {
        return Err(Error::InvalidGrid);
    }
    let mut counts = vec![0u64; cols * rows];
    let device = &session.device;
    for e in session.events.iter().filter(|e| filter.accepts(e.action)) {
        let c = bin(e.x, device.width_px, cols);
        let r = bin(e.y, device.height_px, rows);
        counts[r * cols + c] += 1;
    }
    Ok(HeatmapGrid {
        cols,
        rows,
        max_count: counts.iter().copied().max().unwrap_or(0),
        total: counts.iter().sum(),
        counts,
    })
}
