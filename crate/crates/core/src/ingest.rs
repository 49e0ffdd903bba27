//! Touch log parsing, validation and gesture segmentation.
//!
//! Logs are UTF-8, one record per line:
//!
//! ```text
//! #device,1920,1080,110.7,62.3
//! #meta,participant,P07
//! 0,0,D,312.5,801
//! 16.7,0,M,318,799.5
//! 33.3,0,U,320,798
//! ```
//!
//! The `#device` header (`width_px,height_px,width_mm,height_mm`, optionally
//! followed by an orientation) must precede the first record. `#meta,key,value`
//! lines carry free-form session metadata; any other `#` line is a comment.
//! Records are `t_ms,pointer_id,action,x_px,y_px` with action one of `D`, `M`,
//! `U`. Coordinates use a top-left origin with x to the right and y downward.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

/// Share of malformed records above which a log is rejected outright.
pub const MAX_REJECT_RATIO: f64 = 0.10;

/// Largest relative difference between the width and height mm/px factors
/// tolerated by [`DeviceProfile::check_isotropic`].
pub const STRICT_ISOTROPY_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Down,
    Move,
    Up,
}

impl Action {
    pub fn code(self) -> char {
        match self {
            Action::Down => 'D',
            Action::Move => 'M',
            Action::Up => 'U',
        }
    }

    fn from_code(s: &str) -> Option<Self> {
        match s {
            "D" => Some(Action::Down),
            "M" => Some(Action::Move),
            "U" => Some(Action::Up),
            _ => None,
        }
    }
}

/// One down/move/up sample of a single finger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchEvent {
    pub pointer_id: u32,
    pub action: Action,
    pub x: f64,
    pub y: f64,
    /// Milliseconds since the start of the session.
    pub t: f64,
}

impl TouchEvent {
    pub fn new(pointer_id: u32, action: Action, x: f64, y: f64, t: f64) -> Self {
        Self {
            pointer_id,
            action,
            x,
            y,
            t,
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    LandscapeLeft,
    Portrait,
}

impl Orientation {
    fn token(self) -> &'static str {
        match self {
            Orientation::LandscapeLeft => "landscape-left",
            Orientation::Portrait => "portrait",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        match s {
            "landscape-left" => Some(Orientation::LandscapeLeft),
            "portrait" => Some(Orientation::Portrait),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Width,
    Height,
    /// Lengths without a direction (radii, diameters). Uses the width factor.
    Isotropic,
}

/// Screen geometry of the recording device; the authority for px -> mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub width_px: f64,
    pub height_px: f64,
    pub width_mm: f64,
    pub height_mm: f64,
    #[serde(default)]
    pub orientation: Orientation,
}

impl DeviceProfile {
    pub fn new(width_px: f64, height_px: f64, width_mm: f64, height_mm: f64) -> Result<Self> {
        let device = Self {
            width_px,
            height_px,
            width_mm,
            height_mm,
            orientation: Orientation::LandscapeLeft,
        };
        device.validate()?;
        Ok(device)
    }

    /// 1920x1080 px landscape handset measuring 110.7 x 62.3 mm.
    pub fn reference() -> Self {
        Self {
            width_px: 1920.0,
            height_px: 1080.0,
            width_mm: 110.7,
            height_mm: 62.3,
            orientation: Orientation::LandscapeLeft,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("width_px", self.width_px),
            ("height_px", self.height_px),
            ("width_mm", self.width_mm),
            ("height_mm", self.height_mm),
        ];
        for (name, v) in dims {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidDevice(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn mm_per_px(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Width | Axis::Isotropic => self.width_mm / self.width_px,
            Axis::Height => self.height_mm / self.height_px,
        }
    }

    /// Relative difference between the two axis factors.
    pub fn isotropy_skew(&self) -> f64 {
        let w = self.mm_per_px(Axis::Width);
        let h = self.mm_per_px(Axis::Height);
        (w - h).abs() / w.max(h)
    }

    /// Strict mode: refuse devices whose pixels are noticeably non-square.
    pub fn check_isotropic(&self) -> Result<()> {
        let skew = self.isotropy_skew();
        if skew > STRICT_ISOTROPY_TOLERANCE {
            return Err(Error::AnisotropicDevice {
                skew_pct: skew * 100.0,
            });
        }
        Ok(())
    }

    pub fn diagonal_px(&self) -> f64 {
        self.width_px.hypot(self.height_px)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width_px).contains(&p.x) && (0.0..=self.height_px).contains(&p.y)
    }

    fn header_line(&self) -> String {
        format!(
            "#device,{},{},{},{},{}",
            self.width_px,
            self.height_px,
            self.width_mm,
            self.height_mm,
            self.orientation.token()
        )
    }

    fn parse_header(fields: &[&str]) -> Option<Self> {
        if !(4..=5).contains(&fields.len()) {
            return None;
        }
        let num = |s: &str| s.trim().parse::<f64>().ok();
        let orientation = match fields.get(4) {
            Some(tok) => Orientation::from_token(tok.trim())?,
            None => Orientation::LandscapeLeft,
        };
        Some(Self {
            width_px: num(fields[0])?,
            height_px: num(fields[1])?,
            width_mm: num(fields[2])?,
            height_mm: num(fields[3])?,
            orientation,
        })
    }
}

/// Convert a pixel length along `axis` to millimetres.
pub fn px_to_mm(value: f64, device: &DeviceProfile, axis: Axis) -> f64 {
    value * device.mm_per_px(axis)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GesturePoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl GesturePoint {
    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// One finger's Down -> Move* -> Up run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gesture {
    pub gesture_id: u32,
    pub pointer_id: u32,
    pub points: Vec<GesturePoint>,
    /// Indices into [`Session::events`], parallel to `points`.
    pub event_indices: Vec<usize>,
    pub start_t: f64,
    pub end_t: f64,
    /// The finger never lifted: the gesture was closed at its last observed
    /// event (a new Down on the same pointer, or the end of the log).
    pub force_closed: bool,
}

impl Gesture {
    pub fn duration(&self) -> f64 {
        self.end_t - self.start_t
    }

    pub fn positions(&self) -> Vec<Point> {
        self.points.iter().map(GesturePoint::position).collect()
    }

    pub fn first_position(&self) -> Point {
        self.points[0].position()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reject {
    /// 1-based line number in the source log.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Event records seen (comments and blank lines excluded).
    pub records: usize,
    pub rejects: Vec<Reject>,
    /// Indices of events that could not be attached to any gesture.
    pub orphans: Vec<usize>,
    pub force_closed: Vec<u32>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.rejects.is_empty() && self.orphans.is_empty() && self.force_closed.is_empty()
    }

    /// Render as `line N: reason` entries followed by orphan and
    /// force-closed notes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rejects {
            let _ = writeln!(out, "line {}: {}", r.line, r.reason);
        }
        for idx in &self.orphans {
            let _ = writeln!(out, "event {idx}: orphan (no open gesture for pointer)");
        }
        for id in &self.force_closed {
            let _ = writeln!(out, "gesture {id}: force-closed (no lift observed)");
        }
        out
    }
}

/// A single recorded interaction session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub device: DeviceProfile,
    pub events: Vec<TouchEvent>,
    /// Empty until [`segment_gestures`] runs.
    pub gestures: Vec<Gesture>,
    pub metadata: BTreeMap<String, String>,
    /// Raw timestamp subtracted from every event during parsing.
    pub time_origin_ms: f64,
    pub report: ValidationReport,
}

impl Session {
    /// Build a session from in-memory events, applying the same checks
    /// [`parse_log`] applies per record. Timestamps are taken as-is.
    pub fn from_events(
        session_id: impl Into<String>,
        device: DeviceProfile,
        events: Vec<TouchEvent>,
    ) -> Result<Self> {
        device.validate()?;
        let mut last_t: BTreeMap<u32, f64> = BTreeMap::new();
        for (i, e) in events.iter().enumerate() {
            if check_event(e, &mut last_t).is_some() || e.t < 0.0 {
                return Err(Error::CorruptLog {
                    rejected: 1,
                    total: events.len(),
                    lines: vec![i + 1],
                });
            }
        }
        Ok(Self {
            session_id: session_id.into(),
            device,
            report: ValidationReport {
                records: events.len(),
                ..Default::default()
            },
            events,
            gestures: Vec::new(),
            metadata: BTreeMap::new(),
            time_origin_ms: 0.0,
        })
    }

    /// First and last event timestamps.
    pub fn period(&self) -> Option<(f64, f64)> {
        let mut it = self.events.iter().map(|e| e.t);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), t| (lo.min(t), hi.max(t))))
    }

    pub fn duration(&self) -> f64 {
        self.period().map_or(0.0, |(lo, hi)| hi - lo)
    }

    pub fn gesture(&self, gesture_id: u32) -> Option<&Gesture> {
        self.gestures.iter().find(|g| g.gesture_id == gesture_id)
    }

    /// Map from event index to owning gesture id.
    pub fn event_owners(&self) -> Vec<Option<u32>> {
        let mut owners = vec![None; self.events.len()];
        for g in &self.gestures {
            for &i in &g.event_indices {
                owners[i] = Some(g.gesture_id);
            }
        }
        owners
    }
}

/// Returns a rejection reason, or `None` if the event is acceptable.
/// Updates the per-pointer clock on acceptance.
fn check_event(e: &TouchEvent, last_t: &mut BTreeMap<u32, f64>) -> Option<String> {
    if !e.t.is_finite() {
        return Some(format!("non-finite timestamp {}", e.t));
    }
    if !(e.x.is_finite() && e.y.is_finite()) {
        return Some(format!("non-finite coordinate ({}, {})", e.x, e.y));
    }
    if let Some(&prev) = last_t.get(&e.pointer_id) {
        if e.t < prev {
            return Some(format!(
                "timestamp {} precedes {} for pointer {}",
                e.t, prev, e.pointer_id
            ));
        }
    }
    last_t.insert(e.pointer_id, e.t);
    None
}

fn parse_record(line: &str) -> std::result::Result<TouchEvent, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 5 {
        return Err(format!("expected 5 fields, found {}", fields.len()));
    }
    let t: f64 = fields[0]
        .parse()
        .map_err(|_| format!("bad timestamp {:?}", fields[0]))?;
    let pointer_id: u32 = fields[1]
        .parse()
        .map_err(|_| format!("bad pointer id {:?}", fields[1]))?;
    let action =
        Action::from_code(fields[2]).ok_or_else(|| format!("unknown action {:?}", fields[2]))?;
    let x: f64 = fields[3]
        .parse()
        .map_err(|_| format!("bad x coordinate {:?}", fields[3]))?;
    let y: f64 = fields[4]
        .parse()
        .map_err(|_| format!("bad y coordinate {:?}", fields[4]))?;
    Ok(TouchEvent {
        pointer_id,
        action,
        x,
        y,
        t,
    })
}

/// Parse a touch log. Events keep file order; timestamps are shifted so the
/// earliest accepted event sits at t = 0. Gestures are not populated.
pub fn parse_log(session_id: &str, input: &[u8]) -> Result<Session> {
    let mut device = None;
    let mut metadata = BTreeMap::new();
    let mut events = Vec::new();
    let mut rejects = Vec::new();
    let mut records = 0usize;
    let mut header_missing = false;
    let mut last_t: BTreeMap<u32, f64> = BTreeMap::new();

    for (idx, raw) in input.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = match std::str::from_utf8(raw) {
            Ok(l) => l.trim(),
            Err(_) => {
                records += 1;
                rejects.push(Reject {
                    line: line_no,
                    reason: "invalid UTF-8".into(),
                });
                continue;
            }
        };
        if line.is_empty() {
            continue;
        }
        if let Some(directive) = line.strip_prefix('#') {
            if let Some(rest) = directive.strip_prefix("device,") {
                let fields: Vec<&str> = rest.split(',').collect();
                device =
                    Some(DeviceProfile::parse_header(&fields).ok_or(Error::MissingDeviceHeader)?);
            } else if let Some(rest) = directive.strip_prefix("meta,") {
                let mut kv = rest.splitn(2, ',');
                let key = kv.next().unwrap_or_default().trim();
                let value = kv.next().unwrap_or_default().trim();
                if !key.is_empty() {
                    metadata.insert(key.to_string(), value.to_string());
                }
            }
            continue;
        }
        records += 1;
        if device.is_none() {
            header_missing = true;
        }
        match parse_record(line) {
            Ok(event) => match check_event(&event, &mut last_t) {
                None => events.push(event),
                Some(reason) => rejects.push(Reject {
                    line: line_no,
                    reason,
                }),
            },
            Err(reason) => rejects.push(Reject {
                line: line_no,
                reason,
            }),
        }
    }

    if records == 0 {
        return Err(Error::EmptyLog);
    }
    let device = match device {
        Some(d) if !header_missing => d,
        _ => return Err(Error::MissingDeviceHeader),
    };
    device.validate()?;
    if rejects.len() as f64 > MAX_REJECT_RATIO * records as f64 {
        return Err(Error::CorruptLog {
            rejected: rejects.len(),
            total: records,
            lines: rejects.iter().map(|r| r.line).collect(),
        });
    }
    if events.is_empty() {
        return Err(Error::EmptyLog);
    }

    let origin = events.iter().map(|e| e.t).fold(f64::INFINITY, f64::min);
    for e in &mut events {
        e.t -= origin;
    }

    Ok(Session {
        session_id: session_id.to_string(),
        device,
        events,
        gestures: Vec::new(),
        metadata,
        time_origin_ms: origin,
        report: ValidationReport {
            records,
            rejects,
            ..Default::default()
        },
    })
}

/// Write a session back out in log format. Parsing the result reproduces
/// the events bit-for-bit.
pub fn serialize_log(session: &Session) -> String {
    let mut out = String::with_capacity(32 * (session.events.len() + 2));
    out.push_str(&session.device.header_line());
    out.push('\n');
    for (k, v) in &session.metadata {
        let v = v.replace(['\n', '\r'], " ");
        let _ = writeln!(out, "#meta,{k},{v}");
    }
    for e in &session.events {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.t,
            e.pointer_id,
            e.action.code(),
            e.x,
            e.y
        );
    }
    out
}

struct Draft {
    pointer_id: u32,
    indices: Vec<usize>,
    force_closed: bool,
}

/// Split each pointer's event stream into gestures.
///
/// A Down opens a gesture, Moves extend it, an Up closes it. A Down arriving
/// while a gesture is still open, or the end of the log, force-closes the open
/// gesture at its last event. Move/Up events with nothing open are orphans.
/// Gesture ids follow ascending start time (pointer id breaks ties).
pub fn segment_gestures(mut session: Session) -> Session {
    let mut per_pointer: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, e) in session.events.iter().enumerate() {
        per_pointer.entry(e.pointer_id).or_default().push(i);
    }

    let mut drafts = Vec::new();
    let mut orphans = Vec::new();
    for (&pointer_id, indices) in &per_pointer {
        let mut open: Option<Vec<usize>> = None;
        for &i in indices {
            match session.events[i].action {
                Action::Down => {
                    if let Some(prev) = open.take() {
                        drafts.push(Draft {
                            pointer_id,
                            indices: prev,
                            force_closed: true,
                        });
                    }
                    open = Some(vec![i]);
                }
                Action::Move => match open.as_mut() {
                    Some(cur) => cur.push(i),
                    None => orphans.push(i),
                },
                Action::Up => match open.take() {
                    Some(mut cur) => {
                        cur.push(i);
                        drafts.push(Draft {
                            pointer_id,
                            indices: cur,
                            force_closed: false,
                        });
                    }
                    None => orphans.push(i),
                },
            }
        }
        if let Some(cur) = open {
            drafts.push(Draft {
                pointer_id,
                indices: cur,
                force_closed: true,
            });
        }
    }

    let events = &session.events;
    drafts.sort_by(|a, b| {
        let ta = events[a.indices[0]].t;
        let tb = events[b.indices[0]].t;
        ta.total_cmp(&tb)
            .then(a.pointer_id.cmp(&b.pointer_id))
            .then(a.indices[0].cmp(&b.indices[0]))
    });

    let gestures: Vec<Gesture> = drafts
        .into_iter()
        .enumerate()
        .map(|(id, d)| {
            let points: Vec<GesturePoint> = d
                .indices
                .iter()
                .map(|&i| GesturePoint {
                    x: events[i].x,
                    y: events[i].y,
                    t: events[i].t,
                })
                .collect();
            Gesture {
                gesture_id: id as u32,
                pointer_id: d.pointer_id,
                start_t: points[0].t,
                end_t: points[points.len() - 1].t,
                points,
                event_indices: d.indices,
                force_closed: d.force_closed,
            }
        })
        .collect();

    orphans.sort_unstable();
    session.report.orphans = orphans;
    session.report.force_closed = gestures
        .iter()
        .filter(|g| g.force_closed)
        .map(|g| g.gesture_id)
        .collect();
    session.gestures = gestures;
    session
}

/// Parse and segment in one step.
pub fn load_session(session_id: &str, input: &[u8]) -> Result<Session> {
    parse_log(session_id, input).map(segment_gestures)
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Action::Down => "down",
            Action::Move => "move",
            Action::Up => "up",
        };
        f.write_str(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "#device,1920,1080,110.7,62.3\n";

    fn log(body: &str) -> Vec<u8> {
        format!("{HEADER}{body}").into_bytes()
    }

    #[test]
    fn minimal_log_parses() {
        let s = parse_log("s", &log("0,0,D,0,0\n10,0,M,5,0\n20,0,U,10,0\n")).unwrap();
        assert_eq!(s.events.len(), 3);
        assert!(s.report.rejects.is_empty());
        assert_eq!(s.device, DeviceProfile::reference());
    }

    #[test]
    fn unknown_action_is_rejected_with_line_number() {
        let mut body = String::new();
        for i in 0..10 {
            body.push_str(&format!("{},0,M,1,1\n", i * 10));
        }
        body.push_str("200,0,fly,1,1\n");
        let s = parse_log("s", &log(&body)).unwrap();
        assert_eq!(s.events.len(), 10);
        assert_eq!(s.report.rejects.len(), 1);
        // header is line 1, records start at line 2
        assert_eq!(s.report.rejects[0].line, 12);
        assert!(s.report.rejects[0].reason.contains("fly"));
        assert!(s.report.to_text().starts_with("line 12:"));
    }

    #[test]
    fn too_many_bad_lines_is_corrupt() {
        let err = parse_log("s", &log("0,0,D,0,0\n1,0,X,0,0\n2,0,U,0,0\n")).unwrap_err();
        match err {
            Error::CorruptLog {
                rejected, lines, ..
            } => {
                assert_eq!(rejected, 1);
                assert_eq!(lines, vec![3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_stream() {
        assert_eq!(parse_log("s", b""), Err(Error::EmptyLog));
        assert_eq!(parse_log("s", HEADER.as_bytes()), Err(Error::EmptyLog));
    }

    #[test]
    fn header_required_before_records() {
        assert_eq!(
            parse_log("s", b"0,0,D,0,0\n1,0,U,0,0\n"),
            Err(Error::MissingDeviceHeader)
        );
        assert!(matches!(
            parse_log("s", b"#device,0,1080,110.7,62.3\n0,0,D,0,0\n"),
            Err(Error::InvalidDevice(_))
        ));
    }

    #[test]
    fn non_finite_coordinates_rejected_per_line() {
        let mut body = String::from("0,0,D,NaN,0\n");
        for i in 1..=12 {
            body.push_str(&format!("{i},0,M,1,1\n"));
        }
        let s = parse_log("s", &log(&body)).unwrap();
        assert_eq!(s.report.rejects.len(), 1);
        assert_eq!(s.report.rejects[0].line, 2);
        assert!(s.report.rejects[0].reason.contains("non-finite"));
    }

    #[test]
    fn timestamps_are_session_relative() {
        let s = parse_log("s", &log("1000,0,D,0,0\n1010,0,U,0,0\n")).unwrap();
        assert_eq!(s.time_origin_ms, 1000.0);
        assert_eq!(s.events[0].t, 0.0);
        assert_eq!(s.events[1].t, 10.0);
    }

    #[test]
    fn metadata_lines() {
        let s = parse_log(
            "s",
            &log("#meta,participant,P1\n#meta,note,a,b\n# comment\n0,0,D,0,0\n"),
        )
        .unwrap();
        assert_eq!(s.metadata["participant"], "P1");
        assert_eq!(s.metadata["note"], "a,b");
    }

    #[test]
    fn single_gesture() {
        let s = load_session("s", &log("0,0,D,0,0\n10,0,M,5,0\n20,0,U,10,0\n")).unwrap();
        assert_eq!(s.gestures.len(), 1);
        let g = &s.gestures[0];
        assert_eq!(g.points.len(), 3);
        assert_eq!(g.duration(), 20.0);
        assert!(!g.force_closed);
    }

    #[test]
    fn interleaved_pointers_split() {
        // left thumb holds while right thumb taps
        let body = "0,0,D,300,800\n5,0,M,310,790\n7,1,D,1700,900\n9,1,U,1700,900\n12,0,M,320,780\n30,0,U,330,770\n";
        let s = load_session("s", &log(body)).unwrap();
        assert_eq!(s.gestures.len(), 2);
        assert_eq!(s.gestures[0].pointer_id, 0);
        assert_eq!(s.gestures[0].points.len(), 4);
        assert_eq!(s.gestures[1].pointer_id, 1);
        assert_eq!(s.gestures[1].points.len(), 2);
    }

    #[test]
    fn missing_up_is_force_closed() {
        let body = "0,0,D,0,0\n10,0,M,5,0\n20,0,M,10,0\n";
        let s = load_session("s", &log(body)).unwrap();
        assert_eq!(s.gestures.len(), 1);
        let g = &s.gestures[0];
        assert!(g.force_closed);
        assert_eq!(g.end_t, 20.0);
        assert_eq!(g.event_indices, vec![0, 1, 2]);
        assert_eq!(s.report.force_closed, vec![0]);
    }

    #[test]
    fn repeated_down_force_closes_previous() {
        let body = "0,0,D,0,0\n10,0,M,5,0\n20,0,D,50,50\n30,0,U,50,50\n";
        let s = load_session("s", &log(body)).unwrap();
        assert_eq!(s.gestures.len(), 2);
        assert!(s.gestures[0].force_closed);
        assert_eq!(s.gestures[0].end_t, 10.0);
        assert!(!s.gestures[1].force_closed);
    }

    #[test]
    fn orphans_are_excluded_and_reported() {
        let body = "0,0,M,0,0\n5,0,U,0,0\n10,0,D,1,1\n20,0,U,1,1\n";
        let s = load_session("s", &log(body)).unwrap();
        assert_eq!(s.report.orphans, vec![0, 1]);
        assert_eq!(s.gestures.len(), 1);
        let total: usize = s.gestures.iter().map(|g| g.points.len()).sum();
        assert_eq!(total + s.report.orphans.len(), s.events.len());
    }

    #[test]
    fn regression_within_pointer_rejected() {
        let mut body = String::new();
        for i in 0..12 {
            body.push_str(&format!("{},0,M,0,0\n", i * 10));
        }
        body.push_str("5,0,M,0,0\n");
        let s = parse_log("s", &log(&body)).unwrap();
        assert_eq!(s.report.rejects.len(), 1);
        assert!(s.report.rejects[0].reason.contains("precedes"));
    }

    #[test]
    fn px_to_mm_reference_device() {
        let d = DeviceProfile::reference();
        assert!((px_to_mm(1920.0, &d, Axis::Width) - 110.7).abs() < 1e-12);
        assert_eq!(px_to_mm(0.0, &d, Axis::Width), 0.0);
        let diameter = px_to_mm(2.0 * 146.331, &d, Axis::Isotropic);
        assert!((diameter - 16.873).abs() < 5e-3, "{diameter}");
        assert!((px_to_mm(1080.0, &d, Axis::Height) - 62.3).abs() < 1e-12);
    }

    #[test]
    fn strict_isotropy() {
        let d = DeviceProfile::reference();
        assert!(d.isotropy_skew() < 1e-3);
        assert!(d.check_isotropic().is_ok());
        let skewed = DeviceProfile::new(1000.0, 1000.0, 100.0, 120.0).unwrap();
        assert!(matches!(
            skewed.check_isotropic(),
            Err(Error::AnisotropicDevice { .. })
        ));
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let body = "0,0,D,0.1,0.2\n0.30000000000000004,0,M,1e-7,1919.9999999\n16.666666666666668,0,U,3,4\n";
        let s = parse_log("s", &log(&format!("#meta,k,v\n{body}"))).unwrap();
        let again = parse_log("s", serialize_log(&s).as_bytes()).unwrap();
        assert_eq!(s.events.len(), again.events.len());
        for (a, b) in s.events.iter().zip(&again.events) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
            assert_eq!(a.pointer_id, b.pointer_id);
            assert_eq!(a.action, b.action);
        }
        assert_eq!(again.metadata, s.metadata);
    }
}
