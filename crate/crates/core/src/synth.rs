//! Deterministic synthetic sessions on the reference landscape device.
//!
//! Every generator is a pure function of its seed. The fixtures mimic an
//! action game: a virtual joystick bottom-left steered by the left thumb
//! (pointer 0) and five skill buttons bottom-right pressed by the right thumb
//! (pointer 1).

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geom::Point;
use crate::ingest::{segment_gestures, Action, DeviceProfile, Session, TouchEvent};
use crate::layout::SemanticRegion;

pub const JOYSTICK_CENTER: Point = Point::new(300.0, 800.0);
pub const JOYSTICK_RADIUS: f64 = 220.0;
/// Interval between Move samples, roughly a 60 Hz digitizer.
pub const SAMPLE_INTERVAL_MS: f64 = 16.0;

const LEFT_THUMB: u32 = 0;
const RIGHT_THUMB: u32 = 1;

/// Skill buttons in clockwise trigger order, Normal Attack first.
pub fn skill_regions() -> Vec<SemanticRegion> {
    let buttons = [
        ("Normal Attack", 1700.0, 900.0, 110.0),
        ("skill 1", 1450.0, 970.0, 70.0),
        ("skill 2", 1490.0, 760.0, 70.0),
        ("skill 3", 1640.0, 640.0, 70.0),
        ("skill 4", 1830.0, 600.0, 70.0),
    ];
    buttons
        .iter()
        .enumerate()
        .map(|(i, &(label, x, y, r))| SemanticRegion {
            region_id: i as u32,
            label: label.to_string(),
            center: Point::new(x, y),
            radius: r,
            ring_index: i as u32,
        })
        .collect()
}

/// Joystick followed by the skill buttons; the joystick takes the outermost
/// ring.
pub fn ui_regions() -> Vec<SemanticRegion> {
    let mut regions = vec![SemanticRegion {
        region_id: 0,
        label: "joystick".into(),
        center: JOYSTICK_CENTER,
        radius: JOYSTICK_RADIUS,
        ring_index: 5,
    }];
    regions.extend(skill_regions().into_iter().map(|mut r| {
        r.region_id += 1;
        r
    }));
    regions
}

/// Regions file text: one `label,ring,cx,cy,r` line per region.
pub fn regions_file(regions: &[SemanticRegion]) -> String {
    regions
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}\n",
                r.label, r.ring_index, r.center.x, r.center.y, r.radius
            )
        })
        .collect()
}

/// Accumulates scripted touches and emits them as a time-ordered session.
pub struct Script {
    rng: ChaCha8Rng,
    events: Vec<TouchEvent>,
    jitter: Normal<f64>,
}

impl Script {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            events: Vec::new(),
            jitter: Normal::new(0.0, 1.5).expect("valid sigma"),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn push(&mut self, pointer: u32, action: Action, p: Point, t: f64) {
        self.events.push(TouchEvent::new(
            pointer,
            action,
            p.x.clamp(0.0, 1920.0),
            p.y.clamp(0.0, 1080.0),
            t,
        ));
    }

    /// Drag along `waypoints` (polyline) from `start` for `duration` ms,
    /// sampled every [`SAMPLE_INTERVAL_MS`] with small positional jitter.
    pub fn drag(&mut self, pointer: u32, start: f64, duration: f64, waypoints: &[Point]) {
        let total: f64 = waypoints.windows(2).map(|w| w[0].distance(w[1])).sum();
        let steps = ((duration / SAMPLE_INTERVAL_MS).floor() as usize).max(1);
        self.push(pointer, Action::Down, waypoints[0], start);
        for s in 1..steps {
            let along = total * s as f64 / steps as f64;
            let p = point_along(waypoints, along);
            let jx = self.jitter.sample(&mut self.rng);
            let jy = self.jitter.sample(&mut self.rng);
            self.push(
                pointer,
                Action::Move,
                p + Point::new(jx, jy),
                start + s as f64 * duration / steps as f64,
            );
        }
        let end = *waypoints.last().expect("non-empty waypoints");
        self.push(pointer, Action::Up, end, start + duration);
    }

    /// Press-and-release at `at` held for `hold` ms.
    pub fn tap(&mut self, pointer: u32, t: f64, at: Point, hold: f64) {
        self.push(pointer, Action::Down, at, t);
        self.push(pointer, Action::Up, at, t + hold);
    }

    /// Tap a region near its centre (Gaussian spread of a third of its radius).
    pub fn tap_region(&mut self, region: &SemanticRegion, t: f64) {
        let spread = Normal::new(0.0, region.radius / 3.0).expect("valid sigma");
        let mut p =
            region.center + Point::new(spread.sample(&mut self.rng), spread.sample(&mut self.rng));
        if !region.contains(p) {
            p = region.center;
        }
        let hold = self.rng.random_range(60.0..140.0);
        self.tap(RIGHT_THUMB, t, p, hold);
    }

    pub fn into_session(mut self, id: &str) -> Session {
        self.events.sort_by(|a, b| a.t.total_cmp(&b.t));
        let origin = self.events.first().map_or(0.0, |e| e.t);
        for e in &mut self.events {
            e.t -= origin;
        }
        let session = Session::from_events(id, DeviceProfile::reference(), self.events)
            .expect("generated events are valid");
        segment_gestures(session)
    }
}

fn point_along(waypoints: &[Point], along: f64) -> Point {
    let mut remaining = along;
    for w in waypoints.windows(2) {
        let len = w[0].distance(w[1]);
        if remaining <= len && len > 0.0 {
            return w[0].lerp(w[1], remaining / len);
        }
        remaining -= len;
    }
    *waypoints.last().expect("non-empty waypoints")
}

/// A wandering joystick path: starts near the joystick centre and visits
/// `legs` random points within the joystick's reach.
fn joystick_path(rng: &mut ChaCha8Rng, legs: usize) -> Vec<Point> {
    let mut path = vec![
        JOYSTICK_CENTER + Point::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)),
    ];
    for _ in 0..legs {
        let a = rng.random_range(0.0..TAU);
        let r = rng.random_range(60.0..JOYSTICK_RADIUS);
        path.push(JOYSTICK_CENTER + Point::new(r * a.cos(), r * a.sin()));
    }
    path
}

/// Labelled, time-ordered gestures: gesture id `i` is the `i`-th scripted one.
pub struct ScriptedSession {
    pub session: Session,
    /// Movement gesture ids (joystick drags).
    pub movements: Vec<u32>,
    /// Skill presses as (press time, region ring index), in time order.
    pub skill_presses: Vec<(f64, u32)>,
}

/// Novice play: two short drags in the first ten seconds, then one drag held
/// from 13 s to the end of a 120 s session, while the right thumb mashes the
/// skill buttons in clockwise order with Normal Attack in between.
pub fn novice_session(seed: u64) -> ScriptedSession {
    let mut script = Script::new(seed);
    let regions = skill_regions();

    let b = joystick_path(script.rng(), 3);
    script.drag(LEFT_THUMB, 0.0, 3500.0, &b);
    let c = joystick_path(script.rng(), 3);
    script.drag(LEFT_THUMB, 5000.0, 4000.0, &c);
    let a = joystick_path(script.rng(), 60);
    script.drag(LEFT_THUMB, 13_000.0, 107_000.0, &a);

    let mut presses = Vec::new();
    let mut t = 11_000.0;
    while t < 116_000.0 {
        for (k, r) in regions.iter().enumerate() {
            let at = t + k as f64 * 300.0;
            script.tap_region(r, at);
            presses.push((at, r.ring_index));
        }
        // Normal Attack spam until the cooldowns end
        for j in 0..4 {
            let at = t + 1700.0 + j as f64 * 600.0;
            script.tap_region(&regions[0], at);
            presses.push((at, 0));
        }
        t += 6000.0;
    }
    presses.sort_by(|a, b| a.0.total_cmp(&b.0));

    let session = script.into_session("novice");
    let movements = movement_ids(&session);
    ScriptedSession {
        session,
        movements,
        skill_presses: presses,
    }
}

/// Expert play: four long joystick drags, each immediately followed by a
/// skill combo (Normal Attack then skills 1-4), with intermittent Normal
/// Attacks during movement.
pub fn expert_session(seed: u64) -> ScriptedSession {
    let mut script = Script::new(seed);
    let regions = skill_regions();
    let mut presses = Vec::new();

    let mut t = 2000.0;
    for _ in 0..4 {
        let duration = script.rng().random_range(17_000.0..21_000.0);
        let path = joystick_path(script.rng(), 12);
        script.drag(LEFT_THUMB, t, duration, &path);
        let mut at = t + 4000.0;
        while at < t + duration - 2000.0 {
            script.tap_region(&regions[0], at);
            presses.push((at, 0));
            at += 5000.0;
        }
        let combo_start = t + duration + 400.0;
        for (k, r) in regions.iter().enumerate() {
            let at = combo_start + k as f64 * 700.0;
            script.tap_region(r, at);
            presses.push((at, r.ring_index));
        }
        t = combo_start + 4.0 * 700.0 + 3000.0;
    }
    presses.sort_by(|a, b| a.0.total_cmp(&b.0));

    let session = script.into_session("expert");
    let movements = movement_ids(&session);
    ScriptedSession {
        session,
        movements,
        skill_presses: presses,
    }
}

fn movement_ids(session: &Session) -> Vec<u32> {
    session
        .gestures
        .iter()
        .filter(|g| g.pointer_id == LEFT_THUMB)
        .map(|g| g.gesture_id)
        .collect()
}

/// Joystick drags in two directions: label 0 drags left from the joystick
/// centre, label 1 drags right. Returns the session and gesture id -> label.
pub fn two_motif_session(seed: u64, per_motif: usize) -> (Session, BTreeMap<u32, usize>) {
    let mut script = Script::new(seed);
    let mut labels = Vec::new();
    let mut t = 0.0;
    for i in 0..2 * per_motif {
        let label = i % 2;
        let rng = script.rng();
        let start = JOYSTICK_CENTER
            + Point::new(rng.random_range(-25.0..25.0), rng.random_range(-25.0..25.0));
        let reach = rng.random_range(150.0..200.0);
        let bend = rng.random_range(-40.0..40.0);
        let dir = if label == 0 { -1.0 } else { 1.0 };
        let mid = start + Point::new(dir * reach / 2.0, bend);
        let end = start + Point::new(dir * reach, bend * 0.5);
        let duration = rng.random_range(400.0..900.0);
        script.drag(LEFT_THUMB, t, duration, &[start, mid, end]);
        labels.push(label);
        t += duration + 300.0;
    }
    let session = script.into_session("two-motif");
    let map = session
        .gestures
        .iter()
        .map(|g| (g.gesture_id, labels[g.gesture_id as usize]))
        .collect();
    (session, map)
}

/// Counts recorded for one generated corpus session.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub session_id: String,
    pub gestures: usize,
    pub events: usize,
}

/// A free-play study: 45 sessions of mixed joystick drags (in thirteen
/// preferred directions; long ones curl at the end, short ones are
/// nudges) and skill taps, about 400 gestures overall.
pub fn ui_study_corpus(seed: u64) -> (Vec<Session>, Vec<CorpusEntry>) {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let regions = skill_regions();
    let touch_spread = Normal::new(0.0, 30.0).expect("valid sigma");
    let mut sessions = Vec::new();
    let mut manifest = Vec::new();
    for participant in 0..9 {
        for round in 0..5 {
            let id = format!("p{participant:02}-r{round}");
            let mut script = Script::new(master.random());
            let mut t = 0.0;
            let drags = script.rng().random_range(4..7);
            for _ in 0..drags {
                let rng = script.rng();
                let start = JOYSTICK_CENTER
                    + Point::new(touch_spread.sample(rng), touch_spread.sample(rng));
                let motif = rng.random_range(0..13) as f64;
                let angle = motif * TAU / 13.0 + rng.random_range(-0.1..0.1);
                let long = rng.random_bool(0.7);
                let dir = Point::new(angle.cos(), angle.sin());
                let waypoints = if long {
                    // push out, then curl sideways while holding
                    let out = start + dir * rng.random_range(170.0..230.0);
                    let side = Point::new(-dir.y, dir.x) * rng.random_range(50.0..90.0);
                    vec![start, out, out + side]
                } else {
                    vec![start, start + dir * rng.random_range(5.0..30.0)]
                };
                let duration = rng.random_range(300.0..2500.0);
                script.drag(LEFT_THUMB, t, duration, &waypoints);
                t += duration + script.rng().random_range(100.0..800.0);
            }
            let taps = script.rng().random_range(2..5);
            let mut at = script.rng().random_range(0.0..500.0);
            for _ in 0..taps {
                let k = script.rng().random_range(0..regions.len());
                script.tap_region(&regions[k], at);
                at += script.rng().random_range(300.0..1500.0);
            }
            let session = script.into_session(&id);
            manifest.push(CorpusEntry {
                session_id: id,
                gestures: session.gestures.len(),
                events: session.events.len(),
            });
            sessions.push(session);
        }
    }
    (sessions, manifest)
}

/// Isotropic Gaussian blob of touch points.
pub fn gaussian_blob(rng: &mut impl Rng, center: Point, sigma: f64, n: usize) -> Vec<Point> {
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    (0..n)
        .map(|_| center + Point::new(normal.sample(rng), normal.sample(rng)))
        .collect()
}
