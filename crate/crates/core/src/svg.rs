//! Static SVG renderings for reports.

use std::fmt::Write as _;

use crate::clustering::ConfidenceRegion;
use crate::geom::Point;
use crate::ingest::{DeviceProfile, Session};
use crate::layout::{RadialLayout, Ring};
use crate::metrics::GestureVector;

const PALETTE: [&str; 13] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939", "#843c39",
];

fn open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Maps screen pixels into a rectangle of the canvas.
struct ScreenFrame {
    origin: Point,
    scale: f64,
}

impl ScreenFrame {
    fn to_canvas(&self, p: Point) -> Point {
        self.origin + p * self.scale
    }
}

fn screen_rect(out: &mut String, frame: &ScreenFrame, device: &DeviceProfile, fill: &str) {
    let _ = writeln!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" stroke="#444" stroke-width="1"/>"##,
        frame.origin.x,
        frame.origin.y,
        device.width_px * frame.scale,
        device.height_px * frame.scale
    );
}

fn polyline(
    out: &mut String,
    points: impl Iterator<Item = Point>,
    stroke: &str,
    width: f64,
    opacity: f64,
) {
    let coords: Vec<String> = points.map(|p| format!("{:.2},{:.2}", p.x, p.y)).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}" stroke-opacity="{opacity}"/>"#,
        coords.join(" ")
    );
}

/// Radial timeline with the session's screen and trajectories in the middle.
pub fn radial_layout_svg(layout: &RadialLayout, session: &Session, size: f64) -> String {
    let mut out = String::new();
    open(&mut out, size, size);
    let outer = layout
        .semantic_rings
        .iter()
        .map(|r| r.radius)
        .fold(layout.ring_radii.lift, f64::max);
    let center = Point::new(size / 2.0, size / 2.0);
    let scale = size / 2.0 * 0.92 / outer;
    let at = |p: Point| center + p * scale;

    // screen underlay inscribed in the touch ring
    let device = &session.device;
    let diag = 2.0 * layout.ring_radii.touch * 0.9 * scale;
    let px_scale = diag / device.diagonal_px();
    let frame = ScreenFrame {
        origin: center - Point::new(device.width_px, device.height_px) * (px_scale / 2.0),
        scale: px_scale,
    };
    screen_rect(&mut out, &frame, device, "#f4f4f4");
    for g in &session.gestures {
        polyline(
            &mut out,
            g.points.iter().map(|p| frame.to_canvas(p.position())),
            "#888",
            0.6,
            0.6,
        );
    }

    let r = layout.ring_radii;
    for (radius, name) in [(r.touch, "touch"), (r.moving, "move"), (r.lift, "lift")] {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#bbb" stroke-width="1"><title>{name}</title></circle>"##,
            center.x,
            center.y,
            radius * scale
        );
    }
    for ring in &layout.semantic_rings {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#cfa" stroke-width="1" stroke-dasharray="4 3"/>"##,
            center.x,
            center.y,
            ring.radius * scale
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="10" font-family="sans-serif" fill="#555">{}</text>"##,
            center.x + 4.0,
            center.y - ring.radius * scale - 2.0,
            escape(&ring.label)
        );
    }

    for a in &layout.arcs {
        let (p0, c1, c2, p3) = (at(a.from), at(a.control1), at(a.control2), at(a.to));
        let _ = writeln!(
            out,
            r##"<path d="M {:.2} {:.2} C {:.2} {:.2} {:.2} {:.2} {:.2} {:.2}" fill="none" stroke="#4a6fa5" stroke-width="1" stroke-opacity="0.7"><title>gesture {}</title></path>"##,
            p0.x, p0.y, c1.x, c1.y, c2.x, c2.y, p3.x, p3.y, a.gesture_id
        );
    }
    for d in &layout.dots {
        let (fill, radius) = match d.ring {
            Ring::Touch => ("#1f77b4", 2.2),
            Ring::Move => ("#2ca02c", 1.0),
            Ring::Lift => ("#d62728", 2.2),
        };
        let p = at(d.pos);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{fill}"/>"#,
            p.x, p.y
        );
    }
    for d in &layout.semantic_dots {
        let p = at(d.pos);
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#ff7f0e"/>"##,
            p.x, p.y
        );
    }
    out.push_str("</svg>\n");
    out
}

fn screen_canvas(device: &DeviceProfile, width: f64) -> (ScreenFrame, f64) {
    let margin = 10.0;
    let scale = (width - 2.0 * margin) / device.width_px;
    let height = device.height_px * scale + 2.0 * margin;
    (
        ScreenFrame {
            origin: Point::new(margin, margin),
            scale,
        },
        height,
    )
}

/// Touch points with each fitted region: selection circle (yellow),
/// original centre (red) and the fitted zone (green).
pub fn region_overlay_svg(
    device: &DeviceProfile,
    points: &[Point],
    regions: &[(String, ConfidenceRegion)],
    width: f64,
) -> String {
    let (frame, height) = screen_canvas(device, width);
    let mut out = String::new();
    open(&mut out, width, height);
    screen_rect(&mut out, &frame, device, "#fafafa");
    for p in points {
        let c = frame.to_canvas(*p);
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="0.8" fill="#555" fill-opacity="0.5"/>"##,
            c.x, c.y
        );
    }
    for (label, r) in regions {
        let sel = frame.to_canvas(r.selection_center);
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#ffd700" fill-opacity="0.15" stroke="#e6b800"/>"##,
            sel.x,
            sel.y,
            r.selection_radius * frame.scale
        );
        let fit = frame.to_canvas(r.new_center);
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#2ca02c" fill-opacity="0.25" stroke="#2ca02c"><title>{} c={:.2}</title></circle>"##,
            fit.x,
            fit.y,
            r.new_radius * frame.scale,
            escape(label),
            r.confidence
        );
        let orig = frame.to_canvas(r.original_center);
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#d62728"/>"##,
            orig.x, orig.y
        );
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#2ca02c"/>"##,
            fit.x, fit.y
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Mean trajectory of each cluster over the screen, stroke width growing
/// with cluster size.
pub fn cluster_svg(
    device: &DeviceProfile,
    centroids: &[GestureVector],
    sizes: &[usize],
    width: f64,
) -> String {
    let (frame, height) = screen_canvas(device, width);
    let mut out = String::new();
    open(&mut out, width, height);
    screen_rect(&mut out, &frame, device, "#fafafa");
    let largest = sizes.iter().copied().max().unwrap_or(1).max(1) as f64;
    for (j, c) in centroids.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        let size = sizes.get(j).copied().unwrap_or(0);
        let stroke = 1.0 + 3.0 * size as f64 / largest;
        polyline(
            &mut out,
            c.points.iter().map(|&p| frame.to_canvas(p)),
            color,
            stroke,
            0.9,
        );
        if let Some(&end) = c.points.last() {
            let e = frame.to_canvas(end);
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"><title>cluster {j}: {size} gestures</title></circle>"#,
                e.x, e.y
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
