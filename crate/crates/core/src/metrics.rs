//! Fixed-length gesture vectors and the distances used to compare them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ingest::{DeviceProfile, Gesture, Session};

pub const DEFAULT_SAMPLES: usize = 32;
pub const DEFAULT_WEIGHT_EUCLID: f64 = 0.5;

/// A gesture resampled to `N` points evenly spaced along its path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureVector {
    pub gesture_id: u32,
    pub points: Vec<Point>,
    /// Arc length of the source polyline in px.
    pub source_length: f64,
}

impl GestureVector {
    pub fn from_points(gesture_id: u32, points: Vec<Point>) -> Self {
        let source_length = path_length(&points);
        Self {
            gesture_id,
            points,
            source_length,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Flat record: `gesture_id,N,x0,y0,...,x{N-1},y{N-1}`.
    pub fn to_record(&self) -> String {
        let mut out = format!("{},{}", self.gesture_id, self.points.len());
        for p in &self.points {
            let _ = write!(out, ",{},{}", p.x, p.y);
        }
        out
    }

    /// Parse a record produced by [`GestureVector::to_record`].
    pub fn from_record(record: &str) -> Option<Self> {
        let mut fields = record.trim().split(',');
        let gesture_id = fields.next()?.trim().parse().ok()?;
        let n: usize = fields.next()?.trim().parse().ok()?;
        let coords: Vec<f64> = fields
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .ok()?;
        if coords.len() != 2 * n {
            return None;
        }
        let points = coords.chunks(2).map(|c| Point::new(c[0], c[1])).collect();
        Some(Self::from_points(gesture_id, points))
    }
}

/// Weighting between the Euclidean and cosine terms of
/// [`combined_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceConfig {
    /// Weight of the Euclidean term; the cosine term gets `1 - weight_euclid`.
    pub weight_euclid: f64,
    pub n_samples: usize,
    /// Divides the Euclidean term, usually the screen diagonal in px.
    pub euclid_normalizer: f64,
    /// Subtract each vector's mean before the cosine term (shape-only
    /// comparison). Off by default: raw screen coordinates are used.
    #[serde(default)]
    pub center_cosine: bool,
}

impl DistanceConfig {
    pub fn for_device(device: &DeviceProfile) -> Self {
        Self {
            weight_euclid: DEFAULT_WEIGHT_EUCLID,
            n_samples: DEFAULT_SAMPLES,
            euclid_normalizer: device.diagonal_px(),
            center_cosine: false,
        }
    }

    pub fn with_weight(mut self, weight_euclid: f64) -> Self {
        self.weight_euclid = weight_euclid;
        self
    }

    pub fn with_samples(mut self, n_samples: usize) -> Self {
        self.n_samples = n_samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.weight_euclid) {
            return Err(Error::InvalidWeight(self.weight_euclid));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidSampleCount(self.n_samples));
        }
        if !(self.euclid_normalizer.is_finite() && self.euclid_normalizer > 0.0) {
            return Err(Error::InvalidDevice(format!(
                "euclid normalizer must be positive, got {}",
                self.euclid_normalizer
            )));
        }
        Ok(())
    }
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self::for_device(&DeviceProfile::reference())
    }
}

/// Total polyline length; 0 for a single point.
pub fn path_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Resample `points` to `n` samples spaced `length / (n - 1)` apart along the
/// path, by linear interpolation. Endpoints are copied exactly; a zero-length
/// path yields `n` copies of its first point.
pub fn resample_points(points: &[Point], n: usize) -> Result<Vec<Point>> {
    if n < 2 {
        return Err(Error::InvalidSampleCount(n));
    }
    let (first, last) = match (points.first(), points.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(Error::InvalidSampleCount(0)),
    };

    let mut cumulative = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in points.windows(2) {
        acc += w[0].distance(w[1]);
        cumulative.push(acc);
    }
    let total = acc;
    if total == 0.0 {
        return Ok(vec![first; n]);
    }

    let step = total / (n - 1) as f64;
    let mut out = Vec::with_capacity(n);
    out.push(first);
    for i in 1..n - 1 {
        let target = i as f64 * step;
        // last vertex at or before `target`; the segment after it is non-empty
        let j = cumulative.partition_point(|&c| c <= target) - 1;
        if cumulative[j] == target || j + 1 >= points.len() {
            out.push(points[j]);
            continue;
        }
        let seg = cumulative[j + 1] - cumulative[j];
        out.push(points[j].lerp(points[j + 1], (target - cumulative[j]) / seg));
    }
    out.push(last);
    Ok(out)
}

/// Resample a gesture into a [`GestureVector`] of `n` points.
pub fn resample(gesture: &Gesture, n: usize) -> Result<GestureVector> {
    let positions = gesture.positions();
    Ok(GestureVector {
        gesture_id: gesture.gesture_id,
        points: resample_points(&positions, n)?,
        source_length: path_length(&positions),
    })
}

/// Resample every gesture whose path is at least `min_length_px` long, in
/// gesture id order.
pub fn session_vectors(
    session: &Session,
    n: usize,
    min_length_px: f64,
) -> Result<Vec<GestureVector>> {
    let mut out = Vec::new();
    for g in &session.gestures {
        let v = resample(g, n)?;
        if v.source_length >= min_length_px {
            out.push(v);
        }
    }
    Ok(out)
}

fn check_dims(v: &GestureVector, w: &GestureVector) -> Result<()> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch {
            left: v.len(),
            right: w.len(),
        });
    }
    Ok(())
}

/// Euclidean distance between the flattened sample vectors.
pub fn euclid_distance(v: &GestureVector, w: &GestureVector) -> Result<f64> {
    check_dims(v, w)?;
    let sum: f64 = v
        .points
        .iter()
        .zip(&w.points)
        .map(|(a, b)| {
            let dx = b.x - a.x;
            let dy = b.y - a.y;
            dx * dx + dy * dy
        })
        .sum();
    Ok(sum.sqrt())
}

fn cosine_of(a: &[Point], b: &[Point]) -> Result<f64> {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (p, q) in a.iter().zip(b) {
        dot += p.x * q.x + p.y * q.y;
        na += p.x * p.x + p.y * p.y;
        nb += q.x * q.x + q.y * q.y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    // sqrt(na * nb) keeps identical inputs at exactly 1
    Ok((dot / (na * nb).sqrt()).clamp(-1.0, 1.0))
}

/// Cosine of the angle between the two vectors flattened to `2N` scalars.
pub fn cosine_similarity(v: &GestureVector, w: &GestureVector) -> Result<f64> {
    check_dims(v, w)?;
    cosine_of(&v.points, &w.points)
}

fn centered(points: &[Point]) -> Vec<Point> {
    let c = crate::geom::centroid(points).unwrap_or_default();
    points.iter().map(|&p| p - c).collect()
}

/// `weight * d1 / normalizer + (1 - weight) * (1 - cos) / 2`.
///
/// With `weight_euclid = 0` the metric is blind to uniform scaling, so
/// distinct but parallel vectors score 0.
pub fn combined_distance(
    v: &GestureVector,
    w: &GestureVector,
    config: &DistanceConfig,
) -> Result<f64> {
    check_dims(v, w)?;
    let weight = config.weight_euclid;
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::InvalidWeight(weight));
    }
    let euclid_term = if weight > 0.0 {
        weight * euclid_distance(v, w)? / config.euclid_normalizer
    } else {
        0.0
    };
    let cosine_term = if weight < 1.0 {
        let cos = if config.center_cosine {
            cosine_of(&centered(&v.points), &centered(&w.points))?
        } else {
            cosine_of(&v.points, &w.points)?
        };
        (1.0 - weight) * (1.0 - cos) / 2.0
    } else {
        0.0
    };
    Ok(euclid_term + cosine_term)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn vector(coords: &[(f64, f64)]) -> GestureVector {
        GestureVector::from_points(0, pts(coords))
    }

    #[test]
    fn path_length_examples() {
        assert_eq!(
            path_length(&pts(&[(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)])),
            7.0
        );
        assert_eq!(path_length(&pts(&[(4.0, 4.0)])), 0.0);
    }

    #[test]
    fn resample_midpoint() {
        let out = resample_points(&pts(&[(0.0, 0.0), (10.0, 0.0)]), 3).unwrap();
        assert_eq!(out, pts(&[(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)]));
    }

    #[test]
    fn resample_around_corner() {
        // spacing 7/7 = 1: four steps along x reach the corner exactly
        let out = resample_points(&pts(&[(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)]), 8).unwrap();
        let expected = pts(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (3.0, 0.0),
            (3.0, 1.0),
            (3.0, 2.0),
            (3.0, 3.0),
            (3.0, 4.0),
        ]);
        for (a, b) in out.iter().zip(&expected) {
            assert!(a.distance(*b) < 1e-12, "{a:?} vs {b:?}");
        }
        assert_eq!(out[3], Point::new(3.0, 0.0));
    }

    #[test]
    fn resample_fixed_point() {
        let input = pts(&[(0.0, 0.0), (2.0, 0.0), (4.0, 0.0), (6.0, 0.0)]);
        assert_eq!(resample_points(&input, 4).unwrap(), input);
    }

    #[test]
    fn resample_tap_and_invalid_n() {
        let out = resample_points(&pts(&[(7.0, 9.0)]), 5).unwrap();
        assert_eq!(out, vec![Point::new(7.0, 9.0); 5]);
        assert_eq!(
            resample_points(&pts(&[(0.0, 0.0), (1.0, 0.0)]), 1),
            Err(Error::InvalidSampleCount(1))
        );
    }

    #[test]
    fn resample_skips_duplicate_vertices() {
        let out =
            resample_points(&pts(&[(0.0, 0.0), (0.0, 0.0), (4.0, 0.0), (4.0, 0.0)]), 5).unwrap();
        assert_eq!(
            out,
            pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)])
        );
    }

    #[test]
    fn euclid_examples() {
        let v = vector(&[(0.0, 0.0), (1.0, 0.0)]);
        let w = vector(&[(0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(euclid_distance(&v, &v).unwrap(), 0.0);
        assert_eq!(euclid_distance(&v, &w).unwrap(), 2f64.sqrt());
        assert_eq!(
            euclid_distance(&v, &vector(&[(0.0, 0.0)])),
            Err(Error::DimensionMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn cosine_examples() {
        let v = vector(&[(1.0, 2.0), (3.0, -1.0)]);
        let neg = vector(&[(-1.0, -2.0), (-3.0, 1.0)]);
        assert_eq!(cosine_similarity(&v, &v).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&v, &neg).unwrap(), -1.0);
        let a = vector(&[(1.0, 0.0), (1.0, 0.0)]);
        let b = vector(&[(0.0, 1.0), (0.0, 1.0)]);
        assert_eq!(cosine_similarity(&a, &b).unwrap(), 0.0);
        let zero = vector(&[(0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(cosine_similarity(&a, &zero), Err(Error::ZeroNorm));
    }

    #[test]
    fn combined_examples() {
        let cfg = DistanceConfig::default();
        let v = vector(&[(100.0, 200.0), (300.0, 250.0)]);
        let neg = vector(&[(-100.0, -200.0), (-300.0, -250.0)]);
        assert_eq!(combined_distance(&v, &v, &cfg).unwrap(), 0.0);
        assert_eq!(
            combined_distance(&v, &v, &cfg.with_weight(0.0)).unwrap(),
            0.0
        );

        let w = vector(&[(110.0, 190.0), (320.0, 260.0)]);
        let pure = combined_distance(&v, &w, &cfg.with_weight(1.0)).unwrap();
        assert_eq!(
            pure,
            euclid_distance(&v, &w).unwrap() / cfg.euclid_normalizer
        );

        assert_eq!(
            combined_distance(&v, &neg, &cfg.with_weight(0.0)).unwrap(),
            1.0
        );
        assert_eq!(
            combined_distance(&v, &w, &cfg.with_weight(1.5)),
            Err(Error::InvalidWeight(1.5))
        );
    }

    #[test]
    fn centered_cosine_ignores_translation() {
        let cfg = DistanceConfig {
            center_cosine: true,
            ..DistanceConfig::default()
        }
        .with_weight(0.0);
        let v = vector(&[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)]);
        let shifted = vector(&[(500.0, 300.0), (510.0, 300.0), (520.0, 300.0)]);
        assert!(combined_distance(&v, &shifted, &cfg).unwrap() < 1e-15);
    }

    #[test]
    fn flat_record_round_trip() {
        let v = GestureVector::from_points(12, pts(&[(0.5, 1.0), (2.0, 3.25)]));
        let rec = v.to_record();
        assert_eq!(rec, "12,2,0.5,1,2,3.25");
        assert_eq!(GestureVector::from_record(&rec), Some(v));
        assert_eq!(GestureVector::from_record("1,3,0,0"), None);
    }
}
