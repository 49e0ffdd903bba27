//! K-means over gesture vectors, plus the coverage-based confidence regions
//! used to size on-screen controls.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{centroid, Point};
use crate::ingest::{px_to_mm, Axis, DeviceProfile};
use crate::metrics::{combined_distance, path_length, DistanceConfig, GestureVector};

pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub max_iterations: usize,
    pub seed: u64,
    pub distance: DistanceConfig,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 0,
            distance: DistanceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub k: usize,
    /// gesture id -> cluster index
    pub assignment: BTreeMap<u32, usize>,
    /// Cluster index per input vector, in input order.
    pub labels: Vec<usize>,
    pub centroids: Vec<GestureVector>,
    pub sizes: Vec<usize>,
    /// Sum over all vectors of the combined distance to their own centroid.
    pub inertia: f64,
    /// Inertia after initialisation and after every iteration.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
}

struct Assigner<'a> {
    vectors: &'a [GestureVector],
    config: &'a DistanceConfig,
}

impl Assigner<'_> {
    fn dist(&self, v: &GestureVector, c: &GestureVector) -> Result<f64> {
        combined_distance(v, c, self.config)
    }

    /// Nearest centroid per vector (lowest index wins ties) and its distance.
    fn assign(&self, centroids: &[GestureVector]) -> Result<(Vec<usize>, Vec<f64>)> {
        let mut labels = Vec::with_capacity(self.vectors.len());
        let mut dists = Vec::with_capacity(self.vectors.len());
        for v in self.vectors {
            let mut best = (0, f64::INFINITY);
            for (j, c) in centroids.iter().enumerate() {
                let d = self.dist(v, c)?;
                if d < best.1 {
                    best = (j, d);
                }
            }
            labels.push(best.0);
            dists.push(best.1);
        }
        Ok((labels, dists))
    }

    fn cluster_cost(&self, members: &[usize], centroid: &GestureVector) -> Result<f64> {
        members
            .iter()
            .map(|&i| self.dist(&self.vectors[i], centroid))
            .sum()
    }
}

fn mean_vector(id: u32, members: &[&GestureVector]) -> GestureVector {
    let n = members[0].len();
    let mut points = vec![Point::default(); n];
    for v in members {
        for (acc, p) in points.iter_mut().zip(&v.points) {
            acc.x += p.x;
            acc.y += p.y;
        }
    }
    let count = members.len() as f64;
    for p in &mut points {
        p.x /= count;
        p.y /= count;
    }
    GestureVector {
        gesture_id: id,
        source_length: path_length(&points),
        points,
    }
}

fn centroid_from(index: usize, v: &GestureVector) -> GestureVector {
    GestureVector {
        gesture_id: index as u32,
        ..v.clone()
    }
}

/// Farthest-first seeding: one seeded random pick, then repeatedly the vector
/// farthest from all chosen centroids (lowest index on ties).
fn seed_centroids(assigner: &Assigner<'_>, k: usize, seed: u64) -> Result<Vec<GestureVector>> {
    let vectors = assigner.vectors;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..vectors.len());
    let mut chosen = vec![first];
    let mut nearest: Vec<f64> = vectors
        .iter()
        .map(|v| assigner.dist(v, &vectors[first]))
        .collect::<Result<_>>()?;
    while chosen.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for (i, &d) in nearest.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        let (pick, _) = best.expect("k <= number of vectors");
        chosen.push(pick);
        for (i, v) in vectors.iter().enumerate() {
            nearest[i] = nearest[i].min(assigner.dist(v, &vectors[pick])?);
        }
    }
    Ok(chosen
        .into_iter()
        .enumerate()
        .map(|(j, i)| centroid_from(j, &vectors[i]))
        .collect())
}

/// Give every empty cluster a member: the vector farthest from its own
/// centroid among clusters that can spare one. Never increases inertia.
fn reseed_empty(
    vectors: &[GestureVector],
    centroids: &mut [GestureVector],
    labels: &mut [usize],
    dists: &mut [f64],
) {
    let k = centroids.len();
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut best: Option<(usize, f64)> = None;
        for (i, &d) in dists.iter().enumerate() {
            if sizes[labels[i]] < 2 {
                continue;
            }
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        let (pick, _) = best.expect("pigeonhole: k <= n leaves a cluster with two members");
        centroids[empty] = centroid_from(empty, &vectors[pick]);
        labels[pick] = empty;
        dists[pick] = 0.0;
    }
}

/// Lloyd-style k-means under [`combined_distance`].
///
/// Centroids move to the coordinate mean of their members, except when the
/// mean would raise that cluster's summed distance (the mixed metric has no
/// closed-form minimiser); then the previous centroid is kept. Together with
/// nearest-centroid assignment this makes inertia non-increasing.
pub fn kmeans(vectors: &[GestureVector], k: usize, config: &KMeansConfig) -> Result<ClusterResult> {
    if k == 0 {
        return Err(Error::InvalidClusterCount);
    }
    if k > vectors.len() {
        return Err(Error::TooFewPoints {
            k,
            available: vectors.len(),
        });
    }
    let n = vectors[0].len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: bad.len(),
        });
    }
    let assigner = Assigner {
        vectors,
        config: &config.distance,
    };

    let mut centroids = seed_centroids(&assigner, k, config.seed)?;
    let (mut labels, mut dists) = assigner.assign(&centroids)?;
    reseed_empty(vectors, &mut centroids, &mut labels, &mut dists);
    let mut inertia: f64 = dists.iter().sum();
    let mut history = vec![inertia];
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            members[l].push(i);
        }
        for (j, idx) in members.iter().enumerate() {
            let refs: Vec<&GestureVector> = idx.iter().map(|&i| &vectors[i]).collect();
            let candidate = mean_vector(j as u32, &refs);
            if assigner.cluster_cost(idx, &candidate)?
                <= assigner.cluster_cost(idx, &centroids[j])?
            {
                centroids[j] = candidate;
            }
        }

        let (mut next, mut next_dists) = assigner.assign(&centroids)?;
        reseed_empty(vectors, &mut centroids, &mut next, &mut next_dists);
        inertia = next_dists.iter().sum();
        history.push(inertia);
        dists = next_dists;
        let converged = next == labels;
        labels = next;
        if converged {
            break;
        }
    }

    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    debug_assert_eq!(dists.len(), vectors.len());
    Ok(ClusterResult {
        k,
        assignment: vectors
            .iter()
            .zip(&labels)
            .map(|(v, &l)| (v.gesture_id, l))
            .collect(),
        labels,
        centroids,
        sizes,
        inertia,
        inertia_history: history,
        iterations,
        seed: config.seed,
    })
}

/// Final inertia for each `k` in `ks`, for choosing a cluster count.
pub fn inertia_sweep(
    vectors: &[GestureVector],
    ks: impl IntoIterator<Item = usize>,
    config: &KMeansConfig,
) -> Result<Vec<(usize, f64)>> {
    ks.into_iter()
        .map(|k| kmeans(vectors, k, config).map(|r| (k, r.inertia)))
        .collect()
}

/// Circle fitted around a selection of touch points so that it covers a
/// fraction `confidence` of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceRegion {
    pub selection_center: Point,
    pub selection_radius: f64,
    pub confidence: f64,
    /// Points offered before the selection circle was applied.
    pub sampling_count: usize,
    pub original_center: Point,
    pub original_count: usize,
    pub new_center: Point,
    pub new_radius: f64,
    pub new_count: usize,
}

/// `floor(c * n)`, guarded against products such as `0.29 * 100` landing a
/// hair below an integer.
pub fn retained_count(confidence: f64, n: usize) -> usize {
    ((confidence * n as f64 + 1e-9).floor() as usize).min(n)
}

fn ranked_by_distance(selected: &[Point], from: Point) -> Vec<(f64, usize)> {
    let mut ranked: Vec<(f64, usize)> = selected
        .iter()
        .enumerate()
        .map(|(i, p)| (p.distance(from), i))
        .collect();
    // stable: equal distances keep input order
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    ranked
}

/// Trim-recenter-rerank fit.
///
/// Points within `selection_radius` of `selection_center` form the selection
/// S with centroid P0. The `floor(c * |S|)` points of S nearest P0 give a new
/// centroid P1; S is ranked again by distance to P1 and the same number of
/// nearest points is kept. The new radius is the largest of their distances.
pub fn confidence_region(
    points: &[Point],
    selection_center: Point,
    selection_radius: f64,
    confidence: f64,
) -> Result<ConfidenceRegion> {
    if !(confidence > 0.0 && confidence <= 1.0) {
        return Err(Error::InvalidConfidence(confidence));
    }
    let selected: Vec<Point> = points
        .iter()
        .copied()
        .filter(|p| p.distance(selection_center) <= selection_radius)
        .collect();
    let original_center = centroid(&selected).ok_or(Error::EmptySelection)?;
    let keep = retained_count(confidence, selected.len());
    if keep == 0 {
        return Err(Error::EmptyRetention {
            selected: selected.len(),
            confidence,
        });
    }

    let first_pass = ranked_by_distance(&selected, original_center);
    let new_center =
        centroid(first_pass[..keep].iter().map(|&(_, i)| &selected[i])).expect("keep >= 1");
    let second_pass = ranked_by_distance(&selected, new_center);
    let new_radius = second_pass[keep - 1].0;

    Ok(ConfidenceRegion {
        selection_center,
        selection_radius,
        confidence,
        sampling_count: points.len(),
        original_center,
        original_count: selected.len(),
        new_center,
        new_radius,
        new_count: keep,
    })
}

/// Screen edge used for the horizontal distance of [`UiMetrics`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Right for regions centred on the right half of the screen.
    pub fn nearest(center: Point, device: &DeviceProfile) -> Self {
        if center.x > device.width_px / 2.0 {
            Side::Right
        } else {
            Side::Left
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Physical placement of a fitted region, in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UiMetrics {
    pub side: Side,
    pub distance_to_side: f64,
    pub distance_to_bottom: f64,
    pub diameter: f64,
}

pub fn region_metrics(
    region: &ConfidenceRegion,
    device: &DeviceProfile,
    side: Side,
) -> Result<UiMetrics> {
    let c = region.new_center;
    if !device.contains(c) {
        return Err(Error::OutOfBounds { x: c.x, y: c.y });
    }
    let horizontal = match side {
        Side::Left => c.x,
        Side::Right => device.width_px - c.x,
    };
    Ok(UiMetrics {
        side,
        distance_to_side: px_to_mm(horizontal, device, Axis::Width),
        distance_to_bottom: px_to_mm(device.height_px - c.y, device, Axis::Height),
        diameter: px_to_mm(2.0 * region.new_radius, device, Axis::Isotropic),
    })
}
