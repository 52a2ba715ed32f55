//! The box-refinement seam: per-frame adjustment and scoring of particle
//! boxes. The neural regression/classification heads this replaces are out of
//! scope, so the default refiner snaps boxes toward the best-overlapping
//! public detection; an oracle variant locks onto reference trajectories for
//! upper-bound experiments and testing.

use super::TrackerError;
use crate::motdata::{centroid_distance, iou, BoundingBox, Detection, SequenceInfo};
use crate::ppm::RgbImage;
use std::collections::BTreeMap;

/// Minimum particle-to-detection IoU for the snap refiner to latch on; any
/// positive overlap qualifies by default (the requirement `> SNAP_IOU` keeps
/// the latch local to the particle).
pub const SNAP_IOU: f64 = 0.0;
/// Fraction of the way a snapped box moves toward its detection.
pub const SNAP_BLEND: f64 = 0.8;
/// Score decay applied when a track sees no usable detection.
pub const MISS_DECAY: f64 = 0.9;

/// Everything a refiner may look at for one frame.
pub struct FrameContext<'a> {
    pub frame: u32,
    /// Detections already thresholded at the working confidence.
    pub detections: &'a [Detection],
    pub image: Option<&'a RgbImage>,
    pub info: &'a SequenceInfo,
}

/// Per-track hints passed to the refiner alongside the particle batch.
pub struct TrackContext {
    pub track_id: i64,
    /// The track's expected position this frame (last estimate advanced by
    /// its velocity).
    pub prior_box: BoundingBox,
    pub velocity: (f64, f64),
    /// Mean particle score from the previous update.
    pub prev_score: f64,
}

/// Adjusts a batch of boxes in the current frame and scores each in [0, 1].
pub trait BoxRefiner {
    fn refine(
        &self,
        ctx: &FrameContext,
        track: &TrackContext,
        boxes: &[BoundingBox],
    ) -> Result<Vec<(BoundingBox, f64)>, TrackerError>;
}

/// How far, in units of (w + h) / 2, a detection can pull a non-overlapping
/// particle. Models the regression head's receptive field: the spawn cloud
/// spreads 1.5 box sizes around the seed, so attraction must reach that far
/// or freshly initialized particles never converge.
pub const ATTRACT_FACTOR: f64 = 1.5;

/// Default refiner: each box moves most of the way toward its best-matching
/// detection and is scored at the refined location (detection confidence x
/// IoU of the refined box); a particle with no overlapping detection is
/// still attracted to the nearest one inside [`ATTRACT_FACTOR`] box sizes.
/// Only boxes with no detection in reach coast along the track velocity with
/// a decayed score.
#[derive(Debug, Clone)]
pub struct DetectionSnapRefiner {
    pub snap_iou: f64,
    pub blend: f64,
    pub miss_decay: f64,
    pub attract_factor: f64,
}

impl Default for DetectionSnapRefiner {
    fn default() -> Self {
        Self {
            snap_iou: SNAP_IOU,
            blend: SNAP_BLEND,
            miss_decay: MISS_DECAY,
            attract_factor: ATTRACT_FACTOR,
        }
    }
}

impl DetectionSnapRefiner {
    /// The track-level target: the detection best overlapping the track
    /// prior. Particles that overlap nothing are pulled toward this box
    /// only, so a stray neighbor cannot siphon off a track's cloud; if the
    /// prior overlaps no detection at all the track coasts.
    fn track_target<'a>(
        &self,
        ctx: &FrameContext<'a>,
        prior: &BoundingBox,
    ) -> Option<&'a Detection> {
        let mut best: Option<(&Detection, f64)> = None;
        for d in ctx.detections {
            let overlap = iou(prior, &d.bbox);
            if overlap > self.snap_iou && best.map_or(true, |(_, o)| overlap > o) {
                best = Some((d, overlap));
            }
        }
        best.map(|(d, _)| d)
    }
}

impl BoxRefiner for DetectionSnapRefiner {
    fn refine(
        &self,
        ctx: &FrameContext,
        track: &TrackContext,
        boxes: &[BoundingBox],
    ) -> Result<Vec<(BoundingBox, f64)>, TrackerError> {
        let target = self.track_target(ctx, &track.prior_box);
        let mut out = Vec::with_capacity(boxes.len());
        for b in boxes {
            let mut best: Option<(&Detection, f64)> = None;
            for d in ctx.detections {
                if !b.intersects(&d.bbox) {
                    continue;
                }
                let overlap = iou(b, &d.bbox);
                if overlap > self.snap_iou && best.map_or(true, |(_, o)| overlap > o) {
                    best = Some((d, overlap));
                }
            }
            if best.is_none() {
                // No overlap: reach for the track target if it is inside the
                // attraction radius.
                if let Some(d) = target {
                    let radius = self.attract_factor * (b.w + b.h) / 2.0;
                    if centroid_distance(b, &d.bbox) <= radius {
                        best = Some((d, 0.0));
                    }
                }
            }
            match best {
                Some((d, _)) => {
                    let lerp = |a: f64, b: f64| a + self.blend * (b - a);
                    let refined = BoundingBox::new(
                        lerp(b.x, d.bbox.x),
                        lerp(b.y, d.bbox.y),
                        lerp(b.w, d.bbox.w),
                        lerp(b.h, d.bbox.h),
                    );
                    let score = d.conf * iou(&refined, &d.bbox);
                    out.push((refined, score.clamp(0.0, 1.0)));
                }
                None => {
                    let coasted = BoundingBox::new(
                        b.x + track.velocity.0,
                        b.y + track.velocity.1,
                        b.w,
                        b.h,
                    );
                    // Unsupported particles are only plausible near the
                    // motion prior; without this falloff a dispersed cloud
                    // keeps full weight anywhere and the posterior never
                    // contracts.
                    let r = ((track.prior_box.w + track.prior_box.h) / 2.0).max(1.0);
                    let d = centroid_distance(&coasted, &track.prior_box);
                    let locality = (-0.5 * (d / r).powi(2)).exp();
                    let score = track.prev_score * self.miss_decay * locality;
                    out.push((coasted, score.clamp(0.0, 1.0)));
                }
            }
        }
        Ok(out)
    }
}

/// Keeps every box unchanged and returns a fixed score. Test equipment.
#[derive(Debug, Clone, Copy)]
pub struct IdentityRefiner {
    pub score: f64,
}

impl BoxRefiner for IdentityRefiner {
    fn refine(
        &self,
        _ctx: &FrameContext,
        _track: &TrackContext,
        boxes: &[BoundingBox],
    ) -> Result<Vec<(BoundingBox, f64)>, TrackerError> {
        Ok(boxes.iter().map(|b| (*b, self.score)).collect())
    }
}

/// Upper-bound refiner: collapses every particle onto the reference box that
/// best matches the track's prior, with score 1. When no reference box is
/// anywhere near the track, everything scores 0 and the track starves.
#[derive(Debug, Clone, Default)]
pub struct OracleRefiner {
    reference: BTreeMap<u32, Vec<BoundingBox>>,
}

impl OracleRefiner {
    pub fn new(reference: BTreeMap<u32, Vec<BoundingBox>>) -> Self {
        Self { reference }
    }

    pub fn from_trajectories(trajs: &crate::motdata::TrajectoryMap) -> Self {
        let mut reference: BTreeMap<u32, Vec<BoundingBox>> = BTreeMap::new();
        for t in trajs.values() {
            for (frame, p) in &t.points {
                reference.entry(*frame).or_default().push(p.bbox);
            }
        }
        Self { reference }
    }

    fn target_for(&self, frame: u32, prior: &BoundingBox) -> Option<BoundingBox> {
        // Only a reference box the prior actually overlaps qualifies; a dead
        // target must starve rather than latch onto a neighbor.
        let boxes = self.reference.get(&frame)?;
        let mut best: Option<(f64, &BoundingBox)> = None;
        for b in boxes {
            let overlap = iou(prior, b);
            if overlap > 0.0 && best.map_or(true, |(o, _)| overlap > o) {
                best = Some((overlap, b));
            }
        }
        best.map(|(_, b)| *b)
    }
}

impl BoxRefiner for OracleRefiner {
    fn refine(
        &self,
        ctx: &FrameContext,
        track: &TrackContext,
        boxes: &[BoundingBox],
    ) -> Result<Vec<(BoundingBox, f64)>, TrackerError> {
        match self.target_for(ctx.frame, &track.prior_box) {
            Some(target) => Ok(boxes.iter().map(|_| (target, 1.0)).collect()),
            None => Ok(boxes.iter().map(|b| (*b, 0.0)).collect()),
        }
    }
}
