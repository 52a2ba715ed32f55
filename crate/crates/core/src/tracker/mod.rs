//! Tracking-by-detection pipeline: particle-filter targets with pluggable box
//! refinement, camera-motion compensation, lifecycle management and
//! color-histogram re-identification, plus a Kalman-filter motion variant.

pub mod cmc;
mod kalman;
mod particle;
mod refiner;

pub use cmc::{warp_box, AffineTransform, CameraMotion};
pub use kalman::KalmanBoxState;
pub use particle::{
    effective_sample_size, estimate_state, init_particles, systematic_resample, Particle,
};
pub use refiner::{
    BoxRefiner, DetectionSnapRefiner, FrameContext, IdentityRefiner, OracleRefiner, TrackContext,
    MISS_DECAY, SNAP_BLEND, SNAP_IOU,
};

use crate::appearance::{bhattacharyya_distance, extract_histogram, HsvHistogram};
use crate::keyval;
use crate::motdata::{iou, AnnotationEntry, BoundingBox, Detection, SequenceInfo};
use crate::ppm::RgbImage;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("seed box has zero area")]
    ZeroAreaBox,
    #[error("track has no particles")]
    NoParticles,
    #[error("particle weights sum to zero")]
    ZeroWeights,
    #[error("particle weights are not normalized (sum = {0})")]
    UnnormalizedWeights(f64),
    #[error("frame gap: expected frame {expected}, got {found}")]
    FrameGap { expected: u32, found: u32 },
    #[error("detection at frame {frame} outside sequence of {count} frames")]
    FrameOutOfRange { frame: u32, count: u32 },
    #[error("refiner returned {found} boxes for {expected}")]
    RefinerMismatch { expected: usize, found: usize },
    #[error("refiner failure: {0}")]
    Refiner(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionModel {
    ParticleFilter,
    KalmanCva,
}

impl MotionModel {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pf" | "particle_filter" => Some(Self::ParticleFilter),
            "kf" | "kalman" | "kalman_cva" => Some(Self::KalmanCva),
            _ => None,
        }
    }
}

/// Tracker hyperparameters. Field names match the key=value config keys.
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    /// Particles per track.
    pub n_particles: usize,
    /// Particle initialization spread, in multiples of box width/height.
    pub init_spread: f64,
    /// Tracks whose mean particle score falls below this are set lost.
    pub lambda_reg: f64,
    /// Minimum detection confidence consumed by the tracker.
    pub lambda_det: f64,
    /// Frames a lost track is kept before removal.
    pub lambda_age: u32,
    /// Weight of IoU in the re-identification similarity.
    pub alpha: f64,
    /// Weight of color-histogram agreement in the re-identification
    /// similarity.
    pub beta: f64,
    /// Similarity a (lost track, new detection) pair must exceed to resume
    /// the lost identity. Above 1.0 disables re-identification.
    pub reid_accept: f64,
    /// Detections overlapping an active track above this IoU are suppressed.
    pub nms_iou: f64,
    /// Per-frame Gaussian center noise, pixels.
    pub process_noise_xy: f64,
    /// Per-frame Gaussian size noise, pixels.
    pub process_noise_wh: f64,
    /// Resample when N_eff drops below this fraction of the particle count.
    pub neff_threshold: f64,
    pub motion_model: MotionModel,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            n_particles: 100,
            init_spread: 1.5,
            lambda_reg: 0.1,
            lambda_det: 0.6,
            lambda_age: 25,
            alpha: 0.8,
            beta: 0.2,
            reid_accept: 0.4,
            nms_iou: 0.4,
            process_noise_xy: 1.0,
            process_noise_wh: 0.5,
            neff_threshold: 0.5,
            motion_model: MotionModel::ParticleFilter,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), TrackerError> {
        if self.n_particles == 0 {
            return Err(TrackerError::Config("n_particles must be >= 1".into()));
        }
        if (self.alpha + self.beta - 1.0).abs() > 1e-9 {
            return Err(TrackerError::Config(format!(
                "alpha + beta must equal 1, got {} + {}",
                self.alpha, self.beta
            )));
        }
        for (name, v) in [
            ("lambda_reg", self.lambda_reg),
            ("lambda_det", self.lambda_det),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("nms_iou", self.nms_iou),
            ("neff_threshold", self.neff_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(TrackerError::Config(format!(
                    "{name} must lie in [0,1], got {v}"
                )));
            }
        }
        if self.init_spread <= 0.0 {
            return Err(TrackerError::Config("init_spread must be > 0".into()));
        }
        if self.process_noise_xy < 0.0 || self.process_noise_wh < 0.0 {
            return Err(TrackerError::Config("process noise must be >= 0".into()));
        }
        Ok(())
    }

    /// Merge key=value overrides (config file format).
    pub fn apply_keyvalues(&mut self, text: &str) -> Result<(), TrackerError> {
        for (key, value) in keyval::parse(text).map_err(TrackerError::Config)? {
            let num = |v: &str| -> Result<f64, TrackerError> {
                v.parse::<f64>()
                    .map_err(|_| TrackerError::Config(format!("invalid number '{v}' for '{key}'")))
            };
            match key.as_str() {
                "n_particles" => self.n_particles = num(&value)? as usize,
                "init_spread" => self.init_spread = num(&value)?,
                "lambda_reg" => self.lambda_reg = num(&value)?,
                "lambda_det" => self.lambda_det = num(&value)?,
                "lambda_age" => self.lambda_age = num(&value)? as u32,
                "alpha" => self.alpha = num(&value)?,
                "beta" => self.beta = num(&value)?,
                "reid_accept" => self.reid_accept = num(&value)?,
                "nms_iou" => self.nms_iou = num(&value)?,
                "process_noise_xy" => self.process_noise_xy = num(&value)?,
                "process_noise_wh" => self.process_noise_wh = num(&value)?,
                "neff_threshold" => self.neff_threshold = num(&value)?,
                "motion_model" => {
                    self.motion_model = MotionModel::parse(&value).ok_or_else(|| {
                        TrackerError::Config(format!("unknown motion_model '{value}'"))
                    })?
                }
                other => {
                    return Err(TrackerError::Config(format!(
                        "unknown config key '{other}'"
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self, TrackerError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| TrackerError::Config(format!("{}: {e}", path.as_ref().display())))?;
        let mut config = Self::default();
        config.apply_keyvalues(&text)?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Active,
    Lost,
}

/// One live tracker target.
#[derive(Debug, Clone)]
pub struct TrackState {
    pub id: i64,
    pub particles: Vec<Particle>,
    pub kalman: Option<KalmanBoxState>,
    pub status: TrackStatus,
    pub last_estimate: BoundingBox,
    /// Pixels per frame, estimated from the last two estimate displacements.
    pub velocity: (f64, f64),
    pub appearance: Option<HsvHistogram>,
    pub frames_lost: u32,
    pub history: BTreeMap<u32, BoundingBox>,
    /// Mean raw particle score from the latest update; doubles as the
    /// reported confidence and the liveness statistic.
    pub mean_score: f64,
    prev_displacement: Option<(f64, f64)>,
}

impl TrackState {
    fn record_estimate(&mut self, estimate: BoundingBox) {
        let (px, py) = self.last_estimate.center();
        let (cx, cy) = estimate.center();
        let disp = (cx - px, cy - py);
        self.velocity = match self.prev_displacement {
            Some(prev) => ((prev.0 + disp.0) / 2.0, (prev.1 + disp.1) / 2.0),
            None => disp,
        };
        self.prev_displacement = Some(disp);
        self.last_estimate = estimate;
    }
}

/// The track's box advanced one frame under constant velocity; size is
/// unchanged. Tracks with fewer than two observations have zero velocity.
pub fn cva_predict(track: &TrackState) -> BoundingBox {
    BoundingBox::new(
        track.last_estimate.x + track.velocity.0,
        track.last_estimate.y + track.velocity.1,
        track.last_estimate.w,
        track.last_estimate.h,
    )
}

/// Re-identification similarity between a lost track and a new detection:
/// `alpha * IoU(predicted box, new box) + beta * (1 - histogram distance)`.
/// `lost.last_estimate` must already hold the CVA-predicted position. When
/// either side has no appearance information the color term is neutral (1).
pub fn reid_similarity(
    lost: &TrackState,
    new_box: &BoundingBox,
    new_hist: Option<&HsvHistogram>,
    config: &TrackerConfig,
) -> f64 {
    let spatial = iou(&lost.last_estimate, new_box);
    let color = match (&lost.appearance, new_hist) {
        (Some(a), Some(b)) => 1.0 - bhattacharyya_distance(a, b).unwrap_or(1.0),
        _ => 1.0,
    };
    config.alpha * spatial + config.beta * color
}

/// Online tracker over one sequence. Frames must be stepped in order,
/// without gaps; all randomness comes from the seeded generator, so equal
/// inputs and seeds give identical output.
pub struct Tracker {
    pub config: TrackerConfig,
    tracks: Vec<TrackState>,
    next_id: i64,
    rng: ChaCha8Rng,
    last_frame: Option<u32>,
    /// Times a degenerate all-zero weight set forced a particle reset.
    pub degenerate_resets: u64,
}

impl Tracker {
    pub fn new(config: TrackerConfig, seed: u64) -> Result<Self, TrackerError> {
        config.validate()?;
        Ok(Self {
            config,
            tracks: Vec::new(),
            next_id: 1,
            rng: ChaCha8Rng::seed_from_u64(seed),
            last_frame: None,
            degenerate_resets: 0,
        })
    }

    pub fn tracks(&self) -> &[TrackState] {
        &self.tracks
    }

    fn histogram_at(&self, ctx: &FrameContext, bbox: &BoundingBox) -> Option<HsvHistogram> {
        ctx.image.map(|img| extract_histogram(&img.patch(bbox)))
    }

    fn spawn_track(&mut self, ctx: &FrameContext, det: &Detection) -> Result<usize, TrackerError> {
        let id = self.next_id;
        self.next_id += 1;
        let (particles, kalman) = match self.config.motion_model {
            MotionModel::ParticleFilter => (
                init_particles(
                    &det.bbox,
                    self.config.n_particles,
                    self.config.init_spread,
                    &mut self.rng,
                )?,
                None,
            ),
            MotionModel::KalmanCva => (Vec::new(), Some(KalmanBoxState::new(&det.bbox))),
        };
        let appearance = self.histogram_at(ctx, &det.bbox);
        let mut history = BTreeMap::new();
        history.insert(ctx.frame, det.bbox);
        self.tracks.push(TrackState {
            id,
            particles,
            kalman,
            status: TrackStatus::Active,
            last_estimate: det.bbox,
            velocity: (0.0, 0.0),
            appearance,
            frames_lost: 0,
            history,
            mean_score: det.conf,
            prev_displacement: None,
        });
        Ok(self.tracks.len() - 1)
    }

    /// Advance one frame. Returns the output rows for tracks active at this
    /// frame, ordered by id.
    pub fn step(
        &mut self,
        ctx: &FrameContext,
        refiner: &dyn BoxRefiner,
        cmc_transform: Option<&AffineTransform>,
    ) -> Result<Vec<AnnotationEntry>, TrackerError> {
        if let Some(last) = self.last_frame {
            if ctx.frame != last + 1 {
                return Err(TrackerError::FrameGap {
                    expected: last + 1,
                    found: ctx.frame,
                });
            }
        }

        // Lost-track lifecycle: age out, advance under CVA, kill off-image.
        let lambda_age = self.config.lambda_age;
        let info = ctx.info;
        self.tracks.retain_mut(|t| {
            if t.status != TrackStatus::Lost {
                return true;
            }
            t.frames_lost += 1;
            if t.frames_lost > lambda_age {
                return false;
            }
            if let Some(w) = cmc_transform {
                t.last_estimate = warp_box(w, &t.last_estimate);
            }
            t.last_estimate = cva_predict(t);
            let (cx, cy) = t.last_estimate.center();
            info.contains(cx, cy)
        });

        // Active tracks: predict, refine, score, estimate, demote, resample.
        // A track whose motion prediction leaves the image is dropped.
        let mut outputs: Vec<AnnotationEntry> = Vec::new();
        let mut departed: Vec<i64> = Vec::new();
        for i in 0..self.tracks.len() {
            if self.tracks[i].status != TrackStatus::Active {
                continue;
            }
            match self.config.motion_model {
                MotionModel::ParticleFilter => {
                    self.update_particle_track(i, ctx, refiner, cmc_transform)?
                }
                MotionModel::KalmanCva => self.update_kalman_track(i, ctx, cmc_transform),
            }
            let t = &mut self.tracks[i];
            let (cx, cy) = t.last_estimate.center();
            if !info.contains(cx, cy) {
                departed.push(t.id);
            } else if t.mean_score < self.config.lambda_reg {
                t.status = TrackStatus::Lost;
                t.frames_lost = 0;
            } else {
                t.history.insert(ctx.frame, t.last_estimate);
                outputs.push(output_row(ctx.frame, t.id, &t.last_estimate, t.mean_score));
            }
        }
        if !departed.is_empty() {
            self.tracks.retain(|t| !departed.contains(&t.id));
        }

        // Inter-track suppression: two active tracks on the same spot means
        // one of them is a duplicate; the weaker-scored one goes lost (it may
        // be a genuinely occluded target, so re-identification can still
        // recover it).
        let mut suppressed: Vec<i64> = Vec::new();
        for i in 0..self.tracks.len() {
            for j in i + 1..self.tracks.len() {
                let (a, b) = (&self.tracks[i], &self.tracks[j]);
                if a.status != TrackStatus::Active || b.status != TrackStatus::Active {
                    continue;
                }
                if iou(&a.last_estimate, &b.last_estimate) > self.config.nms_iou {
                    let loser = if a.mean_score >= b.mean_score { b.id } else { a.id };
                    if !suppressed.contains(&loser) {
                        suppressed.push(loser);
                    }
                }
            }
        }
        if !suppressed.is_empty() {
            for t in &mut self.tracks {
                if suppressed.contains(&t.id) {
                    t.status = TrackStatus::Lost;
                    t.frames_lost = 0;
                }
            }
            outputs.retain(|e| !suppressed.contains(&e.id));
        }
        // Appearance refresh at confident sightings.
        if ctx.image.is_some() {
            for i in 0..self.tracks.len() {
                let t = &self.tracks[i];
                if t.status == TrackStatus::Active && t.mean_score >= self.config.lambda_det {
                    let bbox = t.last_estimate;
                    self.tracks[i].appearance = self.histogram_at(ctx, &bbox);
                }
            }
        }

        // Suppress detections already explained by an active track.
        let active_boxes: Vec<BoundingBox> = self
            .tracks
            .iter()
            .filter(|t| t.status == TrackStatus::Active)
            .map(|t| t.last_estimate)
            .collect();
        let mut candidates: Vec<&Detection> = ctx
            .detections
            .iter()
            .filter(|d| {
                d.conf >= self.config.lambda_det
                    && !active_boxes
                        .iter()
                        .any(|b| iou(b, &d.bbox) > self.config.nms_iou)
            })
            .collect();

        // Re-identification: match surviving detections against lost tracks.
        let lost_indices: Vec<usize> = (0..self.tracks.len())
            .filter(|&i| self.tracks[i].status == TrackStatus::Lost)
            .collect();
        if !lost_indices.is_empty() && !candidates.is_empty() {
            let hists: Vec<Option<HsvHistogram>> = candidates
                .iter()
                .map(|d| self.histogram_at(ctx, &d.bbox))
                .collect();
            let sims: Vec<Vec<f64>> = lost_indices
                .iter()
                .map(|&li| {
                    candidates
                        .iter()
                        .zip(&hists)
                        .map(|(d, h)| {
                            reid_similarity(&self.tracks[li], &d.bbox, h.as_ref(), &self.config)
                        })
                        .collect()
                })
                .collect();
            let matrix = crate::assignment::CostMatrix::from_fn(
                lost_indices.len(),
                candidates.len(),
                crate::assignment::Sense::Maximize,
                |r, c| sims[r][c],
            )
            .expect("similarities are finite");
            let assignment = crate::assignment::solve(&matrix, |_, _| false);

            let mut consumed = vec![false; candidates.len()];
            for (r, c) in assignment.pairs {
                if sims[r][c] > self.config.reid_accept {
                    let det = *candidates[c];
                    let li = lost_indices[r];
                    self.reactivate(li, ctx, &det, hists[c].clone())?;
                    let t = &self.tracks[li];
                    outputs.push(output_row(ctx.frame, t.id, &t.last_estimate, t.mean_score));
                    consumed[c] = true;
                }
            }
            candidates = candidates
                .into_iter()
                .zip(consumed)
                .filter_map(|(d, used)| (!used).then_some(d))
                .collect();
        }

        // Whatever detections remain start new identities.
        for det in candidates {
            let det = *det;
            let idx = self.spawn_track(ctx, &det)?;
            let t = &self.tracks[idx];
            outputs.push(output_row(ctx.frame, t.id, &t.last_estimate, t.mean_score));
        }

        outputs.sort_by_key(|e| e.id);
        self.last_frame = Some(ctx.frame);
        Ok(outputs)
    }

    fn update_particle_track(
        &mut self,
        i: usize,
        ctx: &FrameContext,
        refiner: &dyn BoxRefiner,
        cmc_transform: Option<&AffineTransform>,
    ) -> Result<(), TrackerError> {
        let config = self.config.clone();
        let noise_xy = Normal::new(0.0, config.process_noise_xy.max(1e-12)).expect("valid sigma");
        let noise_wh = Normal::new(0.0, config.process_noise_wh.max(1e-12)).expect("valid sigma");
        let (img_w, img_h) = (ctx.info.width as f64, ctx.info.height as f64);

        let track = &mut self.tracks[i];
        // Predict: warp by camera motion, then perturb with process noise.
        for p in &mut track.particles {
            if let Some(w) = cmc_transform {
                p.bbox = warp_box(w, &p.bbox);
            }
            if config.process_noise_xy > 0.0 {
                p.bbox.x += noise_xy.sample(&mut self.rng);
                p.bbox.y += noise_xy.sample(&mut self.rng);
            }
            if config.process_noise_wh > 0.0 {
                p.bbox.w = (p.bbox.w + noise_wh.sample(&mut self.rng)).max(1.0);
                p.bbox.h = (p.bbox.h + noise_wh.sample(&mut self.rng)).max(1.0);
            }
            // Particles live inside the image dilated by one box size.
            let (cx, cy) = p.bbox.center();
            let nx = cx.clamp(-p.bbox.w, img_w + p.bbox.w);
            let ny = cy.clamp(-p.bbox.h, img_h + p.bbox.h);
            if nx != cx || ny != cy {
                p.bbox = BoundingBox::from_center(nx, ny, p.bbox.w, p.bbox.h);
            }
        }

        // Update: refine and score the batch.
        let track_ctx = TrackContext {
            track_id: track.id,
            prior_box: cva_predict(track),
            velocity: track.velocity,
            prev_score: track.mean_score,
        };
        let boxes: Vec<BoundingBox> = track.particles.iter().map(|p| p.bbox).collect();
        let refined = refiner.refine(ctx, &track_ctx, &boxes)?;
        if refined.len() != boxes.len() {
            return Err(TrackerError::RefinerMismatch {
                expected: boxes.len(),
                found: refined.len(),
            });
        }
        let mut score_sum = 0.0;
        for (p, (bbox, score)) in track.particles.iter_mut().zip(&refined) {
            if !score.is_finite() || !(0.0..=1.0).contains(score) {
                return Err(TrackerError::Refiner(format!("score {score} outside [0,1]")));
            }
            p.bbox = *bbox;
            p.weight = *score;
            score_sum += score;
        }
        track.mean_score = score_sum / track.particles.len() as f64;
        if score_sum > 0.0 {
            for p in &mut track.particles {
                p.weight /= score_sum;
            }
        } else {
            let uniform = 1.0 / track.particles.len() as f64;
            for p in &mut track.particles {
                p.weight = uniform;
            }
        }

        let estimate = estimate_state(&track.particles)?;
        track.record_estimate(estimate);

        // Resample on weight degeneracy.
        let neff = effective_sample_size(&track.particles)?;
        if neff < config.neff_threshold * track.particles.len() as f64 {
            let n = track.particles.len();
            if systematic_resample(&mut track.particles, &mut self.rng).is_err() {
                // All weights zero: rebuild the cloud around the estimate.
                track.particles = init_particles(&estimate, n, config.init_spread, &mut self.rng)?;
                self.degenerate_resets += 1;
            }
        }
        Ok(())
    }

    fn update_kalman_track(
        &mut self,
        i: usize,
        ctx: &FrameContext,
        cmc_transform: Option<&AffineTransform>,
    ) {
        let track = &mut self.tracks[i];
        let kf = track.kalman.as_mut().expect("kalman mode track has state");
        if let Some(w) = cmc_transform {
            kf.warp(w);
        }
        kf.predict();
        let predicted = kf.bbox();

        let mut best: Option<(&Detection, f64)> = None;
        for d in ctx.detections {
            let overlap = iou(&predicted, &d.bbox);
            if overlap > SNAP_IOU && best.map_or(true, |(_, o)| overlap > o) {
                best = Some((d, overlap));
            }
        }
        match best {
            Some((d, _)) => {
                kf.update(&d.bbox);
                let posterior = kf.bbox();
                track.mean_score = (d.conf * iou(&posterior, &d.bbox)).clamp(0.0, 1.0);
            }
            None => {
                track.mean_score *= MISS_DECAY;
            }
        }
        let estimate = track.kalman.as_ref().unwrap().bbox();
        track.record_estimate(estimate);
        // CVA for any lost phase comes straight from the filter.
        track.velocity = track.kalman.as_ref().unwrap().velocity();
    }

    fn reactivate(
        &mut self,
        i: usize,
        ctx: &FrameContext,
        det: &Detection,
        hist: Option<HsvHistogram>,
    ) -> Result<(), TrackerError> {
        let n = self.config.n_particles;
        let spread = self.config.init_spread;
        match self.config.motion_model {
            MotionModel::ParticleFilter => {
                let particles = init_particles(&det.bbox, n, spread, &mut self.rng)?;
                self.tracks[i].particles = particles;
            }
            MotionModel::KalmanCva => {
                let velocity = self.tracks[i].velocity;
                let mut kf = KalmanBoxState::new(&det.bbox);
                kf.set_velocity(velocity.0, velocity.1);
                self.tracks[i].kalman = Some(kf);
            }
        }
        let t = &mut self.tracks[i];
        t.status = TrackStatus::Active;
        t.frames_lost = 0;
        t.last_estimate = det.bbox;
        t.prev_displacement = None;
        t.mean_score = det.conf;
        t.history.insert(ctx.frame, det.bbox);
        if hist.is_some() {
            t.appearance = hist;
        }
        Ok(())
    }
}

fn output_row(frame: u32, id: i64, bbox: &BoundingBox, conf: f64) -> AnnotationEntry {
    AnnotationEntry {
        frame,
        id,
        bbox: *bbox,
        conf: conf.clamp(0.0, 1.0),
        class: None,
        visibility: None,
    }
}

/// Drive a tracker over a whole sequence of externally supplied detections.
///
/// `frame_image` supplies the frame pixels for appearance extraction and may
/// return `None` (color re-identification then degenerates to the spatial
/// term). Output rows are ordered by (frame, id).
pub fn track_sequence(
    info: &SequenceInfo,
    detections: &[AnnotationEntry],
    refiner: &dyn BoxRefiner,
    cmc: &CameraMotion,
    config: &TrackerConfig,
    seed: u64,
    mut frame_image: impl FnMut(u32) -> Option<RgbImage>,
) -> Result<Vec<AnnotationEntry>, TrackerError> {
    let mut by_frame: BTreeMap<u32, Vec<Detection>> = BTreeMap::new();
    for e in detections {
        if e.frame > info.frame_count {
            return Err(TrackerError::FrameOutOfRange {
                frame: e.frame,
                count: info.frame_count,
            });
        }
        if e.conf >= config.lambda_det {
            by_frame.entry(e.frame).or_default().push(Detection {
                bbox: e.bbox,
                conf: e.conf,
            });
        }
    }

    let mut tracker = Tracker::new(config.clone(), seed)?;
    let mut outputs = Vec::new();
    let empty: Vec<Detection> = Vec::new();
    for frame in 1..=info.frame_count {
        let dets = by_frame.get(&frame).unwrap_or(&empty);
        let image = frame_image(frame);
        let ctx = FrameContext {
            frame,
            detections: dets,
            image: image.as_ref(),
            info,
        };
        outputs.extend(tracker.step(&ctx, refiner, cmc.transform(frame))?);
    }
    Ok(outputs)
}
