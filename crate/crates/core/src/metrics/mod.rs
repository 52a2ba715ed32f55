//! Tracking and detection evaluation: IDEucl, the IDF1 family, CLEAR MOT,
//! MT/ML and detection scores.

mod detection;
mod tracking;

pub use detection::{
    average_precision, detection_metrics, entries_to_detections, entries_to_gt_frames,
    evaluate_detection, map_coco, DetFrames, Detection, DetectionPrf, DetectionReport, GtFrames,
};
pub use tracking::{
    clear_mot, evaluate_tracking, id_metrics, ideucl, ideucl_detailed, mt_ml, ClearMetrics,
    IdMetrics, IdeuclReport, TrackCoverage,
};

use thiserror::Error;

/// IoU threshold for a hypothesis box to count as overlapping ground truth in
/// the tracking metrics (strictly greater-than).
pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;
/// IoU threshold for detection-to-ground-truth proposal matching.
pub const DEFAULT_MATCH_IOU: f64 = 0.4;
/// Minimum detection confidence considered in detection evaluation.
pub const DEFAULT_CONF_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no ground truth boxes: {0} is undefined")]
    NoGroundTruth(&'static str),
}

/// Full tracking evaluation output. Ratios are stored raw (0..1); counts are
/// kept alongside so per-sequence reports can be aggregated by summing counts
/// and recomputing ratios.
#[derive(Debug, Clone, Default)]
pub struct MetricReport {
    pub ideucl: f64,
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub mota: f64,
    pub motp: f64,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
    pub id_switches: usize,
    pub fragmentations: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub mt: usize,
    pub ml: usize,
    pub pt: usize,
    /// Total ground-truth boxes (the MOTA denominator).
    pub gt_boxes: usize,
    pub hyp_boxes: usize,
    pub matches: usize,
    pub motp_sum: f64,
    /// IDEucl numerator/denominator (pixels, or frames in fallback mode).
    pub ideucl_covered: f64,
    pub ideucl_total: f64,
    /// True when all ground-truth tracks were static and IDEucl fell back to
    /// frame-count weights.
    pub ideucl_frame_fallback: bool,
    pub notes: Vec<String>,
}

impl MetricReport {
    /// Recompute every ratio from the stored counts.
    pub fn recompute_ratios(&mut self) {
        self.ideucl = if self.ideucl_total > 0.0 {
            self.ideucl_covered / self.ideucl_total
        } else if self.gt_boxes == 0 && self.hyp_boxes > 0 {
            0.0
        } else {
            // Vacuous: either nothing to track at all, or static-only ground
            // truth covered at every frame.
            1.0
        };
        let idf1_den = 2 * self.idtp + self.idfp + self.idfn;
        self.idf1 = if idf1_den > 0 {
            2.0 * self.idtp as f64 / idf1_den as f64
        } else {
            1.0
        };
        self.idp = if self.idtp + self.idfp > 0 {
            self.idtp as f64 / (self.idtp + self.idfp) as f64
        } else if self.idfn == 0 {
            1.0
        } else {
            0.0
        };
        self.idr = if self.idtp + self.idfn > 0 {
            self.idtp as f64 / (self.idtp + self.idfn) as f64
        } else if self.idfp == 0 {
            1.0
        } else {
            0.0
        };
        if self.gt_boxes > 0 {
            self.mota =
                1.0 - (self.fp + self.fn_count + self.id_switches) as f64 / self.gt_boxes as f64;
            self.motp = if self.matches > 0 {
                self.motp_sum / self.matches as f64
            } else {
                0.0
            };
        } else if self.hyp_boxes == 0 {
            self.mota = 1.0;
            self.motp = 1.0;
        } else {
            self.mota = 0.0;
            self.motp = 0.0;
        }
    }
}

/// Combine per-sequence reports: counts are summed, ratios recomputed from
/// the summed counts. Commutative, so sequences may be evaluated in any
/// order or in parallel.
pub fn aggregate_reports(reports: &[MetricReport]) -> MetricReport {
    let mut out = MetricReport::default();
    for r in reports {
        out.idtp += r.idtp;
        out.idfp += r.idfp;
        out.idfn += r.idfn;
        out.id_switches += r.id_switches;
        out.fragmentations += r.fragmentations;
        out.fp += r.fp;
        out.fn_count += r.fn_count;
        out.mt += r.mt;
        out.ml += r.ml;
        out.pt += r.pt;
        out.gt_boxes += r.gt_boxes;
        out.hyp_boxes += r.hyp_boxes;
        out.matches += r.matches;
        out.motp_sum += r.motp_sum;
        out.ideucl_covered += r.ideucl_covered;
        out.ideucl_total += r.ideucl_total;
        out.ideucl_frame_fallback |= r.ideucl_frame_fallback;
        out.notes.extend(r.notes.iter().cloned());
    }
    out.recompute_ratios();
    out
}
