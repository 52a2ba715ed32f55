//! Detection evaluation: precision/recall/F1, MODA/MODP and average
//! precision, including the mean over the 0.50..0.95 IoU threshold sweep.

use super::MetricsError;
use crate::assignment::{solve, CostMatrix, Sense};
use crate::motdata::{iou, AnnotationEntry, BoundingBox};
pub use crate::motdata::Detection;
use std::collections::{BTreeMap, BTreeSet};

pub type GtFrames = BTreeMap<u32, Vec<BoundingBox>>;
pub type DetFrames = BTreeMap<u32, Vec<Detection>>;

pub fn entries_to_gt_frames(entries: &[AnnotationEntry]) -> GtFrames {
    let mut frames = GtFrames::new();
    for e in entries {
        frames.entry(e.frame).or_default().push(e.bbox);
    }
    frames
}

pub fn entries_to_detections(entries: &[AnnotationEntry]) -> DetFrames {
    let mut frames = DetFrames::new();
    for e in entries {
        frames.entry(e.frame).or_default().push(Detection {
            bbox: e.bbox,
            conf: e.conf,
        });
    }
    frames
}

/// Threshold-based detection scores at a fixed confidence cut.
#[derive(Debug, Clone, Copy, Default)]
pub struct DetectionPrf {
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub moda: f64,
    pub modp: f64,
}

/// Per-frame Hungarian matching on IoU (maximize); pairs at or below
/// `match_iou` never match. Detections below `conf_threshold` are discarded
/// first. MODP averages the per-frame mean matched IoU over frames that have
/// at least one match.
pub fn detection_metrics(
    gt: &GtFrames,
    det: &DetFrames,
    match_iou: f64,
    conf_threshold: f64,
) -> Result<DetectionPrf, MetricsError> {
    let n_gt: usize = gt.values().map(Vec::len).sum();
    if n_gt == 0 {
        return Err(MetricsError::NoGroundTruth("MODA"));
    }

    let frames: BTreeSet<u32> = gt.keys().chain(det.keys()).copied().collect();
    let mut out = DetectionPrf::default();
    let mut modp_sum = 0.0;
    let mut modp_frames = 0usize;

    let empty_gt: Vec<BoundingBox> = Vec::new();
    let empty_det: Vec<Detection> = Vec::new();
    for frame in frames {
        let gt_boxes = gt.get(&frame).unwrap_or(&empty_gt);
        let dets: Vec<&Detection> = det
            .get(&frame)
            .unwrap_or(&empty_det)
            .iter()
            .filter(|d| d.conf >= conf_threshold)
            .collect();

        let mut matched = 0usize;
        if !gt_boxes.is_empty() && !dets.is_empty() {
            let overlaps: Vec<Vec<f64>> = gt_boxes
                .iter()
                .map(|g| dets.iter().map(|d| iou(g, &d.bbox)).collect())
                .collect();
            let matrix =
                CostMatrix::from_fn(gt_boxes.len(), dets.len(), Sense::Maximize, |r, c| {
                    overlaps[r][c]
                })
                .expect("IoU values are finite");
            let assignment = solve(&matrix, |r, c| overlaps[r][c] <= match_iou);
            matched = assignment.pairs.len();
            if matched > 0 {
                let frame_iou: f64 = assignment
                    .pairs
                    .iter()
                    .map(|&(r, c)| overlaps[r][c])
                    .sum::<f64>()
                    / matched as f64;
                modp_sum += frame_iou;
                modp_frames += 1;
            }
        }
        out.tp += matched;
        out.fp += dets.len() - matched;
        out.fn_count += gt_boxes.len() - matched;
    }

    out.precision = if out.tp + out.fp > 0 {
        out.tp as f64 / (out.tp + out.fp) as f64
    } else {
        0.0
    };
    out.recall = out.tp as f64 / n_gt as f64;
    out.f1 = if out.precision + out.recall > 0.0 {
        2.0 * out.precision * out.recall / (out.precision + out.recall)
    } else {
        0.0
    };
    out.moda = 1.0 - (out.fn_count + out.fp) as f64 / n_gt as f64;
    out.modp = if modp_frames > 0 {
        modp_sum / modp_frames as f64
    } else {
        0.0
    };
    Ok(out)
}

/// Average precision with all-points interpolation.
///
/// Detections are sorted by descending confidence (ties broken by frame then
/// input order) and greedily matched one-to-one per frame at `match_iou`.
pub fn average_precision(
    gt: &GtFrames,
    det: &DetFrames,
    match_iou: f64,
) -> Result<f64, MetricsError> {
    let n_gt: usize = gt.values().map(Vec::len).sum();
    if n_gt == 0 {
        return Err(MetricsError::NoGroundTruth("average precision"));
    }

    let mut flat: Vec<(u32, usize, f64)> = Vec::new();
    for (frame, dets) in det {
        for (i, d) in dets.iter().enumerate() {
            flat.push((*frame, i, d.conf));
        }
    }
    flat.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });
    if flat.is_empty() {
        return Ok(0.0);
    }

    let mut gt_taken: BTreeMap<u32, Vec<bool>> = gt
        .iter()
        .map(|(f, boxes)| (*f, vec![false; boxes.len()]))
        .collect();

    let mut is_tp = Vec::with_capacity(flat.len());
    for (frame, idx, _) in &flat {
        let dbox = det[frame][*idx].bbox;
        let mut best: Option<(usize, f64)> = None;
        if let (Some(boxes), Some(taken)) = (gt.get(frame), gt_taken.get_mut(frame)) {
            for (gi, g) in boxes.iter().enumerate() {
                if taken[gi] {
                    continue;
                }
                let overlap = iou(g, &dbox);
                if overlap > match_iou && best.map_or(true, |(_, b)| overlap > b) {
                    best = Some((gi, overlap));
                }
            }
            if let Some((gi, _)) = best {
                taken[gi] = true;
            }
        }
        is_tp.push(best.is_some());
    }

    // Precision/recall curve, then the area under its upper envelope.
    let mut precisions = Vec::with_capacity(is_tp.len());
    let mut recalls = Vec::with_capacity(is_tp.len());
    let mut tp = 0usize;
    for (i, &hit) in is_tp.iter().enumerate() {
        if hit {
            tp += 1;
        }
        precisions.push(tp as f64 / (i + 1) as f64);
        recalls.push(tp as f64 / n_gt as f64);
    }
    for i in (0..precisions.len().saturating_sub(1)).rev() {
        precisions[i] = precisions[i].max(precisions[i + 1]);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (p, r) in precisions.iter().zip(&recalls) {
        if *r > prev_recall {
            ap += (r - prev_recall) * p;
            prev_recall = *r;
        }
    }
    Ok(ap)
}

/// Mean of [`average_precision`] over the ten IoU thresholds 0.50, 0.55, ...,
/// 0.95.
pub fn map_coco(gt: &GtFrames, det: &DetFrames) -> Result<f64, MetricsError> {
    let mut total = 0.0;
    for k in 0..10u32 {
        let threshold = (50 + 5 * k) as f64 / 100.0;
        total += average_precision(gt, det, threshold)?;
    }
    Ok(total / 10.0)
}

/// Full detection report at one confidence threshold.
#[derive(Debug, Clone, Copy, Default)]
pub struct DetectionReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub moda: f64,
    pub modp: f64,
    pub ap: f64,
    pub map_coco: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
}

pub fn evaluate_detection(
    gt: &GtFrames,
    det: &DetFrames,
    match_iou: f64,
    conf_threshold: f64,
) -> Result<DetectionReport, MetricsError> {
    let prf = detection_metrics(gt, det, match_iou, conf_threshold)?;
    let ap = average_precision(gt, det, match_iou)?;
    let map = map_coco(gt, det)?;
    Ok(DetectionReport {
        precision: prf.precision,
        recall: prf.recall,
        f1: prf.f1,
        moda: prf.moda,
        modp: prf.modp,
        ap,
        map_coco: map,
        tp: prf.tp,
        fp: prf.fp,
        fn_count: prf.fn_count,
    })
}
