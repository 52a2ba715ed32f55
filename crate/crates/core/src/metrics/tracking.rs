//! Identity-level tracking metrics (IDEucl, IDF1/IDP/IDR) and the per-frame
//! CLEAR MOT family.

use super::MetricReport;
use crate::assignment::{solve, CostMatrix, Sense};
use crate::motdata::{centroid_distance, iou, BoundingBox, TrajectoryMap};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Per-frame box lists, tracks ordered by id within each frame.
fn frame_index(trajs: &TrajectoryMap) -> BTreeMap<u32, Vec<(i64, BoundingBox)>> {
    let mut index: BTreeMap<u32, Vec<(i64, BoundingBox)>> = BTreeMap::new();
    for (id, traj) in trajs {
        for (frame, point) in &traj.points {
            index.entry(*frame).or_default().push((*id, point.bbox));
        }
    }
    index
}

#[derive(Default, Clone)]
struct PairStats {
    /// Frames where the pair overlaps above the threshold.
    matched_frames: usize,
    /// Ground-truth centroid distance covered while the overlap held at both
    /// ends of each step.
    covered: f64,
    last_matched: Option<u32>,
}

/// One pass over all frames accumulating, for every (gt, hyp) track pair,
/// the overlap frame count and the covered ground-truth path distance.
fn accumulate_pairs(
    gt: &TrajectoryMap,
    hyp: &TrajectoryMap,
    iou_threshold: f64,
) -> HashMap<(i64, i64), PairStats> {
    // For each gt track: frame -> (previous annotated frame, step distance).
    let mut step_into: HashMap<i64, HashMap<u32, (u32, f64)>> = HashMap::new();
    for (id, traj) in gt {
        let steps = step_into.entry(*id).or_default();
        let mut prev: Option<(u32, &BoundingBox)> = None;
        for (frame, point) in &traj.points {
            if let Some((pf, pb)) = prev {
                steps.insert(*frame, (pf, centroid_distance(pb, &point.bbox)));
            }
            prev = Some((*frame, &point.bbox));
        }
    }

    let gt_frames = frame_index(gt);
    let hyp_frames = frame_index(hyp);
    let mut stats: HashMap<(i64, i64), PairStats> = HashMap::new();

    for (frame, gt_boxes) in &gt_frames {
        let Some(hyp_boxes) = hyp_frames.get(frame) else {
            continue;
        };
        for (gid, gbox) in gt_boxes {
            for (hid, hbox) in hyp_boxes {
                if !gbox.intersects(hbox) {
                    continue;
                }
                if iou(gbox, hbox) <= iou_threshold {
                    continue;
                }
                let entry = stats.entry((*gid, *hid)).or_default();
                entry.matched_frames += 1;
                if let Some((prev_frame, dist)) = step_into[gid].get(frame) {
                    if entry.last_matched == Some(*prev_frame) {
                        entry.covered += dist;
                    }
                }
                entry.last_matched = Some(*frame);
            }
        }
    }
    stats
}

/// Maximum-weight one-to-one matching over (gt, hyp) pair weights; returns
/// the total matched weight.
fn best_matching_weight(
    gt_ids: &[i64],
    hyp_ids: &[i64],
    weight: impl Fn(i64, i64) -> f64,
) -> f64 {
    if gt_ids.is_empty() || hyp_ids.is_empty() {
        return 0.0;
    }
    let matrix = CostMatrix::from_fn(gt_ids.len(), hyp_ids.len(), Sense::Maximize, |r, c| {
        weight(gt_ids[r], hyp_ids[c])
    })
    .expect("pair weights are finite");
    solve(&matrix, |_, _| false).objective
}

#[derive(Debug, Clone)]
pub struct IdeuclReport {
    pub value: f64,
    /// Matched ground-truth path distance (pixels), or matched frames when
    /// `frame_fallback` is set.
    pub covered: f64,
    /// Total ground-truth path distance (pixels), or total frames in
    /// fallback mode.
    pub total: f64,
    /// All ground-truth tracks were static; frame-count weights were used.
    pub frame_fallback: bool,
    pub warning: Option<String>,
}

/// Fraction of ground-truth path length, in image coordinates, covered by the
/// best identity-consistent hypothesis per track.
///
/// For every (gt, hyp) pair the ground-truth centroid displacement of a step
/// is counted when the pair overlaps (IoU strictly above `iou_threshold`) at
/// both ends of the step; a maximum-weight one-to-one matching then assigns
/// each ground-truth track its best hypothesis. Tracks no hypothesis ever
/// touches still contribute their full length to the denominator.
pub fn ideucl_detailed(
    gt: &TrajectoryMap,
    hyp: &TrajectoryMap,
    iou_threshold: f64,
) -> IdeuclReport {
    if gt.is_empty() {
        return if hyp.is_empty() {
            IdeuclReport {
                value: 1.0,
                covered: 0.0,
                total: 0.0,
                frame_fallback: false,
                warning: None,
            }
        } else {
            IdeuclReport {
                value: 0.0,
                covered: 0.0,
                total: 0.0,
                frame_fallback: false,
                warning: Some("empty ground truth with non-empty hypotheses".into()),
            }
        };
    }

    let total_distance: f64 = gt.values().map(|t| t.path_length()).sum();
    let stats = accumulate_pairs(gt, hyp, iou_threshold);
    let gt_ids: Vec<i64> = gt.keys().copied().collect();
    let hyp_ids: Vec<i64> = hyp.keys().copied().collect();

    if total_distance > 0.0 {
        let covered = best_matching_weight(&gt_ids, &hyp_ids, |g, h| {
            stats.get(&(g, h)).map_or(0.0, |s| s.covered)
        });
        IdeuclReport {
            value: covered / total_distance,
            covered,
            total: total_distance,
            frame_fallback: false,
            warning: None,
        }
    } else {
        // Every ground-truth track is static: the distance ratio is 0/0, so
        // fall back to frame-count weights (1.0 iff fully covered).
        let total_frames: usize = gt.values().map(|t| t.len()).sum();
        let covered = best_matching_weight(&gt_ids, &hyp_ids, |g, h| {
            stats.get(&(g, h)).map_or(0.0, |s| s.matched_frames as f64)
        });
        IdeuclReport {
            value: if total_frames > 0 {
                covered / total_frames as f64
            } else {
                1.0
            },
            covered,
            total: total_frames as f64,
            frame_fallback: true,
            warning: Some("zero total ground-truth distance; frame-count weights used".into()),
        }
    }
}

pub fn ideucl(gt: &TrajectoryMap, hyp: &TrajectoryMap, iou_threshold: f64) -> f64 {
    ideucl_detailed(gt, hyp, iou_threshold).value
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdMetrics {
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
}

/// Identity precision/recall/F1 from a global track-to-track matching that
/// maximizes the number of frames on which matched pairs overlap.
pub fn id_metrics(gt: &TrajectoryMap, hyp: &TrajectoryMap, iou_threshold: f64) -> IdMetrics {
    let gt_total: usize = gt.values().map(|t| t.len()).sum();
    let hyp_total: usize = hyp.values().map(|t| t.len()).sum();
    if gt_total == 0 && hyp_total == 0 {
        return IdMetrics {
            idf1: 1.0,
            idp: 1.0,
            idr: 1.0,
            ..Default::default()
        };
    }

    let stats = accumulate_pairs(gt, hyp, iou_threshold);
    let gt_ids: Vec<i64> = gt.keys().copied().collect();
    let hyp_ids: Vec<i64> = hyp.keys().copied().collect();
    let idtp = best_matching_weight(&gt_ids, &hyp_ids, |g, h| {
        stats.get(&(g, h)).map_or(0.0, |s| s.matched_frames as f64)
    })
    .round() as usize;

    let idfp = hyp_total - idtp;
    let idfn = gt_total - idtp;
    let den = 2 * idtp + idfp + idfn;
    IdMetrics {
        idf1: if den > 0 {
            2.0 * idtp as f64 / den as f64
        } else {
            1.0
        },
        idp: if hyp_total > 0 {
            idtp as f64 / hyp_total as f64
        } else if gt_total == 0 {
            1.0
        } else {
            0.0
        },
        idr: if gt_total > 0 {
            idtp as f64 / gt_total as f64
        } else if hyp_total == 0 {
            1.0
        } else {
            0.0
        },
        idtp,
        idfp,
        idfn,
    }
}

#[derive(Debug, Clone, Default)]
pub struct ClearMetrics {
    pub mota: f64,
    pub motp: f64,
    pub fp: usize,
    pub fn_count: usize,
    pub id_switches: usize,
    pub fragmentations: usize,
    pub matches: usize,
    pub motp_sum: f64,
    pub gt_boxes: usize,
    pub hyp_boxes: usize,
    pub warnings: Vec<String>,
}

struct ClearAnalysis {
    metrics: ClearMetrics,
    matched_per_track: HashMap<i64, usize>,
}

/// Per-frame CLEAR correspondence: previous matches are carried over while
/// their IoU still clears the threshold, then the remaining boxes are matched
/// by Hungarian assignment on cost 1 - IoU.
fn clear_analysis(gt: &TrajectoryMap, hyp: &TrajectoryMap, iou_threshold: f64) -> ClearAnalysis {
    let gt_frames = frame_index(gt);
    let hyp_frames = frame_index(hyp);
    let empty: Vec<(i64, BoundingBox)> = Vec::new();

    let frames: BTreeSet<u32> = gt_frames.keys().chain(hyp_frames.keys()).copied().collect();

    let mut m = ClearMetrics::default();
    let mut matched_per_track: HashMap<i64, usize> = HashMap::new();
    // gt id -> hyp id matched in the previous frame.
    let mut prev_matches: BTreeMap<i64, i64> = BTreeMap::new();
    // gt id -> hyp id at the most recent matched frame (for switch counting).
    let mut last_matched_hyp: HashMap<i64, i64> = HashMap::new();
    // gt ids currently inside an interruption (matched before, unmatched now).
    let mut in_gap: BTreeSet<i64> = BTreeSet::new();

    for frame in frames {
        let gt_boxes = gt_frames.get(&frame).unwrap_or(&empty);
        let hyp_boxes = hyp_frames.get(&frame).unwrap_or(&empty);
        m.gt_boxes += gt_boxes.len();
        m.hyp_boxes += hyp_boxes.len();

        let gt_pos: HashMap<i64, usize> =
            gt_boxes.iter().enumerate().map(|(i, (id, _))| (*id, i)).collect();
        let hyp_pos: HashMap<i64, usize> =
            hyp_boxes.iter().enumerate().map(|(i, (id, _))| (*id, i)).collect();

        let mut matched: BTreeMap<i64, (i64, f64)> = BTreeMap::new();
        let mut hyp_taken: BTreeSet<i64> = BTreeSet::new();

        // Carry over still-valid correspondences.
        for (g, h) in &prev_matches {
            if let (Some(&gi), Some(&hi)) = (gt_pos.get(g), hyp_pos.get(h)) {
                let overlap = iou(&gt_boxes[gi].1, &hyp_boxes[hi].1);
                if overlap > iou_threshold {
                    matched.insert(*g, (*h, overlap));
                    hyp_taken.insert(*h);
                }
            }
        }

        // Hungarian on whatever is left.
        let free_gt: Vec<usize> = (0..gt_boxes.len())
            .filter(|&i| !matched.contains_key(&gt_boxes[i].0))
            .collect();
        let free_hyp: Vec<usize> = (0..hyp_boxes.len())
            .filter(|&i| !hyp_taken.contains(&hyp_boxes[i].0))
            .collect();
        if !free_gt.is_empty() && !free_hyp.is_empty() {
            let overlaps: Vec<Vec<f64>> = free_gt
                .iter()
                .map(|&gi| {
                    free_hyp
                        .iter()
                        .map(|&hi| iou(&gt_boxes[gi].1, &hyp_boxes[hi].1))
                        .collect()
                })
                .collect();
            let matrix = CostMatrix::from_fn(
                free_gt.len(),
                free_hyp.len(),
                Sense::Minimize,
                |r, c| 1.0 - overlaps[r][c],
            )
            .expect("IoU costs are finite");
            let assignment = solve(&matrix, |r, c| overlaps[r][c] <= iou_threshold);
            for (r, c) in assignment.pairs {
                let g = gt_boxes[free_gt[r]].0;
                let h = hyp_boxes[free_hyp[c]].0;
                matched.insert(g, (h, overlaps[r][c]));
            }
        }

        m.matches += matched.len();
        m.fp += hyp_boxes.len() - matched.len();
        m.fn_count += gt_boxes.len() - matched.len();

        for (g, (h, overlap)) in &matched {
            m.motp_sum += overlap;
            *matched_per_track.entry(*g).or_default() += 1;
            if let Some(prev) = last_matched_hyp.get(g) {
                if prev != h {
                    m.id_switches += 1;
                }
            }
            last_matched_hyp.insert(*g, *h);
            if in_gap.remove(g) {
                m.fragmentations += 1;
            }
        }
        for (g, _) in gt_boxes {
            if !matched.contains_key(g) && last_matched_hyp.contains_key(g) {
                in_gap.insert(*g);
            }
        }

        prev_matches = matched.into_iter().map(|(g, (h, _))| (g, h)).collect();
    }

    if m.gt_boxes > 0 {
        m.mota = 1.0 - (m.fp + m.fn_count + m.id_switches) as f64 / m.gt_boxes as f64;
        m.motp = if m.matches > 0 {
            m.motp_sum / m.matches as f64
        } else {
            0.0
        };
    } else if m.hyp_boxes == 0 {
        m.mota = 1.0;
        m.motp = 1.0;
    } else {
        m.mota = 0.0;
        m.motp = 0.0;
        m.warnings
            .push("empty ground truth with non-empty hypotheses".into());
    }

    ClearAnalysis {
        metrics: m,
        matched_per_track,
    }
}

pub fn clear_mot(gt: &TrajectoryMap, hyp: &TrajectoryMap, iou_threshold: f64) -> ClearMetrics {
    clear_analysis(gt, hyp, iou_threshold).metrics
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrackCoverage {
    pub mt: usize,
    pub ml: usize,
    pub pt: usize,
}

/// Mostly-tracked / mostly-lost / partially-tracked counts: a track is MT
/// when matched on at least 80% of its annotated frames, ML at 20% or below.
pub fn mt_ml(gt: &TrajectoryMap, hyp: &TrajectoryMap, iou_threshold: f64) -> TrackCoverage {
    let analysis = clear_analysis(gt, hyp, iou_threshold);
    coverage_from_counts(gt, &analysis.matched_per_track)
}

fn coverage_from_counts(
    gt: &TrajectoryMap,
    matched_per_track: &HashMap<i64, usize>,
) -> TrackCoverage {
    let mut cov = TrackCoverage::default();
    for (id, traj) in gt {
        if traj.is_empty() {
            continue;
        }
        let matched = *matched_per_track.get(id).unwrap_or(&0);
        let ratio = matched as f64 / traj.len() as f64;
        if ratio >= 0.8 {
            cov.mt += 1;
        } else if ratio <= 0.2 {
            cov.ml += 1;
        } else {
            cov.pt += 1;
        }
    }
    cov
}

/// Run the full tracking metric suite on one sequence.
pub fn evaluate_tracking(
    gt: &TrajectoryMap,
    hyp: &TrajectoryMap,
    iou_threshold: f64,
) -> MetricReport {
    let ide = ideucl_detailed(gt, hyp, iou_threshold);
    let id = id_metrics(gt, hyp, iou_threshold);
    let analysis = clear_analysis(gt, hyp, iou_threshold);
    let clear = analysis.metrics;
    let coverage = coverage_from_counts(gt, &analysis.matched_per_track);

    let mut notes = clear.warnings.clone();
    if let Some(w) = &ide.warning {
        notes.push(w.clone());
    }

    let mut report = MetricReport {
        idtp: id.idtp,
        idfp: id.idfp,
        idfn: id.idfn,
        id_switches: clear.id_switches,
        fragmentations: clear.fragmentations,
        fp: clear.fp,
        fn_count: clear.fn_count,
        mt: coverage.mt,
        ml: coverage.ml,
        pt: coverage.pt,
        gt_boxes: clear.gt_boxes,
        hyp_boxes: clear.hyp_boxes,
        matches: clear.matches,
        motp_sum: clear.motp_sum,
        ideucl_covered: ide.covered,
        ideucl_total: ide.total,
        ideucl_frame_fallback: ide.frame_fallback,
        notes,
        ..Default::default()
    };
    report.recompute_ratios();
    // The detailed routines are authoritative for their own edge cases.
    report.ideucl = ide.value;
    report.idf1 = id.idf1;
    report.idp = id.idp;
    report.idr = id.idr;
    report.mota = clear.mota;
    report.motp = clear.motp;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motdata::{TrackPoint, Trajectory};
    use approx::assert_abs_diff_eq;

    const BOX: f64 = 10.0;

    fn track_from_centers(id: i64, centers: &[(u32, f64, f64)]) -> Trajectory {
        let mut t = Trajectory::new(id);
        for &(frame, cx, cy) in centers {
            t.insert(
                frame,
                TrackPoint {
                    bbox: BoundingBox::from_center(cx, cy, BOX, BOX),
                    class: None,
                    visibility: None,
                },
            )
            .unwrap();
        }
        t
    }

    fn map_of(tracks: Vec<Trajectory>) -> TrajectoryMap {
        tracks.into_iter().map(|t| (t.id, t)).collect()
    }

    /// Straight-line ground truth: frame t at x = speed * t, 1..=frames.
    fn constant_speed_gt(frames: u32, speed: f64) -> TrajectoryMap {
        let centers: Vec<(u32, f64, f64)> = (1..=frames)
            .map(|f| (f, speed * f as f64, 50.0))
            .collect();
        map_of(vec![track_from_centers(1, &centers)])
    }

    /// Split the single-track gt into two hypothesis identities at `split`:
    /// id 101 covers frames <= split, id 102 covers the rest.
    fn split_hypothesis(gt: &TrajectoryMap, split: u32) -> TrajectoryMap {
        let source = &gt[&1];
        let mut a = Trajectory::new(101);
        let mut b = Trajectory::new(102);
        for (frame, point) in &source.points {
            let target = if *frame <= split { &mut a } else { &mut b };
            target.insert(*frame, point.clone()).unwrap();
        }
        map_of(vec![a, b])
    }

    /// Brute-force arc length over a constructed path between two frames
    /// (inclusive), used as the independent oracle for IDEucl fixtures.
    fn arc_length(traj: &Trajectory, from: u32, to: u32) -> f64 {
        let mut total = 0.0;
        let mut prev: Option<(u32, BoundingBox)> = None;
        for (frame, point) in &traj.points {
            if let Some((pf, pb)) = prev {
                if pf >= from && *frame <= to {
                    total += centroid_distance(&pb, &point.bbox);
                }
            }
            prev = Some((*frame, point.bbox));
        }
        total
    }

    #[test]
    fn perfect_tracker_scores_one() {
        let gt = constant_speed_gt(300, 2.0);
        assert_abs_diff_eq!(ideucl(&gt, &gt, 0.5), 1.0, epsilon = 1e-12);
        let id = id_metrics(&gt, &gt, 0.5);
        assert_abs_diff_eq!(id.idf1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_speed_split_covers_half_the_distance() {
        // 299 frames / 298 steps: the early identity covers frames 1..=150,
        // which is exactly 149 of the 298 constant-length steps.
        let gt = constant_speed_gt(299, 2.0);
        let hyp = split_hypothesis(&gt, 150);
        let total = arc_length(&gt[&1], 1, 299);
        let early = arc_length(&gt[&1], 1, 150);
        assert_abs_diff_eq!(total, 298.0 * 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(early / total, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ideucl(&gt, &hyp, 0.5), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn constant_speed_split_idf1_is_half() {
        // 300 frames split 150/150: the best identity covers half the frames.
        let gt = constant_speed_gt(300, 2.0);
        let hyp = split_hypothesis(&gt, 150);
        let id = id_metrics(&gt, &hyp, 0.5);
        assert_abs_diff_eq!(id.idf1, 0.5, epsilon = 1e-12);
        assert_eq!(id.idtp, 150);
        assert_eq!(id.idfn, 150);
        assert_eq!(id.idfp, 150);
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        let gt = constant_speed_gt(50, 2.0);
        let hyp = TrajectoryMap::new();
        assert_abs_diff_eq!(ideucl(&gt, &hyp, 0.5), 0.0);
        let id = id_metrics(&gt, &hyp, 0.5);
        assert_abs_diff_eq!(id.idf1, 0.0);
        assert_eq!(id.idfn, 50);
    }

    #[test]
    fn empty_gt_conventions() {
        let empty = TrajectoryMap::new();
        let hyp = constant_speed_gt(10, 1.0);
        let r = ideucl_detailed(&empty, &hyp, 0.5);
        assert_eq!(r.value, 0.0);
        assert!(r.warning.is_some());
        let vac = ideucl_detailed(&empty, &empty, 0.5);
        assert_eq!(vac.value, 1.0);
        assert!(vac.warning.is_none());
    }

    /// Decelerating path: 149 steps of 2 px then 149 steps of 1 px across
    /// 299 frames. The first half of the frames covers exactly 2/3 of the
    /// distance.
    fn decelerating_gt() -> TrajectoryMap {
        let mut x = 0.0;
        let mut centers = vec![(1u32, x, 50.0)];
        for f in 2..=299u32 {
            x += if f <= 150 { 2.0 } else { 1.0 };
            centers.push((f, x, 50.0));
        }
        map_of(vec![track_from_centers(1, &centers)])
    }

    #[test]
    fn decelerating_split_weights_early_coverage() {
        let gt = decelerating_gt();
        let hyp = split_hypothesis(&gt, 150);
        let total = arc_length(&gt[&1], 1, 299);
        let early = arc_length(&gt[&1], 1, 150);
        assert_abs_diff_eq!(early / total, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ideucl(&gt, &hyp, 0.5), 2.0 / 3.0, epsilon = 1e-9);
    }

    /// The discriminating pair: same ground truth, both trackers commit three
    /// switches, one is consistent early and the other late. IDF1 cannot tell
    /// them apart; IDEucl can.
    #[test]
    fn consistent_early_beats_consistent_late_while_idf1_ties() {
        let mut x = 0.0;
        let mut centers = vec![(1u32, x, 50.0)];
        for f in 2..=300u32 {
            x += if f <= 150 { 2.0 } else { 1.0 };
            centers.push((f, x, 50.0));
        }
        let gt = map_of(vec![track_from_centers(1, &centers)]);
        let source = &gt[&1];

        let slice = |id: i64, from: u32, to: u32| {
            let pts: Vec<(u32, f64, f64)> = source
                .points
                .range(from..=to)
                .map(|(f, p)| {
                    let (cx, cy) = p.bbox.center();
                    (*f, cx, cy)
                })
                .collect();
            track_from_centers(id, &pts)
        };

        // Consistent early: one identity for frames 1-150, fragmented after.
        let early = map_of(vec![
            slice(201, 1, 150),
            slice(202, 151, 200),
            slice(203, 201, 250),
            slice(204, 251, 300),
        ]);
        // Consistent late: fragmented first half, one identity for 151-300.
        let late = map_of(vec![
            slice(301, 1, 50),
            slice(302, 51, 100),
            slice(303, 101, 150),
            slice(304, 151, 300),
        ]);

        let ide_early = ideucl(&gt, &early, 0.5);
        let ide_late = ideucl(&gt, &late, 0.5);
        assert!(
            ide_early > ide_late,
            "expected early {ide_early} > late {ide_late}"
        );

        let idf1_early = id_metrics(&gt, &early, 0.5).idf1;
        let idf1_late = id_metrics(&gt, &late, 0.5).idf1;
        assert_abs_diff_eq!(idf1_early, idf1_late, epsilon = 1e-9);
        assert_abs_diff_eq!(idf1_early, 0.5, epsilon = 1e-12);

        // Both commit exactly three switches.
        assert_eq!(clear_mot(&gt, &early, 0.5).id_switches, 3);
        assert_eq!(clear_mot(&gt, &late, 0.5).id_switches, 3);
    }

    #[test]
    fn ideucl_invariant_under_uniform_scaling() {
        let gt = decelerating_gt();
        let hyp = split_hypothesis(&gt, 150);
        let scale = |trajs: &TrajectoryMap, c: f64| -> TrajectoryMap {
            trajs
                .iter()
                .map(|(id, t)| {
                    let mut s = Trajectory::new(*id);
                    for (f, p) in &t.points {
                        s.insert(
                            *f,
                            TrackPoint {
                                bbox: BoundingBox::new(
                                    p.bbox.x * c,
                                    p.bbox.y * c,
                                    p.bbox.w * c,
                                    p.bbox.h * c,
                                ),
                                class: None,
                                visibility: None,
                            },
                        )
                        .unwrap();
                    }
                    (*id, s)
                })
                .collect()
        };
        let base = ideucl(&gt, &hyp, 0.5);
        for c in [0.5, 2.0, 7.25] {
            assert_abs_diff_eq!(
                ideucl(&scale(&gt, c), &scale(&hyp, c), 0.5),
                base,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn ideucl_invariant_under_hypothesis_relabeling() {
        let gt = decelerating_gt();
        let hyp = split_hypothesis(&gt, 150);
        let relabeled: TrajectoryMap = hyp
            .iter()
            .map(|(id, t)| {
                let new_id = 9000 - id;
                let mut s = t.clone();
                s.id = new_id;
                (new_id, s)
            })
            .collect();
        assert_abs_diff_eq!(
            ideucl(&gt, &hyp, 0.5),
            ideucl(&gt, &relabeled, 0.5),
            epsilon = 1e-12
        );
    }

    #[test]
    fn static_gt_falls_back_to_frame_weights() {
        let centers: Vec<(u32, f64, f64)> = (1..=10).map(|f| (f, 50.0, 50.0)).collect();
        let gt = map_of(vec![track_from_centers(1, &centers)]);
        // Fully covered static track -> 1.0.
        let full = ideucl_detailed(&gt, &gt, 0.5);
        assert!(full.frame_fallback);
        assert_abs_diff_eq!(full.value, 1.0);
        // Half covered -> 0.5 under frame weights.
        let half = map_of(vec![track_from_centers(
            7,
            &centers[..5].to_vec(),
        )]);
        let partial = ideucl_detailed(&gt, &half, 0.5);
        assert!(partial.frame_fallback);
        assert_abs_diff_eq!(partial.value, 0.5);
    }

    #[test]
    fn clear_identity_run_is_perfect() {
        let gt = constant_speed_gt(100, 2.0);
        let m = clear_mot(&gt, &gt, 0.5);
        assert_abs_diff_eq!(m.mota, 1.0);
        assert_abs_diff_eq!(m.motp, 1.0);
        assert_eq!(m.fp, 0);
        assert_eq!(m.fn_count, 0);
        assert_eq!(m.id_switches, 0);
        assert_eq!(m.fragmentations, 0);
    }

    #[test]
    fn clear_counts_miss_and_spurious() {
        // 10 gt boxes on one static track; hypothesis misses frame 10 and
        // adds one far-away spurious box.
        let centers: Vec<(u32, f64, f64)> = (1..=10).map(|f| (f, 50.0, 50.0)).collect();
        let gt = map_of(vec![track_from_centers(1, &centers)]);
        let mut hyp_track = track_from_centers(5, &centers[..9].to_vec());
        hyp_track.id = 5;
        let spurious = track_from_centers(6, &[(3, 500.0, 500.0)]);
        let hyp = map_of(vec![hyp_track, spurious]);
        let m = clear_mot(&gt, &hyp, 0.5);
        assert_eq!(m.fn_count, 1);
        assert_eq!(m.fp, 1);
        assert_eq!(m.id_switches, 0);
        assert_abs_diff_eq!(m.mota, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn split_hypothesis_causes_one_switch() {
        let gt = constant_speed_gt(299, 2.0);
        let hyp = split_hypothesis(&gt, 150);
        let m = clear_mot(&gt, &hyp, 0.5);
        assert_eq!(m.id_switches, 1);
        assert_eq!(m.fragmentations, 0);
        assert_eq!(m.fp, 0);
        assert_eq!(m.fn_count, 0);
    }

    #[test]
    fn carry_over_keeps_existing_match_through_ambiguity() {
        // Two hypotheses both overlap the gt box; the one matched earlier
        // must be kept even if the newcomer has slightly higher IoU.
        let gt = map_of(vec![track_from_centers(1, &[(1, 50.0, 50.0), (2, 50.0, 50.0)])]);
        let ours = track_from_centers(11, &[(1, 51.0, 50.0), (2, 51.0, 50.0)]);
        let newcomer = track_from_centers(12, &[(2, 50.0, 50.0)]);
        let hyp = map_of(vec![ours, newcomer]);
        let m = clear_mot(&gt, &hyp, 0.5);
        assert_eq!(m.id_switches, 0);
        assert_eq!(m.fp, 1);
    }

    #[test]
    fn fragmentation_counted_on_resume() {
        // Matched frames 1-3, gap 4-5, matched again 6-8: one fragmentation.
        let centers: Vec<(u32, f64, f64)> = (1..=8).map(|f| (f, 50.0, 50.0)).collect();
        let gt = map_of(vec![track_from_centers(1, &centers)]);
        let kept: Vec<(u32, f64, f64)> = centers
            .iter()
            .copied()
            .filter(|(f, _, _)| *f <= 3 || *f >= 6)
            .collect();
        let hyp = map_of(vec![track_from_centers(9, &kept)]);
        let m = clear_mot(&gt, &hyp, 0.5);
        assert_eq!(m.fragmentations, 1);
        assert_eq!(m.id_switches, 0);
        assert_eq!(m.fn_count, 2);
    }

    #[test]
    fn mt_ml_thresholds() {
        let centers: Vec<(u32, f64, f64)> = (1..=10).map(|f| (f, 50.0, 50.0)).collect();
        let gt = map_of(vec![track_from_centers(1, &centers)]);

        let cover = |n: usize| map_of(vec![track_from_centers(5, &centers[..n].to_vec())]);
        assert_eq!(mt_ml(&gt, &cover(10), 0.5), TrackCoverage { mt: 1, ml: 0, pt: 0 });
        assert_eq!(mt_ml(&gt, &cover(1), 0.5), TrackCoverage { mt: 0, ml: 1, pt: 0 });
        assert_eq!(mt_ml(&gt, &cover(5), 0.5), TrackCoverage { mt: 0, ml: 0, pt: 1 });
    }

    #[test]
    fn report_mota_matches_count_identity() {
        let gt = constant_speed_gt(299, 2.0);
        let hyp = split_hypothesis(&gt, 150);
        let report = evaluate_tracking(&gt, &hyp, 0.5);
        assert_abs_diff_eq!(
            report.mota,
            1.0 - (report.fp + report.fn_count + report.id_switches) as f64
                / report.gt_boxes as f64,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(report.ideucl, 0.5, epsilon = 1e-9);
    }
}
