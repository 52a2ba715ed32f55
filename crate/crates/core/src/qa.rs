//! Annotation-quality heuristics: tracks that vanish mid-image and sudden
//! centroid jumps. Both rules are deliberately one-sided — they flag likely
//! mistakes but make no completeness claim.

use crate::motdata::{centroid_distance, SequenceInfo, TrajectoryMap};

pub const DEFAULT_BOUNDARY_MARGIN: f64 = 20.0;
pub const DEFAULT_TAIL_FRAMES: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaFlagKind {
    FragmentationSuspect,
    IdSwitchSuspect,
}

impl QaFlagKind {
    pub fn name(self) -> &'static str {
        match self {
            QaFlagKind::FragmentationSuspect => "fragmentation_suspect",
            QaFlagKind::IdSwitchSuspect => "id_switch_suspect",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaFlag {
    pub track_id: i64,
    pub frame: u32,
    pub kind: QaFlagKind,
    pub detail: String,
}

/// Flag tracks that end away from every image edge before the sequence tail.
/// An identity should persist until it leaves the field of view, so a track
/// that stops mid-image was probably fragmented by the annotator.
pub fn detect_fragmentation(
    trajectories: &TrajectoryMap,
    info: &SequenceInfo,
    boundary_margin: f64,
    tail_frames: u32,
) -> Vec<QaFlag> {
    let mut flags = Vec::new();
    for (id, traj) in trajectories {
        let Some(last_frame) = traj.last_frame() else {
            continue;
        };
        if last_frame + tail_frames >= info.frame_count {
            continue;
        }
        let bbox = traj.bbox_at(last_frame).expect("last frame has a box");
        let (cx, cy) = bbox.center();
        let near_edge = cx <= boundary_margin
            || cy <= boundary_margin
            || cx >= info.width as f64 - boundary_margin
            || cy >= info.height as f64 - boundary_margin;
        if !near_edge {
            flags.push(QaFlag {
                track_id: *id,
                frame: last_frame,
                kind: QaFlagKind::FragmentationSuspect,
                detail: format!(
                    "ends at ({cx:.1}, {cy:.1}), more than {boundary_margin} px from every edge, \
                     {} frames before the sequence ends",
                    info.frame_count - last_frame
                ),
            });
        }
    }
    flags
}

/// Flag frames whose centroid displacement exceeds the track mean by more
/// than two standard deviations — the signature of a mutual identity swap.
/// Tracks shorter than three frames are skipped and reported separately.
pub fn detect_displacement_outliers(trajectories: &TrajectoryMap) -> (Vec<QaFlag>, Vec<i64>) {
    let mut flags = Vec::new();
    let mut skipped = Vec::new();
    for (id, traj) in trajectories {
        if traj.len() < 3 {
            skipped.push(*id);
            continue;
        }
        let mut steps: Vec<(u32, f64)> = Vec::with_capacity(traj.len() - 1);
        let mut prev = None;
        for (frame, p) in &traj.points {
            if let Some((_, pb)) = prev {
                steps.push((*frame, centroid_distance(&pb, &p.bbox)));
            }
            prev = Some((*frame, p.bbox));
        }
        let n = steps.len() as f64;
        let mean: f64 = steps.iter().map(|(_, d)| d).sum::<f64>() / n;
        let var: f64 = steps.iter().map(|(_, d)| (d - mean).powi(2)).sum::<f64>() / n;
        let limit = mean + 2.0 * var.sqrt();
        for (frame, d) in steps {
            if d > limit {
                flags.push(QaFlag {
                    track_id: *id,
                    frame,
                    kind: QaFlagKind::IdSwitchSuspect,
                    detail: format!(
                        "displacement {d:.2} px exceeds mean {mean:.2} + 2 sigma ({limit:.2})"
                    ),
                });
            }
        }
    }
    (flags, skipped)
}
