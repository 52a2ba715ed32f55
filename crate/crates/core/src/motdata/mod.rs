//! Data model and I/O for boxes, tracks, sequences and MOT-format files.

mod io;

pub use io::{
    parse_mot_file, parse_mot_str, parse_seqinfo_file, parse_seqinfo_str, write_mot_file,
    write_mot_string, write_seqinfo_file, write_seqinfo_string,
};

use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MotDataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} at line {1}")]
    Parse(String, usize),
    #[error("duplicate entry for frame {frame}, id {id}")]
    DuplicateEntry { frame: u32, id: i64 },
    #[error("{0}")]
    Invalid(String),
}

/// Axis-aligned box in pixel coordinates, stored as (left, top, width, height).
///
/// Coordinates are continuous: ground truth interpolated between keyframes is
/// fractional, so nothing here snaps to an integer grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self::new(cx - w / 2.0, cy - h / 2.0, w, h)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    /// Finite coordinates and non-negative extent.
    pub fn is_valid(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.w.is_finite()
            && self.h.is_finite()
            && self.w >= 0.0
            && self.h >= 0.0
    }

    /// Fast negative test used to skip the full IoU computation.
    pub fn intersects(&self, other: &BoundingBox) -> bool {
        self.x < other.right()
            && other.x < self.right()
            && self.y < other.bottom()
            && other.y < self.bottom()
    }

    pub fn iou(&self, other: &BoundingBox) -> f64 {
        iou(self, other)
    }
}

/// Intersection over union of two boxes.
///
/// Degenerate case: when the union has zero area the result is defined as 0.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = (a.right().min(b.right()) - a.x.max(b.x)).max(0.0);
    let iy = (a.bottom().min(b.bottom()) - a.y.max(b.y)).max(0.0);
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    inter / union
}

/// Euclidean distance between box centroids, in pixels.
pub fn centroid_distance(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
}

/// Annotation class codes: 1 pedestrian, 2 static person, 3 ignore region,
/// 4 person on vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ObjectClass {
    Pedestrian,
    Static,
    Ignore,
    PersonOnVehicle,
}

impl ObjectClass {
    pub fn code(self) -> i64 {
        match self {
            ObjectClass::Pedestrian => 1,
            ObjectClass::Static => 2,
            ObjectClass::Ignore => 3,
            ObjectClass::PersonOnVehicle => 4,
        }
    }

    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            1 => Some(ObjectClass::Pedestrian),
            2 => Some(ObjectClass::Static),
            3 => Some(ObjectClass::Ignore),
            4 => Some(ObjectClass::PersonOnVehicle),
            _ => None,
        }
    }
}

/// Which kind of MOT CSV file is being read; controls per-row validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotFileKind {
    GroundTruth,
    Detections,
    Hypotheses,
}

/// One row of a MOT CSV file.
///
/// Detections carry `id = -1` and usually no class/visibility; those fields
/// are `None` in memory and serialized back as `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationEntry {
    /// 1-based frame index.
    pub frame: u32,
    pub id: i64,
    pub bbox: BoundingBox,
    pub conf: f64,
    pub class: Option<ObjectClass>,
    pub visibility: Option<f64>,
}

/// A confidence-scored box with no identity attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub bbox: BoundingBox,
    pub conf: f64,
}

/// Per-frame payload of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackPoint {
    pub bbox: BoundingBox,
    pub class: Option<ObjectClass>,
    pub visibility: Option<f64>,
}

/// One identity's frame-ordered sequence of boxes (at most one per frame).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: i64,
    pub points: BTreeMap<u32, TrackPoint>,
}

impl Trajectory {
    pub fn new(id: i64) -> Self {
        Self {
            id,
            points: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, frame: u32, point: TrackPoint) -> Result<(), MotDataError> {
        if self.points.insert(frame, point).is_some() {
            return Err(MotDataError::DuplicateEntry { frame, id: self.id });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first_frame(&self) -> Option<u32> {
        self.points.keys().next().copied()
    }

    pub fn last_frame(&self) -> Option<u32> {
        self.points.keys().next_back().copied()
    }

    pub fn bbox_at(&self, frame: u32) -> Option<&BoundingBox> {
        self.points.get(&frame).map(|p| &p.bbox)
    }

    /// Total centroid path length: the polyline through this track's
    /// positions, summed over consecutive annotated frames.
    pub fn path_length(&self) -> f64 {
        let mut total = 0.0;
        let mut prev: Option<&TrackPoint> = None;
        for point in self.points.values() {
            if let Some(p) = prev {
                total += centroid_distance(&p.bbox, &point.bbox);
            }
            prev = Some(point);
        }
        total
    }
}

pub type TrajectoryMap = BTreeMap<i64, Trajectory>;

/// Result of [`group_trajectories`]: kept tracks, ignore regions, and the
/// number of entries dropped by the class filter.
#[derive(Debug, Clone, Default)]
pub struct GroupedTracks {
    pub trajectories: TrajectoryMap,
    /// Boxes of ignore-class entries, by frame.
    pub ignore_regions: Vec<(u32, BoundingBox)>,
    /// Entries removed because their class was not in the filter.
    pub filtered: usize,
}

impl GroupedTracks {
    pub fn total_points(&self) -> usize {
        self.trajectories.values().map(|t| t.len()).sum()
    }
}

/// Group flat annotation entries into per-identity trajectories.
///
/// Entries whose class is not in `class_filter` are dropped (counted in
/// `filtered`); ignore-class boxes are returned separately as ignore regions.
/// Entries with no class are treated as pedestrians. Duplicate (frame, id)
/// pairs are an error.
pub fn group_trajectories(
    entries: &[AnnotationEntry],
    class_filter: &[ObjectClass],
) -> Result<GroupedTracks, MotDataError> {
    let mut out = GroupedTracks::default();
    for entry in entries {
        let class = entry.class.unwrap_or(ObjectClass::Pedestrian);
        if class == ObjectClass::Ignore {
            out.ignore_regions.push((entry.frame, entry.bbox));
            continue;
        }
        if !class_filter.contains(&class) {
            out.filtered += 1;
            continue;
        }
        out.trajectories
            .entry(entry.id)
            .or_insert_with(|| Trajectory::new(entry.id))
            .insert(
                entry.frame,
                TrackPoint {
                    bbox: entry.bbox,
                    class: entry.class,
                    visibility: entry.visibility,
                },
            )?;
    }
    Ok(out)
}

/// Classes scored by the tracking metrics: moving and static pedestrians.
pub const TRACKING_CLASSES: [ObjectClass; 2] = [ObjectClass::Pedestrian, ObjectClass::Static];

/// Remove entries whose box overlaps an ignore region in the same frame by
/// more than `iou_threshold`. Applied to hypotheses/detections before
/// evaluation so that ignore-labelled heads do not produce false positives.
pub fn apply_ignore_regions(
    entries: Vec<AnnotationEntry>,
    regions: &[(u32, BoundingBox)],
    iou_threshold: f64,
) -> Vec<AnnotationEntry> {
    if regions.is_empty() {
        return entries;
    }
    let mut by_frame: BTreeMap<u32, Vec<&BoundingBox>> = BTreeMap::new();
    for (frame, bbox) in regions {
        by_frame.entry(*frame).or_default().push(bbox);
    }
    entries
        .into_iter()
        .filter(|e| match by_frame.get(&e.frame) {
            Some(boxes) => !boxes.iter().any(|r| iou(&e.bbox, r) > iou_threshold),
            None => true,
        })
        .collect()
}

/// Sequence metadata, mirroring the seqinfo.ini convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceInfo {
    pub name: String,
    pub frame_count: u32,
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub image_dir: Option<String>,
}

impl SequenceInfo {
    pub fn new(name: impl Into<String>, frame_count: u32, width: u32, height: u32) -> Self {
        Self {
            name: name.into(),
            frame_count,
            width,
            height,
            fps: 25.0,
            image_dir: None,
        }
    }

    pub fn validate(&self) -> Result<(), MotDataError> {
        if self.frame_count < 1 {
            return Err(MotDataError::Invalid("frame_count must be >= 1".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(MotDataError::Invalid(
                "image dimensions must be positive".into(),
            ));
        }
        Ok(())
    }

    /// True if a point lies inside the image rectangle.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x <= self.width as f64 && y <= self.height as f64
    }
}
