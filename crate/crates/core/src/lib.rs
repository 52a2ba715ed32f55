//! Multi-object tracking toolkit.
//!
//! The crate is organized around a tracking-by-detection pipeline and the
//! evaluation machinery needed to score it:
//!
//! * [`motdata`] — bounding boxes, trajectories, MOT CSV / seqinfo.ini I/O.
//! * [`assignment`] — exact min-cost / max-weight bipartite assignment.
//! * [`metrics`] — IDEucl, IDF1/IDP/IDR, CLEAR MOT, MT/ML and detection
//!   scores (P/R/F1, MODA/MODP, AP, mAP over the COCO threshold sweep).
//! * [`appearance`] — HSV color histograms and Bhattacharyya distance.
//! * [`tracker`] — particle-filter tracker with pluggable box refinement,
//!   camera-motion compensation, re-identification and a Kalman variant.
//! * [`synthgen`] — deterministic synthetic sequences, detection corruption
//!   and PPM frame rendering for oracle-based testing.
//! * [`qa`] — annotation-quality heuristics (fragmentation / jump detection).

pub mod appearance;
pub mod assignment;
mod keyval;
pub mod metrics;
pub mod motdata;
pub mod ppm;
pub mod qa;
pub mod synthgen;
pub mod tracker;
