//! Camera-motion compensation: per-frame 2x3 affine transforms mapping
//! previous-frame coordinates into the current frame, consumed from a CSV
//! file (`frame,a11,a12,a13,a21,a22,a23`). Frames without a row are treated
//! as identity.

use super::TrackerError;
use crate::motdata::BoundingBox;
use std::collections::BTreeMap;
use std::path::Path;

pub type AffineTransform = [f64; 6];

pub const IDENTITY: AffineTransform = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];

#[derive(Debug, Clone, Default)]
pub struct CameraMotion {
    transforms: BTreeMap<u32, AffineTransform>,
}

impl CameraMotion {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, frame: u32, transform: AffineTransform) {
        self.transforms.insert(frame, transform);
    }

    pub fn transform(&self, frame: u32) -> Option<&AffineTransform> {
        self.transforms.get(&frame)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, TrackerError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| TrackerError::Config(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self, TrackerError> {
        let mut out = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 7 {
                return Err(TrackerError::Config(format!(
                    "camera motion line {}: expected 7 fields, found {}",
                    idx + 1,
                    fields.len()
                )));
            }
            let frame: u32 = fields[0].parse().map_err(|_| {
                TrackerError::Config(format!("camera motion line {}: bad frame", idx + 1))
            })?;
            let mut t = IDENTITY;
            for (i, f) in fields[1..].iter().enumerate() {
                t[i] = f.parse().map_err(|_| {
                    TrackerError::Config(format!("camera motion line {}: bad number", idx + 1))
                })?;
                if !t[i].is_finite() {
                    return Err(TrackerError::Config(format!(
                        "camera motion line {}: non-finite entry",
                        idx + 1
                    )));
                }
            }
            out.insert(frame, t);
        }
        Ok(out)
    }
}

/// Warp a box: the center moves through the affine map, width and height
/// scale with the column norms of the linear part (identity for pure
/// translations and rotations).
pub fn warp_box(t: &AffineTransform, bbox: &BoundingBox) -> BoundingBox {
    let (cx, cy) = bbox.center();
    let nx = t[0] * cx + t[1] * cy + t[2];
    let ny = t[3] * cx + t[4] * cy + t[5];
    let sx = (t[0] * t[0] + t[3] * t[3]).sqrt();
    let sy = (t[1] * t[1] + t[4] * t[4]).sqrt();
    BoundingBox::from_center(nx, ny, bbox.w * sx, bbox.h * sy)
}

pub fn warp_point(t: &AffineTransform, x: f64, y: f64) -> (f64, f64) {
    (t[0] * x + t[1] * y + t[2], t[3] * x + t[4] * y + t[5])
}
