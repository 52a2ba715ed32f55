//! Color-histogram appearance descriptors and Bhattacharyya similarity for
//! re-identification.
//!
//! Histograms are binned in HSV space with 16 hue, 16 saturation and 8 value
//! bins. Hexcone hue is already invariant to uniform brightness scaling of
//! chromatic pixels, which is the property re-identification needs.

use thiserror::Error;

pub const HUE_BINS: usize = 16;
pub const SAT_BINS: usize = 16;
pub const VAL_BINS: usize = 8;
pub const TOTAL_BINS: usize = HUE_BINS * SAT_BINS * VAL_BINS;

#[derive(Debug, Error)]
pub enum AppearanceError {
    #[error("rgb components must lie in [0,1], got ({0}, {1}, {2})")]
    RgbOutOfRange(f64, f64, f64),
    #[error("histogram weights must be L1-normalized (sum = {0})")]
    NotNormalized(f64),
}

/// Hexcone RGB -> HSV. Hue in degrees [0, 360), saturation and value in
/// [0, 1]. Achromatic pixels get hue 0.
pub fn rgb_to_hsv(r: f64, g: f64, b: f64) -> Result<(f64, f64, f64), AppearanceError> {
    let in_range = |v: f64| (0.0..=1.0).contains(&v);
    if !(in_range(r) && in_range(g) && in_range(b)) {
        return Err(AppearanceError::RgbOutOfRange(r, g, b));
    }
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;

    let value = max;
    let saturation = if max > 0.0 { chroma / max } else { 0.0 };
    let hue = if chroma == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / chroma).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / chroma + 2.0)
    } else {
        60.0 * ((r - g) / chroma + 4.0)
    };
    // rem_euclid keeps hue in [0, 360); guard the h == 360.0 rounding edge.
    let hue = if hue >= 360.0 { hue - 360.0 } else { hue };
    Ok((hue, saturation, value))
}

/// Rectangular pixel patch, interleaved RGB with components in [0, 1].
#[derive(Debug, Clone)]
pub struct PixelPatch {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<f64>,
}

impl PixelPatch {
    pub fn new(width: usize, height: usize, rgb: Vec<f64>) -> Self {
        assert_eq!(rgb.len(), width * height * 3, "patch buffer size mismatch");
        Self { width, height, rgb }
    }

    pub fn empty() -> Self {
        Self {
            width: 0,
            height: 0,
            rgb: Vec::new(),
        }
    }

    /// Build from raw interleaved 8-bit RGB planes.
    pub fn from_rgb8(width: usize, height: usize, data: &[u8]) -> Self {
        assert_eq!(data.len(), width * height * 3, "patch buffer size mismatch");
        Self {
            width,
            height,
            rgb: data.iter().map(|&b| b as f64 / 255.0).collect(),
        }
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
}

/// L1-normalized HSV histogram over the fixed 16x16x8 grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvHistogram {
    weights: Vec<f64>,
    degenerate: bool,
}

impl HsvHistogram {
    /// Built from explicit weights; normalizes them. Zero total weight yields
    /// the degenerate uniform histogram.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), TOTAL_BINS, "histogram bin count mismatch");
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Self::degenerate_uniform();
        }
        Self {
            weights: weights.into_iter().map(|w| w / total).collect(),
            degenerate: false,
        }
    }

    pub fn degenerate_uniform() -> Self {
        Self {
            weights: vec![1.0 / TOTAL_BINS as f64; TOTAL_BINS],
            degenerate: true,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when the histogram came from zero pixels and carries no
    /// appearance information.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    fn check_normalized(&self) -> Result<(), AppearanceError> {
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(AppearanceError::NotNormalized(sum));
        }
        Ok(())
    }
}

pub fn bin_index(h: f64, s: f64, v: f64) -> usize {
    let hb = ((h / 360.0 * HUE_BINS as f64) as usize).min(HUE_BINS - 1);
    let sb = ((s * SAT_BINS as f64) as usize).min(SAT_BINS - 1);
    let vb = ((v * VAL_BINS as f64) as usize).min(VAL_BINS - 1);
    (hb * SAT_BINS + sb) * VAL_BINS + vb
}

/// Bin a patch into the HSV grid. An empty patch yields the degenerate
/// uniform histogram so downstream distances stay defined.
pub fn extract_histogram(patch: &PixelPatch) -> HsvHistogram {
    if patch.pixel_count() == 0 {
        return HsvHistogram::degenerate_uniform();
    }
    let mut counts = vec![0.0f64; TOTAL_BINS];
    for px in patch.rgb.chunks_exact(3) {
        let (h, s, v) =
            rgb_to_hsv(px[0].clamp(0.0, 1.0), px[1].clamp(0.0, 1.0), px[2].clamp(0.0, 1.0))
                .expect("clamped components are in range");
        counts[bin_index(h, s, v)] += 1.0;
    }
    HsvHistogram::from_weights(counts)
}

/// Bhattacharyya distance d = sqrt(1 - sum_i sqrt(p_i * q_i)), clamped to
/// [0, 1] against rounding. Identical distributions give 0, disjoint supports
/// give 1. This bounded form combines linearly with IoU in the re-id score;
/// the unbounded -ln(BC) form would not.
pub fn bhattacharyya_distance(
    p: &HsvHistogram,
    q: &HsvHistogram,
) -> Result<f64, AppearanceError> {
    p.check_normalized()?;
    q.check_normalized()?;
    let coefficient: f64 = p
        .weights
        .iter()
        .zip(&q.weights)
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    Ok((1.0 - coefficient).max(0.0).sqrt().clamp(0.0, 1.0))
}
