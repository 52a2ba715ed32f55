//! Binary PPM (P6) images: the self-contained frame format used by the
//! synthetic generator, the appearance pipeline and overlay dumps.

use crate::appearance::PixelPatch;
use crate::motdata::BoundingBox;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PpmError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("not a binary PPM (P6) file")]
    BadMagic,
    #[error("malformed PPM header: {0}")]
    BadHeader(String),
    #[error("pixel data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

fn io_err(path: &Path, source: std::io::Error) -> PpmError {
    PpmError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Interleaved 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn filled(width: usize, height: usize, color: (u8, u8, u8)) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&[color.0, color.1, color.2]);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn set(&mut self, x: usize, y: usize, color: (u8, u8, u8)) {
        if x < self.width && y < self.height {
            let i = (y * self.width + x) * 3;
            self.data[i] = color.0;
            self.data[i + 1] = color.1;
            self.data[i + 2] = color.2;
        }
    }

    /// Fill the intersection of `bbox` with the image.
    pub fn fill_rect(&mut self, bbox: &BoundingBox, color: (u8, u8, u8)) {
        let x0 = bbox.x.floor().max(0.0) as usize;
        let y0 = bbox.y.floor().max(0.0) as usize;
        let x1 = (bbox.right().ceil().max(0.0) as usize).min(self.width);
        let y1 = (bbox.bottom().ceil().max(0.0) as usize).min(self.height);
        for y in y0..y1 {
            let row = y * self.width;
            for x in x0..x1 {
                let i = (row + x) * 3;
                self.data[i] = color.0;
                self.data[i + 1] = color.1;
                self.data[i + 2] = color.2;
            }
        }
    }

    /// Draw a one-pixel rectangle outline, clipped to the image.
    pub fn outline_rect(&mut self, bbox: &BoundingBox, color: (u8, u8, u8)) {
        let x0 = bbox.x.round() as i64;
        let y0 = bbox.y.round() as i64;
        let x1 = bbox.right().round() as i64 - 1;
        let y1 = bbox.bottom().round() as i64 - 1;
        for x in x0..=x1 {
            if x >= 0 {
                if y0 >= 0 {
                    self.set(x as usize, y0 as usize, color);
                }
                if y1 >= 0 {
                    self.set(x as usize, y1 as usize, color);
                }
            }
        }
        for y in y0..=y1 {
            if y >= 0 {
                if x0 >= 0 {
                    self.set(x0 as usize, y as usize, color);
                }
                if x1 >= 0 {
                    self.set(x1 as usize, y as usize, color);
                }
            }
        }
    }

    /// Extract the pixels under `bbox` (clipped to the image) as a patch for
    /// histogram extraction. A box fully outside the image yields an empty
    /// patch.
    pub fn patch(&self, bbox: &BoundingBox) -> PixelPatch {
        let x0 = bbox.x.floor().max(0.0) as usize;
        let y0 = bbox.y.floor().max(0.0) as usize;
        let x1 = (bbox.right().ceil().max(0.0) as usize).min(self.width);
        let y1 = (bbox.bottom().ceil().max(0.0) as usize).min(self.height);
        if x0 >= x1 || y0 >= y1 {
            return PixelPatch::empty();
        }
        let (w, h) = (x1 - x0, y1 - y0);
        let mut rgb = Vec::with_capacity(w * h * 3);
        for y in y0..y1 {
            let start = (y * self.width + x0) * 3;
            rgb.extend_from_slice(&self.data[start..start + w * 3]);
        }
        PixelPatch::from_rgb8(w, h, &rgb)
    }
}

pub fn write(image: &RgbImage, path: impl AsRef<Path>) -> Result<(), PpmError> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    write!(out, "P6\n{} {}\n255\n", image.width, image.height).map_err(|e| io_err(path, e))?;
    out.write_all(&image.data).map_err(|e| io_err(path, e))?;
    out.flush().map_err(|e| io_err(path, e))
}

pub fn read(path: impl AsRef<Path>) -> Result<RgbImage, PpmError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    parse(&bytes)
}

fn parse(bytes: &[u8]) -> Result<RgbImage, PpmError> {
    if bytes.len() < 2 || &bytes[0..2] != b"P6" {
        return Err(PpmError::BadMagic);
    }
    // Header: magic, width, height, maxval as whitespace-separated tokens,
    // with '#' comments allowed; a single whitespace byte ends the header.
    let mut pos = 2;
    let mut fields = Vec::with_capacity(3);
    while fields.len() < 3 && pos < bytes.len() {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            break;
        }
        let token = std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| PpmError::BadHeader("non-ascii header".into()))?;
        fields.push(
            token
                .parse::<usize>()
                .map_err(|_| PpmError::BadHeader(format!("bad integer '{token}'")))?,
        );
    }
    if fields.len() != 3 {
        return Err(PpmError::BadHeader("missing dimensions".into()));
    }
    let (width, height, maxval) = (fields[0], fields[1], fields[2]);
    if maxval != 255 {
        return Err(PpmError::BadHeader(format!(
            "unsupported maxval {maxval}, expected 255"
        )));
    }
    pos += 1; // single whitespace after maxval
    let expected = width * height * 3;
    let found = bytes.len().saturating_sub(pos);
    if found < expected {
        return Err(PpmError::Truncated { expected, found });
    }
    Ok(RgbImage {
        width,
        height,
        data: bytes[pos..pos + expected].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn ppm_round_trip() {
        let mut img = RgbImage::filled(4, 3, (10, 20, 30));
        img.set(1, 1, (200, 100, 50));
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.ppm");
        write(&img, &path).unwrap();
        let back = read(&path).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn rejects_non_p6() {
        assert!(matches!(parse(b"P3\n1 1\n255\n0 0 0"), Err(PpmError::BadMagic)));
    }

    #[test]
    fn rejects_truncated_data() {
        let err = parse(b"P6\n2 2\n255\nxxx").unwrap_err();
        assert!(matches!(err, PpmError::Truncated { .. }));
    }

    #[test]
    fn patch_clips_to_image() {
        let mut img = RgbImage::filled(10, 10, (0, 0, 0));
        img.fill_rect(&BoundingBox::new(8.0, 8.0, 5.0, 5.0), (255, 0, 0));
        let patch = img.patch(&BoundingBox::new(8.0, 8.0, 5.0, 5.0));
        assert_eq!(patch.width, 2);
        assert_eq!(patch.height, 2);
        assert_eq!(patch.rgb[0], 1.0);
    }

    #[test]
    fn patch_outside_image_is_empty() {
        let img = RgbImage::filled(10, 10, (0, 0, 0));
        let patch = img.patch(&BoundingBox::new(50.0, 50.0, 5.0, 5.0));
        assert_eq!(patch.pixel_count(), 0);
    }
}
