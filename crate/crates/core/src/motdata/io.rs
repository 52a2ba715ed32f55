//! MOT CSV and seqinfo.ini reading/writing.
//!
//! Row format is `frame,id,bb_left,bb_top,bb_width,bb_height,conf,class,visibility`.
//! Detection files may stop after `conf` (or pad the trailing fields with -1);
//! some tool chains append world coordinates, so up to 10 columns are accepted.

use super::{
    AnnotationEntry, BoundingBox, MotDataError, MotFileKind, ObjectClass, SequenceInfo,
};
use std::fs;
use std::path::Path;

fn io_err(path: &Path, source: std::io::Error) -> MotDataError {
    MotDataError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Parse a MOT CSV file. Rows come back in file order; malformed rows are an
/// error naming the line, never silently dropped.
pub fn parse_mot_file(
    path: impl AsRef<Path>,
    kind: MotFileKind,
) -> Result<Vec<AnnotationEntry>, MotDataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_mot_str(&text, kind)
}

pub fn parse_mot_str(
    text: &str,
    kind: MotFileKind,
) -> Result<Vec<AnnotationEntry>, MotDataError> {
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        entries.push(parse_row(line, lineno, kind)?);
    }
    Ok(entries)
}

fn parse_row(
    line: &str,
    lineno: usize,
    kind: MotFileKind,
) -> Result<AnnotationEntry, MotDataError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() < 7 || fields.len() > 10 {
        return Err(MotDataError::Parse(
            format!("expected 7-10 comma-separated fields, found {}", fields.len()),
            lineno,
        ));
    }
    let num = |i: usize, name: &str| -> Result<f64, MotDataError> {
        fields[i].parse::<f64>().map_err(|_| {
            MotDataError::Parse(format!("invalid {name} value '{}'", fields[i]), lineno)
        })
    };

    let frame_raw = num(0, "frame")?;
    if frame_raw < 1.0 || frame_raw.fract() != 0.0 {
        return Err(MotDataError::Parse(
            "frame index must be ≥ 1".into(),
            lineno,
        ));
    }
    let frame = frame_raw as u32;

    let id_raw = num(1, "id")?;
    if id_raw.fract() != 0.0 {
        return Err(MotDataError::Parse(
            format!("track id must be an integer, found '{}'", fields[1]),
            lineno,
        ));
    }
    let id = id_raw as i64;
    match kind {
        MotFileKind::GroundTruth | MotFileKind::Hypotheses => {
            if id < 1 {
                return Err(MotDataError::Parse(
                    format!("track id must be positive, found {id}"),
                    lineno,
                ));
            }
        }
        MotFileKind::Detections => {}
    }

    let bbox = BoundingBox::new(num(2, "bb_left")?, num(3, "bb_top")?, num(4, "bb_width")?, num(5, "bb_height")?);
    if !bbox.is_valid() {
        return Err(MotDataError::Parse(
            "bounding box must be finite with non-negative width/height".into(),
            lineno,
        ));
    }

    let conf = num(6, "conf")?;
    if !(0.0..=1.0).contains(&conf) {
        return Err(MotDataError::Parse(
            format!("confidence must lie in [0,1], found {conf}"),
            lineno,
        ));
    }

    let class = if fields.len() > 7 {
        let code = num(7, "class")? as i64;
        if code == -1 {
            None
        } else {
            Some(ObjectClass::from_code(code).ok_or_else(|| {
                MotDataError::Parse(format!("unknown class code {code}"), lineno)
            })?)
        }
    } else {
        None
    };

    let visibility = if fields.len() > 8 {
        let v = num(8, "visibility")?;
        if v == -1.0 {
            None
        } else if v == 0.0 || v == 1.0 {
            Some(v)
        } else {
            return Err(MotDataError::Parse(
                format!("visibility must be binary (0 or 1), found {v}"),
                lineno,
            ));
        }
    } else {
        None
    };

    Ok(AnnotationEntry {
        frame,
        id,
        bbox,
        conf,
        class,
        visibility,
    })
}

/// Format a coordinate with 6 significant digits, trimming trailing zeros.
fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

pub fn write_mot_string(entries: &[AnnotationEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let class = e.class.map_or(-1, ObjectClass::code);
        let vis = e.visibility.map_or("-1".to_string(), fmt_num);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            e.frame,
            e.id,
            fmt_num(e.bbox.x),
            fmt_num(e.bbox.y),
            fmt_num(e.bbox.w),
            fmt_num(e.bbox.h),
            fmt_num(e.conf),
            class,
            vis
        ));
    }
    out
}

pub fn write_mot_file(
    entries: &[AnnotationEntry],
    path: impl AsRef<Path>,
) -> Result<(), MotDataError> {
    let path = path.as_ref();
    fs::write(path, write_mot_string(entries)).map_err(|e| io_err(path, e))
}

/// Parse a seqinfo.ini-style key=value file. Section headers (`[Sequence]`)
/// are skipped; `frameRate` defaults to 25 and `imDir` is optional.
pub fn parse_seqinfo_file(path: impl AsRef<Path>) -> Result<SequenceInfo, MotDataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_seqinfo_str(&text)
}

pub fn parse_seqinfo_str(text: &str) -> Result<SequenceInfo, MotDataError> {
    let mut name = None;
    let mut image_dir = None;
    let mut fps = 25.0;
    let mut frame_count = None;
    let mut width = None;
    let mut height = None;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('[') || line.starts_with('#') || line.starts_with(';')
        {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            MotDataError::Parse(format!("expected key=value, found '{line}'"), lineno)
        })?;
        let (key, value) = (key.trim(), value.trim());
        let parse_u32 = |v: &str| {
            v.parse::<u32>()
                .map_err(|_| MotDataError::Parse(format!("invalid {key} value '{v}'"), lineno))
        };
        match key {
            "name" => name = Some(value.to_string()),
            "imDir" => image_dir = Some(value.to_string()),
            "frameRate" => {
                fps = value.parse::<f64>().map_err(|_| {
                    MotDataError::Parse(format!("invalid frameRate value '{value}'"), lineno)
                })?
            }
            "seqLength" => frame_count = Some(parse_u32(value)?),
            "imWidth" => width = Some(parse_u32(value)?),
            "imHeight" => height = Some(parse_u32(value)?),
            // Unknown keys (e.g. imExt) are tolerated.
            _ => {}
        }
    }

    let missing = |field: &str| MotDataError::Invalid(format!("seqinfo missing key '{field}'"));
    let info = SequenceInfo {
        name: name.ok_or_else(|| missing("name"))?,
        frame_count: frame_count.ok_or_else(|| missing("seqLength"))?,
        width: width.ok_or_else(|| missing("imWidth"))?,
        height: height.ok_or_else(|| missing("imHeight"))?,
        fps,
        image_dir,
    };
    info.validate()?;
    Ok(info)
}

pub fn write_seqinfo_string(info: &SequenceInfo) -> String {
    let mut out = String::from("[Sequence]\n");
    out.push_str(&format!("name={}\n", info.name));
    if let Some(dir) = &info.image_dir {
        out.push_str(&format!("imDir={dir}\n"));
    }
    out.push_str(&format!("frameRate={}\n", fmt_num(info.fps)));
    out.push_str(&format!("seqLength={}\n", info.frame_count));
    out.push_str(&format!("imWidth={}\n", info.width));
    out.push_str(&format!("imHeight={}\n", info.height));
    out
}

pub fn write_seqinfo_file(
    info: &SequenceInfo,
    path: impl AsRef<Path>,
) -> Result<(), MotDataError> {
    let path = path.as_ref();
    fs::write(path, write_seqinfo_string(info)).map_err(|e| io_err(path, e))
}
