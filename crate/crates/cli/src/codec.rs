//! Binary PPM/PGM (P6/P5, maxval 255) read and write; PNG read and write.
//!
//! PPM output is always `P5`/`P6`, one newline after each header field
//! group (`P6\n<w> <h>\n255\n`) followed by the raw samples, so decoding and
//! re-encoding a file written in that layout reproduces it byte for byte.

use std::path::Path;

use specshape_core::Image;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image header or payload: {0}")]
    CorruptHeader(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Detects the format from the leading bytes.
pub fn decode_image(bytes: &[u8]) -> Result<Image, CodecError> {
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(bytes)
    } else if bytes.starts_with(PNG_MAGIC) {
        decode_png(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(CodecError::UnsupportedFormat(format!(
            "netpbm variant P{}",
            bytes[1] as char
        )))
    } else {
        Err(CodecError::UnsupportedFormat(
            "unrecognised signature".into(),
        ))
    }
}

/// `P5` for one channel, `P6` for three.
pub fn encode_ppm(img: &Image) -> Result<Vec<u8>, CodecError> {
    let magic = match img.channels {
        1 => "P5",
        3 => "P6",
        c => {
            return Err(CodecError::UnsupportedFormat(format!(
                "{c}-channel image as PPM"
            )))
        }
    };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    Ok(out)
}

pub fn encode_png(img: &Image) -> Result<Vec<u8>, CodecError> {
    let color = match img.channels {
        1 => png::ColorType::Grayscale,
        3 => png::ColorType::Rgb,
        c => {
            return Err(CodecError::UnsupportedFormat(format!(
                "{c}-channel image as PNG"
            )))
        }
    };
    let mut out = Vec::new();
    let mut enc = png::Encoder::new(&mut out, img.width as u32, img.height as u32);
    enc.set_color(color);
    enc.set_depth(png::BitDepth::Eight);
    let err = |e: png::EncodingError| CodecError::UnsupportedFormat(e.to_string());
    let mut w = enc.write_header().map_err(err)?;
    w.write_image_data(&img.data).map_err(err)?;
    w.finish().map_err(err)?;
    Ok(out)
}

/// PNG when the extension says so, PPM otherwise.
pub fn encode_for_path(img: &Image, path: &Path) -> Result<Vec<u8>, CodecError> {
    let is_png = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        encode_png(img)
    } else {
        encode_ppm(img)
    }
}

pub fn read_image(path: &Path) -> Result<Image, CodecError> {
    let bytes = std::fs::read(path).map_err(|source| CodecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_image(&bytes)
}

pub fn write_image(img: &Image, path: &Path) -> Result<(), CodecError> {
    let bytes = encode_for_path(img, path)?;
    std::fs::write(path, bytes).map_err(|source| CodecError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn corrupt(msg: impl Into<String>) -> CodecError {
    CodecError::CorruptHeader(msg.into())
}

/// Header fields are whitespace separated with `#` comments; exactly one
/// whitespace byte separates `maxval` from the payload.
fn decode_pnm(bytes: &[u8]) -> Result<Image, CodecError> {
    let channels = if bytes[1] == b'5' { 1 } else { 3 };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n' && b != b'\r') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(corrupt("header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(corrupt(format!("expected a number at byte {start}")));
        }
        let text =
            std::str::from_utf8(&bytes[start..pos]).map_err(|_| corrupt("non-ascii header"))?;
        *field = text
            .parse()
            .map_err(|_| corrupt(format!("number '{text}' out of range")))?;
    }
    let [width, height, maxval] = fields;
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(corrupt("missing separator after maxval"));
    }
    pos += 1;
    if maxval != 255 {
        return Err(CodecError::UnsupportedFormat(format!(
            "maxval {maxval}; only 8-bit (255) is supported"
        )));
    }
    if width == 0 || height == 0 {
        return Err(corrupt(format!("zero-sized image {width}×{height}")));
    }
    let n = width
        .checked_mul(height)
        .and_then(|v| v.checked_mul(channels))
        .ok_or_else(|| corrupt("dimensions overflow"))?;
    let payload = &bytes[pos..];
    if payload.len() < n {
        return Err(corrupt(format!(
            "payload has {} of {n} bytes",
            payload.len()
        )));
    }
    Ok(Image::new(width, height, channels, payload[..n].to_vec()).expect("sizes checked"))
}

fn decode_png(bytes: &[u8]) -> Result<Image, CodecError> {
    let mut dec = png::Decoder::new(std::io::Cursor::new(bytes));
    dec.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = dec.read_info().map_err(|e| corrupt(e.to_string()))?;
    let mut buf = vec![
        0;
        reader
            .output_buffer_size()
            .ok_or_else(|| corrupt("image too large"))?
    ];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| corrupt(e.to_string()))?;
    buf.truncate(info.buffer_size());
    let (w, h) = (info.width as usize, info.height as usize);
    // Alpha carries no meaning here and is dropped.
    let (channels, data) = match info.color_type {
        png::ColorType::Grayscale => (1, buf),
        png::ColorType::Rgb => (3, buf),
        png::ColorType::GrayscaleAlpha => (1, buf.chunks_exact(2).map(|p| p[0]).collect()),
        png::ColorType::Rgba => (
            3,
            buf.chunks_exact(4)
                .flat_map(|p| [p[0], p[1], p[2]])
                .collect(),
        ),
        other => {
            return Err(CodecError::UnsupportedFormat(format!(
                "png colour type {other:?}"
            )))
        }
    };
    Image::new(w, h, channels, data).ok_or_else(|| corrupt("png size mismatch"))
}
