//! Image loading, conversion and storage.
//!
//! PGM (P2 ASCII and P5 binary, maxval <= 255) is the interchange format;
//! 8-bit grayscale or RGB PNG is accepted on the read side as a convenience.
//! RGB inputs are collapsed to luma with the BT.601 weights, rounding half up.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

/// Images above this pixel count are rejected at load time.
pub const MAX_PIXELS: u64 = 1 << 26;

/// Gray level a foreground label is rendered as.
pub const FOREGROUND_LEVEL: u8 = 255;

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported bit depth: {0} (only 8 bits/channel supported)")]
    UnsupportedBitDepth(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("image too large: {0} pixels exceeds limit of {MAX_PIXELS}")]
    TooLarge(u64),
    #[error("pixel data truncated: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("sample value {value} exceeds declared maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32 },
    #[error("dimension mismatch: {width}x{height} does not match buffer of {len} samples")]
    DimensionMismatch { width: u32, height: u32, len: usize },
    #[error("binary label {0} is neither 0 nor 1")]
    InvalidLabel(u8),
}

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageIoError> {
        if width == 0 || height == 0 || data.len() != width as usize * height as usize {
            return Err(ImageIoError::DimensionMismatch { width, height, len: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major intensity buffer, length `width * height`.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel_count(&self) -> usize {
        self.data.len()
    }
}

/// Row-major binary label field; 1 is foreground and renders as 255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageIoError> {
        if width == 0 || height == 0 || data.len() != width as usize * height as usize {
            return Err(ImageIoError::DimensionMismatch { width, height, len: data.len() });
        }
        if let Some(&bad) = data.iter().find(|&&v| v > 1) {
            return Err(ImageIoError::InvalidLabel(bad));
        }
        Ok(Self { width, height, data })
    }

    pub(crate) fn from_labels_unchecked(width: u32, height: u32, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), width as usize * height as usize);
        debug_assert!(data.iter().all(|&v| v <= 1));
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major 0/1 labels.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// Renders labels at the 0/255 display scale.
    pub fn to_gray(&self) -> GrayImage {
        let data = self.data.iter().map(|&v| v * FOREGROUND_LEVEL).collect();
        GrayImage { width: self.width, height: self.height, data }
    }
}

/// Loads a grayscale image from PGM (P2/P5) or 8-bit PNG.
///
/// RGB PNG pixels are converted with `0.299 R + 0.587 G + 0.114 B`,
/// rounded half up, which maps a gray pixel `(v,v,v)` back to exactly `v`.
pub fn load_gray(path: &Path) -> Result<GrayImage, ImageIoError> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(ImageIoError::NotFound(path.display().to_string()))
        }
        Err(e) => return Err(ImageIoError::Io(e)),
    };
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        parse_pgm(&bytes)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        decode_png(&bytes)
    } else {
        Err(ImageIoError::UnsupportedFormat(
            "expected PGM (P2/P5) or PNG magic bytes".into(),
        ))
    }
}

/// Writes a binary image as PGM P5 with labels rendered 0/255.
pub fn save_binary(img: &BinaryImage, path: &Path) -> Result<(), ImageIoError> {
    write_pgm_p5(path, img.width, img.height, &img.to_gray().data)
}

/// Writes a grayscale image as PGM P5.
pub fn save_gray(img: &GrayImage, path: &Path) -> Result<(), ImageIoError> {
    write_pgm_p5(path, img.width, img.height, &img.data)
}

fn write_pgm_p5(path: &Path, width: u32, height: u32, data: &[u8]) -> Result<(), ImageIoError> {
    let mut out = Vec::with_capacity(data.len() + 32);
    write!(out, "P5\n{} {}\n255\n", width, height)?;
    out.extend_from_slice(data);
    fs::write(path, out)?;
    Ok(())
}

pub(crate) fn luma_bt601(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    y.round() as u8
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage, ImageIoError> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| ImageIoError::MalformedHeader(format!("png decode: {e}")))?;
    let (w, h) = (decoded.width(), decoded.height());
    check_size(w, h)?;
    match decoded {
        image::DynamicImage::ImageLuma8(img) => GrayImage::new(w, h, img.into_raw()),
        image::DynamicImage::ImageRgb8(img) => {
            let data = img
                .pixels()
                .map(|p| luma_bt601(p.0[0], p.0[1], p.0[2]))
                .collect();
            GrayImage::new(w, h, data)
        }
        image::DynamicImage::ImageLuma16(_)
        | image::DynamicImage::ImageRgb16(_)
        | image::DynamicImage::ImageRgba16(_) => Err(ImageIoError::UnsupportedBitDepth(
            "16-bit PNG".into(),
        )),
        other => Err(ImageIoError::UnsupportedFormat(format!(
            "PNG color type {:?} (only 8-bit gray and RGB)",
            other.color()
        ))),
    }
}

fn check_size(width: u32, height: u32) -> Result<(), ImageIoError> {
    let pixels = width as u64 * height as u64;
    if pixels > MAX_PIXELS {
        return Err(ImageIoError::TooLarge(pixels));
    }
    Ok(())
}

/// Byte cursor over a PNM header: skips whitespace and `#` comments.
struct PnmScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PnmScanner<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_filler(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_uint(&mut self) -> Result<u32, ImageIoError> {
        self.skip_filler();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ImageIoError::MalformedHeader(format!(
                "expected integer at byte offset {}",
                start
            )));
        }
        let tok = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        tok.parse::<u32>()
            .map_err(|_| ImageIoError::MalformedHeader(format!("integer out of range: {tok}")))
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, ImageIoError> {
    let binary = bytes.starts_with(b"P5");
    let mut sc = PnmScanner::new(&bytes[2..]);
    let width = sc.next_uint()?;
    let height = sc.next_uint()?;
    let maxval = sc.next_uint()?;
    if width == 0 || height == 0 {
        return Err(ImageIoError::MalformedHeader(format!(
            "degenerate dimensions {width}x{height}"
        )));
    }
    check_size(width, height)?;
    if maxval == 0 || maxval > 65535 {
        return Err(ImageIoError::MalformedHeader(format!("maxval {maxval}")));
    }
    if maxval > 255 {
        return Err(ImageIoError::UnsupportedBitDepth(format!(
            "PGM maxval {maxval} needs 2 bytes/sample"
        )));
    }
    let expected = width as usize * height as usize;

    let data = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        let raster_start = 2 + sc.pos + 1;
        if 2 + sc.pos >= bytes.len() || !bytes[2 + sc.pos].is_ascii_whitespace() {
            return Err(ImageIoError::MalformedHeader(
                "missing whitespace after maxval".into(),
            ));
        }
        let raster = &bytes[raster_start..];
        if raster.len() < expected {
            return Err(ImageIoError::TruncatedData { expected, found: raster.len() });
        }
        raster[..expected].to_vec()
    } else {
        let mut data = Vec::with_capacity(expected);
        for _ in 0..expected {
            match sc.next_uint() {
                Ok(v) => data.push(v),
                Err(_) => return Err(ImageIoError::TruncatedData { expected, found: data.len() }),
            }
        }
        let mut out = Vec::with_capacity(expected);
        for v in data {
            if v > maxval {
                return Err(ImageIoError::SampleOutOfRange { value: v, maxval });
            }
            out.push(v as u8);
        }
        out
    };

    if let Some(&bad) = data.iter().find(|&&v| v as u32 > maxval) {
        return Err(ImageIoError::SampleOutOfRange { value: bad as u32, maxval });
    }
    GrayImage::new(width, height, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_identity_read() {
        let dir = std::env::temp_dir().join("histoseg_p2_identity");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.pgm");
        fs::write(&path, "P2\n# tiny\n2 2\n255\n0 10\n20 255\n").unwrap();
        let img = load_gray(&path).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.data(), &[0, 10, 20, 255]);
    }

    #[test]
    fn p5_round_trip_binarizes_back() {
        let dir = std::env::temp_dir().join("histoseg_p5_rt");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("b.pgm");
        let bin = BinaryImage::new(3, 2, vec![0, 1, 1, 0, 0, 1]).unwrap();
        save_binary(&bin, &path).unwrap();
        let gray = load_gray(&path).unwrap();
        assert_eq!(gray.data(), &[0, 255, 255, 0, 0, 255]);
        // rebinarize at any threshold in (0,1)
        for th in [0.1, 0.5, 0.9] {
            let again = crate::segment::binarize(&gray, th);
            assert_eq!(again.data(), bin.data());
        }
    }

    #[test]
    fn save_binary_renders_255() {
        let dir = std::env::temp_dir().join("histoseg_fg255");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("fg.pgm");
        let bin = BinaryImage::new(1, 2, vec![0, 1]).unwrap();
        save_binary(&bin, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n1 2\n255\n"));
        assert_eq!(&bytes[bytes.len() - 2..], &[0u8, 255]);

        let all_ones = BinaryImage::new(3, 1, vec![1, 1, 1]).unwrap();
        save_binary(&all_ones, &path).unwrap();
        let gray = load_gray(&path).unwrap();
        assert!(gray.data().iter().all(|&v| v == 255));
    }

    #[test]
    fn luma_weights() {
        // white stays white, gray pixels are fixed points
        assert_eq!(luma_bt601(255, 255, 255), 255);
        for v in 0..=255u16 {
            let v = v as u8;
            assert_eq!(luma_bt601(v, v, v), v);
        }
        // hand oracle: 0.299*100 + 0.587*50 + 0.114*200 = 29.9 + 29.35 + 22.8 = 82.05
        assert_eq!(luma_bt601(100, 50, 200), 82);
    }

    #[test]
    fn distinct_errors() {
        let missing = load_gray(Path::new("/nonexistent/x.pgm"));
        assert!(matches!(missing, Err(ImageIoError::NotFound(_))));

        let dir = std::env::temp_dir().join("histoseg_err");
        fs::create_dir_all(&dir).unwrap();

        let bad = dir.join("bad.pgm");
        fs::write(&bad, "P2\n2 nope\n").unwrap();
        assert!(matches!(load_gray(&bad), Err(ImageIoError::MalformedHeader(_))));

        let deep = dir.join("deep.pgm");
        fs::write(&deep, "P2\n1 1\n65535\n1234\n").unwrap();
        assert!(matches!(load_gray(&deep), Err(ImageIoError::UnsupportedBitDepth(_))));

        let trunc = dir.join("trunc.pgm");
        fs::write(&trunc, "P5\n4 4\n255\n\x01\x02").unwrap();
        assert!(matches!(load_gray(&trunc), Err(ImageIoError::TruncatedData { .. })));
    }

    #[test]
    fn p2_rejects_sample_above_maxval() {
        let dir = std::env::temp_dir().join("histoseg_maxval");
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("over.pgm");
        fs::write(&p, "P2\n2 1\n100\n50 101\n").unwrap();
        assert!(matches!(
            load_gray(&p),
            Err(ImageIoError::SampleOutOfRange { value: 101, maxval: 100 })
        ));

        // values at or below a reduced maxval are read verbatim, no rescale
        let ok = dir.join("ok.pgm");
        fs::write(&ok, "P2\n2 1\n100\n50 100\n").unwrap();
        assert_eq!(load_gray(&ok).unwrap().data(), &[50, 100]);
    }

    #[test]
    fn oversized_header_rejected_without_reading_data() {
        let dir = std::env::temp_dir().join("histoseg_huge");
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("huge.pgm");
        fs::write(&p, "P5\n10000 10000\n255\n").unwrap();
        assert!(matches!(load_gray(&p), Err(ImageIoError::TooLarge(100_000_000))));
    }

    #[test]
    fn png_gray_and_rgb_decode() {
        let dir = std::env::temp_dir().join("histoseg_png");
        fs::create_dir_all(&dir).unwrap();

        let gray_path = dir.join("g.png");
        let gray = image::GrayImage::from_raw(2, 2, vec![0, 10, 20, 255]).unwrap();
        gray.save_with_format(&gray_path, image::ImageFormat::Png).unwrap();
        assert_eq!(load_gray(&gray_path).unwrap().data(), &[0, 10, 20, 255]);

        let rgb_path = dir.join("c.png");
        let mut rgb = image::RgbImage::new(2, 1);
        rgb.put_pixel(0, 0, image::Rgb([255, 255, 255]));
        rgb.put_pixel(1, 0, image::Rgb([100, 50, 200]));
        rgb.save_with_format(&rgb_path, image::ImageFormat::Png).unwrap();
        assert_eq!(load_gray(&rgb_path).unwrap().data(), &[255, 82]);
    }

    #[test]
    fn png_16bit_rejected() {
        let dir = std::env::temp_dir().join("histoseg_png16");
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("deep.png");
        let deep = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::from_raw(
            2,
            1,
            vec![0, 65535],
        )
        .unwrap();
        deep.save_with_format(&p, image::ImageFormat::Png).unwrap();
        assert!(matches!(
            load_gray(&p),
            Err(ImageIoError::UnsupportedBitDepth(_))
        ));
    }

    #[test]
    fn binary_labels_validated() {
        assert!(matches!(
            BinaryImage::new(2, 1, vec![0, 2]),
            Err(ImageIoError::InvalidLabel(2))
        ));
    }
}
