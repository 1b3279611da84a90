//! Image and label-map buffers plus PNG I/O. Color channels live in `[0,1]`;
//! label maps are palette indices, stored as indexed single-channel PNGs.

use crate::error::{Error, Result};
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

/// An RGB image with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

impl RgbImage {
    pub fn filled(width: usize, height: usize, color: [f64; 3]) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch("pixel count".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_pixels(&self) -> usize {
        self.pixels.len()
    }

    pub fn pixel(&self, i: usize) -> [f64; 3] {
        self.pixels[i]
    }

    pub fn set_pixel(&mut self, i: usize, value: [f64; 3]) {
        self.pixels[i] = value;
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    /// Squared color difference `‖x_i − x_j‖²`.
    pub fn sq_diff(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.pixels[i], self.pixels[j]);
        let mut s = 0.0;
        for ch in 0..3 {
            let d = a[ch] - b[ch];
            s += d * d;
        }
        s
    }
}

/// A per-pixel index field: used both for semantic labels and for the latent
/// color numbers of the generative model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u8>,
}

impl LabelMap {
    pub fn filled(width: usize, height: usize, label: u8) -> Self {
        Self {
            width,
            height,
            labels: vec![label; width * height],
        }
    }

    pub fn from_labels(width: usize, height: usize, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch("label count".into()));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn set(&mut self, i: usize, label: u8) {
        self.labels[i] = label;
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn max_label(&self) -> u8 {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// Fraction of pixels where the two maps disagree.
    pub fn hamming_error(&self, other: &LabelMap) -> f64 {
        assert_eq!(self.labels.len(), other.labels.len());
        let wrong = self
            .labels
            .iter()
            .zip(&other.labels)
            .filter(|(a, b)| a != b)
            .count();
        wrong as f64 / self.labels.len() as f64
    }
}

/// Display palette for label maps (cycled past 16 classes).
pub const LABEL_PALETTE: [[u8; 3]; 16] = [
    [68, 114, 196],
    [237, 125, 49],
    [112, 173, 71],
    [255, 192, 0],
    [91, 155, 213],
    [165, 165, 165],
    [38, 68, 120],
    [158, 72, 14],
    [99, 99, 99],
    [67, 104, 43],
    [153, 115, 0],
    [37, 94, 145],
    [255, 105, 180],
    [0, 176, 180],
    [120, 0, 120],
    [0, 0, 0],
];

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn save_rgb(path: &Path, img: &RgbImage) -> Result<()> {
    let file = File::create(path)?;
    let mut encoder = png::Encoder::new(
        BufWriter::new(file),
        img.width() as u32,
        img.height() as u32,
    );
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::Format(e.to_string()))?;
    let mut data = Vec::with_capacity(img.num_pixels() * 3);
    for px in img.pixels() {
        data.extend_from_slice(&[to_byte(px[0]), to_byte(px[1]), to_byte(px[2])]);
    }
    writer
        .write_image_data(&data)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

pub fn load_rgb(path: &Path) -> Result<RgbImage> {
    let decoder = png::Decoder::new(std::io::BufReader::new(File::open(path)?));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Format(e.to_string()))?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Format(e.to_string()))?;
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = match info.color_type {
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Grayscale => 1,
        other => {
            return Err(Error::Format(format!(
                "unsupported color type {other:?} for an RGB image"
            )))
        }
    };
    let mut pixels = Vec::with_capacity(w * h);
    for i in 0..w * h {
        let base = i * channels;
        let px = match channels {
            1 => {
                let g = buf[base] as f64 / 255.0;
                [g, g, g]
            }
            _ => [
                buf[base] as f64 / 255.0,
                buf[base + 1] as f64 / 255.0,
                buf[base + 2] as f64 / 255.0,
            ],
        };
        pixels.push(px);
    }
    RgbImage::from_pixels(w, h, pixels)
}

/// Writes a label map as an indexed single-channel PNG with a display palette.
pub fn save_label_map(path: &Path, map: &LabelMap) -> Result<()> {
    let file = File::create(path)?;
    let mut encoder = png::Encoder::new(
        BufWriter::new(file),
        map.width() as u32,
        map.height() as u32,
    );
    encoder.set_color(png::ColorType::Indexed);
    encoder.set_depth(png::BitDepth::Eight);
    let classes = map.max_label() as usize + 1;
    let mut palette = Vec::with_capacity(classes * 3);
    for i in 0..classes.max(1) {
        palette.extend_from_slice(&LABEL_PALETTE[i % LABEL_PALETTE.len()]);
    }
    encoder.set_palette(palette);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::Format(e.to_string()))?;
    writer
        .write_image_data(map.labels())
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

pub fn load_label_map(path: &Path) -> Result<LabelMap> {
    let decoder = png::Decoder::new(std::io::BufReader::new(File::open(path)?));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Format(e.to_string()))?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Format(e.to_string()))?;
    let (w, h) = (info.width as usize, info.height as usize);
    match info.color_type {
        png::ColorType::Indexed | png::ColorType::Grayscale => {}
        other => {
            return Err(Error::Format(format!(
                "label maps must be indexed or grayscale, got {other:?}"
            )))
        }
    }
    buf.truncate(w * h);
    LabelMap::from_labels(w, h, buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rgb_round_trip() {
        let dir = std::env::temp_dir().join("implicit_models_img_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rt.png");
        let mut img = RgbImage::filled(7, 5, [0.0; 3]);
        for i in 0..img.num_pixels() {
            let v = i as f64 / 34.0;
            img.set_pixel(i, [v, 1.0 - v, 0.5]);
        }
        save_rgb(&path, &img).unwrap();
        let back = load_rgb(&path).unwrap();
        assert_eq!(back.width(), 7);
        assert_eq!(back.height(), 5);
        for i in 0..img.num_pixels() {
            for ch in 0..3 {
                // 8-bit quantization error only.
                assert!((back.pixel(i)[ch] - img.pixel(i)[ch]).abs() <= 0.5 / 255.0 + 1e-9);
            }
        }
    }

    #[test]
    fn label_map_round_trip_exact() {
        let dir = std::env::temp_dir().join("implicit_models_img_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("labels.png");
        let labels: Vec<u8> = (0..24).map(|i| (i % 3) as u8).collect();
        let map = LabelMap::from_labels(6, 4, labels).unwrap();
        save_label_map(&path, &map).unwrap();
        let back = load_label_map(&path).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn hamming_error_counts_disagreements() {
        let a = LabelMap::from_labels(2, 2, vec![0, 1, 2, 0]).unwrap();
        let b = LabelMap::from_labels(2, 2, vec![0, 1, 0, 1]).unwrap();
        assert!((a.hamming_error(&b) - 0.5).abs() < 1e-15);
        assert_eq!(a.hamming_error(&a), 0.0);
    }
}
