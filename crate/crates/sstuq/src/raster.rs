//! Grayscale rasterization of transform magnitudes.
//!
//! The colormap is fixed so images are comparable across runs: pixel
//! value = round(255 * map(|V|) / map(max |V|)), where `map` is identity
//! (linear) or log1p. Black is zero magnitude, white is the surface
//! maximum; an all-zero surface renders all black. Columns are time
//! (left to right), rows are frequency with the lowest bin at the bottom
//! row, matching the usual spectrogram orientation.

use crate::recon::Ridge;
use crate::tfr::Tfr;

/// Magnitude-to-intensity map for rasters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterMap {
    /// Intensity proportional to |V|.
    Linear,
    /// Intensity proportional to log(1 + |V|); compresses dynamic range.
    Log1p,
}

/// A width x height 8-bit grayscale image, row-major from the top row.
#[derive(Debug, Clone)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Rasterizes any non-negative time x frequency surface stored row-major
/// by time (`values[l * n_freqs + k]`).
pub fn surface_raster(values: &[f64], n_times: usize, n_freqs: usize, map: RasterMap) -> GrayImage {
    assert_eq!(values.len(), n_times * n_freqs, "surface shape mismatch");
    let scaled: Vec<f64> = match map {
        RasterMap::Linear => values.to_vec(),
        RasterMap::Log1p => values.iter().map(|&v| v.ln_1p()).collect(),
    };
    let max = scaled.iter().cloned().fold(0.0f64, f64::max);
    let mut pixels = vec![0u8; n_times * n_freqs];
    if max > 0.0 {
        for l in 0..n_times {
            for k in 0..n_freqs {
                let row = n_freqs - 1 - k;
                let v = scaled[l * n_freqs + k] / max;
                pixels[row * n_times + l] = (v * 255.0).round() as u8;
            }
        }
    }
    GrayImage {
        width: n_times,
        height: n_freqs,
        pixels,
    }
}

/// Rasterizes the magnitude surface of a transform.
pub fn magnitude_raster(t: &Tfr, map: RasterMap) -> GrayImage {
    surface_raster(&t.magnitudes(), t.n_times(), t.n_freqs(), map)
}

/// Overlays a ridge path as white pixels, one per column at the ridge's
/// grid bin. The image must have been rasterized from a transform with
/// the same time and frequency dimensions.
pub fn overlay_ridge(img: &mut GrayImage, ridge: &Ridge) {
    for (l, &bin) in ridge.bins.iter().enumerate() {
        if l < img.width && bin < img.height {
            let row = img.height - 1 - bin;
            img.pixels[row * img.width + l] = 255;
        }
    }
}
