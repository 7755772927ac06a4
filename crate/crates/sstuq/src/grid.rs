use crate::error::{Error, Result};

/// A strictly increasing grid of positive analysis frequencies.
///
/// Uniform grids place bin k at (k+1)·C/d, excluding DC: synchrosqueezing
/// reconstructs from positive frequencies only, so the grid starts one bin
/// above zero and ends exactly at the ceiling C.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqGrid {
    pub freqs_hz: Vec<f64>,
    pub c_max_hz: f64,
    pub bin_width_hz: f64,
}

impl FreqGrid {
    pub fn len(&self) -> usize {
        self.freqs_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs_hz.is_empty()
    }

    /// Index of the grid frequency nearest to `f_hz`.
    pub fn nearest_bin(&self, f_hz: f64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (k, &g) in self.freqs_hz.iter().enumerate() {
            let d = (g - f_hz).abs();
            if d < dist {
                dist = d;
                best = k;
            }
        }
        best
    }
}

/// Builds the uniform grid with freqs_hz[k] = (k+1)·c_max_hz/d, k = 0..d−1.
pub fn uniform_grid(c_max_hz: f64, d: usize) -> Result<FreqGrid> {
    if !(c_max_hz > 0.0) || !c_max_hz.is_finite() || d < 1 {
        return Err(Error::InvalidGridParams {
            c_max_hz,
            bins: d,
        });
    }
    let freqs_hz = (0..d)
        .map(|k| (k + 1) as f64 * c_max_hz / d as f64)
        .collect();
    Ok(FreqGrid {
        freqs_hz,
        c_max_hz,
        bin_width_hz: c_max_hz / d as f64,
    })
}
