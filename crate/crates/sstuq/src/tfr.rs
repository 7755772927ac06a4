use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FreqGrid;

/// What a time-frequency matrix holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfrKind {
    Stft,
    StftDeriv,
    Sst,
    Thresholded,
}

/// A complex time-frequency representation.
///
/// `values` is row-major with rows = time indices and columns = frequency
/// bins. The time axis is stored explicitly so trimmed or subsampled
/// outputs stay self-describing.
#[derive(Debug, Clone, PartialEq)]
pub struct Tfr {
    values: Vec<Complex64>,
    pub time_axis: Vec<f64>,
    pub freq_axis: FreqGrid,
    pub kind: TfrKind,
}

impl Tfr {
    /// Builds a Tfr, checking the dims invariant.
    pub fn new(
        values: Vec<Complex64>,
        time_axis: Vec<f64>,
        freq_axis: FreqGrid,
        kind: TfrKind,
    ) -> Result<Self> {
        if values.len() != time_axis.len() * freq_axis.len() {
            return Err(Error::DimMismatch(format!(
                "{} values for {} times x {} bins",
                values.len(),
                time_axis.len(),
                freq_axis.len()
            )));
        }
        if time_axis.is_empty() || freq_axis.is_empty() {
            return Err(Error::EmptyTfr);
        }
        Ok(Tfr {
            values,
            time_axis,
            freq_axis,
            kind,
        })
    }

    pub fn n_times(&self) -> usize {
        self.time_axis.len()
    }

    pub fn n_freqs(&self) -> usize {
        self.freq_axis.len()
    }

    pub fn at(&self, l: usize, k: usize) -> Complex64 {
        self.values[l * self.n_freqs() + k]
    }

    /// Row `l` as a slice over all frequency bins.
    pub fn row(&self, l: usize) -> &[Complex64] {
        let d = self.n_freqs();
        &self.values[l * d..(l + 1) * d]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Entry magnitudes in row-major order.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Checks finiteness of every entry (the dims invariant is enforced at
    /// construction).
    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteSample { index: i });
            }
        }
        Ok(())
    }
}
