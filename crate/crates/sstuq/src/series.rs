use crate::error::{Error, Result};

/// A uniformly sampled real-valued series with explicit time axis origin.
///
/// Sample i sits at `start_time_s + i/rate_hz`; simulated series use a
/// sampling rate of √n with start time 1/√n.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub samples: Vec<f64>,
    pub rate_hz: f64,
    pub start_time_s: f64,
}

impl TimeSeries {
    /// Builds a series and validates every invariant.
    pub fn new(samples: Vec<f64>, rate_hz: f64, start_time_s: f64) -> Result<Self> {
        let ts = TimeSeries {
            samples,
            rate_hz,
            start_time_s,
        };
        ts.validate()?;
        Ok(ts)
    }

    /// Checks non-emptiness, finiteness of every sample, and a positive rate.
    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !(self.rate_hz > 0.0) || !self.rate_hz.is_finite() {
            return Err(Error::NonPositiveRate);
        }
        if !self.start_time_s.is_finite() {
            return Err(Error::NonFiniteSample { index: 0 });
        }
        for (index, v) in self.samples.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { index });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of the 0-based sample index i.
    pub fn time_at(&self, i: usize) -> f64 {
        self.start_time_s + i as f64 / self.rate_hz
    }

    /// The full time axis, one entry per sample.
    pub fn time_axis(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time_at(i)).collect()
    }
}

/// Validates a series against all [`TimeSeries`] invariants.
pub fn validate_series(ts: &TimeSeries) -> Result<()> {
    ts.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_series_passes() {
        let ts = TimeSeries::new(vec![1.0, 2.0], 10.0, 0.0).unwrap();
        assert_eq!(ts.len(), 2);
        assert!(validate_series(&ts).is_ok());
    }

    #[test]
    fn empty_series_rejected() {
        let err = TimeSeries::new(vec![], 10.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::EmptySeries));
    }

    #[test]
    fn nan_sample_rejected_with_index() {
        let err = TimeSeries::new(vec![1.0, f64::NAN], 10.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { index: 1 }));
    }

    #[test]
    fn nonpositive_rate_rejected() {
        let err = TimeSeries::new(vec![1.0], 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonPositiveRate));
        let err = TimeSeries::new(vec![1.0], -3.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonPositiveRate));
    }

    #[test]
    fn time_axis_strictly_increasing() {
        let ts = TimeSeries::new(vec![0.0; 16], 45.25, 0.5).unwrap();
        let t = ts.time_axis();
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert!((t[0] - 0.5).abs() < 1e-15);
    }
}
