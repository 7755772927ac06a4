//! Ridge extraction and SST-based component reconstruction.
//!
//! The ridge is the exact maximizer of a penalized path objective over the
//! time-frequency lattice, found by dynamic programming with a per-step
//! jump cap. Reconstruction integrates the squeezed transform over a band
//! around the ridge and reads out instantaneous amplitude and unwrapped
//! phase.

use num_complex::Complex64;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::par::try_map_indexed;
use crate::stats;
use crate::tfr::{Tfr, TfrKind};
use crate::window::WindowPair;

/// Largest allowed per-step ridge movement, in bins.
pub const DEFAULT_JUMP_CAP_BINS: usize = 2;

/// Amplitude below which the unwrapped phase is carried forward unchanged
/// instead of being read from a numerically meaningless argument.
pub const AMP_FLOOR: f64 = 1e-8;

/// A single extracted ridge: an instantaneous-frequency path with its
/// reconstruction band halfwidth and the |S| profile along the path.
#[derive(Debug, Clone)]
pub struct Ridge {
    /// Estimated instantaneous frequency per time index, in Hz.
    pub if_hz: Vec<f64>,
    /// Reconstruction band halfwidth Δ_r, in Hz.
    pub band_halfwidth_hz: f64,
    /// |S| along the ridge path.
    pub quality: Vec<f64>,
    /// Grid bin index of the path at each time step.
    pub bins: Vec<usize>,
}

/// Reconstructed oscillatory component.
#[derive(Debug, Clone)]
pub struct ComponentEstimate {
    /// Complex component estimate per time index.
    pub complex_f: Vec<Complex64>,
    /// Instantaneous amplitude |complex_f|.
    pub amplitude: Vec<f64>,
    /// Unwrapped phase in cycles; increments mapped to (−0.5, 0.5].
    pub phase_cycles: Vec<f64>,
    /// Time indices unaffected by window boundary truncation (0-based,
    /// half-open): m..n−m, empty when the series is shorter than 2m.
    pub valid_range: Range<usize>,
    /// Time stamps copied from the transform.
    pub time_axis: Vec<f64>,
}

/// Extracts the ridge maximizing Σ_l |s(l,k_l)| − λ·Σ_l (η_{k_l} − η_{k_{l−1}})²
/// with the default per-step jump cap of 2 bins.
pub fn extract_ridge(s: &Tfr, lambda_pen: f64, delta_r_hz: f64) -> Result<Ridge> {
    extract_ridge_with(s, lambda_pen, delta_r_hz, DEFAULT_JUMP_CAP_BINS)
}

/// As [`extract_ridge`] with an explicit jump cap. The dynamic program is
/// exact over the set of paths whose per-step movement stays within the
/// cap; ties resolve to the lowest bin index.
pub fn extract_ridge_with(
    s: &Tfr,
    lambda_pen: f64,
    delta_r_hz: f64,
    jump_cap_bins: usize,
) -> Result<Ridge> {
    if s.kind != TfrKind::Sst && s.kind != TfrKind::Stft {
        return Err(Error::AxisMismatch(format!(
            "extract_ridge: need kind Sst or Stft, got {:?}",
            s.kind
        )));
    }
    let n = s.n_times();
    let d = s.n_freqs();
    if n == 0 || d == 0 {
        return Err(Error::EmptyTfr);
    }
    let freqs = &s.freq_axis.freqs_hz;
    let cap = jump_cap_bins.max(1);

    // forward pass over |s|, Viterbi scores plus backpointers
    let mut prev: Vec<f64> = (0..d).map(|k| s.at(0, k).norm()).collect();
    let mut back = vec![0u32; n * d];
    let mut cur = vec![0.0f64; d];
    for l in 1..n {
        for k in 0..d {
            let lo = k.saturating_sub(cap);
            let hi = (k + cap).min(d - 1);
            let mut best = f64::NEG_INFINITY;
            let mut arg = lo;
            for k2 in lo..=hi {
                let step = freqs[k] - freqs[k2];
                let cand = prev[k2] - lambda_pen * step * step;
                if cand > best {
                    best = cand;
                    arg = k2;
                }
            }
            cur[k] = s.at(l, k).norm() + best;
            back[l * d + k] = arg as u32;
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    let mut end = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (k, &v) in prev.iter().enumerate() {
        if v > best {
            best = v;
            end = k;
        }
    }
    let mut bins = vec![0usize; n];
    bins[n - 1] = end;
    for l in (1..n).rev() {
        bins[l - 1] = back[l * d + bins[l]] as usize;
    }
    let if_hz: Vec<f64> = bins.iter().map(|&k| freqs[k]).collect();
    let quality: Vec<f64> = bins
        .iter()
        .enumerate()
        .map(|(l, &k)| s.at(l, k).norm())
        .collect();
    Ok(Ridge {
        if_hz,
        band_halfwidth_hz: delta_r_hz,
        quality,
        bins,
    })
}

/// Integrates the squeezed transform over the ridge band and reads out the
/// component.
///
/// For each time index the band is the grid bins within Δ_r of if_hz[l],
/// intersected with the grid (bands reaching past either grid edge are
/// truncated); an empty intersection is reported as [`Error::EmptyBand`].
/// The band sum carries the real-signal convention factor 2: for a real
/// component A·cos(2πφ) the positive-frequency half holds half the
/// amplitude, and doubling returns the estimate to the A·e^{i2πφ} scale.
pub fn reconstruct(s: &Tfr, ridge: &Ridge, win: &WindowPair) -> Result<ComponentEstimate> {
    if s.kind != TfrKind::Sst {
        return Err(Error::AxisMismatch(format!(
            "reconstruct: need kind Sst, got {:?}",
            s.kind
        )));
    }
    let n = s.n_times();
    if ridge.if_hz.len() != n {
        return Err(Error::AxisMismatch(format!(
            "reconstruct: ridge length {} vs {} time steps",
            ridge.if_hz.len(),
            n
        )));
    }
    let d = s.n_freqs();
    let freqs = s.freq_axis.freqs_hz.clone();
    let factor = 2.0 * s.freq_axis.c_max_hz / d as f64 / win.h_at_zero;
    let dr = ridge.band_halfwidth_hz;
    let complex_f = try_map_indexed(n, |l| {
        let center = ridge.if_hz[l];
        let mut acc = Complex64::ZERO;
        let mut hit = false;
        for (k, &f) in freqs.iter().enumerate() {
            if (f - center).abs() <= dr {
                acc += s.at(l, k);
                hit = true;
            }
        }
        if hit {
            Ok(acc * factor)
        } else {
            Err(Error::EmptyBand { index: l })
        }
    })?;
    let amplitude: Vec<f64> = complex_f.iter().map(|z| z.norm()).collect();

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut phase_cycles = vec![0.0f64; n];
    let mut have_prev = false;
    let mut prev_raw = 0.0f64;
    let mut acc_phase = 0.0f64;
    for l in 0..n {
        if amplitude[l] > AMP_FLOOR {
            let raw = complex_f[l].arg() / two_pi;
            if have_prev {
                let diff = raw - prev_raw;
                acc_phase += diff - (diff - 0.5).ceil();
            } else {
                acc_phase = raw;
                have_prev = true;
            }
            prev_raw = raw;
            phase_cycles[l] = acc_phase;
        } else {
            phase_cycles[l] = if l > 0 { phase_cycles[l - 1] } else { 0.0 };
        }
    }

    let m = win.m;
    let valid_range = m..n.saturating_sub(m).max(m).min(n);
    Ok(ComponentEstimate {
        complex_f,
        amplitude,
        phase_cycles,
        valid_range,
        time_axis: s.time_axis.clone(),
    })
}

/// Data-driven noise-floor proxy for the suppression threshold ν: the
/// empirical `quantile` of |v_h| pooled over bins whose frequency is more
/// than one window spectral halfwidth away from the per-row magnitude
/// argmax (a putative ridge). Falls back to pooling every cell when the
/// exclusion empties the pool.
pub fn data_driven_nu(v_h: &Tfr, win: &WindowPair, quantile: f64) -> f64 {
    assert!(
        quantile > 0.0 && quantile < 1.0,
        "quantile must lie in (0, 1)"
    );
    let n = v_h.n_times();
    let d = v_h.n_freqs();
    let t = &v_h.time_axis;
    let rate_hz = if n >= 2 {
        (n - 1) as f64 / (t[n - 1] - t[0])
    } else {
        2.0 * v_h.freq_axis.c_max_hz
    };
    let halfwidth = win.spectral_halfwidth(rate_hz);
    let freqs = &v_h.freq_axis.freqs_hz;
    let mut pool = Vec::with_capacity(n * d);
    for l in 0..n {
        let row = v_h.row(l);
        let mut kmax = 0usize;
        let mut vmax = f64::NEG_INFINITY;
        for (k, z) in row.iter().enumerate() {
            let m = z.norm();
            if m > vmax {
                vmax = m;
                kmax = k;
            }
        }
        let center = freqs[kmax];
        for (k, z) in row.iter().enumerate() {
            if (freqs[k] - center).abs() > halfwidth {
                pool.push(z.norm());
            }
        }
    }
    if pool.is_empty() {
        pool = v_h.magnitudes();
    }
    stats::quantile(&pool, quantile)
}
