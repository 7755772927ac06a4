//! Discretized STFT on arbitrary frequency grids.
//!
//! Frequencies are evaluated directly per column with a precomputed
//! modulated-window kernel; there is no FFT because the analysis grids
//! (k+1)·C/d need not align with FFT bins. Rows are data-parallel; the
//! summation order inside each (time, frequency) cell is fixed, so results
//! are bit-identical at any thread count.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FreqGrid;
use crate::par::map_indexed;
use crate::series::TimeSeries;
use crate::tfr::{Tfr, TfrKind};
use crate::window::WindowPair;

const ORACLE_MAX_CELLS: usize = 1_000_000;

fn check_grid(grid: &FreqGrid, rate_hz: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::GridEmpty);
    }
    let nyquist = rate_hz / 2.0;
    for &f in &grid.freqs_hz {
        if f > nyquist {
            return Err(Error::FrequencyAboveNyquist {
                freq_hz: f,
                nyquist_hz: nyquist,
            });
        }
    }
    Ok(())
}

/// Modulated window kernel: K[k][u] = w[u]·exp(−i·2π·η_k·(u−m)/rate),
/// one row per grid frequency.
fn kernel(win_vec: &[f64], m: usize, grid: &FreqGrid, rate_hz: f64) -> Vec<Vec<Complex64>> {
    grid.freqs_hz
        .iter()
        .map(|&f| {
            win_vec
                .iter()
                .enumerate()
                .map(|(u, &w)| {
                    let arg = -2.0 * std::f64::consts::PI * f * (u as f64 - m as f64) / rate_hz;
                    let (s, c) = arg.sin_cos();
                    Complex64::new(w * c, w * s)
                })
                .collect()
        })
        .collect()
}

fn stft_row(
    samples: &[f64],
    l: usize,
    m: usize,
    kern: &[Vec<Complex64>],
    inv_sqrt_rate: f64,
) -> Vec<Complex64> {
    let n = samples.len();
    let mut row = Vec::with_capacity(kern.len());
    for k in kern {
        let mut acc = Complex64::ZERO;
        for (u, &ku) in k.iter().enumerate() {
            let j = l as isize + u as isize - m as isize;
            if j >= 0 && (j as usize) < n {
                let x = samples[j as usize];
                acc.re += x * ku.re;
                acc.im += x * ku.im;
            }
        }
        row.push(acc * inv_sqrt_rate);
    }
    row
}

/// The discretized STFT at every sample index.
pub fn stft(ts: &TimeSeries, win: &WindowPair, grid: &FreqGrid, deriv: bool) -> Result<Tfr> {
    let rows: Vec<usize> = (0..ts.len()).collect();
    stft_at_rows(ts, win, grid, deriv, &rows)
}

/// The discretized STFT restricted to the given time rows (0-based sample
/// indices). Used by the bootstrap pipelines, which only need coarse rows.
pub fn stft_at_rows(
    ts: &TimeSeries,
    win: &WindowPair,
    grid: &FreqGrid,
    deriv: bool,
    rows: &[usize],
) -> Result<Tfr> {
    ts.validate()?;
    check_grid(grid, ts.rate_hz)?;
    let n = ts.len();
    for &l in rows {
        if l >= n {
            return Err(Error::AxisMismatch(format!(
                "time row {l} out of range for {n} samples"
            )));
        }
    }
    let win_vec = if deriv { &win.dh } else { &win.h };
    let kern = kernel(win_vec, win.m, grid, ts.rate_hz);
    let inv_sqrt_rate = 1.0 / ts.rate_hz.sqrt();
    let row_data = map_indexed(rows.len(), |i| {
        stft_row(&ts.samples, rows[i], win.m, &kern, inv_sqrt_rate)
    });
    let mut values = Vec::with_capacity(rows.len() * grid.len());
    for r in row_data {
        values.extend_from_slice(&r);
    }
    let time_axis = rows.iter().map(|&l| ts.time_at(l)).collect();
    Tfr::new(
        values,
        time_axis,
        grid.clone(),
        if deriv { TfrKind::StftDeriv } else { TfrKind::Stft },
    )
}

/// Brute-force STFT with compensated (Kahan) accumulation. Test oracle;
/// identical contract to [`stft`] at desk scale.
pub fn stft_oracle(ts: &TimeSeries, win: &WindowPair, grid: &FreqGrid, deriv: bool) -> Result<Tfr> {
    ts.validate()?;
    check_grid(grid, ts.rate_hz)?;
    let n = ts.len();
    let d = grid.len();
    let cells = n * d;
    if cells > ORACLE_MAX_CELLS {
        return Err(Error::OracleTooLarge {
            cells,
            max: ORACLE_MAX_CELLS,
        });
    }
    let win_vec = if deriv { &win.dh } else { &win.h };
    let m = win.m as isize;
    let inv_sqrt_rate = 1.0 / ts.rate_hz.sqrt();
    let mut values = Vec::with_capacity(cells);
    for l in 0..n as isize {
        for &f in &grid.freqs_hz {
            let (mut sre, mut sim) = (0.0f64, 0.0f64);
            let (mut cre, mut cim) = (0.0f64, 0.0f64);
            for j in l - m..=l + m {
                if j < 0 || j >= n as isize {
                    continue;
                }
                let x = ts.samples[j as usize];
                let w = win_vec[(j - l + m) as usize];
                let arg = -2.0 * std::f64::consts::PI * f * (j - l) as f64 / ts.rate_hz;
                let (s, c) = arg.sin_cos();
                // Kahan step on both components
                let yre = x * w * c - cre;
                let tre = sre + yre;
                cre = (tre - sre) - yre;
                sre = tre;
                let yim = x * w * s - cim;
                let tim = sim + yim;
                cim = (tim - sim) - yim;
                sim = tim;
            }
            values.push(Complex64::new(sre * inv_sqrt_rate, sim * inv_sqrt_rate));
        }
    }
    Tfr::new(
        values,
        ts.time_axis(),
        grid.clone(),
        if deriv { TfrKind::StftDeriv } else { TfrKind::Stft },
    )
}
