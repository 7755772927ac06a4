//! Bootstrap percentile bands and noise thresholds for the |SST| surface.
//!
//! Replicate surfaces are evaluated only at a coarse grid of (time,
//! frequency) nodes, reduced to per-node percentile values, and lifted to
//! the full grid with tensor-product natural cubic splines. Replicates run
//! in parallel; the per-node reduction sorts once at the end, so thread
//! scheduling cannot change any result.

use crate::error::{Error, Result};
use crate::grid::FreqGrid;
use crate::par::try_map_indexed;
use crate::series::TimeSeries;
use crate::spline::tensor_lift;
use crate::sst::{reassign, synchrosqueeze, SstParams};
use crate::stft::stft_at_rows;
use crate::tfr::{Tfr, TfrKind};
use crate::tvar::{replicate_seed, sample_bootstrap, TvarModel};
use crate::window::WindowPair;

/// Coarse evaluation grid and band parameters.
#[derive(Debug, Clone)]
pub struct BandSpec {
    /// Sorted, strictly increasing time indices of the coarse grid.
    pub grid_times: Vec<usize>,
    /// Sorted, strictly increasing frequency bin indices of the coarse grid.
    pub grid_freq_idx: Vec<usize>,
    /// Two-sided band level α; the band spans the α/2 and 1−α/2 percentiles.
    pub alpha_level: f64,
    /// Number of bootstrap replicates M.
    pub n_boot: usize,
}

/// Percentile band surfaces on the full grid.
#[derive(Debug, Clone)]
pub struct Bands {
    /// Lower percentile surface, row-major time × frequency.
    pub lower: Vec<f64>,
    /// Upper percentile surface, row-major time × frequency.
    pub upper: Vec<f64>,
    pub time_axis: Vec<f64>,
    pub freq_axis: FreqGrid,
}

/// Noise threshold surface on the full grid.
#[derive(Debug, Clone)]
pub struct ThresholdSurface {
    /// Row-major time × frequency threshold values.
    pub values: Vec<f64>,
    pub time_axis: Vec<f64>,
    pub freq_axis: FreqGrid,
}

/// Everything the band machinery needs to rerun the transform exactly as
/// the analysis run did.
#[derive(Debug, Clone)]
pub struct PipelineCfg {
    pub win: WindowPair,
    /// Analysis grid; also the full output grid for lifted surfaces.
    pub grid: FreqGrid,
    /// Squeeze kernel parameter α.
    pub sst_alpha: f64,
    /// Suppression threshold ν.
    pub nu: f64,
    /// Collapse the reassignment operator to its real part.
    pub real_part_only: bool,
}

/// |SST| of one series evaluated at the coarse cells only: full-grid STFT
/// and reassignment at the selected rows, squeezed onto the selected
/// output bins. Returns row-major rows × bins magnitudes.
pub fn sst_mag_at_cells(
    x: &TimeSeries,
    cfg: &PipelineCfg,
    rows: &[usize],
    freq_idx: &[usize],
) -> Result<Vec<f64>> {
    let v_h = stft_at_rows(x, &cfg.win, &cfg.grid, false, rows)?;
    let v_dh = stft_at_rows(x, &cfg.win, &cfg.grid, true, rows)?;
    let map = reassign(&v_h, &v_dh, cfg.nu)?;
    let out_grid = FreqGrid {
        freqs_hz: freq_idx.iter().map(|&k| cfg.grid.freqs_hz[k]).collect(),
        c_max_hz: cfg.grid.c_max_hz,
        bin_width_hz: cfg.grid.bin_width_hz,
    };
    let p = SstParams {
        alpha: cfg.sst_alpha,
        nu: cfg.nu,
        out_grid,
        real_part_only: cfg.real_part_only,
    };
    let s = synchrosqueeze(&v_h, &map, &p)?;
    Ok(s.magnitudes())
}

/// Linear-interpolated order statistic at the Weibull plotting position
/// q·(M+1): for a two-sided band this keeps the finite-M coverage close to
/// nominal, where interpolating at q·(M−1) systematically undercovers.
fn band_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let pos = q * (n + 1) as f64 - 1.0;
    if pos <= 0.0 {
        return sorted[0];
    }
    if pos >= (n - 1) as f64 {
        return sorted[n - 1];
    }
    let lo = pos.floor() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[lo + 1] * w
}

fn validate_spec(spec: &BandSpec, n: usize, d: usize) -> Result<()> {
    if spec.n_boot < 40 {
        return Err(Error::MTooSmall { m: spec.n_boot });
    }
    if !(spec.alpha_level > 0.0 && spec.alpha_level < 1.0) {
        return Err(Error::GridOutsideAxes(format!(
            "alpha_level must lie in (0,1), got {}",
            spec.alpha_level
        )));
    }
    let check = |idx: &[usize], bound: usize, name: &str| -> Result<()> {
        if idx.is_empty() {
            return Err(Error::GridOutsideAxes(format!("empty {name} grid")));
        }
        for w in idx.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::GridOutsideAxes(format!(
                    "{name} grid must be strictly increasing"
                )));
            }
        }
        if *idx.last().unwrap() >= bound {
            return Err(Error::GridOutsideAxes(format!(
                "{name} index {} outside axis of length {bound}",
                idx.last().unwrap()
            )));
        }
        Ok(())
    };
    check(&spec.grid_times, n, "time")?;
    check(&spec.grid_freq_idx, d, "frequency")?;
    Ok(())
}

/// Per-coarse-node sorted replicate magnitudes: the core Monte Carlo loop
/// shared by bands and thresholds. Outer vector is node-major
/// (rows × bins), each inner vector holds the M sorted |S| values.
fn replicate_node_values(
    signal: Option<&TimeSeries>,
    model: &TvarModel,
    spec: &BandSpec,
    cfg: &PipelineCfg,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let n = model.len();
    if let Some(s) = signal {
        if s.len() != n {
            return Err(Error::DimMismatch(format!(
                "signal length {} vs model length {n}",
                s.len()
            )));
        }
    }
    let m_boot = spec.n_boot;
    let per_rep: Vec<Vec<f64>> = try_map_indexed(m_boot, |r| -> Result<Vec<f64>> {
        let noise = sample_bootstrap(model, replicate_seed(seed, r + 1))?;
        let series = match signal {
            Some(s) => {
                let sum: Vec<f64> = s
                    .samples
                    .iter()
                    .zip(&noise.samples)
                    .map(|(a, b)| a + b)
                    .collect();
                TimeSeries::new(sum, noise.rate_hz, noise.start_time_s)?
            }
            None => noise,
        };
        sst_mag_at_cells(&series, cfg, &spec.grid_times, &spec.grid_freq_idx)
    })?;
    let cells = spec.grid_times.len() * spec.grid_freq_idx.len();
    let mut nodes = vec![Vec::with_capacity(m_boot); cells];
    for rep in &per_rep {
        for (c, &v) in rep.iter().enumerate() {
            nodes[c].push(v);
        }
    }
    for node in &mut nodes {
        node.sort_by(|a, b| a.partial_cmp(b).expect("non-finite |S| value"));
    }
    Ok(nodes)
}

fn lift_surface(
    coarse: &[f64],
    spec: &BandSpec,
    model: &TvarModel,
    cfg: &PipelineCfg,
) -> Result<Vec<f64>> {
    let n = model.len();
    let time_at = |i: usize| model.start_time_s + i as f64 / model.rate_hz;
    let coarse_x: Vec<f64> = spec.grid_times.iter().map(|&i| time_at(i)).collect();
    let coarse_y: Vec<f64> = spec
        .grid_freq_idx
        .iter()
        .map(|&k| cfg.grid.freqs_hz[k])
        .collect();
    let full_x: Vec<f64> = (0..n).map(time_at).collect();
    let lifted = tensor_lift(coarse, &coarse_x, &coarse_y, &full_x, &cfg.grid.freqs_hz)?;
    Ok(lifted.into_iter().map(|v| v.max(0.0)).collect())
}

/// Bootstrap percentile bands for |SST| of signal + model noise, lifted to
/// the full grid. `signal` None means the null setting (pure noise).
/// Replicate r uses the deterministic stream seed XOR r.
pub fn bootstrap_bands(
    signal: Option<&TimeSeries>,
    model: &TvarModel,
    spec: &BandSpec,
    cfg: &PipelineCfg,
    seed: u64,
) -> Result<Bands> {
    validate_spec(spec, model.len(), cfg.grid.len())?;
    let nodes = replicate_node_values(signal, model, spec, cfg, seed)?;
    let a = spec.alpha_level;
    let lo_coarse: Vec<f64> = nodes.iter().map(|v| band_quantile(v, a / 2.0)).collect();
    let hi_coarse: Vec<f64> = nodes
        .iter()
        .map(|v| band_quantile(v, 1.0 - a / 2.0))
        .collect();
    let mut lower = lift_surface(&lo_coarse, spec, model, cfg)?;
    let upper = lift_surface(&hi_coarse, spec, model, cfg)?;
    for (l, u) in lower.iter_mut().zip(&upper) {
        if *l > *u {
            *l = *u;
        }
    }
    let n = model.len();
    let time_axis: Vec<f64> = (0..n)
        .map(|i| model.start_time_s + i as f64 / model.rate_hz)
        .collect();
    Ok(Bands {
        lower,
        upper,
        time_axis,
        freq_axis: cfg.grid.clone(),
    })
}

/// Noise-only threshold surface: the (1−α) percentile of |SST| of pure
/// bootstrap noise at each coarse node, spline-lifted and clamped at 0.
///
/// The coarse node spacing should not exceed the scale on which the
/// model's `sigma_path` varies (for a fitted model, about the local-std
/// window length); otherwise the lift aliases real time structure of the
/// threshold.
pub fn noise_threshold(
    model: &TvarModel,
    spec: &BandSpec,
    cfg: &PipelineCfg,
    seed: u64,
) -> Result<ThresholdSurface> {
    validate_spec(spec, model.len(), cfg.grid.len())?;
    let nodes = replicate_node_values(None, model, spec, cfg, seed)?;
    let t_coarse: Vec<f64> = nodes
        .iter()
        .map(|v| band_quantile(v, 1.0 - spec.alpha_level))
        .collect();
    let values = lift_surface(&t_coarse, spec, model, cfg)?;
    let n = model.len();
    let time_axis: Vec<f64> = (0..n)
        .map(|i| model.start_time_s + i as f64 / model.rate_hz)
        .collect();
    Ok(ThresholdSurface {
        values,
        time_axis,
        freq_axis: cfg.grid.clone(),
    })
}

/// Zeroes every cell whose magnitude falls below the threshold surface;
/// cells at exactly the threshold are kept.
pub fn apply_threshold(s: &Tfr, t: &[f64]) -> Result<Tfr> {
    let n = s.n_times();
    let d = s.n_freqs();
    if t.len() != n * d {
        return Err(Error::DimMismatch(format!(
            "threshold has {} values for a {n}x{d} transform",
            t.len()
        )));
    }
    let values = s
        .values()
        .iter()
        .zip(t)
        .map(|(z, &thr)| if z.norm() >= thr { *z } else { num_complex::Complex64::ZERO })
        .collect();
    Tfr::new(
        values,
        s.time_axis.clone(),
        s.freq_axis.clone(),
        TfrKind::Thresholded,
    )
}
