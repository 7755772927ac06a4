//! Reassignment rule and the synchrosqueezing transform.
//!
//! The reassignment operator is kept complex: O(l,k) = η_k + i·r/(2π) where
//! r = V^(𝐃𝐡)/V^(𝐡), so Re O = η_k − Im(r)/(2π) is the frequency estimate
//! and the squeeze kernel g_α(z) = exp(−|z|²/α)/√(πα) acts on the complex
//! difference ξ − O. Collapsing to the real part is available as a flag.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FreqGrid;
use crate::par::map_indexed;
use crate::tfr::{Tfr, TfrKind};

/// Entries with squared kernel argument beyond this multiple of α are
/// dropped: exp(−60) ≈ 9e−27 relative to the kernel peak, far below every
/// tolerance in the crate, and the truncation rule is a deterministic
/// function of the inputs.
const KERNEL_CUTOFF: f64 = 60.0;

/// Default magnitude threshold ν below which a cell's reassignment is
/// suppressed.
pub const DEFAULT_NU: f64 = 1e-6;

/// Reassigned-frequency map with suppression mask.
#[derive(Debug, Clone)]
pub struct ReassignMap {
    omega: Vec<Complex64>,
    suppressed: Vec<bool>,
    pub nu: f64,
    pub time_axis: Vec<f64>,
    pub freq_axis: FreqGrid,
}

impl ReassignMap {
    pub fn n_times(&self) -> usize {
        self.time_axis.len()
    }

    pub fn n_freqs(&self) -> usize {
        self.freq_axis.len()
    }

    pub fn is_suppressed(&self, l: usize, k: usize) -> bool {
        self.suppressed[l * self.n_freqs() + k]
    }

    /// The reassigned frequency (real part of the complex operator), or
    /// None where suppressed.
    pub fn omega_hz(&self, l: usize, k: usize) -> Option<f64> {
        if self.is_suppressed(l, k) {
            None
        } else {
            Some(self.omega[l * self.n_freqs() + k].re)
        }
    }

    /// The full complex operator value, or None where suppressed.
    pub fn omega_complex(&self, l: usize, k: usize) -> Option<Complex64> {
        if self.is_suppressed(l, k) {
            None
        } else {
            Some(self.omega[l * self.n_freqs() + k])
        }
    }
}

/// Synchrosqueezing parameters.
#[derive(Debug, Clone)]
pub struct SstParams {
    /// Squeeze kernel variance parameter; default (4·out-grid spacing)²,
    /// overridden by (Δ_r/C_α)² when a reconstruction band is chosen.
    pub alpha: f64,
    pub nu: f64,
    pub out_grid: FreqGrid,
    /// Collapse the reassignment operator to its real part instead of
    /// evaluating the kernel on the complex difference.
    pub real_part_only: bool,
}

impl SstParams {
    /// Defaults for a given output grid: α = (4·spacing)², ν = 1e−6,
    /// complex-argument kernel.
    pub fn for_grid(out_grid: FreqGrid) -> Self {
        let spacing = out_grid.bin_width_hz;
        SstParams {
            alpha: (4.0 * spacing) * (4.0 * spacing),
            nu: DEFAULT_NU,
            out_grid,
            real_part_only: false,
        }
    }

    /// The Δ_r-coupled kernel width α = (Δ_r/C_α)², C_α > 1.
    pub fn with_band(mut self, delta_r_hz: f64, c_alpha: f64) -> Self {
        self.alpha = (delta_r_hz / c_alpha) * (delta_r_hz / c_alpha);
        self
    }
}

fn axes_match(a_t: &[f64], a_f: &FreqGrid, b_t: &[f64], b_f: &FreqGrid) -> bool {
    a_t == b_t && a_f.freqs_hz == b_f.freqs_hz
}

/// Computes the reassignment map O(l,k) from the window STFT and the
/// derivative-window STFT; cells with |v_h| ≤ ν are suppressed.
pub fn reassign(v_h: &Tfr, v_dh: &Tfr, nu: f64) -> Result<ReassignMap> {
    if v_h.kind != TfrKind::Stft || v_dh.kind != TfrKind::StftDeriv {
        return Err(Error::AxisMismatch(format!(
            "need kinds Stft/StftDeriv, got {:?}/{:?}",
            v_h.kind, v_dh.kind
        )));
    }
    if !axes_match(&v_h.time_axis, &v_h.freq_axis, &v_dh.time_axis, &v_dh.freq_axis) {
        return Err(Error::AxisMismatch(
            "reassign: v_h and v_dh axes differ".into(),
        ));
    }
    let d = v_h.n_freqs();
    let n = v_h.n_times();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut omega = Vec::with_capacity(n * d);
    let mut suppressed = Vec::with_capacity(n * d);
    for l in 0..n {
        for k in 0..d {
            let vh = v_h.at(l, k);
            if vh.norm() <= nu {
                omega.push(Complex64::ZERO);
                suppressed.push(true);
            } else {
                let ratio = v_dh.at(l, k) / vh;
                // O = η + i·ratio/(2π): Re O = η − Im(ratio)/(2π)
                omega.push(Complex64::new(
                    v_h.freq_axis.freqs_hz[k] - ratio.im / two_pi,
                    ratio.re / two_pi,
                ));
                suppressed.push(false);
            }
        }
    }
    Ok(ReassignMap {
        omega,
        suppressed,
        nu,
        time_axis: v_h.time_axis.clone(),
        freq_axis: v_h.freq_axis.clone(),
    })
}

fn squeeze_rows(
    v_h: &Tfr,
    map: &ReassignMap,
    p: &SstParams,
    rows: &[usize],
) -> Vec<Complex64> {
    let d = v_h.n_freqs();
    let d_out = p.out_grid.len();
    let alpha = p.alpha;
    let prefactor =
        v_h.freq_axis.c_max_hz / d as f64 / (std::f64::consts::PI * alpha).sqrt();
    let out = map_indexed(rows.len(), |ri| {
        let l = rows[ri];
        let row = v_h.row(l);
        // per-row: damped coefficients and reassigned frequencies
        let mut w = Vec::with_capacity(d);
        let mut reo = Vec::with_capacity(d);
        for k in 0..d {
            if map.is_suppressed(l, k) {
                w.push(Complex64::ZERO);
                reo.push(f64::NAN);
                continue;
            }
            let om = map.omega[l * d + k];
            let damp = if p.real_part_only {
                1.0
            } else {
                let im2 = om.im * om.im;
                if im2 > KERNEL_CUTOFF * alpha {
                    0.0
                } else {
                    (-im2 / alpha).exp()
                }
            };
            if damp == 0.0 {
                w.push(Complex64::ZERO);
                reo.push(f64::NAN);
            } else {
                w.push(row[k] * damp);
                reo.push(om.re);
            }
        }
        let mut out_row = Vec::with_capacity(d_out);
        for &xi in &p.out_grid.freqs_hz {
            let mut acc = Complex64::ZERO;
            for k in 0..d {
                let r = reo[k];
                if r.is_nan() {
                    continue;
                }
                let dz = xi - r;
                let z2 = dz * dz;
                if z2 > KERNEL_CUTOFF * alpha {
                    continue;
                }
                let g = (-z2 / alpha).exp();
                acc.re += w[k].re * g;
                acc.im += w[k].im * g;
            }
            out_row.push(acc * prefactor);
        }
        out_row
    });
    let mut values = Vec::with_capacity(rows.len() * d_out);
    for r in out {
        values.extend_from_slice(&r);
    }
    values
}

/// The synchrosqueezing transform of `v_h` under the reassignment map.
pub fn synchrosqueeze(v_h: &Tfr, map: &ReassignMap, p: &SstParams) -> Result<Tfr> {
    if !axes_match(&v_h.time_axis, &v_h.freq_axis, &map.time_axis, &map.freq_axis) {
        return Err(Error::AxisMismatch(
            "synchrosqueeze: v_h and map axes differ".into(),
        ));
    }
    if p.out_grid.is_empty() {
        return Err(Error::EmptyOutGrid);
    }
    let rows: Vec<usize> = (0..v_h.n_times()).collect();
    let values = squeeze_rows(v_h, map, p, &rows);
    Tfr::new(values, v_h.time_axis.clone(), p.out_grid.clone(), TfrKind::Sst)
}
