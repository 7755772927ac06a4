//! Simulation generators: a locally stationary tvAR(2) null process, a
//! smooth adaptive-harmonic test signal, and a Monte Carlo Gaussianity
//! check for STFT coefficients of simulated noise.

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::FreqGrid;
use crate::par::try_map_indexed;
use crate::series::TimeSeries;
use crate::stats;
use crate::stft::stft_at_rows;
use crate::tfr::Tfr;
use crate::window::WindowPair;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// χ²(2) critical value at level 0.01, used by the Gaussianity check.
pub const JB_CRITICAL_1PCT: f64 = 9.21034;

/// First tvAR(2) coefficient of the null process, φ₁(u) = −0.5·(0.7 + 0.3·cos 2πu).
pub fn null_phi1(u: f64) -> f64 {
    -0.5 * (0.7 + 0.3 * (2.0 * std::f64::consts::PI * u).cos())
}

/// Second tvAR(2) coefficient of the null process, φ₂(u) = 0.3·√(0.1 + u/4).
pub fn null_phi2(u: f64) -> f64 {
    0.3 * (0.1 + 0.25 * u).sqrt()
}

/// Amplitude envelope of the null process, 1 + 0.5·cos(2πu).
pub fn null_envelope(u: f64) -> f64 {
    1.0 + 0.5 * (2.0 * std::f64::consts::PI * u).cos()
}

/// Generates the null noise process: a time-varying AR(2) recursion driven
/// by i.i.d. standard normals, modulated by a smooth envelope. The series
/// is stamped with rate √n and start time 1/√n.
pub fn gen_null(n: usize, seed: u64) -> TimeSeries {
    assert!(n >= 64, "gen_null needs n >= 64");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eps = vec![0.0f64; n];
    for i0 in 0..n {
        let eta: f64 = StandardNormal.sample(&mut rng);
        let u = (i0 + 1) as f64 / n as f64;
        eps[i0] = if i0 < 2 {
            eta
        } else {
            null_phi1(u) * eps[i0 - 1] + null_phi2(u) * eps[i0 - 2] + eta
        };
    }
    let x: Vec<f64> = eps
        .iter()
        .enumerate()
        .map(|(i0, &e)| null_envelope((i0 + 1) as f64 / n as f64) * e)
        .collect();
    let rate = (n as f64).sqrt();
    TimeSeries::new(x, rate, 1.0 / rate).expect("generated series is valid")
}

/// Exact second moments of the null process: returns (var, lag1) where
/// var[i] = E[x_{i+1}²] and lag1[i] = E[x_{i+1}·x_i] (0-based storage of
/// the 1-based recursion), propagated exactly through the generating
/// recursion. Intended as a test oracle.
pub fn null_exact_moments(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 4);
    // moments of the pre-envelope recursion
    let mut v = vec![0.0f64; n]; // Var ε_i
    let mut c1 = vec![0.0f64; n]; // Cov(ε_i, ε_{i−1})
    v[0] = 1.0;
    v[1] = 1.0;
    c1[1] = 0.0;
    for i0 in 2..n {
        let u = (i0 + 1) as f64 / n as f64;
        let a = null_phi1(u);
        let b = null_phi2(u);
        c1[i0] = a * v[i0 - 1] + b * c1[i0 - 1];
        v[i0] = a * a * v[i0 - 1] + b * b * v[i0 - 2] + 2.0 * a * b * c1[i0 - 1] + 1.0;
    }
    let env = |i0: usize| null_envelope((i0 + 1) as f64 / n as f64);
    let var_x: Vec<f64> = (0..n).map(|i0| env(i0) * env(i0) * v[i0]).collect();
    let mut lag1_x = vec![0.0f64; n];
    for i0 in 1..n {
        lag1_x[i0] = env(i0) * env(i0 - 1) * c1[i0];
    }
    (var_x, lag1_x)
}

/// Ground truth for a generated adaptive-harmonic signal.
#[derive(Debug, Clone)]
pub struct AhmTruth {
    /// The signal A(t)·cos(2πφ(t)) as a time series.
    pub f: TimeSeries,
    /// Instantaneous amplitude A at each sample.
    pub am: Vec<f64>,
    /// Instantaneous frequency φ′ at each sample, in Hz.
    pub inst_freq: Vec<f64>,
    /// Phase φ at each sample, in cycles.
    pub phase: Vec<f64>,
}

/// Flat moving average with the window truncated at the boundaries.
fn moving_average(x: &[f64], support: usize) -> Vec<f64> {
    let n = x.len();
    let half = support / 2;
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Generates a random smooth adaptive-harmonic signal: amplitude is a
/// normalized smoothed Brownian path around 3 (support-700 flat kernel),
/// the instantaneous frequency is a slow upward trend plus a normalized
/// smoothed independent Brownian path (support 500), and the phase is the
/// normalized cumulative sum of the instantaneous frequency. Sampling rate
/// is √n with start time 1/√n.
pub fn gen_ahm(n: usize, seed: u64) -> AhmTruth {
    assert!(n >= 1024, "gen_ahm needs n >= 1024");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw_brownian = |len: usize| -> Vec<f64> {
        let mut acc = 0.0;
        (0..len)
            .map(|_| {
                let step: f64 = StandardNormal.sample(&mut rng);
                acc += step;
                acc
            })
            .collect()
    };
    let b = moving_average(&draw_brownian(n), 700);
    let bmax = b.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let am: Vec<f64> = b.iter().map(|&v| 3.0 + v / bmax).collect();

    let p = moving_average(&draw_brownian(n), 500);
    let pmax = p.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let sq = (n as f64).sqrt();
    let inst_freq: Vec<f64> = (0..n)
        .map(|i0| 4.0 + 0.5 * (i0 + 1) as f64 / (17.0 * sq) + 1.2 * p[i0] / pmax)
        .collect();
    let mut phase = vec![0.0f64; n];
    let mut acc = 0.0;
    for i0 in 0..n {
        acc += inst_freq[i0] / sq;
        phase[i0] = acc;
    }
    let x: Vec<f64> = (0..n)
        .map(|i0| am[i0] * (2.0 * std::f64::consts::PI * phase[i0]).cos())
        .collect();
    let f = TimeSeries::new(x, sq, 1.0 / sq).expect("generated series is valid");
    AhmTruth {
        f,
        am,
        inst_freq,
        phase,
    }
}

/// Largest per-sample increments (|ΔA|, |Δφ′|) of a generated signal, a
/// numeric smoothness report for the amplitude and frequency paths.
pub fn ahm_regularity(truth: &AhmTruth) -> (f64, f64) {
    let d = |v: &[f64]| {
        v.windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0f64, f64::max)
    };
    (d(&truth.am), d(&truth.inst_freq))
}

/// Result of the Monte Carlo Gaussianity check at a set of probes.
#[derive(Debug, Clone)]
pub struct GaussianityReport {
    /// (time index, frequency bin) of each probe.
    pub probes: Vec<(usize, usize)>,
    /// Jarque-Bera statistic of the real parts at each probe.
    pub jb_re: Vec<f64>,
    /// Jarque-Bera statistic of the imaginary parts at each probe.
    pub jb_im: Vec<f64>,
    /// Fraction of the 2·P univariate tests passing at level 0.01.
    pub pass_fraction: f64,
    /// Number of Monte Carlo replicates used.
    pub n_mc: usize,
}

/// Monte Carlo normality check of STFT coefficients at explicit probes:
/// `noise_gen(r)` must return the r-th independent noise realization; for
/// each (row, bin) probe the real and imaginary parts across replicates
/// are tested with the Jarque-Bera statistic against the χ²(2) 0.01
/// critical value.
pub fn gaussianity_check_at<F>(
    noise_gen: &F,
    win: &WindowPair,
    grid: &FreqGrid,
    n_mc: usize,
    rows: &[usize],
    bins: &[usize],
) -> Result<GaussianityReport>
where
    F: Fn(usize) -> TimeSeries + Sync,
{
    assert!(n_mc >= 200, "gaussianity check needs n_mc >= 200");
    assert!(!rows.is_empty() && !bins.is_empty());
    let per_rep: Vec<Vec<Complex64>> = try_map_indexed(n_mc, |r| -> Result<Vec<Complex64>> {
        let ts = noise_gen(r);
        let tfr: Tfr = stft_at_rows(&ts, win, grid, false, rows)?;
        let mut vals = Vec::with_capacity(rows.len() * bins.len());
        for rp in 0..rows.len() {
            for &b in bins {
                vals.push(tfr.at(rp, b));
            }
        }
        Ok(vals)
    })?;
    let mut probes = Vec::new();
    for &r in rows {
        for &b in bins {
            probes.push((r, b));
        }
    }
    let p = probes.len();
    let mut jb_re = Vec::with_capacity(p);
    let mut jb_im = Vec::with_capacity(p);
    let mut passed = 0usize;
    for idx in 0..p {
        let re: Vec<f64> = per_rep.iter().map(|v| v[idx].re).collect();
        let im: Vec<f64> = per_rep.iter().map(|v| v[idx].im).collect();
        let sr = stats::jarque_bera(&re);
        let si = stats::jarque_bera(&im);
        if sr <= JB_CRITICAL_1PCT {
            passed += 1;
        }
        if si <= JB_CRITICAL_1PCT {
            passed += 1;
        }
        jb_re.push(sr);
        jb_im.push(si);
    }
    Ok(GaussianityReport {
        probes,
        jb_re,
        jb_im,
        pass_fraction: passed as f64 / (2 * p) as f64,
        n_mc,
    })
}

/// As [`gaussianity_check_at`] with a default probe set: 5 interior time
/// rows crossed with 5 mid-band frequency bins (25 probes).
pub fn gaussianity_check<F>(
    noise_gen: &F,
    win: &WindowPair,
    grid: &FreqGrid,
    n_mc: usize,
) -> Result<GaussianityReport>
where
    F: Fn(usize) -> TimeSeries + Sync,
{
    let n = noise_gen(0).len();
    let m = win.m;
    let lo = m;
    let hi = n.saturating_sub(m).max(lo + 1);
    let span = hi - lo;
    let rows: Vec<usize> = (1..=5).map(|i| lo + span * i / 6).collect();
    let d = grid.len();
    let bins: Vec<usize> = (1..=5).map(|i| d * i / 6).collect();
    gaussianity_check_at(noise_gen, win, grid, n_mc, &rows, &bins)
}
