//! Time-varying AR approximation of locally stationary noise and the
//! Gaussian bootstrap resampler built on it.
//!
//! Coefficient functions are expanded in shifted Legendre polynomials,
//! orthonormal on [0,1], and estimated by one linear least-squares solve;
//! innovations get a moving-window standard deviation path; replicates are
//! drawn from a seeded recursion with a deterministic stream-splitting
//! scheme (replicate m uses seed XOR m).

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::stats;

/// Default AR order.
pub const DEFAULT_ORDER_B: usize = 2;
/// Default basis order.
pub const DEFAULT_BASIS_M: usize = 4;
/// Default moving-window half width for the innovation scale path.
pub const DEFAULT_HALF_WINDOW: usize = 20;

/// Coefficient basis for the time-varying AR functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Shifted Legendre polynomials ψ_k(u) = √(2k−1)·P_{k−1}(2u−1),
    /// orthonormal on [0,1].
    Legendre,
}

/// A fitted time-varying AR(b) model with basis-expanded coefficients and
/// an innovation scale path.
#[derive(Debug, Clone, PartialEq)]
pub struct TvarModel {
    pub order_b: usize,
    pub basis_order_m: usize,
    /// Row-major b × m coefficient matrix a_{jk}: φ̃_j(u) = Σ_k a_{jk}·ψ_k(u).
    pub coeffs: Vec<f64>,
    /// Innovation standard deviation per sample, strictly positive.
    pub sigma_path: Vec<f64>,
    pub basis: Basis,
    /// True when the least-squares solve needed ridge regularization.
    pub ridge_regularized: bool,
    /// Sampling rate of the series the model was fitted on; bootstrap
    /// replicates are stamped with it.
    pub rate_hz: f64,
    /// Start time of the fitted series.
    pub start_time_s: f64,
}

/// Evaluates the first `m` shifted Legendre basis functions at u ∈ [0,1].
pub fn legendre_basis(u: f64, m: usize) -> Vec<f64> {
    let x = 2.0 * u - 1.0;
    let mut p = Vec::with_capacity(m);
    for k in 0..m {
        let pk = match k {
            0 => 1.0,
            1 => x,
            _ => {
                let (a, b): (f64, f64) = (p[k - 1], p[k - 2]);
                (((2 * k - 1) as f64) * x * a - ((k - 1) as f64) * b) / k as f64
            }
        };
        p.push(pk);
    }
    (0..m)
        .map(|k| ((2 * k + 1) as f64).sqrt() * p[k])
        .collect()
}

impl TvarModel {
    /// Evaluates the j-th coefficient function (1-based lag j) at u.
    pub fn phi(&self, j: usize, u: f64) -> f64 {
        let psi = legendre_basis(u, self.basis_order_m);
        let row = &self.coeffs[(j - 1) * self.basis_order_m..j * self.basis_order_m];
        row.iter().zip(&psi).map(|(a, p)| a * p).sum()
    }

    /// Number of samples the model reproduces (length of the scale path).
    pub fn len(&self) -> usize {
        self.sigma_path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_path.is_empty()
    }

    /// Serializes to the plain-text model format: a `b,m,basis` header,
    /// then b lines of m comma-separated coefficients, then one sigma_path
    /// value per line. Values print in shortest round-trip form, so
    /// parsing recovers them bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{},{},legendre\n",
            self.order_b, self.basis_order_m
        ));
        for j in 0..self.order_b {
            let row: Vec<String> = self.coeffs
                [j * self.basis_order_m..(j + 1) * self.basis_order_m]
                .iter()
                .map(|v| format!("{v}"))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for s in &self.sigma_path {
            out.push_str(&format!("{s}\n"));
        }
        out
    }

    /// Parses the plain-text model format. The sampling clock is not part
    /// of the format, so the caller supplies it.
    pub fn from_text(text: &str, rate_hz: f64, start_time_s: f64) -> Result<TvarModel> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::ModelParse {
            line: 1,
            msg: "empty model file".into(),
        })?;
        let parts: Vec<&str> = header.split(',').collect();
        if parts.len() != 3 || parts[2].trim() != "legendre" {
            return Err(Error::ModelParse {
                line: 1,
                msg: "header must be b,m,legendre".into(),
            });
        }
        let parse_usize = |s: &str, line: usize| {
            s.trim().parse::<usize>().map_err(|e| Error::ModelParse {
                line,
                msg: format!("bad integer {s:?}: {e}"),
            })
        };
        let b = parse_usize(parts[0], 1)?;
        let m = parse_usize(parts[1], 1)?;
        if b == 0 || m == 0 {
            return Err(Error::ModelParse {
                line: 1,
                msg: "b and m must be positive".into(),
            });
        }
        let mut coeffs = Vec::with_capacity(b * m);
        for _ in 0..b {
            let (ln, row) = lines.next().ok_or(Error::ModelParse {
                line: b + 1,
                msg: "missing coefficient row".into(),
            })?;
            let vals: Vec<&str> = row.split(',').collect();
            if vals.len() != m {
                return Err(Error::ModelParse {
                    line: ln + 1,
                    msg: format!("expected {m} coefficients, got {}", vals.len()),
                });
            }
            for v in vals {
                coeffs.push(v.trim().parse::<f64>().map_err(|e| Error::ModelParse {
                    line: ln + 1,
                    msg: format!("bad coefficient {v:?}: {e}"),
                })?);
            }
        }
        let mut sigma_path = Vec::new();
        for (ln, sline) in lines {
            let s = sline.trim();
            if s.is_empty() {
                continue;
            }
            let v = s.parse::<f64>().map_err(|e| Error::ModelParse {
                line: ln + 1,
                msg: format!("bad sigma value {s:?}: {e}"),
            })?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ModelParse {
                    line: ln + 1,
                    msg: format!("sigma must be positive and finite, got {v}"),
                });
            }
            sigma_path.push(v);
        }
        if sigma_path.is_empty() {
            return Err(Error::ModelParse {
                line: b + 2,
                msg: "missing sigma path".into(),
            });
        }
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::ModelParse {
                    line: 2 + i / m,
                    msg: "non-finite coefficient".into(),
                });
            }
        }
        Ok(TvarModel {
            order_b: b,
            basis_order_m: m,
            coeffs,
            sigma_path,
            basis: Basis::Legendre,
            ridge_regularized: false,
            rate_hz,
            start_time_s,
        })
    }
}

/// Fits a time-varying AR(b) model with basis order m by least squares on
/// x_i ≈ Σ_{j,k} a_{jk}·ψ_k(i/n)·x_{i−j} over i = b+1..n (1-based), then
/// fills the innovation scale path with the default moving window.
///
/// A singular normal-equations matrix falls back to a small ridge penalty
/// (1e−8 of the mean diagonal), and the result is flagged.
pub fn fit_tvar(resid: &TimeSeries, b: usize, m: usize) -> Result<TvarModel> {
    fit_tvar_with(resid, b, m, DEFAULT_HALF_WINDOW)
}

/// As [`fit_tvar`] with an explicit scale-path half window.
pub fn fit_tvar_with(
    resid: &TimeSeries,
    b: usize,
    m: usize,
    half_window: usize,
) -> Result<TvarModel> {
    assert!(b >= 1 && m >= 1, "orders must be positive");
    let n = resid.len();
    if n <= 10 * b * m {
        return Err(Error::TooFewSamples {
            got: n,
            need: 10 * b * m,
            params: b * m,
        });
    }
    let x = &resid.samples;
    let rows = n - b;
    let cols = b * m;
    let mut design = DMatrix::<f64>::zeros(rows, cols);
    let mut y = DVector::<f64>::zeros(rows);
    for r in 0..rows {
        let i0 = b + r; // 0-based target index; 1-based i = i0 + 1
        let u = (i0 + 1) as f64 / n as f64;
        let psi = legendre_basis(u, m);
        for j in 1..=b {
            for (k, &pk) in psi.iter().enumerate() {
                design[(r, (j - 1) * m + k)] = pk * x[i0 - j];
            }
        }
        y[r] = x[i0];
    }
    let gram = design.transpose() * &design;
    let rhs = design.transpose() * y;
    let (solution, ridge_regularized) = match Cholesky::new(gram.clone()) {
        Some(ch) => (ch.solve(&rhs), false),
        None => {
            let scale = gram.trace() / cols as f64;
            if scale <= 0.0 {
                // all-zero design: the zero solution is a least-squares solution
                (DVector::zeros(cols), true)
            } else {
                let reg = &gram + DMatrix::<f64>::identity(cols, cols) * (1e-8 * scale);
                let ch = Cholesky::new(reg).ok_or(Error::SingularDesign)?;
                (ch.solve(&rhs), true)
            }
        }
    };
    let coeffs: Vec<f64> = solution.iter().cloned().collect();
    let mut model = TvarModel {
        order_b: b,
        basis_order_m: m,
        coeffs,
        sigma_path: Vec::new(),
        basis: Basis::Legendre,
        ridge_regularized,
        rate_hz: resid.rate_hz,
        start_time_s: resid.start_time_s,
    };
    let innov = innovations(&model, resid)?;
    model.sigma_path = local_std(&innov, half_window);
    Ok(model)
}

/// Computes the model innovations: ε̃_i = x_i − Σ_j φ̃_j(i/n)·x_{i−j} for
/// i = b+1..n (1-based), and ε̃_i = x_i for the first b samples.
pub fn innovations(model: &TvarModel, resid: &TimeSeries) -> Result<TimeSeries> {
    let n = resid.len();
    let b = model.order_b;
    if n < b + 1 {
        return Err(Error::SeriesTooShort { got: n, need: b + 1 });
    }
    let x = &resid.samples;
    let mut eps = Vec::with_capacity(n);
    for i0 in 0..n {
        if i0 < b {
            eps.push(x[i0]);
        } else {
            let u = (i0 + 1) as f64 / n as f64;
            let mut pred = 0.0;
            for j in 1..=b {
                pred += model.phi(j, u) * x[i0 - j];
            }
            eps.push(x[i0] - pred);
        }
    }
    TimeSeries::new(eps, resid.rate_hz, resid.start_time_s)
}

/// Moving-window sample standard deviation of the innovations, floored at
/// 1e−6 of the overall innovation standard deviation (1e−12 when that is
/// itself zero).
pub fn local_std(innov: &TimeSeries, half_window: usize) -> Vec<f64> {
    assert!(half_window >= 1, "half_window must be at least 1");
    let n = innov.len();
    let x = &innov.samples;
    let overall = stats::sample_std(x, 1);
    let floor = if overall > 0.0 { 1e-6 * overall } else { 1e-12 };
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half_window);
            let hi = (i + half_window + 1).min(n);
            stats::sample_std(&x[lo..hi], 1).max(floor)
        })
        .collect()
}

/// Draws one bootstrap replicate from the fitted model: η* i.i.d. standard
/// normal from a deterministic stream, ε*_i = σ̃_i·η*_i for i ≤ b and the
/// time-varying AR recursion afterwards. A non-finite value aborts with
/// the first divergent index (an unstable fitted model).
pub fn sample_bootstrap(model: &TvarModel, seed: u64) -> Result<TimeSeries> {
    let n = model.len();
    let b = model.order_b;
    assert!(n > b, "model scale path shorter than its order");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eps = Vec::with_capacity(n);
    for i0 in 0..n {
        let eta: f64 = StandardNormal.sample(&mut rng);
        let mut v = model.sigma_path[i0] * eta;
        if i0 >= b {
            let u = (i0 + 1) as f64 / n as f64;
            for j in 1..=b {
                v += model.phi(j, u) * eps[i0 - j];
            }
        }
        if !v.is_finite() {
            return Err(Error::NonFiniteBootstrap { index: i0 });
        }
        eps.push(v);
    }
    TimeSeries::new(eps, model.rate_hz, model.start_time_s)
}

/// The replicate-m seed under the documented stream-splitting scheme.
pub fn replicate_seed(seed: u64, m: usize) -> u64 {
    seed ^ m as u64
}
