//! Small statistical helpers used across the crate: error function,
//! normal CDF, Kolmogorov-Smirnov statistics, Jarque-Bera, quantiles.
//!
//! These are hand-rolled on purpose: each is a few lines against a
//! published formula, and keeping them local avoids a heavyweight
//! dependency for six functions. Accuracy notes are on each item.

/// Error function via the Abramowitz-Stegun rational approximation
/// (formula 7.1.26), absolute error below 1.5e−7 on the real line.
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Standard normal CDF, accurate to about 1e−7 (inherits the erf error).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// Sample standard deviation with divisor n − ddof; 0 when fewer than
/// ddof + 1 samples.
pub fn sample_std(xs: &[f64], ddof: usize) -> f64 {
    let n = xs.len();
    if n <= ddof {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|&v| (v - mean) * (v - mean)).sum();
    (ss / (n - ddof) as f64).sqrt()
}

/// Empirical quantile with linear interpolation between order statistics
/// (the common "linear" definition: position q·(n−1)).
///
/// Panics on empty input; callers validate. NaN entries are rejected by
/// upstream validation, so a total order on the copy is safe.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    assert!(!xs.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&q), "quantile level out of range");
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample in quantile"));
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        let w = pos - lo as f64;
        v[lo] * (1.0 - w) + v[hi] * w
    }
}

/// One-sample Kolmogorov-Smirnov statistic against the standard normal:
/// D = sup |F_emp − Φ|.
pub fn ks_statistic_normal(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample in ks"));
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = normal_cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Asymptotic Kolmogorov-Smirnov p-value via the Stephens-corrected
/// Kolmogorov series: p = 2·Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²) with
/// λ = (√n + 0.12 + 0.11/√n)·D. Accurate to a couple of percent for
/// n ≥ 10; intended for diagnostics, not for tight inference.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda < 1e-8 {
        return 1.0;
    }
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        p += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov statistic D = sup |F_a − F_b|.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("non-finite sample in ks2"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("non-finite sample in ks2"));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        let x = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Jarque-Bera statistic n/6·(S² + K²/4) from sample skewness S and
/// excess kurtosis K. Under normality asymptotically χ²(2); the 0.01
/// critical value is 9.21034.
pub fn jarque_bera(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 4 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in xs {
        let c = x - mean;
        let c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return 0.0;
    }
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2) - 3.0;
    n / 6.0 * (skew * skew + kurt * kurt / 4.0)
}

/// Survival function of χ²(2): P(X > x) = exp(−x/2), used for the
/// Jarque-Bera p-value.
pub fn chi2_2_sf(x: f64) -> f64 {
    (-0.5 * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_matches_reference_values() {
        // the rational approximation does not vanish exactly at 0
        assert!(erf(0.0).abs() < 1e-8);
        assert!((erf(1.0) - 0.8427007929497148).abs() < 2e-7);
        assert!((erf(3.0) - 0.9999779095030014).abs() < 2e-7);
        assert_eq!(erf(-1.25), -erf(1.25));
    }

    #[test]
    fn normal_cdf_matches_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-8);
        assert!((normal_cdf(-1.0) - 0.15865525393145707).abs() < 2e-7);
        assert!((normal_cdf(1.959964) - 0.9750000009035577).abs() < 2e-7);
    }

    #[test]
    fn quantile_matches_linear_interpolation_convention() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.25), 1.75);
        assert_eq!(quantile(&[5.0], 0.5), 5.0);
        let grid: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!((quantile(&grid, 0.95) - 94.05).abs() < 1e-12);
        let z = [2.0, -7.5, 3.25, 0.5, 11.0, -1.0];
        assert!((quantile(&z, 0.37) - 0.27500000000000013).abs() < 1e-12);
        assert_eq!(quantile(&z, 0.0), -7.5);
        assert_eq!(quantile(&z, 1.0), 11.0);
    }

    #[test]
    fn sample_std_matches_reference() {
        let z = [2.0, -7.5, 3.25, 0.5, 11.0, -1.0];
        assert!((sample_std(&z, 1) - 6.028577775893747).abs() < 1e-12);
        assert_eq!(sample_std(&[1.0], 1), 0.0);
    }

    #[test]
    fn jarque_bera_matches_reference() {
        let x = [
            0.3, -1.2, 0.7, 2.1, -0.4, 0.0, 1.5, -2.2, 0.9, -0.6, 0.2, 1.1,
        ];
        assert!((jarque_bera(&x) - 0.3655137209121062).abs() < 1e-12);
        // constant data carries no evidence against normality
        assert_eq!(jarque_bera(&[3.0; 10]), 0.0);
    }

    #[test]
    fn ks_one_sample_matches_reference() {
        let y = [
            -1.5, -0.8, -0.3, 0.1, 0.4, 0.9, 1.3, 1.8, -2.1, 0.6, -0.1, 2.4, 0.25, -0.55, 1.05,
        ];
        let d = ks_statistic_normal(&y);
        assert!((d - 0.14927320798657384).abs() < 2e-7);
        let p = ks_p_value(d, y.len());
        assert!((p - 0.8639050822070825).abs() < 1e-6);
        // exact p at this n is 0.8445; the asymptotic form is within a few percent
        assert!((p - 0.8445396204912384).abs() < 0.05);
    }

    #[test]
    fn ks_two_sample_matches_reference() {
        let d = ks_statistic_two_sample(&[1.0, 2.0, 3.0], &[1.5, 2.5]);
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
        let a2 = [0.1, -0.4, 0.9, 1.3, -1.1, 0.6, 0.0, 2.2];
        let b2 = [0.3, -0.2, 1.0, -0.9, 0.45, 1.9, -1.6];
        let d2 = ks_statistic_two_sample(&a2, &b2);
        assert!((d2 - 0.21428571428571427).abs() < 1e-15);
        // symmetry
        assert_eq!(d2, ks_statistic_two_sample(&b2, &a2));
    }
}
