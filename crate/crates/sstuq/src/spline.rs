//! Natural cubic splines and the tensor-product surface lift used to
//! interpolate coarse-grid band surfaces onto the full grid.

use crate::error::{Error, Result};

/// A natural cubic spline (second derivative zero at both ends) through a
/// strictly increasing set of nodes. Queries outside the node range are
/// evaluated with the boundary segment's cubic, matching the common
/// extrapolating convention.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the nodes.
    m2: Vec<f64>,
}

impl CubicSpline {
    /// Fits the spline; nodes must be strictly increasing, at least two.
    pub fn natural(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::DimMismatch(format!(
                "spline needs matching node/value lengths of at least 2, got {}/{}",
                n,
                ys.len()
            )));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::DimMismatch(
                    "spline nodes must be strictly increasing".into(),
                ));
            }
        }
        let mut m2 = vec![0.0f64; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives (Thomas solve)
            let k = n - 2;
            let mut diag = vec![0.0f64; k];
            let mut upper = vec![0.0f64; k];
            let mut lower = vec![0.0f64; k];
            let mut rhs = vec![0.0f64; k];
            for i in 1..=k {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                lower[i - 1] = h0;
                upper[i - 1] = h1;
                rhs[i - 1] =
                    6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            for i in 1..k {
                let w = lower[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m2[k] = rhs[k - 1] / diag[k - 1];
            for i in (1..k).rev() {
                m2[i] = (rhs[i - 1] - upper[i - 1] * m2[i + 1]) / diag[i - 1];
            }
        }
        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m2,
        })
    }

    /// Evaluates the spline at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        // segment index: clamp so queries outside use the boundary cubic
        let seg = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let (y0, y1) = (self.ys[seg], self.ys[seg + 1]);
        let (m0, m1) = (self.m2[seg], self.m2[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * y0
            + b * y1
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }
}

/// Lifts a coarse surface to full axes by a tensor-product natural cubic
/// spline: one pass along the first axis (time), then one along the second
/// (frequency). `coarse` is row-major coarse_x × coarse_y; the result is
/// row-major full_x × full_y. Each axis needs at least 4 coarse nodes.
pub fn tensor_lift(
    coarse: &[f64],
    coarse_x: &[f64],
    coarse_y: &[f64],
    full_x: &[f64],
    full_y: &[f64],
) -> Result<Vec<f64>> {
    let nx = coarse_x.len();
    let ny = coarse_y.len();
    if nx < 4 {
        return Err(Error::GridTooCoarse {
            axis: "time",
            got: nx,
        });
    }
    if ny < 4 {
        return Err(Error::GridTooCoarse {
            axis: "frequency",
            got: ny,
        });
    }
    if coarse.len() != nx * ny {
        return Err(Error::DimMismatch(format!(
            "coarse surface has {} values for a {}x{} grid",
            coarse.len(),
            nx,
            ny
        )));
    }
    // pass 1: along x for each coarse column
    let fx = full_x.len();
    let mut mid = vec![0.0f64; fx * ny];
    let mut col = vec![0.0f64; nx];
    for j in 0..ny {
        for i in 0..nx {
            col[i] = coarse[i * ny + j];
        }
        let sp = CubicSpline::natural(coarse_x, &col)?;
        for (r, &x) in full_x.iter().enumerate() {
            mid[r * ny + j] = sp.eval(x);
        }
    }
    // pass 2: along y for each full row
    let fy = full_y.len();
    let mut out = vec![0.0f64; fx * fy];
    for r in 0..fx {
        let sp = CubicSpline::natural(coarse_y, &mid[r * ny..(r + 1) * ny])?;
        for (c, &y) in full_y.iter().enumerate() {
            out[r * fy + c] = sp.eval(y);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_at_nodes_and_matches_reference_evals() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let ys = vec![1.0, -2.0, 0.5, 3.0, -1.0, 2.0];
        let sp = CubicSpline::natural(&xs, &ys).unwrap();
        for i in 0..6 {
            assert!((sp.eval(xs[i]) - ys[i]).abs() < 1e-12);
        }
        // frozen reference evaluations, including extrapolation
        let checks = [
            (0.5, -0.993421052631579),
            (1.7, -0.6937631578947367),
            (2.2, 1.366315789473685),
            (4.9, 1.4707368421052647),
            (-0.3, 2.2592105263157896),
            (5.4, 3.9781052631578957),
        ];
        for (q, want) in checks {
            let got = sp.eval(q);
            assert!((got - want).abs() < 1e-12, "eval({q}) = {got}, want {want}");
        }
    }

    #[test]
    fn reproduces_constants_and_linears() {
        let xs: Vec<f64> = (0..8).map(|i| 0.3 * i as f64).collect();
        let c = CubicSpline::natural(&xs, &vec![4.25; 8]).unwrap();
        let l =
            CubicSpline::natural(&xs, &xs.iter().map(|x| 2.0 * x - 1.0).collect::<Vec<_>>())
                .unwrap();
        for s in 0..50 {
            let x = -0.2 + s as f64 * 0.06;
            assert!((c.eval(x) - 4.25).abs() < 1e-12);
            assert!((l.eval(x) - (2.0 * x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn sin_accuracy_matches_dense_oracle() {
        let n = 16;
        let xs: Vec<f64> = (0..n)
            .map(|i| std::f64::consts::PI * i as f64 / (n - 1) as f64)
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let sp = CubicSpline::natural(&xs, &ys).unwrap();
        let mut worst: f64 = 0.0;
        for s in 0..1000 {
            let x = std::f64::consts::PI * s as f64 / 999.0;
            worst = worst.max((sp.eval(x) - x.sin()).abs());
        }
        // dense-evaluation oracle for this configuration: 5.064e-6
        assert!(worst <= 6e-6, "max abs error {worst}");
    }

    #[test]
    fn tensor_lift_matches_dense_oracle_on_smooth_surface() {
        let tc: Vec<f64> = (0..16).map(|i| 3.0 * i as f64 / 15.0).collect();
        let fc: Vec<f64> = (0..16).map(|i| 2.0 * i as f64 / 15.0).collect();
        let mut coarse = vec![0.0; 256];
        for i in 0..16 {
            for j in 0..16 {
                coarse[i * 16 + j] = tc[i].sin() * fc[j].cos();
            }
        }
        let tf: Vec<f64> = (0..200).map(|i| 3.0 * i as f64 / 199.0).collect();
        let ff: Vec<f64> = (0..150).map(|i| 2.0 * i as f64 / 149.0).collect();
        let out = tensor_lift(&coarse, &tc, &fc, &tf, &ff).unwrap();
        let mut worst: f64 = 0.0;
        for (r, &t) in tf.iter().enumerate() {
            for (c, &f) in ff.iter().enumerate() {
                worst = worst.max((out[r * 150 + c] - t.sin() * f.cos()).abs());
            }
        }
        // dense-evaluation oracle for this configuration: 8.753e-4
        assert!(worst <= 1e-3, "max abs error {worst}");
        // coarse nodes are reproduced exactly (within fp)
        for (i, &t) in tc.iter().enumerate() {
            for (j, &f) in fc.iter().enumerate() {
                let r = tf.iter().position(|&x| (x - t).abs() < 1e-9);
                let c = ff.iter().position(|&x| (x - f).abs() < 1e-9);
                if let (Some(r), Some(c)) = (r, c) {
                    assert!((out[r * 150 + c] - coarse[i * 16 + j]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn too_coarse_axes_rejected() {
        let xs = [0.0, 1.0, 2.0];
        let full = [0.0, 0.5, 1.0];
        match tensor_lift(&[0.0; 9], &xs, &xs, &full, &full) {
            Err(Error::GridTooCoarse { axis: "time", got: 3 }) => {}
            other => panic!("expected GridTooCoarse, got {other:?}"),
        }
    }
}
