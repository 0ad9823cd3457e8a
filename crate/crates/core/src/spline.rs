//! Natural cubic spline interpolation (zero second derivative at the ends).

use crate::error::{Error, Result};

/// Natural cubic spline through `(x, y)` knots with strictly increasing `x`.
#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots; endpoints are zero.
    second: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn fit(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} abscissae vs {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::Parameter("spline needs at least two knots".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("spline knots must strictly increase".into()));
        }
        let n = xs.len();
        let mut second = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior tridiagonal system.
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = (h0 + h1) / 3.0;
                upper[i] = h1 / 6.0;
                rhs[i] = (ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0;
            }
            for i in 1..m {
                let h0 = xs[i + 1] - xs[i]; // sub-diagonal entry h0/6
                let w = (h0 / 6.0) / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - upper[i] * second[i + 2]) / diag[i];
            }
        }
        Ok(NaturalCubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            second,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Evaluates inside the knot range; no extrapolation.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(Error::SpanOutOfRange(format!(
                "{x} outside the interpolation range [{lo}, {hi}]"
            )));
        }
        // Exact sample pass-through at the knots.
        let seg = match self.xs.binary_search_by(|k| k.partial_cmp(&x).unwrap()) {
            Ok(i) => return Ok(self.ys[i]),
            Err(i) => (i - 1).min(self.xs.len() - 2),
        };
        let h = self.xs[seg + 1] - self.xs[seg];
        let a = (self.xs[seg + 1] - x) / h;
        let b = (x - self.xs[seg]) / h;
        Ok(a * self.ys[seg]
            + b * self.ys[seg + 1]
            + ((a * a * a - a) * self.second[seg] + (b * b * b - b) * self.second[seg + 1])
                * (h * h)
                / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_functions_exactly() {
        let xs: Vec<f64> = (0..61).map(|i| i as f64 / 60.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&t| 1.0 * t + 0.25).collect();
        let s = NaturalCubicSpline::fit(&xs, &ys).unwrap();
        for k in 0..600 {
            let x = k as f64 / 600.0;
            let y = s.eval(x).unwrap();
            assert!((y - (x + 0.25)).abs() < 1e-12, "at {x}: {y}");
        }
    }

    #[test]
    fn sine_error_bounded_by_analytic_oracle() {
        // 2 Hz sine sampled at 60 Hz over full periods: interior plus ends.
        let xs: Vec<f64> = (0..=60).map(|i| i as f64 / 60.0).collect();
        let amp = 0.5;
        let ys: Vec<f64> = xs
            .iter()
            .map(|&t| amp * (2.0 * std::f64::consts::PI * 2.0 * t).sin())
            .collect();
        let s = NaturalCubicSpline::fit(&xs, &ys).unwrap();
        let mut max_err = 0.0f64;
        for k in 0..=6000 {
            let x = k as f64 / 6000.0;
            let exact = amp * (2.0 * std::f64::consts::PI * 2.0 * x).sin();
            max_err = max_err.max((s.eval(x).unwrap() - exact).abs());
        }
        assert!(max_err < 1e-4, "max spline error {max_err:.2e} m");
    }

    #[test]
    fn knots_pass_through_bitwise() {
        let xs = [0.0, 0.1, 0.25, 0.4];
        let ys = [1.5, -0.25, 3.75, 0.125];
        let s = NaturalCubicSpline::fit(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(s.eval(*x).unwrap().to_bits(), y.to_bits());
        }
    }

    #[test]
    fn rejects_extrapolation_and_bad_knots() {
        let s = NaturalCubicSpline::fit(&[0.0, 1.0], &[0.0, 1.0]).unwrap();
        assert!(s.eval(1.0 + 1e-9).is_err());
        assert!(s.eval(-1e-9).is_err());
        assert!(NaturalCubicSpline::fit(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(NaturalCubicSpline::fit(&[0.0], &[1.0]).is_err());
    }
}
