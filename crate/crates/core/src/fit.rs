//! Ordinary least squares on (x, y) pairs, used for rate and exponent fits.

use serde::Serialize;

use crate::error::{Error, Result};

/// Straight-line fit y ~ slope * x + intercept with quality diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope estimate.
    pub stderr: f64,
    /// Coefficient of determination; 1 means a perfect line.
    pub r_squared: f64,
    pub points: usize,
}

impl LineFit {
    /// Fits with r_squared below 0.99 are treated as unreliable by callers
    /// that make decisions from the slope.
    pub fn reliable(&self) -> bool {
        self.r_squared >= 0.99
    }
}

/// Least-squares line through the given points. Needs at least 3 points to
/// produce a meaningful stderr; rejects degenerate (constant-x) input.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::FitWindow(format!(
            "mismatched lengths {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::FitWindow(format!("only {n} points in window")));
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(Error::FitWindow("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = (syy - slope * sxy).max(0.0);
    // A constant y-series fits the zero-slope line exactly.
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let stderr = if n > 2 {
        (ss_res / ((nf - 2.0) * sxx)).sqrt()
    } else {
        f64::NAN
    };
    Ok(LineFit {
        slope,
        intercept,
        stderr,
        r_squared: r_squared.clamp(0.0, 1.0),
        points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line_recovered() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 * x - 1.25).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 3.5, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept, -1.25, max_relative = 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert!(fit.reliable());
    }

    #[test]
    fn noisy_quadratic_reported_unreliable() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!(fit.r_squared < 0.99);
        assert!(!fit.reliable());
    }

    #[test]
    fn degenerate_windows_rejected() {
        assert!(fit_line(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_line(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
