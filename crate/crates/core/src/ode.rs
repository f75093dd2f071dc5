//! Adaptive Dormand-Prince 5(4) integration for plane autonomous systems.
//!
//! Small and self-contained: the only consumers are the profile equation and
//! its Hamiltonian comparison system, both two-dimensional.

use crate::error::{Error, Result};

/// One accepted step: time, state, and the right-hand side at that state
/// (kept so trajectories can be interpolated with cubic Hermite pieces).
#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    pub t: f64,
    pub y: [f64; 2],
    pub dy: [f64; 2],
}

/// Step-size and accuracy controls.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOpts {
    /// Relative tolerance per step.
    pub rtol: f64,
    /// Absolute tolerance floor per component.
    pub atol: f64,
    /// Initial step size.
    pub h0: f64,
    /// Upper bound on the step size (also bounds the Hermite interpolation error).
    pub h_max: f64,
    /// Hard cap on accepted steps.
    pub max_steps: usize,
}

impl Default for AdaptiveOpts {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-14,
            h0: 1e-3,
            h_max: 0.05,
            max_steps: 2_000_000,
        }
    }
}

/// Whether to keep integrating after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

// Dormand-Prince coefficients (5th-order solution, embedded 4th-order error).
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate y' = f(t, y) from (t0, y0), recording every accepted step.
///
/// `control` sees each accepted step and decides whether to stop; the final
/// record is included in the returned trajectory either way.
pub fn integrate_adaptive<F, C>(
    f: F,
    t0: f64,
    y0: [f64; 2],
    t_max: f64,
    opts: &AdaptiveOpts,
    mut control: C,
) -> Result<Vec<StepRecord>>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
    C: FnMut(&StepRecord) -> Control,
{
    if !(opts.rtol > 0.0) || !(opts.h0 > 0.0) || !(opts.h_max > 0.0) {
        return Err(Error::InvalidParams(
            "integrator tolerances and steps must be positive".into(),
        ));
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h0.min(opts.h_max);
    let mut trajectory = Vec::new();

    let first = StepRecord {
        t,
        y,
        dy: f(t, y),
    };
    if control(&first) == Control::Stop {
        return Ok(vec![first]);
    }
    trajectory.push(first);

    let mut rejected_in_a_row = 0usize;
    while t < t_max {
        if trajectory.len() >= opts.max_steps {
            return Err(Error::Integration(format!(
                "step cap {} reached at t = {t:.3}",
                opts.max_steps
            )));
        }
        h = h.min(opts.h_max).min(t_max - t);

        let mut k = [[0.0f64; 2]; 7];
        k[0] = f(t, y);
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                ys[0] += h * A[stage][j] * kj[0];
                ys[1] += h * A[stage][j] * kj[1];
            }
            let c = A[stage].iter().sum::<f64>();
            k[stage + 1] = f(t + c * h, ys);
        }

        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            y5[0] += h * B5[j] * kj[0];
            y5[1] += h * B5[j] * kj[1];
            y4[0] += h * B4[j] * kj[0];
            y4[1] += h * B4[j] * kj[1];
        }

        let mut err = 0.0f64;
        for i in 0..2 {
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4[i]) / scale;
            err += e * e;
        }
        err = (err / 2.0).sqrt();

        if err <= 1.0 || h <= 1e-14 * t.abs().max(1.0) {
            t += h;
            y = y5;
            let record = StepRecord {
                t,
                y,
                dy: f(t, y),
            };
            trajectory.push(record);
            if control(&record) == Control::Stop {
                return Ok(trajectory);
            }
            rejected_in_a_row = 0;
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 50 {
                return Err(Error::Integration(format!(
                    "step size collapsed at t = {t:.3} (h = {h:.3e})"
                )));
            }
        }

        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(trajectory)
}

/// Cubic Hermite value at `t` between two records bracketing it.
pub fn hermite_eval(left: &StepRecord, right: &StepRecord, t: f64, component: usize) -> f64 {
    let h = right.t - left.t;
    if h <= 0.0 {
        return left.y[component];
    }
    let s = (t - left.t) / h;
    let (y0, y1) = (left.y[component], right.y[component]);
    let (m0, m1) = (left.dy[component] * h, right.dy[component] * h);
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * m0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * m1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay_to_tolerance() {
        // y' = -y from y(0) = 1: y(t) = e^{-t}.
        let opts = AdaptiveOpts {
            h_max: 0.5,
            ..Default::default()
        };
        let steps = integrate_adaptive(
            |_, y| [-y[0], -y[1]],
            0.0,
            [1.0, 2.0],
            5.0,
            &opts,
            |_| Control::Continue,
        )
        .unwrap();
        let last = steps.last().unwrap();
        assert_relative_eq!(last.t, 5.0, epsilon = 1e-12);
        assert_relative_eq!(last.y[0], (-5.0f64).exp(), max_relative = 1e-9);
        assert_relative_eq!(last.y[1], 2.0 * (-5.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn harmonic_oscillator_phase_accuracy() {
        // x'' = -x over ten periods.
        let t_end = 20.0 * std::f64::consts::PI;
        let steps = integrate_adaptive(
            |_, y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            t_end,
            &AdaptiveOpts::default(),
            |_| Control::Continue,
        )
        .unwrap();
        let last = steps.last().unwrap();
        assert_relative_eq!(last.y[0], 1.0, max_relative = 1e-8);
        assert!(last.y[1].abs() < 1e-8);
    }

    #[test]
    fn hermite_interpolation_between_steps() {
        let steps = integrate_adaptive(
            |_, y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            2.0,
            &AdaptiveOpts::default(),
            |_| Control::Continue,
        )
        .unwrap();
        // Sample between each pair of accepted steps and compare to cos(t).
        for pair in steps.windows(2) {
            let mid = 0.5 * (pair[0].t + pair[1].t);
            let v = hermite_eval(&pair[0], &pair[1], mid, 0);
            assert_relative_eq!(v, mid.cos(), epsilon = 1e-8);
        }
    }

    #[test]
    fn early_stop_via_control() {
        let steps = integrate_adaptive(
            |_, y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            100.0,
            &AdaptiveOpts::default(),
            |r| {
                if r.t >= 1.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )
        .unwrap();
        let last = steps.last().unwrap();
        assert!(last.t >= 1.0 && last.t < 1.2);
    }
}
