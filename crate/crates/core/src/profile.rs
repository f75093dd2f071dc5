//! The Emden-Fowler profile: heteroclinic orbit of the plane system
//!
//! ```text
//! X' = Y,   Y' = -a Y + c_p^{p-1} X - X^p
//! ```
//!
//! obtained from `-Δu = u^p` by u = r^{-2/(p-1)} w(t), t = -ln r. The orbit
//! leaves the origin along the unstable direction Y = lambda1 X and either
//! converges monotonically to the equilibrium (c_p, 0) or spirals into it,
//! depending on which side of the Joseph-Lundgren exponent p sits.
//!
//! The profile is normalized so that w(t) e^{-b_p t} -> 1 as t -> -infinity;
//! with that normalization a single time shift by b_p^{-1} ln k turns the
//! profile into the seed solution with mass k at infinity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{derive_exponents, ExponentSet, ProblemParams};
use crate::fit::fit_line;
use crate::ode::{integrate_adaptive, AdaptiveOpts, Control};

/// Qualitative behaviour of the orbit near (c_p, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Monotone convergence (serrin < p <= p_c): real stable eigenvalues.
    Monotone,
    /// Damped oscillation around c_p (p_c < p < sobolev): complex pair.
    Oscillatory,
}

/// Controls for the shooting run.
#[derive(Debug, Clone, Copy)]
pub struct ShootOpts {
    /// Start time of the internal clock (cosmetic: the normalizing shift
    /// removes it again).
    pub t0: f64,
    /// Starting amplitude as a fraction of c_p.
    pub delta0: f64,
    /// Convergence tolerance relative to c_p.
    pub tol: f64,
    /// Integrator relative tolerance.
    pub rtol: f64,
    /// Hard cap on integration time.
    pub t_max: f64,
    /// Stop an oscillatory run after this many crossings of X = c_p.
    pub max_crossings: usize,
    /// Overshoot below this fraction of c_p counts as integrator noise,
    /// not as a crossing.
    pub crossing_floor: f64,
}

impl Default for ShootOpts {
    fn default() -> Self {
        Self {
            t0: 0.0,
            delta0: 1e-10,
            tol: 1e-9,
            rtol: 1e-11,
            t_max: 4000.0,
            max_crossings: 8,
            crossing_floor: 1e-8,
        }
    }
}

/// The computed heteroclinic profile, sampled at the accepted integrator
/// steps, normalized to d0 = 1 by a time shift.
#[derive(Debug, Clone)]
pub struct Profile {
    pub params: ProblemParams,
    /// Times after the normalizing shift, strictly increasing.
    pub t_grid: Vec<f64>,
    /// w(t) at the grid times, positive.
    pub values: Vec<f64>,
    /// w'(t) at the grid times.
    pub derivative: Vec<f64>,
    /// Translation that was applied to the raw integrator times.
    pub shift: f64,
    pub sup_value: f64,
    pub regime: Regime,
    /// Number of genuine crossings of c_p recorded before stopping.
    pub crossings: usize,
    pub(crate) exps: ExponentSet,
    // Unstable-manifold expansion w = z - c1 z^p + p c1 c2 z^{2p-1},
    // z = e^{b_p t}: used for the left extension of evaluate().
    pub(crate) c1: f64,
    pub(crate) c2: f64,
}

impl Profile {
    pub fn exponents(&self) -> &ExponentSet {
        &self.exps
    }

    /// w(t) anywhere: Hermite interpolation on the grid, the manifold
    /// expansion below it, c_p above it.
    pub fn evaluate(&self, t: f64) -> f64 {
        let first = self.t_grid[0];
        let last = *self.t_grid.last().unwrap();
        if t <= first {
            return self.left_expansion(t);
        }
        if t >= last {
            return self.exps.c_p;
        }
        let idx = self.t_grid.partition_point(|&x| x <= t);
        let (i0, i1) = (idx - 1, idx);
        let h = self.t_grid[i1] - self.t_grid[i0];
        let s = (t - self.t_grid[i0]) / h;
        let (y0, y1) = (self.values[i0], self.values[i1]);
        let (m0, m1) = (self.derivative[i0] * h, self.derivative[i1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1
    }

    fn left_expansion(&self, t: f64) -> f64 {
        let p = self.params.p;
        let z = (self.exps.b_p * t).exp();
        z - self.c1 * z.powf(p) + p * self.c1 * self.c2 * z.powf(2.0 * p - 1.0)
    }

    /// Largest pointwise ratio w'/w on the grid (finite in the monotone
    /// regime, where 0 < w' <= C w holds).
    pub fn derivative_ratio_bound(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.derivative)
            .map(|(&w, &dw)| dw / w)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Free-function form of [`Profile::evaluate`].
pub fn evaluate_profile(profile: &Profile, t: f64) -> f64 {
    profile.evaluate(t)
}

/// Strict upper bound ((p+1)/2)^{1/(p-1)} c_p for the sup of the profile,
/// from the energy of the undamped comparison system.
pub fn hamiltonian_bound(exps: &ExponentSet) -> f64 {
    let p = exps.params.p;
    ((p + 1.0) / 2.0).powf(1.0 / (p - 1.0)) * exps.c_p
}

/// Shoot the orbit out of the origin and classify it.
pub fn shoot_profile(params: ProblemParams, opts: &ShootOpts) -> Result<Profile> {
    let exps = derive_exponents(params)?;
    let p = params.p;
    if !(p > exps.serrin && p < exps.sobolev) {
        return Err(Error::Regime(format!(
            "profile exists for p in (serrin, sobolev) = ({:.6}, {:.6}), got p = {p}",
            exps.serrin, exps.sobolev
        )));
    }
    if !(opts.delta0 > 0.0 && opts.delta0 <= 1e-8) {
        return Err(Error::InvalidParams(
            "delta0 must be in (0, 1e-8] so the manifold expansion is valid".into(),
        ));
    }

    let cp = exps.c_p;
    let q = exps.c_p_pow;
    let a = exps.a;
    let l1 = exps.lambda1;

    // Characteristic polynomial of the linearization at the origin, used for
    // the next two orders of the unstable manifold: P is positive beyond l1.
    let cpoly = |l: f64| l * l + a * l - q;
    let c1 = 1.0 / cpoly(p * l1);
    let c2 = 1.0 / cpoly((2.0 * p - 1.0) * l1);

    let z0 = opts.delta0 * cp;
    let zp = z0.powf(p);
    let z2p = z0.powf(2.0 * p - 1.0);
    let x0 = z0 - c1 * zp + p * c1 * c2 * z2p;
    let y0 = l1 * (z0 - p * c1 * zp + (2.0 * p - 1.0) * p * c1 * c2 * z2p);

    let rhs = move |_t: f64, y: [f64; 2]| [y[1], -a * y[1] + q * y[0] - y[0].max(0.0).powf(p)];

    let blow_bound = 2.0 * hamiltonian_bound(&exps);
    let floor = opts.crossing_floor * cp;
    let mut crossings = 0usize;
    let mut above = false;
    let mut sup = x0;
    let mut blew_up = false;
    let mut converged = false;

    let ode_opts = AdaptiveOpts {
        rtol: opts.rtol,
        atol: 1e-300,
        h0: 1e-3,
        h_max: 0.05,
        max_steps: 2_000_000,
    };
    let steps = integrate_adaptive(rhs, opts.t0, [x0, y0], opts.t0 + opts.t_max, &ode_opts, |rec| {
        let x = rec.y[0];
        sup = sup.max(x);
        let gap = x - cp;
        if !above && gap > floor {
            above = true;
            crossings += 1;
        } else if above && gap < -floor {
            above = false;
            crossings += 1;
        }
        if x > blow_bound || x < -0.1 * cp {
            blew_up = true;
            return Control::Stop;
        }
        if crossings >= opts.max_crossings {
            return Control::Stop;
        }
        if gap.abs() <= opts.tol * cp && rec.y[1].abs() <= opts.tol * cp {
            converged = true;
            return Control::Stop;
        }
        Control::Continue
    })?;

    if blew_up {
        return Err(Error::Integration(format!(
            "trajectory left the invariant region at t = {:.3}; the connection exists \
             analytically, so this indicates an integrator failure",
            steps.last().unwrap().t
        )));
    }
    if !converged && crossings == 0 {
        return Err(Error::Integration(format!(
            "no convergence and no oscillation within t_max = {}",
            opts.t_max
        )));
    }

    let regime = if crossings > 0 {
        Regime::Oscillatory
    } else {
        Regime::Monotone
    };

    // Normalize d0 = 1: near -infinity the orbit is z0 e^{l1 (t - t0)} to
    // leading order, so shifting time by ln(z0)/l1 - t0 puts the coefficient
    // at exactly 1 (up to the O(delta0^{3(p-1)}) start error).
    let shift = z0.ln() / l1 - opts.t0;
    let mut t_grid = Vec::with_capacity(steps.len());
    let mut values = Vec::with_capacity(steps.len());
    let mut derivative = Vec::with_capacity(steps.len());
    for rec in &steps {
        t_grid.push(rec.t + shift);
        values.push(rec.y[0]);
        derivative.push(rec.y[1]);
    }

    Ok(Profile {
        params,
        t_grid,
        values,
        derivative,
        shift,
        sup_value: sup,
        regime,
        crossings,
        exps,
        c1,
        c2,
    })
}

/// Asymptotic rates measured from the stored trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileAsymptotics {
    /// Log-slope of w on the far-left window; should match b_p.
    pub rate_minus_inf: f64,
    /// Decay rate of |c_p - w| on the right: |mu1| in the monotone regime,
    /// the envelope rate a/2 in the oscillatory one.
    pub rate_plus_inf: f64,
    /// How far the fitted near--infinity coefficient is from the normalized
    /// value 1.
    pub d0_residual: f64,
}

/// Fit the decay rates at both ends and re-check the d0 = 1 normalization.
pub fn profile_asymptotics(profile: &Profile, params: ProblemParams) -> Result<ProfileAsymptotics> {
    if params != profile.params {
        return Err(Error::InvalidParams(
            "params do not match the profile".into(),
        ));
    }
    let exps = &profile.exps;
    let cp = exps.c_p;
    let x0 = profile.values[0];

    // Left rate: log-slope on a window low enough that the nonlinear
    // correction (relative size ~ w^{p-1}/P(p b_p)) stays below 1e-2.
    let mut ts = Vec::new();
    let mut ln_w = Vec::new();
    for (i, &w) in profile.values.iter().enumerate() {
        if w >= 1.5 * x0 && w <= 15.0 * x0 {
            ts.push(profile.t_grid[i]);
            ln_w.push(w.ln());
        }
    }
    let left = fit_line(&ts, &ln_w)
        .map_err(|e| Error::FitWindow(format!("left rate window: {e}")))?;

    // d0: invert the three-term manifold expansion pointwise on the lowest
    // stretch of the orbit and average the recovered coefficient.
    let p = params.p;
    let mut coeffs = Vec::new();
    for (i, &w) in profile.values.iter().enumerate() {
        if w > 30.0 * x0 {
            break;
        }
        let mut z = w;
        for _ in 0..12 {
            z = w + profile.c1 * z.powf(p)
                - p * profile.c1 * profile.c2 * z.powf(2.0 * p - 1.0);
        }
        coeffs.push(z * (-exps.b_p * profile.t_grid[i]).exp());
    }
    if coeffs.len() < 3 {
        return Err(Error::FitWindow("d0 window has fewer than 3 points".into()));
    }
    let d0 = coeffs.iter().sum::<f64>() / coeffs.len() as f64;
    let d0_residual = (d0 - 1.0).abs();

    let rate_plus_inf = match profile.regime {
        Regime::Monotone => {
            let mut ts = Vec::new();
            let mut ln_gap = Vec::new();
            for (i, &w) in profile.values.iter().enumerate() {
                let gap = cp - w;
                if gap > 1e-7 * cp && gap < 1e-3 * cp {
                    ts.push(profile.t_grid[i]);
                    ln_gap.push(gap.ln());
                }
            }
            let fit = fit_line(&ts, &ln_gap)
                .map_err(|e| Error::FitWindow(format!("right rate window: {e}")))?;
            -fit.slope
        }
        Regime::Oscillatory => {
            // Envelope: local maxima of |w - c_p| after the first crossing.
            let mut ts = Vec::new();
            let mut ln_peak = Vec::new();
            let gaps: Vec<f64> = profile.values.iter().map(|&w| (w - cp).abs()).collect();
            let first_cross = profile
                .values
                .iter()
                .position(|&w| w > cp)
                .unwrap_or(profile.values.len());
            for i in first_cross.max(1)..gaps.len().saturating_sub(1) {
                if gaps[i] >= gaps[i - 1] && gaps[i] >= gaps[i + 1] && gaps[i] > 1e-12 * cp {
                    ts.push(profile.t_grid[i]);
                    ln_peak.push(gaps[i].ln());
                }
            }
            let fit = fit_line(&ts, &ln_peak)
                .map_err(|e| Error::FitWindow(format!("envelope window: {e}")))?;
            -fit.slope
        }
    };

    Ok(ProfileAsymptotics {
        rate_minus_inf: left.slope,
        rate_plus_inf,
        d0_residual,
    })
}

/// Result of running the undamped comparison system v'' = c_p^{p-1} v - v^p,
/// whose homoclinic orbit has conserved energy
/// E = v'^2/2 - c_p^{p-1} v^2 / 2 + v^{p+1}/(p+1) = 0.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonOrbit {
    /// Peak of v, analytically ((p+1)/2)^{1/(p-1)} c_p.
    pub sup: f64,
    /// max |E| along the orbit divided by c_p^{p-1} sup^2.
    pub energy_drift: f64,
}

/// Integrate the comparison orbit and report its energy conservation; serves
/// as a self-check of the integrator and of the envelope bound.
pub fn comparison_orbit(params: ProblemParams) -> Result<ComparisonOrbit> {
    let exps = derive_exponents(params)?;
    let p = params.p;
    if !(p > exps.serrin) {
        return Err(Error::Regime("comparison orbit needs p > serrin".into()));
    }
    let q = exps.c_p_pow;
    let lam = q.sqrt();
    let v0 = 1e-8 * exps.c_p;

    let rhs = move |_t: f64, y: [f64; 2]| [y[1], q * y[0] - y[0].max(0.0).powf(p)];
    let energy =
        move |y: [f64; 2]| 0.5 * y[1] * y[1] - 0.5 * q * y[0] * y[0] + y[0].max(0.0).powf(p + 1.0) / (p + 1.0);

    let mut sup = v0;
    let mut peaked = false;
    let mut max_e = 0.0f64;
    let mut prev: Option<[f64; 3]> = None; // (t, v, v') at the previous step
    let mut peak_refined = v0;
    let opts = AdaptiveOpts {
        h_max: 0.05,
        ..Default::default()
    };
    integrate_adaptive(rhs, 0.0, [v0, lam * v0], 2000.0, &opts, |rec| {
        let v = rec.y[0];
        max_e = max_e.max(energy(rec.y).abs());
        if v > sup {
            sup = v;
        }
        if let Some([pt, pv, pdv]) = prev {
            // Parabolic refinement of the peak where v' changes sign.
            if pdv > 0.0 && rec.y[1] <= 0.0 {
                peaked = true;
                let h = rec.t - pt;
                let denom = pdv - rec.y[1];
                let s = if denom > 0.0 { pdv / denom } else { 0.5 };
                let refined = pv + pdv * s * h - 0.5 * (pdv - rec.y[1]) / h * (s * h) * (s * h);
                peak_refined = peak_refined.max(refined).max(v);
            }
        }
        prev = Some([rec.t, v, rec.y[1]]);
        if peaked && v < 0.5 * v0 {
            return Control::Stop;
        }
        Control::Continue
    })?;

    let sup = peak_refined.max(sup);
    Ok(ComparisonOrbit {
        sup,
        energy_drift: max_e / (q * sup * sup),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params_13() -> ProblemParams {
        ProblemParams { dim: 10, p: 1.3 }
    }

    #[test]
    fn monotone_profile_reaches_cp() {
        let profile = shoot_profile(params_13(), &ShootOpts::default()).unwrap();
        assert_eq!(profile.regime, Regime::Monotone);
        assert_eq!(profile.crossings, 0);
        let cp = (80.0f64 / 9.0).powf(10.0 / 3.0);
        assert_relative_eq!(profile.sup_value, cp, max_relative = 1e-3);
        // Monotone profiles increase strictly along the stored grid.
        for w in profile.values.windows(2) {
            assert!(w[1] > w[0], "values must increase: {} !> {}", w[1], w[0]);
        }
        assert!(profile.sup_value <= cp * (1.0 + 1e-6));
    }

    #[test]
    fn oscillatory_profile_overshoots() {
        let profile = shoot_profile(ProblemParams { dim: 10, p: 1.4 }, &ShootOpts::default()).unwrap();
        assert_eq!(profile.regime, Regime::Oscillatory);
        let cp = 15.0f64.powf(2.5);
        assert!(profile.sup_value > cp);
        assert!(profile.crossings >= 2);
        // Still below the Hamiltonian envelope bound.
        assert!(profile.sup_value < hamiltonian_bound(profile.exponents()));
    }

    #[test]
    fn sup_identity_monotone() {
        // sup w^{p-1} = c_p^{p-1} within 1e-3 relative.
        let profile = shoot_profile(params_13(), &ShootOpts::default()).unwrap();
        let q = 80.0 / 9.0;
        let sup_pow = profile.sup_value.powf(0.3);
        assert!((sup_pow - q).abs() <= 1e-3 * q);
    }

    #[test]
    fn derivative_bounded_by_multiple_of_value() {
        let profile = shoot_profile(params_13(), &ShootOpts::default()).unwrap();
        let c = profile.derivative_ratio_bound();
        assert!(c.is_finite());
        assert!(c > 0.0);
        // The ratio starts near lambda1 = b_p and decreases.
        assert!(c <= 1.5 * profile.exponents().b_p);
        for (&w, &dw) in profile.values.iter().zip(&profile.derivative) {
            assert!(dw > 0.0 && dw <= c * w * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rates_match_eigenvalues() {
        let profile = shoot_profile(params_13(), &ShootOpts::default()).unwrap();
        let rates = profile_asymptotics(&profile, params_13()).unwrap();
        let b_p = 4.0 / 3.0;
        assert!((rates.rate_minus_inf - b_p).abs() <= 0.01 * b_p);
        let mu1 = (8.0 - 2.0 * 10.0f64.sqrt()) / 3.0;
        assert!((rates.rate_plus_inf - mu1).abs() <= 0.05 * mu1);
        assert!(rates.d0_residual < 1e-5);
    }

    #[test]
    fn oscillatory_envelope_rate_is_half_a() {
        let params = ProblemParams { dim: 10, p: 1.4 };
        let profile = shoot_profile(params, &ShootOpts::default()).unwrap();
        let rates = profile_asymptotics(&profile, params).unwrap();
        // a = 2 for (10, 1.4): envelope decays like e^{-t}.
        assert!((rates.rate_plus_inf - 1.0).abs() < 0.15);
    }

    #[test]
    fn normalization_d0_is_one() {
        let profile = shoot_profile(params_13(), &ShootOpts::default()).unwrap();
        // w(t) e^{-b_p t} -> 1 on the far left of the grid.
        let t = profile.t_grid[0];
        let ratio = profile.values[0] / (profile.exponents().b_p * t).exp();
        assert_relative_eq!(ratio, 1.0, max_relative = 1e-2);
        // And the left extension matches the first stored value at the seam.
        let seam = profile.evaluate(t);
        assert_relative_eq!(seam, profile.values[0], max_relative = 1e-9);
    }

    #[test]
    fn evaluate_matches_grid_and_extensions() {
        let profile = shoot_profile(params_13(), &ShootOpts::default()).unwrap();
        let mid = profile.t_grid.len() / 2;
        let t = profile.t_grid[mid];
        assert_relative_eq!(profile.evaluate(t), profile.values[mid], max_relative = 1e-12);
        // Far left: pure exponential.
        let t_left = profile.t_grid[0] - 20.0;
        let ratio = profile.evaluate(t_left) / (profile.exponents().b_p * t_left).exp();
        assert_relative_eq!(ratio, 1.0, max_relative = 1e-6);
        // Far right: c_p.
        let t_right = profile.t_grid.last().unwrap() + 10.0;
        assert_relative_eq!(
            profile.evaluate(t_right),
            profile.exponents().c_p,
            max_relative = 1e-12
        );
    }

    #[test]
    fn time_shift_invariance() {
        // Starting the internal clock elsewhere must not change the profile.
        let a = shoot_profile(params_13(), &ShootOpts::default()).unwrap();
        let b = shoot_profile(
            params_13(),
            &ShootOpts {
                t0: 7.5,
                ..Default::default()
            },
        )
        .unwrap();
        for t in [-12.0, -5.0, 0.0, 3.0, 8.0] {
            assert_relative_eq!(a.evaluate(t), b.evaluate(t), max_relative = 1e-7);
        }
    }

    #[test]
    fn comparison_orbit_conserves_energy() {
        let orbit = comparison_orbit(params_13()).unwrap();
        assert!(orbit.energy_drift < 1e-7, "drift {}", orbit.energy_drift);
        let expected = (2.3f64 / 2.0).powf(1.0 / 0.3) * (80.0f64 / 9.0).powf(10.0 / 3.0);
        assert_relative_eq!(orbit.sup, expected, max_relative = 1e-4);
    }

    #[test]
    fn rejects_p_outside_open_range() {
        assert!(shoot_profile(ProblemParams { dim: 10, p: 1.2 }, &ShootOpts::default()).is_err());
        assert!(shoot_profile(ProblemParams { dim: 10, p: 1.6 }, &ShootOpts::default()).is_err());
    }
}
