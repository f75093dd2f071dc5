//! Decay-rate fits, the far-field mass identity, the Kelvin transform, and
//! pointwise residual checks on computed solutions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::ProblemParams;
use crate::fit::fit_line;
use crate::potentials::Potential;
use crate::radial::{integrate_ball, integrate_full_space, radial_laplacian, RadialFunction};
use crate::solver::{solve_fast_decay, SolveOpts, SolveStatus};

/// A power-law fit of log u against log r. Fits with r_squared below 0.99
/// are to be treated as rejected; see [`ExponentFit::reliable`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
}

impl ExponentFit {
    pub fn reliable(&self) -> bool {
        self.r_squared >= 0.99
    }
}

/// Least-squares slope of log u vs log r over a window of the grid. The
/// window must sit inside the grid and span at least one decade.
pub fn fit_decay_exponent(u: &RadialFunction, window: (f64, f64)) -> Result<ExponentFit> {
    let (lo, hi) = window;
    let grid = &u.grid;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::FitWindow(format!("degenerate window [{lo}, {hi}]")));
    }
    if lo < grid.r_min * (1.0 - 1e-12) || hi > grid.r_max * (1.0 + 1e-12) {
        return Err(Error::FitWindow(format!(
            "window [{lo}, {hi}] leaves the grid [{}, {}]",
            grid.r_min, grid.r_max
        )));
    }
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::FitWindow(format!(
            "window [{lo}, {hi}] narrower than one decade"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &r) in grid.nodes.iter().enumerate() {
        if r >= lo && r <= hi && u.values[i] > 0.0 {
            xs.push(r.ln());
            ys.push(u.values[i].ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::FitWindow(format!(
            "only {} positive samples in [{lo}, {hi}]",
            xs.len()
        )));
    }
    let fit = fit_line(&xs, &ys)?;
    Ok(ExponentFit {
        slope: fit.slope,
        stderr: fit.stderr,
        window,
        r_squared: fit.r_squared,
    })
}

/// The far-field mass c_N ∫ V u^p dx, the coefficient of r^{2-N} that the
/// Newton potential of V u^p carries at infinity.
pub fn mass_identity(u: &RadialFunction, v: &Potential, params: ProblemParams) -> Result<f64> {
    let p = params.p;
    let values: Vec<f64> = u
        .grid
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &r)| v.eval(r) * u.values[i].max(0.0).powf(p))
        .collect();
    if values.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let (v_in, v_out) = v.tail_exponents();
    let f = RadialFunction::new(
        u.grid.clone(),
        values,
        v_in + p * u.inner_tail,
        v_out + p * u.outer_tail,
    )?;
    integrate_full_space(&f, params.dim, true)
}

/// Inversion image of a solution. u_sharp solves -Δu♯ = V♯ (u♯)^p whenever u
/// solves the equation with V, and rho is the power of V♯ at infinity
/// induced by a decay exponent alpha of V.
#[derive(Debug, Clone)]
pub struct KelvinPair {
    pub u_sharp: RadialFunction,
    pub v_sharp: RadialFunction,
    pub rho: f64,
}

/// u♯(r) = r^{2-N} u(1/r) and V♯(r) = r^{p(N-2)-N-2} V(1/r), on the same
/// grid. Requires the grid symmetric about r = 1 in log r, so that inversion
/// permutes the nodes exactly.
pub fn kelvin_transform(
    u: &RadialFunction,
    v: &Potential,
    params: ProblemParams,
    alpha: f64,
) -> Result<KelvinPair> {
    let grid = u.grid.clone();
    if !grid.is_symmetric() {
        return Err(Error::InvalidGrid(
            "inversion needs a grid symmetric about r = 1".into(),
        ));
    }
    let n = params.n();
    let p = params.p;
    let m = grid.len();
    let e_v = p * (n - 2.0) - n - 2.0;
    let mut us = vec![0.0; m];
    let mut vs = vec![0.0; m];
    for i in 0..m {
        let r = grid.nodes[i];
        us[i] = r.powf(2.0 - n) * u.values[m - 1 - i];
        vs[i] = r.powf(e_v) * v.eval(1.0 / r);
    }
    let u_sharp = RadialFunction::new(
        grid.clone(),
        us,
        2.0 - n - u.outer_tail,
        2.0 - n - u.inner_tail,
    )?;
    let (v_in, v_out) = v.tail_exponents();
    let v_sharp = RadialFunction::new(grid, vs, e_v - v_out, e_v - v_in)?;
    let rho = -alpha - 4.0 + (p - 1.0) * (n - 2.0);
    Ok(KelvinPair {
        u_sharp,
        v_sharp,
        rho,
    })
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// Δu + V u^p at every node.
    pub field: RadialFunction,
    /// sup over the middle half of |Δu + V u^p| / (V u^p).
    pub norm: f64,
}

/// Pointwise defect of -Δu = V u^p, weighted by the right-hand side. The
/// norm covers the middle half of the grid only, away from the one-sided
/// stencils and the tail extensions.
pub fn pde_residual(
    u: &RadialFunction,
    v: &Potential,
    params: ProblemParams,
) -> Result<ResidualReport> {
    let lap = radial_laplacian(u, params.dim)?;
    let p = params.p;
    let grid = u.grid.clone();
    let rhs: Vec<f64> = grid
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &r)| v.eval(r) * u.values[i].max(0.0).powf(p))
        .collect();
    let field_vals: Vec<f64> = (0..grid.len()).map(|i| lap.values[i] + rhs[i]).collect();
    let mut norm = 0.0f64;
    for i in grid.middle_half() {
        if rhs[i] > 0.0 {
            norm = norm.max(field_vals[i].abs() / rhs[i]);
        }
    }
    let field = RadialFunction::new(grid, field_vals, lap.inner_tail, lap.outer_tail)?;
    Ok(ResidualReport { field, norm })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlowDecayReport {
    /// Per anchor k, the mid-range log-log slope of the solution.
    pub mid_slopes: Vec<(f64, ExponentFit)>,
    /// -(2+α)/(p-1), the slope the slow branch approaches as k grows.
    pub target_slope: f64,
    /// -(N-2), the slope of every anchor's far field.
    pub fast_slope: f64,
    /// Per anchor k, ∫_{B_10} V u^p dx.
    pub local_masses: Vec<(f64, f64)>,
    /// Whether the last convergent slope is within 10% of the target.
    pub crossover_reached: bool,
    /// Whether the slopes move monotonically from fast toward target.
    pub monotone_drift: bool,
    /// The widest window a slope fit may use; each fit records its own.
    pub window: (f64, f64),
    /// Anchors whose solve or fit failed or was refused, with the reason.
    pub failures: Vec<(f64, String)>,
}

/// Track how the mid-range decay of u_k leaves the fast rate -(N-2) as k
/// grows, for a potential decaying like r^α at infinity. The k → ∞ limit
/// itself is out of reach; the report documents the trend at the anchors
/// given.
///
/// Each slope is fitted between r = 10 and a third of the matching radius
/// r₂ = (ν/C_slow)^{1/(N-2-θ)}, where C_slow r^{-θ} is the self-similar
/// branch the solutions bend toward and ν r^{2-N} is the far field that
/// peels off below it. Below r₂ the branch is visible if it is present at
/// all; past r₂ every solution reads -(N-2) and a fixed window would dilute
/// the drift with tail decades. The window is clamped to [100, r_max/100],
/// so small-k fits still report the fast rate over a full decade.
///
/// Anchors whose transition radius k^{1/(N-2-2/(p-1))} leaves the grid are
/// refused: past that point the truncated anchor no longer depends on k and
/// the solve would return a grid artifact.
pub fn slow_decay_probe(
    params: ProblemParams,
    v: &Potential,
    k_list: &[f64],
    opts: &SolveOpts,
) -> Result<SlowDecayReport> {
    let alpha = match v.meta.alpha {
        Some(a) if a < 0.0 => a,
        _ => {
            return Err(Error::Regime(
                "slow-decay probe needs a potential with negative decay exponent alpha".into(),
            ))
        }
    };
    if k_list.is_empty() {
        return Err(Error::InvalidParams("empty k list".into()));
    }
    let n = params.n();
    let p = params.p;
    let theta_slow = (2.0 + alpha) / (p - 1.0);
    if !(theta_slow > 0.0 && theta_slow < n - 2.0) {
        return Err(Error::Regime(format!(
            "slow branch exponent {theta_slow} outside (0, N-2)"
        )));
    }
    let c_slow = (theta_slow * (n - 2.0 - theta_slow)).powf(1.0 / (p - 1.0));
    let b_p = n - 2.0 - 2.0 / (p - 1.0);
    let target_slope = -theta_slow;
    let fast_slope = -(n - 2.0);
    let grid = opts
        .grid
        .clone()
        .unwrap_or_else(crate::radial::default_grid);
    let window = (10.0, grid.r_max / 100.0);

    let mut mid_slopes = Vec::new();
    let mut local_masses = Vec::new();
    let mut failures = Vec::new();

    for &k in k_list {
        let r_star = k.powf(1.0 / b_p);
        if r_star > grid.r_max / 100.0 {
            failures.push((
                k,
                format!(
                    "anchor transition radius {r_star:.2e} leaves the grid; \
                     the truncated anchor would no longer depend on k"
                ),
            ));
            continue;
        }
        match solve_fast_decay(params, v, k, opts) {
            Ok(report) => {
                if report.status != SolveStatus::Converged {
                    failures.push((k, format!("{} sweeps without convergence", report.iterations)));
                    continue;
                }
                let r2 = (report.nu / c_slow).powf(1.0 / (n - 2.0 - theta_slow));
                let hi = (r2 / 3.0).clamp(100.0, window.1);
                match fit_decay_exponent(&report.solution, (window.0, hi)) {
                    Ok(fit) => mid_slopes.push((k, fit)),
                    Err(e) => {
                        failures.push((k, e.to_string()));
                        continue;
                    }
                }
                let solution_grid = report.solution.grid.clone();
                let values: Vec<f64> = solution_grid
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| v.eval(r) * report.solution.values[i].max(0.0).powf(p))
                    .collect();
                let (v_in, v_out) = v.tail_exponents();
                let f = RadialFunction::new(
                    solution_grid,
                    values,
                    v_in + p * report.solution.inner_tail,
                    v_out + p * report.solution.outer_tail,
                )?;
                local_masses.push((k, integrate_ball(&f, params.dim, 10.0)?));
            }
            Err(e) => failures.push((k, e.to_string())),
        }
    }

    let crossover_reached = mid_slopes
        .last()
        .map(|(_, fit)| (fit.slope - target_slope).abs() <= 0.1 * target_slope.abs())
        .unwrap_or(false);
    let monotone_drift = mid_slopes
        .windows(2)
        .all(|w| w[1].1.slope >= w[0].1.slope - 1e-3);

    Ok(SlowDecayReport {
        mid_slopes,
        target_slope,
        fast_slope,
        local_masses,
        crossover_reached,
        monotone_drift,
        window,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PotentialMeta;
    use crate::profile::{shoot_profile, ShootOpts};
    use crate::radial::{default_grid, make_log_grid};
    use crate::solver::build_wk;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn params() -> ProblemParams {
        ProblemParams::new(10, 1.3).unwrap()
    }

    fn anchor(k: f64) -> RadialFunction {
        let profile = shoot_profile(params(), &ShootOpts::default()).unwrap();
        build_wk(params(), &profile, k, default_grid()).unwrap()
    }

    fn sharp_potential(v: &Potential, pr: ProblemParams) -> Potential {
        let e_v = pr.p * (pr.n() - 2.0) - pr.n() - 2.0;
        let inner = v.clone();
        Potential::custom(
            Arc::new(move |r: f64| r.powf(e_v) * inner.eval(1.0 / r)),
            PotentialMeta::default(),
        )
    }

    #[test]
    fn exact_power_has_exact_slope() {
        let grid = default_grid();
        let u = RadialFunction::from_fn(grid, |r| r.powf(-3.0), -3.0, -3.0).unwrap();
        let fit = fit_decay_exponent(&u, (1e-4, 1e4)).unwrap();
        assert_relative_eq!(fit.slope, -3.0, max_relative = 1e-12);
        assert!(fit.reliable());
        assert!(fit.stderr < 1e-6);
    }

    #[test]
    fn window_validation() {
        let grid = default_grid();
        let u = RadialFunction::from_fn(grid, |r| r.powf(-3.0), -3.0, -3.0).unwrap();
        assert!(fit_decay_exponent(&u, (1e-12, 1e-10)).is_err());
        assert!(fit_decay_exponent(&u, (1.0, 5.0)).is_err());
        assert!(fit_decay_exponent(&u, (10.0, 1.0)).is_err());
    }

    #[test]
    fn anchor_slopes_at_both_ends() {
        let pr = params();
        let u = anchor(1e-3);
        let s = 2.0 / (pr.p - 1.0);
        let origin = fit_decay_exponent(&u, (1e-9, 1e-8)).unwrap();
        assert_relative_eq!(origin.slope, -s, max_relative = 1e-2);
        assert!(origin.reliable());
        let far = fit_decay_exponent(&u, (1e4, 1e6)).unwrap();
        assert_relative_eq!(far.slope, -(pr.n() - 2.0), max_relative = 1e-2);
        assert!(far.reliable());
    }

    #[test]
    fn mass_identity_recovers_k() {
        let pr = params();
        let u = anchor(1e-3);
        let nu = mass_identity(&u, &Potential::constant_one(), pr).unwrap();
        assert_relative_eq!(nu, 1e-3, max_relative = 1e-2);

        let zero = RadialFunction::zeros(default_grid());
        assert_eq!(
            mass_identity(&zero, &Potential::constant_one(), pr).unwrap(),
            0.0
        );
    }

    #[test]
    fn mass_identity_matches_solver_nu() {
        let pr = params();
        let v = Potential::bump(0.2, 10).unwrap();
        let report = solve_fast_decay(pr, &v, 1e-3, &SolveOpts::default()).unwrap();
        let nu = mass_identity(&report.solution, &v, pr).unwrap();
        assert_relative_eq!(nu, report.nu, max_relative = 1e-12);
    }

    #[test]
    fn inversion_fixes_the_kernel() {
        let pr = params();
        let n = pr.n();
        let grid = default_grid();
        let u = RadialFunction::from_fn(grid, |r| r.powf(2.0 - n), 2.0 - n, 2.0 - n).unwrap();
        let pair = kelvin_transform(&u, &Potential::constant_one(), pr, 0.0).unwrap();
        for &x in &pair.u_sharp.values {
            assert_relative_eq!(x, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn inversion_is_an_involution() {
        let pr = params();
        let v = Potential::radial_decreasing(-1.0).unwrap();
        let u = anchor(1e-3);
        let pair = kelvin_transform(&u, &v, pr, -1.0).unwrap();
        assert_relative_eq!(pair.rho, -0.6, max_relative = 1e-12);
        assert!(pair.rho > -2.0 && pair.rho < 0.0);

        let back = kelvin_transform(&pair.u_sharp, &sharp_potential(&v, pr), pr, pair.rho)
            .unwrap();
        assert_relative_eq!(back.rho, -1.0, max_relative = 1e-12);
        for i in 0..u.grid.len() {
            assert_relative_eq!(back.u_sharp.values[i], u.values[i], max_relative = 1e-10);
            assert_relative_eq!(
                back.v_sharp.values[i],
                v.eval(u.grid.nodes[i]),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn inversion_needs_a_symmetric_grid() {
        let pr = params();
        let grid = Arc::new(make_log_grid(1e-2, 1e6, 801).unwrap());
        let u = RadialFunction::from_fn(grid, |r| r.powf(-3.0), -3.0, -3.0).unwrap();
        assert!(matches!(
            kelvin_transform(&u, &Potential::constant_one(), pr, 0.0),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn transformed_anchor_still_solves_its_equation() {
        let pr = params();
        let v = Potential::constant_one();
        let u = anchor(1e-3);
        let pair = kelvin_transform(&u, &v, pr, 0.0).unwrap();
        let report = pde_residual(&pair.u_sharp, &sharp_potential(&v, pr), pr).unwrap();
        assert!(report.norm <= 1e-2, "kelvin residual = {}", report.norm);
    }

    #[test]
    fn residual_vanishes_on_the_anchor_and_flags_a_fake() {
        let pr = params();
        let u = anchor(1e2);
        let v = Potential::constant_one();
        let clean = pde_residual(&u, &v, pr).unwrap();
        assert!(clean.norm <= 1e-3, "residual = {}", clean.norm);

        let doubled = RadialFunction::new(
            u.grid.clone(),
            u.values.iter().map(|&x| 2.0 * x).collect(),
            u.inner_tail,
            u.outer_tail,
        )
        .unwrap();
        let bad = pde_residual(&doubled, &v, pr).unwrap();
        assert!(bad.norm > 0.1, "fake not flagged: {}", bad.norm);
    }

    #[test]
    fn probe_refuses_a_flat_potential() {
        let pr = params();
        assert!(matches!(
            slow_decay_probe(pr, &Potential::constant_one(), &[1.0], &SolveOpts::default()),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn probe_tracks_the_drift() {
        let pr = params();
        let v = Potential::radial_decreasing(-1.0).unwrap();
        let report =
            slow_decay_probe(pr, &v, &[1e2, 1e4, 1e6], &SolveOpts::default()).unwrap();
        assert_relative_eq!(report.target_slope, -10.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(report.fast_slope, -8.0, max_relative = 1e-12);
        assert_eq!(report.mid_slopes.len(), 3);
        assert!(report.monotone_drift);
        for (_, fit) in &report.mid_slopes {
            assert!(fit.slope > -8.5 && fit.slope < -3.0, "slope {}", fit.slope);
        }
        for w in report.local_masses.windows(2) {
            assert!(w[1].1 > w[0].1 && w[1].1.is_finite());
        }
    }

    #[test]
    fn slow_decay_exponent_bookkeeping() {
        for n in [6usize, 8, 10, 12] {
            let nf = n as f64;
            for alpha in [-1.5, -1.0, -0.5] {
                let serrin = nf / (nf - 2.0);
                let p = serrin + 0.15;
                let head = 2.0 / (p - 1.0);
                let slow = (2.0 + alpha) / (p - 1.0);
                assert!(p > serrin);
                assert!(head > slow && slow > 0.0);
                assert!(slow < nf - 2.0);
            }
        }
    }
}
