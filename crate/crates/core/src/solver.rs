//! Monotone iteration for the singular problem -Δu = V u^p on the punctured
//! space, anchored at the separable solutions w_k.
//!
//! Each sweep replaces u by w_k + Γ * (V u^p - w_k^p), a single Newton
//! potential of the difference. Folding the anchor's own potential into the
//! integrand keeps the quadrature bias of the large r^{-sp} head out of the
//! update: the head cancels inside the integrand instead of being
//! re-integrated every pass, which would otherwise compound by a factor of
//! roughly p per iteration.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{
    derive_exponents, select_working_exponents, validate_regime, ProblemParams,
};
use crate::potentials::{Potential, SignClass};
use crate::profile::{shoot_profile, Profile, Regime, ShootOpts};
use crate::radial::{
    default_grid, integrate_full_space, newton_potential, RadialFunction, RadialGrid,
};

/// Which side of w_k the iterates approach the solution from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Increasing,
    Decreasing,
    TwoStage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
}

#[derive(Debug, Clone)]
pub struct SolveOpts {
    /// Per-sweep stop tolerance: the largest relative change of any node.
    pub tol: f64,
    pub max_iter: usize,
    /// Grid for the iteration; None takes the default grid.
    pub grid: Option<Arc<RadialGrid>>,
    pub shoot: ShootOpts,
}

impl Default for SolveOpts {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            grid: None,
            shoot: ShootOpts::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: RadialFunction,
    /// Far-field mass c_N ∫ V u^p, the coefficient of r^{2-N} at infinity.
    pub nu: f64,
    /// The same coefficient read off pointwise at r_max/10.
    pub nu_far_field: f64,
    pub k: f64,
    pub iterations: usize,
    pub direction: Direction,
    pub status: SolveStatus,
    /// Largest node-relative change of each sweep, in order.
    pub sup_change_trace: Vec<f64>,
    /// sup |u - w_k| r^{θ0} (1+r)^{N-2-θ0}, the barrier amplitude.
    pub barrier_eps: f64,
    /// Working exponent used in the barrier weight.
    pub theta0: f64,
    /// Final sweep change relative to the solution scale; the fixed-point
    /// defect the iteration stopped at.
    pub residual_norm: f64,
}

/// The separable anchor w_k(r) = r^{-s} w(-ln r + ln k / b_p) on a grid.
/// Only monotone profiles give positive anchors; oscillatory ones are
/// rejected.
pub fn build_wk(
    params: ProblemParams,
    profile: &Profile,
    k: f64,
    grid: Arc<RadialGrid>,
) -> Result<RadialFunction> {
    if profile.regime != Regime::Monotone {
        return Err(Error::OscillatoryProfile);
    }
    if profile.params != params {
        return Err(Error::InvalidParams(format!(
            "profile was shot for {:?}, not {:?}",
            profile.params, params
        )));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParams(format!("k must be positive, got {k}")));
    }
    let exps = profile.exponents();
    let s = exps.sing_exp;
    let shift_k = k.ln() / exps.b_p;
    let values: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&r| r.powf(-s) * profile.evaluate(-r.ln() + shift_k))
        .collect();
    RadialFunction::new(grid, values, -s, 2.0 - params.n())
}

/// One plain Picard sweep Γ * (V u^p), with no anchor shift.
pub fn picard_step(
    v: &Potential,
    u: &RadialFunction,
    params: ProblemParams,
) -> Result<RadialFunction> {
    let p = params.p;
    let (v_in, v_out) = v.tail_exponents();
    let values: Vec<f64> = u
        .grid
        .nodes
        .iter()
        .zip(&u.values)
        .map(|(&r, &uv)| v.eval(r) * uv.max(0.0).powf(p))
        .collect();
    let f = RadialFunction::new(
        u.grid.clone(),
        values,
        v_in + p * u.inner_tail,
        v_out + p * u.outer_tail,
    )?;
    newton_potential(&f, params.dim)
}

struct StageOutcome {
    u: RadialFunction,
    iterations: usize,
    trace: Vec<f64>,
    status: SolveStatus,
    final_gap: f64,
}

fn weighted_sup(grid: &RadialGrid, a: &[f64], b: &[f64], weight: &[f64]) -> f64 {
    grid.nodes
        .iter()
        .enumerate()
        .map(|(i, _)| (a[i] - b[i]).abs() * weight[i])
        .fold(0.0, f64::max)
}

fn norm_weight(grid: &RadialGrid, exp_in: f64, n: f64) -> Vec<f64> {
    grid.nodes
        .iter()
        .map(|&r| r.powf(exp_in) * (1.0 + r).powf(n - 2.0 - exp_in))
        .collect()
}

/// Sweeps u ← base + Γ * (V u^p - base_rhs) until no node moves by more than
/// tol of its own magnitude. The node-relative stop keeps the criterion
/// meaningful across the thirty-odd orders of magnitude a solution spans;
/// any fixed weight would let one end of the grid drown out the other.
/// Every sweep must move the same way; a reversal beyond roundoff scale
/// aborts the run.
fn iterate_monotone(
    params: ProblemParams,
    v_vals: &[f64],
    base: &RadialFunction,
    base_rhs: &[f64],
    g_tails: (f64, f64),
    increasing: bool,
    opts: &SolveOpts,
) -> Result<StageOutcome> {
    let p = params.p;
    let grid = base.grid.clone();
    let m = grid.len();
    let mono_tol = 1e-9;

    let mut u = base.clone();
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIterReached;
    let mut iterations = opts.max_iter;
    let mut final_gap = f64::INFINITY;

    for iter in 1..=opts.max_iter {
        let g_vals: Vec<f64> = (0..m)
            .map(|i| v_vals[i] * u.values[i].max(0.0).powf(p) - base_rhs[i])
            .collect();
        let g = RadialFunction::new(grid.clone(), g_vals, g_tails.0, g_tails.1)?;
        let z = newton_potential(&g, params.dim)?;
        let next_vals: Vec<f64> = (0..m).map(|i| base.values[i] + z.values[i]).collect();

        let mut violation = 0.0f64;
        let mut delta = 0.0f64;
        for i in 0..m {
            let scale = next_vals[i]
                .abs()
                .max(u.values[i].abs())
                .max(f64::MIN_POSITIVE);
            let reversal = if increasing {
                u.values[i] - next_vals[i]
            } else {
                next_vals[i] - u.values[i]
            };
            violation = violation.max(reversal / scale);
            delta = delta.max((next_vals[i] - u.values[i]).abs() / scale);
        }
        if violation > mono_tol {
            return Err(Error::MonotonicityViolation {
                iteration: iter,
                violation,
                tolerance: mono_tol,
            });
        }

        trace.push(delta);
        u = RadialFunction::new(grid.clone(), next_vals, base.inner_tail, base.outer_tail)?;
        final_gap = delta;
        if delta <= opts.tol {
            status = SolveStatus::Converged;
            iterations = iter;
            break;
        }
    }

    Ok(StageOutcome {
        u,
        iterations,
        trace,
        status,
        final_gap,
    })
}

fn check_regime(params: ProblemParams, v: &Potential) -> Result<()> {
    let report = validate_regime(params, v.growth_exponent(), v.meta.alpha)?;
    if report.all_pass() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().iter().map(|c| c.name).collect();
        Err(Error::Regime(format!(
            "hypothesis checks failed: {}",
            names.join(", ")
        )))
    }
}

fn finalize(
    params: ProblemParams,
    v: &Potential,
    out: StageOutcome,
    wk: &RadialFunction,
    k: f64,
    direction: Direction,
    theta0: f64,
) -> Result<SolveReport> {
    let p = params.p;
    let n = params.n();
    let grid = out.u.grid.clone();
    let (v_in, v_out) = v.tail_exponents();
    let f_vals: Vec<f64> = grid
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &r)| v.eval(r) * out.u.values[i].max(0.0).powf(p))
        .collect();
    let f = RadialFunction::new(
        grid.clone(),
        f_vals,
        v_in + p * out.u.inner_tail,
        v_out + p * out.u.outer_tail,
    )?;
    let nu = integrate_full_space(&f, params.dim, true)?;
    let r_far = grid.r_max / 10.0;
    let nu_far_field = out.u.eval(r_far) * r_far.powf(n - 2.0);

    let barrier_weight = norm_weight(&grid, theta0, n);
    let barrier_eps = weighted_sup(&grid, &out.u.values, &wk.values, &barrier_weight);

    Ok(SolveReport {
        solution: out.u,
        nu,
        nu_far_field,
        k,
        iterations: out.iterations,
        direction,
        status: out.status,
        sup_change_trace: out.trace,
        barrier_eps,
        theta0,
        residual_norm: out.final_gap,
    })
}

/// Solve -Δu = V u^p near w_k for a potential on one side of 1. V ≥ 1 gives
/// an increasing sweep, V ≤ 1 a decreasing one; a potential crossing 1 is
/// refused here and belongs to [`solve_mixed`].
pub fn solve_fast_decay(
    params: ProblemParams,
    v: &Potential,
    k: f64,
    opts: &SolveOpts,
) -> Result<SolveReport> {
    let exps = derive_exponents(params)?;
    check_regime(params, v)?;
    let class = v.sign_class().ok_or_else(|| {
        Error::Regime("potential crosses 1; use the two-stage solver".into())
    })?;
    let increasing = class == SignClass::AboveOne;
    let direction = if increasing {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };

    let profile = shoot_profile(params, &opts.shoot)?;
    let grid = opts.grid.clone().unwrap_or_else(default_grid);
    let wk = build_wk(params, &profile, k, grid.clone())?;
    let tau0 = v.meta.tau0.unwrap_or(f64::INFINITY);
    let working = select_working_exponents(params, tau0)?;

    let p = params.p;
    let s = exps.sing_exp;
    let v_vals: Vec<f64> = grid.nodes.iter().map(|&r| v.eval(r)).collect();
    let wk_rhs: Vec<f64> = wk.values.iter().map(|&w| w.powf(p)).collect();
    let g_tails = (
        working.tau1 - s * p,
        p * (2.0 - params.n()) + v.growth_exponent().max(0.0),
    );

    let out = iterate_monotone(params, &v_vals, &wk, &wk_rhs, g_tails, increasing, opts)?;
    finalize(params, v, out, &wk, k, direction, working.theta0)
}

/// Solve for a potential that crosses 1: first a decreasing run under
/// min(V, 1) from w_k, then an increasing run under the full V from the
/// first fixed point.
pub fn solve_mixed(
    params: ProblemParams,
    v: &Potential,
    k: f64,
    opts: &SolveOpts,
) -> Result<SolveReport> {
    let exps = derive_exponents(params)?;
    check_regime(params, v)?;

    let profile = shoot_profile(params, &opts.shoot)?;
    let grid = opts.grid.clone().unwrap_or_else(default_grid);
    let wk = build_wk(params, &profile, k, grid.clone())?;
    let tau0 = v.meta.tau0.unwrap_or(f64::INFINITY);
    let working = select_working_exponents(params, tau0)?;

    let p = params.p;
    let s = exps.sing_exp;
    let m = grid.len();
    let v_full: Vec<f64> = grid.nodes.iter().map(|&r| v.eval(r)).collect();
    let v_low: Vec<f64> = v_full.iter().map(|&x| x.min(1.0)).collect();

    let wk_rhs: Vec<f64> = wk.values.iter().map(|&w| w.powf(p)).collect();
    let g_tails_low = (working.tau1 - s * p, p * (2.0 - params.n()));
    let stage1 = iterate_monotone(params, &v_low, &wk, &wk_rhs, g_tails_low, false, opts)?;

    let u0 = stage1.u.clone();
    let u0_rhs: Vec<f64> = (0..m)
        .map(|i| v_low[i] * u0.values[i].max(0.0).powf(p))
        .collect();
    let g_tails_full = (
        working.tau1 - s * p,
        p * (2.0 - params.n()) + v.growth_exponent().max(0.0),
    );
    let stage2 = iterate_monotone(params, &v_full, &u0, &u0_rhs, g_tails_full, true, opts)?;

    let status = if stage1.status == SolveStatus::Converged
        && stage2.status == SolveStatus::Converged
    {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterReached
    };
    let mut trace = stage1.trace;
    trace.extend_from_slice(&stage2.trace);
    let out = StageOutcome {
        u: stage2.u,
        iterations: stage1.iterations + stage2.iterations,
        trace,
        status,
        final_gap: stage1.final_gap.max(stage2.final_gap),
    };
    finalize(params, v, out, &wk, k, Direction::TwoStage, working.theta0)
}

/// The map k ↦ ν(k) over a list of anchors. A failed k is recorded and the
/// sweep moves on.
pub fn nu_of_k(
    params: ProblemParams,
    v: &Potential,
    k_list: &[f64],
    opts: &SolveOpts,
) -> Vec<(f64, Result<SolveReport>)> {
    k_list
        .iter()
        .map(|&k| {
            let res = match v.sign_class() {
                Some(_) => solve_fast_decay(params, v, k, opts),
                None => solve_mixed(params, v, k, opts),
            };
            (k, res)
        })
        .collect()
}
