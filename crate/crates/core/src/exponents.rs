//! Critical exponents and derived constants for `-Δu = V u^p` in dimension N.
//!
//! Everything downstream (profile shooting, seed solutions, barrier widths)
//! is parametrised by the numbers computed here, so they are all derived from
//! `(N, p)` in one place instead of being retyped at each call site.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Dimension and nonlinearity exponent. The only free parameters of the
/// constant-potential problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    /// Space dimension N >= 3.
    pub dim: usize,
    /// Nonlinearity exponent p > 1.
    pub p: f64,
}

impl ProblemParams {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParams(format!(
                "dimension must be at least 3, got {dim}"
            )));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParams(format!(
                "exponent p must be a finite number greater than 1, got {p}"
            )));
        }
        Ok(Self { dim, p })
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }
}

/// Surface measure of the unit sphere in R^N, via the two-step recursion
/// S_1 = 2, S_2 = 2*pi, S_N = 2*pi/(N-2) * S_{N-2}.
pub fn unit_sphere_area(dim: usize) -> f64 {
    let mut area = if dim % 2 == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
    let mut n = if dim % 2 == 1 { 1 } else { 2 };
    while n < dim {
        n += 2;
        area *= 2.0 * std::f64::consts::PI / (n as f64 - 2.0);
    }
    area
}

/// All constants attached to a pair (N, p).
///
/// `mu1`, `mu2` are the roots of H(mu) = mu^2 + a*mu + (p-1)*c_p^{p-1},
/// ordered by real part (mu1 >= mu2); they are real exactly when
/// p <= p_c and a complex-conjugate pair otherwise. `tau_star` and
/// `tau_sharp` exist only in the monotone regime p <= p_c.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentSet {
    pub params: ProblemParams,
    /// Serrin exponent N/(N-2): fast-decaying singular solutions need p above it.
    pub serrin: f64,
    /// Sobolev exponent (N+2)/(N-2).
    pub sobolev: f64,
    /// Joseph-Lundgren exponent 1 + 4/(N-4+2*sqrt(N-1)): monotone/oscillatory split.
    pub p_c: f64,
    /// c_p^{p-1} = (2/(p-1)) * (N-2-2/(p-1)).
    pub c_p_pow: f64,
    /// The singular-solution constant c_p (NaN for p <= serrin where it is undefined).
    pub c_p: f64,
    /// Damping coefficient a = 4/(p-1) - N + 2 of the profile ODE.
    pub a: f64,
    /// b_p = N - 2 - 2/(p-1), the fast-decay correction exponent.
    pub b_p: f64,
    /// Unstable eigenvalue at the origin equilibrium: lambda1 = b_p.
    pub lambda1: f64,
    /// Stable eigenvalue at the origin equilibrium: lambda2 = -2/(p-1).
    pub lambda2: f64,
    /// Root of H with the larger real part.
    pub mu1: Complex64,
    /// Root of H with the smaller real part.
    pub mu2: Complex64,
    /// tau*_p, lower edge of the admissible perturbation window (p <= p_c only).
    pub tau_star: Option<f64>,
    /// tau^#_p, upper edge of the admissible perturbation window (p <= p_c only).
    pub tau_sharp: Option<f64>,
    /// Exponent 2/(p-1) of the singular solution c_p |x|^{-2/(p-1)}.
    pub sing_exp: f64,
    /// Normalisation of the fundamental solution: c_N = 1/((N-2)*omega_{N-1}).
    pub c_n: f64,
    /// Surface measure of the unit sphere in R^N.
    pub omega: f64,
}

impl ExponentSet {
    /// Discriminant of H: a^2 - 4(p-1) c_p^{p-1}. Nonnegative iff p <= p_c.
    pub fn discriminant(&self) -> f64 {
        self.a * self.a - 4.0 * (self.params.p - 1.0) * self.c_p_pow
    }
}

/// Compute the full exponent set for (N, p).
pub fn derive_exponents(params: ProblemParams) -> Result<ExponentSet> {
    // Re-validate: the struct fields are public.
    let params = ProblemParams::new(params.dim, params.p)?;
    let n = params.n();
    let p = params.p;

    let serrin = n / (n - 2.0);
    let sobolev = (n + 2.0) / (n - 2.0);
    let p_c = 1.0 + 4.0 / (n - 4.0 + 2.0 * (n - 1.0).sqrt());

    let s = 2.0 / (p - 1.0); // 2/(p-1), used everywhere below
    let b_p = n - 2.0 - s;
    let c_p_pow = s * b_p;
    let c_p = if c_p_pow > 0.0 {
        c_p_pow.powf(1.0 / (p - 1.0))
    } else {
        f64::NAN
    };
    let a = 2.0 * s - (n - 2.0);

    let disc = a * a - 4.0 * (p - 1.0) * c_p_pow;
    let (mu1, mu2) = if disc >= 0.0 {
        let root = disc.sqrt();
        (
            Complex64::new((-a + root) / 2.0, 0.0),
            Complex64::new((-a - root) / 2.0, 0.0),
        )
    } else {
        let im = (-disc).sqrt() / 2.0;
        (Complex64::new(-a / 2.0, im), Complex64::new(-a / 2.0, -im))
    };

    // tau* and tau^# are the roots of (s - tau)(N - 2 - s + tau) = p c_p^{p-1};
    // they coincide with -mu1, -mu2 in the monotone regime.
    let (tau_star, tau_sharp) = if disc >= 0.0 {
        let half_a = a / 2.0;
        let root = (half_a * half_a - 2.0 * b_p).sqrt();
        (Some(half_a - root), Some(half_a + root))
    } else {
        (None, None)
    };

    let omega = unit_sphere_area(params.dim);
    let c_n = 1.0 / ((n - 2.0) * omega);

    Ok(ExponentSet {
        params,
        serrin,
        sobolev,
        p_c,
        c_p_pow,
        c_p,
        a,
        b_p,
        lambda1: b_p,
        lambda2: -s,
        mu1,
        mu2,
        tau_star,
        tau_sharp,
        sing_exp: s,
        c_n,
        omega,
    })
}

/// Barrier exponents used by the perturbed solve: the perturbation of the seed
/// is confined to |v| <= eps * |x|^{-theta0} (1+|x|)^{2-N+theta0}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WorkingExponents {
    /// Slice of the near-origin decay rate tau0 actually used by the barrier.
    pub tau1: f64,
    /// Leftover rate tau2 = tau0 - tau1 > 0.
    pub tau2: f64,
    /// Barrier head exponent theta0 = 2/(p-1) - tau1.
    pub theta0: f64,
}

/// Split the near-origin rate `tau0` of the potential into the pair
/// (tau1, tau2) and produce the barrier exponent theta0.
///
/// tau1 sits strictly inside (tau*_p, tau^#_p), which forces the key
/// inequality theta0 (N-2-theta0) > p c_p^{p-1}: the linearised iteration
/// contracts on the barrier cone. Requires serrin < p < p_c and tau0 > tau*_p.
pub fn select_working_exponents(params: ProblemParams, tau0: f64) -> Result<WorkingExponents> {
    let exps = derive_exponents(params)?;
    let p = params.p;
    if !(p > exps.serrin) {
        return Err(Error::Regime(format!(
            "p = {p} must exceed the Serrin exponent {:.6}",
            exps.serrin
        )));
    }
    if !(p < exps.p_c) {
        return Err(Error::Regime(format!(
            "p = {p} must lie strictly below the Joseph-Lundgren exponent {:.6}",
            exps.p_c
        )));
    }
    let tau_star = exps.tau_star.expect("real roots for p < p_c");
    let tau_sharp = exps.tau_sharp.expect("real roots for p < p_c");
    if !(tau0 > tau_star) {
        return Err(Error::Regime(format!(
            "tau0 = {tau0} must exceed tau* = {tau_star:.6}"
        )));
    }

    // Half the distance to the nearest of: the declared rate tau0, the vertex
    // a/2 of the window (keeps theta0 >= (N-2)/2), and the far edge tau^#
    // (keeps the strict inequality when the window is narrow near p_c).
    let step = 0.5 * (tau0 - tau_star).min(exps.a / 2.0).min(tau_sharp - tau_star);
    let tau1 = tau_star + step;
    let theta0 = exps.sing_exp - tau1;
    Ok(WorkingExponents {
        tau1,
        tau2: tau0 - tau1,
        theta0,
    })
}

/// One line of a regime report: a named hypothesis, whether it holds, and how
/// much slack it has (positive margins mean "holds with room to spare").
#[derive(Debug, Clone, Serialize)]
pub struct RegimeCheck {
    pub name: &'static str,
    pub pass: bool,
    pub margin: f64,
    pub detail: String,
}

/// Outcome of `validate_regime`: one entry per hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub checks: Vec<RegimeCheck>,
}

impl RegimeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&RegimeCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Check the parameter regime the fast-decay construction needs:
/// serrin < p < p_c, growth bound beta < (N-2)p - N, the nonexistence window
/// (beta > -2 with p <= (N+beta)/(N-2)) avoided, and, when the potential
/// decays at infinity with rate `alpha`, (N-2)p_c - N - 2 < alpha <= 0.
pub fn validate_regime(params: ProblemParams, beta: f64, alpha: Option<f64>) -> Result<RegimeReport> {
    let exps = derive_exponents(params)?;
    let n = params.n();
    let p = params.p;
    let mut checks = Vec::new();

    let margin = p - exps.serrin;
    checks.push(RegimeCheck {
        name: "p_above_serrin",
        pass: margin > 0.0,
        margin,
        detail: format!("p = {p} vs Serrin exponent N/(N-2) = {:.6}", exps.serrin),
    });

    let margin = exps.p_c - p;
    checks.push(RegimeCheck {
        name: "p_below_joseph_lundgren",
        pass: margin > 0.0,
        margin,
        detail: format!("p = {p} vs p_c = {:.6}", exps.p_c),
    });

    let bound = (n - 2.0) * p - n;
    let margin = bound - beta;
    checks.push(RegimeCheck {
        name: "beta_growth_bound",
        pass: margin > 0.0,
        margin,
        detail: format!("beta = {beta} vs (N-2)p - N = {bound:.6}"),
    });

    // Known nonexistence window for slowly decaying potentials.
    let (pass, margin, detail) = if beta <= -2.0 {
        (true, -2.0 - beta, format!("beta = {beta} <= -2, window not applicable"))
    } else {
        let threshold = (n + beta) / (n - 2.0);
        (
            p > threshold,
            p - threshold,
            format!("beta = {beta} > -2 requires p > (N+beta)/(N-2) = {threshold:.6}"),
        )
    };
    checks.push(RegimeCheck {
        name: "nonexistence_window_avoided",
        pass,
        margin,
        detail,
    });

    if let Some(alpha) = alpha {
        let lower = (n - 2.0) * exps.p_c - n - 2.0;
        let margin = (alpha - lower).min(-alpha);
        checks.push(RegimeCheck {
            name: "alpha_decay_range",
            pass: alpha > lower && alpha <= 0.0,
            margin,
            detail: format!("alpha = {alpha} vs ((N-2)p_c - N - 2, 0] = ({lower:.6}, 0]"),
        });
    }

    Ok(RegimeReport { checks })
}
