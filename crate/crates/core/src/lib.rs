//! Radial solutions of the Lane-Emden equation `-Δu = V(|x|) u^p` on
//! punctured N-dimensional space, built and verified numerically.
//!
//! The pipeline mirrors the structure of the problem:
//!
//! * [`exponents`] computes the critical exponents (Serrin, Sobolev,
//!   Joseph-Lundgren) and the derived constants attached to a pair `(N, p)`,
//!   and checks which parameter regime a potential lives in.
//! * [`profile`] shoots the heteroclinic orbit of the Emden-Fowler ODE that
//!   carries every fast-decaying solution of the constant-potential problem.
//! * [`radial`] holds the log-spaced grid, the radial Newton potential
//!   (convolution with the fundamental solution) and the radial Laplacian.
//! * [`potentials`] is the catalogue of admissible potentials `V` plus a
//!   sample-based checker of the hypotheses the solver relies on.
//! * [`solver`] runs the monotone Picard iteration that produces a solution
//!   with prescribed mass `k` at infinity, for `V` on one side of 1 or split
//!   in two stages when `V` crosses 1.
//! * [`asymptotics`] measures decay exponents, the far-field mass identity,
//!   the Kelvin transform, PDE residuals, and probes the fast/slow-decay
//!   crossover for decaying potentials.
//!
//! Everything is deterministic: same inputs, same bits.

pub mod asymptotics;
pub mod error;
pub mod exponents;
pub mod fit;
pub mod ode;
pub mod potentials;
pub mod profile;
pub mod radial;
pub mod solver;

pub use error::{Error, Result};
pub use exponents::{derive_exponents, ExponentSet, ProblemParams, WorkingExponents};
pub use profile::{Profile, Regime};
pub use radial::{RadialFunction, RadialGrid};
