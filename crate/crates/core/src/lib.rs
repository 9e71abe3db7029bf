//! Ground states and limit diagnostics for the mass-constrained
//! cubic-quintic Schrödinger energy
//!     E_ε(u) = (ε/2)∫|∇u|² - ¼∫u⁴ + ⅙∫u⁶,   ∫u² = 1,
//! on radial domains in d = 1, 2, 3.
//!
//! The crate provides:
//!   - uniform radial grids with exact-volume quadrature and a conservative
//!     discrete Laplacian obeying summation by parts ([`grid`]);
//!   - closed-form Thomas-Fermi minimizers (energy -3/32, multiplier -3/16)
//!     and a bang-bang dual construction with bisection on the multiplier
//!     ([`tf`]);
//!   - energy breakdowns, Euler-Lagrange and Pohozaev residuals, multiplier
//!     estimators, and the exact discrete lower bound E ≥ -(3/32)·mass
//!     ([`energy`]);
//!   - a normalized-gradient-flow ground-state solver and the Townes-type
//!     soliton by shooting ([`solver`], [`soliton`]);
//!   - sweep harnesses over the domain scale L and the particle number N
//!     with power-law / log-linear rate fits ([`sweep`]).

pub mod energy;
pub mod error;
pub mod grid;
pub mod solver;
pub mod soliton;
pub mod sweep;
pub mod tf;

pub use energy::{
    boundary_flux, el_residual, energy_breakdown, lower_bound_gap, multiplier_estimates,
    pohozaev_residual, EnergyBreakdown, MultiplierEstimates,
};
pub use error::{Error, Result};
pub use grid::{random_decreasing_field, unit_ball_volume, Field, Grid, RadialGrid};
pub use solver::{
    ground_state, ground_state_with_mass, ngf_step, ngf_step_mass, GroundStateResult, Init,
    SolverOptions,
};
pub use soliton::{
    audit_gnh, gnh_quotient, gnh_trial_family, q_soliton, GnhAudit, SolitonOptions, SolitonResult,
};
pub use sweep::{
    eps_of_l, eps_of_n, fit_rate, laplacian_interior_sup, linf_interior_error, sweep_tf_limit,
    sweep_thermo, tail_decay_fit, RateFit, SweepOptions, SweepOutcome, SweepRow, TailFit,
    TAIL_FLOOR,
};
pub use tf::{
    density_mass, tf_dual_solve, TfDualSolution, TfIdentityReport, TfProfile, TF_DUAL_ALPHA,
    TF_ENERGY, TF_MULTIPLIER, TF_PLATEAU_DENSITY,
};
