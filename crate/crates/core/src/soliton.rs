//! Townes-type soliton Q_d: the positive radial decaying solution of
//!     -(d/2)Δu + ((4-d)/2)u = u³    on ℝ^d,
//! computed by shooting on the radial ODE
//!     u'' + (d-1)/r·u' = ((4-d)/d)·u - (2/d)·u³,   u'(0) = 0,
//! with bisection on u(0) separating decaying from sign-changing
//! trajectories, RK4 in radius. Q_d satisfies
//!     ∫|∇Q_d|² = ∫Q_d² = ½∫Q_d⁴,
//! and its d = 2 mass is the critical constant of the planar cubic problem.
//!
//! Also hosts the Gagliardo-Nirenberg-Hölder audit: the d = 3 quotient
//!     ∫u⁴ / [ (∫u²)^(1/2) (∫u⁶)^(1/4) (∫|∇u|²)^(3/2) ]
//! evaluated on trial fields and reported, never maximized.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, RadialGrid};

#[derive(Debug, Clone, Copy)]
pub struct SolitonOptions {
    /// Outer integration radius.
    pub r_max: f64,
    /// RK4 step (also the profile grid spacing).
    pub step: f64,
    /// Bisection bracket for u(0).
    pub bracket: (f64, f64),
    pub bisect_iters: usize,
}

impl SolitonOptions {
    pub fn for_dim(dim: u32) -> Result<Self> {
        match dim {
            // Decay rates √((4-d)/d)·(2/d)… slow down with d; widen the box.
            1 => Ok(Self { r_max: 14.0, step: 5e-4, bracket: (1.0, 3.0), bisect_iters: 80 }),
            2 => Ok(Self { r_max: 18.0, step: 5e-4, bracket: (1.5, 3.5), bisect_iters: 80 }),
            3 => Ok(Self { r_max: 32.0, step: 5e-4, bracket: (2.0, 4.5), bisect_iters: 80 }),
            other => Err(Error::InvalidDimension(other)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolitonResult {
    pub dim: u32,
    pub profile: Field,
    /// Converged shooting parameter u(0).
    pub shoot_parameter: f64,
    /// ∫Q² under the radial measure (whole-space, both halves for d = 1).
    pub mass: f64,
    /// Relative residuals of the three pairings of
    /// ∫|∇Q|², ∫Q², ½∫Q⁴.
    pub identity_residuals: [f64; 3],
}

/// Right-hand side of the first-order system (u, p = u').
#[inline]
fn rhs(dim: u32, r: f64, u: f64, p: f64) -> (f64, f64) {
    let d = dim as f64;
    let f = (4.0 - d) / d * u - 2.0 / d * u * u * u;
    if r < 1e-12 {
        // Symmetry limit: u'' + (d-1)/r·u' → d·u''(0).
        (p, f / d)
    } else {
        (p, f - (d - 1.0) / r * p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shot {
    /// Went below zero: u(0) too large.
    Overshoot,
    /// Turned back upward before decaying: u(0) too small.
    Undershoot,
    /// Stayed positive and decreasing to the box edge.
    Decayed,
}

fn classify(dim: u32, s: f64, r_max: f64, h: f64) -> Shot {
    let mut u = s;
    let mut p = 0.0;
    let mut r = 0.0;
    let steps = (r_max / h).round() as usize;
    for _ in 0..steps {
        let (k1u, k1p) = rhs(dim, r, u, p);
        let (k2u, k2p) = rhs(dim, r + 0.5 * h, u + 0.5 * h * k1u, p + 0.5 * h * k1p);
        let (k3u, k3p) = rhs(dim, r + 0.5 * h, u + 0.5 * h * k2u, p + 0.5 * h * k2p);
        let (k4u, k4p) = rhs(dim, r + h, u + h * k3u, p + h * k3p);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        r += h;
        if u < 0.0 {
            return Shot::Overshoot;
        }
        if p > 0.0 && u > 0.05 * s {
            return Shot::Undershoot;
        }
        if u < 1e-14 {
            return Shot::Decayed;
        }
    }
    Shot::Decayed
}

/// Integrate the converged trajectory onto a radial grid, truncating to
/// zero once the amplitude is numerically dead (the tail past that point
/// carries no quadrature weight worth keeping and would otherwise pick up
/// the exponential instability of the shot).
fn integrate_profile(dim: u32, s: f64, r_max: f64, h: f64) -> Vec<f64> {
    let steps = (r_max / h).round() as usize;
    let mut values = Vec::with_capacity(steps + 1);
    let mut u = s;
    let mut p = 0.0;
    let mut r = 0.0;
    let mut dead = false;
    values.push(u);
    for _ in 0..steps {
        if dead {
            values.push(0.0);
            continue;
        }
        let (k1u, k1p) = rhs(dim, r, u, p);
        let (k2u, k2p) = rhs(dim, r + 0.5 * h, u + 0.5 * h * k1u, p + 0.5 * h * k1p);
        let (k3u, k3p) = rhs(dim, r + 0.5 * h, u + 0.5 * h * k2u, p + 0.5 * h * k2p);
        let (k4u, k4p) = rhs(dim, r + h, u + h * k3u, p + h * k3p);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        r += h;
        if u < 1e-12 || p > 0.0 {
            dead = true;
            values.push(0.0);
        } else {
            values.push(u);
        }
    }
    values
}

/// Shooting solve of Q_d. `opts` defaults to [`SolitonOptions::for_dim`].
pub fn q_soliton(dim: u32, opts: Option<SolitonOptions>) -> Result<SolitonResult> {
    let opts = match opts {
        Some(o) => o,
        None => SolitonOptions::for_dim(dim)?,
    };
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidDimension(dim));
    }
    let (mut lo, mut hi) = opts.bracket;
    if classify(dim, lo, opts.r_max, opts.step) != Shot::Undershoot
        || classify(dim, hi, opts.r_max, opts.step) != Shot::Overshoot
    {
        return Err(Error::BracketNotFound { lo, hi });
    }
    for _ in 0..opts.bisect_iters {
        let mid = 0.5 * (lo + hi);
        match classify(dim, mid, opts.r_max, opts.step) {
            Shot::Overshoot => hi = mid,
            _ => lo = mid,
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let s = 0.5 * (lo + hi);

    let n = (opts.r_max / opts.step).round() as usize;
    let grid: Grid = Arc::new(RadialGrid::new(dim, opts.r_max, n)?);
    let values = integrate_profile(dim, s, opts.r_max, opts.step);
    let profile = Field::new(grid, values)?;

    let grad = profile.gradient_energy();
    let mass = profile.mass();
    let half_quartic = 0.5 * profile.quadrature_power(4);
    let scale = mass.abs().max(1e-300);
    let identity_residuals = [
        (grad - mass).abs() / scale,
        (half_quartic - mass).abs() / scale,
        (grad - half_quartic).abs() / scale,
    ];
    Ok(SolitonResult { dim, profile, shoot_parameter: s, mass, identity_residuals })
}

/// Per-trial Gagliardo-Nirenberg-Hölder quotient on a d = 3 field.
pub fn gnh_quotient(field: &Field) -> Result<f64> {
    if field.grid().dim() != 3 {
        return Err(Error::InvalidDimension(field.grid().dim()));
    }
    let i2 = field.quadrature_power(2);
    let i4 = field.quadrature_power(4);
    let i6 = field.quadrature_power(6);
    let grad = field.gradient_energy();
    if i2 <= 0.0 || i4 <= 0.0 || i6 <= 0.0 || grad <= 0.0 {
        return Err(Error::DegenerateTrial("a norm factor vanishes"));
    }
    Ok(i4 / (i2.sqrt() * i6.powf(0.25) * grad.powf(1.5)))
}

/// Audit report: per-trial quotients and their maximum.
#[derive(Debug, Clone)]
pub struct GnhAudit {
    pub quotients: Vec<f64>,
    pub max: f64,
}

/// Seeded trial family for the audit: random radial-decreasing profiles
/// plus a ladder of Gaussian widths, all unit mass on a d = 3 grid. The
/// family is deterministic for a given seed so the audit maximum can serve
/// as a frozen regression baseline.
pub fn gnh_trial_family(grid: &Grid, seed: u64) -> Vec<Field> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut trials: Vec<Field> =
        (0..32).map(|_| crate::grid::random_decreasing_field(grid, &mut rng)).collect();
    let n = grid.cells();
    for k in 1..=8 {
        let s = k as f64 * 0.5;
        let mut f = Field::from_fn(grid.clone(), |r| (-0.5 * (r / s) * (r / s)).exp())
            .expect("gaussian trial is finite");
        f.values_mut()[n] = 0.0;
        f.normalize_mass(1.0).expect("gaussian trial has positive mass");
        trials.push(f);
    }
    trials
}

/// Evaluate the quotient on each trial; any degenerate trial is an error.
pub fn audit_gnh(trials: &[Field]) -> Result<GnhAudit> {
    if trials.is_empty() {
        return Err(Error::DegenerateTrial("empty trial family"));
    }
    let mut quotients = Vec::with_capacity(trials.len());
    for t in trials {
        quotients.push(gnh_quotient(t)?);
    }
    let max = quotients.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(GnhAudit { quotients, max })
}
