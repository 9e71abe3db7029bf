//! Closed-form Thomas-Fermi minimizers of the kinetic-free energy
//! -¼∫u⁴ + ⅙∫u⁶ at unit mass, and a discrete bang-bang construction of the
//! same minimum by pointwise dualization with bisection on the multiplier.
//!
//! The radially non-increasing representative has a plateau of height √(3/4)
//! on B(0, r₀) with ω_d·r₀^d = 4/3, energy -3/32 and multiplier -3/16.

use crate::error::{Error, Result};
use crate::grid::{unit_ball_volume, Field, Grid};

/// Plateau density of the bang-bang optimizer (φ = u²).
pub const TF_PLATEAU_DENSITY: f64 = 0.75;
/// Ground energy per unit mass, -3/32.
pub const TF_ENERGY: f64 = -3.0 / 32.0;
/// Multiplier (chemical potential), -3/16.
pub const TF_MULTIPLIER: f64 = -3.0 / 16.0;
/// Optimal dual variable α* = ρ*²/6 - ρ*/4 = -3/32.
pub const TF_DUAL_ALPHA: f64 = -3.0 / 32.0;

/// Closed-form description of the unit-mass Thomas-Fermi minimizer on
/// B(0, R₀) at density rho = 1/|B(0,R₀)|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfProfile {
    pub dim: u32,
    pub rho: f64,
    /// Domain radius R₀ = (1/(ρ·ω_d))^(1/d).
    pub domain_radius: f64,
    /// Plateau radius r₀ = (4/(3·ω_d))^(1/d); r₀ ≤ R₀ with equality at ρ = 3/4.
    pub plateau_radius: f64,
    /// Plateau height √(3/4).
    pub plateau_height: f64,
    pub energy: f64,
    pub multiplier: f64,
}

impl TfProfile {
    pub fn new(dim: u32, rho: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidDimension(dim));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::NonPositiveDensity(rho));
        }
        if rho > 0.75 {
            return Err(Error::TfExistenceUnknown(rho));
        }
        let omega = unit_ball_volume(dim);
        let inv_d = 1.0 / dim as f64;
        Ok(Self {
            dim,
            rho,
            domain_radius: (1.0 / (rho * omega)).powf(inv_d),
            plateau_radius: (4.0 / (3.0 * omega)).powf(inv_d),
            plateau_height: TF_PLATEAU_DENSITY.sqrt(),
            energy: TF_ENERGY,
            multiplier: TF_MULTIPLIER,
        })
    }

    /// Sample the radially non-increasing representative onto a grid:
    /// plateau height at nodes with r < r₀, zero outside.
    pub fn sample(&self, grid: &Grid) -> Field {
        let h = self.plateau_height;
        let r0 = self.plateau_radius;
        Field::from_fn(grid.clone(), |r| if r < r0 { h } else { 0.0 })
            .expect("plateau sample is finite")
    }

    /// Quadrature check of the closed-form identities
    /// 3∫u⁴ = 4∫u⁶ and μ = 6·E + ½∫u⁴ on the given grid.
    pub fn identities(&self, grid: &Grid) -> Result<TfIdentityReport> {
        if grid.dim() != self.dim {
            return Err(Error::InvalidDimension(grid.dim()));
        }
        if grid.radius() < self.domain_radius * (1.0 - 1e-12) {
            return Err(Error::GridTooSmall {
                grid: grid.radius(),
                needed: self.domain_radius,
            });
        }
        let u = self.sample(grid);
        let quartic = u.quadrature_power(4);
        let sextic = u.quadrature_power(6);
        Ok(TfIdentityReport {
            quartic,
            sextic,
            power_residual: (3.0 * quartic - 4.0 * sextic).abs(),
            multiplier_residual: (self.multiplier - 6.0 * self.energy - 0.5 * quartic).abs(),
        })
    }
}

/// Quadrature values and identity residuals from [`TfProfile::identities`].
#[derive(Debug, Clone, Copy)]
pub struct TfIdentityReport {
    pub quartic: f64,
    pub sextic: f64,
    /// |3∫u⁴ - 4∫u⁶|.
    pub power_residual: f64,
    /// |μ - 6E - ½∫u⁴|.
    pub multiplier_residual: f64,
}

/// Discrete Thomas-Fermi solution from the dual construction. `field`
/// stores the density φ = u² at the nodes.
#[derive(Debug, Clone)]
pub struct TfDualSolution {
    pub field: Field,
    pub dual_alpha: f64,
    pub mass: f64,
    pub energy: f64,
    /// Nodes where φ is farther than 1e-6 from both 0 and 3/4.
    pub bang_bang_violations: usize,
    /// Set when mass > (3/4)·volume: the returned constant density is the
    /// dual/relaxation optimum; primal existence there is open.
    pub relaxed: bool,
}

const BANG_BANG_TOL: f64 = 1e-6;

/// Pointwise Lagrangian φ³/6 - φ²/4 - αφ.
fn pointwise_lagrangian(phi: f64, alpha: f64) -> f64 {
    phi * phi * phi / 6.0 - phi * phi / 4.0 - alpha * phi
}

/// Minimizer over φ ≥ 0 of the pointwise Lagrangian: either 0 or the larger
/// root (1 + √(1+8α))/2 of φ²/2 - φ/2 - α = 0, whichever is lower.
fn pointwise_minimizer(alpha: f64) -> f64 {
    let disc = 1.0 + 8.0 * alpha;
    if disc <= 0.0 {
        return 0.0;
    }
    let root = 0.5 * (1.0 + disc.sqrt());
    if pointwise_lagrangian(root, alpha) < 0.0 {
        root
    } else {
        0.0
    }
}

/// Solve the discrete Thomas-Fermi problem at the given mass by bisection
/// on the dual variable α; at the degenerate α* the bang-bang set is filled
/// greedily from the origin outward (radially non-increasing tie-break)
/// with at most one fractional node.
pub fn tf_dual_solve(grid: &Grid, mass: f64) -> Result<TfDualSolution> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Invalid(format!("mass must be positive (got {mass})")));
    }
    let volume: f64 = grid.weights().iter().sum();
    let full_mass = TF_PLATEAU_DENSITY * volume;

    if mass > full_mass * (1.0 + 1e-12) {
        // ρ > 3/4: return the constant dual/relaxation optimum with its α.
        let phi = mass / volume;
        let alpha = phi * phi / 2.0 - phi / 2.0;
        let field = Field::from_fn(grid.clone(), |_| phi).expect("constant field");
        let energy: f64 = grid
            .weights()
            .iter()
            .map(|w| w * (phi * phi * phi / 6.0 - phi * phi / 4.0))
            .sum();
        let violations = count_violations(field.values());
        return Ok(TfDualSolution {
            field,
            dual_alpha: alpha,
            mass,
            energy,
            bang_bang_violations: violations,
            relaxed: true,
        });
    }

    // Bisection: total mass of the pointwise minimizer is 0 for α < α* and
    // ≥ (3/4)·volume for α > α*, so for sub-critical masses the bracket
    // pinches α* itself.
    let mut lo = -0.2_f64;
    let mut hi = 0.1_f64;
    let mass_of = |alpha: f64| pointwise_minimizer(alpha) * volume;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass_of(mid) < mass {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let alpha = 0.5 * (lo + hi);

    let phi_hi = pointwise_minimizer(hi);
    let values = if (phi_hi * volume - mass).abs() <= 1e-10 * mass.max(1.0) {
        // Constant branch: the continuous map matched the mass (ρ = 3/4 or
        // the relaxation boundary).
        vec![phi_hi; grid.node_count()]
    } else {
        // Degenerate α*: fill from the origin outward at density 3/4 with
        // at most one fractional node to meet the mass exactly.
        let mut vals = vec![0.0; grid.node_count()];
        let mut remaining = mass;
        for (i, w) in grid.weights().iter().enumerate() {
            if remaining <= 0.0 {
                break;
            }
            let cell = TF_PLATEAU_DENSITY * w;
            if cell <= remaining {
                vals[i] = TF_PLATEAU_DENSITY;
                remaining -= cell;
            } else {
                vals[i] = remaining / w;
                remaining = 0.0;
            }
        }
        vals
    };

    let field = Field::new(grid.clone(), values)?;
    let got_mass: f64 = grid.weights().iter().zip(field.values()).map(|(w, p)| w * p).sum();
    let energy: f64 = grid
        .weights()
        .iter()
        .zip(field.values())
        .map(|(w, &p)| w * (p * p * p / 6.0 - p * p / 4.0))
        .sum();
    let violations = count_violations(field.values());
    Ok(TfDualSolution {
        field,
        dual_alpha: alpha,
        mass: got_mass,
        energy,
        bang_bang_violations: violations,
        relaxed: false,
    })
}

fn count_violations(phi: &[f64]) -> usize {
    phi.iter()
        .filter(|&&p| p.abs() > BANG_BANG_TOL && (p - TF_PLATEAU_DENSITY).abs() > BANG_BANG_TOL)
        .count()
}

/// Mass integral of a density sample (φ, not u).
pub fn density_mass(field: &Field) -> f64 {
    field
        .grid()
        .weights()
        .iter()
        .zip(field.values())
        .map(|(w, p)| w * p)
        .sum()
}
