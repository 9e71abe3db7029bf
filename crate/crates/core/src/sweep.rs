//! Sweep harness: map the domain-scale control L (fixed density on a ball)
//! or the particle number N (whole space, truncated) to the kinetic
//! coefficient ε, solve the ground state along the sweep with optional warm
//! starts, and collect the gap/multiplier/interior-error/tail/Laplacian
//! columns that the limit theorems bound. Power-law rates are measured by
//! log-log least squares; exponential tails by a linear fit of log values.

use crate::error::{Error, Result};
use crate::grid::{unit_ball_volume, Field, Grid, RadialGrid};
use crate::solver::{ground_state, GroundStateResult, Init, SolverOptions};
use crate::tf::{TfProfile, TF_ENERGY, TF_MULTIPLIER};

use std::sync::Arc;

/// One solved point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    /// L for thermodynamic sweeps, N for whole-space sweeps.
    pub control: f64,
    pub eps: f64,
    /// Per-unit-mass energy 𝓔.
    pub energy: f64,
    /// 𝓔 + 3/32 (≥ -1e-12 by the exact discrete bound).
    pub energy_gap: f64,
    /// Weak-form multiplier.
    pub mu: f64,
    /// |μ + 3/16|.
    pub mu_gap: f64,
    /// (ε/2)∫|∇u|².
    pub kinetic: f64,
    /// sup |u - √(3/4)| over the interior ball (margin-adjusted).
    pub linf_err_interior: f64,
    /// u at the tail probe radius; None when the plateau touches the
    /// boundary (ρ = 3/4) and there is no tail region.
    pub tail_probe: Option<f64>,
    /// sup |Δu| over the plateau ball (shrunk for ρ = 3/4).
    pub laplacian_sup: f64,
    pub iterations: usize,
    pub residual: f64,
    /// Whole-space sweeps: |E(trunc) - E(1.5·trunc)|; None for bounded
    /// domains.
    pub trunc_err: Option<f64>,
}

/// Sweep rows plus the converged states they came from.
#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub states: Vec<GroundStateResult>,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub solver: SolverOptions,
    /// Warm-start each solve from the previous control value (sequential).
    pub warm_start: bool,
    /// Interior margin for the L∞ column at ρ < 3/4; the ρ = 3/4 case
    /// switches to the shrunk-ball margin ln(L)/L² automatically.
    pub linf_margin: f64,
    /// Thread cap for the parallel path (only used when warm_start is off).
    pub threads: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), warm_start: true, linf_margin: 0.1, threads: 1 }
    }
}

/// Kinetic coefficient of the scaled bounded-domain problem:
/// ε = L⁻²·(ρ·ω_d·R^d)^(-2/d).
pub fn eps_of_l(dim: u32, rho: f64, domain_radius: f64, l: f64) -> f64 {
    let d = dim as f64;
    let volume = unit_ball_volume(dim) * domain_radius.powi(dim as i32);
    l.powi(-2) * (rho * volume).powf(-2.0 / d)
}

/// Kinetic coefficient of the whole-space problem: ε = N^(-2/d).
pub fn eps_of_n(dim: u32, n_particles: f64) -> f64 {
    n_particles.powf(-2.0 / dim as f64)
}

/// sup over nodes with r ≤ r₀ - margin of |u - plateau height|.
pub fn linf_interior_error(field: &Field, profile: &TfProfile, margin: f64) -> Result<f64> {
    let r0 = profile.plateau_radius;
    if margin >= r0 {
        return Err(Error::EmptyRegion { margin, r0 });
    }
    let cut = r0 - margin;
    let mut sup: f64 = 0.0;
    let mut hit = false;
    for (r, u) in field.grid().nodes().iter().zip(field.values()) {
        if *r <= cut {
            sup = sup.max((u - profile.plateau_height).abs());
            hit = true;
        }
    }
    if !hit {
        return Err(Error::EmptyRegion { margin, r0 });
    }
    Ok(sup)
}

/// sup of the discrete |Δu| over nodes with r ≤ radius.
pub fn laplacian_interior_sup(field: &Field, radius: f64) -> f64 {
    let lap = field.laplacian();
    field
        .grid()
        .nodes()
        .iter()
        .zip(lap.values())
        .filter(|(r, _)| **r <= radius)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

fn is_critical_density(rho: f64) -> bool {
    (rho - 0.75).abs() <= 1e-12
}

fn build_row(
    control: f64,
    eps: f64,
    state: &GroundStateResult,
    profile: &TfProfile,
    linf_margin: f64,
    critical: bool,
    tail_radius: Option<f64>,
) -> Result<SweepRow> {
    let shrunk = control.ln() / (control * control);
    let margin = if critical { shrunk } else { linf_margin };
    let lap_radius =
        if critical { profile.plateau_radius - shrunk } else { profile.plateau_radius };
    Ok(SweepRow {
        control,
        eps,
        energy: state.energy.total,
        energy_gap: state.energy.total - TF_ENERGY,
        mu: state.multipliers.weak_form,
        mu_gap: (state.multipliers.weak_form - TF_MULTIPLIER).abs(),
        kinetic: state.energy.kinetic,
        linf_err_interior: linf_interior_error(&state.field, profile, margin)?,
        tail_probe: tail_radius.map(|r| state.field.value_at(r)),
        laplacian_sup: laplacian_interior_sup(&state.field, lap_radius),
        iterations: state.iterations,
        residual: state.final_residual,
        trunc_err: None,
    })
}

/// Solve along the ε list, tagging any failure with the offending control
/// value.
fn solve_many(
    grid: &Grid,
    controls: &[f64],
    eps_list: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<GroundStateResult>> {
    let tag = |control: f64| {
        move |e: Error| Error::SweepSolve { control, source: Box::new(e) }
    };
    if opts.warm_start {
        let mut states = Vec::with_capacity(eps_list.len());
        let mut init = opts.solver.init.clone();
        for (&control, &eps) in controls.iter().zip(eps_list) {
            let solver = SolverOptions { init: init.clone(), ..opts.solver.clone() };
            let state = ground_state(grid, eps, &solver).map_err(tag(control))?;
            init = Init::WarmStart(state.field.clone());
            states.push(state);
        }
        Ok(states)
    } else {
        // Independent solves; chunked across up to `threads` workers with a
        // deterministic gather.
        let threads = opts.threads.max(1).min(eps_list.len().max(1));
        let mut slots: Vec<Option<Result<GroundStateResult>>> =
            (0..eps_list.len()).map(|_| None).collect();
        if threads <= 1 {
            for (slot, (&control, &eps)) in slots.iter_mut().zip(controls.iter().zip(eps_list)) {
                *slot = Some(ground_state(grid, eps, &opts.solver).map_err(tag(control)));
            }
        } else {
            let solver = &opts.solver;
            let chunk_len = eps_list.len().div_ceil(threads);
            std::thread::scope(|scope| {
                for (t, chunk) in slots.chunks_mut(chunk_len).enumerate() {
                    let base = t * chunk_len;
                    scope.spawn(move || {
                        for (k, slot) in chunk.iter_mut().enumerate() {
                            *slot = Some(
                                ground_state(grid, eps_list[base + k], solver)
                                    .map_err(tag(controls[base + k])),
                            );
                        }
                    });
                }
            });
        }
        slots.into_iter().map(|s| s.expect("all slots filled")).collect()
    }
}

fn validate_controls(list: &[f64]) -> Result<()> {
    if list.len() < 3 {
        return Err(Error::TooFewPoints(list.len()));
    }
    if list.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::BadControls);
    }
    if list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::BadControls);
    }
    Ok(())
}

/// Thermodynamic sweep on the fixed ball B(0, R₀), R₀ = (1/(ρω_d))^(1/d):
/// for each L solve at ε = eps_of_l and fill a row. The tail probe sits at
/// (r₀ + R₀)/2 and is skipped at ρ = 3/4, where the L∞/Laplacian regions
/// switch to the shrunk ball of margin ln(L)/L².
pub fn sweep_thermo(
    dim: u32,
    rho: f64,
    l_list: &[f64],
    grid_n: usize,
    opts: &SweepOptions,
) -> Result<SweepOutcome> {
    validate_controls(l_list)?;
    let profile = TfProfile::new(dim, rho)?;
    let grid: Grid = Arc::new(RadialGrid::new(dim, profile.domain_radius, grid_n)?);
    let critical = is_critical_density(rho);
    let tail_radius =
        if critical { None } else { Some(0.5 * (profile.plateau_radius + profile.domain_radius)) };
    // ε is computed for the unit-radius reference ball 𝒟 = B(0,1); only the
    // product ρ|𝒟| enters.
    let eps_list: Vec<f64> = l_list.iter().map(|&l| eps_of_l(dim, rho, 1.0, l)).collect();
    let states = solve_many(&grid, l_list, &eps_list, opts)?;
    let rows = l_list
        .iter()
        .zip(&eps_list)
        .zip(&states)
        .map(|((&l, &eps), state)| {
            build_row(l, eps, state, &profile, opts.linf_margin, critical, tail_radius)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepOutcome { rows, states })
}

/// Whole-space (Thomas-Fermi limit) sweep on a truncated grid of the given
/// radius: ε = N^(-2/d). Every row is re-solved on a 1.5× larger grid with
/// the same spacing and the energy difference recorded as `trunc_err`; the
/// exponential tail makes the truncation error collapse once N is moderate.
pub fn sweep_tf_limit(
    dim: u32,
    n_list: &[f64],
    trunc_radius: f64,
    grid_n: usize,
    opts: &SweepOptions,
) -> Result<SweepOutcome> {
    validate_controls(n_list)?;
    // The limit profile is the unit-mass plateau; any admissible density
    // gives the same r₀ and height.
    let profile = TfProfile::new(dim, 0.75)?;
    let r0 = profile.plateau_radius;
    if trunc_radius < 1.5 * r0 {
        return Err(Error::Invalid(format!(
            "trunc_radius must be at least 1.5·r₀ = {} (got {trunc_radius})",
            1.5 * r0
        )));
    }
    let grid: Grid = Arc::new(RadialGrid::new(dim, trunc_radius, grid_n)?);
    let wide_n = (grid_n as f64 * 1.5).ceil() as usize;
    let wide: Grid = Arc::new(RadialGrid::new(dim, 1.5 * trunc_radius, wide_n)?);
    let tail_radius = Some(1.5 * r0);

    let eps_list: Vec<f64> = n_list.iter().map(|&n| eps_of_n(dim, n)).collect();
    let states = solve_many(&grid, n_list, &eps_list, opts)?;
    let wide_states = solve_many(&wide, n_list, &eps_list, opts)?;
    let rows = n_list
        .iter()
        .zip(&eps_list)
        .zip(states.iter().zip(&wide_states))
        .map(|((&n, &eps), (state, wide_state))| {
            let mut row =
                build_row(n, eps, state, &profile, opts.linf_margin, false, tail_radius)?;
            row.trunc_err = Some((state.energy.total - wide_state.energy.total).abs());
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepOutcome { rows, states })
}

/// Least-squares power-law fit through (log control, log value).
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

fn linear_least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 =
        xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if ss_tot <= f64::MIN_POSITIVE { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r2)
}

/// Fit value ≈ C·control^slope on positive data.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    for &(c, v) in points {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::NonPositiveFitInput(c));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonPositiveFitInput(v));
        }
    }
    let mut controls: Vec<f64> = points.iter().map(|p| p.0).collect();
    controls.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if controls.windows(2).any(|p| p[1] == p[0]) {
        return Err(Error::BadControls);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, r_squared) = linear_least_squares(&xs, &ys);
    Ok(RateFit { slope, intercept, r_squared, points_used: points.len() })
}

/// Tail fit: log(tail probe) against the raw control (log-linear decay).
/// Rows at or below the positivity floor are excluded and counted.
#[derive(Debug, Clone, Copy)]
pub struct TailFit {
    pub fit: RateFit,
    pub excluded: usize,
}

pub const TAIL_FLOOR: f64 = 1e-300;

pub fn tail_decay_fit(rows: &[SweepRow]) -> Result<TailFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = 0;
    for row in rows {
        match row.tail_probe {
            Some(t) if t > TAIL_FLOOR => {
                xs.push(row.control);
                ys.push(t.ln());
            }
            Some(_) => excluded += 1,
            None => excluded += 1,
        }
    }
    if xs.len() < 3 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let (slope, intercept, r_squared) = linear_least_squares(&xs, &ys);
    Ok(TailFit {
        fit: RateFit { slope, intercept, r_squared, points_used: xs.len() },
        excluded,
    })
}
