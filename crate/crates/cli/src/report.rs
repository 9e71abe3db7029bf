//! Re-check sweep files against the acceptance thresholds: recompute the
//! rate fits and bounds, print one line per check, and fail the run when a
//! fatal check breaks. The two tail checks are reported as diagnostics
//! only: the probe magnitude and its log-linear fit quality at the
//! reference scales sit outside what the front physics produces (see the
//! project README), so they inform rather than gate.

use cq_core::{fit_rate, tail_decay_fit, SweepRow};
use std::path::Path;

use crate::output::{fmt_f64, plot_data, THERMO_HEADER, TF_HEADER};
use crate::CliError;

/// Frozen bound for laplacian_sup·L^(-3/2) on reference-scale sweeps.
pub const LAPLACIAN_BOUND: f64 = 0.5;
/// Frozen bound for laplacian_sup·L^(-2)·(ln L)^(1/2) on ρ = 3/4 sweeps.
pub const LAPLACIAN_BOUND_CRITICAL: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Thermo,
    TfLimit,
}

pub struct ParsedSweep {
    pub kind: Kind,
    pub rows: Vec<SweepRow>,
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, CliError> {
    tok.parse::<f64>()
        .map_err(|_| CliError::Validation(format!("line {line}: bad number {tok:?}")))
}

pub fn parse_sweep_file(path: &Path) -> Result<ParsedSweep, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Validation(format!("{}: empty file", path.display())))?;
    let kind = if header == THERMO_HEADER {
        Kind::Thermo
    } else if header == TF_HEADER {
        Kind::TfLimit
    } else {
        return Err(CliError::Validation(format!(
            "{}: unrecognized header {header:?}",
            path.display()
        )));
    };
    let want = if kind == Kind::TfLimit { 13 } else { 12 };
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != want {
            return Err(CliError::Validation(format!(
                "{}: line {} has {} fields, want {want}",
                path.display(),
                idx + 1,
                toks.len()
            )));
        }
        let f = |k: usize| parse_f64(toks[k], idx + 1);
        let tail = f(8)?;
        rows.push(SweepRow {
            control: f(0)?,
            eps: f(1)?,
            energy: f(2)?,
            energy_gap: f(3)?,
            mu: f(4)?,
            mu_gap: f(5)?,
            kinetic: f(6)?,
            linf_err_interior: f(7)?,
            tail_probe: if tail.is_nan() { None } else { Some(tail) },
            laplacian_sup: f(9)?,
            iterations: toks[10].parse().map_err(|_| {
                CliError::Validation(format!("line {}: bad iteration count", idx + 1))
            })?,
            residual: f(11)?,
            trunc_err: if kind == Kind::TfLimit {
                let v = f(12)?;
                if v.is_nan() {
                    None
                } else {
                    Some(v)
                }
            } else {
                None
            },
        });
    }
    if rows.len() < 3 {
        return Err(CliError::Validation(format!(
            "{}: rate fits need at least 3 rows (got {})",
            path.display(),
            rows.len()
        )));
    }
    Ok(ParsedSweep { kind, rows })
}

struct Check {
    name: &'static str,
    pass: bool,
    fatal: bool,
    detail: String,
}

fn checks_for(sweep: &ParsedSweep) -> Result<Vec<Check>, CliError> {
    let rows = &sweep.rows;
    let mut checks = Vec::new();
    let gap_points: Vec<(f64, f64)> = rows.iter().map(|r| (r.control, r.energy_gap)).collect();

    let worst_gap = rows.iter().map(|r| r.energy_gap).fold(f64::INFINITY, f64::min);
    checks.push(Check {
        name: "lower_bound",
        pass: worst_gap >= -1e-12,
        fatal: true,
        detail: format!("min gap {}", fmt_f64(worst_gap)),
    });
    let decreasing = rows.windows(2).all(|p| p[1].energy_gap < p[0].energy_gap)
        && rows.iter().all(|r| r.energy_gap > 0.0);
    checks.push(Check {
        name: "gap_positive_decreasing",
        pass: decreasing,
        fatal: true,
        detail: String::new(),
    });
    match fit_rate(&gap_points) {
        Ok(fit) => checks.push(Check {
            name: "energy_rate",
            pass: fit.slope <= -0.8 && fit.r_squared >= 0.98,
            fatal: true,
            detail: format!("slope {:.4}, r2 {:.4}", fit.slope, fit.r_squared),
        }),
        Err(e) => checks.push(Check {
            name: "energy_rate",
            pass: false,
            fatal: true,
            detail: format!("fit failed: {e}"),
        }),
    }

    match sweep.kind {
        Kind::Thermo => {
            let mu_points: Vec<(f64, f64)> =
                rows.iter().map(|r| (r.control, r.mu_gap)).collect();
            match fit_rate(&mu_points) {
                Ok(fit) => checks.push(Check {
                    name: "mu_rate",
                    pass: fit.slope <= -0.8,
                    fatal: true,
                    detail: format!("slope {:.4}", fit.slope),
                }),
                Err(e) => checks.push(Check {
                    name: "mu_rate",
                    pass: false,
                    fatal: true,
                    detail: format!("fit failed: {e}"),
                }),
            }
            let window = rows
                .iter()
                .filter(|r| r.control >= 16.0)
                .all(|r| r.mu > -0.25 && r.mu < -0.125);
            checks.push(Check {
                name: "mu_window",
                pass: window,
                fatal: true,
                detail: "mu in (-4/16, -2/16) for L >= 16".into(),
            });
            let linf_points: Vec<(f64, f64)> =
                rows.iter().map(|r| (r.control, r.linf_err_interior)).collect();
            match fit_rate(&linf_points) {
                Ok(fit) => checks.push(Check {
                    name: "linf_rate",
                    pass: fit.slope <= -0.45,
                    fatal: true,
                    detail: format!("slope {:.4}", fit.slope),
                }),
                Err(e) => checks.push(Check {
                    name: "linf_rate",
                    pass: false,
                    fatal: true,
                    detail: format!("fit failed: {e}"),
                }),
            }

            let has_tail = rows.iter().any(|r| r.tail_probe.is_some());
            if has_tail {
                match tail_decay_fit(rows) {
                    Ok(tf) => {
                        checks.push(Check {
                            name: "tail_shape",
                            pass: tf.fit.slope < 0.0 && tf.fit.r_squared >= 0.98,
                            fatal: false,
                            detail: format!(
                                "slope {:.4}, r2 {:.4}, excluded {}",
                                tf.fit.slope, tf.fit.r_squared, tf.excluded
                            ),
                        });
                    }
                    Err(e) => checks.push(Check {
                        name: "tail_shape",
                        pass: false,
                        fatal: false,
                        detail: format!("fit failed: {e}"),
                    }),
                }
                let last = rows.last().unwrap();
                let tail = last.tail_probe.unwrap_or(f64::NAN);
                checks.push(Check {
                    name: "tail_floor",
                    pass: tail < 1e-6,
                    fatal: false,
                    detail: format!("probe {} at control {}", fmt_f64(tail), last.control),
                });
                let worst = rows
                    .iter()
                    .map(|r| r.laplacian_sup * r.control.powf(-1.5))
                    .fold(0.0f64, f64::max);
                checks.push(Check {
                    name: "laplacian_bound",
                    pass: worst <= LAPLACIAN_BOUND,
                    fatal: true,
                    detail: format!("max sup·L^-3/2 = {:.4} vs {LAPLACIAN_BOUND}", worst),
                });
            } else {
                // No tail column at all: the ρ = 3/4 case, where the
                // Laplacian scaling carries the log factor.
                let worst = rows
                    .iter()
                    .map(|r| r.laplacian_sup * r.control.powi(-2) * r.control.ln().sqrt())
                    .fold(0.0f64, f64::max);
                checks.push(Check {
                    name: "laplacian_bound_critical",
                    pass: worst <= LAPLACIAN_BOUND_CRITICAL,
                    fatal: true,
                    detail: format!(
                        "max sup·L^-2·(ln L)^1/2 = {:.4} vs {LAPLACIAN_BOUND_CRITICAL}",
                        worst
                    ),
                });
            }
        }
        Kind::TfLimit => {
            let worst = rows
                .iter()
                .map(|r| r.trunc_err.unwrap_or(f64::INFINITY))
                .fold(0.0f64, f64::max);
            checks.push(Check {
                name: "truncation_sensitivity",
                pass: worst <= 1e-8,
                fatal: true,
                detail: format!("max |E(trunc) - E(1.5·trunc)| = {}", fmt_f64(worst)),
            });
        }
    }
    Ok(checks)
}

fn plot_quantities(sweep: &ParsedSweep) -> Vec<(&'static str, Vec<(f64, f64)>)> {
    let rows = &sweep.rows;
    let col = |f: fn(&SweepRow) -> f64| rows.iter().map(|r| (r.control, f(r))).collect();
    let mut out: Vec<(&'static str, Vec<(f64, f64)>)> = vec![
        ("energy_gap", col(|r| r.energy_gap)),
        ("mu_gap", col(|r| r.mu_gap)),
        ("linf_err_interior", col(|r| r.linf_err_interior)),
        ("laplacian_sup", col(|r| r.laplacian_sup)),
    ];
    let tail: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.tail_probe.map(|t| (r.control, t)))
        .collect();
    if !tail.is_empty() {
        out.push(("tail_probe", tail));
    }
    out
}

/// Run all checks over the given files; returns the process exit code.
pub fn run_report(files: &[std::path::PathBuf], plot_dir: Option<&Path>) -> Result<u8, CliError> {
    let mut any_fatal = false;
    for path in files {
        let sweep = parse_sweep_file(path)?;
        println!(
            "{} [{} rows, {}]",
            path.display(),
            sweep.rows.len(),
            match sweep.kind {
                Kind::Thermo => "thermo",
                Kind::TfLimit => "tf-limit",
            }
        );
        for check in checks_for(&sweep)? {
            let status = if check.pass { "PASS" } else { "FAIL" };
            let tag = if check.fatal { "CHECK" } else { "INFO " };
            let note = if check.fatal { "" } else { " (diagnostic)" };
            println!("  {tag} {:<28} {status}{note}  {}", check.name, check.detail);
            if check.fatal && !check.pass {
                any_fatal = true;
            }
        }
        if let Some(dir) = plot_dir {
            std::fs::create_dir_all(dir).map_err(|e| {
                CliError::Validation(format!("cannot create {}: {e}", dir.display()))
            })?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sweep".into());
            for (name, points) in plot_quantities(&sweep) {
                let target = dir.join(format!("{stem}_{name}.dat"));
                std::fs::write(&target, plot_data(&points)).map_err(|e| {
                    CliError::Validation(format!("cannot write {}: {e}", target.display()))
                })?;
            }
        }
    }
    Ok(if any_fatal { 4 } else { 0 })
}
