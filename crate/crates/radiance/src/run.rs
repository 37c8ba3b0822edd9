use crate::compare::oracle_compare;
use crate::config::{CouplingArg, Mode, PolarizationArg, Quantity, RunConfig};
use crate::error::CliError;
use crate::output::{physical_units, Cell, Report};
use crate::sweep::sweep;
use radiance_core::harmonic::HarmonicSums;
use radiance_core::spectrum_circular as sc;
use radiance_core::spectrum_linear as sl;
use radiance_core::SpectrumResult;
use serde_json::json;
use std::f64::consts::PI;

/// Runs the configured computation on a pool of `cfg.threads` workers and
/// writes the output file, if any.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let report = with_threads(cfg.threads, || execute(cfg))??;
    if cfg.mode()? != Mode::Sweep {
        if let Some(path) = &cfg.out {
            report.write(cfg, path)?;
        }
    }
    Ok(report)
}

/// Evaluates `f` on a dedicated pool when a worker count is given.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("threads must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Computes the report for one configuration without writing files.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    let mode = cfg.mode()?;
    let grid = cfg.grid()?;
    let quantity = cfg.quantity.unwrap_or_default();
    if cfg.coupling == Some(CouplingArg::Coherent) && mode != Mode::Linear && mode != Mode::OracleCompare {
        return Err(CliError::Usage("coupling applies to linear spectra only".into()));
    }
    if cfg.theta_points.is_some() && !matches!(mode, Mode::Circular | Mode::Linear) {
        return Err(CliError::Usage("theta_points applies to circular and linear only".into()));
    }
    let mut report = match mode {
        Mode::Circular | Mode::Linear => {
            let pol = if mode == Mode::Circular { PolarizationArg::Circular } else { PolarizationArg::Linear };
            let f = cfg.field(pol)?;
            let p = cfg.particle(&f)?;
            let w = cfg.window()?;
            let res = match (pol, quantity) {
                (PolarizationArg::Circular, Quantity::Energy) => sc::energy_circular(&f, &p, &w, &grid)?,
                (PolarizationArg::Circular, Quantity::Rate) => sc::rate_circular(&f, &p, &w, &grid)?,
                (PolarizationArg::Linear, Quantity::Energy) => {
                    let c = match cfg.coupling.unwrap_or_default() {
                        CouplingArg::Diagonal => sl::HarmonicCoupling::Diagonal,
                        CouplingArg::Coherent => sl::HarmonicCoupling::Coherent,
                    };
                    sl::energy_linear_with(&f, &p, &w, &grid, c)?
                }
                (PolarizationArg::Linear, Quantity::Rate) => sl::rate_linear(&f, &p, &w, &grid)?,
            };
            let mut r = spectrum_report(&res, quantity);
            if let Some(m) = cfg.theta_points {
                if quantity != Quantity::Energy {
                    return Err(CliError::Usage("theta_points needs quantity = energy".into()));
                }
                if m == 0 {
                    return Err(CliError::Usage("theta_points must be positive".into()));
                }
                let thetas: Vec<f64> = (0..m).map(|i| PI * (i as f64 + 0.5) / m as f64).collect();
                let (rows, resonance): (Vec<HarmonicSums>, Box<Resonance>) = match pol {
                    PolarizationArg::Circular => (
                        sc::angular_energy_circular(&f, &p, &w, &thetas, &grid)?,
                        Box::new(|t, n| sc::resonance(&p, &f, t, n, &w).ok().map(|r| r.0)),
                    ),
                    PolarizationArg::Linear => (
                        sl::angular_energy_linear(&f, &p, &w, &thetas, &grid)?,
                        Box::new(|t, n| sl::resonance_linear(&p, &f, t, n, &w).ok().map(|r| r.0)),
                    ),
                };
                r.rows = angular_rows(&thetas, &rows, resonance.as_ref());
            }
            r
        }
        Mode::RestFrameCircular | Mode::RestFrameLinear => {
            cfg.forbid_pminus()?;
            let w = cfg.window()?;
            let res = if mode == Mode::RestFrameCircular {
                let f = cfg.field(PolarizationArg::Circular)?;
                match quantity {
                    Quantity::Energy => sc::rest_frame_energy_circular(&f, &w, &grid)?,
                    Quantity::Rate => sc::rest_frame_rate_circular(&f, &w, &grid)?,
                }
            } else {
                let f = cfg.field(PolarizationArg::Linear)?;
                match quantity {
                    Quantity::Energy => sl::rest_frame_energy_linear(&f, &w, &grid)?,
                    Quantity::Rate => sl::rest_frame_rate_linear(&f, &w, &grid)?,
                }
            };
            spectrum_report(&res, quantity)
        }
        Mode::Schott => classical_report(&sc::schott_rate(cfg.require_xi()?, cfg.n_max, &grid)?),
        Mode::NikishovRitus => classical_report(&sl::nikishov_ritus_rate(cfg.require_xi()?, &grid)?),
        Mode::ClassicalLimit => classical_limit(cfg, &grid)?,
        Mode::OracleCompare => oracle_compare(cfg, &grid)?,
        Mode::Sweep => sweep(cfg)?,
    };
    if let Some(u) = physical_units(cfg) {
        report.summary.push_str(&format!("\nunits {u}"));
    } else if cfg.units == Some(crate::config::Units::Physical) {
        return Err(CliError::Usage("units = physical needs omega_w".into()));
    }
    Ok(report)
}

/// Resonance frequency of harmonic `n` at polar angle `θ`, if defined.
type Resonance<'a> = dyn Fn(f64, i64) -> Option<f64> + 'a;

fn spectrum_report(res: &SpectrumResult, q: Quantity) -> Report {
    let header: &[&str] = match q {
        Quantity::Energy => &["n", "omega", "theta", "dW", "dW_err"],
        Quantity::Rate => &["n", "omega", "theta", "dw", "dw_err"],
    };
    let mut r = Report::table(header);
    r.rows = res
        .per_harmonic
        .iter()
        .map(|&(n, v)| vec![Cell::Int(n), Cell::Empty, Cell::Empty, Cell::Float(v), Cell::Empty])
        .collect();
    r.total = Some((res.total, res.quadrature_error_estimate));
    r.converged = res.converged;
    r.result = result_json(res);
    r.summary = summary(res.total, res.quadrature_error_estimate, res.converged);
    r
}

/// Rows of `dW_n/dθ`; `omega` is the resonance frequency for `n ≥ 1`.
fn angular_rows(thetas: &[f64], sums: &[HarmonicSums], resonance: &Resonance) -> Vec<Vec<Cell>> {
    let mut rows = Vec::new();
    for (&t, s) in thetas.iter().zip(sums) {
        for (i, (&v, &e)) in s.values.iter().zip(&s.errors).enumerate() {
            let n = s.n_lo + i as i64;
            rows.push(vec![Cell::Int(n), Cell::opt(resonance(t, n)), Cell::Float(t), Cell::Float(v), Cell::Float(e)]);
        }
    }
    rows
}

fn classical_report(res: &SpectrumResult) -> Report {
    let mut r = Report::table(&["n", "w", "w_err"]);
    r.rows = res.per_harmonic.iter().map(|&(n, v)| vec![Cell::Int(n), Cell::Float(v), Cell::Empty]).collect();
    r.total = Some((res.total, res.quadrature_error_estimate));
    r.converged = res.converged;
    r.result = result_json(res);
    r.summary = summary(res.total, res.quadrature_error_estimate, res.converged);
    r
}

/// Rest-frame rate against its classical limit for each window length.
fn classical_limit(cfg: &RunConfig, grid: &radiance_core::GridConfig) -> Result<Report, CliError> {
    cfg.forbid_pminus()?;
    let pol = cfg.polarization()?;
    let xi = cfg.require_xi()?;
    let dphis = cfg.dphis.clone().ok_or_else(|| crate::config::missing("dphis"))?;
    if dphis.is_empty() {
        return Err(CliError::Usage("dphis must not be empty".into()));
    }
    let f = cfg.field(pol)?;
    let classical = match pol {
        PolarizationArg::Circular => sc::schott_rate(xi, cfg.n_max, grid)?,
        PolarizationArg::Linear => sl::nikishov_ritus_rate(xi, grid)?,
    };
    let mut r = Report::table(&["dphi", "w", "w_err", "w_cl", "rel_diff"]);
    let mut converged = classical.converged;
    let mut points = Vec::new();
    for &d in &dphis {
        let a = cfg.phi_in.unwrap_or(0.0);
        let w = radiance_core::PhaseWindow::new(a, a + d)?;
        let res = match pol {
            PolarizationArg::Circular => sc::rest_frame_rate_circular(&f, &w, grid)?,
            PolarizationArg::Linear => sl::rest_frame_rate_linear(&f, &w, grid)?,
        };
        converged &= res.converged;
        let rel = (res.total - classical.total) / classical.total;
        r.rows.push(vec![
            Cell::Float(d),
            Cell::Float(res.total),
            Cell::Float(res.quadrature_error_estimate),
            Cell::Float(classical.total),
            Cell::Float(rel),
        ]);
        points.push(json!({"dphi": d, "w": res.total, "w_err": res.quadrature_error_estimate, "rel_diff": rel}));
    }
    r.converged = converged;
    r.result = json!({"w_cl": classical.total, "points": points});
    let last = r.rows.last().map(|row| match row[4] {
        Cell::Float(x) => x,
        _ => f64::NAN,
    });
    r.summary = format!("w_cl = {:.16e} last rel_diff = {:.3e} converged = {converged}", classical.total, last.unwrap_or(f64::NAN));
    Ok(r)
}

pub(crate) fn result_json(res: &SpectrumResult) -> serde_json::Value {
    json!({
        "total": res.total,
        "per_harmonic": res.per_harmonic,
        "interference": res.interference,
        "n_max_used": res.n_max_used,
        "quadrature_error_estimate": res.quadrature_error_estimate,
        "omega_max": res.omega_max,
        "window": res.window.map(|w| [w.phi_in, w.phi]),
        "converged": res.converged,
        "negative_harmonic": res.negative_harmonic,
        "evaluations": res.evaluations,
    })
}

pub(crate) fn summary(total: f64, err: f64, converged: bool) -> String {
    format!("total = {total:.16e} error = {err:.3e} converged = {converged}")
}
