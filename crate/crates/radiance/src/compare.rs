//! Series spectra and currents against the direct-quadrature oracle.

use crate::config::{CouplingArg, PolarizationArg, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Report};
use radiance_core::oracle::{current_fourier_direct, oracle_energies, CurrentFourier, WaveVector};
use radiance_core::spectrum::max_fundamental;
use radiance_core::spectrum_circular as sc;
use radiance_core::spectrum_linear as sl;
use radiance_core::GridConfig;
use serde_json::json;

const THETAS: [f64; 3] = [0.4, 1.3, 2.5];
const PHI_GAMMA: f64 = 0.3;
const OMEGA_FACTORS: [f64; 3] = [0.5, 1.0, 2.3];

/// `max_c |j_c - ĵ_c| / ‖ĵ‖` per component.
pub fn component_errors(series: &CurrentFourier, direct: &CurrentFourier) -> [f64; 4] {
    let norm = direct.norm().max(f64::MIN_POSITIVE);
    let mut e = [0.0; 4];
    for (c, v) in e.iter_mut().enumerate() {
        *v = (series.j[c] - direct.j[c]).norm() / norm;
    }
    e
}

/// Table columns: `omega,theta,phi_gamma,rel_err`, one row per wave vector,
/// followed by the energy comparison in the JSON payload.
pub fn oracle_compare(cfg: &RunConfig, grid: &GridConfig) -> Result<Report, CliError> {
    let pol = cfg.polarization()?;
    let f = cfg.field(pol)?;
    let p = cfg.particle(&f)?;
    let w = cfg.window()?;
    let tol = grid.rel_tol.min(1e-10);
    let wr = max_fundamental(&f, &p)?;
    let phi0 = w.phi_in;
    let mut r = Report::table(&["omega", "theta", "phi_gamma", "rel_err"]);
    let mut points = Vec::new();
    let mut worst: f64 = 0.0;
    for &t in &THETAS {
        for &m in &OMEGA_FACTORS {
            let k = WaveVector::new(m * wr, t, PHI_GAMMA);
            let s = match pol {
                PolarizationArg::Circular => sc::series_current_circular(&f, &p, k, &w, phi0, tol)?,
                PolarizationArg::Linear => sl::series_current_linear(&f, &p, k, &w, phi0, tol)?,
            };
            let d = current_fourier_direct(&f, &p, k, &w, phi0, tol)?;
            let e = component_errors(&s, &d);
            let m_err = e.iter().cloned().fold(0.0, f64::max);
            worst = worst.max(m_err);
            r.rows.push(vec![Cell::Float(k.omega), Cell::Float(t), Cell::Float(PHI_GAMMA), Cell::Float(m_err)]);
            points.push(json!({"omega": k.omega, "theta": t, "phi_gamma": PHI_GAMMA, "component_rel_errors": e}));
        }
    }
    let series = match pol {
        PolarizationArg::Circular => sc::energy_circular(&f, &p, &w, grid)?,
        PolarizationArg::Linear => {
            let c = match cfg.coupling.unwrap_or_default() {
                CouplingArg::Diagonal => sl::HarmonicCoupling::Diagonal,
                CouplingArg::Coherent => sl::HarmonicCoupling::Coherent,
            };
            sl::energy_linear_with(&f, &p, &w, grid, c)?
        }
    };
    let oracle = oracle_energies(&f, &p, &w, grid)?;
    let energy_rel = (series.total - oracle.minkowski).abs() / oracle.minkowski.abs();
    r.converged = series.converged && oracle.converged;
    r.result = json!({
        "points": points,
        "current_max_rel_error": worst,
        "energy": {
            "series": series.total,
            "series_error": series.quadrature_error_estimate,
            "oracle_minkowski": oracle.minkowski,
            "oracle_crossproduct": oracle.crossproduct,
            "oracle_error": oracle.error_estimate,
            "omega_max": oracle.omega_max,
            "rel_error": energy_rel,
        },
    });
    r.summary = format!("current max rel error = {worst:.3e} energy rel error = {energy_rel:.3e} converged = {}", r.converged);
    Ok(r)
}
