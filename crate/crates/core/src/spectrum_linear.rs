//! Energy and rate spectra for a linearly polarized wave (κ = 0).
//!
//! The windowed current expands in generalized Bessel coefficients
//! `𝒜⁽ʲ⁾_n(ϱ, ζ)`. Keeping the diagonal of the harmonic double sum gives
//!
//! ```text
//! W = 1/(2π² p_-²) Σ_n ∫dΩ ∫dω ω² {-𝒜⁰² + ξ²(𝒜¹² - 𝒜⁰𝒜²)} T_n(σ, Δφ)
//! ```
//!
//! with `σ = ω(λ₊ - λ₋ cosθ)/(2p_-²)`, `ζ = ωξ sinθ cosφ_γ/p_-` and
//! `ϱ = ω(cosθ - 1)ξ²/(8p_-²)`. Rates are per unit phase.

#[allow(unused_imports)]
use crate::float::Float;
use crate::error::{Error, Result};
use crate::float::PI;
use crate::harmonic::{HarmonicSums, Kernel, KernelPlan, PlanSpec};
use crate::kinematics::{FieldConfig, ParticleParams, PhaseWindow, Polarization};
use crate::oracle::{CurrentFourier, WaveVector};
use crate::quadrature::{gauss_legendre, integrate_vec, integrate_vec_judged, taper, GridConfig};
use crate::specfun::{generalized_bessel, truncation_order, GbScratch, GeneralizedBesselRow};
use crate::spectrum::{
    azimuthal_sums, frequency_cutoff, harmonic_cutoff, integrate_theta, rest_frame_peak_speed,
    tails_negligible, AzimuthFold, FrequencyCutoff, SpectrumResult,
};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Phase parameters of the current along one direction at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPhaseParams {
    pub sigma: f64,
    pub zeta: f64,
    pub rho: f64,
}

/// How the harmonic double sum in `|j|²` is reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HarmonicCoupling {
    /// Diagonal terms only, each weighted by its own window kernel.
    #[default]
    Diagonal,
    /// Full double sum, including interference between harmonics.
    Coherent,
}

#[derive(Debug, Clone, Copy)]
struct Figure8 {
    pm: f64,
    xi: f64,
    lp: f64,
    lm: f64,
    q0: f64,
    qz: f64,
}

impl Figure8 {
    fn new(f: &FieldConfig, p: &ParticleParams) -> Result<Self> {
        f.validate()?;
        p.validate()?;
        if f.polarization != Polarization::Linear {
            return Err(Error::Usage("linear spectra need a linearly polarized field".to_string()));
        }
        if p.has_kappa() {
            return Err(Error::Unsupported(
                "series spectra assume kappa = 0; use the oracle for general kappa".to_string(),
            ));
        }
        let pm = p.p_minus;
        let x2 = f.xi * f.xi;
        Ok(Figure8 {
            pm,
            xi: f.xi,
            lp: 1.0 + 0.5 * x2 + pm * pm,
            lm: 1.0 + 0.5 * x2 - pm * pm,
            q0: (1.0 + pm * pm) / (2.0 * pm),
            qz: (1.0 - pm * pm) / (2.0 * pm),
        })
    }

    /// `dσ/dω`.
    fn slope(&self, theta: f64) -> f64 {
        (self.lp - self.lm * theta.cos()) / (2.0 * self.pm * self.pm)
    }

    /// `(dϱ/dω, dζ/dω)`.
    fn arg_rates(&self, theta: f64, phi_gamma: f64) -> (f64, f64) {
        let r = (theta.cos() - 1.0) * self.xi * self.xi / (8.0 * self.pm * self.pm);
        let z = theta.sin() * phi_gamma.cos() * self.xi / self.pm;
        (r, z)
    }

    fn bracket(&self, row: &GeneralizedBesselRow, n: i64) -> f64 {
        let a0 = row.a0(n);
        let a1 = row.a1(n);
        let a2 = row.a2(n);
        -a0 * a0 + self.xi * self.xi * (a1 * a1 - a0 * a2)
    }
}

pub fn linear_phase_params(f: &FieldConfig, p: &ParticleParams, omega: f64, theta: f64, phi_gamma: f64) -> Result<LinearPhaseParams> {
    let o = Figure8::new(f, p)?;
    let (r, z) = o.arg_rates(theta, phi_gamma);
    Ok(LinearPhaseParams { sigma: omega * o.slope(theta), zeta: omega * z, rho: omega * r })
}

/// `ω_res = n·2p_-²/(λ₊ - λ₋cosθ)` and `Δω = p_-²/(λ₊ - λ₋cosθ)·8π/Δφ`.
pub fn resonance_linear(p: &ParticleParams, f: &FieldConfig, theta: f64, n: i64, window: &PhaseWindow) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::Domain("resonances exist for n ≥ 1 only".to_string()));
    }
    let o = Figure8::new(f, p)?;
    let d = o.lp - o.lm * theta.cos();
    Ok((n as f64 * 2.0 * o.pm * o.pm / d, o.pm * o.pm / d * 8.0 * PI / window.delta()))
}

/// Bessel-argument bound over the frequency range: `|ζ| + 2|ϱ|`.
fn arg_bound(o: &Figure8, omega_max: f64, theta: f64) -> f64 {
    let (r, z) = o.arg_rates(theta, 0.0);
    omega_max * (z.abs() + 2.0 * r.abs())
}

struct Evaluator<'a> {
    o: Figure8,
    cut: FrequencyCutoff,
    window: &'a PhaseWindow,
    cfg: &'a GridConfig,
    kernel: Kernel,
    n_hi: i64,
    weight: f64,
    rest_frame: bool,
}

impl Evaluator<'_> {
    /// Frequency plan for slope `σ/ω` at `θ`; panels are narrow enough for
    /// Bessel arguments advancing at `rate` per unit `ω`.
    fn plan(&self, theta: f64, rate: f64) -> KernelPlan {
        KernelPlan::new(PlanSpec {
            slope: self.o.slope(theta),
            dphi: self.window.delta(),
            kernel: self.kernel,
            omega_t: self.cut.omega_t,
            omega_max: self.cut.omega_max,
            n_lo: -self.n_hi,
            n_hi: self.n_hi,
            max_panel_width: if rate > 0.0 { (2.0 / rate).min(self.cut.omega_max) } else { self.cut.omega_max },
            window_multiplier: self.cfg.window_multiplier,
            chebyshev_nodes: self.cfg.chebyshev_nodes,
        })
    }

    /// Per-harmonic sums over frequency and azimuth at polar angle `θ`.
    fn direction(&self, plan: &KernelPlan, theta: f64) -> HarmonicSums {
        let n_hi = self.n_hi;
        let amax = arg_bound(&self.o, self.cut.omega_max, theta);
        let inner = truncation_order(0.5 * amax, 1e-3 * self.cfg.rel_tol.sqrt()).unwrap_or(64);
        let mut scratch = GbScratch::new(inner, -n_hi, n_hi);
        let mut row = GeneralizedBesselRow::new(-n_hi, n_hi, 0.0, 0.0, 1.0).expect("row");
        let st = theta.sin();
        let m0 = self.cfg.phi_seed.max((2.0 * amax) as usize + 8);
        let o = self.o;
        let xi = o.xi;
        let rest = self.rest_frame;
        let mut s = azimuthal_sums(m0, AzimuthFold::Quarter, self.cfg.rel_tol, |phi_gamma| {
            let (r1, z1) = if rest {
                // Rest-frame parameters: σ̄ = ω, ϱ̄ = ω ξ²(cosθ-1)/(8(1+ξ²/2)), ζ̄ = ω ξ sinθ cosφ_γ/√(1+ξ²/2).
                let a = 1.0 + 0.5 * xi * xi;
                (xi * xi * (theta.cos() - 1.0) / (8.0 * a), xi * st * phi_gamma.cos() / a.sqrt())
            } else {
                o.arg_rates(theta, phi_gamma)
            };
            plan.integrate(|om, out| {
                row.fill_with(&mut scratch, om * r1, om * z1);
                for (i, v) in out.iter_mut().enumerate() {
                    *v = o.bracket(&row, -n_hi + i as i64);
                }
            })
        });
        let w = self.weight * st;
        s.values.iter_mut().for_each(|v| *v *= w);
        s.errors.iter_mut().for_each(|v| *v *= w);
        s
    }
}

fn finite_window(
    f: &FieldConfig,
    p: &ParticleParams,
    window: &PhaseWindow,
    cfg: &GridConfig,
    kernel: Kernel,
    rest_frame: bool,
) -> Result<SpectrumResult> {
    cfg.validate()?;
    let o = Figure8::new(f, p)?;
    let cut = frequency_cutoff(f, p, cfg)?;
    let weight = if rest_frame {
        1.0 / (2.0 * PI * PI * (1.0 + 0.5 * o.xi * o.xi))
    } else {
        1.0 / (2.0 * PI * PI * o.pm * o.pm)
    };
    let amax = (0..=64)
        .map(|k| arg_bound(&o, cut.omega_max, PI * k as f64 / 64.0))
        .fold(0.0, f64::max);
    let mut n_hi = truncation_order(amax, 1e-3 * cfg.rel_tol.sqrt())? as i64 + 2;
    // σ has unit slope in every direction in the average rest frame.
    let shared = (o.lm.abs() <= 1e-14 * o.lp).then_some(amax / cut.omega_max);
    for attempt in 0..4 {
        let ev = Evaluator { o, cut, window, cfg, kernel, n_hi, weight, rest_frame };
        let shared_plan = shared.map(|rate| ev.plan(0.0, rate));
        let sums = integrate_theta(-n_hi, n_hi, cfg, |theta| {
            let local;
            let plan = match &shared_plan {
                Some(pl) => pl,
                None => {
                    local = ev.plan(theta, arg_bound(&o, 1.0, theta));
                    &local
                }
            };
            ev.direction(plan, theta)
        })?;
        let tails = tails_negligible(&sums.values, true, cfg.rel_tol);
        if tails || attempt == 3 {
            return Ok(SpectrumResult::from_harmonics(
                sums.n_lo,
                &sums.values,
                sums.error,
                Some(*window),
                Some(cut.omega_max),
                sums.converged && tails,
                sums.evaluations,
            ));
        }
        n_hi += n_hi / 2 + 5;
    }
    unreachable!()
}

/// Energy radiated through the window (diagonal harmonic sum).
pub fn energy_linear(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    energy_linear_with(f, p, window, cfg, HarmonicCoupling::Diagonal)
}

/// Energy radiated through the window with a chosen harmonic coupling.
///
/// With [`HarmonicCoupling::Coherent`] the per-harmonic entries hold the
/// diagonal terms and `interference` holds the rest.
pub fn energy_linear_with(
    f: &FieldConfig,
    p: &ParticleParams,
    window: &PhaseWindow,
    cfg: &GridConfig,
    coupling: HarmonicCoupling,
) -> Result<SpectrumResult> {
    match coupling {
        HarmonicCoupling::Diagonal => finite_window(f, p, window, cfg, Kernel::Fejer, false),
        HarmonicCoupling::Coherent => coherent_energy(f, p, window, cfg),
    }
}

/// Phase derivative of [`energy_linear`] (energy per radian of phase).
pub fn rate_linear(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    finite_window(f, p, window, cfg, Kernel::Sinc, false)
}

/// Per-harmonic `dW_n/dθ` at the given polar angles (diagonal sum).
pub fn angular_energy_linear(
    f: &FieldConfig,
    p: &ParticleParams,
    window: &PhaseWindow,
    thetas: &[f64],
    cfg: &GridConfig,
) -> Result<Vec<HarmonicSums>> {
    cfg.validate()?;
    let o = Figure8::new(f, p)?;
    let cut = frequency_cutoff(f, p, cfg)?;
    let amax = (0..=64)
        .map(|k| arg_bound(&o, cut.omega_max, PI * k as f64 / 64.0))
        .fold(0.0, f64::max);
    let n_hi = truncation_order(amax, 1e-3 * cfg.rel_tol.sqrt())? as i64 + 2;
    let weight = 1.0 / (2.0 * PI * PI * o.pm * o.pm);
    let ev = Evaluator { o, cut, window, cfg, kernel: Kernel::Fejer, n_hi, weight, rest_frame: false };
    Ok(thetas.iter().map(|&t| ev.direction(&ev.plan(t, arg_bound(&o, 1.0, t)), t)).collect())
}

/// Energy in the average rest frame from the rest-frame parameters.
pub fn rest_frame_energy_linear(f: &FieldConfig, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    let p = ParticleParams::rest_frame(f);
    finite_window(f, &p, window, cfg, Kernel::Fejer, true)
}

/// Energy rate per unit phase in the average rest frame.
pub fn rest_frame_rate_linear(f: &FieldConfig, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    let p = ParticleParams::rest_frame(f);
    finite_window(f, &p, window, cfg, Kernel::Sinc, true)
}

/// `dW̄/dω` in the average rest frame at the given frequencies.
pub fn rest_frame_spectral_density_linear(
    f: &FieldConfig,
    window: &PhaseWindow,
    omegas: &[f64],
    cfg: &GridConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let p = ParticleParams::rest_frame(f);
    let o = Figure8::new(f, &p)?;
    let dphi = window.delta();
    let weight = 1.0 / (2.0 * PI * PI * o.pm * o.pm);
    let mut out = Vec::with_capacity(omegas.len());
    for &om in omegas {
        let amax = arg_bound(&o, om, 0.5 * PI).max(arg_bound(&o, om, PI));
        let n_hi = truncation_order(amax, 1e-3 * cfg.rel_tol.sqrt())? as i64 + 2;
        let inner = truncation_order(0.5 * amax, 1e-3 * cfg.rel_tol.sqrt())?;
        let r = integrate_vec(
            |theta| {
                let mut scratch = GbScratch::new(inner, -n_hi, n_hi);
                let mut row = GeneralizedBesselRow::new(-n_hi, n_hi, 0.0, 0.0, 1.0).expect("row");
                let s = azimuthal_sums(cfg.phi_seed, AzimuthFold::Quarter, cfg.rel_tol, |pg| {
                    let (r1, z1) = o.arg_rates(theta, pg);
                    row.fill_with(&mut scratch, om * r1, om * z1);
                    let mut h = HarmonicSums::zeros(0, 0);
                    h.values[0] = (-n_hi..=n_hi)
                        .map(|n| crate::specfun::fejer(om - n as f64, dphi) * o.bracket(&row, n))
                        .sum();
                    h
                });
                vec![theta.sin() * s.values[0]]
            },
            0.0,
            PI,
            1,
            cfg.theta_seed,
            cfg,
        )?;
        out.push(weight * om * om * r.values[0]);
    }
    Ok(out)
}

/// Per-harmonic classical integrand `n² {…}/(λ₊ - λ₋cosθ)³` at resonance,
/// integrated over the azimuth, times `sinθ`.
fn classical_direction(o: &Figure8, theta: f64, n_keep: usize, cfg: &GridConfig) -> Vec<f64> {
    let d = o.lp - o.lm * theta.cos();
    let st = theta.sin();
    let scale = 2.0 * o.pm * o.pm / d;
    let amax = scale * n_keep as f64 * arg_bound(o, 1.0, theta);
    let m0 = cfg.phi_seed.max((2.0 * amax) as usize + 8);
    let s = azimuthal_sums(m0, AzimuthFold::Quarter, cfg.rel_tol, |pg| {
        let (r1, z1) = o.arg_rates(theta, pg);
        let mut h = HarmonicSums::zeros(1, n_keep as i64);
        for (i, v) in h.values.iter_mut().enumerate() {
            let n = (i + 1) as i64;
            let om = n as f64 * scale;
            let tol = 1e-3 * cfg.rel_tol.sqrt();
            let c = match generalized_bessel(n, om * r1, om * z1, tol) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let b = -c.a0 * c.a0 + o.xi * o.xi * (c.a1 * c.a1 - c.a0 * c.a2);
            *v = (n * n) as f64 * b / (d * d * d);
        }
        h
    });
    s.values.iter().map(|v| v * st).collect()
}

fn classical_angular(o: &Figure8, z: f64, cfg: &GridConfig) -> Result<SpectrumResult> {
    let mut n_keep = cfg.n_max_override.unwrap_or_else(|| harmonic_cutoff(z, cfg.rel_tol));
    let fixed = cfg.n_max_override.is_some();
    for attempt in 0..6 {
        let r = integrate_vec(|t| classical_direction(o, t, n_keep, cfg), 0.0, PI, n_keep, cfg.theta_seed, cfg)?;
        let tails = fixed || tails_negligible(&r.values, false, cfg.rel_tol);
        if tails || attempt == 5 {
            return Ok(SpectrumResult::from_harmonics(1, &r.values, r.total_error(), None, None, r.converged && tails, r.evaluations));
        }
        n_keep += n_keep / 2 + 5;
    }
    unreachable!()
}

fn scaled(mut r: SpectrumResult, k: f64) -> SpectrumResult {
    for (_, v) in r.per_harmonic.iter_mut() {
        *v *= k;
    }
    r.total *= k;
    r.quadrature_error_estimate *= k.abs();
    r
}

/// Classical energy rate per unit phase, `(4p_-⁴/π) Σ n² ∫dΩ {…}/(λ₊-λ₋cosθ)³`.
pub fn classical_rate_linear(f: &FieldConfig, p: &ParticleParams, cfg: &GridConfig) -> Result<SpectrumResult> {
    cfg.validate()?;
    let o = Figure8::new(f, p)?;
    if o.xi == 0.0 {
        return Ok(SpectrumResult::from_harmonics(1, &[0.0], 0.0, None, None, true, 0));
    }
    let r = classical_angular(&o, rest_frame_peak_speed(f), cfg)?;
    Ok(scaled(r, 4.0 * o.pm.powi(4) / PI))
}

/// Upper bound of the energy for long windows, `2Δφ · w_cl`.
pub fn max_energy_linear(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<f64> {
    Ok(2.0 * window.delta() * classical_rate_linear(f, p, cfg)?.total)
}

/// Classical rate in the average rest frame (Nikishov-Ritus), normalized
/// as a power: `1/(2π(1+ξ²/2)) Σ n² ∫dΩ {…}`. Tends to `ξ²/3`.
pub fn nikishov_ritus_rate(xi: f64, cfg: &GridConfig) -> Result<SpectrumResult> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::Domain(alloc::format!("xi must be finite and non-negative, got {xi}")));
    }
    let f = FieldConfig::linear(xi)?;
    classical_rate_linear(&f, &ParticleParams::rest_frame(&f), cfg)
}

/// The rest-frame classical rate with the prefactor `1/(8π²(1+ξ²/2))`,
/// i.e. [`nikishov_ritus_rate`] divided by `4π`.
pub fn nikishov_ritus_rate_printed(xi: f64, cfg: &GridConfig) -> Result<SpectrumResult> {
    Ok(scaled(nikishov_ritus_rate(xi, cfg)?, 1.0 / (4.0 * PI)))
}

/// Energy bound from the finite-window integrand: `T_n → Δφ²/2` on the line
/// `ω_res ± Δω/2` of every harmonic `n ≥ 1`.
pub fn max_energy_linear_windowed(
    f: &FieldConfig,
    p: &ParticleParams,
    window: &PhaseWindow,
    cfg: &GridConfig,
) -> Result<SpectrumResult> {
    cfg.validate()?;
    let o = Figure8::new(f, p)?;
    let dphi = window.delta();
    let (gx, gw) = gauss_legendre(12);
    let tol = 1e-3 * cfg.rel_tol.sqrt();
    let weight = 1.0 / (2.0 * PI * PI * o.pm * o.pm);
    let direction = |theta: f64, n_keep: usize| -> Vec<f64> {
        let d = o.lp - o.lm * theta.cos();
        let wr = 2.0 * o.pm * o.pm / d;
        let dw = o.pm * o.pm / d * 8.0 * PI / dphi;
        let amax = (n_keep as f64 + 1.0) * wr * arg_bound(&o, 1.0, theta);
        let m0 = cfg.phi_seed.max((2.0 * amax) as usize + 8);
        let s = azimuthal_sums(m0, AzimuthFold::Quarter, cfg.rel_tol, |pg| {
            let (r1, z1) = o.arg_rates(theta, pg);
            let mut h = HarmonicSums::zeros(1, n_keep as i64);
            for (i, v) in h.values.iter_mut().enumerate() {
                let n = (i + 1) as i64;
                let c = n as f64 * wr;
                let mut acc = 0.0;
                for (x, w) in gx.iter().zip(&gw) {
                    let om = c + 0.5 * dw * x;
                    if let Ok(g) = generalized_bessel(n, om * r1, om * z1, tol) {
                        let b = -g.a0 * g.a0 + o.xi * o.xi * (g.a1 * g.a1 - g.a0 * g.a2);
                        acc += 0.5 * dw * w * om * om * b;
                    }
                }
                *v = 0.5 * dphi * dphi * acc;
            }
            h
        });
        s.values.iter().map(|v| v * weight * theta.sin()).collect()
    };
    let mut n_keep = cfg.n_max_override.unwrap_or_else(|| harmonic_cutoff(rest_frame_peak_speed(f), cfg.rel_tol));
    for attempt in 0..6 {
        let r = integrate_vec(|t| direction(t, n_keep), 0.0, PI, n_keep, cfg.theta_seed, cfg)?;
        let tails = cfg.n_max_override.is_some() || tails_negligible(&r.values, false, cfg.rel_tol);
        if tails || attempt == 5 {
            return Ok(SpectrumResult::from_harmonics(1, &r.values, r.total_error(), Some(*window), None, r.converged && tails, r.evaluations));
        }
        n_keep += n_keep / 2 + 5;
    }
    unreachable!()
}

/// Harmonic amplitudes `a^μ_n` of the current for `n_lo..=n_hi`: `(a0, ax, az)`.
fn amplitudes(o: &Figure8, row: &GeneralizedBesselRow, n: i64) -> [f64; 3] {
    let k = o.xi * o.xi / (2.0 * o.pm * o.pm);
    let a0 = row.a0(n);
    let a2 = row.a2(n);
    [o.q0 / o.pm * a0 + k * a2, o.xi / o.pm * row.a1(n), o.qz / o.pm * a0 + k * a2]
}

/// Windowed current rebuilt from the generalized-Bessel expansion, phased
/// to equal the direct transform referenced to `φ0`.
pub fn series_current_linear(
    f: &FieldConfig,
    p: &ParticleParams,
    k: WaveVector,
    window: &PhaseWindow,
    phi0: f64,
    tol: f64,
) -> Result<CurrentFourier> {
    let o = Figure8::new(f, p)?;
    let lp = linear_phase_params(f, p, k.omega, k.theta, k.phi_gamma)?;
    let amax = lp.zeta.abs() + 2.0 * lp.rho.abs();
    let n_hi = truncation_order(amax, tol * 1e-3)? as i64 + 2;
    let row = GeneralizedBesselRow::new(-n_hi, n_hi, lp.rho, lp.zeta, tol * 1e-3)?;
    let s = current_sums(&o, &row, n_hi, lp.sigma, window);
    // Direct phase Φ(φ') = σφ' + ϱ sin2φ' - ζ cosφ' + ζ = ψ(φ' + π/2) + C''.
    let phase0 = lp.sigma * phi0 + lp.rho * (2.0 * phi0).sin() - lp.zeta * phi0.cos() + lp.zeta;
    let c2 = lp.zeta - 0.5 * PI * lp.sigma - phase0;
    let e = Complex64::from_polar(-1.0 / (4.0 * PI * PI), c2);
    Ok(CurrentFourier {
        j: [e * s[0], e * s[1], Complex64::new(0.0, 0.0), e * s[2]],
        k,
        window: *window,
        phi0,
    })
}

/// `Σ_n a^μ_n ∫ e^{i(σ-n)ν} dν` over the shifted window `ν = φ + π/2`.
fn current_sums(o: &Figure8, row: &GeneralizedBesselRow, n_hi: i64, sigma: f64, window: &PhaseWindow) -> [Complex64; 3] {
    let a = window.phi_in + 0.5 * PI;
    let b = window.phi + 0.5 * PI;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = [Complex64::new(0.0, 0.0); 3];
    for n in -n_hi..=n_hi {
        let x = sigma - n as f64;
        let amp = if (x * half).abs() < 1e-8 { 2.0 * half } else { 2.0 * (x * half).sin() / x };
        let integral = Complex64::from_polar(amp, x * mid);
        let a = amplitudes(o, row, n);
        for c in 0..3 {
            s[c] += integral * a[c];
        }
    }
    s
}

/// Energy from the full harmonic double sum: the series current is squared
/// before the frequency integral, which is done by the trapezoid rule on a
/// uniform grid (the integrand is even in ω and tapered to zero).
fn coherent_energy(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    cfg.validate()?;
    let o = Figure8::new(f, p)?;
    let cut = frequency_cutoff(f, p, cfg)?;
    let amax = (0..=64)
        .map(|k| arg_bound(&o, cut.omega_max, PI * k as f64 / 64.0))
        .fold(0.0, f64::max);
    let n_hi = truncation_order(amax, 1e-3 * cfg.rel_tol.sqrt())? as i64 + 2;
    let inner = truncation_order(0.5 * amax, 1e-3 * cfg.rel_tol.sqrt())?;
    let dphi = window.delta();
    let pref = 1.0 / (4.0 * PI * PI);
    // Slot 0: Minkowski total; slots 1..: diagonal per harmonic.
    let nh = (2 * n_hi + 1) as usize;
    let along = |theta: f64, phi_gamma: f64, steps: usize| -> (Vec<f64>, Vec<f64>) {
        let (r1, z1) = o.arg_rates(theta, phi_gamma);
        let s1 = o.slope(theta);
        let h = cut.omega_max / steps as f64;
        let mut scratch = GbScratch::new(inner, -n_hi, n_hi);
        let mut row = GeneralizedBesselRow::new(-n_hi, n_hi, 0.0, 0.0, 1.0).expect("row");
        let mut fine = vec![0.0; nh + 1];
        let mut coarse = vec![0.0; nh + 1];
        for k in 1..steps {
            let om = k as f64 * h;
            let chi = taper(om, cut.omega_t, cut.omega_max);
            if chi == 0.0 {
                break;
            }
            row.fill_with(&mut scratch, om * r1, om * z1);
            let s = current_sums(&o, &row, n_hi, om * s1, window);
            let w = om * om * chi;
            let m = s[0].norm_sqr() - s[1].norm_sqr() - s[2].norm_sqr();
            fine[0] += w * m;
            if k % 2 == 0 {
                coarse[0] += w * m;
            }
            for n in -n_hi..=n_hi {
                let a = amplitudes(&o, &row, n);
                // |∫e^{ixν}dν|² = 2 T_n
                let t = crate::specfun::fejer(om * s1 - n as f64, dphi);
                let v = 2.0 * w * t * (a[0] * a[0] - a[1] * a[1] - a[2] * a[2]);
                let i = (n + n_hi) as usize + 1;
                fine[i] += v;
                if k % 2 == 0 {
                    coarse[i] += v;
                }
            }
        }
        // W = -4π² ∫|j|² d³k with j = -(1/4π²) e^{iC''} Σ …
        let sc = -pref * h;
        (fine.iter().map(|v| sc * v).collect(), coarse.iter().map(|v| 2.0 * sc * v).collect())
    };
    let direction = |theta: f64| -> Vec<f64> {
        let spread = dphi * o.slope(theta) + 2.0 * arg_bound(&o, 1.0, theta) + 1.0;
        let mut steps = 2 * ((cut.omega_max * spread / PI).ceil() as usize).max(16);
        let amax_t = arg_bound(&o, cut.omega_max, theta);
        let m0 = cfg.phi_seed.max((2.0 * amax_t) as usize + 8);
        loop {
            let mut worst = 0.0f64;
            let s = azimuthal_sums(m0, AzimuthFold::Half, cfg.rel_tol, |pg| {
                let (fine, coarse) = along(theta, pg, steps);
                let err: f64 = (fine[0] - coarse[0]).abs();
                worst = worst.max(err / fine[0].abs().max(1e-300));
                let mut h = HarmonicSums::zeros(0, nh as i64);
                h.values.copy_from_slice(&fine);
                h.errors[0] = err;
                h
            });
            if worst <= 0.1 * cfg.rel_tol || steps > 1 << 20 {
                let st = theta.sin();
                let mut v: Vec<f64> = s.values.iter().map(|x| x * st).collect();
                v.push(st * s.errors[0]);
                return v;
            }
            steps *= 2;
        }
    };
    let r = integrate_vec_judged(direction, 0.0, PI, nh + 2, nh + 1, cfg.theta_seed, cfg)?;
    let total = r.values[0];
    let diag = &r.values[1..=nh];
    let mut out = SpectrumResult::from_harmonics(-n_hi, diag, r.errors[0] + r.values[nh + 1].abs(), Some(*window), Some(cut.omega_max), r.converged, r.evaluations);
    out.interference = total - out.total;
    out.total = total;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::current_fourier_direct;

    #[test]
    fn phase_params_special_directions() {
        let f = FieldConfig::linear(0.9).unwrap();
        let p = ParticleParams::new(1.4).unwrap();
        let lp = linear_phase_params(&f, &p, 2.5, 0.0, 0.3).unwrap();
        assert!((lp.sigma - 2.5).abs() < 1e-14 && lp.rho == 0.0 && lp.zeta == 0.0);
        let pr = ParticleParams::rest_frame(&f);
        let lp = linear_phase_params(&f, &pr, 1.7, 1.1, 0.5 * PI).unwrap();
        assert!((lp.sigma - 1.7).abs() < 1e-14 && lp.zeta.abs() < 1e-15 && lp.rho <= 0.0);
    }

    #[test]
    fn resonance_in_rest_frame() {
        let f = FieldConfig::linear(1.0).unwrap();
        let p = ParticleParams::rest_frame(&f);
        let w = PhaseWindow::new(0.0, 40.0).unwrap();
        let (wr, dw) = resonance_linear(&p, &f, 2.0, 1, &w).unwrap();
        assert!((wr - 1.0).abs() < 1e-14);
        assert!((dw - 4.0 * PI / 40.0).abs() < 1e-14);
    }

    #[test]
    fn series_current_matches_direct_quadrature() {
        for (xi, pm) in [(0.5, 1.0), (1.0, 1.5f64.sqrt()), (0.1, 1.0)] {
            let f = FieldConfig::linear(xi).unwrap();
            let p = ParticleParams::new(pm).unwrap();
            let w = PhaseWindow::new(-0.4, -0.4 + 10.0 * PI).unwrap();
            let k = WaveVector::new(2.3, 2.1, 0.7);
            let s = series_current_linear(&f, &p, k, &w, 0.9, 1e-13).unwrap();
            let d = current_fourier_direct(&f, &p, k, &w, 0.9, 1e-13).unwrap();
            for c in 0..4 {
                let err = (s.j[c] - d.j[c]).norm();
                assert!(err <= 1e-10 * d.norm(), "xi={xi} c={c}: {:?} vs {:?}", s.j[c], d.j[c]);
            }
        }
    }

    #[test]
    fn nikishov_ritus_dipole_limit() {
        let cfg = GridConfig::default();
        let w = nikishov_ritus_rate(0.01, &cfg).unwrap();
        assert!((w.total / 1e-4 - 1.0 / 3.0).abs() < 5e-4, "{}", w.total / 1e-4);
    }
}
