//! Energy and rate spectra for a circularly polarized wave (κ = 0).
//!
//! After the azimuth of the photon is integrated out, the energy radiated
//! through a window of length `Δφ` is
//!
//! ```text
//! W = (1/π) Σ_n ∫dω ω² ∫dθ sinθ T_n(η, Δφ) B_n(μ),
//! B_n = r⊥² (n J_n/μ)² - (1 + ξ²)/p_-² J_n² + r⊥² J_n'²,
//! ```
//!
//! with `η = ω(P0 - Pz cosθ)/p_-` and `μ = ω r⊥ sinθ`. Rates replace `T_n`
//! by `(p_-/P0) sin((η-n)Δφ)/(η-n)`.

#[allow(unused_imports)]
use crate::float::Float;
use crate::error::{Error, Result};
use crate::float::PI;
use crate::harmonic::{HarmonicSums, Kernel, KernelPlan, PlanSpec};
use crate::kinematics::{
    quasimomentum, time_from_phase, FieldConfig, ParticleParams, PhaseWindow, Polarization,
};
use crate::oracle::{CurrentFourier, WaveVector};
use crate::quadrature::{gauss_legendre, integrate_vec, GridConfig};
use crate::specfun::{truncation_order, BesselRow};
use crate::spectrum::{
    frequency_cutoff, harmonic_cutoff, integrate_theta, tails_negligible, EmissionPoint,
    FrequencyCutoff, SpectrumResult,
};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Constants of the circular orbit.
#[derive(Debug, Clone, Copy)]
struct Orbit {
    pm: f64,
    p0: f64,
    pz: f64,
    xi: f64,
    r_perp: f64,
    /// `(1 + ξ²)/p_-²`.
    c2: f64,
    handedness: f64,
}

impl Orbit {
    fn new(f: &FieldConfig, p: &ParticleParams) -> Result<Self> {
        f.validate()?;
        p.validate()?;
        if f.polarization != Polarization::Circular {
            return Err(Error::Usage("circular spectra need a circularly polarized field".to_string()));
        }
        if p.has_kappa() {
            return Err(Error::Unsupported(
                "series spectra assume kappa = 0; use the oracle for general kappa".to_string(),
            ));
        }
        let q = quasimomentum(p)?;
        let pm = p.p_minus;
        let h = 0.5 * f.xi * f.xi / pm;
        Ok(Orbit {
            pm,
            p0: q.q0 + h,
            pz: q.qz + h,
            xi: f.xi,
            r_perp: f.xi / pm,
            c2: (1.0 + f.xi * f.xi) / (pm * pm),
            handedness: f.kappa_sign(),
        })
    }

    /// `dη/dω` along direction `θ`.
    fn slope(&self, theta: f64) -> f64 {
        (self.p0 - self.pz * theta.cos()) / self.pm
    }

    /// `B_n` for `n_lo..=n_hi` written into `out`.
    fn bracket(&self, row: &BesselRow, n_lo: i64, out: &mut [f64]) {
        let r2 = self.r_perp * self.r_perp;
        for (i, v) in out.iter_mut().enumerate() {
            let n = n_lo + i as i64;
            let j = row.get(n);
            let k = row.n_over_x(n);
            let d = row.prime(n);
            *v = r2 * (k * k + d * d) - self.c2 * j * j;
        }
    }
}

/// `(η, μ)` for a photon of frequency `ω` emitted at polar angle `θ`.
pub fn eta_mu(p: &ParticleParams, f: &FieldConfig, point: &EmissionPoint) -> Result<(f64, f64)> {
    let o = Orbit::new(f, p)?;
    Ok((point.omega * o.slope(point.theta), point.omega * o.r_perp * point.theta.sin()))
}

/// Resonance frequency `ω_res = n ω_r` and line width `Δω = ω_r (P0/p_-) 4π/Δt`.
pub fn resonance(p: &ParticleParams, f: &FieldConfig, theta: f64, n: i64, window: &PhaseWindow) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::Domain("resonances exist for n ≥ 1 only".to_string()));
    }
    let o = Orbit::new(f, p)?;
    let wr = 1.0 / o.slope(theta);
    let dt = time_from_phase(f, p, window)?.value;
    Ok((n as f64 * wr, wr * o.p0 / o.pm * 4.0 * PI / dt))
}

/// Largest panel width over which the Bessel arguments move by at most 2.
fn panel_cap(arg_rate: f64, omega_max: f64) -> f64 {
    if arg_rate > 0.0 {
        (2.0 / arg_rate).min(omega_max)
    } else {
        omega_max
    }
}

fn plan_for(
    slope: f64,
    kernel: Kernel,
    window: &PhaseWindow,
    cut: &FrequencyCutoff,
    n_hi: i64,
    arg_rate: f64,
    cfg: &GridConfig,
) -> KernelPlan {
    KernelPlan::new(PlanSpec {
        slope,
        dphi: window.delta(),
        kernel,
        omega_t: cut.omega_t,
        omega_max: cut.omega_max,
        n_lo: -n_hi,
        n_hi,
        max_panel_width: panel_cap(arg_rate, cut.omega_max),
        window_multiplier: cfg.window_multiplier,
        chebyshev_nodes: cfg.chebyshev_nodes,
    })
}

/// Harmonic sums for one polar angle, using `plan` for the frequency integral.
fn direction_sums(o: &Orbit, plan: &KernelPlan, theta: f64, weight: f64) -> HarmonicSums {
    let (n_lo, n_hi) = plan.n_range();
    let st = theta.sin();
    let mut row = BesselRow::new((n_hi + 1) as usize, 0.0).expect("bessel row");
    plan.integrate(|om, out| {
        BesselRow::fill(&mut row, om * o.r_perp * st);
        o.bracket(&row, n_lo, out);
        for v in out.iter_mut() {
            *v *= weight * st;
        }
    })
}

/// Rest-frame form of the bracket, written with `η̄ = ω` and
/// `μ̄ = ξω sinθ/√(1+ξ²)`.
fn rest_frame_sums(xi: f64, plan: &KernelPlan, theta: f64, weight: f64) -> HarmonicSums {
    let (n_lo, n_hi) = plan.n_range();
    let st = theta.sin();
    let b2 = xi * xi / (1.0 + xi * xi);
    let z = xi / (1.0 + xi * xi).sqrt();
    let mut row = BesselRow::new((n_hi + 1) as usize, 0.0).expect("bessel row");
    plan.integrate(|om, out| {
        BesselRow::fill(&mut row, z * om * st);
        for (i, v) in out.iter_mut().enumerate() {
            let n = n_lo + i as i64;
            // (n/(ω sinθ))² J_n² = ξ²/(1+ξ²) (n J_n/μ̄)²
            let k = row.n_over_x(n);
            let j = row.get(n);
            let d = row.prime(n);
            *v = weight * st * (b2 * k * k - j * j + b2 * d * d);
        }
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Form {
    Lab,
    RestFrame,
}

fn finite_window(
    f: &FieldConfig,
    p: &ParticleParams,
    window: &PhaseWindow,
    cfg: &GridConfig,
    kernel: Kernel,
    form: Form,
) -> Result<SpectrumResult> {
    cfg.validate()?;
    let o = Orbit::new(f, p)?;
    let cut = frequency_cutoff(f, p, cfg)?;
    let weight = match kernel {
        Kernel::Fejer => 1.0 / PI,
        Kernel::Sinc => o.pm / (o.p0 * PI),
    };
    let mu_max = cut.omega_max * o.r_perp;
    let bessel_tol = 1e-3 * cfg.rel_tol.sqrt();
    let mut n_hi = truncation_order(mu_max, bessel_tol)? as i64 + 1;
    // A constant slope (rest frame) lets one plan serve every direction.
    let shared_slope = (o.pz.abs() <= 1e-14 * o.p0).then(|| o.slope(0.0));
    for attempt in 0..4 {
        let shared = shared_slope.map(|s| plan_for(s, kernel, window, &cut, n_hi, o.r_perp, cfg));
        let sums = integrate_theta(-n_hi, n_hi, cfg, |theta| {
            let local;
            let plan = match &shared {
                Some(pl) => pl,
                None => {
                    local = plan_for(o.slope(theta), kernel, window, &cut, n_hi, o.r_perp * theta.sin(), cfg);
                    &local
                }
            };
            match form {
                Form::Lab => direction_sums(&o, plan, theta, weight),
                Form::RestFrame => rest_frame_sums(o.xi, plan, theta, weight),
            }
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

/// Energy radiated through the window, summed over all harmonics.
pub fn energy_circular(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    finite_window(f, p, window, cfg, Kernel::Fejer, Form::Lab)
}

/// Phase-time derivative of [`energy_circular`], per unit lab time.
pub fn rate_circular(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    finite_window(f, p, window, cfg, Kernel::Sinc, Form::Lab)
}

/// Per-harmonic `dW_n/dθ` at the given polar angles.
pub fn angular_energy_circular(
    f: &FieldConfig,
    p: &ParticleParams,
    window: &PhaseWindow,
    thetas: &[f64],
    cfg: &GridConfig,
) -> Result<Vec<HarmonicSums>> {
    cfg.validate()?;
    let o = Orbit::new(f, p)?;
    let cut = frequency_cutoff(f, p, cfg)?;
    let n_hi = truncation_order(cut.omega_max * o.r_perp, 1e-3 * cfg.rel_tol.sqrt())? as i64 + 1;
    Ok(thetas
        .iter()
        .map(|&t| {
            let plan = plan_for(o.slope(t), Kernel::Fejer, window, &cut, n_hi, o.r_perp * t.sin(), cfg);
            direction_sums(&o, &plan, t, 1.0 / PI)
        })
        .collect())
}

/// Energy in the average rest frame, from the rest-frame form of the bracket.
pub fn rest_frame_energy_circular(f: &FieldConfig, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    let p = ParticleParams::rest_frame(f);
    finite_window(f, &p, window, cfg, Kernel::Fejer, Form::RestFrame)
}

/// Energy rate in the average rest frame (`Δt = Δφ` there).
pub fn rest_frame_rate_circular(f: &FieldConfig, window: &PhaseWindow, cfg: &GridConfig) -> Result<SpectrumResult> {
    let p = ParticleParams::rest_frame(f);
    finite_window(f, &p, window, cfg, Kernel::Sinc, Form::RestFrame)
}

/// `dW̄/dω` in the average rest frame at the given frequencies, summed over
/// harmonics (no frequency cutoff applied).
pub fn rest_frame_spectral_density_circular(
    f: &FieldConfig,
    window: &PhaseWindow,
    omegas: &[f64],
    cfg: &GridConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let p = ParticleParams::rest_frame(f);
    Orbit::new(f, &p)?;
    let xi = f.xi;
    let b2 = xi * xi / (1.0 + xi * xi);
    let z = xi / (1.0 + xi * xi).sqrt();
    let dphi = window.delta();
    let mut out = Vec::with_capacity(omegas.len());
    for &om in omegas {
        let n_hi = truncation_order(z * om, 1e-3 * cfg.rel_tol.sqrt())? as i64 + 1;
        let r = integrate_vec(
            |theta| {
                let st = theta.sin();
                let row = BesselRow::new((n_hi + 1) as usize, z * om * st).expect("bessel row");
                let v: f64 = (-n_hi..=n_hi)
                    .map(|n| {
                        let k = row.n_over_x(n);
                        let j = row.get(n);
                        let d = row.prime(n);
                        crate::specfun::fejer(om - n as f64, dphi) * (b2 * k * k - j * j + b2 * d * d)
                    })
                    .sum();
                vec![st * v]
            },
            0.0,
            PI,
            1,
            cfg.theta_seed,
            cfg,
        )?;
        out.push(om * om * r.values[0] / PI);
    }
    Ok(out)
}

/// Velocities entering the classical formulas.
fn velocities(o: &Orbit) -> (f64, f64) {
    (o.pz / o.p0, o.xi / o.p0)
}

/// Per-harmonic classical angular integrand of the lab-frame rate.
fn classical_integrand(o: &Orbit, theta: f64, n_keep: usize) -> Vec<f64> {
    let (bpar, bperp) = velocities(o);
    let (st, ct) = theta.sin_cos();
    let den = 1.0 - bpar * ct;
    let pref = (o.pm / o.p0).powi(2) * st / (den * den * den);
    let x1 = bperp * st / den;
    let mut tab = vec![0.0; n_keep + 2];
    (1..=n_keep)
        .map(|n| {
            let nf = n as f64;
            crate::specfun::fill_bessel_table(&mut tab[..n + 2], nf * x1);
            let (jm, j, jp) = (tab[n - 1], tab[n], tab[n + 1]);
            // ((cosθ - β∥)/sinθ) J_n = (cosθ - β∥) β⊥/(1 - β∥cosθ) · n J_n/x
            let a = (ct - bpar) * bperp / den * 0.5 * (jm + jp);
            let _ = j;
            let d = 0.5 * (jm - jp);
            pref * nf * nf * (a * a + bperp * bperp * d * d)
        })
        .collect()
}

/// Schott's angular integrand for circular motion at reduced speed `z`.
fn schott_integrand(xi: f64, theta: f64, n_keep: usize) -> Vec<f64> {
    let z = xi / (1.0 + xi * xi).sqrt();
    let b2 = z * z;
    let (st, ct) = theta.sin_cos();
    let mut tab = vec![0.0; n_keep + 2];
    (1..=n_keep)
        .map(|n| {
            let nf = n as f64;
            crate::specfun::fill_bessel_table(&mut tab[..n + 2], nf * z * st);
            let (jm, jp) = (tab[n - 1], tab[n + 1]);
            // cotθ J_n(n z sinθ) = cosθ · z · n J_n/x
            let a = ct * z * 0.5 * (jm + jp);
            let d = 0.5 * (jm - jp);
            st * nf * nf * (a * a + b2 * d * d)
        })
        .collect()
}

fn classical_sum<F>(z: f64, n_max: Option<usize>, cfg: &GridConfig, integrand: F) -> Result<SpectrumResult>
where
    F: Fn(f64, usize) -> Vec<f64> + Sync + Send,
{
    cfg.validate()?;
    let mut n_keep = n_max.or(cfg.n_max_override).unwrap_or_else(|| harmonic_cutoff(z, cfg.rel_tol));
    let fixed = n_max.is_some() || cfg.n_max_override.is_some();
    for attempt in 0..6 {
        let r = integrate_vec(|t| integrand(t, n_keep), 0.0, PI, n_keep, cfg.theta_seed, cfg)?;
        let tails = fixed || tails_negligible(&r.values, false, cfg.rel_tol);
        if tails || attempt == 5 {
            return Ok(SpectrumResult::from_harmonics(
                1,
                &r.values,
                r.total_error(),
                None,
                None,
                r.converged && tails,
                r.evaluations,
            ));
        }
        n_keep += n_keep / 2 + 5;
    }
    unreachable!()
}

/// Classical lab-frame energy rate (harmonics `n ≥ 1`).
pub fn classical_rate_circular(f: &FieldConfig, p: &ParticleParams, cfg: &GridConfig) -> Result<SpectrumResult> {
    let o = Orbit::new(f, p)?;
    if o.xi == 0.0 {
        return Ok(SpectrumResult::from_harmonics(1, &[0.0], 0.0, None, None, true, 0));
    }
    let z = crate::spectrum::rest_frame_peak_speed(f);
    classical_sum(z, None, cfg, |t, n| classical_integrand(&o, t, n))
}

/// Schott's rate for circular motion in the average rest frame.
pub fn schott_rate(xi: f64, n_max: Option<usize>, cfg: &GridConfig) -> Result<SpectrumResult> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::Domain(alloc::format!("xi must be finite and non-negative, got {xi}")));
    }
    if xi == 0.0 {
        return Ok(SpectrumResult::from_harmonics(1, &[0.0], 0.0, None, None, true, 0));
    }
    let z = xi / (1.0 + xi * xi).sqrt();
    classical_sum(z, n_max, cfg, |t, n| schott_integrand(xi, t, n))
}

/// Upper bound of the energy for long windows, `2Δt · w_cl`, from the
/// closed-form harmonic sum.
pub fn max_energy_circular(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<f64> {
    let dt = time_from_phase(f, p, window)?.value;
    Ok(2.0 * dt * classical_rate_circular(f, p, cfg)?.total)
}

/// Upper bound of the energy evaluated from the finite-window integrand:
/// `T_n` is replaced by `Δφ²/2` and the frequency integral is restricted to
/// the line `ω_res ± Δω/2` of every harmonic `n ≥ 1`.
pub fn max_energy_circular_windowed(
    f: &FieldConfig,
    p: &ParticleParams,
    window: &PhaseWindow,
    cfg: &GridConfig,
) -> Result<SpectrumResult> {
    cfg.validate()?;
    let o = Orbit::new(f, p)?;
    let dphi = window.delta();
    let dt = time_from_phase(f, p, window)?.value;
    let z = crate::spectrum::rest_frame_peak_speed(f);
    let (gx, gw) = gauss_legendre(12);
    let peak = move |theta: f64, n_keep: usize| -> Vec<f64> {
        let st = theta.sin();
        let wr = 1.0 / o.slope(theta);
        let dw = wr * o.p0 / o.pm * 4.0 * PI / dt;
        (1..=n_keep as i64)
            .map(|n| {
                let c = n as f64 * wr;
                let mut acc = 0.0;
                for (x, w) in gx.iter().zip(&gw) {
                    let om = c + 0.5 * dw * x;
                    let row = BesselRow::new((n + 1) as usize, om * o.r_perp * st).expect("bessel row");
                    let mut b = [0.0];
                    o.bracket(&row, n, &mut b);
                    acc += 0.5 * dw * w * om * om * b[0];
                }
                st * 0.5 * dphi * dphi * acc / PI
            })
            .collect()
    };
    let mut r = classical_sum(z, None, cfg, peak)?;
    r.window = Some(*window);
    Ok(r)
}

/// Windowed current rebuilt from its Bessel-harmonic expansion, with the
/// constant phase chosen so that it equals the direct transform referenced
/// to `φ0`.
pub fn series_current_circular(
    f: &FieldConfig,
    p: &ParticleParams,
    k: WaveVector,
    window: &PhaseWindow,
    phi0: f64,
    tol: f64,
) -> Result<CurrentFourier> {
    let o = Orbit::new(f, p)?;
    let (st, ct) = k.theta.sin_cos();
    let (sg, cg) = k.phi_gamma.sin_cos();
    let eta = k.omega * o.slope(k.theta);
    let mu = k.omega * o.r_perp * st;
    let h = o.handedness;
    // Φ' = φ' - ϰφ_γ + π/2 turns the phase into ηΦ' - μ sinΦ' + C'.
    let shift = -h * k.phi_gamma + 0.5 * PI;
    let phase0 = eta * phi0 - mu * (phi0 - h * k.phi_gamma).cos() + mu * cg;
    let c_prime = eta * (h * k.phi_gamma - 0.5 * PI) + mu * cg - phase0;
    let a = window.phi_in + shift;
    let b = window.phi + shift;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let n_hi = truncation_order(mu, tol * 1e-3)? as i64 + 1;
    let row = BesselRow::new((n_hi + 1) as usize, mu)?;
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut sx = Complex64::new(0.0, 0.0);
    let mut sy = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    for n in -n_hi..=n_hi {
        let x = eta - n as f64;
        let amp = if (x * half).abs() < 1e-8 { 2.0 * half } else { 2.0 * (x * half).sin() / x };
        let integral = Complex64::from_polar(amp, x * mid);
        let j = row.get(n);
        let d = row.prime(n);
        let k_n = row.n_over_x(n);
        s0 += integral * j;
        sx += integral * (i * (h * sg * d) - cg * k_n);
        sy += integral * (-i * (h * cg * d) - sg * k_n);
    }
    let _ = ct;
    let e = Complex64::from_polar(1.0, c_prime);
    let pref = 1.0 / (4.0 * PI * PI);
    let j0 = -e * s0 * (pref * o.p0 / o.pm);
    let jz = -e * s0 * (pref * o.pz / o.pm);
    let jx = e * sx * (pref * o.r_perp);
    let jy = e * sy * (pref * o.r_perp);
    Ok(CurrentFourier { j: [j0, jx, jy, jz], k, window: *window, phi0 })
}
