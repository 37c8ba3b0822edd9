//! Direct quadrature of the windowed current and of the radiated energy.
//!
//! The current seen through the window `[φ_in, φ]` is
//!
//! ```text
//! j^μ(k) = -(1/4π²) ∫ P^μ(φ')/p_- · exp(iω[g(φ') - g(φ0')]) dφ'
//! ```
//!
//! with `g = t - n·r` known in closed form for both field types and any κ.
//! Nothing here uses Bessel expansions; the module is the reference the
//! series evaluators are compared against.

#[allow(unused_imports)]
use crate::float::Float;
use crate::error::{Error, Result};
use crate::float::{PI, TAU};
use crate::kinematics::{FieldConfig, ParticleParams, PhaseWindow, Polarization, Worldline};
use crate::quadrature::{gauss_legendre, integrate_vec_judged, taper, GridConfig};
use crate::spectrum::frequency_cutoff;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Photon wave vector in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    pub omega: f64,
    pub theta: f64,
    pub phi_gamma: f64,
}

impl WaveVector {
    pub fn new(omega: f64, theta: f64, phi_gamma: f64) -> Self {
        WaveVector { omega, theta, phi_gamma }
    }

    pub fn direction(&self) -> [f64; 3] {
        direction(self.theta, self.phi_gamma)
    }
}

#[inline]
pub(crate) fn direction(theta: f64, phi_gamma: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi_gamma.sin_cos();
    [st * cp, st * sp, ct]
}

/// Windowed Fourier transform of the current, components `(j0, jx, jy, jz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentFourier {
    pub j: [Complex64; 4],
    pub k: WaveVector,
    pub window: PhaseWindow,
    pub phi0: f64,
}

impl CurrentFourier {
    /// `|j0|² - |j|²`.
    pub fn minkowski_square(&self) -> f64 {
        self.j[0].norm_sqr() - self.j[1].norm_sqr() - self.j[2].norm_sqr() - self.j[3].norm_sqr()
    }

    /// `|n × (n × j)|²`.
    pub fn transverse_square(&self) -> f64 {
        let n = self.k.direction();
        let nj = self.j[1] * n[0] + self.j[2] * n[1] + self.j[3] * n[2];
        self.j[1].norm_sqr() + self.j[2].norm_sqr() + self.j[3].norm_sqr() - nj.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.j.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every component by `e^{iα}`.
    pub fn rotated(mut self, alpha: f64) -> Self {
        let r = Complex64::from_polar(1.0, alpha);
        for c in self.j.iter_mut() {
            *c *= r;
        }
        self
    }
}

/// Gauss-Legendre panel nodes over the window, resolving both the field
/// period and an emission phase advancing at most `phase_rate` per radian.
fn phase_nodes(window: &PhaseWindow, phase_rate: f64, panels_min: usize) -> (Vec<f64>, Vec<f64>) {
    const ORDER: usize = 16;
    let dphi = window.delta();
    // Sixteen nodes integrate e^{iax} to roundoff for up to ~12 rad per panel.
    let by_phase = (phase_rate * dphi / 10.0).ceil() as usize;
    let np = by_phase.max((dphi / 2.0).ceil() as usize).max(panels_min).max(1);
    let (x, w) = gauss_legendre(ORDER);
    let h = dphi / np as f64;
    let mut nodes = Vec::with_capacity(np * ORDER);
    let mut weights = Vec::with_capacity(np * ORDER);
    for k in 0..np {
        let a = window.phi_in + k as f64 * h;
        for i in 0..ORDER {
            nodes.push(a + 0.5 * h * (x[i] + 1.0));
            weights.push(0.5 * h * w[i]);
        }
    }
    (nodes, weights)
}

fn current_sum(wl: &Worldline, n: &[f64; 3], omega: f64, phi0: f64, nodes: &[f64], weights: &[f64]) -> [Complex64; 4] {
    let pm = wl.particle.p_minus;
    let g0 = wl.emission_phase(n, phi0);
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for (&x, &w) in nodes.iter().zip(weights) {
        let e = Complex64::from_polar(w / pm, omega * (wl.emission_phase(n, x) - g0));
        let m = wl.momentum(x);
        acc[0] += e * m.p0;
        acc[1] += e * m.px;
        acc[2] += e * m.py;
        acc[3] += e * m.pz;
    }
    let s = -1.0 / (4.0 * PI * PI);
    acc.map(|c| c * s)
}

/// Windowed current by panel quadrature; the panel count is doubled until
/// two successive results agree to `tol` relative to the current's norm.
pub fn current_fourier_direct(
    f: &FieldConfig,
    p: &ParticleParams,
    k: WaveVector,
    window: &PhaseWindow,
    phi0: f64,
    tol: f64,
) -> Result<CurrentFourier> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let wl = Worldline::new(*f, *p)?;
    let n = k.direction();
    let rate = k.omega.abs() * wl.max_emission_rate();
    // Natural size of the integral, used as an absolute floor.
    let m_in = wl.momentum(window.phi_in);
    let scale = window.delta() * (m_in.p0 + f.xi) / (p.p_minus * 4.0 * PI * PI);
    let mut panels = 1;
    let (nodes, weights) = phase_nodes(window, rate, panels);
    let mut prev = current_sum(&wl, &n, k.omega, phi0, &nodes, &weights);
    panels = nodes.len() / 16;
    for _ in 0..12 {
        panels *= 2;
        let (nodes, weights) = phase_nodes(window, rate, panels);
        let next = current_sum(&wl, &n, k.omega, phi0, &nodes, &weights);
        let norm = next.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let diff = next
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if diff <= tol * norm || diff <= 1e-15 * scale {
            return Ok(CurrentFourier { j: next, k, window: *window, phi0 });
        }
        prev = next;
    }
    Err(Error::Accuracy {
        what: "windowed current quadrature".to_string(),
        value: prev.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
        error_estimate: f64::NAN,
    })
}

/// Current of a free particle (`ξ = 0`, κ = 0) in closed form.
pub fn free_current(p: &ParticleParams, k: WaveVector, window: &PhaseWindow, phi0: f64) -> Result<CurrentFourier> {
    p.validate()?;
    if p.has_kappa() {
        return Err(Error::Unsupported("closed-form free current assumes kappa = 0".to_string()));
    }
    let pm = p.p_minus;
    let q0 = (1.0 + pm * pm) / (2.0 * pm);
    let qz = (1.0 - pm * pm) / (2.0 * pm);
    let n = k.direction();
    let s = k.omega * (q0 - n[2] * qz) / pm;
    // ∫ exp(i s (φ' - φ0)) dφ' over the window.
    let c = 0.5 * (window.phi + window.phi_in);
    let d = window.delta();
    let x = 0.5 * s * d;
    let amp = if x.abs() < 1e-8 { d * (1.0 - x * x / 6.0) } else { 2.0 * x.sin() / s };
    let integral = Complex64::from_polar(amp, s * (c - phi0));
    let pref = -1.0 / (4.0 * PI * PI * pm);
    let j = [
        integral * (pref * q0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        integral * (pref * qz),
    ];
    Ok(CurrentFourier { j, k, window: *window, phi0 })
}

/// Energies from the two quadratic forms of the current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEnergy {
    /// `-4π² ∫ (|j0|² - |j|²) d³k`.
    pub minkowski: f64,
    /// `4π² ∫ |n × (n × j)|² d³k`.
    pub crossproduct: f64,
    pub error_estimate: f64,
    pub omega_max: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl OracleEnergy {
    /// `|W_cross - W_mink| / |W_cross|`.
    pub fn discrepancy(&self) -> f64 {
        (self.crossproduct - self.minkowski).abs() / self.crossproduct.abs()
    }
}

/// Per-direction frequency integrals `∫ ω² χ(ω) (…) dω` of both forms, by the
/// trapezoid rule on a uniform grid. The integrand is even in ω and vanishes
/// with all derivatives at `ω_max`, so the rule converges spectrally once the
/// step resolves the spread of the emission phase over the window.
struct DirectionIntegrator<'a> {
    wl: &'a Worldline,
    window: PhaseWindow,
    omega_t: f64,
    omega_max: f64,
    rel_tol: f64,
}

impl DirectionIntegrator<'_> {
    fn eval(&self, theta: f64, phi_gamma: f64) -> ([f64; 2], f64) {
        let n = direction(theta, phi_gamma);
        let pm = self.wl.particle.p_minus;
        let rate = self.omega_max * self.wl.max_emission_rate();
        let (nodes, weights) = phase_nodes(&self.window, rate, 1);
        let m = nodes.len();
        let mut g = Vec::with_capacity(m);
        let mut comps = Vec::with_capacity(m);
        for (&x, &w) in nodes.iter().zip(&weights) {
            g.push(self.wl.emission_phase(&n, x));
            let mo = self.wl.momentum(x);
            let s = w / pm;
            comps.push([mo.p0 * s, mo.px * s, mo.py * s, mo.pz * s]);
        }
        let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let gc = 0.5 * (gmin + gmax);
        for v in g.iter_mut() {
            *v -= gc;
        }
        let spread = (gmax - gmin).max(1e-3);
        // The coarse half of the grid already samples above Nyquist.
        let mut steps = 2 * ((self.omega_max * spread / PI).ceil() as usize).max(16);
        loop {
            let (fine, coarse) = self.trapezoid(&n, &g, &comps, steps);
            let err = (fine[0] - coarse[0]).abs() + (fine[1] - coarse[1]).abs();
            let scale = fine[0].abs().max(fine[1].abs());
            if err <= 0.1 * self.rel_tol * scale || err < 1e-300 || steps > 1 << 22 {
                return (fine, err);
            }
            steps *= 2;
        }
    }

    /// Trapezoid sums with `steps` intervals and with every second node.
    fn trapezoid(&self, n: &[f64; 3], g: &[f64], comps: &[[f64; 4]], steps: usize) -> ([f64; 2], [f64; 2]) {
        let h = self.omega_max / steps as f64;
        let m = g.len();
        let step: Vec<Complex64> = g.iter().map(|&x| Complex64::from_polar(1.0, h * x)).collect();
        let mut e: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); m];
        let mut mink = [0.0; 2];
        let mut cross = [0.0; 2];
        for k in 1..steps {
            let om = k as f64 * h;
            if k % 64 == 0 {
                for (ei, &x) in e.iter_mut().zip(g) {
                    *ei = Complex64::from_polar(1.0, om * x);
                }
            } else {
                for (ei, s) in e.iter_mut().zip(&step) {
                    *ei *= s;
                }
            }
            let chi = taper(om, self.omega_t, self.omega_max);
            if chi == 0.0 {
                break;
            }
            let mut j = [Complex64::new(0.0, 0.0); 4];
            for (ei, c) in e.iter().zip(comps) {
                j[0] += ei * c[0];
                j[1] += ei * c[1];
                j[2] += ei * c[2];
                j[3] += ei * c[3];
            }
            let sp = j[1].norm_sqr() + j[2].norm_sqr() + j[3].norm_sqr();
            let nj = j[1] * n[0] + j[2] * n[1] + j[3] * n[2];
            let w = om * om * chi;
            let par = k % 2;
            mink[par] += w * (j[0].norm_sqr() - sp);
            cross[par] += w * (sp - nj.norm_sqr());
        }
        // j = -(1/4π²) Σ…, and the energy carries 4π² in front.
        let s = h / (4.0 * PI * PI);
        (
            [-s * (mink[0] + mink[1]), s * (cross[0] + cross[1])],
            [-2.0 * s * mink[0], 2.0 * s * cross[0]],
        )
    }
}

/// Both quadratic forms of the energy by direct quadrature over frequency,
/// polar angle (adaptive) and azimuth (periodic trapezoid, doubled until
/// settled). The frequency cutoff is the one used by the series evaluators.
pub fn oracle_energies(
    f: &FieldConfig,
    p: &ParticleParams,
    window: &PhaseWindow,
    cfg: &GridConfig,
) -> Result<OracleEnergy> {
    cfg.validate()?;
    let wl = Worldline::new(*f, *p)?;
    let cut = frequency_cutoff(f, p, cfg)?;
    let di = DirectionIntegrator {
        wl: &wl,
        window: *window,
        omega_t: cut.omega_t,
        omega_max: cut.omega_max,
        rel_tol: cfg.rel_tol,
    };
    // Mirror symmetry y → -y holds for the linear field when κ_y = 0.
    let folded = f.polarization == Polarization::Linear && p.kappa[1] == 0.0;
    let span = if folded { PI } else { TAU };
    let azimuth = |theta: f64| -> Vec<f64> {
        let mut m = cfg.phi_seed.max(4);
        let mut vals: Vec<[f64; 2]> = Vec::new();
        let mut errs = 0.0;
        let mut prev: Option<[f64; 2]> = None;
        loop {
            // Nodes j·span/m for the periodic (or mirrored) rule; reuse the coarser ones.
            let mut fresh = Vec::new();
            let count = if folded { m + 1 } else { m };
            let stride = if prev.is_some() { 2 } else { 1 };
            for j in 0..count {
                if stride == 2 && j % 2 == 0 {
                    continue;
                }
                fresh.push(j);
            }
            let new_vals: Vec<([f64; 2], f64)> =
                fresh.iter().map(|&j| di.eval(theta, span * j as f64 / m as f64)).collect();
            let mut all = vec![[0.0; 2]; count];
            if prev.is_some() {
                for (j, v) in vals.iter().enumerate() {
                    all[2 * j] = *v;
                }
            }
            for (&j, (v, e)) in fresh.iter().zip(&new_vals) {
                all[j] = *v;
                errs += e;
            }
            vals = all;
            let h = span / m as f64;
            let mut sum = [0.0; 2];
            for (j, v) in vals.iter().enumerate() {
                let w = if folded && (j == 0 || j == m) { 0.5 } else { 1.0 };
                sum[0] += w * h * v[0];
                sum[1] += w * h * v[1];
            }
            if folded {
                sum = [2.0 * sum[0], 2.0 * sum[1]];
            }
            if let Some(pv) = prev {
                let err = (sum[0] - pv[0]).abs() + (sum[1] - pv[1]).abs();
                let scale = sum[0].abs().max(sum[1].abs());
                if err <= 0.1 * cfg.rel_tol * scale || err < 1e-300 || m >= 4096 {
                    let st = theta.sin();
                    return vec![st * sum[0], st * sum[1], st * (err + errs * h)];
                }
            }
            prev = Some(sum);
            m *= 2;
        }
    };
    let r = integrate_vec_judged(azimuth, 0.0, PI, 3, 2, cfg.theta_seed, cfg)?;
    let minkowski = r.values[0];
    let crossproduct = r.values[1];
    let error_estimate = r.errors[0].max(r.errors[1]) + r.values[2].abs();
    Ok(OracleEnergy {
        minkowski,
        crossproduct,
        error_estimate,
        omega_max: cut.omega_max,
        converged: r.converged,
        evaluations: r.evaluations,
    })
}

fn require(e: &OracleEnergy, value: f64) -> Result<f64> {
    if e.converged {
        Ok(value)
    } else {
        Err(Error::Accuracy {
            what: "oracle energy".to_string(),
            value,
            error_estimate: e.error_estimate,
        })
    }
}

/// Energy from the Minkowski square of the current.
pub fn energy_minkowski(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<f64> {
    let e = oracle_energies(f, p, window, cfg)?;
    require(&e, e.minkowski)
}

/// Energy from the transverse part of the spatial current.
pub fn energy_crossproduct(f: &FieldConfig, p: &ParticleParams, window: &PhaseWindow, cfg: &GridConfig) -> Result<f64> {
    let e = oracle_energies(f, p, window, cfg)?;
    require(&e, e.crossproduct)
}

/// One row of a window-growth study at fixed wave vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentLimitRow {
    pub dphi: f64,
    pub modulus: f64,
    /// `‖j(Δφ_i) - j(Δφ_{i-1})‖`, zero for the first row.
    pub cauchy_difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentLimitReport {
    pub k: WaveVector,
    pub rows: Vec<CurrentLimitRow>,
    /// Slope of `log|j|` against `log Δφ` over the last two rows.
    pub growth_exponent: f64,
}

/// Tabulates the current along windows `[0, Δφ_i]` of increasing length.
pub fn classical_current_limit(
    f: &FieldConfig,
    p: &ParticleParams,
    k: WaveVector,
    dphis: &[f64],
    tol: f64,
) -> Result<CurrentLimitReport> {
    if dphis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("window lengths must increase".to_string()));
    }
    let mut rows = Vec::with_capacity(dphis.len());
    let mut prev: Option<CurrentFourier> = None;
    for &d in dphis {
        let w = PhaseWindow::new(0.0, d)?;
        let j = current_fourier_direct(f, p, k, &w, 0.0, tol)?;
        let diff = match prev {
            Some(q) => j.j.iter().zip(&q.j).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt(),
            None => 0.0,
        };
        rows.push(CurrentLimitRow { dphi: d, modulus: j.norm(), cauchy_difference: diff });
        prev = Some(j);
    }
    let growth_exponent = if rows.len() >= 2 {
        let a = rows[rows.len() - 2];
        let b = rows[rows.len() - 1];
        (b.modulus / a.modulus).ln() / (b.dphi / a.dphi).ln()
    } else {
        f64::NAN
    };
    Ok(CurrentLimitReport { k, rows, growth_exponent })
}
