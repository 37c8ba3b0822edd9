//! Result types and machinery shared by the circular and linear spectra.

#[allow(unused_imports)]
use crate::float::Float;
use crate::error::Result;
use crate::harmonic::HarmonicSums;
use crate::kinematics::{quasimomentum, FieldConfig, ParticleParams, PhaseWindow, Polarization};
use crate::quadrature::{compensated_sum, integrate_vec_judged, GridConfig};
use crate::float::PI;
use alloc::vec::Vec;

/// Photon mode coordinates. The azimuth is integrated out where possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionPoint {
    pub n: i64,
    pub omega: f64,
    pub theta: f64,
}

/// A radiated energy (or rate) with its harmonic breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub total: f64,
    /// `(n, contribution)` in ascending `n`.
    pub per_harmonic: Vec<(i64, f64)>,
    /// Interference between harmonics, zero unless requested explicitly.
    pub interference: f64,
    pub n_max_used: i64,
    pub quadrature_error_estimate: f64,
    pub window: Option<PhaseWindow>,
    /// Upper end of the frequency integration, `None` for classical limits.
    pub omega_max: Option<f64>,
    pub converged: bool,
    /// Set when some harmonic contributes a negative amount.
    pub negative_harmonic: bool,
    pub evaluations: usize,
}

impl SpectrumResult {
    /// Builds a result from per-harmonic values summed in ascending `|n|`.
    pub(crate) fn from_harmonics(
        n_lo: i64,
        values: &[f64],
        error: f64,
        window: Option<PhaseWindow>,
        omega_max: Option<f64>,
        converged: bool,
        evaluations: usize,
    ) -> Self {
        let per_harmonic: Vec<(i64, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (n_lo + i as i64, v))
            .collect();
        let mut order: Vec<(i64, f64)> = per_harmonic.clone();
        order.sort_by_key(|&(n, _)| (n.unsigned_abs(), n));
        let total = compensated_sum(order.iter().map(|&(_, v)| v));
        let n_max_used = per_harmonic.iter().map(|&(n, _)| n.abs()).max().unwrap_or(0);
        let negative_harmonic = per_harmonic.iter().any(|&(_, v)| v < 0.0);
        SpectrumResult {
            total,
            per_harmonic,
            interference: 0.0,
            n_max_used,
            quadrature_error_estimate: error,
            window,
            omega_max,
            converged,
            negative_harmonic,
            evaluations,
        }
    }

    pub fn harmonic(&self, n: i64) -> f64 {
        self.per_harmonic
            .iter()
            .find(|&&(m, _)| m == n)
            .map(|&(_, v)| v)
            .unwrap_or(0.0)
    }

    /// Sum of the contributions with `n ≤ 0`.
    pub fn non_positive_share(&self) -> f64 {
        compensated_sum(self.per_harmonic.iter().filter(|&&(n, _)| n <= 0).map(|&(_, v)| v))
    }
}

/// Frequency range of a finite-window spectrum: full weight below
/// `omega_t`, smooth roll-off to zero at `omega_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyCutoff {
    pub omega_t: f64,
    pub omega_max: f64,
    /// Harmonics resolved below `omega_t` in every direction.
    pub n_keep: usize,
    /// Largest fundamental frequency over all directions.
    pub omega_r_max: f64,
}

/// Largest speed reached in the average rest frame. Harmonic content is
/// invariant under boosts along the wave, so this sets the harmonic cutoff
/// in every frame.
pub fn rest_frame_peak_speed(f: &FieldConfig) -> f64 {
    let x2 = f.xi * f.xi;
    match f.polarization {
        Polarization::Circular => f.xi / (1.0 + x2).sqrt(),
        Polarization::Linear => {
            let p0 = (2.0 + 1.5 * x2) / (2.0 * (1.0 + 0.5 * x2).sqrt());
            (1.0 - 1.0 / (p0 * p0)).max(0.0).sqrt()
        }
    }
}

/// Number of harmonics needed for the classical series to settle at `tol`,
/// from the Debye asymptotics `J_n(nz) ~ exp(-n(atanh s - s))`, `s = √(1-z²)`.
pub fn harmonic_cutoff(z: f64, tol: f64) -> usize {
    if !(z > 0.0) {
        return 2;
    }
    let z = z.min(1.0 - 1e-12);
    let s = (1.0 - z * z).sqrt();
    let d = s.atanh() - s;
    let n = (-tol.ln()) / (2.0 * d);
    (n.ceil() as usize).clamp(2, 100_000) + 2
}

/// Largest resonance spacing `ω_r` over directions (κ = 0).
pub fn max_fundamental(f: &FieldConfig, p: &ParticleParams) -> Result<f64> {
    let pm = p.p_minus;
    match f.polarization {
        Polarization::Circular => {
            let q = quasimomentum(p)?;
            let h = 0.5 * f.xi * f.xi / pm;
            Ok(pm / (q.q0 + h - (q.qz + h).abs()))
        }
        Polarization::Linear => {
            let x2 = f.xi * f.xi;
            let lp = 1.0 + 0.5 * x2 + pm * pm;
            let lm = 1.0 + 0.5 * x2 - pm * pm;
            Ok(2.0 * pm * pm / (lp - lm.abs()))
        }
    }
}

pub fn frequency_cutoff(f: &FieldConfig, p: &ParticleParams, cfg: &GridConfig) -> Result<FrequencyCutoff> {
    let wr = max_fundamental(f, p)?;
    let frac = cfg.taper_fraction;
    if let Some(wmax) = cfg.omega_max {
        let omega_t = wmax * (1.0 - frac);
        return Ok(FrequencyCutoff {
            omega_t,
            omega_max: wmax,
            n_keep: (omega_t / wr).floor() as usize,
            omega_r_max: wr,
        });
    }
    let n_keep = match cfg.n_max_override {
        Some(n) => n.max(1),
        None => harmonic_cutoff(rest_frame_peak_speed(f), cfg.rel_tol),
    };
    let omega_t = (n_keep as f64 + 0.5) * wr;
    let mut omega_max = if frac > 0.0 { omega_t / (1.0 - frac) } else { omega_t };
    if frac > 0.0 {
        omega_max = omega_max.max(omega_t + 2.0 * wr);
    }
    Ok(FrequencyCutoff { omega_t, omega_max, n_keep, omega_r_max: wr })
}

/// Outcome of a per-harmonic angular integration.
#[derive(Debug, Clone)]
pub(crate) struct AngularSums {
    pub n_lo: i64,
    pub values: Vec<f64>,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Integrates `f(θ)` over `[0, π]` where `f` returns per-harmonic values with
/// interpolation errors.
pub(crate) fn integrate_theta<F>(n_lo: i64, n_hi: i64, cfg: &GridConfig, f: F) -> Result<AngularSums>
where
    F: Fn(f64) -> HarmonicSums + Sync + Send,
{
    let nh = (n_hi - n_lo + 1) as usize;
    let r = integrate_vec_judged(
        |t| {
            let h = f(t);
            let mut v = h.values;
            v.extend_from_slice(&h.errors);
            v
        },
        0.0,
        PI,
        2 * nh,
        nh,
        cfg.theta_seed,
        cfg,
    )?;
    let values = r.values[..nh].to_vec();
    let error = r.errors.iter().sum::<f64>() + r.values[nh..].iter().map(|v| v.abs()).sum::<f64>();
    // The carried per-direction errors are not part of the adaptive test.
    let scale: f64 = values.iter().map(|v| v.abs()).sum();
    Ok(AngularSums {
        n_lo,
        values,
        error,
        converged: r.converged && error <= cfg.tolerance_for(scale),
        evaluations: r.evaluations,
    })
}

/// True when the three outermost harmonics on each side are negligible.
pub(crate) fn tails_negligible(values: &[f64], negative_side: bool, tol: f64) -> bool {
    let scale: f64 = values.iter().map(|v| v.abs()).sum();
    let lim = tol * scale.max(f64::MIN_POSITIVE);
    let k = values.len();
    if k < 6 {
        return false;
    }
    let hi = values[k - 3..].iter().all(|v| v.abs() <= lim);
    let lo = !negative_side || values[..3].iter().all(|v| v.abs() <= lim);
    hi && lo
}

/// Azimuthal symmetry used to shorten the periodic trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AzimuthFold {
    /// Even in `φ_γ`: nodes on `[0, π]`.
    Half,
    /// Even and invariant under `φ_γ → π - φ_γ`: nodes on `[0, π/2]`.
    Quarter,
}

/// `M` equispaced nodes over `[0, 2π)` folded by symmetry. Returns
/// `(node, weight)` with weights summing to `2π`; node `k` of `M` is node
/// `2k` of `2M`.
pub(crate) fn folded_trapezoid(m: usize, fold: AzimuthFold) -> Vec<(f64, f64)> {
    debug_assert!(m % 4 == 0 && m >= 4);
    let h = 2.0 * PI / m as f64;
    let (last, inner) = match fold {
        AzimuthFold::Half => (m / 2, 2.0),
        AzimuthFold::Quarter => (m / 4, 4.0),
    };
    (0..=last)
        .map(|k| {
            let w = if k == 0 || k == last { 0.5 * inner } else { inner };
            (k as f64 * h, w * h)
        })
        .collect()
}

/// Periodic trapezoid over the azimuth with node doubling until the
/// per-harmonic sums settle to `tol`. Interpolation errors are carried
/// along and the last doubling difference is added to them.
pub(crate) fn azimuthal_sums<F>(m0: usize, fold: AzimuthFold, tol: f64, mut eval: F) -> HarmonicSums
where
    F: FnMut(f64) -> HarmonicSums,
{
    let mut m = m0.div_ceil(4).max(1) * 4;
    let mut cache: Vec<HarmonicSums> = folded_trapezoid(m, fold).iter().map(|&(x, _)| eval(x)).collect();
    let combine = |cache: &[HarmonicSums], m: usize| -> HarmonicSums {
        let mut out = HarmonicSums::zeros(cache[0].n_lo, cache[0].n_hi());
        for (c, &(_, w)) in cache.iter().zip(&folded_trapezoid(m, fold)) {
            axpy(&mut out.values, w, &c.values);
            axpy(&mut out.errors, w, &c.errors);
        }
        out
    };
    let mut prev = combine(&cache, m);
    loop {
        let m2 = 2 * m;
        let nodes = folded_trapezoid(m2, fold);
        let mut next = Vec::with_capacity(nodes.len());
        for (k, &(x, _)) in nodes.iter().enumerate() {
            if k % 2 == 0 {
                next.push(cache[k / 2].clone());
            } else {
                next.push(eval(x));
            }
        }
        let mut cur = combine(&next, m2);
        let diff: f64 = cur.values.iter().zip(&prev.values).map(|(a, b)| (a - b).abs()).sum();
        let scale: f64 = cur.values.iter().map(|v| v.abs()).sum();
        if diff <= 0.1 * tol * scale || diff == 0.0 || m2 >= 1 << 14 {
            for (e, (a, b)) in cur.errors.iter_mut().zip(cur.values.iter().zip(&prev.values)) {
                *e += (a - b).abs();
            }
            return cur;
        }
        cache = next;
        prev = cur;
        m = m2;
    }
}

/// Element-wise `a += w·b`.
pub(crate) fn axpy(a: &mut [f64], w: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += w * y;
    }
}
