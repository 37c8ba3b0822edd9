//! Integer-order Bessel functions, two-argument generalized Bessel
//! coefficients and the finite-window spectral kernels.

use crate::error::{domain, Error, Result};
#[allow(unused_imports)]
use crate::float::Float;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

/// Largest harmonic order accepted by the Bessel routines.
pub const N_MAX: i64 = 1_000_000;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

fn check_args(n: i64, x: f64) -> Result<()> {
    if n.abs() > N_MAX {
        return Err(domain!("Bessel order {n} exceeds the cap {N_MAX}"));
    }
    if !x.is_finite() {
        return Err(domain!("Bessel argument must be finite, got {x}"));
    }
    Ok(())
}

/// Start order of the backward recurrence for orders up to `n` at `|x|`.
fn miller_start(n: usize, ax: f64) -> usize {
    let base = (n as f64).max(ax);
    let m = base + 20.0 + (12.0 * ax.cbrt()).ceil();
    let m = m as usize + 1;
    m + (m & 1)
}

/// Sign applied to `J_n(x)` when mapping to `|n|`, `|x|`.
fn parity_sign(n: i64, x: f64) -> f64 {
    let flip = (n < 0) as i64 + (x < 0.0) as i64;
    if flip % 2 == 1 && n % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

/// `J_n(x)` for integer `n`.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    check_args(n, x)?;
    let sign = parity_sign(n, x);
    let n = n.unsigned_abs() as usize;
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let m = miller_start(n, ax);
    let two_over_x = 2.0 / ax;
    let mut jp1 = 0.0; // J_{k+1}
    let mut jk = 1e-300; // J_k
    let mut norm = 0.0;
    let mut target = 0.0;
    let mut k = m;
    loop {
        if k == n {
            target = jk;
        }
        if k % 2 == 0 {
            norm += if k == 0 { jk } else { 2.0 * jk };
        }
        if k == 0 {
            break;
        }
        let jm1 = (k as f64) * two_over_x * jk - jp1;
        jp1 = jk;
        jk = jm1;
        k -= 1;
        if jk.abs() > RESCALE_ABOVE {
            jk *= RESCALE_BY;
            jp1 *= RESCALE_BY;
            norm *= RESCALE_BY;
            target *= RESCALE_BY;
        }
    }
    Ok(sign * target / norm)
}

/// `J'_n(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2`.
pub fn bessel_j_prime(n: i64, x: f64) -> Result<f64> {
    check_args(n, x)?;
    if n.abs() == N_MAX {
        return Err(domain!("Bessel order {n} exceeds the cap {N_MAX}"));
    }
    Ok(0.5 * (bessel_j(n - 1, x)? - bessel_j(n + 1, x)?))
}

/// `J_0(x), …, J_{n_max}(x)` from a single backward recurrence.
pub fn bessel_table(n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_args(n_max as i64, x)?;
    let mut out = vec![0.0; n_max + 1];
    fill_bessel_table(&mut out, x);
    Ok(out)
}

/// Writes `J_k(x)` for `k < out.len()`. Arguments are assumed validated.
pub(crate) fn fill_bessel_table(out: &mut [f64], x: f64) {
    let n_max = out.len() - 1;
    let ax = x.abs();
    if ax == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = 1.0;
        return;
    }
    let m = miller_start(n_max, ax);
    let two_over_x = 2.0 / ax;
    let mut jp1 = 0.0;
    let mut jk = 1e-300;
    let mut norm = 0.0;
    let mut k = m;
    loop {
        if k <= n_max {
            out[k] = jk;
        }
        if k % 2 == 0 {
            norm += if k == 0 { jk } else { 2.0 * jk };
        }
        if k == 0 {
            break;
        }
        let jm1 = (k as f64) * two_over_x * jk - jp1;
        jp1 = jk;
        jk = jm1;
        k -= 1;
        if jk.abs() > RESCALE_ABOVE {
            jk *= RESCALE_BY;
            jp1 *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut().skip(k + 1) {
                *v *= RESCALE_BY;
            }
        }
    }
    let inv = 1.0 / norm;
    let neg = x < 0.0;
    for (i, v) in out.iter_mut().enumerate() {
        *v *= inv;
        if neg && i % 2 == 1 {
            *v = -*v;
        }
    }
}

/// Values `J_n(x)` for `n ∈ [-n_max, n_max]`.
#[derive(Debug, Clone)]
pub struct BesselRow {
    pub x: f64,
    pos: Vec<f64>,
}

impl BesselRow {
    pub fn new(n_max: usize, x: f64) -> Result<Self> {
        Ok(BesselRow {
            x,
            pos: bessel_table(n_max, x)?,
        })
    }

    pub(crate) fn fill(row: &mut BesselRow, x: f64) {
        row.x = x;
        fill_bessel_table(&mut row.pos, x);
    }

    pub fn n_max(&self) -> usize {
        self.pos.len() - 1
    }

    /// `J_n(x)`; zero beyond the stored range.
    #[inline]
    pub fn get(&self, n: i64) -> f64 {
        let a = n.unsigned_abs() as usize;
        if a >= self.pos.len() {
            return 0.0;
        }
        let v = self.pos[a];
        if n < 0 && a % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// `J'_n(x)`.
    #[inline]
    pub fn prime(&self, n: i64) -> f64 {
        0.5 * (self.get(n - 1) - self.get(n + 1))
    }

    /// `n J_n(x) / x`, finite at `x = 0`.
    #[inline]
    pub fn n_over_x(&self, n: i64) -> f64 {
        0.5 * (self.get(n - 1) + self.get(n + 1))
    }
}

/// Number of terms needed so that three consecutive `|J_k(x)|`, `k > n`,
/// fall below `tol`, starting from `ceil|x| + 15`.
pub fn truncation_order(x: f64, tol: f64) -> Result<usize> {
    let mut n = (x.abs().ceil() as usize) + 15;
    loop {
        if n as i64 + 3 > N_MAX {
            return Err(domain!("truncation order for argument {x} exceeds the cap"));
        }
        let t = bessel_table(n + 3, x)?;
        if t[n + 1..=n + 3].iter().all(|v| v.abs() < tol) {
            return Ok(n);
        }
        n += n / 2 + 5;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedBesselCoeffs {
    pub n: i64,
    pub rho: f64,
    pub zeta: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub truncation_order: usize,
    pub tail_estimate: f64,
}

/// `𝒜⁽⁰⁾_n(ϱ, ζ) = Σ_{n'} J_{n'}(ϱ) J_{n-2n'}(ζ)` and its averages
/// `𝒜⁽¹⁾_n = (𝒜⁽⁰⁾_{n+1} + 𝒜⁽⁰⁾_{n-1})/2`,
/// `𝒜⁽²⁾_n = (𝒜⁽⁰⁾_{n+2} + 2𝒜⁽⁰⁾_n + 𝒜⁽⁰⁾_{n-2})/4`.
///
/// The sum over `n'` runs outward from `0` and stops once three consecutive
/// shells contribute less than `tol·|running value|` to every one of the
/// five orders involved (and no sooner than `ceil|ϱ| + 15`).
pub fn generalized_bessel(n: i64, rho: f64, zeta: f64, tol: f64) -> Result<GeneralizedBesselCoeffs> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".to_string()));
    }
    check_args(n, rho)?;
    check_args(n, zeta)?;
    if n.abs() + 2 > N_MAX {
        return Err(domain!("order {n} exceeds the cap"));
    }
    let k_min = rho.abs().ceil() as i64 + 15;
    let mut k_cap = 2 * k_min + 16;
    loop {
        let jr = BesselRow::new(k_cap as usize, rho)?;
        let zmax = (n.abs() + 2 + 2 * k_cap) as usize;
        let jz = BesselRow::new(zmax, zeta)?;
        let mut acc = [0.0f64; 5];
        let mut quiet = 0;
        let mut tail = 0.0;
        let mut k = 0i64;
        let mut last = [0.0f64; 3];
        while k <= k_cap {
            let mut shell_max = 0.0f64;
            for (slot, off) in (-2i64..=2).enumerate() {
                let m = n + off;
                let mut t = jr.get(k) * jz.get(m - 2 * k);
                if k > 0 {
                    t += jr.get(-k) * jz.get(m + 2 * k);
                }
                acc[slot] += t;
                shell_max = shell_max.max(t.abs());
            }
            last = [last[1], last[2], shell_max];
            let scale = acc.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
            if k >= k_min && (shell_max < tol * scale || shell_max == 0.0) {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= 3 {
                tail = last.iter().sum();
                break;
            }
            k += 1;
        }
        if quiet >= 3 {
            return Ok(GeneralizedBesselCoeffs {
                n,
                rho,
                zeta,
                a0: acc[2],
                a1: 0.5 * (acc[3] + acc[1]),
                a2: 0.25 * (acc[4] + 2.0 * acc[2] + acc[0]),
                truncation_order: k as usize,
                tail_estimate: tail,
            });
        }
        if k_cap > N_MAX / 4 {
            return Err(Error::Accuracy {
                what: "generalized Bessel series".to_string(),
                value: acc[2],
                error_estimate: last.iter().sum(),
            });
        }
        k_cap *= 2;
    }
}

/// Table of `𝒜⁽⁰⁾_n(ϱ, ζ)` for a contiguous range of orders.
#[derive(Debug, Clone)]
pub struct GeneralizedBesselRow {
    pub n_lo: i64,
    values: Vec<f64>,
    pub inner_order: usize,
}

impl GeneralizedBesselRow {
    /// Orders `n_lo - 2 ..= n_hi + 2` are stored so that `a1`, `a2` are
    /// available on `n_lo ..= n_hi`. The inner sum keeps `|n'| ≤ K` where
    /// three consecutive `|J_k(ϱ)|`, `k > K`, are below `tol`.
    pub fn new(n_lo: i64, n_hi: i64, rho: f64, zeta: f64, tol: f64) -> Result<Self> {
        let k = truncation_order(rho, tol)?;
        let mut row = GeneralizedBesselRow {
            n_lo: n_lo - 2,
            values: vec![0.0; (n_hi - n_lo + 5) as usize],
            inner_order: k,
        };
        let mut scratch = GbScratch::new(k, n_lo, n_hi);
        row.fill_with(&mut scratch, rho, zeta);
        Ok(row)
    }

    pub(crate) fn fill_with(&mut self, s: &mut GbScratch, rho: f64, zeta: f64) {
        BesselRow::fill(&mut s.jr, rho);
        BesselRow::fill(&mut s.jz, zeta);
        let k = s.jr.n_max() as i64;
        for (i, v) in self.values.iter_mut().enumerate() {
            let m = self.n_lo + i as i64;
            let mut acc = s.jr.get(0) * s.jz.get(m);
            for kk in 1..=k {
                acc += s.jr.get(kk) * s.jz.get(m - 2 * kk) + s.jr.get(-kk) * s.jz.get(m + 2 * kk);
            }
            *v = acc;
        }
    }

    #[inline]
    pub fn a0(&self, n: i64) -> f64 {
        self.values[(n - self.n_lo) as usize]
    }

    #[inline]
    pub fn a1(&self, n: i64) -> f64 {
        0.5 * (self.a0(n + 1) + self.a0(n - 1))
    }

    #[inline]
    pub fn a2(&self, n: i64) -> f64 {
        0.25 * (self.a0(n + 2) + 2.0 * self.a0(n) + self.a0(n - 2))
    }
}

/// Reusable Bessel rows for [`GeneralizedBesselRow`] evaluations at fixed sizes.
#[derive(Debug, Clone)]
pub(crate) struct GbScratch {
    jr: BesselRow,
    jz: BesselRow,
}

impl GbScratch {
    pub(crate) fn new(inner: usize, n_lo: i64, n_hi: i64) -> Self {
        let zmax = (n_lo.abs().max(n_hi.abs()) as usize) + 2 + 2 * inner;
        GbScratch {
            jr: BesselRow { x: 0.0, pos: vec![0.0; inner + 1] },
            jz: BesselRow { x: 0.0, pos: vec![0.0; zmax + 1] },
        }
    }
}

/// Fejér-type window kernel `(1 - cos(sΔφ))/s²` as a function of the
/// detuning `s = η - n`.
#[inline]
pub fn fejer(s: f64, dphi: f64) -> f64 {
    let x = s * dphi;
    if x.abs() < 1e-4 {
        0.5 * dphi * dphi * (1.0 - x * x / 12.0)
    } else {
        let h = (0.5 * x).sin();
        2.0 * h * h / (s * s)
    }
}

/// `sin(sΔφ)/s`, the phase derivative of [`fejer`].
#[inline]
pub fn sinc_kernel(s: f64, dphi: f64) -> f64 {
    let x = s * dphi;
    if x.abs() < 1e-4 {
        dphi * (1.0 - x * x / 6.0)
    } else {
        x.sin() / s
    }
}

/// `T_n(η, Δφ) = (1 - cos((η - n)Δφ))/(η - n)²`.
pub fn window_kernel_t(eta: f64, n: i64, dphi: f64) -> f64 {
    fejer(eta - n as f64, dphi)
}

/// `sin((η - n)Δφ)/(η - n)`.
pub fn window_kernel_sinc(eta: f64, n: i64, dphi: f64) -> f64 {
    sinc_kernel(eta - n as f64, dphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    // Reference values from 40-digit arbitrary-precision evaluation.
    const REFERENCE: &[(i64, f64, f64)] = &[
        (0, 0.5, 0.93846980724081290423),
        (1, 0.5, 0.24226845767487388638),
        (5, 0.1, 2.6030817909644415564e-9),
        (0, 10.0, -0.2459357644513483352),
        (3, 10.0, 0.058379379305186812343),
        (10, 10.0, 0.2074861066333588577),
        (30, 10.0, 1.5510960782574670069e-12),
        (2, 50.0, -0.059712800794258820511),
        (49, 50.0, 0.15119514252147223808),
        (80, 50.0, 2.8051557721833452316e-11),
        (0, 1000.0, 0.024786686152420174561),
        (7, 1000.0, -0.0053217830764436153538),
        (999, 1000.0, 0.048830228770221781319),
        (1100, 1000.0, 2.4261441835893136202e-15),
        (25, 0.001, 1.9213408894522698097e-108),
        (150, 30.5, 1.1515156540515954904e-86),
    ];

    #[test]
    fn generalized_vanishes_at_origin() {
        for n in [-7, 3, 40] {
            let g = generalized_bessel(n, 0.0, 0.0, 1e-16).unwrap();
            assert_eq!((g.a0, g.a1, g.a2), (0.0, 0.0, 0.0));
        }
        assert_eq!(generalized_bessel(0, 0.0, 0.0, 1e-16).unwrap().a0, 1.0);
    }

    #[test]
    fn matches_reference_values() {
        for &(n, x, want) in REFERENCE {
            let got = bessel_j(n, x).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-12, "J_{n}({x}) = {got}, want {want}, rel {rel}");
            let row = bessel_table(n as usize, x).unwrap();
            assert!(((row[n as usize] - want) / want).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_values_and_parity() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_prime(1, 0.0).unwrap(), 0.5);
        assert_eq!(bessel_j_prime(0, 0.0).unwrap(), 0.0);
        for n in -6i64..=6 {
            let a = bessel_j(n, 3.7).unwrap();
            let b = bessel_j(-n, 3.7).unwrap();
            let c = bessel_j(n, -3.7).unwrap();
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - s * b).abs() < 1e-15 && (a - s * c).abs() < 1e-15);
        }
        assert!(bessel_j(N_MAX + 1, 1.0).is_err());
        assert!(bessel_j(1, f64::NAN).is_err());
    }

    #[test]
    fn sum_of_squares_at_ten() {
        let row = BesselRow::new(60, 10.0).unwrap();
        let s: f64 = (-60i64..=60).map(|n| row.get(n).powi(2)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-5;
        for &(n, x) in &[(0i64, 1.3), (2, 5.5), (-3, 8.25), (7, 2.0), (12, 14.0)] {
            let fd = (bessel_j(n, x + h).unwrap() - bessel_j(n, x - h).unwrap()) / (2.0 * h);
            assert!((fd - bessel_j_prime(n, x).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn generalized_reference_values() {
        let cases = [
            (1, -0.3, 2.0, 0.66712803283627321357),
            (4, -2.5, 7.0, 0.57788211589865721121),
            (-3, -1.1, 3.3, -0.29313368628564375615),
            (10, -6.0, 25.0, -0.059249712586426587629),
            (0, -12.0, 0.7, 0.041920233380560663452),
        ];
        for (n, r, z, want) in cases {
            let g = generalized_bessel(n, r, z, 1e-16).unwrap();
            assert!((g.a0 - want).abs() < 1e-13, "A0_{n}({r},{z}) = {}", g.a0);
            let row = GeneralizedBesselRow::new(n, n, r, z, 1e-17).unwrap();
            assert!((row.a0(n) - want).abs() < 1e-13);
            assert!((row.a1(n) - g.a1).abs() < 1e-13 && (row.a2(n) - g.a2).abs() < 1e-13);
        }
    }

    #[test]
    fn generalized_special_cases() {
        for n in -5i64..=5 {
            let g = generalized_bessel(n, 0.0, 2.3, 1e-15).unwrap();
            assert!((g.a0 - bessel_j(n, 2.3).unwrap()).abs() < 1e-15);
            if n % 2 != 0 {
                assert_eq!(generalized_bessel(n, -1.7, 0.0, 1e-15).unwrap().a0, 0.0);
            }
            let p = generalized_bessel(n, -1.2, 3.1, 1e-15).unwrap().a0;
            let m = generalized_bessel(n, -1.2, -3.1, 1e-15).unwrap().a0;
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((m - s * p).abs() < 1e-14);
        }
        assert!(generalized_bessel(0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn kernels() {
        let d = 2.0 * PI;
        assert_eq!(window_kernel_t(3.0, 3, d), 0.5 * d * d);
        assert!(window_kernel_t(4.0, 3, d) < 1e-28);
        assert!((window_kernel_t(3.5, 3, d) - 8.0).abs() < 1e-13);
        assert_eq!(window_kernel_sinc(2.0, 2, 7.0), 7.0);
        assert!(window_kernel_sinc(2.0 + PI / 7.0, 2, 7.0).abs() < 1e-14);
        // Continuity across the series switch.
        let s = 0.99999e-4 / 3.0;
        let a = fejer(s, 3.0);
        let b = fejer(s * 1.00002, 3.0);
        assert!((a - b).abs() / a < 1e-8);
    }
}
