//! Adaptive Gauss-Kronrod integration, Gauss-Legendre rules, resonance
//! window partitioning and deterministic compensated summation.

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::float::Float;
use crate::parallel::map_ordered;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

/// Numerical controls shared by all spectrum evaluators.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Width of each resonance window in units of the line width `Δω`.
    pub window_multiplier: f64,
    /// Fixes the largest retained harmonic instead of the automatic estimate.
    pub n_max_override: Option<usize>,
    /// Upper end of the photon-frequency integration. Finite-window spectra
    /// grow linearly with this cutoff, so it is part of the definition of
    /// every finite-`Δφ` energy. `None` selects it from the harmonic content.
    pub omega_max: Option<f64>,
    /// Fraction of `omega_max` over which the smooth cutoff acts.
    pub taper_fraction: f64,
    /// Initial number of polar-angle panels.
    pub theta_seed: usize,
    /// Initial number of azimuthal nodes (linear polarization and oracle).
    pub phi_seed: usize,
    /// Chebyshev nodes per frequency panel in the harmonic engine.
    pub chebyshev_nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_subdivisions: 4000,
            window_multiplier: 10.0,
            n_max_override: None,
            omega_max: None,
            taper_fraction: 0.25,
            theta_seed: 8,
            phi_seed: 16,
            chebyshev_nodes: 16,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Configuration(m.to_string()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_subdivisions == 0 {
            return bad("max_subdivisions must be positive");
        }
        if !(self.window_multiplier >= 2.0) {
            return bad("window_multiplier must be at least 2");
        }
        if let Some(w) = self.omega_max {
            if !(w.is_finite() && w > 0.0) {
                return bad("omega_max must be positive");
            }
        }
        if !(self.taper_fraction > 0.0 && self.taper_fraction < 1.0) {
            return bad("taper_fraction must lie in (0, 1)");
        }
        if self.theta_seed == 0 || self.phi_seed < 4 {
            return bad("seed grid sizes too small");
        }
        if !(4..=64).contains(&self.chebyshev_nodes) {
            return bad("chebyshev_nodes must lie in [4, 64]");
        }
        Ok(())
    }

    pub fn tolerance_for(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Kronrod rule with embedded Gauss rule on `[-1, 1]`.
#[derive(Debug)]
pub struct KronrodRule {
    pub nodes: &'static [f64],
    pub kronrod: &'static [f64],
    /// Gauss weights on the same nodes (zero on Kronrod-only nodes).
    pub gauss: &'static [f64],
}

macro_rules! expand_rule {
    ($name:ident, $n:expr, $xgk:expr, $wgk:expr, $wg:expr) => {
        const fn $name() -> ([f64; $n], [f64; $n], [f64; $n]) {
            let xgk: &[f64] = &$xgk;
            let wgk: &[f64] = &$wgk;
            let wg: &[f64] = &$wg;
            let h = xgk.len() - 1;
            let mut x = [0.0; $n];
            let mut k = [0.0; $n];
            let mut g = [0.0; $n];
            let mut i = 0;
            while i < h {
                x[i] = -xgk[i];
                x[$n - 1 - i] = xgk[i];
                k[i] = wgk[i];
                k[$n - 1 - i] = wgk[i];
                if i % 2 == 1 {
                    g[i] = wg[i / 2];
                    g[$n - 1 - i] = wg[i / 2];
                }
                i += 1;
            }
            x[h] = 0.0;
            k[h] = wgk[h];
            if h % 2 == 1 {
                g[h] = wg[h / 2];
            }
            (x, k, g)
        }
    };
}

#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG7: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

expand_rule!(gk15_arrays, 15, XGK15, WGK15, WG7);
expand_rule!(gk21_arrays, 21, XGK21, WGK21, WG10);

const GK15_ARR: ([f64; 15], [f64; 15], [f64; 15]) = gk15_arrays();
const GK21_ARR: ([f64; 21], [f64; 21], [f64; 21]) = gk21_arrays();

pub static GK15: KronrodRule = KronrodRule {
    nodes: &GK15_ARR.0,
    kronrod: &GK15_ARR.1,
    gauss: &GK15_ARR.2,
};

pub static GK21: KronrodRule = KronrodRule {
    nodes: &GK21_ARR.0,
    kronrod: &GK21_ARR.1,
    gauss: &GK21_ARR.2,
};

impl KronrodRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Kronrod value and `|Kronrod - Gauss|` for one panel.
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut k = 0.0;
        let mut g = 0.0;
        for i in 0..self.len() {
            let v = f(c + h * self.nodes[i]);
            k += self.kronrod[i] * v;
            g += self.gauss[i] * v;
        }
        (k * h, ((k - g) * h).abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive bisection with the 21-point Kronrod rule.
///
/// The panel with the largest error is split first (ties broken by
/// position), so the subdivision sequence depends only on `f`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &GridConfig,
) -> Result<IntegrationResult> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(alloc::format!(
            "integration bounds must satisfy a < b, got [{a}, {b}]"
        )));
    }
    let mut panels = Vec::with_capacity(64);
    let (v, e) = GK21.apply(&mut f, a, b);
    panels.push(Panel { a, b, value: v, error: e });
    let mut evaluations = GK21.len();
    loop {
        let total: f64 = compensated_sum(panels.iter().map(|p| p.value));
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let tol = cfg.tolerance_for(total);
        if err <= tol || panels.len() >= cfg.max_subdivisions {
            return Ok(IntegrationResult {
                value: total,
                error_estimate: err,
                evaluations,
                converged: err <= tol,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.error > best.1 { (i, p.error) } else { best });
        let p = panels[idx];
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            // Panel cannot be split further in floating point.
            return Ok(IntegrationResult {
                value: total,
                error_estimate: err,
                evaluations,
                converged: false,
            });
        }
        let (v1, e1) = GK21.apply(&mut f, p.a, m);
        let (v2, e2) = GK21.apply(&mut f, m, p.b);
        evaluations += 2 * GK21.len();
        panels[idx] = Panel { a: p.a, b: m, value: v1, error: e1 };
        panels.insert(idx + 1, Panel { a: m, b: p.b, value: v2, error: e2 });
    }
}

/// Result of a vector-valued integration.
#[derive(Debug, Clone, PartialEq)]
pub struct VecIntegration {
    pub values: Vec<f64>,
    /// Error estimate per component.
    pub errors: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

impl VecIntegration {
    pub fn total(&self) -> f64 {
        compensated_sum(self.values.iter().copied())
    }

    pub fn total_error(&self) -> f64 {
        self.errors.iter().sum()
    }
}

/// Vector-valued adaptive Gauss-Kronrod (15 points) over `[a, b]`.
///
/// `f` returns `dim` components. Panels are refined level by level: every
/// panel whose L1 error exceeds its length share of the tolerance is bisected
/// and all new nodes are evaluated as one ordered batch (in parallel with the
/// `parallel` feature). The result is independent of the worker count.
/// Convergence is judged on the sum of the components.
pub fn integrate_vec<F>(
    f: F,
    a: f64,
    b: f64,
    dim: usize,
    seed_panels: usize,
    cfg: &GridConfig,
) -> Result<VecIntegration>
where
    F: Fn(f64) -> Vec<f64> + Sync + Send,
{
    integrate_vec_judged(f, a, b, dim, dim, seed_panels, cfg)
}

/// As [`integrate_vec`], but only the first `judged` components drive
/// refinement and convergence. The rest are integrated on the same nodes;
/// this suits error estimates carried along with the values, which are not
/// smooth and would otherwise never settle.
pub fn integrate_vec_judged<F>(
    f: F,
    a: f64,
    b: f64,
    dim: usize,
    judged: usize,
    seed_panels: usize,
    cfg: &GridConfig,
) -> Result<VecIntegration>
where
    F: Fn(f64) -> Vec<f64> + Sync + Send,
{
    if judged == 0 || judged > dim {
        return Err(Error::Domain(alloc::format!("judged components must be in 1..={dim}, got {judged}")));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(alloc::format!(
            "integration bounds must satisfy a < b, got [{a}, {b}]"
        )));
    }
    struct VPanel {
        a: f64,
        b: f64,
        value: Vec<f64>,
        err: Vec<f64>,
        err_l1: f64,
    }
    let rule = &GK15;
    let nr = rule.len();
    let eval = |bounds: &[(f64, f64)]| -> Vec<VPanel> {
        let mut xs = Vec::with_capacity(bounds.len() * nr);
        for &(pa, pb) in bounds {
            let c = 0.5 * (pa + pb);
            let h = 0.5 * (pb - pa);
            xs.extend(rule.nodes.iter().map(|t| c + h * t));
        }
        let ys = map_ordered(&xs, |&x| f(x));
        bounds
            .iter()
            .enumerate()
            .map(|(j, &(pa, pb))| {
                let h = 0.5 * (pb - pa);
                let mut k = vec![0.0; dim];
                let mut g = vec![0.0; dim];
                for i in 0..nr {
                    let y = &ys[j * nr + i];
                    for d in 0..dim {
                        k[d] += rule.kronrod[i] * y[d];
                        g[d] += rule.gauss[i] * y[d];
                    }
                }
                let err: Vec<f64> = (0..dim).map(|d| ((k[d] - g[d]) * h).abs()).collect();
                let value: Vec<f64> = k.iter().map(|v| v * h).collect();
                let err_l1 = err[..judged].iter().sum();
                VPanel { a: pa, b: pb, value, err, err_l1 }
            })
            .collect()
    };
    let n0 = seed_panels.max(1);
    let seeds: Vec<(f64, f64)> = (0..n0)
        .map(|i| {
            let t0 = a + (b - a) * (i as f64) / (n0 as f64);
            let t1 = if i + 1 == n0 { b } else { a + (b - a) * ((i + 1) as f64) / (n0 as f64) };
            (t0, t1)
        })
        .collect();
    let mut panels = eval(&seeds);
    let mut evaluations = panels.len() * nr;
    let len = b - a;
    loop {
        let mut values = vec![0.0; dim];
        let mut errors = vec![0.0; dim];
        for d in 0..dim {
            values[d] = compensated_sum(panels.iter().map(|p| p.value[d]));
            errors[d] = panels.iter().map(|p| p.err[d]).sum();
        }
        let total = compensated_sum(values[..judged].iter().copied());
        let abs_total = values[..judged].iter().map(|v| v.abs()).sum::<f64>().max(total.abs());
        let err_total: f64 = errors[..judged].iter().sum();
        let tol = cfg.tolerance_for(abs_total);
        let done = err_total <= tol;
        if done || panels.len() >= cfg.max_subdivisions {
            return Ok(VecIntegration {
                values,
                errors,
                evaluations,
                converged: done,
            });
        }
        // Local criterion: refine panels above their share of the budget.
        let mut split = Vec::new();
        let mut keep = Vec::with_capacity(panels.len());
        let share = 0.5 * tol / len;
        let mut any = false;
        for p in panels.into_iter() {
            let m = 0.5 * (p.a + p.b);
            if p.err_l1 > share * (p.b - p.a) && m > p.a && m < p.b {
                split.push((p.a, m));
                split.push((m, p.b));
                keep.push(None);
                any = true;
            } else {
                keep.push(Some(p));
            }
        }
        if !any {
            // Nothing left to refine yet the total is above tolerance: the
            // remaining error is spread evenly; split everything once.
            let mut all = Vec::new();
            for p in keep.iter().flatten() {
                let m = 0.5 * (p.a + p.b);
                all.push((p.a, m));
                all.push((m, p.b));
            }
            let fresh = eval(&all);
            evaluations += fresh.len() * nr;
            panels = fresh;
            continue;
        }
        let fresh = eval(&split);
        evaluations += fresh.len() * nr;
        let mut fresh = fresh.into_iter();
        let mut merged = Vec::with_capacity(keep.len() + split.len() / 2);
        for k in keep {
            match k {
                Some(p) => merged.push(p),
                None => {
                    merged.push(fresh.next().unwrap());
                    merged.push(fresh.next().unwrap());
                }
            }
        }
        panels = merged;
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = (n as f64) * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalKind {
    Window,
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
    pub kind: IntervalKind,
}

/// Cover of `[0, omega_max]` by resonance windows of width
/// `multiplier·Δω` around each `ω_res`, merged where they overlap, with
/// background intervals in between.
pub fn resonance_partition(
    omega_max: f64,
    resonances: &[(f64, f64)],
    multiplier: f64,
) -> Vec<Interval> {
    let mut wins: Vec<(f64, f64)> = resonances
        .iter()
        .map(|&(w, dw)| {
            let h = 0.5 * multiplier * dw.abs();
            ((w - h).max(0.0), (w + h).min(omega_max))
        })
        .filter(|&(a, b)| b > a)
        .collect();
    wins.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(wins.len());
    for (a, b) in wins {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let mut out = Vec::with_capacity(2 * merged.len() + 1);
    let mut cursor = 0.0;
    for (a, b) in merged {
        if a > cursor {
            out.push(Interval { a: cursor, b: a, kind: IntervalKind::Background });
        }
        out.push(Interval { a: a.max(cursor), b, kind: IntervalKind::Window });
        cursor = b;
    }
    if cursor < omega_max {
        out.push(Interval { a: cursor, b: omega_max, kind: IntervalKind::Background });
    }
    out
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Pairwise summation with error-free transformations at every node.
/// The pairing depends only on the number of values, never on timing.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return 0.0;
    }
    let (s, c) = pairwise(&v);
    s + c
}

fn pairwise(v: &[f64]) -> (f64, f64) {
    if v.len() <= 8 {
        // Neumaier on short leaves.
        let mut s = 0.0;
        let mut c = 0.0;
        for &x in v {
            let (t, e) = two_sum(s, x);
            s = t;
            c += e;
        }
        return (s, c);
    }
    let mid = v.len() / 2;
    let (s1, c1) = pairwise(&v[..mid]);
    let (s2, c2) = pairwise(&v[mid..]);
    let (s, e) = two_sum(s1, s2);
    (s, c1 + c2 + e)
}

/// Smooth step from 1 to 0 on `[omega_t, omega_max]` with all derivatives
/// vanishing at both ends.
#[inline]
pub fn taper(omega: f64, omega_t: f64, omega_max: f64) -> f64 {
    if omega <= omega_t {
        return 1.0;
    }
    if omega >= omega_max {
        return 0.0;
    }
    let s = (omega - omega_t) / (omega_max - omega_t);
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    b / (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::fejer;
    use core::f64::consts::PI;

    #[test]
    fn sine_integral() {
        let r = integrate_adaptive(|x| x.sin(), 0.0, PI, &GridConfig { rel_tol: 1e-13, ..Default::default() }).unwrap();
        assert!(r.converged && (r.value - 2.0).abs() < 1e-12);
        let c = integrate_adaptive(|_| 3.5, -1.0, 2.0, &GridConfig::default()).unwrap();
        assert!((c.value - 10.5).abs() < 1e-14);
        assert!(integrate_adaptive(|x| x, 1.0, 1.0, &GridConfig::default()).is_err());
    }

    #[test]
    fn rule_weights_sum_to_two() {
        for r in [&GK15, &GK21] {
            let k: f64 = r.kronrod.iter().sum();
            let g: f64 = r.gauss.iter().sum();
            assert!((k - 2.0).abs() < 1e-14 && (g - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn nonconvergence_is_reported() {
        let cfg = GridConfig { max_subdivisions: 3, rel_tol: 1e-14, ..Default::default() };
        let r = integrate_adaptive(|x| (1.0 / (x + 1e-9)).sin(), 0.0, 1.0, &cfg).unwrap();
        assert!(!r.converged && r.value.is_finite());
    }

    #[test]
    fn fejer_window_integral() {
        // ∫(1 - cos sΔφ)/s² ds over ℝ is πΔφ; the tails beyond ±L contribute
        // 2/L up to O(1/(L²Δφ)).
        let dphi = 200.0;
        let l = 50.0;
        let cfg = GridConfig { rel_tol: 1e-12, max_subdivisions: 20000, ..Default::default() };
        let r = integrate_adaptive(|s| fejer(s, dphi), -l, l, &cfg).unwrap();
        let tail = 2.0 / l;
        assert!(((r.value + tail) - PI * dphi).abs() / (PI * dphi) < 1e-5);
    }

    #[test]
    fn vector_integration_matches_scalar() {
        let cfg = GridConfig { rel_tol: 1e-12, ..Default::default() };
        let r = integrate_vec(|x| vec![x.exp(), (3.0 * x).cos()], 0.0, 2.0, 2, 1, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.values[0] - (2f64.exp() - 1.0)).abs() < 1e-12);
        assert!((r.values[1] - (6f64).sin() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 2, 5, 16, 33, 100] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}");
            let e = (2 * n - 2).min(20) as i32;
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(e)).sum();
            assert!((m - 2.0 / (e as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn partition_cases() {
        let p = resonance_partition(10.0, &[], 10.0);
        assert_eq!(p, vec![Interval { a: 0.0, b: 10.0, kind: IntervalKind::Background }]);
        let p = resonance_partition(10.0, &[(2.0, 0.1), (7.0, 0.1)], 10.0);
        assert_eq!(p.len(), 5);
        let p = resonance_partition(10.0, &[(2.0, 0.2), (2.5, 0.2)], 10.0);
        assert_eq!(p.len(), 3);
        assert_eq!(p[1].kind, IntervalKind::Window);
        assert!((p[1].a - 1.0).abs() < 1e-15 && (p[1].b - 3.5).abs() < 1e-15);
    }

    #[test]
    fn compensated_cancellation() {
        assert_eq!(compensated_sum([1e16, 1.0, -1e16]), 1.0);
        assert_eq!(compensated_sum(core::iter::empty()), 0.0);
    }

    #[test]
    fn taper_shape() {
        assert_eq!(taper(0.5, 1.0, 2.0), 1.0);
        assert_eq!(taper(2.5, 1.0, 2.0), 0.0);
        assert!((taper(1.5, 1.0, 2.0) - 0.5).abs() < 1e-15);
        assert_eq!(taper(1.0 + 1e-3, 1.0, 2.0), 1.0);
    }
}
