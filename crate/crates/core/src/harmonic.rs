//! Frequency integration of harmonic sums against the window kernels.
//!
//! Along a fixed emission direction the detuning of harmonic `n` is
//! `η - n = s·ω - n` with a direction-dependent slope `s`. The spectra need
//!
//! ```text
//! I_n = ∫₀^{ω_max} K(sω - n) ω² χ(ω) G_n(ω) dω
//! ```
//!
//! where `K` is the Fejér or sinc kernel, `χ` the smooth frequency cutoff and
//! `G_n` a slowly varying combination of Bessel functions. The frequency range
//! is cut into panels on which `G_n` is replaced by its Chebyshev interpolant,
//! so `I_n = Σ_panels Σ_j M[n][j] G_n(ω_j)` with moments `M` that depend only on
//! `s`, `Δφ`, the kernel and the panel layout. A plan holding the moments can
//! be reused for every direction sharing the same slope.

#[allow(unused_imports)]
use crate::float::Float;
use crate::float::PI;
use crate::quadrature::{resonance_partition, taper, GK15};
use crate::specfun::{fejer, sinc_kernel};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `(1 - cos(xΔφ))/x²`, energy spectra.
    Fejer,
    /// `sin(xΔφ)/x`, rate spectra.
    Sinc,
}

impl Kernel {
    #[inline]
    pub fn eval(self, x: f64, dphi: f64) -> f64 {
        match self {
            Kernel::Fejer => fejer(x, dphi),
            Kernel::Sinc => sinc_kernel(x, dphi),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanSpec {
    pub slope: f64,
    pub dphi: f64,
    pub kernel: Kernel,
    pub omega_t: f64,
    pub omega_max: f64,
    pub n_lo: i64,
    pub n_hi: i64,
    /// Largest panel width on which `G_n` is interpolated.
    pub max_panel_width: f64,
    pub window_multiplier: f64,
    pub chebyshev_nodes: usize,
}

#[derive(Debug, Clone)]
struct PlanPanel {
    nodes: Vec<f64>,
    /// `[n - n_lo][j]`, row-major.
    moments: Vec<f64>,
    /// `∫|K|ω²χ` over the panel per harmonic, for error estimates.
    kernel_l1: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct KernelPlan {
    pub spec: PlanSpec,
    panels: Vec<PlanPanel>,
    /// Coefficient-extraction rows for the two highest Chebyshev modes.
    tail_rows: [Vec<f64>; 2],
}

/// Per-harmonic integrals with interpolation error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSums {
    pub n_lo: i64,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl HarmonicSums {
    pub fn zeros(n_lo: i64, n_hi: i64) -> Self {
        let len = (n_hi - n_lo + 1) as usize;
        HarmonicSums {
            n_lo,
            values: vec![0.0; len],
            errors: vec![0.0; len],
        }
    }

    pub fn n_hi(&self) -> i64 {
        self.n_lo + self.values.len() as i64 - 1
    }
}

fn cheb_nodes(m: usize) -> Vec<f64> {
    // First-kind points, ascending.
    (0..m)
        .map(|j| -((2 * j + 1) as f64 * PI / (2 * m) as f64).cos())
        .collect()
}

fn cheb_bary_weights(m: usize) -> Vec<f64> {
    // Matching the ascending ordering of `cheb_nodes`.
    (0..m)
        .map(|j| {
            let s = ((2 * j + 1) as f64 * PI / (2 * m) as f64).sin();
            if j % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect()
}

/// Lagrange basis values of the first-kind Chebyshev points at `t ∈ [-1, 1]`.
fn lagrange_row(t: f64, nodes: &[f64], bw: &[f64], out: &mut [f64]) {
    for (j, &x) in nodes.iter().enumerate() {
        if t == x {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = 1.0;
            return;
        }
    }
    let mut den = 0.0;
    for j in 0..nodes.len() {
        let q = bw[j] / (t - nodes[j]);
        out[j] = q;
        den += q;
    }
    let inv = 1.0 / den;
    out.iter_mut().for_each(|v| *v *= inv);
}

impl KernelPlan {
    pub fn new(spec: PlanSpec) -> Self {
        let m = spec.chebyshev_nodes;
        let tn = cheb_nodes(m);
        let bw = cheb_bary_weights(m);
        let nh = (spec.n_hi - spec.n_lo + 1) as usize;

        // Panel breakpoints: resonance windows, the taper onset, then a cap on width.
        let line = 4.0 * PI / (spec.slope * spec.dphi);
        let res: Vec<(f64, f64)> = (spec.n_lo.max(1)..=spec.n_hi)
            .map(|n| (n as f64 / spec.slope, line))
            .filter(|&(w, _)| w < spec.omega_max)
            .collect();
        let mut cuts: Vec<f64> = vec![0.0];
        for iv in resonance_partition(spec.omega_max, &res, spec.window_multiplier) {
            cuts.push(iv.b);
        }
        if spec.omega_t > 0.0 && spec.omega_t < spec.omega_max {
            cuts.push(spec.omega_t);
        }
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * spec.omega_max);
        let taper_width = (spec.omega_max - spec.omega_t).max(0.0);

        let dense_step = PI / (spec.slope * spec.dphi);
        let mut lrow = vec![0.0; m];
        let mut panels = Vec::new();
        for w in cuts.windows(2) {
            let (a0, b0) = (w[0], w[1]);
            if b0 <= a0 {
                continue;
            }
            let mut cap = spec.max_panel_width;
            if b0 > spec.omega_t && taper_width > 0.0 {
                cap = cap.min(0.125 * taper_width);
            }
            let np = ((b0 - a0) / cap).ceil().max(1.0) as usize;
            for k in 0..np {
                let a = a0 + (b0 - a0) * k as f64 / np as f64;
                let b = if k + 1 == np { b0 } else { a0 + (b0 - a0) * (k + 1) as f64 / np as f64 };
                let c = 0.5 * (a + b);
                let h = 0.5 * (b - a);
                let nodes: Vec<f64> = tn.iter().map(|t| c + h * t).collect();

                // Dense nodes shared by all harmonics.
                let mut sub = ((b - a) / dense_step).ceil().max(2.0) as usize;
                if b > spec.omega_t && taper_width > 0.0 {
                    sub = sub.max(((b - a) / (taper_width / 32.0)).ceil() as usize);
                }
                let nd = sub * GK15.len();
                let mut dx = Vec::with_capacity(nd);
                let mut dw = Vec::with_capacity(nd);
                let mut basis = Vec::with_capacity(nd * m);
                for s in 0..sub {
                    let sa = a + (b - a) * s as f64 / sub as f64;
                    let sb = if s + 1 == sub { b } else { a + (b - a) * (s + 1) as f64 / sub as f64 };
                    let sc = 0.5 * (sa + sb);
                    let sh = 0.5 * (sb - sa);
                    for i in 0..GK15.len() {
                        let om = sc + sh * GK15.nodes[i];
                        let wt = GK15.kronrod[i] * sh * om * om * taper(om, spec.omega_t, spec.omega_max);
                        dx.push(om);
                        dw.push(wt);
                        lagrange_row((om - c) / h, &tn, &bw, &mut lrow);
                        basis.extend_from_slice(&lrow);
                    }
                }
                let mut moments = vec![0.0; nh * m];
                let mut kernel_l1 = vec![0.0; nh];
                let mut kv = vec![0.0; nd];
                for (ih, n) in (spec.n_lo..=spec.n_hi).enumerate() {
                    let nf = n as f64;
                    let mut l1 = 0.0;
                    for q in 0..nd {
                        let v = dw[q] * spec.kernel.eval(spec.slope * dx[q] - nf, spec.dphi);
                        kv[q] = v;
                        l1 += v.abs();
                    }
                    let row = &mut moments[ih * m..(ih + 1) * m];
                    for q in 0..nd {
                        let v = kv[q];
                        if v == 0.0 {
                            continue;
                        }
                        let br = &basis[q * m..(q + 1) * m];
                        for j in 0..m {
                            row[j] += v * br[j];
                        }
                    }
                    kernel_l1[ih] = l1;
                }
                panels.push(PlanPanel { nodes, moments, kernel_l1 });
            }
        }
        let tail_rows = [tail_row(m, m - 1), tail_row(m, m - 2)];
        KernelPlan { spec, panels, tail_rows }
    }

    pub fn n_range(&self) -> (i64, i64) {
        (self.spec.n_lo, self.spec.n_hi)
    }

    /// All interpolation nodes in panel order.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.panels.iter().flat_map(|p| p.nodes.iter().copied())
    }

    pub fn node_count(&self) -> usize {
        self.panels.len() * self.spec.chebyshev_nodes
    }

    /// Evaluates `Σ_panels Σ_j M[n][j] G_n(ω_j)` where `g(ω, out)` writes
    /// `G_n(ω)` into `out[n - n_lo]`.
    pub fn integrate<G: FnMut(f64, &mut [f64])>(&self, mut g: G) -> HarmonicSums {
        let m = self.spec.chebyshev_nodes;
        let nh = (self.spec.n_hi - self.spec.n_lo + 1) as usize;
        let mut out = HarmonicSums::zeros(self.spec.n_lo, self.spec.n_hi);
        // Node-major buffer of G values for one panel.
        let mut gv = vec![0.0; m * nh];
        for p in &self.panels {
            for (j, &om) in p.nodes.iter().enumerate() {
                g(om, &mut gv[j * nh..(j + 1) * nh]);
            }
            for ih in 0..nh {
                let row = &p.moments[ih * m..(ih + 1) * m];
                let mut acc = 0.0;
                let mut t1 = 0.0;
                let mut t2 = 0.0;
                for j in 0..m {
                    let v = gv[j * nh + ih];
                    acc += row[j] * v;
                    t1 += self.tail_rows[0][j] * v;
                    t2 += self.tail_rows[1][j] * v;
                }
                out.values[ih] += acc;
                out.errors[ih] += (t1.abs() + t2.abs()) * p.kernel_l1[ih];
            }
        }
        out
    }
}

/// Row extracting Chebyshev coefficient `k` from values at the ascending
/// first-kind points.
fn tail_row(m: usize, k: usize) -> Vec<f64> {
    (0..m)
        .map(|j| {
            // Ascending index j corresponds to descending index m-1-j.
            let jj = m - 1 - j;
            2.0 / m as f64 * ((k * (2 * jj + 1)) as f64 * PI / (2 * m) as f64).cos()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_adaptive, GridConfig};

    fn spec(kernel: Kernel, dphi: f64) -> PlanSpec {
        PlanSpec {
            slope: 1.3,
            dphi,
            kernel,
            omega_t: 6.0,
            omega_max: 8.0,
            n_lo: -3,
            n_hi: 12,
            max_panel_width: 1.0,
            window_multiplier: 10.0,
            chebyshev_nodes: 16,
        }
    }

    fn g(om: f64, out: &mut [f64], n_lo: i64) {
        for (i, v) in out.iter_mut().enumerate() {
            let n = (n_lo + i as i64) as f64;
            *v = (0.7 * om + 0.1 * n).cos() / (1.0 + n * n);
        }
    }

    #[test]
    fn plan_matches_adaptive_quadrature() {
        for kernel in [Kernel::Fejer, Kernel::Sinc] {
            let s = spec(kernel, 31.4);
            let plan = KernelPlan::new(s.clone());
            let r = plan.integrate(|om, out| g(om, out, s.n_lo));
            let cfg = GridConfig { rel_tol: 1e-13, abs_tol: 1e-15, max_subdivisions: 100000, ..Default::default() };
            for n in [-3i64, 0, 1, 5, 12] {
                let ih = (n - s.n_lo) as usize;
                let nf = n as f64;
                let f = |om: f64| {
                    let gn = (0.7 * om + 0.1 * nf).cos() / (1.0 + nf * nf);
                    kernel.eval(s.slope * om - nf, s.dphi) * om * om * taper(om, s.omega_t, s.omega_max) * gn
                };
                let mut want = 0.0;
                let mut a = 0.0;
                while a < s.omega_max {
                    let b = (a + 0.05).min(s.omega_max);
                    want += integrate_adaptive(f, a, b, &cfg).unwrap().value;
                    a = b;
                }
                let got = r.values[ih];
                assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "{kernel:?} n={n}: {got} vs {want}");
                assert!(r.errors[ih] < 1e-8 * want.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn tail_row_extracts_coefficients() {
        let m = 16;
        let t = cheb_nodes(m);
        // T_15 sampled at the nodes.
        let vals: Vec<f64> = t.iter().map(|x| (15.0 * x.acos()).cos()).collect();
        let c15: f64 = tail_row(m, 15).iter().zip(&vals).map(|(a, b)| a * b).sum();
        let c14: f64 = tail_row(m, 14).iter().zip(&vals).map(|(a, b)| a * b).sum();
        assert!((c15 - 1.0).abs() < 1e-13 && c14.abs() < 1e-13);
    }
}
