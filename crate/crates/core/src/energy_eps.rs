//! The rescaled energy E_ε = P_ε + N_ε of axisymmetric configurations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::QuadConfig;
use crate::domain::{AxisymShape, EnergyBreakdown, GammaConvention, ModelParams, QuadratureMeta};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::specfun::{bessel_j, kernel_integral, sphere_area, sqrt_weighted_bessel_bound, BesselOrder};
use crate::spectral::{self, Plan};

/// Relative size of the certified tail bound at which r_max stops doubling.
const TAIL_TARGET: f64 = 1e-3;
/// Initial and largest radial cutoff, in units of 1/max ρ.
const R_MAX_START: f64 = 64.0;
const R_MAX_CAP: f64 = 1024.0;
/// Default DFT oversampling along x₁.
const X1_PAD: usize = 8;

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 1.0) || !mu.is_finite() {
        return Err(Error::Domain(format!("volume mu must be finite and > 1, got {mu}")));
    }
    Ok(())
}

/// μ below which ε(μ) ≥ 1 for n = 3, i.e. the root of ln μ + 3 ln ln μ = 0.
pub fn mu_threshold_3d() -> f64 {
    let (mut lo, mut hi) = (0.1f64, 2.0f64);
    for _ in 0..200 {
        let y = 0.5 * (lo + hi);
        if y + 3.0 * y.ln() > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Length scales R_μ, L_μ, aspect ratio ε and nonlocal prefactor γ.
pub fn scales_from_mu(n: usize, mu: f64, convention: GammaConvention) -> Result<ModelParams> {
    check_mu(mu)?;
    let (r, l) = match n {
        2 => (mu.powf(1.0 / 3.0), mu.powf(2.0 / 3.0)),
        3 => {
            let y = mu.ln();
            (mu.powf(2.0 / 7.0) * y.powf(-1.0 / 7.0), mu.powf(3.0 / 7.0) * y.powf(2.0 / 7.0))
        }
        4 => {
            let d = 2.0 * n as f64 + 1.0;
            (mu.powf(2.0 / d), mu.powf(3.0 / d))
        }
        _ => return Err(Error::Domain(format!("scales defined for n in 2..=4, got {n}"))),
    };
    let eps = r / l;
    if !(eps < 1.0) {
        return Err(Error::Domain(format!(
            "mu = {mu} gives eps = {eps} >= 1; need mu > {:.6}",
            if n == 3 { mu_threshold_3d() } else { 1.0 }
        )));
    }
    let gamma = match n {
        2 => eps,
        3 => {
            let denom = match convention {
                GammaConvention::ExactMu => 7.0 * eps.ln().abs() - 3.0 * mu.ln().ln(),
                GammaConvention::Asymptotic => 7.0 * eps.ln().abs(),
            };
            if !(denom > 0.0) {
                return Err(Error::Domain(format!(
                    "gamma denominator {denom} is not positive at mu = {mu}; need mu > {:.6}",
                    mu_threshold_3d()
                )));
            }
            1.0 / denom
        }
        _ => 1.0,
    };
    Ok(ModelParams { n, mu: Some(mu), r_mu: Some(r), l_mu: Some(l), eps, gamma, gamma_convention: convention })
}

/// Inverts ε(μ) and returns the parameters belonging to that volume.
pub fn params_from_eps(n: usize, eps: f64, convention: GammaConvention) -> Result<ModelParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    let mu = match n {
        2 => eps.powi(-3),
        4 => eps.powi(-9),
        3 => {
            // ln ε = −(y + 3 ln y)/7 with y = ln μ; the right side is monotone in y
            let target = -7.0 * eps.ln();
            let f = |y: f64| y + 3.0 * y.ln() - target;
            let (mut lo, mut hi) = (1e-3f64, 1.0f64);
            while f(hi) < 0.0 {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (0.5 * (lo + hi)).exp()
        }
        _ => return Err(Error::Domain(format!("scales defined for n in 2..=4, got {n}"))),
    };
    let mut p = scales_from_mu(n, mu, convention)?;
    // undo the roundtrip error of the inversion
    p.eps = eps;
    p.gamma = match (n, convention) {
        (2, _) => eps,
        (3, GammaConvention::Asymptotic) => 1.0 / (7.0 * eps.ln().abs()),
        _ => p.gamma,
    };
    Ok(p)
}

/// (ε, γ) given directly, without an underlying volume.
pub fn params_raw(n: usize, eps: f64, gamma: f64) -> Result<ModelParams> {
    if !(eps > 0.0 && eps <= 1.0) || !(gamma > 0.0) {
        return Err(Error::Domain(format!("need 0 < eps <= 1 and gamma > 0, got {eps}, {gamma}")));
    }
    Ok(ModelParams { n, mu: None, r_mu: None, l_mu: None, eps, gamma, gamma_convention: GammaConvention::ExactMu })
}

fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::Domain(format!("energy evaluation supports n = 2, 3 only, got {n}")))
    }
}

/// Anisotropic perimeter P_ε of the body of revolution.
///
/// Lateral part 2∫_{ρ>0}√(1+ε²ρ'²) (n = 2) or 2π∫ρ√(1+ε²ρ'²) (n = 3); jumps
/// |Δρ| > 10·dx·median|ρ'| are charged as flat walls of area 2ε|Δρ| or επ|Δ(ρ²)|.
pub fn perimeter_eps(s: &AxisymShape, n: usize, eps: f64) -> Result<f64> {
    check_dim(n)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    let rho = s.rho();
    let len = rho.len();
    let dx = s.dx();
    let at = |i: isize| if i < 0 || i as usize >= len { 0.0 } else { rho[i as usize] };
    // step across interface j | j+1, j = −1..len−1
    let step = |j: isize| at(j + 1) - at(j);
    let mut slopes: Vec<f64> = (0..len as isize - 1)
        .filter(|&j| at(j) > 0.0 && at(j + 1) > 0.0)
        .map(|j| (step(j) / dx).abs())
        .collect();
    let median = if slopes.is_empty() {
        0.0
    } else {
        let mid = slopes.len() / 2;
        *slopes.select_nth_unstable_by(mid, f64::total_cmp).1
    };
    let threshold = 10.0 * dx * median;
    let is_jump = |j: isize| step(j).abs() > threshold;

    let mut lateral = 0.0;
    let mut walls = 0.0;
    for j in -1..len as isize {
        if is_jump(j) {
            let (a, b) = (at(j), at(j + 1));
            walls += if n == 2 { 2.0 * eps * (b - a).abs() } else { eps * PI * (b * b - a * a).abs() };
        }
    }
    for i in 0..len as isize {
        let r = at(i);
        if r <= 0.0 {
            continue;
        }
        let (jl, jr) = (is_jump(i - 1), is_jump(i));
        let d = match (jl, jr) {
            (false, false) => (at(i + 1) - at(i - 1)) / (2.0 * dx),
            (true, false) => step(i) / dx,
            (false, true) => step(i - 1) / dx,
            (true, true) => 0.0,
        };
        let arc = (1.0 + eps * eps * d * d).sqrt();
        lateral += if n == 2 { 2.0 * arc } else { 2.0 * PI * r * arc };
    }
    Ok(lateral * dx + walls)
}

/// Transverse profile ρ^ν J_ν(rρ) r^{−ν} whose x₁-transform is û(·, r); r = 0 gives the limit
/// A/(2π)^{(n−1)/2}.
fn radial_factor(n: usize, rho: f64, r: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    if n == 2 {
        if r == 0.0 {
            (2.0 / PI).sqrt() * rho
        } else {
            (2.0 / PI).sqrt() * (r * rho).sin() / r
        }
    } else if r == 0.0 {
        0.5 * rho * rho
    } else {
        rho * bessel_j(BesselOrder::One, r * rho) / r
    }
}

/// Fourier transform of u = χ_{(0,ρ(x₁))}(|x'|) at (ξ₁, |ξ'| = r), unitary convention,
/// trapezoid rule in x₁.
pub fn fourier_axisym(s: &AxisymShape, n: usize, xi1: f64, r: f64) -> Result<Complex64> {
    check_dim(n)?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radial frequency must be >= 0, got {r}")));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &rho) in s.rho().iter().enumerate() {
        let f = radial_factor(n, rho, r);
        if f != 0.0 {
            acc += Complex64::from_polar(f, -xi1 * s.x(i));
        }
    }
    Ok(acc * s.dx() / (2.0 * PI).sqrt())
}

struct Radial<'a> {
    n: usize,
    eps: f64,
    dx: f64,
    rho: Vec<f64>,
    plan: Plan,
    /// retained DFT bins and their frequencies
    bins: Vec<(usize, f64)>,
    /// |û(ξ_k, 0)|² dx/M on the retained bins
    p0: Vec<f64>,
    _shape: &'a AxisymShape,
}

impl<'a> Radial<'a> {
    fn new(s: &'a AxisymShape, n: usize, eps: f64, cfg: &QuadConfig) -> Result<Self> {
        let rho = s.rho().to_vec();
        let m = match cfg.n_xi1 {
            Some(m) if m >= rho.len() => m,
            Some(m) => return Err(Error::Domain(format!("quad.n_xi1 = {m} is shorter than the grid"))),
            None => spectral::padded_len(rho.len(), X1_PAD),
        };
        let dx = s.dx();
        let xi_cut = cfg.xi1_max.unwrap_or(f64::INFINITY);
        let bins: Vec<(usize, f64)> = (0..m)
            .map(|k| (k, spectral::bin_frequency(k, m, dx)))
            .filter(|(_, xi)| xi.abs() <= xi_cut)
            .collect();
        let mut this = Self { n, eps, dx, rho, plan: Plan::new(m), bins, p0: Vec::new(), _shape: s };
        this.p0 = this.power(0.0);
        Ok(this)
    }

    fn power(&self, r: f64) -> Vec<f64> {
        let f: Vec<f64> = self.rho.iter().map(|&p| radial_factor(self.n, p, r)).collect();
        let spec = self.plan.forward_real(&f);
        let scale = self.dx / self.plan.len() as f64;
        self.bins.iter().map(|&(k, _)| spec[k].norm_sqr() * scale).collect()
    }

    /// Powers at two radii from a single complex transform of f(r₁) + i·f(r₂).
    fn power_pair(&self, r1: f64, r2: f64) -> (Vec<f64>, Vec<f64>) {
        let m = self.plan.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (b, &p) in buf.iter_mut().zip(&self.rho) {
            *b = Complex64::new(radial_factor(self.n, p, r1), radial_factor(self.n, p, r2));
        }
        self.plan.forward(&mut buf);
        let scale = self.dx / m as f64;
        let mut a = Vec::with_capacity(self.bins.len());
        let mut b = Vec::with_capacity(self.bins.len());
        for &(k, _) in &self.bins {
            let z = buf[k];
            let w = buf[(m - k) % m].conj();
            // F₁ = (Z_k + conj Z_{−k})/2, F₂ = (Z_k − conj Z_{−k})/(2i)
            a.push((z + w).norm_sqr() * 0.25 * scale);
            b.push((z - w).norm_sqr() * 0.25 * scale);
        }
        (a, b)
    }

    fn measure(&self, r: f64) -> f64 {
        if self.n == 2 {
            2.0
        } else {
            2.0 * PI * r
        }
    }

    /// Σ_k m(ξ_k, r) (|û(ξ_k, r)|² − |û(ξ_k, 0)|²) Δξ times the radial measure.
    fn node_with(&self, r: f64, p: &[f64]) -> f64 {
        let e2 = self.eps * self.eps;
        let s: f64 = self
            .bins
            .iter()
            .zip(p.iter().zip(&self.p0))
            .map(|(&(_, xi), (pr, p0))| {
                let x2 = xi * xi;
                x2 / (e2 * x2 + r * r) * (pr - p0)
            })
            .sum();
        s * self.measure(r)
    }

    /// ∫₀^{r_max} m·dξ' applied to |û(ξ, 0)|², in closed form.
    fn zero_mode(&self, r_max: f64) -> f64 {
        self.bins
            .iter()
            .zip(&self.p0)
            .map(|(&(_, xi), p0)| p0 * kernel_integral(self.n, 0, self.eps, xi, r_max).map(|k| k.value).unwrap_or(0.0))
            .sum()
    }
}

/// Radial integration panels: geometric up to `r_g`, then of width `h`.
fn panels(r_min: f64, r_g: f64, r_from: f64, r_to: f64, h: f64) -> Vec<(f64, f64)> {
    let mut edges = Vec::new();
    if r_from == 0.0 {
        edges.push(0.0);
        let mut r = r_min;
        while r < r_g {
            edges.push(r);
            r *= 2.0;
        }
        edges.push(r_g);
    } else {
        edges.push(r_from);
    }
    let mut r = *edges.last().unwrap();
    while r < r_to * (1.0 - 1e-12) {
        r = (r + h).min(r_to);
        edges.push(r);
    }
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// N_ε with the quadrature metadata.
///
/// The r-integral is split as m|û(·,0)|², integrated in closed form up to r_max, plus
/// m(|û(·,r)|² − |û(·,0)|²) on Gauss–Legendre panels. The remainder beyond r_max is bounded
/// by γε^{−2}C_ν²|S^{n−2}|∫ρ^{n−2}dx₁ / r_max with C_ν = sup √z|J_ν(z)|; the bound is recorded,
/// not added.
pub fn nonlocal_eps_with(s: &AxisymShape, params: &ModelParams, cfg: &QuadConfig) -> Result<(f64, QuadratureMeta)> {
    let n = params.n;
    check_dim(n)?;
    let eps = params.eps;
    let max_rho = s.max_rho();
    if max_rho == 0.0 {
        return Ok((0.0, QuadratureMeta { n_x1: s.len(), ..QuadratureMeta::default() }));
    }
    let rad = Radial::new(s, n, eps, cfg)?;
    let order = BesselOrder::for_dimension(n)?;
    let c = sqrt_weighted_bessel_bound(order);
    let rho_moment: f64 = s.rho().iter().filter(|&&r| r > 0.0).map(|&r| r.powi(n as i32 - 2)).sum::<f64>() * s.dx();
    let bound_at = |r_max: f64| {
        params.gamma / (eps * eps) * c * c * sphere_area(n - 2).unwrap() * rho_moment / r_max
    };

    let (xg, wg) = gauss_legendre(cfg.n_r);
    let r_min = 1e-4 * eps / max_rho;
    let r_g = 0.5 / max_rho;
    let h = PI / (2.0 * max_rho);
    let (mut r_max, fixed) = match cfg.r_max {
        Some(r) => (r, true),
        None => (R_MAX_START / max_rho, false),
    };
    let mut from = 0.0;
    let mut body = 0.0;
    let mut n_nodes = 0usize;
    loop {
        let pans = panels(r_min, r_g.min(r_max), from, r_max, h);
        let nodes: Vec<(f64, f64)> = pans
            .iter()
            .flat_map(|&(a, b)| {
                let (c, hw) = (0.5 * (a + b), 0.5 * (b - a));
                xg.iter().zip(&wg).map(move |(x, w)| (c + hw * x, hw * w)).collect::<Vec<_>>()
            })
            .collect();
        let vals: Vec<f64> = nodes
            .par_chunks(2)
            .map(|c| match c {
                [(r1, w1), (r2, w2)] => {
                    let (p1, p2) = rad.power_pair(*r1, *r2);
                    w1 * rad.node_with(*r1, &p1) + w2 * rad.node_with(*r2, &p2)
                }
                [(r, w)] => w * rad.node_with(*r, &rad.power(*r)),
                _ => unreachable!(),
            })
            .collect();
        body += vals.iter().sum::<f64>();
        n_nodes += nodes.len();
        let value = params.gamma * (rad.zero_mode(r_max) + body);
        let bound = bound_at(r_max);
        if fixed || bound <= TAIL_TARGET * value || r_max >= R_MAX_CAP / max_rho * (1.0 - 1e-12) {
            let meta = QuadratureMeta {
                xi1_max: rad.bins.iter().map(|b| b.1.abs()).fold(0.0, f64::max),
                r_max,
                n_xi1: rad.plan.len(),
                n_r: n_nodes,
                n_x1: s.len(),
                tail_bound: bound,
            };
            return Ok((value.max(0.0), meta));
        }
        from = r_max;
        r_max *= 2.0;
    }
}

/// N_ε with the default quadrature settings.
pub fn nonlocal_eps(s: &AxisymShape, params: &ModelParams) -> Result<f64> {
    nonlocal_eps_with(s, params, &QuadConfig::default()).map(|v| v.0)
}

pub fn energy_eps(s: &AxisymShape, params: &ModelParams) -> Result<EnergyBreakdown> {
    energy_eps_with(s, params, &QuadConfig::default())
}

pub fn energy_eps_with(s: &AxisymShape, params: &ModelParams, cfg: &QuadConfig) -> Result<EnergyBreakdown> {
    let p = perimeter_eps(s, params.n, params.eps)?;
    let (nl, meta) = nonlocal_eps_with(s, params, cfg)?;
    Ok(EnergyBreakdown::new(p, nl, meta))
}
