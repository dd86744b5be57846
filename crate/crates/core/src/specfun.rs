//! Bessel functions of the orders needed by the Hankel kernel, the ₂F₁(1, b; b+1; z) line,
//! the anisotropy kernel integral and a spectral Hilbert transform.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::Signal1D;
use crate::error::{Error, Result};
use crate::quad;
use crate::spectral::{self, SpectralOptions};

/// Orders ν ∈ {1/2, 1, 3/2, 2, 5/2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Half,
    One,
    ThreeHalves,
    Two,
    FiveHalves,
    Three,
}

impl BesselOrder {
    pub fn from_nu(nu: f64) -> Result<Self> {
        let twice = 2.0 * nu;
        if twice.fract() != 0.0 {
            return Err(Error::Domain(format!("unsupported Bessel order {nu}")));
        }
        match twice as i64 {
            1 => Ok(Self::Half),
            2 => Ok(Self::One),
            3 => Ok(Self::ThreeHalves),
            4 => Ok(Self::Two),
            5 => Ok(Self::FiveHalves),
            6 => Ok(Self::Three),
            _ => Err(Error::Domain(format!("unsupported Bessel order {nu}"))),
        }
    }

    pub fn nu(self) -> f64 {
        match self {
            Self::Half => 0.5,
            Self::One => 1.0,
            Self::ThreeHalves => 1.5,
            Self::Two => 2.0,
            Self::FiveHalves => 2.5,
            Self::Three => 3.0,
        }
    }

    /// Order of the kernel J_{(n−1)/2} in dimension n.
    pub fn for_dimension(n: usize) -> Result<Self> {
        Self::from_nu((n as f64 - 1.0) / 2.0)
    }
}

/// Γ(ν + 1) for the supported orders.
fn gamma_nu_plus_one(nu: f64) -> f64 {
    let sqrt_pi = PI.sqrt();
    match (2.0 * nu) as i64 {
        1 => 0.5 * sqrt_pi,
        2 => 1.0,
        3 => 0.75 * sqrt_pi,
        4 => 2.0,
        5 => 1.875 * sqrt_pi,
        6 => 6.0,
        _ => unreachable!(),
    }
}

fn series(nu: f64, t: f64) -> f64 {
    let h = 0.5 * t;
    let q = -h * h;
    let mut term = h.powf(nu) / gamma_nu_plus_one(nu);
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k as f64 + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller backward recurrence normalized by J₀ + 2ΣJ_{2k} = 1.
fn miller(order: usize, t: f64) -> f64 {
    let start = 2 * ((1.5 * t) as usize / 2 + 20);
    let (mut jp1, mut j) = (0.0f64, 1e-30f64);
    let mut norm = 0.0;
    let mut picked = 0.0;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / t * j - jp1;
        jp1 = j;
        j = jm1;
        let idx = k - 1;
        if idx == order {
            picked = j;
        }
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            picked *= 1e-250;
        }
    }
    norm += j;
    picked / norm
}

/// Hankel asymptotic expansion, accurate to roundoff for t ≥ 25 at these orders.
fn hankel(nu: f64, t: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * t);
        if a.abs() > last || a == 0.0 {
            break;
        }
        last = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = t - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * t)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J_ν(t) for t ≥ 0.
pub fn bessel_j(order: BesselOrder, t: f64) -> f64 {
    let nu = order.nu();
    if t == 0.0 {
        return 0.0;
    }
    match order {
        BesselOrder::Half | BesselOrder::ThreeHalves | BesselOrder::FiveHalves => {
            if t < 2.0 {
                return series(nu, t);
            }
            let c = (2.0 / (PI * t)).sqrt();
            let (s, co) = t.sin_cos();
            match order {
                BesselOrder::Half => c * s,
                BesselOrder::ThreeHalves => c * (s / t - co),
                _ => c * ((3.0 / (t * t) - 1.0) * s - 3.0 * co / t),
            }
        }
        _ => {
            if t <= 1.0 {
                series(nu, t)
            } else if t < 25.0 {
                miller(nu as usize, t)
            } else {
                hankel(nu, t)
            }
        }
    }
}

/// J_ν(t) for ν ∈ {1/2, 1, 3/2, 2, 5/2, 3} and t ≥ 0.
pub fn bessel_j_half(nu: f64, t: f64) -> Result<f64> {
    let order = BesselOrder::from_nu(nu)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("Bessel argument must be >= 0, got {t}")));
    }
    Ok(bessel_j(order, t))
}

/// ∫₀^s r^N/(1+r²) dr by adaptive quadrature.
pub fn radial_moment(n_pow: u32, s: f64) -> Result<f64> {
    quad::integrate(|r: f64| r.powi(n_pow as i32) / (1.0 + r * r), 0.0, s, 0.0, 1e-14)
}

/// ₂F₁(1, (N+1)/2; (N+3)/2; z) for z ≤ 0.
pub fn hyp2f1_line(n_pow: u32, z: f64) -> Result<f64> {
    if !(z <= 0.0) {
        return Err(Error::Domain(format!("hyp2f1_line is implemented for z <= 0 only, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let b = (n_pow as f64 + 1.0) / 2.0;
    let c = b + 1.0;
    if z >= -0.5 {
        let mut sum = 1.0;
        let mut zk = 1.0;
        for k in 1..200 {
            zk *= z;
            let t = b / (b + k as f64) * zk;
            sum += t;
            if t.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        Ok(sum)
    } else if z >= -4.0 {
        // Pfaff: F(1,b;c;z) = (1−z)^{-1} F(1,1;c;w), w = z/(z−1) ∈ (1/3, 4/5]
        let w = z / (z - 1.0);
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 0..400 {
            term *= (k as f64 + 1.0) / (c + k as f64) * w;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        Ok(sum / (1.0 - z))
    } else {
        let s = (-z).sqrt();
        let m = radial_moment(n_pow, s)?;
        Ok((n_pow as f64 + 1.0) * m / s.powi(n_pow as i32 + 1))
    }
}

/// Surface area |S^{m}| of the unit m-sphere, m ∈ {0, 1, 2, 3}.
pub fn sphere_area(m: usize) -> Result<f64> {
    match m {
        0 => Ok(2.0),
        1 => Ok(2.0 * PI),
        2 => Ok(4.0 * PI),
        3 => Ok(2.0 * PI * PI),
        _ => Err(Error::Domain(format!("sphere dimension {m} unsupported"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    ClosedFormN2,
    ClosedFormN3,
    HypergeometricSeries,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelIntegralResult {
    pub value: f64,
    pub method: KernelMethod,
}

fn check_kernel_args(n: usize, eps: f64, beta: f64) -> Result<()> {
    if !(2..=5).contains(&n) {
        return Err(Error::Domain(format!("kernel_integral supports n in 2..=5, got {n}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be nonnegative, got {beta}")));
    }
    Ok(())
}

/// ∫_{|ξ'|≤β} ξ₁²|ξ'|^{2k}/(ε²ξ₁² + |ξ'|²) dξ' over ξ' ∈ ℝ^{n−1}.
pub fn kernel_integral(n: usize, k: usize, eps: f64, xi1: f64, beta: f64) -> Result<KernelIntegralResult> {
    check_kernel_args(n, eps, beta)?;
    let a = xi1.abs();
    let method = match (n, k) {
        (2, 0) => KernelMethod::ClosedFormN2,
        (3, 0) => KernelMethod::ClosedFormN3,
        _ => {
            let s = beta / (eps * a);
            if s * s <= 4.0 {
                KernelMethod::HypergeometricSeries
            } else {
                KernelMethod::Quadrature
            }
        }
    };
    if a == 0.0 || beta == 0.0 {
        return Ok(KernelIntegralResult { value: 0.0, method });
    }
    let value = match method {
        KernelMethod::ClosedFormN2 => 2.0 / eps * a * (beta / (eps * a)).atan(),
        KernelMethod::ClosedFormN3 => {
            let s = beta / (eps * a);
            PI * a * a * (s * s).ln_1p()
        }
        _ => kernel_integral_hypergeometric(n, k, eps, xi1, beta)?,
    };
    Ok(KernelIntegralResult { value, method })
}

/// The ₂F₁ representation |S^{n−2}|/(n−1+2k)·ε^{−2}β^{n−1+2k}·₂F₁(1, (N+1)/2; (N+3)/2; −s²),
/// N = n−2+2k, s = β/(ε|ξ₁|), valid for every (n, k).
pub fn kernel_integral_hypergeometric(n: usize, k: usize, eps: f64, xi1: f64, beta: f64) -> Result<f64> {
    check_kernel_args(n, eps, beta)?;
    let a = xi1.abs();
    if a == 0.0 || beta == 0.0 {
        return Ok(0.0);
    }
    let np = (n - 2 + 2 * k) as u32;
    let s = beta / (eps * a);
    let f = hyp2f1_line(np, -s * s)?;
    Ok(sphere_area(n - 2)? / (np as f64 + 1.0) / (eps * eps) * beta.powi(np as i32 + 1) * f)
}

/// Leading term |S^{n−2}|/(n−3+2k)·ξ₁²·β^{n−3+2k} of the small-ε expansion (n+2k ≥ 4).
///
/// The error is O(ε|ξ₁|³β^{n−4+2k}) when n+2k = 4 and of higher order in ε otherwise.
pub fn kernel_integral_expansion(n: usize, k: usize, eps: f64, xi1: f64, beta: f64) -> Result<f64> {
    check_kernel_args(n, eps, beta)?;
    if n + 2 * k < 4 {
        return Err(Error::Domain(format!("expansion needs n + 2k >= 4, got n={n}, k={k}")));
    }
    let p = (n + 2 * k - 3) as i32;
    Ok(sphere_area(n - 2)? / p as f64 * xi1 * xi1 * beta.powi(p))
}

/// Hilbert transform with multiplier −i·sgn(ξ), so that H(sin) = −cos.
pub fn hilbert_transform(f: &Signal1D) -> Result<Signal1D> {
    hilbert_transform_with(f, SpectralOptions::default())
}

pub fn hilbert_transform_with(f: &Signal1D, opts: SpectralOptions) -> Result<Signal1D> {
    let out = spectral::apply_multiplier(&f.values, f.dx, opts, |xi| {
        let sgn = if xi > 0.0 { 1.0 } else if xi < 0.0 { -1.0 } else { 0.0 };
        Complex64::new(0.0, -sgn)
    })?;
    Signal1D::new(f.x_min, f.dx, out)
}

/// Large-argument bound sup_{z>0} √z·|J_ν(z)| (finite for ν ≥ 1/2), evaluated numerically once.
pub fn sqrt_weighted_bessel_bound(order: BesselOrder) -> f64 {
    match order {
        BesselOrder::Half => (2.0 / PI).sqrt(),
        _ => {
            let mut m: f64 = (2.0 / PI).sqrt();
            let mut z: f64 = 0.01;
            while z < 60.0 {
                m = m.max(z.sqrt() * bessel_j(order, z).abs());
                z += 0.01;
            }
            m * (1.0 + 1e-3)
        }
    }
}
