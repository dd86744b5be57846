//! Recovery sequences, E_ε-versus-E₀ sweeps and the ellipsoid scaling check.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::QuadConfig;
use crate::domain::{profile_to_shape, shape_to_profile, AxisymShape, GammaConvention, Profile1D};
use crate::energy_eps::{energy_eps_with, params_from_eps, scales_from_mu};
use crate::error::{Error, Result};
use crate::limit_energy;
use crate::spectral::SpectralOptions;

fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::Domain(format!("sweeps defined for n = 2, 3 only, got {n}")))
    }
}

/// The constant recovery sequence: the body of revolution with cross-section A.
pub fn recovery_shape(p: &Profile1D, n: usize) -> Result<AxisymShape> {
    check_dim(n)?;
    if p.values().iter().any(|v| *v < 0.0) {
        return Err(Error::Domain("cross-section must be nonnegative".into()));
    }
    profile_to_shape(p, n)
}

/// Same as [`shape_to_profile`].
pub fn cross_section(s: &AxisymShape, n: usize) -> Result<Profile1D> {
    shape_to_profile(s, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub eps: f64,
    #[serde(rename = "P")]
    pub p_eps: f64,
    #[serde(rename = "N")]
    pub n_eps: f64,
    #[serde(rename = "E")]
    pub e_eps: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub gap: f64,
}

pub fn gamma_sweep(p: &Profile1D, n: usize, eps_list: &[f64], convention: GammaConvention) -> Result<Vec<GammaRow>> {
    gamma_sweep_with(p, n, eps_list, convention, &QuadConfig::default(), SpectralOptions::default(), 0.0)
}

/// E_ε of the recovery shape of `p` against E₀[p]; gap = E_ε − E₀.
pub fn gamma_sweep_with(
    p: &Profile1D,
    n: usize,
    eps_list: &[f64],
    convention: GammaConvention,
    quad: &QuadConfig,
    opts: SpectralOptions,
    pos_threshold: f64,
) -> Result<Vec<GammaRow>> {
    check_dim(n)?;
    if eps_list.is_empty() || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("eps_list must be nonempty and strictly decreasing".into()));
    }
    let e0 = limit_energy::e0(n, p, pos_threshold, opts)?.total;
    let shape = recovery_shape(p, n)?;
    let params = eps_list.iter().map(|&e| params_from_eps(n, e, convention)).collect::<Result<Vec<_>>>()?;
    params
        .par_iter()
        .map(|pr| {
            let e = energy_eps_with(&shape, pr, quad)?;
            Ok(GammaRow { eps: pr.eps, p_eps: e.perimeter, n_eps: e.nonlocal, e_eps: e.total, e0, gap: e.total - e0 })
        })
        .collect()
}

/// ρ(x₁) = R√(1 − (x₁/L)²) on `grid_n` cells of [−1.5L, 1.5L].
pub fn ellipsoid_shape(n: usize, r: f64, l: f64, grid_n: usize) -> Result<AxisymShape> {
    check_dim(n)?;
    if !(r > 0.0 && l > 0.0) || grid_n < 2 {
        return Err(Error::Domain(format!("need R, L > 0 and grid_n >= 2, got {r}, {l}, {grid_n}")));
    }
    AxisymShape::from_cells(-1.5 * l, 1.5 * l, grid_n, |x| r * (1.0 - (x / l) * (x / l)).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub mu: f64,
    pub eps: f64,
    #[serde(rename = "E")]
    pub e_eps: f64,
    pub mass: f64,
}

/// Grid of the ellipsoids in [`scaling_sweep`].
pub const SCALING_GRID: usize = 1024;

pub fn scaling_sweep(n: usize, mu_list: &[f64], convention: GammaConvention) -> Result<Vec<ScalingRow>> {
    scaling_sweep_with(n, mu_list, convention, &QuadConfig::default())
}

/// E_ε at each μ of the rescaled unit-mass ellipsoid of unit half-length.
///
/// In rescaled variables a configuration of volume μ has unit mass; the ellipsoid
/// ρ = a√(1 − x₁²) has mass πa (n = 2, with A = 2ρ) or (4π/3)a² (n = 3).
pub fn scaling_sweep_with(n: usize, mu_list: &[f64], convention: GammaConvention, quad: &QuadConfig) -> Result<Vec<ScalingRow>> {
    check_dim(n)?;
    if mu_list.is_empty() || mu_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("mu_list must be nonempty and strictly increasing".into()));
    }
    let a = if n == 2 { 1.0 / PI } else { (3.0 / (4.0 * PI)).sqrt() };
    let shape = ellipsoid_shape(n, a, 1.0, SCALING_GRID)?;
    let mass = shape_to_profile(&shape, n)?.mass();
    let params = mu_list.iter().map(|&m| scales_from_mu(n, m, convention)).collect::<Result<Vec<_>>>()?;
    params
        .par_iter()
        .map(|pr| {
            let e = energy_eps_with(&shape, pr, quad)?;
            Ok(ScalingRow { mu: pr.mu.unwrap_or(f64::NAN), eps: pr.eps, e_eps: e.total, mass })
        })
        .collect()
}
