use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{LimitSolution, Profile1D, Signal1D};
use crate::error::{Error, Result};
use crate::spectral::{self, SpectralOptions};

use super::shape_3d;

/// Constancy of H(A') on the support and its fit to the semicircle exterior law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stationarity {
    #[serde(rename = "C1")]
    pub c1: f64,
    pub interior_dev: f64,
    pub exterior_dev: f64,
    pub exterior_rel_dev: f64,
}

/// H(A') = |D|A on the grid of `p` (zero padding 16, no margin check).
pub fn hilbert_derivative(p: &Profile1D) -> Signal1D {
    let opts = SpectralOptions { pad_factor: spectral::DEFAULT_PAD_FACTOR, check_padding: false };
    let h = spectral::apply_multiplier(p.values(), p.dx(), opts, |xi| Complex64::new(xi.abs(), 0.0))
        .expect("padding check disabled");
    Signal1D { x_min: p.x_min(), dx: p.dx(), values: h }
}

/// H(A') = |D|A compared with the semicircle of the same support.
///
/// For A = (2/πL²)√(L² − (s − c)²) one has H(A') = 2/(πL²) on the support and
/// 2/(πL²)(1 − |σ|/√(σ² − 1)), σ = (s − c)/L, outside. C1 is the mean on the central 80% of
/// the support and `interior_dev` the largest absolute deviation there; the exterior
/// deviations are taken at distance ≥ 0.1 from the support, with c the centroid and L half the
/// support length (cell edges).
pub fn hilbert_stationarity_2d(p: &Profile1D) -> Stationarity {
    let zero = Stationarity { c1: 0.0, interior_dev: 0.0, exterior_dev: 0.0, exterior_rel_dev: 0.0 };
    let (Some((i0, i1)), Some(c)) = (p.support_indices(0.0), p.centroid()) else {
        return zero;
    };
    let h = hilbert_derivative(p).values;
    let half = 0.5 * (p.x(i1) - p.x(i0) + p.dx());
    let inner: Vec<f64> =
        (0..p.len()).filter(|&i| (p.x(i) - c).abs() <= 0.8 * half).map(|i| h[i]).collect();
    if inner.is_empty() {
        return zero;
    }
    let c1 = inner.iter().sum::<f64>() / inner.len() as f64;
    let interior_dev = inner.iter().map(|v| (v - c1).abs()).fold(0.0, f64::max);
    let scale = 2.0 / (PI * half * half);
    let (mut exterior_dev, mut exterior_rel_dev) = (0.0f64, 0.0f64);
    for (i, v) in h.iter().enumerate() {
        let d = (p.x(i) - c).abs();
        if d >= half + 0.1 {
            let sigma = d / half;
            let model = scale * (1.0 - sigma / (sigma * sigma - 1.0).sqrt());
            exterior_dev = exterior_dev.max((v - model).abs());
            exterior_rel_dev = exterior_rel_dev.max((v - model).abs() / model.abs());
        }
    }
    Stationarity { c1, interior_dev, exterior_dev, exterior_rel_dev }
}

/// max |(R*³/L*²)(R²)'' − 7/R + 2β₀| over |t| ≤ 0.8.
///
/// R is sampled from [`shape_3d`] (which rebuilds the profile from α₀) on `grid_n` + 1 points
/// of [−1, 1]; (R²)'' is the second difference. The constant β₀ is the one stored in `sol`.
pub fn el_residual_3d(sol: &LimitSolution, grid_n: usize) -> Result<f64> {
    if grid_n < 8 {
        return Err(Error::Domain(format!("grid_n must be >= 8, got {grid_n}")));
    }
    let beta0 = sol.beta0.ok_or_else(|| Error::Domain("solution has no beta0".into()))?;
    let h = 2.0 / grid_n as f64;
    let r: Vec<f64> =
        (0..=grid_n).map(|j| shape_3d(sol, (-1.0 + j as f64 * h).clamp(-1.0, 1.0))).collect::<Result<_>>()?;
    let k = sol.r_star.powi(3) / (sol.l_star * sol.l_star);
    let mut worst = 0.0f64;
    for j in 1..grid_n {
        let t = -1.0 + j as f64 * h;
        if t.abs() > 0.8 + 1e-12 {
            continue;
        }
        let d2 = (r[j + 1] * r[j + 1] - 2.0 * r[j] * r[j] + r[j - 1] * r[j - 1]) / (h * h);
        worst = worst.max((k * d2 - 7.0 / r[j] + 2.0 * beta0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_solvers::solve_3d;

    #[test]
    fn semicircle_is_stationary() {
        let p = Profile1D::from_cells(-1.6, 1.6, 8192, |t| 2.0 / PI * (1.0 - t * t).max(0.0).sqrt()).unwrap();
        let s = hilbert_stationarity_2d(&p);
        assert!((s.c1 - 2.0 / PI).abs() < 0.01 * 2.0 / PI, "{s:?}");
        assert!(s.interior_dev < 0.02 * 2.0 / PI, "{s:?}");
        assert!(s.exterior_rel_dev < 0.01, "{s:?}");
        let model = 2.0 / PI * (1.0 - 1.5 / 1.25f64.sqrt());
        let i = ((1.5 - p.x_min()) / p.dx()).round() as usize;
        let h = spectral::apply_multiplier(
            p.values(),
            p.dx(),
            SpectralOptions { pad_factor: 16, check_padding: false },
            |xi| Complex64::new(xi.abs(), 0.0),
        )
        .unwrap();
        let v = h[i] + (h[i + 1] - h[i]) * (1.5 - p.x(i)) / p.dx();
        assert!((v / model - 1.0).abs() < 0.01, "{v} {model}");
    }

    #[test]
    fn zero_profile() {
        let p = Profile1D::new(-1.0, 0.01, vec![0.0; 201]).unwrap();
        let s = hilbert_stationarity_2d(&p);
        assert_eq!((s.c1, s.interior_dev, s.exterior_dev), (0.0, 0.0, 0.0));
    }

    #[test]
    fn el_residual_small_and_sensitive() {
        let sol = solve_3d(1e-8).unwrap();
        let beta = sol.beta0.unwrap();
        let r = el_residual_3d(&sol, 400).unwrap();
        assert!(r < 0.01 * 2.0 * beta, "{r}");
        let mut bad = sol.clone();
        bad.beta0 = Some(1.1 * beta);
        let rb = el_residual_3d(&bad, 400).unwrap();
        assert!(rb > 5.0 * r, "{rb} {r}");
    }
}
