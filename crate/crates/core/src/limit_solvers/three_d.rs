use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::domain::{EnergyBreakdown, LimitSolution, PaperValues, Profile1D, QuadratureMeta};
use crate::error::{Error, Result};
use crate::quad;

/// Literature values of the n = 3 constants.
const LIT_ALPHA0: f64 = 104.332;
const LIT_BETA0: f64 = 14.297;
const LIT_R_STAR: f64 = 1.511;
const LIT_L_STAR: f64 = 0.202;

const QUAD_TOL: f64 = 1e-13;

/// Constants and quadratures of the n = 3 Lagrange system.
///
/// With Q(R) = α₀/β₀ + 7R − β₀R² = β₀(1 − R)(R + α₀/β₀²):
/// g_m = ∫₀¹ R^m/√Q dR (m = 1, 2, 3), g4 = ∫₀¹ R√Q dR.
///
/// The rescaled profile solves R R' = (L*/R*^{3/2})√Q on (−1, 0) with R(−1) = 0, R(0) = 1,
/// which gives t(R) = −1 + (R*^{3/2}/L*)∫₀^R r/√Q dr and hence L* = R*^{3/2}g1. Unit mass is
/// 2πR*^{7/2}g3 = 1. For A = πR*²R(|x|/L*)², the two energy terms are
/// P = 2√π∫√A = 4πR*^{5/2}g2 and N = (1/14π)∫|A'|² = (4π/7)R*^{5/2}g4. Along the
/// mass-preserving dilations R ↦ λ^{-1/2}R(·/λ) they scale as λ^{1/2}P and λ^{-3}N, so
/// stationarity requires P = 6N, i.e. `residual = g2 − (6/7)g4 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EL3Internals {
    pub alpha0: f64,
    pub beta0: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub residual: f64,
}

impl EL3Internals {
    pub fn r_star(&self) -> f64 {
        (2.0 * PI * self.g3).powf(-2.0 / 7.0)
    }
    pub fn l_star(&self) -> f64 {
        self.r_star().powf(1.5) * self.g1
    }
    pub fn perimeter(&self) -> f64 {
        4.0 * PI * self.r_star().powf(2.5) * self.g2
    }
    pub fn nonlocal(&self) -> f64 {
        4.0 * PI / 7.0 * self.r_star().powf(2.5) * self.g4
    }
}

/// Positive root of α₀ = β₀(β₀ − 7).
pub fn beta_of_alpha(alpha0: f64) -> f64 {
    0.5 * (7.0 + (49.0 + 4.0 * alpha0).sqrt())
}

/// ∫_{R0}^1 f(R, Q(R)) dR through R = 1 − w², which removes the 1/√(1−R) endpoint.
fn upper_integral(alpha0: f64, beta0: f64, r0: f64, f: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let c = alpha0 / (beta0 * beta0);
    let w_max = (1.0 - r0).max(0.0).sqrt();
    quad::integrate(
        |w: f64| {
            let r = 1.0 - w * w;
            // √Q = w·√(β(R + c)), dR = 2w dw
            let sq = (beta0 * (r + c)).max(0.0).sqrt();
            f(r, sq) * 2.0
        },
        0.0,
        w_max,
        QUAD_TOL,
        QUAD_TOL,
    )
}

/// The four quadratures and the rescaling residual at α₀ ≥ 0.
pub fn el3_quadratures(alpha0: f64) -> Result<EL3Internals> {
    if !(alpha0 >= 0.0) || !alpha0.is_finite() {
        return Err(Error::Domain(format!("alpha0 must be finite and >= 0, got {alpha0}")));
    }
    let beta0 = beta_of_alpha(alpha0);
    // R^m/√Q dR = R^m/(w·s)·2w dw: the w cancels
    let g = |m: i32| upper_integral(alpha0, beta0, 0.0, |r, s| r.powi(m) / s);
    let g1 = g(1)?;
    let g2 = g(2)?;
    let g3 = g(3)?;
    // R√Q dR = R·w·s·2w dw
    let g4 = upper_integral(alpha0, beta0, 0.0, |r, s| r * (1.0 - r) * s)?;
    Ok(EL3Internals { alpha0, beta0, g1, g2, g3, g4, residual: g2 - 6.0 / 7.0 * g4 })
}

/// The system assembled from the closed-form antiderivatives (principal arctan branch,
/// the mass equation taken in absolute value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntiderivativeSystem {
    pub alpha0: f64,
    pub beta0: f64,
    pub r_star: f64,
    pub l_star: f64,
    pub residual: f64,
}

pub fn antiderivative_system(alpha0: f64) -> AntiderivativeSystem {
    let b = beta_of_alpha(alpha0);
    let sa = alpha0.sqrt();
    let at = (7.0 / (2.0 * sa)).atan();
    let r72 = (PI / (24.0 * b.powf(3.5))
        * (-1470.0 * sa + 32.0 * alpha0.powf(1.5) + (252.0 * alpha0 + 5145.0) * (at - FRAC_PI_2)))
        .abs();
    let r_star = r72.powf(-2.0 / 7.0);
    let l_star = (r_star / b).powf(1.5) * (3.5 * (at - FRAC_PI_2) + sa);
    let residual = r_star.powf(3.5) * (-52.5 * sa + 5.0 * (alpha0 + 36.75) * (FRAC_PI_2 - at))
        - 12.0 / 7.0 * r_star * r_star * l_star * alpha0 * b.powf(1.5)
        + 6.0 / (7.0 * PI) * b.powf(3.5);
    AntiderivativeSystem { alpha0, beta0: b, r_star, l_star, residual }
}

fn antiderivative_root() -> Option<f64> {
    let f = |a: f64| antiderivative_system(a).residual;
    let grid: Vec<f64> = (0..=400).map(|i| 10f64.powf(i as f64 / 100.0)).collect();
    let w = grid.windows(2).find(|w| f(w[0]).signum() != f(w[1]).signum())?;
    let (mut lo, mut hi) = (w[0], w[1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solves the n = 3 system for α₀ and returns the limit minimizer.
///
/// Candidates are α₀ = 0 (where the residual vanishes identically by the Beta-function
/// identity 3π/8 = (6/7)·7π/16) and every sign change of the residual on a logarithmic
/// scan of [1, 10⁴], refined by bisection and Newton steps. The candidate of least energy
/// is returned.
pub fn solve_3d(tol: f64) -> Result<LimitSolution> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::Domain(format!("tol must lie in (0, 1e-3], got {tol}")));
    }
    let res = |a: f64| el3_quadratures(a).map(|e| e.residual);
    let mut roots = Vec::new();
    let at_zero = el3_quadratures(0.0)?;
    if at_zero.residual.abs() <= tol * at_zero.g2 {
        roots.push(0.0);
    }
    let scan: Vec<f64> = (0..=160).map(|i| 10f64.powf(i as f64 / 40.0)).collect();
    let mut prev = (scan[0], res(scan[0])?);
    for &a in &scan[1..] {
        let r = res(a)?;
        if r.signum() != prev.1.signum() {
            let mut x = bisect(&res, prev.0, a, 1e-10)?;
            for _ in 0..3 {
                let h = 1e-6 * x;
                let d = (res(x + h)? - res(x - h)?) / (2.0 * h);
                if d != 0.0 {
                    x -= res(x)? / d;
                }
            }
            roots.push(x);
        }
        prev = (a, r);
    }
    if roots.is_empty() {
        return Err(Error::Solver("rescaling residual has no root on [0, 1e4]".into()));
    }
    let mut best: Option<EL3Internals> = None;
    for a in roots {
        let e = el3_quadratures(a)?;
        if best.map_or(true, |b| e.perimeter() + e.nonlocal() < b.perimeter() + b.nonlocal()) {
            best = Some(e);
        }
    }
    let e = best.expect("nonempty");
    let mut sol = LimitSolution {
        n: 3,
        l_star: e.l_star(),
        r_star: e.r_star(),
        alpha0: Some(e.alpha0),
        beta0: Some(e.beta0),
        profile: None,
        energy: EnergyBreakdown::new(e.perimeter(), e.nonlocal(), QuadratureMeta::default()),
        paper_values: PaperValues {
            l_star: LIT_L_STAR,
            r_star: LIT_R_STAR,
            alpha0: Some(LIT_ALPHA0),
            beta0: Some(LIT_BETA0),
            antiderivative_alpha0: antiderivative_root(),
        },
        converged: e.residual.abs() <= tol * e.g2,
    };
    let p = profile_from_solution(&sol, 1024)?;
    sol.energy.quadrature_meta.n_x1 = p.len();
    sol.profile = Some(p);
    Ok(sol)
}

fn internals_of(sol: &LimitSolution) -> Result<(f64, f64)> {
    if sol.n != 3 {
        return Err(Error::Domain("expected an n = 3 solution".into()));
    }
    let a = sol.alpha0.ok_or_else(|| Error::Domain("solution has no alpha0".into()))?;
    Ok((a, beta_of_alpha(a)))
}

/// R(t) on [−1, 1] by inverting t(R) = −1 + (R*^{3/2}/L*)∫₀^R r/√Q dr; even in t.
///
/// The profile is fixed by α₀, R* and L*; β₀ is recomputed from α₀.
pub fn shape_3d(sol: &LimitSolution, t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [-1, 1], got {t}")));
    }
    let (a, b) = internals_of(sol)?;
    let k = sol.r_star.powf(1.5) / sol.l_star;
    // distance to the center measured in t: |t| = k ∫_R^1 r/√Q dr
    let target = t.abs();
    if target == 0.0 {
        return Ok(1.0);
    }
    let tail = |r: f64| upper_integral(a, b, r, |r, s| r / s).map(|v| k * v);
    if target >= 1.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        // tail decreases in R
        if tail(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A(x) = π(R*·R(|x|/L*))² at the midpoints of `grid_n` cells covering [−L*, L*].
pub fn profile_from_solution(sol: &LimitSolution, grid_n: usize) -> Result<Profile1D> {
    profile_from_solution_padded(sol, grid_n, 0)
}

/// As [`profile_from_solution`], with `pad_cells` zero cells appended on each side.
pub fn profile_from_solution_padded(sol: &LimitSolution, grid_n: usize, pad_cells: usize) -> Result<Profile1D> {
    if grid_n < 64 {
        return Err(Error::Domain(format!("grid_n must be >= 64, got {grid_n}")));
    }
    let l = sol.l_star;
    let dx = 2.0 * l / grid_n as f64;
    let mut values = vec![0.0; grid_n + 2 * pad_cells];
    match sol.n {
        2 => {
            let p = super::semicircle_cell_averages(l, -l, l, grid_n)?;
            values[pad_cells..pad_cells + grid_n].copy_from_slice(p.values());
        }
        3 => {
            let half = grid_n / 2;
            let r2 = sol.r_star * sol.r_star;
            for i in 0..half.max(grid_n - half) {
                let x = -l + (i as f64 + 0.5) * dx;
                let r = shape_3d(sol, (x / l).clamp(-1.0, 1.0))?;
                let v = PI * r2 * r * r;
                values[pad_cells + i] = v;
                values[pad_cells + grid_n - 1 - i] = v;
            }
        }
        n => return Err(Error::Domain(format!("no limit solution for n = {n}"))),
    }
    Profile1D::new(-l - pad_cells as f64 * dx + 0.5 * dx, dx, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Q(R) in the factored form, which vanishes exactly at R = 1.
    fn radicand(alpha0: f64, beta0: f64, r: f64) -> f64 {
        (beta0 * (1.0 - r) * (r + alpha0 / (beta0 * beta0))).max(0.0)
    }

    #[test]
    fn radicand_vanishes_at_one() {
        for a in [0.0, 1.0, 104.332, 1e4] {
            let b = beta_of_alpha(a);
            assert!((a - b * (b - 7.0)).abs() < 1e-9 * a.max(1.0));
            assert_eq!(radicand(a, b, 1.0), 0.0);
            let unfactored = a / b + 7.0 - b;
            assert!(unfactored.abs() < 1e-12 * b);
        }
    }

    #[test]
    fn quadratures_match_gauss_oracle() {
        // fixed-order Gauss–Legendre in w, independent of the adaptive driver
        let (x, w) = quad::gauss_legendre(400);
        for a in [0.5, 104.332, 2000.0] {
            let e = el3_quadratures(a).unwrap();
            let b = beta_of_alpha(a);
            let c = a / (b * b);
            let g3: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| {
                    let ww = 0.5 * (xi + 1.0);
                    let r = 1.0 - ww * ww;
                    0.5 * wi * 2.0 * r.powi(3) / (b * (r + c)).sqrt()
                })
                .sum();
            assert!((e.g3 - g3).abs() < 1e-10 * g3, "{} {}", e.g3, g3);
        }
    }

    #[test]
    fn closed_forms_at_alpha_zero() {
        let e = el3_quadratures(0.0).unwrap();
        let s7 = 7f64.sqrt();
        assert!((e.g1 - PI / (2.0 * s7)).abs() < 1e-12);
        assert!((e.g3 - 5.0 * PI / (16.0 * s7)).abs() < 1e-12);
        assert!(e.residual.abs() < 1e-12);
        assert_eq!(e.beta0, 7.0);
    }

    #[test]
    fn residual_is_negative_for_positive_alpha() {
        for a in [1e-3, 1.0, 10.0, 104.332, 1e3, 1e4] {
            assert!(el3_quadratures(a).unwrap().residual < 0.0);
        }
    }

    #[test]
    fn antiderivative_system_reproduces_literature_root() {
        let a = antiderivative_root().unwrap();
        assert!((a - 104.332).abs() < 1e-3, "{a}");
        let s = antiderivative_system(a);
        assert!((s.beta0 - 14.297).abs() < 1e-3);
        assert!((s.r_star - 1.511).abs() < 1e-3);
        assert!((s.l_star - 0.202).abs() < 1e-3);
    }

    #[test]
    fn shape_endpoints_and_monotonicity() {
        let sol = solve_3d(1e-8).unwrap();
        assert_eq!(shape_3d(&sol, 0.0).unwrap(), 1.0);
        assert!(shape_3d(&sol, 1.0).unwrap() < 1e-12 && shape_3d(&sol, -1.0).unwrap() < 1e-12);
        let mut last = -1.0;
        for i in 0..=50 {
            let t = -1.0 + i as f64 / 50.0;
            let r = shape_3d(&sol, t).unwrap();
            assert!(r > last || (i == 0 && r == 0.0));
            last = r;
        }
        assert!(shape_3d(&sol, 1.5).is_err());
        // closed form at α₀ = 0: t + 1 = (2/π)(arcsin√R − √(R(1−R)))
        for t in [-0.9, -0.5, -0.1] {
            let r = shape_3d(&sol, t).unwrap();
            let back = 2.0 / PI * (r.sqrt().asin() - (r * (1.0 - r)).sqrt()) - 1.0;
            assert!((back - t).abs() < 1e-10, "{t}: {back}");
        }
    }

    #[test]
    fn profile_properties() {
        let sol = solve_3d(1e-8).unwrap();
        let p = profile_from_solution(&sol, 2048).unwrap();
        assert!((p.mass() - 1.0).abs() < 1e-6, "{}", p.mass());
        let n = p.len();
        for i in 0..n / 2 {
            assert_eq!(p.values()[i], p.values()[n - 1 - i]);
        }
        let peak = PI * sol.r_star * sol.r_star;
        assert!((p.max_value() / peak - 1.0).abs() < 1e-5);
        let e = crate::limit_energy::e0_3(&p);
        assert!((e.total / sol.energy.total - 1.0).abs() < 5e-3, "{} {}", e.total, sol.energy.total);
    }
}
