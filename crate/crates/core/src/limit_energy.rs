//! The limit functionals E₀⁽²⁾, E₀⁽³⁾ and the seminorms they are built from.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::{EnergyBreakdown, Profile1D, QuadratureMeta};
use crate::error::{Error, Result};
use crate::spectral::{self, Plan, SpectralOptions};

/// ∫|ξ||Â(ξ)|² dξ on the zero-padded periodic grid.
pub fn h_half_seminorm_sq(p: &Profile1D) -> Result<f64> {
    h_half_seminorm_sq_with(p, SpectralOptions::default())
}

pub fn h_half_seminorm_sq_with(p: &Profile1D, opts: SpectralOptions) -> Result<f64> {
    spectral::weighted_power(p.values(), p.dx(), opts, f64::abs)
}

/// (1/2π)∬(A(x)−A(y))²/(x−y)² dx dy by direct summation.
///
/// Off-diagonal grid pairs are summed exactly; the pairs with one point outside the sampled
/// cells, where A = 0, are integrated in closed form: 2Σ A_i² dx (1/(x_i−a) + 1/(b−x_i)) with
/// [a, b] the cell extent of the grid. Diagonal cells are omitted.
pub fn h_half_seminorm_sq_direct(p: &Profile1D) -> f64 {
    let a = p.values();
    let n = a.len();
    let dx = p.dx();
    let left = p.x_min() - 0.5 * dx;
    let right = p.x_max() + 0.5 * dx;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                if j != i {
                    let d = a[i] - a[j];
                    let k = (i as f64 - j as f64) * dx;
                    s += d * d / (k * k);
                }
            }
            let xi = p.x(i);
            s * dx * dx + 2.0 * a[i] * a[i] * dx * (1.0 / (xi - left) + 1.0 / (right - xi))
        })
        .collect();
    rows.iter().sum::<f64>() / (2.0 * PI)
}

/// ∫(1+ξ²)^s |Â|² dξ.
pub fn sobolev_hs_norm_sq(p: &Profile1D, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("Sobolev index must lie in [0, 1], got {s}")));
    }
    spectral::weighted_power(p.values(), p.dx(), SpectralOptions::default(), |xi| (1.0 + xi * xi).powf(s))
}

/// E₀⁽²⁾ = 2|{A > threshold}| + ½‖A‖²_{Ḣ^{1/2}}.
pub fn e0_2(p: &Profile1D, pos_threshold: f64) -> Result<EnergyBreakdown> {
    e0_2_with(p, pos_threshold, SpectralOptions::default())
}

pub fn e0_2_with(p: &Profile1D, pos_threshold: f64, opts: SpectralOptions) -> Result<EnergyBreakdown> {
    let count = p.values().iter().filter(|&&v| v > pos_threshold).count();
    let perimeter = 2.0 * p.dx() * count as f64;
    let nonlocal = 0.5 * h_half_seminorm_sq_with(p, opts)?;
    Ok(EnergyBreakdown::new(perimeter, nonlocal, meta_1d(p, opts)))
}

fn meta_1d(p: &Profile1D, opts: SpectralOptions) -> QuadratureMeta {
    let m = spectral::padded_len(p.len(), opts.pad_factor);
    QuadratureMeta {
        xi1_max: PI / p.dx(),
        r_max: 0.0,
        n_xi1: m,
        n_r: 0,
        n_x1: p.len(),
        tail_bound: 0.0,
    }
}

/// E₀⁽³⁾ = 2√π∫√A + (1/14π)∫|A'|².
///
/// The samples are read as cell midpoints, so the first term is the midpoint rule; the
/// second uses the difference quotients between neighbouring samples, including the step
/// from the last sample on either side to the zero extension.
pub fn e0_3(p: &Profile1D) -> EnergyBreakdown {
    let a = p.values();
    let dx = p.dx();
    let root: f64 = a.iter().map(|v| v.sqrt()).sum::<f64>() * dx;
    let perimeter = 2.0 * PI.sqrt() * root;
    let nonlocal = dirichlet_sum(a) / dx / (14.0 * PI);
    EnergyBreakdown::new(
        perimeter,
        nonlocal,
        QuadratureMeta { n_x1: a.len(), ..QuadratureMeta::default() },
    )
}

/// Σ (A_{j+1} − A_j)² with zero extension at both ends.
pub(crate) fn dirichlet_sum(a: &[f64]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let inner: f64 = a.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    inner + a[0] * a[0] + a[n - 1] * a[n - 1]
}

/// Dispatches to [`e0_2`] or [`e0_3`].
pub fn e0(n: usize, p: &Profile1D, pos_threshold: f64, opts: SpectralOptions) -> Result<EnergyBreakdown> {
    match n {
        2 => e0_2_with(p, pos_threshold, opts),
        3 => Ok(e0_3(p)),
        _ => Err(Error::Domain(format!("limit energy defined for n = 2, 3 only, got {n}"))),
    }
}

/// ‖A_t‖²_{Ḣ^{1/2}} for A_t(x) = φ(x) + ψ(x + t) at `steps` equally spaced t ∈ [0, τ].
///
/// ψ has to lie to the right of φ with a gap larger than τ. The shift is applied as the
/// phase e^{iξt}, so t need not be a multiple of the grid step.
pub fn shift_monotonicity(phi: &Profile1D, psi: &Profile1D, tau: f64, steps: usize) -> Result<Vec<f64>> {
    if !(tau > 0.0) || steps < 2 {
        return Err(Error::Domain(format!("need tau > 0 and steps >= 2, got {tau}, {steps}")));
    }
    if phi.len() != psi.len() || phi.dx() != psi.dx() || phi.x_min() != psi.x_min() {
        return Err(Error::Grid("phi and psi must share one grid".into()));
    }
    if let (Some((_, phi_last)), Some((psi_first, _))) = (phi.support_indices(0.0), psi.support_indices(0.0)) {
        let gap = psi.x(psi_first) - phi.x(phi_last);
        if !(gap > tau) {
            return Err(Error::Domain(format!(
                "supports of phi and psi(. + t) overlap for t <= {tau}: gap {gap}"
            )));
        }
    }
    let sum: Vec<f64> = phi.values().iter().zip(psi.values()).map(|(a, b)| a + b).collect();
    spectral::check_padding(&sum, phi.dx())?;
    let m = spectral::padded_len(phi.len(), spectral::DEFAULT_PAD_FACTOR);
    let plan = Plan::new(m);
    let fp = plan.forward_real(phi.values());
    let fq = plan.forward_real(psi.values());
    let dx = phi.dx();
    let xis: Vec<f64> = (0..m).map(|k| spectral::bin_frequency(k, m, dx)).collect();
    Ok((0..steps)
        .map(|j| {
            let t = tau * j as f64 / (steps - 1) as f64;
            let s: f64 = (0..m)
                .map(|k| {
                    let ph = Complex64::from_polar(1.0, xis[k] * t);
                    xis[k].abs() * (fp[k] + ph * fq[k]).norm_sqr()
                })
                .sum();
            s * dx / m as f64
        })
        .collect())
}

/// Even, nonincreasing-from-center rearrangement about the grid midpoint.
///
/// Sorted values are dealt out alternately left and right of the center, which is the
/// discrete equimeasurable rearrangement; it is exactly even only when values pair up.
pub fn symmetric_decreasing_rearrangement(p: &Profile1D) -> Profile1D {
    let n = p.len();
    let mut sorted = p.values().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut out = vec![0.0; n];
    for (rank, v) in sorted.into_iter().enumerate() {
        out[rearrangement_slot(n, rank)] = v;
    }
    p.with_values(out).expect("same grid, same values")
}

/// Grid index receiving the `rank`-th largest value.
pub(crate) fn rearrangement_slot(n: usize, rank: usize) -> usize {
    if n % 2 == 1 {
        let c = n / 2;
        let k = rank.div_ceil(2);
        if rank % 2 == 1 { c - k } else { c + k }
    } else {
        let c = n / 2;
        let k = rank / 2;
        if rank % 2 == 0 { c - 1 - k } else { c + k }
    }
}
