use std::f64::consts::PI;

use crate::domain::{EnergyBreakdown, LimitSolution, PaperValues, Profile1D, QuadratureMeta};
use crate::error::{Error, Result};

/// Ẽ(L) = 4L + ½‖A_L‖²_{Ḣ^{1/2}} = 4L + 1/(πL²) on the semicircle family.
pub fn semicircle_energy(l: f64) -> f64 {
    4.0 * l + 1.0 / (PI * l * l)
}

/// Golden-section search followed by Newton steps on Ẽ'.
fn argmin_semicircle_energy() -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.05f64, 5.0f64);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while b - a > 1e-10 {
        if semicircle_energy(c) < semicircle_energy(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let mut l = 0.5 * (a + b);
    for _ in 0..5 {
        let d1 = 4.0 - 2.0 / (PI * l.powi(3));
        let d2 = 6.0 / (PI * l.powi(4));
        l -= d1 / d2;
    }
    l
}

/// Cell averages of A_L(x) = (2/(πL))√(1 − (x/L)²) on `n` cells covering `[a, b]`.
///
/// Averages rather than point values make the discrete mass exact.
pub fn semicircle_cell_averages(l: f64, a: f64, b: f64, n: usize) -> Result<Profile1D> {
    if !(l > 0.0) || !(b > a) || n == 0 {
        return Err(Error::Domain("bad semicircle grid".into()));
    }
    // ∫ A_L = (1/π)(t√(1−t²) + arcsin t), t = x/L
    let prim = |x: f64| {
        let t = (x / l).clamp(-1.0, 1.0);
        (t * (1.0 - t * t).sqrt() + t.asin()) / PI
    };
    let dx = (b - a) / n as f64;
    let values = (0..n)
        .map(|i| {
            let x0 = a + i as f64 * dx;
            ((prim(x0 + dx) - prim(x0)) / dx).max(0.0)
        })
        .collect();
    Profile1D::new(a + 0.5 * dx, dx, values)
}

/// The n = 2 limit minimizer: the semicircle law at the argmin of Ẽ.
pub fn solve_2d(grid_n: usize) -> Result<LimitSolution> {
    if grid_n < 64 {
        return Err(Error::Domain(format!("grid_n must be >= 64, got {grid_n}")));
    }
    let l = argmin_semicircle_energy();
    let profile = semicircle_cell_averages(l, -2.0 * l, 2.0 * l, grid_n)?;
    let energy = EnergyBreakdown::new(
        4.0 * l,
        1.0 / (PI * l * l),
        QuadratureMeta { n_x1: grid_n, ..QuadratureMeta::default() },
    );
    Ok(LimitSolution {
        n: 2,
        l_star: l,
        // A(0) = ω₁R* = 2/(πL)
        r_star: 1.0 / (PI * l),
        alpha0: None,
        beta0: None,
        profile: Some(profile),
        energy,
        paper_values: PaperValues {
            l_star: (2.0 / PI).powf(1.0 / 3.0),
            r_star: (1.0 / (2.0 * PI * PI)).powf(1.0 / 3.0),
            ..PaperValues::default()
        },
        converged: true,
    })
}
