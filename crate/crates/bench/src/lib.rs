//! Fixtures shared by the benchmarks.

pub use needle_core::{AxisymShape, ModelParams, Profile1D, Signal1D};

use needle_core::limit_solvers::semicircle_cell_averages;

/// Unit-mass semicircle on `[-1.5, 1.5]` sampled with `n` cells.
pub fn semicircle(n: usize) -> Profile1D {
    let l = (2.0 * std::f64::consts::PI).powf(-1.0 / 3.0);
    semicircle_cell_averages(l, -1.5, 1.5, n).expect("valid grid")
}

/// Unit ball as an axisymmetric shape on `[-1.5, 1.5]`.
pub fn ball(n: usize) -> AxisymShape {
    let dx = 3.0 / n as f64;
    let rho = (0..n)
        .map(|i| {
            let x = -1.5 + (i as f64 + 0.5) * dx;
            (1.0 - x * x).max(0.0).sqrt()
        })
        .collect();
    AxisymShape::new(-1.5, dx, rho).expect("valid grid")
}

/// Smooth periodic test signal.
pub fn wave(n: usize) -> Signal1D {
    let dx = 1.0 / n as f64;
    let v = (0..n).map(|i| (2.0 * std::f64::consts::PI * 3.0 * i as f64 * dx).sin()).collect();
    Signal1D::new(0.0, dx, v).expect("valid grid")
}
