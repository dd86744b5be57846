//! Minimizers of the limit functionals: closed-form families, the n = 3 Lagrange system,
//! a constrained-descent oracle and stationarity checks.

mod minimize;
mod stationarity;
mod three_d;
mod two_d;

pub use minimize::{flat_init, gaussian_init, minimize_e0, MinimizeOptions, MinimizeResult};
pub use stationarity::{el_residual_3d, hilbert_derivative, hilbert_stationarity_2d, Stationarity};
pub use three_d::{
    antiderivative_system, el3_quadratures, profile_from_solution, profile_from_solution_padded, shape_3d,
    solve_3d, AntiderivativeSystem, EL3Internals,
};
pub use two_d::{semicircle_cell_averages, semicircle_energy, solve_2d};
