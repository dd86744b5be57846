//! The invariant suite behind `needle verify`.

use std::f64::consts::PI;
use std::time::Instant;

use needle_core::asymptotics::{gamma_sweep_with, scaling_sweep_with};
use needle_core::config::Config;
use needle_core::domain::{load_profile, profile_to_shape, resample, save_profile, shape_to_profile};
use needle_core::energy_eps::{nonlocal_eps_with, params_raw};
use needle_core::limit_energy::{
    e0_2_with, e0_3, h_half_seminorm_sq, h_half_seminorm_sq_direct, symmetric_decreasing_rearrangement,
};
use needle_core::limit_solvers::{
    el_residual_3d, gaussian_init, minimize_e0, profile_from_solution, shape_3d, solve_2d, solve_3d,
    MinimizeOptions,
};
use needle_core::specfun::{hilbert_transform_with, hyp2f1_line, kernel_integral, kernel_integral_hypergeometric};
use needle_core::spectral::SpectralOptions;
use needle_core::{AxisymShape, Profile1D, Result, Signal1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::output::g6;

type Check = fn(&Config) -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("profile csv round trip", csv_round_trip),
    ("radius map round trip", radius_round_trip),
    ("resample mass is second order", resample_order),
    ("hyp2f1 identities", hyp2f1_identities),
    ("kernel closed forms match series", kernel_series),
    ("kernel monotone in beta", kernel_monotone),
    ("hilbert twice negates", hilbert_twice),
    ("nonlocal_eps nonnegative and translation invariant", nonlocal_translation),
    ("semicircle seminorm equals 2/pi", semicircle_seminorm),
    ("seminorm backends agree", backends),
    ("limit energies translation invariant", e0_translation),
    ("seminorm dilation law", dilation),
    ("rearrangement does not raise e0", rearrangement),
    ("3d shape monotone, EL residual small", three_d),
    ("descent output even and unimodal", descent_shape),
    ("2d gamma sweep |gap| strictly decreasing", gamma_2d),
    ("scaling sweep energies positive", scaling),
];

pub fn run(config: &Config) -> CliResult<()> {
    let mut failed = 0;
    for (name, check) in CHECKS {
        let t = Instant::now();
        let (ok, detail) = match check(config) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {name}: {detail} [{:.1} s]", if ok { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
    }
    println!("{} of {} checks passed", CHECKS.len() - failed, CHECKS.len());
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} invariant check(s) failed")));
    }
    Ok(())
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6e65_6564)
}

/// Random nonnegative values on the central half of `n` cells of [−1, 1].
fn random_profile(r: &mut ChaCha8Rng, n: usize) -> Profile1D {
    let mut v = vec![0.0; n];
    for x in v.iter_mut().skip(n / 4).take(n / 2) {
        *x = r.gen_range(0.0..1.0);
    }
    let p = Profile1D::new(-1.0, 2.0 / n as f64, v).expect("finite");
    p.scaled(1.0 / p.mass()).expect("finite")
}

fn semicircle(n: usize, span: f64) -> Result<Profile1D> {
    Profile1D::from_cells(-span, span, n, |t| 2.0 / PI * (1.0 - t * t).max(0.0).sqrt())
}

fn csv_round_trip(_: &Config) -> Result<(bool, String)> {
    let p = random_profile(&mut rng(), 64).translated(0.123);
    let path = std::env::temp_dir().join(format!("needle-verify-{}.csv", std::process::id()));
    save_profile(&p, &path)?;
    let q = load_profile(&path);
    let _ = std::fs::remove_file(&path);
    let q = q?;
    let ok = p.values() == q.values() && (p.x_min() - q.x_min()).abs() < 1e-12 && (p.dx() - q.dx()).abs() < 1e-12;
    Ok((ok, "values bit-identical, grid within 1e-12".into()))
}

fn radius_round_trip(_: &Config) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in [2, 3] {
        let s = AxisymShape::from_cells(-1.5, 1.5, 301, |x| (1.0 - x * x).max(0.0).sqrt())?;
        let back = profile_to_shape(&shape_to_profile(&s, n)?, n)?;
        for (a, b) in s.rho().iter().zip(back.rho()) {
            if *a > 0.0 {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max error {worst:.2e}")))
}

fn resample_order(_: &Config) -> Result<(bool, String)> {
    let p = Profile1D::from_cells(-1.5, 1.5, 101, |t| (1.0 - t * t).max(0.0).powi(2))?;
    let m0 = p.mass();
    let d2 = (resample(&p, 201)?.mass() - m0).abs();
    let d4 = (resample(&p, 401)?.mass() - m0).abs();
    Ok((d2 < 4.0 * d4 || d2 < 1e-12, format!("mass change {d2:.2e} (x2), {d4:.2e} (x4)")))
}

fn hyp2f1_identities(_: &Config) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 0..6 {
        worst = worst.max((hyp2f1_line(n, 0.0)? - 1.0).abs());
    }
    for z in [-1e-3, -0.3, -1.0, -3.0, -10.0, -50.0] {
        let want = -(1.0f64 - z).ln() / z;
        worst = worst.max((hyp2f1_line(1, z)? - want).abs() / want);
    }
    Ok((worst <= 1e-12, format!("max error {worst:.2e}")))
}

const EPS_GRID: [f64; 5] = [1e-2, 0.0316, 0.1, 0.316, 1.0];
const XI_GRID: [f64; 5] = [0.1, 0.316, 1.0, 3.16, 10.0];

fn kernel_series(_: &Config) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in [2, 3] {
        for e in EPS_GRID {
            for x in XI_GRID {
                for b in XI_GRID {
                    let c = kernel_integral(n, 0, e, x, b)?.value;
                    let h = kernel_integral_hypergeometric(n, 0, e, x, b)?;
                    worst = worst.max((c - h).abs() / c.abs());
                }
            }
        }
    }
    Ok((worst <= 1e-9, format!("max relative error {worst:.2e} on 250 points")))
}

fn kernel_monotone(_: &Config) -> Result<(bool, String)> {
    let mut ok = true;
    for n in [2, 3] {
        for k in 0..3 {
            for e in EPS_GRID {
                for x in XI_GRID {
                    let mut last = 0.0;
                    for b in XI_GRID {
                        let v = kernel_integral(n, k, e, x, b)?.value;
                        ok &= v >= last;
                        last = v;
                    }
                }
            }
        }
    }
    Ok((ok, "nondecreasing along every beta row".into()))
}

fn hilbert_twice(_: &Config) -> Result<(bool, String)> {
    let n = 256;
    let v: Vec<f64> = (0..n)
        .map(|i| {
            let x = 2.0 * PI * i as f64 / n as f64;
            x.sin() + 0.5 * (3.0 * x + 1.0).cos() - 0.25 * (7.0 * x).sin()
        })
        .collect();
    let f = Signal1D::new(0.0, 2.0 * PI / n as f64, v.clone())?;
    let per = SpectralOptions::periodic();
    let hh = hilbert_transform_with(&hilbert_transform_with(&f, per)?, per)?;
    let err: f64 = hh.values.iter().zip(&v).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
    let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok((err <= 1e-8 * norm, format!("relative L2 error {:.2e}", err / norm)))
}

fn nonlocal_translation(c: &Config) -> Result<(bool, String)> {
    let s = AxisymShape::from_cells(-1.5, 1.5, 256, |x| 0.5 * (1.0 - x * x).max(0.0))?;
    let mut worst = 0.0f64;
    let mut nonneg = true;
    for n in [2, 3] {
        let params = params_raw(n, 0.3, 1.0)?;
        let (a, _) = nonlocal_eps_with(&s, &params, &c.quad)?;
        let (b, _) = nonlocal_eps_with(&s.translated(0.37), &params, &c.quad)?;
        nonneg &= a >= 0.0;
        worst = worst.max((a - b).abs() / a);
    }
    Ok((nonneg && worst <= 1e-10, format!("relative change under translation {worst:.2e}")))
}

fn semicircle_seminorm(_: &Config) -> Result<(bool, String)> {
    let v = h_half_seminorm_sq(&semicircle(8192, 1.6)?)?;
    let rel = v / (2.0 / PI) - 1.0;
    Ok((rel.abs() < 0.01, format!("{} (relative {rel:.2e})", g6(v))))
}

fn backends(_: &Config) -> Result<(bool, String)> {
    let p = Profile1D::from_cells(-8.0, 8.0, 4096, |x| if x.abs() < 4.0 { (-x * x).exp() } else { 0.0 })?;
    let s = h_half_seminorm_sq(&p)?;
    let d = h_half_seminorm_sq_direct(&p);
    let rel = (s - d).abs() / s;
    Ok((rel < 0.02, format!("spectral {}, direct {}, relative {rel:.2e}", g6(s), g6(d))))
}

fn e0_translation(c: &Config) -> Result<(bool, String)> {
    let p = random_profile(&mut rng(), 128);
    let q = p.translated(2.5);
    let opts = SpectralOptions { pad_factor: c.pad_factor, check_padding: true };
    let d2 = (e0_2_with(&p, c.pos_threshold, opts)?.total - e0_2_with(&q, c.pos_threshold, opts)?.total).abs();
    let d3 = (e0_3(&p).total - e0_3(&q).total).abs();
    Ok((d2 <= 1e-10 && d3 <= 1e-10, format!("changes {d2:.2e}, {d3:.2e}")))
}

fn dilation(_: &Config) -> Result<(bool, String)> {
    let vals: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&l| {
            let p = Profile1D::from_cells(-4.0 * l, 4.0 * l, 4096, |x| {
                2.0 / (PI * l) * (1.0 - (x / l).powi(2)).max(0.0).sqrt()
            })?;
            Ok(h_half_seminorm_sq(&p)? * l * l)
        })
        .collect::<Result<_>>()?;
    let spread = vals.iter().map(|v| (v / vals[1] - 1.0).abs()).fold(0.0, f64::max);
    Ok((spread < 0.01, format!("L^2 |A_L|^2 spread {spread:.2e}")))
}

fn rearrangement(c: &Config) -> Result<(bool, String)> {
    let mut r = rng();
    let opts = SpectralOptions { pad_factor: c.pad_factor, check_padding: true };
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let p = random_profile(&mut r, 128);
        let q = symmetric_decreasing_rearrangement(&p);
        worst = worst.max(e0_2_with(&q, c.pos_threshold, opts)?.total - e0_2_with(&p, c.pos_threshold, opts)?.total);
        worst = worst.max(e0_3(&q).total - e0_3(&p).total);
    }
    Ok((worst <= 1e-8, format!("largest increase {worst:.2e} over 20 profiles")))
}

fn three_d(_: &Config) -> Result<(bool, String)> {
    let sol = solve_3d(1e-10)?;
    let mut mono = true;
    let mut last = -1.0;
    for i in 0..=100 {
        let r = shape_3d(&sol, -1.0 + i as f64 / 100.0)?;
        mono &= i == 0 || r > last;
        last = r;
    }
    let mass = profile_from_solution(&sol, 2048)?.mass();
    let res = el_residual_3d(&sol, 400)?;
    let beta = sol.beta0.unwrap_or(f64::NAN);
    let ok = mono && (mass - 1.0).abs() < 1e-6 && res < 0.01 * 2.0 * beta;
    Ok((ok, format!("mass {}, residual {res:.2e} vs 2 beta0 = {}", g6(mass), g6(2.0 * beta))))
}

fn descent_shape(_: &Config) -> Result<(bool, String)> {
    let mut ok = true;
    for n in [2, 3] {
        let r = minimize_e0(n, &gaussian_init(256)?, MinimizeOptions { iters: 300, ..MinimizeOptions::default() })?;
        let v = r.profile.values();
        let m = v.len();
        ok &= (0..m / 2).all(|i| v[i] == v[m - 1 - i]) && (1..m / 2).all(|i| v[i] >= v[i - 1]);
        ok &= r.trace.windows(2).all(|w| w[1] <= w[0]);
        if n == 3 {
            ok &= v[0] < 1e-6 * r.profile.max_value() && v[m - 1] < 1e-6 * r.profile.max_value();
        }
    }
    Ok((ok, "even, nonincreasing from the center, monotone trace".into()))
}

fn gamma_2d(c: &Config) -> Result<(bool, String)> {
    let p = solve_2d(1024)?.profile.expect("profile attached");
    let opts = SpectralOptions { pad_factor: c.pad_factor, check_padding: true };
    let rows = gamma_sweep_with(&p, 2, &[0.2, 0.1, 0.05, 0.025], c.gamma_convention, &c.quad, opts, c.pos_threshold)?;
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let strict = gaps.windows(2).all(|w| w[1].abs() < w[0].abs());
    let half = gaps[3].abs() < 0.5 * gaps[0].abs();
    let shown: Vec<String> = gaps.iter().map(|g| g6(*g)).collect();
    Ok((strict && half, format!("gaps [{}], final < half initial: {half}", shown.join(", "))))
}

fn scaling(c: &Config) -> Result<(bool, String)> {
    let mut ok = true;
    let mut ratio = 0.0f64;
    for n in [2, 3] {
        let rows = scaling_sweep_with(n, &[1e2, 1e4, 1e6], c.gamma_convention, &c.quad)?;
        ok &= rows.iter().all(|r| r.e_eps.is_finite() && r.e_eps > 0.0);
        let max = rows.iter().map(|r| r.e_eps).fold(f64::NEG_INFINITY, f64::max);
        let min = rows.iter().map(|r| r.e_eps).fold(f64::INFINITY, f64::min);
        ratio = ratio.max(max / min);
    }
    Ok((ok, format!("largest max/min {}", g6(ratio))))
}
