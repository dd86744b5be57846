use std::f64::consts::PI;
use std::path::Path;

use needle_core::asymptotics::{gamma_sweep_with, scaling_sweep_with};
use needle_core::config::Config;
use needle_core::domain::{load_profile, load_shape, profile_to_shape, save_profile};
use needle_core::energy_eps::{energy_eps_with, params_from_eps, params_raw, scales_from_mu};
use needle_core::limit_energy::e0_3;
use needle_core::limit_solvers::{
    flat_init, gaussian_init, hilbert_derivative, hilbert_stationarity_2d, minimize_e0, profile_from_solution,
    profile_from_solution_padded, semicircle_energy, solve_2d, solve_3d, MinimizeOptions,
};
use needle_core::spectral::SpectralOptions;
use needle_core::{LimitSolution, ModelParams, Profile1D};
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::output::{artifact_path, g6, sibling, write_json, write_table};
use crate::verify;

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::SolveLimit(a) => solve_limit(a),
        Command::Energy(a) => energy(a, config),
        Command::GammaSweep(a) => gamma_sweep(a, config),
        Command::ScalingSweep(a) => scaling_sweep(a, config),
        Command::Minimize(a) => minimize(a),
        Command::Hilbert(a) => hilbert(a),
        Command::Verify(a) => {
            if a.print_config {
                print!("{config}");
                Ok(())
            } else {
                verify::run(&config)
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> CliResult<Config> {
    let env = std::env::var_os("NEEDLE_CONFIG").filter(|v| !v.is_empty());
    match path.map(|p| p.to_path_buf()).or_else(|| env.map(Into::into)) {
        Some(p) => Ok(Config::load(p)?),
        None => Ok(Config::default()),
    }
}

fn apply(mut c: Config, q: &QuadArgs) -> Config {
    if q.xi1_max.is_some() {
        c.quad.xi1_max = q.xi1_max;
    }
    if q.r_max.is_some() {
        c.quad.r_max = q.r_max;
    }
    if q.n_xi1.is_some() {
        c.quad.n_xi1 = q.n_xi1;
    }
    if let Some(v) = q.n_r {
        c.quad.n_r = v;
    }
    if let Some(v) = q.pad_factor {
        c.pad_factor = v;
    }
    if let Some(v) = q.pos_threshold {
        c.pos_threshold = v;
    }
    if let Some(v) = q.gamma_convention {
        c.gamma_convention = v;
    }
    c
}

fn check_config(c: &Config) -> CliResult<Config> {
    // round trip through the text form runs the validation
    Config::parse(&c.to_string()).map_err(|e| CliError::Usage(e.to_string()))
}

fn solve(dim: u32, tol: f64, samples: usize) -> CliResult<LimitSolution> {
    Ok(match dim {
        2 => solve_2d(samples)?,
        _ => {
            let mut s = solve_3d(tol)?;
            s.profile = Some(profile_from_solution(&s, samples)?);
            s
        }
    })
}

fn solve_limit(a: SolveLimitArgs) -> CliResult<()> {
    let sol = solve(a.dim, a.tol, a.samples)?;
    let ext = match a.format {
        OutFormat::Json => "json",
        OutFormat::Csv => "csv",
    };
    let path = artifact_path(a.out.as_deref(), "solve-limit", a.dim, ext);
    match a.format {
        OutFormat::Json => write_json(&path, &sol)?,
        OutFormat::Csv => {
            let mut s = String::from("key,value\n");
            let mut kv = |k: &str, v: Option<f64>| {
                if let Some(v) = v {
                    s.push_str(&format!("{k},{v}\n"));
                }
            };
            kv("n", Some(sol.n as f64));
            kv("L_star", Some(sol.l_star));
            kv("R_star", Some(sol.r_star));
            kv("alpha0", sol.alpha0);
            kv("beta0", sol.beta0);
            kv("perimeter", Some(sol.energy.perimeter));
            kv("nonlocal", Some(sol.energy.nonlocal));
            kv("total", Some(sol.energy.total));
            kv("converged", Some(if sol.converged { 1.0 } else { 0.0 }));
            std::fs::write(&path, s)?;
        }
    }
    let profile_path = sibling(&path, "profile.csv");
    let profile = sol.profile.as_ref().expect("solvers attach a profile");
    save_profile(profile, &profile_path)?;

    println!("n = {}", sol.n);
    if let (Some(al), Some(be)) = (sol.alpha0, sol.beta0) {
        println!("alpha0 = {}", g6(al));
        println!("beta0 = {}", g6(be));
    }
    println!("R* = {}", g6(sol.r_star));
    println!("L* = {}", g6(sol.l_star));
    println!(
        "E0 = {} (perimeter {}, nonlocal {})",
        g6(sol.energy.total),
        g6(sol.energy.perimeter),
        g6(sol.energy.nonlocal)
    );
    let pv = &sol.paper_values;
    let mut lit = format!("literature: R* = {}, L* = {}", g6(pv.r_star), g6(pv.l_star));
    if let (Some(al), Some(be)) = (pv.alpha0, pv.beta0) {
        lit.push_str(&format!(", alpha0 = {}, beta0 = {}", g6(al), g6(be)));
    }
    if let Some(r) = pv.antiderivative_alpha0 {
        lit.push_str(&format!(" (closed-form system root alpha0 = {})", g6(r)));
    }
    println!("{lit}");
    println!("profile mass = {}", g6(profile.mass()));
    println!("converged = {}", sol.converged);
    println!("wrote {} and {}", path.display(), profile_path.display());
    if !sol.converged {
        return Err(CliError::Failed("limit solver did not converge".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct EnergyReport<'a> {
    params: &'a ModelParams,
    energy: &'a needle_core::EnergyBreakdown,
}

fn energy(a: EnergyArgs, config: Config) -> CliResult<()> {
    let c = check_config(&apply(config, &a.quad))?;
    let n = a.dim as usize;
    let shape = match (&a.profile, &a.shape) {
        (Some(p), None) => profile_to_shape(&load_profile(p)?, n)?,
        (None, Some(s)) => load_shape(s)?,
        _ => return Err(CliError::Usage("give exactly one of --profile and --shape".into())),
    };
    let params = match (a.mu, a.eps, a.gamma) {
        (Some(mu), None, None) => scales_from_mu(n, mu, c.gamma_convention)?,
        (None, Some(eps), Some(g)) => params_raw(n, eps, g)?,
        (None, Some(eps), None) if eps == 1.0 => params_raw(n, 1.0, 1.0)?,
        (None, Some(eps), None) => params_from_eps(n, eps, c.gamma_convention)?,
        _ => return Err(CliError::Usage("give exactly one of --mu and --eps".into())),
    };
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), g6);
    eprintln!(
        "n={} mu={} R={} L={} eps={} gamma={} convention={}",
        n,
        opt(params.mu),
        opt(params.r_mu),
        opt(params.l_mu),
        g6(params.eps),
        g6(params.gamma),
        params.gamma_convention
    );
    let e = energy_eps_with(&shape, &params, &c.quad)?;
    let s = serde_json::to_string_pretty(&EnergyReport { params: &params, energy: &e }).expect("plain data");
    println!("{s}");
    Ok(())
}

fn default_profile(n: usize) -> CliResult<Profile1D> {
    Ok(match n {
        2 => solve_2d(1024)?.profile.expect("solve_2d attaches a profile"),
        _ => profile_from_solution_padded(&solve_3d(1e-10)?, 1024, 512)?,
    })
}

fn gamma_sweep(a: GammaSweepArgs, config: Config) -> CliResult<()> {
    let c = check_config(&apply(config, &a.quad))?;
    let n = a.dim as usize;
    let p = match &a.profile {
        Some(path) => load_profile(path)?,
        None => default_profile(n)?,
    };
    let eps = a.eps.clone().unwrap_or_else(|| match n {
        2 => vec![0.2, 0.1, 0.05, 0.025],
        _ => vec![1e-1, 1e-2, 1e-3],
    });
    let opts = SpectralOptions { pad_factor: c.pad_factor, check_padding: true };
    let rows = gamma_sweep_with(&p, n, &eps, c.gamma_convention, &c.quad, opts, c.pos_threshold)?;
    let path = artifact_path(a.out.as_deref(), "gamma-sweep", a.dim, "csv");
    write_table(
        &path,
        &["eps", "P", "N", "E", "E0", "gap"],
        rows.iter().map(|r| vec![r.eps, r.p_eps, r.n_eps, r.e_eps, r.e0, r.gap]),
    )?;
    println!("{:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "eps", "P", "N", "E", "E0", "gap");
    for r in &rows {
        println!(
            "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            g6(r.eps),
            g6(r.p_eps),
            g6(r.n_eps),
            g6(r.e_eps),
            g6(r.e0),
            g6(r.gap)
        );
    }
    let strict = rows.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs());
    println!("|gap| strictly decreasing: {strict}");
    println!("wrote {}", path.display());
    Ok(())
}

fn scaling_sweep(a: ScalingSweepArgs, config: Config) -> CliResult<()> {
    let c = check_config(&apply(config, &a.quad))?;
    let rows = scaling_sweep_with(a.dim as usize, &a.mu, c.gamma_convention, &c.quad)?;
    let path = artifact_path(a.out.as_deref(), "scaling-sweep", a.dim, "csv");
    write_table(&path, &["mu", "eps", "E"], rows.iter().map(|r| vec![r.mu, r.eps, r.e_eps]))?;
    println!("{:>12} {:>12} {:>12}", "mu", "eps", "E");
    for r in &rows {
        println!("{:>12} {:>12} {:>12}", g6(r.mu), g6(r.eps), g6(r.e_eps));
    }
    let max = rows.iter().map(|r| r.e_eps).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.e_eps).fold(f64::INFINITY, f64::min);
    println!("configuration mass = {}", g6(rows[0].mass));
    println!("max/min = {}", g6(max / min));
    println!("wrote {}", path.display());
    Ok(())
}

fn minimize(a: MinimizeArgs) -> CliResult<()> {
    let n = a.dim as usize;
    let init = match a.init.as_str() {
        "flat" => flat_init(a.grid)?,
        "gaussian" => gaussian_init(a.grid)?,
        path => load_profile(path)?,
    };
    let opts = MinimizeOptions { iters: a.iters, step: a.step, rearrange_every: a.rearrange_every };
    let r = minimize_e0(n, &init, opts)?;
    let path = artifact_path(a.out.as_deref(), "minimize", a.dim, "csv");
    save_profile(&r.profile, &path)?;
    let trace_path = sibling(&path, "trace.csv");
    write_table(
        &trace_path,
        &["iter", "energy"],
        r.trace.iter().enumerate().map(|(i, e)| vec![i as f64, *e]),
    )?;
    println!(
        "E0 = {} (perimeter {}, nonlocal {})",
        g6(r.energy.total),
        g6(r.energy.perimeter),
        g6(r.energy.nonlocal)
    );
    let reference = match n {
        2 => semicircle_energy((2.0 * PI).powf(-1.0 / 3.0)),
        _ => e0_3(&profile_from_solution(&solve_3d(1e-10)?, 2048)?).total,
    };
    println!("reference = {} (relative difference {})", g6(reference), g6(r.energy.total / reference - 1.0));
    println!("iterations = {}, converged = {}", r.iterations, r.converged);
    println!("wrote {} and {}", path.display(), trace_path.display());
    Ok(())
}

fn hilbert(a: HilbertArgs) -> CliResult<()> {
    let p = match &a.profile {
        Some(path) => load_profile(path)?,
        None => Profile1D::from_cells(-1.6, 1.6, a.grid, |t| 2.0 / PI * (1.0 - t * t).max(0.0).sqrt())?,
    };
    let h = hilbert_derivative(&p);
    let s = hilbert_stationarity_2d(&p);
    let path = artifact_path(a.out.as_deref(), "hilbert", 2, "csv");
    write_table(&path, &["x", "H"], h.values.iter().enumerate().map(|(i, v)| vec![h.x(i), *v]))?;
    println!("{}", serde_json::to_string_pretty(&s).expect("plain data"));
    eprintln!("wrote {}", path.display());
    Ok(())
}
