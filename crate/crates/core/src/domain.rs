//! Sampled profiles, axisymmetric shapes, model parameters and their CSV forms.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transversal measure of the unit (m)-sphere's cross-section: ω₁ = 2, ω₂ = π.
pub fn cross_section_constant(n: usize) -> Result<f64> {
    match n {
        2 => Ok(2.0),
        3 => Ok(std::f64::consts::PI),
        _ => Err(Error::Domain(format!("unsupported dimension n = {n}, expected 2 or 3"))),
    }
}

fn check_grid(dx: f64, len: usize) -> Result<()> {
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::Grid(format!("grid step must be finite and positive, got {dx}")));
    }
    if len == 0 {
        return Err(Error::Grid("grid has no samples".into()));
    }
    Ok(())
}

fn check_values(values: &[f64], what: &str) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Domain(format!("{what}[{i}] is not finite")));
        }
        if v < 0.0 {
            return Err(Error::Domain(format!("{what}[{i}] = {v} is negative")));
        }
    }
    Ok(())
}

/// Nonnegative cross-section area A(x₁) on a uniform grid `x_i = x_min + i·dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    x_min: f64,
    dx: f64,
    values: Vec<f64>,
}

impl Profile1D {
    pub fn new(x_min: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        check_grid(dx, values.len())?;
        if !x_min.is_finite() {
            return Err(Error::Grid("x_min is not finite".into()));
        }
        check_values(&values, "A")?;
        Ok(Self { x_min, dx, values })
    }

    /// Samples `f` at the centers of `n` equal cells covering `[a, b]`.
    pub fn from_cells(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(b > a) || n == 0 {
            return Err(Error::Grid(format!("bad cell grid [{a}, {b}] with {n} cells")));
        }
        let dx = (b - a) / n as f64;
        let values = (0..n).map(|i| f(a + (i as f64 + 0.5) * dx).max(0.0)).collect();
        Self::new(a + 0.5 * dx, dx, values)
    }

    pub fn zeros_like(&self) -> Self {
        Self { x_min: self.x_min, dx: self.dx, values: vec![0.0; self.values.len()] }
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Grid("value count does not match the grid".into()));
        }
        Self::new(self.x_min, self.dx, values)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }
    pub fn x_max(&self) -> f64 {
        self.x(self.values.len() - 1)
    }
    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Rectangle-rule mass dx·Σ A_i.
    pub fn mass(&self) -> f64 {
        self.dx * self.values.iter().sum::<f64>()
    }

    /// First and last index with A_i > threshold.
    pub fn support_indices(&self, threshold: f64) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|&v| v > threshold)?;
        let last = self.values.iter().rposition(|&v| v > threshold)?;
        Some((first, last))
    }

    /// Mass centroid, `None` for zero mass.
    pub fn centroid(&self) -> Option<f64> {
        let m: f64 = self.values.iter().sum();
        if m <= 0.0 {
            return None;
        }
        let s: f64 = self.values.iter().enumerate().map(|(i, v)| self.x(i) * v).sum();
        Some(s / m)
    }

    /// Profile translated by `shift` (grid moves, values stay).
    pub fn translated(&self, shift: f64) -> Self {
        Self { x_min: self.x_min + shift, dx: self.dx, values: self.values.clone() }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|v| v * factor).collect())
    }

    /// Linear interpolation, zero outside the sampled range.
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.x_min) / self.dx;
        if u < 0.0 || u > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(self.values.len().saturating_sub(2));
        if self.values.len() == 1 {
            return self.values[0];
        }
        let w = u - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }
}

/// Signed samples on a uniform grid (transform inputs and outputs such as A' or H(A')).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal1D {
    pub x_min: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl Signal1D {
    pub fn new(x_min: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        check_grid(dx, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("sample {i} is not finite")));
        }
        Ok(Self { x_min, dx, values })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<&Profile1D> for Signal1D {
    fn from(p: &Profile1D) -> Self {
        Self { x_min: p.x_min(), dx: p.dx(), values: p.values().to_vec() }
    }
}

/// Radius ρ(x₁) of the axisymmetric configuration u = χ_{(0,ρ(x₁))}(|x'|).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisymShape {
    x_min: f64,
    dx: f64,
    rho: Vec<f64>,
}

impl AxisymShape {
    pub fn new(x_min: f64, dx: f64, rho: Vec<f64>) -> Result<Self> {
        check_grid(dx, rho.len())?;
        if !x_min.is_finite() {
            return Err(Error::Grid("x_min is not finite".into()));
        }
        check_values(&rho, "rho")?;
        Ok(Self { x_min, dx, rho })
    }

    /// Samples `f` at the centers of `n` equal cells covering `[a, b]`.
    pub fn from_cells(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(b > a) || n == 0 {
            return Err(Error::Grid(format!("bad cell grid [{a}, {b}] with {n} cells")));
        }
        let dx = (b - a) / n as f64;
        let rho = (0..n).map(|i| f(a + (i as f64 + 0.5) * dx).max(0.0)).collect();
        Self::new(a + 0.5 * dx, dx, rho)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }
    pub fn len(&self) -> usize {
        self.rho.len()
    }
    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }
    pub fn max_rho(&self) -> f64 {
        self.rho.iter().cloned().fold(0.0, f64::max)
    }
    pub fn translated(&self, shift: f64) -> Self {
        Self { x_min: self.x_min + shift, dx: self.dx, rho: self.rho.clone() }
    }
}

/// Prefactor convention for the nonlocal term when n = 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GammaConvention {
    /// γ₃ = 1/(7|ln ε| − 3 ln ln μ).
    #[default]
    ExactMu,
    /// γ₃ = 1/(7|ln ε|).
    Asymptotic,
}

impl std::str::FromStr for GammaConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_mu" => Ok(Self::ExactMu),
            "asymptotic" => Ok(Self::Asymptotic),
            _ => Err(Error::Format(format!("unknown gamma convention '{s}' (exact_mu|asymptotic)"))),
        }
    }
}

impl std::fmt::Display for GammaConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ExactMu => "exact_mu",
            Self::Asymptotic => "asymptotic",
        })
    }
}

/// Dimension, volume and the derived scales of the rescaled problem.
///
/// `mu`, `r_mu` and `l_mu` are `None` when the parameters were given directly
/// as (ε, γ) without an underlying volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub mu: Option<f64>,
    #[serde(rename = "R_mu")]
    pub r_mu: Option<f64>,
    #[serde(rename = "L_mu")]
    pub l_mu: Option<f64>,
    pub eps: f64,
    pub gamma: f64,
    pub gamma_convention: GammaConvention,
}

/// Quadrature bookkeeping attached to every energy evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadratureMeta {
    pub xi1_max: f64,
    pub r_max: f64,
    pub n_xi1: usize,
    pub n_r: usize,
    pub n_x1: usize,
    /// Certified upper bound on the neglected tail beyond `r_max` (not added to the value).
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub perimeter: f64,
    pub nonlocal: f64,
    pub total: f64,
    pub quadrature_meta: QuadratureMeta,
}

impl EnergyBreakdown {
    pub fn new(perimeter: f64, nonlocal: f64, quadrature_meta: QuadratureMeta) -> Self {
        Self { perimeter, nonlocal, total: perimeter + nonlocal, quadrature_meta }
    }
}

/// Literature values carried alongside a computed limit solution for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PaperValues {
    #[serde(rename = "L_star")]
    pub l_star: f64,
    #[serde(rename = "R_star")]
    pub r_star: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    /// Root of the system assembled from the closed-form antiderivatives (n = 3).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub antiderivative_alpha0: Option<f64>,
}

/// A limit minimizer: its constants, a sampled profile and its energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSolution {
    pub n: usize,
    #[serde(rename = "L_star")]
    pub l_star: f64,
    #[serde(rename = "R_star")]
    pub r_star: f64,
    pub alpha0: Option<f64>,
    pub beta0: Option<f64>,
    #[serde(skip)]
    pub profile: Option<Profile1D>,
    pub energy: EnergyBreakdown,
    pub paper_values: PaperValues,
    pub converged: bool,
}

/// Rectangle-rule mass of a profile.
pub fn profile_mass(p: &Profile1D) -> f64 {
    p.mass()
}

/// A_i = ω_{n−1} ρ_i^{n−1}.
pub fn shape_to_profile(s: &AxisymShape, n: usize) -> Result<Profile1D> {
    let w = cross_section_constant(n)?;
    let values = s.rho().iter().map(|&r| w * r.powi(n as i32 - 1)).collect();
    Profile1D::new(s.x_min(), s.dx(), values)
}

/// ρ_i = (A_i/ω_{n−1})^{1/(n−1)}.
pub fn profile_to_shape(p: &Profile1D, n: usize) -> Result<AxisymShape> {
    let w = cross_section_constant(n)?;
    let rho = p
        .values()
        .iter()
        .map(|&a| if n == 2 { a / w } else { (a / w).sqrt() })
        .collect();
    AxisymShape::new(p.x_min(), p.dx(), rho)
}

/// Linear interpolation onto `new_n` uniform points spanning the same interval.
pub fn resample(p: &Profile1D, new_n: usize) -> Result<Profile1D> {
    if new_n < 2 {
        return Err(Error::Domain(format!("resample needs new_n >= 2, got {new_n}")));
    }
    if p.len() < 2 {
        return Err(Error::Grid("cannot resample a single-point profile".into()));
    }
    let span = p.x_max() - p.x_min();
    let dx = span / (new_n - 1) as f64;
    let values = (0..new_n)
        .map(|j| {
            // index-space interpolation keeps the endpoints exact
            let u = j as f64 * (p.len() - 1) as f64 / (new_n - 1) as f64;
            let i = (u.floor() as usize).min(p.len() - 2);
            let w = u - i as f64;
            ((1.0 - w) * p.values()[i] + w * p.values()[i + 1]).max(0.0)
        })
        .collect();
    Profile1D::new(p.x_min(), dx, values)
}

fn read_two_columns(path: &Path, second: &str) -> Result<(f64, f64, Vec<f64>)> {
    let file = File::open(path)
        .map_err(|e| Error::Format(format!("cannot open {}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != second {
        return Err(Error::Format(format!(
            "{}: expected header 'x,{second}', found '{}'",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| Error::Format(format!("row {}: missing column", line + 2)))?
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("row {}: {e}", line + 2)))
        };
        xs.push(parse(0)?);
        vs.push(parse(1)?);
    }
    if xs.len() < 2 {
        return Err(Error::Grid(format!("{}: need at least two samples", path.display())));
    }
    for w in xs.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Grid(format!("x not strictly increasing at x = {}", w[1])));
        }
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let jitter = xs.windows(2).map(|w| ((w[1] - w[0]) - dx).abs()).fold(0.0, f64::max);
    if jitter >= 1e-9 * dx {
        return Err(Error::Grid(format!("nonuniform grid: step jitter {jitter:.3e} with dx {dx:.3e}")));
    }
    Ok((xs[0], dx, vs))
}

fn write_two_columns(path: &Path, second: &str, x_min: f64, dx: f64, vs: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,{second}")?;
    for (i, v) in vs.iter().enumerate() {
        writeln!(w, "{},{}", x_min + i as f64 * dx, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `x,A` CSV file.
pub fn load_profile(path: impl AsRef<Path>) -> Result<Profile1D> {
    let (x0, dx, vs) = read_two_columns(path.as_ref(), "A")?;
    Profile1D::new(x0, dx, vs)
}

pub fn save_profile(p: &Profile1D, path: impl AsRef<Path>) -> Result<()> {
    write_two_columns(path.as_ref(), "A", p.x_min(), p.dx(), p.values())
}

/// Reads a `x,rho` CSV file.
pub fn load_shape(path: impl AsRef<Path>) -> Result<AxisymShape> {
    let (x0, dx, vs) = read_two_columns(path.as_ref(), "rho")?;
    AxisymShape::new(x0, dx, vs)
}

pub fn save_shape(s: &AxisymShape, path: impl AsRef<Path>) -> Result<()> {
    write_two_columns(path.as_ref(), "rho", s.x_min(), s.dx(), s.rho())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn semicircle(n: usize) -> Profile1D {
        Profile1D::from_cells(-1.0, 1.0, n, |t| 2.0 / PI * (1.0 - t * t).max(0.0).sqrt()).unwrap()
    }

    #[test]
    fn load_parses_simple_file() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("p.csv");
        std::fs::write(&f, "x,A\n0,0\n0.5,1\n1,0\n").unwrap();
        let p = load_profile(&f).unwrap();
        assert_eq!(p.x_min(), 0.0);
        assert_eq!(p.dx(), 0.5);
        assert_eq!(p.values(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("p.csv");
        std::fs::write(&f, "x,A\n0,0\n0.4,1\n1,0\n").unwrap();
        assert!(matches!(load_profile(&f), Err(Error::Grid(_))));
        std::fs::write(&f, "x,A\n0,-0.1\n0.5,1\n").unwrap();
        assert!(matches!(load_profile(&f), Err(Error::Domain(_))));
        std::fs::write(&f, "x,A\n0,zz\n0.5,1\n").unwrap();
        assert!(matches!(load_profile(&f), Err(Error::Format(_))));
        std::fs::write(&f, "x,B\n0,0\n0.5,1\n").unwrap();
        assert!(matches!(load_profile(&f), Err(Error::Format(_))));
        assert!(matches!(load_profile(dir.path().join("missing.csv")), Err(Error::Format(_))));
    }

    #[test]
    fn resample_examples() {
        let c = Profile1D::new(0.0, 0.1, vec![2.5; 11]).unwrap();
        for n in [2, 7, 40] {
            assert!(resample(&c, n).unwrap().values().iter().all(|&v| (v - 2.5).abs() < 1e-15));
        }
        let tent = Profile1D::new(0.0, 0.5, vec![0.0, 1.0, 0.0]).unwrap();
        let t5 = resample(&tent, 5).unwrap();
        assert_eq!(t5.values(), &[0.0, 0.5, 1.0, 0.5, 0.0]);
        assert!(matches!(resample(&tent, 1), Err(Error::Domain(_))));

        let s = Profile1D::from_cells(-1.5, 1.5, 256, |t| 2.0 / PI * (1.0 - t * t).max(0.0).sqrt())
            .unwrap();
        let s2 = resample(&s, 512).unwrap();
        assert!((s.mass() - s2.mass()).abs() < 1e-4, "{} {}", s.mass(), s2.mass());
    }

    #[test]
    fn mass_examples() {
        let box1 = Profile1D::new(0.0, 0.01, vec![1.0; 101]).unwrap();
        assert!((box1.mass() - 1.0).abs() <= 0.01 + 1e-12);
        assert_eq!(box1.zeros_like().mass(), 0.0);
        assert!((semicircle(4096).mass() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn shape_profile_examples() {
        let s = AxisymShape::new(0.0, 0.1, vec![0.7; 5]).unwrap();
        let p3 = shape_to_profile(&s, 3).unwrap();
        assert!(p3.values().iter().all(|&a| (a - PI * 0.49).abs() < 1e-15));
        let p2 = shape_to_profile(&s, 2).unwrap();
        assert!(p2.values().iter().all(|&a| (a - 1.4).abs() < 1e-15));
        let ball = AxisymShape::from_cells(-1.0, 1.0, 64, |x| (1.0 - x * x).sqrt()).unwrap();
        let pb = shape_to_profile(&ball, 3).unwrap();
        for i in 0..pb.len() {
            let x = pb.x(i);
            assert!((pb.values()[i] - PI * (1.0 - x * x)).abs() < 1e-14);
        }
        assert!(matches!(shape_to_profile(&s, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("p.csv");
        let p = Profile1D::from_cells(-1.3, 2.1, 333, |x| (x * 3.1).sin().abs() / 7.0).unwrap();
        save_profile(&p, &f).unwrap();
        let q = load_profile(&f).unwrap();
        assert_eq!(p.values(), q.values());
        assert!((p.x_min() - q.x_min()).abs() < 1e-12 && (p.dx() - q.dx()).abs() < 1e-12);
        let s = profile_to_shape(&p, 3).unwrap();
        save_shape(&s, &f).unwrap();
        assert_eq!(load_shape(&f).unwrap().rho(), s.rho());
    }

    #[test]
    fn mass_resample_convergence_is_second_order() {
        let p = Profile1D::from_cells(-2.0, 2.0, 101, |x| (-x * x).exp()).unwrap();
        let m = p.mass();
        let d2 = (resample(&p, 201).unwrap().mass() - m).abs();
        let d4 = (resample(&p, 401).unwrap().mass() - m).abs();
        assert!(d2 < 4.0 * d4 + 1e-15 || d2 < 1e-12);
    }

    #[test]
    fn eval_interpolates() {
        let tent = Profile1D::new(0.0, 0.5, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(tent.eval(0.25), 0.5);
        assert_eq!(tent.eval(-1.0), 0.0);
        assert_eq!(tent.eval(0.5), 1.0);
    }
}
