use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{EnergyBreakdown, Profile1D};
use crate::error::{Error, Result};
use crate::limit_energy::{self, symmetric_decreasing_rearrangement};
use crate::spectral::{self, Plan, SpectralOptions};

/// Padding of the spectral operators inside the descent. The padding check is off: the
/// support moves are bounded by the grid instead.
const OPTS: SpectralOptions = SpectralOptions { pad_factor: spectral::DEFAULT_PAD_FACTOR, check_padding: false };
const ARMIJO: f64 = 1e-6;
const MAX_HALVINGS: usize = 40;
const REL_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Budget of descent steps, trial steps of support moves included.
    pub iters: usize,
    /// Initial step length of the line search.
    pub step: f64,
    pub rearrange_every: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { iters: 2000, step: 1.0, rearrange_every: 25 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub profile: Profile1D,
    pub energy: EnergyBreakdown,
    /// Energy after every accepted update, starting with the symmetrized initializer.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Constant on the central half of [−1.5, 1.5], unit mass.
pub fn flat_init(grid_n: usize) -> Result<Profile1D> {
    normalized(Profile1D::from_cells(-1.5, 1.5, grid_n, |x| if x.abs() < 0.75 { 1.0 } else { 0.0 })?)
}

/// e^{−x²/(2·0.25²)} cut off at |x| = 0.75 on [−1.5, 1.5], unit mass.
pub fn gaussian_init(grid_n: usize) -> Result<Profile1D> {
    normalized(Profile1D::from_cells(-1.5, 1.5, grid_n, |x| {
        if x.abs() < 0.75 { (-x * x / 0.125).exp() } else { 0.0 }
    })?)
}

fn normalized(p: Profile1D) -> Result<Profile1D> {
    let m = p.mass();
    if !(m > 0.0) {
        return Err(Error::Grid("initializer has no mass on this grid".into()));
    }
    p.scaled(1.0 / m)
}

/// Discretized E₀ with its gradient and preconditioner on one fixed grid.
struct Functional {
    n: usize,
    dx: f64,
    len: usize,
    plan: Plan,
    /// |ξ| for n = 2, the symbol of the zero-extension difference Laplacian for n = 3
    symbol: Vec<f64>,
    shift: f64,
}

impl Functional {
    fn new(n: usize, dx: f64, len: usize) -> Self {
        let m = spectral::padded_len(len, OPTS.pad_factor);
        let symbol = (0..m)
            .map(|k| {
                let xi = spectral::bin_frequency(k, m, dx);
                if n == 2 { xi.abs() } else { (2.0 - 2.0 * (xi * dx).cos()) / (dx * dx) / (7.0 * PI) }
            })
            .collect();
        // preconditioner (shift + symbol)^{-1}; the shift is the inverse length scale of
        // the initial data, about 1
        Self { n, dx, len, plan: Plan::new(m), symbol, shift: 1.0 }
    }

    fn multiply(&self, v: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut buf = self.plan.forward_real(v);
        // the symbols are even, so the Nyquist bin needs no averaging
        for (c, s) in buf.iter_mut().zip(&self.symbol) {
            *c *= Complex64::new(f(*s), 0.0);
        }
        self.plan.inverse(&mut buf);
        buf[..self.len].iter().map(|c| c.re).collect()
    }

    fn energy(&self, a: &[f64]) -> f64 {
        match self.n {
            2 => {
                let count = a.iter().filter(|&&v| v > 0.0).count();
                let f = self.plan.forward_real(a);
                let s: f64 = f.iter().zip(&self.symbol).map(|(c, xi)| xi * c.norm_sqr()).sum();
                2.0 * self.dx * count as f64 + 0.5 * s * self.dx / f.len() as f64
            }
            _ => {
                let root: f64 = a.iter().map(|v| v.sqrt()).sum::<f64>() * self.dx;
                2.0 * PI.sqrt() * root + limit_energy::dirichlet_sum(a) / self.dx / (14.0 * PI)
            }
        }
    }

    /// Gradient of the smooth part divided by dx, i.e. the discrete first variation.
    fn gradient(&self, a: &[f64]) -> Vec<f64> {
        match self.n {
            2 => self.multiply(a, |s| s),
            _ => {
                let floor = 1e-8 * a.iter().cloned().fold(0.0, f64::max);
                let n = a.len();
                let c = 1.0 / (7.0 * PI * self.dx * self.dx);
                (0..n)
                    .map(|i| {
                        let l = if i > 0 { a[i - 1] } else { 0.0 };
                        let r = if i + 1 < n { a[i + 1] } else { 0.0 };
                        PI.sqrt() / a[i].max(floor).sqrt() + c * (2.0 * a[i] - l - r)
                    })
                    .collect()
            }
        }
    }

    fn precondition(&self, g: &[f64]) -> Vec<f64> {
        let shift = self.shift;
        self.multiply(g, |s| 1.0 / (shift + s))
    }
}

/// Contiguous index range [lo, hi] the iterate is allowed to occupy.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Window {
    lo: usize,
    hi: usize,
}

impl Window {
    fn contains(&self, i: usize) -> bool {
        (self.lo..=self.hi).contains(&i)
    }
    fn width(&self) -> usize {
        self.hi - self.lo + 1
    }
}

fn mirror_average(v: &mut [f64]) {
    let n = v.len();
    for i in 0..n / 2 {
        let m = 0.5 * (v[i] + v[n - 1 - i]);
        v[i] = m;
        v[n - 1 - i] = m;
    }
}

fn renormalize(a: &mut [f64], dx: f64) -> bool {
    let m: f64 = a.iter().sum::<f64>() * dx;
    if !(m > 0.0) {
        return false;
    }
    for v in a.iter_mut() {
        *v /= m;
    }
    true
}

struct State {
    a: Vec<f64>,
    e: f64,
    t: f64,
}

enum Step {
    Accepted,
    Stalled,
}

impl Functional {
    /// One projected descent step inside `w` with Armijo backtracking.
    fn step(&self, s: &mut State, w: Window) -> Step {
        let mut g = self.gradient(&s.a);
        for (i, v) in g.iter_mut().enumerate() {
            if !w.contains(i) {
                *v = 0.0;
            }
        }
        mirror_average(&mut g);
        let mut pre = self.precondition(&g);
        mirror_average(&mut pre);
        let ones: Vec<f64> = (0..self.len).map(|i| if w.contains(i) { 1.0 } else { 0.0 }).collect();
        let mut u = self.precondition(&ones);
        mirror_average(&mut u);

        for dir in [self.tangent(&s.a, &pre, &u, w), self.tangent(&s.a, &g, &ones, w)].into_iter().flatten() {
            let slope: f64 = g.iter().zip(&dir).map(|(x, y)| x * y).sum::<f64>() * self.dx;
            if !(slope > 0.0) {
                continue;
            }
            let mut t = s.t;
            for _ in 0..MAX_HALVINGS {
                let mut cand: Vec<f64> = s.a.iter().zip(&dir).map(|(a, d)| (a - t * d).max(0.0)).collect();
                if renormalize(&mut cand, self.dx) {
                    mirror_average(&mut cand);
                    let ec = self.energy(&cand);
                    if ec <= s.e - ARMIJO * t * slope {
                        s.a = cand;
                        s.e = ec;
                        s.t = (2.0 * t).min(1e6);
                        return Step::Accepted;
                    }
                }
                t *= 0.5;
            }
        }
        Step::Stalled
    }

    /// d − λu on the free cells of `w`, with λ making the mass change vanish.
    fn tangent(&self, a: &[f64], d: &[f64], u: &[f64], w: Window) -> Option<Vec<f64>> {
        let free = |i: usize| w.contains(i) && (a[i] > 0.0 || d[i] < 0.0);
        let (mut sd, mut su) = (0.0, 0.0);
        for i in 0..self.len {
            if free(i) {
                sd += d[i];
                su += u[i];
            }
        }
        if su.abs() < f64::MIN_POSITIVE {
            return None;
        }
        let lambda = sd / su;
        Some((0..self.len).map(|i| if free(i) { d[i] - lambda * u[i] } else { 0.0 }).collect())
    }

    fn relax(&self, s: &mut State, w: Window, steps: usize, used: &mut usize, trace: Option<&mut Vec<f64>>) -> bool {
        let mut stalled = false;
        let mut local = Vec::new();
        for _ in 0..steps {
            *used += 1;
            match self.step(s, w) {
                Step::Accepted => local.push(s.e),
                Step::Stalled => {
                    stalled = true;
                    break;
                }
            }
        }
        if let Some(tr) = trace {
            tr.extend(local);
        }
        stalled
    }
}

fn support_window(a: &[f64]) -> Option<Window> {
    let lo = a.iter().position(|&v| v > 0.0)?;
    let hi = a.iter().rposition(|&v| v > 0.0)?;
    Some(Window { lo, hi })
}

/// Rearranged copy with exactly equal values at mirrored cells.
fn symmetric_rearranged(p: &Profile1D, a: &[f64]) -> Vec<f64> {
    let q = p.with_values(a.to_vec()).expect("same grid");
    let mut v = symmetric_decreasing_rearrangement(&q).into_values();
    mirror_average(&mut v);
    v
}

/// Projected descent on the discretized E₀⁽ⁿ⁾ under the unit-mass constraint.
///
/// The initializer is first replaced by its symmetric-decreasing rearrangement with mirrored
/// cells averaged; every update preserves this evenness. On a fixed support window the
/// iterate follows preconditioned gradient steps ((c + |D|)^{-1} for n = 2,
/// (c − Δ/7π)^{-1} for n = 3), projected onto the mass-tangent space of the free cells, clamped
/// at 0 and rescaled to unit mass; Armijo backtracking keeps the energy strictly decreasing
/// and falls back to the plain projected gradient. Every `rearrange_every` steps the
/// rearrangement is applied if it does not raise the energy, and the support is shrunk or grown
/// by s cells per side; a move is kept when its trial relaxation beats the current energy,
/// otherwise s is halved. The run has converged once no move of a single cell helps and the last
/// phase lowered the energy by less than 1e−8 relative. A line-search stall before that
/// returns the best iterate with `converged = false`.
pub fn minimize_e0(n: usize, init: &Profile1D, opts: MinimizeOptions) -> Result<MinimizeResult> {
    if n != 2 && n != 3 {
        return Err(Error::Domain(format!("limit energy defined for n = 2, 3 only, got {n}")));
    }
    if opts.iters == 0 || opts.rearrange_every == 0 || !(opts.step > 0.0) {
        return Err(Error::Domain("iters and rearrange_every must be positive, step > 0".into()));
    }
    let mass = init.mass();
    if !((mass - 1.0).abs() < 1e-6) {
        return Err(Error::Domain(format!("initial profile must have unit mass, got {mass}")));
    }
    if init.values().iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::Domain("initial profile must be finite and nonnegative".into()));
    }
    let f = Functional::new(n, init.dx(), init.len());
    let mut a = symmetric_rearranged(init, init.values());
    renormalize(&mut a, f.dx);
    let e = f.energy(&a);
    let mut s = State { a, e, t: opts.step };
    let mut trace = vec![s.e];
    let mut used = 0usize;
    let k = opts.rearrange_every;
    let len = init.len();

    let mut w = support_window(&s.a).ok_or_else(|| Error::Domain("initial profile is zero".into()))?;
    let mut stride = (w.width() / 8).max(1);
    let mut converged = false;
    let mut stalled = false;

    while used < opts.iters {
        let before = s.e;
        stalled |= f.relax(&mut s, w, k.min(opts.iters - used), &mut used, Some(&mut trace));
        let cand = symmetric_rearranged(init, &s.a);
        let ec = f.energy(&cand);
        if ec <= s.e {
            if ec < s.e {
                trace.push(ec);
            }
            s.a = cand;
            s.e = ec;
        }
        if let Some(sw) = support_window(&s.a) {
            w = Window { lo: w.lo.max(sw.lo), hi: w.hi.min(sw.hi) };
        }

        let mut moved = false;
        if stride > 0 {
            let mut best: Option<State> = None;
            for grow in [false, true] {
                let nw = if grow {
                    if w.lo < stride + 1 || w.hi + stride + 1 >= len {
                        continue;
                    }
                    Window { lo: w.lo - stride, hi: w.hi + stride }
                } else {
                    if w.width() <= 2 * stride + 4 {
                        continue;
                    }
                    Window { lo: w.lo + stride, hi: w.hi - stride }
                };
                let mut a = s.a.clone();
                if grow {
                    let (el, er) = (s.a[w.lo], s.a[w.hi]);
                    for i in nw.lo..w.lo {
                        a[i] = el;
                    }
                    for i in w.hi + 1..=nw.hi {
                        a[i] = er;
                    }
                } else {
                    for (i, v) in a.iter_mut().enumerate() {
                        if !nw.contains(i) {
                            *v = 0.0;
                        }
                    }
                }
                if !renormalize(&mut a, f.dx) {
                    continue;
                }
                mirror_average(&mut a);
                let e = f.energy(&a);
                if used >= opts.iters {
                    break;
                }
                let mut trial = State { a, e, t: s.t };
                f.relax(&mut trial, nw, k.min(opts.iters - used), &mut used, None);
                if trial.e < s.e && best.as_ref().map_or(true, |b| trial.e < b.e) {
                    trial.t = trial.t.max(opts.step);
                    best = Some(trial);
                }
            }
            if let Some(b) = best {
                s = b;
                trace.push(s.e);
                w = support_window(&s.a).expect("unit mass");
                moved = true;
            } else {
                stride /= 2;
            }
        }
        let settled = before - s.e <= REL_FLOOR * s.e.abs();
        if !moved && stride == 0 && settled {
            converged = true;
            break;
        }
        if stalled && stride == 0 {
            break;
        }
        stalled = false;
    }

    let mut a = symmetric_rearranged(init, &s.a);
    renormalize(&mut a, f.dx);
    mirror_average(&mut a);
    let mut profile = init.with_values(a)?;
    if let Some(c) = profile.centroid() {
        profile = profile.translated(-c);
    }
    let energy = match n {
        2 => limit_energy::e0_2_with(&profile, 0.0, OPTS)?,
        _ => limit_energy::e0_3(&profile),
    };
    Ok(MinimizeResult { profile, energy, trace, iterations: used, converged })
}
