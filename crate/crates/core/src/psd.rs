//! N0, the smallest `v0` making the Hankel form PSD, by multistart ascent of
//! the normalized negative remainder.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::eta;
use crate::error::{HankelError, Result};
use crate::hankel::{assemble, GeneratingVector, SlicePoint, Vec4};

/// Bound on `|x2|, |x3|` during ascent.
pub const COORD_CAP: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub grad_tol: f64,
    pub max_iters_per_start: usize,
    pub grid_resolution: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            n_starts: 200,
            seed: 0,
            grad_tol: 1e-10,
            max_iters_per_start: 5000,
            grid_resolution: 60,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_starts < 1 {
            return Err(HankelError::InvalidInput("n_starts must be >= 1".into()));
        }
        if self.grid_resolution < 8 {
            return Err(HankelError::InvalidInput("grid_resolution must be >= 8".into()));
        }
        if !(self.grad_tol > 0.0) {
            return Err(HankelError::InvalidInput("grad_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub witness: Vec4,
    pub starts_used: usize,
    pub converged: bool,
}

/// `h(phi, x2, x3) = -r(y) / (y1^4 + y4^4)` with `y = (cos phi, x2, x3, sin phi)`.
struct Remainder {
    v: GeneratingVector,
}

impl Remainder {
    fn point(z: &[f64; 3]) -> Vec4 {
        Vec4::new(z[0].cos(), z[1], z[2], z[0].sin())
    }

    fn value(&self, z: &[f64; 3]) -> f64 {
        let (c, s) = (z[0].cos(), z[0].sin());
        let d = c.powi(4) + s.powi(4);
        -self.v.evaluate(&Self::point(z)) / d
    }

    fn value_grad(&self, z: &[f64; 3]) -> (f64, [f64; 3]) {
        let (c, s) = (z[0].cos(), z[0].sin());
        let y = Self::point(z);
        let d = c.powi(4) + s.powi(4);
        let dd = 4.0 * (s.powi(3) * c - c.powi(3) * s);
        let f = self.v.evaluate(&y);
        let g = self.v.gradient(&y).0;
        let df_phi = -s * g[0] + c * g[3];
        let h = -f / d;
        let grad = [(-df_phi * d + f * dd) / (d * d), -g[1] / d, -g[2] / d];
        (h, grad)
    }

    /// Normalize to `x1^4 + x4^4 = 1`.
    fn witness(z: &[f64; 3]) -> Vec4 {
        let y = Self::point(z);
        let n = (y.0[0].powi(4) + y.0[3].powi(4)).powf(0.25);
        y.scale(1.0 / n)
    }
}

struct Ascent {
    z: [f64; 3],
    value: f64,
    converged: bool,
}

fn norm3(a: &[f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// BFGS on `-h` with Armijo backtracking.
fn ascend(r: &Remainder, start: [f64; 3], opts: &SearchOptions) -> Ascent {
    let mut z = start;
    let (mut h, mut g) = r.value_grad(&z);
    let mut hinv = [[0.0f64; 3]; 3];
    let g0 = norm3(&g).max(1.0);
    for (i, row) in hinv.iter_mut().enumerate() {
        row[i] = 1.0 / g0;
    }
    for _ in 0..opts.max_iters_per_start {
        if !h.is_finite() {
            break;
        }
        if norm3(&g) <= opts.grad_tol * h.abs().max(1.0) {
            return Ascent { z, value: h, converged: true };
        }
        // ascent direction p = Hinv g
        let mut p = [0.0; 3];
        for i in 0..3 {
            p[i] = (0..3).map(|j| hinv[i][j] * g[j]).sum();
        }
        let mut slope = dot3(&p, &g);
        if slope <= 0.0 {
            hinv = [[0.0; 3]; 3];
            for (i, row) in hinv.iter_mut().enumerate() {
                row[i] = 1.0 / norm3(&g).max(1.0);
            }
            p = g.map(|x| x / norm3(&g).max(1.0));
            slope = dot3(&p, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let zn = [z[0] + step * p[0], z[1] + step * p[1], z[2] + step * p[2]];
            let hn = r.value(&zn);
            if hn.is_finite() && hn >= h + 1e-4 * step * slope {
                accepted = Some(zn);
                break;
            }
            step *= 0.5;
        }
        let Some(zn) = accepted else {
            // no further progress at working precision
            let stalled = norm3(&g) <= 1e-6 * h.abs().max(1.0);
            return Ascent { z, value: h, converged: stalled };
        };
        if zn[1].abs() > COORD_CAP || zn[2].abs() > COORD_CAP {
            return Ascent { z, value: h, converged: false };
        }
        let (hn, gn) = r.value_grad(&zn);
        let s = [zn[0] - z[0], zn[1] - z[1], zn[2] - z[2]];
        // minimizing -h: y = -(gn - g)
        let y = [g[0] - gn[0], g[1] - gn[1], g[2] - gn[2]];
        let sy = dot3(&s, &y);
        if sy > 1e-300 {
            let mut hy = [0.0; 3];
            for i in 0..3 {
                hy[i] = (0..3).map(|j| hinv[i][j] * y[j]).sum();
            }
            let yhy = dot3(&y, &hy);
            for i in 0..3 {
                for j in 0..3 {
                    hinv[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        z = zn;
        h = hn;
        g = gn;
    }
    let converged = norm3(&g) <= opts.grad_tol * h.abs().max(1.0);
    Ascent { z, value: h, converged }
}

/// Best point of a coarse `(phi, x2, x3)` grid, with `x2, x3` sinh-spaced out to 100.
fn grid_seed(r: &Remainder, res: usize) -> [f64; 3] {
    let span = 100f64.asinh();
    let radial: Vec<f64> = (0..res)
        .map(|k| (span * (2.0 * k as f64 / (res - 1) as f64 - 1.0)).sinh())
        .collect();
    let mut best = ([0.0; 3], f64::NEG_INFINITY);
    for a in 0..res {
        let phi = PI * a as f64 / res as f64;
        for &x2 in &radial {
            for &x3 in &radial {
                let z = [phi, x2, x3];
                let h = r.value(&z);
                if h > best.1 {
                    best = (z, h);
                }
            }
        }
    }
    best.0
}

fn random_starts(opts: &SearchOptions) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scales = [0.5, 1.0, 2.0, 4.0];
    (0..opts.n_starts)
        .map(|k| {
            let phi = rng.random_range(0.0..2.0 * PI);
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let s = scales[k % scales.len()];
            [phi, s * a, s * b]
        })
        .collect()
}

/// `sup { -r(x) : x1^4 + x4^4 = 1 }` with `r` the form at `v0 = 0`.
///
/// Start 0 is the best grid point; the remaining `n_starts` are random.
pub fn n0(p: &SlicePoint, opts: &SearchOptions) -> Result<BoundResult> {
    opts.validate()?;
    let e = eta(p.v5, p.v6);
    if !(e < 1.0) {
        return Err(HankelError::OutsideEffectiveDomain { eta: e });
    }
    let r = Remainder { v: assemble(p, 0.0) };
    let mut starts = vec![grid_seed(&r, opts.grid_resolution)];
    starts.extend(random_starts(opts));
    let runs: Vec<Ascent> = starts.par_iter().map(|s| ascend(&r, *s, opts)).collect();
    let mut best: Option<&Ascent> = None;
    for a in &runs {
        if a.value.is_finite() && best.is_none_or(|b| a.value > b.value) {
            best = Some(a);
        }
    }
    if !runs.iter().any(|a| a.converged) {
        return Err(HankelError::NonConvergence(format!(
            "no ascent start converged at P = ({p})"
        )));
    }
    let best = best.expect("a converged start has a finite value");
    Ok(BoundResult {
        value: best.value,
        witness: Remainder::witness(&best.z),
        starts_used: runs.len(),
        converged: best.converged,
    })
}

struct Descent {
    x: Vec4,
    value: f64,
    converged: bool,
}

/// Projected gradient descent on the unit sphere with an adaptive step.
fn descend(v: &GeneratingVector, start: Vec4, opts: &SearchOptions) -> Descent {
    let mut x = start.normalized();
    let mut f = v.evaluate(&x);
    let mut step = 1.0 / (1.0 + v.as_array().iter().fold(0.0f64, |a, c| a.max(c.abs())));
    for _ in 0..opts.max_iters_per_start {
        let g = v.gradient(&x);
        let pg = g.sub(&x.scale(g.dot(&x)));
        let pn2 = pg.dot(&pg);
        if pn2.sqrt() <= opts.grad_tol * f.abs().max(1.0) {
            return Descent { x, value: f, converged: true };
        }
        step *= 2.0;
        let mut moved = false;
        while step > 1e-300 {
            let xn = x.sub(&pg.scale(step)).normalized();
            let fnew = v.evaluate(&xn);
            if fnew <= f - 1e-4 * step * pn2 {
                x = xn;
                f = fnew;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            return Descent { x, value: f, converged: true };
        }
    }
    Descent { x, value: f, converged: false }
}

/// Approximate global minimum of the Hankel form over the unit sphere.
pub fn minimize_on_sphere(v: &GeneratingVector, opts: &SearchOptions) -> Result<BoundResult> {
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec4> = (0..opts.n_starts)
        .map(|_| {
            let mut c = [0.0; 4];
            for x in c.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            Vec4(c)
        })
        .collect();
    let runs: Vec<Descent> = starts.par_iter().map(|s| descend(v, *s, opts)).collect();
    if !runs.iter().any(|d| d.converged) {
        return Err(HankelError::NonConvergence("no sphere descent converged".into()));
    }
    let mut best = &runs[0];
    for d in &runs[1..] {
        if d.value < best.value {
            best = d;
        }
    }
    Ok(BoundResult {
        value: best.value,
        witness: best.x,
        starts_used: runs.len(),
        converged: best.converged,
    })
}

/// Minimum over a hyperspherical product grid with `resolution` samples per
/// angle, then polished by one descent from the best grid point.
pub fn grid_oracle_min(v: &GeneratingVector, resolution: usize) -> f64 {
    let res = resolution.max(8);
    let lin = |k: usize| PI * k as f64 / (res - 1) as f64;
    let mut best = (Vec4::basis(0), f64::INFINITY);
    for i in 0..res {
        let a = lin(i);
        for j in 0..res {
            let b = lin(j);
            for k in 0..res {
                let c = 2.0 * PI * k as f64 / res as f64;
                let x = Vec4::new(
                    a.cos(),
                    a.sin() * b.cos(),
                    a.sin() * b.sin() * c.cos(),
                    a.sin() * b.sin() * c.sin(),
                );
                let f = v.evaluate(&x);
                if f < best.1 {
                    best = (x, f);
                }
            }
        }
    }
    let opts = SearchOptions::default();
    let polished = descend(v, best.0, &opts);
    best.1.min(polished.value)
}
