//! Primal-dual interior point for the SOS margin
//!
//! maximize t  s.t.  G0 + sum_k w_k N_k - t I  is PSD,
//!
//! where `G0` is the least-norm Gram matrix of the form and `N_k` span the
//! null space of the coefficient map. The form is SOS iff the optimum is
//! nonnegative. Uses HKM directions with a Mehrotra predictor-corrector.

use super::linalg::{jacobi_eigen, Mat};
use super::{build_constraints, certify, FeasResult, GramConstraint, N_BASIS};
use crate::hankel::{QuarticForm, N_QUARTIC};

const MAX_ITERS: usize = 100;
const STEP_FRACTION: f64 = 0.95;

/// Symmetric indicator of an upper-triangle pair, normalized so the
/// coefficient map sends it to 1.
fn unit_pair((i, j): (usize, usize)) -> Mat {
    let mut m = Mat::zeros(N_BASIS);
    if i == j {
        m[(i, i)] = 1.0;
    } else {
        m[(i, j)] = 0.5;
        m[(j, i)] = 0.5;
    }
    m
}

fn null_space(constraints: &[GramConstraint]) -> Vec<Mat> {
    let mut out = Vec::new();
    for c in constraints {
        let first = unit_pair(c.pairs[0]);
        for &p in &c.pairs[1..] {
            out.push(first.sub(&unit_pair(p)));
        }
    }
    out
}

fn least_norm_gram(constraints: &[GramConstraint]) -> Mat {
    let mut g = Mat::zeros(N_BASIS);
    for c in constraints {
        let share = c.target / c.multiplicity() as f64;
        for &(i, j) in &c.pairs {
            g[(i, j)] = share;
            g[(j, i)] = share;
        }
    }
    g
}

/// Largest step keeping `X + a dX` PSD, given the Cholesky factor of `X`.
fn max_step(l: &Mat, dx: &Mat) -> f64 {
    let li = Mat::lower_inverse(l);
    let s = li.matmul(dx).matmul(&li.transpose()).symmetrized();
    match jacobi_eigen(&s) {
        Ok(e) if e.min_value() < 0.0 => -1.0 / e.min_value(),
        Ok(_) => f64::INFINITY,
        Err(_) => 0.0,
    }
}

fn inverse_from_chol(l: &Mat) -> Mat {
    let li = Mat::lower_inverse(l);
    li.transpose().matmul(&li)
}

struct Sdp {
    c: Mat,
    a: Vec<Mat>,
    b: Vec<f64>,
}

impl Sdp {
    fn op(&self, x: &Mat) -> Vec<f64> {
        self.a.iter().map(|ai| ai.inner(x)).collect()
    }

    fn adj(&self, y: &[f64]) -> Mat {
        let mut out = Mat::zeros(N_BASIS);
        for (ai, &yi) in self.a.iter().zip(y) {
            if yi != 0.0 {
                out = out.add(&ai.scale(yi));
            }
        }
        out
    }
}

struct Direction {
    dx: Mat,
    dy: Vec<f64>,
    dz: Mat,
}

/// Solve for the HKM direction targeting `sigma mu` with second-order term `corr`.
#[allow(clippy::too_many_arguments)]
fn direction(
    sdp: &Sdp,
    x: &Mat,
    zinv: &Mat,
    schur_chol: &Mat,
    rp: &[f64],
    rd: &Mat,
    sigma_mu: f64,
    corr: Option<&Mat>,
) -> Direction {
    let mut r = zinv.scale(sigma_mu).sub(x).sub(&x.matmul(rd).matmul(zinv));
    if let Some(c) = corr {
        r = r.sub(c);
    }
    let ar = sdp.op(&r);
    let rhs: Vec<f64> = rp.iter().zip(&ar).map(|(p, q)| p - q).collect();
    let dy = Mat::cholesky_solve(schur_chol, &rhs);
    let ady = sdp.adj(&dy);
    let dz = rd.sub(&ady);
    let dx = r.add(&x.matmul(&ady).matmul(zinv)).symmetrized();
    Direction { dx, dy, dz }
}

struct Outcome {
    t: f64,
    gram: Mat,
    iterations: usize,
}

fn solve(sdp: &Sdp) -> Outcome {
    let n = N_BASIS as f64;
    let m = sdp.b.len();
    let t_idx = m - 1;
    let mut x = Mat::identity(N_BASIS).scale(1.0 / n);
    let mut y = vec![0.0; m];
    y[t_idx] = jacobi_eigen(&sdp.c).map(|e| e.min_value()).unwrap_or(0.0) - 1.0;
    let mut z = sdp.c.sub(&sdp.adj(&y));
    let cnorm = 1.0 + sdp.c.frobenius();
    let mut iterations = 0;

    for it in 0..MAX_ITERS {
        iterations = it;
        let ax = sdp.op(&x);
        let rp: Vec<f64> = sdp.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let rp_norm = rp.iter().map(|r| r * r).sum::<f64>().sqrt();
        let rd = sdp.c.sub(&z).sub(&sdp.adj(&y));
        let mu = x.inner(&z) / n;
        let pobj = sdp.c.inner(&x);
        if y[t_idx] > 0.0 || (pobj < -1e-12 * cnorm && rp_norm < 1e-10) || mu * n < 1e-14 * cnorm {
            break;
        }

        let (Some(lz), Some(lx)) = (z.cholesky(), x.cholesky()) else {
            break;
        };
        let zinv = inverse_from_chol(&lz);
        let xa: Vec<Mat> = sdp.a.iter().map(|aj| x.matmul(aj).matmul(&zinv)).collect();
        let schur = Mat::from_fn(m, |i, j| sdp.a[i].inner(&xa[j])).symmetrized();
        let Some(schur_chol) = schur.cholesky() else {
            break;
        };

        let pred = direction(sdp, &x, &zinv, &schur_chol, &rp, &rd, 0.0, None);
        let ap = (STEP_FRACTION * max_step(&lx, &pred.dx)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&lz, &pred.dz)).min(1.0);
        let gap_aff = x.add(&pred.dx.scale(ap)).inner(&z.add(&pred.dz.scale(ad)));
        let sigma = (gap_aff / (mu * n)).clamp(0.0, 1.0).powi(3);
        let corr = pred.dx.matmul(&pred.dz).matmul(&zinv);

        let d = direction(sdp, &x, &zinv, &schur_chol, &rp, &rd, sigma * mu, Some(&corr));
        let ap = (STEP_FRACTION * max_step(&lx, &d.dx)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&lz, &d.dz)).min(1.0);
        x = x.add(&d.dx.scale(ap)).symmetrized();
        for (yi, dyi) in y.iter_mut().zip(&d.dy) {
            *yi += ad * dyi;
        }
        z = z.add(&d.dz.scale(ad)).symmetrized();
        iterations = it + 1;
    }
    let t = y[t_idx];
    Outcome {
        t,
        gram: z.add(&Mat::identity(N_BASIS).scale(t)),
        iterations,
    }
}

/// SOS feasibility through the interior-point margin.
///
/// Variables are first rescaled so pure fourth-power coefficients become 1.
/// The resulting Gram matrix is mapped back and judged by the same
/// criteria as [`super::sos_feasible`]: PSD violation and residual at most
/// `tol (1 + max |c|)`.
pub fn sos_feasible_ipm(q: &QuarticForm, tol: f64) -> FeasResult {
    let sys = build_constraints(q);
    let scale = q.scale();
    if q.max_abs_coeff() == 0.0 {
        return certify(&sys, Mat::zeros(N_BASIS), tol, scale, 0);
    }
    let mut d = [1.0f64; 4];
    for (k, dk) in d.iter_mut().enumerate() {
        let mut e = [0u8; 4];
        e[k] = 4;
        let c = q.coeff(e);
        if c < 0.0 {
            // negative at e_k, so not even PSD
            return FeasResult::undetermined(f64::INFINITY, f64::INFINITY, 0);
        }
        if c > 0.0 {
            *dk = c.powf(-0.25);
        }
    }
    let weight = |e: [u8; 4]| (0..4).map(|k| d[k].powi(e[k] as i32)).product::<f64>();
    let mut scaled = [0.0; N_QUARTIC];
    for (i, (s, &c)) in scaled.iter_mut().zip(q.coeffs()).enumerate() {
        *s = c * weight(crate::hankel::QUARTIC_EXPONENTS[i]);
    }
    let norm = scaled.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    for s in scaled.iter_mut() {
        *s /= norm;
    }
    let qs = QuarticForm::from_coeffs(scaled).expect("finite scaled form");
    let sys_s = build_constraints(&qs);

    let mut a: Vec<Mat> = null_space(&sys_s.constraints).into_iter().map(|nk| nk.scale(-1.0)).collect();
    a.push(Mat::identity(N_BASIS));
    let mut b = vec![0.0; a.len()];
    *b.last_mut().expect("non-empty") = 1.0;
    let sdp = Sdp {
        c: least_norm_gram(&sys_s.constraints),
        a,
        b,
    };
    let out = solve(&sdp);

    let d2: Vec<f64> = super::BASIS_EXPONENTS.iter().map(|&e| weight(e)).collect();
    let g = Mat::from_fn(N_BASIS, |i, j| out.gram[(i, j)] * norm / (d2[i] * d2[j]));
    let mut r = certify(&sys, g, tol, scale, out.iterations);
    if out.t < -tol && r.is_feasible() {
        // tolerance admitted a Gram matrix the margin rejects; trust the margin
        r.status = super::FeasStatus::Undetermined;
        r.gram = None;
    }
    r
}
