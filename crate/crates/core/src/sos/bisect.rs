//! M0, the smallest `v0` making the Hankel form SOS, by bisection on `v0`.

use serde::{Deserialize, Serialize};

use super::{is_sos, FeasBackend, GramMatrix};
use crate::conditions::eta;
use crate::error::{HankelError, Result};
use crate::hankel::{assemble, SlicePoint, Vec4};
use crate::psd::{n0, BoundResult, SearchOptions};

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BisectionOptions {
    pub rel_tol: f64,
    pub feas_tol: f64,
    /// Iteration cap for the alternating-projection backend.
    pub max_iter: usize,
    pub backend: FeasBackend,
    /// Options for the `n0` call that seeds the lower bracket.
    pub search: SearchOptions,
    /// Accept points with `eta(v5, v6) = 1` exactly.
    pub allow_boundary: bool,
}

impl Default for BisectionOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-4,
            feas_tol: 1e-8,
            max_iter: 50_000,
            backend: FeasBackend::default(),
            search: SearchOptions::default(),
            allow_boundary: false,
        }
    }
}

/// Full record of one `m0` run.
#[derive(Debug, Clone, Serialize)]
pub struct M0Search {
    pub result: BoundResult,
    /// The `n0` result used to seed the bracket, if that call succeeded.
    pub n0: Option<BoundResult>,
    pub lower: f64,
    pub upper: f64,
    /// Gram certificate at `upper`.
    pub gram: Option<GramMatrix>,
}

pub fn m0(p: &SlicePoint, opts: &BisectionOptions) -> Result<BoundResult> {
    m0_search(p, opts).map(|s| s.result)
}

/// Bisection with lower bracket `n0 - delta` (0 if `n0` fails) and an upper
/// bracket doubled from `max(1, 2 n0)` until feasible.
pub fn m0_search(p: &SlicePoint, opts: &BisectionOptions) -> Result<M0Search> {
    if !(opts.rel_tol > 0.0 && opts.feas_tol > 0.0) {
        return Err(HankelError::InvalidInput("tolerances must be positive".into()));
    }
    let e = eta(p.v5, p.v6);
    let inside = e < 1.0 || (opts.allow_boundary && e <= 1.0);
    if !inside {
        return Err(HankelError::OutsideEffectiveDomain { eta: e });
    }
    let mut probes = 0usize;
    let mut feasible = |v0: f64| {
        probes += 1;
        let q = assemble(p, v0).to_quartic();
        is_sos(&q, opts.feas_tol, opts.max_iter, opts.backend)
    };

    let seed = n0(p, &opts.search).ok();
    let (mut lo, start) = match &seed {
        Some(r) => (r.value - opts.rel_tol * r.value.abs().max(1.0), (2.0 * r.value).max(1.0)),
        None => (0.0, 1.0),
    };
    let limit = 1e9 * p.max_abs().max(1.0);
    let mut hi = start;
    let mut gram = loop {
        let r = feasible(hi);
        if r.is_feasible() {
            break r.gram;
        }
        lo = lo.max(hi);
        hi *= 2.0;
        if hi > limit {
            return Err(HankelError::NonConvergence(format!(
                "no SOS upper bracket below {limit:e} at P = ({p})"
            )));
        }
    };
    let mut converged = false;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= opts.rel_tol * hi.max(1.0) {
            converged = true;
            break;
        }
        let mid = 0.5 * (lo + hi);
        let r = feasible(mid);
        if r.is_feasible() {
            hi = mid;
            gram = r.gram;
        } else {
            lo = mid;
        }
    }
    let witness = seed.map(|r| r.witness).unwrap_or(Vec4([0.0; 4]));
    Ok(M0Search {
        result: BoundResult {
            value: 0.5 * (lo + hi),
            witness,
            starts_used: probes,
            converged,
        },
        n0: seed,
        lower: lo,
        upper: hi,
        gram,
    })
}
