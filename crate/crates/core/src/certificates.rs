//! Critical SOS certificates: a value `M`, an SOS decomposition of the form at
//! `v0 = M`, and a zero `x` of that decomposition with `x1^2 + x4^2 > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{HankelError, Result};
use crate::hankel::{assemble, QuarticForm, SlicePoint, Vec4, N_QUARTIC};
use crate::sos::{MonomialBasis, N_BASIS};

/// `weight * (form . z)^2` with `z` the degree-2 monomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedSquare {
    pub weight: f64,
    pub form: [f64; N_BASIS],
}

impl WeightedSquare {
    pub fn new(weight: f64, form: [f64; N_BASIS]) -> Self {
        Self { weight, form }
    }

    /// Build a form from `(monomial index, coefficient)` pairs.
    fn sparse(weight: f64, entries: &[(usize, f64)]) -> Self {
        let mut form = [0.0; N_BASIS];
        for &(i, c) in entries {
            form[i] += c;
        }
        Self { weight, form }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosDecomposition {
    pub squares: Vec<WeightedSquare>,
}

impl SosDecomposition {
    pub fn new(squares: Vec<WeightedSquare>) -> Result<Self> {
        let d = Self { squares };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.squares.is_empty() {
            return Err(HankelError::InvalidCertificate("decomposition has no squares".into()));
        }
        for (k, s) in self.squares.iter().enumerate() {
            if !s.weight.is_finite() || s.form.iter().any(|c| !c.is_finite()) {
                return Err(HankelError::InvalidCertificate(format!("square {k} is not finite")));
            }
            if s.weight < 0.0 {
                return Err(HankelError::InvalidCertificate(format!(
                    "square {k} has negative weight {}",
                    s.weight
                )));
            }
        }
        Ok(())
    }
}

/// Expand `sum_k w_k (q_k . z)^2` into quartic coefficients.
pub fn expand_squares(dec: &SosDecomposition) -> QuarticForm {
    let basis = MonomialBasis;
    let mut c = [0.0; N_QUARTIC];
    for s in &dec.squares {
        for i in 0..N_BASIS {
            if s.form[i] == 0.0 {
                continue;
            }
            for j in 0..N_BASIS {
                c[basis.product_index(i, j)] += s.weight * s.form[i] * s.form[j];
            }
        }
    }
    QuarticForm::from_coeffs(c).unwrap_or_else(|_| QuarticForm::zero())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalCertificate {
    #[serde(rename = "P")]
    pub p: SlicePoint,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(flatten)]
    pub decomposition: SosDecomposition,
    pub minimizer: Vec4,
}

impl CriticalCertificate {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Check (a) the expansion matches the form at `v0 = M`, (b) the minimizer
/// is a zero of the decomposition, (c) `x1^2 + x4^2 > tol` at the minimizer.
pub fn verify_certificate(cert: &CriticalCertificate, tol: f64) -> Result<VerificationReport> {
    if !(tol > 0.0) {
        return Err(HankelError::InvalidInput("tol must be positive".into()));
    }
    cert.decomposition.validate()?;
    if !cert.m.is_finite() || !cert.minimizer.is_finite() {
        return Err(HankelError::InvalidCertificate("M and minimizer must be finite".into()));
    }
    let target = assemble(&cert.p, cert.m).to_quartic();
    let expanded = expand_squares(&cert.decomposition);
    let scale = target.scale();

    let diff = expanded.max_abs_diff(&target);
    let a = CheckResult {
        name: "a",
        passed: diff <= tol * scale,
        value: diff,
        bound: tol * scale,
        detail: "max coefficient mismatch between expansion and form at v0 = M".into(),
    };

    let x = cert.minimizer;
    let f0 = expanded.evaluate(&x);
    let bound_b = tol * x.norm().powi(4) * scale;
    let b = CheckResult {
        name: "b",
        passed: f0.abs() <= bound_b,
        value: f0.abs(),
        bound: bound_b,
        detail: "|f0| at the minimizer".into(),
    };

    let nd = x.0[0] * x.0[0] + x.0[3] * x.0[3];
    let c = CheckResult {
        name: "c",
        passed: nd > tol,
        value: nd,
        bound: tol,
        detail: "x1^2 + x4^2 at the minimizer".into(),
    };

    let checks = vec![a, b, c];
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport { checks, passed })
}

// basis indices
const X1X1: usize = 0;
const X1X2: usize = 1;
const X1X3: usize = 2;
const X1X4: usize = 3;
const X2X2: usize = 4;
const X2X3: usize = 5;
const X2X4: usize = 6;
const X3X3: usize = 7;
const X3X4: usize = 8;
const X4X4: usize = 9;

/// `(s . x)^2` as a quadratic form over the basis.
fn linear_square(s: [f64; 4]) -> [f64; N_BASIS] {
    let basis = MonomialBasis;
    let mut form = [0.0; N_BASIS];
    for i in 0..4 {
        for j in i..4 {
            let mut e = [0u8; 4];
            e[i] += 1;
            e[j] += 1;
            let k = basis.index_of(e).expect("degree-2 monomial");
            form[k] = if i == j { s[i] * s[i] } else { 2.0 * s[i] * s[j] };
        }
    }
    form
}

/// Segment `P = (1, 1, t, t, t)` with critical value 1.
pub fn segment_certificate(t: f64) -> Result<CriticalCertificate> {
    if !(t.abs() <= 1.0) {
        return Err(HankelError::Domain(format!("segment parameter t = {t} must lie in [-1, 1]")));
    }
    let squares: Vec<WeightedSquare> = [
        ((1.0 + t) / 2.0, [1.0, 1.0, 1.0, 1.0]),
        ((1.0 - t) / 2.0, [1.0, -1.0, 1.0, -1.0]),
    ]
    .into_iter()
    .filter(|(w, _)| *w > 0.0)
    .map(|(w, s)| WeightedSquare::new(w, linear_square(s)))
    .collect();
    Ok(CriticalCertificate {
        p: SlicePoint::new(1.0, 1.0, t, t, t)?,
        m: 1.0,
        decomposition: SosDecomposition::new(squares)?,
        minimizer: Vec4::new(1.0, 0.0, -1.0, 0.0),
    })
}

/// Largest real root of `v2(theta) = b` for the cone family.
pub fn cone_theta_min(b: f64) -> Result<f64> {
    if !(b >= 1.0) {
        return Err(HankelError::Domain(format!("cone parameter b = {b} must be >= 1")));
    }
    let (m, p) = (b - 1.0, b + 1.0);
    Ok(m.cbrt() * p.cbrt().powi(2) + m.cbrt().powi(2) * p.cbrt() - 2.0 * b + 1.0)
}

/// Cone certificate at `P = (v2(b, theta), b, 0, 0, 0)`.
pub fn cone_certificate(b: f64, theta: f64) -> Result<CriticalCertificate> {
    let tmin = cone_theta_min(b)?;
    if !(theta >= tmin - 1e-12 * (1.0 + tmin.abs())) {
        return Err(HankelError::Domain(format!(
            "cone parameter theta = {theta} is below the threshold {tmin}"
        )));
    }
    let s = theta + 3.0 * b - 1.0;
    let v2 = s * (theta * theta + (3.0 * b - 2.0) * theta - 3.0 * b + 4.0);
    let quad = 3.0 * theta * theta + (10.0 * b - 6.0) * theta + 3.0 * b * b - 10.0 * b + 9.0;
    let m = s * s * quad;
    let a1 = -(theta * theta + (4.0 * b - 2.0) * theta + 3.0 * b * b - 4.0 * b + 1.0);
    let a2 = 2.0 * (theta * theta + (4.0 * b - 2.0) * theta + b * b - 4.0 * b + 4.0) / quad;
    // v2 - b vanishes at theta = tmin; absorb rounding there
    let tail = {
        let w = 6.0 * (v2 - b);
        if w.abs() <= 1e-9 * (1.0 + v2.abs()) { 0.0 } else { w }
    };
    let weights = [1.0 / m, a2, 6.0 / b, 6.0 * (b * b - 1.0) / b, tail];
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(HankelError::Domain(format!(
            "cone certificate at (b, theta) = ({b}, {theta}) has weight {w}"
        )));
    }
    let squares = vec![
        WeightedSquare::sparse(1.0 / m, &[(X1X1, m), (X1X3, 2.0 * v2), (X3X3, a1)]),
        WeightedSquare::sparse(1.0 / m, &[(X4X4, m), (X2X4, 2.0 * v2), (X2X2, a1)]),
        WeightedSquare::sparse(a2, &[(X1X3, s), (X3X3, 1.0)]),
        WeightedSquare::sparse(a2, &[(X2X4, s), (X2X2, 1.0)]),
        WeightedSquare::sparse(6.0 / b, &[(X1X2, 1.0), (X3X4, 1.0), (X2X3, b), (X1X4, b)]),
        WeightedSquare::sparse(6.0 * (b * b - 1.0) / b, &[(X1X2, 1.0), (X3X4, 1.0)]),
        WeightedSquare::sparse(tail, &[(X1X2, 1.0)]),
        WeightedSquare::sparse(tail, &[(X3X4, 1.0)]),
    ];
    Ok(CriticalCertificate {
        p: SlicePoint::new(v2, b, 0.0, 0.0, 0.0)?,
        m,
        decomposition: SosDecomposition::new(squares)?,
        minimizer: Vec4::new(1.0, 0.0, -s, 0.0),
    })
}

/// Critical value on the ray `P = (-rho, 0, 0, 0, 0)`.
pub fn ray_critical_value(rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(HankelError::Domain(format!("ray parameter rho = {rho} must be >= 0")));
    }
    let r = rho;
    let t1 = -r.powi(6) + 272.0 * r.powi(5) + 12608.0 * r.powi(4) + 204032.0 * r.powi(3)
        + 1558528.0 * r * r
        + 5750784.0 * r
        + 8290304.0;
    let t2 = -(r + 6.0).powi(2) * (r + 4.0).powi(3) * (r * r + 4.0 * r - 16.0).powi(3);
    let t3 = 9.0 * (r + 8.0) * (r.powi(3) + 152.0 * r * r + 1728.0 * r + 5120.0);
    let y = if t2 >= 0.0 {
        let w = (27.0 * (t1 + 32.0 * t2.sqrt())).cbrt();
        w + t3 / w
    } else {
        // three real roots; the closed form's real value is the largest
        let c = (27.0 * t1 / t3.powf(1.5)).clamp(-1.0, 1.0);
        2.0 * t3.sqrt() * (c.acos() / 3.0).cos()
    };
    Ok(y + 6.0 * r * r + 138.0 * r + 609.0)
}

/// Critical value at `P = (1, 0, 0, 0, 0)`.
pub fn point_a_critical_value() -> f64 {
    let c = (3906351.0 + 9120.0 * 57f64.sqrt()).cbrt();
    477.0 + 3.0 * c + 74403.0 / c
}
