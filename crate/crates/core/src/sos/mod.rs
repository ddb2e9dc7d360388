//! Sum-of-squares membership of quartic forms via Gram matrices.
//!
//! A quartic `f` is SOS iff `f(x) = z(x)^T G z(x)` for some PSD `G`, where
//! `z` is the vector of the ten degree-2 monomials. Matching coefficients
//! gives 35 linear constraints on the 55 free entries of `G`.

mod bisect;
mod ipm;
pub mod linalg;

use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::certificates::{SosDecomposition, WeightedSquare};
use crate::error::{HankelError, Result};
use crate::hankel::{monomial, quartic_index, QuarticForm, Vec4, N_QUARTIC};
pub use bisect::{m0, m0_search, BisectionOptions, M0Search};
pub use ipm::sos_feasible_ipm;
pub use linalg::{jacobi_eigen, Mat, SymEigen};

pub const N_BASIS: usize = 10;

/// Degree-2 monomials, graded lexicographic with x1 > x2 > x3 > x4.
pub const BASIS_EXPONENTS: [[u8; 4]; N_BASIS] = [
    [2, 0, 0, 0],
    [1, 1, 0, 0],
    [1, 0, 1, 0],
    [1, 0, 0, 1],
    [0, 2, 0, 0],
    [0, 1, 1, 0],
    [0, 1, 0, 1],
    [0, 0, 2, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 2],
];

/// The fixed monomial basis `z(x)` of the Gram formulation.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonomialBasis;

impl MonomialBasis {
    pub fn len(&self) -> usize {
        N_BASIS
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exponents(&self) -> &'static [[u8; 4]; N_BASIS] {
        &BASIS_EXPONENTS
    }

    pub fn index_of(&self, exp: [u8; 4]) -> Option<usize> {
        BASIS_EXPONENTS.iter().position(|e| *e == exp)
    }

    /// Index of the quartic monomial `z_i z_j`.
    pub fn product_index(&self, i: usize, j: usize) -> usize {
        let (a, b) = (BASIS_EXPONENTS[i], BASIS_EXPONENTS[j]);
        quartic_index([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
            .expect("product of two quadratics is quartic")
    }

    pub fn eval(&self, x: &Vec4) -> [f64; N_BASIS] {
        BASIS_EXPONENTS.map(|e| monomial(x, e))
    }

    pub fn name(&self, i: usize) -> String {
        let e = BASIS_EXPONENTS[i];
        let mut s = String::new();
        for (k, &a) in e.iter().enumerate() {
            for _ in 0..a {
                s.push_str(&format!("x{}", k + 1));
            }
        }
        s
    }
}

/// Symmetric 10x10 Gram matrix over [`MonomialBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(Mat);

impl GramMatrix {
    /// Accepts asymmetry up to `1e-14 (1 + max |G_ij|)` and symmetrizes.
    pub fn new(m: Mat) -> Result<Self> {
        if m.dim() != N_BASIS {
            return Err(HankelError::InvalidInput(format!(
                "Gram matrix must be {N_BASIS}x{N_BASIS}, got {0}x{0}",
                m.dim()
            )));
        }
        if !m.is_finite() {
            return Err(HankelError::InvalidInput("Gram matrix has non-finite entries".into()));
        }
        let mag = (0..N_BASIS)
            .flat_map(|i| (0..N_BASIS).map(move |j| (i, j)))
            .fold(0.0f64, |a, (i, j)| a.max(m[(i, j)].abs()));
        if m.max_asymmetry() > 1e-14 * (1.0 + mag) {
            return Err(HankelError::InvalidInput("Gram matrix is not symmetric".into()));
        }
        Ok(Self(m.symmetrized()))
    }

    pub fn identity() -> Self {
        Self(Mat::identity(N_BASIS))
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// The quartic `z^T G z`.
    pub fn to_quartic(&self) -> QuarticForm {
        let basis = MonomialBasis;
        let mut c = [0.0; N_QUARTIC];
        for i in 0..N_BASIS {
            for j in 0..N_BASIS {
                c[basis.product_index(i, j)] += self.0[(i, j)];
            }
        }
        QuarticForm::from_coeffs(c).expect("finite Gram gives finite form")
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..N_BASIS)
            .map(|i| (0..N_BASIS).map(|j| self.0[(i, j)]).collect())
            .collect()
    }
}

impl Serialize for GramMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GramMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        if rows.len() != N_BASIS || rows.iter().any(|r| r.len() != N_BASIS) {
            return Err(D::Error::custom("Gram matrix must be 10 rows of 10 numbers"));
        }
        GramMatrix::new(Mat::from_fn(N_BASIS, |i, j| rows[i][j])).map_err(D::Error::custom)
    }
}

/// The Gram entries feeding one quartic coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramConstraint {
    pub exponent: [u8; 4],
    /// Upper-triangle pairs `(i, j)`, `i <= j`, with `z_i z_j = x^exponent`.
    pub pairs: Vec<(usize, usize)>,
    pub target: f64,
}

impl GramConstraint {
    /// `sum G_ij` over ordered pairs, so off-diagonal pairs count twice.
    pub fn apply(&self, g: &Mat) -> f64 {
        self.pairs
            .iter()
            .map(|&(i, j)| if i == j { g[(i, i)] } else { 2.0 * g[(i, j)] })
            .sum()
    }

    /// Number of ordered pairs.
    pub fn multiplicity(&self) -> usize {
        self.pairs.iter().map(|&(i, j)| if i == j { 1 } else { 2 }).sum()
    }
}

struct GramOperator {
    pairs: Vec<Vec<(usize, usize)>>,
    /// Cholesky factor of `A A^*` under the Frobenius inner product.
    normal_chol: Mat,
}

fn gram_operator() -> &'static GramOperator {
    static OP: OnceLock<GramOperator> = OnceLock::new();
    OP.get_or_init(|| {
        let basis = MonomialBasis;
        let mut pairs = vec![Vec::new(); N_QUARTIC];
        for i in 0..N_BASIS {
            for j in i..N_BASIS {
                pairs[basis.product_index(i, j)].push((i, j));
            }
        }
        // A_a = sum over ordered pairs of E_ij; <A_a, A_b> counts shared entries
        let adjoint: Vec<Mat> = pairs
            .iter()
            .map(|ps| {
                let mut m = Mat::zeros(N_BASIS);
                for &(i, j) in ps {
                    m[(i, j)] = 1.0;
                    m[(j, i)] = 1.0;
                }
                m
            })
            .collect();
        let mut normal = Mat::zeros(N_QUARTIC);
        for a in 0..N_QUARTIC {
            for b in 0..N_QUARTIC {
                normal[(a, b)] = adjoint[a].inner(&adjoint[b]);
            }
        }
        let normal_chol = normal
            .cholesky()
            .expect("Gram constraint operator has full row rank");
        GramOperator { pairs, normal_chol }
    })
}

/// The 35 coefficient-matching constraints for a given quartic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSystem {
    pub constraints: Vec<GramConstraint>,
}

pub fn build_constraints(q: &QuarticForm) -> ConstraintSystem {
    let op = gram_operator();
    let constraints = op
        .pairs
        .iter()
        .zip(crate::hankel::QUARTIC_EXPONENTS.iter())
        .zip(q.coeffs().iter())
        .map(|((pairs, exp), &target)| GramConstraint {
            exponent: *exp,
            pairs: pairs.clone(),
            target,
        })
        .collect();
    ConstraintSystem { constraints }
}

impl ConstraintSystem {
    pub fn residuals(&self, g: &Mat) -> Vec<f64> {
        self.constraints.iter().map(|c| c.apply(g) - c.target).collect()
    }

    /// Euclidean norm of the 35 constraint residuals.
    pub fn residual_norm(&self, g: &Mat) -> f64 {
        self.residuals(g).iter().map(|r| r * r).sum::<f64>().sqrt()
    }

    /// Frobenius-nearest symmetric matrix satisfying every constraint.
    pub fn project(&self, g: &Mat) -> Mat {
        let op = gram_operator();
        let y = Mat::cholesky_solve(&op.normal_chol, &self.residuals(g));
        let mut out = g.clone();
        for (c, ya) in self.constraints.iter().zip(y.iter()) {
            for &(i, j) in &c.pairs {
                out[(i, j)] -= ya;
                if i != j {
                    out[(j, i)] -= ya;
                }
            }
        }
        out
    }
}

/// Frobenius-nearest PSD matrix: clamp negative eigenvalues to zero.
pub fn project_psd(g: &GramMatrix) -> Result<GramMatrix> {
    let e = jacobi_eigen(g.as_mat())?;
    GramMatrix::new(e.reconstruct_with(|l| l.max(0.0)).symmetrized())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasStatus {
    Feasible,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasResult {
    pub status: FeasStatus,
    pub gram: Option<GramMatrix>,
    /// Constraint residual of the reported iterate.
    pub residual: f64,
    /// Magnitude of the most negative eigenvalue of the reported iterate.
    pub psd_violation: f64,
    pub iterations: usize,
}

impl FeasResult {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasStatus::Feasible
    }

    fn undetermined(residual: f64, psd_violation: f64, iterations: usize) -> Self {
        Self {
            status: FeasStatus::Undetermined,
            gram: None,
            residual,
            psd_violation,
            iterations,
        }
    }
}

/// Which feasibility routine answers "is this quartic SOS?".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasBackend {
    AlternatingProjections,
    #[default]
    InteriorPoint,
}

impl std::str::FromStr for FeasBackend {
    type Err = HankelError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ap" | "alternating-projections" => Ok(Self::AlternatingProjections),
            "ipm" | "interior-point" => Ok(Self::InteriorPoint),
            _ => Err(HankelError::InvalidInput(format!("unknown backend {s:?} (use ap or ipm)"))),
        }
    }
}

/// Run the selected backend.
pub fn is_sos(q: &QuarticForm, tol: f64, max_iter: usize, backend: FeasBackend) -> FeasResult {
    match backend {
        FeasBackend::AlternatingProjections => sos_feasible(q, tol, max_iter),
        FeasBackend::InteriorPoint => sos_feasible_ipm(q, tol),
    }
}

/// Accept `g` as a Gram certificate for `sys` when its PSD violation and
/// constraint residual are both at most `tol * scale`.
fn certify(sys: &ConstraintSystem, g: Mat, tol: f64, scale: f64, iterations: usize) -> FeasResult {
    let residual = sys.residual_norm(&g);
    let violation = match jacobi_eigen(&g) {
        Ok(e) => (-e.min_value()).max(0.0),
        Err(_) => return FeasResult::undetermined(residual, f64::INFINITY, iterations),
    };
    if violation <= tol * scale && residual <= tol * scale {
        if let Ok(gram) = GramMatrix::new(g.symmetrized()) {
            return FeasResult {
                status: FeasStatus::Feasible,
                gram: Some(gram),
                residual,
                psd_violation: violation,
                iterations,
            };
        }
    }
    FeasResult::undetermined(residual, violation, iterations)
}

/// SOS feasibility by alternating projections between the PSD cone and the
/// affine set of Gram matrices of `q`.
///
/// Feasible once the affine iterate's most negative eigenvalue and the PSD
/// iterate's constraint residual are both below `tol (1 + max |c|)`.
pub fn sos_feasible(q: &QuarticForm, tol: f64, max_iter: usize) -> FeasResult {
    let sys = build_constraints(q);
    let scale = q.scale();
    let mut g = sys.project(&Mat::zeros(N_BASIS));
    let mut last = (f64::INFINITY, f64::INFINITY);
    for it in 0..max_iter {
        let eig = match jacobi_eigen(&g) {
            Ok(e) => e,
            Err(_) => return FeasResult::undetermined(last.0, last.1, it),
        };
        let violation = (-eig.min_value()).max(0.0);
        let p = eig.reconstruct_with(|l| l.max(0.0)).symmetrized();
        let residual = sys.residual_norm(&p);
        last = (residual, violation);
        if violation <= tol * scale && residual <= tol * scale {
            return certify(&sys, p, tol, scale, it + 1);
        }
        g = sys.project(&p);
    }
    FeasResult::undetermined(last.0, last.1, max_iter)
}

/// Split a PSD Gram matrix into unit-weight squares `(sqrt(lambda_k) u_k . z)^2`.
///
/// Eigenvalues down to `-1e-8 (1 + trace)` are clamped to zero; anything more
/// negative is rejected.
pub fn extract_decomposition(g: &GramMatrix) -> Result<SosDecomposition> {
    let e = jacobi_eigen(g.as_mat())?;
    let trace = g.as_mat().trace().abs();
    if e.min_value() < -1e-8 * (1.0 + trace) {
        return Err(HankelError::InvalidInput(format!(
            "Gram matrix is not PSD: eigenvalue {}",
            e.min_value()
        )));
    }
    let floor = 1e-15 * (1.0 + trace);
    let squares: Vec<WeightedSquare> = (0..N_BASIS)
        .rev()
        .filter(|&k| e.values[k] > floor)
        .map(|k| {
            let root = e.values[k].sqrt();
            let u: Vec<f64> = e.vector(k).iter().map(|x| root * x).collect();
            WeightedSquare {
                weight: 1.0,
                form: u.try_into().expect("basis-sized eigenvector"),
            }
        })
        .collect();
    SosDecomposition::new(squares)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::expand_squares;
    use crate::hankel::{assemble, SlicePoint};

    #[test]
    fn basis_order() {
        let b = MonomialBasis;
        assert_eq!(b.name(0), "x1x1");
        assert_eq!(b.name(1), "x1x2");
        assert_eq!(b.name(9), "x4x4");
        assert_eq!(b.index_of([0, 1, 1, 0]), Some(5));
    }

    #[test]
    fn constraint_examples() {
        let v = assemble(&SlicePoint::new(1.5, 0.7, 0.2, -0.3, 0.1).unwrap(), 3.0);
        let sys = build_constraints(&v.to_quartic());
        let find = |e: [u8; 4]| sys.constraints.iter().find(|c| c.exponent == e).unwrap();

        let c = find([4, 0, 0, 0]);
        assert_eq!(c.pairs, vec![(0, 0)]);
        assert_eq!(c.target, 3.0);

        let c = find([2, 2, 0, 0]);
        assert_eq!(c.pairs, vec![(0, 4), (1, 1)]);
        assert_eq!(c.multiplicity(), 3);
        assert_eq!(c.target, 6.0 * 1.5);

        let c = find([1, 1, 1, 1]);
        assert_eq!(c.pairs, vec![(1, 8), (2, 6), (3, 5)]);
        assert_eq!(c.multiplicity(), 6);
        assert!((c.target - 24.0 * 0.7).abs() < 1e-14);
    }

    #[test]
    fn projection_satisfies_constraints() {
        let v = assemble(&SlicePoint::new(-2.0, 0.5, 0.3, 0.1, -0.2).unwrap(), 40.0);
        let q = v.to_quartic();
        let sys = build_constraints(&q);
        let g = sys.project(&Mat::identity(N_BASIS));
        assert!(sys.residual_norm(&g) < 1e-12 * q.scale());
        assert!(g.max_asymmetry() == 0.0);
        let gm = GramMatrix::new(g).unwrap();
        assert!(gm.to_quartic().max_abs_diff(&q) < 1e-12 * q.scale());
    }

    #[test]
    fn project_psd_examples() {
        let g = GramMatrix::identity();
        let p = project_psd(&g).unwrap();
        assert!(p.as_mat().sub(g.as_mat()).frobenius() < 1e-10);

        let mut d = vec![0.0; N_BASIS];
        d[0] = 1.0;
        d[1] = -1.0;
        let p = project_psd(&GramMatrix::new(Mat::diag(&d)).unwrap()).unwrap();
        let mut e = vec![0.0; N_BASIS];
        e[0] = 1.0;
        assert!(p.as_mat().sub(&Mat::diag(&e)).frobenius() < 1e-14);

        let u: Vec<f64> = (0..N_BASIS).map(|i| (i as f64 - 4.5) / 3.0).collect();
        let neg = Mat::from_fn(N_BASIS, |i, j| -u[i] * u[j]);
        let p = project_psd(&GramMatrix::new(neg).unwrap()).unwrap();
        assert!(p.as_mat().frobenius() < 1e-12);
    }

    #[test]
    fn sos_feasible_examples() {
        // (x1^2 + x4^2)^2
        let mut q = QuarticForm::zero();
        *q.coeff_mut([4, 0, 0, 0]) = 1.0;
        *q.coeff_mut([2, 0, 0, 2]) = 2.0;
        *q.coeff_mut([0, 0, 0, 4]) = 1.0;
        let r = sos_feasible(&q, 1e-8, 50_000);
        assert!(r.is_feasible(), "{r:?}");

        // exactly at the SOS boundary projections stall, the margin solver does not
        let p = SlicePoint::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let r = is_sos(&assemble(&p, 1.0).to_quartic(), 1e-8, 50_000, FeasBackend::InteriorPoint);
        assert!(r.is_feasible(), "{r:?}");
        let r = sos_feasible(&assemble(&p, 1.01).to_quartic(), 1e-8, 50_000);
        assert!(r.is_feasible(), "{r:?}");
        let r = sos_feasible(&assemble(&p, 0.9).to_quartic(), 1e-8, 5_000);
        assert_eq!(r.status, FeasStatus::Undetermined);
        assert!(r.gram.is_none());
    }

    #[test]
    fn feasible_gram_invariants() {
        let p = SlicePoint::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let q = assemble(&p, 1.2).to_quartic();
        for backend in [FeasBackend::AlternatingProjections, FeasBackend::InteriorPoint] {
            let r = is_sos(&q, 1e-8, 50_000, backend);
            let g = r.gram.as_ref().expect("feasible");
            let e = jacobi_eigen(g.as_mat()).unwrap();
            assert!(e.min_value() >= -1e-8 * (1.0 + g.as_mat().trace()));
            assert!(r.residual <= 1e-8 * q.scale());
            assert!(g.to_quartic().max_abs_diff(&q) <= 1e-7 * q.scale());
        }
    }

    #[test]
    fn extract_examples() {
        let d = extract_decomposition(&GramMatrix::identity()).unwrap();
        assert_eq!(d.squares.len(), 10);
        for s in &d.squares {
            assert!((s.weight - 1.0).abs() < 1e-15);
            assert_eq!(s.form.iter().filter(|x| x.abs() == 1.0).count(), 1);
        }

        let v: Vec<f64> = (0..N_BASIS).map(|i| 1.0 + i as f64).collect();
        let g = GramMatrix::new(Mat::from_fn(N_BASIS, |i, j| v[i] * v[j])).unwrap();
        let d = extract_decomposition(&g).unwrap();
        assert_eq!(d.squares.len(), 1);
        let q = expand_squares(&d);
        assert!(q.max_abs_diff(&g.to_quartic()) < 1e-10 * g.to_quartic().scale());

        let mut bad = vec![1.0; N_BASIS];
        bad[3] = -0.5;
        assert!(extract_decomposition(&GramMatrix::new(Mat::diag(&bad)).unwrap()).is_err());
    }

    #[test]
    fn gram_json_is_row_major() {
        let mut m = Mat::zeros(N_BASIS);
        m[(0, 1)] = 2.0;
        m[(1, 0)] = 2.0;
        m[(9, 9)] = 5.0;
        let g = GramMatrix::new(m).unwrap();
        let js = serde_json::to_value(&g).unwrap();
        assert_eq!(js[0][1], 2.0);
        assert_eq!(js[9][9], 5.0);
        let back: GramMatrix = serde_json::from_value(js).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<GramMatrix>("[[1.0]]").is_err());
    }
}
