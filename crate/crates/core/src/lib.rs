//! PSD and SOS boundaries of fourth order four dimensional Hankel tensors.
//!
//! A symmetric generating vector `(v0, v1, v2, v3, 1, v5, v6, v5, 1, v3, v2, v1, v0)`
//! is indexed by its slice point `P = (v2, v6, v1, v3, v5)`. For each `P` in
//! the effective domain, [`n0`] is the smallest `v0` making the quartic PSD and
//! [`m0`] the smallest making it a sum of squares.

pub mod certificates;
pub mod conditions;
pub mod error;
pub mod hankel;
pub mod psd;
pub mod scan;
pub mod sos;

pub use certificates::{
    cone_certificate, cone_theta_min, expand_squares, point_a_critical_value, ray_critical_value,
    segment_certificate, verify_certificate, CriticalCertificate, SosDecomposition, VerificationReport,
    WeightedSquare,
};
pub use conditions::{
    binary_quartic_psd, check_necessary, classify_degenerate, eta, in_effective_domain, ConditionReport,
    DegenerateClass, DegenerateTag,
};
pub use error::{HankelError, Result};
pub use hankel::{assemble, GeneratingVector, QuarticForm, SlicePoint, Vec4};
pub use psd::{grid_oracle_min, minimize_on_sphere, n0, BoundResult, SearchOptions};
pub use scan::{run_scan, GridSpec, RowStatus, ScanRow};
pub use sos::{
    build_constraints, extract_decomposition, is_sos, m0, m0_search, project_psd, sos_feasible,
    sos_feasible_ipm, BisectionOptions, ConstraintSystem, FeasBackend, FeasResult, FeasStatus, GramMatrix,
    MonomialBasis,
};
