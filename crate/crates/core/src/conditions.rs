//! Necessary conditions for positive semi-definiteness, the binary quartic
//! threshold `eta`, and the effective domain.

use serde::{Deserialize, Serialize};

use crate::hankel::{GeneratingVector, Vec4};

/// Absolute tolerance for "this entry is zero" in the degeneracy tests.
pub const ZERO_TOL: f64 = 1e-12;

/// PSD threshold of `g(y) = a y1^4 + 4b y1^3 y2 + 6c y1^2 y2^2 + 4b y1 y2^3 + a y2^4`.
///
/// `g` is PSD iff `a >= eta(b, c)`.
pub fn eta(beta: f64, gamma: f64) -> f64 {
    let b = beta.abs();
    if gamma <= b {
        4.0 * b - 3.0 * gamma
    } else {
        // 9c^2 - 8b^2 >= c^2 > 0 on this branch
        (3.0 * gamma - (9.0 * gamma * gamma - 8.0 * beta * beta).sqrt()) / 2.0
    }
}

/// `eta(v5, v6) < 1`
pub fn in_effective_domain(v5: f64, v6: f64) -> bool {
    eta(v5, v6) < 1.0
}

pub fn binary_quartic_psd(alpha: f64, beta: f64, gamma: f64) -> bool {
    alpha >= eta(beta, gamma)
}

/// `g(y1, y2)` for the symmetric binary quartic with parameters `(a, b, c)`.
pub fn binary_quartic(alpha: f64, beta: f64, gamma: f64, y1: f64, y2: f64) -> f64 {
    let (s1, s2) = (y1 * y1, y2 * y2);
    alpha * (s1 * s1 + s2 * s2) + 4.0 * beta * y1 * y2 * (s1 + s2) + 6.0 * gamma * s1 * s2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// `v_i >= 0`
    Sign(usize),
    /// `v_i + 6 v_{i+s} + v_{i+2s} >= 4 |v_{i+s/2} + v_{i+3s/2}|`
    Pair { i: usize, first: usize, second: usize },
    Plane,
}

/// One inequality `lhs >= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRecord {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    #[serde(skip)]
    kind: Kind,
}

impl ConditionRecord {
    fn new(id: String, lhs: f64, rhs: f64, kind: Kind) -> Self {
        Self {
            id,
            lhs,
            rhs,
            satisfied: lhs >= rhs,
            kind,
        }
    }

    /// A point where the Hankel form is negative whenever this record fails.
    ///
    /// Sign records use `e_k`, pair records use `e_k +- e_l`, and the
    /// cor1 record searches the `(x2, x3)` plane.
    pub fn witness(&self, v: &GeneratingVector) -> Vec4 {
        match self.kind {
            Kind::Sign(i) => Vec4::basis(i / 4),
            Kind::Pair { i, first, second } => {
                let sign = if v.get(i + first) + v.get(i + second) >= 0.0 { -1.0 } else { 1.0 };
                let (k, l) = match (i, first) {
                    (_, 1) => (i / 4, i / 4 + 1),
                    (_, 2) => (i / 4, i / 4 + 2),
                    _ => (0, 3),
                };
                let mut x = Vec4::basis(k);
                x.0[l] = sign;
                x
            }
            Kind::Plane => {
                let n = 20_000;
                (0..n)
                    .map(|s| {
                        let t = std::f64::consts::PI * s as f64 / n as f64;
                        Vec4::new(0.0, t.cos(), t.sin(), 0.0)
                    })
                    .min_by(|a, b| v.evaluate(a).total_cmp(&v.evaluate(b)))
                    .expect("non-empty sample")
            }
        }
    }
}

/// Every necessary inequality evaluated for one generating vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub records: Vec<ConditionRecord>,
    pub overall: bool,
}

impl ConditionReport {
    pub fn failures(&self) -> impl Iterator<Item = &ConditionRecord> {
        self.records.iter().filter(|r| !r.satisfied)
    }
}

/// Evaluate all necessary PSD inequalities without short-circuiting.
///
/// For symmetric vectors with `v4 = 1` the report also carries the record
/// `cor1: 1 >= eta(v5, v6)`.
pub fn check_necessary(v: &GeneratingVector) -> ConditionReport {
    let g = |j: usize| v.get(j);
    let mut records = Vec::with_capacity(11);
    for i in [0, 4, 8, 12] {
        records.push(ConditionRecord::new(format!("(5)i{i}"), g(i), 0.0, Kind::Sign(i)));
    }
    for i in [0, 4, 8] {
        records.push(ConditionRecord::new(
            format!("(6)i{i}"),
            g(i) + 6.0 * g(i + 2) + g(i + 4),
            4.0 * (g(i + 1) + g(i + 3)).abs(),
            Kind::Pair { i, first: 1, second: 3 },
        ));
    }
    for i in [0, 4] {
        records.push(ConditionRecord::new(
            format!("(7)i{i}"),
            g(i) + 6.0 * g(i + 4) + g(i + 8),
            4.0 * (g(i + 2) + g(i + 6)).abs(),
            Kind::Pair { i, first: 2, second: 6 },
        ));
    }
    records.push(ConditionRecord::new(
        "(8)".to_string(),
        g(0) + 6.0 * g(6) + g(12),
        4.0 * (g(3) + g(9)).abs(),
        Kind::Pair { i: 0, first: 3, second: 9 },
    ));
    if v.is_symmetric(ZERO_TOL) && (g(4) - 1.0).abs() <= ZERO_TOL {
        records.push(ConditionRecord::new(
            "cor1".to_string(),
            1.0,
            eta(g(5), g(6)),
            Kind::Plane,
        ));
    }
    let overall = records.iter().all(|r| r.satisfied);
    ConditionReport { records, overall }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateTag {
    NonDegenerate,
    TriviallySos,
    NotPsd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateClass {
    pub tag: DegenerateTag,
    pub violating_index: Option<usize>,
}

/// Structural classification when `v0 v12 = 0` or `v4 v8 = 0`.
///
/// In both cases a PSD tensor must have `v1 = ... = v11 = 0`, leaving
/// `v0 x1^4 + v12 x4^4`. `violating_index` is the first `j` in `1..=11`
/// with `v_j != 0`; it is `None` when only a pure-power coefficient is negative.
pub fn classify_degenerate(v: &GeneratingVector) -> DegenerateClass {
    let zero = |x: f64| x.abs() <= ZERO_TOL;
    let edge = zero(v.get(0)) || zero(v.get(12));
    let middle = zero(v.get(4)) || zero(v.get(8));
    if !edge && !middle {
        return DegenerateClass {
            tag: DegenerateTag::NonDegenerate,
            violating_index: None,
        };
    }
    if let Some(j) = (1..=11).find(|&j| !zero(v.get(j))) {
        return DegenerateClass {
            tag: DegenerateTag::NotPsd,
            violating_index: Some(j),
        };
    }
    let tag = if v.get(0) >= -ZERO_TOL && v.get(12) >= -ZERO_TOL {
        DegenerateTag::TriviallySos
    } else {
        DegenerateTag::NotPsd
    };
    DegenerateClass {
        tag,
        violating_index: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_with(entries: &[(usize, f64)]) -> GeneratingVector {
        let mut a = [0.0; 13];
        for &(j, x) in entries {
            a[j] = x;
        }
        GeneratingVector::new(a).unwrap()
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(0.0, 0.0), 0.0);
        assert_eq!(eta(1.0, 1.0), 1.0);
        assert!((eta(1.0, 2.0) - (3.0 - 7f64.sqrt())).abs() < 1e-14);
        assert!((eta(1.0, 2.0) - 0.354_249).abs() < 1e-6);
        assert_eq!(eta(-1.0, 1.0), 1.0);
    }

    #[test]
    fn effective_domain_examples() {
        assert!(in_effective_domain(0.0, 0.0));
        assert!(!in_effective_domain(0.0, -1.0 / 3.0));
        assert!(in_effective_domain(0.0, -0.3));
        assert!((eta(0.0, -0.3) - 0.9).abs() < 1e-15);
        assert!(!in_effective_domain(0.0, -0.5));
    }

    #[test]
    fn binary_quartic_examples() {
        assert!(binary_quartic_psd(1.0, 1.0, 1.0));
        assert!(!binary_quartic_psd(0.9, 1.0, 1.0));
        assert!(!binary_quartic_psd(0.0, 0.0, -1.0));
        assert_eq!(eta(0.0, -1.0), 3.0);
    }

    #[test]
    fn necessary_examples() {
        let rep = check_necessary(&GeneratingVector::new([1.0; 13]).unwrap());
        assert!(rep.overall);
        for r in rep.records.iter().filter(|r| r.id.starts_with("(6)") || r.id.starts_with("(7)") || r.id == "(8)") {
            assert_eq!((r.lhs, r.rhs), (8.0, 8.0));
        }

        let v = vec_with(&[(0, 1.0), (12, 1.0), (6, -1.0)]);
        let rep = check_necessary(&v);
        let r8 = rep.records.iter().find(|r| r.id == "(8)").unwrap();
        assert_eq!((r8.lhs, r8.rhs, r8.satisfied), (-4.0, 0.0, false));
        assert!(!rep.overall);
        assert!(v.evaluate(&r8.witness(&v)) < 0.0);

        let v = vec_with(&[(4, 1.0), (8, 1.0), (5, 1.0), (6, 1.0), (7, 1.0)]);
        let rep = check_necessary(&v);
        let c = rep.records.iter().find(|r| r.id == "cor1").unwrap();
        assert_eq!((c.lhs, c.rhs, c.satisfied), (1.0, 1.0, true));
    }

    #[test]
    fn report_ids_serialize() {
        let rep = check_necessary(&GeneratingVector::new([1.0; 13]).unwrap());
        let js = serde_json::to_value(&rep).unwrap();
        let ids: Vec<&str> = js["records"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
        assert_eq!(ids[0], "(5)i0");
        assert_eq!(ids[9], "(8)");
        assert_eq!(ids[10], "cor1");
        assert_eq!(js["overall"], true);
    }

    #[test]
    fn degenerate_examples() {
        let c = classify_degenerate(&vec_with(&[(0, 1.0), (12, 1.0)]));
        assert_eq!(c.tag, DegenerateTag::TriviallySos);

        let c = classify_degenerate(&vec_with(&[(4, 1.0)]));
        assert_eq!(c, DegenerateClass { tag: DegenerateTag::NotPsd, violating_index: Some(4) });

        let c = classify_degenerate(&GeneratingVector::new([1.0; 13]).unwrap());
        assert_eq!(c.tag, DegenerateTag::NonDegenerate);

        let c = classify_degenerate(&vec_with(&[(0, -1.0), (12, 1.0)]));
        assert_eq!(c, DegenerateClass { tag: DegenerateTag::NotPsd, violating_index: None });

        // v8 = 0 triggers the same pattern by reversal
        let c = classify_degenerate(&vec_with(&[(0, 1.0), (4, 2.0), (12, 1.0)]));
        assert_eq!(c, DegenerateClass { tag: DegenerateTag::NotPsd, violating_index: Some(4) });
    }
}
