use hankel_pns::hankel::{assemble, GeneratingVector, SlicePoint, Vec4};
use proptest::prelude::*;

fn vector() -> impl Strategy<Value = GeneratingVector> {
    prop::array::uniform13(-5.0f64..5.0).prop_map(|a| GeneratingVector::new(a).unwrap())
}

fn point4() -> impl Strategy<Value = Vec4> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(Vec4)
}

fn slice() -> impl Strategy<Value = (SlicePoint, f64)> {
    (prop::array::uniform5(-3.0f64..3.0), -3.0f64..3.0)
        .prop_map(|(a, v0)| (SlicePoint::from_array(a).unwrap(), v0))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn evaluate_matches_oracle(v in vector(), x in point4()) {
        prop_assert!(rel(v.evaluate(&x), v.evaluate_oracle(&x)) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradient_matches_differences(v in vector(), x in point4()) {
        let g = v.gradient(&x);
        let h = 1e-5;
        for k in 0..4 {
            let mut a = x;
            let mut b = x;
            a.0[k] += h;
            b.0[k] -= h;
            let fd = (v.evaluate(&a) - v.evaluate(&b)) / (2.0 * h);
            let scale = g.norm().max(1.0);
            prop_assert!((fd - g.0[k]).abs() <= 1e-6 * scale, "k={} fd={} g={}", k, fd, g.0[k]);
        }
    }

    #[test]
    fn euler_identity(v in vector(), x in point4()) {
        let lhs = v.gradient(&x).dot(&x);
        let rhs = 4.0 * v.evaluate(&x);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0) * (1.0 + x.norm().powi(4)));
    }

    #[test]
    fn homogeneity(v in vector(), x in point4()) {
        let f = v.evaluate(&x);
        for t in [-2.0f64, 0.5, 3.0] {
            let ft = v.evaluate(&x.scale(t));
            prop_assert!(rel(ft, t.powi(4) * f) <= 1e-10 * t.powi(4).max(1.0));
        }
    }

    #[test]
    fn reversal_symmetry((p, v0) in slice(), x in point4()) {
        let v = assemble(&p, v0);
        prop_assert!(rel(v.evaluate(&x), v.evaluate(&x.reversed())) <= 1e-12 * (1.0 + x.norm().powi(4)) * 50.0);
    }

    #[test]
    fn odd_negation_covariance((p, v0) in slice(), x in point4()) {
        let flipped = Vec4::new(x.0[0], -x.0[1], x.0[2], -x.0[3]);
        let a = assemble(&p, v0).evaluate(&flipped);
        let b = assemble(&p.negate_odd(), v0).evaluate(&x);
        prop_assert!(rel(a, b) <= 1e-12 * (1.0 + x.norm().powi(4)) * 50.0);
    }

    #[test]
    fn quartic_form_agrees(v in vector(), x in point4()) {
        prop_assert!(rel(v.to_quartic().evaluate(&x), v.evaluate(&x)) <= 1e-10);
    }

    #[test]
    fn json_round_trip(v in vector()) {
        let s = serde_json::to_string(&v).unwrap();
        let back: GeneratingVector = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, v);
    }
}
