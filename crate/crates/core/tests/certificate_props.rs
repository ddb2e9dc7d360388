use hankel_pns::certificates::{
    cone_certificate, cone_theta_min, ray_critical_value, segment_certificate, verify_certificate,
    CriticalCertificate,
};
use hankel_pns::sos::{m0, BisectionOptions};
use hankel_pns::{assemble, n0, SearchOptions};

fn sweep() -> Vec<(CriticalCertificate, f64)> {
    let mut out = Vec::new();
    for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        out.push((segment_certificate(t).unwrap(), 1e-9));
    }
    for b in [1.0, 1.5, 2.0, 3.0] {
        let t0 = cone_theta_min(b).unwrap();
        for th in [t0, t0 + 0.5, t0 + 2.0] {
            out.push((cone_certificate(b, th).unwrap(), 1e-8));
        }
    }
    out
}

#[test]
fn builders_verify_across_sweep() {
    for (c, tol) in sweep() {
        let r = verify_certificate(&c, tol).unwrap();
        assert!(r.passed, "{}: {:?}", c.p, r.checks);
    }
}

#[test]
fn tampering_is_detected() {
    for (c, tol) in sweep() {
        let scale = assemble(&c.p, c.m).to_quartic().scale();
        let delta = 1e-3 * scale;
        for (k, sq) in c.decomposition.squares.iter().enumerate() {
            if sq.weight == 0.0 {
                continue;
            }
            for i in 0..sq.form.len() {
                let mut bad = c.clone();
                bad.decomposition.squares[k].form[i] += delta;
                let r = verify_certificate(&bad, tol).unwrap();
                assert!(!r.passed, "{} square {k} entry {i}", c.p);
            }
            let mut bad = c.clone();
            bad.decomposition.squares[k].weight += delta;
            assert!(!verify_certificate(&bad, tol).unwrap().passed, "{} weight {k}", c.p);
        }
    }
}

#[test]
fn json_round_trip_preserves_verdict() {
    for (c, tol) in sweep() {
        let back = CriticalCertificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(verify_certificate(&back, tol).unwrap().passed);
    }
}

#[test]
fn solvers_agree_with_certificates() {
    let opts = BisectionOptions {
        allow_boundary: true,
        ..Default::default()
    };
    for (c, _) in sweep() {
        let m = m0(&c.p, &opts).unwrap().value;
        assert!((m - c.m).abs() <= 0.01 * c.m, "{}: m0 {m} vs M {}", c.p, c.m);
        // the segment ends sit on the domain boundary where n0 is undefined
        if let Ok(n) = n0(&c.p, &SearchOptions::default()) {
            assert!((n.value - c.m).abs() <= 0.01 * c.m, "{}: n0 {} vs M {}", c.p, n.value, c.m);
        }
    }
}

#[test]
fn ray_value_is_continuous_where_the_branches_switch() {
    let r0 = 2.0 * 5f64.sqrt() - 2.0;
    let left = ray_critical_value(r0 - 1e-9).unwrap();
    let right = ray_critical_value(r0 + 1e-9).unwrap();
    assert!((left - right).abs() < 1e-4);
    // away from the switch the value is smooth: second differences stay small
    for r in [1.0, 2.0, r0, 3.0, 4.0, 6.0] {
        let h = 1e-3;
        let d2 = ray_critical_value(r + h).unwrap() - 2.0 * ray_critical_value(r).unwrap()
            + ray_critical_value((r - h).max(0.0)).unwrap();
        assert!(d2.abs() < 1e-2, "rho {r}: {d2}");
    }
}
