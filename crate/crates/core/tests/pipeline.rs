use eulertop::axisym::{quantized_x1, verify_axisym_period_with, AxisymTop};
use eulertop::biquadratic::{gamma_general, q_sequence, top_params};
use eulertop::eulermap::{euler_inverse, euler_step, invariants, orbit};
use eulertop::varieties::{rational_p3_invariants, v3_condition, xi_from_state};
use eulertop::{Axis, BodyState, ExactScalar, Precision, TopConfig};

fn q(n: i64, d: i64) -> ExactScalar {
    ExactScalar::new(n, d).unwrap()
}

fn flip(s: &BodyState<ExactScalar>, keep: usize) -> BodyState<ExactScalar> {
    let mut x = s.x.clone();
    for (k, v) in x.iter_mut().enumerate() {
        if k != keep {
            *v = -v.clone();
        }
    }
    BodyState { x }
}

#[test]
fn orbit_round_trip_and_conservation() {
    let cfg = TopConfig::new([q(1, 1), q(5, 2), q(7, 3)], q(-2, 3)).unwrap();
    let s = BodyState::new(q(1, 2), q(-3, 4), q(2, 5));
    let path = orbit(&cfg, &s, 5).unwrap();
    let h = invariants(&cfg, &s).unwrap();
    for p in &path {
        assert_eq!(invariants(&cfg, p).unwrap(), h);
    }
    let mut back = path[5].clone();
    for _ in 0..5 {
        back = euler_inverse(&cfg, &back).unwrap();
    }
    assert_eq!(back, s);
}

#[test]
fn map_commutes_with_double_sign_flips() {
    let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
    let s = BodyState::new(q(1, 3), q(2, 1), q(-1, 2));
    let image = euler_step(&cfg, &s).unwrap();
    for keep in 0..3 {
        assert_eq!(euler_step(&cfg, &flip(&s, keep)).unwrap(), flip(&image, keep));
    }
}

#[test]
fn exact_period_four_orbit_off_the_axes() {
    let cfg = TopConfig::from_ints(1, 3, 4).unwrap();
    let s = BodyState::from_ints(1, 3, 1);
    let path = orbit(&cfg, &s, 4).unwrap();
    assert_eq!(path[2], flip(&s, 0));
    assert_eq!(path[4], s);
    assert!(path[1..4].iter().all(|p| *p != s));
}

#[test]
fn rational_period3_invariants_kill_gamma3() {
    let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
    let h = rational_p3_invariants(&cfg, 1000).unwrap();
    assert_eq!((h.h1.clone(), h.h2.clone()), (q(-3, 4), q(621, 4)));
    for axis in 1..=3 {
        let p = top_params(&cfg, &h, Axis::new(axis).unwrap()).unwrap();
        assert!(gamma_general(3, &p).unwrap().is_zero(), "axis {axis}");
        let seq = q_sequence(&p, 3).unwrap();
        let q3 = &seq[2];
        assert!(q3.0.iter().enumerate().all(|(k, v)| (k == 2) != v.is_zero()), "axis {axis}: {q3:?}");
    }
}

#[test]
fn v3_over_scaled_denominator_is_conserved() {
    // The period-3 A-condition equals (A0/(1 - xi1))^2 v3, so v3/(1 - xi1)^2 is
    // constant along orbits and the zero set of v3 is invariant.
    let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
    let s = BodyState::new(q(1, 2), q(1, 3), q(1, 5));
    let scaled = |p: &BodyState<ExactScalar>| {
        let xi = xi_from_state(&cfg, p);
        let d = ExactScalar::one() - &xi.xi[0];
        v3_condition(&xi).checked_div(&(d.clone() * &d)).unwrap()
    };
    let v0 = scaled(&s);
    for p in &orbit(&cfg, &s, 3).unwrap()[1..] {
        assert_eq!(scaled(p), v0);
    }
}

#[test]
fn quantized_axisym_orbit_has_exact_period_four() {
    let top = AxisymTop::from_ints(2, 1).unwrap();
    let prec = Precision::new(256).unwrap();
    let x1 = quantized_x1(4, &top, prec).unwrap();
    for branch in &x1 {
        let cert = verify_axisym_period_with(4, &top, branch, &q(1, 1), &q(2, 1), prec).unwrap();
        assert!(cert.exact && cert.holds(), "{cert:?}");
    }
}

#[test]
fn serde_round_trip() {
    let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
    let s = BodyState::new(q(1, 2), q(-3, 4), q(2, 5));
    let cfg2: TopConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    let s2: BodyState<ExactScalar> = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(cfg2, cfg);
    assert_eq!(s2, s);
}
