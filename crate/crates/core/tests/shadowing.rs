use approx::assert_abs_diff_eq;

use shadowkit::bowen::{backward_map, check_self_tuning, forward_map, TUNING_GAIN, TUNING_LADDER};
use shadowkit::generate::random_point;
use shadowkit::suite::{cat_bowen, cat_cases, cat_system, ns_bowen, ns_start, ns_system, tuning_cases};
use shadowkit::systems::cat::{cat_bracket, CatBracket};
use shadowkit::systems::north_south::NsPoint;
use shadowkit::systems::sequence::{Alphabet, SequenceSystem};
use shadowkit::verify::{
    check_dyn_invariance, check_pseudo_orbit_map, check_shadowing_ladder, check_shift_invariance, limit_shadow_decay,
    ns_ends_in_balls, periodic_shadow_check, shadow_error,
};
use shadowkit::*;

#[test]
fn true_orbits_are_fixed() {
    let cat = cat_system();
    let pts: Vec<_> = (0..8).map(|s| random_point(&cat, s)).collect();
    assert!(check_pseudo_orbit_map(&cat_bowen(&cat), &cat, &pts, 40, 1e-12).passed);
    assert!(check_pseudo_orbit_map(&CatOracle, &cat, &pts, 40, 1e-12).passed);
    assert!(check_pseudo_orbit_map(&Projection { gamma: 1.0 }, &cat, &pts, 40, 0.0).passed);

    let ns = ns_system();
    let pts: Vec<_> = (0..8).map(|s| ns_start(&ns, s)).collect();
    let r = check_pseudo_orbit_map(&ns_bowen(&ns), &ns, &pts, 40, 1e-12);
    assert!(r.passed, "{}", r.line());
}

#[test]
fn forward_half_of_a_connecting_orbit_is_its_endpoint() {
    let cat = cat_system();
    let method = cat_bowen(&cat);
    let p = cat.point(0.41, 0.13);
    let q = cat.offset_eigen(&p, 3e-4, 2e-4);
    let x = connect(&cat, &p, &q, -40, 40).unwrap();
    let plus = forward_map(&cat, &CatBracket, &method.cfg, &x).unwrap();
    assert!(cat.dist(&plus.point, &q) < 1e-14);
    assert!(plus.stages.iter().all(|s| s.gap < 1e-14));
    let minus = backward_map(&cat, &CatBracket, &method.cfg, &x).unwrap();
    assert!(minus.stages.iter().all(|s| !s.forward));
}

#[test]
fn symmetric_shadow_of_a_connecting_orbit_is_the_bracket() {
    let cat = cat_system();
    let method = BowenMethod { symmetric: true, ..cat_bowen(&cat) };
    let plain = cat_bowen(&cat);
    for seed in 0..6 {
        let p = random_point(&cat, seed);
        let q = cat.offset_eigen(&p, 1e-3, -2e-3);
        let x = connect(&cat, &p, &q, -40, 40).unwrap();
        let r = method.apply(&cat, &x).unwrap();
        let (minus, _) = r.halves.clone().unwrap();
        assert!(cat.dist(&minus, &p) < 1e-14);
        let want = cat_bracket(&cat, &p, &q).unwrap();
        assert!(cat.dist(&r.point, &want) < 1e-14);
        assert!(cat.dist(&plain.apply(&cat, &x).unwrap().point, &want) < 1e-12);
    }
}

#[test]
fn symmetric_and_plain_agree_on_the_cat_map() {
    let cat = cat_system();
    let plain = cat_bowen(&cat);
    let sym = BowenMethod { symmetric: true, ..cat_bowen(&cat) };
    for x in cat_cases(&cat, Schedule::Constant { delta: 1e-4 }, 64, 0..10) {
        let a = plain.apply(&cat, &x).unwrap();
        let b = sym.apply(&cat, &x).unwrap();
        assert!(cat.dist(&a.point, &b.point) < 1e-12);
    }
}

#[test]
fn envelope_examples() {
    let cat = cat_system();
    let cfg = cat_bowen(&cat).cfg;
    assert_eq!(cfg.m, 1);
    let orbit = orbit_map(&cat, &cat.point(0.2, 0.3), -10, 10).unwrap();
    let env = Envelope::new(&cat, &cfg, &orbit);
    for i in -10..=10 {
        assert_eq!(env.at(i).upper(), 0.0);
    }

    // one jump of size d at index 4
    let p = cat.point(0.2, 0.3);
    let q = cat.offset(&apply_iter(&cat, &p, 4), 1e-4, 0.0);
    let x = connect(&cat, &apply_iter(&cat, &p, 4), &q, -14, 6).unwrap().shift(-4);
    let d = jumps(&cat, &x).get(4);
    assert_abs_diff_eq!(d, 1e-4, epsilon = 1e-16);
    let peak = cfg.kappa() * cfg.lip * d;
    assert_abs_diff_eq!(env.at(3).upper(), 0.0);
    let env = Envelope::new(&cat, &cfg, &x);
    // the block sum on the jump's side plus the bracket term c μ^{|i|} E(0)
    let e0 = peak / 8.0;
    let cross = |i: i32| cfg.c * cfg.mu.powi(i.abs()) * e0;
    assert_abs_diff_eq!(env.at(0).value, e0 + cross(0), epsilon = 1e-12 * peak);
    assert_abs_diff_eq!(env.at(3).value, peak + cross(3), epsilon = 1e-12 * peak);
    assert_abs_diff_eq!(env.at(5).value, peak / 4.0 + cross(5), epsilon = 1e-12 * peak);
    assert_abs_diff_eq!(env.at(-6).value, cross(-6), epsilon = 1e-12 * peak);
    let r = cat_bowen(&cat).apply(&cat, &x).unwrap();
    let errs = r.per_index_error.unwrap();
    for i in -10..=6 {
        assert!(errs.get(i).unwrap() <= env.certificate(i, r.tail_bound));
    }
}

#[test]
fn cat_bowen_is_shift_and_dynamically_invariant() {
    let cat = cat_system();
    let method = cat_bowen(&cat);
    let cases = cat_cases(&cat, Schedule::Constant { delta: 1e-4 }, 64, 0..6);
    let r = check_shift_invariance(&method, &cat, &cases[0], -5..=5, 1e-12);
    assert!(r.passed, "{}", r.line());
    assert!(check_dyn_invariance(&method, &cat, &cases, 1e-12).passed);
    assert!(check_dyn_invariance(&Projection { gamma: 1.0 }, &cat, &cases, 0.0).passed);
}

#[test]
fn ns_bowen_is_not_dynamically_invariant() {
    let ns = ns_system();
    let method = ns_bowen(&ns);
    // both ends in the transition region where the bump is strictly between 0 and 1
    let cases: Vec<_> = [0.22, 0.25, 0.28]
        .iter()
        .map(|&t| {
            let p = NsPoint::from_theta(t);
            let q = p.moved(ns.delta() / 2.0);
            connect(&ns, &p, &q, -120, 120).unwrap()
        })
        .collect();
    let r = check_dyn_invariance(&method, &ns, &cases, 1e-9);
    assert!(!r.passed, "{}", r.line());
}

#[test]
fn periodic_pseudo_orbits_have_periodic_shadows() {
    let cat = cat_system();
    let method = cat_bowen(&cat);
    let x = generate_cycle(&cat, &cat.point(0.0, 0.0), 1e-4, 7, 3).unwrap();
    let r = periodic_shadow_check(&method, &cat, &x, 1e-9);
    assert!(r.passed, "{}", r.line());
    assert!(periodic_shadow_check(&CatOracle, &cat, &x, 1e-9).passed);

    let orbit: Vec<_> = (0..10).map(|i| apply_iter(&cat, &cat.point(0.2, 0.4), i)).collect();
    let period = (1..10).find(|&n| cat.dist(&orbit[n], &orbit[0]) < 1e-12).unwrap();
    let exact = PseudoOrbit::new(0, orbit[..period].to_vec(), Extension::Periodic).unwrap();
    let r = method.apply(&cat, &exact).unwrap();
    assert!(cat.dist(&r.point, &orbit[0]) < 1e-12);

    let ns = ns_system();
    let fixed = PseudoOrbit::new(0, vec![NsPoint::south(0.0)], Extension::Periodic).unwrap();
    assert!(periodic_shadow_check(&ns_bowen(&ns), &ns, &fixed, 0.0).passed);
    // with m this large the backward half leaves the bracket domain near the attractor
    let x = generate_cycle(&ns, &NsPoint::south(0.01), 1e-3, 5, 1).unwrap();
    assert!(matches!(ns_bowen(&ns).apply(&ns, &x), Err(Error::OutOfDomain { .. } | Error::HalvesTooFar { .. })));

    let open = orbit_map(&cat, &cat.point(0.1, 0.1), 0, 4).unwrap();
    assert!(!periodic_shadow_check(&method, &cat, &open, 1.0).passed);
}

#[test]
fn limit_decay_on_connecting_orbits() {
    let cat = cat_system();
    let method = cat_bowen(&cat);
    let p = cat.point(0.6, 0.35);
    let x = connect(&cat, &p, &cat.offset(&p, 2e-3, 1e-3), -60, 60).unwrap();
    let r = limit_shadow_decay(&method, &cat, &x, Some(&method.cfg));
    assert!(r.passed, "{}", r.line());
    assert!(!limit_shadow_decay(&Projection { gamma: 1.0 }, &cat, &x, None).passed);

    let ns = ns_system();
    let p = NsPoint::south(0.05);
    let q = p.moved(ns.delta() / 2.0);
    let x = connect(&ns, &apply_iter(&ns, &p, 0), &q, -150, 150).unwrap();
    assert!(ns_ends_in_balls(&ns, &x));
    let r = limit_shadow_decay(&ns_bowen(&ns), &ns, &x, None);
    assert!(r.passed, "{}", r.line());
}

#[test]
fn shadowing_ladder_on_the_cat_map() {
    let cat = cat_system();
    let method = cat_bowen(&cat);
    let rungs: Vec<_> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&g| (g, cat_cases(&cat, Schedule::Constant { delta: g }, 32, 0..4)))
        .collect();
    let r = check_shadowing_ladder(&method, &cat, &rungs, 3, 100.0);
    assert!(r.passed, "{}", r.line());
    assert_eq!(r.metrics["directions_agree"], 1.0);
    // projection shadows nothing beyond index 0
    assert!(!check_shadowing_ladder(&Projection { gamma: 1.0 }, &cat, &rungs, 3, 100.0).passed);
}

#[test]
fn shift_invariant_methods_self_tune() {
    let sys = SequenceSystem::new(Alphabet { k: 3 }, 6);
    let x = generate(&sys, &random_point(&sys, 1), Schedule::Constant { delta: 0.3 }, -12, 12, 1).unwrap();
    let r = check_shift_invariance(&ShiftCanonical, &sys, &x, -4..=4, 0.0);
    assert!(r.passed, "{}", r.line());
    let cases = tuning_cases(&sys, |s| random_point(&sys, s), 0.25, 24, 2);
    let r = check_self_tuning(&ShiftCanonical, &sys, &cases, SeqMetric::default(), &TUNING_LADDER, TUNING_GAIN);
    assert!(r.passed, "{}", r.line());
}

#[test]
fn self_tuning_methods_decay_in_the_limit() {
    let cat = cat_system();
    let method = cat_bowen(&cat);
    let cases = tuning_cases(&cat, |s| random_point(&cat, s), 1e-3, 48, 3);
    let r = check_self_tuning(&method, &cat, &cases, SeqMetric::default(), &TUNING_LADDER, TUNING_GAIN);
    assert!(r.passed, "{}", r.line());
    let decaying = generate(&cat, &cat.point(0.3, 0.3), Schedule::GeometricDecay { delta: 1e-3 }, -60, 60, 5).unwrap();
    let r = limit_shadow_decay(&method, &cat, &decaying, Some(&method.cfg));
    assert!(r.passed, "{}", r.line());
    assert!(shadow_error(&cat, &method.apply(&cat, &decaying).unwrap().point, &decaying) < 1e-2);
}
