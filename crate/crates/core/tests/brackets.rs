use approx::assert_abs_diff_eq;

use shadowkit::bracket::{
    check_associativity, check_f_invariance, check_hyperbolic, check_identity_axiom, check_shadowing_bracket,
    check_uniform_contraction, induced_bracket,
};
use shadowkit::suite::{cat_bowen, cat_system};
use shadowkit::systems::cat::{cat_bracket, CatBracket};
use shadowkit::systems::north_south::{NorthSouth, NsBracket, NsPoint};
use shadowkit::systems::rotation::Rotation;
use shadowkit::systems::sequence::{Alphabet, SequenceSystem, ShiftBracket};
use shadowkit::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `[p, q] = q`.
struct SecondArg;

impl<S: MetricSystem> Bracket<S> for SecondArg {
    fn name(&self) -> String {
        "second".into()
    }
    fn radius(&self) -> f64 {
        0.1
    }
    fn eval(&self, _: &S, _: &S::Point, q: &S::Point) -> Result<S::Point> {
        Ok(q.clone())
    }
}

/// Moves `p` by a fixed amount, so `[p, p] != p`.
struct Nudge;

impl Bracket<Rotation> for Nudge {
    fn name(&self) -> String {
        "nudge".into()
    }
    fn radius(&self) -> f64 {
        0.1
    }
    fn eval(&self, _: &Rotation, p: &f64, _: &f64) -> Result<f64> {
        Ok((p + 1e-3).rem_euclid(1.0))
    }
}

#[test]
fn projection_bracket_is_identity_and_associative() {
    let r = Rotation::new(0.3);
    let s = Sampler::new(1, 50);
    let b = FirstArg { radius: 0.1 };
    assert!(check_identity_axiom(&b, &r, &s).passed);
    assert!(check_associativity(&b, &r, &s).passed);
    assert!(check_f_invariance(&b, &r, &s).passed);
    assert!(b.eval(&r, &0.1, &0.5).is_err());
}

#[test]
fn broken_bracket_fails_identity() {
    let r = Rotation::new(0.3);
    let report = check_identity_axiom(&Nudge, &r, &Sampler::new(2, 20));
    assert!(!report.passed);
    assert!(report.worst_slack < 0.0);
}

#[test]
fn rotation_has_no_hyperbolic_bracket() {
    let r = Rotation::new(0.3);
    let s = Sampler::new(3, 40);
    let b = FirstArg { radius: 0.05 };
    assert!(!check_hyperbolic(&b, &r, &s, 30).passed);
    assert!(!check_uniform_contraction(&b, &r, 1e-3, &s, 30).passed);
    assert!(!check_hyperbolic(&SecondArg, &r, &s, 30).passed);
}

#[test]
fn cat_bracket_examples() {
    let cat = cat_system();
    let o = cat.point(0.0, 0.0);
    assert_eq!(cat_bracket(&cat, &o, &o).unwrap(), o);

    let p = cat.point(0.31, 0.47);
    let q = cat.offset_eigen(&p, 2e-3, -1e-3);
    let z = cat_bracket(&cat, &p, &q).unwrap();
    // z is reached from p along the unstable line and from q along the stable line
    let (zu, zs) = cat.eigen_components(&p, &z);
    let (qu, qs) = cat.eigen_components(&p, &q);
    assert_abs_diff_eq!(zs, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(zu, qu, epsilon = 1e-15);
    assert_abs_diff_eq!(qs, -1e-3, epsilon = 1e-15);
    let far = cat.point(0.81, 0.47);
    assert!(cat_bracket(&cat, &p, &far).is_err());
}

#[test]
fn cat_bracket_contracts_along_orbits() {
    let cat = cat_system();
    let s = Sampler::new(4, 60);
    let r = check_hyperbolic(&CatBracket, &cat, &s, 30);
    assert!(r.passed, "{}", r.line());
    let eps = 2.0 * Bracket::<shadowkit::systems::cat::CatMap>::radius(&CatBracket);
    let sb = check_shadowing_bracket(&CatBracket, &cat, eps, 30, &s, BracketKind::Plain);
    assert!(sb.passed, "{}", sb.line());
    assert!(!check_shadowing_bracket(&CatBracket, &cat, 1e-6, 30, &s, BracketKind::Plain).passed);
    let lb = check_shadowing_bracket(&CatBracket, &cat, eps, 30, &s, BracketKind::Limit);
    assert!(lb.passed, "{}", lb.line());
}

#[test]
fn induced_bracket_matches_cat_bracket() {
    let cat = cat_system();
    let method = cat_bowen(&cat);
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = shadowkit::generate::random_point(&cat, seed);
        let q = cat.offset_eigen(&p, 1e-4 * (1.0 + rand::Rng::gen::<f64>(&mut rng)), -5e-5);
        let via_method = induced_bracket(&method, &cat, &p, &q, 60).unwrap();
        let via_oracle = induced_bracket(&CatOracle, &cat, &p, &q, 60).unwrap();
        let direct = cat_bracket(&cat, &p, &q).unwrap();
        assert!(cat.dist(&via_method, &direct) < 1e-12, "seed {seed}");
        assert!(cat.dist(&via_oracle, &direct) < 1e-12, "seed {seed}");
    }
    let p = cat.point(0.2, 0.2);
    assert_eq!(induced_bracket(&CatOracle, &cat, &p, &p, 20).unwrap(), p);
    assert!(induced_bracket(&CatOracle, &cat, &p, &cat.point(0.7, 0.2), 20).is_err());
}

#[test]
fn induced_bracket_on_shift_is_splice() {
    let sys = SequenceSystem::new(Alphabet { k: 3 }, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ind = InducedBracket { method: ShiftCanonical, window: 12 };
    for _ in 0..20 {
        let p = sys.random_seq(&mut rng, 6);
        let q = sys.random_seq(&mut rng, 6);
        let got = ind.eval(&sys, &p, &q).unwrap();
        assert_eq!(sys.dist(&got, &sys.splice(&p, &q)), 0.0);
        assert_eq!(sys.dist(&ShiftBracket.eval(&sys, &p, &q).unwrap(), &got), 0.0);
    }
}

#[test]
fn shift_bracket_axioms() {
    let sys = SequenceSystem::new(Alphabet { k: 2 }, 8);
    let s = Sampler::new(5, 50);
    assert!(check_identity_axiom(&ShiftBracket, &sys, &s).passed);
    assert!(check_associativity(&ShiftBracket, &sys, &s).passed);
    // the splice point moves with the shift
    assert!(!check_f_invariance(&ShiftBracket, &sys, &s).passed);
    let h = check_hyperbolic(&ShiftBracket, &sys, &s, 16);
    assert!(h.passed, "{}", h.line());
}

#[test]
fn ns_bracket_plateaus_and_failure_of_invariance() {
    let ns = NorthSouth::new(0.1).unwrap();
    let b = NsBracket::new(&ns);
    let s = NsPoint::south(0.0);
    let n = NsPoint::north(0.0);
    assert_eq!(ns.phi(&s), 0.0);
    assert_eq!(ns.phi(&n), 1.0);
    let near_s = NsPoint::south(0.05);
    let q = NsPoint::south(0.06);
    assert_eq!(b.eval(&ns, &near_s, &q).unwrap(), near_s);
    let near_n = NsPoint::north(0.05);
    let qn = NsPoint::north(0.06);
    assert_eq!(b.eval(&ns, &near_n, &qn).unwrap(), qn);
    assert!(b.eval(&ns, &near_s, &NsPoint::north(0.0)).is_err());

    let sampler = Sampler::new(6, 200);
    assert!(check_identity_axiom(&b, &ns, &sampler).passed);
    assert!(!check_f_invariance(&b, &ns, &sampler).passed);
}

#[test]
fn hyperbolic_bracket_is_a_shadowing_bracket() {
    let sys = SequenceSystem::new(Alphabet { k: 3 }, 8);
    let s = Sampler::new(7, 40);
    assert!(check_hyperbolic(&ShiftBracket, &sys, &s, 12).passed);
    let eps = sys.diam();
    assert!(check_shadowing_bracket(&ShiftBracket, &sys, eps, 40, &s, BracketKind::Plain).passed);
    assert!(check_shadowing_bracket(&ShiftBracket, &sys, eps, 40, &s, BracketKind::Limit).passed);
}
