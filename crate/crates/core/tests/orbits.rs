use approx::assert_abs_diff_eq;

use shadowkit::systems::cat::CatMap;
use shadowkit::systems::rotation::Rotation;
use shadowkit::*;

#[test]
fn apply_iter_on_cat() {
    let cat = CatMap::new(96);
    let p = cat.point(0.1, 0.2);
    assert_eq!(apply_iter(&cat, &p, 0), p);
    let (x, y) = cat.coords(&apply_iter(&cat, &p, 1));
    assert_abs_diff_eq!(x, 0.4, epsilon = 1e-15);
    assert_abs_diff_eq!(y, 0.3, epsilon = 1e-15);
    let o = cat.point(0.0, 0.0);
    assert_eq!(apply_iter(&cat, &o, 5), o);
    assert_eq!(apply_iter(&cat, &apply_iter(&cat, &p, -7), 7), p);
}

#[test]
fn orbit_map_on_cat() {
    let cat = CatMap::new(96);
    let p = cat.point(0.1, 0.2);
    let x = orbit_map(&cat, &p, -1, 1).unwrap();
    // A^{-1} = [[1,-1],[-1,2]]
    let (a, b) = cat.coords(&x.entries()[0]);
    assert_abs_diff_eq!(a, 0.9, epsilon = 1e-15);
    assert_abs_diff_eq!(b, 0.3, epsilon = 1e-15);
    assert_eq!(x.entries()[1], p);
    assert_eq!(discrepancy1(&cat, &x), 0.0);
    let fixed = orbit_map(&cat, &cat.point(0.0, 0.0), -3, 3).unwrap();
    assert!(fixed.entries().iter().all(|q| *q == fixed.entries()[0]));
}

#[test]
fn tilde_dist_examples() {
    let r = Rotation::new(0.1);
    let m = SeqMetric::new(0.5, 10).unwrap();
    let x = orbit_map(&r, &0.3, -4, 4).unwrap();
    assert_eq!(tilde_dist_s(&r, &x, &x, m).unwrap(), BoundedValue::exact(0.0));
    assert_abs_diff_eq!(2.0 * m.side_tail(1.0), 0.001953125, epsilon = 1e-15);

    // differ only at index 0 with everything else a shared true orbit
    let mut e = x.entries().to_vec();
    e[4] = 0.31;
    let y = PseudoOrbit::new(-4, e, Extension::OrbitCapped).unwrap();
    let d = tilde_dist_s(&r, &x, &y, m).unwrap();
    assert_abs_diff_eq!(d.value, 0.01, epsilon = 1e-15);
}

#[test]
fn connect_examples() {
    let r = Rotation::new(0.2);
    let same = connect(&r, &0.4, &0.4, -5, 5).unwrap();
    assert!(discrepancy1(&r, &same) < 1e-15);

    let x = connect(&r, &0.4, &0.43, -5, 5).unwrap();
    let js = jumps(&r, &x);
    assert_abs_diff_eq!(js.get(0), 0.03, epsilon = 1e-12);
    for i in (-4..=5).filter(|&i| i != 0) {
        assert!(js.get(i) < 1e-15, "jump at {i}");
    }
    assert_eq!(js.get(40), 0.0);
    assert_abs_diff_eq!(discrepancy1(&r, &x), js.get(0), epsilon = 0.0);
    assert!(connect(&r, &0.4, &0.4, 0, 5).is_err());
}

#[test]
fn orbit_cap_examples() {
    let r = Rotation::new(0.2);
    let x = generate(&r, &0.1, Schedule::Constant { delta: 1e-2 }, -6, 6, 3).unwrap();
    assert_eq!(orbit_cap(&x, 6).unwrap(), x);
    assert!(orbit_cap(&x, 7).is_err());
    // y_n agrees with x on ever larger windows
    for n in 1..=6 {
        let y = orbit_cap(&x, n).unwrap();
        for i in -n..=n {
            assert_eq!(y.at(&r, i), x.at(&r, i));
        }
    }
}

#[test]
fn periodic_jumps_include_wrap() {
    let r = Rotation::new(0.25);
    let x = PseudoOrbit::new(0, vec![0.0, 0.25, 0.5, 0.76], Extension::Periodic).unwrap();
    let js = jumps(&r, &x);
    assert!(js.is_periodic());
    assert_abs_diff_eq!(js.get(3), 0.01, epsilon = 1e-12);
    assert_abs_diff_eq!(js.get(0), 0.01, epsilon = 1e-12);
    assert_abs_diff_eq!(js.get(4), js.get(0), epsilon = 0.0);
    assert_abs_diff_eq!(discrepancy1(&r, &x), 0.01, epsilon = 1e-12);
}

#[test]
fn block_jump_examples() {
    let r = Rotation::new(0.25);
    let x = orbit_map(&r, &0.1, -5, 5).unwrap();
    assert_eq!(block_jumps(&jumps(&r, &x), 3, 1, 2.0), 0.0);
    let y = connect(&r, &0.1, &0.15, -5, 5).unwrap().shift(-1);
    // the single jump now sits at index 1: block 1 with m = 1 is L·δ_1
    assert_abs_diff_eq!(block_jumps(&jumps(&r, &y), 1, 1, 2.0), 0.1, epsilon = 1e-12);
}

#[test]
fn geom_sum_examples() {
    assert_eq!(lipschitz_geom_sum(1.0, 5), 5.0);
    assert_eq!(lipschitz_geom_sum(2.0, 3), 7.0);
}

#[test]
fn discrepancy2_vanishes_on_orbits_and_bounds_d1() {
    let cat = CatMap::new(128);
    let x = orbit_map(&cat, &cat.point(0.3, 0.7), -10, 10).unwrap();
    let d2 = discrepancy2(&cat, &x, SeqMetric::default()).unwrap();
    assert!(d2.value < 1e-15 && d2.tail_bound == 0.0);

    let y = generate(&cat, &cat.point(0.3, 0.7), Schedule::OneSpike { delta: 1e-3, index: 2 }, -10, 10, 1).unwrap();
    let d1 = discrepancy1(&cat, &y);
    let d2 = discrepancy2(&cat, &y, SeqMetric::default()).unwrap();
    assert!(d1 > 0.0 && d1 <= 2.0 * d2.upper());
    assert_eq!(discrepancy2(&cat, &y.shift(3), SeqMetric::default()).unwrap(), d2);
}

#[test]
fn orbit_json_round_trip() {
    use shadowkit::io::OrbitFile;
    let cat = CatMap::new(96);
    let x = generate(&cat, &cat.point(0.2, 0.4), Schedule::Constant { delta: 1e-4 }, -3, 3, 9).unwrap();
    let f = OrbitFile::from_orbit(&cat, &x, SeqMetric::default()).unwrap();
    assert!(f.d1.unwrap() <= 1e-4);
    let back: OrbitFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
    let y = back.to_orbit(&cat).unwrap();
    for (a, b) in x.entries().iter().zip(y.entries()) {
        assert!(cat.dist(a, b) < 1e-15);
    }
    assert!(back.to_orbit(&Rotation::new(0.1)).is_err());
}
