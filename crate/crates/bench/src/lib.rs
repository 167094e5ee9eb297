//! Fixtures shared by the benchmarks.

use shadowkit::suite::{cases, ns_start};
use shadowkit::systems::cat::CatMap;
use shadowkit::systems::north_south::{NorthSouth, NsPoint};
use shadowkit::{generate::random_point, PseudoOrbit, Schedule};

/// Constant-jump cat pseudo-orbits on `[-half, half]`.
pub fn cat_orbits(cat: &CatMap, half: i64, n: u64) -> Vec<PseudoOrbit<<CatMap as shadowkit::MetricSystem>::Point>> {
    cases(cat, |s| random_point(cat, s), Schedule::Constant { delta: 1e-4 }, half, 0..n)
}

/// North-south pseudo-orbits started in the transition region.
pub fn ns_orbits(ns: &NorthSouth, half: i64, n: u64) -> Vec<PseudoOrbit<NsPoint>> {
    cases(ns, |s| ns_start(ns, s), Schedule::Constant { delta: 1e-6 }, half, 0..n)
}
