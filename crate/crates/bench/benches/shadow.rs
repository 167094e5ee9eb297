use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shadowkit::suite::{cat_bowen, cat_system, ns_bowen, ns_system};
use shadowkit::{BowenMethod, CatOracle, ShadowingMethod};
use shadowkit_bench::{cat_orbits, ns_orbits};

fn cat(c: &mut Criterion) {
    let sys = cat_system();
    let bowen = cat_bowen(&sys);
    let mut g = c.benchmark_group("cat");
    for half in [32, 128] {
        let x = &cat_orbits(&sys, half, 1)[0];
        g.bench_with_input(BenchmarkId::new("bowen", half), x, |b, x| b.iter(|| bowen.apply(&sys, x).unwrap()));
        g.bench_with_input(BenchmarkId::new("oracle", half), x, |b, x| b.iter(|| CatOracle.apply(&sys, x).unwrap()));
    }
    g.finish();
}

fn north_south(c: &mut Criterion) {
    let sys = ns_system();
    let method = BowenMethod { symmetric: true, ..ns_bowen(&sys) };
    let x = &ns_orbits(&sys, 64, 1)[0];
    c.bench_function("ns/symmetric-bowen/64", |b| b.iter(|| method.apply(&sys, x).unwrap()));
}

criterion_group!(benches, cat, north_south);
criterion_main!(benches);
