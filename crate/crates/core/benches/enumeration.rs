//! Synthesis, interval consistency and brute-force enumeration on one thread
//! versus the default rayon pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;

use archdia::consistency::check_interval;
use archdia::dsl::parse_diagram;
use archdia::oracle::brute_force;
use archdia::synthesis::{enumerate_diagram, SynthesisConstraints};

const BLOCKS: &str = "type P(p) 4 type Q(q) 4 motif { P.p : 2 : 2, Q.q : 3 : 3 }";
const MASTER_SLAVE: &str =
    "type M(p) [1,4] type S(q) [1,6] motif { M.p : 1 : sc[1,5], S.q : 1 : mc[0,2] }";
const STAR: &str = "type C(p) 1 type L(q) 4 motif { C.p : 1 : mc[1,4], L.q : 1 : 1 }";

fn bench(c: &mut Criterion) {
    let single = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool = ThreadPoolBuilder::new().build().unwrap();

    let ex3 = parse_diagram(BLOCKS).unwrap();
    let ms = parse_diagram(MASTER_SLAVE).unwrap();
    let star = parse_diagram(STAR).unwrap();
    let star_cards = star.lower_cardinalities();
    let none = SynthesisConstraints::default();

    let mut g = c.benchmark_group("enumeration");
    g.sample_size(10);
    for (label, p) in [("sequential", &single), ("parallel", &pool)] {
        g.bench_with_input(BenchmarkId::new("synth_blocks", label), &ex3, |b, d| {
            b.iter(|| p.install(|| enumerate_diagram(d, &none).unwrap().len()))
        });
        g.bench_with_input(
            BenchmarkId::new("check_interval_master_slave", label),
            &ms,
            |b, d| b.iter(|| p.install(|| check_interval(d).consistent)),
        );
        g.bench_with_input(BenchmarkId::new("oracle_star", label), &star, |b, d| {
            b.iter(|| p.install(|| brute_force(d, &star_cards).unwrap().len()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
