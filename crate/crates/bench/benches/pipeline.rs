use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use d4ext::reduction::recheck_round;
use d4ext::ReductionInstance;
use d4ext_bench::{instances, pair};

fn reduce(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduce");
    g.sample_size(10);
    for (m, t, k) in [(1, 0, 200), (3, 2, 445_375)] {
        let all = instances(&pair(m, t, k));
        let (triple, case) = all.last().unwrap().clone();
        let inst = ReductionInstance::new(&triple, &case);
        g.bench_function(format!("{m}:{t} k={k} last case"), |b| {
            b.iter(|| inst.reduce().unwrap())
        });
        let outcome = inst.reduce().unwrap();
        g.bench_function(format!("{m}:{t} k={k} recheck"), |b| {
            b.iter(|| outcome.rounds.iter().all(|r| recheck_round(&inst, r).unwrap()))
        });
    }
    g.finish();
}

fn whole_pair(c: &mut Criterion) {
    let mut g = c.benchmark_group("pair");
    g.sample_size(10);
    let p = pair(2, 0, 5_000);
    g.bench_function("2:0 k=5000 reduce and finish", |b| {
        b.iter_batched(
            || instances(&p),
            |all| {
                for (triple, case) in all {
                    let inst = ReductionInstance::new(&triple, &case);
                    let out = inst.reduce().unwrap();
                    inst.finish(out.search_cap).unwrap();
                }
            },
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, reduce, whole_pair);
criterion_main!(benches);
