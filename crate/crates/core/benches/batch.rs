use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uwram::batch::Exec;
use uwram::dp::{lcs_length, subset_sum};
use uwram::{Machine, WideConfig};

fn lcs_pairs(count: usize, len: usize) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..count)
        .map(|_| {
            let x = (0..len).map(|_| rng.gen_range(0..4)).collect();
            let y = (0..len).map(|_| rng.gen_range(0..4)).collect();
            (x, y)
        })
        .collect()
}

fn bench_lcs(c: &mut Criterion) {
    let pairs = lcs_pairs(32, 256);
    let mut g = c.benchmark_group("lcs_batch");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                exec.map(&pairs, |(x, y)| {
                    let mut m = Machine::new(WideConfig::new(64, 16).unwrap(), 1 << 16).unwrap();
                    lcs_length(&mut m, x, y, 4).unwrap()
                })
            })
        });
    }
    g.finish();
}

fn bench_subset_sum(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sets: Vec<Vec<u64>> = (0..32).map(|_| (0..32).map(|_| rng.gen_range(1..4096)).collect()).collect();
    let mut g = c.benchmark_group("subset_sum_batch");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                exec.map(&sets, |ws| {
                    let mut m = Machine::new(WideConfig::new(64, 8).unwrap(), 1 << 14).unwrap();
                    subset_sum(&mut m, ws, 1 << 16).unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_lcs, bench_subset_sum);
criterion_main!(benches);
