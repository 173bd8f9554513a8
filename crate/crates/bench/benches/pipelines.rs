use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use frobenius_forge::catalog::{get_unfolding, LieType};
use frobenius_forge::poly::{roots_from_coeffs, RootConfig};
use frobenius_forge::saito::FrobeniusData;
use frobenius_forge::toda::TodaModel;

fn bench_frobenius_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("frobenius-build");
    group.sample_size(10);
    for rank in 1..=5usize {
        let spec = get_unfolding(LieType::A, rank).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(rank), &spec, |bch, spec| {
            bch.iter(|| FrobeniusData::build(spec).unwrap());
        });
    }
    group.finish();
}

fn bench_root_finder(c: &mut Criterion) {
    let mut group = c.benchmark_group("root-finder");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for degree in [4usize, 8, 16] {
        let coeffs: Vec<Complex64> = (0..degree)
            .map(|_| {
                Complex64::new(
                    rand::Rng::gen_range(&mut rng, -2.0..2.0),
                    rand::Rng::gen_range(&mut rng, -2.0..2.0),
                )
            })
            .chain(std::iter::once(Complex64::new(1.0, 0.0)))
            .collect();
        group.bench_with_input(
            BenchmarkId::from_parameter(degree),
            &coeffs,
            |bch, coeffs| {
                bch.iter(|| roots_from_coeffs(coeffs, &RootConfig::default()).unwrap());
            },
        );
    }
    group.finish();
}

fn bench_toda_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("toda-gen-wdvv");
    group.sample_size(10);
    for n in [3usize, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, &n| {
            let model = TodaModel::new(n).unwrap();
            bch.iter(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
                model.gen_wdvv_check(50, 1e-9, &mut rng).unwrap()
            });
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_frobenius_build,
    bench_root_finder,
    bench_toda_batch
);
criterion_main!(benches);
