use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarmclust::fcm::fuzzy_objective;
use swarmclust::kmeans::{distance_sum_flat, hard_cost_flat};
use swarmclust::{run_algorithm, Algorithm, ClusteringParams, Dataset, Fuzzifier, RngSeed};

fn random_dataset(n: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * d).map(|_| rng.random::<f64>()).collect();
    Dataset::new("random", values, d, None).unwrap()
}

fn objectives(c: &mut Criterion) {
    let mut group = c.benchmark_group("objective");
    for &(n, d, k) in &[(150, 4, 3), (699, 9, 2), (208, 60, 2)] {
        let data = random_dataset(n, d, 1);
        let centres: Vec<f64> = data.features()[..k * d].to_vec();
        let id = format!("{n}x{d}/c{k}");
        group.bench_with_input(BenchmarkId::new("fuzzy", &id), &centres, |b, x| {
            b.iter(|| fuzzy_objective(x, &data, Fuzzifier::default()))
        });
        group.bench_with_input(BenchmarkId::new("distance_sum", &id), &centres, |b, x| {
            b.iter(|| distance_sum_flat(x, &data))
        });
        group.bench_with_input(BenchmarkId::new("quantization_error", &id), &centres, |b, x| {
            b.iter(|| hard_cost_flat(x, &data))
        });
    }
    group.finish();
}

fn clusterers(c: &mut Criterion) {
    let data = random_dataset(208, 60, 2);
    let mut params = ClusteringParams::new(2);
    params.swarm.max_iter = 50;
    let mut group = c.benchmark_group("clusterer_208x60");
    group.sample_size(10);
    for alg in [Algorithm::FcmQpso, Algorithm::QpsoKMeans, Algorithm::PsoKMeans] {
        group.bench_function(alg.name(), |b| {
            b.iter(|| run_algorithm(alg, &data, &params, RngSeed::new(0, 0)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, objectives, clusterers);
criterion_main!(benches);
