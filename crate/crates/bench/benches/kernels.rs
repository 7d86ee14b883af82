use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spclust::rng::stream;
use spclust::{
    euclidean_distances, extended_hoshen_kopelman, generate_blobs, generate_circles, likelihood,
    mutual_knn_graph, pearson, strength_matrix, swendsen_wang_step, BondConfiguration, ClusterLabeling,
    GaParams, GaState, SpinState, StrengthGraph,
};

fn circles_graph(n: usize) -> StrengthGraph {
    let (data, _) = generate_circles(n, 0.5, 1).unwrap();
    let graph = mutual_knn_graph(&euclidean_distances(&data).unwrap(), 10).unwrap();
    strength_matrix(&graph)
}

fn sw_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("swendsen_wang_step");
    for n in [500, 2000] {
        let strengths = circles_graph(n);
        let mut rng = stream(1, &[n as u64]);
        let state = SpinState::random(n, 20, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| swendsen_wang_step(black_box(&state), &strengths, 0.05, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn hoshen_kopelman(c: &mut Criterion) {
    let strengths = circles_graph(2000);
    let bonds = BondConfiguration {
        active: (0..strengths.edges.len()).map(|e| e % 3 != 0).collect(),
    };
    c.bench_function("hoshen_kopelman/2000", |b| {
        b.iter(|| extended_hoshen_kopelman(black_box(&strengths), &bonds))
    });
}

fn cluster_likelihood(c: &mut Criterion) {
    let (data, truth) = generate_blobs(500, 100, &[0.25, 0.5, 1.0], 2).unwrap();
    let corr = pearson(&data).unwrap();
    let split = ClusterLabeling::from_raw(&(0..500).map(|i| i % 7).collect::<Vec<_>>());
    c.bench_function("likelihood/500/truth", |b| b.iter(|| likelihood(black_box(&truth), &corr).unwrap()));
    c.bench_function("likelihood/500/mixed", |b| b.iter(|| likelihood(black_box(&split), &corr).unwrap()));
}

fn ga_generation(c: &mut Criterion) {
    let (data, _) = generate_blobs(200, 100, &[0.25, 0.5, 1.0], 3).unwrap();
    let corr = pearson(&data).unwrap();
    let params = GaParams {
        seed: 5,
        ..GaParams::default()
    };
    let start = GaState::initial(&corr, &params);
    c.bench_function("ga_generation/200", |b| {
        b.iter_batched(
            || start.clone(),
            |mut state| {
                state.step(&corr, &params);
                state
            },
            criterion::BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, sw_step, hoshen_kopelman, cluster_likelihood, ga_generation);
criterion_main!(benches);
