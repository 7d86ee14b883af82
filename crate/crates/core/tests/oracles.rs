mod common;

use common::*;
use nalgebra::DMatrix;
use rand::Rng;
use spclust::rng::stream;
use spclust::*;

#[test]
fn hoshen_kopelman_matches_bfs() {
    let mut rng = stream(11, &[]);
    for _ in 0..1000 {
        let n = rng.random_range(1..=200);
        let p = rng.random_range(0.0..(6.0 / n as f64).min(1.0));
        let g = random_graph(n, p, &mut rng);
        let active: Vec<bool> = g.edges.iter().map(|_| rng.random_bool(0.6)).collect();
        let pairs: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.i, e.j)).collect();
        let expected = bfs_components(n, &pairs, &active);
        let got = extended_hoshen_kopelman(&g, &BondConfiguration { active });
        assert_eq!(got.labels(), &expected[..]);
    }
}

#[test]
fn hoshen_kopelman_trivial_cases() {
    let g = random_graph(5, 1.0, &mut stream(1, &[]));
    let none = extended_hoshen_kopelman(&g, &BondConfiguration::none(g.edges.len()));
    assert_eq!(none, ClusterLabeling::singletons(5));
    let chain = StrengthGraph::from_edges(
        4,
        (0..3).map(|i| StrengthEdge { i, j: i + 1, d: 1.0, strength: 1.0 }).collect(),
    );
    let one = extended_hoshen_kopelman(&chain, &BondConfiguration::all(3));
    assert_eq!(one.sizes(), vec![4]);
}

#[test]
fn kruskal_matches_prim() {
    let mut rng = stream(12, &[]);
    for _ in 0..200 {
        let n = rng.random_range(2..=40);
        let data = DataMatrix::from_rows(
            &(0..n).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect::<Vec<_>>(),
        );
        let d = euclidean_distances(&data).unwrap();
        let tree = minimum_spanning_tree(&d);
        assert_eq!(tree.edges.len(), n - 1);
        let prim = prim_weight(&d.values);
        assert!((tree.total_weight() - prim).abs() <= 1e-12 * prim.max(1.0));
    }
}

#[test]
fn ari_matches_pair_counting() {
    let mut rng = stream(13, &[]);
    for _ in 0..100 {
        let n = rng.random_range(2..=60);
        let ka = rng.random_range(1..=6);
        let kb = rng.random_range(1..=6);
        let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..ka)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..kb)).collect();
        let got = adjusted_rand_index(&ClusterLabeling::from_raw(&a), &ClusterLabeling::from_raw(&b)).unwrap();
        assert!((got - ari_by_pairs(&a, &b)).abs() <= 1e-12, "{got} vs {}", ari_by_pairs(&a, &b));
    }
}

#[test]
fn ari_hand_example_and_errors() {
    let a = ClusterLabeling::from_raw(&[0, 0, 1, 1]);
    let b = ClusterLabeling::from_raw(&[0, 0, 1, 2]);
    assert!((adjusted_rand_index(&a, &b).unwrap() - 4.0 / 7.0).abs() < 1e-15);
    assert!(adjusted_rand_index(&a, &ClusterLabeling::singletons(3)).is_err());
}

#[test]
fn ari_null_mean_is_near_zero() {
    let mut rng = stream(14, &[]);
    let sizes = [40usize, 30, 30];
    let base: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| vec![c; s]).collect();
    let a = ClusterLabeling::from_raw(&base);
    let mut total = 0.0;
    for _ in 0..1000 {
        let mut shuffled = base.clone();
        rand::seq::SliceRandom::shuffle(&mut shuffled[..], &mut rng);
        total += adjusted_rand_index(&a, &ClusterLabeling::from_raw(&shuffled)).unwrap();
    }
    assert!((total / 1000.0).abs() < 0.02);
}

/// Brute-force reading of the extraction rule on a full matrix.
fn extract_by_hand(g: &DMatrix<f64>, theta: f64) -> Vec<usize> {
    let n = g.nrows();
    let mut edges = Vec::new();
    for i in 0..n {
        let strong: Vec<usize> = (0..n).filter(|&j| j != i && g[(i, j)] > theta).collect();
        if strong.is_empty() {
            let best = (0..n)
                .filter(|&j| j != i)
                .fold(None, |acc: Option<usize>, j| match acc {
                    Some(b) if g[(i, b)] >= g[(i, j)] => Some(b),
                    _ => Some(j),
                })
                .unwrap();
            edges.push((i.min(best), i.max(best)));
        }
        edges.extend(strong.into_iter().map(|j| (i.min(j), i.max(j))));
    }
    bfs_components(n, &edges, &vec![true; edges.len()])
}

fn complete_graph(n: usize) -> NeighborGraph {
    let d = DistanceMatrix::new(DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 }));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    NeighborGraph::from_edges(&d, &pairs).unwrap()
}

#[test]
fn extraction_matches_brute_force() {
    let mut rng = stream(15, &[]);
    let graph = complete_graph(6);
    for _ in 0..200 {
        let mut g = DMatrix::from_element(6, 6, 0.05);
        for i in 0..6 {
            g[(i, i)] = 1.0;
            for j in (i + 1)..6 {
                let v = if rng.random_bool(0.5) { 0.05 + 0.01 * rng.random_range(0..90) as f64 } else { 0.05 };
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        for theta in [0.5, 0.99] {
            let got = extract_clusters(&g, theta, &graph).unwrap();
            assert_eq!(got.labels(), &extract_by_hand(&g, theta)[..]);
        }
    }
}

#[test]
fn block_g_recovers_blocks() {
    let blocks = [0usize, 0, 0, 1, 1, 2, 2, 2];
    let g = DMatrix::from_fn(8, 8, |i, j| {
        if i == j {
            1.0
        } else if blocks[i] == blocks[j] {
            0.9
        } else {
            0.05
        }
    });
    let graph = complete_graph(8);
    let expected = ClusterLabeling::from_raw(&blocks);
    assert_eq!(extract_clusters(&g, 0.5, &graph).unwrap(), expected);
    assert_eq!(extract_clusters(&g, 0.99, &graph).unwrap(), expected);
    let flat = DMatrix::from_fn(8, 8, |i, j| if i == j { 1.0 } else { 0.05 });
    // Every node falls back to its lowest-index best neighbor.
    assert_eq!(extract_clusters(&flat, 0.5, &graph).unwrap(), ClusterLabeling::single_cluster(8));
    assert!(extract_clusters(&g, 1.0, &graph).is_err());
}

#[test]
fn ga_finds_exhaustive_optimum_on_small_instances() {
    let mut rng = stream(16, &[]);
    for trial in 0..5 {
        let n = 6 + trial % 3;
        let (corr, _) = factor_model(n, 40, 2, &mut rng);
        let (labels, value) = exhaustive_best(&corr.values);
        let params = GaParams { pop_size: 30, max_generations: 2000, stall_generations: 2000, seed: trial as u64, ..GaParams::default() };
        let r = ga_run(&corr, &params).unwrap();
        assert_eq!(r.best, ClusterLabeling::from_raw(&labels));
        assert!((r.fitness - value).abs() <= 1e-12 * value.abs().max(1.0));
    }
}

#[test]
fn planted_blocks_beat_random_partitions() {
    let n = 20;
    let planted: Vec<usize> = (0..n).map(|i| i / 10).collect();
    let c = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if planted[i] == planted[j] {
            0.8
        } else {
            0.0
        }
    });
    let corr = CorrelationMatrix::new(c, CorrelationKind::Pearson);
    let truth = ClusterLabeling::from_raw(&planted);
    let lc_truth = likelihood(&truth, &corr).unwrap();
    let direct = 2.0 * lc_term(10, 10.0 + 90.0 * 0.8);
    assert!((lc_truth - direct).abs() < 1e-12);
    let mut rng = stream(17, &[]);
    for _ in 0..100_000 {
        let k = rng.random_range(1..=n);
        let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let l = ClusterLabeling::from_raw(&raw);
        if l != truth {
            assert!(likelihood(&l, &corr).unwrap() < lc_truth);
        }
    }
    let r = ga_run(&corr, &GaParams { seed: 3, ..GaParams::default() }).unwrap();
    assert_eq!(adjusted_rand_index(&r.best, &truth).unwrap(), 1.0);
    assert_eq!(r.fitness, lc_truth);
    assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn mutual_knn_examples() {
    let p = [0.0, 1.0, 2.0, 10.0f64];
    let d = DistanceMatrix::new(DMatrix::from_fn(4, 4, |i, j| (p[i] - p[j]).abs()));
    let g = mutual_knn_graph(&d, 1).unwrap();
    let pairs: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.i, e.j)).collect();
    assert_eq!(pairs, vec![(0, 1), (1, 2), (2, 3)]);
    assert!(g.is_connected());
}
