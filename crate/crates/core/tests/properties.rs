mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use spclust::rng::stream;
use spclust::*;

fn labels_strategy(max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(0..n, n))
}

fn is_sequential(l: &ClusterLabeling) -> bool {
    let mut next = 0;
    l.labels().iter().all(|&x| {
        if x == next {
            next += 1;
            true
        } else {
            x < next
        }
    })
}

fn random_corr(n: usize, seed: u64) -> CorrelationMatrix {
    factor_model(n, 30, 3, &mut stream(seed, &[])).0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labelings_are_sequential(raw in labels_strategy(40)) {
        let l = ClusterLabeling::from_raw(&raw);
        prop_assert!(is_sequential(&l));
        prop_assert_eq!(l.sizes().iter().sum::<usize>(), raw.len());
    }

    #[test]
    fn mutations_keep_valid_labelings(raw in labels_strategy(30), seed in any::<u64>(), k in 0usize..6) {
        let l = ClusterLabeling::from_raw(&raw);
        let kind = MutationKind::ALL[k];
        let m = mutate(&l, kind, &mut stream(seed, &[]));
        prop_assert_eq!(m.len(), l.len());
        prop_assert!(is_sequential(&m));
        match kind {
            MutationKind::Split if l.sizes().iter().any(|&s| s > 1) =>
                prop_assert_eq!(m.n_clusters(), l.n_clusters() + 1),
            MutationKind::Merge if l.n_clusters() > 1 =>
                prop_assert_eq!(m.n_clusters(), l.n_clusters() - 1),
            _ => {}
        }
    }

    #[test]
    fn likelihood_ignores_label_names(raw in labels_strategy(12), seed in any::<u64>()) {
        let corr = random_corr(raw.len(), seed);
        let renamed: Vec<usize> = raw.iter().map(|&x| 1000 - x).collect();
        let a = likelihood(&ClusterLabeling::from_raw(&raw), &corr).unwrap();
        let b = likelihood(&ClusterLabeling::from_raw(&renamed), &corr).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn likelihood_matches_formula(raw in labels_strategy(12), seed in any::<u64>()) {
        let corr = random_corr(raw.len(), seed);
        let l = ClusterLabeling::from_raw(&raw);
        let expected: f64 = l.members().iter().map(|m| {
            let c: f64 = m.iter().flat_map(|&i| m.iter().map(move |&j| (i, j))).map(|(i, j)| corr.get(i, j)).sum();
            lc_term(m.len(), c)
        }).sum();
        let got = likelihood(&l, &corr).unwrap();
        prop_assert!((got - expected).abs() <= 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn ari_is_symmetric(a in labels_strategy(30), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = stream(seed, &[]);
        let b: Vec<usize> = a.iter().map(|_| rng.random_range(0..4)).collect();
        let (la, lb) = (ClusterLabeling::from_raw(&a), ClusterLabeling::from_raw(&b));
        let x = adjusted_rand_index(&la, &lb).unwrap();
        let y = adjusted_rand_index(&lb, &la).unwrap();
        prop_assert!((x - y).abs() <= 1e-12);
        prop_assert!((-1.0..=1.0 + 1e-12).contains(&x));
        prop_assert_eq!(adjusted_rand_index(&la, &la).unwrap(), 1.0);
    }

    #[test]
    fn entropy_bounded_by_log_k(weights in prop::collection::vec(0.0f64..1.0, 1..30)) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        prop_assert!(entropy(&p) <= (p.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn free_energy_routes_agree_and_decrease(
        samples in prop::collection::vec(0.0f64..1.0, 1..400),
        t in 0.001f64..2.0,
    ) {
        let h = energy_histogram(&samples, 1.0).unwrap();
        let total: f64 = h.probabilities.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let f = free_energy(&h, t).unwrap();
        prop_assert!((f.f_direct - f.f_partition).abs() < 1e-9 * f.f_partition.abs().max(1.0));
        let hotter = free_energy(&h, t * 1.01).unwrap();
        prop_assert!(hotter.f_partition <= f.f_partition + 1e-12);
    }

    #[test]
    fn spin_correlations_within_bounds(seed in any::<u64>()) {
        let data = uniform_points(40, &mut stream(seed, &[]));
        let (_, s) = strengths_of(&data, 5);
        let params = ChainParams { m_steps: 60, burn_in: 10, ..ChainParams::default() };
        let stats = run_temperature(&s, 0.05, params, seed).unwrap();
        let g = stats.g_matrix().unwrap();
        let q = f64::from(params.q);
        for i in 0..40 {
            prop_assert_eq!(g[(i, i)], 1.0);
            for j in 0..40 {
                prop_assert!(g[(i, j)] >= 1.0 / q - 1e-15 && g[(i, j)] <= 1.0);
                prop_assert_eq!(g[(i, j)], g[(j, i)]);
            }
        }
        prop_assert!(stats.energy_samples.iter().all(|&e| e >= 0.0 && e <= s.h_max() * (1.0 + 1e-12)));
        prop_assert!((0.0..=1.0).contains(&stats.mean_magnetization));
        prop_assert!(stats.susceptibility >= 0.0);
    }

    #[test]
    fn sw_step_never_bonds_unequal_spins(seed in any::<u64>()) {
        // At T -> 0 every equal-spin bond opens, so SW clusters are exactly the
        // components of the equal-spin subgraph.
        let mut rng = stream(seed, &[]);
        let g = random_graph(30, 0.15, &mut rng);
        let state = SpinState::random(30, 3, &mut rng);
        let (_, clusters) = swendsen_wang_step(&state, &g, 1e-12, &mut rng).unwrap();
        let pairs: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.i, e.j)).collect();
        let same: Vec<bool> = pairs.iter().map(|&(i, j)| state.spins[i] == state.spins[j]).collect();
        prop_assert_eq!(clusters.labels(), &bfs_components(30, &pairs, &same)[..]);
    }

    #[test]
    fn wishart_band_is_ordered(n_obs in 2usize..2000, n_feat in 2usize..2000) {
        let b = wishart_bounds(n_obs, n_feat);
        prop_assert!(b.lambda_min >= 0.0 && b.lambda_min < b.lambda_max);
    }

    #[test]
    fn pd_repair_gives_unit_diagonal_and_positive_spectrum(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = stream(seed, &[]);
        let n = 6;
        let mut c = DMatrix::identity(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                c[(i, j)] = v;
                c[(j, i)] = v;
            }
        }
        let fixed = make_positive_definite(&CorrelationMatrix::new(c, CorrelationKind::Pearson));
        prop_assert!(fixed.min_eigenvalue() >= 1e-10 * 0.999);
        for i in 0..n {
            prop_assert!((fixed.get(i, i) - 1.0).abs() < 1e-12);
        }
        prop_assert_eq!(make_positive_definite(&fixed), fixed.clone());
    }
}

#[test]
fn bin_count_is_nondecreasing() {
    let mut prev = bin_count(1);
    for n in 2..=100_000 {
        let k = bin_count(n);
        assert!(k >= prev, "bin_count({n}) = {k} < {prev}");
        prev = k;
    }
}

#[test]
fn susceptibility_limits_on_uniform_points() {
    let data = uniform_points(80, &mut stream(21, &[]));
    let (_, s) = strengths_of(&data, 8);
    let params = ChainParams { m_steps: 300, burn_in: 60, ..ChainParams::default() };
    let cold = run_temperature(&s, 1e-6, params, 1).unwrap();
    let hot = run_temperature(&s, 1e3, params, 1).unwrap();
    assert!(cold.susceptibility < 1e-6);
    assert!(hot.susceptibility < 0.5);
    assert!(cold.mean_magnetization > hot.mean_magnetization);
}
