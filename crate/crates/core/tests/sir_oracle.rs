use gnne_core::graph::generate_ba;
use gnne_core::sir::{sir_run, SirConfig};
use gnne_core::Graph;
use gnne_testkit::sir_chain::expected_final_size;

fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))).unwrap()
}

fn mean_final_size(g: &Graph, beta: f64, runs: u64) -> f64 {
    let cfg = SirConfig::new(beta);
    (0..runs).map(|r| sir_run(g, &[0], &cfg, r).unwrap().final_size as f64).sum::<f64>() / runs as f64
}

#[test]
fn k4_matches_exact_chain() {
    let g = complete(4);
    let exact = expected_final_size(&g, 0.5, 0);
    let mc = mean_final_size(&g, 0.5, 10_000);
    assert!((mc - exact).abs() / exact < 0.02, "simulated {mc}, exact {exact}");
}

#[test]
fn small_ba_graphs_match_exact_chain() {
    for seed in 0..3 {
        let g = generate_ba(9, 2, seed).unwrap();
        for beta in [0.2, 0.6] {
            let exact = expected_final_size(&g, beta, 0);
            let mc = mean_final_size(&g, beta, 20_000);
            assert!((mc - exact).abs() / exact < 0.02, "seed {seed} beta {beta}: {mc} vs {exact}");
        }
    }
}

#[test]
fn mean_final_size_grows_with_beta() {
    let g = generate_ba(12, 2, 4).unwrap();
    let sizes: Vec<f64> = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|&b| mean_final_size(&g, b, 10_000)).collect();
    assert!(sizes.windows(2).all(|w| w[1] >= w[0]), "{sizes:?}");
}
