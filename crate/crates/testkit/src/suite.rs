//! Library-versus-oracle sweep over every small connected graph.

use std::collections::BTreeMap;

use gnne_core::centrality::{
    betweenness, closeness, collective_influence, degree_centrality, eigenvector, harmonic, iks, random_ranking,
    shell_indices, DEFAULT_CI_RADIUS,
};
use gnne_core::evaluation::{efficiency, lcc_by_removals, EfficiencyNorm};
use gnne_core::{Graph, RankedList};

use crate::{brute, enumerate};

/// Largest absolute deviation seen per measure.
pub type Deviations = BTreeMap<&'static str, f64>;

fn record(dev: &mut Deviations, name: &'static str, got: &[f64], want: &[f64]) {
    assert_eq!(got.len(), want.len(), "{name}: length");
    let worst = got
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let slot = dev.entry(name).or_insert(0.0);
    *slot = slot.max(worst);
}

fn removal_orders(g: &Graph, salt: u64) -> Vec<RankedList> {
    vec![
        degree_centrality(g).expect("n >= 2"),
        random_ranking(g.node_count(), salt),
    ]
}

/// Compares every deterministic measure with its oracle on `g`.
pub fn compare_on(g: &Graph, salt: u64, dev: &mut Deviations) {
    let n = g.node_count();
    record(dev, "DC", degree_centrality(g).unwrap().scores(), &brute::degree(g));
    record(dev, "BC", betweenness(g).scores(), &brute::betweenness(g));
    record(dev, "CC", closeness(g).scores(), &brute::closeness(g));
    record(dev, "HC", harmonic(g).scores(), &brute::harmonic(g));
    record(
        dev,
        "CI",
        collective_influence(g, DEFAULT_CI_RADIUS).unwrap().scores(),
        &brute::collective_influence(g, DEFAULT_CI_RADIUS),
    );
    record(dev, "EC", eigenvector(g).unwrap().ranking.scores(), &brute::eigenvector(g).0);

    let cores = brute::core_numbers(g);
    let shells: Vec<f64> = shell_indices(g).iter().map(|&k| k as f64).collect();
    record(dev, "KSHELL", &shells, &cores.iter().map(|&k| k as f64).collect::<Vec<_>>());

    let keys = brute::iks_keys(g);
    let max_e = keys.iter().map(|k| k.1).fold(0.0, f64::max);
    let want: Vec<f64> = keys
        .iter()
        .map(|&(s, e)| 2.0 * s as f64 + if max_e > 0.0 { e / max_e } else { 0.0 })
        .collect();
    record(dev, "IKS", iks(g).scores(), &want);

    for order in removal_orders(g, salt) {
        let lcc = lcc_by_removals(g, &order).unwrap();
        for k in 0..=n {
            let mut removed = vec![false; n];
            for &v in &order.top(k) {
                removed[v] = true;
            }
            record(dev, "LCC", &[lcc[k] as f64], &[brute::largest_component(g, &removed) as f64]);
            let survivors = g.remove_nodes(&order.top(k));
            record(
                dev,
                "EFFICIENCY",
                &[efficiency(&survivors, EfficiencyNorm::Survivors)],
                &[brute::efficiency(g, &removed)],
            );
        }
    }
}

/// Runs [`compare_on`] over all connected graphs with `2 <= n <= max_n`.
/// Returns the number of graphs checked and the worst deviations.
pub fn oracle_sweep(max_n: usize) -> (usize, Deviations) {
    let mut dev = Deviations::new();
    let mut count = 0;
    for n in 2..=max_n {
        for (i, g) in enumerate::connected_graphs(n).iter().enumerate() {
            compare_on(g, i as u64, &mut dev);
            count += 1;
        }
    }
    (count, dev)
}
