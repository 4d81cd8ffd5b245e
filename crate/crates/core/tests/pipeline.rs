use std::collections::HashSet;

use gnne_core::gnne::{entropy_scores, positivity_map, rank_gnne, train_feature_extractor, train_task_model, TrainConfig};
use gnne_core::graph::generate_ba;
use gnne_core::nn::Checkpoint;
use gnne_core::sir::{epidemic_threshold, sir_node_scores, SirConfig};
use gnne_core::RankedList;

#[test]
fn gnne_top_nodes_overlap_sir_ground_truth() {
    let g = generate_ba(100, 2, 21).unwrap();
    let cfg = TrainConfig { seed: 3, ..TrainConfig::default() };
    let beta = epidemic_threshold(&g).unwrap();
    let labels = sir_node_scores(&g, &SirConfig::new(beta), 1000, 9).unwrap();

    let fx = train_feature_extractor(&g, &cfg).unwrap();
    let trace = &fx.trained.loss_trace;
    assert!(trace.last().unwrap() < &trace[0]);
    assert_eq!(fx.features.shape(), (100, 64));

    let task = train_task_model(&g, &fx.features, &labels, &cfg).unwrap();
    assert!(task.loss_trace.last().unwrap() < &task.loss_trace[0]);

    let scores = rank_gnne(&g, &task.net, &cfg).unwrap();
    let truth = RankedList::from_scores(labels.clone());
    let top: HashSet<usize> = scores.ranking.top(10).into_iter().collect();
    let overlap = truth.top(10).into_iter().filter(|v| top.contains(v)).count();
    assert!(overlap >= 5, "overlap {overlap}");

    // Identical ranking from a model restored from its checkpoint.
    let restored = Checkpoint::from_json(&Checkpoint::new(task.net.clone()).to_json().unwrap()).unwrap();
    assert_eq!(rank_gnne(&g, &restored.model, &cfg).unwrap().ranking, scores.ranking);

    let y = positivity_map(&scores.influence);
    let scaled: Vec<f64> = y.iter().map(|v| v * 7.5).collect();
    let e1 = entropy_scores(&g, &y).unwrap();
    let e2 = entropy_scores(&g, &scaled).unwrap();
    assert!(e1.iter().zip(&e2).all(|(a, b)| (a - b).abs() <= 1e-12));
    assert_eq!(RankedList::from_scores(e1).order(), RankedList::from_scores(e2).order());
}
