//! Targeted-attack robustness curves, threshold removal ratios, and the
//! per-method comparison report.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::centrality::{accumulate_over_sources, RankedList};
use crate::error::{Error, Result};
use crate::graph::{bfs_distances, Graph, UNREACHABLE};
use crate::sir::{epidemic_threshold, spreading_ability, SirConfig};

/// Removal schedule. `PerNode` visits every count `k = 0..=n`; `Step(s)`
/// visits `r = 0, s, 2s, ...` up to 1 and removes `floor(r n)` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    PerNode,
    Step(f64),
}

impl Grid {
    /// `(r, nodes removed)` pairs, strictly increasing in `r`, ending at 1.
    pub fn points(self, n: usize) -> Result<Vec<(f64, usize)>> {
        match self {
            Grid::PerNode => Ok((0..=n).map(|k| (k as f64 / n.max(1) as f64, k)).collect()),
            Grid::Step(step) => {
                if !(step > 0.0 && step <= 0.5) {
                    return Err(Error::invalid(format!("grid step {step} must lie in (0, 0.5]")));
                }
                let mut out = Vec::new();
                let mut i = 0usize;
                loop {
                    let r = i as f64 * step;
                    if r > 1.0 - 1e-9 {
                        break;
                    }
                    out.push((r, ((r * n as f64) + 1e-9).floor() as usize));
                    i += 1;
                }
                out.push((1.0, n));
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Lcc,
    Efficiency,
}

/// Population used in the efficiency denominator after removals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencyNorm {
    /// `N'(N' - 1)` over the surviving nodes.
    #[default]
    Survivors,
    /// `N(N - 1)` over the original node count.
    Original,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackCurve {
    pub method: String,
    pub metric: Metric,
    pub ratios: Vec<f64>,
    pub values: Vec<f64>,
}

impl AttackCurve {
    /// CSV with header `r,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,value")?;
        for (r, v) in self.ratios.iter().zip(&self.values) {
            writeln!(out, "{r},{v}")?;
        }
        Ok(())
    }
}

fn check_ranking(g: &Graph, ranking: &RankedList) -> Result<()> {
    if ranking.len() != g.node_count() {
        return Err(Error::invalid(format!(
            "ranking covers {} nodes, graph has {}",
            ranking.len(),
            g.node_count()
        )));
    }
    if g.node_count() == 0 {
        return Err(Error::invalid("graph has no nodes"));
    }
    Ok(())
}

/// Largest component size after removing the first `k` ranked nodes, for
/// every `k = 0..=n`. Built by re-inserting nodes in reverse order into a
/// union-find.
pub fn lcc_by_removals(g: &Graph, ranking: &RankedList) -> Result<Vec<usize>> {
    check_ranking(g, ranking)?;
    let n = g.node_count();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut size = vec![1usize; n];
    let mut present = vec![false; n];
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let up = parent[parent[x as usize] as usize];
            parent[x as usize] = up;
            x = up;
        }
        x
    }
    let mut out = vec![0usize; n + 1];
    let mut best = 0;
    for (k, &v) in ranking.order().iter().enumerate().rev() {
        present[v as usize] = true;
        best = best.max(1);
        for &u in g.neighbors(v as usize) {
            if !present[u as usize] {
                continue;
            }
            let (a, b) = (find(&mut parent, v), find(&mut parent, u));
            if a != b {
                let (big, small) = if size[a as usize] >= size[b as usize] { (a, b) } else { (b, a) };
                parent[small as usize] = big;
                size[big as usize] += size[small as usize];
                best = best.max(size[big as usize]);
            }
        }
        out[k] = best;
    }
    Ok(out)
}

/// `LCC(r) = N_lcc / N` under static removal in ranking order.
pub fn lcc_curve(g: &Graph, ranking: &RankedList, grid: Grid, method: &str) -> Result<AttackCurve> {
    let by_k = lcc_by_removals(g, ranking)?;
    let n = g.node_count() as f64;
    let (ratios, values) = grid
        .points(g.node_count())?
        .into_iter()
        .map(|(r, k)| (r, by_k[k] as f64 / n))
        .unzip();
    Ok(AttackCurve {
        method: method.to_string(),
        metric: Metric::Lcc,
        ratios,
        values,
    })
}

/// Mean inverse hop distance over ordered pairs of surviving nodes;
/// unreachable pairs contribute 0.
pub fn efficiency(g: &Graph, norm: EfficiencyNorm) -> f64 {
    let n = g.node_count();
    let population = match norm {
        EfficiencyNorm::Survivors => g.active_count(),
        EfficiencyNorm::Original => n,
    };
    if population < 2 {
        return 0.0;
    }
    let total = accumulate_over_sources(
        n,
        1,
        || (Vec::new(), VecDeque::new()),
        |s, acc, (dist, queue)| {
            if g.is_removed(s) || g.degree(s) == 0 {
                return;
            }
            bfs_distances(g, s, dist, queue);
            acc[0] += dist
                .iter()
                .filter(|&&d| d != UNREACHABLE && d > 0)
                .map(|&d| 1.0 / d as f64)
                .sum::<f64>();
        },
    )[0];
    total / (population as f64 * (population - 1) as f64)
}

/// Efficiency at each grid point under static removal in ranking order.
pub fn efficiency_curve(
    g: &Graph,
    ranking: &RankedList,
    grid: Grid,
    norm: EfficiencyNorm,
    method: &str,
) -> Result<AttackCurve> {
    check_ranking(g, ranking)?;
    let (ratios, values) = grid
        .points(g.node_count())?
        .into_iter()
        .map(|(r, k)| (r, efficiency(&g.remove_nodes(&ranking.top(k)), norm)))
        .unzip();
    Ok(AttackCurve {
        method: method.to_string(),
        metric: Metric::Efficiency,
        ratios,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRatio {
    pub ratio: f64,
    /// False when no grid point got down to the threshold; `ratio` is then 1.
    pub reached: bool,
}

/// Smallest grid ratio whose metric value is at most `threshold`.
pub fn removal_ratio_at(curve: &AttackCurve, threshold: f64) -> ThresholdRatio {
    curve
        .ratios
        .iter()
        .zip(&curve.values)
        .find(|(_, &v)| v <= threshold)
        .map_or(
            ThresholdRatio {
                ratio: 1.0,
                reached: false,
            },
            |(&r, _)| ThresholdRatio {
                ratio: r,
                reached: true,
            },
        )
}

/// Node-granular ratio at which efficiency first falls to `threshold`,
/// evaluating removals one node at a time and stopping at the first hit.
pub fn efficiency_ratio_at(
    g: &Graph,
    ranking: &RankedList,
    threshold: f64,
    norm: EfficiencyNorm,
) -> Result<ThresholdRatio> {
    check_ranking(g, ranking)?;
    let n = g.node_count();
    let order: Vec<usize> = ranking.order().iter().map(|&v| v as usize).collect();
    for k in 0..=n {
        if efficiency(&g.remove_nodes(&order[..k]), norm) <= threshold {
            return Ok(ThresholdRatio {
                ratio: k as f64 / n as f64,
                reached: true,
            });
        }
    }
    Ok(ThresholdRatio {
        ratio: 1.0,
        reached: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpreadSettings {
    pub top_frac: f64,
    pub runs: usize,
    /// Infection probability; the epidemic threshold when absent.
    pub beta: Option<f64>,
    pub seed: u64,
}

impl Default for SpreadSettings {
    fn default() -> Self {
        Self {
            top_frac: 0.05,
            runs: 1000,
            beta: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// Absolute LCC level for the attack table.
    pub lcc_threshold: f64,
    /// Efficiency level for the attack table, as a fraction of the intact value.
    pub efficiency_fraction: f64,
    pub efficiency_norm: EfficiencyNorm,
    /// Grid step of the curves written for plotting.
    pub figure_step: f64,
    /// Spreading evaluation; skipped when absent.
    pub spread: Option<SpreadSettings>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            lcc_threshold: 0.01,
            efficiency_fraction: 0.01,
            efficiency_norm: EfficiencyNorm::Survivors,
            figure_step: 0.02,
            spread: Some(SpreadSettings::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRow {
    pub method: String,
    pub lcc: ThresholdRatio,
    pub efficiency: ThresholdRatio,
    /// Mean `F` at the end of the spreading curve.
    pub spread_final: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub rows: Vec<MethodRow>,
    pub lcc_curves: Vec<AttackCurve>,
    pub efficiency_curves: Vec<AttackCurve>,
    /// `(method, mean F(t))`.
    pub spread_curves: Vec<(String, Vec<f64>)>,
    pub intact_efficiency: f64,
}

impl MethodReport {
    /// One row per method, in input order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "method,lcc_removal_ratio,lcc_reached,efficiency_removal_ratio,efficiency_reached,spread_final"
        )?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                row.method,
                row.lcc.ratio,
                row.lcc.reached,
                row.efficiency.ratio,
                row.efficiency.reached,
                row.spread_final.map_or(String::new(), |f| f.to_string())
            )?;
        }
        Ok(())
    }
}

/// Evaluates every ranking on `g`: threshold ratios on the node-granular
/// grid, curves on the figure grid, and optionally spreading curves.
pub fn compare_methods(g: &Graph, rankings: &[(String, RankedList)], cfg: &EvalConfig) -> Result<MethodReport> {
    let intact = efficiency(g, cfg.efficiency_norm);
    let eff_threshold = cfg.efficiency_fraction * intact;
    let figure = Grid::Step(cfg.figure_step);
    let spread_cfg = match &cfg.spread {
        Some(s) => Some((s, SirConfig::new(s.beta.map_or_else(|| epidemic_threshold(g), Ok)?))),
        None => None,
    };
    let mut report = MethodReport {
        rows: Vec::with_capacity(rankings.len()),
        lcc_curves: Vec::new(),
        efficiency_curves: Vec::new(),
        spread_curves: Vec::new(),
        intact_efficiency: intact,
    };
    for (name, ranking) in rankings {
        let lcc = removal_ratio_at(&lcc_curve(g, ranking, Grid::PerNode, name)?, cfg.lcc_threshold);
        let eff = efficiency_ratio_at(g, ranking, eff_threshold, cfg.efficiency_norm)?;
        report.lcc_curves.push(lcc_curve(g, ranking, figure, name)?);
        report
            .efficiency_curves
            .push(efficiency_curve(g, ranking, figure, cfg.efficiency_norm, name)?);
        let spread_final = match &spread_cfg {
            Some((s, sir)) => {
                let f = spreading_ability(g, ranking, s.top_frac, sir, s.runs, s.seed)?;
                let last = *f.last().expect("non-empty curve");
                report.spread_curves.push((name.clone(), f));
                Some(last)
            }
            None => None,
        };
        report.rows.push(MethodRow {
            method: name.clone(),
            lcc,
            efficiency: eff,
            spread_final,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::fixtures::{complete, path};
    use crate::centrality::{degree_centrality, random_ranking};
    use crate::graph::generate_ba;

    #[test]
    fn efficiency_examples() {
        assert_eq!(efficiency(&complete(5), EfficiencyNorm::Survivors), 1.0);
        assert!((efficiency(&path(3), EfficiencyNorm::Survivors) - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(efficiency(&Graph::empty(4), EfficiencyNorm::Survivors), 0.0);
    }

    #[test]
    fn efficiency_norms_after_removal() {
        let g = complete(6).remove_nodes(&[0, 1]);
        assert_eq!(efficiency(&g, EfficiencyNorm::Survivors), 1.0);
        assert!((efficiency(&g, EfficiencyNorm::Original) - 12.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn grids() {
        let p = Grid::Step(0.25).points(10).unwrap();
        assert_eq!(p, vec![(0.0, 0), (0.25, 2), (0.5, 5), (0.75, 7), (1.0, 10)]);
        let q = Grid::Step(0.02).points(100).unwrap();
        assert_eq!(q.len(), 51);
        assert!(q.iter().enumerate().all(|(i, &(_, k))| k == 2 * i));
        assert_eq!(Grid::PerNode.points(4).unwrap().len(), 5);
        assert!(Grid::Step(0.0).points(4).is_err());
        assert!(Grid::Step(0.6).points(4).is_err());
    }

    #[test]
    fn lcc_endpoints_and_monotone() {
        let g = generate_ba(200, 2, 3).unwrap();
        let rank = degree_centrality(&g).unwrap();
        let c = lcc_curve(&g, &rank, Grid::PerNode, "DC").unwrap();
        assert_eq!(c.values[0], 1.0);
        assert_eq!(*c.values.last().unwrap(), 0.0);
        assert!(c.values.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn lcc_matches_recomputation() {
        let g = generate_ba(120, 3, 6).unwrap();
        let rank = random_ranking(120, 2);
        let by_k = lcc_by_removals(&g, &rank).unwrap();
        for k in (0..=120).step_by(7) {
            assert_eq!(by_k[k], g.remove_nodes(&rank.top(k)).largest_component_size());
        }
    }

    #[test]
    fn degree_attack_beats_random() {
        let g = generate_ba(500, 2, 11).unwrap();
        let dc = lcc_curve(&g, &degree_centrality(&g).unwrap(), Grid::Step(0.02), "DC").unwrap();
        let at = |c: &AttackCurve| c.values[10];
        for seed in 0..5 {
            let rnd = lcc_curve(&g, &random_ranking(500, seed), Grid::Step(0.02), "RANDOM").unwrap();
            assert!(at(&dc) <= at(&rnd));
        }
    }

    #[test]
    fn complete_graph_efficiency_curve() {
        let g = complete(10);
        let rank = degree_centrality(&g).unwrap();
        let c = efficiency_curve(&g, &rank, Grid::PerNode, EfficiencyNorm::Original, "DC").unwrap();
        for (k, v) in c.values.iter().enumerate() {
            let m = (10 - k) as f64;
            assert!((v - m * (m - 1.0) / 90.0).abs() < 1e-15);
        }
    }

    #[test]
    fn threshold_lookup() {
        let curve = AttackCurve {
            method: "x".into(),
            metric: Metric::Lcc,
            ratios: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            values: vec![1.0, 0.5, 0.2, 0.01, 0.0],
        };
        assert_eq!(removal_ratio_at(&curve, 0.01).ratio, 0.3);
        assert_eq!(removal_ratio_at(&curve, 0.3).ratio, 0.2);
        let miss = removal_ratio_at(&curve, -1.0);
        assert!(!miss.reached && miss.ratio == 1.0);
    }

    #[test]
    fn report_rows_follow_input_order() {
        let g = generate_ba(80, 2, 1).unwrap();
        let rankings = vec![
            ("DC".to_string(), degree_centrality(&g).unwrap()),
            ("RANDOM".to_string(), random_ranking(80, 0)),
        ];
        let cfg = EvalConfig {
            spread: Some(SpreadSettings {
                runs: 20,
                ..SpreadSettings::default()
            }),
            ..EvalConfig::default()
        };
        let a = compare_methods(&g, &rankings, &cfg).unwrap();
        assert_eq!(a, compare_methods(&g, &rankings, &cfg).unwrap());
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let methods: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(methods, vec!["DC", "RANDOM"]);
        assert!(a.rows[0].lcc.ratio <= a.rows[1].lcc.ratio);
    }
}
