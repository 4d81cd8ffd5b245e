//! Discrete-time SIR spreading: per-node influence labels and F(t) curves.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::RankedList;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::stream;

/// Stream tag for [`spreading_ability`] runs, kept apart from per-node labels.
const SPREAD_STREAM: u64 = 0x5350_5245_4144;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirConfig {
    pub beta: f64,
    pub gamma: f64,
    pub max_steps: usize,
}

impl SirConfig {
    pub const DEFAULT_MAX_STEPS: usize = 10_000;

    /// `gamma = 1`, the setting used for both labels and spreading curves.
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            gamma: 1.0,
            max_steps: Self::DEFAULT_MAX_STEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("beta", self.beta), ("gamma", self.gamma)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} = {p} is not a probability")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps must be positive"));
        }
        Ok(())
    }
}

/// Compartment sizes after each step; entry 0 is the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SirCounts {
    pub susceptible: usize,
    pub infected: usize,
    pub recovered: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SirOutcome {
    pub trajectory: Vec<SirCounts>,
    /// Nodes ever infected (`I + R` at the last recorded step).
    pub final_size: usize,
}

/// `<k> / (<k^2> - <k>)`, moments over all nodes.
pub fn epidemic_threshold(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let (k1, k2) = (0..n).fold((0.0, 0.0), |(a, b), v| {
        let k = g.degree(v) as f64;
        (a + k, b + k * k)
    });
    let (k1, k2) = (k1 / n as f64, k2 / n as f64);
    if k2 - k1 <= 0.0 {
        return Err(Error::Degenerate(format!(
            "epidemic threshold undefined: <k^2> = {k2} does not exceed <k> = {k1}"
        )));
    }
    Ok(k1 / (k2 - k1))
}

const SUSCEPTIBLE: u8 = 0;
const INFECTED: u8 = 1;
const RECOVERED: u8 = 2;

/// Reusable buffers for repeated runs on one graph.
struct Sim {
    state: Vec<u8>,
    infected: Vec<u32>,
    next: Vec<u32>,
    touched: Vec<u32>,
}

impl Sim {
    fn new(n: usize) -> Self {
        Self {
            state: vec![SUSCEPTIBLE; n],
            infected: Vec::new(),
            next: Vec::new(),
            touched: Vec::new(),
        }
    }

    /// Runs one epidemic, calling `record` with `(S, I, R)` after seeding and
    /// after every step. `S` is counted down separately from the infected
    /// and recovered sets. Returns the number of nodes ever infected.
    fn run<R: Rng>(
        &mut self,
        g: &Graph,
        seeds: &[usize],
        cfg: &SirConfig,
        rng: &mut R,
        mut record: impl FnMut(usize, usize, usize),
    ) -> usize {
        for &v in &self.touched {
            self.state[v as usize] = SUSCEPTIBLE;
        }
        self.touched.clear();
        self.infected.clear();
        let mut susceptible = self.state.len();
        for &s in seeds {
            if self.state[s] == SUSCEPTIBLE {
                self.state[s] = INFECTED;
                self.infected.push(s as u32);
                self.touched.push(s as u32);
                susceptible -= 1;
            }
        }
        let mut recovered = 0;
        record(susceptible, self.infected.len(), recovered);
        let mut steps = 0;
        while !self.infected.is_empty() && steps < cfg.max_steps {
            self.next.clear();
            for &i in &self.infected {
                for &j in g.neighbors(i as usize) {
                    if self.state[j as usize] == SUSCEPTIBLE && rng.gen::<f64>() < cfg.beta {
                        self.state[j as usize] = INFECTED;
                        self.next.push(j);
                        self.touched.push(j);
                        susceptible -= 1;
                    }
                }
            }
            // Recovery is attempted after this step's infection attempts;
            // nodes infected just now start spreading on the next step.
            let mut still = Vec::new();
            for &i in &self.infected {
                if cfg.gamma >= 1.0 || rng.gen::<f64>() < cfg.gamma {
                    self.state[i as usize] = RECOVERED;
                    recovered += 1;
                } else {
                    still.push(i);
                }
            }
            still.extend_from_slice(&self.next);
            self.infected = still;
            steps += 1;
            record(susceptible, self.infected.len(), recovered);
        }
        self.touched.len()
    }
}

fn check_seeds(g: &Graph, seeds: &[usize]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::invalid("SIR needs at least one initial infected node"));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= g.node_count()) {
        return Err(Error::invalid(format!("seed node {bad} is out of range")));
    }
    Ok(())
}

/// One synchronous SIR realization from `seeds`, driven by `rng_seed`.
pub fn sir_run(g: &Graph, seeds: &[usize], cfg: &SirConfig, rng_seed: u64) -> Result<SirOutcome> {
    cfg.validate()?;
    check_seeds(g, seeds)?;
    let n = g.node_count();
    let mut rng = stream(rng_seed, 0, 0);
    let mut trajectory = Vec::new();
    let final_size = Sim::new(n).run(g, seeds, cfg, &mut rng, |s, i, r| {
        trajectory.push(SirCounts {
            susceptible: s,
            infected: i,
            recovered: r,
        })
    });
    Ok(SirOutcome {
        trajectory,
        final_size,
    })
}

/// Mean number of nodes ever infected when each node alone seeds the
/// epidemic, over `runs` realizations per node. Run `r` from node `v` uses
/// the stream derived from `(base_seed, v, r)`, so the result does not
/// depend on thread count.
pub fn sir_node_scores(g: &Graph, cfg: &SirConfig, runs: usize, base_seed: u64) -> Result<Vec<f64>> {
    cfg.validate()?;
    if runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    let n = g.node_count();
    Ok((0..n)
        .into_par_iter()
        .map_init(
            || Sim::new(n),
            |sim, v| {
                let total: usize = (0..runs)
                    .map(|r| {
                        let mut rng = stream(base_seed, v as u64, r as u64);
                        sim.run(g, &[v], cfg, &mut rng, |_, _, _| {})
                    })
                    .sum();
                total as f64 / runs as f64
            },
        )
        .collect())
}

/// Mean `F(t) = I(t) + R(t)` when the top `ceil(top_frac * n)` nodes of
/// `ranking` are infected at `t = 0`. Shorter runs are padded with their
/// final value.
pub fn spreading_ability(
    g: &Graph,
    ranking: &RankedList,
    top_frac: f64,
    cfg: &SirConfig,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(top_frac > 0.0 && top_frac < 1.0) {
        return Err(Error::invalid(format!("top_frac = {top_frac} must lie in (0, 1)")));
    }
    if runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    let n = g.node_count();
    if ranking.len() != n {
        return Err(Error::invalid(format!(
            "ranking covers {} nodes, graph has {n}",
            ranking.len()
        )));
    }
    let k = ((top_frac * n as f64).ceil() as usize).clamp(1, n);
    let seeds = ranking.top(k);
    let curves: Vec<Vec<usize>> = (0..runs)
        .into_par_iter()
        .map_init(
            || Sim::new(n),
            |sim, r| {
                let mut rng = stream(base_seed, SPREAD_STREAM, r as u64);
                let mut f = Vec::new();
                sim.run(g, &seeds, cfg, &mut rng, |_, i, rec| f.push(i + rec));
                f
            },
        )
        .collect();
    let len = curves.iter().map(Vec::len).max().unwrap_or(1);
    let mut mean = vec![0.0; len];
    for c in &curves {
        let last = *c.last().unwrap();
        for (t, m) in mean.iter_mut().enumerate() {
            *m += *c.get(t).unwrap_or(&last) as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= runs as f64);
    Ok(mean)
}

/// Writes a spreading curve as `t,F_mean`.
pub fn write_spread_csv<W: Write>(curve: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "t,F_mean")?;
    for (t, f) in curve.iter().enumerate() {
        writeln!(out, "{t},{f}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::fixtures::{complete, path, star};
    use crate::centrality::degree_centrality;
    use crate::graph::generate_ba;

    #[test]
    fn thresholds() {
        assert_eq!(epidemic_threshold(&complete(4)).unwrap(), 0.5);
        assert!((epidemic_threshold(&complete(6)).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(epidemic_threshold(&path(2)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn zero_beta_infects_only_seeds() {
        let g = generate_ba(50, 2, 1).unwrap();
        let out = sir_run(&g, &[0, 3, 7], &SirConfig::new(0.0), 9).unwrap();
        assert_eq!(out.final_size, 3);
        assert_eq!(out.trajectory.last().unwrap().recovered, 3);
        let scores = sir_node_scores(&g, &SirConfig::new(0.0), 5, 1).unwrap();
        assert!(scores.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn certain_infection_follows_bfs_layers() {
        let g = path(5);
        let out = sir_run(&g, &[0], &SirConfig::new(1.0), 3).unwrap();
        let infected: Vec<usize> = out.trajectory.iter().map(|c| c.infected).collect();
        assert_eq!(infected, vec![1, 1, 1, 1, 1, 0]);
        assert_eq!(out.final_size, 5);
    }

    #[test]
    fn conservation_and_monotone_recovered() {
        let g = generate_ba(200, 3, 2).unwrap();
        let cfg = SirConfig {
            beta: 0.2,
            gamma: 0.6,
            max_steps: 500,
        };
        for seed in 0..20 {
            let out = sir_run(&g, &[seed as usize], &cfg, seed).unwrap();
            let mut last_r = 0;
            for c in &out.trajectory {
                assert_eq!(c.susceptible + c.infected + c.recovered, 200);
                assert!(c.recovered >= last_r);
                last_r = c.recovered;
            }
            assert_eq!(out.trajectory.last().unwrap().infected, 0);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let g = generate_ba(100, 2, 5).unwrap();
        let cfg = SirConfig::new(0.3);
        assert_eq!(
            sir_run(&g, &[1], &cfg, 11).unwrap(),
            sir_run(&g, &[1], &cfg, 11).unwrap()
        );
        assert_eq!(
            sir_node_scores(&g, &cfg, 20, 4).unwrap(),
            sir_node_scores(&g, &cfg, 20, 4).unwrap()
        );
    }

    #[test]
    fn hub_outspreads_leaf() {
        let g = star(10);
        let s = sir_node_scores(&g, &SirConfig::new(0.5), 10_000, 0).unwrap();
        // hub: 1 + 10 * 0.5 = 6; leaf: 1 + 0.5 * (1 + 9 * 0.5) = 3.75
        assert!((s[0] - 6.0).abs() < 0.1, "{}", s[0]);
        assert!((s[1] - 3.75).abs() < 0.1, "{}", s[1]);
    }

    #[test]
    fn spreading_curve_shape() {
        let g = generate_ba(300, 2, 8).unwrap();
        let rank = degree_centrality(&g).unwrap();
        let beta = epidemic_threshold(&g).unwrap();
        let f = spreading_ability(&g, &rank, 0.05, &SirConfig::new(beta), 200, 3).unwrap();
        assert_eq!(f[0], 15.0);
        assert!(f.windows(2).all(|w| w[1] >= w[0]));
        let flat = spreading_ability(&g, &rank, 0.05, &SirConfig::new(0.0), 10, 3).unwrap();
        assert_eq!(flat, vec![15.0, 15.0]);
        let mut csv = Vec::new();
        write_spread_csv(&flat, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "t,F_mean\n0,15\n1,15\n");
    }

    #[test]
    fn rejects_bad_input() {
        let g = path(3);
        assert!(sir_run(&g, &[], &SirConfig::new(0.5), 0).is_err());
        assert!(sir_run(&g, &[5], &SirConfig::new(0.5), 0).is_err());
        assert!(sir_run(&g, &[0], &SirConfig::new(1.5), 0).is_err());
        assert!(sir_node_scores(&g, &SirConfig::new(0.5), 0, 0).is_err());
    }
}
