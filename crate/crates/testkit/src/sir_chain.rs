//! Exact expected outbreak size of synchronous SIR with recovery
//! probability 1, by summing over every infection pattern.
//!
//! With certain recovery each infected node is active for exactly one step,
//! so the state `(infected, recovered)` strictly grows and the recursion
//! terminates. Each susceptible node with `c` infected neighbors is infected
//! independently with probability `1 - (1 - beta)^c`.

use std::collections::HashMap;

use gnne_core::Graph;

pub fn expected_final_size(g: &Graph, beta: f64, seed: usize) -> f64 {
    let n = g.node_count();
    assert!(n <= 20, "exhaustive chain limited to small graphs");
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut memo = HashMap::new();
    expand(&nbr, beta, 1 << seed, 0, &mut memo)
}

fn expand(nbr: &[u32], beta: f64, infected: u32, recovered: u32, memo: &mut HashMap<(u32, u32), f64>) -> f64 {
    if infected == 0 {
        return recovered.count_ones() as f64;
    }
    if let Some(&v) = memo.get(&(infected, recovered)) {
        return v;
    }
    let n = nbr.len();
    let touched = infected | recovered;
    let candidates: Vec<(usize, f64)> = (0..n)
        .filter(|&v| touched >> v & 1 == 0)
        .filter_map(|v| {
            let c = (nbr[v] & infected).count_ones();
            (c > 0).then(|| (v, 1.0 - (1.0 - beta).powi(c as i32)))
        })
        .collect();
    let next_recovered = recovered | infected;
    let mut total = 0.0;
    for pattern in 0u32..(1 << candidates.len()) {
        let mut p = 1.0;
        let mut next = 0u32;
        for (bit, &(v, q)) in candidates.iter().enumerate() {
            if pattern >> bit & 1 == 1 {
                p *= q;
                next |= 1 << v;
            } else {
                p *= 1.0 - q;
            }
        }
        if p > 0.0 {
            total += p * expand(nbr, beta, next, next_recovered, memo);
        }
    }
    memo.insert((infected, recovered), total);
    total
}
