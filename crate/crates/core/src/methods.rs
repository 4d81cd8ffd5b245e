//! Registry of ranking methods by name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::centrality::{
    betweenness, closeness, collective_influence, degree_centrality, eigenvector, gehc, harmonic, iks, k_shell,
    random_ranking, RankedList, DEFAULT_CI_RADIUS,
};
use crate::error::{Error, Result};
use crate::gnne::{rank_baseline, rank_gnne, TrainConfig};
use crate::graph::Graph;
use crate::matrix::DenseMatrix;
use crate::nn::GraphNet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    Hc,
    Dc,
    Ci,
    Cc,
    Ec,
    Bc,
    KShell,
    Iks,
    Gat,
    Gcn,
    Gehc,
    Gnne,
    Random,
}

impl Method {
    pub const ALL: [Method; 13] = [
        Method::Hc,
        Method::Dc,
        Method::Ci,
        Method::Cc,
        Method::Ec,
        Method::Bc,
        Method::KShell,
        Method::Iks,
        Method::Gat,
        Method::Gcn,
        Method::Gehc,
        Method::Gnne,
        Method::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hc => "HC",
            Method::Dc => "DC",
            Method::Ci => "CI",
            Method::Cc => "CC",
            Method::Ec => "EC",
            Method::Bc => "BC",
            Method::KShell => "KSHELL",
            Method::Iks => "IKS",
            Method::Gat => "GAT",
            Method::Gcn => "GCN",
            Method::Gehc => "GEHC",
            Method::Gnne => "GNNE",
            Method::Random => "RANDOM",
        }
    }

    /// Whether the method needs walk embeddings of the graph being ranked.
    pub fn needs_embedding(self) -> bool {
        matches!(self, Method::Gat | Method::Gcn | Method::Gehc)
    }

    /// Whether the method needs a model trained on the synthetic network.
    pub fn needs_training(self) -> bool {
        matches!(self, Method::Gat | Method::Gcn | Method::Gnne)
    }

    pub fn valid_names() -> String {
        Method::ALL.map(Method::name).join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let upper = if upper == "K-SHELL" { "KSHELL".to_string() } else { upper };
        Method::ALL
            .into_iter()
            .find(|m| m.name() == upper)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}; valid methods: {}", Method::valid_names())))
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.name().to_string()
    }
}

/// Everything a method may need besides the graph itself.
#[derive(Debug, Clone, Copy)]
pub struct RankInputs<'a> {
    pub seed: u64,
    pub ci_radius: usize,
    /// Walk embeddings of the graph being ranked.
    pub embedding: Option<&'a DenseMatrix>,
    pub task_model: Option<&'a GraphNet>,
    pub gat_model: Option<&'a GraphNet>,
    pub gcn_model: Option<&'a GraphNet>,
    pub train: TrainConfig,
}

impl Default for RankInputs<'_> {
    fn default() -> Self {
        Self {
            seed: 0,
            ci_radius: DEFAULT_CI_RADIUS,
            embedding: None,
            task_model: None,
            gat_model: None,
            gcn_model: None,
            train: TrainConfig::default(),
        }
    }
}

fn require<'a, T>(value: Option<&'a T>, method: Method, what: &str) -> Result<&'a T> {
    value.ok_or_else(|| Error::invalid(format!("{method} needs {what}")))
}

pub fn rank(method: Method, g: &Graph, inputs: &RankInputs<'_>) -> Result<RankedList> {
    Ok(match method {
        Method::Hc => harmonic(g),
        Method::Dc => degree_centrality(g)?,
        Method::Ci => collective_influence(g, inputs.ci_radius)?,
        Method::Cc => closeness(g),
        Method::Ec => eigenvector(g)?.ranking,
        Method::Bc => betweenness(g),
        Method::KShell => k_shell(g),
        Method::Iks => iks(g),
        Method::Gehc => gehc(g, require(inputs.embedding, method, "walk embeddings")?)?,
        Method::Gat => rank_baseline(
            g,
            require(inputs.embedding, method, "walk embeddings")?,
            require(inputs.gat_model, method, "a trained GAT baseline")?,
        )?,
        Method::Gcn => rank_baseline(
            g,
            require(inputs.embedding, method, "walk embeddings")?,
            require(inputs.gcn_model, method, "a trained GCN baseline")?,
        )?,
        Method::Gnne => {
            let train = TrainConfig {
                seed: inputs.seed,
                ..inputs.train
            };
            rank_gnne(g, require(inputs.task_model, method, "a trained task model")?, &train)?.ranking
        }
        Method::Random => random_ranking(g.node_count(), inputs.seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_ba;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(m.name().to_lowercase().parse::<Method>().unwrap(), m);
        }
        assert_eq!("k-shell".parse::<Method>().unwrap(), Method::KShell);
        let err = "XYZ".parse::<Method>().unwrap_err().to_string();
        assert!(err.contains("XYZ") && err.contains("GNNE") && err.contains("RANDOM"));
    }

    #[test]
    fn classical_methods_rank_every_node() {
        let g = generate_ba(50, 2, 0).unwrap();
        for m in Method::ALL.into_iter().filter(|m| !m.needs_embedding() && !m.needs_training()) {
            assert_eq!(rank(m, &g, &RankInputs::default()).unwrap().len(), 50, "{m}");
        }
        assert!(rank(Method::Gnne, &g, &RankInputs::default()).is_err());
        assert!(rank(Method::Gehc, &g, &RankInputs::default()).is_err());
    }
}
