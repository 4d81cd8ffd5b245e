use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GraphNet;
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "gnne-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Versioned JSON checkpoint: layer shapes plus flat row-major weights.
/// Floats are written in shortest round-trip form, so save → load is
/// bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    pub model: GraphNet,
}

impl Checkpoint {
    pub fn new(model: GraphNet) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            metadata: BTreeMap::new(),
            model,
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn to_json(&self) -> Result<String> {
        if self.model.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("checkpoint weights".into()));
        }
        serde_json::to_string_pretty(self).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ckpt: Checkpoint =
            serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if ckpt.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!("unknown format {:?}", ckpt.format)));
        }
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported version {} (expected {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        ckpt.model.validate()?;
        Ok(ckpt)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, LayerSpec, ModelSpec};

    fn model() -> GraphNet {
        GraphNet::new(
            &ModelSpec {
                input: 4,
                layers: vec![LayerSpec::gat(3, 2, Activation::Elu), LayerSpec::gcn(2, Activation::Relu)],
                output: 1,
            },
            12,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let ckpt = Checkpoint::new(model()).with_meta("seed", 12);
        let back = Checkpoint::from_json(&ckpt.to_json().unwrap()).unwrap();
        for (a, b) in ckpt.model.params().iter().zip(back.model.params()) {
            let bits_a: Vec<u64> = a.as_slice().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u64> = b.as_slice().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
        assert_eq!(back.metadata["seed"], "12");
    }

    #[test]
    fn rejects_wrong_version_and_corrupt_shapes() {
        let mut ckpt = Checkpoint::new(model());
        ckpt.version = 99;
        let text = serde_json::to_string(&ckpt).unwrap();
        assert!(Checkpoint::from_json(&text).is_err());

        let mut ckpt = Checkpoint::new(model());
        ckpt.model.head.weight = crate::DenseMatrix::zeros(5, 1);
        assert!(Checkpoint::from_json(&ckpt.to_json().unwrap()).is_err());
    }
}
