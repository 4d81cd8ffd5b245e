use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    mse, mse_grad, Activation, Adam, AdamConfig, GatCache, GatLayer, GcnCache, GcnLayer,
    GraphContext, Linear,
};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum LayerKind {
    Gcn,
    Gat { heads: usize },
}

/// One message-passing layer. For GAT, `out` is the per-head width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub out: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn gcn(out: usize, activation: Activation) -> Self {
        Self {
            kind: LayerKind::Gcn,
            out,
            activation,
        }
    }

    pub fn gat(out: usize, heads: usize, activation: Activation) -> Self {
        Self {
            kind: LayerKind::Gat { heads },
            out,
            activation,
        }
    }

    pub fn output_width(&self) -> usize {
        match self.kind {
            LayerKind::Gcn => self.out,
            LayerKind::Gat { heads } => self.out * heads,
        }
    }
}

/// Stack of graph layers followed by a linear head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub input: usize,
    pub layers: Vec<LayerSpec>,
    pub output: usize,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.input == 0 || self.output == 0 {
            return Err(Error::invalid("model input and output widths must be positive"));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if l.out == 0 {
                return Err(Error::invalid(format!("layer {i} has zero width")));
            }
            if let LayerKind::Gat { heads: 0 } = l.kind {
                return Err(Error::invalid(format!("layer {i} has zero attention heads")));
            }
        }
        Ok(())
    }

    /// Width of the representation fed to the linear head.
    pub fn embedding_width(&self) -> usize {
        self.layers.last().map_or(self.input, LayerSpec::output_width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum GraphLayer {
    Gcn(GcnLayer),
    Gat(GatLayer),
}

impl GraphLayer {
    fn in_dim(&self) -> usize {
        match self {
            GraphLayer::Gcn(l) => l.in_dim(),
            GraphLayer::Gat(l) => l.in_dim(),
        }
    }

    fn out_dim(&self) -> usize {
        match self {
            GraphLayer::Gcn(l) => l.out_dim(),
            GraphLayer::Gat(l) => l.out_dim(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum LayerCache {
    Gcn(GcnCache),
    Gat(GatCache),
}

/// Result of a forward pass, holding what backward needs.
#[derive(Debug, Clone)]
pub struct Forward {
    /// Output of every graph layer, in order.
    pub hidden: Vec<DenseMatrix>,
    caches: Vec<LayerCache>,
    /// Linear head output, `n x output`.
    pub output: DenseMatrix,
}

impl Forward {
    /// Representation entering the linear head.
    pub fn embedding<'a>(&'a self, input: &'a DenseMatrix) -> &'a DenseMatrix {
        self.hidden.last().unwrap_or(input)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNet {
    pub layers: Vec<GraphLayer>,
    pub head: Linear,
}

impl GraphNet {
    /// Glorot-initialized network, deterministic in `seed`.
    pub fn new(spec: &ModelSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut width = spec.input;
        let mut layers = Vec::with_capacity(spec.layers.len());
        for l in &spec.layers {
            layers.push(match l.kind {
                LayerKind::Gcn => GraphLayer::Gcn(GcnLayer::init(&mut rng, width, l.out, l.activation)),
                LayerKind::Gat { heads } => {
                    GraphLayer::Gat(GatLayer::init(&mut rng, width, l.out, heads, l.activation))
                }
            });
            width = l.output_width();
        }
        let head = Linear::init(&mut rng, width, spec.output);
        Ok(Self { layers, head })
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(self.head.in_dim(), GraphLayer::in_dim)
    }

    /// Checks that consecutive widths agree; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        let mut width = self.input_dim();
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.in_dim() != width {
                return Err(Error::shape(
                    "graph_net",
                    format!("layer {i} expects {} inputs, receives {width}", layer.in_dim()),
                ));
            }
            if let GraphLayer::Gat(g) = layer {
                if g.heads.is_empty() {
                    return Err(Error::shape("graph_net", format!("layer {i} has no heads")));
                }
                for head in &g.heads {
                    if head.weight.shape() != (width, g.head_dim())
                        || head.attention.shape() != (2, g.head_dim())
                    {
                        return Err(Error::shape("graph_net", format!("layer {i} head shapes differ")));
                    }
                }
            }
            width = layer.out_dim();
        }
        if self.head.in_dim() != width || self.head.bias.shape() != (1, self.head.weight.cols()) {
            return Err(Error::shape(
                "graph_net",
                format!("head expects {} inputs, receives {width}", self.head.in_dim()),
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> Vec<&DenseMatrix> {
        let mut out = Vec::new();
        for layer in &self.layers {
            match layer {
                GraphLayer::Gcn(l) => out.push(&l.weight),
                GraphLayer::Gat(l) => {
                    for h in &l.heads {
                        out.push(&h.weight);
                        out.push(&h.attention);
                    }
                }
            }
        }
        out.push(&self.head.weight);
        out.push(&self.head.bias);
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut DenseMatrix> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            match layer {
                GraphLayer::Gcn(l) => out.push(&mut l.weight),
                GraphLayer::Gat(l) => {
                    for h in &mut l.heads {
                        out.push(&mut h.weight);
                        out.push(&mut h.attention);
                    }
                }
            }
        }
        out.push(&mut self.head.weight);
        out.push(&mut self.head.bias);
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|p| p.as_slice().len()).sum()
    }

    pub fn forward(&self, ctx: &GraphContext, x: &DenseMatrix) -> Result<Forward> {
        if x.cols() != self.input_dim() {
            return Err(Error::shape(
                "graph_net",
                format!("{} input features, model expects {}", x.cols(), self.input_dim()),
            ));
        }
        let mut hidden: Vec<DenseMatrix> = Vec::with_capacity(self.layers.len());
        let mut caches = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let input = hidden.last().unwrap_or(x);
            let (out, cache) = match layer {
                GraphLayer::Gcn(l) => {
                    let (o, c) = l.forward(&ctx.propagation, input)?;
                    (o, LayerCache::Gcn(c))
                }
                GraphLayer::Gat(l) => {
                    let (o, c) = l.forward(&ctx.attention, input)?;
                    (o, LayerCache::Gat(c))
                }
            };
            hidden.push(out);
            caches.push(cache);
        }
        let output = self.head.forward(hidden.last().unwrap_or(x))?;
        Ok(Forward {
            hidden,
            caches,
            output,
        })
    }

    /// Gradients of every parameter, aligned with [`GraphNet::params`].
    pub fn backward(
        &self,
        ctx: &GraphContext,
        x: &DenseMatrix,
        fwd: &Forward,
        d_output: &DenseMatrix,
    ) -> Result<Vec<DenseMatrix>> {
        let (dw, db, mut d_hidden) = self.head.backward(fwd.embedding(x), d_output)?;
        let mut per_layer: Vec<Vec<DenseMatrix>> = Vec::with_capacity(self.layers.len());
        for (idx, layer) in self.layers.iter().enumerate().rev() {
            let input = if idx == 0 { x } else { &fwd.hidden[idx - 1] };
            let need_dx = idx > 0;
            let (grads, dx) = match (layer, &fwd.caches[idx]) {
                (GraphLayer::Gcn(l), LayerCache::Gcn(c)) => {
                    let (g, dx) = l.backward(&ctx.propagation, input, c, &d_hidden, need_dx)?;
                    (vec![g], dx)
                }
                (GraphLayer::Gat(l), LayerCache::Gat(c)) => {
                    let (g, dx) = l.backward(&ctx.attention, input, c, &d_hidden, need_dx)?;
                    (g.into_iter().flat_map(|(w, a)| [w, a]).collect(), dx)
                }
                _ => unreachable!("cache kind follows layer kind"),
            };
            per_layer.push(grads);
            if let Some(dx) = dx {
                d_hidden = dx;
            }
        }
        let mut out: Vec<DenseMatrix> = per_layer.into_iter().rev().flatten().collect();
        out.push(dw);
        out.push(db);
        Ok(out)
    }

    /// Full-batch MSE training; returns the loss recorded before each update.
    /// Any non-finite loss aborts with [`Error::NonFinite`].
    pub fn fit(
        &mut self,
        ctx: &GraphContext,
        x: &DenseMatrix,
        target: &DenseMatrix,
        epochs: usize,
        adam: AdamConfig,
    ) -> Result<Vec<f64>> {
        let mut opt = Adam::new(adam, &self.params());
        let mut trace = Vec::with_capacity(epochs);
        for epoch in 0..epochs {
            let fwd = self.forward(ctx, x)?;
            let loss = mse(&fwd.output, target)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "training loss at epoch {} is {loss}",
                    epoch + 1
                )));
            }
            trace.push(loss);
            let grads = self.backward(ctx, x, &fwd, &mse_grad(&fwd.output, target)?)?;
            opt.step(self.params_mut(), &grads)?;
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_ba;

    fn spec() -> ModelSpec {
        ModelSpec {
            input: 6,
            layers: vec![
                LayerSpec::gcn(5, Activation::Relu),
                LayerSpec::gat(3, 2, Activation::Elu),
                LayerSpec::gat(4, 1, Activation::Identity),
            ],
            output: 1,
        }
    }

    #[test]
    fn parameter_layout() {
        let net = GraphNet::new(&spec(), 1).unwrap();
        let shapes: Vec<_> = net.params().iter().map(|p| p.shape()).collect();
        assert_eq!(
            shapes,
            vec![(6, 5), (5, 3), (2, 3), (5, 3), (2, 3), (6, 4), (2, 4), (4, 1), (1, 1)]
        );
        net.validate().unwrap();
    }

    #[test]
    fn rejects_bad_specs_and_inputs() {
        let mut s = spec();
        s.layers[1] = LayerSpec::gat(3, 0, Activation::Elu);
        assert!(GraphNet::new(&s, 0).is_err());
        let net = GraphNet::new(&spec(), 1).unwrap();
        let g = generate_ba(10, 2, 0).unwrap();
        assert!(net
            .forward(&GraphContext::new(&g), &DenseMatrix::zeros(10, 3))
            .is_err());
    }

    #[test]
    fn fit_reduces_loss_and_is_reproducible() {
        let g = generate_ba(30, 2, 4).unwrap();
        let ctx = GraphContext::new(&g);
        let x = g.laplacian();
        let target = DenseMatrix::column(
            &g.degrees().iter().map(|&d| d as f64).collect::<Vec<_>>(),
        );
        let s = ModelSpec {
            input: 30,
            layers: vec![LayerSpec::gcn(8, Activation::Relu), LayerSpec::gcn(8, Activation::Relu)],
            output: 1,
        };
        let cfg = AdamConfig {
            lr: 0.01,
            ..AdamConfig::default()
        };
        let mut a = GraphNet::new(&s, 3).unwrap();
        let trace = a.fit(&ctx, &x, &target, 200, cfg).unwrap();
        assert!(trace.last().unwrap() < &(trace[0] * 0.5));
        let mut b = GraphNet::new(&s, 3).unwrap();
        b.fit(&ctx, &x, &target, 200, cfg).unwrap();
        assert_eq!(a, b);
    }
}
