//! Central finite-difference gradients of the mean squared error of a
//! [`GraphNet`], computed through forward passes only.

use gnne_core::graph::generate_ba;
use gnne_core::nn::{mse_grad, Activation, GraphContext, GraphNet, LayerSpec, ModelSpec};
use gnne_core::{DenseMatrix, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Denominator floor for [`relative_error`]; below it the comparison is
/// effectively absolute.
pub const RELATIVE_FLOOR: f64 = 1e-6;

fn loss(net: &GraphNet, ctx: &GraphContext, x: &DenseMatrix, target: &DenseMatrix) -> f64 {
    let out = net.forward(ctx, x).expect("forward").output;
    let p = out.as_slice();
    let t = target.as_slice();
    p.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / p.len() as f64
}

/// Numerical gradient of every parameter, aligned with `GraphNet::params`.
pub fn numeric_gradients(
    net: &GraphNet,
    ctx: &GraphContext,
    x: &DenseMatrix,
    target: &DenseMatrix,
    h: f64,
) -> Vec<DenseMatrix> {
    let shapes: Vec<(usize, usize)> = net.params().iter().map(|p| p.shape()).collect();
    let mut probe = net.clone();
    shapes
        .iter()
        .enumerate()
        .map(|(pi, &(rows, cols))| {
            let mut grad = DenseMatrix::zeros(rows, cols);
            for k in 0..rows * cols {
                let original = probe.params()[pi].as_slice()[k];
                probe.params_mut()[pi].as_mut_slice()[k] = original + h;
                let up = loss(&probe, ctx, x, target);
                probe.params_mut()[pi].as_mut_slice()[k] = original - h;
                let down = loss(&probe, ctx, x, target);
                probe.params_mut()[pi].as_mut_slice()[k] = original;
                grad.as_mut_slice()[k] = (up - down) / (2.0 * h);
            }
            grad
        })
        .collect()
}

/// `|a - b| / max(|a|, |b|, RELATIVE_FLOOR)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(RELATIVE_FLOOR)
}

/// Largest entrywise relative error between two aligned gradient lists.
pub fn max_relative_error(analytic: &[DenseMatrix], numeric: &[DenseMatrix]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .flat_map(|(a, n)| {
            assert_eq!(a.shape(), n.shape());
            a.as_slice()
                .iter()
                .zip(n.as_slice())
                .map(|(&x, &y)| relative_error(x, y))
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// One seeded network: a small BA graph, a random stack of GCN/GAT layers
/// under a linear head, inputs and targets.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub spec: ModelSpec,
    pub x: DenseMatrix,
    pub target: DenseMatrix,
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(6..14);
    let mut graph = generate_ba(n, rng.gen_range(1..3), seed).unwrap();
    if seed % 4 == 3 {
        // leave one node isolated so attention sees a self-only neighborhood
        graph = Graph::from_edges(n + 1, graph.edges()).unwrap();
    }
    let input = rng.gen_range(2..6);
    let output = rng.gen_range(1..3);
    let pool = [
        LayerSpec::gcn(rng.gen_range(2..5), Activation::Relu),
        LayerSpec::gat(rng.gen_range(2..4), 2, Activation::Elu),
        LayerSpec::gat(rng.gen_range(2..4), 1, Activation::Identity),
        LayerSpec::gcn(rng.gen_range(2..5), Activation::Identity),
    ];
    let depth = rng.gen_range(1..4);
    let layers = (0..depth).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
    let spec = ModelSpec { input, layers, output };
    let nodes = graph.node_count();
    let x = random_matrix(&mut rng, nodes, input);
    let target = random_matrix(&mut rng, nodes, output);
    Instance { graph, spec, x, target }
}

/// Worst relative error between backpropagated and finite-difference
/// gradients over every parameter of the instance's network.
pub fn check_instance(inst: &Instance, seed: u64) -> f64 {
    let net = GraphNet::new(&inst.spec, seed).unwrap();
    let ctx = GraphContext::new(&inst.graph);
    let fwd = net.forward(&ctx, &inst.x).unwrap();
    let d = mse_grad(&fwd.output, &inst.target).unwrap();
    let analytic = net.backward(&ctx, &inst.x, &fwd, &d).unwrap();
    let numeric = numeric_gradients(&net, &ctx, &inst.x, &inst.target, 1e-5);
    max_relative_error(&analytic, &numeric)
}
