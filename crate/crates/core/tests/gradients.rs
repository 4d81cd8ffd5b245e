use gnne_core::graph::generate_ba;
use gnne_core::nn::{mse_grad, Activation, GraphContext, GraphNet, LayerSpec, ModelSpec};
use gnne_testkit::gradcheck::{check_instance, random_instance, random_matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn analytic_gradients_match_finite_differences() {
    let mut kinds_seen = std::collections::BTreeSet::new();
    for seed in 0..20 {
        let inst = random_instance(seed);
        for l in &inst.spec.layers {
            kinds_seen.insert(format!("{:?}", l.kind));
        }
        let err = check_instance(&inst, seed);
        eprintln!("instance {seed}: {err:e}");
        assert!(err <= 1e-4, "instance {seed} ({:?}): relative error {err:e}", inst.spec);
    }
    assert!(kinds_seen.len() >= 3, "{kinds_seen:?}");
}

#[test]
fn zero_loss_gives_zero_gradients() {
    let inst = random_instance(5);
    let net = GraphNet::new(&inst.spec, 5).unwrap();
    let ctx = GraphContext::new(&inst.graph);
    let fwd = net.forward(&ctx, &inst.x).unwrap();
    let grads = net
        .backward(&ctx, &inst.x, &fwd, &mse_grad(&fwd.output, &fwd.output).unwrap())
        .unwrap();
    assert!(grads.iter().all(|m| m.as_slice().iter().all(|&v| v == 0.0)));
}

#[test]
fn masked_head_output_gets_no_gradient() {
    let g = generate_ba(10, 2, 1).unwrap();
    let spec = ModelSpec {
        input: 3,
        layers: vec![LayerSpec::gat(4, 2, Activation::Elu)],
        output: 2,
    };
    let net = GraphNet::new(&spec, 2).unwrap();
    let ctx = GraphContext::new(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let x = random_matrix(&mut rng, 10, 3);
    let fwd = net.forward(&ctx, &x).unwrap();
    let mut d = random_matrix(&mut rng, 10, 2);
    for i in 0..10 {
        d.row_mut(i)[1] = 0.0;
    }
    let grads = net.backward(&ctx, &x, &fwd, &d).unwrap();
    let head_w = &grads[grads.len() - 2];
    let head_b = &grads[grads.len() - 1];
    assert!((0..head_w.rows()).all(|r| head_w.row(r)[1] == 0.0));
    assert_eq!(head_b.row(0)[1], 0.0);
}
