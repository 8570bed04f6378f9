mod common;

use alden::autodiff::Tensor;
use alden::models::checkpoint;
use alden::models::{
    accuracy, mc_dropout_passes, predict_proba, train, Input, MaskSource, Model, ModelConfig, ModelKind, TrainConfig,
};
use alden::Error;
use rand::Rng;

fn zero_output(mut m: Model) -> Model {
    let w = m.output_weights().clone();
    m.set_param("out.weight", Tensor::zeros(w.shape().to_vec())).unwrap();
    if m.param("out.bias").is_some() {
        m.set_param("out.bias", Tensor::zeros(vec![1])).unwrap();
    }
    m
}

#[test]
fn zero_output_layer_gives_one_half() {
    for kind in [ModelKind::Mlp2d, ModelKind::MeanPool, ModelKind::Cnn] {
        let m = zero_output(common::random_model(kind, true, 1));
        let p = match kind {
            ModelKind::Mlp2d => m.probability(Input::Point(&[0.3, -2.0])).unwrap(),
            _ => m.probability(Input::Tokens(&[2, 3])).unwrap(),
        };
        assert_eq!(p, 0.5);
    }
}

#[test]
fn identity_hidden_layer_is_linear() {
    let mut c = ModelConfig::mlp2d();
    c.hidden = 2;
    c.bias = false;
    let mut m = Model::new(c, 0).unwrap();
    m.set_param("hidden0.weight", Tensor::matrix(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap()).unwrap();
    m.set_param("out.weight", Tensor::matrix(2, 1, vec![1.0, 2.0]).unwrap()).unwrap();
    assert_eq!(m.logit(Input::Point(&[1.0, 1.0])).unwrap(), 3.0);
}

#[test]
fn eval_forward_is_pure() {
    let m = common::random_model(ModelKind::Cnn, true, 4);
    let a = m.logit(Input::Tokens(&[5, 6, 7])).unwrap();
    assert_eq!(a.to_bits(), m.logit(Input::Tokens(&[5, 6, 7])).unwrap().to_bits());
    assert!(m.logit(Input::Tokens(&[])).is_err());
    // padding tokens are ignored
    assert_eq!(a, m.logit(Input::Tokens(&[0, 5, 6, 0, 7])).unwrap());
}

fn separable() -> (Vec<[f64; 2]>, Vec<u8>) {
    (vec![[-1.0, 0.0], [1.0, 0.0]], vec![0, 1])
}

#[test]
fn separable_set_is_learned() {
    let (xs, ys) = separable();
    let inputs: Vec<Input<'_>> = xs.iter().map(|x| Input::Point(x)).collect();
    let mut m = Model::new(ModelConfig::mlp2d(), 7).unwrap();
    let cfg = TrainConfig {
        epochs: 200,
        ..TrainConfig::default()
    };
    train(&mut m, &inputs, &ys, &cfg).unwrap();
    assert_eq!(accuracy(&m, &inputs, &ys).unwrap(), 1.0);
}

#[test]
fn full_batch_loss_is_monotone() {
    let (xs, ys) = separable();
    let inputs: Vec<Input<'_>> = xs.iter().map(|x| Input::Point(x)).collect();
    let mut m = Model::new(ModelConfig::mlp2d(), 2).unwrap();
    let cfg = TrainConfig {
        lr: 0.01,
        epochs: 100,
        batch: 2,
        ..TrainConfig::default()
    };
    let report = train(&mut m, &inputs, &ys, &cfg).unwrap();
    for w in report.epoch_losses.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "{} then {}", w[0], w[1]);
    }
}

#[test]
fn zero_epochs_and_determinism() {
    let (xs, ys) = separable();
    let inputs: Vec<Input<'_>> = xs.iter().map(|x| Input::Point(x)).collect();
    let m0 = Model::new(ModelConfig::mlp2d(), 3).unwrap();
    let mut m = m0.clone();
    let cfg = TrainConfig {
        epochs: 0,
        reinit: false,
        ..TrainConfig::default()
    };
    train(&mut m, &inputs, &ys, &cfg).unwrap();
    assert_eq!(m.params(), m0.params());

    let cfg = TrainConfig {
        epochs: 5,
        seed: 9,
        ..TrainConfig::default()
    };
    let (mut a, mut b) = (m0.clone(), m0.clone());
    train(&mut a, &inputs, &ys, &cfg).unwrap();
    train(&mut b, &inputs, &ys, &cfg).unwrap();
    for (p, q) in a.params().iter().zip(b.params()) {
        let bits = |t: &Tensor| t.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&p.value), bits(&q.value));
    }
}

#[test]
fn training_errors() {
    let mut m = Model::new(ModelConfig::mlp2d(), 3).unwrap();
    assert!(matches!(
        train(&mut m, &[], &[], &TrainConfig::default()),
        Err(Error::EmptyLabeled)
    ));
    let (xs, ys) = separable();
    let inputs: Vec<Input<'_>> = xs.iter().map(|x| Input::Point(x)).collect();
    let cfg = TrainConfig {
        lr: 1e200,
        ..TrainConfig::default()
    };
    match train(&mut m, &inputs, &ys, &cfg) {
        Err(Error::NonFinite(msg)) => assert!(msg.contains("epoch") && msg.contains("batch")),
        other => panic!("expected a numerical failure, got {other:?}"),
    }
}

#[test]
fn probabilities_follow_logits() {
    let m = common::random_model(ModelKind::MeanPool, true, 8);
    let inputs = [Input::Tokens(&[2, 3]), Input::Tokens(&[4])];
    let p = predict_proba(&m, &inputs).unwrap();
    for (x, p) in inputs.iter().zip(p) {
        assert_eq!(p, alden::autodiff::sigmoid(m.logit(*x).unwrap()));
        assert!(p > 0.0 && p < 1.0);
    }
}

#[test]
fn bias_free_mlp_is_homogeneous() {
    let mut r = common::rng(1);
    for seed in 0..20 {
        let m = common::random_model(ModelKind::Mlp2d, false, seed);
        let x = [r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0)];
        let c = r.gen_range(0.1..10.0);
        let y = m.logit(Input::Point(&x)).unwrap();
        let yc = m.logit(Input::Point(&[c * x[0], c * x[1]])).unwrap();
        assert!((yc - c * y).abs() <= 1e-9 * y.abs().max(1.0));
    }
}

#[test]
fn mc_dropout_streams() {
    let m = common::random_model(ModelKind::Cnn, true, 2);
    let x = Input::Tokens(&[3, 4, 5, 6]);
    let ten = mc_dropout_passes(&m, x, 10, 77, MaskSource::Random).unwrap();
    let two = mc_dropout_passes(&m, x, 2, 77, MaskSource::Random).unwrap();
    assert_eq!(&ten[..2], two.as_slice());
    assert_eq!(ten, mc_dropout_passes(&m, x, 10, 77, MaskSource::Random).unwrap());
    assert!(ten.windows(2).any(|w| w[0] != w[1]));
    let ones = mc_dropout_passes(&m, x, 5, 77, MaskSource::AllOnes).unwrap();
    assert!(ones.iter().all(|&p| p == ones[0]));

    assert!(mc_dropout_passes(&m, x, 1, 77, MaskSource::Random).is_err());
    let no_dropout = Model::new(ModelConfig::mlp2d(), 0).unwrap();
    assert!(mc_dropout_passes(&no_dropout, Input::Point(&[1.0, 1.0]), 4, 1, MaskSource::Random).is_err());
}

#[test]
fn checkpoint_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [ModelKind::Mlp2d, ModelKind::MeanPool, ModelKind::Cnn] {
        let m = common::random_model(kind, kind != ModelKind::MeanPool, 5);
        let path = dir.path().join(format!("{kind}.bin"));
        checkpoint::save(&m, &path).unwrap();
        let back = checkpoint::load(&path).unwrap();
        assert_eq!(back.config(), m.config());
        assert_eq!(back.params(), m.params());
    }
    let bytes = checkpoint::to_bytes(&common::random_model(ModelKind::Mlp2d, true, 5));
    assert!(checkpoint::from_bytes(&bytes[..bytes.len() - 3]).is_err());
}
