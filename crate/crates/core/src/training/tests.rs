use super::*;
use crate::circuit::{Angle, Circuit, GateOp, ParamId};
use crate::network::{FlagMode, NetworkShape, SynapseMode};

fn net(n: usize, widths: &[usize], mode: SynapseMode) -> IGOQNN {
    IGOQNN::build(&NetworkShape::new(n, widths.to_vec()).unwrap(), mode, FlagMode::Parity).unwrap()
}

fn ex(db: &[bool], hits: &[bool]) -> TrainingExample {
    TrainingExample::new(db.to_vec(), hits.to_vec()).unwrap()
}

fn random_bindings(network: &IGOQNN, seed: u64) -> ParamBindings {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    network
        .parameters()
        .iter()
        .map(|p| (p.clone(), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect()
}

/// Model whose only parameter never reaches the measured qubit.
fn blind_model() -> VariationalModel {
    let mut c = Circuit::new(2).unwrap();
    c.append(GateOp::h(0)).unwrap();
    c.append(GateOp::u3(1, Angle::symbol(ParamId::new("w")), 0.0, 0.0)).unwrap();
    VariationalModel::new(&c, vec![], vec![0], &[ParamId::new("w")]).unwrap()
}

fn blind_samples() -> Vec<Sample> {
    vec![Sample {
        inputs: vec![],
        targets: vec![1.0],
    }]
}

#[test]
fn example_validation() {
    assert!(TrainingExample::new(vec![true], vec![true, false]).is_err());
    assert!(TrainingExample::new(vec![], vec![]).is_err());
    let s = ex(&[true, false], &[false, true]).to_sample();
    assert_eq!(s.targets, vec![0.0, 1.0]);
}

#[test]
fn zero_parameters_loss_is_ln2() {
    let network = net(1, &[1], SynapseMode::NullConsistent);
    let zero = network.constant_bindings(0.0);
    for hits in [[false], [true]] {
        let l = loss(&network, &zero, &ex(&[true], &hits), &LossConfig::default()).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
    }
    let with_l1 = LossConfig {
        l1_strength: 3.0,
        ..Default::default()
    };
    let l = loss(&network, &zero, &ex(&[true], &[true]), &with_l1).unwrap();
    assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
    let l1_on = loss(&network, &network.constant_bindings(0.2), &ex(&[true], &[true]), &with_l1).unwrap();
    let l1_off = loss(&network, &network.constant_bindings(0.2), &ex(&[true], &[true]), &LossConfig::default()).unwrap();
    assert!(l1_on >= l1_off);
    assert!(matches!(
        loss(&network, &ParamBindings::new(), &ex(&[true], &[true]), &LossConfig::default()),
        Err(Error::UnboundParameter(_))
    ));
}

#[test]
fn constant_loss_has_zero_gradient() {
    let model = blind_model();
    let samples = blind_samples();
    let obj = Objective::new(&model, &samples, LossConfig::default()).unwrap();
    let g = obj.central_difference(&[0.7], 1e-5, &mut Estimator::Exact).unwrap();
    assert!(g[0].abs() < 1e-8);
    let (_, g) = obj.parameter_shift(&[0.7], &mut Estimator::Exact).unwrap();
    assert_eq!(g, vec![0.0]);
}

#[test]
fn l1_gradient_is_strength() {
    let model = blind_model();
    let samples = blind_samples();
    let cfg = LossConfig {
        l1_strength: 0.35,
        ..Default::default()
    };
    let obj = Objective::new(&model, &samples, cfg).unwrap();
    let fd = obj.central_difference(&[0.3], 1e-5, &mut Estimator::Exact).unwrap();
    assert!((fd[0] - 0.35).abs() < 1e-9);
    let (_, shift) = obj.parameter_shift(&[0.3], &mut Estimator::Exact).unwrap();
    assert_eq!(shift[0], 0.35);
    let (_, at_zero) = obj.parameter_shift(&[0.0], &mut Estimator::Exact).unwrap();
    assert_eq!(at_zero[0], 0.0);
}

#[test]
fn shift_matches_difference_on_small_networks() {
    let batch = [ex(&[true], &[false]), ex(&[false], &[false])];
    for mode in [SynapseMode::NullConsistent, SynapseMode::PaperLiteral] {
        let network = net(1, &[1], mode);
        for seed in 0..3 {
            let b = random_bindings(&network, seed);
            let cfg = LossConfig {
                kind: if seed % 2 == 0 { LossKind::Bce } else { LossKind::L2 },
                ..Default::default()
            };
            let shift = grad_param_shift(&network, &b, &batch, &cfg).unwrap();
            let fd = grad_central_fd(&network, &b, &batch, &cfg, 1e-5).unwrap();
            for (id, s) in shift.iter() {
                let f = fd.get(id).unwrap();
                let scale = s.abs().max(f.abs());
                if scale < 1e-3 {
                    assert!((s - f).abs() < 1e-6, "{id}: {s} vs {f}");
                } else {
                    assert!((s - f).abs() / scale < 1e-4, "{id}: {s} vs {f}");
                }
            }
        }
    }
}

#[test]
fn l1_contribution_matches_between_methods() {
    let network = net(1, &[1], SynapseMode::NullConsistent);
    let batch = [ex(&[true], &[true])];
    let b = random_bindings(&network, 11);
    let plain = LossConfig::default();
    let reg = LossConfig {
        l1_strength: 0.2,
        ..Default::default()
    };
    let shift_delta: Vec<f64> = {
        let a = grad_param_shift(&network, &b, &batch, &reg).unwrap();
        let z = grad_param_shift(&network, &b, &batch, &plain).unwrap();
        a.iter().map(|(id, v)| v - z.get(id).unwrap()).collect()
    };
    let fd_delta: Vec<f64> = {
        let a = grad_central_fd(&network, &b, &batch, &reg, 1e-5).unwrap();
        let z = grad_central_fd(&network, &b, &batch, &plain, 1e-5).unwrap();
        a.iter().map(|(id, v)| v - z.get(id).unwrap()).collect()
    };
    for (s, f) in shift_delta.iter().zip(&fd_delta) {
        assert!((s - f).abs() < 1e-8);
    }
    let synapses = network.synapse_params();
    for ((id, _), s) in b.iter().zip(&shift_delta) {
        if !synapses.contains(id) {
            assert_eq!(*s, 0.0);
        } else {
            assert!((s.abs() - 0.2).abs() < 1e-12);
        }
    }
}

#[test]
fn predict_hits_rules() {
    assert_eq!(threshold_hits(&[0.9, 0.1], 0.5), vec![true, false]);
    assert_eq!(threshold_hits(&[0.5], 0.5), vec![false]);
    let network = net(2, &[1], SynapseMode::NullConsistent);
    let zero = network.constant_bindings(0.0);
    assert_eq!(predict_hits(&network, &zero, &[true, true], 0.5).unwrap(), vec![false, false]);
    assert!(predict_hits(&network, &zero, &[true, true], 1.0).is_err());
}

#[test]
fn one_epoch_records_one_entry() {
    let network = net(1, &[1], SynapseMode::NullConsistent);
    let data = vec![ex(&[true], &[true]), ex(&[false], &[false])];
    let opt = OptimizerConfig {
        max_epochs: 1,
        ..Default::default()
    };
    let report = train(&network, &data, &LossConfig::default(), &opt).unwrap();
    assert_eq!(report.epochs.len(), 1);
    assert_eq!(report.final_bindings.len(), network.parameters().len());
    assert_eq!(report.metrics_csv().lines().count(), 2);
}

#[test]
fn train_rejects_bad_datasets() {
    let network = net(2, &[1], SynapseMode::NullConsistent);
    let cfg = LossConfig::default();
    let opt = OptimizerConfig::default();
    assert!(matches!(train(&network, &[], &cfg, &opt), Err(Error::Argument(_))));
    let wrong = [ex(&[true, false, true], &[true, false, true])];
    assert!(matches!(train(&network, &wrong, &cfg, &opt), Err(Error::Argument(_))));
}

#[test]
fn training_is_deterministic() {
    let network = net(1, &[2], SynapseMode::NullConsistent);
    let data = vec![ex(&[true], &[true]), ex(&[false], &[false])];
    for kind in [OptimizerKind::Adam, OptimizerKind::Spsa, OptimizerKind::GradientDescent] {
        let opt = OptimizerConfig {
            kind,
            max_epochs: 6,
            seed: 5,
            ..Default::default()
        };
        let a = train(&network, &data, &LossConfig::default(), &opt).unwrap();
        let b = train(&network, &data, &LossConfig::default(), &opt).unwrap();
        assert_eq!(a.epochs, b.epochs);
        assert_eq!(a.final_values, b.final_values);
        assert_eq!(a.metrics_csv(), b.metrics_csv());
    }
}

#[test]
fn spsa_step_is_seeded_and_gain_gated() {
    let network = net(1, &[1], SynapseMode::NullConsistent);
    let batch = [ex(&[true], &[true])];
    let b = random_bindings(&network, 2);
    let cfg = LossConfig::default();
    let step = |seed| {
        let mut state = SpsaState::new(seed);
        spsa_step(&network, &b, &batch, &cfg, &SpsaConfig::default(), &mut state).unwrap()
    };
    assert_eq!(step(4), step(4));
    let frozen = SpsaConfig {
        a: 0.0,
        ..Default::default()
    };
    let mut state = SpsaState::new(4);
    assert_eq!(spsa_step(&network, &b, &batch, &cfg, &frozen, &mut state).unwrap(), b);
}

#[test]
fn gradient_descent_matches_single_qubit_target() {
    let mut c = Circuit::new(1).unwrap();
    let ids = ["theta", "phi", "lambda"].map(ParamId::new);
    c.append(GateOp::u3(
        0,
        Angle::symbol(ids[0].clone()),
        Angle::symbol(ids[1].clone()),
        Angle::symbol(ids[2].clone()),
    ))
    .unwrap();
    let model = VariationalModel::new(&c, vec![], vec![0], &[]).unwrap();
    let samples = vec![Sample {
        inputs: vec![],
        targets: vec![0.3],
    }];
    let cfg = LossConfig {
        kind: LossKind::L2,
        ..Default::default()
    };
    for seed in 0..10 {
        let opt = OptimizerConfig {
            kind: OptimizerKind::GradientDescent,
            learning_rate: 1.0,
            max_epochs: 500,
            seed,
            ..Default::default()
        };
        let report = train_model(&model, &samples, &cfg, &opt, initial_values(3, seed)).unwrap();
        assert!(report.final_loss() < 1e-4, "seed {seed}: {}", report.final_loss());
    }
}

#[test]
fn early_stop_on_flat_loss() {
    let model = blind_model();
    let samples = blind_samples();
    let opt = OptimizerConfig {
        max_epochs: 100,
        ..Default::default()
    };
    let report = train_model(&model, &samples, &LossConfig::default(), &opt, vec![0.4]).unwrap();
    assert_eq!(report.epochs.len(), EARLY_STOP_WINDOW);
    assert!(report.stopped_early);
    let last = report.epochs.len();
    let window = &report.epochs[last - EARLY_STOP_WINDOW..];
    assert!(window[0].loss - window[EARLY_STOP_WINDOW - 1].loss < EARLY_STOP_TOLERANCE);
}

#[test]
fn shot_training_runs_and_is_seeded() {
    let network = net(1, &[1], SynapseMode::NullConsistent);
    let data = vec![ex(&[true], &[true])];
    let opt = OptimizerConfig {
        kind: OptimizerKind::Spsa,
        max_epochs: 4,
        seed: 1,
        execution: ExecutionMode::Shots { shots: 500 },
        ..Default::default()
    };
    let a = train(&network, &data, &LossConfig::default(), &opt).unwrap();
    let b = train(&network, &data, &LossConfig::default(), &opt).unwrap();
    assert_eq!(a.epochs, b.epochs);
}

#[test]
fn initial_values_are_small_and_seeded() {
    let v = initial_values(50, 9);
    assert!(v.iter().all(|x| x.abs() <= INIT_SCALE));
    assert_eq!(v, initial_values(50, 9));
    assert_ne!(v, initial_values(50, 10));
}
