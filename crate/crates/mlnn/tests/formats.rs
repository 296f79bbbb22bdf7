use mlnn::logs::{read_run_log, write_run_log};
use mlnn::svmlight::{read_svmlight, write_svmlight, Shape};
use mlnn::{format_f64, model_file, report};
use mlnn_core::data::{Dataset, Instance, LabelSet, SparseVector};
use mlnn_core::metrics::{BipartitionScores, EvaluationReport};
use mlnn_core::network::{Activation, Dims, LossConfig, NetworkParams};
use mlnn_core::threshold::ThresholdModel;
use mlnn_core::train::{LogEntry, Model, RunLog};
use proptest::prelude::*;
use rand::Rng;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
    ]
}

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..12, 1usize..6).prop_flat_map(|(dim, labels)| {
        let instance = (
            prop::collection::btree_map(0..dim, finite(), 0..=dim),
            prop::collection::btree_set(0..labels, 0..=labels),
        )
            .prop_map(move |(x, y)| {
                Instance::new(
                    SparseVector::new(dim, x.into_iter().collect()).unwrap(),
                    LabelSet::new(labels, y.into_iter().collect()).unwrap(),
                )
            });
        prop::collection::vec(instance, 1..20)
            .prop_map(move |v| Dataset::new(dim, labels, v).unwrap())
    })
}

fn measure() -> impl Strategy<Value = f64> {
    prop_oneof![0.0..=1.0f64, Just(f64::NAN), 0.0..50.0f64]
}

proptest! {
    #[test]
    fn float_formatting_round_trips(v in any::<f64>()) {
        let back: f64 = format_f64(v).parse().unwrap();
        prop_assert!(back.to_bits() == v.to_bits() || (v.is_nan() && back.is_nan()));
    }

    #[test]
    fn svmlight_round_trip(d in dataset()) {
        let text = write_svmlight(&d);
        let back = read_svmlight(&text, Shape::default()).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(write_svmlight(&back), text);
    }

    #[test]
    fn report_round_trip(
        m in prop::collection::vec(measure(), 10),
        bip in any::<bool>(),
        examples in 0usize..10_000,
        skipped in 0usize..100,
    ) {
        let r = EvaluationReport {
            examples,
            skipped_examples: skipped,
            rank_loss: m[0],
            one_error: m[1],
            coverage: m[2],
            map: m[3],
            bipartition: bip.then(|| BipartitionScores {
                micro_precision: m[4],
                micro_recall: m[5],
                micro_f1: m[6],
                macro_precision: m[7],
                macro_recall: m[8],
                macro_f1: m[9],
            }),
        };
        // NaN != NaN, so compare the serialized forms
        let csv = report::to_csv(&r);
        prop_assert_eq!(report::to_csv(&report::from_csv(&csv).unwrap()), csv);
        let text = report::to_text(&r);
        prop_assert_eq!(report::to_text(&report::from_text(&text).unwrap()), text);
    }

    #[test]
    fn run_log_round_trip(steps in prop::collection::btree_set(1u64..1_000_000, 1..20), seed in any::<u64>()) {
        let mut r = mlnn_core::rng::seeded(seed);
        let log = RunLog {
            entries: steps
                .into_iter()
                .map(|updates| LogEntry {
                    updates,
                    train_loss: r.gen_range(0.0..10.0),
                    val_rank_loss: r.gen(),
                    val_map: r.gen(),
                })
                .collect(),
        };
        let text = write_run_log(&log);
        prop_assert_eq!(read_run_log(&text).unwrap(), log);
    }

    #[test]
    fn model_file_round_trip(
        (d, f, l) in (1usize..6, 1usize..6, 1usize..6),
        seed in any::<u64>(),
        act in 0usize..3,
        pairwise in any::<bool>(),
        lambda in prop::option::of(0.0..10.0f64),
    ) {
        let model = Model {
            params: NetworkParams::init(Dims::new(d, f, l), seed),
            hidden_activation: Activation::ALL[act],
            loss: if pairwise { LossConfig::pairwise() } else { LossConfig::cross_entropy() },
            threshold: lambda.map(|lambda| ThresholdModel {
                weights: (0..d).map(|i| i as f64 - 1.5).collect(),
                intercept: 0.25,
                lambda,
            }),
        };
        let bytes = model_file::encode(&model);
        let back = model_file::decode(&bytes).unwrap();
        prop_assert_eq!(model_file::encode(&back), bytes);
        prop_assert_eq!(back, model);
    }

    #[test]
    fn truncated_model_files_are_rejected(cut in 0usize..200) {
        let model = Model {
            params: NetworkParams::init(Dims::new(3, 2, 2), 1),
            hidden_activation: Activation::Relu,
            loss: LossConfig::cross_entropy(),
            threshold: None,
        };
        let bytes = model_file::encode(&model);
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(model_file::decode(&bytes[..cut]).is_err());
    }
}
