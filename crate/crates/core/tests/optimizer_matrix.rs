use mlorc::harness::{parse_config, run_experiment};
use mlorc::linalg::Matrix;
use mlorc::optim::{compressed_width, optimizer_step, HyperParams, OptimizerKind, OptimizerState};
use mlorc::rng::RngStream;
use mlorc::rsvd::gaussian_matrix;
use mlorc::StateFootprint;

#[test]
fn every_kind_runs_on_every_shape() {
    let shapes = [(1, 6), (6, 1), (9, 4), (4, 9), (7, 7)];
    for kind in OptimizerKind::ALL {
        for (rows, cols) in shapes {
            for (rank, oversample) in [(1, 0), (2, 3), (8, 0)] {
                let hp = HyperParams {
                    rank: rank.min(rows.min(cols)),
                    oversample,
                    alpha: 0.01,
                    ..HyperParams::default()
                };
                let mut state = OptimizerState::new(kind, rows, cols, &hp).unwrap();
                let mut w = Matrix::zeros(rows, cols);
                let mut rng = RngStream::new(3);
                for _ in 0..5 {
                    let g = gaussian_matrix(rows, cols, &mut rng);
                    optimizer_step(kind, &mut w, &g, &mut state, &hp, &mut rng).unwrap();
                }
                assert!(w.is_finite(), "{kind} {rows}x{cols}");
                let l = compressed_width(rows, cols, hp.rank, oversample);
                let expected = match kind {
                    OptimizerKind::AdamW => 2 * rows * cols,
                    OptimizerKind::Lion => rows * cols,
                    OptimizerKind::MLorcAdamW => 2 * (rows + cols) * l,
                    OptimizerKind::MLorcLion => (rows + cols) * l,
                    OptimizerKind::GaLoreAdamW => rows * hp.rank + 2 * cols * hp.rank,
                };
                assert_eq!(state.stored_elements(), expected, "{kind} {rows}x{cols}");
            }
        }
    }
}

#[test]
fn logistic_runs_for_every_kind() {
    for kind in OptimizerKind::ALL {
        let cfg = parse_config(&format!(
            r#"{{"seed": 2, "steps": 60, "record_every": 59,
                "problem": {{"kind": "logistic", "samples": 64, "features": 8, "classes": 3, "l2_reg": 0.001}},
                "optimizer": {{"kind": "{kind}", "rank": 2, "alpha": 0.01, "batch_size": 8}}}}"#
        ))
        .unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 2);
        assert!(out.records[1].loss < out.records[0].loss, "{kind}");
    }
}

#[test]
fn identical_configs_give_identical_runs() {
    let text = r#"{"seed": 77, "steps": 40, "record_every": 3,
        "problem": {"kind": "quadratic", "rows": 9, "cols": 7, "planted_rank": 2, "noise_std": 0.2},
        "optimizer": {"kind": "mlorc-adamw", "rank": 2, "oversample": 1}}"#;
    let a = run_experiment(&parse_config(text).unwrap()).unwrap();
    let b = run_experiment(&parse_config(text).unwrap()).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.final_weights, b.final_weights);
    let other = run_experiment(&parse_config(&text.replace("77", "78")).unwrap()).unwrap();
    assert_ne!(a.final_weights, other.final_weights);
}
