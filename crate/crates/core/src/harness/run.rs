use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, ProblemConfig};
use crate::linalg::{frob_norm, l11_norm, Matrix};
use crate::metrics::topk_ratio;
use crate::optim::{optimizer_step, OptimizerState, StateFootprint, StepReport};
use crate::problems::{LogisticTask, MatrixQuadratic, Problem, ProblemInstance};
use crate::rng::RngStream;

/// Stream id reserved for building the problem instance.
pub const PROBLEM_STREAM: u64 = u64::MAX;
/// Stream id reserved for minibatch sampling and gradient noise.
pub const DATA_STREAM: u64 = u64::MAX - 1;
/// Stream id of the single weight matrix the harness optimizes.
pub const PARAM_STREAM: u64 = 0;

/// One row of `records.csv`. Values are measured at the iterate `W_step`,
/// before that step's update, except the moment diagnostics which describe
/// the state right after it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub step: usize,
    pub loss: f64,
    pub grad_l11: f64,
    pub grad_frob: f64,
    pub topk_g: Option<f64>,
    pub topk_m: Option<f64>,
    pub topk_v: Option<f64>,
    pub comp_err_m: Option<f64>,
    pub zeta: Option<f64>,
    pub state_elements: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    /// `W_step` for every recorded step, in record order.
    pub snapshots: Vec<Matrix>,
    pub final_weights: Matrix,
}

/// A run that stopped early, with everything recorded up to that point.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: RunOutput,
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<ProblemInstance> {
    let mut rng = RngStream::derive(cfg.seed, PROBLEM_STREAM, 0);
    Ok(match &cfg.problem {
        ProblemConfig::Quadratic {
            rows,
            cols,
            planted_rank,
            noise_std,
        } => ProblemInstance::Quadratic(MatrixQuadratic::planted(
            *rows,
            *cols,
            *planted_rank,
            *noise_std,
            &mut rng,
        )?),
        ProblemConfig::Logistic {
            samples,
            features,
            classes,
            l2_reg,
            dataset,
        } => match dataset {
            Some(path) => {
                ProblemInstance::Logistic(LogisticTask::from_csv(path, *classes, *l2_reg)?)
            }
            None => ProblemInstance::Logistic(LogisticTask::synthetic(
                *samples, *features, *classes, *l2_reg, &mut rng,
            )?),
        },
    })
}

/// Runs the experiment and drops partial results on failure.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    run_experiment_with(cfg, |_, _, _| {}).map_err(|f| f.error)
}

/// Runs the experiment, calling `observe(step, report, weights_after)` after
/// every optimizer step.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    mut observe: impl FnMut(usize, &StepReport, &Matrix),
) -> std::result::Result<RunOutput, Box<RunFailure>> {
    let empty = |error: Error| {
        Box::new(RunFailure {
            error,
            partial: RunOutput {
                records: Vec::new(),
                snapshots: Vec::new(),
                final_weights: Matrix::zeros(1, 1),
            },
        })
    };
    let problem = build_problem(cfg).map_err(empty)?;
    let (rows, cols) = problem.param_shape();
    let kind = cfg.optimizer.kind;
    let base = cfg.optimizer.hyper;
    let mut state = OptimizerState::new(kind, rows, cols, &base).map_err(empty)?;
    state.set_warm_start(cfg.warm_start_lion_momentum);
    let k = cfg.spectral_k.min(rows).min(cols);

    let mut out = RunOutput {
        records: Vec::with_capacity(cfg.steps.div_ceil(cfg.record_every)),
        snapshots: Vec::new(),
        final_weights: Matrix::zeros(rows, cols),
    };
    let mut w = Matrix::zeros(rows, cols);

    for t in 1..=cfg.steps {
        let result = (|| -> Result<Option<(RunRecord, Matrix)>> {
            let loss = problem.loss(&w)?;
            if !loss.is_finite() {
                return Err(Error::Aborted {
                    step: t,
                    message: format!("loss is {loss}"),
                });
            }
            let record_now = (t - 1) % cfg.record_every == 0;
            let exact = if record_now {
                Some(problem.grad(&w)?)
            } else {
                None
            };
            let sample = problem.stoch_grad(
                &w,
                base.batch_size,
                &mut RngStream::derive(cfg.seed, DATA_STREAM, t as u64),
            )?;

            let mut hp = base;
            hp.alpha *= cfg.schedule.factor(t, cfg.steps);
            let before = record_now.then(|| w.clone());
            let mut rng = RngStream::derive(cfg.seed, PARAM_STREAM, t as u64);
            let report = optimizer_step(kind, &mut w, &sample.grad, &mut state, &hp, &mut rng)
                .map_err(|e| match e {
                    Error::NonFinite(what) => Error::Aborted {
                        step: t,
                        message: format!("non-finite value in {what}"),
                    },
                    other => other,
                })?;
            if !w.is_finite() {
                return Err(Error::Aborted {
                    step: t,
                    message: "weights became non-finite".into(),
                });
            }
            observe(t, &report, &w);

            let (Some(exact), Some(before)) = (exact, before) else {
                return Ok(None);
            };
            let ratio = |m: &Matrix| topk_ratio(m, k).ok().map(|r| r.ratio);
            let record = RunRecord {
                step: t,
                loss,
                grad_l11: l11_norm(&exact),
                grad_frob: frob_norm(&exact),
                topk_g: ratio(&exact),
                topk_m: report.first_moment.as_ref().and_then(ratio),
                topk_v: report.second_moment.as_ref().and_then(ratio),
                comp_err_m: report.compression_error_m,
                zeta: report.correction.map(|c| c.zeta),
                state_elements: state.stored_elements(),
            };
            Ok(Some((record, before)))
        })();

        match result {
            Ok(Some((record, snapshot))) => {
                out.records.push(record);
                out.snapshots.push(snapshot);
            }
            Ok(None) => {}
            Err(error) => {
                out.final_weights = w;
                return Err(Box::new(RunFailure {
                    error,
                    partial: out,
                }));
            }
        }
    }
    out.final_weights = w;
    Ok(out)
}
