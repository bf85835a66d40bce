//! JSON experiment configuration.
//!
//! Parsing goes through `serde_json::Value` so that every error names the
//! offending field by its dotted path (`optimizer.beta1`, `problem.rows`).

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::metrics::DEFAULT_SPECTRAL_K;
use crate::optim::{HyperParams, OptimizerKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemConfig {
    Quadratic {
        rows: usize,
        cols: usize,
        /// Rank of the planted minimizer; 0 means dense.
        planted_rank: usize,
        noise_std: f64,
    },
    Logistic {
        samples: usize,
        features: usize,
        classes: usize,
        l2_reg: f64,
        dataset: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    #[serde(serialize_with = "serialize_kind")]
    pub kind: OptimizerKind,
    #[serde(flatten)]
    pub hyper: HyperParams,
}

fn serialize_kind<S: serde::Serializer>(
    kind: &OptimizerKind,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(kind.as_str())
}

/// Learning-rate multiplier over the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LrSchedule {
    Constant,
    /// Linear ramp over the first `warmup_ratio · steps` steps, then linear
    /// decay to zero at the end of the run.
    LinearWarmup {
        warmup_ratio: f64,
    },
}

impl LrSchedule {
    /// Multiplier for 1-based step `t` of a `total`-step run.
    pub fn factor(&self, t: usize, total: usize) -> f64 {
        match *self {
            LrSchedule::Constant => 1.0,
            LrSchedule::LinearWarmup { warmup_ratio } => {
                let warmup = (warmup_ratio * total as f64).ceil() as usize;
                if t <= warmup {
                    t as f64 / warmup as f64
                } else {
                    let remaining = (total + 1 - t) as f64;
                    let span = (total + 1 - warmup) as f64;
                    remaining / span
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub problem: ProblemConfig,
    pub optimizer: OptimizerConfig,
    pub steps: usize,
    pub record_every: usize,
    pub spectral_k: usize,
    /// Start Lion-family momentum from the first gradient instead of zero.
    pub warm_start_lion_momentum: bool,
    pub output_path: PathBuf,
    pub schedule: LrSchedule,
}

impl ExperimentConfig {
    pub fn param_shape(&self) -> (usize, usize) {
        match &self.problem {
            ProblemConfig::Quadratic { rows, cols, .. } => (*rows, *cols),
            ProblemConfig::Logistic {
                classes, features, ..
            } => (*classes, *features),
        }
    }

    /// Pretty JSON of the fully resolved configuration.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Defaults that depend on the optimizer kind.
pub fn default_hyper(kind: OptimizerKind) -> HyperParams {
    HyperParams {
        beta1: if kind == OptimizerKind::MLorcAdamW {
            0.8
        } else {
            0.9
        },
        beta2: if kind.is_lion_family() { 0.99 } else { 0.999 },
        ..HyperParams::default()
    }
}

struct Fields<'a> {
    prefix: &'a str,
    obj: &'a Map<String, Value>,
    known: Vec<&'static str>,
}

impl<'a> Fields<'a> {
    fn new(prefix: &'a str, value: &'a Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::config(display(prefix), "expected a JSON object"))?;
        Ok(Fields {
            prefix,
            obj,
            known: Vec::new(),
        })
    }

    fn path(&self, name: &str) -> String {
        if self.prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}.{name}", self.prefix)
        }
    }

    fn get(&mut self, name: &'static str) -> Option<&'a Value> {
        self.known.push(name);
        self.obj.get(name).filter(|v| !v.is_null())
    }

    fn require(&mut self, name: &'static str) -> Result<&'a Value> {
        let path = self.path(name);
        self.get(name)
            .ok_or_else(|| Error::config(path, "missing required field"))
    }

    fn uint(&mut self, name: &'static str) -> Result<Option<u64>> {
        let path = self.path(name);
        self.get(name)
            .map(|v| {
                v.as_u64().ok_or_else(|| {
                    Error::config(path, format!("expected a nonnegative integer, got {v}"))
                })
            })
            .transpose()
    }

    fn usize_or(&mut self, name: &'static str, default: usize) -> Result<usize> {
        Ok(self.uint(name)?.map_or(default, |v| v as usize))
    }

    fn usize_req(&mut self, name: &'static str) -> Result<usize> {
        let path = self.path(name);
        self.uint(name)?
            .map(|v| v as usize)
            .ok_or_else(|| Error::config(path, "missing required field"))
    }

    fn float_or(&mut self, name: &'static str, default: f64) -> Result<f64> {
        let path = self.path(name);
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Error::config(path, format!("expected a number, got {v}"))),
        }
    }

    fn bool_or(&mut self, name: &'static str, default: bool) -> Result<bool> {
        let path = self.path(name);
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .as_bool()
                .ok_or_else(|| Error::config(path, format!("expected true or false, got {v}"))),
        }
    }

    fn string(&mut self, name: &'static str) -> Result<Option<&'a str>> {
        let path = self.path(name);
        self.get(name)
            .map(|v| {
                v.as_str()
                    .ok_or_else(|| Error::config(path, format!("expected a string, got {v}")))
            })
            .transpose()
    }

    fn finish(self) -> Result<()> {
        for key in self.obj.keys() {
            if !self.known.contains(&key.as_str()) {
                return Err(Error::config(self.path(key), "unknown field"));
            }
        }
        Ok(())
    }
}

fn display(prefix: &str) -> String {
    if prefix.is_empty() {
        "<root>".into()
    } else {
        prefix.into()
    }
}

fn positive(field: String, v: usize) -> Result<usize> {
    if v == 0 {
        Err(Error::config(field, "must be at least 1"))
    } else {
        Ok(v)
    }
}

/// Parses and validates an experiment configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::config("<root>", format!("invalid JSON: {e}")))?;
    let mut top = Fields::new("", &root)?;

    let seed = top
        .uint("seed")?
        .ok_or_else(|| Error::config("seed", "missing required field"))?;
    let problem = parse_problem(top.require("problem")?)?;
    let optimizer = parse_optimizer(top.require("optimizer")?)?;
    let steps = positive("steps".into(), top.usize_req("steps")?)?;
    let record_every = positive("record_every".into(), top.usize_or("record_every", 1)?)?;
    if record_every > steps {
        return Err(Error::config(
            "record_every",
            format!("must not exceed steps ({steps}), got {record_every}"),
        ));
    }
    let spectral_k = positive(
        "spectral_k".into(),
        top.usize_or("spectral_k", DEFAULT_SPECTRAL_K)?,
    )?;
    let warm_start_lion_momentum = top.bool_or("warm_start_lion_momentum", false)?;
    let output_path = PathBuf::from(top.string("output_path")?.unwrap_or("runs/experiment"));
    let schedule = match top.get("schedule") {
        None => LrSchedule::Constant,
        Some(v) => parse_schedule(v)?,
    };
    top.finish()?;

    let cfg = ExperimentConfig {
        seed,
        problem,
        optimizer,
        steps,
        record_every,
        spectral_k,
        warm_start_lion_momentum,
        output_path,
        schedule,
    };
    check_rank_fits(&cfg)?;
    Ok(cfg)
}

fn parse_problem(v: &Value) -> Result<ProblemConfig> {
    let mut f = Fields::new("problem", v)?;
    let kind = f
        .string("kind")?
        .ok_or_else(|| Error::config("problem.kind", "missing required field"))?;
    let problem = match kind {
        "quadratic" => {
            let rows = positive("problem.rows".into(), f.usize_req("rows")?)?;
            let cols = positive("problem.cols".into(), f.usize_req("cols")?)?;
            let planted_rank = f.usize_or("planted_rank", 0)?;
            let noise_std = f.float_or("noise_std", 0.0)?;
            if !(noise_std.is_finite() && noise_std >= 0.0) {
                return Err(Error::config(
                    "problem.noise_std",
                    format!("must be nonnegative, got {noise_std}"),
                ));
            }
            ProblemConfig::Quadratic {
                rows,
                cols,
                planted_rank,
                noise_std,
            }
        }
        "logistic" => {
            let dataset = f.string("dataset")?.map(PathBuf::from);
            let samples = positive("problem.samples".into(), f.usize_or("samples", 256)?)?;
            let features = match f.uint("features")? {
                Some(n) => positive("problem.features".into(), n as usize)?,
                None if dataset.is_some() => 0,
                None => return Err(Error::config("problem.features", "missing required field")),
            };
            let classes = positive("problem.classes".into(), f.usize_or("classes", 1)?)?;
            let l2_reg = f.float_or("l2_reg", 0.0)?;
            if !(l2_reg.is_finite() && l2_reg >= 0.0) {
                return Err(Error::config(
                    "problem.l2_reg",
                    format!("must be nonnegative, got {l2_reg}"),
                ));
            }
            ProblemConfig::Logistic {
                samples,
                features,
                classes,
                l2_reg,
                dataset,
            }
        }
        other => {
            return Err(Error::config(
                "problem.kind",
                format!("unknown problem `{other}`, expected quadratic or logistic"),
            ))
        }
    };
    f.finish()?;
    Ok(problem)
}

fn parse_optimizer(v: &Value) -> Result<OptimizerConfig> {
    let mut f = Fields::new("optimizer", v)?;
    let kind: OptimizerKind = f
        .string("kind")?
        .ok_or_else(|| Error::config("optimizer.kind", "missing required field"))?
        .parse()?;
    let d = default_hyper(kind);
    let hyper = HyperParams {
        alpha: f.float_or("alpha", d.alpha)?,
        beta1: f.float_or("beta1", d.beta1)?,
        beta2: f.float_or("beta2", d.beta2)?,
        weight_decay: f.float_or("weight_decay", d.weight_decay)?,
        epsilon: f.float_or("epsilon", d.epsilon)?,
        rank: f.usize_or("rank", d.rank)?,
        oversample: f.usize_or("oversample", d.oversample)?,
        batch_size: f.usize_or("batch_size", d.batch_size)?,
        galore_update_freq: f.usize_or("galore_update_freq", d.galore_update_freq)?,
    };
    f.finish()?;
    hyper.validate().map_err(|e| match e {
        Error::Config { field, message } => Error::config(format!("optimizer.{field}"), message),
        other => other,
    })?;
    Ok(OptimizerConfig { kind, hyper })
}

fn parse_schedule(v: &Value) -> Result<LrSchedule> {
    let mut f = Fields::new("schedule", v)?;
    let kind = f.string("kind")?.unwrap_or("constant");
    let schedule = match kind {
        "constant" => LrSchedule::Constant,
        "linear-warmup" => {
            let warmup_ratio = f.float_or("warmup_ratio", 0.03)?;
            if !(warmup_ratio > 0.0 && warmup_ratio < 1.0) {
                return Err(Error::config(
                    "schedule.warmup_ratio",
                    format!("must lie in (0, 1), got {warmup_ratio}"),
                ));
            }
            LrSchedule::LinearWarmup { warmup_ratio }
        }
        other => {
            return Err(Error::config(
                "schedule.kind",
                format!("unknown schedule `{other}`, expected constant or linear-warmup"),
            ))
        }
    };
    f.finish()?;
    Ok(schedule)
}

fn check_rank_fits(cfg: &ExperimentConfig) -> Result<()> {
    let (rows, cols) = cfg.param_shape();
    // dataset-backed logistic problems learn their width at load time
    if rows == 0 || cols == 0 {
        return Ok(());
    }
    if cfg.optimizer.kind == OptimizerKind::GaLoreAdamW && cfg.optimizer.hyper.rank > rows.min(cols)
    {
        return Err(Error::config(
            "optimizer.rank",
            format!(
                "projection rank must not exceed min(rows, cols) = {}",
                rows.min(cols)
            ),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "seed": 3,
        "problem": {"kind": "quadratic", "rows": 20, "cols": 16},
        "optimizer": {"kind": "mlorc-adamw"},
        "steps": 100
    }"#;

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        let hp = cfg.optimizer.hyper;
        assert_eq!(hp.beta1, 0.8);
        assert_eq!(hp.beta2, 0.999);
        assert_eq!(hp.oversample, 0);
        assert_eq!(cfg.record_every, 1);
        assert_eq!(cfg.spectral_k, 8);
        assert_eq!(cfg.schedule, LrSchedule::Constant);
        assert!(!cfg.warm_start_lion_momentum);
    }

    #[test]
    fn per_kind_beta_defaults() {
        for (kind, b1, b2) in [
            ("adamw", 0.9, 0.999),
            ("galore-adamw", 0.9, 0.999),
            ("lion", 0.9, 0.99),
            ("mlorc-lion", 0.9, 0.99),
            ("mlorc-adamw", 0.8, 0.999),
        ] {
            let text = MINIMAL.replace("mlorc-adamw", kind);
            let hp = parse_config(&text).unwrap().optimizer.hyper;
            assert_eq!((hp.beta1, hp.beta2), (b1, b2), "{kind}");
        }
    }

    #[test]
    fn beta1_out_of_range_names_field() {
        let text = MINIMAL.replace(
            r#""kind": "mlorc-adamw""#,
            r#""kind": "mlorc-adamw", "beta1": 1.2"#,
        );
        assert_eq!(
            field_of(parse_config(&text).unwrap_err()),
            "optimizer.beta1"
        );
    }

    #[test]
    fn unknown_optimizer_kind() {
        let text = MINIMAL.replace("mlorc-adamw", "sgd");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("sgd"));
        assert_eq!(field_of(err), "optimizer.kind");
    }

    #[test]
    fn missing_and_unknown_fields() {
        let text = MINIMAL.replace(r#""steps": 100"#, r#""stepz": 100"#);
        let field = field_of(parse_config(&text).unwrap_err());
        assert!(field == "steps" || field == "stepz");
        let text = MINIMAL.replace(r#", "cols": 16"#, "");
        assert_eq!(field_of(parse_config(&text).unwrap_err()), "problem.cols");
        let text = MINIMAL.replace(r#""steps": 100"#, r#""steps": 100, "record_every": 101"#);
        assert_eq!(field_of(parse_config(&text).unwrap_err()), "record_every");
        assert_eq!(field_of(parse_config("[1]").unwrap_err()), "<root>");
    }

    #[test]
    fn galore_rank_must_fit() {
        let text = MINIMAL.replace(
            r#""kind": "mlorc-adamw""#,
            r#""kind": "galore-adamw", "rank": 17"#,
        );
        assert_eq!(field_of(parse_config(&text).unwrap_err()), "optimizer.rank");
    }

    #[test]
    fn schedule_parsing_and_factor() {
        let text = MINIMAL.replace(
            r#""steps": 100"#,
            r#""steps": 100, "schedule": {"kind": "linear-warmup", "warmup_ratio": 0.1}"#,
        );
        let cfg = parse_config(&text).unwrap();
        let s = cfg.schedule;
        assert_eq!(s.factor(1, 100), 0.1);
        assert_eq!(s.factor(10, 100), 1.0);
        assert!(s.factor(50, 100) < 1.0 && s.factor(50, 100) > s.factor(100, 100));
        assert!(s.factor(100, 100) > 0.0);
        assert_eq!(LrSchedule::Constant.factor(7, 10), 1.0);
    }

    #[test]
    fn resolved_config_serializes_kind_names() {
        let json = parse_config(MINIMAL).unwrap().to_json();
        assert!(json.contains(r#""kind": "mlorc-adamw""#));
        assert!(json.contains(r#""kind": "quadratic""#));
    }

    #[test]
    fn schema_lists_the_parsed_fields() {
        let schema: Value =
            serde_json::from_str(include_str!("../../schema/experiment.schema.json")).unwrap();
        let keys = |v: &Value| -> Vec<String> {
            let mut k: Vec<String> = v["properties"]
                .as_object()
                .unwrap()
                .keys()
                .cloned()
                .collect();
            k.sort();
            k
        };
        let cfg = parse_config(MINIMAL).unwrap();
        let resolved: Value = serde_json::from_str(&cfg.to_json()).unwrap();
        let mut top: Vec<String> = resolved.as_object().unwrap().keys().cloned().collect();
        top.sort();
        assert_eq!(keys(&schema), top);
        let mut opt: Vec<String> = resolved["optimizer"]
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect();
        opt.sort();
        assert_eq!(keys(&schema["properties"]["optimizer"]), opt);
        let quad = &schema["properties"]["problem"]["oneOf"][0];
        let mut prob: Vec<String> = resolved["problem"]
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect();
        prob.sort();
        assert_eq!(keys(quad), prob);
    }
}
