//! Experiment harness: configuration, deterministic runs and their files.
//!
//! A run directory holds `records.csv`, `weights.csv` (final iterate) and
//! `config.json` (the resolved configuration). A failed run also leaves
//! `error.json` next to whatever records it produced.

mod compare;
mod config;
mod files;
mod run;

use std::fs;
use std::path::{Path, PathBuf};

pub use self::compare::{compare_outputs, compare_runs, DivergenceReport};
pub use self::config::{
    default_hyper, parse_config, ExperimentConfig, LrSchedule, OptimizerConfig, ProblemConfig,
};
pub use self::files::{
    emit_csv, read_matrix, read_records, write_matrix, write_records, RECORD_HEADER,
};
pub use self::run::{
    build_problem, run_experiment, run_experiment_with, RunFailure, RunOutput, RunRecord,
    DATA_STREAM, PARAM_STREAM, PROBLEM_STREAM,
};

use crate::error::{Error, Result};

/// Overrides the directory that relative `output_path`s resolve against.
pub const OUTPUT_ROOT_ENV: &str = "MLORC_OUTPUT_ROOT";

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// `output_path` joined onto `root` when it is relative and a root is given.
pub fn resolve_output_dir(output_path: &Path, root: Option<&Path>) -> PathBuf {
    match root {
        Some(root) if output_path.is_relative() => root.join(output_path),
        _ => output_path.to_path_buf(),
    }
}

/// Output directory for `cfg`, honouring [`OUTPUT_ROOT_ENV`].
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from);
    resolve_output_dir(&cfg.output_path, root.as_deref())
}

/// Runs `cfg` and writes its files into `dir`. On failure the partial
/// records and an `error.json` manifest are written before returning the error.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutput> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |p: PathBuf, text: String| fs::write(&p, text).map_err(|e| Error::io(&p, e));
    write(dir.join("config.json"), cfg.to_json() + "\n")?;
    let stale = dir.join("error.json");
    if stale.exists() {
        fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
    }

    match run_experiment_with(cfg, |_, _, _| {}) {
        Ok(out) => {
            emit_csv(&out.records, &dir.join("records.csv"))?;
            write_matrix(&out.final_weights, &dir.join("weights.csv"))?;
            Ok(out)
        }
        Err(failure) => {
            let RunFailure { error, partial } = *failure;
            emit_csv(&partial.records, &dir.join("records.csv"))?;
            let step = match &error {
                Error::Aborted { step, .. } => Some(*step),
                _ => None,
            };
            let manifest = serde_json::json!({
                "step": step,
                "error": error.to_string(),
                "records_written": partial.records.len(),
            });
            write(stale, format!("{manifest:#}\n"))?;
            Err(error)
        }
    }
}

/// Outcome of one configuration in a sweep.
#[derive(Debug)]
pub struct SweepEntry {
    pub config_path: PathBuf,
    pub output_dir: Option<PathBuf>,
    pub result: Result<usize>,
}

/// Runs every `*.json` in `dir` in file-name order. A failing configuration
/// does not stop the sweep; `result` holds its record count or error.
pub fn sweep_dir(dir: &Path) -> Result<Vec<SweepEntry>> {
    let mut configs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    configs.sort();
    Ok(configs
        .into_iter()
        .map(|config_path| match load_config(&config_path) {
            Err(e) => SweepEntry {
                config_path,
                output_dir: None,
                result: Err(e),
            },
            Ok(cfg) => {
                let out = output_dir(&cfg);
                let result = run_to_dir(&cfg, &out).map(|o| o.records.len());
                SweepEntry {
                    config_path,
                    output_dir: Some(out),
                    result,
                }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path, alpha: f64) -> ExperimentConfig {
        let mut cfg = parse_config(
            r#"{"seed": 5, "steps": 12, "record_every": 4,
                "problem": {"kind": "quadratic", "rows": 6, "cols": 5},
                "optimizer": {"kind": "mlorc-lion", "rank": 2}}"#,
        )
        .unwrap();
        cfg.optimizer.hyper.alpha = alpha;
        cfg.output_path = dir.to_path_buf();
        cfg
    }

    #[test]
    fn output_root_resolution() {
        let root = Path::new("/tmp/root");
        assert_eq!(
            resolve_output_dir(Path::new("runs/a"), Some(root)),
            root.join("runs/a")
        );
        assert_eq!(
            resolve_output_dir(Path::new("/abs"), Some(root)),
            PathBuf::from("/abs")
        );
        assert_eq!(
            resolve_output_dir(Path::new("runs/a"), None),
            PathBuf::from("runs/a")
        );
    }

    #[test]
    fn run_to_dir_writes_all_files() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = config(tmp.path(), 1e-3);
        let out = run_to_dir(&cfg, tmp.path()).unwrap();
        assert_eq!(
            read_records(&tmp.path().join("records.csv")).unwrap(),
            out.records
        );
        assert_eq!(
            read_matrix(&tmp.path().join("weights.csv")).unwrap(),
            out.final_weights
        );
        let echoed = fs::read_to_string(tmp.path().join("config.json")).unwrap();
        assert_eq!(parse_config(&echoed).unwrap(), cfg);
        assert!(!tmp.path().join("error.json").exists());
    }

    #[test]
    fn failed_run_leaves_manifest() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = config(tmp.path(), 1e300);
        cfg.optimizer.kind = crate::optim::OptimizerKind::AdamW;
        let err = run_to_dir(&cfg, tmp.path()).unwrap_err();
        assert!(matches!(err, Error::Aborted { step: 2, .. }));
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join("error.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["step"], 2);
        assert_eq!(
            read_records(&tmp.path().join("records.csv")).unwrap().len(),
            1
        );
    }

    #[test]
    fn sweep_runs_each_config_and_reports_failures() {
        let tmp = tempfile::tempdir().unwrap();
        let good = config(&tmp.path().join("good"), 1e-3);
        fs::write(tmp.path().join("a.json"), good.to_json()).unwrap();
        fs::write(tmp.path().join("b.json"), r#"{"seed": 1}"#).unwrap();
        fs::write(tmp.path().join("notes.txt"), "ignored").unwrap();
        let entries = sweep_dir(tmp.path()).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(*entries[0].result.as_ref().unwrap(), 3);
        assert!(entries[1].result.is_err());
    }
}
