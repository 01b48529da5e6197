//! Configured experiment runs: config in, run directory with manifest,
//! CSV tables and SVG plots out.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod plot;

use std::path::Path;

use anyhow::{Context, Result};

pub use config::{Config, ConfigError, Experiment};
pub use manifest::{ExperimentRun, Verdict};

/// Sets the size of the global worker pool. Only the first call takes effect.
pub fn init_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Runs `cfg` into `out`, which is created if missing. Failures inside the
/// experiment become failed verdicts; only I/O on the run directory errors.
pub fn run(cfg: &Config, out: &Path) -> Result<ExperimentRun> {
    cfg.validate()?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    sphermax::fields::set_memory_budget(cfg.max_points);
    let started = timestamp();
    let mut art = experiments::Artifacts::new(out);
    let active = cfg.active_criteria();
    let verdicts = match experiments::run_experiment(cfg, &mut art) {
        Ok(all) => all.into_iter().filter(|v| active.contains(&v.criterion.as_str())).collect(),
        Err(e) => active.iter().map(|c| Verdict::failed(c, format!("{e:#}"))).collect(),
    };
    let run = ExperimentRun {
        schema: manifest::SCHEMA_VERSION,
        id: manifest::config_id(cfg),
        experiment: cfg.experiment,
        config: cfg.clone(),
        started,
        finished: timestamp(),
        outputs: art.outputs,
        verdicts,
    };
    run.write(out)?;
    Ok(run)
}
