use std::path::PathBuf;
use std::process::Command;

use sphermax_cli::config::{Config, ConfigError, Experiment};
use sphermax_cli::manifest::ExperimentRun;

fn configs() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut v: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn shipped_configs_match_the_defaults() {
    let paths = configs();
    assert_eq!(paths.len(), 8);
    for p in paths {
        let cfg = Config::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        let stem = p.file_stem().unwrap().to_str().unwrap();
        assert_eq!(cfg.experiment.name(), stem);
        assert_eq!(cfg, Config::new(cfg.experiment), "{stem}");
    }
}

#[test]
fn malformed_config_names_the_field() {
    let err = Config::from_toml("experiment = \"fio-slope\"\n[fio]\nm = 1000\n").unwrap_err();
    assert!(matches!(&err, ConfigError::Schema { field, .. } if field == "fio.m"), "{err}");
    let err = Config::from_toml("experiment = \"regions\"\n[regions]\npoints = 3\n").unwrap_err();
    assert!(err.to_string().contains("points"), "{err}");
    let err = Config::from_toml("experiment = \"regions\"\ncriteria = [\"blowup-slope\"]\n").unwrap_err();
    assert!(err.to_string().contains("blowup-slope"), "{err}");
}

#[test]
fn binary_runs_a_config_and_writes_the_manifest() {
    let out = tempfile::tempdir().unwrap();
    let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/regions.toml");
    let st = Command::new(env!("CARGO_BIN_EXE_sphermax"))
        .args(["--out", out.path().to_str().unwrap(), "run", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let stdout = String::from_utf8_lossy(&st.stdout);
    assert!(stdout.contains("regions-inclusion"), "{stdout}");
    let run = ExperimentRun::read(out.path()).unwrap();
    assert_eq!(run.experiment, Experiment::Regions);
    assert!(run.passed());
    for file in run.outputs.values() {
        assert!(out.path().join(file).is_file(), "{file}");
    }
}

#[test]
fn failing_verdicts_set_the_exit_code() {
    let out = tempfile::tempdir().unwrap();
    let cfg = out.path().join("tight.toml");
    // a residual slack of zero cannot be met
    std::fs::write(&cfg, "experiment = \"multiplier-residual\"\n[multiplier]\nslack = -5.0\nrho_max = 256.0\n").unwrap();
    let st = Command::new(env!("CARGO_BIN_EXE_sphermax"))
        .args(["--out", out.path().join("run").to_str().unwrap(), "run", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2), "{}", String::from_utf8_lossy(&st.stdout));
}
