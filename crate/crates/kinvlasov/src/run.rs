//! The `run` and `compare` drivers.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use kinvlasov_core::diagnostics::{compare_runs, diagnostics_record, DivergenceRow, RunSnapshot};
use kinvlasov_core::state::initialize_state;
use kinvlasov_core::vlasov::{step, StepOutput};
use kinvlasov_core::{Config, ForceMode, PhaseSpaceGrid, SimulationState, TimePlan};

use crate::config_file::parse_config;
use crate::error::{CliError, Result};
use crate::output::{
    render_divergence, render_manifest, write_snapshot, DiagnosticsWriter, DIAGNOSTICS_FILE,
    DIVERGENCE_FILE, MANIFEST_FILE,
};

/// What a completed run wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: u64,
    pub dt: f64,
    pub diagnostics_rows: usize,
    pub files: Vec<PathBuf>,
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_config(&text)
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Runs `config` to `t_end`, writing the manifest, diagnostics and snapshots
/// under `out_dir`.
///
/// Diagnostics are evaluated every step; a row and a snapshot are written at
/// step 0 and every `output_every` steps after. If the solver fails, the last
/// good state's diagnostics row is flushed before the error is returned.
pub fn run(config: &Config, out_dir: &Path) -> Result<RunSummary> {
    prepare_dir(out_dir)?;
    let grid = PhaseSpaceGrid::from_config(config);
    let plan = TimePlan::from_config(config, &grid)?;

    let manifest = out_dir.join(MANIFEST_FILE);
    fs::write(&manifest, render_manifest(config, &grid, &plan)).map_err(CliError::io(&manifest))?;
    let diag_path = out_dir.join(DIAGNOSTICS_FILE);
    let file = File::create(&diag_path).map_err(CliError::io(&diag_path))?;
    let mut writer = DiagnosticsWriter::new(BufWriter::new(file));
    let mut files = vec![manifest, diag_path.clone()];
    let mut rows = 0;

    let mut history = vec![initialize_state(config, &grid)?];
    let mut pending = None;
    for n in 0..=plan.nsteps {
        if n > 0 {
            match step(
                history.last().expect("non-empty history"),
                config,
                &grid,
                plan.dt,
            ) {
                Ok(StepOutput { state, .. }) => {
                    history.push(state);
                    if history.len() > 3 {
                        history.remove(0);
                    }
                }
                Err(source) => {
                    if let Some(record) = pending.take() {
                        writer.write(&record).map_err(CliError::io(&diag_path))?;
                    }
                    writer.flush().map_err(CliError::io(&diag_path))?;
                    return Err(CliError::Solver {
                        step: n - 1,
                        source,
                    });
                }
            }
        }
        let record = diagnostics_record(&history, config, &grid, plan.dt)?;
        if n % config.output_every as u64 == 0 {
            writer.write(&record).map_err(CliError::io(&diag_path))?;
            rows += 1;
            files.extend(write_snapshot(
                history.last().expect("state"),
                &grid,
                out_dir,
            )?);
            pending = None;
        } else {
            pending = Some(record);
        }
    }
    writer.flush().map_err(CliError::io(&diag_path))?;
    Ok(RunSummary {
        steps: plan.nsteps,
        dt: plan.dt,
        diagnostics_rows: rows,
        files,
    })
}

pub fn run_command(config_path: &Path, out_dir: &Path) -> Result<RunSummary> {
    run(&load_config(config_path)?, out_dir)
}

fn with_mode(config: &Config, mode: ForceMode) -> Config {
    Config {
        force_mode: mode,
        ..config.clone()
    }
}

fn snapshot_with_forces(state: &SimulationState, out: &StepOutput) -> RunSnapshot {
    let mut snap = RunSnapshot::capture(state);
    snap.forces = Some((out.force_plus.clone(), out.force_minus.clone()));
    snap
}

/// Runs `config` under both force laws from one shared initial state and
/// returns the per-step distances between the runs.
///
/// Row `n` compares the states at step `n` together with the forces each run
/// applied in the step leaving it; the final row has no such step, so its
/// `force_dist` is NaN.
pub fn compare(config: &Config) -> Result<Vec<DivergenceRow>> {
    let modified = with_mode(config, ForceMode::Modified);
    let standard = with_mode(config, ForceMode::Standard);
    let grid = PhaseSpaceGrid::from_config(config);
    let plan = TimePlan::from_config(config, &grid)?;

    let initial = initialize_state(&modified, &grid)?;
    let mut a = initial.clone();
    let mut b = initial;
    let mut rows = Vec::with_capacity(plan.nsteps as usize + 1);
    for n in 0..plan.nsteps {
        let (out_a, out_b) = rayon::join(
            || step(&a, &modified, &grid, plan.dt),
            || step(&b, &standard, &grid, plan.dt),
        );
        let wrap = |source| CliError::Solver { step: n, source };
        let (out_a, out_b) = (out_a.map_err(wrap)?, out_b.map_err(wrap)?);
        let snap_a = snapshot_with_forces(&a, &out_a);
        let snap_b = snapshot_with_forces(&b, &out_b);
        rows.extend(compare_runs(&grid, &[snap_a], &grid, &[snap_b])?);
        a = out_a.state;
        b = out_b.state;
    }
    rows.extend(compare_runs(
        &grid,
        &[RunSnapshot::capture(&a)],
        &grid,
        &[RunSnapshot::capture(&b)],
    )?);
    Ok(rows)
}

/// `compare`, writing `manifest.txt` and `divergence.csv` under `out_dir`.
pub fn compare_command(config_path: &Path, out_dir: &Path) -> Result<Vec<DivergenceRow>> {
    let config = load_config(config_path)?;
    prepare_dir(out_dir)?;
    let grid = PhaseSpaceGrid::from_config(&config);
    let plan = TimePlan::from_config(&config, &grid)?;
    let manifest = out_dir.join(MANIFEST_FILE);
    let mut text = render_manifest(&config, &grid, &plan);
    text.insert_str(
        0,
        "# compare: force_mode below is overridden; both modes are run\n",
    );
    fs::write(&manifest, text).map_err(CliError::io(&manifest))?;
    let rows = compare(&config)?;
    let path = out_dir.join(DIVERGENCE_FILE);
    fs::write(&path, render_divergence(&rows)).map_err(CliError::io(&path))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::read_diagnostics;

    fn small() -> Config {
        Config {
            nx: 16,
            np: 32,
            t_end: 0.5,
            output_every: 4,
            ..Config::default()
        }
    }

    #[test]
    fn run_writes_expected_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small();
        let summary = run(&cfg, dir.path()).unwrap();
        let rows = read_diagnostics(&dir.path().join(DIAGNOSTICS_FILE)).unwrap();
        assert_eq!(rows.len(), summary.steps as usize / 4 + 1);
        assert_eq!(rows.len(), summary.diagnostics_rows);
        assert!(rows.iter().all(|r| r.step % 4 == 0));
        assert!(dir.path().join("f_minus_4.dat").exists());
        assert!(dir.path().join("fields_0.dat").exists());
    }

    #[test]
    fn abort_flushes_last_row() {
        let dir = tempfile::tempdir().unwrap();
        // A kick this strong trips the displacement bound after a few steps.
        let cfg = Config {
            nx: 16,
            np: 16,
            p_max: 0.5,
            c: 1.0,
            relativistic: false,
            force_mode: ForceMode::Standard,
            output_every: 1000,
            init: kinvlasov_core::InitConfig {
                amplitude: 0.9,
                temperature: 0.004,
                n0: 50.0,
                ..Config::default().init
            },
            plus: kinvlasov_core::SpeciesConfig {
                q: 1.0,
                m: 1.0,
                temperature: None,
            },
            ..Config::default()
        }
        .validate()
        .unwrap();
        let err = run(&cfg, dir.path()).unwrap_err();
        let CliError::Solver { step, .. } = err else {
            panic!("expected solver failure, got {err:?}");
        };
        let rows = read_diagnostics(&dir.path().join(DIAGNOSTICS_FILE)).unwrap();
        assert_eq!(rows.first().unwrap().step, 0);
        if step > 0 {
            assert_eq!(rows.last().unwrap().step, step);
        }
    }

    #[test]
    fn compare_starts_identical() {
        let rows = compare(&small()).unwrap();
        let first = rows[0];
        assert_eq!(first.f_plus_dist, 0.0);
        assert_eq!(first.f_minus_dist, 0.0);
        assert_eq!(first.phi_dist, 0.0);
        assert!(first.force_dist > 0.0);
        assert!(rows.last().unwrap().force_dist.is_nan());
        assert!(rows[..rows.len() - 1]
            .iter()
            .all(|r| r.force_dist.is_finite()));
    }
}
