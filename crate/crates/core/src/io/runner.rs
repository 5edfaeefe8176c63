use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::artifacts::{ArtifactDir, LogLogPlot, SlopeGuide};
use super::config::{parse_config, ScenarioConfig, ScenarioKind, SymbolsConfig};
use super::RunError;
use crate::analysis::{
    divergence_form_ablation, run_linear, AblationReport, DecayReport, NormSeries, Verdict,
};
use crate::nonlinear::{run, RunEvent, RunSample};
use crate::symbols::{degeneracy_sweep, verify_symbols, DegeneracySweep, RegimeCheck};

/// Bound on the relative change of the mean density over a nonlinear run.
pub const NONLINEAR_DRIFT_TOL: f64 = 1e-10;
/// Bound on the relative conjugate-symmetry defect over a nonlinear run.
pub const NONLINEAR_SYMMETRY_TOL: f64 = 1e-12;
/// Relative slack when checking that the global norm never decreases.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 2,
        }
    }

    fn of(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit: String,
    pub version: String,
    pub kind: ScenarioKind,
    pub seed: Option<u64>,
    /// The normalized configuration, defaults included.
    pub config: String,
    /// The document as supplied, when read from a file.
    pub source: Option<String>,
}

/// Runs one scenario and writes its artifacts under `out`.
///
/// The manifest is written before any computation so that a failing run
/// still leaves a record of what was attempted.
pub fn run_scenario(config: &ScenarioConfig, source: Option<&str>, out: &Path) -> Result<Outcome, RunError> {
    let dir = ArtifactDir::create(out)?;
    dir.write_json(
        "manifest.json",
        &Manifest {
            toolkit: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            kind: config.kind,
            seed: config.seed,
            config: config.to_toml(),
            source: source.map(str::to_string),
        },
    )?;
    log::info!("running {} into {}", config.kind.name(), out.display());
    match config.kind {
        ScenarioKind::SymbolVerify => symbol_verify(config, &dir),
        ScenarioKind::LinearDecay => linear_decay(config, &dir),
        ScenarioKind::Ablation => ablation(config, &dir),
        ScenarioKind::NonlinearRun => nonlinear_run(config, &dir),
    }
}

#[derive(Serialize)]
struct SymbolReport {
    kind: ScenarioKind,
    tolerance: f64,
    regimes: Vec<RegimeCheck>,
    jump_tolerance: f64,
    sweep: DegeneracySweep,
    verdict: Verdict,
}

fn symbol_verify(config: &ScenarioConfig, dir: &ArtifactDir) -> Result<Outcome, RunError> {
    let s: SymbolsConfig = config.symbols.unwrap_or_default();
    let seed = config.seed.unwrap_or_default();
    let regimes = verify_symbols(s.cases, s.dim, seed);
    let xi = &[0.8, -0.3, 0.5, 0.2][..s.dim];
    let sweep = degeneracy_sweep(1.0, 1.0, 1.0, xi, 1.5).map_err(|e| RunError::Usage(e.to_string()))?;
    let ok = regimes.iter().all(|r| r.max_deviation <= s.tolerance) && sweep.branch_jump <= s.jump_tolerance;
    dir.write_json(
        "report.json",
        &SymbolReport {
            kind: config.kind,
            tolerance: s.tolerance,
            regimes,
            jump_tolerance: s.jump_tolerance,
            sweep,
            verdict: Verdict::from_bool(ok),
        },
    )?;
    Ok(Outcome::of(ok))
}

fn guide_for(series: &NormSeries, report: &DecayReport) -> Option<SlopeGuide> {
    series
        .times()
        .iter()
        .zip(series.values())
        .find(|(t, _)| **t >= report.fit_window.start)
        .map(|(t, v)| SlopeGuide {
            slope: report.predicted_exponent,
            t0: *t,
            v0: *v,
        })
}

fn write_series(dir: &ArtifactDir, label: &str, series: &NormSeries) -> Result<(), RunError> {
    dir.write_series(label, series.times(), series.values())
}

#[derive(Serialize)]
struct LinearReport {
    kind: ScenarioKind,
    series: String,
    report: DecayReport,
    trusted_until: f64,
    trust_radius: f64,
    max_mass_radius: f64,
    verdict: Verdict,
}

fn linear_decay(config: &ScenarioConfig, dir: &ArtifactDir) -> Result<Outcome, RunError> {
    let scenario = config.linear_scenario()?;
    let result = run_linear(&scenario)?;
    let label = result.series.descriptor.label();
    write_series(dir, &label, &result.series)?;
    dir.write_plot(
        &label,
        &LogLogPlot {
            title: label.clone(),
            curves: vec![(label.clone(), result.series.times().to_vec(), result.series.values().to_vec())],
            guide: guide_for(&result.series, &result.report),
        },
    )?;
    let verdict = result.report.verdict;
    dir.write_json(
        "report.json",
        &LinearReport {
            kind: config.kind,
            series: label,
            report: result.report,
            trusted_until: result.trusted_until,
            trust_radius: scenario.grid.box_len() / 4.0,
            max_mass_radius: result.radius.iter().copied().fold(0.0, f64::max),
            verdict,
        },
    )?;
    Ok(Outcome::of(verdict.passed()))
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
enum AblationSummary {
    Measured {
        kind: ScenarioKind,
        divergence_series: String,
        generic_series: String,
        divergence: DecayReport,
        generic: DecayReport,
        gap: f64,
        gap_threshold: f64,
        verdict: Verdict,
    },
    Degenerate {
        kind: ScenarioKind,
        verdict: Verdict,
    },
}

fn ablation(config: &ScenarioConfig, dir: &ArtifactDir) -> Result<Outcome, RunError> {
    let scenario = config.linear_scenario()?;
    let threshold = config.linear.as_ref().and_then(|l| l.gap_threshold).unwrap_or(0.5);
    let summary = match divergence_form_ablation(&scenario)? {
        AblationReport::Degenerate => AblationSummary::Degenerate {
            kind: config.kind,
            verdict: Verdict::Fail,
        },
        AblationReport::Measured {
            divergence,
            generic,
            gap,
            divergence_series,
            generic_series,
        } => {
            let div_label = format!("divergence_{}", divergence_series.descriptor.label());
            let gen_label = format!("generic_{}", generic_series.descriptor.label());
            write_series(dir, &div_label, &divergence_series)?;
            write_series(dir, &gen_label, &generic_series)?;
            dir.write_plot(
                "ablation",
                &LogLogPlot {
                    title: "low-band density decay".into(),
                    curves: vec![
                        (div_label.clone(), divergence_series.times().to_vec(), divergence_series.values().to_vec()),
                        (gen_label.clone(), generic_series.times().to_vec(), generic_series.values().to_vec()),
                    ],
                    guide: guide_for(&divergence_series, &divergence),
                },
            )?;
            AblationSummary::Measured {
                kind: config.kind,
                divergence_series: div_label,
                generic_series: gen_label,
                divergence,
                generic,
                gap,
                gap_threshold: threshold,
                verdict: Verdict::from_bool(gap >= threshold),
            }
        }
    };
    let ok = matches!(
        summary,
        AblationSummary::Measured {
            verdict: Verdict::Pass,
            ..
        }
    );
    dir.write_json("report.json", &summary)?;
    Ok(Outcome::of(ok))
}

#[derive(Serialize)]
struct NonlinearReport {
    kind: ScenarioKind,
    steps_taken: usize,
    final_time: f64,
    failure: Option<String>,
    max_mean_drift: f64,
    max_symmetry_defect: f64,
    admissible_throughout: bool,
    aggregate_monotone: bool,
    aggregate_final: Option<f64>,
    samples: Vec<RunSample>,
    events: Vec<RunEvent>,
    verdict: Verdict,
}

/// Whether `values` never decrease beyond a relative slack.
pub(crate) fn is_monotone(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0] * (1.0 - MONOTONE_SLACK))
}

fn nonlinear_run(config: &ScenarioConfig, dir: &ArtifactDir) -> Result<Outcome, RunError> {
    let scenario = config.nonlinear_scenario()?;
    let outcome = run(&scenario)?;
    for s in &outcome.bundle.series {
        write_series(dir, &s.descriptor.label(), s)?;
    }
    let times: Vec<f64> = outcome.samples.iter().map(|s| s.time).collect();
    let aggregate = outcome.aggregate_values();
    dir.write_series("aggregate", &times, &aggregate)?;
    dir.write_plot(
        "aggregate",
        &LogLogPlot {
            title: "global weighted norm".into(),
            curves: vec![("aggregate".into(), times, aggregate.clone())],
            guide: None,
        },
    )?;
    let admissible = outcome.samples.iter().all(|s| s.admissible);
    let monotone = is_monotone(&aggregate);
    let ok = outcome.succeeded()
        && admissible
        && monotone
        && outcome.max_mean_drift <= NONLINEAR_DRIFT_TOL
        && outcome.max_symmetry_defect <= NONLINEAR_SYMMETRY_TOL;
    dir.write_json(
        "report.json",
        &NonlinearReport {
            kind: config.kind,
            steps_taken: outcome.steps_taken,
            final_time: outcome.final_time,
            failure: outcome.failure.as_ref().map(|e| e.to_string()),
            max_mean_drift: outcome.max_mean_drift,
            max_symmetry_defect: outcome.max_symmetry_defect,
            admissible_throughout: admissible,
            aggregate_monotone: monotone,
            aggregate_final: aggregate.last().copied(),
            samples: outcome.samples,
            events: outcome.events,
            verdict: Verdict::from_bool(ok),
        },
    )?;
    Ok(Outcome::of(ok))
}

/// A list of scenario files, resolved relative to the sweep file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenarios: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    /// Output subdirectory name, the scenario file stem.
    pub name: String,
    pub config: ScenarioConfig,
    pub source: String,
}

pub fn load_sweep(path: &Path) -> Result<Vec<SweepEntry>, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    let sweep: SweepConfig =
        toml::from_str(&text).map_err(|e| RunError::Usage(format!("{}: {}", path.display(), e.message())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut seen = HashSet::new();
    sweep
        .scenarios
        .iter()
        .map(|rel| {
            let file = base.join(rel);
            let name = file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .ok_or_else(|| RunError::Usage(format!("no file name in {}", file.display())))?;
            if !seen.insert(name.clone()) {
                return Err(RunError::Usage(format!("duplicate scenario name {name}")));
            }
            let source = fs::read_to_string(&file).map_err(|e| RunError::io(&file, e))?;
            let config = parse_config(&source).map_err(|e| RunError::Usage(format!("{}: {e}", file.display())))?;
            Ok(SweepEntry { name, config, source })
        })
        .collect()
}

/// Runs independent scenarios on a pool of `threads` workers (all cores
/// when `None`), each into `out/<name>`. Results keep the input order.
pub fn run_sweep(
    entries: &[SweepEntry],
    out: &Path,
    threads: Option<usize>,
) -> Result<Vec<(String, Result<Outcome, RunError>)>, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| RunError::Usage(e.to_string()))?;
    Ok(pool.install(|| {
        entries
            .par_iter()
            .map(|e| {
                let result = run_scenario(&e.config, Some(&e.source), &out.join(&e.name));
                (e.name.clone(), result)
            })
            .collect()
    }))
}
