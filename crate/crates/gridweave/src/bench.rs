//! Pipeline comparison over a matrix of synthetic datasets.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use gridweave_core::global::baseline_grid_from_projection;
use gridweave_core::model::validate_layout;
use gridweave_core::pipeline::{run_phase, PhaseOutcome};
use gridweave_core::{GridSpec, LambdaMode, Phase, PipelineConfig, PipelineId, PipelineOutput, SampleSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{write, IoError};
use crate::synth::gen_synthetic;

pub const CSV_HEADER: &str =
    "pipeline,grid,seed,proximity,compactness,area_ratio,triple_ratio,perimeter_ratio,cut_ratio,wall_ms,lap_solves,swap_passes";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid bench config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] gridweave_core::Error),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{pipeline} emitted an invalid layout: {detail}")]
    InvalidLayout { pipeline: String, detail: String },
}

/// `adaptive` or a fixed weight in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaArg(pub LambdaMode);

impl FromStr for LambdaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("adaptive") {
            return Ok(Self(LambdaMode::Adaptive));
        }
        match s.parse::<f64>() {
            Ok(v) if (0.0..=1.0).contains(&v) => Ok(Self(LambdaMode::Fixed(v))),
            _ => Err(format!("lambda must be `adaptive` or a number in [0, 1], got `{s}`")),
        }
    }
}

impl fmt::Display for LambdaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            LambdaMode::Adaptive => f.write_str("adaptive"),
            LambdaMode::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for LambdaArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            LambdaMode::Adaptive => s.serialize_str("adaptive"),
            LambdaMode::Fixed(v) => s.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Num(v) => v.to_string(),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn pipeline_names<S: serde::Serializer>(ps: &[PipelineId], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| p.label()))
}

fn parse_pipelines<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<PipelineId>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .collect()
}

/// One synthetic dataset per (cluster count, grid, seed); every pipeline runs
/// on every dataset `repeats` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    /// Square grid sides.
    pub grids: Vec<usize>,
    pub clusters: Vec<usize>,
    /// Samples per run as a fraction of the grid's cells.
    pub fill: f64,
    pub spread: f64,
    pub seeds: Vec<u64>,
    pub repeats: usize,
    pub lambda: LambdaArg,
    #[serde(serialize_with = "pipeline_names", deserialize_with = "parse_pipelines")]
    pub pipelines: Vec<PipelineId>,
    /// With timing off every `wall_ms` is 0, so outputs are byte-identical
    /// across runs.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            grids: vec![20, 30, 40],
            clusters: vec![5],
            fill: 1.0,
            spread: 0.05,
            seeds: (0..10).collect(),
            repeats: 1,
            lambda: LambdaArg(LambdaMode::Adaptive),
            pipelines: PipelineId::ALL.to_vec(),
            timing: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.into()));
        if self.grids.is_empty() || self.grids.contains(&0) {
            return bad("grids must be a non-empty list of positive sides");
        }
        if self.clusters.is_empty() || self.clusters.contains(&0) {
            return bad("clusters must be a non-empty list of positive counts");
        }
        if self.seeds.is_empty() || self.pipelines.is_empty() {
            return bad("seeds and pipelines must be non-empty");
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1");
        }
        if !(self.fill > 0.0 && self.fill <= 1.0) {
            return bad("fill must be in (0, 1]");
        }
        if !(self.spread.is_finite() && self.spread >= 0.0) {
            return bad("spread must be finite and non-negative");
        }
        for &side in &self.grids {
            for &k in &self.clusters {
                if self.samples_for(side) < k {
                    return Err(BenchError::Config(format!(
                        "a {side}x{side} grid at fill {} cannot hold {k} clusters",
                        self.fill
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn samples_for(&self, side: usize) -> usize {
        ((side * side) as f64 * self.fill).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub pipeline: PipelineId,
    pub clusters: usize,
    pub grid: usize,
    pub seed: u64,
    pub repeat: usize,
    pub proximity: f64,
    pub compactness: f64,
    pub area_ratio: f64,
    pub triple_ratio: f64,
    pub perimeter_ratio: f64,
    pub cut_ratio: f64,
    pub wall_ms: f64,
    pub lap_solves: usize,
    pub swap_passes: usize,
    /// Weighted-loop solves of the global phase, if the pipeline has one.
    pub lambda_iters: Option<usize>,
    /// Whether every global phase stopped before its iteration cap.
    pub converged: bool,
}

impl BenchRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.3},{},{}",
            self.pipeline.label(),
            self.grid,
            self.seed,
            self.proximity,
            self.compactness,
            self.area_ratio,
            self.triple_ratio,
            self.perimeter_ratio,
            self.cut_ratio,
            self.wall_ms,
            self.lap_solves,
            self.swap_passes
        )
    }
}

/// A pipeline's result plus the time spent on it.
#[derive(Debug, Clone)]
pub struct TimedRun {
    pub output: PipelineOutput,
    pub wall_ms: f64,
    /// Baseline time followed by one entry per phase.
    pub phase_ms: Vec<f64>,
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Baseline placement followed by `p`'s phases, timed.
pub fn run_pipeline(
    samples: &SampleSet,
    spec: GridSpec,
    p: PipelineId,
    cfg: &PipelineConfig,
) -> Result<TimedRun, BenchError> {
    let start = Instant::now();
    let baseline = baseline_grid_from_projection(samples, spec)?;
    let mut phase_ms = vec![millis(start)];
    let mut phases: Vec<PhaseOutcome> = Vec::new();
    for &phase in p.phases() {
        let t = Instant::now();
        let out = run_phase(phases.last().map_or(&baseline, |o| &o.layout), phase, cfg)?;
        phase_ms.push(millis(t));
        phases.push(out);
    }
    Ok(TimedRun {
        output: PipelineOutput::assemble(p, baseline, phases)?,
        wall_ms: phase_ms.iter().sum(),
        phase_ms,
    })
}

struct Task {
    clusters: usize,
    grid: usize,
    seed: u64,
    repeat: usize,
}

/// Runs every requested pipeline on one dataset. Phase results are shared
/// between pipelines with a common prefix (G, G_L_T and G_L_P all start with
/// the same global phase), and each row is charged the time of its own
/// prefix.
fn run_task(cfg: &BenchConfig, task: &Task) -> Result<Vec<BenchRow>, BenchError> {
    let samples = gen_synthetic(task.clusters, cfg.samples_for(task.grid), cfg.spread, task.seed);
    let spec = GridSpec::square(task.grid)?;
    let pcfg = PipelineConfig::new(cfg.lambda.0, task.seed);
    let start = Instant::now();
    let baseline = baseline_grid_from_projection(&samples, spec)?;
    let baseline_ms = millis(start);
    let mut done: BTreeMap<Vec<Phase>, (PhaseOutcome, f64)> = BTreeMap::new();
    let mut rows = Vec::new();
    for &p in &cfg.pipelines {
        let phases = p.phases();
        for depth in 1..=phases.len() {
            if done.contains_key(&phases[..depth]) {
                continue;
            }
            let current = if depth == 1 {
                &baseline
            } else {
                &done[&phases[..depth - 1]].0.layout
            };
            let t = Instant::now();
            let out = run_phase(current, phases[depth - 1], &pcfg)?;
            done.insert(phases[..depth].to_vec(), (out, millis(t)));
        }
        let chain: Vec<PhaseOutcome> = (1..=phases.len()).map(|d| done[&phases[..d]].0.clone()).collect();
        let ms = baseline_ms + (1..=phases.len()).map(|d| done[&phases[..d]].1).sum::<f64>();
        let out = PipelineOutput::assemble(p, baseline.clone(), chain)?;
        let check = validate_layout(&out.layout);
        if let Some(v) = check.violations.first() {
            return Err(BenchError::InvalidLayout {
                pipeline: p.label().into(),
                detail: v.to_string(),
            });
        }
        let global = out.phases.iter().filter(|o| o.phase == Phase::Global);
        let lambda_iters = global
            .clone()
            .map(|o| o.lap_solves - o.anchor_solves)
            .reduce(|a, b| a + b);
        let converged = global.clone().all(|o| o.converged);
        let r = &out.report;
        rows.push(BenchRow {
            pipeline: p,
            clusters: task.clusters,
            grid: task.grid,
            seed: task.seed,
            repeat: task.repeat,
            proximity: r.proximity,
            compactness: r.compactness,
            area_ratio: r.area_ratio,
            triple_ratio: r.triple_ratio,
            perimeter_ratio: r.perimeter_ratio,
            cut_ratio: r.cut_ratio,
            wall_ms: if cfg.timing { ms } else { 0.0 },
            lap_solves: out.lap_solves(),
            swap_passes: out.swap_passes(),
            lambda_iters,
            converged,
        });
    }
    Ok(rows)
}

/// Runs the full cross product in parallel. Rows come back ordered by
/// (clusters, grid, seed, repeat, pipeline) whatever the scheduling.
pub fn run_matrix(cfg: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for &clusters in &cfg.clusters {
        for &grid in &cfg.grids {
            for &seed in &cfg.seeds {
                for repeat in 0..cfg.repeats {
                    tasks.push(Task {
                        clusters,
                        grid,
                        seed,
                        repeat,
                    });
                }
            }
        }
    }
    let chunks: Vec<Vec<BenchRow>> = tasks.par_iter().map(|t| run_task(cfg, t)).collect::<Result<_, _>>()?;
    let mut rows: Vec<BenchRow> = chunks.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (a.clusters, a.grid, a.seed, a.repeat, a.pipeline).cmp(&(b.clusters, b.grid, b.seed, b.repeat, b.pipeline))
    });
    Ok(rows)
}

pub fn to_csv<'a>(rows: impl IntoIterator<Item = &'a BenchRow>) -> String {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.csv_line());
        text.push('\n');
    }
    text
}

/// Means of one (clusters, grid, pipeline) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellMeans {
    pub pipeline: String,
    pub clusters: usize,
    pub grid: usize,
    pub runs: usize,
    pub proximity: f64,
    pub compactness: f64,
    pub area_ratio: f64,
    pub triple_ratio: f64,
    pub perimeter_ratio: f64,
    pub cut_ratio: f64,
    pub wall_ms: f64,
    pub lap_solves: f64,
    pub swap_passes: f64,
}

pub fn summarize(rows: &[BenchRow]) -> Vec<CellMeans> {
    let mut groups: BTreeMap<(usize, usize, PipelineId), Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.clusters, r.grid, r.pipeline)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((clusters, grid, p), rs)| {
            let n = rs.len() as f64;
            let mean = |f: fn(&BenchRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            CellMeans {
                pipeline: p.label().into(),
                clusters,
                grid,
                runs: rs.len(),
                proximity: mean(|r| r.proximity),
                compactness: mean(|r| r.compactness),
                area_ratio: mean(|r| r.area_ratio),
                triple_ratio: mean(|r| r.triple_ratio),
                perimeter_ratio: mean(|r| r.perimeter_ratio),
                cut_ratio: mean(|r| r.cut_ratio),
                wall_ms: mean(|r| r.wall_ms),
                lap_solves: mean(|r| r.lap_solves as f64),
                swap_passes: mean(|r| r.swap_passes as f64),
            }
        })
        .collect()
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a BenchConfig,
    means: Vec<CellMeans>,
}

/// Writes `results.csv` (or one `results_k{k}.csv` per cluster count when
/// there are several) and `summary.json` into `dir`. Returns the paths.
pub fn write_outputs(cfg: &BenchConfig, rows: &[BenchRow], dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let mut paths = Vec::new();
    if cfg.clusters.len() == 1 {
        let path = dir.join("results.csv");
        write(&path, &to_csv(rows))?;
        paths.push(path);
    } else {
        for &k in &cfg.clusters {
            let path = dir.join(format!("results_k{k}.csv"));
            write(&path, &to_csv(rows.iter().filter(|r| r.clusters == k)))?;
            paths.push(path);
        }
    }
    let summary = Summary {
        config: cfg,
        means: summarize(rows),
    };
    let path = dir.join("summary.json");
    write(
        &path,
        &serde_json::to_string_pretty(&summary).expect("summaries serialize"),
    )?;
    paths.push(path);
    Ok(paths)
}
