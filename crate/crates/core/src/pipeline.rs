//! Named phase sequences: the projection baseline followed by any order of
//! the global and local phases.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::global::{baseline_grid_from_projection, global_assignment, LambdaMode, LambdaSchedule, LambdaStep};
use crate::local::{local_adjust, SwapRecord};
use crate::measures::{report, ConvexityMeasure, MeasureReport};
use crate::model::{GridLayout, GridSpec, SampleSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PipelineId {
    Baseline,
    G,
    LT,
    LP,
    LTG,
    LPG,
    GLT,
    GLP,
}

impl PipelineId {
    pub const ALL: [PipelineId; 8] = [
        PipelineId::Baseline,
        PipelineId::G,
        PipelineId::LT,
        PipelineId::LP,
        PipelineId::LTG,
        PipelineId::LPG,
        PipelineId::GLT,
        PipelineId::GLP,
    ];

    /// Command-line spelling, e.g. `g-l-t`.
    pub fn name(self) -> &'static str {
        match self {
            PipelineId::Baseline => "baseline",
            PipelineId::G => "g",
            PipelineId::LT => "l-t",
            PipelineId::LP => "l-p",
            PipelineId::LTG => "l-t-g",
            PipelineId::LPG => "l-p-g",
            PipelineId::GLT => "g-l-t",
            PipelineId::GLP => "g-l-p",
        }
    }

    /// Table spelling, e.g. `G_L_T`.
    pub fn label(self) -> &'static str {
        match self {
            PipelineId::Baseline => "BASELINE",
            PipelineId::G => "G",
            PipelineId::LT => "L_T",
            PipelineId::LP => "L_P",
            PipelineId::LTG => "L_T_G",
            PipelineId::LPG => "L_P_G",
            PipelineId::GLT => "G_L_T",
            PipelineId::GLP => "G_L_P",
        }
    }

    /// Phases run after the baseline, in order.
    pub fn phases(self) -> &'static [Phase] {
        const T: Phase = Phase::Local(ConvexityMeasure::Triple);
        const P: Phase = Phase::Local(ConvexityMeasure::Perimeter);
        match self {
            PipelineId::Baseline => &[],
            PipelineId::G => &[Phase::Global],
            PipelineId::LT => &[T],
            PipelineId::LP => &[P],
            PipelineId::LTG => &[T, Phase::Global],
            PipelineId::LPG => &[P, Phase::Global],
            PipelineId::GLT => &[Phase::Global, T],
            PipelineId::GLP => &[Phase::Global, P],
        }
    }
}

impl fmt::Display for PipelineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PipelineId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: alloc::string::String = s
            .chars()
            .map(|c| if c == '_' { '-' } else { c.to_ascii_lowercase() })
            .collect();
        PipelineId::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| Error::UnknownPipeline(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Global,
    Local(ConvexityMeasure),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub lambda: LambdaMode,
    /// Seeds the local phase's visiting order.
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(lambda: LambdaMode, seed: u64) -> Self {
        Self { lambda, seed }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::new(LambdaMode::Adaptive, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome {
    pub phase: Phase,
    pub layout: GridLayout,
    /// Assignment problems solved (global phase only).
    pub lap_solves: usize,
    /// Of those, solves spent on the compactness anchor.
    pub anchor_solves: usize,
    /// Global phase only: the weighted loop reached a repeated assignment
    /// before its iteration cap.
    pub converged: bool,
    pub lambda_history: Vec<LambdaStep>,
    /// Local passes (local phase only).
    pub swap_passes: usize,
    pub audit: Vec<SwapRecord>,
}

/// Runs one phase on `current`, which is also the phase's proximity
/// reference.
pub fn run_phase(current: &GridLayout, phase: Phase, cfg: &PipelineConfig) -> Result<PhaseOutcome> {
    match phase {
        Phase::Global => {
            let mut schedule = LambdaSchedule::new(cfg.lambda);
            let out = global_assignment(current, &mut schedule)?;
            Ok(PhaseOutcome {
                phase,
                layout: out.layout,
                lap_solves: out.lap_solves,
                anchor_solves: out.anchor_solves,
                converged: out.converged,
                lambda_history: schedule.history,
                swap_passes: 0,
                audit: Vec::new(),
            })
        }
        Phase::Local(m) => {
            let out = local_adjust(current, m, cfg.seed, current)?;
            Ok(PhaseOutcome {
                phase,
                layout: out.layout,
                lap_solves: 0,
                anchor_solves: 0,
                converged: true,
                lambda_history: Vec::new(),
                swap_passes: out.passes,
                audit: out.audit,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub pipeline: PipelineId,
    /// The layout the pipeline started from; the report's proximity reference.
    pub input: GridLayout,
    pub layout: GridLayout,
    pub report: MeasureReport,
    pub phases: Vec<PhaseOutcome>,
}

impl PipelineOutput {
    /// Bundles already computed phases, which must be `pipeline`'s phases in
    /// order, starting from `input`.
    pub fn assemble(pipeline: PipelineId, input: GridLayout, phases: Vec<PhaseOutcome>) -> Result<Self> {
        let layout = phases.last().map_or_else(|| input.clone(), |p| p.layout.clone());
        let report = report(&layout, &input)?;
        Ok(Self {
            pipeline,
            input,
            layout,
            report,
            phases,
        })
    }

    pub fn lap_solves(&self) -> usize {
        self.phases.iter().map(|p| p.lap_solves).sum()
    }

    pub fn swap_passes(&self) -> usize {
        self.phases.iter().map(|p| p.swap_passes).sum()
    }

    pub fn swaps(&self) -> usize {
        self.phases.iter().map(|p| p.audit.len()).sum()
    }
}

/// Runs `pipeline`'s phases starting from an existing input layout.
pub fn run_from_input(input: &GridLayout, pipeline: PipelineId, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let mut phases: Vec<PhaseOutcome> = Vec::new();
    for &phase in pipeline.phases() {
        let current = phases.last().map_or(input, |p| &p.layout);
        let out = run_phase(current, phase, cfg)?;
        phases.push(out);
    }
    PipelineOutput::assemble(pipeline, input.clone(), phases)
}

/// Places `samples` by projection, then runs `pipeline` on that baseline.
pub fn run_pipeline(
    samples: &SampleSet,
    spec: GridSpec,
    pipeline: PipelineId,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput> {
    let baseline = baseline_grid_from_projection(samples, spec)?;
    run_from_input(&baseline, pipeline, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_layout, SampleRecord};
    use alloc::format;
    use alloc::string::ToString;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn blobs(n: usize, seed: u64) -> SampleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centres = [(0.2, 0.3), (0.7, 0.8), (0.8, 0.2)];
        let records = (0..n)
            .map(|i| {
                let (cx, cy) = centres[i % 3];
                SampleRecord {
                    id: format!("s{i}"),
                    x: cx + rng.random_range(-0.2..0.2),
                    y: cy + rng.random_range(-0.2..0.2),
                    cluster: format!("c{}", i % 3),
                    meta: Default::default(),
                }
            })
            .collect();
        SampleSet::new(records, None).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for p in PipelineId::ALL {
            assert_eq!(p.name().parse::<PipelineId>().unwrap(), p);
            assert_eq!(p.label().parse::<PipelineId>().unwrap(), p);
        }
        assert!(matches!("x".parse::<PipelineId>(), Err(Error::UnknownPipeline(s)) if s == "x"));
        assert_eq!(PipelineId::GLT.to_string(), "g-l-t");
    }

    #[test]
    fn baseline_scores_full_proximity() {
        let s = blobs(60, 1);
        let out = run_pipeline(
            &s,
            GridSpec::new(8, 9).unwrap(),
            PipelineId::Baseline,
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(out.report.proximity, 1.0);
        assert_eq!(out.layout, out.input);
        assert!(out.phases.is_empty());
    }

    #[test]
    fn every_pipeline_emits_a_valid_layout() {
        let s = blobs(70, 2);
        let spec = GridSpec::new(9, 9).unwrap();
        let cfg = PipelineConfig::new(LambdaMode::Adaptive, 5);
        for p in PipelineId::ALL {
            let out = run_pipeline(&s, spec, p, &cfg).unwrap();
            assert!(validate_layout(&out.layout).is_ok(), "{p}");
            assert_eq!(out.phases.len(), p.phases().len());
            let again = run_pipeline(&s, spec, p, &cfg).unwrap();
            assert_eq!(again, out, "{p} is not deterministic");
        }
    }

    #[test]
    fn local_after_global_never_lowers_its_measure() {
        let s = blobs(64, 3);
        let spec = GridSpec::square(8).unwrap();
        let cfg = PipelineConfig::default();
        let g = run_pipeline(&s, spec, PipelineId::G, &cfg).unwrap();
        let glt = run_pipeline(&s, spec, PipelineId::GLT, &cfg).unwrap();
        let glp = run_pipeline(&s, spec, PipelineId::GLP, &cfg).unwrap();
        assert_eq!(glt.phases[0], g.phases[0]);
        assert!(glt.report.triple_ratio >= g.report.triple_ratio);
        assert!(glp.report.perimeter_ratio >= g.report.perimeter_ratio);
    }

    #[test]
    fn fixed_lambda_one_is_the_identity() {
        let s = blobs(50, 4);
        let cfg = PipelineConfig::new(LambdaMode::Fixed(1.0), 0);
        let out = run_pipeline(&s, GridSpec::new(10, 6).unwrap(), PipelineId::G, &cfg).unwrap();
        assert_eq!(out.layout, out.input);
        assert_eq!(out.lap_solves(), 1);
    }
}
