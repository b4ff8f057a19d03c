//! The greedy decomposition loop.
//!
//! Each step picks the first unused layer whose dilation radius `r` satisfies
//! `|f - f_r| <= delta |f|`, replaces the reproducing integral of `f_r` by a
//! kernel sum over that layer's nodes, and continues with the residual
//! `f - S`. The atoms of all steps, read in layer order, form a series for
//! the input whose partial sums are tracked by [`prefix_sweep`].

mod diagnostics;
mod step;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSchedule;
use crate::series::{PowerSeries, SpaceSpec};

pub use diagnostics::{
    interior_grid, prefix_sweep, reconstruct_partial, reconstruction_error, PrefixStat,
};
pub use step::{
    check_compatible, dilation_radius, discretization_error_bound, h1_step, hp_step, layer_bound,
    select_layer, weighted_error_bound, weighted_step, StepOutcome, M2,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `1 / (1 - conj(node) z)`.
    Cauchy,
    /// The reproducing kernel of the decomposition's weighted space.
    Beta,
}

/// A weighted kernel: one term of the series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelAtom {
    pub node: Complex64,
    pub weight: Complex64,
    pub kernel: KernelKind,
    /// Schedule layer.
    pub layer: usize,
    /// Ring within the layer.
    pub l: usize,
    /// Arc within the ring.
    pub j: usize,
}

/// Where one step's atoms sit in [`Decomposition::atoms`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub layer: usize,
    pub dilation_radius: f64,
    /// Truncation degree of the step's kernel sums.
    pub degree: usize,
    pub first_atom: usize,
    pub atom_count: usize,
}

/// Ordered atoms of a decomposition plus the data needed to resynthesize them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub space: SpaceSpec,
    pub schedule_ref: String,
    pub schedule: LatticeSchedule,
    pub steps: Vec<StepRecord>,
    pub atoms: Vec<KernelAtom>,
    /// Norm of the input followed by the residual norm after every step.
    pub residual_norms: Vec<f64>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Largest truncation degree used by any step.
    pub fn degree(&self) -> usize {
        self.steps.iter().map(|s| s.degree).max().unwrap_or(0)
    }
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxLayers,
    ScheduleExhausted {
        start: usize,
    },
    DegreeLimit {
        layer: usize,
        needed: usize,
        cap: usize,
    },
    ContractionFailure {
        layer: usize,
        ratio: f64,
    },
}

impl RunStatus {
    pub fn is_success(&self) -> bool {
        matches!(self, RunStatus::Converged | RunStatus::MaxLayers)
    }

    pub fn into_error(self) -> Option<Error> {
        match self {
            RunStatus::Converged | RunStatus::MaxLayers => None,
            RunStatus::ScheduleExhausted { start } => Some(Error::ScheduleExhausted { start }),
            RunStatus::DegreeLimit { layer, needed, cap } => {
                Some(Error::DegreeLimit { layer, needed, cap })
            }
            RunStatus::ContractionFailure { layer, ratio } => {
                Some(Error::ContractionFailure { layer, ratio })
            }
        }
    }
}

/// Diagnostics of one attempted step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    pub layer: usize,
    pub delta: f64,
    /// `|f - f_r| / |f|` at the chosen layer.
    pub dilation_error: f64,
    /// `|f - S| / |f|`.
    pub ratio: f64,
    /// `|f_r - S| / |f|`.
    pub discretization: f64,
    /// Theoretical relative bound on `|f_r - S|`.
    pub bound: f64,
    /// Largest within-layer partial-sum norm over the entering residual norm;
    /// NaN when the sweep was skipped.
    pub prefix_max: f64,
    pub residual_norm: f64,
    pub degree: usize,
    pub atoms: usize,
    pub accepted: bool,
}

/// Per-step contraction data and whole-run diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub space: String,
    pub initial_norm: f64,
    /// Accepted steps followed by rejected attempts, each flagged by `accepted`.
    pub steps: Vec<StepReport>,
    pub status: RunStatus,
    /// `sup |f - sum of atoms|` over [`interior_grid`]; NaN when skipped.
    pub reconstruction_error: f64,
    /// Tail bound of the final residual.
    pub residual_tail: f64,
}

impl ConvergenceReport {
    pub fn accepted(&self) -> impl Iterator<Item = &StepReport> {
        self.steps.iter().filter(|s| s.accepted)
    }

    /// Largest accepted contraction ratio.
    pub fn gamma_max(&self) -> f64 {
        self.accepted().map(|s| s.ratio).fold(0.0, f64::max)
    }

    /// Final residual norm over the initial norm.
    pub fn final_ratio(&self) -> f64 {
        self.accepted()
            .last()
            .map_or(1.0, |s| s.residual_norm / self.initial_norm)
    }

    pub fn prefix_max(&self) -> f64 {
        self.accepted()
            .map(|s| s.prefix_max)
            .fold(f64::NAN, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecomposeOptions {
    /// Stop once the residual norm is at most `tol` times the initial norm.
    pub tol: f64,
    /// Dilation error allowed when choosing a layer.
    pub delta: f64,
    pub max_layers: usize,
    /// Largest truncation degree a step may use.
    pub max_degree: usize,
    /// Deeper layers tried when a step fails to contract.
    pub max_retries: usize,
    /// Cut points per layer for the prefix sweep; 0 skips it.
    pub prefix_samples: usize,
    /// Whether to evaluate the reconstruction error on the interior grid.
    pub interior_check: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            tol: 1e-3,
            delta: 0.05,
            max_layers: 10,
            max_degree: 1 << 22,
            max_retries: 3,
            prefix_samples: 32,
            interior_check: true,
        }
    }
}

impl DecomposeOptions {
    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.max_layers == 0 {
            return Err(Error::InvalidArgument("max_layers must be >= 1".into()));
        }
        Ok(())
    }

    /// Kernel tails beyond the truncation degree stay below this.
    pub fn truncation_eps(&self) -> f64 {
        (1e-12 * self.tol).max(1e-18)
    }
}

/// A finished run, successful or not.
#[derive(Clone, Debug)]
pub struct DecompositionRun {
    pub decomposition: Decomposition,
    pub report: ConvergenceReport,
    pub residual: PowerSeries,
}

/// Runs the greedy loop and returns whatever was built, with the reason it stopped.
///
/// Only invalid input is an error here; mathematical failures end the run
/// and are reported through [`ConvergenceReport::status`].
pub fn run(
    f: &PowerSeries,
    space: &SpaceSpec,
    schedule: &LatticeSchedule,
    opts: &DecomposeOptions,
) -> Result<DecompositionRun> {
    opts.check()?;
    check_compatible(schedule, space)?;
    let initial = space.measure(f)?;
    if initial == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let weight = step::kernel_weight(space);
    let eps = opts.truncation_eps();

    let mut residual = f.clone();
    let mut norms = vec![initial];
    let mut records = Vec::new();
    let mut atoms = Vec::new();
    let mut reports = Vec::new();
    let mut rejected = Vec::new();
    let mut start = 0usize;

    let status = 'outer: loop {
        if records.len() >= opts.max_layers {
            break RunStatus::MaxLayers;
        }
        let current = *norms.last().expect("initial norm recorded");
        let (mut k, mut dilation_error) =
            match step::select_layer_with_error(&residual, schedule, opts.delta, space, start) {
                Ok(found) => found,
                Err(Error::ScheduleExhausted { start }) => {
                    break RunStatus::ScheduleExhausted { start }
                }
                Err(e) => return Err(e),
            };
        let mut attempt = 0usize;
        let (outcome, layer) = loop {
            let Some(layer) = schedule.layer(k) else {
                break 'outer RunStatus::ScheduleExhausted { start: k };
            };
            let degree =
                match step::truncation_degree(&weight, layer.radius(), eps, opts.max_degree) {
                    Ok(d) => d.max(residual.degree()),
                    Err(needed) => {
                        break 'outer RunStatus::DegreeLimit {
                            layer: k,
                            needed,
                            cap: opts.max_degree,
                        }
                    }
                };
            let work = residual.resized(degree);
            let outcome = step::run_step(&work, layer, space, dilation_radius(layer))?;
            let bound = layer_bound(layer, space)?;
            let report = StepReport {
                step: records.len(),
                layer: k,
                delta: opts.delta,
                dilation_error,
                ratio: outcome.ratio,
                discretization: outcome.discretization_ratio,
                bound,
                prefix_max: f64::NAN,
                residual_norm: outcome.ratio * current,
                degree,
                atoms: outcome.atoms.len(),
                accepted: outcome.ratio < 1.0,
            };
            log::info!(
                "step {} layer {} ratio {:.4e} disc {:.4e} bound {:.4e} degree {} atoms {}",
                report.step,
                k,
                report.ratio,
                report.discretization,
                bound,
                degree,
                report.atoms
            );
            if outcome.ratio < 1.0 {
                reports.push(report);
                break (outcome, layer);
            }
            rejected.push(report);
            if attempt >= opts.max_retries {
                break 'outer RunStatus::ContractionFailure {
                    layer: k,
                    ratio: outcome.ratio,
                };
            }
            attempt += 1;
            k += 1;
            log::warn!(
                "step {} did not contract; retrying on layer {k}",
                records.len()
            );
            if let Some(next) = schedule.layer(k) {
                let diff = &work - &work.dilate(dilation_radius(next))?;
                dilation_error = space.measure(&diff)? / current;
            }
        };
        records.push(StepRecord {
            layer: layer.index(),
            dilation_radius: outcome.dilation_radius,
            degree: outcome.residual.degree(),
            first_atom: atoms.len(),
            atom_count: outcome.atoms.len(),
        });
        atoms.extend(outcome.atoms);
        let new_norm = outcome.ratio * current;
        norms.push(new_norm);
        residual = outcome.residual;
        start = k + 1;
        if new_norm <= opts.tol * initial {
            break RunStatus::Converged;
        }
    };

    let decomposition = Decomposition {
        space: space.clone(),
        schedule_ref: schedule.reference(),
        schedule: schedule.clone(),
        steps: records,
        atoms,
        residual_norms: norms,
    };
    if opts.prefix_samples > 0 {
        for stat in prefix_sweep(&decomposition, opts.prefix_samples)? {
            reports[stat.step].prefix_max = stat.amplification;
        }
    }
    let reconstruction_error = if opts.interior_check {
        reconstruction_error(&decomposition, f, &interior_grid())?
    } else {
        f64::NAN
    };
    reports.extend(rejected);
    let report = ConvergenceReport {
        space: space.tag(),
        initial_norm: initial,
        steps: reports,
        status,
        reconstruction_error,
        residual_tail: residual.tail_bound(),
    };
    Ok(DecompositionRun {
        decomposition,
        report,
        residual,
    })
}

/// Greedy decomposition of `f` in `space` over `schedule`.
///
/// Succeeds when the tolerance is met or `max_layers` steps were taken;
/// schedule exhaustion, a step that fails to contract after the allowed
/// retries, or a layer needing more than `max_degree` coefficients are errors.
pub fn decompose(
    f: &PowerSeries,
    space: &SpaceSpec,
    schedule: &LatticeSchedule,
    opts: &DecomposeOptions,
) -> Result<(Decomposition, ConvergenceReport)> {
    let run = run(f, space, schedule, opts)?;
    match run.report.status.clone().into_error() {
        Some(e) => Err(e),
        None => Ok((run.decomposition, run.report)),
    }
}
