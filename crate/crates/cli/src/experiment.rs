//! Assembling and running a configured experiment.

use std::path::Path;

use unionavg::minconvex::{MinConvexFn, SmoothConvex};
use unionavg::ops::{compose, SelectionPolicy, UnionMap, DEFAULT_TIE_TOL};
use unionavg::oracle::{sample_in_ball, verify_fixed_classification};
use unionavg::sets::{dr_operator, project_union, UnionConvexSet};
use unionavg::solvers::{
    cadr, cyclic_dr, cyclic_projections, douglas_rachford, drs_operator, fb_operator, forward_backward,
    iterate_union, km_admissible, ppa, ControlSequence, IterationTrace, Schedule, StopRule, TerminalStatus,
};
use unionavg::{AveragedMap, Vector};

use crate::catalog;
use crate::config::{AlgorithmName, ControlName, ExperimentConfig, PolicyName};
use crate::error::{exit, CliError};
use crate::trace::{self, Header, OracleCheck, Summary};

#[derive(Debug, Clone)]
enum Problem {
    Sets(Vec<UnionConvexSet>),
    Prox(MinConvexFn),
    Splitting(SmoothConvex, MinConvexFn),
    Pair(MinConvexFn, MinConvexFn),
}

/// A validated experiment, ready to run from any starting point.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    problem: Problem,
}

pub fn exit_code(status: TerminalStatus) -> i32 {
    match status {
        TerminalStatus::Converged => exit::CONVERGED,
        TerminalStatus::MaxIters => exit::MAX_ITERS,
        TerminalStatus::DivergedGuard => exit::DIVERGED,
    }
}

fn gamma(config: &ExperimentConfig) -> Result<f64, CliError> {
    config
        .algorithm
        .gamma
        .ok_or_else(|| CliError::field("algorithm.gamma", format!("required by {:?}", config.algorithm.name)))
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, CliError> {
        let p = &config.problem;
        let dim = p.dim;
        if dim == 0 {
            return Err(CliError::field("problem.dim", "must be positive"));
        }
        let sets = || -> Result<Vec<UnionConvexSet>, CliError> {
            p.sets
                .iter()
                .enumerate()
                .map(|(k, s)| catalog::union_set(s, dim, &format!("problem.sets[{k}]")))
                .collect()
        };
        let problem = match config.algorithm.name {
            AlgorithmName::IterateProjection => {
                if p.sets.len() != 1 {
                    return Err(CliError::field("problem.sets", "iterate-projection takes exactly one set"));
                }
                Problem::Sets(sets()?)
            }
            AlgorithmName::KmProjections => {
                let sets = sets()?;
                if sets.is_empty() || sets.iter().any(|s| !s.is_convex()) {
                    return Err(CliError::field("problem.sets", "km-projections needs one or more convex sets"));
                }
                Problem::Sets(sets)
            }
            AlgorithmName::CyclicProjections | AlgorithmName::CyclicDr | AlgorithmName::Cadr => {
                if p.sets.len() < 2 {
                    return Err(CliError::field("problem.sets", "at least two sets are required"));
                }
                Problem::Sets(sets()?)
            }
            AlgorithmName::Ppa => Problem::Prox(catalog::min_convex(&p.f, dim, "problem.f")?),
            AlgorithmName::ForwardBackward => {
                let smooth = match &p.smooth {
                    Some(s) => catalog::smooth(s, dim, "problem.smooth")?,
                    None => SmoothConvex::zero(dim),
                };
                Problem::Splitting(smooth, catalog::min_convex(&p.g, dim, "problem.g")?)
            }
            AlgorithmName::DouglasRachford => Problem::Pair(
                catalog::min_convex(&p.f, dim, "problem.f")?,
                catalog::min_convex(&p.g, dim, "problem.g")?,
            ),
        };
        let start = &config.start;
        match (&start.x0, &start.sample) {
            (Some(x0), None) => {
                catalog::vector("start.x0", x0, dim)?;
            }
            (None, Some(s)) => {
                catalog::vector("start.sample.center", &s.center, dim)?;
                if !(s.radius.is_finite() && s.radius >= 0.0) {
                    return Err(CliError::field("start.sample.radius", "must be finite and nonnegative"));
                }
            }
            _ => return Err(CliError::field("start", "give exactly one of `x0` or `sample`")),
        }
        let exp = Experiment { config, problem };
        exp.stop_rule().validate().map_err(|e| CliError::field("stop", e))?;
        exp.driving_operator().map_err(|e| CliError::field("algorithm", e))?;
        Ok(exp)
    }

    pub fn load(source: &str) -> Result<Self, CliError> {
        Self::new(ExperimentConfig::load(source)?)
    }

    pub fn dim(&self) -> usize {
        self.config.problem.dim
    }

    pub fn policy(&self) -> SelectionPolicy {
        match self.config.algorithm.policy {
            PolicyName::LowestIndex => SelectionPolicy::LowestIndex,
            PolicyName::SeededRandom => SelectionPolicy::SeededRandom { seed: self.config.seed },
            PolicyName::RoundRobin => SelectionPolicy::RoundRobin,
        }
    }

    pub fn stop_rule(&self) -> StopRule {
        let s = &self.config.stop;
        StopRule::new(s.max_iters)
            .with_step_tol(s.step_tol)
            .with_window(s.window)
            .with_diag_tol(s.diag_tol)
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::constant(self.config.algorithm.lambda)
    }

    /// The configured starting point; sampled starts use the experiment seed.
    pub fn x0(&self) -> Result<Vector, CliError> {
        let dim = self.dim();
        let start = &self.config.start;
        if let Some(x0) = &start.x0 {
            return catalog::vector("start.x0", x0, dim);
        }
        let s = start.sample.as_ref().expect("validated start");
        let center = catalog::vector("start.sample.center", &s.center, dim)?;
        Ok(sample_in_ball(&center, s.radius, 1, self.config.seed)?.remove(0))
    }

    /// The min-convex function of a proximal point experiment.
    pub fn prox_function(&self) -> Option<&MinConvexFn> {
        match &self.problem {
            Problem::Prox(f) => Some(f),
            _ => None,
        }
    }

    fn sets(&self) -> &[UnionConvexSet] {
        match &self.problem {
            Problem::Sets(s) => s,
            _ => unreachable!("set-based algorithm without sets"),
        }
    }

    fn anchor_split(&self) -> (usize, &UnionConvexSet) {
        let sets = self.sets();
        let pos = if self.config.algorithm.anchor_first { 0 } else { sets.len() - 1 };
        (pos, &sets[pos])
    }

    fn projectors(&self) -> Vec<AveragedMap> {
        self.sets().iter().map(|s| s.pieces()[0].projector()).collect()
    }

    /// The operator whose fixed points the algorithm seeks.
    pub fn driving_operator(&self) -> unionavg::Result<UnionMap> {
        let g = self.config.algorithm.gamma;
        let need_gamma = || {
            g.ok_or_else(|| unionavg::Error::InvalidParameter {
                name: "gamma",
                reason: "required by this algorithm".into(),
            })
        };
        match (&self.problem, self.config.algorithm.name) {
            (Problem::Sets(sets), AlgorithmName::IterateProjection) => project_union(&sets[0], DEFAULT_TIE_TOL),
            (Problem::Sets(_), AlgorithmName::KmProjections) => {
                compose(&self.projectors().into_iter().map(UnionMap::single).collect::<Vec<_>>())
            }
            (Problem::Sets(sets), AlgorithmName::CyclicProjections) => compose(
                &sets
                    .iter()
                    .map(|s| project_union(s, DEFAULT_TIE_TOL))
                    .collect::<unionavg::Result<Vec<_>>>()?,
            ),
            (Problem::Sets(sets), AlgorithmName::CyclicDr) => {
                let m = sets.len();
                compose(
                    &(0..m)
                        .map(|j| dr_operator(&sets[j], &sets[(j + 1) % m]))
                        .collect::<unionavg::Result<Vec<_>>>()?,
                )
            }
            (Problem::Sets(sets), AlgorithmName::Cadr) => {
                let (pos, anchor) = self.anchor_split();
                compose(
                    &sets
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != pos)
                        .map(|(_, s)| dr_operator(anchor, s))
                        .collect::<unionavg::Result<Vec<_>>>()?,
                )
            }
            (Problem::Prox(f), _) => f.prox_union(need_gamma()?, DEFAULT_TIE_TOL),
            (Problem::Splitting(f, g), _) => fb_operator(f, g, need_gamma()?),
            (Problem::Pair(f, g), _) => drs_operator(f, g, need_gamma()?),
            _ => unreachable!("problem shape is fixed by the algorithm"),
        }
    }

    /// Runs the algorithm from `x0`.
    pub fn run_from(&self, x0: &Vector) -> Result<IterationTrace, CliError> {
        let a = &self.config.algorithm;
        let policy = self.policy();
        let stop = self.stop_rule();
        let trace = match (&self.problem, a.name) {
            (Problem::Sets(sets), AlgorithmName::IterateProjection) => {
                let t = project_union(&sets[0], DEFAULT_TIE_TOL)?;
                iterate_union(&t, &self.schedule(), &policy, x0, &stop)?
            }
            (Problem::Sets(sets), AlgorithmName::KmProjections) => {
                let control = match a.control {
                    ControlName::Cyclic => ControlSequence::cyclic(sets.len())?,
                    ControlName::SeededRandom => ControlSequence::seeded_random(sets.len(), self.config.seed)?,
                };
                km_admissible(&self.projectors(), &control, &self.schedule(), x0, &stop)?
            }
            (Problem::Sets(sets), AlgorithmName::CyclicProjections) => cyclic_projections(sets, x0, &policy, &stop)?,
            (Problem::Sets(sets), AlgorithmName::CyclicDr) => cyclic_dr(sets, x0, &policy, &stop)?,
            (Problem::Sets(sets), AlgorithmName::Cadr) => cadr(sets, a.anchor_first, x0, &policy, &stop)?,
            (Problem::Prox(f), _) => ppa(f, gamma(&self.config)?, &policy, x0, &stop)?,
            (Problem::Splitting(f, g), _) => {
                forward_backward(f, g, gamma(&self.config)?, &self.schedule(), &policy, x0, &stop)?
            }
            (Problem::Pair(f, g), _) => {
                douglas_rachford(f, g, gamma(&self.config)?, &self.schedule(), &policy, x0, &stop)?
            }
            _ => unreachable!("problem shape is fixed by the algorithm"),
        };
        Ok(trace)
    }

    /// Summary record for a finished run, including an oracle re-check of the
    /// fixed-point classification.
    pub fn summarize(&self, trace: &IterationTrace) -> Result<Summary, CliError> {
        let t = self.driving_operator()?;
        let tol = self.config.stop.diag_tol;
        let x = &trace.final_point;
        let classification = match &trace.diagnostics.classification {
            Some(c) => c.clone(),
            None => t.classify(x, tol)?,
        };
        let v = verify_fixed_classification(&t, x, tol)?;
        let d = &trace.diagnostics;
        Ok(Summary {
            status: trace.status,
            exit_code: exit_code(trace.status),
            iterations: trace.iterations(),
            final_point: x.clone(),
            classification,
            oracle: OracleCheck {
                class: v.class,
                set_class: v.set_class,
                consistent: v.consistent,
            },
            shadow: d.shadow.clone(),
            shadow_residuals: d.shadow_residuals.clone(),
            set_residuals: d.set_residuals.clone(),
            fixed_residuals: d.fixed_residuals.clone(),
            local_min: d.local_min,
            notes: d.notes.clone(),
        })
    }

    pub fn header(&self, trace: &IterationTrace) -> Header {
        Header {
            format: trace::FORMAT.into(),
            name: self.config.name.clone(),
            algorithm: trace.algorithm.clone(),
            dim: self.dim(),
            seed: self.config.seed,
            x0: trace.x0.clone(),
            // the output directory is left out so that traces do not depend
            // on where they are written
            config: ExperimentConfig {
                output: Default::default(),
                ..self.config.clone()
            },
        }
    }

    /// Runs from `x0` and writes the trace file to `path`.
    pub fn run_to(&self, x0: &Vector, path: &Path) -> Result<Summary, CliError> {
        let trace = self.run_from(x0)?;
        let summary = self.summarize(&trace)?;
        trace::write_trace(path, self.header(&trace), &trace, &summary)?;
        Ok(summary)
    }
}
