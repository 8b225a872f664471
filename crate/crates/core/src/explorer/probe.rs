use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::construct::{realize_correlations, unit_correlation_matrix, Instance, RealizedPoint};
use super::stream_rng;
use crate::error::{Error, Result};
use crate::relations::gur_weakened;
use crate::tolerance::Tolerance;

/// Euclidean distance in rho-space below which a target counts as reached.
pub const DEFAULT_PROBE_TOL: f64 = 1e-3;

pub const DEFAULT_PROBE_DIMS: [usize; 5] = [2, 3, 4, 6, 8];

/// Every `REFINE_PERIOD`-th trial refines the incumbent; the rest are fresh
/// random instances.
const REFINE_PERIOD: u64 = 4;

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub tol: f64,
    pub relation_tol: Tolerance,
    /// Consecutive step halvings before the refinement step is reset.
    pub refine_rounds: u32,
    pub initial_step: f64,
    /// Spend trial 0 on a direct construction of the target with
    /// `cos Sigma = 1`, when the target admits one.
    pub construction_seed: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_PROBE_TOL,
            relation_tol: Tolerance::default(),
            refine_rounds: 20,
            initial_step: 0.5,
            construction_seed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub target: [f64; 3],
    pub seed: u64,
    pub trials: u64,
    pub best_distance: f64,
    pub best_instance: Option<Instance>,
    pub best_point: Option<RealizedPoint>,
    pub reached: bool,
    pub tol: f64,
    /// Trials whose three-observable relation failed beyond tolerance.
    pub violations: u64,
    /// Trials whose realized rho-triple fell in the explicit forbidden box.
    pub forbidden_hits: u64,
    pub degenerate_trials: u64,
}

struct Candidate {
    instance: Instance,
    point: Option<RealizedPoint>,
}

fn evaluate(instance: Instance, tol: Tolerance) -> Candidate {
    let point = instance.realize(tol).ok();
    Candidate { instance, point }
}

fn random_candidate(seed: u64, t: u64, dims: &[usize], tol: Tolerance) -> Candidate {
    let mut rng = stream_rng(seed, t);
    let dim = dims[(t as usize) % dims.len()];
    evaluate(Instance::random(dim, 3, &mut rng), tol)
}

fn is_refinement(t: u64) -> bool {
    t % REFINE_PERIOD == REFINE_PERIOD - 1
}

/// Randomized search for a physical instance whose `(rho_12, rho_23,
/// rho_31)` lies close to `target`.
///
/// The trial sequence depends only on `(seed, dims, config)`; a run with a
/// larger budget extends a run with a smaller one, so `best_distance` never
/// increases with the budget. A failure to reach the target is evidence, not
/// a proof of impossibility.
pub fn probe_achievability(
    target: [f64; 3],
    dims: &[usize],
    budget: u64,
    seed: u64,
    config: &ProbeConfig,
) -> Result<ProbeResult> {
    if let Some(t) = target.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::Precondition(format!("target components must lie in [0, 1], got {t}")));
    }
    if budget == 0 {
        return Err(Error::Precondition("probe budget must be >= 1".into()));
    }
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::Precondition("probe dims must be nonempty and >= 2".into()));
    }
    let tol = config.relation_tol;

    let mut result = ProbeResult {
        target,
        seed,
        trials: 0,
        best_distance: f64::INFINITY,
        best_instance: None,
        best_point: None,
        reached: false,
        tol: config.tol,
        violations: 0,
        forbidden_hits: 0,
        degenerate_trials: 0,
    };
    let mut step = config.initial_step;
    let mut halvings = 0u32;

    let record = |c: Candidate, result: &mut ProbeResult| -> bool {
        result.trials += 1;
        let Some(p) = c.point else {
            result.degenerate_trials += 1;
            return false;
        };
        if !p.gur_raw_satisfied {
            result.violations += 1;
        }
        if p.in_forbidden_region {
            result.forbidden_hits += 1;
        }
        if p.degenerate {
            result.degenerate_trials += 1;
            return false;
        }
        let d = p.distance_to(target);
        if d < result.best_distance {
            result.best_distance = d;
            result.best_point = Some(p);
            result.best_instance = Some(c.instance);
            true
        } else {
            false
        }
    };

    let construct_first = config.construction_seed;
    let mut start = 0u64;
    while start < budget {
        let end = (start + CHUNK).min(budget);
        let mut fresh: Vec<Option<Candidate>> = (start..end)
            .into_par_iter()
            .map(|t| {
                if (t == 0 && construct_first) || is_refinement(t) {
                    None
                } else {
                    Some(random_candidate(seed, t, dims, tol))
                }
            })
            .collect();

        for t in start..end {
            let slot = fresh[(t - start) as usize].take();
            let candidate = match slot {
                Some(c) => c,
                None if t == 0 => match construction(target, dims) {
                    Some(inst) => evaluate(inst, tol),
                    None => random_candidate(seed, t, dims, tol),
                },
                None => match &result.best_instance {
                    Some(best) => {
                        let mut rng = stream_rng(seed, t);
                        evaluate(best.perturbed(step, &mut rng), tol)
                    }
                    None => random_candidate(seed, t, dims, tol),
                },
            };
            let improved = record(candidate, &mut result);
            if is_refinement(t) {
                if improved {
                    halvings = 0;
                } else {
                    step *= 0.5;
                    halvings += 1;
                    if halvings >= config.refine_rounds {
                        step = config.initial_step;
                        halvings = 0;
                    }
                }
            }
        }
        start = end;
    }
    result.reached = result.best_distance <= config.tol;
    Ok(result)
}

/// Direct realization of the target with all phases zero, in the largest
/// available dimension, when the target satisfies the weakened relation.
fn construction(target: [f64; 3], dims: &[usize]) -> Option<Instance> {
    let allowed = gur_weakened(target[0], target[1], target[2], Tolerance::new(0.0))
        .map(|r| r.margin >= 0.0)
        .unwrap_or(false);
    if !allowed {
        return None;
    }
    let dim = *dims.iter().max()?;
    realize_correlations(&unit_correlation_matrix(target, 0.0), dim).ok()
}
