//! Derivative-free regime search: multi-start grid refinement over the two
//! phase shifts, with the coherent amplitude slaved to the balanced target.
//!
//! Evaluations are microseconds, the landscape is smooth, and no gradients
//! are published for these objectives, so a coarse scan followed by three
//! factor-4 shrinking refinements around the best candidates is both robust
//! and deterministic.

use serde::{Deserialize, Serialize};

use mzqubit::analytic;
use num_complex::Complex64;

use crate::{ExplorerError, Result};

/// What to maximize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Ideal balanced-target herald probability.
    MaxBalancedTargetProbability,
    /// YES/NO click probability subject to a fidelity floor, with the
    /// amplitude slaved to the balanced target.
    MaxPynGivenFidelity { fidelity_min: f64 },
}

/// Rectangular search domain over the phase shifts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub phi1: (f64, f64),
    pub phi2: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSpec {
    pub objective: Objective,
    pub search_box: SearchBox,
    /// Detector efficiency used by constrained objectives.
    pub eta: f64,
    /// Points per side of the initial scan.
    pub coarse_grid: usize,
    /// Shrink-by-4 refinement passes after the initial scan.
    pub refinement_levels: usize,
}

/// Best point found, with the values achieved there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub phi1: f64,
    pub phi2: f64,
    /// Balanced-target coherent amplitude at the optimum.
    pub gamma_abs: f64,
    /// Objective value (a probability for both objectives).
    pub probability: f64,
    /// Fidelity at the optimum, for constrained objectives.
    pub fidelity: Option<f64>,
    /// False when no point satisfied the constraints; the best infeasible
    /// point is reported instead.
    pub feasible: bool,
    pub evaluations: usize,
    /// Largest value seen on the initial coarse scan; the final result can
    /// never be below it.
    pub coarse_best: f64,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    phi1: f64,
    phi2: f64,
    value: f64,
    fidelity: Option<f64>,
    feasible: bool,
}

fn evaluate(spec: &OptimizeSpec, phi1: f64, phi2: f64) -> Result<Sample> {
    match spec.objective {
        Objective::MaxBalancedTargetProbability => {
            let value = analytic::balanced_target_probability(phi1, phi2)
                .map_err(ExplorerError::Core)?;
            Ok(Sample {
                phi1,
                phi2,
                value,
                fidelity: None,
                feasible: true,
            })
        }
        Objective::MaxPynGivenFidelity { fidelity_min } => {
            let t = phi1.tan() * phi2.tan();
            if !t.is_finite() || t.abs() > 1e12 {
                return Err(ExplorerError::Spec(format!(
                    "search box touches a tangent pole at phi1={phi1}, phi2={phi2}"
                )));
            }
            let gamma = Complex64::new(t.abs(), 0.0);
            let value = analytic::yn_probability(spec.eta, gamma, phi1, phi2);
            let fidelity =
                analytic::yn_fidelity(spec.eta, gamma, phi1, phi2).map_err(ExplorerError::Core)?;
            Ok(Sample {
                phi1,
                phi2,
                value,
                fidelity: Some(fidelity),
                feasible: fidelity >= fidelity_min,
            })
        }
    }
}

/// Deterministic multi-start grid refinement.
pub fn optimize_regime(spec: &OptimizeSpec) -> Result<OptimizeOutcome> {
    if spec.coarse_grid == 0 {
        return Err(ExplorerError::Spec("coarse grid must be nonempty".into()));
    }
    let (lo1, hi1) = spec.search_box.phi1;
    let (lo2, hi2) = spec.search_box.phi2;
    if lo1 > hi1 || lo2 > hi2 {
        return Err(ExplorerError::Spec("search box is inverted".into()));
    }

    let mut evaluations = 0usize;
    let mut best_feasible: Option<Sample> = None;
    let mut best_any: Option<Sample> = None;
    let mut coarse_best = f64::NEG_INFINITY;

    let scan = |lo1: f64, hi1: f64, lo2: f64, hi2: f64, n: usize, evaluations: &mut usize|
     -> Result<Vec<Sample>> {
        let mut samples = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let phi1 = if n == 1 { lo1 } else { lo1 + (hi1 - lo1) * i as f64 / (n - 1) as f64 };
                let phi2 = if n == 1 { lo2 } else { lo2 + (hi2 - lo2) * j as f64 / (n - 1) as f64 };
                samples.push(evaluate(spec, phi1, phi2)?);
                *evaluations += 1;
            }
        }
        Ok(samples)
    };

    let track = |sample: Sample, best_feasible: &mut Option<Sample>, best_any: &mut Option<Sample>| {
        if sample.feasible && best_feasible.is_none_or(|b| sample.value > b.value) {
            *best_feasible = Some(sample);
        }
        if best_any.is_none_or(|b| sample.fidelity.unwrap_or(0.0) > b.fidelity.unwrap_or(0.0)) {
            *best_any = Some(sample);
        }
    };

    // Degenerate box: a single point is its own optimum.
    let degenerate = (hi1 - lo1).abs() < 1e-15 && (hi2 - lo2).abs() < 1e-15;
    let coarse_n = if degenerate { 1 } else { spec.coarse_grid.max(2) };
    let coarse = scan(lo1, hi1, lo2, hi2, coarse_n, &mut evaluations)?;
    for &s in &coarse {
        coarse_best = coarse_best.max(if s.feasible { s.value } else { f64::NEG_INFINITY });
        track(s, &mut best_feasible, &mut best_any);
    }

    if !degenerate {
        // Multi-start refinement around the strongest feasible candidates
        // (fall back to the least-infeasible ones when none qualify).
        let mut seeds: Vec<Sample> = coarse.iter().copied().filter(|s| s.feasible).collect();
        if seeds.is_empty() {
            seeds = coarse.clone();
            seeds.sort_by(|a, b| {
                b.fidelity
                    .unwrap_or(0.0)
                    .partial_cmp(&a.fidelity.unwrap_or(0.0))
                    .unwrap()
            });
        } else {
            seeds.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap());
        }
        seeds.truncate(5);

        let span1 = (hi1 - lo1).max(1e-12);
        let span2 = (hi2 - lo2).max(1e-12);
        for seed in seeds {
            let mut center = (seed.phi1, seed.phi2);
            let mut half1 = span1 / 8.0;
            let mut half2 = span2 / 8.0;
            for _level in 0..spec.refinement_levels {
                let wlo1 = (center.0 - half1).max(lo1);
                let whi1 = (center.0 + half1).min(hi1);
                let wlo2 = (center.1 - half2).max(lo2);
                let whi2 = (center.1 + half2).min(hi2);
                let window = scan(wlo1, whi1, wlo2, whi2, 9, &mut evaluations)?;
                let mut local_best = seed;
                for &s in &window {
                    track(s, &mut best_feasible, &mut best_any);
                    let better = if s.feasible {
                        !local_best.feasible || s.value > local_best.value
                    } else {
                        !local_best.feasible
                            && s.fidelity.unwrap_or(0.0) > local_best.fidelity.unwrap_or(0.0)
                    };
                    if better {
                        local_best = s;
                    }
                }
                center = (local_best.phi1, local_best.phi2);
                half1 /= 4.0;
                half2 /= 4.0;
            }
        }
    }

    let (sample, feasible) = match best_feasible {
        Some(s) => (s, true),
        None => (
            best_any.ok_or_else(|| ExplorerError::Spec("empty search".into()))?,
            false,
        ),
    };
    let gamma_abs = (sample.phi1.tan() * sample.phi2.tan()).abs();
    Ok(OptimizeOutcome {
        phi1: sample.phi1,
        phi2: sample.phi2,
        gamma_abs,
        probability: sample.value,
        fidelity: sample.fidelity,
        feasible,
        evaluations,
        coarse_best: if coarse_best.is_finite() { coarse_best } else { f64::NAN },
    })
}
