//! Named sweep and optimization presets, one per published figure, so each
//! dataset is reproducible with a single command.

use std::f64::consts::FRAC_PI_4;

use crate::optimize::{Objective, OptimizeSpec, SearchBox};
use crate::sweep::{Axis, EngineChoice, FixedParams, Param, Quantity, SweepSpec};
use crate::{ExplorerError, Result};

pub const SWEEP_PRESETS: [&str; 4] = ["fig2", "fig3", "fig4-eta100", "fig4-eta50"];

/// Sweep spec for a named figure preset.
pub fn sweep_preset(name: &str) -> Result<SweepSpec> {
    let spec = match name {
        // Balanced-target herald probability over both phase shifts; the
        // maximum sits near (0.715, 0.715).
        "fig2" => SweepSpec {
            axes: vec![
                Axis { param: Param::Phi1, lo: 0.1, hi: 1.5, count: 50 },
                Axis { param: Param::Phi2, lo: 0.1, hi: 1.5, count: 50 },
            ],
            fixed: FixedParams::default(),
            quantities: vec![Quantity::PStar],
            engine: EngineChoice::Analytic,
            cutoff: None,
        },
        // Click probability and fidelity at the balanced phase choice as a
        // function of the coherent intensity, one curve per efficiency.
        "fig3" => SweepSpec {
            axes: vec![
                Axis { param: Param::GammaAbs, lo: 0.0, hi: 2.0, count: 41 },
                Axis { param: Param::Eta, lo: 0.2, hi: 1.0, count: 5 },
            ],
            fixed: FixedParams {
                phi1: FRAC_PI_4,
                phi2: FRAC_PI_4,
                ..FixedParams::default()
            },
            quantities: vec![Quantity::Pyn, Quantity::Fyn],
            engine: EngineChoice::Analytic,
            cutoff: None,
        },
        // Balanced-superposition preparation over both phase shifts with the
        // coherent amplitude slaved to the target.
        "fig4-eta100" => fig4_spec(1.0),
        "fig4-eta50" => fig4_spec(0.5),
        other => {
            return Err(ExplorerError::Spec(format!(
                "unknown sweep preset '{other}' (available: {})",
                SWEEP_PRESETS.join(", ")
            )))
        }
    };
    Ok(spec)
}

fn fig4_spec(eta: f64) -> SweepSpec {
    SweepSpec {
        axes: vec![
            Axis { param: Param::Phi1, lo: 0.08, hi: 1.49, count: 48 },
            Axis { param: Param::Phi2, lo: 0.08, hi: 1.49, count: 48 },
        ],
        fixed: FixedParams {
            eta,
            ..FixedParams::default()
        },
        quantities: vec![Quantity::PynBal, Quantity::FynBal],
        engine: EngineChoice::Analytic,
        cutoff: None,
    }
}

/// Optimization spec for a named preset.
pub fn optimize_preset(name: &str) -> Result<OptimizeSpec> {
    match name {
        "fig2" => Ok(OptimizeSpec {
            objective: Objective::MaxBalancedTargetProbability,
            search_box: SearchBox {
                phi1: (0.1, 1.5),
                phi2: (0.1, 1.5),
            },
            eta: 1.0,
            coarse_grid: 33,
            refinement_levels: 3,
        }),
        other => Err(ExplorerError::Spec(format!(
            "unknown optimize preset '{other}' (available: fig2)"
        ))),
    }
}
