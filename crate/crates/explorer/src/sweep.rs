//! Grid sweeps over device parameters.
//!
//! A [`SweepSpec`] names the axes (parameter, range, point count), the fixed
//! values of the remaining parameters, the quantities to evaluate and the
//! engine to use. Evaluation is deterministic: the grid is walked row-major
//! over the axes in declaration order, grid points are evaluated in parallel
//! into pre-indexed slots, and the emitted bytes depend only on the spec.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mzqubit::analytic;
use mzqubit::device::{device_output_numeric, DeviceParams};
use mzqubit::fock::{FockCutoff, MultiModeState};
use mzqubit::measurement::{
    condition_on_outcomes, pom_ideal_number, pom_photocount, pom_yes_no, YesNo,
};
use mzqubit::tol::Tolerances;

use crate::{ExplorerError, Result};

/// Cap on automatically chosen cutoffs; sweeps demanding more are rejected.
const MAX_AUTO_N_MAX: usize = 48;

/// Sweepable device parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Phi1,
    Phi2,
    GammaAbs,
    GammaArg,
    Eta,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Phi1 => "phi1",
            Param::Phi2 => "phi2",
            Param::GammaAbs => "gamma_abs",
            Param::GammaArg => "gamma_arg",
            Param::Eta => "eta",
        }
    }

    pub fn parse(s: &str) -> Option<Param> {
        match s {
            "phi1" => Some(Param::Phi1),
            "phi2" => Some(Param::Phi2),
            "gamma-abs" | "gamma_abs" => Some(Param::GammaAbs),
            "gamma-arg" | "gamma_arg" => Some(Param::GammaArg),
            "eta" => Some(Param::Eta),
            _ => None,
        }
    }
}

/// One sweep axis: `count` evenly spaced points on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, index: usize) -> f64 {
        if self.count == 1 {
            return self.lo;
        }
        self.lo + (self.hi - self.lo) * index as f64 / (self.count - 1) as f64
    }
}

/// Quantities a sweep can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Ideal herald probability (1 photon at `b`, 0 at `c`).
    P10,
    /// Ideal herald probability of the mirrored event.
    P01,
    /// Balanced-target herald probability with `|gamma| = tan phi1 tan phi2`.
    PStar,
    /// YES/NO click-and-silence probability.
    Pyn,
    /// YES/NO conditional fidelity against the ideal herald state.
    Fyn,
    /// `Pyn` with the coherent amplitude slaved to the balanced target.
    PynBal,
    /// `Fyn` with the coherent amplitude slaved to the balanced target.
    FynBal,
    /// Photocounter herald probability.
    PPc,
    /// Photocounter conditional fidelity.
    FPc,
    /// Inner product of the two ideal heralded states (real/imag columns).
    Overlap,
    /// Unnormalized conditional coefficients of the YES/NO herald.
    Coeffs,
}

impl Quantity {
    pub fn parse(s: &str) -> Option<Quantity> {
        match s {
            "p10" => Some(Quantity::P10),
            "p01" => Some(Quantity::P01),
            "pstar" => Some(Quantity::PStar),
            "pyn" => Some(Quantity::Pyn),
            "fyn" => Some(Quantity::Fyn),
            "pyn_bal" | "pyn-bal" => Some(Quantity::PynBal),
            "fyn_bal" | "fyn-bal" => Some(Quantity::FynBal),
            "p_pc" | "p-pc" => Some(Quantity::PPc),
            "f_pc" | "f-pc" => Some(Quantity::FPc),
            "overlap" => Some(Quantity::Overlap),
            "coeffs" => Some(Quantity::Coeffs),
            _ => None,
        }
    }

    /// Column names this quantity contributes, in emission order.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::P10 => &["p10"],
            Quantity::P01 => &["p01"],
            Quantity::PStar => &["pstar"],
            Quantity::Pyn => &["pyn"],
            Quantity::Fyn => &["fyn"],
            Quantity::PynBal => &["pyn_bal"],
            Quantity::FynBal => &["fyn_bal"],
            Quantity::PPc => &["p_pc"],
            Quantity::FPc => &["f_pc"],
            Quantity::Overlap => &["overlap_re", "overlap_im"],
            Quantity::Coeffs => &["c00", "c11", "c01_re", "c01_im"],
        }
    }

    /// Columns constrained to `[0, 1]` (probabilities and fidelities).
    fn unit_interval_columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Overlap | Quantity::Coeffs => &[],
            other => other.columns(),
        }
    }
}

/// Which computational route evaluates the quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Analytic,
    Numeric,
    Both,
}

impl EngineChoice {
    pub fn parse(s: &str) -> Option<EngineChoice> {
        match s {
            "analytic" => Some(EngineChoice::Analytic),
            "numeric" => Some(EngineChoice::Numeric),
            "both" => Some(EngineChoice::Both),
            _ => None,
        }
    }
}

/// Values of the parameters not swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub phi1: f64,
    pub phi2: f64,
    pub gamma_abs: f64,
    pub gamma_arg: f64,
    pub eta: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            phi1: std::f64::consts::FRAC_PI_4,
            phi2: std::f64::consts::FRAC_PI_4,
            gamma_abs: 1.0,
            gamma_arg: 0.0,
            eta: 1.0,
        }
    }
}

/// Complete description of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub fixed: FixedParams,
    pub quantities: Vec<Quantity>,
    pub engine: EngineChoice,
    /// Explicit Fock cutoff for numeric evaluation; sized automatically when
    /// absent.
    pub cutoff: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(ExplorerError::Spec("at least one axis is required".into()));
        }
        for axis in &self.axes {
            if axis.count < 2 {
                return Err(ExplorerError::Spec(format!(
                    "axis {} needs at least 2 points (got {})",
                    axis.param.name(),
                    axis.count
                )));
            }
            if !axis.lo.is_finite() || !axis.hi.is_finite() || axis.lo > axis.hi {
                return Err(ExplorerError::Spec(format!(
                    "axis {} has an invalid range [{}, {}]",
                    axis.param.name(),
                    axis.lo,
                    axis.hi
                )));
            }
        }
        for (i, a) in self.axes.iter().enumerate() {
            for b in &self.axes[i + 1..] {
                if a.param == b.param {
                    return Err(ExplorerError::Spec(format!(
                        "axis parameter {} repeated",
                        a.param.name()
                    )));
                }
            }
        }
        if self.quantities.is_empty() {
            return Err(ExplorerError::Spec("no quantities requested".into()));
        }
        let mut seen = Vec::new();
        for q in &self.quantities {
            if seen.contains(q) {
                return Err(ExplorerError::Spec("quantity listed twice".into()));
            }
            seen.push(*q);
        }
        if let Some(n_max) = self.cutoff {
            FockCutoff::new(n_max).map_err(ExplorerError::Core)?;
        }
        Ok(())
    }

    pub fn total_points(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Parameter values at flat grid index `index` (row-major, first axis
    /// outermost).
    pub fn point(&self, index: usize) -> GridPoint {
        let mut remaining = index;
        let mut indices = vec![0usize; self.axes.len()];
        for (slot, axis) in indices.iter_mut().zip(&self.axes).rev() {
            *slot = remaining % axis.count;
            remaining /= axis.count;
        }
        let mut point = GridPoint {
            phi1: self.fixed.phi1,
            phi2: self.fixed.phi2,
            gamma_abs: self.fixed.gamma_abs,
            gamma_arg: self.fixed.gamma_arg,
            eta: self.fixed.eta,
        };
        for (axis, &i) in self.axes.iter().zip(&indices) {
            let value = axis.value(i);
            match axis.param {
                Param::Phi1 => point.phi1 = value,
                Param::Phi2 => point.phi2 = value,
                Param::GammaAbs => point.gamma_abs = value,
                Param::GammaArg => point.gamma_arg = value,
                Param::Eta => point.eta = value,
            }
        }
        point
    }

    /// Column names of the emitted table: axis parameters (with a derived
    /// `gamma_sq` column after a `gamma_abs` axis), then quantity columns,
    /// expanded per engine.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for axis in &self.axes {
            names.push(axis.param.name().to_string());
            if axis.param == Param::GammaAbs {
                names.push("gamma_sq".to_string());
            }
        }
        for q in &self.quantities {
            for col in q.columns() {
                match self.engine {
                    EngineChoice::Analytic | EngineChoice::Numeric => {
                        names.push((*col).to_string());
                    }
                    EngineChoice::Both => {
                        names.push(format!("{col}_analytic"));
                        names.push(format!("{col}_numeric"));
                        names.push(format!("{col}_absdiff"));
                    }
                }
            }
        }
        names
    }
}

/// A fully resolved parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub phi1: f64,
    pub phi2: f64,
    pub gamma_abs: f64,
    pub gamma_arg: f64,
    pub eta: f64,
}

impl GridPoint {
    pub fn gamma(&self) -> Complex64 {
        Complex64::from_polar(self.gamma_abs, self.gamma_arg)
    }

    /// Coherent amplitude slaved to the balanced target,
    /// `|gamma| = tan phi1 tan phi2` at the configured phase.
    pub fn gamma_balanced(&self) -> Result<Complex64> {
        let t = self.phi1.tan() * self.phi2.tan();
        if !t.is_finite() || t.abs() > 1e12 {
            return Err(ExplorerError::Spec(format!(
                "balanced-target amplitude diverges at phi1={}, phi2={}",
                self.phi1, self.phi2
            )));
        }
        Ok(Complex64::from_polar(t.abs(), self.gamma_arg + if t < 0.0 { std::f64::consts::PI } else { 0.0 }))
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub params: GridPoint,
    pub values: BTreeMap<String, f64>,
}

/// Run metadata attached to a sweep result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    /// Largest Fock cutoff used by numeric evaluation (the nominal default
    /// for analytic-only runs).
    pub cutoff: usize,
    pub tolerances: ToleranceEcho,
    /// No randomness is used anywhere; recorded for schema completeness.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceEcho {
    pub norm: f64,
    pub hermiticity: f64,
    pub tail: f64,
    pub probability_floor: f64,
}

impl From<Tolerances> for ToleranceEcho {
    fn from(t: Tolerances) -> Self {
        ToleranceEcho {
            norm: t.norm,
            hermiticity: t.hermiticity,
            tail: t.tail,
            probability_floor: t.probability_floor,
        }
    }
}

/// Deterministic sweep output: spec echo, one record per grid point, and
/// metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub records: Vec<Record>,
    pub meta: SweepMeta,
}

/// Evaluate every requested quantity at every grid point.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let total = spec.total_points();

    let records: Vec<Result<(Record, usize)>> = (0..total)
        .into_par_iter()
        .map(|index| evaluate_point(spec, spec.point(index)))
        .collect();

    let mut out = Vec::with_capacity(total);
    let mut max_cutoff = 0usize;
    for record in records {
        let (record, cutoff) = record?;
        max_cutoff = max_cutoff.max(cutoff);
        out.push(record);
    }
    if max_cutoff == 0 {
        max_cutoff = spec.cutoff.unwrap_or(FockCutoff::DEFAULT_N_MAX);
    }

    validate_ranges(spec, &out)?;

    Ok(SweepResult {
        spec: spec.clone(),
        records: out,
        meta: SweepMeta {
            cutoff: max_cutoff,
            tolerances: Tolerances::default().into(),
            seed: None,
        },
    })
}

/// Emitted probabilities and fidelities must land in `[0, 1]` up to float
/// dust; anything worse fails the run.
fn validate_ranges(spec: &SweepSpec, records: &[Record]) -> Result<()> {
    for q in &spec.quantities {
        for col in q.unit_interval_columns() {
            let keys: Vec<String> = match spec.engine {
                EngineChoice::Analytic | EngineChoice::Numeric => vec![(*col).to_string()],
                EngineChoice::Both => {
                    vec![format!("{col}_analytic"), format!("{col}_numeric")]
                }
            };
            for record in records {
                for key in &keys {
                    if let Some(&v) = record.values.get(key) {
                        if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                            return Err(ExplorerError::Verification(format!(
                                "{key} = {v} out of [0, 1] at phi1={}, phi2={}, |gamma|={}, eta={}",
                                record.params.phi1,
                                record.params.phi2,
                                record.params.gamma_abs,
                                record.params.eta
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn resolve_cutoff(spec: &SweepSpec, gamma_abs: f64) -> Result<FockCutoff> {
    match spec.cutoff {
        Some(n_max) => {
            let cutoff = FockCutoff::new(n_max).map_err(ExplorerError::Core)?;
            cutoff.admit(gamma_abs).map_err(|_| {
                ExplorerError::Spec(format!(
                    "cutoff n_max={n_max} insufficient for |gamma| = {gamma_abs}"
                ))
            })?;
            Ok(cutoff)
        }
        None => {
            let cutoff = FockCutoff::for_amplitude(gamma_abs);
            if cutoff.n_max() > MAX_AUTO_N_MAX {
                return Err(ExplorerError::Spec(format!(
                    "|gamma| = {gamma_abs} would need n_max = {} (cap {MAX_AUTO_N_MAX}); \
                     narrow the sweep range",
                    cutoff.n_max()
                )));
            }
            Ok(cutoff)
        }
    }
}

/// Lazily built numeric states for one grid point (plain and balanced-target
/// coherent amplitude).
struct NumericContext {
    point: GridPoint,
    plain: Option<(MultiModeState, FockCutoff)>,
    balanced: Option<(MultiModeState, FockCutoff)>,
    max_cutoff: usize,
}

impl NumericContext {
    fn new(point: GridPoint) -> Self {
        NumericContext {
            point,
            plain: None,
            balanced: None,
            max_cutoff: 0,
        }
    }

    fn state(&mut self, spec: &SweepSpec, balanced: bool) -> Result<&(MultiModeState, FockCutoff)> {
        let gamma = if balanced {
            self.point.gamma_balanced()?
        } else {
            self.point.gamma()
        };
        let slot = if balanced { &mut self.balanced } else { &mut self.plain };
        if slot.is_none() {
            let cutoff = resolve_cutoff(spec, gamma.norm())?;
            let params = DeviceParams::new(self.point.phi1, self.point.phi2, gamma, self.point.eta, cutoff)
                .map_err(ExplorerError::Core)?;
            let state = device_output_numeric(&params).map_err(ExplorerError::Core)?;
            self.max_cutoff = self.max_cutoff.max(cutoff.n_max());
            *slot = Some((state, cutoff));
        }
        Ok(slot.as_ref().unwrap())
    }
}

fn evaluate_point(spec: &SweepSpec, point: GridPoint) -> Result<(Record, usize)> {
    let mut values = BTreeMap::new();
    let mut ctx = NumericContext::new(point);

    for &q in &spec.quantities {
        match spec.engine {
            EngineChoice::Analytic => {
                for (col, v) in analytic_values(q, &point)? {
                    values.insert(col, v);
                }
            }
            EngineChoice::Numeric => {
                for (col, v) in numeric_values(spec, q, &mut ctx)? {
                    values.insert(col, v);
                }
            }
            EngineChoice::Both => {
                let a = analytic_values(q, &point)?;
                let n = numeric_values(spec, q, &mut ctx)?;
                for ((col, av), (_, nv)) in a.into_iter().zip(n) {
                    values.insert(format!("{col}_analytic"), av);
                    values.insert(format!("{col}_numeric"), nv);
                    values.insert(format!("{col}_absdiff"), (av - nv).abs());
                }
            }
        }
    }

    Ok((
        Record {
            params: point,
            values,
        },
        ctx.max_cutoff,
    ))
}

fn analytic_values(q: Quantity, p: &GridPoint) -> Result<Vec<(String, f64)>> {
    let gamma = p.gamma();
    let named = |col: &str, v: f64| (col.to_string(), v);
    let out = match q {
        Quantity::P10 => vec![named("p10", analytic::ideal_probability_10(p.phi1, p.phi2, gamma))],
        Quantity::P01 => vec![named("p01", analytic::ideal_probability_01(p.phi1, p.phi2, gamma))],
        Quantity::PStar => vec![named(
            "pstar",
            analytic::balanced_target_probability(p.phi1, p.phi2).map_err(ExplorerError::Core)?,
        )],
        Quantity::Pyn => vec![named("pyn", analytic::yn_probability(p.eta, gamma, p.phi1, p.phi2))],
        Quantity::Fyn => vec![named(
            "fyn",
            analytic::yn_fidelity(p.eta, gamma, p.phi1, p.phi2).map_err(ExplorerError::Core)?,
        )],
        Quantity::PynBal => {
            let gb = p.gamma_balanced()?;
            vec![named("pyn_bal", analytic::yn_probability(p.eta, gb, p.phi1, p.phi2))]
        }
        Quantity::FynBal => {
            let gb = p.gamma_balanced()?;
            vec![named(
                "fyn_bal",
                analytic::yn_fidelity(p.eta, gb, p.phi1, p.phi2).map_err(ExplorerError::Core)?,
            )]
        }
        Quantity::PPc => vec![named(
            "p_pc",
            analytic::photocounter_probability(p.eta, gamma, p.phi1, p.phi2),
        )],
        Quantity::FPc => {
            let (_, _, f) =
                analytic::photocounter_regime(p.eta, gamma, p.phi1, p.phi2).map_err(ExplorerError::Core)?;
            vec![named("f_pc", f)]
        }
        Quantity::Overlap => {
            let ov = analytic::overlap_10_01(p.phi1, p.phi2, gamma).map_err(ExplorerError::Core)?;
            vec![named("overlap_re", ov.re), named("overlap_im", ov.im)]
        }
        Quantity::Coeffs => {
            let c = analytic::yn_coefficients(p.eta, gamma, p.phi1, p.phi2);
            vec![
                named("c00", c.c00),
                named("c11", c.c11),
                named("c01_re", c.c01.re),
                named("c01_im", c.c01.im),
            ]
        }
    };
    Ok(out)
}

fn numeric_values(
    spec: &SweepSpec,
    q: Quantity,
    ctx: &mut NumericContext,
) -> Result<Vec<(String, f64)>> {
    let p = ctx.point;
    let gamma = p.gamma();
    let named = |col: &str, v: f64| (col.to_string(), v);

    let ideal_pair = |state: &MultiModeState, cutoff: FockCutoff, n_b: usize, n_c: usize| -> Result<f64> {
        let pb = pom_ideal_number(n_b, cutoff).map_err(ExplorerError::Core)?;
        let pc = pom_ideal_number(n_c, cutoff).map_err(ExplorerError::Core)?;
        Ok(condition_on_outcomes(state, &pb, &pc)
            .map_err(ExplorerError::Core)?
            .probability)
    };

    let out = match q {
        Quantity::P10 => {
            let (state, cutoff) = ctx.state(spec, false)?.clone();
            vec![named("p10", ideal_pair(&state, cutoff, 1, 0)?)]
        }
        Quantity::P01 => {
            let (state, cutoff) = ctx.state(spec, false)?.clone();
            vec![named("p01", ideal_pair(&state, cutoff, 0, 1)?)]
        }
        Quantity::PStar => {
            // At the slaved amplitude the two herald terms coincide, so the
            // balanced-target probability is the plain ideal herald there.
            let (state, cutoff) = ctx.state(spec, true)?.clone();
            let p10 = ideal_pair(&state, cutoff, 1, 0)?;
            vec![named("pstar", p10)]
        }
        Quantity::Pyn | Quantity::Fyn | Quantity::Coeffs => {
            let (state, cutoff) = ctx.state(spec, false)?.clone();
            let yes = pom_yes_no(YesNo::Yes, p.eta, cutoff).map_err(ExplorerError::Core)?;
            let no = pom_yes_no(YesNo::No, p.eta, cutoff).map_err(ExplorerError::Core)?;
            let cond = condition_on_outcomes(&state, &yes, &no).map_err(ExplorerError::Core)?;
            match q {
                Quantity::Pyn => vec![named("pyn", cond.probability)],
                Quantity::Fyn => {
                    let target =
                        analytic::ideal_state_10(p.phi1, p.phi2, gamma).map_err(ExplorerError::Core)?;
                    vec![named(
                        "fyn",
                        cond.matrix.fidelity_with_pure(&[target.a0, target.a1]),
                    )]
                }
                _ => {
                    let pr = cond.probability;
                    vec![
                        named("c00", pr * cond.matrix.entry(0, 0).re),
                        named("c11", pr * cond.matrix.entry(1, 1).re),
                        named("c01_re", pr * cond.matrix.entry(0, 1).re),
                        named("c01_im", pr * cond.matrix.entry(0, 1).im),
                    ]
                }
            }
        }
        Quantity::PynBal | Quantity::FynBal => {
            let gb = p.gamma_balanced()?;
            let (state, cutoff) = ctx.state(spec, true)?.clone();
            let yes = pom_yes_no(YesNo::Yes, p.eta, cutoff).map_err(ExplorerError::Core)?;
            let no = pom_yes_no(YesNo::No, p.eta, cutoff).map_err(ExplorerError::Core)?;
            let cond = condition_on_outcomes(&state, &yes, &no).map_err(ExplorerError::Core)?;
            if q == Quantity::PynBal {
                vec![named("pyn_bal", cond.probability)]
            } else {
                let target =
                    analytic::ideal_state_10(p.phi1, p.phi2, gb).map_err(ExplorerError::Core)?;
                vec![named(
                    "fyn_bal",
                    cond.matrix.fidelity_with_pure(&[target.a0, target.a1]),
                )]
            }
        }
        Quantity::PPc | Quantity::FPc => {
            let (state, cutoff) = ctx.state(spec, false)?.clone();
            let one = pom_photocount(1, p.eta, cutoff).map_err(ExplorerError::Core)?;
            let zero = pom_photocount(0, p.eta, cutoff).map_err(ExplorerError::Core)?;
            let cond = condition_on_outcomes(&state, &one, &zero).map_err(ExplorerError::Core)?;
            if q == Quantity::PPc {
                vec![named("p_pc", cond.probability)]
            } else {
                let target =
                    analytic::ideal_state_10(p.phi1, p.phi2, gamma).map_err(ExplorerError::Core)?;
                vec![named(
                    "f_pc",
                    cond.matrix.fidelity_with_pure(&[target.a0, target.a1]),
                )]
            }
        }
        Quantity::Overlap => {
            // Both heralded states are amplitude slices of the same output
            // vector at (n_b, n_c) = (1, 0) and (0, 1). Each slice is brought
            // to the convention of the closed forms (first nonzero component
            // real positive) before taking the inner product.
            let (state, _) = ctx.state(spec, false)?;
            let d = state.dim();
            let canonical_slice = |n_b: usize, n_c: usize| -> Result<Vec<Complex64>> {
                let mut v: Vec<Complex64> =
                    (0..d).map(|na| state.amplitude(na, n_b, n_c)).collect();
                let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                let anchor = v
                    .iter()
                    .find(|a| a.norm() > 1e-14 * norm)
                    .copied()
                    .ok_or(ExplorerError::Core(mzqubit::Error::DegenerateState))?;
                let phase = anchor / anchor.norm();
                for a in v.iter_mut() {
                    *a /= phase * norm;
                }
                Ok(v)
            };
            let slice10 = canonical_slice(1, 0)?;
            let slice01 = canonical_slice(0, 1)?;
            let overlap: Complex64 = slice01
                .iter()
                .zip(&slice10)
                .map(|(a, b)| a.conj() * b)
                .sum();
            vec![named("overlap_re", overlap.re), named("overlap_im", overlap.im)]
        }
    };
    Ok(out)
}

/// Table view of a result: ordered column names and rows of floats, shared by
/// the CSV writer and the tests.
pub fn tabulate(result: &SweepResult) -> (Vec<String>, Vec<Vec<f64>>) {
    let columns = result.spec.column_names();
    let rows = result
        .records
        .iter()
        .map(|record| {
            columns
                .iter()
                .map(|col| match col.as_str() {
                    "phi1" => record.params.phi1,
                    "phi2" => record.params.phi2,
                    "gamma_abs" => record.params.gamma_abs,
                    "gamma_sq" => record.params.gamma_abs * record.params.gamma_abs,
                    "gamma_arg" => record.params.gamma_arg,
                    "eta" => record.params.eta,
                    name => *record.values.get(name).unwrap_or(&f64::NAN),
                })
                .collect()
        })
        .collect();
    (columns, rows)
}
