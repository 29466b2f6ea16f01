//! Detector models as diagonal probability-operator measures, plus the
//! closed-form coherent-state matrix elements used by the analytic engine.
//!
//! Every detector considered here is diagonal in the photon-number basis, so
//! a POM element is just a weight vector over `0..=n_max`:
//!
//! - `ideal_number(n)`: projector onto `|n>`;
//! - `no(eta)` / `yes(eta)`: an avalanche photodetector of efficiency `eta`
//!   that reports only presence or absence of photons, `NO` carrying weights
//!   `(1-eta)^p` and `YES` its complement;
//! - `photocount(n, eta)`: a number-resolving detector as the Bernoulli
//!   convolution of the ideal projectors, weight `C(k,n) eta^n (1-eta)^{k-n}`
//!   at `k >= n`.

use num_complex::Complex64;

use crate::error::Error;
use crate::fock::{ConditionalState, FockCutoff, MultiModeState};
use crate::Result;

/// Outcome of a YES/NO avalanche detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YesNo {
    Yes,
    No,
}

/// Which detector family a weight vector came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PomKind {
    IdealNumber(usize),
    Yes { eta: f64 },
    No { eta: f64 },
    Photocount { n: usize, eta: f64 },
}

/// A measurement-outcome operator diagonal in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPom {
    pub kind: PomKind,
    pub weights: Vec<f64>,
}

impl DiagonalPom {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

/// Projector onto photon number `n`.
pub fn pom_ideal_number(n: usize, cutoff: FockCutoff) -> Result<DiagonalPom> {
    if n > cutoff.n_max() {
        return Err(Error::PhotonNumberOutOfRange {
            n,
            n_max: cutoff.n_max(),
        });
    }
    let mut weights = vec![0.0; cutoff.dim()];
    weights[n] = 1.0;
    Ok(DiagonalPom {
        kind: PomKind::IdealNumber(n),
        weights,
    })
}

/// YES/NO detector element of efficiency `eta`.
///
/// `NO` has weight `(1 - eta)^p` at photon number `p`; `YES` is `1 - NO`,
/// so the pair sums to the identity exactly.
pub fn pom_yes_no(outcome: YesNo, eta: f64, cutoff: FockCutoff) -> Result<DiagonalPom> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidEta(eta));
    }
    let no: Vec<f64> = (0..cutoff.dim())
        .map(|p| (1.0 - eta).powi(p as i32))
        .collect();
    let (kind, weights) = match outcome {
        YesNo::No => (PomKind::No { eta }, no),
        YesNo::Yes => (
            PomKind::Yes { eta },
            no.iter().map(|w| 1.0 - w).collect(),
        ),
    };
    Ok(DiagonalPom { kind, weights })
}

/// Photocounter element for `n` recorded clicks at efficiency `eta`:
/// weight `C(k, n) eta^n (1-eta)^{k-n}` at photon number `k >= n`.
///
/// The `eta -> 1` limit degenerates to the ideal projector; it is taken
/// exactly once `1 - eta` drops below 1e-12 to avoid a 0/0 prefactor.
#[allow(clippy::needless_range_loop)] // k enters the recurrence arithmetic
pub fn pom_photocount(n: usize, eta: f64, cutoff: FockCutoff) -> Result<DiagonalPom> {
    if !(0.0..=1.0).contains(&eta) || eta == 0.0 {
        return Err(Error::InvalidEta(eta));
    }
    if n > cutoff.n_max() {
        return Err(Error::PhotonNumberOutOfRange {
            n,
            n_max: cutoff.n_max(),
        });
    }
    let kind = PomKind::Photocount { n, eta };
    if 1.0 - eta < 1e-12 {
        let mut weights = vec![0.0; cutoff.dim()];
        weights[n] = 1.0;
        return Ok(DiagonalPom { kind, weights });
    }
    let mut weights = vec![0.0; cutoff.dim()];
    // C(k, n) eta^n (1-eta)^{k-n}, built up iteratively in k.
    let mut binom_tail = eta.powi(n as i32);
    for k in n..cutoff.dim() {
        if k > n {
            // C(k, n) = C(k-1, n) * k / (k - n)
            binom_tail *= (1.0 - eta) * k as f64 / (k - n) as f64;
        }
        weights[k] = binom_tail;
    }
    Ok(DiagonalPom { kind, weights })
}

/// Closed-form coherent-state matrix elements of the detector POMs.
///
/// For a coherent state `|z>` and the `NO`, `YES` and one-click photocount
/// elements, these are the diagonal element `<z|Pi|z>`, the lowering element
/// `<z|a Pi|z>` and the sandwich `<z|a Pi a^dag|z>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentPomElements {
    pub no_diag: f64,
    pub no_lower: Complex64,
    pub no_sandwich: f64,
    pub yes_diag: f64,
    pub yes_lower: Complex64,
    pub yes_sandwich: f64,
    pub one_click_diag: f64,
    pub one_click_lower: Complex64,
    pub one_click_sandwich: f64,
}

/// Evaluate the nine closed forms at amplitude `z` and efficiency `eta`.
///
/// The YES elements are the complements `<z|Pi_Y|z> = 1 - <z|Pi_N|z>`,
/// `<z|a Pi_Y|z> = z - <z|a Pi_N|z>`,
/// `<z|a Pi_Y a^dag|z> = 1 + |z|^2 - <z|a Pi_N a^dag|z>`.
pub fn coherent_pom_elements(z: Complex64, eta: f64) -> Result<CoherentPomElements> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidEta(eta));
    }
    let z_sq = z.norm_sqr();
    let damp = (-eta * z_sq).exp();
    let loss = 1.0 - eta;

    let no_diag = damp;
    let no_lower = z * loss * damp;
    let no_sandwich = loss * (1.0 + z_sq * loss) * damp;

    let yes_diag = 1.0 - no_diag;
    let yes_lower = z - no_lower;
    let yes_sandwich = 1.0 + z_sq - no_sandwich;

    let one_click_diag = eta * z_sq * damp;
    let one_click_lower = z * eta * (1.0 + z_sq * loss) * damp;
    let one_click_sandwich =
        eta * (1.0 + 3.0 * z_sq * loss + z_sq * z_sq * loss * loss) * damp;

    Ok(CoherentPomElements {
        no_diag,
        no_lower,
        no_sandwich,
        yes_diag,
        yes_lower,
        yes_sandwich,
        one_click_diag,
        one_click_lower,
        one_click_sandwich,
    })
}

/// Condition the three-mode state on POM outcomes at modes `b` and `c`.
pub fn condition_on_outcomes(
    state: &MultiModeState,
    pom_b: &DiagonalPom,
    pom_c: &DiagonalPom,
) -> Result<ConditionalState> {
    state.conditioned_reduction(&pom_b.weights, &pom_c.weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{device_output_branches, device_output_numeric, DeviceParams};
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Brute-force oracle: weighted sums over truncated coherent amplitudes.
    /// Independent of the closed-form path under test.
    fn brute_force_elements(z: Complex64, weights: &[f64]) -> (f64, Complex64, f64) {
        let n_max = weights.len() - 1;
        let mut amps = Vec::with_capacity(n_max + 1);
        let mut current = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
        amps.push(current);
        for n in 1..=n_max {
            current *= z / (n as f64).sqrt();
            amps.push(current);
        }
        let diag: f64 = (0..=n_max).map(|k| weights[k] * amps[k].norm_sqr()).sum();
        let mut lower = Complex64::ZERO;
        let mut sandwich = 0.0;
        for k in 1..=n_max {
            let root_k = (k as f64).sqrt();
            lower += weights[k] * root_k * amps[k - 1].conj() * amps[k];
            sandwich += weights[k] * k as f64 * amps[k - 1].norm_sqr();
        }
        (diag, lower, sandwich)
    }

    #[test]
    fn ideal_family_is_projector_family() {
        let cutoff = FockCutoff::new(6).unwrap();
        let p0 = pom_ideal_number(0, cutoff).unwrap();
        assert_eq!(p0.weights[0], 1.0);
        assert!(p0.weights[1..].iter().all(|&w| w == 0.0));
        let p1 = pom_ideal_number(1, cutoff).unwrap();
        assert_eq!(p1.weights[1], 1.0);

        // Completeness: the family sums to identity weights exactly.
        let mut total = vec![0.0; cutoff.dim()];
        for n in 0..cutoff.dim() {
            let p = pom_ideal_number(n, cutoff).unwrap();
            for (t, w) in total.iter_mut().zip(&p.weights) {
                *t += w;
            }
        }
        assert!(total.iter().all(|&t| (t - 1.0).abs() < 1e-15));

        assert!(pom_ideal_number(7, cutoff).is_err());
    }

    #[test]
    fn yes_no_completeness_and_limits() {
        let cutoff = FockCutoff::new(10).unwrap();
        for eta in [0.0, 0.25, 0.7, 1.0] {
            let yes = pom_yes_no(YesNo::Yes, eta, cutoff).unwrap();
            let no = pom_yes_no(YesNo::No, eta, cutoff).unwrap();
            for (y, n) in yes.weights.iter().zip(&no.weights) {
                assert!((y + n - 1.0).abs() < 1e-15);
            }
        }
        // eta = 1: NO is the vacuum projector.
        let no = pom_yes_no(YesNo::No, 1.0, cutoff).unwrap();
        assert_eq!(no.weights[0], 1.0);
        assert!(no.weights[1..].iter().all(|&w| w == 0.0));
        // eta = 0: detector blind.
        let yes = pom_yes_no(YesNo::Yes, 0.0, cutoff).unwrap();
        assert!(yes.weights.iter().all(|&w| w == 0.0));
        assert!(pom_yes_no(YesNo::No, 1.2, cutoff).is_err());
    }

    #[test]
    fn no_element_on_coherent_state() {
        // <z|Pi_N|z> = e^{-eta |z|^2}, via the truncated weighted sum.
        let cutoff = FockCutoff::new(25).unwrap();
        let z = c(0.9, -0.4);
        for eta in [0.2, 0.6, 1.0] {
            let no = pom_yes_no(YesNo::No, eta, cutoff).unwrap();
            let (diag, _, _) = brute_force_elements(z, &no.weights);
            let expected = (-eta * z.norm_sqr()).exp();
            assert!((diag - expected).abs() < 1e-12, "eta = {eta}");
        }
    }

    #[test]
    fn photocount_zero_clicks_equals_yes_no_vacuum_branch() {
        let cutoff = FockCutoff::new(12).unwrap();
        for eta in [0.3, 0.8] {
            let pc0 = pom_photocount(0, eta, cutoff).unwrap();
            let no = pom_yes_no(YesNo::No, eta, cutoff).unwrap();
            for (a, b) in pc0.weights.iter().zip(&no.weights) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn photocount_degenerates_to_projector_at_unit_efficiency() {
        let cutoff = FockCutoff::new(8).unwrap();
        let pc1 = pom_photocount(1, 1.0, cutoff).unwrap();
        let ideal = pom_ideal_number(1, cutoff).unwrap();
        assert_eq!(pc1.weights, ideal.weights);
    }

    #[test]
    fn photocount_family_completeness() {
        let cutoff = FockCutoff::new(9).unwrap();
        for eta in [0.35, 0.9] {
            let mut total = vec![0.0; cutoff.dim()];
            for n in 0..cutoff.dim() {
                let p = pom_photocount(n, eta, cutoff).unwrap();
                for (t, w) in total.iter_mut().zip(&p.weights) {
                    *t += w;
                }
            }
            // Binomial theorem: exact completeness on the retained lattice.
            for (k, &t) in total.iter().enumerate() {
                assert!((t - 1.0).abs() < 1e-12, "eta = {eta}, k = {k}: {t}");
            }
        }
    }

    #[test]
    fn photocount_weight_recurrence_matches_direct_formula() {
        let cutoff = FockCutoff::new(20).unwrap();
        let eta = 0.45;
        for n in [1usize, 2, 5] {
            let pom = pom_photocount(n, eta, cutoff).unwrap();
            for k in n..=20 {
                let mut binom = 1.0f64;
                for i in 0..n {
                    binom *= (k - i) as f64 / (n - i) as f64;
                }
                let expected = binom * eta.powi(n as i32) * (1.0 - eta).powi((k - n) as i32);
                assert!(
                    (pom.weights[k] - expected).abs() < 1e-13,
                    "n = {n}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn coherent_elements_vacuum_limits() {
        let eta = 0.37;
        let el = coherent_pom_elements(Complex64::ZERO, eta).unwrap();
        assert!((el.no_diag - 1.0).abs() < 1e-15);
        assert_eq!(el.no_lower, Complex64::ZERO);
        assert!((el.no_sandwich - (1.0 - eta)).abs() < 1e-15);
        assert!((el.one_click_sandwich - eta).abs() < 1e-15);
    }

    #[test]
    fn coherent_elements_unit_efficiency() {
        let el = coherent_pom_elements(c(0.8, 0.1), 1.0).unwrap();
        assert_eq!(el.no_sandwich, 0.0);
        assert_eq!(el.no_lower, Complex64::ZERO);
    }

    #[test]
    fn coherent_elements_match_brute_force() {
        let cutoff = FockCutoff::new(25).unwrap();
        for z in [c(0.0, 0.0), c(0.3, 0.0), c(0.5, 0.5), c(1.0, 0.0)] {
            for eta in [0.2, 0.6, 1.0] {
                let el = coherent_pom_elements(z, eta).unwrap();
                let no = pom_yes_no(YesNo::No, eta, cutoff).unwrap();
                let yes = pom_yes_no(YesNo::Yes, eta, cutoff).unwrap();
                let pc1 = pom_photocount(1, eta, cutoff).unwrap();

                let (nd, nl, ns) = brute_force_elements(z, &no.weights);
                let (yd, yl, ys) = brute_force_elements(z, &yes.weights);
                let (pd, pl, ps) = brute_force_elements(z, &pc1.weights);

                assert!((el.no_diag - nd).abs() < 1e-10);
                assert!((el.no_lower - nl).norm() < 1e-10);
                assert!((el.no_sandwich - ns).abs() < 1e-10);
                assert!((el.yes_diag - yd).abs() < 1e-10);
                assert!((el.yes_lower - yl).norm() < 1e-10);
                assert!((el.yes_sandwich - ys).abs() < 1e-10);
                assert!((el.one_click_diag - pd).abs() < 1e-10, "z={z} eta={eta}");
                assert!((el.one_click_lower - pl).norm() < 1e-10, "z={z} eta={eta}");
                assert!((el.one_click_sandwich - ps).abs() < 1e-10, "z={z} eta={eta}");
            }
        }
    }

    #[test]
    fn no_diag_strictly_decreasing_in_eta() {
        let z = c(0.7, 0.2);
        let mut last = f64::INFINITY;
        for i in 0..=20 {
            let eta = i as f64 / 20.0;
            let el = coherent_pom_elements(z, eta).unwrap();
            assert!(el.no_diag < last || i == 0);
            last = el.no_diag;
        }
    }

    #[test]
    fn ideal_conditioning_reproduces_balanced_qubit() {
        // phi1 = phi2 = pi/4, gamma = 1, outcome (1 photon at b, 0 at c):
        // probability e^{-1}/2 and the conditional state (|0> + |1>)/sqrt(2).
        let params =
            DeviceParams::with_auto_cutoff(FRAC_PI_4, FRAC_PI_4, Complex64::ONE, 1.0).unwrap();
        let out = device_output_numeric(&params).unwrap();
        let pom_b = pom_ideal_number(1, params.cutoff).unwrap();
        let pom_c = pom_ideal_number(0, params.cutoff).unwrap();
        let cond = condition_on_outcomes(&out, &pom_b, &pom_c).unwrap();
        let expected_p = 0.5 * (-1.0f64).exp();
        assert!(
            (cond.probability - expected_p).abs() < 1e-10,
            "P = {}, expected {expected_p}",
            cond.probability
        );
        let half = 0.5;
        assert!((cond.matrix.entry(0, 0).re - half).abs() < 1e-10);
        assert!((cond.matrix.entry(1, 1).re - half).abs() < 1e-10);
        assert!((cond.matrix.entry(0, 1).re - half).abs() < 1e-10);
        assert!(cond.matrix.entry(0, 1).im.abs() < 1e-12);
    }

    #[test]
    fn yes_no_at_unit_efficiency_marginalizes_ideal_conditioning() {
        let params =
            DeviceParams::with_auto_cutoff(0.62, 0.81, c(0.4, 0.2), 1.0).unwrap();
        let out = device_output_branches(&params).assemble().unwrap();
        let yes = pom_yes_no(YesNo::Yes, 1.0, params.cutoff).unwrap();
        let no = pom_yes_no(YesNo::No, 1.0, params.cutoff).unwrap();
        let p_yn = condition_on_outcomes(&out, &yes, &no).unwrap().probability;
        let pom_c0 = pom_ideal_number(0, params.cutoff).unwrap();
        let mut marginal = 0.0;
        for n in 1..params.cutoff.dim() {
            let pom_bn = pom_ideal_number(n, params.cutoff).unwrap();
            marginal += condition_on_outcomes(&out, &pom_bn, &pom_c0)
                .unwrap()
                .probability;
        }
        assert!((p_yn - marginal).abs() < 1e-12);
    }

    #[test]
    fn blind_detector_never_clicks() {
        let params =
            DeviceParams::with_auto_cutoff(0.5, 0.9, c(0.7, 0.0), 0.0).unwrap();
        let out = device_output_numeric(&params).unwrap();
        let yes = pom_yes_no(YesNo::Yes, 0.0, params.cutoff).unwrap();
        let no = pom_yes_no(YesNo::No, 0.0, params.cutoff).unwrap();
        let cond = condition_on_outcomes(&out, &yes, &no).unwrap();
        assert!(cond.probability.abs() < 1e-15);
        assert!(!cond.reliable);
    }

    #[test]
    fn four_outcome_probabilities_sum_to_one() {
        let params =
            DeviceParams::with_auto_cutoff(0.7, 1.1, c(0.9, 0.5), 0.63).unwrap();
        let out = device_output_numeric(&params).unwrap();
        let yes = pom_yes_no(YesNo::Yes, params.eta, params.cutoff).unwrap();
        let no = pom_yes_no(YesNo::No, params.eta, params.cutoff).unwrap();
        let mut total = 0.0;
        for pb in [&yes, &no] {
            for pc in [&yes, &no] {
                total += condition_on_outcomes(&out, pb, pc).unwrap().probability;
            }
        }
        assert!((total - 1.0).abs() < 1e-10, "total = {total}");
    }
}
