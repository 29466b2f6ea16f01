//! The two-interferometer cascade: configuration, numeric propagation, and
//! the closed-form three-branch decomposition of the output state.
//!
//! Each Mach-Zehnder stage is driven by the half-shift `phi` of its internal
//! phase difference and acts as a single effective beam splitter conjugated
//! by quarter-wave rotations on the shared mode. With the rotations folded
//! in, a stage is the real mode rotation
//!
//! ```text
//! i^dag -> cos(phi) i^dag - sin(phi) j^dag
//! j^dag -> sin(phi) i^dag + cos(phi) j^dag
//! ```
//!
//! so a photon entering on `j` crosses to `i` with probability `sin^2(phi)`.
//! The cascade keeps the single photon headed into the second stage with
//! amplitude `sin(phi1)`, which is why [`device_output_numeric`] drives the
//! stages at the complementary angles `pi/2 - phi`: that convention makes the
//! numeric output coincide exactly with the closed-form branch weights
//! (`cos(phi1)` on the one-photon branch) used by every downstream formula.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::Error;
use crate::fock::{coherent_state, FockCutoff, Mode, MultiModeState};
use crate::tol;
use crate::Result;

/// Full configuration of one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// First-stage half-shift.
    pub phi1: f64,
    /// Second-stage half-shift.
    pub phi2: f64,
    /// Coherent input amplitude on mode `c`.
    pub gamma: Complex64,
    /// Detector quantum efficiency.
    pub eta: f64,
    /// Fock cutoff for numeric propagation.
    pub cutoff: FockCutoff,
}

impl DeviceParams {
    pub fn new(
        phi1: f64,
        phi2: f64,
        gamma: Complex64,
        eta: f64,
        cutoff: FockCutoff,
    ) -> Result<Self> {
        if !phi1.is_finite() || !phi2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phase shifts must be finite (got {phi1}, {phi2})"
            )));
        }
        if !gamma.re.is_finite() || !gamma.im.is_finite() {
            return Err(Error::InvalidParameter("gamma must be finite".into()));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidEta(eta));
        }
        cutoff.admit(gamma.norm())?;
        Ok(DeviceParams {
            phi1,
            phi2,
            gamma,
            eta,
            cutoff,
        })
    }

    /// Configuration with the cutoff sized automatically for `gamma`.
    pub fn with_auto_cutoff(phi1: f64, phi2: f64, gamma: Complex64, eta: f64) -> Result<Self> {
        let cutoff = FockCutoff::for_amplitude(gamma.norm());
        Self::new(phi1, phi2, gamma, eta, cutoff)
    }

    /// Phase shifts folded into `[0, pi)` for reporting.
    pub fn canonical_phis(&self) -> (f64, f64) {
        let fold = |phi: f64| {
            let mut p = phi % std::f64::consts::PI;
            if p < 0.0 {
                p += std::f64::consts::PI;
            }
            p
        };
        (fold(self.phi1), fold(self.phi2))
    }
}

/// One product-state branch of the closed-form output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    /// Real branch weight.
    pub weight: f64,
    /// Photon number in mode `a` (0 or 1).
    pub a_occupation: usize,
    /// Coherent amplitude riding on mode `b`.
    pub coherent_b: Complex64,
    /// Coherent amplitude riding on mode `c`.
    pub coherent_c: Complex64,
    /// Mode whose coherent state is hit by a creation operator, if any.
    pub creation_on: Option<Mode>,
}

/// The output state as three weighted product branches:
///
/// ```text
/// cos(phi1)            |1>_a |beta>_b |delta>_c
/// + sin(phi1) sin(phi2) |0>_a b^dag|beta>_b |delta>_c
/// - sin(phi1) cos(phi2) |0>_a |beta>_b c^dag|delta>_c
/// ```
///
/// with `beta = gamma cos(phi2)`, `delta = gamma sin(phi2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDecomposition {
    pub branches: [Branch; 3],
    pub cutoff: FockCutoff,
}

impl BranchDecomposition {
    pub fn beta(&self) -> Complex64 {
        self.branches[0].coherent_b
    }

    pub fn delta(&self) -> Complex64 {
        self.branches[0].coherent_c
    }

    /// Expand the branches into a normalized numeric state.
    pub fn assemble(&self) -> Result<MultiModeState> {
        let cutoff = self.cutoff;
        let dim = cutoff.dim();
        let vacuum = {
            let mut v = vec![Complex64::ZERO; dim];
            v[0] = Complex64::ONE;
            v
        };
        let one_photon = {
            let mut v = vec![Complex64::ZERO; dim];
            v[1] = Complex64::ONE;
            v
        };

        let mut total: Option<Vec<Complex64>> = None;
        for branch in &self.branches {
            if branch.weight == 0.0 {
                continue;
            }
            let coh_b = coherent_state(branch.coherent_b, cutoff)?;
            let coh_c = coherent_state(branch.coherent_c, cutoff)?;
            let a_vec = if branch.a_occupation == 0 {
                &vacuum
            } else {
                &one_photon
            };
            let mut state =
                MultiModeState::from_product(a_vec, &coh_b.amplitudes, &coh_c.amplitudes, cutoff)?;
            if let Some(mode) = branch.creation_on {
                state = state.apply_creation(mode)?.0;
            }
            let acc = total.get_or_insert_with(|| vec![Complex64::ZERO; dim * dim * dim]);
            for (t, s) in acc.iter_mut().zip(state.amplitudes()) {
                *t += branch.weight * s;
            }
        }
        let amps = total.ok_or(Error::ZeroNormState)?;
        let state = MultiModeState::from_amplitudes(amps, cutoff)?;
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > tol::NORM {
            return Err(Error::InvalidParameter(format!(
                "branch reassembly norm^2 = {norm_sqr} deviates beyond tolerance"
            )));
        }
        state.normalized()
    }
}

/// Apply one Mach-Zehnder stage to the mode pair `(mode_i, mode_j)`:
/// a `+pi/2` number phase on `mode_j`, the mixer at `-phi`, and a `-pi/2`
/// phase on `mode_j`, in that order.
///
/// Equivalent to a beam splitter routing a `mode_j` photon into `mode_i`
/// with probability `sin^2(phi)`; `phi = 0` is the exact identity.
pub fn mz_unitary_apply(
    state: &MultiModeState,
    mode_i: Mode,
    mode_j: Mode,
    phi: f64,
) -> Result<MultiModeState> {
    let rotated = state.apply_phase(mode_j, FRAC_PI_2);
    let mixed = rotated.apply_two_mode_mixer(mode_i, mode_j, -phi)?;
    Ok(mixed.apply_phase(mode_j, -FRAC_PI_2))
}

/// Propagate the input `|0>_a |1>_b |gamma>_c` through both stages.
///
/// The stages are driven at the complementary angles `pi/2 - phi1` and
/// `pi/2 - phi2` so that the output reproduces the closed-form branch
/// decomposition exactly (see the module docs).
pub fn device_output_numeric(params: &DeviceParams) -> Result<MultiModeState> {
    let cutoff = params.cutoff;
    let dim = cutoff.dim();
    let vacuum = {
        let mut v = vec![Complex64::ZERO; dim];
        v[0] = Complex64::ONE;
        v
    };
    let one_photon = {
        let mut v = vec![Complex64::ZERO; dim];
        v[1] = Complex64::ONE;
        v
    };
    let coh = coherent_state(params.gamma, cutoff)?;
    let input = MultiModeState::from_product(&vacuum, &one_photon, &coh.amplitudes, cutoff)?;

    let after_first = mz_unitary_apply(&input, Mode::A, Mode::B, FRAC_PI_2 - params.phi1)?;
    let output = mz_unitary_apply(&after_first, Mode::B, Mode::C, FRAC_PI_2 - params.phi2)?;
    output.normalized()
}

/// Closed-form three-branch decomposition of the output state.
pub fn device_output_branches(params: &DeviceParams) -> BranchDecomposition {
    let beta = params.gamma * params.phi2.cos();
    let delta = params.gamma * params.phi2.sin();
    let branches = [
        Branch {
            weight: params.phi1.cos(),
            a_occupation: 1,
            coherent_b: beta,
            coherent_c: delta,
            creation_on: None,
        },
        Branch {
            weight: params.phi1.sin() * params.phi2.sin(),
            a_occupation: 0,
            coherent_b: beta,
            coherent_c: delta,
            creation_on: Some(Mode::B),
        },
        Branch {
            weight: -params.phi1.sin() * params.phi2.cos(),
            a_occupation: 0,
            coherent_b: beta,
            coherent_c: delta,
            creation_on: Some(Mode::C),
        },
    ];
    BranchDecomposition {
        branches,
        cutoff: params.cutoff,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(phi1: f64, phi2: f64, gamma: Complex64) -> DeviceParams {
        DeviceParams::with_auto_cutoff(phi1, phi2, gamma, 1.0).unwrap()
    }

    #[test]
    fn mz_full_routing_at_half_pi() {
        let cutoff = FockCutoff::new(5).unwrap();
        let dim = cutoff.dim();
        let mut one = vec![Complex64::ZERO; dim];
        one[1] = Complex64::ONE;
        let mut vac = vec![Complex64::ZERO; dim];
        vac[0] = Complex64::ONE;
        let state = MultiModeState::from_product(&vac, &one, &vac, cutoff).unwrap();
        let routed = mz_unitary_apply(&state, Mode::A, Mode::B, FRAC_PI_2).unwrap();
        // Photon fully in mode a, up to phase.
        assert!((routed.amplitude(1, 0, 0).norm() - 1.0).abs() < 1e-12);
        assert!(routed.amplitude(0, 1, 0).norm() < 1e-12);
    }

    #[test]
    fn mz_zero_angle_is_identity() {
        let cutoff = FockCutoff::new(10).unwrap();
        let coh = coherent_state(c(0.5, 0.3), cutoff).unwrap();
        let dim = cutoff.dim();
        let mut vac = vec![Complex64::ZERO; dim];
        vac[0] = Complex64::ONE;
        let mut one = vec![Complex64::ZERO; dim];
        one[1] = Complex64::ONE;
        let state = MultiModeState::from_product(&vac, &one, &coh.amplitudes, cutoff).unwrap();
        let out = mz_unitary_apply(&state, Mode::A, Mode::B, 0.0).unwrap();
        let overlap = state.inner_product(&out).unwrap();
        assert!((overlap - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn mz_equals_stepwise_three_factor_product() {
        let cutoff = FockCutoff::new(9).unwrap();
        let coh = coherent_state(c(0.4, -0.2), cutoff).unwrap();
        let dim = cutoff.dim();
        let mut vac = vec![Complex64::ZERO; dim];
        vac[0] = Complex64::ONE;
        let mut one = vec![Complex64::ZERO; dim];
        one[1] = Complex64::ONE;
        let state = MultiModeState::from_product(&one, &vac, &coh.amplitudes, cutoff).unwrap();
        let phi = 0.83;
        let combined = mz_unitary_apply(&state, Mode::B, Mode::C, phi).unwrap();
        let stepwise = state
            .apply_phase(Mode::C, FRAC_PI_2)
            .apply_two_mode_mixer(Mode::B, Mode::C, -phi)
            .unwrap()
            .apply_phase(Mode::C, -FRAC_PI_2);
        let overlap = stepwise.inner_product(&combined).unwrap();
        assert!((overlap - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn numeric_output_matches_branch_reassembly() {
        let p = params(FRAC_PI_4, FRAC_PI_4, Complex64::ONE);
        let numeric = device_output_numeric(&p).unwrap();
        let branches = device_output_branches(&p).assemble().unwrap();
        let overlap = branches.inner_product(&numeric).unwrap();
        assert!(
            overlap.norm_sqr() > 1.0 - 1e-10,
            "|<branches|numeric>|^2 = {}",
            overlap.norm_sqr()
        );
    }

    #[test]
    fn cross_engine_identity_on_grid() {
        let phis = [0.0, std::f64::consts::PI / 8.0, FRAC_PI_4, 3.0 * std::f64::consts::PI / 8.0, FRAC_PI_2];
        let gammas = [c(0.0, 0.0), c(0.0, 0.5), c(0.755, 0.0), c(1.0, 0.0)];
        for &phi1 in &phis {
            for &phi2 in &phis {
                for &gamma in &gammas {
                    let p = params(phi1, phi2, gamma);
                    let numeric = device_output_numeric(&p).unwrap();
                    let branches = device_output_branches(&p).assemble().unwrap();
                    let overlap = branches.inner_product(&numeric).unwrap();
                    assert!(
                        overlap.norm_sqr() > 1.0 - 1e-10,
                        "mismatch at phi1={phi1}, phi2={phi2}, gamma={gamma}: {}",
                        overlap.norm_sqr()
                    );
                }
            }
        }
    }

    #[test]
    fn single_photon_branch_vanishes_at_phi1_half_pi() {
        // cos(phi1) = 0: the photon never exits into mode a.
        let p = params(FRAC_PI_2, 0.0, c(0.8, 0.0));
        let out = device_output_numeric(&p).unwrap();
        let pop_a = out.mode_populations(Mode::A);
        assert!(pop_a[1] < 1e-20, "a-mode population {}", pop_a[1]);
        // And the branch weights say the same: sin(phi1) cos(phi2) = 1.
        let dec = device_output_branches(&p);
        assert!((dec.branches[0].weight).abs() < 1e-15);
        assert!((dec.branches[2].weight + 1.0).abs() < 1e-12);
    }

    #[test]
    fn branches_at_zero_gamma_reduce_to_single_photon_interferometry() {
        let p = params(0.9, 0.4, Complex64::ZERO);
        let dec = device_output_branches(&p);
        assert_eq!(dec.beta(), Complex64::ZERO);
        assert_eq!(dec.delta(), Complex64::ZERO);
        let state = dec.assemble().unwrap();
        // Mean photon number is exactly 1.
        assert!((state.mean_total_photon_number() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn second_branch_vanishes_at_phi2_zero() {
        let p = params(0.7, 0.0, c(0.6, 0.0));
        let dec = device_output_branches(&p);
        assert_eq!(dec.branches[1].weight, 0.0);
        // Photon-number content of mode c is purely coherent: conditioned on
        // the vacuum-coherent overlap it never exceeds Poisson weights.
        let state = dec.assemble().unwrap();
        let numeric = device_output_numeric(&p).unwrap();
        let overlap = state.inner_product(&numeric).unwrap();
        assert!(overlap.norm_sqr() > 1.0 - 1e-10);
    }

    #[test]
    fn beta_delta_partition_gamma() {
        let p = params(0.3, 1.1, c(0.7, 0.4));
        let dec = device_output_branches(&p);
        let total = dec.beta().norm_sqr() + dec.delta().norm_sqr();
        assert!((total - p.gamma.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn mean_photon_number_conserved() {
        for gamma in [c(0.0, 0.0), c(0.5, 0.0), c(0.9, 0.3), c(1.4, 0.0)] {
            let p = params(0.6, 1.0, gamma);
            let out = device_output_numeric(&p).unwrap();
            let expected = 1.0 + gamma.norm_sqr();
            assert!(
                (out.mean_total_photon_number() - expected).abs() < 1e-10,
                "gamma = {gamma}"
            );
        }
    }

    #[test]
    fn mode_a_population_confined_to_qubit_sectors() {
        let p = params(0.8, 0.45, c(1.0, 0.5));
        let out = device_output_numeric(&p).unwrap();
        let pop = out.mode_populations(Mode::A);
        let above: f64 = pop[2..].iter().sum();
        assert!(above < 1e-12, "population above n=1: {above:e}");
    }

    #[test]
    fn params_validation() {
        let cutoff = FockCutoff::new(15).unwrap();
        assert!(DeviceParams::new(0.1, 0.2, Complex64::ONE, 1.5, cutoff).is_err());
        assert!(DeviceParams::new(f64::NAN, 0.2, Complex64::ONE, 0.5, cutoff).is_err());
        // Cutoff too small for the coherent amplitude.
        let tiny = FockCutoff::new(2).unwrap();
        assert!(DeviceParams::new(0.1, 0.2, c(1.2, 0.0), 0.5, tiny).is_err());
        let (p1, p2) = DeviceParams::new(-0.3 + std::f64::consts::PI, 4.0, Complex64::ZERO, 0.5, cutoff)
            .unwrap()
            .canonical_phis();
        assert!((0.0..std::f64::consts::PI).contains(&p1));
        assert!((0.0..std::f64::consts::PI).contains(&p2));
    }
}
