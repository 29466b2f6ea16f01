//! Closed-form expressions for every probability, conditional-state
//! coefficient and fidelity produced by the cascade, together with the
//! inversion that maps a desired qubit back to device settings.
//!
//! These functions are the fast path for parameter sweeps and the oracle the
//! numeric engine is checked against. Conventions:
//!
//! - `gamma` is the coherent input amplitude, `g = |gamma|^2` its intensity;
//! - `eta` is the detector quantum efficiency;
//! - the herald of interest is "one photon at the detector on mode `b`, none
//!   at mode `c`" (the `10` event) unless stated otherwise;
//! - `c01` in [`ConditionalCoefficients`] multiplies `|0><1|`, so it carries
//!   `conj(gamma)`; the `|1><0|` entry is its conjugate.
//!
//! Fidelities are always computed as the quadratic form of the coefficient
//! matrix against the target amplitudes. Specialized expressions (balanced
//! and small-angle regimes, photocounter detectors) are algebraic
//! simplifications of the same quantities and are tested to agree with the
//! general route at 1e-12.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::Error;
use crate::measurement::coherent_pom_elements;
use crate::Result;

/// Conditional-state coefficients in the `{|0>, |1>}` sector.
///
/// `c00` and `c11` are the unnormalized populations, `c01` the unnormalized
/// `|0><1|` coherence, and `normalizer` the detection probability that
/// rescales them to a unit-trace matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalCoefficients {
    pub c00: f64,
    pub c11: f64,
    pub c01: Complex64,
    pub normalizer: f64,
}

impl ConditionalCoefficients {
    /// `<psi|rho|psi>` against a qubit target, using the normalized matrix.
    pub fn fidelity_with(&self, target: &QubitTarget) -> f64 {
        let cross = (target.a0.conj() * self.c01 * target.a1).re;
        (target.a0.norm_sqr() * self.c00 + target.a1.norm_sqr() * self.c11 + 2.0 * cross)
            / self.normalizer
    }

    /// Cauchy-Schwarz defect `|c01|^2 - c00 c11` (<= 0 for a valid state).
    pub fn schwarz_defect(&self) -> f64 {
        self.c01.norm_sqr() - self.c00 * self.c11
    }
}

/// A vacuum/one-photon superposition `a0|0> + a1|1>`, stored normalized and
/// with the global phase fixed (the first nonzero amplitude is real
/// positive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitTarget {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl QubitTarget {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm_sqr = a0.norm_sqr() + a1.norm_sqr();
        if norm_sqr <= 0.0 {
            return Err(Error::ZeroNormState);
        }
        let scale = 1.0 / norm_sqr.sqrt();
        let mut a0 = a0 * scale;
        let mut a1 = a1 * scale;
        let reference = if a0.norm() > 1e-15 { a0 } else { a1 };
        let phase = reference / reference.norm();
        a0 /= phase;
        a1 /= phase;
        Ok(QubitTarget { a0, a1 })
    }

    /// Balanced superposition `(|0> + e^{i phase}|1>)/sqrt(2)`.
    pub fn balanced(phase: f64) -> Self {
        QubitTarget {
            a0: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            a1: Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, phase),
        }
    }

    /// Relative phase `arg(a1 / a0)`, when both components are present.
    pub fn relative_phase(&self) -> Option<f64> {
        if self.a0.norm() > 1e-15 && self.a1.norm() > 1e-15 {
            Some((self.a1 / self.a0).arg())
        } else {
            None
        }
    }

}

// --- ideal photon-number heralds --------------------------------------------

/// Probability of the ideal `(1 at b, 0 at c)` herald:
/// `e^{-g} [sin^2 phi1 sin^2 phi2 + g cos^2 phi1 cos^2 phi2]`.
pub fn ideal_probability_10(phi1: f64, phi2: f64, gamma: Complex64) -> f64 {
    let g = gamma.norm_sqr();
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    (-g).exp() * (s1 * s1 * s2 * s2 + g * c1 * c1 * c2 * c2)
}

/// Conditional pure state of mode `a` for the ideal `10` herald:
/// `(sin phi1 sin phi2 |0> + gamma cos phi1 cos phi2 |1>) / sqrt(D)`.
pub fn ideal_state_10(phi1: f64, phi2: f64, gamma: Complex64) -> Result<QubitTarget> {
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let a0 = Complex64::new(s1 * s2, 0.0);
    let a1 = gamma * (c1 * c2);
    if a0.norm_sqr() + a1.norm_sqr() <= 0.0 {
        return Err(Error::DegenerateState);
    }
    QubitTarget::new(a0, a1)
}

/// Probability of the symmetric `(0 at b, 1 at c)` herald.
pub fn ideal_probability_01(phi1: f64, phi2: f64, gamma: Complex64) -> f64 {
    let g = gamma.norm_sqr();
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    (-g).exp() * (s1 * s1 * c2 * c2 + g * c1 * c1 * s2 * s2)
}

/// Conditional state for the `01` herald, carrying the sign flip on the
/// one-photon component:
/// `(sin phi1 cos phi2 |0> - gamma cos phi1 sin phi2 |1>) / sqrt(D')`.
pub fn ideal_state_01(phi1: f64, phi2: f64, gamma: Complex64) -> Result<QubitTarget> {
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let a0 = Complex64::new(s1 * c2, 0.0);
    let a1 = -gamma * (c1 * s2);
    if a0.norm_sqr() + a1.norm_sqr() <= 0.0 {
        return Err(Error::DegenerateState);
    }
    QubitTarget::new(a0, a1)
}

/// Exact inner product `<psi_01|psi_10>` of the two heralded states.
///
/// Vanishes when `|gamma| = tan phi1` (for every `phi2`) and when
/// `phi2` is a multiple of `pi/2`.
pub fn overlap_10_01(phi1: f64, phi2: f64, gamma: Complex64) -> Result<Complex64> {
    let g = gamma.norm_sqr();
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let d10 = s1 * s1 * s2 * s2 + g * c1 * c1 * c2 * c2;
    let d01 = s1 * s1 * c2 * c2 + g * c1 * c1 * s2 * s2;
    if d10 <= 0.0 || d01 <= 0.0 {
        return Err(Error::DegenerateState);
    }
    let numerator = s2 * c2 * (s1 * s1 - g * c1 * c1);
    Ok(Complex64::new(numerator / (d10 * d01).sqrt(), 0.0))
}

/// Herald probability for an exactly balanced target, where
/// `|gamma| = tan phi1 tan phi2`:
/// `2 sin^2 phi1 sin^2 phi2 exp(-tan^2 phi1 tan^2 phi2)`.
pub fn balanced_target_probability(phi1: f64, phi2: f64) -> Result<f64> {
    let t1 = phi1.tan();
    let t2 = phi2.tan();
    if !t1.is_finite() || !t2.is_finite() || t1.abs() > 1e12 || t2.abs() > 1e12 {
        return Err(Error::InvalidParameter(
            "balanced-target probability undefined at tangent poles".into(),
        ));
    }
    let s1 = phi1.sin();
    let s2 = phi2.sin();
    Ok(2.0 * s1 * s1 * s2 * s2 * (-(t1 * t1 * t2 * t2)).exp())
}

// --- YES/NO avalanche detection ----------------------------------------------

/// Probability of a click at the `b` detector and silence at the `c`
/// detector, for YES/NO detectors of efficiency `eta`.
pub fn yn_probability(eta: f64, gamma: Complex64, phi1: f64, phi2: f64) -> f64 {
    let g = gamma.norm_sqr();
    let s1_sq = phi1.sin().powi(2);
    let u = phi2.sin().powi(2);
    let v = phi2.cos().powi(2);
    let damp = (-eta * g * u).exp();
    let e = (-eta * g * v).exp();
    damp * (1.0 - e + eta * s1_sq * (e + v * (eta * g * u - 1.0)))
}

/// Conditional-state coefficients for the YES/NO herald, assembled from the
/// coherent-state matrix elements at `beta = gamma cos phi2`,
/// `delta = gamma sin phi2`.
pub fn yn_coefficients(eta: f64, gamma: Complex64, phi1: f64, phi2: f64) -> ConditionalCoefficients {
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let beta = gamma * c2;
    let delta = gamma * s2;
    let b = coherent_pom_elements(beta, eta).expect("eta validated by caller");
    let d = coherent_pom_elements(delta, eta).expect("eta validated by caller");

    let c11 = c1 * c1 * b.yes_diag * d.no_diag;
    let c00 = s1
        * s1
        * (s2 * s2 * b.yes_sandwich * d.no_diag + c2 * c2 * b.yes_diag * d.no_sandwich
            - s2 * c2 * 2.0 * (b.yes_lower.conj() * d.no_lower).re);
    let c01 = s1 * c1 * (s2 * b.yes_lower.conj() * d.no_diag - c2 * b.yes_diag * d.no_lower.conj());

    ConditionalCoefficients {
        c00,
        c11,
        c01,
        normalizer: yn_probability(eta, gamma, phi1, phi2),
    }
}

/// Fidelity of the YES/NO conditional state against the ideal `10` herald
/// state, as the quadratic form of the coefficient matrix.
///
/// The common damping factor `e^{-eta g sin^2 phi2}` shared by every
/// coefficient and the normalizer is canceled before evaluation, so the
/// ratio stays finite even where the detection probability underflows.
pub fn yn_fidelity(eta: f64, gamma: Complex64, phi1: f64, phi2: f64) -> Result<f64> {
    let target = ideal_state_10(phi1, phi2, gamma)?;
    let coeffs = yn_coefficients_undamped(eta, gamma, phi1, phi2);
    Ok(coeffs.fidelity_with(&target))
}

/// [`yn_coefficients`] with the delta-mode damping factor divided out of
/// every entry (including the normalizer), leaving the fidelity unchanged.
fn yn_coefficients_undamped(
    eta: f64,
    gamma: Complex64,
    phi1: f64,
    phi2: f64,
) -> ConditionalCoefficients {
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let beta = gamma * c2;
    let delta = gamma * s2;
    let b = coherent_pom_elements(beta, eta).expect("eta validated by caller");
    // Delta-side elements sans their common e^{-eta |delta|^2} factor.
    let loss = 1.0 - eta;
    let d_no_diag = 1.0;
    let d_no_lower = delta * loss;
    let d_no_sandwich = loss * (1.0 + delta.norm_sqr() * loss);

    let c11 = c1 * c1 * b.yes_diag * d_no_diag;
    let c00 = s1
        * s1
        * (s2 * s2 * b.yes_sandwich * d_no_diag + c2 * c2 * b.yes_diag * d_no_sandwich
            - s2 * c2 * 2.0 * (b.yes_lower.conj() * d_no_lower).re);
    let c01 = s1 * c1 * (s2 * b.yes_lower.conj() * d_no_diag - c2 * b.yes_diag * d_no_lower.conj());

    ConditionalCoefficients {
        c00,
        c11,
        c01,
        normalizer: c00 + c11,
    }
}

/// The same fidelity as one expanded expression; a regrouping of
/// [`yn_fidelity`] kept as an independent algebraic route (the shared
/// damping factor is canceled here as well).
pub fn yn_fidelity_expanded(eta: f64, gamma: Complex64, phi1: f64, phi2: f64) -> Result<f64> {
    let g = gamma.norm_sqr();
    let s1_sq = phi1.sin().powi(2);
    let c1_sq = phi1.cos().powi(2);
    let u = phi2.sin().powi(2);
    let v = phi2.cos().powi(2);
    let denom_d = s1_sq * u + g * c1_sq * v;
    if denom_d <= 0.0 {
        return Err(Error::DegenerateState);
    }
    let e = (-eta * g * v).exp();
    let trace = 1.0 - e + eta * s1_sq * (e + v * (eta * g * u - 1.0));
    let numerator = g * c1_sq * c1_sq * v * (1.0 - e)
        + 2.0 * eta * g * s1_sq * c1_sq * u * v
        + s1_sq * s1_sq * u * (1.0 - (1.0 - eta) * e + eta * v * (eta * g * u - 1.0));
    Ok(numerator / (trace * denom_d))
}

/// Balanced working point `phi1 = phi2 = pi/4`: `(probability, fidelity)`
/// as closed forms in `eta` and the coherent intensity alone.
pub fn balanced_regime(eta: f64, gamma_abs: f64) -> (f64, f64) {
    let g = gamma_abs * gamma_abs;
    let e = (-0.5 * eta * g).exp();
    let probability = e * (1.0 - e + 0.5 * eta * (e + 0.25 * (eta * g - 2.0)));
    let numerator =
        (4.0 - 2.0 * eta + g * (2.0 + eta).powi(2)) - 4.0 * e * (1.0 - eta + g);
    let denominator =
        (1.0 + g) * (8.0 + eta * (eta * g - 2.0) - 4.0 * e * (2.0 - eta));
    let fidelity = numerator / denominator;
    (probability, fidelity)
}

/// Efficiency-independent ceiling of the balanced-regime fidelity as a
/// function of the coherent intensity (it is the `eta = 1` curve).
pub fn balanced_fidelity_bound(gamma_abs: f64) -> f64 {
    let g = gamma_abs * gamma_abs;
    let e = (-0.5 * g).exp();
    (2.0 + g * (9.0 - 4.0 * e)) / ((1.0 + g) * (g + 6.0 - 4.0 * e))
}

/// Small-angle regime `phi1 ~ 0`, `phi2 = pi/2 - phi1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnbalancedRegime {
    /// Leading-order probability `eta phi1^2 (1 + g) e^{-eta g}`.
    pub probability_approx: f64,
    /// Leading-order fidelity `1 - phi1^2 (2 - eta) g^2 / (2 (1 + g)^2)`;
    /// at `g = 1` this is `1 - phi1^2 (2 - eta) / 8`.
    pub fidelity_approx: f64,
    /// Exact probability from the general formula at `phi2 = pi/2 - phi1`.
    pub probability_exact: f64,
    /// Exact fidelity from the general quadratic form.
    pub fidelity_exact: f64,
    /// Set when `phi1` exceeds the small-angle threshold 0.2.
    pub outside_small_angle: bool,
}

/// Evaluate the small-angle working regime at `phi2 = pi/2 - phi1`.
pub fn unbalanced_regime(eta: f64, gamma: Complex64, phi1: f64) -> Result<UnbalancedRegime> {
    let phi2 = FRAC_PI_2 - phi1;
    let g = gamma.norm_sqr();
    let probability_approx = eta * phi1 * phi1 * (1.0 + g) * (-eta * g).exp();
    let fidelity_approx =
        1.0 - 0.5 * phi1 * phi1 * (2.0 - eta) * g * g / ((1.0 + g) * (1.0 + g));
    let probability_exact = yn_probability(eta, gamma, phi1, phi2);
    let fidelity_exact = yn_fidelity(eta, gamma, phi1, phi2)?;
    Ok(UnbalancedRegime {
        probability_approx,
        fidelity_approx,
        probability_exact,
        fidelity_exact,
        outside_small_angle: phi1.abs() > 0.2,
    })
}

/// Consistency relation of the small-angle regime: the fidelity implied by a
/// detection probability `p_yn`,
/// `1 - (2 - eta) g^2 e^{eta g} p_yn / (2 eta (1 + g)^3)`.
///
/// Feeding back the approximate probability reproduces the approximate
/// fidelity identically; feeding the exact probability agrees with the exact
/// fidelity to fourth order in `phi1`.
pub fn unbalanced_fidelity_from_probability(eta: f64, gamma: Complex64, p_yn: f64) -> f64 {
    let g = gamma.norm_sqr();
    let cubic = (1.0 + g) * (1.0 + g) * (1.0 + g);
    1.0 - (2.0 - eta) * g * g * (eta * g).exp() * p_yn / (2.0 * eta * cubic)
}

// --- photocounter detection ---------------------------------------------------

/// Herald probability with number-resolving detectors (one click at `b`,
/// none at `c`): `eta e^{-eta g} [sin^2 phi1 sin^2 phi2 + g cos^2 phi2 (1 - eta sin^2 phi1)]`.
pub fn photocounter_probability(eta: f64, gamma: Complex64, phi1: f64, phi2: f64) -> f64 {
    let g = gamma.norm_sqr();
    let s1_sq = phi1.sin().powi(2);
    let u = phi2.sin().powi(2);
    let v = phi2.cos().powi(2);
    eta * (-eta * g).exp() * (s1_sq * u + g * v * (1.0 - eta * s1_sq))
}

/// Conditional-state coefficients for the photocounter herald, assembled
/// from the one-click and vacuum coherent matrix elements.
pub fn photocounter_coefficients(
    eta: f64,
    gamma: Complex64,
    phi1: f64,
    phi2: f64,
) -> ConditionalCoefficients {
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let beta = gamma * c2;
    let delta = gamma * s2;
    let b = coherent_pom_elements(beta, eta).expect("eta validated by caller");
    let d = coherent_pom_elements(delta, eta).expect("eta validated by caller");

    let c11 = c1 * c1 * b.one_click_diag * d.no_diag;
    let c00 = s1
        * s1
        * (s2 * s2 * b.one_click_sandwich * d.no_diag + c2 * c2 * b.one_click_diag * d.no_sandwich
            - s2 * c2 * 2.0 * (b.one_click_lower.conj() * d.no_lower).re);
    let c01 =
        s1 * c1 * (s2 * b.one_click_lower.conj() * d.no_diag - c2 * b.one_click_diag * d.no_lower.conj());

    ConditionalCoefficients {
        c00,
        c11,
        c01,
        normalizer: photocounter_probability(eta, gamma, phi1, phi2),
    }
}

/// Balanced-point photocounter fidelity as a closed form:
/// `1 - g^2 (1 - eta) / ((1 + g)(1 + g (2 - eta)))`.
pub fn photocounter_fidelity_balanced(eta: f64, gamma_abs: f64) -> f64 {
    let g = gamma_abs * gamma_abs;
    1.0 - g * g * (1.0 - eta) / ((1.0 + g) * (1.0 + g * (2.0 - eta)))
}

/// Full photocounter herald: probability, coefficients and fidelity against
/// the ideal `10` state. The fidelity route cancels the shared `e^{-eta g}`
/// factor so it stays finite at extreme intensities.
pub fn photocounter_regime(
    eta: f64,
    gamma: Complex64,
    phi1: f64,
    phi2: f64,
) -> Result<(f64, ConditionalCoefficients, f64)> {
    let coeffs = photocounter_coefficients(eta, gamma, phi1, phi2);
    let target = ideal_state_10(phi1, phi2, gamma)?;

    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let beta = gamma * c2;
    let delta = gamma * s2;
    let loss = 1.0 - eta;
    // Undamped one-click elements on the beta side and vacuum elements on
    // the delta side.
    let b_diag = eta * beta.norm_sqr();
    let b_lower = beta * eta * (1.0 + beta.norm_sqr() * loss);
    let b_sandwich = eta * (1.0 + 3.0 * beta.norm_sqr() * loss + beta.norm_sqr().powi(2) * loss * loss);
    let d_lower = delta * loss;
    let d_sandwich = loss * (1.0 + delta.norm_sqr() * loss);

    let c11 = c1 * c1 * b_diag;
    let c00 = s1
        * s1
        * (s2 * s2 * b_sandwich + c2 * c2 * b_diag * d_sandwich
            - s2 * c2 * 2.0 * (b_lower.conj() * d_lower).re);
    let c01 = s1 * c1 * (s2 * b_lower.conj() - c2 * b_diag * d_lower.conj());
    let undamped = ConditionalCoefficients {
        c00,
        c11,
        c01,
        normalizer: c00 + c11,
    };
    let fidelity = undamped.fidelity_with(&target);
    Ok((coeffs.normalizer, coeffs, fidelity))
}

// --- target inversion ----------------------------------------------------------

/// How to pick a representative from the one-parameter solution family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveStrategy {
    /// Maximize the ideal herald probability over the family.
    MaxProbability,
    /// Evaluate the family at fixed phase shifts.
    FixedPhases { phi1: f64, phi2: f64 },
}

/// Which solution family a target falls into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetFamily {
    /// `gamma = ratio tan(phi1) tan(phi2) e^{i phase}` over free `(phi1, phi2)`.
    General { amplitude_ratio: f64, relative_phase: f64 },
    /// `gamma = 0`, any phases with `sin phi1 sin phi2 != 0`.
    Vacuum,
    /// `phi1 = 0` with free `gamma != 0`: the herald is exactly `|1>`.
    OnePhoton,
}

/// A representative device setting that prepares the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvedTarget {
    pub phi1: f64,
    pub phi2: f64,
    pub gamma: Complex64,
    /// Ideal herald probability at the representative point.
    pub probability: f64,
    pub family: TargetFamily,
}

/// Invert the herald-state map: find device settings whose ideal `10` herald
/// equals `target`.
pub fn solve_target(target: &QubitTarget, strategy: SolveStrategy) -> Result<SolvedTarget> {
    let a0_abs = target.a0.norm();
    let a1_abs = target.a1.norm();

    if a1_abs <= 1e-15 {
        // |0>: gamma = 0, any phases away from the sin zeros.
        let (phi1, phi2) = match strategy {
            SolveStrategy::MaxProbability => (FRAC_PI_2, FRAC_PI_2),
            SolveStrategy::FixedPhases { phi1, phi2 } => {
                if (phi1.sin() * phi2.sin()).abs() < 1e-12 {
                    return Err(Error::DegenerateState);
                }
                (phi1, phi2)
            }
        };
        let gamma = Complex64::ZERO;
        return Ok(SolvedTarget {
            phi1,
            phi2,
            gamma,
            probability: ideal_probability_10(phi1, phi2, gamma),
            family: TargetFamily::Vacuum,
        });
    }

    if a0_abs <= 1e-15 {
        // |1>: the vacuum branch must vanish, so phi1 = 0; gamma is free.
        let phi2 = match strategy {
            SolveStrategy::MaxProbability => 0.0,
            SolveStrategy::FixedPhases { phi2, .. } => {
                if phi2.cos().abs() < 1e-12 {
                    return Err(Error::DegenerateState);
                }
                phi2
            }
        };
        let gamma = Complex64::ONE;
        return Ok(SolvedTarget {
            phi1: 0.0,
            phi2,
            gamma,
            probability: ideal_probability_10(0.0, phi2, gamma),
            family: TargetFamily::OnePhoton,
        });
    }

    let ratio = a1_abs / a0_abs;
    let relative_phase = target.relative_phase().unwrap_or(0.0);
    let (phi1, phi2) = match strategy {
        SolveStrategy::MaxProbability => {
            let phi = optimal_symmetric_phase(ratio);
            (phi, phi)
        }
        SolveStrategy::FixedPhases { phi1, phi2 } => {
            let t1 = phi1.tan();
            let t2 = phi2.tan();
            if !t1.is_finite() || !t2.is_finite() || (t1 * t2).abs() < 1e-15 {
                return Err(Error::DegenerateState);
            }
            (phi1, phi2)
        }
    };
    let gamma = Complex64::from_polar(ratio * phi1.tan() * phi2.tan(), relative_phase);
    Ok(SolvedTarget {
        phi1,
        phi2,
        gamma,
        probability: ideal_probability_10(phi1, phi2, gamma),
        family: TargetFamily::General {
            amplitude_ratio: ratio,
            relative_phase,
        },
    })
}

/// Probability-maximizing symmetric phase for the general family: the root
/// of `cos^6 phi = r^2 sin^4 phi` in `(0, pi/2)`, found by bisection (the
/// left side decreases and the right side increases monotonically).
fn optimal_symmetric_phase(ratio: f64) -> f64 {
    let r_sq = ratio * ratio;
    let gap = |phi: f64| phi.cos().powi(6) - r_sq * phi.sin().powi(4);
    let mut lo = 1e-9;
    let mut hi = FRAC_PI_2 - 1e-9;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    const E_INV: f64 = 0.36787944117144233;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ideal_probability_10_reference_points() {
        assert_eq!(ideal_probability_10(0.0, 0.7, Complex64::ZERO), 0.0);
        let p = ideal_probability_10(FRAC_PI_4, FRAC_PI_4, Complex64::ONE);
        assert!((p - 0.5 * E_INV).abs() < 1e-15, "p = {p}");
        // Only the single-photon branch survives at phi1 = phi2 = pi/2.
        for g_abs in [0.3, 0.9, 1.3] {
            let p = ideal_probability_10(FRAC_PI_2, FRAC_PI_2, c(g_abs, 0.0));
            assert!((p - (-(g_abs * g_abs)).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn ideal_state_10_reference_points() {
        // gamma = 0 heralds the vacuum whenever sin phi1 sin phi2 != 0.
        let s = ideal_state_10(0.8, 0.9, Complex64::ZERO).unwrap();
        assert!((s.a0.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.a1, Complex64::ZERO);

        // |gamma| = tan phi1 tan phi2 gives a balanced state with the phase
        // of gamma as relative phase.
        let phi1 = 0.6f64;
        let phi2 = 1.1f64;
        let phase = 0.77;
        let gamma = Complex64::from_polar(phi1.tan() * phi2.tan(), phase);
        let s = ideal_state_10(phi1, phi2, gamma).unwrap();
        assert!((s.a0.norm_sqr() - 0.5).abs() < 1e-13);
        assert!((s.a1.norm_sqr() - 0.5).abs() < 1e-13);
        assert!((s.relative_phase().unwrap() - phase).abs() < 1e-13);

        // phi1 = phi2 = pi/4, gamma = i -> (|0> + i|1>)/sqrt(2).
        let s = ideal_state_10(FRAC_PI_4, FRAC_PI_4, Complex64::i()).unwrap();
        assert!((s.a0 - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-13);
        assert!((s.a1 - c(0.0, std::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-13);

        assert!(matches!(
            ideal_state_10(0.0, 0.5, Complex64::ZERO),
            Err(Error::DegenerateState)
        ));
    }

    #[test]
    fn ideal_01_reference_points() {
        // phi2 = pi/2: P01 = e^{-g} g cos^2 phi1, state proportional to |1>.
        let gamma = c(0.8, 0.3);
        let g = gamma.norm_sqr();
        let phi1 = 0.7;
        let p = ideal_probability_01(phi1, FRAC_PI_2, gamma);
        let expected = (-g).exp() * g * phi1.cos().powi(2);
        assert!((p - expected).abs() < 1e-14);
        let s = ideal_state_01(phi1, FRAC_PI_2, gamma).unwrap();
        assert!(s.a0.norm() < 1e-15);
        assert!((s.a1.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthogonality_at_gamma_tan_phi1() {
        let phi1 = 0.67f64;
        let gamma = c(phi1.tan(), 0.0);
        for k in 1..20 {
            let phi2 = k as f64 * FRAC_PI_2 / 20.0;
            let ov = overlap_10_01(phi1, phi2, gamma).unwrap();
            assert!(ov.norm() < 1e-12, "phi2 = {phi2}: {}", ov.norm());
        }
        // The common probability is e^{-tan^2 phi1} sin^2 phi1 > 0.20 there.
        let p10 = ideal_probability_10(phi1, 0.9, gamma);
        let p01 = ideal_probability_01(phi1, 0.9, gamma);
        let expected = (-(phi1.tan().powi(2))).exp() * phi1.sin().powi(2);
        assert!((p10 - expected).abs() < 1e-14);
        assert!((p01 - expected).abs() < 1e-14);
        assert!(expected > 0.20);
    }

    #[test]
    fn orthogonality_at_phi2_multiples_of_half_pi() {
        let gamma = c(0.5, 0.2);
        for p in [0i32, 1, 2, 3] {
            let phi2 = p as f64 * FRAC_PI_2;
            let ov = overlap_10_01(0.8, phi2, gamma).unwrap();
            assert!(ov.norm() < 1e-12);
        }
    }

    #[test]
    fn overlap_matches_direct_amplitude_arithmetic() {
        let phi1 = FRAC_PI_4;
        let phi2 = FRAC_PI_4;
        let gamma = c(0.5, 0.0);
        let s10 = ideal_state_10(phi1, phi2, gamma).unwrap();
        let s01 = ideal_state_01(phi1, phi2, gamma).unwrap();
        let direct = s01.a0.conj() * s10.a0 + s01.a1.conj() * s10.a1;
        let formula = overlap_10_01(phi1, phi2, gamma).unwrap();
        assert!((direct - formula).norm() < 1e-13);
    }

    #[test]
    fn balanced_probability_reference_points() {
        let p = balanced_target_probability(FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!((p - 0.5 * E_INV).abs() < 1e-15);
        assert!(balanced_target_probability(1e-9, 0.7).unwrap() < 1e-15);
        assert!(balanced_target_probability(FRAC_PI_2, 0.3).is_err());
        // Maximum near phi = 0.715 with optimal amplitude near 0.755.
        let p_opt = balanced_target_probability(0.715, 0.715).unwrap();
        assert!((p_opt - 0.2093).abs() < 2e-3, "p_opt = {p_opt}");
        let gamma_opt = 0.715f64.tan().powi(2);
        assert!((gamma_opt - 0.755).abs() < 5e-3);
    }

    #[test]
    fn yn_probability_limits() {
        assert_eq!(yn_probability(0.0, c(0.7, 0.1), 0.5, 0.9), 0.0);
        // gamma = 0: the click can only come from the single photon routed to b.
        for (phi1, phi2, eta) in [(0.5, 0.9, 0.7), (1.1, 0.3, 0.4)] {
            let p = yn_probability(eta, Complex64::ZERO, phi1, phi2);
            let expected = eta * phi1.sin().powi(2) * phi2.sin().powi(2);
            assert!((p - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn yn_probability_equals_coefficient_trace() {
        for eta in [0.2, 0.5, 0.8, 1.0] {
            for gamma in [c(0.3, 0.0), c(0.755, 0.4), c(1.0, -0.6)] {
                for (phi1, phi2) in [(0.3, 1.2), (FRAC_PI_4, FRAC_PI_4), (1.4, 0.2)] {
                    let p = yn_probability(eta, gamma, phi1, phi2);
                    let coeffs = yn_coefficients(eta, gamma, phi1, phi2);
                    assert!(
                        (coeffs.c00 + coeffs.c11 - p).abs() < 1e-14,
                        "trace defect at eta={eta}, gamma={gamma}, phi=({phi1},{phi2})"
                    );
                }
            }
        }
    }

    #[test]
    fn yn_coefficients_at_unit_efficiency_small_gamma() {
        // eta = 1, gamma -> 0: the conditional state approaches |0>.
        let coeffs = yn_coefficients(1.0, c(1e-8, 0.0), 0.6, 0.9);
        assert!(coeffs.c11 / coeffs.normalizer < 1e-14);
        let target = ideal_state_10(0.6, 0.9, c(1e-8, 0.0)).unwrap();
        let f = coeffs.fidelity_with(&target);
        assert!((f - 1.0).abs() < 1e-7);
    }

    #[test]
    fn yn_schwarz_inequality() {
        for eta in [0.2, 0.6, 1.0] {
            for gamma in [c(0.4, 0.0), c(0.9, 0.5)] {
                let coeffs = yn_coefficients(eta, gamma, 0.7, 1.0);
                assert!(coeffs.schwarz_defect() <= 1e-12);
            }
        }
    }

    #[test]
    fn yn_fidelity_expanded_agrees_with_quadratic_form() {
        for eta in [0.2, 0.5, 0.8, 1.0] {
            for gamma in [c(0.3, 0.0), c(0.5, 0.5), c(1.0, 0.0), c(0.0, 1.4)] {
                for (phi1, phi2) in [(0.3, 1.2), (FRAC_PI_4, FRAC_PI_4), (0.9, 0.45), (1.47, 0.1)] {
                    let direct = yn_fidelity(eta, gamma, phi1, phi2).unwrap();
                    let expanded = yn_fidelity_expanded(eta, gamma, phi1, phi2).unwrap();
                    assert!(
                        (direct - expanded).abs() < 1e-12,
                        "eta={eta} gamma={gamma} phi=({phi1},{phi2}): {direct} vs {expanded}"
                    );
                }
            }
        }
    }

    #[test]
    fn balanced_regime_specializes_general_formulas() {
        for eta in [0.05, 0.3, 0.65, 1.0] {
            for gamma_abs in [0.1, 0.5, 1.0, 1.4] {
                let (p, f) = balanced_regime(eta, gamma_abs);
                let gamma = c(gamma_abs, 0.0);
                let p_general = yn_probability(eta, gamma, FRAC_PI_4, FRAC_PI_4);
                let f_general = yn_fidelity(eta, gamma, FRAC_PI_4, FRAC_PI_4).unwrap();
                assert!((p - p_general).abs() < 1e-12, "P at eta={eta}, |g|={gamma_abs}");
                assert!((f - f_general).abs() < 1e-12, "F at eta={eta}, |g|={gamma_abs}");
            }
        }
    }

    #[test]
    fn balanced_fidelity_approaches_one_for_weak_input() {
        let (_, f) = balanced_regime(1.0, 0.01);
        assert!(f > 1.0 - 1e-3, "f = {f}");
    }

    #[test]
    fn balanced_probability_ceiling() {
        // The click-and-silence probability tops out near 0.3468 at eta = 1,
        // |gamma|^2 ~ 0.95; it never reaches one half anywhere.
        let mut best: f64 = 0.0;
        for i in 1..=40 {
            for j in 1..=80 {
                let eta = i as f64 / 40.0;
                let gamma_abs = 2.0 * j as f64 / 80.0;
                best = best.max(balanced_regime(eta, gamma_abs).0);
            }
        }
        assert!(best > 0.34 && best < 0.35, "max P_yn = {best}");
    }

    #[test]
    fn fidelity_bound_majorizes_balanced_fidelity_at_unit_gamma() {
        // Inequality sweep over the eta grid at |gamma| = 1; the ceiling is
        // attained exactly at eta = 1.
        for gamma_abs in [0.5, 1.0, 1.5] {
            let bound = balanced_fidelity_bound(gamma_abs);
            for j in 1..=100 {
                let eta = j as f64 / 100.0;
                let (_, f) = balanced_regime(eta, gamma_abs);
                assert!(
                    f <= bound + 1e-9,
                    "F = {f} above bound {bound} at eta={eta}, |gamma|={gamma_abs}"
                );
            }
            let (_, f_unit) = balanced_regime(1.0, gamma_abs);
            assert!((f_unit - bound).abs() < 1e-14);
        }
    }

    #[test]
    fn unbalanced_regime_reference_point() {
        // sin^2 phi1 = cos^2 phi2 = 0.01: F > 0.99 at ~1% yield.
        let phi1 = 0.1f64.asin();
        for eta in [0.1, 0.5, 1.0] {
            let reg = unbalanced_regime(eta, Complex64::ONE, phi1).unwrap();
            assert!(reg.fidelity_exact > 0.99, "eta = {eta}: {}", reg.fidelity_exact);
            assert!(!reg.outside_small_angle);
            assert!(reg.probability_exact < 0.02);
        }
        let reg = unbalanced_regime(0.5, Complex64::ONE, 0.25).unwrap();
        assert!(reg.outside_small_angle);
    }

    #[test]
    fn unbalanced_approximations_have_fourth_order_error() {
        let eta = 0.5;
        let gamma = Complex64::ONE;
        let mut prob_err = Vec::new();
        let mut fid_err = Vec::new();
        for phi1 in [0.2, 0.1, 0.05] {
            let reg = unbalanced_regime(eta, gamma, phi1).unwrap();
            prob_err.push((reg.probability_exact - reg.probability_approx).abs());
            fid_err.push((reg.fidelity_exact - reg.fidelity_approx).abs());
        }
        for errs in [&prob_err, &fid_err] {
            assert!(errs[0] / errs[1] >= 8.0, "ratios {errs:?}");
            assert!(errs[1] / errs[2] >= 8.0, "ratios {errs:?}");
        }
    }

    #[test]
    fn unbalanced_consistency_relation() {
        let eta = 0.7;
        let gamma = c(0.9, 0.0);
        // Feeding the approximate probability back reproduces the
        // approximate fidelity identically.
        let reg = unbalanced_regime(eta, gamma, 0.08).unwrap();
        let via_p = unbalanced_fidelity_from_probability(eta, gamma, reg.probability_approx);
        assert!((via_p - reg.fidelity_approx).abs() < 1e-15);
        // Feeding the exact probability agrees to fourth order: the residual
        // shrinks at least eightfold per halving of phi1.
        let residual = |phi1: f64| {
            let reg = unbalanced_regime(eta, gamma, phi1).unwrap();
            let via = unbalanced_fidelity_from_probability(eta, gamma, reg.probability_exact);
            (via - reg.fidelity_exact).abs()
        };
        assert!(residual(0.2) / residual(0.1) >= 8.0);
        assert!(residual(0.1) / residual(0.05) >= 8.0);
    }

    #[test]
    fn photocounter_reference_points() {
        // eta = 1 reduces to the ideal herald.
        for gamma in [c(0.4, 0.0), c(0.9, 0.5)] {
            for (phi1, phi2) in [(0.5, 1.0), (FRAC_PI_4, FRAC_PI_4)] {
                let p = photocounter_probability(1.0, gamma, phi1, phi2);
                assert!((p - ideal_probability_10(phi1, phi2, gamma)).abs() < 1e-14);
                let (_, _, f) = photocounter_regime(1.0, gamma, phi1, phi2).unwrap();
                assert!((f - 1.0).abs() < 1e-12);
            }
        }
        // Balanced closed form: F(eta -> 0, g = 1) = 5/6.
        let f0 = photocounter_fidelity_balanced(0.0, 1.0);
        assert!((f0 - 5.0 / 6.0).abs() < 1e-15);
        let f1 = photocounter_fidelity_balanced(1.0, 1.0);
        assert_eq!(f1, 1.0);
    }

    #[test]
    fn photocounter_balanced_fidelity_matches_general_route() {
        for eta in [0.2, 0.5, 0.9] {
            for gamma_abs in [0.3, 1.0, 1.4] {
                let gamma = c(gamma_abs, 0.0);
                let (_, _, f) = photocounter_regime(eta, gamma, FRAC_PI_4, FRAC_PI_4).unwrap();
                let closed = photocounter_fidelity_balanced(eta, gamma_abs);
                assert!(
                    (f - closed).abs() < 1e-12,
                    "eta={eta}, |gamma|={gamma_abs}: {f} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn photocounter_coefficients_closed_forms() {
        // The assembled coefficients reduce to compact closed forms.
        for eta in [0.25, 0.7] {
            for gamma in [c(0.6, 0.2), c(1.0, 0.0)] {
                for (phi1, phi2) in [(0.4f64, 1.1f64), (0.9, 0.6)] {
                    let g = gamma.norm_sqr();
                    let (s1, c1) = phi1.sin_cos();
                    let (s2, c2) = phi2.sin_cos();
                    let damp = (-eta * g).exp();
                    let coeffs = photocounter_coefficients(eta, gamma, phi1, phi2);
                    let c11 = eta * g * c1 * c1 * c2 * c2 * damp;
                    let c00 =
                        eta * s1 * s1 * (s2 * s2 + (1.0 - eta) * g * c2 * c2) * damp;
                    let c01 = gamma.conj() * (eta * s1 * c1 * s2 * c2 * damp);
                    assert!((coeffs.c11 - c11).abs() < 1e-14);
                    assert!((coeffs.c00 - c00).abs() < 1e-14);
                    assert!((coeffs.c01 - c01).norm() < 1e-14);
                    assert!((coeffs.c00 + coeffs.c11 - coeffs.normalizer).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn solve_balanced_target() {
        let target = QubitTarget::balanced(0.0);
        let sol = solve_target(&target, SolveStrategy::MaxProbability).unwrap();
        match sol.family {
            TargetFamily::General { amplitude_ratio, relative_phase } => {
                assert!((amplitude_ratio - 1.0).abs() < 1e-12);
                assert!(relative_phase.abs() < 1e-12);
            }
            other => panic!("unexpected family {other:?}"),
        }
        // |gamma| = tan phi1 tan phi2 along the family.
        assert!((sol.gamma.norm() - sol.phi1.tan() * sol.phi2.tan()).abs() < 1e-12);
        assert!((sol.phi1 - 0.715).abs() < 5e-3);
        assert!((sol.probability - 0.21).abs() < 5e-3);
    }

    #[test]
    fn solve_vacuum_and_one_photon_targets() {
        let vac = QubitTarget::new(Complex64::ONE, Complex64::ZERO).unwrap();
        let sol = solve_target(&vac, SolveStrategy::MaxProbability).unwrap();
        assert_eq!(sol.family, TargetFamily::Vacuum);
        assert_eq!(sol.gamma, Complex64::ZERO);
        let state = ideal_state_10(sol.phi1, sol.phi2, sol.gamma).unwrap();
        assert!((state.a0.norm() - 1.0).abs() < 1e-14);

        let one = QubitTarget::new(Complex64::ZERO, Complex64::ONE).unwrap();
        let sol = solve_target(&one, SolveStrategy::MaxProbability).unwrap();
        assert_eq!(sol.family, TargetFamily::OnePhoton);
        assert_eq!(sol.phi1, 0.0);
        let state = ideal_state_10(sol.phi1, sol.phi2, sol.gamma).unwrap();
        assert!((state.a1.norm() - 1.0).abs() < 1e-14);
        assert!(sol.probability > 0.0);
    }

    #[test]
    fn solve_imaginary_balanced_target_at_fixed_phases() {
        let target = QubitTarget::balanced(FRAC_PI_2);
        let sol = solve_target(
            &target,
            SolveStrategy::FixedPhases {
                phi1: FRAC_PI_4,
                phi2: FRAC_PI_4,
            },
        )
        .unwrap();
        assert!((sol.gamma - Complex64::i()).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn solve_round_trips_to_target(
            w0 in 0.05f64..1.0,
            phase in -3.1f64..3.1,
            strategy_fixed in proptest::bool::ANY,
            phi1 in 0.2f64..1.35,
            phi2 in 0.2f64..1.35,
        ) {
            let a0 = c(w0, 0.0);
            let a1 = Complex64::from_polar((1.0 - w0 * w0).max(1e-6).sqrt(), phase);
            let target = QubitTarget::new(a0, a1).unwrap();
            let strategy = if strategy_fixed {
                SolveStrategy::FixedPhases { phi1, phi2 }
            } else {
                SolveStrategy::MaxProbability
            };
            let sol = solve_target(&target, strategy).unwrap();
            let state = ideal_state_10(sol.phi1, sol.phi2, sol.gamma).unwrap();
            prop_assert!((state.a0 - target.a0).norm() < 1e-12);
            prop_assert!((state.a1 - target.a1).norm() < 1e-12);
        }

        #[test]
        fn yn_fidelity_stays_in_unit_interval(
            eta in 0.01f64..1.0,
            g_abs in 0.0f64..1.45,
            g_arg in 0.0f64..3.1,
            phi1 in 0.05f64..1.5,
            phi2 in 0.05f64..1.5,
        ) {
            let gamma = Complex64::from_polar(g_abs, g_arg);
            let f = yn_fidelity(eta, gamma, phi1, phi2).unwrap();
            prop_assert!(f >= -1e-12);
            prop_assert!(f <= 1.0 + 1e-12);
            let coeffs = yn_coefficients(eta, gamma, phi1, phi2);
            prop_assert!(coeffs.schwarz_defect() <= 1e-12);
            prop_assert!(coeffs.c00 >= -1e-15);
            prop_assert!(coeffs.c11 >= -1e-15);
        }
    }
}
