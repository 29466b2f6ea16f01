//! Closed forms against the truncated-Fock engine on a compact grid.
//!
//! Every analytic quantity is recomputed by propagating the three-mode state
//! numerically and conditioning on the matching detector weights; the two
//! routes share no code beyond the state itself.

use num_complex::Complex64;

use mzqubit::analytic;
use mzqubit::device::{device_output_numeric, DeviceParams};
use mzqubit::measurement::{
    condition_on_outcomes, pom_ideal_number, pom_photocount, pom_yes_no, YesNo,
};

const PHIS: [f64; 4] = [0.1, std::f64::consts::FRAC_PI_4, 0.715, 1.4];
const GAMMAS: [(f64, f64); 4] = [(0.0, 0.0), (0.3, 0.0), (0.755, 1.0471975511965976), (1.0, 0.0)];
const ETAS: [f64; 3] = [0.2, 0.6, 1.0];

fn grid() -> impl Iterator<Item = (f64, f64, Complex64, f64)> {
    PHIS.into_iter().flat_map(|phi1| {
        PHIS.into_iter().flat_map(move |phi2| {
            GAMMAS.into_iter().flat_map(move |(abs, arg)| {
                let gamma = Complex64::from_polar(abs, arg);
                ETAS.into_iter().map(move |eta| (phi1, phi2, gamma, eta))
            })
        })
    })
}

#[test]
fn ideal_probabilities_match_numeric_conditioning() {
    let mut worst: f64 = 0.0;
    for (phi1, phi2, gamma, eta) in grid() {
        let params = DeviceParams::with_auto_cutoff(phi1, phi2, gamma, eta).unwrap();
        let out = device_output_numeric(&params).unwrap();
        let b1 = pom_ideal_number(1, params.cutoff).unwrap();
        let b0 = pom_ideal_number(0, params.cutoff).unwrap();

        let p10 = condition_on_outcomes(&out, &b1, &b0).unwrap().probability;
        let p01 = condition_on_outcomes(&out, &b0, &b1).unwrap().probability;
        worst = worst.max((p10 - analytic::ideal_probability_10(phi1, phi2, gamma)).abs());
        worst = worst.max((p01 - analytic::ideal_probability_01(phi1, phi2, gamma)).abs());
    }
    assert!(worst < 1e-10, "worst absolute error {worst:e}");
}

#[test]
fn yes_no_probability_coefficients_and_fidelity_match() {
    let mut worst: f64 = 0.0;
    for (phi1, phi2, gamma, eta) in grid() {
        let params = DeviceParams::with_auto_cutoff(phi1, phi2, gamma, eta).unwrap();
        let out = device_output_numeric(&params).unwrap();
        let yes = pom_yes_no(YesNo::Yes, eta, params.cutoff).unwrap();
        let no = pom_yes_no(YesNo::No, eta, params.cutoff).unwrap();
        let cond = condition_on_outcomes(&out, &yes, &no).unwrap();

        let coeffs = analytic::yn_coefficients(eta, gamma, phi1, phi2);
        worst = worst.max((cond.probability - coeffs.normalizer).abs());
        if !cond.reliable {
            continue;
        }
        let p = cond.probability;
        worst = worst.max((p * cond.matrix.entry(0, 0).re - coeffs.c00).abs());
        worst = worst.max((p * cond.matrix.entry(1, 1).re - coeffs.c11).abs());
        worst = worst.max((p * cond.matrix.entry(0, 1) - coeffs.c01).norm());

        let target = analytic::ideal_state_10(phi1, phi2, gamma).unwrap();
        let f_numeric = cond.matrix.fidelity_with_pure(&[target.a0, target.a1]);
        let f_analytic = analytic::yn_fidelity(eta, gamma, phi1, phi2).unwrap();
        worst = worst.max((f_numeric - f_analytic).abs());
    }
    assert!(worst < 1e-10, "worst absolute error {worst:e}");
}

#[test]
fn photocounter_probability_and_fidelity_match() {
    let mut worst: f64 = 0.0;
    for (phi1, phi2, gamma, eta) in grid() {
        let params = DeviceParams::with_auto_cutoff(phi1, phi2, gamma, eta).unwrap();
        let out = device_output_numeric(&params).unwrap();
        let click1 = pom_photocount(1, eta, params.cutoff).unwrap();
        let click0 = pom_photocount(0, eta, params.cutoff).unwrap();
        let cond = condition_on_outcomes(&out, &click1, &click0).unwrap();

        let (p, _, f) = analytic::photocounter_regime(eta, gamma, phi1, phi2).unwrap();
        worst = worst.max((cond.probability - p).abs());
        if cond.reliable {
            let target = analytic::ideal_state_10(phi1, phi2, gamma).unwrap();
            let f_numeric = cond.matrix.fidelity_with_pure(&[target.a0, target.a1]);
            worst = worst.max((f_numeric - f).abs());
        }
    }
    assert!(worst < 1e-10, "worst absolute error {worst:e}");
}

#[test]
fn conditional_matrices_are_physical() {
    for (phi1, phi2, gamma, eta) in grid() {
        let params = DeviceParams::with_auto_cutoff(phi1, phi2, gamma, eta).unwrap();
        let out = device_output_numeric(&params).unwrap();
        let yes = pom_yes_no(YesNo::Yes, eta, params.cutoff).unwrap();
        let no = pom_yes_no(YesNo::No, eta, params.cutoff).unwrap();
        let cond = condition_on_outcomes(&out, &yes, &no).unwrap();
        if !cond.reliable {
            continue;
        }
        assert!(cond.matrix.hermiticity_defect() < 1e-10);
        assert!((cond.matrix.trace() - 1.0).abs() < 1e-10);
        let eigenvalues = cond.matrix.eigenvalues();
        assert!(
            eigenvalues.iter().all(|&l| l >= -1e-12),
            "negative eigenvalue at phi1={phi1}, phi2={phi2}, gamma={gamma}, eta={eta}"
        );
    }
}

#[test]
fn overlap_matches_trace_product_of_conditional_states() {
    // For ideal heralds both conditional states are pure, so
    // Tr[rho_01 rho_10] = |<psi_01|psi_10>|^2.
    for phi1 in [0.4, 0.67, 1.1] {
        for phi2 in [0.3, 0.9] {
            for gamma in [Complex64::new(0.5, 0.0), Complex64::new(0.755, 0.4)] {
                let params = DeviceParams::with_auto_cutoff(phi1, phi2, gamma, 1.0).unwrap();
                let out = device_output_numeric(&params).unwrap();
                let b1 = pom_ideal_number(1, params.cutoff).unwrap();
                let b0 = pom_ideal_number(0, params.cutoff).unwrap();
                let rho10 = condition_on_outcomes(&out, &b1, &b0).unwrap().matrix;
                let rho01 = condition_on_outcomes(&out, &b0, &b1).unwrap().matrix;
                let d = rho10.dim();
                let mut trace_product = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        trace_product += (rho01.entry(i, j) * rho10.entry(j, i)).re;
                    }
                }
                let overlap = analytic::overlap_10_01(phi1, phi2, gamma).unwrap();
                assert!(
                    (trace_product - overlap.norm_sqr()).abs() < 1e-10,
                    "phi1={phi1}, phi2={phi2}, gamma={gamma}"
                );
            }
        }
    }
}
