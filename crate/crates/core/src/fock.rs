//! Truncated three-mode Fock-space states and the linear-optics primitives
//! acting on them.
//!
//! States are dense rank-3 tensors of complex amplitudes indexed by
//! `(n_a, n_b, n_c)` with every index running `0..=n_max`. At the cutoffs
//! used here (`n_max <= 25`) a state holds at most ~17k amplitudes, so no
//! sparsity machinery is warranted.
//!
//! The two-mode mixer `exp{i phi (i^dag j + j^dag i)}` is applied exactly on
//! each total-photon-number block: the block generator is a real symmetric
//! tridiagonal matrix whose eigenbasis is computed once per block size and
//! cached, making each application a pair of small dense mat-vecs and a
//! diagonal phase. Blocks that stick out past the cutoff are transformed in
//! their full dimension and re-projected; the discarded weight is bounded by
//! the coherent-tail tolerance that sized the cutoff.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::Error;
use crate::linalg;
use crate::tol;
use crate::Result;

/// Highest photon number retained per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockCutoff {
    n_max: usize,
}

impl FockCutoff {
    /// Default cutoff: holds coherent amplitudes up to |z| = 1 below the
    /// tail tolerance with margin.
    pub const DEFAULT_N_MAX: usize = 15;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidCutoff(n_max));
        }
        Ok(FockCutoff { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of a single mode, `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Weight of the discarded Poisson tail `sum_{n > n_max} e^{-|z|^2} |z|^{2n} / n!`.
    pub fn coherent_tail_weight(z_abs: f64, n_max: usize) -> f64 {
        let x = z_abs * z_abs;
        if x == 0.0 {
            return 0.0;
        }
        let mut term = (-x).exp();
        let mut kept = term;
        for n in 1..=n_max {
            term *= x / n as f64;
            kept += term;
        }
        (1.0 - kept).max(0.0)
    }

    /// Smallest cutoff whose coherent tail at `|z|` is below `tail_tol`.
    pub fn required_n_max(z_abs: f64, tail_tol: f64) -> usize {
        let mut n_max = 1;
        while Self::coherent_tail_weight(z_abs, n_max) >= tail_tol {
            n_max += 1;
            if n_max > 10_000 {
                break;
            }
        }
        n_max
    }

    /// Cutoff sized for a run whose largest coherent amplitude is `z_abs`,
    /// never smaller than [`FockCutoff::DEFAULT_N_MAX`].
    ///
    /// Both the truncated Poisson tail and the weight one creation operator
    /// pushes past the top level, `(n_max + 1) p_{n_max}`, are kept below the
    /// tail tolerance, so coherent construction and the branch expansion are
    /// admissible at the returned cutoff.
    pub fn for_amplitude(z_abs: f64) -> Self {
        let x = z_abs * z_abs;
        let mut n_max = Self::required_n_max(z_abs, tol::TAIL);
        loop {
            // p_n = e^{-x} x^n / n!
            let mut p_top = (-x).exp();
            for n in 1..=n_max {
                p_top *= x / n as f64;
            }
            if (n_max as f64 + 1.0) * p_top < tol::TAIL || n_max > 10_000 {
                break;
            }
            n_max += 1;
        }
        FockCutoff {
            n_max: n_max.max(Self::DEFAULT_N_MAX),
        }
    }

    /// Check that `|z|` fits under this cutoff within the tail tolerance.
    pub fn admit(&self, z_abs: f64) -> Result<()> {
        let tail = Self::coherent_tail_weight(z_abs, self.n_max);
        if tail >= tol::TAIL {
            return Err(Error::TailToleranceExceeded {
                z_abs,
                n_max: self.n_max,
                tail,
                limit: tol::TAIL,
                required: Self::required_n_max(z_abs, tol::TAIL),
            });
        }
        Ok(())
    }
}

/// The three optical modes of the cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    fn axis(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 1,
            Mode::C => 2,
        }
    }
}

/// Single-mode coherent amplitudes in the number basis, renormalized after
/// truncation. `tail_defect` is the pre-normalization weight lost to the
/// cutoff, kept for diagnostics.
#[derive(Debug, Clone)]
pub struct CoherentAmplitudes {
    pub amplitudes: Vec<Complex64>,
    pub tail_defect: f64,
}

/// Amplitudes `e^{-|z|^2/2} z^n / sqrt(n!)` for `n = 0..=n_max`, renormalized.
///
/// Rejects amplitudes whose discarded tail exceeds the tail tolerance, with a
/// hint for the cutoff that would accommodate them.
pub fn coherent_state(z: Complex64, cutoff: FockCutoff) -> Result<CoherentAmplitudes> {
    cutoff.admit(z.norm())?;
    let dim = cutoff.dim();
    let mut amps = Vec::with_capacity(dim);
    let mut current = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    amps.push(current);
    for n in 1..dim {
        current *= z / (n as f64).sqrt();
        amps.push(current);
    }
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let tail_defect = (1.0 - norm_sqr).max(0.0);
    let scale = 1.0 / norm_sqr.sqrt();
    for a in amps.iter_mut() {
        *a *= scale;
    }
    Ok(CoherentAmplitudes {
        amplitudes: amps,
        tail_defect,
    })
}

/// Pure three-mode state on the truncated Fock lattice.
///
/// Amplitudes are stored row-major over `(n_a, n_b, n_c)`. States returned by
/// the unitary primitives stay normalized up to the unitarity tolerance;
/// [`MultiModeState::apply_creation`] is the one deliberately unnormalized
/// operation.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeState {
    amps: Vec<Complex64>,
    cutoff: FockCutoff,
}

impl MultiModeState {
    /// Vacuum in all three modes.
    pub fn vacuum(cutoff: FockCutoff) -> Self {
        let dim = cutoff.dim();
        let mut amps = vec![Complex64::ZERO; dim * dim * dim];
        amps[0] = Complex64::ONE;
        MultiModeState { amps, cutoff }
    }

    /// Product state from three single-mode amplitude vectors.
    pub fn from_product(
        a: &[Complex64],
        b: &[Complex64],
        c: &[Complex64],
        cutoff: FockCutoff,
    ) -> Result<Self> {
        let dim = cutoff.dim();
        for v in [a, b, c] {
            if v.len() != dim {
                return Err(Error::ShapeMismatch(v.len(), dim));
            }
        }
        let mut amps = vec![Complex64::ZERO; dim * dim * dim];
        for (na, &xa) in a.iter().enumerate() {
            if xa == Complex64::ZERO {
                continue;
            }
            for (nb, &xb) in b.iter().enumerate() {
                let ab = xa * xb;
                if ab == Complex64::ZERO {
                    continue;
                }
                for (nc, &xc) in c.iter().enumerate() {
                    amps[(na * dim + nb) * dim + nc] = ab * xc;
                }
            }
        }
        Self::from_amplitudes(amps, cutoff)
    }

    /// Wrap a raw amplitude tensor. Zero-norm input is rejected.
    pub fn from_amplitudes(amps: Vec<Complex64>, cutoff: FockCutoff) -> Result<Self> {
        let dim = cutoff.dim();
        if amps.len() != dim * dim * dim {
            return Err(Error::ShapeMismatch(amps.len(), dim * dim * dim));
        }
        let state = MultiModeState { amps, cutoff };
        if state.norm_sqr() <= 0.0 {
            return Err(Error::ZeroNormState);
        }
        Ok(state)
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff.dim()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize, n_c: usize) -> Complex64 {
        let d = self.dim();
        self.amps[(n_a * d + n_b) * d + n_c]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescale to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::ZeroNormState);
        }
        let scale = 1.0 / n.sqrt();
        for a in self.amps.iter_mut() {
            *a *= scale;
        }
        Ok(self)
    }

    fn strides(&self) -> [usize; 3] {
        let d = self.dim();
        [d * d, d, 1]
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &MultiModeState) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::ShapeMismatch(self.amps.len(), other.amps.len()));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Multiply the amplitude at photon number `n` in `mode` by `e^{i n theta}`.
    pub fn apply_phase(&self, mode: Mode, theta: f64) -> MultiModeState {
        let d = self.dim();
        let stride = self.strides()[mode.axis()];
        let phases: Vec<Complex64> = (0..d)
            .map(|n| Complex64::from_polar(1.0, theta * n as f64))
            .collect();
        let mut out = self.clone();
        for (idx, amp) in out.amps.iter_mut().enumerate() {
            let n = (idx / stride) % d;
            *amp *= phases[n];
        }
        out
    }

    /// Apply the creation operator on `mode`: amplitude at `n` becomes
    /// `sqrt(n)` times the amplitude at `n - 1`.
    ///
    /// The result is intentionally unnormalized; the squared norm is returned
    /// alongside. Weight that would be pushed past the cutoff must stay below
    /// the tail tolerance.
    pub fn apply_creation(&self, mode: Mode) -> Result<(MultiModeState, f64)> {
        let d = self.dim();
        let stride = self.strides()[mode.axis()];
        let n_max = self.cutoff.n_max();

        // Weight at the top level would land outside the lattice.
        let mut lost = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            if (idx / stride) % d == n_max {
                lost += (n_max as f64 + 1.0) * amp.norm_sqr();
            }
        }
        if lost >= tol::TAIL {
            return Err(Error::CutoffOverflow {
                n_max,
                weight: lost,
            });
        }

        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for (idx, &amp) in self.amps.iter().enumerate() {
            if amp == Complex64::ZERO {
                continue;
            }
            let n = (idx / stride) % d;
            if n < n_max {
                out[idx + stride] = (n as f64 + 1.0).sqrt() * amp;
            }
        }
        let state = MultiModeState {
            amps: out,
            cutoff: self.cutoff,
        };
        let norm_sqr = state.norm_sqr();
        Ok((state, norm_sqr))
    }

    /// Apply `exp{i phi (i^dag j + j^dag i)}` on the mode pair `(mode_i, mode_j)`.
    ///
    /// Exact per total-photon-number block; see the module docs for the
    /// treatment of blocks that extend past the cutoff.
    #[allow(clippy::needless_range_loop)] // windowed block indexing
    pub fn apply_two_mode_mixer(&self, mode_i: Mode, mode_j: Mode, phi: f64) -> Result<MultiModeState> {
        if mode_i == mode_j {
            return Err(Error::IdenticalModes);
        }
        let d = self.dim();
        let n_max = self.cutoff.n_max();
        let strides = self.strides();
        let stride_i = strides[mode_i.axis()];
        let stride_j = strides[mode_j.axis()];
        let spectator = match (mode_i, mode_j) {
            (Mode::A, Mode::B) | (Mode::B, Mode::A) => Mode::C,
            (Mode::A, Mode::C) | (Mode::C, Mode::A) => Mode::B,
            _ => Mode::A,
        };
        let stride_s = strides[spectator.axis()];

        let mut out = vec![Complex64::ZERO; self.amps.len()];
        let mut gather: Vec<Complex64> = Vec::new();
        let mut rotated: Vec<Complex64> = Vec::new();

        for total in 0..=(2 * n_max) {
            let lo = total.saturating_sub(n_max);
            let hi = total.min(n_max);
            if lo > hi {
                continue;
            }
            let basis = block_basis(total);
            let block_dim = total + 1;
            let phase: Vec<Complex64> = basis
                .eigenvalues
                .iter()
                .map(|&lambda| Complex64::from_polar(1.0, phi * lambda))
                .collect();

            gather.clear();
            gather.resize(block_dim, Complex64::ZERO);
            rotated.clear();
            rotated.resize(block_dim, Complex64::ZERO);

            for s in 0..d {
                let base = s * stride_s;
                // v[k] = amplitude at (n_i = k, n_j = total - k); entries
                // outside [lo, hi] belong to levels past the cutoff.
                let mut occupied = false;
                for k in lo..=hi {
                    let amp = self.amps[base + k * stride_i + (total - k) * stride_j];
                    gather[k] = amp;
                    occupied |= amp != Complex64::ZERO;
                }
                if !occupied {
                    continue;
                }
                // u = V^T v (V real, columns are eigenvectors)
                for m in 0..block_dim {
                    let mut acc = Complex64::ZERO;
                    for k in lo..=hi {
                        acc += basis.vectors[k * block_dim + m] * gather[k];
                    }
                    rotated[m] = acc * phase[m];
                }
                // v' = V u, kept only on the in-cutoff rows
                for k in lo..=hi {
                    let mut acc = Complex64::ZERO;
                    for m in 0..block_dim {
                        acc += basis.vectors[k * block_dim + m] * rotated[m];
                    }
                    out[base + k * stride_i + (total - k) * stride_j] = acc;
                }
            }
        }

        Ok(MultiModeState {
            amps: out,
            cutoff: self.cutoff,
        })
    }

    /// Mean total photon number `<n_a + n_b + n_c>` of a normalized state.
    pub fn mean_total_photon_number(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            let w = amp.norm_sqr();
            if w == 0.0 {
                continue;
            }
            let nc = idx % d;
            let nb = (idx / d) % d;
            let na = idx / (d * d);
            acc += (na + nb + nc) as f64 * w;
        }
        acc
    }

    /// Photon-number distribution of one mode (marginal populations).
    pub fn mode_populations(&self, mode: Mode) -> Vec<f64> {
        let d = self.dim();
        let stride = self.strides()[mode.axis()];
        let mut pop = vec![0.0; d];
        for (idx, amp) in self.amps.iter().enumerate() {
            pop[(idx / stride) % d] += amp.norm_sqr();
        }
        pop
    }

    /// Condition on diagonal POM weights applied to modes `b` and `c`.
    ///
    /// Returns the event probability `Tr[rho Pi_b x Pi_c]` and the normalized
    /// conditional density matrix of mode `a`. A probability below the floor
    /// flags the result as unreliable instead of failing.
    #[allow(clippy::needless_range_loop)]
    pub fn conditioned_reduction(
        &self,
        weights_b: &[f64],
        weights_c: &[f64],
    ) -> Result<ConditionalState> {
        let d = self.dim();
        for w in [weights_b, weights_c] {
            if w.len() != d {
                return Err(Error::WeightLengthMismatch {
                    got: w.len(),
                    expected: d,
                });
            }
            if w.iter().any(|&x| !(-1e-12..=1.0 + 1e-12).contains(&x)) {
                return Err(Error::InvalidWeights);
            }
        }

        let mut rho = vec![Complex64::ZERO; d * d];
        for na in 0..d {
            for na2 in na..d {
                let mut acc = Complex64::ZERO;
                for nb in 0..d {
                    let wb = weights_b[nb];
                    if wb == 0.0 {
                        continue;
                    }
                    let row1 = (na * d + nb) * d;
                    let row2 = (na2 * d + nb) * d;
                    let mut inner = Complex64::ZERO;
                    for nc in 0..d {
                        let wc = weights_c[nc];
                        if wc == 0.0 {
                            continue;
                        }
                        inner += self.amps[row1 + nc] * self.amps[row2 + nc].conj() * wc;
                    }
                    acc += wb * inner;
                }
                rho[na * d + na2] = acc;
                rho[na2 * d + na] = acc.conj();
            }
        }

        let probability: f64 = (0..d).map(|i| rho[i * d + i].re).sum();
        let reliable = probability > tol::PROBABILITY_FLOOR;
        if reliable {
            let scale = 1.0 / probability;
            for e in rho.iter_mut() {
                *e *= scale;
            }
        }
        Ok(ConditionalState {
            probability,
            matrix: DensityMatrix { entries: rho, dim: d },
            reliable,
        })
    }
}

/// Result of conditioning on a detector outcome pair.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    /// Event probability.
    pub probability: f64,
    /// Conditional density matrix of mode `a` (normalized when `reliable`).
    pub matrix: DensityMatrix,
    /// False when the probability fell below the configured floor.
    pub reliable: bool,
}

/// Single-mode density matrix in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Vec<Complex64>,
    dim: usize,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }

    /// Largest deviation from Hermiticity, `max |rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.dim, &self.entries)
    }

    /// Overlap `<psi|rho|psi>` with a pure state given by its amplitudes.
    ///
    /// `psi` may be shorter than the matrix dimension; missing components are
    /// treated as zero.
    pub fn fidelity_with_pure(&self, psi: &[Complex64]) -> f64 {
        let n = psi.len().min(self.dim);
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += psi[i].conj() * self.entry(i, j) * psi[j];
            }
        }
        acc.re
    }
}

struct BlockBasis {
    eigenvalues: Vec<f64>,
    /// Row-major `(N+1) x (N+1)`; column `m` is the eigenvector of `eigenvalues[m]`.
    vectors: Vec<f64>,
}

fn block_basis(total: usize) -> Arc<BlockBasis> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BlockBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(total)
        .or_insert_with(|| {
            let n = total + 1;
            let mut h = vec![0.0f64; n * n];
            for k in 0..total {
                // <k+1, N-k-1| (i^dag j + j^dag i) |k, N-k>
                let c = (((k + 1) * (total - k)) as f64).sqrt();
                h[k * n + k + 1] = c;
                h[(k + 1) * n + k] = c;
            }
            let (eigenvalues, vectors) = linalg::symmetric_eigen(n, &h);
            Arc::new(BlockBasis {
                eigenvalues,
                vectors,
            })
        })
        .clone()
}
