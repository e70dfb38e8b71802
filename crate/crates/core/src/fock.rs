//! Truncated photon-number-basis representation of one and two bosonic modes.
//!
//! This backend is exact up to the cutoff and is the reference against which
//! the coherent-branch backend is checked. Arbitrary Kerr times are only
//! available here.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::special::ln_factorials;

/// Leakage tolerance used by [`default_cutoff`].
pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-12;

/// Dense Hermitian matrix on the number basis.
pub type HermitianMatrix = DMatrix<C64>;

/// Cutoff that keeps the Poisson tail of `|beta|^2` below 1e-12 for
/// `|beta|^2 <= 16`.
pub fn default_cutoff(mean_photons: f64) -> usize {
    (mean_photons + 10.0 * mean_photons.max(1.0).sqrt() + 20.0).ceil() as usize
}

/// Dimensionless Kerr interaction time; the medium's rate is folded in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrParams {
    pub tau: f64,
}

impl KerrParams {
    pub fn new(tau: f64) -> Self {
        debug_assert!(tau.is_finite());
        Self { tau }
    }

    /// Fractional revival time `pi / order`.
    pub fn revival(order: usize) -> Self {
        Self::new(std::f64::consts::PI / order as f64)
    }
}

/// A value together with the probability mass lost to truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    pub leakage: f64,
}

/// Whether a truncated expansion is usable at a given tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationStatus {
    Ok,
    Warning { leakage: f64 },
}

impl<T> Truncated<T> {
    pub fn status(&self, tol: f64) -> TruncationStatus {
        if self.leakage <= tol {
            TruncationStatus::Ok
        } else {
            TruncationStatus::Warning {
                leakage: self.leakage,
            }
        }
    }

    pub fn into_inner(self) -> T {
        self.value
    }
}

/// Single-mode amplitude vector indexed by photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVec {
    pub amps: Vec<C64>,
}

impl FockVec {
    pub fn new(amps: Vec<C64>) -> Self {
        assert!(
            !amps.is_empty(),
            "a Fock vector needs at least the vacuum entry"
        );
        Self { amps }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
        amps[0] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn number(n: usize, cutoff: usize) -> Self {
        assert!(n <= cutoff);
        let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
        amps[n] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`; the shorter vector is zero-padded.
    pub fn inner(&self, other: &FockVec) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &FockVec) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }
}

/// Two-mode amplitude matrix indexed by `(n_a, n_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMat {
    pub amps: DMatrix<C64>,
}

impl FockMat {
    pub fn new(amps: DMatrix<C64>) -> Self {
        Self { amps }
    }

    pub fn zeros(cutoff_a: usize, cutoff_b: usize) -> Self {
        Self {
            amps: DMatrix::zeros(cutoff_a + 1, cutoff_b + 1),
        }
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        (self.amps.nrows() - 1, self.amps.ncols() - 1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>` over the common index range.
    pub fn inner(&self, other: &FockMat) -> C64 {
        let rows = self.amps.nrows().min(other.amps.nrows());
        let cols = self.amps.ncols().min(other.amps.ncols());
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..cols {
            for i in 0..rows {
                acc += self.amps[(i, j)].conj() * other.amps[(i, j)];
            }
        }
        acc
    }

    pub fn fidelity(&self, other: &FockMat) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }

    /// Product state `|a>|b>`.
    pub fn product(a: &FockVec, b: &FockVec) -> Self {
        let amps = DMatrix::from_fn(a.amps.len(), b.amps.len(), |i, j| a.amps[i] * b.amps[j]);
        Self { amps }
    }
}

/// Coherent state `|beta>` expanded up to `cutoff` photons.
pub fn coherent_fock(beta: C64, cutoff: usize) -> Truncated<FockVec> {
    let mut amps = Vec::with_capacity(cutoff + 1);
    amps.push(C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0));
    for n in 1..=cutoff {
        let prev = amps[n - 1];
        amps.push(prev * beta / (n as f64).sqrt());
    }
    let state = FockVec { amps };
    let leakage = (1.0 - state.norm_sqr()).max(0.0);
    Truncated {
        value: state,
        leakage,
    }
}

/// Applies `exp(-i tau n(n-1))` to every number component.
pub fn kerr_evolve(state: &FockVec, p: KerrParams) -> FockVec {
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let n = n as f64;
            a * C64::from_polar(1.0, -p.tau * n * (n - 1.0))
        })
        .collect();
    FockVec { amps }
}

/// 50/50 beamsplitter acting on `state (x) |0>`.
///
/// `|n>|0> -> 2^{-n/2} sum_k sqrt(C(n,k)) |k>|n-k>`, so that a coherent input
/// `|beta>|0>` leaves as `|beta/sqrt2>|beta/sqrt2>`.
pub fn split_with_vacuum(state: &FockVec) -> FockMat {
    let cutoff = state.cutoff();
    let lf = ln_factorials(cutoff);
    let mut out = FockMat::zeros(cutoff, cutoff);
    let ln_half = 0.5f64.ln();
    for (n, &a) in state.amps.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        for k in 0..=n {
            let ln_c = 0.5 * (lf[n] - lf[k] - lf[n - k]) + 0.5 * n as f64 * ln_half;
            out.amps[(k, n - k)] += a * ln_c.exp();
        }
    }
    out
}

/// Reduced density matrix of mode A, normalized to unit trace.
pub fn reduced_density_a(state: &FockMat) -> Result<HermitianMatrix> {
    let norm = state.norm_sqr();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let a = &state.amps;
    let mut rho = a * a.adjoint();
    rho.unscale_mut(norm);
    // Symmetrize away rounding so downstream Hermitian solvers see exact symmetry.
    let herm = (&rho + rho.adjoint()).scale(0.5);
    Ok(herm)
}

/// Distribution of `n_a + n_b`, normalized.
pub fn total_number_distribution(state: &FockMat) -> Vec<f64> {
    let (ca, cb) = state.cutoffs();
    let mut dist = vec![0.0; ca + cb + 1];
    for j in 0..=cb {
        for i in 0..=ca {
            dist[i + j] += state.amps[(i, j)].norm_sqr();
        }
    }
    let norm: f64 = dist.iter().sum();
    if norm > 0.0 {
        dist.iter_mut().for_each(|p| *p /= norm);
    }
    dist
}

/// Photon-number distribution of a single mode, normalized.
pub fn number_distribution(state: &FockVec) -> Vec<f64> {
    let norm = state.norm_sqr();
    state.amps.iter().map(|a| a.norm_sqr() / norm).collect()
}

/// `|beta>|0>` evolved by Kerr for `tau` then split: the two-mode output of
/// the full interaction at an arbitrary time.
pub fn evolve_and_split(beta: C64, p: KerrParams, cutoff: usize) -> Truncated<FockMat> {
    let input = coherent_fock(beta, cutoff);
    let mat = split_with_vacuum(&kerr_evolve(&input.value, p));
    Truncated {
        value: mat,
        leakage: input.leakage,
    }
}
