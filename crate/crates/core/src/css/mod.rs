//! Multimode states as finite superpositions of coherent-state products.
//!
//! Each branch is `coeff * |g_0>|g_1>...|g_{k-1}>`. Linear optics maps a
//! coherent product to another coherent product, the Kerr propagator at a
//! revival time splits a branch into `M` branches, and number-state
//! projection multiplies the coefficient by `<n|g>`. Everything the
//! protocols need is therefore exact in this representation, at any
//! amplitude.

mod revival;

pub use revival::{fq_closed, fq_dft, revival_phase, Parity, RevivalCoeffs};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{coherent_fock, FockMat, FockVec, Truncated};
use crate::special::{ln_factorials, number_amplitude, number_amplitudes};

/// Componentwise tolerance under which two branches are the same product.
pub const MERGE_TOL: f64 = 1e-12;

/// Rounding slack allowed below zero for a norm computed from Gram sums.
pub const NEGATIVE_NORM_SLACK: f64 = 1e-10;

/// `<g|d>` for coherent states.
pub fn overlap_coherent(g: C64, d: C64) -> C64 {
    (-0.5 * g.norm_sqr() - 0.5 * d.norm_sqr() + g.conj() * d).exp()
}

/// Photon-count cap for a mode whose largest branch amplitude is `g`;
/// keeps the Poisson tail under 1e-10.
pub fn measurement_cap(g: f64) -> usize {
    (g * g + 8.0 * g + 10.0).ceil() as usize
}

/// One weighted coherent product.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentBranch {
    pub coeff: C64,
    pub amps: Vec<C64>,
}

impl CoherentBranch {
    pub fn new(coeff: C64, amps: Vec<C64>) -> Self {
        Self { coeff, amps }
    }

    /// Product of single-mode overlaps with another branch, coefficients excluded.
    fn product_overlap(&self, other: &CoherentBranch) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(&g, &d)| overlap_coherent(g, d))
            .product()
    }
}

/// Dense number-basis image of a state with at most two modes.
#[derive(Debug, Clone, PartialEq)]
pub enum FockImage {
    Scalar(C64),
    Single(FockVec),
    Pair(FockMat),
}

/// A superposition of coherent-state products over `mode_count` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CssState {
    mode_count: usize,
    branches: Vec<CoherentBranch>,
}

impl CssState {
    /// Builds a state, checking that every branch spans `mode_count` modes.
    pub fn new(mode_count: usize, branches: Vec<CoherentBranch>) -> Result<Self> {
        for b in &branches {
            if b.amps.len() != mode_count {
                return Err(Error::ModeMismatch {
                    left: mode_count,
                    right: b.amps.len(),
                });
            }
        }
        Ok(Self {
            mode_count,
            branches,
        })
    }

    /// Single product `|amps[0]>|amps[1]>...` with unit coefficient.
    pub fn coherent(amps: Vec<C64>) -> Self {
        Self {
            mode_count: amps.len(),
            branches: vec![CoherentBranch::new(C64::new(1.0, 0.0), amps)],
        }
    }

    pub fn vacuum(mode_count: usize) -> Self {
        Self::coherent(vec![C64::new(0.0, 0.0); mode_count])
    }

    /// Zero-mode state carrying just a complex number.
    pub fn scalar(value: C64) -> Self {
        Self {
            mode_count: 0,
            branches: vec![CoherentBranch::new(value, Vec::new())],
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn branches(&self) -> &[CoherentBranch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            Err(Error::InvalidMode {
                index: mode,
                modes: self.mode_count,
            })
        } else {
            Ok(())
        }
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.branches.iter_mut().for_each(|b| b.coeff *= factor);
        out
    }

    /// Scales to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_nan() || n <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Superposition `self + other`.
    pub fn plus(&self, other: &CssState) -> Result<Self> {
        if self.mode_count != other.mode_count {
            return Err(Error::ModeMismatch {
                left: self.mode_count,
                right: other.mode_count,
            });
        }
        let mut branches = self.branches.clone();
        branches.extend(other.branches.iter().cloned());
        Ok(Self {
            mode_count: self.mode_count,
            branches,
        })
    }

    /// Tensor product `self (x) other`, modes of `self` first.
    pub fn tensor(&self, other: &CssState) -> Self {
        let mut branches = Vec::with_capacity(self.branches.len() * other.branches.len());
        for a in &self.branches {
            for b in &other.branches {
                let mut amps = a.amps.clone();
                amps.extend_from_slice(&b.amps);
                branches.push(CoherentBranch::new(a.coeff * b.coeff, amps));
            }
        }
        Self {
            mode_count: self.mode_count + other.mode_count,
            branches,
        }
    }

    /// Reorders modes: output mode `i` is input mode `order[i]`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.mode_count];
        if order.len() != self.mode_count {
            return Err(Error::ModeMismatch {
                left: self.mode_count,
                right: order.len(),
            });
        }
        for &o in order {
            self.check_mode(o)?;
            if std::mem::replace(&mut seen[o], true) {
                return Err(Error::InvalidPartition(format!("mode {o} listed twice")));
            }
        }
        let branches = self
            .branches
            .iter()
            .map(|b| CoherentBranch::new(b.coeff, order.iter().map(|&o| b.amps[o]).collect()))
            .collect();
        Ok(Self {
            mode_count: self.mode_count,
            branches,
        })
    }

    /// Replaces `mode` by the modes returned from `split` applied to its amplitude.
    /// `split` must return `width` amplitudes for every input.
    pub fn expand_mode<F>(&self, mode: usize, width: usize, split: F) -> Result<Self>
    where
        F: Fn(C64) -> Vec<C64>,
    {
        self.check_mode(mode)?;
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let parts = split(b.amps[mode]);
                assert_eq!(parts.len(), width);
                let mut amps = Vec::with_capacity(self.mode_count - 1 + width);
                amps.extend_from_slice(&b.amps[..mode]);
                amps.extend(parts);
                amps.extend_from_slice(&b.amps[mode + 1..]);
                CoherentBranch::new(b.coeff, amps)
            })
            .collect();
        Ok(Self {
            mode_count: self.mode_count - 1 + width,
            branches,
        })
    }

    /// Kerr propagator `exp(-i (pi/M) n(n-1))` on `mode`, i.e. evolution to the
    /// revival time `pi/M`. Each branch splits into `M` branches.
    pub fn kerr_fractional(&self, mode: usize, order: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let coeffs = fq_closed(order)?;
        let m = order as f64;
        let rotations: Vec<C64> = (0..order)
            .map(|q| match coeffs.parity {
                Parity::Odd => C64::from_polar(1.0, -2.0 * PI * q as f64 / m),
                Parity::Even => C64::from_polar(1.0, PI * (1.0 - 2.0 * q as f64) / m),
            })
            .collect();
        let mut branches = Vec::with_capacity(self.branches.len() * order);
        for b in &self.branches {
            for (q, rot) in rotations.iter().enumerate() {
                let mut amps = b.amps.clone();
                amps[mode] *= rot;
                branches.push(CoherentBranch::new(b.coeff * coeffs.f[q], amps));
            }
        }
        Ok(Self {
            mode_count: self.mode_count,
            branches,
        })
    }

    /// 50/50 beamsplitter: `(g_i, g_j) -> ((g_i + g_j)/sqrt2, (g_i - g_j)/sqrt2)`.
    pub fn beamsplitter(&self, i: usize, j: usize) -> Result<Self> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::SameMode(i));
        }
        let mut out = self.clone();
        for b in &mut out.branches {
            let (gi, gj) = (b.amps[i], b.amps[j]);
            b.amps[i] = (gi + gj) * FRAC_1_SQRT_2;
            b.amps[j] = (gi - gj) * FRAC_1_SQRT_2;
        }
        Ok(out)
    }

    /// `exp(i phi n)` on `mode`: rotates that amplitude by `phi`.
    pub fn phase_shift(&self, mode: usize, phi: f64) -> Result<Self> {
        self.check_mode(mode)?;
        let rot = C64::from_polar(1.0, phi);
        let mut out = self.clone();
        for b in &mut out.branches {
            b.amps[mode] *= rot;
        }
        Ok(out)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &CssState) -> Result<C64> {
        if self.mode_count != other.mode_count {
            return Err(Error::ModeMismatch {
                left: self.mode_count,
                right: other.mode_count,
            });
        }
        let mut acc = C64::new(0.0, 0.0);
        for x in &self.branches {
            for y in &other.branches {
                acc += x.coeff.conj() * y.coeff * x.product_overlap(y);
            }
        }
        Ok(acc)
    }

    /// Squared norm from the Gram sum; rounding negatives are clamped to zero.
    pub fn norm_sqr(&self) -> f64 {
        let n = self.inner(self).expect("same mode count").re;
        if n < 0.0 {
            debug_assert!(n >= -NEGATIVE_NORM_SLACK, "norm^2 = {n}");
            0.0
        } else {
            n
        }
    }

    /// Expected total photon number, normalized.
    pub fn mean_photon_number(&self) -> Result<f64> {
        let norm = self.norm_sqr();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let mut acc = C64::new(0.0, 0.0);
        for x in &self.branches {
            for y in &self.branches {
                let number: C64 = x.amps.iter().zip(&y.amps).map(|(g, d)| g.conj() * d).sum();
                acc += x.coeff.conj() * y.coeff * x.product_overlap(y) * number;
            }
        }
        Ok(acc.re / norm)
    }

    /// Largest `|g|` over branches on `mode`.
    pub fn max_amplitude(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        Ok(self
            .branches
            .iter()
            .map(|b| b.amps[mode].norm())
            .fold(0.0, f64::max))
    }

    /// Projects `mode` onto `<n|` and removes it. The result is the
    /// unnormalized conditional state; its squared norm over the input's is
    /// the outcome probability.
    pub fn project_number(&self, mode: usize, n: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let mut amps = b.amps.clone();
                let g = amps.remove(mode);
                CoherentBranch::new(b.coeff * number_amplitude(g, n), amps)
            })
            .collect();
        Ok(Self {
            mode_count: self.mode_count - 1,
            branches,
        })
    }

    /// Photon-number distribution of `mode` for `n = 0..=cap`, normalized by
    /// the state's norm. Missing mass is the tail above `cap`.
    pub fn number_marginal(&self, mode: usize, cap: usize) -> Result<Vec<f64>> {
        self.check_mode(mode)?;
        let norm = self.norm_sqr();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let k = self.branches.len();
        // Gram weights of the remaining modes, coefficients included.
        let mut rest = vec![C64::new(0.0, 0.0); k * k];
        for (b, x) in self.branches.iter().enumerate() {
            for (c, y) in self.branches.iter().enumerate() {
                let ov: C64 = x
                    .amps
                    .iter()
                    .zip(&y.amps)
                    .enumerate()
                    .filter(|(m, _)| *m != mode)
                    .map(|(_, (&g, &d))| overlap_coherent(g, d))
                    .product();
                rest[b * k + c] = x.coeff.conj() * y.coeff * ov;
            }
        }
        let lf = ln_factorials(cap);
        let amps: Vec<Vec<C64>> = self
            .branches
            .iter()
            .map(|b| number_amplitudes(b.amps[mode], cap, &lf))
            .collect();
        let probs = (0..=cap)
            .map(|n| {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..k {
                    let ab = amps[b][n].conj();
                    if ab == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for c in 0..k {
                        acc += rest[b * k + c] * ab * amps[c][n];
                    }
                }
                (acc.re / norm).max(0.0)
            })
            .collect();
        Ok(probs)
    }

    /// Dense number-basis image; `cutoffs` has one entry per mode.
    pub fn to_fock(&self, cutoffs: &[usize]) -> Result<Truncated<FockImage>> {
        if self.mode_count > 2 {
            return Err(Error::TooManyModes(self.mode_count));
        }
        if cutoffs.len() != self.mode_count {
            return Err(Error::ModeMismatch {
                left: self.mode_count,
                right: cutoffs.len(),
            });
        }
        let mut leakage = 0.0f64;
        let image = match self.mode_count {
            0 => FockImage::Scalar(self.branches.iter().map(|b| b.coeff).sum()),
            1 => {
                let mut amps = vec![C64::new(0.0, 0.0); cutoffs[0] + 1];
                for b in &self.branches {
                    let t = coherent_fock(b.amps[0], cutoffs[0]);
                    leakage = leakage.max(t.leakage);
                    for (slot, a) in amps.iter_mut().zip(&t.value.amps) {
                        *slot += b.coeff * a;
                    }
                }
                FockImage::Single(FockVec::new(amps))
            }
            _ => {
                let mut out = FockMat::zeros(cutoffs[0], cutoffs[1]);
                for b in &self.branches {
                    let ta = coherent_fock(b.amps[0], cutoffs[0]);
                    let tb = coherent_fock(b.amps[1], cutoffs[1]);
                    leakage = leakage.max(1.0 - (1.0 - ta.leakage) * (1.0 - tb.leakage));
                    let prod = FockMat::product(&ta.value, &tb.value);
                    out.amps += prod.amps * b.coeff;
                }
                FockImage::Pair(out)
            }
        };
        Ok(Truncated {
            value: image,
            leakage,
        })
    }

    /// Merges branches whose amplitudes agree within [`MERGE_TOL`] and drops
    /// branches whose coefficient magnitude is below `tol` (exact zeros are
    /// always dropped).
    pub fn prune(&self, tol: f64) -> Self {
        let mut merged: Vec<CoherentBranch> = Vec::with_capacity(self.branches.len());
        for b in &self.branches {
            let same = merged.iter_mut().find(|m| {
                m.amps
                    .iter()
                    .zip(&b.amps)
                    .all(|(x, y)| (x - y).norm() <= MERGE_TOL)
            });
            match same {
                Some(m) => m.coeff += b.coeff,
                None => merged.push(b.clone()),
            }
        }
        merged.retain(|b| b.coeff != C64::new(0.0, 0.0) && b.coeff.norm() >= tol);
        Self {
            mode_count: self.mode_count,
            branches: merged,
        }
    }
}
