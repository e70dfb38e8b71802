//! Chain-rule sampling of photon counts on the measured modes.
//!
//! Modes are measured in order. At step `j` the outcome distribution is
//! `P(n) = sum_{b,c} conj(c_b <n|g_bj>) c_c <n|g_cj> S_j(b,c)`, where
//! `S_j` is the product of the coherent overlaps of the modes not yet
//! measured. The overlaps and number amplitudes depend only on the network
//! state, so [`CountSampler`] tabulates them once and each draw only updates
//! branch coefficients.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::css::{measurement_cap, overlap_coherent, CoherentBranch, CssState};
use crate::error::{Error, Result};
use crate::special::{ln_factorials, number_amplitudes};

/// Largest tolerated probability mass above the photon cap.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Sampled counts and the state left on the unmeasured modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub counts: Vec<usize>,
    /// Conditional state of the remaining modes, normalized.
    pub conditional: CssState,
    /// Joint probability of `counts`.
    pub probability: f64,
}

impl Sample {
    /// Conditional state scaled so that its squared norm is the outcome probability.
    pub fn unnormalized(&self) -> CssState {
        self.conditional
            .scaled(C64::new(self.probability.sqrt(), 0.0))
    }
}

/// Precomputed tables for repeated sampling from one state.
#[derive(Debug, Clone)]
pub struct CountSampler {
    branches: Vec<CoherentBranch>,
    measured: usize,
    caps: Vec<usize>,
    /// `suffix[j][b*k + c]`: overlap product over modes `j+1..`.
    suffix: Vec<Vec<C64>>,
    /// `amps[j][n*k + b] = <n|g_bj>`.
    amps: Vec<Vec<C64>>,
}

impl CountSampler {
    /// Prepares to sample the first `measured` modes of `state`. The photon cap
    /// per mode is `n_cap` or, by default, derived from the largest branch
    /// amplitude on that mode.
    pub fn new(state: &CssState, measured: usize, n_cap: Option<usize>) -> Result<Self> {
        let modes = state.mode_count();
        if measured > modes {
            return Err(Error::InvalidMode {
                index: measured,
                modes,
            });
        }
        let state = state.prune(0.0).normalized()?;
        let branches = state.branches().to_vec();
        let k = branches.len();

        let caps = (0..measured)
            .map(|j| {
                Ok(match n_cap {
                    Some(c) => c,
                    None => measurement_cap(state.max_amplitude(j)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let lf = ln_factorials(caps.iter().copied().max().unwrap_or(0));
        let amps = (0..measured)
            .map(|j| {
                let per_branch: Vec<Vec<C64>> = branches
                    .iter()
                    .map(|b| number_amplitudes(b.amps[j], caps[j], &lf))
                    .collect();
                (0..=caps[j])
                    .flat_map(|n| per_branch.iter().map(move |a| a[n]))
                    .collect()
            })
            .collect();

        let mut suffix = vec![vec![C64::new(1.0, 0.0); k * k]; measured];
        let mut running = vec![C64::new(1.0, 0.0); k * k];
        for m in (0..modes).rev() {
            if m < measured {
                suffix[m] = running.clone();
            }
            for (b, x) in branches.iter().enumerate() {
                for (c, y) in branches.iter().enumerate() {
                    running[b * k + c] *= overlap_coherent(x.amps[m], y.amps[m]);
                }
            }
        }
        Ok(Self {
            branches,
            measured,
            caps,
            suffix,
            amps,
        })
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sample> {
        let k = self.branches.len();
        let mut coeffs: Vec<C64> = self.branches.iter().map(|b| b.coeff).collect();
        let mut counts = Vec::with_capacity(self.measured);
        let mut probability = 1.0;
        let mut probs = Vec::new();
        let zero = C64::new(0.0, 0.0);
        let mut w = vec![zero; k];
        for j in 0..self.measured {
            let cap = self.caps[j];
            let s = &self.suffix[j];
            let amps = &self.amps[j];
            let live: Vec<usize> = (0..k).filter(|&b| coeffs[b] != zero).collect();
            probs.clear();
            for n in 0..=cap {
                let row_amps = &amps[n * k..(n + 1) * k];
                for &b in &live {
                    w[b] = coeffs[b] * row_amps[b];
                }
                // Hermitian form w^H S w: diagonal plus twice the upper triangle.
                let mut p = 0.0;
                for (i, &b) in live.iter().enumerate() {
                    let wb = w[b];
                    if wb == zero {
                        continue;
                    }
                    let row = &s[b * k..(b + 1) * k];
                    p += wb.norm_sqr() * row[b].re;
                    let mut upper = zero;
                    for &c in &live[i + 1..] {
                        upper += row[c] * w[c];
                    }
                    p += 2.0 * (wb.conj() * upper).re;
                }
                probs.push(p.max(0.0));
            }
            let total: f64 = probs.iter().sum();
            let residual = 1.0 - total;
            if residual > RESIDUAL_TOL {
                return Err(Error::CutoffTooSmall { cap, residual });
            }
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut n = cap;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    n = i;
                    break;
                }
            }
            while probs[n] == 0.0 && n > 0 {
                n -= 1;
            }
            let p = probs[n];
            counts.push(n);
            probability *= p;
            let rescale = 1.0 / p.sqrt();
            for (b, c) in coeffs.iter_mut().enumerate() {
                *c *= amps[n * k + b] * rescale;
            }
        }
        let remaining = self
            .branches
            .iter()
            .zip(&coeffs)
            .map(|(b, &c)| CoherentBranch::new(c, b.amps[self.measured..].to_vec()))
            .collect();
        let modes = self.branches.first().map_or(0, |b| b.amps.len()) - self.measured;
        let conditional = CssState::new(modes, remaining)?.prune(0.0).normalized()?;
        Ok(Sample {
            counts,
            conditional,
            probability,
        })
    }
}

/// Draws counts for the first `measured` modes of `state` from their exact
/// joint distribution, one mode at a time conditioned on earlier outcomes.
pub fn sample_counts<R: Rng + ?Sized>(
    state: &CssState,
    measured: usize,
    n_cap: Option<usize>,
    rng: &mut R,
) -> Result<Sample> {
    CountSampler::new(state, measured, n_cap)?.sample(rng)
}
