//! Probabilistic teleportation of symmetric coherent-state superpositions
//! through an `M`-dimensional entangled coherent state (even `M`).
//!
//! Alice holds `sum_q Q_q |alpha w^q>` (with `w = e^{-2 pi i/M}`) in mode C
//! and one arm A of the shared state; Bob holds arm B. Alice dilutes C and A
//! into `L = M/2` copies each, rotates the copies of C, combines each pair on
//! a 50/50 beamsplitter and counts photons in all `M` outputs. If exactly one
//! output is dark, Bob can rotate his mode so that every `Q_q` sits in front
//! of its own coherent component.

mod exact;
mod sampling;

pub use exact::{exact_event_probabilities, EventProbabilities, MAX_EXACT_MODES};
pub use sampling::{sample_counts, CountSampler, Sample};

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::css::{fq_closed, CoherentBranch, CssState};
use crate::error::{Error, Result};
use crate::special::compensated_sum;

/// Name of the per-trial generator, echoed in experiment metadata.
pub const RNG_NAME: &str = "ChaCha20 (seed_from_u64(seed), stream = trial index)";

/// Parameters of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportConfig {
    /// Dimension `M` of the shared state; must be even.
    pub order: usize,
    pub alpha: C64,
    /// Input-state weights `Q_q`, one per symmetric coherent state.
    pub q: Vec<C64>,
    pub seed: u64,
    pub trials: usize,
    /// Per-mode photon cap; derived from the branch amplitudes when `None`.
    pub n_cap: Option<usize>,
    /// Count only dark H outputs as successes.
    pub h_only: bool,
}

impl TeleportConfig {
    pub fn new(order: usize, alpha: C64, q: Vec<C64>) -> Self {
        Self {
            order,
            alpha,
            q,
            seed: 0,
            trials: 0,
            n_cap: None,
            h_only: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    /// Number of diluted copies, `M/2`.
    pub fn copies(&self) -> usize {
        self.order / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 || !self.order.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "order must be even and at least 2, got {}",
                self.order
            )));
        }
        if self.q.len() != self.order {
            return Err(Error::InvalidConfig(format!(
                "expected {} input weights, got {}",
                self.order,
                self.q.len()
            )));
        }
        if self.q.iter().all(|x| x.norm() == 0.0) {
            return Err(Error::InvalidConfig("input weights are all zero".into()));
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::InvalidConfig("alpha must be finite".into()));
        }
        Ok(())
    }

    /// `alpha w^q`.
    pub fn symmetric_amplitude(&self, q: usize) -> C64 {
        self.alpha * root_of_unity(q as i64, self.order)
    }
}

/// `exp(-2 pi i k / m)`.
fn root_of_unity(k: i64, m: usize) -> C64 {
    let k = k.rem_euclid(m as i64);
    C64::from_polar(1.0, -2.0 * PI * k as f64 / m as f64)
}

/// The dark output of a successful measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmptyMode {
    G(usize),
    H(usize),
}

impl EmptyMode {
    /// Position in the measured-mode ordering `(G_0..G_{L-1}, H_0..H_{L-1})`.
    pub fn index(self, copies: usize) -> usize {
        match self {
            EmptyMode::G(k) => k,
            EmptyMode::H(k) => copies + k,
        }
    }

    pub fn from_index(index: usize, copies: usize) -> Self {
        if index < copies {
            EmptyMode::G(index)
        } else {
            EmptyMode::H(index - copies)
        }
    }

    /// Shift `s` of the surviving branches, which pair Bob's `q` with input `p = q + s (mod M)`.
    ///
    /// A dark `H_m` needs `w^q + w^{p+m} = 0`, i.e. `s = L - m`; a dark `G_m`
    /// needs `w^q = w^{p+m}`, i.e. `s = -m`.
    pub fn selection_shift(self, order: usize) -> i64 {
        let copies = (order / 2) as i64;
        match self {
            EmptyMode::H(m) => copies - m as i64,
            EmptyMode::G(m) => -(m as i64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    NoEmptyMode,
    MultipleEmptyModes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Success { empty: EmptyMode, n_tot: usize },
    Failure(FailureReason),
}

impl Classification {
    pub fn is_success(&self, h_only: bool) -> bool {
        match self {
            Classification::Success { empty, .. } => !h_only || matches!(empty, EmptyMode::H(_)),
            Classification::Failure(_) => false,
        }
    }
}

/// Result of one sampled run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub counts: Vec<usize>,
    pub classification: Classification,
    /// Bob's normalized state, corrected when the run succeeded.
    pub bob_state: CssState,
    /// Probability of the observed counts.
    pub probability: f64,
    pub fidelity_vs_ideal: Option<f64>,
    pub fidelity_vs_residual_target: Option<f64>,
}

/// Aggregate statistics over many runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolStats {
    pub trials: usize,
    pub successes: usize,
    pub g_successes: usize,
    pub h_successes: usize,
    pub no_empty_failures: usize,
    pub multiple_empty_failures: usize,
    pub success_probability: f64,
    pub success_stderr: f64,
    pub mean_fidelity_ideal: Option<f64>,
    pub fidelity_ideal_stderr: Option<f64>,
    pub mean_fidelity_residual: Option<f64>,
    pub fidelity_residual_stderr: Option<f64>,
    pub exact: Option<EventProbabilities>,
}

/// `sum_q Q_q |alpha w^q>`, normalized.
pub fn ideal_target(cfg: &TeleportConfig) -> Result<CssState> {
    weighted_symmetric(cfg, |q| cfg.q[q])
}

fn weighted_symmetric<F: Fn(usize) -> C64>(cfg: &TeleportConfig, weight: F) -> Result<CssState> {
    let branches = (0..cfg.order)
        .map(|q| CoherentBranch::new(weight(q), vec![cfg.symmetric_amplitude(q)]))
        .collect();
    CssState::new(1, branches)?.prune(0.0).normalized()
}

/// Joint input with modes ordered `(C, A, B)`: the state to send in C and the
/// even-order entangled coherent state `sum_q f_q |alpha w^q>|alpha w^q>` in
/// (A, B). Both factors are normalized.
pub fn prepare_joint(cfg: &TeleportConfig) -> Result<CssState> {
    cfg.validate()?;
    let input = ideal_target(cfg)?;
    let f = fq_closed(cfg.order)?;
    let pair = CssState::new(
        2,
        (0..cfg.order)
            .map(|q| {
                let a = cfg.symmetric_amplitude(q);
                CoherentBranch::new(f.f[q], vec![a, a])
            })
            .collect(),
    )?
    .normalized()?;
    Ok(input.tensor(&pair))
}

/// Splits `mode` into `copies` equal modes: `|g> -> |g/sqrt(L)>^{(x) L}`.
pub fn dilute(state: &CssState, mode: usize, copies: usize) -> Result<CssState> {
    if copies == 0 {
        return Err(Error::InvalidConfig(
            "dilution needs at least one copy".into(),
        ));
    }
    let s = 1.0 / (copies as f64).sqrt();
    state.expand_mode(mode, copies, |g| vec![g * s; copies])
}

/// Alice's linear-optics network. Input modes `(C, A, B)`; output modes
/// `(G_0..G_{L-1}, H_0..H_{L-1}, B)` with, for the branch carrying `Q_p f_q`,
/// `G_k = alpha (w^q - w^{p+k}) / sqrt(2L)` and `H_k = alpha (w^q + w^{p+k}) / sqrt(2L)`.
pub fn alice_network(state: &CssState, cfg: &TeleportConfig) -> Result<CssState> {
    let l = cfg.copies();
    // (C_0..C_{L-1}, A, B) then (C_0..C_{L-1}, A_0..A_{L-1}, B).
    let mut s = dilute(state, 0, l)?;
    s = dilute(&s, l, l)?;
    for k in 0..l {
        s = s.phase_shift(k, -2.0 * PI * k as f64 / cfg.order as f64)?;
        // A_k + C_k lands on H_k's slot, A_k - C_k on G_k's.
        s = s.beamsplitter(l + k, k)?;
    }
    Ok(s)
}

/// Success iff exactly one measured mode is dark.
pub fn classify(counts: &[usize]) -> Classification {
    let copies = counts.len() / 2;
    let mut empty = counts.iter().enumerate().filter(|(_, &n)| n == 0);
    match (empty.next(), empty.next()) {
        (None, _) => Classification::Failure(FailureReason::NoEmptyMode),
        (Some(_), Some(_)) => Classification::Failure(FailureReason::MultipleEmptyModes),
        (Some((idx, _)), None) => Classification::Success {
            empty: EmptyMode::from_index(idx, copies),
            n_tot: counts.iter().sum(),
        },
    }
}

/// Bob's rotation `exp(-2 pi i s N / M)` for the selection shift `s` of the
/// dark mode; for a dark `H_m` this is `exp(-2 pi i N (L-m) / M)`.
pub fn bob_correct(bob: &CssState, empty: EmptyMode, order: usize) -> Result<CssState> {
    let s = empty.selection_shift(order);
    bob.phase_shift(0, -2.0 * PI * s as f64 / order as f64)
}

/// Bob's corrected state in the limit where the symmetric coherent states
/// are orthogonal: `sum_q exp(i pi (q-s)^2 / M) exp(-2 pi i q N_tot / M) Q_q |alpha w^q>`,
/// normalized. Only the `q`-dependent phases remain to be undone.
pub fn residual_target(cfg: &TeleportConfig, empty: EmptyMode, n_tot: usize) -> Result<CssState> {
    let m = cfg.order as i64;
    let s = empty.selection_shift(cfg.order);
    weighted_symmetric(cfg, |q| {
        let d = (q as i64 - s).rem_euclid(m);
        let quad = C64::from_polar(1.0, PI * ((d * d) % (2 * m)) as f64 / m as f64);
        let lin = root_of_unity(((q as u128 * n_tot as u128) % m as u128) as i64, cfg.order);
        quad * lin * cfg.q[q]
    })
}

/// `|<x|y>|^2 / (|x|^2 |y|^2)`.
pub fn fidelity(x: &CssState, y: &CssState) -> Result<f64> {
    let nx = x.norm_sqr();
    let ny = y.norm_sqr();
    if !(nx > 0.0 && ny > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(x.inner(y)?.norm_sqr() / (nx * ny))
}

/// Per-trial generator: one master seed, the trial index selects the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Everything needed to run trials of one configuration repeatedly.
#[derive(Debug, Clone)]
pub struct TrialRunner {
    cfg: TeleportConfig,
    network: CssState,
    sampler: CountSampler,
    ideal: CssState,
}

impl TrialRunner {
    pub fn new(cfg: &TeleportConfig) -> Result<Self> {
        let network = alice_network(&prepare_joint(cfg)?, cfg)?;
        let sampler = CountSampler::new(&network, cfg.order, cfg.n_cap)?;
        Ok(Self {
            cfg: cfg.clone(),
            network,
            sampler,
            ideal: ideal_target(cfg)?,
        })
    }

    /// State entering the photon counters, modes `(G.., H.., B)`.
    pub fn network(&self) -> &CssState {
        &self.network
    }

    /// Samples and post-processes trial number `trial`.
    pub fn run(&self, trial: u64) -> Result<TrialOutcome> {
        let cfg = &self.cfg;
        let mut rng = trial_rng(cfg.seed, trial);
        let sample = self.sampler.sample(&mut rng)?;
        let classification = classify(&sample.counts);
        let (bob_state, fid_ideal, fid_residual) = match classification {
            Classification::Success { empty, n_tot } => {
                let corrected = bob_correct(&sample.conditional, empty, cfg.order)?;
                let residual = residual_target(cfg, empty, n_tot)?;
                let fi = fidelity(&corrected, &self.ideal)?;
                let fr = fidelity(&corrected, &residual)?;
                (corrected, Some(fi), Some(fr))
            }
            Classification::Failure(_) => (sample.conditional, None, None),
        };
        Ok(TrialOutcome {
            counts: sample.counts,
            classification,
            bob_state,
            probability: sample.probability,
            fidelity_vs_ideal: fid_ideal,
            fidelity_vs_residual_target: fid_residual,
        })
    }
}

fn mean_and_stderr(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let var = if values.len() > 1 {
        compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1.0)
    } else {
        0.0
    };
    (Some(mean), Some((var / n).sqrt()))
}

type TrialSummary = (Classification, Option<f64>, Option<f64>);

/// Monte-Carlo run of `cfg.trials` independent trials, plus exact event
/// probabilities when the number of measured modes allows it.
/// Deterministic for a given seed regardless of thread count.
pub fn run_trials(cfg: &TeleportConfig) -> Result<ProtocolStats> {
    let runner = TrialRunner::new(cfg)?;
    let exact = if cfg.order <= MAX_EXACT_MODES {
        Some(exact_event_probabilities(runner.network(), cfg.order)?)
    } else {
        None
    };
    let outcomes: Vec<Result<TrialSummary>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            runner.run(t as u64).map(|o| {
                (
                    o.classification,
                    o.fidelity_vs_ideal,
                    o.fidelity_vs_residual_target,
                )
            })
        })
        .collect();

    let mut stats = ProtocolStats {
        trials: cfg.trials,
        successes: 0,
        g_successes: 0,
        h_successes: 0,
        no_empty_failures: 0,
        multiple_empty_failures: 0,
        success_probability: 0.0,
        success_stderr: 0.0,
        mean_fidelity_ideal: None,
        fidelity_ideal_stderr: None,
        mean_fidelity_residual: None,
        fidelity_residual_stderr: None,
        exact,
    };
    let mut fid_ideal = Vec::new();
    let mut fid_residual = Vec::new();
    for o in outcomes {
        let (class, fi, fr) = o?;
        match class {
            Classification::Success { empty, .. } => {
                match empty {
                    EmptyMode::G(_) => stats.g_successes += 1,
                    EmptyMode::H(_) => stats.h_successes += 1,
                }
                if class.is_success(cfg.h_only) {
                    stats.successes += 1;
                    fid_ideal.extend(fi);
                    fid_residual.extend(fr);
                }
            }
            Classification::Failure(FailureReason::NoEmptyMode) => stats.no_empty_failures += 1,
            Classification::Failure(FailureReason::MultipleEmptyModes) => {
                stats.multiple_empty_failures += 1
            }
        }
    }
    if cfg.trials > 0 {
        let n = cfg.trials as f64;
        let p = stats.successes as f64 / n;
        stats.success_probability = p;
        stats.success_stderr = (p * (1.0 - p) / n).sqrt();
    }
    (stats.mean_fidelity_ideal, stats.fidelity_ideal_stderr) = mean_and_stderr(&fid_ideal);
    (stats.mean_fidelity_residual, stats.fidelity_residual_stderr) = mean_and_stderr(&fid_residual);
    Ok(stats)
}

#[cfg(test)]
mod tests;
