//! Exact probabilities of the dark-mode events by inclusion-exclusion.

use crate::css::CssState;
use crate::error::{Error, Result};

/// Largest number of measured modes handled by the subset enumeration.
pub const MAX_EXACT_MODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct EventProbabilities {
    /// Exactly one measured mode dark.
    pub success: f64,
    /// Exactly one dark mode, and it is an H output.
    pub success_h_only: f64,
    pub all_empty: f64,
    pub none_empty: f64,
    pub multiple_empty: f64,
    /// Probability that measured mode `j` alone is dark.
    pub exactly_one: Vec<f64>,
}

/// Event probabilities for the first `measured` modes of `state`, ordered
/// `(G_0..G_{L-1}, H_0..H_{L-1})`.
///
/// `P(all of S dark)` is the squared norm after projecting `<0|` on every mode
/// in `S`; exact events follow from inclusion-exclusion over supersets.
pub fn exact_event_probabilities(state: &CssState, measured: usize) -> Result<EventProbabilities> {
    if measured > MAX_EXACT_MODES {
        return Err(Error::InvalidConfig(format!(
            "exact event probabilities support at most {MAX_EXACT_MODES} measured modes"
        )));
    }
    if measured > state.mode_count() {
        return Err(Error::InvalidMode {
            index: measured,
            modes: state.mode_count(),
        });
    }
    let norm = state.norm_sqr();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let subsets = 1usize << measured;
    let all_dark: Vec<f64> = (0..subsets)
        .map(|mask| dark_probability(state, measured, mask) / norm)
        .collect();

    // exact[E] = sum_{S >= E} (-1)^{|S \ E|} all_dark[S]
    let exact_for = |e: usize| -> f64 {
        let mut acc = 0.0;
        for (s, p) in all_dark.iter().enumerate() {
            if s & e == e {
                let sign = if (s ^ e).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                acc += sign * p;
            }
        }
        acc
    };
    let exactly_one: Vec<f64> = (0..measured).map(|j| exact_for(1 << j).max(0.0)).collect();
    let success: f64 = exactly_one.iter().sum();
    let copies = measured / 2;
    let success_h_only: f64 = exactly_one[copies..].iter().sum();
    let none_empty = exact_for(0).clamp(0.0, 1.0);
    let all_empty = all_dark[subsets - 1];
    Ok(EventProbabilities {
        success: success.min(1.0),
        success_h_only: success_h_only.min(1.0),
        all_empty,
        none_empty,
        multiple_empty: (1.0 - none_empty - success).max(0.0),
        exactly_one,
    })
}

/// Unnormalized probability that every measured mode in `mask` reads zero.
fn dark_probability(state: &CssState, measured: usize, mask: usize) -> f64 {
    let mut projected = state.clone();
    for j in (0..measured).rev() {
        if mask & (1 << j) != 0 {
            projected = projected.project_number(j, 0).expect("mode index in range");
        }
    }
    projected.norm_sqr()
}
