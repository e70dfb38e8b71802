//! Reduced-state spectra and von Neumann entropy of bipartite states.
//!
//! For a coherent-branch state `sum_q c_q |u_q>|v_q>` the reduced state on
//! side A lives in the span of the (nonorthogonal) `|u_q>`. In that basis it
//! acts as `T = C U` with `U_pk = <u_p|u_k>` and `C_qp = c_q c_p* <v_p|v_q>`.
//! `C` is Hermitian and `U` positive semidefinite, so `T` is similar to
//! `U^{1/2} C U^{1/2}`, which is diagonalized instead.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::css::{overlap_coherent, CssState};
use crate::error::{Error, Result};
use crate::fock::{reduced_density_a, FockMat};
use crate::table::{SweepTable, Value};

/// Eigenvalues in `[-EIGEN_CLIP, 0)` are rounding noise and set to zero.
pub const EIGEN_CLIP: f64 = 1e-9;

/// Spectrum of a reduced state, descending, with its entropy in ebits.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub entropy_ebits: f64,
}

impl SpectrumResult {
    fn from_raw(mut raw: Vec<f64>) -> Result<Self> {
        for v in &mut raw {
            if *v < -EIGEN_CLIP {
                return Err(Error::ComplexEigenvalue(*v));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total: f64 = raw.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        raw.iter_mut().for_each(|v| *v /= total);
        raw.sort_by(|a, b| b.total_cmp(a));
        let entropy_ebits = von_neumann_entropy(&raw);
        Ok(Self {
            eigenvalues: raw,
            entropy_ebits,
        })
    }
}

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn von_neumann_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Split of a state's modes into two disjoint sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

impl Partition {
    pub fn new(side_a: Vec<usize>, side_b: Vec<usize>) -> Self {
        Self { side_a, side_b }
    }

    /// Mode 0 against mode 1.
    pub fn two_mode() -> Self {
        Self::new(vec![0], vec![1])
    }

    fn validate(&self, mode_count: usize) -> Result<()> {
        let mut seen = vec![false; mode_count];
        for &m in self.side_a.iter().chain(&self.side_b) {
            if m >= mode_count {
                return Err(Error::InvalidPartition(format!(
                    "mode {m} out of range for {mode_count} modes"
                )));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPartition(format!("mode {m} on both sides")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition(
                "partition does not cover every mode".into(),
            ));
        }
        Ok(())
    }
}

/// Coherent amplitude of each arm when `|beta>|0>` is evolved to `pi/M` and split.
pub fn ecs_alpha(order: usize, beta: C64) -> C64 {
    let scale = if order.is_multiple_of(2) {
        C64::from_polar(
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::PI / order as f64,
        )
    } else {
        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    };
    beta * scale
}

/// The two-mode state produced from `|beta>|0>` by the Kerr propagator at
/// `tau = pi/M` followed by a 50/50 beamsplitter.
pub fn generate_ecs(order: usize, beta: C64) -> Result<CssState> {
    CssState::coherent(vec![beta, C64::new(0.0, 0.0)])
        .kerr_fractional(0, order)?
        .beamsplitter(0, 1)
}

fn side_gram(state: &CssState, side: &[usize]) -> DMatrix<C64> {
    let b = state.branches();
    DMatrix::from_fn(b.len(), b.len(), |p, k| {
        side.iter()
            .map(|&m| overlap_coherent(b[p].amps[m], b[k].amps[m]))
            .product()
    })
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Spectrum of the reduced state on `part.side_a` via branch Gram matrices.
pub fn gram_spectrum(state: &CssState, part: &Partition) -> Result<SpectrumResult> {
    part.validate(state.mode_count())?;
    let state = state.prune(0.0);
    let norm = state.norm_sqr();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let coeffs: Vec<C64> = state.branches().iter().map(|b| b.coeff).collect();
    let k = coeffs.len();
    let u = hermitian_part(&side_gram(&state, &part.side_a));
    let v = side_gram(&state, &part.side_b);
    let c = hermitian_part(&DMatrix::from_fn(k, k, |q, p| {
        coeffs[q] * coeffs[p].conj() * v[(p, q)]
    }));

    let eig_u = SymmetricEigen::new(u);
    let roots = eig_u.eigenvalues.map(|d| C64::new(d.max(0.0).sqrt(), 0.0));
    let w = &eig_u.eigenvectors;
    let sqrt_u = w * DMatrix::from_diagonal(&roots) * w.adjoint();
    let h = hermitian_part(&(&sqrt_u * c * &sqrt_u));
    let eig = SymmetricEigen::new(h);
    let raw = eig.eigenvalues.iter().map(|&x| x / norm).collect();
    SpectrumResult::from_raw(raw)
}

/// Spectrum of mode A's reduced density matrix in the number basis.
pub fn fock_spectrum(state: &FockMat) -> Result<SpectrumResult> {
    let rho = reduced_density_a(state)?;
    let eig = SymmetricEigen::new(rho);
    SpectrumResult::from_raw(eig.eigenvalues.iter().copied().collect())
}

/// Entanglement at the revival times `tau/pi = 1/M` for each arm intensity
/// `|alpha|^2` and order `M`. Rows are ordered by `(|alpha|^2, M)` as given.
pub fn entropy_sweep(alpha_sq: &[f64], orders: &[usize]) -> Result<SweepTable> {
    let grid: Vec<(f64, usize)> = alpha_sq
        .iter()
        .flat_map(|&a| orders.iter().map(move |&m| (a, m)))
        .collect();
    let entropies: Vec<Result<f64>> = grid
        .par_iter()
        .map(|&(a2, m)| {
            let beta = C64::new((2.0 * a2).sqrt(), 0.0);
            let state = generate_ecs(m, beta)?;
            Ok(gram_spectrum(&state, &Partition::two_mode())?.entropy_ebits)
        })
        .collect();
    let mut table = SweepTable::new([
        "alpha_sq",
        "M",
        "tau_over_pi",
        "entropy_ebits",
        "log2M_reference",
    ]);
    for ((a2, m), e) in grid.into_iter().zip(entropies) {
        table.push_row(vec![
            Value::Float(a2),
            Value::from(m),
            Value::Float(1.0 / m as f64),
            Value::Float(e?),
            Value::Float((m as f64).log2()),
        ]);
    }
    Ok(table)
}
