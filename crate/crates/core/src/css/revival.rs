//! Fourier coefficients of the Kerr propagator at fractional revival times.
//!
//! At `tau = pi/M` the number-dependent phase becomes periodic in the photon
//! number with period `M`, so it can be written as a finite sum of linear
//! phase rotations `sum_q f_q exp(-2 pi i q n / M)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(order: usize) -> Self {
        if order.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// The `M` expansion coefficients for revival order `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct RevivalCoeffs {
    pub order: usize,
    pub parity: Parity,
    pub f: Vec<C64>,
}

impl RevivalCoeffs {
    pub fn get(&self, q: usize) -> C64 {
        self.f[q % self.order]
    }

    /// Evaluates `sum_q f_q exp(-2 pi i q n / M)`.
    pub fn reconstruct(&self, n: usize) -> C64 {
        let m = self.order;
        self.f
            .iter()
            .enumerate()
            .map(|(q, fq)| fq * unit_phase(-2 * ((q * n) % m) as i64, m))
            .sum()
    }
}

/// `exp(i pi k / m)` with `k` reduced modulo `2m` before the float multiply.
fn unit_phase(k: i64, m: usize) -> C64 {
    let period = 2 * m as i64;
    let k = k.rem_euclid(period);
    C64::from_polar(1.0, PI * k as f64 / m as f64)
}

/// Number-dependent Kerr phase at revival order `M` for photon number `n`:
/// `exp(-i pi n(n-1)/M)` for odd `M`, `exp(-i pi n^2/M)` for even `M`.
pub fn revival_phase(order: usize, n: usize) -> C64 {
    let m = order as u128;
    let n = n as u128;
    let k = match Parity::of(order) {
        Parity::Odd => (n * n.saturating_sub(1)) % (2 * m),
        Parity::Even => (n * n) % (2 * m),
    };
    unit_phase(-(k as i64), order)
}

fn check_order(order: usize) -> Result<()> {
    if order < 2 {
        Err(Error::InvalidOrder(order))
    } else {
        Ok(())
    }
}

/// Closed-form coefficients.
///
/// Even `M`: `f_q = exp(i pi q^2 / M) exp(-i pi/4) / sqrt(M)`.
/// Odd `M`: `f_q = exp(i pi q(q+1) / M) f_0`, where `f_0` is the normalized
/// quadratic Gauss sum `(2|M) conj(eps_M) exp(2 pi i h^3 / M) / sqrt(M)` with
/// `h = (M+1)/2` the inverse of 2 modulo `M`, `(2|M)` the Jacobi symbol and
/// `eps_M` equal to 1 or `i` for `M = 1` or `3 (mod 4)`.
pub fn fq_closed(order: usize) -> Result<RevivalCoeffs> {
    check_order(order)?;
    let m = order;
    let scale = 1.0 / (m as f64).sqrt();
    let parity = Parity::of(m);
    let f = match parity {
        Parity::Even => {
            let global = C64::from_polar(scale, -PI / 4.0);
            (0..m)
                .map(|q| global * unit_phase(((q as u128 * q as u128) % (2 * m as u128)) as i64, m))
                .collect()
        }
        Parity::Odd => {
            let mu = m as u128;
            let h = mu.div_ceil(2);
            let h3 = (h * h % mu) * h % mu;
            let jacobi_two = if matches!(m % 8, 1 | 7) { 1.0 } else { -1.0 };
            let eps_conj = if m % 4 == 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, -1.0)
            };
            let global = eps_conj * jacobi_two * scale * unit_phase(2 * h3 as i64, m);
            (0..m)
                .map(|q| {
                    let k = (q as u128 * (q as u128 + 1)) % (2 * mu);
                    global * unit_phase(k as i64, m)
                })
                .collect()
        }
    };
    Ok(RevivalCoeffs {
        order: m,
        parity,
        f,
    })
}

/// Coefficients by direct inverse DFT of one period of the revival phase.
pub fn fq_dft(order: usize) -> Result<RevivalCoeffs> {
    check_order(order)?;
    let m = order;
    let phases: Vec<C64> = (0..m).map(|n| revival_phase(m, n)).collect();
    let f = (0..m)
        .map(|q| {
            let sum: C64 = phases
                .iter()
                .enumerate()
                .map(|(n, p)| p * unit_phase(2 * ((q * n) % m) as i64, m))
                .sum();
            sum / m as f64
        })
        .collect();
    Ok(RevivalCoeffs {
        order: m,
        parity: Parity::of(m),
        f,
    })
}
