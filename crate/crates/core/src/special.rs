//! Small numeric helpers shared by both backends.

use num_complex::Complex64 as C64;

/// `ln(n!)` for `n = 0..=max`, accumulated term by term.
pub fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for n in 1..=max {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}

/// Number-state amplitudes `<n|gamma>` for `n = 0..=cap`.
///
/// Evaluated in log space so that large photon numbers neither overflow
/// `gamma^n` nor `n!`.
pub fn number_amplitudes(gamma: C64, cap: usize, ln_fact: &[f64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); cap + 1];
    let r2 = gamma.norm_sqr();
    if r2 == 0.0 {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    let ln_r = r2.sqrt().ln();
    let theta = gamma.arg();
    for (n, slot) in out.iter_mut().enumerate() {
        let ln_mag = -0.5 * r2 + n as f64 * ln_r - 0.5 * ln_fact[n];
        *slot = C64::from_polar(ln_mag.exp(), n as f64 * theta);
    }
    out
}

/// Single amplitude `<n|gamma>`.
pub fn number_amplitude(gamma: C64, n: usize) -> C64 {
    let r2 = gamma.norm_sqr();
    if r2 == 0.0 {
        return if n == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        };
    }
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let ln_mag = -0.5 * r2 + n as f64 * r2.sqrt().ln() - 0.5 * ln_fact;
    C64::from_polar(ln_mag.exp(), n as f64 * gamma.arg())
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
