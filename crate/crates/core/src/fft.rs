//! Radix-2 FFT used for PGF coefficient extraction.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// In-place iterative radix-2 transform. `inverse` uses `e^{+i}` twiddles and
/// does not normalise.
pub(crate) fn fft_in_place(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let angle = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        // twiddles computed directly to avoid error build-up in long recurrences
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, angle * k as f64))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = data[start + k];
                let v = data[start + k + half] * twiddles[k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Samples `g` at the `n`-th roots of unity and returns the aliased Taylor
/// coefficients `c_k = (1/n) Σ_j g(ω^j) ω^{-jk}`.
pub(crate) fn taylor_coefficients<F: Fn(Complex64) -> Complex64>(g: F, n: usize) -> Vec<Complex64> {
    let mut samples: Vec<Complex64> = (0..n)
        .map(|j| g(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)))
        .collect();
    fft_in_place(&mut samples, false);
    let scale = 1.0 / n as f64;
    samples.iter_mut().for_each(|c| *c *= scale);
    samples
}
