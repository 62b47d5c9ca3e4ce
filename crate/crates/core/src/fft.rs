//! Minimal radix-2 FFT, enough for periodic sampling of Laurent series.

use alloc::vec::Vec;
// Required when num-traits resolves with libm alone; shadowed by inherent
// methods when a std-enabled graph unifies features.
#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

/// In-place forward DFT, `X_k = sum_j x_j e^{-2 pi i jk / n}`.
///
/// `data.len()` must be a power of two (checked by callers).
pub(crate) fn fft_in_place(data: &mut [C64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    if n < 2 {
        return;
    }

    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }

    // Twiddles are recomputed from the angle per index; the extra trig
    // keeps rounding flat across long transforms.
    let mut len = 2usize;
    while len <= n {
        let half = len / 2;
        let step = -2.0 * core::f64::consts::PI / len as f64;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let angle = step * j as f64;
                let w = C64::new(angle.cos(), angle.sin());
                let a = data[start + j];
                let b = data[start + j + half] * w;
                data[start + j] = a + b;
                data[start + j + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Forward DFT into a fresh buffer.
pub(crate) fn fft(data: &[C64]) -> Vec<C64> {
    let mut out = data.to_vec();
    fft_in_place(&mut out);
    out
}
