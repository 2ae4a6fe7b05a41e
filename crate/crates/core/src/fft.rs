//! Complex cyclic convolution on top of `rustfft`.

use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Unit roundoff of IEEE binary64, `2^-53`.
pub(crate) const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

thread_local! {
    // Plans are cached per thread; each plan is immutable once built.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Transform length used for a cyclic convolution of length `m`.
///
/// Power-of-two lengths are transformed directly. Any other length is
/// computed as a zero-padded linear convolution of length at least `2m - 1`,
/// rounded up to the next `2^a·3^b·5^c`, and then wrapped modulo `m`.
pub(crate) fn transform_len(m: usize) -> usize {
    if m.is_power_of_two() {
        m
    } else {
        next_smooth(2 * m - 1)
    }
}

fn next_smooth(target: usize) -> usize {
    let mut best = target.next_power_of_two();
    let mut p5 = 1;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut len = p35;
            while len < target {
                len *= 2;
            }
            best = best.min(len);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

pub(crate) fn cyclic_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(a.len(), b.len());
    let m = a.len();
    if m == 0 {
        return Vec::new();
    }
    let size = transform_len(m);
    let mut fa = padded(a, size);
    let mut fb = padded(b, size);

    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::default(); scratch_len];
        forward.process_with_scratch(&mut fa, &mut scratch);
        forward.process_with_scratch(&mut fb, &mut scratch);
        for (u, v) in fa.iter_mut().zip(&fb) {
            *u *= *v;
        }
        inverse.process_with_scratch(&mut fa, &mut scratch);
    });

    let scale = 1.0 / size as f64;
    if size == m {
        for z in &mut fa {
            *z *= scale;
        }
        fa
    } else {
        let mut out = vec![Complex64::default(); m];
        for (k, z) in fa.into_iter().take(2 * m - 1).enumerate() {
            out[k % m] += z * scale;
        }
        out
    }
}

/// Cyclic convolution of two real sequences with a single complex
/// transform: `a` and `b` ride in the real and imaginary parts and are
/// separated in the frequency domain by conjugate symmetry.
pub(crate) fn real_cyclic_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    let m = a.len();
    if m == 0 {
        return Vec::new();
    }
    let size = transform_len(m);
    let mut z = vec![Complex64::default(); size];
    for (k, (&re, &im)) in a.iter().zip(b).enumerate() {
        z[k] = Complex64::new(re, im);
    }

    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::default(); scratch_len];
        forward.process_with_scratch(&mut z, &mut scratch);
        // X_k = (Z_k + conj Z_{-k}) / 2, Y_k = (Z_k - conj Z_{-k}) / 2i,
        // so X_k Y_k = (Z_k^2 - conj(Z_{-k})^2) / 4i.
        let mut prod = vec![Complex64::default(); size];
        for k in 0..size {
            let zk = z[k];
            let zc = z[(size - k) % size].conj();
            prod[k] = (zk * zk - zc * zc) * Complex64::new(0.0, -0.25);
        }
        inverse.process_with_scratch(&mut prod, &mut scratch);
        z = prod;
    });

    let scale = 1.0 / size as f64;
    let mut out = vec![0.0; m];
    for (k, v) in z.into_iter().take(if size == m { m } else { 2 * m - 1 }).enumerate() {
        out[k % m] += v.re * scale;
    }
    out
}

/// Upper bound on the absolute error of any output entry of
/// [`cyclic_convolve`], following the classical floating-point FFT
/// convolution bound `‖a‖₂‖b‖₂ · u · O(log L)`.
pub(crate) fn convolution_error_bound(a_norm2: f64, b_norm2: f64, m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let levels = (transform_len(m) as f64).log2();
    UNIT_ROUNDOFF * (13.0 * levels + 3.0) * a_norm2 * b_norm2
}

pub(crate) fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn padded(a: &[Complex64], size: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(size);
    out.extend_from_slice(a);
    out.resize(size, Complex64::default());
    out
}
