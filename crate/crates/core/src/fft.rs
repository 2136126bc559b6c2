//! Thin helpers over `rustfft` for the length-d and d×d transforms used
//! throughout the crate. All inverse transforms here are unnormalized.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct Plans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    pub fn new(d: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plans {
            forward: planner.plan_fft_forward(d),
            inverse: planner.plan_fft_inverse(d),
        }
    }
}

fn transpose(values: &mut [Complex64], d: usize) {
    for i in 0..d {
        for j in (i + 1)..d {
            values.swap(i * d + j, j * d + i);
        }
    }
}

/// In-place 2-D transform of a row-major d×d array.
pub(crate) fn fft2(values: &mut [Complex64], d: usize, plans: &Plans, inverse: bool) {
    let fft = if inverse { &plans.inverse } else { &plans.forward };
    fft.process(values);
    transpose(values, d);
    fft.process(values);
    transpose(values, d);
}

/// Cyclic 2-D convolution `Σ_{z'} a(z') b(z - z')` (no cell weighting).
pub(crate) fn cyclic_convolve2(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let plans = Plans::new(d);
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft2(&mut fa, d, &plans, false);
    fft2(&mut fb, d, &plans, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    fft2(&mut fa, d, &plans, true);
    let scale = 1.0 / (d * d) as f64;
    fa.iter().map(|x| x.re * scale).collect()
}

/// Cyclic 1-D convolution `Σ_u a(u) b(x - u)` of complex sequences.
pub(crate) fn cyclic_convolve(a: &[Complex64], b: &[Complex64], plans: &Plans) -> Vec<Complex64> {
    let d = a.len();
    let mut fa = a.to_vec();
    let mut fb = b.to_vec();
    plans.forward.process(&mut fa);
    plans.forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    plans.inverse.process(&mut fa);
    let scale = 1.0 / d as f64;
    fa.iter_mut().for_each(|x| *x *= scale);
    fa
}

/// Cyclic 1-D cross-correlation `Σ_x a(x) b(x - m)` as a function of `m`.
pub(crate) fn cyclic_correlate(a: &[Complex64], b: &[Complex64], plans: &Plans) -> Vec<Complex64> {
    let d = a.len();
    let mut fa = a.to_vec();
    let mut fb = b.to_vec();
    plans.forward.process(&mut fa);
    plans.forward.process(&mut fb);
    // Σ_u a(u) b(u - m) is a convolution of a with b reflected, whose
    // spectrum is B(-k).
    for (k, x) in fa.iter_mut().enumerate() {
        *x *= fb[(d - k) % d];
    }
    plans.inverse.process(&mut fa);
    let scale = 1.0 / d as f64;
    fa.iter_mut().for_each(|x| *x *= scale);
    fa
}
