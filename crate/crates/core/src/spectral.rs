//! FFT helpers on uniform periodic grids `t_k = 2 pi k / n`.
//!
//! Coefficients are normalised so that `f(t) = sum_eta c_eta e^{i eta t}`,
//! i.e. `c_eta = (1/n) sum_k f(t_k) e^{-i eta t_k}`, and stored in FFT order
//! (`0, 1, ..., n/2 - 1, -n/2, ..., -1`).

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;

/// Signed frequency of FFT slot `k` on an `n`-point grid.
#[inline]
pub fn freq_of(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT slot of frequency `eta`, if representable on an `n`-point grid.
#[inline]
pub fn slot_of(eta: i64, n: usize) -> Option<usize> {
    let n_i = n as i64;
    let k = eta.rem_euclid(n_i) as usize;
    (freq_of(k, n) == eta).then_some(k)
}

/// Samples to normalised coefficients.
pub fn forward<T: Real>(samples: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    if n == 0 {
        return buf;
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = T::one() / T::from_usize_lossy(n);
    buf.iter_mut().for_each(|z| *z = *z * scale);
    buf
}

/// Normalised coefficients back to samples.
pub fn inverse<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    if n == 0 {
        return buf;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Spectral derivative of periodic samples. The Nyquist mode of an even
/// grid is dropped.
pub fn derivative<T: Real>(samples: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = samples.len();
    let mut c = forward(samples);
    for (k, z) in c.iter_mut().enumerate() {
        let eta = freq_of(k, n);
        if n % 2 == 0 && k == n / 2 {
            *z = Complex::new(T::zero(), T::zero());
        } else {
            *z = *z * Complex::new(T::zero(), T::from_i64_lossy(eta));
        }
    }
    inverse(&c)
}

/// Zero-mean periodic antiderivative of samples; also returns the mean that
/// had to be dropped.
pub fn antiderivative<T: Real>(samples: &[Complex<T>]) -> (Vec<Complex<T>>, Complex<T>) {
    let n = samples.len();
    let mut c = forward(samples);
    let mean = c.first().copied().unwrap_or_default();
    for (k, z) in c.iter_mut().enumerate() {
        let eta = freq_of(k, n);
        if eta == 0 || (n % 2 == 0 && k == n / 2) {
            *z = Complex::new(T::zero(), T::zero());
        } else {
            *z = *z / Complex::new(T::zero(), T::from_i64_lossy(eta));
        }
    }
    (inverse(&c), mean)
}

/// Applies an FFT along one axis of a row-major tensor with the given shape.
pub fn along_axis<T: Real>(data: &mut [Complex<T>], shape: &[usize], axis: usize, inverse_dir: bool) {
    let len = shape[axis];
    if len <= 1 {
        return;
    }
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut planner = FftPlanner::new();
    let fft = if inverse_dir { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
    let scale = if inverse_dir { T::one() } else { T::one() / T::from_usize_lossy(len) };
    let mut line = vec![Complex::new(T::zero(), T::zero()); len];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * len * stride + i;
            for (j, z) in line.iter_mut().enumerate() {
                *z = data[base + j * stride];
            }
            fft.process(&mut line);
            for (j, z) in line.iter().enumerate() {
                data[base + j * stride] = *z * scale;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::uniform_grid;

    #[test]
    fn slots_round_trip() {
        for n in [7usize, 8] {
            for k in 0..n {
                assert_eq!(slot_of(freq_of(k, n), n), Some(k));
            }
        }
        assert_eq!(slot_of(4, 8), None);
        assert_eq!(slot_of(-4, 8), Some(4));
    }

    #[test]
    fn derivative_of_sine() {
        let t: Vec<f64> = uniform_grid(32);
        let f: Vec<Complex<f64>> = t.iter().map(|&x| Complex::new((3.0 * x).sin(), 0.0)).collect();
        let d = derivative(&f);
        for (x, z) in t.iter().zip(&d) {
            assert!((z.re - 3.0 * (3.0 * x).cos()).abs() < 1e-12);
        }
        let (anti, mean) = antiderivative(&d);
        assert!(mean.norm() < 1e-13);
        for (a, b) in anti.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
