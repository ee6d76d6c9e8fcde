//! Trigonometric differentiation of uniformly sampled periodic series.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::Scalar;

/// FFT plans and wavenumbers for `m` samples over one period.
#[derive(Clone)]
pub struct Spectral<S: Scalar> {
    m: usize,
    forward: Arc<dyn Fft<S>>,
    inverse: Arc<dyn Fft<S>>,
    /// Angular frequency of each FFT bin; the Nyquist bin is zero so that the
    /// first-derivative operator is real and skew-symmetric.
    omega: Vec<S>,
}

impl<S: Scalar> std::fmt::Debug for Spectral<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("m", &self.m).finish()
    }
}

impl<S: Scalar> Spectral<S> {
    pub fn new(m: usize, period: S) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let base = S::lit(2.0) * S::PI() / period;
        let omega = (0..m)
            .map(|q| {
                if 2 * q == m {
                    S::zero()
                } else if 2 * q < m {
                    base * S::from_usize_lossy(q)
                } else {
                    -(base * S::from_usize_lossy(m - q))
                }
            })
            .collect();
        Self {
            m,
            forward,
            inverse,
            omega,
        }
    }

    pub fn samples(&self) -> usize {
        self.m
    }

    /// Angular frequencies per bin (Nyquist bin zeroed).
    pub fn frequencies(&self) -> &[S] {
        &self.omega
    }

    /// First and second derivatives of `width` interleaved series: `x[j * width + c]`
    /// is channel `c` at sample `j`. The second derivative is the square of the first.
    pub fn derivatives(&self, x: &[S], width: usize) -> (Vec<S>, Vec<S>) {
        let m = self.m;
        debug_assert_eq!(x.len(), m * width);
        let mut spec = self.to_spectrum(x, width);
        let mut d1: Vec<Complex<S>> = spec.clone();
        for c in 0..width {
            for q in 0..m {
                let w = self.omega[q];
                let z = spec[c * m + q];
                d1[c * m + q] = Complex::new(-z.im * w, z.re * w);
                spec[c * m + q] = z * (-(w * w));
            }
        }
        (self.from_spectrum(d1, width), self.from_spectrum(spec, width))
    }

    /// First derivative only.
    pub fn first_derivative(&self, x: &[S], width: usize) -> Vec<S> {
        self.apply_multiplier(x, width, |w, z| Complex::new(-z.im * w, z.re * w))
    }

    /// Applies a real Fourier multiplier `f(ω)` to each channel.
    pub fn apply_real_multiplier(&self, x: &[S], width: usize, f: impl Fn(S) -> S) -> Vec<S> {
        self.apply_multiplier(x, width, |w, z| z * f(w))
    }

    fn apply_multiplier(&self, x: &[S], width: usize, f: impl Fn(S, Complex<S>) -> Complex<S>) -> Vec<S> {
        let m = self.m;
        let mut spec = self.to_spectrum(x, width);
        for c in 0..width {
            for q in 0..m {
                spec[c * m + q] = f(self.omega[q], spec[c * m + q]);
            }
        }
        self.from_spectrum(spec, width)
    }

    fn to_spectrum(&self, x: &[S], width: usize) -> Vec<Complex<S>> {
        let m = self.m;
        let mut buf = vec![Complex::new(S::zero(), S::zero()); m * width];
        for j in 0..m {
            for c in 0..width {
                buf[c * m + j].re = x[j * width + c];
            }
        }
        self.forward.process(&mut buf);
        buf
    }

    fn from_spectrum(&self, mut buf: Vec<Complex<S>>, width: usize) -> Vec<S> {
        let m = self.m;
        self.inverse.process(&mut buf);
        let scale = S::one() / S::from_usize_lossy(m);
        let mut out = vec![S::zero(); m * width];
        for j in 0..m {
            for c in 0..width {
                out[j * width + c] = buf[c * m + j].re * scale;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differentiates_trig_polynomials_exactly() {
        let m = 32;
        let period = 2.5f64;
        let sp = Spectral::new(m, period);
        let w = 2.0 * std::f64::consts::PI / period;
        let x: Vec<f64> = (0..m)
            .flat_map(|j| {
                let t = period * j as f64 / m as f64;
                [(3.0 * w * t).sin(), (w * t).cos() + 0.5]
            })
            .collect();
        let (d1, d2) = sp.derivatives(&x, 2);
        for j in 0..m {
            let t = period * j as f64 / m as f64;
            assert!((d1[2 * j] - 3.0 * w * (3.0 * w * t).cos()).abs() < 1e-11);
            assert!((d1[2 * j + 1] + w * (w * t).sin()).abs() < 1e-11);
            assert!((d2[2 * j] + 9.0 * w * w * (3.0 * w * t).sin()).abs() < 1e-10);
        }
        let d1b = sp.first_derivative(&x, 2);
        for (a, b) in d1.iter().zip(&d1b) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn first_derivative_is_skew() {
        let m = 16;
        let sp = Spectral::new(m, 1.0f64);
        let basis = |k: usize| -> Vec<f64> { (0..m).map(|j| if j == k { 1.0 } else { 0.0 }).collect() };
        let cols: Vec<Vec<f64>> = (0..m).map(|k| sp.first_derivative(&basis(k), 1)).collect();
        for a in 0..m {
            for b in 0..m {
                assert!((cols[b][a] + cols[a][b]).abs() < 1e-12);
            }
        }
    }
}
