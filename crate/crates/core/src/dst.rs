//! Type-I discrete sine transform through an odd extension and a complex FFT.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub(crate) struct SineTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineTransform").field("n", &self.n).finish()
    }
}

impl SineTransform {
    pub(crate) fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        SineTransform { n, fft }
    }

    /// `c_k = sum_j x_j sin(pi k j / (n + 1))`, with `j, k = 1..=n` stored
    /// zero-based.
    pub(crate) fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        let m = 2 * (n + 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (j, &v) in x.iter().enumerate() {
            buf[j + 1] = v;
            buf[m - j - 1] = -v;
        }
        self.fft.process(&mut buf);
        let half_i = Complex64::new(0.0, 0.5);
        buf[1..=n].iter().map(|y| y * half_i).collect()
    }

    /// Inverse of [`forward`](Self::forward).
    pub(crate) fn inverse(&self, c: &[Complex64]) -> Vec<Complex64> {
        let scale = 2.0 / (self.n + 1) as f64;
        let mut x = self.forward(c);
        x.iter_mut().for_each(|v| *v *= scale);
        x
    }
}
