//! Unitary multi-dimensional DFT on a cubic lattice.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

pub(crate) struct LatticeFft {
    n: usize,
    dimension: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl LatticeFft {
    pub fn new(n: usize, dimension: usize) -> Self {
        let mut planner = FftPlanner::new();
        LatticeFft {
            n,
            dimension,
            forward: planner.plan_fft(n, FftDirection::Forward),
            inverse: planner.plan_fft(n, FftDirection::Inverse),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, &self.inverse);
    }

    fn apply(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let total = n.pow(self.dimension as u32);
        assert_eq!(data.len(), total);
        let mut line = vec![Complex64::default(); n];
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        for axis in 0..self.dimension {
            let stride = n.pow(axis as u32);
            for start in 0..total {
                // first element of each line along `axis`
                if (start / stride) % n != 0 {
                    continue;
                }
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
        let scale = 1.0 / (total as f64).sqrt();
        data.iter_mut().for_each(|v| *v *= scale);
    }

    /// Integer wave-vector components of mode `k` (each in 0..n).
    pub fn mode_coords(&self, k: usize) -> [usize; 3] {
        let mut c = [0; 3];
        let mut rest = k;
        for axis in c.iter_mut().take(self.dimension) {
            *axis = rest % self.n;
            rest /= self.n;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_parseval() {
        let fft = LatticeFft::new(6, 3);
        let data: Vec<Complex64> = (0..216).map(|i| Complex64::new((i as f64 * 0.37).sin(), 0.0)).collect();
        let mut d = data.clone();
        fft.forward(&mut d);
        let p1: f64 = data.iter().map(|z| z.norm_sqr()).sum();
        let p2: f64 = d.iter().map(|z| z.norm_sqr()).sum();
        assert!((p1 - p2).abs() < 1e-12 * p1);
        fft.inverse(&mut d);
        for (x, y) in data.iter().zip(&d) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_lands_on_one_mode() {
        let n = 8;
        let fft = LatticeFft::new(n, 1);
        let k = 3;
        let mut d: Vec<Complex64> =
            (0..n).map(|s| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k * s) as f64 / n as f64)).collect();
        fft.forward(&mut d);
        for (i, z) in d.iter().enumerate() {
            let expected = if i == k { (n as f64).sqrt() } else { 0.0 };
            assert!((z.norm() - expected).abs() < 1e-12);
        }
    }
}
