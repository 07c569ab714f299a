//! The collapse quadratic form on the field lattice and the noise it implies.
//!
//! With a unitary DFT the kernel is diagonal: Q(v) = ΔV² Σ v G⁻¹ v =
//! Σ_k q_k |v̂_k|², with q_k = γΔV for GRWP and q_k = 4πγ′ΔV / κ_k for DGGR,
//! where κ_k is the eigenvalue of minus the discrete Laplacian (the k = 0 mode
//! is dropped). The noise w₀ has covariance G/(4dt), i.e. 1/(4 dt q_k) per mode.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::fft::LatticeFft;
use crate::collapse::KernelModel;
use crate::error::{ensure_positive, Result};
use crate::lattice::LatticeSystem;

pub struct CollapseGeometry {
    model: Option<KernelModel<f64>>,
    n: usize,
    dimension: usize,
    q: Vec<f64>,
    profiles_hat: Vec<Vec<Complex64>>,
    gram: DMatrix<f64>,
    rates: DMatrix<f64>,
    gram_factor: DMatrix<f64>,
    fft: LatticeFft,
}

/// One draw of w₀ over the field lattice.
#[derive(Debug, Clone)]
pub struct NoiseSlice {
    /// w₀ per site, g cm⁻^dimension.
    pub values: Vec<f64>,
    pub dt: f64,
}

impl CollapseGeometry {
    /// `None` switches collapse off (G⁻¹ = 0).
    pub fn new(system: &LatticeSystem, model: Option<&KernelModel<f64>>) -> Result<Self> {
        if let Some(m) = model {
            m.validate()?;
        }
        let n = system.sites_per_axis();
        let dimension = system.dimension();
        let fft = LatticeFft::new(n, dimension);
        let dv = system.cell_volume();
        let dx2 = system.spacing() * system.spacing();
        let q: Vec<f64> = (0..system.n_sites())
            .map(|k| match model {
                None => 0.0,
                Some(KernelModel::Grwp { gamma }) => gamma * dv,
                Some(KernelModel::Dggr { gamma_prime }) => {
                    let kappa = laplacian_eigenvalue(fft.mode_coords(k), n, dimension, dx2);
                    if k == 0 {
                        0.0
                    } else {
                        4.0 * std::f64::consts::PI * gamma_prime * dv / kappa
                    }
                }
            })
            .collect();

        let profiles_hat: Vec<Vec<Complex64>> = (0..system.n_configs())
            .map(|c| {
                let mut v: Vec<Complex64> =
                    system.smeared_density(c).into_iter().map(|x| Complex64::new(x, 0.0)).collect();
                fft.forward(&mut v);
                v
            })
            .collect();

        let nc = system.n_configs();
        let mut gram = DMatrix::zeros(nc, nc);
        for i in 0..nc {
            for j in i..nc {
                let g = bilinear_hat(&q, &profiles_hat[i], &profiles_hat[j]);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let rates = DMatrix::from_fn(nc, nc, |i, j| 0.5 * (gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)]).max(0.0));
        let eig = SymmetricEigen::new(gram.clone());
        let mut gram_factor = eig.eigenvectors.clone();
        for (j, ev) in eig.eigenvalues.iter().enumerate() {
            let s = ev.max(0.0).sqrt();
            gram_factor.column_mut(j).scale_mut(s);
        }
        Ok(CollapseGeometry { model: model.copied(), n, dimension, q, profiles_hat, gram, rates, gram_factor, fft })
    }

    pub fn off(system: &LatticeSystem) -> Result<Self> {
        Self::new(system, None)
    }

    pub fn model(&self) -> Option<&KernelModel<f64>> {
        self.model.as_ref()
    }

    pub fn n_configs(&self) -> usize {
        self.profiles_hat.len()
    }

    /// Multiplier q_k of Fourier mode k.
    pub fn mode_multiplier(&self, k: usize) -> f64 {
        self.q[k]
    }

    /// Q(v) for a field over the lattice sites, s⁻¹.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut h: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft.forward(&mut h);
        self.q.iter().zip(&h).map(|(q, z)| q * z.norm_sqr()).sum()
    }

    /// Gram matrix B(A_c, A_c′) of the configuration profiles.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Decoherence rates R_cc′ = ½ Q(A_c − A_c′), s⁻¹.
    pub fn rates(&self) -> &DMatrix<f64> {
        &self.rates
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }

    /// b_c = B(w₀, A_c) for a sampled slice.
    pub fn project(&self, slice: &NoiseSlice) -> Vec<f64> {
        let mut h: Vec<Complex64> = slice.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft.forward(&mut h);
        self.profiles_hat.iter().map(|a| bilinear_hat(&self.q, &h, a)).collect()
    }

    /// Draw b = (B(w₀, A_c))_c directly; it is Gaussian with covariance
    /// Gram/(4dt).
    pub fn sample_projected<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R, out: &mut Vec<f64>) {
        let nc = self.n_configs();
        let scale = (1.0 / (4.0 * dt)).sqrt();
        let xi: Vec<f64> = (0..nc).map(|_| rng.sample(StandardNormal)).collect();
        out.clear();
        out.extend((0..nc).map(|i| scale * (0..nc).map(|j| self.gram_factor[(i, j)] * xi[j]).sum::<f64>()));
    }

    /// Covariance of w₀ between site 0 and site s, times dt.
    pub fn noise_covariance(&self, s: usize) -> f64 {
        let mut h: Vec<Complex64> =
            self.q.iter().map(|&q| Complex64::new(if q > 0.0 { 1.0 / (4.0 * q) } else { 0.0 }, 0.0)).collect();
        self.fft.inverse(&mut h);
        h[s].re / (self.q.len() as f64).sqrt()
    }

    pub fn lattice_shape(&self) -> (usize, usize) {
        (self.n, self.dimension)
    }
}

fn laplacian_eigenvalue(k: [usize; 3], n: usize, dimension: usize, dx2: f64) -> f64 {
    (0..dimension)
        .map(|d| {
            let theta = 2.0 * std::f64::consts::PI * k[d] as f64 / n as f64;
            (2.0 - 2.0 * theta.cos()) / dx2
        })
        .sum()
}

fn bilinear_hat(q: &[f64], x: &[Complex64], y: &[Complex64]) -> f64 {
    q.iter().zip(x.iter().zip(y)).map(|(q, (a, b))| q * (a.conj() * b).re).sum()
}

/// Draw w₀ on every field site with covariance G/(4dt).
pub fn sample_noise_slice<R: Rng + ?Sized>(geometry: &CollapseGeometry, dt: f64, rng: &mut R) -> Result<NoiseSlice> {
    ensure_positive("dt", dt)?;
    let values = match geometry.model {
        None => vec![0.0; geometry.q.len()],
        Some(KernelModel::Grwp { .. }) => {
            let sd = (1.0 / (4.0 * dt * geometry.q[0])).sqrt();
            (0..geometry.q.len()).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
        }
        Some(KernelModel::Dggr { .. }) => {
            let mut h: Vec<Complex64> =
                (0..geometry.q.len()).map(|_| Complex64::new(rng.sample(StandardNormal), 0.0)).collect();
            geometry.fft.forward(&mut h);
            for (z, &q) in h.iter_mut().zip(&geometry.q) {
                *z *= if q > 0.0 { (1.0 / (4.0 * dt * q)).sqrt() } else { 0.0 };
            }
            geometry.fft.inverse(&mut h);
            h.into_iter().map(|z| z.re).collect()
        }
    };
    Ok(NoiseSlice { values, dt })
}
