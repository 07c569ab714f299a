//! Periodic lattice carrying a few distinguishable particles.
//!
//! The field lattice has `sites_per_axis^dimension` cells of side Δx. Each
//! particle sits on one of the `allowed_sites`, and a configuration assigns a
//! site to every particle. Configuration `c` has index Σ_j k_j K^j, where k_j
//! is particle j's position in the allowed-site list and K its length.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure_positive, Error, Result};

/// Largest configuration basis that will be built.
pub const MAX_CONFIGS: usize = 4096;

#[derive(Debug, Clone)]
pub enum HamiltonianSpec {
    /// H = 0.
    Zero,
    /// Σ_j −ħ²/(2m_j) ∇²_j with the nearest-neighbour periodic stencil. Hops
    /// to sites outside the allowed set are dropped.
    FreeParticle { hbar: f64 },
    /// Any Hermitian matrix over the configuration basis, erg.
    Custom(DMatrix<Complex64>),
}

#[derive(Debug, Clone)]
pub struct LatticeBuilder {
    dimension: usize,
    sites_per_axis: usize,
    spacing: f64,
    masses: Vec<f64>,
    smearing: Option<f64>,
    allowed_sites: Option<Vec<usize>>,
    hamiltonian: HamiltonianSpec,
}

impl LatticeBuilder {
    pub fn particle(mut self, mass: f64) -> Self {
        self.masses.push(mass);
        self
    }

    pub fn smearing(mut self, a: f64) -> Self {
        self.smearing = Some(a);
        self
    }

    /// Restrict particle positions to these field sites.
    pub fn allowed_sites(mut self, sites: Vec<usize>) -> Self {
        self.allowed_sites = Some(sites);
        self
    }

    pub fn hamiltonian(mut self, h: HamiltonianSpec) -> Self {
        self.hamiltonian = h;
        self
    }

    pub fn build(self) -> Result<LatticeSystem> {
        if self.dimension != 1 && self.dimension != 3 {
            return Err(Error::InvalidParameter { name: "dimension", reason: "must be 1 or 3".into() });
        }
        if self.sites_per_axis < 2 {
            return Err(Error::InvalidParameter { name: "sites_per_axis", reason: "need at least 2".into() });
        }
        ensure_positive("spacing", self.spacing)?;
        let a = self.smearing.ok_or(Error::InvalidParameter { name: "smearing", reason: "not set".into() })?;
        ensure_positive("smearing", a)?;
        if a < self.spacing {
            return Err(Error::UnresolvedSmearing { a, spacing: self.spacing });
        }
        if self.masses.is_empty() {
            return Err(Error::InvalidParameter { name: "masses", reason: "no particles".into() });
        }
        for &m in &self.masses {
            ensure_positive("mass", m)?;
        }
        let n_sites = self.sites_per_axis.pow(self.dimension as u32);
        let allowed = self.allowed_sites.unwrap_or_else(|| (0..n_sites).collect());
        if allowed.is_empty() || allowed.iter().any(|&s| s >= n_sites) {
            return Err(Error::InvalidParameter { name: "allowed_sites", reason: "empty or out of range".into() });
        }
        let mut dedup = allowed.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if dedup.len() != allowed.len() {
            return Err(Error::InvalidParameter { name: "allowed_sites", reason: "duplicate site".into() });
        }
        let n_configs = allowed
            .len()
            .checked_pow(self.masses.len() as u32)
            .filter(|&n| n <= MAX_CONFIGS)
            .ok_or_else(|| Error::Unsupported(format!("configuration basis larger than {MAX_CONFIGS}")))?;
        let configs: Vec<Vec<usize>> = (0..n_configs)
            .map(|mut c| {
                (0..self.masses.len())
                    .map(|_| {
                        let k = c % allowed.len();
                        c /= allowed.len();
                        allowed[k]
                    })
                    .collect()
            })
            .collect();

        let kernel_1d = periodic_gaussian(self.sites_per_axis, self.spacing, a);
        let mut sys = LatticeSystem {
            dimension: self.dimension,
            sites_per_axis: self.sites_per_axis,
            spacing: self.spacing,
            masses: self.masses,
            smearing: a,
            allowed_sites: allowed,
            configs,
            hamiltonian: DMatrix::zeros(n_configs, n_configs),
            kernel_1d,
        };
        sys.hamiltonian = match self.hamiltonian {
            HamiltonianSpec::Zero => DMatrix::zeros(n_configs, n_configs),
            HamiltonianSpec::FreeParticle { hbar } => {
                ensure_positive("hbar", hbar)?;
                sys.free_particle_hamiltonian(hbar)
            }
            HamiltonianSpec::Custom(h) => {
                if h.nrows() != n_configs || h.ncols() != n_configs {
                    return Err(Error::Shape(format!(
                        "hamiltonian is {}x{}, basis has {n_configs} configurations",
                        h.nrows(),
                        h.ncols()
                    )));
                }
                check_hermitian(&h)?;
                h
            }
        };
        Ok(sys)
    }
}

/// Normalized periodic Gaussian weights w(d), d = 0..n, variance a².
fn periodic_gaussian(n: usize, dx: f64, a: f64) -> Vec<f64> {
    let box_len = n as f64 * dx;
    let images = (10.0 * a / box_len).ceil() as i64 + 1;
    let mut w: Vec<f64> = (0..n)
        .map(|d| {
            (-images..=images)
                .map(|j| {
                    let x = (d as f64 + (j * n as i64) as f64) * dx;
                    (-x * x / (2.0 * a * a)).exp()
                })
                .sum()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

fn check_hermitian(h: &DMatrix<Complex64>) -> Result<()> {
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dev = (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > 1e-12 * scale {
        return Err(Error::InvalidParameter {
            name: "hamiltonian",
            reason: format!("not Hermitian: max |H - H†| = {dev:e}, max |H| = {scale:e}"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LatticeSystem {
    dimension: usize,
    sites_per_axis: usize,
    spacing: f64,
    masses: Vec<f64>,
    smearing: f64,
    allowed_sites: Vec<usize>,
    configs: Vec<Vec<usize>>,
    hamiltonian: DMatrix<Complex64>,
    kernel_1d: Vec<f64>,
}

impl LatticeSystem {
    pub fn builder(dimension: usize, sites_per_axis: usize, spacing: f64) -> LatticeBuilder {
        LatticeBuilder {
            dimension,
            sites_per_axis,
            spacing,
            masses: Vec::new(),
            smearing: None,
            allowed_sites: None,
            hamiltonian: HamiltonianSpec::Zero,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn sites_per_axis(&self) -> usize {
        self.sites_per_axis
    }

    pub fn n_sites(&self) -> usize {
        self.sites_per_axis.pow(self.dimension as u32)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// ΔV = Δx^dimension.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dimension as i32)
    }

    pub fn box_length(&self) -> f64 {
        self.spacing * self.sites_per_axis as f64
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn smearing(&self) -> f64 {
        self.smearing
    }

    pub fn allowed_sites(&self) -> &[usize] {
        &self.allowed_sites
    }

    pub fn n_configs(&self) -> usize {
        self.configs.len()
    }

    /// Site of each particle in configuration `c`.
    pub fn config(&self, c: usize) -> &[usize] {
        &self.configs[c]
    }

    pub fn config_index(&self, sites: &[usize]) -> Option<usize> {
        let k = self.allowed_sites.len();
        let mut idx = 0;
        for &s in sites.iter().rev() {
            idx = idx * k + self.allowed_sites.iter().position(|&t| t == s)?;
        }
        Some(idx)
    }

    pub fn hamiltonian(&self) -> &DMatrix<Complex64> {
        &self.hamiltonian
    }

    /// Integer coordinates of a site; unused axes are zero.
    pub fn site_coords(&self, s: usize) -> [usize; 3] {
        let n = self.sites_per_axis;
        let mut c = [0; 3];
        let mut rest = s;
        for axis in c.iter_mut().take(self.dimension) {
            *axis = rest % n;
            rest /= n;
        }
        c
    }

    pub fn site_index(&self, coords: [usize; 3]) -> usize {
        let n = self.sites_per_axis;
        (0..self.dimension).rev().fold(0, |acc, d| acc * n + coords[d] % n)
    }

    /// Position in cm; unused axes are zero.
    pub fn site_position(&self, s: usize) -> [f64; 3] {
        self.site_coords(s).map(|c| c as f64 * self.spacing)
    }

    /// Smearing weight between two sites. Rows sum to one.
    pub fn smearing_weight(&self, s: usize, t: usize) -> f64 {
        let n = self.sites_per_axis;
        let (cs, ct) = (self.site_coords(s), self.site_coords(t));
        (0..self.dimension).map(|d| self.kernel_1d[(cs[d] + n - ct[d]) % n]).product()
    }

    pub fn smearing_row(&self, s: usize) -> Vec<f64> {
        (0..self.n_sites()).map(|t| self.smearing_weight(s, t)).collect()
    }

    /// A_c(x): smeared mass density of configuration `c` over all field sites,
    /// g cm⁻^dimension.
    pub fn smeared_density(&self, c: usize) -> Vec<f64> {
        let dv = self.cell_volume();
        let mut out = vec![0.0; self.n_sites()];
        for (&site, &m) in self.configs[c].iter().zip(&self.masses) {
            let coords = self.site_coords(site);
            let n = self.sites_per_axis;
            for (t, v) in out.iter_mut().enumerate() {
                let ct = self.site_coords(t);
                let w: f64 = (0..self.dimension).map(|d| self.kernel_1d[(ct[d] + n - coords[d]) % n]).product();
                *v += m * w / dv;
            }
        }
        out
    }

    /// The diagonal of A over configurations: one density profile per
    /// configuration.
    pub fn smeared_mass_operator(&self) -> Vec<Vec<f64>> {
        (0..self.n_configs()).map(|c| self.smeared_density(c)).collect()
    }

    fn neighbours(&self, s: usize) -> Vec<usize> {
        let n = self.sites_per_axis;
        let c = self.site_coords(s);
        let mut out = Vec::with_capacity(2 * self.dimension);
        for d in 0..self.dimension {
            for step in [1, n - 1] {
                let mut nc = c;
                nc[d] = (c[d] + step) % n;
                out.push(self.site_index(nc));
            }
        }
        out
    }

    fn free_particle_hamiltonian(&self, hbar: f64) -> DMatrix<Complex64> {
        let nc = self.n_configs();
        let lookup: HashMap<&[usize], usize> =
            self.configs.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let dx2 = self.spacing * self.spacing;
        let mut h = DMatrix::zeros(nc, nc);
        for (c, sites) in self.configs.iter().enumerate() {
            for (j, &m) in self.masses.iter().enumerate() {
                let hop = hbar * hbar / (2.0 * m * dx2);
                h[(c, c)] += Complex64::new(2.0 * self.dimension as f64 * hop, 0.0);
                for nb in self.neighbours(sites[j]) {
                    let mut moved = sites.clone();
                    moved[j] = nb;
                    if let Some(&c2) = lookup.get(moved.as_slice()) {
                        h[(c2, c)] -= Complex64::new(hop, 0.0);
                    }
                }
            }
        }
        h
    }
}

/// Nearest-neighbour hopping −J Σ (|c⟩⟨c+1| + h.c.) along the configuration
/// index, open ends.
pub fn hopping_chain(n: usize, hopping: f64) -> DMatrix<Complex64> {
    let mut h = DMatrix::zeros(n, n);
    for c in 0..n.saturating_sub(1) {
        h[(c, c + 1)] = Complex64::new(-hopping, 0.0);
        h[(c + 1, c)] = Complex64::new(-hopping, 0.0);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, dx: f64, a: f64) -> LatticeSystem {
        LatticeSystem::builder(1, n, dx).particle(2.0).smearing(a).build().unwrap()
    }

    #[test]
    fn rows_sum_to_one() {
        let sys = line(32, 1.0, 2.0);
        for s in [0, 7, 31] {
            let sum: f64 = sys.smearing_row(s).iter().sum();
            assert!((sum - 1.0).abs() < 1e-14);
        }
        let sys3 = LatticeSystem::builder(3, 8, 1.0).particle(1.0).smearing(1.5).allowed_sites(vec![0]).build().unwrap();
        let sum: f64 = sys3.smearing_row(100).iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_particle_bump_matches_direct_convolution() {
        // direct oracle: unnormalized Gaussian with images, normalized by hand
        let (n, dx, a) = (40, 0.5, 1.0);
        let sys = line(n, dx, a);
        let s = 10;
        let c = sys.config_index(&[s]).unwrap();
        let dens = sys.smeared_density(c);
        let raw: Vec<f64> = (0..n)
            .map(|t| {
                let mut d = (t as f64 - s as f64) * dx;
                let l = n as f64 * dx;
                d -= l * (d / l).round();
                (-d * d / (2.0 * a * a)).exp()
            })
            .collect();
        let z: f64 = raw.iter().sum();
        for t in 0..n {
            assert!((dens[t] - 2.0 * raw[t] / z / dx).abs() < 1e-12 * dens[s]);
        }
        // symmetric about the particle
        for k in 1..10 {
            assert!((dens[s + k] - dens[s - k]).abs() < 1e-15 * dens[s]);
        }
        let mass: f64 = dens.iter().sum::<f64>() * dx;
        assert!((mass - 2.0).abs() < 1e-13);
    }

    #[test]
    fn wide_smearing_is_uniform() {
        let sys = line(8, 1.0, 400.0);
        let dens = sys.smeared_density(3);
        for v in &dens {
            assert!((v / (2.0 / 8.0) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_particles_superpose() {
        let sys = LatticeSystem::builder(1, 16, 1.0).particle(1.0).particle(3.0).smearing(1.5).build().unwrap();
        let c = sys.config_index(&[2, 9]).unwrap();
        assert_eq!(sys.config(c), &[2, 9]);
        let one = LatticeSystem::builder(1, 16, 1.0).particle(1.0).smearing(1.5).build().unwrap();
        let three = LatticeSystem::builder(1, 16, 1.0).particle(3.0).smearing(1.5).build().unwrap();
        let sum: Vec<f64> = one.smeared_density(2).iter().zip(three.smeared_density(9)).map(|(x, y)| x + y).collect();
        for (x, y) in sys.smeared_density(c).iter().zip(sum) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn unresolved_smearing_rejected() {
        let err = LatticeSystem::builder(1, 16, 1.0).particle(1.0).smearing(0.5).build().unwrap_err();
        assert!(matches!(err, Error::UnresolvedSmearing { .. }));
    }

    #[test]
    fn free_hamiltonian_is_hermitian_laplacian() {
        let sys = LatticeSystem::builder(1, 6, 0.5)
            .particle(2.0)
            .smearing(1.0)
            .hamiltonian(HamiltonianSpec::FreeParticle { hbar: 1.0 })
            .build()
            .unwrap();
        let h = sys.hamiltonian();
        check_hermitian(h).unwrap();
        let hop = 1.0 / (2.0 * 2.0 * 0.25);
        assert!((h[(0, 0)].re - 2.0 * hop).abs() < 1e-15);
        assert!((h[(0, 1)].re + hop).abs() < 1e-15);
        assert!((h[(0, 5)].re + hop).abs() < 1e-15);
        // plane waves are eigenvectors with 2hop(1 - cos k)
        let k = 2.0 * std::f64::consts::PI / 6.0;
        let v = nalgebra::DVector::from_fn(6, |s, _| Complex64::from_polar(1.0, k * s as f64));
        let hv = h * &v;
        let e = 2.0 * hop * (1.0 - k.cos());
        for s in 0..6 {
            assert!((hv[s] - v[s] * e).norm() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_custom_rejected() {
        let mut h = hopping_chain(2, 1.0);
        h[(0, 1)] = Complex64::new(0.0, 1.0);
        let r = LatticeSystem::builder(1, 2, 1.0).particle(1.0).smearing(1.0).hamiltonian(HamiltonianSpec::Custom(h)).build();
        assert!(r.is_err());
    }

    #[test]
    fn restricted_sites_in_three_dimensions() {
        let sys = LatticeSystem::builder(3, 8, 1.0)
            .particle(1.0)
            .smearing(2.0)
            .allowed_sites(vec![0, 1, 2, 3])
            .hamiltonian(HamiltonianSpec::FreeParticle { hbar: 1.0 })
            .build()
            .unwrap();
        assert_eq!(sys.n_configs(), 4);
        assert_eq!(sys.site_position(3), [3.0, 0.0, 0.0]);
        let h = sys.hamiltonian();
        assert!(h[(0, 1)].re < 0.0);
        assert_eq!(h[(0, 2)].re, 0.0);
    }

    #[test]
    fn oversized_basis_rejected() {
        let r = LatticeSystem::builder(1, 100, 1.0).particle(1.0).particle(1.0).smearing(1.0).build();
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
