use num_complex::Complex64 as C64;

use super::LatticeSpec;
use crate::exec;
use crate::{Error, Result};

/// Four-component spinor amplitudes on the lattice.
///
/// Storage is component-major: component `s` (order phi1, phi2, chi1, chi2) occupies
/// the contiguous block `s * sites .. (s + 1) * sites`, sites in x-major order. The
/// discrete norm is `ell^d sum |psi|^2` over the `d` active axes.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    spec: LatticeSpec,
    amps: Vec<C64>,
}

impl SpinorField {
    pub fn zeros(spec: LatticeSpec) -> Self {
        let n = 4 * spec.sites();
        SpinorField {
            spec,
            amps: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn from_amplitudes(spec: LatticeSpec, amps: Vec<C64>) -> Result<Self> {
        let expected = 4 * spec.sites();
        if amps.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: amps.len(),
            });
        }
        Ok(SpinorField { spec, amps })
    }

    /// Samples `f(centroid)` at every site.
    pub fn from_fn(spec: LatticeSpec, f: impl Fn([f64; 3]) -> [C64; 4] + Sync + Send) -> Self {
        let sites = spec.sites();
        let values = exec::map_collect(sites, |site| f(spec.site_centroid(site)));
        let mut amps = vec![C64::new(0.0, 0.0); 4 * sites];
        for (site, v) in values.into_iter().enumerate() {
            for (s, a) in v.into_iter().enumerate() {
                amps[s * sites + site] = a;
            }
        }
        SpinorField { spec, amps }
    }

    /// A single spike of height `value` in component `component` at `index`.
    pub fn spike(
        spec: LatticeSpec,
        component: usize,
        index: [usize; 3],
        value: C64,
    ) -> Result<Self> {
        spec.check_index(index)?;
        if component >= 4 {
            return Err(Error::InvalidLattice(format!(
                "spinor component {component} out of range"
            )));
        }
        let mut f = Self::zeros(spec);
        let site = f.spec.site_index(index);
        let sites = f.spec.sites();
        f.amps[component * sites + site] = value;
        Ok(f)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn component(&self, s: usize) -> &[C64] {
        let n = self.spec.sites();
        &self.amps[s * n..(s + 1) * n]
    }

    pub fn get(&self, component: usize, index: [usize; 3]) -> C64 {
        self.amps[component * self.spec.sites() + self.spec.site_index(index)]
    }

    pub fn set(&mut self, component: usize, index: [usize; 3], value: C64) {
        let i = component * self.spec.sites() + self.spec.site_index(index);
        self.amps[i] = value;
    }

    /// The four components at one site.
    pub fn spinor(&self, site: usize) -> [C64; 4] {
        let n = self.spec.sites();
        std::array::from_fn(|s| self.amps[s * n + site])
    }

    /// `sum |psi|^2` without the cell volume.
    pub fn sum_sq(&self) -> f64 {
        let amps = &self.amps;
        exec::sum_by_chunks(amps.len(), |r| amps[r].iter().map(|z| z.norm_sqr()).sum())
    }

    /// Discrete norm `ell^d sum |psi|^2`.
    pub fn norm(&self) -> f64 {
        self.spec.cell_volume() * self.sum_sq()
    }

    /// Discrete inner product `ell^d sum conj(self) other`.
    pub fn inner(&self, other: &SpinorField) -> Result<C64> {
        if other.amps.len() != self.amps.len() {
            return Err(Error::LengthMismatch {
                expected: self.amps.len(),
                got: other.amps.len(),
            });
        }
        let (a, b) = (&self.amps, &other.amps);
        let sum = exec::sum_by_chunks_complex(a.len(), |r| {
            a[r.clone()]
                .iter()
                .zip(&b[r])
                .map(|(x, y)| x.conj() * y)
                .sum()
        });
        Ok(sum * self.spec.cell_volume())
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / norm.sqrt();
        exec::for_each_chunk_mut(&mut self.amps, 1024, |_, c| {
            c.iter_mut().for_each(|z| *z *= scale)
        });
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn scale(&mut self, factor: C64) {
        exec::for_each_chunk_mut(&mut self.amps, 1024, |_, c| {
            c.iter_mut().for_each(|z| *z *= factor)
        });
    }

    /// Position expectation value (over active axes; collapsed axes report the origin).
    pub fn mean_position(&self) -> [f64; 3] {
        let n = self.spec.sites();
        let weights: Vec<f64> = exec::map_collect(n, |site| {
            (0..4).map(|s| self.amps[s * n + site].norm_sqr()).sum()
        });
        let total: f64 = weights.iter().sum();
        let mut mean = [0.0; 3];
        if total == 0.0 {
            return mean;
        }
        for (site, w) in weights.iter().enumerate() {
            let x = self.spec.site_centroid(site);
            for a in 0..3 {
                mean[a] += w * x[a];
            }
        }
        mean.map(|m| m / total)
    }

    pub fn max_abs_diff(&self, other: &SpinorField) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest amplitude deviation after removing the best global phase between the two.
    pub fn max_abs_diff_phase_aligned(&self, other: &SpinorField) -> f64 {
        let overlap: C64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    /// Fidelity `|<self|other>|^2` of the two fields after normalizing both.
    pub fn fidelity(&self, other: &SpinorField) -> Result<f64> {
        let ov = self.inner(other)?;
        let n = self.norm() * other.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(ov.norm_sqr() / n)
    }

    /// Piecewise-constant transfer onto the `2^levels` finer staggered lattice. The
    /// amplitudes are densities, so the discrete norm is unchanged.
    pub fn refine(&self, levels: u32) -> Result<SpinorField> {
        let fine_spec = self.spec.refine(levels)?;
        let factor = 1usize << levels;
        let active = [0, 1, 2].map(|a| self.spec.qubits()[a] > 0);
        let coarse = &self.spec;
        let mut fine = SpinorField::zeros(fine_spec);
        let fine_sites = fine.spec.sites();
        let coarse_sites = coarse.sites();
        for site in 0..fine_sites {
            let idx = fine.spec.site_coords(site);
            let c_idx = std::array::from_fn(|a| if active[a] { idx[a] / factor } else { idx[a] });
            let c_site = coarse.site_index(c_idx);
            for s in 0..4 {
                fine.amps[s * fine_sites + site] = self.amps[s * coarse_sites + c_site];
            }
        }
        Ok(fine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(spec: LatticeSpec, seed: u64) -> SpinorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4 * spec.sites();
        let amps = (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        SpinorField::from_amplitudes(spec, amps).unwrap()
    }

    #[test]
    fn spike_normalizes_to_inverse_cell_volume() {
        let spec = LatticeSpec::new([3, 3, 3], 0.5, 1.0).unwrap();
        let f = SpinorField::spike(spec, 2, [1, 2, 3], C64::new(7.0, -3.0))
            .unwrap()
            .normalized()
            .unwrap();
        let expected = 0.5f64.powf(-1.5);
        assert!((f.get(2, [1, 2, 3]).norm() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn normalize_is_idempotent_and_rejects_zero() {
        let spec = LatticeSpec::new([2, 2, 0], 0.3, 1.0).unwrap();
        let f = random_field(spec.clone(), 1).normalized().unwrap();
        let g = f.clone().normalized().unwrap();
        assert!(f.max_abs_diff(&g) < 1e-14);
        assert!(matches!(
            SpinorField::zeros(spec).normalize(),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn refine_keeps_norm() {
        let spec = LatticeSpec::new([3, 0, 2], 0.25, 0.5).unwrap();
        let f = random_field(spec, 3).normalized().unwrap();
        let fine = f.refine(1).unwrap();
        assert_eq!(fine.spec().qubits(), [4, 0, 3]);
        assert!((fine.norm() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn normalized_random_fields(seed in 0u64..1000, nx in 1u32..4, ny in 0u32..3, ell in 0.05f64..2.0) {
            let spec = LatticeSpec::new([nx, ny, 1], ell, 1.0).unwrap();
            let f = random_field(spec, seed).normalized().unwrap();
            let direct: f64 = f.amplitudes().iter().map(|z| z.norm_sqr()).sum::<f64>() * f.spec().cell_volume();
            prop_assert!((direct - 1.0).abs() < 1e-12);
            let bound = f.spec().cell_volume().powf(-0.5) * (1.0 + 1e-12);
            prop_assert!(f.amplitudes().iter().all(|z| z.norm() <= bound));
        }
    }
}
