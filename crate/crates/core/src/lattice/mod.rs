//! Lattice geometry, the discretized spinor field and the external potentials.

mod field;
mod potentials;
pub mod snapshot;

pub use field::SpinorField;
pub(crate) use potentials::check_finite3;
pub use potentials::{Potentials, ScalarPotential, VectorPotential};

use crate::{Error, Result};

/// Spatial axis of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

/// Grid geometry plus the time step tied to it by the CFL lock `c dt = n_star ell`.
///
/// Boundaries are periodic. An axis with zero qubits is collapsed to a single site and
/// does not take part in streaming, which gives the 1-D and 2-D settings.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    qubits: [u32; 3],
    ell: f64,
    n_star_halves: u32,
    light_speed: f64,
    dt: f64,
    origin: [f64; 3],
}

/// Largest qubit count per axis. Lattices too large to enumerate their sites can still
/// be used to build and count circuits; `points` and `sites` panic on them.
const MAX_AXIS_QUBITS: u32 = 128;

fn axis_size(n: u32) -> usize {
    1usize.checked_shl(n).expect("axis too large to enumerate its points")
}

impl LatticeSpec {
    /// Builds a lattice with `2^qubits[a]` points per axis, cell size `ell` and CFL
    /// multiplier `n_star`, which must be a positive multiple of 1/2.
    pub fn new(qubits: [u32; 3], ell: f64, n_star: f64) -> Result<Self> {
        if qubits.iter().all(|&n| n == 0) {
            return Err(Error::InvalidLattice(
                "at least one axis needs a qubit".into(),
            ));
        }
        if let Some(n) = qubits.iter().find(|&&n| n > MAX_AXIS_QUBITS) {
            return Err(Error::InvalidLattice(format!(
                "{n} qubits on one axis is too many"
            )));
        }
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "cell size must be positive, got {ell}"
            )));
        }
        let halves = 2.0 * n_star;
        if !(n_star.is_finite()
            && n_star > 0.0
            && halves == halves.round()
            && halves <= u32::MAX as f64)
        {
            return Err(Error::InvalidCflMultiplier(n_star));
        }
        let n_star_halves = halves as u32;
        Ok(LatticeSpec {
            qubits,
            ell,
            n_star_halves,
            light_speed: 1.0,
            dt: n_star * ell,
            origin: [0.0; 3],
        })
    }

    pub fn with_origin(mut self, origin: [f64; 3]) -> Self {
        self.origin = origin;
        self
    }

    /// Changes the speed of light; the time step follows from the CFL lock.
    pub fn with_light_speed(mut self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "speed of light must be positive, got {c}"
            )));
        }
        self.light_speed = c;
        self.dt = self.n_star() * self.ell / c;
        Ok(self)
    }

    pub fn qubits(&self) -> [u32; 3] {
        self.qubits
    }

    pub fn axis_qubits(&self, axis: Axis) -> u32 {
        self.qubits[axis.index()]
    }

    /// Panics if an axis has `usize::BITS` or more qubits.
    pub fn points(&self) -> [usize; 3] {
        self.qubits.map(axis_size)
    }

    pub fn axis_points(&self, axis: Axis) -> usize {
        axis_size(self.qubits[axis.index()])
    }

    pub fn is_active(&self, axis: Axis) -> bool {
        self.qubits[axis.index()] > 0
    }

    pub fn active_axes(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|&a| self.is_active(a))
    }

    /// Number of spatial dimensions (axes with at least one qubit).
    pub fn dims(&self) -> u32 {
        self.qubits.iter().filter(|&&n| n > 0).count() as u32
    }

    /// Panics if `2^(total position qubits)` does not fit in `usize`.
    pub fn sites(&self) -> usize {
        let total = self.total_position_qubits();
        assert!(
            total < usize::BITS,
            "a lattice with {total} position qubits cannot enumerate its sites"
        );
        1usize << total
    }

    /// Errors unless site tables of this lattice fit in memory.
    pub fn check_enumerable(&self) -> Result<usize> {
        let total = self.total_position_qubits();
        if total > crate::qcore::MAX_QUBITS as u32 {
            return Err(Error::Unsupported(format!(
                "{total} position qubits are too many to tabulate sites"
            )));
        }
        Ok(self.sites())
    }

    pub fn total_position_qubits(&self) -> u32 {
        self.qubits.iter().sum()
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_star(&self) -> f64 {
        self.n_star_halves as f64 / 2.0
    }

    pub fn n_star_halves(&self) -> u32 {
        self.n_star_halves
    }

    pub fn light_speed(&self) -> f64 {
        self.light_speed
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    /// Volume of one cell in the active dimensions, `ell^d`.
    pub fn cell_volume(&self) -> f64 {
        self.ell.powi(self.dims() as i32)
    }

    /// Linear site index of `(i, j, k)` in x-major order.
    #[inline]
    pub fn site_index(&self, [i, j, k]: [usize; 3]) -> usize {
        let [_, ny, nz] = self.points();
        (i * ny + j) * nz + k
    }

    #[inline]
    pub fn site_coords(&self, site: usize) -> [usize; 3] {
        let [_, ny, nz] = self.points();
        [site / (ny * nz), (site / nz) % ny, site % nz]
    }

    pub fn check_index(&self, index: [usize; 3]) -> Result<()> {
        let points = self.points();
        if index.iter().zip(points).any(|(&i, n)| i >= n) {
            return Err(Error::IndexOutOfRange { index, points });
        }
        Ok(())
    }

    /// Centre of cell `(i, j, k)`: `origin + (index + 1/2) ell` on each active axis.
    pub fn centroid(&self, index: [usize; 3]) -> Result<[f64; 3]> {
        self.check_index(index)?;
        Ok(self.centroid_unchecked(index))
    }

    #[inline]
    pub(crate) fn centroid_unchecked(&self, index: [usize; 3]) -> [f64; 3] {
        std::array::from_fn(|a| {
            if self.qubits[a] == 0 {
                self.origin[a]
            } else {
                self.origin[a] + (index[a] as f64 + 0.5) * self.ell
            }
        })
    }

    pub fn site_centroid(&self, site: usize) -> [f64; 3] {
        self.centroid_unchecked(self.site_coords(site))
    }

    /// Signed number of sites a streaming step with coefficient `s` moves,
    /// `s * n_star`, if that is an integer.
    pub fn shift_sites(&self, s: num_rational::Ratio<i64>) -> Result<i64> {
        let shift = s * num_rational::Ratio::new(self.n_star_halves as i64, 2);
        if shift.is_integer() {
            Ok(shift.to_integer())
        } else {
            Err(Error::NonIntegerShift {
                coefficient: s.to_string(),
                n_star: self.n_star(),
            })
        }
    }

    /// The staggered lattice with `2^levels` times finer resolution on every active
    /// axis and the same time step, so the CFL multiplier grows by `2^levels`.
    pub fn refine(&self, levels: u32) -> Result<Self> {
        let factor = 1u32 << levels;
        let mut qubits = self.qubits;
        for n in qubits.iter_mut().filter(|n| **n > 0) {
            *n += levels;
        }
        let mut spec = LatticeSpec::new(
            qubits,
            self.ell / factor as f64,
            self.n_star() * factor as f64,
        )?
        .with_origin(self.origin)
        .with_light_speed(self.light_speed)?;
        spec.dt = self.dt;
        Ok(spec)
    }
}
