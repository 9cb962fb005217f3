use std::fmt;
use std::sync::Arc;

use super::LatticeSpec;
use crate::{Error, Result};

type TimeFn = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;
type FieldFn = Arc<dyn Fn([f64; 3], f64) -> [f64; 3] + Send + Sync>;
type ScalarFn = Arc<dyn Fn([f64; 3], f64) -> f64 + Send + Sync>;

/// Vector potential `A`. Every variant except [`VectorPotential::SpaceDependent`] is
/// homogeneous in space; the space-dependent one switches the solvers to the
/// site-local (magnetic) path.
#[derive(Clone, Default)]
pub enum VectorPotential {
    #[default]
    Zero,
    Constant([f64; 3]),
    /// `A(t) = amplitude * cos(omega t + phase)`.
    Oscillating {
        amplitude: [f64; 3],
        omega: f64,
        phase: f64,
    },
    Homogeneous(TimeFn),
    SpaceDependent(FieldFn),
}

impl VectorPotential {
    pub fn homogeneous(f: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        VectorPotential::Homogeneous(Arc::new(f))
    }

    pub fn space_dependent(f: impl Fn([f64; 3], f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        VectorPotential::SpaceDependent(Arc::new(f))
    }

    pub fn is_space_dependent(&self) -> bool {
        matches!(self, VectorPotential::SpaceDependent(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            VectorPotential::Zero => true,
            VectorPotential::Constant(a) => a.iter().all(|&x| x == 0.0),
            _ => false,
        }
    }

    /// Value at `position`, time `t`.
    pub fn at(&self, position: [f64; 3], t: f64) -> [f64; 3] {
        match self {
            VectorPotential::Zero => [0.0; 3],
            VectorPotential::Constant(a) => *a,
            VectorPotential::Oscillating {
                amplitude,
                omega,
                phase,
            } => {
                let c = (omega * t + phase).cos();
                amplitude.map(|a| a * c)
            }
            VectorPotential::Homogeneous(f) => f(t),
            VectorPotential::SpaceDependent(f) => f(position, t),
        }
    }

    /// Value of a homogeneous potential; errors for the space-dependent variant.
    pub fn uniform(&self, t: f64) -> Result<[f64; 3]> {
        if self.is_space_dependent() {
            return Err(Error::Unsupported(
                "space-dependent vector potential has no uniform value".into(),
            ));
        }
        let a = self.at([0.0; 3], t);
        check_finite3(a, [0.0; 3], t)?;
        Ok(a)
    }
}

impl fmt::Debug for VectorPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorPotential::Zero => write!(f, "Zero"),
            VectorPotential::Constant(a) => write!(f, "Constant({a:?})"),
            VectorPotential::Oscillating {
                amplitude,
                omega,
                phase,
            } => {
                write!(
                    f,
                    "Oscillating {{ amplitude: {amplitude:?}, omega: {omega}, phase: {phase} }}"
                )
            }
            VectorPotential::Homogeneous(_) => write!(f, "Homogeneous(<fn>)"),
            VectorPotential::SpaceDependent(_) => write!(f, "SpaceDependent(<fn>)"),
        }
    }
}

/// Scalar potential `V(x, t)`.
#[derive(Clone, Default)]
pub enum ScalarPotential {
    #[default]
    Zero,
    Constant(f64),
    /// Uniform electric field: `V = -x . E cos(omega t)`.
    Linear {
        field: [f64; 3],
        omega: f64,
    },
    /// One value per lattice site in x-major order, constant in time.
    Tabulated(Arc<[f64]>),
    Custom(ScalarFn),
}

impl ScalarPotential {
    pub fn custom(f: impl Fn([f64; 3], f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarPotential::Custom(Arc::new(f))
    }

    pub fn tabulated(values: impl Into<Arc<[f64]>>) -> Self {
        ScalarPotential::Tabulated(values.into())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarPotential::Zero => true,
            ScalarPotential::Constant(v) => *v == 0.0,
            ScalarPotential::Linear { field, .. } => field.iter().all(|&e| e == 0.0),
            _ => false,
        }
    }

    /// Electric field `E(t)` of the linear variant.
    pub fn linear_field(&self, t: f64) -> Option<[f64; 3]> {
        match self {
            ScalarPotential::Linear { field, omega } => {
                let c = (omega * t).cos();
                Some(field.map(|e| e * c))
            }
            _ => None,
        }
    }

    /// Value at lattice site `site` (centroid `x`) and time `t`.
    pub fn at_site(&self, spec: &LatticeSpec, site: usize, t: f64) -> Result<f64> {
        let x = spec.site_centroid(site);
        let v = match self {
            ScalarPotential::Zero => 0.0,
            ScalarPotential::Constant(v) => *v,
            ScalarPotential::Linear { .. } => {
                let e = self.linear_field(t).unwrap_or_default();
                -(x[0] * e[0] + x[1] * e[1] + x[2] * e[2])
            }
            ScalarPotential::Tabulated(table) => {
                if table.len() != spec.sites() {
                    return Err(Error::LengthMismatch {
                        expected: spec.sites(),
                        got: table.len(),
                    });
                }
                table[site]
            }
            ScalarPotential::Custom(f) => f(x, t),
        };
        if !v.is_finite() {
            return Err(Error::NonFinitePotential {
                position: x,
                time: t,
            });
        }
        Ok(v)
    }
}

impl fmt::Debug for ScalarPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarPotential::Zero => write!(f, "Zero"),
            ScalarPotential::Constant(v) => write!(f, "Constant({v})"),
            ScalarPotential::Linear { field, omega } => {
                write!(f, "Linear {{ field: {field:?}, omega: {omega} }}")
            }
            ScalarPotential::Tabulated(t) => write!(f, "Tabulated({} values)", t.len()),
            ScalarPotential::Custom(_) => write!(f, "Custom(<fn>)"),
        }
    }
}

/// Mass, charge and external fields of one problem, in units with `hbar = 1`.
#[derive(Clone, Debug)]
pub struct Potentials {
    pub mass: f64,
    /// Particle charge `e`; `-1` for an electron.
    pub charge: f64,
    pub vector: VectorPotential,
    pub scalar: ScalarPotential,
}

impl Default for Potentials {
    fn default() -> Self {
        Potentials::free(0.0)
    }
}

impl Potentials {
    pub fn free(mass: f64) -> Self {
        Potentials {
            mass,
            charge: -1.0,
            vector: VectorPotential::Zero,
            scalar: ScalarPotential::Zero,
        }
    }

    pub fn with_vector(mut self, vector: VectorPotential) -> Self {
        self.vector = vector;
        self
    }

    pub fn with_scalar(mut self, scalar: ScalarPotential) -> Self {
        self.scalar = scalar;
        self
    }

    pub fn with_charge(mut self, charge: f64) -> Self {
        self.charge = charge;
        self
    }

    /// True when `A` depends on position and needs site-local treatment.
    pub fn magnetic_mode(&self) -> bool {
        self.vector.is_space_dependent()
    }
}

pub(crate) fn check_finite3(v: [f64; 3], position: [f64; 3], time: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinitePotential { position, time })
    }
}
