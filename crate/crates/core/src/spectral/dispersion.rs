use nalgebra::Matrix4;
use num_complex::Complex64 as C64;

use crate::classical::DiracMatrices;
use crate::lattice::{Axis, LatticeSpec};
use crate::linalg::Mat4;
use crate::splitting::{OperatorTag, SplittingScheme};
use crate::{Error, Result};

/// Branch energies of the one-step operator along a line through the Brillouin zone.
#[derive(Clone, Debug)]
pub struct DispersionResult {
    pub axis: Axis,
    pub momenta: Vec<f64>,
    /// `E dt = i ln(lambda)` for the four eigenvalues, ascending at each momentum.
    pub energies: Vec<[f64; 4]>,
    /// Largest `| |lambda| - 1 |` seen.
    pub modulus_defect: f64,
    /// Interior momenta (away from `p = 0` and the zone edge) where some branch vanishes.
    pub doublers: Vec<f64>,
}

/// Plane-wave symbol `U(dt, p)` of one free step: each streaming factor becomes
/// `S_a diag(e^{i p_a L}, e^{i p_a L}, e^{-i p_a L}, e^{-i p_a L}) S_a^dagger` with
/// `L = coefficient * c dt`, and the mass factor `exp(-i beta m c^2 dt_eff)`.
/// The shift need not be a whole number of sites.
pub fn step_symbol(scheme: &SplittingScheme, spec: &LatticeSpec, mass: f64, p: [f64; 3]) -> Mat4 {
    let d = DiracMatrices::new();
    let c = spec.light_speed();
    let dt = spec.dt();
    let mut u = Mat4::identity();
    for s in scheme.operator_steps() {
        let w = *s.coefficient.numer() as f64 / *s.coefficient.denom() as f64;
        let factor = match s.tag {
            OperatorTag::X | OperatorTag::Y | OperatorTag::Z => {
                let axis = s.tag.streaming_axis().expect("streaming tag");
                if !spec.is_active(axis) {
                    continue;
                }
                let phase = C64::from_polar(1.0, p[axis.index()] * w * c * dt);
                let t = Mat4::diagonal([phase, phase, phase.conj(), phase.conj()]);
                let r = *d.rotation(axis);
                r * t * r.adjoint()
            }
            OperatorTag::Mass => {
                let ph = C64::from_polar(1.0, -mass * c * c * w * dt);
                Mat4::diagonal([ph, ph, ph.conj(), ph.conj()])
            }
            _ => continue,
        };
        u = factor * u;
    }
    u
}

fn eigenvalues(m: &Mat4) -> Result<[C64; 4]> {
    let dense = Matrix4::from_fn(|i, j| m.at(i, j));
    let ev = dense
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Unsupported("Schur form did not converge".into()))?;
    Ok([ev[0], ev[1], ev[2], ev[3]])
}

/// Scans `points` momenta of `(-pi/ell, pi/ell]` along `axis` for the free scheme.
pub fn dispersion(
    scheme: &SplittingScheme,
    spec: &LatticeSpec,
    mass: f64,
    axis: Axis,
    points: usize,
) -> Result<DispersionResult> {
    if points < 4 {
        return Err(Error::Unsupported(
            "dispersion scan needs at least 4 momenta".into(),
        ));
    }
    let ell = spec.ell();
    let dt = spec.dt();
    let dp = 2.0 * std::f64::consts::PI / (points as f64 * ell);
    let momenta: Vec<f64> = (0..points)
        .map(|j| -std::f64::consts::PI / ell + (j + 1) as f64 * dp)
        .collect();
    let mut energies = Vec::with_capacity(points);
    let mut modulus_defect = 0.0f64;
    for &p in &momenta {
        let mut k = [0.0; 3];
        k[axis.index()] = p;
        let lambdas = eigenvalues(&step_symbol(scheme, spec, mass, k))?;
        let mut e = lambdas.map(|l| {
            modulus_defect = modulus_defect.max((l.norm() - 1.0).abs());
            -l.arg() / dt
        });
        e.sort_by(f64::total_cmp);
        energies.push(e);
    }
    let gap: Vec<f64> = energies
        .iter()
        .map(|e| e.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min))
        .collect();
    // A zero shows up on the grid as a local minimum no deeper than one momentum step.
    let tol = 2.0 * spec.light_speed() * dp;
    let doublers = (1..points - 1)
        .filter(|&j| {
            let p = momenta[j];
            p.abs() > 1.5 * dp
                && p.abs() < std::f64::consts::PI / ell - 1.5 * dp
                && gap[j] <= gap[j - 1]
                && gap[j] <= gap[j + 1]
                && gap[j] < tol
        })
        .map(|j| momenta[j])
        .collect();
    Ok(DispersionResult {
        axis,
        momenta,
        energies,
        modulus_defect,
        doublers,
    })
}
