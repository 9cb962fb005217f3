use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use super::euler::field_rotation;
use super::DiracMatrices;
use crate::exec::{self, SharedMut};
use crate::lattice::{Axis, Potentials, SpinorField};
use crate::linalg::{Mat2, Mat4};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Replaces each site spinor `psi` by `f(site, psi)`.
pub(crate) fn map_spinors<F>(field: &mut SpinorField, f: F)
where
    F: Fn(usize, [C64; 4]) -> [C64; 4] + Send + Sync,
{
    let n = field.spec().sites();
    let ptr = SharedMut::new(field.amplitudes_mut());
    exec::for_each_index(n, move |site| {
        // SAFETY: each site owns the four indices `s * n + site`, disjoint across sites.
        unsafe {
            let psi = std::array::from_fn(|s| *ptr.at(s * n + site));
            let out = f(site, psi);
            for (s, v) in out.into_iter().enumerate() {
                *ptr.at(s * n + site) = v;
            }
        }
    });
}

/// Multiplies all four components of each site by `phases[site]`.
fn apply_site_phases(field: &mut SpinorField, phases: &[C64]) {
    let n = field.spec().sites();
    exec::for_each_chunk_mut(field.amplitudes_mut(), n, |_, comp| {
        comp.iter_mut().zip(phases).for_each(|(z, p)| *z *= p);
    });
}

/// Exact streaming along `axis` by `l` sites on a periodic lattice: the upper
/// components move to lower indices (`phi'[i] = phi[i + l]`) and the lower components
/// to higher ones (`chi'[i] = chi[i - l]`).
pub fn stream(field: &mut SpinorField, axis: Axis, l: i64) {
    let spec = field.spec();
    let points = spec.axis_points(axis);
    if points == 1 {
        return;
    }
    let p = spec.points();
    let inner: usize = p[axis.index() + 1..].iter().product();
    let row = points * inner;
    let rows_per_component = spec.sites() / row;
    let shift = (l.rem_euclid(points as i64) as usize) * inner;
    if shift == 0 {
        return;
    }
    exec::for_each_chunk_mut(field.amplitudes_mut(), row, |r, chunk| {
        if r / rows_per_component < 2 {
            chunk.rotate_left(shift);
        } else {
            chunk.rotate_right(shift);
        }
    });
}

/// Multiplies every site spinor by `S_a` (forward) or `S_a^dagger` (inverse).
pub fn spin_rotate(field: &mut SpinorField, axis: Axis, direction: Direction) {
    let m = DiracMatrices::new();
    let s = match direction {
        Direction::Forward => *m.rotation(axis),
        Direction::Inverse => m.rotation(axis).adjoint(),
    };
    map_spinors(field, move |_, psi| s.apply(&psi));
}

/// `exp(-i dt beta m c^2)`: upper components get `e^{-i m c^2 dt}`, lower `e^{+i m c^2 dt}`.
pub fn apply_mass(field: &mut SpinorField, mass: f64, dt_eff: f64) {
    if mass == 0.0 {
        return;
    }
    let c = field.spec().light_speed();
    let phase = C64::from_polar(1.0, -mass * c * c * dt_eff);
    let n = field.spec().sites();
    exec::for_each_chunk_mut(field.amplitudes_mut(), n, |s, comp| {
        let p = if s < 2 { phase } else { phase.conj() };
        comp.iter_mut().for_each(|z| *z *= p);
    });
}

/// `exp(-i dt e V(x, t))` at every site centroid.
pub fn apply_scalar_potential(
    field: &mut SpinorField,
    potentials: &Potentials,
    t: f64,
    dt_eff: f64,
) -> Result<()> {
    if potentials.scalar.is_zero() {
        return Ok(());
    }
    let spec = field.spec().clone();
    let e = potentials.charge;
    let values: Vec<Result<f64>> = exec::map_collect(spec.sites(), |site| {
        potentials.scalar.at_site(&spec, site, t)
    });
    let phases = values
        .into_iter()
        .map(|v| v.map(|v| C64::from_polar(1.0, -e * v * dt_eff)))
        .collect::<Result<Vec<_>>>()?;
    apply_site_phases(field, &phases);
    Ok(())
}

/// Block-diagonal form of `exp(+i e dt alpha.A)`: in Weyl variables `u = (phi + chi)/sqrt2`,
/// `v = (phi - chi)/sqrt2` it acts as `Q^dagger` on `u` and `Q` on `v`, with
/// `Q = exp(-i e dt sigma.A)`.
pub(crate) fn vector_potential_matrix(q: &Mat2) -> Mat4 {
    let qd = q.adjoint();
    let mut m = Mat4::zeros();
    // Conjugate the Weyl block-diagonal operator back to the Dirac representation.
    let h = FRAC_1_SQRT_2 * FRAC_1_SQRT_2;
    for i in 0..2 {
        for j in 0..2 {
            let plus = (qd.at(i, j) + q.at(i, j)) * h;
            let minus = (qd.at(i, j) - q.at(i, j)) * h;
            m.0[i][j] = plus;
            m.0[i + 2][j + 2] = plus;
            m.0[i][j + 2] = minus;
            m.0[i + 2][j] = minus;
        }
    }
    m
}

/// `exp(+i e dt alpha.A(x, t))` at every site; homogeneous potentials use one matrix.
pub fn apply_vector_potential(
    field: &mut SpinorField,
    potentials: &Potentials,
    t: f64,
    dt_eff: f64,
) -> Result<()> {
    let e = potentials.charge;
    if potentials.magnetic_mode() {
        let spec = field.spec().clone();
        let per_site: Vec<Result<Mat4>> = exec::map_collect(spec.sites(), |site| {
            let x = spec.site_centroid(site);
            let a = potentials.vector.at(x, t);
            crate::lattice::check_finite3(a, x, t)?;
            Ok(vector_potential_matrix(&field_rotation(a, dt_eff, e)))
        });
        let mats = per_site.into_iter().collect::<Result<Vec<_>>>()?;
        map_spinors(field, move |site, psi| mats[site].apply(&psi));
    } else {
        if potentials.vector.is_zero() {
            return Ok(());
        }
        let a = potentials.vector.uniform(t)?;
        let m = vector_potential_matrix(&field_rotation(a, dt_eff, e));
        map_spinors(field, move |_, psi| m.apply(&psi));
    }
    Ok(())
}
