//! Reference split-operator solver acting directly on a [`SpinorField`].
//!
//! [`SpinorField`]: crate::lattice::SpinorField

mod euler;
mod ops;
mod solver;

pub use euler::{euler_angles, field_rotation, EulerAngles};
pub use ops::{
    apply_mass, apply_scalar_potential, apply_vector_potential, spin_rotate, stream, Direction,
};
pub use solver::{step, ClassicalSolver};

use std::f64::consts::FRAC_1_SQRT_2;

use crate::lattice::Axis;
use crate::linalg::{block4, Mat2, Mat4};

/// Dirac matrices in the Dirac representation, the streaming rotations
/// `S_a = (beta + alpha_a)/sqrt(2)` and `alpha` in the Weyl representation.
#[derive(Clone, Debug)]
pub struct DiracMatrices {
    pub alpha: [Mat4; 3],
    pub beta: Mat4,
    pub rotation: [Mat4; 3],
    pub weyl_alpha: [Mat4; 3],
    /// `H (x) 1`, the change of basis between the two representations.
    pub weyl_transform: Mat4,
}

impl Default for DiracMatrices {
    fn default() -> Self {
        Self::new()
    }
}

impl DiracMatrices {
    pub fn new() -> Self {
        let sigma = [Mat2::pauli_x(), Mat2::pauli_y(), Mat2::pauli_z()];
        let zero = Mat2::zeros();
        let one = Mat2::identity();
        let beta = block4(one, zero, zero, one.scale((-1.0).into()));
        let alpha = sigma.map(|s| block4(zero, s, s, zero));
        let rotation = alpha.map(|a| (beta + a).scale(FRAC_1_SQRT_2.into()));
        let weyl_alpha = sigma.map(|s| block4(s, zero, zero, s.scale((-1.0).into())));
        let weyl_transform = Mat2::hadamard().kron(&one);
        DiracMatrices {
            alpha,
            beta,
            rotation,
            weyl_alpha,
            weyl_transform,
        }
    }

    pub fn rotation(&self, axis: Axis) -> &Mat4 {
        &self.rotation[axis.index()]
    }

    /// Largest deviation over the identities the solver relies on: `S_a^2 = 1`,
    /// `S_a` Hermitian, `S_a alpha_a S_a = beta`, and the Weyl transform of `alpha_a`.
    pub fn identity_defect(&self) -> f64 {
        let id = Mat4::identity();
        let w = self.weyl_transform;
        (0..3)
            .flat_map(|a| {
                let s = self.rotation[a];
                [
                    (s * s).max_abs_diff(&id),
                    s.max_abs_diff(&s.adjoint()),
                    (s.adjoint() * self.alpha[a] * s).max_abs_diff(&self.beta),
                    (w * self.alpha[a] * w).max_abs_diff(&self.weyl_alpha[a]),
                ]
            })
            .fold(0.0, f64::max)
    }
}
