use num_complex::Complex64 as C64;

use crate::linalg::Mat2;

/// `e^{i global_phase} Rz(delta) Ry(theta) Rz(xi)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EulerAngles {
    pub delta: f64,
    pub theta: f64,
    pub xi: f64,
    pub global_phase: f64,
}

impl EulerAngles {
    /// The rotation without its global phase.
    pub fn rotation(&self) -> Mat2 {
        Mat2::rz(self.delta) * Mat2::ry(self.theta) * Mat2::rz(self.xi)
    }

    pub fn to_matrix(&self) -> Mat2 {
        self.rotation()
            .scale(C64::from_polar(1.0, self.global_phase))
    }

    pub fn is_identity(&self) -> bool {
        self.delta == 0.0 && self.theta == 0.0 && self.xi == 0.0 && self.global_phase == 0.0
    }
}

/// `exp(-i e dt sigma.A)` in closed form.
pub fn field_rotation(a: [f64; 3], dt_eff: f64, charge: f64) -> Mat2 {
    let b = a.map(|x| charge * dt_eff * x);
    let len = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if len == 0.0 {
        return Mat2::identity();
    }
    let (s, c) = len.sin_cos();
    let n = b.map(|x| x / len);
    Mat2::new(
        C64::new(c, -s * n[2]),
        C64::new(-s * n[1], -s * n[0]),
        C64::new(s * n[1], -s * n[0]),
        C64::new(c, s * n[2]),
    )
}

/// Euler angles of `exp(-i e dt sigma.A)`.
///
/// The closed-form angles use `(delta + xi)/2 = atan(b_z tan|b| / |b|)` and
/// `(delta - xi)/2 = -atan2(b_x, b_y)` with `b = e dt A` and `atan2(0, 0) = 0`. When
/// the closed form does not reproduce the matrix (the cosine it divides by vanishes, or
/// `sin|b| < 0` flips the sign of the off-diagonal entry) the angles come from a generic
/// ZYZ factorization instead.
pub fn euler_angles(a: [f64; 3], dt_eff: f64, charge: f64) -> EulerAngles {
    let b = a.map(|x| charge * dt_eff * x);
    let len = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if len == 0.0 {
        return EulerAngles::default();
    }
    let target = field_rotation(a, dt_eff, charge);
    let half_sum = (b[2] / len * len.tan()).atan();
    // Signed zeros would make atan2 return +-pi; the degenerate direction maps to 0.
    let azimuth = if b[0] == 0.0 && b[1] == 0.0 {
        0.0
    } else {
        b[0].atan2(b[1])
    };
    let cos_half_sum = half_sum.cos();
    if cos_half_sum.abs() >= 1e-14 {
        let theta = 2.0 * (len.cos() / cos_half_sum).clamp(-1.0, 1.0).acos();
        let mut angles = EulerAngles {
            delta: half_sum - azimuth,
            theta,
            xi: half_sum + azimuth,
            global_phase: 0.0,
        };
        let overlap = (angles.rotation().adjoint() * target).trace();
        angles.global_phase = overlap.arg();
        if angles.to_matrix().max_abs_diff(&target) <= 1e-10 {
            return angles;
        }
    }
    let z = target.zyz();
    EulerAngles {
        delta: z.delta,
        theta: z.theta,
        xi: z.xi,
        global_phase: z.global_phase,
    }
}
