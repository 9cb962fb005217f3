//! Small dense complex matrices used for spin-space operators and gate matrices.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Mat<N> {
    pub const fn zeros() -> Self {
        Mat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diagonal(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    #[inline]
    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for i in 0..N {
            let mut acc = ZERO;
            for j in 0..N {
                acc += self.0[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `M M^dagger - 1` in absolute value.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_diagonal(&self) -> bool {
        (0..N).all(|i| (0..N).all(|j| i == j || self.0[i][j] == ZERO))
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat([[a, b], [c, d]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Spectral norm, from the closed form of the 2x2 singular values.
    pub fn operator_norm(&self) -> f64 {
        let f2: f64 = self.0.iter().flatten().map(|z| z.norm_sqr()).sum();
        let d = self.det().norm();
        let disc = (f2 * f2 - 4.0 * d * d).max(0.0).sqrt();
        ((f2 + disc) / 2.0).sqrt()
    }

    pub fn pauli_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Mat([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, -1.0]])
    }

    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real([[s, s], [s, -s]])
    }

    pub fn rx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Mat([
            [C64::new(c, 0.0), C64::new(0.0, -s)],
            [C64::new(0.0, -s), C64::new(c, 0.0)],
        ])
    }

    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::from_real([[c, -s], [s, c]])
    }

    pub fn rz(theta: f64) -> Self {
        Self::diagonal([
            C64::from_polar(1.0, -theta / 2.0),
            C64::from_polar(1.0, theta / 2.0),
        ])
    }

    pub fn phase(theta: f64) -> Self {
        Self::diagonal([ONE, C64::from_polar(1.0, theta)])
    }

    /// Distance between two unitaries after the best global phase alignment,
    /// `min_phi || U - e^{i phi} V ||` in operator norm.
    pub fn phase_invariant_distance(&self, other: &Self) -> f64 {
        // The optimal phase centres the eigenphases of U^dag V; differencing the
        // aligned matrices keeps full precision for nearby unitaries.
        let tr = (self.adjoint() * *other).trace();
        let align = if tr.norm() > 0.0 {
            C64::from_polar(1.0, -tr.arg())
        } else {
            ONE
        };
        (*self - other.scale(align)).operator_norm()
    }

    /// Factors a unitary as `e^{i gamma} Rz(delta) Ry(theta) Rz(xi)`.
    pub fn zyz(&self) -> Zyz {
        let det = self.det();
        let gamma = det.arg() / 2.0;
        let v = self.scale(C64::from_polar(1.0, -gamma));
        let (a, b) = (v.0[0][0], v.0[1][0]);
        let theta = 2.0 * b.norm().atan2(a.norm());
        let sum_half = if a.norm() > 1e-300 { -a.arg() } else { 0.0 };
        let diff_half = if b.norm() > 1e-300 { b.arg() } else { 0.0 };
        let zyz = Zyz {
            global_phase: gamma,
            delta: sum_half + diff_half,
            theta,
            xi: sum_half - diff_half,
        };
        // The phase of det only fixes gamma modulo pi; settle the sign explicitly.
        if zyz.to_matrix().max_abs_diff(self) > 1e-6 {
            Zyz {
                global_phase: gamma + std::f64::consts::PI,
                ..zyz
            }
        } else {
            zyz
        }
    }

    pub fn kron(&self, other: &Mat2) -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = self.0[i][j] * other.0[k][l];
                    }
                }
            }
        }
        m
    }
}

/// `e^{i global_phase} Rz(delta) Ry(theta) Rz(xi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zyz {
    pub global_phase: f64,
    pub delta: f64,
    pub theta: f64,
    pub xi: f64,
}

impl Zyz {
    pub fn to_matrix(&self) -> Mat2 {
        (Mat2::rz(self.delta) * Mat2::ry(self.theta) * Mat2::rz(self.xi))
            .scale(C64::from_polar(1.0, self.global_phase))
    }
}

/// Builds a 4x4 matrix from 2x2 blocks `[[a, b], [c, d]]`.
pub fn block4(a: Mat2, b: Mat2, c: Mat2, d: Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for (bi, row) in [[a, b], [c, d]].iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    m.0[2 * bi + i][2 * bj + j] = blk.0[i][j];
                }
            }
        }
    }
    m
}
