//! Gate-level circuits for one split-operator time step.
//!
//! Every builder returns a [`Circuit`] over the builder's [`RegisterLayout`]. Run on an
//! encoded field, the full time step reproduces [`ClassicalSolver::step`] exactly,
//! including global phases, which are carried in circuit metadata.
//!
//! [`ClassicalSolver::step`]: crate::classical::ClassicalSolver::step

use num_complex::Complex64 as C64;

use crate::classical::euler_angles;
use crate::lattice::{Axis, LatticeSpec, Potentials, ScalarPotential, SpinorField};
use crate::linalg::Mat2;
use crate::qcore::{
    decode_field, encode_field, mcx, Circuit, Control, Gate, GateKind, QuantumState,
    RegisterLayout, UniformlyControlledGate,
};
use crate::splitting::{OperatorTag, SplittingScheme};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftDirection {
    Increment,
    Decrement,
}

/// How the four spinor components map to qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinorEncoding {
    /// Two spinor wires holding all four components.
    Full,
    /// One spinor wire holding `(phi1, chi1)`; valid for 1-D motion along z with the
    /// other pair identically zero.
    Reduced1d,
}

/// Section labels used in time-step circuits.
pub mod section {
    pub const ROTATION: &str = "rotation";
    pub const WALK: &str = "walk";
    pub const MASS: &str = "mass";
    pub const SCALAR: &str = "scalar";
    pub const VECTOR: &str = "vector";
}

#[derive(Clone, Debug)]
pub struct DiracCircuitBuilder {
    spec: LatticeSpec,
    potentials: Potentials,
    layout: RegisterLayout,
    encoding: SpinorEncoding,
}

impl DiracCircuitBuilder {
    /// Full encoding with an ancilla pool as wide as the widest axis (`4n + 2` wires on
    /// a symmetric 3-D lattice).
    pub fn new(spec: LatticeSpec, potentials: Potentials) -> Result<Self> {
        Self::with_extra_ancillas(spec, potentials, &[])
    }

    /// Like [`new`](Self::new) plus named ancilla wires appended after the pool.
    pub fn with_extra_ancillas(
        spec: LatticeSpec,
        potentials: Potentials,
        extra: &[&str],
    ) -> Result<Self> {
        let pool = spec.qubits().into_iter().max().unwrap_or(0) as usize;
        let layout = RegisterLayout::for_lattice(&spec, 2, pool, extra)?;
        Ok(DiracCircuitBuilder {
            spec,
            potentials,
            layout,
            encoding: SpinorEncoding::Full,
        })
    }

    /// One spinor wire and the smallest pool the walk needs (`n_z - 2`), giving
    /// `2 n_z - 1` wires. Requires a z-only lattice and `A_x = A_y = 0`.
    pub fn reduced_1d(spec: LatticeSpec, potentials: Potentials, extra: &[&str]) -> Result<Self> {
        let [nx, ny, nz] = spec.qubits();
        if nx != 0 || ny != 0 || nz == 0 {
            return Err(Error::Unsupported(
                "reduced encoding needs a lattice along z only".into(),
            ));
        }
        let pool = mcx::mcx_ancillas_needed(nz as usize);
        let layout = RegisterLayout::for_lattice(&spec, 1, pool, extra)?;
        Ok(DiracCircuitBuilder {
            spec,
            potentials,
            layout,
            encoding: SpinorEncoding::Reduced1d,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn potentials(&self) -> &Potentials {
        &self.potentials
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn encoding(&self) -> SpinorEncoding {
        self.encoding
    }

    pub fn encode(&self, field: &SpinorField) -> Result<QuantumState> {
        encode_field(field, &self.layout)
    }

    pub fn decode(&self, state: &QuantumState) -> Result<SpinorField> {
        decode_field(state, &self.layout, &self.spec)
    }

    fn circuit(&self, label: &str) -> Circuit {
        Circuit::new(self.layout.n_qubits())
            .with_label(label)
            .with_ancillas(self.layout.ancillas())
    }

    /// `S_a = C(sigma_a) (H x 1) C(sigma_a)` on the spinor wires; `H` alone in the
    /// reduced encoding.
    pub fn spin_rotation(&self, axis: Axis) -> Result<Circuit> {
        let mut c = self.circuit(section::ROTATION);
        let s1 = self.layout.s1();
        match self.layout.s2() {
            Some(s2) => {
                let kind = match axis {
                    Axis::X => GateKind::X,
                    Axis::Y => GateKind::Y,
                    Axis::Z => GateKind::Z,
                };
                let cs = Gate::new(kind, s2).controlled_by(Control::on(s1));
                c.push(cs.clone())?;
                c.push(Gate::h(s1))?;
                c.push(cs)?;
            }
            None => {
                if axis != Axis::Z {
                    return Err(Error::Unsupported(
                        "reduced encoding streams along z only".into(),
                    ));
                }
                c.push(Gate::h(s1))?;
            }
        }
        Ok(c)
    }

    fn unit_shift_gates(
        &self,
        axis: Axis,
        direction: ShiftDirection,
        extra: &[Control],
    ) -> Result<Vec<Gate>> {
        let wires = self.layout.axis(axis);
        let n = wires.len();
        let needed = mcx::mcx_ancillas_needed(n.saturating_sub(1) + extra.len());
        if self.layout.pool().len() < needed {
            return Err(Error::InsufficientAncillas {
                needed,
                available: self.layout.pool().len(),
            });
        }
        let mut gates: Vec<Gate> = (0..n)
            .map(|b| {
                let mut controls: Vec<Control> =
                    wires[b + 1..].iter().map(|&w| Control::on(w)).collect();
                controls.extend_from_slice(extra);
                Gate::mcx(&controls, wires[b])
            })
            .collect();
        if direction == ShiftDirection::Decrement {
            gates.reverse();
        }
        Ok(gates)
    }

    /// `|v> -> |v +- l mod N_a>` on the axis block as `l` unit steps, each a cascade of
    /// multi-controlled X gates, most-controlled first.
    pub fn shift(&self, axis: Axis, l: u32, direction: ShiftDirection) -> Result<Circuit> {
        let mut c = self.circuit(section::WALK);
        let gates = self.unit_shift_gates(axis, direction, &[])?;
        for _ in 0..l {
            for g in &gates {
                c.push(g.clone())?;
            }
        }
        Ok(c)
    }

    /// Upper components shifted by `-l`, lower by `+l`, selected by `s1`.
    pub fn conditional_walk(&self, axis: Axis, l: i64) -> Result<Circuit> {
        let mut c = self.circuit(section::WALK);
        if self.spec.axis_qubits(axis) == 0 || l == 0 {
            return Ok(c);
        }
        let s1 = self.layout.s1();
        let on = [Control::on(s1)];
        let (upper, lower) = if l > 0 {
            (ShiftDirection::Decrement, ShiftDirection::Increment)
        } else {
            (ShiftDirection::Increment, ShiftDirection::Decrement)
        };
        let up = self.unit_shift_gates(axis, upper, &on)?;
        let down = self.unit_shift_gates(axis, lower, &on)?;
        // The upper block fires on s1 = 0; flipping s1 around it keeps every control
        // active-high.
        c.push(Gate::x(s1))?;
        for _ in 0..l.unsigned_abs() {
            for g in &up {
                c.push(g.clone())?;
            }
        }
        c.push(Gate::x(s1))?;
        for _ in 0..l.unsigned_abs() {
            for g in &down {
                c.push(g.clone())?;
            }
        }
        Ok(c)
    }

    /// `Rz(2 m c^2 dt)` on `s1`.
    pub fn mass_gate(&self, dt_eff: f64) -> Result<Circuit> {
        let mut c = self.circuit(section::MASS);
        let m = self.potentials.mass;
        if m != 0.0 {
            let cl = self.spec.light_speed();
            c.push(Gate::rz(self.layout.s1(), 2.0 * m * cl * cl * dt_eff))?;
        }
        Ok(c)
    }

    /// Homogeneous `Q_A` through the Weyl basis: `H` on `s1`, the Euler triples of
    /// `Q^dagger` (s1 = 0) and `Q` (s1 = 1) on `s2`, a phase fix on `s1`, `H` on `s1`.
    pub fn field_gate(&self, t: f64, dt_eff: f64) -> Result<Circuit> {
        if self.potentials.magnetic_mode() {
            return self.magnetic_field_gate(t, dt_eff);
        }
        let mut c = self.circuit(section::VECTOR);
        let a = self.potentials.vector.uniform(t)?;
        let e = self.potentials.charge;
        let s1 = self.layout.s1();
        let Some(s2) = self.layout.s2() else {
            if a[0] != 0.0 || a[1] != 0.0 {
                return Err(Error::Unsupported(
                    "reduced encoding needs A_x = A_y = 0".into(),
                ));
            }
            let angle = -2.0 * e * dt_eff * a[2];
            if angle != 0.0 {
                c.push(Gate::new(GateKind::Rx(angle), s1))?;
            }
            return Ok(c);
        };
        let ang = euler_angles(a, dt_eff, e);
        let mut body = Vec::new();
        let rot = |k: fn(f64) -> GateKind, theta: f64, ctl: Control| {
            (theta != 0.0).then(|| Gate::new(k(theta), s2).controlled_by(ctl))
        };
        let (lo, hi) = (Control::off(s1), Control::on(s1));
        body.extend(rot(GateKind::Rz, -ang.delta, lo));
        body.extend(rot(GateKind::Ry, -ang.theta, lo));
        body.extend(rot(GateKind::Rz, -ang.xi, lo));
        body.extend(rot(GateKind::Rz, ang.xi, hi));
        body.extend(rot(GateKind::Ry, ang.theta, hi));
        body.extend(rot(GateKind::Rz, ang.delta, hi));
        if ang.global_phase != 0.0 {
            body.push(Gate::rz(s1, 2.0 * ang.global_phase));
        }
        if !body.is_empty() {
            c.push(Gate::h(s1))?;
            for g in body {
                c.push(g)?;
            }
            c.push(Gate::h(s1))?;
        }
        Ok(c)
    }

    /// Site-local `Q_A` as a uniformly controlled gate over `s1` and all position
    /// wires; exponential in the number of position qubits.
    pub fn magnetic_field_gate(&self, t: f64, dt_eff: f64) -> Result<Circuit> {
        let mut c = self.circuit(section::VECTOR);
        let e = self.potentials.charge;
        let sites = self.spec.check_enumerable()?;
        let values: Vec<[f64; 3]> = (0..sites)
            .map(|site| {
                let x = self.spec.site_centroid(site);
                let a = self.potentials.vector.at(x, t);
                crate::lattice::check_finite3(a, x, t).map(|_| a)
            })
            .collect::<Result<_>>()?;
        let position = self.layout.position_wires();
        let s1 = self.layout.s1();
        match self.layout.s2() {
            Some(s2) => {
                let rotations: Vec<Mat2> = values
                    .iter()
                    .map(|&a| euler_angles(a, dt_eff, e).to_matrix())
                    .collect();
                let mut table: Vec<Mat2> = rotations.iter().map(Mat2::adjoint).collect();
                table.extend(rotations);
                let mut controls = vec![s1];
                controls.extend(&position);
                c.push(Gate::h(s1))?;
                c.push(UniformlyControlledGate::new(controls, s2, table)?)?;
                c.push(Gate::h(s1))?;
            }
            None => {
                if values.iter().any(|a| a[0] != 0.0 || a[1] != 0.0) {
                    return Err(Error::Unsupported(
                        "reduced encoding needs A_x = A_y = 0".into(),
                    ));
                }
                let table = values
                    .iter()
                    .map(|a| Mat2::rx(-2.0 * e * dt_eff * a[2]))
                    .collect();
                c.push(UniformlyControlledGate::new(position, s1, table)?)?;
            }
        }
        Ok(c)
    }

    /// Diagonal `exp(-i e V dt)` on the position wires.
    pub fn scalar_potential_gate(&self, t: f64, dt_eff: f64) -> Result<Circuit> {
        let mut c = self.circuit(section::SCALAR);
        let e = self.potentials.charge;
        match &self.potentials.scalar {
            ScalarPotential::Zero => {}
            ScalarPotential::Constant(v) => {
                if !v.is_finite() {
                    return Err(Error::NonFinitePotential {
                        position: [0.0; 3],
                        time: t,
                    });
                }
                c.add_global_phase(-e * v * dt_eff);
            }
            ScalarPotential::Linear { .. } => {
                let field = self.potentials.scalar.linear_field(t).unwrap_or_default();
                crate::lattice::check_finite3(field, [0.0; 3], t)?;
                let ell = self.spec.ell();
                let origin = self.spec.origin();
                let mut global = 0.0;
                for axis in Axis::ALL {
                    let k = axis.index();
                    if field[k] == 0.0 {
                        continue;
                    }
                    let wires = self.layout.axis(axis);
                    if wires.is_empty() {
                        global += e * dt_eff * field[k] * origin[k];
                        continue;
                    }
                    global += e * dt_eff * field[k] * (origin[k] + 0.5 * ell);
                    let n = wires.len();
                    for (b, &w) in wires.iter().enumerate() {
                        let weight = 2f64.powi((n - 1 - b) as i32);
                        c.push(Gate::phase(w, e * dt_eff * field[k] * ell * weight))?;
                    }
                }
                c.add_global_phase(global);
            }
            ScalarPotential::Tabulated(_) | ScalarPotential::Custom(_) => {
                let phases: Vec<f64> = (0..self.spec.check_enumerable()?)
                    .map(|site| {
                        self.potentials
                            .scalar
                            .at_site(&self.spec, site, t)
                            .map(|v| -e * v * dt_eff)
                    })
                    .collect::<Result<_>>()?;
                let position = self.layout.position_wires();
                let (&target, controls) =
                    position.split_last().expect("lattice has a position wire");
                let table = phases
                    .chunks(2)
                    .map(|p| {
                        Mat2::diagonal([C64::from_polar(1.0, p[0]), C64::from_polar(1.0, p[1])])
                    })
                    .collect();
                c.push(UniformlyControlledGate::new(
                    controls.to_vec(),
                    target,
                    table,
                )?)?;
            }
        }
        Ok(c)
    }

    /// One full time step from `t` following `scheme`.
    pub fn time_step(&self, scheme: &SplittingScheme, t: f64) -> Result<Circuit> {
        let dt = self.spec.dt();
        let mut c = self.circuit("time step");
        for s in scheme.timed_steps() {
            let w = *s.coefficient.numer() as f64 / *s.coefficient.denom() as f64;
            let dt_eff = w * dt;
            let t_eval = t + (*s.time_offset.numer() as f64 / *s.time_offset.denom() as f64) * dt;
            match s.tag {
                OperatorTag::X | OperatorTag::Y | OperatorTag::Z => {
                    let axis = s.tag.streaming_axis().expect("streaming tag");
                    let l = self.spec.shift_sites(s.coefficient)?;
                    if !self.spec.is_active(axis) {
                        continue;
                    }
                    let rot = self.spin_rotation(axis)?;
                    c.append(&rot)?;
                    c.append(&self.conditional_walk(axis, l)?)?;
                    c.append(&rot)?;
                }
                OperatorTag::Mass => c.append(&self.mass_gate(dt_eff)?)?,
                OperatorTag::Scalar => c.append(&self.scalar_potential_gate(t_eval, dt_eff)?)?,
                OperatorTag::Vector => c.append(&self.field_gate(t_eval, dt_eff)?)?,
                OperatorTag::TimeShift => unreachable!("timed_steps excludes time shifts"),
            }
        }
        Ok(c)
    }
}
