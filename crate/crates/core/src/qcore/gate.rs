use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::linalg::{Mat2, Mat4};
use crate::{Error, Result};

const UNITARITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    H,
    S,
    Sdg,
    T,
    Tdg,
    X,
    Y,
    Z,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// `diag(1, e^{i theta})`.
    Phase(f64),
    Unitary(Mat2),
    /// Two-target unitary; `targets[0]` is the more significant qubit of its basis.
    Unitary2(Mat4),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        if matches!(self, GateKind::Unitary2(_)) {
            2
        } else {
            1
        }
    }

    pub fn matrix2(&self) -> Option<Mat2> {
        use std::f64::consts::FRAC_PI_4;
        Some(match self {
            GateKind::H => Mat2::hadamard(),
            GateKind::S => Mat2::phase(2.0 * FRAC_PI_4),
            GateKind::Sdg => Mat2::phase(-2.0 * FRAC_PI_4),
            GateKind::T => Mat2::phase(FRAC_PI_4),
            GateKind::Tdg => Mat2::phase(-FRAC_PI_4),
            GateKind::X => Mat2::pauli_x(),
            GateKind::Y => Mat2::pauli_y(),
            GateKind::Z => Mat2::pauli_z(),
            GateKind::Rx(t) => Mat2::rx(*t),
            GateKind::Ry(t) => Mat2::ry(*t),
            GateKind::Rz(t) => Mat2::rz(*t),
            GateKind::Phase(t) => Mat2::phase(*t),
            GateKind::Unitary(m) => *m,
            GateKind::Unitary2(_) => return None,
        })
    }

    pub fn inverse(&self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Rx(t) => GateKind::Rx(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::Phase(t) => GateKind::Phase(-t),
            GateKind::Unitary(m) => GateKind::Unitary(m.adjoint()),
            GateKind::Unitary2(m) => GateKind::Unitary2(m.adjoint()),
            k => k.clone(),
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Rx(_) => "RX",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::Phase(_) => "P",
            GateKind::Unitary(_) => "U",
            GateKind::Unitary2(_) => "U2",
        }
    }
}

/// A control wire that fires when the qubit is `|1>` (`active_high`) or `|0>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub wire: usize,
    pub active_high: bool,
}

impl Control {
    pub fn on(wire: usize) -> Self {
        Control {
            wire,
            active_high: true,
        }
    }

    pub fn off(wire: usize) -> Self {
        Control {
            wire,
            active_high: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        assert_eq!(kind.arity(), 1, "use Gate::unitary2 for two-qubit gates");
        Gate {
            kind,
            targets: vec![target],
            controls: Vec::new(),
        }
    }

    pub fn h(t: usize) -> Self {
        Self::new(GateKind::H, t)
    }

    pub fn x(t: usize) -> Self {
        Self::new(GateKind::X, t)
    }

    pub fn rz(t: usize, theta: f64) -> Self {
        Self::new(GateKind::Rz(theta), t)
    }

    pub fn ry(t: usize, theta: f64) -> Self {
        Self::new(GateKind::Ry(theta), t)
    }

    pub fn phase(t: usize, theta: f64) -> Self {
        Self::new(GateKind::Phase(theta), t)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::x(target).controlled_by(Control::on(control))
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Self::x(target)
            .controlled_by(Control::on(c1))
            .controlled_by(Control::on(c2))
    }

    pub fn mcx(controls: &[Control], target: usize) -> Self {
        Gate {
            kind: GateKind::X,
            targets: vec![target],
            controls: controls.to_vec(),
        }
    }

    /// Arbitrary single-qubit unitary; rejects matrices more than 1e-12 from unitary.
    pub fn unitary(m: Mat2, target: usize) -> Result<Self> {
        let defect = m.unitarity_defect();
        if defect > UNITARITY_TOL || !m.is_finite() {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self::new(GateKind::Unitary(m), target))
    }

    pub fn unitary2(m: Mat4, t0: usize, t1: usize) -> Result<Self> {
        let defect = m.unitarity_defect();
        if defect > UNITARITY_TOL || !m.is_finite() {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Gate {
            kind: GateKind::Unitary2(m),
            targets: vec![t0, t1],
            controls: Vec::new(),
        })
    }

    pub fn controlled_by(mut self, c: Control) -> Self {
        self.controls.push(c);
        self
    }

    pub fn inverse(&self) -> Self {
        Gate {
            kind: self.kind.inverse(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    /// `CNOT` for an X with one active-high control, otherwise the kind mnemonic.
    pub fn label(&self) -> &'static str {
        if self.kind == GateKind::X && self.controls.len() == 1 && self.controls[0].active_high {
            "CNOT"
        } else {
            self.kind.mnemonic()
        }
    }

    pub fn wires(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.wire))
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::Unsupported(format!(
                "{} needs {} targets",
                self.kind.mnemonic(),
                self.kind.arity()
            )));
        }
        check_wires(self.wires(), n_qubits)
    }
}

pub(crate) fn check_wires(wires: impl Iterator<Item = usize>, n_qubits: usize) -> Result<()> {
    let mut seen = 0u128;
    let mut seen_big = std::collections::BTreeSet::new();
    for w in wires {
        if w >= n_qubits {
            return Err(Error::InvalidWire { wire: w, n_qubits });
        }
        let dup = if w < 128 {
            let bit = 1u128 << w;
            let d = seen & bit != 0;
            seen |= bit;
            d
        } else {
            !seen_big.insert(w)
        };
        if dup {
            return Err(Error::OverlappingWires(w));
        }
    }
    Ok(())
}

/// A different single-qubit unitary on `target` for every bit pattern of `controls`.
///
/// The pattern index reads the controls as a binary number with `controls[0]` as the
/// most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformlyControlledGate {
    pub controls: Vec<usize>,
    pub target: usize,
    pub table: Arc<[Mat2]>,
}

impl UniformlyControlledGate {
    pub fn new(controls: Vec<usize>, target: usize, table: Vec<Mat2>) -> Result<Self> {
        let expected = 1usize
            .checked_shl(controls.len() as u32)
            .ok_or_else(|| Error::Unsupported("too many controls".into()))?;
        if table.len() != expected {
            return Err(Error::TableSize {
                controls: controls.len(),
                expected,
                got: table.len(),
            });
        }
        for m in &table {
            let defect = m.unitarity_defect();
            if defect > UNITARITY_TOL || !m.is_finite() {
                return Err(Error::NotUnitary(defect));
            }
        }
        Ok(UniformlyControlledGate {
            controls,
            target,
            table: table.into(),
        })
    }

    pub fn inverse(&self) -> Self {
        UniformlyControlledGate {
            controls: self.controls.clone(),
            target: self.target,
            table: self.table.iter().map(Mat2::adjoint).collect(),
        }
    }

    /// Adds one more control; the table gets identities where the control is inactive.
    pub fn controlled_by(&self, c: Control) -> Self {
        let id = Mat2::identity();
        let idle = std::iter::repeat_n(id, self.table.len());
        let table: Vec<Mat2> = if c.active_high {
            idle.chain(self.table.iter().copied()).collect()
        } else {
            self.table.iter().copied().chain(idle).collect()
        };
        let mut controls = vec![c.wire];
        controls.extend(&self.controls);
        UniformlyControlledGate {
            controls,
            target: self.target,
            table: table.into(),
        }
    }

    pub fn wires(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.target).chain(self.controls.iter().copied())
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        check_wires(self.wires(), n_qubits)
    }

    pub fn is_identity(&self) -> bool {
        let id = Mat2::identity();
        self.table.iter().all(|m| *m == id)
    }

    /// The common entry if every pattern applies the same unitary.
    pub fn uniform_entry(&self) -> Option<Mat2> {
        let first = self.table[0];
        self.table.iter().all(|m| *m == first).then_some(first)
    }
}

/// One element of a circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Gate(Gate),
    Uniform(UniformlyControlledGate),
}

impl Instruction {
    pub fn inverse(&self) -> Self {
        match self {
            Instruction::Gate(g) => Instruction::Gate(g.inverse()),
            Instruction::Uniform(u) => Instruction::Uniform(u.inverse()),
        }
    }

    pub fn controlled_by(&self, c: Control) -> Self {
        match self {
            Instruction::Gate(g) => Instruction::Gate(g.clone().controlled_by(c)),
            Instruction::Uniform(u) => Instruction::Uniform(u.controlled_by(c)),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match self {
            Instruction::Gate(g) => g.validate(n_qubits),
            Instruction::Uniform(u) => u.validate(n_qubits),
        }
    }

    pub fn wires(&self) -> Vec<usize> {
        match self {
            Instruction::Gate(g) => g.wires().collect(),
            Instruction::Uniform(u) => u.wires().collect(),
        }
    }
}

impl From<Gate> for Instruction {
    fn from(g: Gate) -> Self {
        Instruction::Gate(g)
    }
}

impl From<UniformlyControlledGate> for Instruction {
    fn from(u: UniformlyControlledGate) -> Self {
        Instruction::Uniform(u)
    }
}

pub(crate) fn unit(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}
