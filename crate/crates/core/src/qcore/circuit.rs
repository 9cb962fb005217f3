use std::fmt::Write as _;
use std::ops::Range;

use num_complex::Complex64 as C64;

use super::gate::{unit, Control, Gate, GateKind, Instruction, UniformlyControlledGate};
use super::state::QuantumState;
use crate::linalg::{Mat, Mat2};
use crate::{Error, Result};

/// A labelled contiguous range of instructions, used for per-part resource breakdowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub label: String,
    pub range: Range<usize>,
}

/// Ordered list of instructions acting on `n_qubits` wires, times `e^{i global_phase}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    instructions: Vec<Instruction>,
    ancillas: Vec<usize>,
    global_phase: f64,
    label: String,
    sections: Vec<Section>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            instructions: Vec::new(),
            ancillas: Vec::new(),
            global_phase: 0.0,
            label: String::new(),
            sections: Vec::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_ancillas(mut self, ancillas: Vec<usize>) -> Self {
        self.ancillas = ancillas;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Wires the circuit may borrow as clean scratch space.
    pub fn ancillas(&self) -> &[usize] {
        &self.ancillas
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phase: f64) {
        self.global_phase += phase;
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn push(&mut self, instruction: impl Into<Instruction>) -> Result<()> {
        let instruction = instruction.into();
        instruction.validate(self.n_qubits)?;
        self.instructions.push(instruction);
        Ok(())
    }

    /// Appends `other`; its instructions form one section named after its label (or
    /// keep their own sections if it has any).
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::InvalidWire {
                wire: other.n_qubits - 1,
                n_qubits: self.n_qubits,
            });
        }
        let offset = self.instructions.len();
        self.instructions.extend(other.instructions.iter().cloned());
        if other.sections.is_empty() {
            if !other.label.is_empty() && !other.is_empty() {
                self.sections.push(Section {
                    label: other.label.clone(),
                    range: offset..offset + other.len(),
                });
            }
        } else {
            self.sections.extend(other.sections.iter().map(|s| Section {
                label: s.label.clone(),
                range: s.range.start + offset..s.range.end + offset,
            }));
        }
        self.global_phase += other.global_phase;
        Ok(())
    }

    pub fn inverse(&self) -> Circuit {
        let n = self.instructions.len();
        Circuit {
            n_qubits: self.n_qubits,
            instructions: self
                .instructions
                .iter()
                .rev()
                .map(Instruction::inverse)
                .collect(),
            ancillas: self.ancillas.clone(),
            global_phase: -self.global_phase,
            label: self.label.clone(),
            sections: self
                .sections
                .iter()
                .rev()
                .map(|s| Section {
                    label: s.label.clone(),
                    range: n - s.range.end..n - s.range.start,
                })
                .collect(),
        }
    }

    /// The same circuit conditioned on `control`. The global phase becomes a phase gate
    /// on the control wire so the conditioned operator is exact.
    pub fn controlled(&self, control: Control) -> Result<Circuit> {
        if control.wire >= self.n_qubits {
            return Err(Error::InvalidWire {
                wire: control.wire,
                n_qubits: self.n_qubits,
            });
        }
        if self
            .instructions
            .iter()
            .any(|i| i.wires().contains(&control.wire))
        {
            return Err(Error::OverlappingWires(control.wire));
        }
        let mut out = Circuit {
            n_qubits: self.n_qubits,
            instructions: Vec::with_capacity(self.instructions.len() + 1),
            ancillas: self.ancillas.clone(),
            global_phase: 0.0,
            label: self.label.clone(),
            sections: self.sections.clone(),
        };
        for ins in &self.instructions {
            out.push(ins.controlled_by(control))?;
        }
        if self.global_phase != 0.0 {
            let g = if control.active_high {
                Gate::phase(control.wire, self.global_phase)
            } else {
                out.global_phase = self.global_phase;
                Gate::phase(control.wire, -self.global_phase)
            };
            out.push(g)?;
        }
        Ok(out)
    }

    /// Runs the circuit, including its global phase.
    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: state.n_qubits(),
            });
        }
        for ins in &self.instructions {
            state.apply(ins)?;
        }
        if self.global_phase != 0.0 {
            state.scale(unit(self.global_phase));
        }
        Ok(())
    }

    /// Dense unitary, column `j` being the image of basis state `j`. For small circuits.
    pub fn unitary(&self) -> Result<Vec<Vec<C64>>> {
        if self.n_qubits > 12 {
            return Err(Error::Unsupported(
                "dense unitary limited to 12 qubits".into(),
            ));
        }
        let dim = 1usize << self.n_qubits;
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut s = QuantumState::basis(self.n_qubits, j)?;
            self.apply(&mut s)?;
            cols.push(s.into_amplitudes());
        }
        Ok(cols)
    }

    /// Number of instructions of each label.
    pub fn histogram(&self) -> std::collections::BTreeMap<&'static str, usize> {
        let mut h = std::collections::BTreeMap::new();
        for ins in &self.instructions {
            let name = match ins {
                Instruction::Gate(g) => g.label(),
                Instruction::Uniform(_) => "UC",
            };
            *h.entry(name).or_insert(0) += 1;
        }
        h
    }

    /// Line-oriented dump, one instruction per line as `KIND(params) targets [controls]`,
    /// with controls written `w+` (fires on 1) or `w-` (fires on 0).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if !self.label.is_empty() {
            let _ = writeln!(s, "# {}", self.label);
        }
        let _ = writeln!(s, "qubits {}", self.n_qubits);
        if !self.ancillas.is_empty() {
            let _ = writeln!(s, "ancillas {}", join(&self.ancillas));
        }
        if self.global_phase != 0.0 {
            let _ = writeln!(s, "phase {:e}", self.global_phase);
        }
        for sec in &self.sections {
            let _ = writeln!(
                s,
                "section {} {}..{}",
                sec.label, sec.range.start, sec.range.end
            );
        }
        for ins in &self.instructions {
            match ins {
                Instruction::Gate(g) => {
                    let params = match &g.kind {
                        GateKind::Rx(t)
                        | GateKind::Ry(t)
                        | GateKind::Rz(t)
                        | GateKind::Phase(t) => format!("({t:e})"),
                        GateKind::Unitary(m) => format!("({})", mat_params(m)),
                        GateKind::Unitary2(m) => format!("({})", mat_params(m)),
                        _ => String::new(),
                    };
                    let _ = write!(s, "{}{} {}", g.label(), params, join(&g.targets));
                    if !g.controls.is_empty() {
                        let parts: Vec<String> = g
                            .controls
                            .iter()
                            .map(|c| format!("{}{}", c.wire, if c.active_high { '+' } else { '-' }))
                            .collect();
                        let _ = write!(s, " [{}]", parts.join(" "));
                    }
                    s.push('\n');
                }
                Instruction::Uniform(u) => {
                    let table: Vec<String> = u.table.iter().map(mat_params).collect();
                    let _ = writeln!(
                        s,
                        "UC({}) {} [{}]",
                        table.join(";"),
                        u.target,
                        join(&u.controls)
                    );
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        let mut sections = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let line_no = lineno + 1;
            let perr = |m: &str| Error::Parse {
                line: line_no,
                message: m.to_string(),
            };
            if line.is_empty() {
                continue;
            }
            if let Some(label) = line.strip_prefix("# ") {
                circuit = Some(
                    circuit
                        .take()
                        .unwrap_or_else(|| Circuit::new(0))
                        .with_label(label),
                );
                continue;
            }
            if let Some(n) = line.strip_prefix("qubits ") {
                let n: usize = n.parse().map_err(|_| perr("bad qubit count"))?;
                let label = circuit.take().map(|c| c.label).unwrap_or_default();
                circuit = Some(Circuit::new(n).with_label(label));
                continue;
            }
            let c = circuit
                .as_mut()
                .ok_or_else(|| perr("missing 'qubits' line"))?;
            if let Some(rest) = line.strip_prefix("ancillas ") {
                c.ancillas = parse_list(rest).map_err(|_| perr("bad ancilla list"))?;
            } else if let Some(rest) = line.strip_prefix("phase ") {
                c.global_phase = rest.parse().map_err(|_| perr("bad phase"))?;
            } else if let Some(rest) = line.strip_prefix("section ") {
                let (label, range) = rest.rsplit_once(' ').ok_or_else(|| perr("bad section"))?;
                let (a, b) = range
                    .split_once("..")
                    .ok_or_else(|| perr("bad section range"))?;
                let a = a.parse().map_err(|_| perr("bad section range"))?;
                let b = b.parse().map_err(|_| perr("bad section range"))?;
                sections.push(Section {
                    label: label.to_string(),
                    range: a..b,
                });
            } else {
                let ins = parse_instruction(line).map_err(|m| perr(&m))?;
                c.push(ins).map_err(|e| perr(&e.to_string()))?;
            }
        }
        let mut c = circuit.ok_or(Error::Parse {
            line: 0,
            message: "empty circuit text".into(),
        })?;
        c.sections = sections;
        Ok(c)
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, std::num::ParseIntError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse()).collect()
}

fn mat_params<const N: usize>(m: &Mat<N>) -> String {
    m.0.iter()
        .flatten()
        .map(|z| format!("{:e},{:e}", z.re, z.im))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_mat<const N: usize>(s: &str) -> std::result::Result<Mat<N>, String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    if vals.len() != 2 * N * N {
        return Err(format!(
            "expected {} numbers, got {}",
            2 * N * N,
            vals.len()
        ));
    }
    let mut m = Mat::<N>::zeros();
    for i in 0..N {
        for j in 0..N {
            let k = 2 * (i * N + j);
            m.0[i][j] = C64::new(vals[k], vals[k + 1]);
        }
    }
    Ok(m)
}

fn parse_instruction(line: &str) -> std::result::Result<Instruction, String> {
    let (head, rest) = match line.find(')') {
        Some(close) if line[..close].contains('(') => (&line[..=close], line[close + 1..].trim()),
        _ => line.split_once(' ').ok_or("missing targets")?,
    };
    let (name, params) = match head.split_once('(') {
        Some((n, p)) => (n, Some(p.trim_end_matches(')'))),
        None => (head, None),
    };
    let (targets, controls) = match rest.split_once('[') {
        Some((t, c)) => (t.trim(), Some(c.trim_end_matches(']').trim())),
        None => (rest.trim(), None),
    };
    let targets = parse_list(targets).map_err(|e| e.to_string())?;
    if name == "UC" {
        let table = params
            .ok_or("UC needs a table")?
            .split(';')
            .map(parse_mat::<2>)
            .collect::<std::result::Result<Vec<Mat2>, _>>()?;
        let controls = parse_list(controls.unwrap_or("")).map_err(|e| e.to_string())?;
        let target = *targets.first().ok_or("UC needs a target")?;
        return UniformlyControlledGate::new(controls, target, table)
            .map(Into::into)
            .map_err(|e| e.to_string());
    }
    let angle = || -> std::result::Result<f64, String> {
        params
            .ok_or("missing angle")?
            .parse::<f64>()
            .map_err(|e| e.to_string())
    };
    let kind = match name {
        "H" => GateKind::H,
        "S" => GateKind::S,
        "SDG" => GateKind::Sdg,
        "T" => GateKind::T,
        "TDG" => GateKind::Tdg,
        "X" | "CNOT" => GateKind::X,
        "Y" => GateKind::Y,
        "Z" => GateKind::Z,
        "RX" => GateKind::Rx(angle()?),
        "RY" => GateKind::Ry(angle()?),
        "RZ" => GateKind::Rz(angle()?),
        "P" => GateKind::Phase(angle()?),
        "U" => GateKind::Unitary(parse_mat::<2>(params.ok_or("missing matrix")?)?),
        "U2" => GateKind::Unitary2(parse_mat::<4>(params.ok_or("missing matrix")?)?),
        other => return Err(format!("unknown gate {other}")),
    };
    let mut controls_v = Vec::new();
    for tok in controls.unwrap_or("").split_whitespace() {
        let (w, pol) = tok.split_at(tok.len() - 1);
        let wire = w.parse::<usize>().map_err(|e| e.to_string())?;
        controls_v.push(match pol {
            "+" => Control::on(wire),
            "-" => Control::off(wire),
            _ => return Err(format!("bad control {tok}")),
        });
    }
    Ok(Instruction::Gate(Gate {
        kind,
        targets,
        controls: controls_v,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Circuit {
        let mut c = Circuit::new(4).with_label("sample").with_ancillas(vec![3]);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::rz(2, 0.123456789).controlled_by(Control::off(0)))
            .unwrap();
        c.push(Gate::mcx(
            &[Control::on(0), Control::off(1), Control::on(2)],
            3,
        ))
        .unwrap();
        c.push(Gate::unitary(Mat2::ry(0.3) * Mat2::rz(1.1), 1).unwrap())
            .unwrap();
        c.push(Gate::unitary2(crate::linalg::Mat2::hadamard().kron(&Mat2::rx(0.4)), 2, 0).unwrap())
            .unwrap();
        c.push(
            UniformlyControlledGate::new(
                vec![0, 2],
                1,
                vec![
                    Mat2::rz(0.1),
                    Mat2::ry(0.2),
                    Mat2::identity(),
                    Mat2::pauli_x(),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        c.add_global_phase(0.25);
        c
    }

    #[test]
    fn text_round_trip() {
        let c = sample();
        let text = c.to_text();
        assert!(text.contains("CNOT 1 [0+]"));
        assert!(text.contains("X 3 [0+ 1- 2+]"));
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn inverse_undoes() {
        let c = sample();
        let mut s = QuantumState::basis(4, 5).unwrap();
        let orig = s.clone();
        c.apply(&mut s).unwrap();
        c.inverse().apply(&mut s).unwrap();
        assert!(s.max_abs_diff(&orig) < 1e-14);
    }

    #[test]
    fn controlled_keeps_global_phase_exact() {
        let mut c = Circuit::new(2);
        c.push(Gate::x(1)).unwrap();
        c.add_global_phase(0.7);
        for active_high in [true, false] {
            let ctl = Control {
                wire: 0,
                active_high,
            };
            let cc = c.controlled(ctl).unwrap();
            let u = cc.unitary().unwrap();
            // Fires on the chosen value of wire 0, identity otherwise.
            let (fire, idle) = if active_high { (2, 0) } else { (0, 2) };
            assert!((u[idle][idle] - C64::new(1.0, 0.0)).norm() < 1e-15);
            assert!((u[fire][fire + 1] - unit(0.7)).norm() < 1e-15);
        }
    }
}
