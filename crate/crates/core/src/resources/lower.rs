use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::synth::reduce_angle;
use super::{GateCounts, ResourceReport, RotationSynthesizer};
use crate::linalg::Mat2;
use crate::qcore::mcx::{mcx_gates, toffoli_clifford_t};
use crate::qcore::{Circuit, Gate, GateKind, Instruction};
use crate::stateprep::lower_uniform;
use crate::{Error, Result};

/// Receives the fundamental gates (H, S, T on one wire, CNOT) of a lowering.
pub trait GateSink {
    fn enter_section(&mut self, label: &str);

    fn push(&mut self, gate: Gate) -> Result<()>;

    fn add_phase(&mut self, phase: f64);

    /// Whether synthesized rotations must be emitted gate by gate; sinks that only
    /// count take [`add_counts`](Self::add_counts) instead.
    fn needs_gates(&self) -> bool {
        true
    }

    fn add_counts(&mut self, counts: GateCounts) {
        let _ = counts;
    }
}

/// Tallies gates overall and per section.
#[derive(Clone, Debug, Default)]
pub struct CountingSink {
    pub counts: GateCounts,
    pub sections: BTreeMap<String, GateCounts>,
    current: String,
}

impl CountingSink {
    fn bump(&mut self, c: GateCounts) {
        self.counts += c;
        if !self.current.is_empty() {
            *self.sections.entry(self.current.clone()).or_default() += c;
        }
    }
}

impl GateSink for CountingSink {
    fn enter_section(&mut self, label: &str) {
        self.current = label.to_string();
    }

    fn push(&mut self, gate: Gate) -> Result<()> {
        let mut c = GateCounts::default();
        match (gate.label(), gate.controls.len()) {
            ("H", 0) => c.h = 1,
            ("S", 0) => c.s = 1,
            ("T", 0) => c.t = 1,
            ("CNOT", 1) => c.cnot = 1,
            _ => {
                return Err(Error::Unsupported(format!(
                    "{} is not a fundamental gate",
                    gate.label()
                )))
            }
        }
        self.bump(c);
        Ok(())
    }

    fn add_phase(&mut self, _phase: f64) {}

    fn needs_gates(&self) -> bool {
        false
    }

    fn add_counts(&mut self, counts: GateCounts) {
        self.bump(counts);
    }
}

/// Materializes the lowered circuit, keeping the source section labels.
#[derive(Debug)]
pub struct CircuitSink {
    out: Circuit,
    chunk: Circuit,
}

impl CircuitSink {
    pub fn new(template: &Circuit) -> Self {
        let blank =
            || Circuit::new(template.n_qubits()).with_ancillas(template.ancillas().to_vec());
        CircuitSink {
            out: blank().with_label(template.label()),
            chunk: blank(),
        }
    }

    fn flush(&mut self) -> Result<()> {
        if !self.chunk.is_empty() || self.chunk.global_phase() != 0.0 {
            self.out.append(&self.chunk)?;
        }
        self.chunk = Circuit::new(self.out.n_qubits()).with_ancillas(self.out.ancillas().to_vec());
        Ok(())
    }

    pub fn finish(mut self) -> Result<Circuit> {
        self.flush()?;
        Ok(self.out)
    }
}

impl GateSink for CircuitSink {
    fn enter_section(&mut self, label: &str) {
        self.flush().expect("chunk wires were validated on push");
        self.chunk = std::mem::replace(&mut self.chunk, Circuit::new(0)).with_label(label);
    }

    fn push(&mut self, gate: Gate) -> Result<()> {
        self.chunk.push(gate)
    }

    fn add_phase(&mut self, phase: f64) {
        self.chunk.add_global_phase(phase);
    }
}

/// Rewrites circuits over {H, S, T, CNOT}. Rotations go to the synthesizer at
/// precision `epsilon` each, except multiples of pi/4, which are exact.
pub struct Lowering<'a> {
    synth: &'a dyn RotationSynthesizer,
    epsilon: f64,
}

struct Run<'s> {
    pool: Vec<usize>,
    sink: &'s mut dyn GateSink,
    rotations: usize,
}

impl<'a> Lowering<'a> {
    pub fn new(synth: &'a dyn RotationSynthesizer, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.1) {
            return Err(Error::InvalidPrecision(epsilon));
        }
        Ok(Lowering { synth, epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The lowered circuit (global phase included) and its resource report.
    pub fn lower(&self, circuit: &Circuit) -> Result<(Circuit, ResourceReport)> {
        let mut sink = CircuitSink::new(circuit);
        let rotations = self.drive(circuit, &mut sink)?;
        let lowered = sink.finish()?;
        let mut counting = CountingSink::default();
        for (i, ins) in lowered.instructions().iter().enumerate() {
            let label = lowered
                .sections()
                .iter()
                .find(|s| s.range.contains(&i))
                .map_or("", |s| s.label.as_str());
            counting.enter_section(label);
            match ins {
                Instruction::Gate(g) => counting.push(g.clone())?,
                Instruction::Uniform(_) => unreachable!("lowering emits plain gates"),
            }
        }
        let report = self.report(circuit, counting, rotations);
        Ok((lowered, report))
    }

    /// Counts without materializing the lowered circuit.
    pub fn count(&self, circuit: &Circuit) -> Result<ResourceReport> {
        let mut sink = CountingSink::default();
        let rotations = self.drive(circuit, &mut sink)?;
        Ok(self.report(circuit, sink, rotations))
    }

    fn report(&self, circuit: &Circuit, sink: CountingSink, rotations: usize) -> ResourceReport {
        ResourceReport {
            counts: sink.counts,
            width: circuit.n_qubits(),
            epsilon: self.epsilon,
            rotations,
            sections: sink.sections,
        }
    }

    /// Streams the lowering of `circuit` into `sink`; returns the number of
    /// synthesized rotations.
    pub fn drive(&self, circuit: &Circuit, sink: &mut dyn GateSink) -> Result<usize> {
        let mut touched = vec![false; circuit.n_qubits()];
        circuit
            .instructions()
            .iter()
            .flat_map(Instruction::wires)
            .for_each(|w| touched[w] = true);
        let pool = circuit
            .ancillas()
            .iter()
            .copied()
            .filter(|&w| !touched[w])
            .collect();
        let mut run = Run {
            pool,
            sink,
            rotations: 0,
        };
        let mut sections = circuit.sections().to_vec();
        sections.sort_by_key(|s| s.range.start);
        let mut current = String::new();
        for (i, ins) in circuit.instructions().iter().enumerate() {
            let label = sections
                .iter()
                .find(|s| s.range.contains(&i))
                .map_or("", |s| s.label.as_str());
            if label != current || i == 0 {
                current = label.to_string();
                run.sink.enter_section(label);
            }
            match ins {
                Instruction::Gate(g) => self.gate(g, &mut run)?,
                Instruction::Uniform(u) => {
                    let (gates, phase) = lower_uniform(u)?;
                    for g in &gates {
                        self.gate(g, &mut run)?;
                    }
                    run.sink.add_phase(phase);
                }
            }
        }
        run.sink.add_phase(circuit.global_phase());
        Ok(run.rotations)
    }

    fn gate(&self, g: &Gate, run: &mut Run) -> Result<()> {
        if matches!(g.kind, GateKind::Unitary2(_)) {
            return Err(Error::Unsupported(
                "two-qubit unitaries have no lowering rule".into(),
            ));
        }
        let t = g.targets[0];
        match g.controls.as_slice() {
            [] => self.single(&g.kind, t, run),
            [c] if c.active_high => self.controlled(&g.kind, c.wire, t, run),
            [c] => {
                self.single(&GateKind::X, c.wire, run)?;
                self.controlled(&g.kind, c.wire, t, run)?;
                self.single(&GateKind::X, c.wire, run)
            }
            [a, b] if g.kind == GateKind::X && a.active_high && b.active_high => {
                toffoli_clifford_t(a.wire, b.wire, t)
                    .iter()
                    .try_for_each(|h| self.gate(h, run))
            }
            controls if g.kind == GateKind::X => mcx_gates(controls, t, &run.pool)?
                .iter()
                .try_for_each(|h| self.gate(h, run)),
            controls => {
                // AND of the controls into a scratch wire, then a singly controlled gate.
                let Some((&flag, rest)) = run.pool.split_first().map(|(f, r)| (f, r.to_vec()))
                else {
                    return Err(Error::InsufficientAncillas {
                        needed: controls.len() - 1,
                        available: 0,
                    });
                };
                let and = mcx_gates(controls, flag, &rest).map_err(|e| match e {
                    Error::InsufficientAncillas { needed, available } => {
                        Error::InsufficientAncillas {
                            needed: needed + 1,
                            available: available + 1,
                        }
                    }
                    e => e,
                })?;
                let saved = std::mem::replace(&mut run.pool, rest);
                let result = (|| {
                    and.iter().try_for_each(|h| self.gate(h, run))?;
                    self.controlled(&g.kind, flag, t, run)?;
                    and.iter().rev().try_for_each(|h| self.gate(h, run))
                })();
                run.pool = saved;
                result
            }
        }
    }

    fn emit(&self, kinds: &[GateKind], t: usize, run: &mut Run) -> Result<()> {
        kinds.iter().try_for_each(|k| self.single(k, t, run))
    }

    fn cnot(&self, c: usize, t: usize, run: &mut Run) -> Result<()> {
        run.sink.push(Gate::cnot(c, t))
    }

    fn single(&self, kind: &GateKind, t: usize, run: &mut Run) -> Result<()> {
        use GateKind::*;
        match kind {
            H | S | T => run.sink.push(Gate::new(kind.clone(), t)),
            Sdg => self.emit(&[S, S, S], t, run),
            Tdg => self.emit(&[S, S, S, T], t, run),
            X => self.emit(&[H, S, S, H], t, run),
            Z => self.emit(&[S, S], t, run),
            Y => {
                run.sink.add_phase(FRAC_PI_2);
                self.emit(&[S, S, H, S, S, H], t, run)
            }
            Rz(theta) => self.rz(*theta, t, run),
            Rx(theta) => {
                self.single(&H, t, run)?;
                self.rz(*theta, t, run)?;
                self.single(&H, t, run)
            }
            Ry(theta) => {
                self.emit(&[Sdg, H], t, run)?;
                self.rz(*theta, t, run)?;
                self.emit(&[H, S], t, run)
            }
            Phase(theta) => {
                run.sink.add_phase(theta / 2.0);
                self.rz(*theta, t, run)
            }
            Unitary(m) => {
                let z = m.zyz();
                self.rz(z.xi, t, run)?;
                self.single(&Ry(z.theta), t, run)?;
                self.rz(z.delta, t, run)?;
                run.sink.add_phase(z.global_phase);
                Ok(())
            }
            Unitary2(_) => unreachable!("rejected in gate()"),
        }
    }

    fn controlled(&self, kind: &GateKind, c: usize, t: usize, run: &mut Run) -> Result<()> {
        use GateKind::*;
        match kind {
            X => self.cnot(c, t, run),
            Z => {
                self.single(&H, t, run)?;
                self.cnot(c, t, run)?;
                self.single(&H, t, run)
            }
            Y => {
                self.single(&Sdg, t, run)?;
                self.cnot(c, t, run)?;
                self.single(&S, t, run)
            }
            Rz(theta) | Ry(theta) => {
                let half = |a: f64| if matches!(kind, Rz(_)) { Rz(a) } else { Ry(a) };
                self.single(&half(theta / 2.0), t, run)?;
                self.cnot(c, t, run)?;
                self.single(&half(-theta / 2.0), t, run)?;
                self.cnot(c, t, run)
            }
            Rx(theta) => {
                self.single(&H, t, run)?;
                self.controlled(&Rz(*theta), c, t, run)?;
                self.single(&H, t, run)
            }
            Phase(theta) => {
                self.single(&Phase(theta / 2.0), c, run)?;
                self.controlled(&Rz(*theta), c, t, run)
            }
            S => self.controlled(&Phase(FRAC_PI_2), c, t, run),
            Sdg => self.controlled(&Phase(-FRAC_PI_2), c, t, run),
            T => self.controlled(&Phase(FRAC_PI_4), c, t, run),
            Tdg => self.controlled(&Phase(-FRAC_PI_4), c, t, run),
            H => self.controlled(&Unitary(Mat2::hadamard()), c, t, run),
            Unitary(m) => {
                let z = m.zyz();
                self.rz((z.xi - z.delta) / 2.0, t, run)?;
                self.cnot(c, t, run)?;
                self.rz(-(z.xi + z.delta) / 2.0, t, run)?;
                self.single(&Ry(-z.theta / 2.0), t, run)?;
                self.cnot(c, t, run)?;
                self.single(&Ry(z.theta / 2.0), t, run)?;
                self.rz(z.delta, t, run)?;
                self.single(&Phase(z.global_phase), c, run)
            }
            Unitary2(_) => unreachable!("rejected in gate()"),
        }
    }

    fn rz(&self, theta: f64, t: usize, run: &mut Run) -> Result<()> {
        if !theta.is_finite() {
            return Err(Error::Unsupported(format!(
                "non-finite rotation angle {theta}"
            )));
        }
        let (theta, wrap) = reduce_angle(theta);
        run.sink.add_phase(wrap);
        let eighths = theta / FRAC_PI_4;
        let k = eighths.round();
        if (eighths - k).abs() < 1e-12 {
            // Rz(k pi/4) = e^{-i k pi/8} T^k.
            run.sink.add_phase(-k * PI / 8.0);
            let k = (k as i64).rem_euclid(8) as usize;
            for _ in 0..k / 2 {
                run.sink.push(Gate::new(GateKind::S, t))?;
            }
            if k % 2 == 1 {
                run.sink.push(Gate::new(GateKind::T, t))?;
            }
            return Ok(());
        }
        run.rotations += 1;
        if run.sink.needs_gates() {
            let syn = self.synth.synthesize_rz(theta, self.epsilon)?;
            for k in &syn.word {
                run.sink.push(Gate::new(k.clone(), t))?;
            }
            run.sink.add_phase(syn.global_phase);
        } else {
            run.sink
                .add_counts(self.synth.rz_counts(theta, self.epsilon)?);
        }
        Ok(())
    }
}

/// Lowers `circuit` with `synth` at per-rotation precision `epsilon`.
pub fn lower_to_fundamental(
    circuit: &Circuit,
    synth: &dyn RotationSynthesizer,
    epsilon: f64,
) -> Result<(Circuit, ResourceReport)> {
    Lowering::new(synth, epsilon)?.lower(circuit)
}
