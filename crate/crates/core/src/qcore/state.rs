use num_complex::Complex64 as C64;

use super::gate::{Control, Gate, GateKind, Instruction, UniformlyControlledGate};
use crate::exec::{self, SharedMut};
use crate::linalg::{Mat2, Mat4, ONE, ZERO};
use crate::{Error, Result};

/// Pauli-type observables on a single wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    SigmaX,
    SigmaY,
    /// `sigma_x + i sigma_y`, whose expectation on an interferometer ancilla is the
    /// overlap between its two branches.
    Raising,
}

/// Statevector over `n` qubits. Wire 0 is the most significant bit of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amps: Vec<C64>,
}

/// Highest qubit count the dense simulator accepts.
pub const MAX_QUBITS: usize = 30;

impl QuantumState {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Unsupported(format!(
                "{n_qubits} qubits exceed the simulator limit"
            )));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidWire {
                wire: index,
                n_qubits,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(QuantumState { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Unsupported(format!(
                "{n_qubits} qubits exceed the simulator limit"
            )));
        }
        let expected = 1usize << n_qubits;
        if amps.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: amps.len(),
            });
        }
        Ok(QuantumState { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    /// Index bit of `wire`.
    #[inline]
    pub fn bit(&self, wire: usize) -> usize {
        self.n_qubits - 1 - wire
    }

    pub fn norm_sqr(&self) -> f64 {
        let a = &self.amps;
        exec::sum_by_chunks(a.len(), |r| a[r].iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn inner(&self, other: &QuantumState) -> C64 {
        let (a, b) = (&self.amps, &other.amps);
        exec::sum_by_chunks_complex(a.len(), |r| {
            a[r.clone()]
                .iter()
                .zip(&b[r])
                .map(|(x, y)| x.conj() * y)
                .sum()
        })
    }

    pub fn max_abs_diff(&self, other: &QuantumState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: C64) {
        exec::for_each_chunk_mut(&mut self.amps, 1024, |_, c| {
            c.iter_mut().for_each(|z| *z *= factor)
        });
    }

    pub fn apply(&mut self, instruction: &Instruction) -> Result<()> {
        match instruction {
            Instruction::Gate(g) => self.apply_gate(g),
            Instruction::Uniform(u) => self.apply_uniform(u),
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let (mask, value) = self.control_pattern(&gate.controls);
        match &gate.kind {
            GateKind::Unitary2(m) => {
                let (b0, b1) = (self.bit(gate.targets[0]), self.bit(gate.targets[1]));
                self.kernel_2q(m, b0, b1, mask, value);
            }
            kind => {
                let m = kind.matrix2().expect("single-qubit kind");
                let b = self.bit(gate.targets[0]);
                if *kind == GateKind::X {
                    self.kernel_swap(b, mask, value);
                } else if m.is_diagonal() {
                    self.kernel_diag(m.at(0, 0), m.at(1, 1), b, mask, value);
                } else {
                    self.kernel_1q(&m, b, mask, value);
                }
            }
        }
        Ok(())
    }

    /// Applies `table[p]` to the target for every control pattern `p`.
    pub fn apply_uniform(&mut self, ucg: &UniformlyControlledGate) -> Result<()> {
        ucg.validate(self.n_qubits)?;
        let expected = 1usize << ucg.controls.len();
        if ucg.table.len() != expected {
            return Err(Error::TableSize {
                controls: ucg.controls.len(),
                expected,
                got: ucg.table.len(),
            });
        }
        let tb = self.bit(ucg.target);
        let cbits: Vec<usize> = ucg.controls.iter().map(|&w| self.bit(w)).collect();
        let table = &ucg.table;
        let ptr = SharedMut::new(&mut self.amps);
        let half = self.amps.len() / 2;
        exec::for_each_index(half, move |m| {
            let i0 = insert_zero(m, tb);
            let i1 = i0 | (1 << tb);
            let pattern = cbits
                .iter()
                .fold(0usize, |p, &b| (p << 1) | ((i0 >> b) & 1));
            let u = &table[pattern];
            // SAFETY: (i0, i1) pairs are disjoint across m.
            unsafe {
                let (a0, a1) = (*ptr.at(i0), *ptr.at(i1));
                *ptr.at(i0) = u.at(0, 0) * a0 + u.at(0, 1) * a1;
                *ptr.at(i1) = u.at(1, 0) * a0 + u.at(1, 1) * a1;
            }
        });
        Ok(())
    }

    fn control_pattern(&self, controls: &[Control]) -> (usize, usize) {
        controls.iter().fold((0, 0), |(mask, value), c| {
            let b = 1usize << self.bit(c.wire);
            (mask | b, if c.active_high { value | b } else { value })
        })
    }

    /// Free-index enumeration: every index whose masked bits equal `value` and whose
    /// bits in `zeros` are clear is `deposit(m) | value` for one `m`.
    fn fixed_bits(&self, mask: usize, extra: &[usize]) -> Vec<usize> {
        let mut bits: Vec<usize> = (0..self.n_qubits).filter(|b| mask >> b & 1 == 1).collect();
        bits.extend_from_slice(extra);
        bits.sort_unstable();
        bits
    }

    fn kernel_1q(&mut self, m: &Mat2, b: usize, mask: usize, value: usize) {
        let fixed = self.fixed_bits(mask, &[b]);
        let count = self.amps.len() >> fixed.len();
        let m = *m;
        let ptr = SharedMut::new(&mut self.amps);
        exec::for_each_index(count, move |k| {
            let i0 = deposit(k, &fixed) | value;
            let i1 = i0 | (1 << b);
            // SAFETY: distinct k give disjoint index pairs.
            unsafe {
                let (a0, a1) = (*ptr.at(i0), *ptr.at(i1));
                *ptr.at(i0) = m.at(0, 0) * a0 + m.at(0, 1) * a1;
                *ptr.at(i1) = m.at(1, 0) * a0 + m.at(1, 1) * a1;
            }
        });
    }

    fn kernel_swap(&mut self, b: usize, mask: usize, value: usize) {
        let fixed = self.fixed_bits(mask, &[b]);
        let count = self.amps.len() >> fixed.len();
        let ptr = SharedMut::new(&mut self.amps);
        exec::for_each_index(count, move |k| {
            let i0 = deposit(k, &fixed) | value;
            // SAFETY: distinct k give disjoint index pairs.
            unsafe { std::ptr::swap(ptr.at(i0), ptr.at(i0 | (1 << b))) }
        });
    }

    fn kernel_diag(&mut self, d0: C64, d1: C64, b: usize, mask: usize, value: usize) {
        let fixed = self.fixed_bits(mask, &[b]);
        let count = self.amps.len() >> fixed.len();
        let ptr = SharedMut::new(&mut self.amps);
        exec::for_each_index(count, move |k| {
            let i0 = deposit(k, &fixed) | value;
            // SAFETY: distinct k give disjoint index pairs.
            unsafe {
                if d0 != ONE {
                    *ptr.at(i0) *= d0;
                }
                if d1 != ONE {
                    *ptr.at(i0 | (1 << b)) *= d1;
                }
            }
        });
    }

    fn kernel_2q(&mut self, m: &Mat4, b0: usize, b1: usize, mask: usize, value: usize) {
        let fixed = self.fixed_bits(mask, &[b0, b1]);
        let count = self.amps.len() >> fixed.len();
        let m = *m;
        let ptr = SharedMut::new(&mut self.amps);
        exec::for_each_index(count, move |k| {
            let base = deposit(k, &fixed) | value;
            let idx = [
                base,
                base | (1 << b1),
                base | (1 << b0),
                base | (1 << b0) | (1 << b1),
            ];
            // SAFETY: distinct k give disjoint index quadruples.
            unsafe {
                let v = idx.map(|i| *ptr.at(i));
                let out = m.apply(&v);
                for (i, o) in idx.into_iter().zip(out) {
                    *ptr.at(i) = o;
                }
            }
        });
    }

    /// Probability of finding `wire` in `|value>`.
    pub fn probability(&self, wire: usize, value: bool) -> Result<f64> {
        if wire >= self.n_qubits {
            return Err(Error::InvalidWire {
                wire,
                n_qubits: self.n_qubits,
            });
        }
        let b = self.bit(wire);
        let a = &self.amps;
        let want = value as usize;
        Ok(exec::sum_by_chunks(a.len(), |r| {
            r.filter(|i| (i >> b) & 1 == want)
                .map(|i| a[i].norm_sqr())
                .sum()
        }))
    }

    /// Projects `wire` onto `|value>`, renormalizes, and returns the probability of that
    /// outcome relative to the current norm.
    pub fn project(&mut self, wire: usize, value: bool) -> Result<f64> {
        let total = self.norm_sqr();
        let p = self.probability(wire, value)?;
        if p <= f64::MIN_POSITIVE || total <= 0.0 {
            return Err(Error::ZeroProjection);
        }
        let b = self.bit(wire);
        let keep = value as usize;
        let scale = 1.0 / p.sqrt();
        exec::for_each_chunk_mut(&mut self.amps, 1024, |c, chunk| {
            let start = c * 1024;
            for (off, z) in chunk.iter_mut().enumerate() {
                if ((start + off) >> b) & 1 == keep {
                    *z *= scale;
                } else {
                    *z = ZERO;
                }
            }
        });
        Ok(p / total)
    }

    /// Exact expectation of `observable` on `wire`.
    pub fn expectation(&self, wire: usize, observable: Observable) -> Result<C64> {
        if wire >= self.n_qubits {
            return Err(Error::InvalidWire {
                wire,
                n_qubits: self.n_qubits,
            });
        }
        let b = self.bit(wire);
        let a = &self.amps;
        let half = a.len() / 2;
        let cross = exec::sum_by_chunks_complex(half, |r| {
            r.map(|m| {
                let i0 = insert_zero(m, b);
                a[i0].conj() * a[i0 | (1 << b)]
            })
            .sum()
        });
        Ok(match observable {
            Observable::SigmaX => C64::new(2.0 * cross.re, 0.0),
            Observable::SigmaY => C64::new(2.0 * cross.im, 0.0),
            Observable::Raising => 2.0 * cross,
        })
    }
}

#[inline]
fn insert_zero(x: usize, b: usize) -> usize {
    ((x >> b) << (b + 1)) | (x & ((1 << b) - 1))
}

/// Spreads the bits of `x` over the positions not listed in `fixed` (sorted ascending).
#[inline]
fn deposit(mut x: usize, fixed: &[usize]) -> usize {
    for &b in fixed {
        x = insert_zero(x, b);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::gate::Control;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn hadamard_and_cnot() {
        let mut s = QuantumState::zero(1).unwrap();
        s.apply_gate(&Gate::h(0)).unwrap();
        for a in s.amplitudes() {
            assert!((a - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        }
        let mut s = QuantumState::basis(2, 0b10).unwrap();
        s.apply_gate(&Gate::cnot(0, 1)).unwrap();
        assert_eq!(s, QuantumState::basis(2, 0b11).unwrap());
    }

    #[test]
    fn negative_controls() {
        let mut s = QuantumState::basis(3, 0b000).unwrap();
        s.apply_gate(
            &Gate::x(2)
                .controlled_by(Control::off(0))
                .controlled_by(Control::off(1)),
        )
        .unwrap();
        assert_eq!(s, QuantumState::basis(3, 0b001).unwrap());
        s.apply_gate(&Gate::x(2).controlled_by(Control::on(0)))
            .unwrap();
        assert_eq!(s, QuantumState::basis(3, 0b001).unwrap());
    }

    #[test]
    fn raising_expectation() {
        let mut s = QuantumState::zero(2).unwrap();
        assert_eq!(s.expectation(1, Observable::Raising).unwrap(), ZERO);
        s.apply_gate(&Gate::h(1)).unwrap();
        assert!((s.expectation(1, Observable::Raising).unwrap() - ONE).norm() < 1e-15);
        assert!(s.expectation(2, Observable::SigmaX).is_err());
    }

    #[test]
    fn projection_renormalizes() {
        let mut s = QuantumState::zero(2).unwrap();
        s.apply_gate(&Gate::ry(0, 2.0 * (0.3f64).sqrt().acos()))
            .unwrap();
        let p = s.project(0, false).unwrap();
        assert!((p - 0.3).abs() < 1e-14);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
        assert!(matches!(
            QuantumState::zero(1).unwrap().project(0, true),
            Err(Error::ZeroProjection)
        ));
    }
}
