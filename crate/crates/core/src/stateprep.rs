//! Arbitrary state preparation from uniformly controlled rotation trees, plus the
//! Gray-code lowering of uniformly controlled gates shared with the circuit builders.

use num_complex::Complex64 as C64;

use crate::lattice::SpinorField;
use crate::linalg::Mat2;
use crate::qcore::{encode_field, Circuit, Gate, GateKind, QuantumState, RegisterLayout};
use crate::{Error, Result};

pub use crate::qcore::UniformlyControlledGate;

/// Angles below this are dropped from rotation tables.
const ANGLE_TOL: f64 = 1e-14;
/// Amplitudes below this count as zero when detecting basis states.
const AMP_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationAxis {
    Y,
    Z,
}

impl RotationAxis {
    fn gate(self, target: usize, theta: f64) -> Gate {
        match self {
            RotationAxis::Y => Gate::ry(target, theta),
            RotationAxis::Z => Gate::rz(target, theta),
        }
    }
}

/// Multiplies the target block by `table[p]` for every control pattern `p`.
pub fn apply_uniformly_controlled(
    state: &mut QuantumState,
    ucg: &UniformlyControlledGate,
) -> Result<()> {
    state.apply_uniform(ucg)
}

fn gray(j: usize) -> usize {
    j ^ (j >> 1)
}

/// Lowers a uniformly controlled `R_axis(angles[p])` to `2^k` rotations and `2^k` CNOTs
/// (a single rotation when `k = 0`). Rotations that vanish are omitted, and a table of
/// equal angles collapses to one uncontrolled rotation.
pub fn uniform_rotation_gates(
    axis: RotationAxis,
    controls: &[usize],
    target: usize,
    angles: &[f64],
) -> Result<Vec<Gate>> {
    let k = controls.len();
    let n = 1usize << k;
    if angles.len() != n {
        return Err(Error::TableSize {
            controls: k,
            expected: n,
            got: angles.len(),
        });
    }
    if angles.iter().all(|a| a.abs() < ANGLE_TOL) {
        return Ok(Vec::new());
    }
    if angles.iter().all(|a| (a - angles[0]).abs() < ANGLE_TOL) {
        return Ok(vec![axis.gate(target, angles[0])]);
    }
    let scale = 1.0 / n as f64;
    let mut gates = Vec::with_capacity(2 * n);
    for j in 0..n {
        let g = gray(j);
        let theta: f64 = angles
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if (i & g).count_ones().is_multiple_of(2) {
                    *a
                } else {
                    -*a
                }
            })
            .sum::<f64>()
            * scale;
        if theta.abs() >= ANGLE_TOL {
            gates.push(axis.gate(target, theta));
        }
        // Bit where consecutive Gray codes differ; the last step closes the cycle on the MSB.
        let flip = (g ^ gray((j + 1) % n)).trailing_zeros() as usize;
        gates.push(Gate::cnot(controls[k - 1 - flip], target));
    }
    Ok(gates)
}

/// Realizes `|j> -> e^{i phases[j]} |j>` on `wires` (`wires[0]` most significant) as a
/// cascade of uniformly controlled `R_z`; returns the gates and the leftover global phase.
pub fn diagonal_gates(wires: &[usize], phases: &[f64]) -> Result<(Vec<Gate>, f64)> {
    let m = wires.len();
    if phases.len() != 1usize << m {
        return Err(Error::TableSize {
            controls: m,
            expected: 1 << m,
            got: phases.len(),
        });
    }
    let mut gates = Vec::new();
    let mut level: Vec<f64> = phases.to_vec();
    for depth in (0..m).rev() {
        let diffs: Vec<f64> = level.chunks(2).map(|p| p[1] - p[0]).collect();
        let means: Vec<f64> = level.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        gates.extend(uniform_rotation_gates(
            RotationAxis::Z,
            &wires[..depth],
            wires[depth],
            &diffs,
        )?);
        level = means;
    }
    Ok((gates, level[0]))
}

/// Elementary lowering of a general uniformly controlled gate: per-pattern ZYZ angles
/// become three uniformly controlled rotations, and the per-pattern phases a diagonal
/// on the controls.
pub fn lower_uniform(ucg: &UniformlyControlledGate) -> Result<(Vec<Gate>, f64)> {
    if let Some(u) = ucg.uniform_entry() {
        let z = u.zyz();
        let mut gates = Vec::new();
        for (axis, a) in [
            (RotationAxis::Z, z.xi),
            (RotationAxis::Y, z.theta),
            (RotationAxis::Z, z.delta),
        ] {
            gates.extend(uniform_rotation_gates(axis, &[], ucg.target, &[a])?);
        }
        return Ok((gates, z.global_phase));
    }
    if ucg.table.iter().all(Mat2::is_diagonal) {
        // diag(a, b): the target phase is part of one diagonal over controls + target.
        let mut wires = ucg.controls.clone();
        wires.push(ucg.target);
        let phases: Vec<f64> = ucg
            .table
            .iter()
            .flat_map(|m| [m.at(0, 0).arg(), m.at(1, 1).arg()])
            .collect();
        return diagonal_gates(&wires, &phases);
    }
    let angles: Vec<_> = ucg.table.iter().map(Mat2::zyz).collect();
    let column = |f: fn(&crate::linalg::Zyz) -> f64| angles.iter().map(f).collect::<Vec<f64>>();
    let mut gates = uniform_rotation_gates(
        RotationAxis::Z,
        &ucg.controls,
        ucg.target,
        &column(|z| z.xi),
    )?;
    gates.extend(uniform_rotation_gates(
        RotationAxis::Y,
        &ucg.controls,
        ucg.target,
        &column(|z| z.theta),
    )?);
    gates.extend(uniform_rotation_gates(
        RotationAxis::Z,
        &ucg.controls,
        ucg.target,
        &column(|z| z.delta),
    )?);
    let (diag, global) = diagonal_gates(&ucg.controls, &column(|z| z.global_phase))?;
    gates.extend(diag);
    Ok((gates, global))
}

/// Rotations and CNOTs in the generic lowering of one uniformly controlled rotation.
pub fn uniform_rotation_cost(controls: usize) -> (usize, usize) {
    if controls == 0 {
        (1, 0)
    } else {
        (1 << controls, 1 << controls)
    }
}

/// Circuit on `n_qubits` wires that maps `|0...0>` to the normalized `amps` placed on
/// `wires` (`wires[0]` most significant), leaving all other wires in `|0>`.
pub fn prepare_amplitudes(amps: &[C64], wires: &[usize], n_qubits: usize) -> Result<Circuit> {
    let m = wires.len();
    if amps.len() != 1usize << m {
        return Err(Error::LengthMismatch {
            expected: 1 << m,
            got: amps.len(),
        });
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let mut c = Circuit::new(n_qubits).with_label("prepare");
    let mags: Vec<f64> = amps.iter().map(|z| z.norm() / norm).collect();

    let support: Vec<usize> = (0..amps.len()).filter(|&i| mags[i] > AMP_TOL).collect();
    if let [only] = support[..] {
        for (b, &w) in wires.iter().enumerate() {
            if only >> (m - 1 - b) & 1 == 1 {
                c.push(Gate::x(w))?;
            }
        }
        c.add_global_phase(amps[only].arg());
        return Ok(c);
    }
    let uniform = 1.0 / (amps.len() as f64).sqrt();
    if amps.iter().all(|z| (z / norm - uniform).norm() < AMP_TOL) {
        for &w in wires {
            c.push(Gate::h(w))?;
        }
        return Ok(c);
    }

    // Magnitudes: level q splits every prefix block in two with R_y(2 acos(|lo| / |parent|)).
    let mut block_norms: Vec<Vec<f64>> = vec![mags.iter().map(|x| x * x).collect()];
    for _ in 0..m {
        let last = block_norms.last().unwrap();
        let next = last.chunks(2).map(|p| p[0] + p[1]).collect();
        block_norms.push(next);
    }
    for q in 0..m {
        let parent = &block_norms[m - q];
        let children = &block_norms[m - q - 1];
        let angles: Vec<f64> = parent
            .iter()
            .enumerate()
            .map(|(p, &total)| {
                if total > 0.0 {
                    2.0 * (children[2 * p + 1] / total)
                        .sqrt()
                        .atan2((children[2 * p] / total).sqrt())
                } else {
                    0.0
                }
            })
            .collect();
        for g in uniform_rotation_gates(RotationAxis::Y, &wires[..q], wires[q], &angles)? {
            c.push(g)?;
        }
    }

    let phases: Vec<f64> = amps.iter().map(|z| z.arg()).collect();
    let (gates, global) = diagonal_gates(wires, &phases)?;
    for g in gates {
        c.push(g)?;
    }
    c.add_global_phase(global);
    Ok(c)
}

/// Circuit that prepares `encode(target)` from `|0...0>` on `layout`.
pub fn prepare_state(target: &SpinorField, layout: &RegisterLayout) -> Result<Circuit> {
    if target.norm() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let state = encode_field(target, layout)?;
    let anc = layout.ancilla_count();
    let data: Vec<C64> = state
        .amplitudes()
        .iter()
        .step_by(1 << anc)
        .copied()
        .collect();
    let wires: Vec<usize> = (0..layout.data_qubits()).collect();
    prepare_amplitudes(&data, &wires, layout.n_qubits())
}

/// Single-qubit gates with a rotation angle in `circuit`, the cost driver of preparation.
pub fn rotation_count(circuit: &Circuit) -> usize {
    circuit
        .instructions()
        .iter()
        .filter(|i| {
            matches!(
                i,
                crate::qcore::Instruction::Gate(Gate {
                    kind: GateKind::Ry(_) | GateKind::Rz(_),
                    ..
                })
            )
        })
        .count()
}
