use num_complex::Complex64 as C64;

use super::layout::RegisterLayout;
use super::state::QuantumState;
use crate::lattice::{LatticeSpec, SpinorField};
use crate::linalg::ZERO;
use crate::{Error, Result};

/// Largest total probability on non-zero ancilla states that decoding tolerates.
const ANCILLA_LEAK_TOL: f64 = 1e-20;

fn check_layout(spec: &LatticeSpec, layout: &RegisterLayout) -> Result<()> {
    layout.check_lattice(spec)?;
    if layout.data_qubits() + layout.ancilla_count() != layout.n_qubits() {
        return Err(Error::Unsupported(
            "ancillas must be the trailing wires".into(),
        ));
    }
    Ok(())
}

/// Field component stored under spinor pattern `p`.
fn component_of(layout: &RegisterLayout, pattern: usize) -> usize {
    if layout.spinor().len() == 2 {
        pattern
    } else {
        // Reduced encoding: phi1 and chi1 only.
        2 * pattern
    }
}

/// `alpha_{S,i,j,k} = ell^{d/2} psi_S(x_ijk)` with ancillas in `|0>`.
///
/// The reduced one-spinor-wire layout stores `phi1` and `chi1` and requires the other
/// two components to vanish.
pub fn encode_field(field: &SpinorField, layout: &RegisterLayout) -> Result<QuantumState> {
    let spec = field.spec();
    check_layout(spec, layout)?;
    let norm = field.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let sites = spec.sites();
    let patterns = 1usize << layout.spinor().len();
    if patterns == 2
        && (field
            .component(1)
            .iter()
            .chain(field.component(3))
            .any(|z| *z != ZERO))
    {
        return Err(Error::Unsupported(
            "reduced encoding needs phi2 = chi2 = 0".into(),
        ));
    }
    let scale = spec.cell_volume().sqrt();
    let anc = layout.ancilla_count();
    let mut amps = vec![ZERO; 1usize << layout.n_qubits()];
    for p in 0..patterns {
        let comp = field.component(component_of(layout, p));
        for (site, z) in comp.iter().enumerate() {
            amps[(p * sites + site) << anc] = z * scale;
        }
    }
    QuantumState::from_amplitudes(layout.n_qubits(), amps)
}

/// Inverse of [`encode_field`]; fails if any ancilla carries weight.
pub fn decode_field(
    state: &QuantumState,
    layout: &RegisterLayout,
    spec: &LatticeSpec,
) -> Result<SpinorField> {
    check_layout(spec, layout)?;
    if state.n_qubits() != layout.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: layout.n_qubits(),
            got: state.n_qubits(),
        });
    }
    let anc = layout.ancilla_count();
    let amps = state.amplitudes();
    if anc > 0 {
        let mask = (1usize << anc) - 1;
        let leak: f64 = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        if leak > ANCILLA_LEAK_TOL {
            let dirty = layout
                .ancillas()
                .into_iter()
                .find(|&w| state.probability(w, true).unwrap_or(0.0) > 0.0)
                .unwrap_or(layout.data_qubits());
            return Err(Error::DirtyAncilla(dirty));
        }
    }
    let sites = spec.sites();
    let scale = 1.0 / spec.cell_volume().sqrt();
    let mut out = vec![C64::new(0.0, 0.0); 4 * sites];
    let patterns = 1usize << layout.spinor().len();
    for p in 0..patterns {
        let comp = component_of(layout, p);
        for site in 0..sites {
            out[comp * sites + site] = amps[(p * sites + site) << anc] * scale;
        }
    }
    SpinorField::from_amplitudes(spec.clone(), out)
}
