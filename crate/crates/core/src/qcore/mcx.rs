//! Multi-controlled X with a V-chain of Toffolis over clean ancillas, and the
//! Clifford+T form of the Toffoli gate.

use super::gate::{Control, Gate, GateKind};
use super::state::QuantumState;
use crate::{Error, Result};

/// Toffoli as 2 H, 7 T/T-dagger and 6 CNOT gates.
pub fn toffoli_clifford_t(a: usize, b: usize, t: usize) -> Vec<Gate> {
    use GateKind::{Tdg, H, T};
    let g = |k: GateKind, w: usize| Gate::new(k, w);
    vec![
        g(H, t),
        Gate::cnot(b, t),
        g(Tdg, t),
        Gate::cnot(a, t),
        g(T, t),
        Gate::cnot(b, t),
        g(Tdg, t),
        Gate::cnot(a, t),
        g(T, b),
        g(T, t),
        g(H, t),
        Gate::cnot(a, b),
        g(T, a),
        g(Tdg, b),
        Gate::cnot(a, b),
    ]
}

/// Clean ancillas needed by [`mcx_gates`] for `k` controls.
pub fn mcx_ancillas_needed(k: usize) -> usize {
    k.saturating_sub(2)
}

/// Expands an X with arbitrary controls into X, CNOT and Toffoli gates using
/// `k - 2` clean ancillas from `pool` (2k - 3 Toffolis for `k >= 3`). Inactive-low
/// controls are conjugated with X.
pub fn mcx_gates(controls: &[Control], target: usize, pool: &[usize]) -> Result<Vec<Gate>> {
    let k = controls.len();
    let needed = mcx_ancillas_needed(k);
    if pool.len() < needed {
        return Err(Error::InsufficientAncillas {
            needed,
            available: pool.len(),
        });
    }
    let flips: Vec<Gate> = controls
        .iter()
        .filter(|c| !c.active_high)
        .map(|c| Gate::x(c.wire))
        .collect();
    let w: Vec<usize> = controls.iter().map(|c| c.wire).collect();
    let mut body = Vec::new();
    match k {
        0 => body.push(Gate::x(target)),
        1 => body.push(Gate::cnot(w[0], target)),
        2 => body.push(Gate::toffoli(w[0], w[1], target)),
        _ => {
            let anc = &pool[..needed];
            let mut compute = vec![Gate::toffoli(w[0], w[1], anc[0])];
            for j in 1..needed {
                compute.push(Gate::toffoli(w[j + 1], anc[j - 1], anc[j]));
            }
            body.extend(compute.iter().cloned());
            body.push(Gate::toffoli(w[k - 1], anc[needed - 1], target));
            body.extend(compute.into_iter().rev());
        }
    }
    let mut out = flips.clone();
    out.extend(body);
    out.extend(flips);
    Ok(out)
}

/// Flips `target` when every control matches its polarity, through the ancilla
/// decomposition. Ancillas must start (and end) in `|0>`.
pub fn apply_multi_controlled_x(
    state: &mut QuantumState,
    controls: &[Control],
    target: usize,
    pool: &[usize],
) -> Result<()> {
    let needed = mcx_ancillas_needed(controls.len());
    if pool.len() < needed {
        return Err(Error::InsufficientAncillas {
            needed,
            available: pool.len(),
        });
    }
    for &a in &pool[..needed] {
        if state.probability(a, true)? > 0.0 {
            return Err(Error::DirtyAncilla(a));
        }
    }
    for g in mcx_gates(controls, target, pool)? {
        state.apply_gate(&g)?;
    }
    Ok(())
}
