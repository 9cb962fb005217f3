use num_complex::Complex64 as C64;

use crate::circuits::DiracCircuitBuilder;
use crate::classical::ClassicalSolver;
use crate::lattice::{Potentials, SpinorField};
use crate::qcore::{Control, Gate, Observable};
use crate::splitting::SplittingScheme;
use crate::Result;

/// Name of the interferometer ancilla in the autocorrelation register.
pub const AUTOCORR_ANCILLA: &str = "autocorr";

/// `C(t_k) = <psi(0)|psi(t_k)>` for `k = 0..=steps`, from the classical solver.
pub fn autocorrelation_classical(
    trial: &SpinorField,
    solver: &ClassicalSolver,
    steps: usize,
) -> Result<Vec<C64>> {
    let mut psi = trial.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(trial.inner(&psi)?);
    let dt = solver.dt();
    for k in 0..steps {
        solver.step(&mut psi, k as f64 * dt)?;
        out.push(trial.inner(&psi)?);
    }
    Ok(out)
}

/// The same series read off an ancilla: after `H` on the ancilla and time evolution
/// controlled on it, `<sigma_x + i sigma_y>` of the ancilla equals the overlap. The
/// expectation is evaluated exactly on the statevector after every step.
pub fn autocorrelation_quantum(
    trial: &SpinorField,
    potentials: &Potentials,
    scheme: &SplittingScheme,
    steps: usize,
) -> Result<Vec<C64>> {
    let spec = trial.spec().clone();
    let builder = DiracCircuitBuilder::with_extra_ancillas(
        spec.clone(),
        potentials.clone(),
        &[AUTOCORR_ANCILLA],
    )?;
    let anc = builder.layout().named(AUTOCORR_ANCILLA)?;
    let mut state = builder.encode(trial)?;
    state.apply_gate(&Gate::h(anc))?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.expectation(anc, Observable::Raising)?);
    for k in 0..steps {
        let step = builder
            .time_step(scheme, k as f64 * spec.dt())?
            .controlled(Control::on(anc))?;
        step.apply(&mut state)?;
        out.push(state.expectation(anc, Observable::Raising)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeSpec, ScalarPotential, VectorPotential};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quantum_series_matches_classical_overlaps() {
        let spec = LatticeSpec::new([2, 1, 0], 0.5, 1.0).unwrap();
        let p = Potentials::free(0.7)
            .with_vector(VectorPotential::Constant([0.2, -0.4, 0.1]))
            .with_scalar(ScalarPotential::Linear {
                field: [0.3, 0.0, 0.0],
                omega: 0.0,
            });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let amps = (0..4 * spec.sites())
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let trial = SpinorField::from_amplitudes(spec.clone(), amps)
            .unwrap()
            .normalized()
            .unwrap();
        let scheme = SplittingScheme::second_order();
        let solver = ClassicalSolver::new(spec, p.clone(), scheme.clone()).unwrap();
        let cl = autocorrelation_classical(&trial, &solver, 12).unwrap();
        let q = autocorrelation_quantum(&trial, &p, &scheme, 12).unwrap();
        assert!((cl[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        for (a, b) in cl.iter().zip(&q) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenstate_gives_a_pure_phase() {
        // At p = 0 the upper component is an eigenvector with E = m c^2.
        let spec = LatticeSpec::new([0, 0, 3], 0.5, 1.0).unwrap();
        let trial = SpinorField::from_fn(spec.clone(), |_| {
            [
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ]
        })
        .normalized()
        .unwrap();
        let scheme = SplittingScheme::second_order();
        let solver = ClassicalSolver::new(spec.clone(), Potentials::free(1.0), scheme).unwrap();
        let c = autocorrelation_classical(&trial, &solver, 20).unwrap();
        for (k, z) in c.iter().enumerate() {
            let t = k as f64 * spec.dt();
            assert!((z - C64::from_polar(1.0, -t)).norm() < 1e-12);
        }
    }
}
