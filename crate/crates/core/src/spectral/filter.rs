use std::f64::consts::{E, PI};

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::density::{trapezoid, Window};
use crate::circuits::DiracCircuitBuilder;
use crate::classical::ClassicalSolver;
use crate::lattice::{Potentials, SpinorField};
use crate::linalg::Mat2;
use crate::qcore::{Control, Gate};
use crate::splitting::SplittingScheme;
use crate::{Error, Result};

/// Ancilla whose `|1>` branch accumulates the filtered state.
pub const FILTER_ANCILLA: &str = "filter";
/// Ancilla used to realize the singular values by post-selection.
pub const REALIZATION_ANCILLA: &str = "realize";

/// One non-unitary gate `B^ = N [[1, 0], [B, 1]]` and its realization `U diag(1, a) V^dagger`.
#[derive(Clone, Copy, Debug)]
pub struct FilterStep {
    pub coefficient: C64,
    pub normalization: f64,
    /// Smaller singular value of `B^`; the larger is 1.
    pub singular_value: f64,
    pub u: Mat2,
    pub v_dagger: Mat2,
}

impl FilterStep {
    pub fn new(b: C64) -> Result<Self> {
        let m = b.norm();
        let root = m * (1.0 + m * m / 4.0).sqrt();
        let normalization = 1.0 / (1.0 + m * m / 2.0 + root).sqrt();
        let matrix = Self::matrix_of(b, normalization);
        let dense = Matrix2::from_fn(|i, j| matrix.at(i, j));
        let svd = dense.svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => {
                return Err(Error::Unsupported(
                    "singular value decomposition failed".into(),
                ))
            }
        };
        let sv = svd.singular_values;
        let step = FilterStep {
            coefficient: b,
            normalization,
            singular_value: sv[1] / sv[0],
            u: crate::linalg::Mat([[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]]),
            v_dagger: crate::linalg::Mat([[v_t[(0, 0)], v_t[(0, 1)]], [v_t[(1, 0)], v_t[(1, 1)]]]),
        };
        let defect = step.realization_defect();
        if defect > 1e-12 || (sv[0] - 1.0).abs() > 1e-12 {
            return Err(Error::Unsupported(format!(
                "filter gate realization off by {defect:e}"
            )));
        }
        Ok(step)
    }

    fn matrix_of(b: C64, n: f64) -> Mat2 {
        Mat2::new(
            C64::new(n, 0.0),
            C64::new(0.0, 0.0),
            b * n,
            C64::new(n, 0.0),
        )
    }

    pub fn matrix(&self) -> Mat2 {
        Self::matrix_of(self.coefficient, self.normalization)
    }

    /// `|| U Sigma V^dagger - B^ ||` entrywise.
    pub fn realization_defect(&self) -> f64 {
        let sigma = Mat2::diagonal([C64::new(1.0, 0.0), C64::new(self.singular_value, 0.0)]);
        (self.u * sigma * self.v_dagger).max_abs_diff(&self.matrix())
    }

    /// Ancilla rotation for the controlled `P`: `[[a, s], [-s, a]]` with `s = sqrt(1 - a^2)`.
    fn realization_angle(&self) -> f64 {
        -2.0 * self.singular_value.clamp(0.0, 1.0).acos()
    }
}

/// Quadrature of `(1/t_f) int_0^{t_f} w(t) e^{iEt} psi(t) dt` with `N_t + 1` samples.
#[derive(Clone, Debug)]
pub struct FilterPlan {
    pub energy: f64,
    pub dt: f64,
    pub steps: usize,
    pub window: Window,
    pub weights: Vec<f64>,
    /// `B_k = dt a_k w(t_k) e^{i E t_k} / t_f`.
    pub coefficients: Vec<C64>,
    pub gates: Vec<FilterStep>,
}

impl FilterPlan {
    pub fn new(energy: f64, dt: f64, steps: usize, window: Window) -> Result<Self> {
        let limit = PI / dt;
        if !(energy.abs() <= limit) {
            return Err(Error::EnergyOutOfBand { energy, limit });
        }
        if steps < 1 {
            return Err(Error::EmptySeries);
        }
        let t_f = steps as f64 * dt;
        let weights: Vec<f64> = trapezoid(steps).collect();
        let coefficients: Vec<C64> = weights
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let t = k as f64 * dt;
                C64::from_polar(dt * a * window.value(t, t_f) / t_f, energy * t)
            })
            .collect();
        let gates = coefficients
            .iter()
            .map(|&b| FilterStep::new(b))
            .collect::<Result<_>>()?;
        Ok(FilterPlan {
            energy,
            dt,
            steps,
            window,
            weights,
            coefficients,
            gates,
        })
    }

    pub fn final_time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn resolution(&self) -> f64 {
        PI / self.final_time()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Project onto `|0>`, record the probability, renormalize.
    Deterministic,
    /// Sample each measurement; on failure start over, up to `max_attempts` runs.
    Sampled { seed: u64, max_attempts: usize },
}

#[derive(Clone, Debug)]
pub struct FilterOutcome {
    /// Filtered field, normalized.
    pub field: SpinorField,
    /// Product of the per-step post-selection probabilities.
    pub success_probability: f64,
    pub step_probabilities: Vec<f64>,
    /// Probability of finding the filter ancilla in `|1>` at the end.
    pub branch_probability: f64,
    pub attempts: usize,
}

/// `(1/e)(1 - 1/N_t)`.
pub fn success_probability_bound(steps: usize) -> f64 {
    (1.0 - 1.0 / steps as f64) / E
}

/// Runs the filter on the statevector: alternates `B^_k` (realized with the
/// singular-value ancilla and post-selection) with time steps controlled on the filter
/// ancilla being `|0>`, then keeps the `|1>` branch.
pub fn feit_fleck_filter(
    trial: &SpinorField,
    potentials: &Potentials,
    scheme: &SplittingScheme,
    plan: &FilterPlan,
    mode: MeasurementMode,
) -> Result<FilterOutcome> {
    let spec = trial.spec().clone();
    if (plan.dt - spec.dt()).abs() > 1e-12 * spec.dt() {
        return Err(Error::Unsupported(
            "filter plan time step differs from the lattice time step".into(),
        ));
    }
    let builder = DiracCircuitBuilder::with_extra_ancillas(
        spec.clone(),
        potentials.clone(),
        &[FILTER_ANCILLA, REALIZATION_ANCILLA],
    )?;
    let c = builder.layout().named(FILTER_ANCILLA)?;
    let r = builder.layout().named(REALIZATION_ANCILLA)?;
    let steps: Vec<_> = (0..plan.steps)
        .map(|k| {
            builder
                .time_step(scheme, k as f64 * spec.dt())?
                .controlled(Control::off(c))
        })
        .collect::<Result<_>>()?;
    let initial = builder.encode(trial)?;

    let (mut rng, max_attempts) = match mode {
        MeasurementMode::Deterministic => (None, 1),
        MeasurementMode::Sampled { seed, max_attempts } => {
            (Some(ChaCha8Rng::seed_from_u64(seed)), max_attempts.max(1))
        }
    };
    'attempt: for attempt in 1..=max_attempts {
        let mut state = initial.clone();
        let mut probs = Vec::with_capacity(plan.gates.len());
        for (k, g) in plan.gates.iter().enumerate() {
            state.apply_gate(&Gate::unitary(g.v_dagger, c)?)?;
            state.apply_gate(&Gate::ry(r, g.realization_angle()).controlled_by(Control::on(c)))?;
            let p0 = state.probability(r, false)?;
            if let Some(rng) = rng.as_mut() {
                if rng.random::<f64>() >= p0 {
                    continue 'attempt;
                }
            }
            state.project(r, false)?;
            probs.push(p0);
            state.apply_gate(&Gate::unitary(g.u, c)?)?;
            if k < plan.steps {
                steps[k].apply(&mut state)?;
            }
        }
        let branch = state.project(c, true)?;
        state.apply_gate(&Gate::x(c))?;
        let field = builder.decode(&state)?;
        return Ok(FilterOutcome {
            field,
            success_probability: probs.iter().product(),
            step_probabilities: probs,
            branch_probability: branch,
            attempts: attempt,
        });
    }
    Err(Error::Unsupported(format!(
        "post-selection failed in all {max_attempts} attempts"
    )))
}

/// The quadrature sum `sum_k B_k psi(t_k)` itself, unnormalized.
pub fn feit_fleck_classical(
    trial: &SpinorField,
    solver: &ClassicalSolver,
    plan: &FilterPlan,
) -> Result<SpinorField> {
    let mut psi = trial.clone();
    let mut acc = SpinorField::zeros(trial.spec().clone());
    for (k, b) in plan.coefficients.iter().enumerate() {
        for (a, z) in acc.amplitudes_mut().iter_mut().zip(psi.amplitudes()) {
            *a += b * z;
        }
        if k < plan.steps {
            solver.step(&mut psi, k as f64 * plan.dt)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;

    fn mixed_trial(spec: &LatticeSpec) -> SpinorField {
        let a = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        SpinorField::from_fn(spec.clone(), move |_| [a, z, a * 0.8, z])
            .normalized()
            .unwrap()
    }

    fn upper(spec: &LatticeSpec) -> SpinorField {
        let z = C64::new(0.0, 0.0);
        SpinorField::from_fn(spec.clone(), move |_| [C64::new(1.0, 0.0), z, z, z])
            .normalized()
            .unwrap()
    }

    #[test]
    fn zero_coefficient_is_a_passthrough() {
        let s = FilterStep::new(C64::new(0.0, 0.0)).unwrap();
        assert_eq!(s.singular_value, 1.0);
        assert!(s.matrix().max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn svd_realizes_the_gate() {
        for b in [
            C64::new(0.01, 0.0),
            C64::from_polar(0.3, 1.2),
            C64::from_polar(2.5, -2.0),
        ] {
            let s = FilterStep::new(b).unwrap();
            assert!(s.realization_defect() < 1e-12);
            assert!(s.singular_value > 0.0 && s.singular_value <= 1.0);
            let closed = (-2.0 * (b.norm() / 2.0).asinh()).exp();
            assert!((s.singular_value - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_outside_band_is_rejected() {
        assert!(matches!(
            FilterPlan::new(40.0, 0.1, 10, Window::Hann),
            Err(Error::EnergyOutOfBand { .. })
        ));
    }

    #[test]
    fn bound_values() {
        assert!((success_probability_bound(100) - 0.99 / E).abs() < 1e-15);
        assert!((success_probability_bound(1_000_000) - 1.0 / E).abs() < 1e-6);
    }

    /// Two classical branches under the same `B^_k` and a step on the first branch only.
    fn two_branch(
        trial: &SpinorField,
        solver: &ClassicalSolver,
        plan: &FilterPlan,
    ) -> (SpinorField, SpinorField) {
        let mut a = trial.clone();
        let mut s = SpinorField::zeros(trial.spec().clone());
        for (k, g) in plan.gates.iter().enumerate() {
            let n = g.normalization;
            for (sv, av) in s.amplitudes_mut().iter_mut().zip(a.amplitudes()) {
                *sv = (*sv + g.coefficient * av) * n;
            }
            a.scale(C64::new(n, 0.0));
            if k < plan.steps {
                solver.step(&mut a, k as f64 * plan.dt).unwrap();
            }
        }
        (a, s)
    }

    #[test]
    fn quantum_filter_matches_two_branch_emulation() {
        let spec = LatticeSpec::new([0, 0, 2], 0.5, 1.0).unwrap();
        let p = Potentials::free(1.0);
        let scheme = SplittingScheme::second_order();
        let solver = ClassicalSolver::new(spec.clone(), p.clone(), scheme.clone()).unwrap();
        let trial = mixed_trial(&spec);
        let plan = FilterPlan::new(1.0, spec.dt(), 24, Window::Hann).unwrap();
        let out =
            feit_fleck_filter(&trial, &p, &scheme, &plan, MeasurementMode::Deterministic).unwrap();
        let (a, s) = two_branch(&trial, &solver, &plan);
        let total = a.norm() + s.norm();
        assert!((out.success_probability - total).abs() < 1e-10);
        assert!((out.branch_probability - s.norm() / total).abs() < 1e-10);
        assert!(out.field.max_abs_diff(&s.normalized().unwrap()) < 1e-10);
    }

    #[test]
    fn filter_picks_the_positive_branch() {
        let spec = LatticeSpec::new([0, 0, 2], 0.5, 1.0).unwrap();
        let p = Potentials::free(1.0);
        let scheme = SplittingScheme::second_order();
        let trial = mixed_trial(&spec);
        let plan = FilterPlan::new(1.0, spec.dt(), 200, Window::Hann).unwrap();
        let out =
            feit_fleck_filter(&trial, &p, &scheme, &plan, MeasurementMode::Deterministic).unwrap();
        let target = upper(&spec);
        let before = trial.fidelity(&target).unwrap();
        let after = out.field.fidelity(&target).unwrap();
        assert!(after >= 0.99 && after > before);
        let solver = ClassicalSolver::new(spec.clone(), p, scheme).unwrap();
        let ideal = feit_fleck_classical(&trial, &solver, &plan).unwrap();
        assert!(ideal.fidelity(&target).unwrap() > 0.999);
    }

    #[test]
    fn eigenstate_is_kept() {
        let spec = LatticeSpec::new([0, 0, 2], 0.5, 1.0).unwrap();
        let p = Potentials::free(1.0);
        let scheme = SplittingScheme::second_order();
        let trial = upper(&spec);
        let plan = FilterPlan::new(1.0, spec.dt(), 60, Window::Hann).unwrap();
        let out =
            feit_fleck_filter(&trial, &p, &scheme, &plan, MeasurementMode::Deterministic).unwrap();
        assert!(out.field.fidelity(&trial).unwrap() >= 0.999);
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let spec = LatticeSpec::new([0, 0, 1], 0.5, 1.0).unwrap();
        let p = Potentials::free(1.0);
        let scheme = SplittingScheme::second_order();
        let plan = FilterPlan::new(1.0, spec.dt(), 10, Window::Hann).unwrap();
        let run = |seed| {
            feit_fleck_filter(
                &mixed_trial(&spec),
                &p,
                &scheme,
                &plan,
                MeasurementMode::Sampled {
                    seed,
                    max_attempts: 100,
                },
            )
            .unwrap()
        };
        let (a, b) = (run(7), run(7));
        assert_eq!(a.attempts, b.attempts);
        assert_eq!(a.field, b.field);
        let det = feit_fleck_filter(
            &mixed_trial(&spec),
            &p,
            &scheme,
            &plan,
            MeasurementMode::Deterministic,
        )
        .unwrap();
        assert!(a.field.max_abs_diff(&det.field) < 1e-12);
    }
}
