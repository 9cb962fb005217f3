use super::ops::{
    apply_mass, apply_scalar_potential, apply_vector_potential, spin_rotate, stream, Direction,
};
use crate::lattice::{Axis, LatticeSpec, Potentials, SpinorField};
use crate::splitting::{OperatorTag, SplittingScheme};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
enum Action {
    Stream { axis: Axis, sites: i64 },
    Mass,
    Scalar,
    Vector,
}

#[derive(Clone, Copy, Debug)]
struct PlannedStep {
    action: Action,
    /// Fraction of `dt` this step covers.
    weight: f64,
    /// Offset of its time argument, in units of `dt`.
    time_offset: f64,
}

/// A splitting scheme bound to a lattice and a set of potentials.
///
/// Streaming shifts are resolved to whole sites on construction; a scheme whose
/// coefficients would need fractional shifts is rejected (refine the lattice with
/// [`LatticeSpec::refine`] instead). Collapsed axes are skipped.
#[derive(Clone, Debug)]
pub struct ClassicalSolver {
    spec: LatticeSpec,
    potentials: Potentials,
    scheme: SplittingScheme,
    plan: Vec<PlannedStep>,
}

impl ClassicalSolver {
    pub fn new(spec: LatticeSpec, potentials: Potentials, scheme: SplittingScheme) -> Result<Self> {
        let mut plan = Vec::new();
        for s in scheme.timed_steps() {
            let action = match s.tag {
                OperatorTag::X | OperatorTag::Y | OperatorTag::Z => {
                    let axis = s.tag.streaming_axis().expect("streaming tag");
                    let sites = spec.shift_sites(s.coefficient)?;
                    if !spec.is_active(axis) {
                        continue;
                    }
                    Action::Stream { axis, sites }
                }
                OperatorTag::Mass => Action::Mass,
                OperatorTag::Scalar => Action::Scalar,
                OperatorTag::Vector => Action::Vector,
                OperatorTag::TimeShift => unreachable!("timed_steps excludes time shifts"),
            };
            plan.push(PlannedStep {
                action,
                weight: ratio_f64(s.coefficient),
                time_offset: ratio_f64(s.time_offset),
            });
        }
        Ok(ClassicalSolver {
            spec,
            potentials,
            scheme,
            plan,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn potentials(&self) -> &Potentials {
        &self.potentials
    }

    pub fn scheme(&self) -> &SplittingScheme {
        &self.scheme
    }

    pub fn dt(&self) -> f64 {
        self.spec.dt()
    }

    /// Advances `field` from `t` to `t + dt`.
    pub fn step(&self, field: &mut SpinorField, t: f64) -> Result<()> {
        if field.spec().qubits() != self.spec.qubits() {
            return Err(Error::InvalidLattice(
                "field lattice differs from the solver lattice".into(),
            ));
        }
        let dt = self.spec.dt();
        for p in &self.plan {
            let dt_eff = p.weight * dt;
            let t_eval = t + p.time_offset * dt;
            match p.action {
                Action::Stream { axis, sites } => {
                    spin_rotate(field, axis, Direction::Inverse);
                    stream(field, axis, sites);
                    spin_rotate(field, axis, Direction::Forward);
                }
                Action::Mass => apply_mass(field, self.potentials.mass, dt_eff),
                Action::Scalar => apply_scalar_potential(field, &self.potentials, t_eval, dt_eff)?,
                Action::Vector => apply_vector_potential(field, &self.potentials, t_eval, dt_eff)?,
            }
        }
        Ok(())
    }

    /// Runs `steps` steps from `t0`, calling `observe(k, t_k, field)` after each one.
    pub fn evolve(
        &self,
        field: &mut SpinorField,
        t0: f64,
        steps: usize,
        mut observe: impl FnMut(usize, f64, &SpinorField),
    ) -> Result<()> {
        let dt = self.spec.dt();
        for k in 0..steps {
            self.step(field, t0 + k as f64 * dt)?;
            observe(k + 1, t0 + (k + 1) as f64 * dt, field);
        }
        Ok(())
    }
}

/// One step of `scheme` on the field's own lattice.
pub fn step(
    field: &mut SpinorField,
    scheme: &SplittingScheme,
    potentials: &Potentials,
    t: f64,
) -> Result<()> {
    ClassicalSolver::new(field.spec().clone(), potentials.clone(), scheme.clone())?.step(field, t)
}

pub(crate) fn ratio_f64(r: num_rational::Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
