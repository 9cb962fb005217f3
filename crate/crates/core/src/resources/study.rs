use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{GateCounts, Lowering, RotationSynthesizer};
use crate::circuits::DiracCircuitBuilder;
use crate::lattice::{LatticeSpec, Potentials, VectorPotential};
use crate::splitting::SplittingScheme;
use crate::{Error, Result};

/// Lowered size of one time step as a function of qubits per axis.
#[derive(Clone, Debug)]
pub struct StudyConfig {
    /// 1 (reduced single-spinor-wire encoding along z), 2 or 3.
    pub dims: u32,
    pub ns: Vec<u32>,
    pub scheme: SplittingScheme,
    pub potentials: Potentials,
    pub epsilon: f64,
    pub ell: f64,
    pub n_star: f64,
}

impl StudyConfig {
    /// Massive particle in a constant vector potential, second-order splitting.
    pub fn new(dims: u32, ns: Vec<u32>) -> Self {
        let a = if dims == 1 {
            [0.0, 0.0, 0.3]
        } else {
            [0.1, 0.2, 0.3]
        };
        StudyConfig {
            dims,
            ns,
            scheme: SplittingScheme::second_order(),
            potentials: Potentials::free(1.0).with_vector(VectorPotential::Constant(a)),
            epsilon: 1e-10,
            ell: 1.0,
            n_star: 1.0,
        }
    }

    fn builder(&self, n: u32) -> Result<DiracCircuitBuilder> {
        let qubits = match self.dims {
            1 => [0, 0, n],
            2 => [n, n, 0],
            3 => [n, n, n],
            d => return Err(Error::InvalidLattice(format!("{d} spatial dimensions"))),
        };
        let spec = LatticeSpec::new(qubits, self.ell, self.n_star)?;
        if self.dims == 1 {
            DiracCircuitBuilder::reduced_1d(spec, self.potentials.clone(), &[])
        } else {
            DiracCircuitBuilder::new(spec, self.potentials.clone())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub n: u32,
    pub counts: GateCounts,
    pub width: usize,
    pub rotations: usize,
    pub sections: BTreeMap<String, GateCounts>,
}

pub fn scaling_study(
    config: &StudyConfig,
    synth: &dyn RotationSynthesizer,
) -> Result<Vec<ScalingRow>> {
    let lowering = Lowering::new(synth, config.epsilon)?;
    config
        .ns
        .iter()
        .map(|&n| {
            let circuit = config.builder(n)?.time_step(&config.scheme, 0.0)?;
            let r = lowering.count(&circuit)?;
            Ok(ScalingRow {
                n,
                counts: r.counts,
                width: r.width,
                rotations: r.rotations,
                sections: r.sections,
            })
        })
        .collect()
}

/// Least-squares `c2 n^2 + c1 n + c0`, plus the log-log slope over the same points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub r_squared: f64,
    pub exponent: f64,
}

impl ScalingFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.c2 * n * n + self.c1 * n + self.c0
    }
}

pub fn fit_quadratic(ns: &[f64], values: &[f64]) -> Result<ScalingFit> {
    if ns.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: ns.len(),
            got: values.len(),
        });
    }
    if ns.len() < 3 {
        return Err(Error::EmptySeries);
    }
    let a = DMatrix::from_fn(ns.len(), 3, |i, j| ns[i].powi(2 - j as i32));
    let b = DVector::from_column_slice(values);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::Unsupported(e.to_string()))?;
    let fitted = &a * &coef;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let ss_res: f64 = values
        .iter()
        .zip(fitted.iter())
        .map(|(y, f)| (y - f).powi(2))
        .sum();
    let ss_tot: f64 = values.iter().map(|y| (y - mean).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };

    let lx: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(ScalingFit {
        c2: coef[0],
        c1: coef[1],
        c0: coef[2],
        r_squared,
        exponent: sxy / sxx,
    })
}
