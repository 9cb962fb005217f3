//! Lowering to the fundamental set {H, S, T, CNOT}, rotation synthesis and the
//! circuit-size scaling study.

mod lower;
mod study;
mod synth;

pub use lower::{lower_to_fundamental, CircuitSink, CountingSink, GateSink, Lowering};
pub use study::{fit_quadratic, scaling_study, ScalingFit, ScalingRow, StudyConfig};
pub use synth::{CostModel, GridSynth, RotationSynthesizer, SearchSynthesizer, Synthesized, Word};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};

/// Counts of the four fundamental gates. Depth is reported as the total count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct GateCounts {
    pub h: usize,
    pub s: usize,
    pub t: usize,
    pub cnot: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.h + self.s + self.t + self.cnot
    }

    pub fn scaled(&self, k: usize) -> Self {
        GateCounts {
            h: self.h * k,
            s: self.s * k,
            t: self.t * k,
            cnot: self.cnot * k,
        }
    }
}

impl Add for GateCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GateCounts {
            h: self.h + o.h,
            s: self.s + o.s,
            t: self.t + o.t,
            cnot: self.cnot + o.cnot,
        }
    }
}

impl AddAssign for GateCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl fmt::Display for GateCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "H={} S={} T={} CNOT={} total={}",
            self.h,
            self.s,
            self.t,
            self.cnot,
            self.total()
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceReport {
    pub counts: GateCounts,
    /// Wires, ancillas included.
    pub width: usize,
    pub epsilon: f64,
    /// Rotations handed to the synthesizer (exact Clifford+T angles excluded).
    pub rotations: usize,
    /// Counts per labeled section of the source circuit, summed over repeated labels.
    pub sections: BTreeMap<String, GateCounts>,
}

impl ResourceReport {
    pub fn depth(&self) -> usize {
        self.counts.total()
    }

    pub fn section(&self, label: &str) -> GateCounts {
        self.sections.get(label).copied().unwrap_or_default()
    }
}
