use crate::lattice::{Axis, LatticeSpec};
use crate::{Error, Result};

/// Assignment of register wires: spinor wires first (`s1` selects the upper/lower
/// pair, `s2` the component within it), then the x, y and z position blocks (most
/// significant bit first), then ancillas. Ancillas are always the trailing wires, so a
/// field occupies the high bits of the state index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    spinor: Vec<usize>,
    axes: [Vec<usize>; 3],
    pool: Vec<usize>,
    named: Vec<(String, usize)>,
    n_qubits: usize,
}

impl RegisterLayout {
    /// Layout for `spec` with `spinor_wires` (2, or 1 for the reduced 1-D encoding), an
    /// anonymous scratch pool of `pool` wires and one wire per name in `extra`.
    pub fn for_lattice(
        spec: &LatticeSpec,
        spinor_wires: usize,
        pool: usize,
        extra: &[&str],
    ) -> Result<Self> {
        if !(1..=2).contains(&spinor_wires) {
            return Err(Error::Unsupported(format!("{spinor_wires} spinor wires")));
        }
        let mut next = 0;
        let mut take = |k: usize| {
            let v: Vec<usize> = (next..next + k).collect();
            next += k;
            v
        };
        let spinor = take(spinor_wires);
        let axes = Axis::ALL.map(|a| take(spec.axis_qubits(a) as usize));
        let pool = take(pool);
        let named = extra.iter().map(|n| (n.to_string(), take(1)[0])).collect();
        Ok(RegisterLayout {
            spinor,
            axes,
            pool,
            named,
            n_qubits: next,
        })
    }

    /// Two spinor wires and an ancilla pool as wide as the widest axis.
    pub fn standard(spec: &LatticeSpec) -> Result<Self> {
        let pool = spec.qubits().into_iter().max().unwrap_or(0) as usize;
        Self::for_lattice(spec, 2, pool, &[])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn spinor(&self) -> &[usize] {
        &self.spinor
    }

    pub fn s1(&self) -> usize {
        self.spinor[0]
    }

    pub fn s2(&self) -> Option<usize> {
        self.spinor.get(1).copied()
    }

    pub fn axis(&self, axis: Axis) -> &[usize] {
        &self.axes[axis.index()]
    }

    pub fn position_wires(&self) -> Vec<usize> {
        self.axes.iter().flatten().copied().collect()
    }

    /// Spinor and position wires.
    pub fn data_qubits(&self) -> usize {
        self.spinor.len() + self.axes.iter().map(Vec::len).sum::<usize>()
    }

    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    /// Every ancilla wire: the pool followed by the named ones.
    pub fn ancillas(&self) -> Vec<usize> {
        self.pool
            .iter()
            .copied()
            .chain(self.named.iter().map(|(_, w)| *w))
            .collect()
    }

    pub fn ancilla_count(&self) -> usize {
        self.n_qubits - self.data_qubits()
    }

    pub fn named(&self, name: &str) -> Result<usize> {
        self.named
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| *w)
            .ok_or_else(|| Error::Unsupported(format!("no wire named {name:?}")))
    }

    /// Checks that the position blocks match `spec`.
    pub fn check_lattice(&self, spec: &LatticeSpec) -> Result<()> {
        for a in Axis::ALL {
            if self.axes[a.index()].len() != spec.axis_qubits(a) as usize {
                return Err(Error::InvalidLattice(format!(
                    "layout has {} wires on {}, lattice has {}",
                    self.axes[a.index()].len(),
                    a.name(),
                    spec.axis_qubits(a)
                )));
            }
        }
        Ok(())
    }
}
