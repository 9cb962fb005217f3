//! Operator-splitting schemes with exact rational coefficients.
//!
//! A scheme is a list of steps in application order (the first step acts on the state
//! first). Each step exponentiates one part of the Hamiltonian over `coefficient * dt`.
//! Time-dependent parts are evaluated at `t_n + dt * tau`, where `tau` is the sum of the
//! [`OperatorTag::TimeShift`] coefficients applied before the step.

mod search;

pub use search::{search_rational_splittings, RationalSolution};

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Pow, Zero};

use crate::{Error, Result};

pub type Coefficient = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorTag {
    /// Streaming sandwich along x.
    X,
    Y,
    Z,
    Mass,
    /// Scalar potential phase.
    Scalar,
    /// Vector potential rotation.
    Vector,
    TimeShift,
}

impl OperatorTag {
    pub const OPERATORS: [OperatorTag; 6] = [
        OperatorTag::X,
        OperatorTag::Y,
        OperatorTag::Z,
        OperatorTag::Mass,
        OperatorTag::Scalar,
        OperatorTag::Vector,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            OperatorTag::X => "X",
            OperatorTag::Y => "Y",
            OperatorTag::Z => "Z",
            OperatorTag::Mass => "M",
            OperatorTag::Scalar => "V",
            OperatorTag::Vector => "A",
            OperatorTag::TimeShift => "T",
        }
    }

    pub fn streaming_axis(self) -> Option<crate::lattice::Axis> {
        use crate::lattice::Axis;
        match self {
            OperatorTag::X => Some(Axis::X),
            OperatorTag::Y => Some(Axis::Y),
            OperatorTag::Z => Some(Axis::Z),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SplitStep {
    pub tag: OperatorTag,
    pub coefficient: Coefficient,
}

impl SplitStep {
    pub fn new(tag: OperatorTag, coefficient: Coefficient) -> Self {
        SplitStep { tag, coefficient }
    }
}

/// An operator step together with the time offset (in units of `dt`) at which its
/// time-dependent part is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimedStep {
    pub tag: OperatorTag,
    pub coefficient: Coefficient,
    pub time_offset: Coefficient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingScheme {
    steps: Vec<SplitStep>,
    order: u32,
}

fn half() -> Coefficient {
    Ratio::new(1, 2)
}

impl SplittingScheme {
    /// Checks that every operator tag and the time shift sum to one.
    pub fn new(steps: Vec<SplitStep>, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidScheme("order must be positive".into()));
        }
        let scheme = SplittingScheme { steps, order };
        let sums = scheme.tag_sums();
        for tag in OperatorTag::OPERATORS
            .into_iter()
            .chain([OperatorTag::TimeShift])
        {
            let s = sums.get(&tag).copied().unwrap_or_else(Coefficient::zero);
            if s != Coefficient::one() {
                return Err(Error::InvalidScheme(format!(
                    "coefficients of {} sum to {s}",
                    tag.symbol()
                )));
            }
        }
        if scheme.steps.iter().any(|s| s.coefficient.is_zero()) {
            return Err(Error::InvalidScheme("zero coefficient".into()));
        }
        Ok(scheme)
    }

    /// Lie-type product `Q_A Q_V Q_m Q_z Q_y Q_x`, all parts at `t_n`; local error
    /// `O(dt^2)`.
    pub fn second_order() -> Self {
        use OperatorTag::*;
        let one = Coefficient::one();
        let steps = [X, Y, Z, Mass, Scalar, Vector, TimeShift].map(|t| SplitStep::new(t, one));
        SplittingScheme {
            steps: steps.to_vec(),
            order: 2,
        }
    }

    /// Symmetric product around a full `Q_A` step with time-dependent parts at
    /// `t_n + dt/2`; local error `O(dt^3)`.
    pub fn third_order() -> Self {
        use OperatorTag::*;
        let h = half();
        let mut steps = vec![SplitStep::new(TimeShift, h)];
        let wing = [X, Y, Z, Mass, Scalar];
        steps.extend(wing.iter().map(|&t| SplitStep::new(t, h)));
        steps.push(SplitStep::new(Vector, Coefficient::one()));
        steps.extend(wing.iter().rev().map(|&t| SplitStep::new(t, h)));
        steps.push(SplitStep::new(TimeShift, h));
        SplittingScheme { steps, order: 3 }
    }

    pub fn by_order(order: u32) -> Result<Self> {
        match order {
            2 => Ok(Self::second_order()),
            3 => Ok(Self::third_order()),
            _ => Err(Error::InvalidScheme(format!(
                "no built-in scheme of order {order}"
            ))),
        }
    }

    /// Every step, including time shifts, in application order.
    pub fn steps(&self) -> &[SplitStep] {
        &self.steps
    }

    /// Local accuracy exponent `q`: one step is exact up to `O(dt^q)`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn operator_steps(&self) -> impl Iterator<Item = &SplitStep> + '_ {
        self.steps
            .iter()
            .filter(|s| s.tag != OperatorTag::TimeShift)
    }

    pub fn operator_count(&self) -> usize {
        self.operator_steps().count()
    }

    /// Operator steps with their time offsets.
    pub fn timed_steps(&self) -> Vec<TimedStep> {
        let mut offset = Coefficient::zero();
        let mut out = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            if s.tag == OperatorTag::TimeShift {
                offset += s.coefficient;
            } else {
                out.push(TimedStep {
                    tag: s.tag,
                    coefficient: s.coefficient,
                    time_offset: offset,
                });
            }
        }
        out
    }

    pub fn tag_sums(&self) -> BTreeMap<OperatorTag, Coefficient> {
        let mut sums = BTreeMap::new();
        for s in &self.steps {
            *sums.entry(s.tag).or_insert_with(Coefficient::zero) += s.coefficient;
        }
        sums
    }

    pub fn reversed(&self) -> Self {
        SplittingScheme {
            steps: self.steps.iter().rev().copied().collect(),
            order: self.order,
        }
    }

    pub fn is_palindromic(&self) -> bool {
        self.steps.iter().eq(self.steps.iter().rev())
    }

    /// Coefficients of the streaming steps, which must map to whole lattice shifts.
    pub fn streaming_coefficients(&self) -> impl Iterator<Item = Coefficient> + '_ {
        self.steps
            .iter()
            .filter(|s| s.tag.streaming_axis().is_some())
            .map(|s| s.coefficient)
    }

    /// Suzuki's recursion `F'(dt) = F(p_1 dt) ... F(p_r dt)`.
    ///
    /// With local error exponent `q = self.order()` the weights must satisfy
    /// `sum p = 1` and `sum p^q = 0`; the result has order `q + 1`. As in the operator
    /// product, the rightmost factor `F(p_r dt)` acts first.
    pub fn suzuki_compose(&self, p: &[Coefficient]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::SuzukiConstraint("empty weight list".into()));
        }
        let sum: Coefficient = p.iter().sum();
        if sum != Coefficient::one() {
            return Err(Error::SuzukiConstraint(format!(
                "sum of weights is {sum}, not 1"
            )));
        }
        let q = self.order as i32;
        let power_sum: Coefficient = p.iter().map(|&x| x.pow(q)).sum();
        if !power_sum.is_zero() {
            return Err(Error::SuzukiConstraint(format!(
                "sum of weights^{q} is {power_sum}, not 0"
            )));
        }
        if p.iter().any(Zero::is_zero) {
            return Err(Error::SuzukiConstraint("zero weight".into()));
        }
        let steps = p
            .iter()
            .rev()
            .flat_map(|&w| {
                self.steps
                    .iter()
                    .map(move |s| SplitStep::new(s.tag, s.coefficient * w))
            })
            .collect();
        SplittingScheme::new(steps, self.order + 1)
    }
}

impl fmt::Display for SplittingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| format!("{}({})", s.tag.symbol(), s.coefficient))
            .collect();
        write!(f, "order {}: {}", self.order, parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use OperatorTag::*;

    fn r(n: i64, d: i64) -> Coefficient {
        Ratio::new(n, d)
    }

    #[test]
    fn second_order_layout() {
        let s = SplittingScheme::second_order();
        let tags: Vec<_> = s.operator_steps().map(|s| s.tag).collect();
        assert_eq!(tags, [X, Y, Z, Mass, Scalar, Vector]);
        assert!(s.timed_steps().iter().all(|t| t.time_offset.is_zero()));
        assert!(s.tag_sums().values().all(|v| *v == Coefficient::one()));
        assert_eq!(s.order(), 2);
    }

    #[test]
    fn third_order_layout() {
        let s = SplittingScheme::third_order();
        let tags: Vec<_> = s.operator_steps().map(|s| s.tag.symbol()).collect();
        assert_eq!(tags.join(""), "XYZMVAVMZYX");
        assert!(s.is_palindromic());
        assert_eq!(s.reversed(), s);
        assert!(s.timed_steps().iter().all(|t| t.time_offset == r(1, 2)));
        assert!(s.tag_sums().values().all(|v| *v == Coefficient::one()));
        assert_eq!(s.timed_steps()[5].coefficient, Coefficient::one());
    }

    #[test]
    fn suzuki_with_table_weights() {
        let p: Vec<_> = [6, 6, 6, 3, 3, 3, -2].iter().map(|&d| r(1, d)).collect();
        let f = SplittingScheme::third_order().suzuki_compose(&p).unwrap();
        assert_eq!(f.order(), 4);
        assert_eq!(f.operator_count(), 77);
        assert!(f.tag_sums().values().all(|v| *v == Coefficient::one()));
        // The second-order base has local exponent 2, which these weights do not cancel.
        assert!(SplittingScheme::second_order().suzuki_compose(&p).is_err());
    }

    #[test]
    fn suzuki_rejects_bad_weights() {
        let s = SplittingScheme::second_order();
        assert!(matches!(
            s.suzuki_compose(&[Coefficient::one()]),
            Err(Error::SuzukiConstraint(_))
        ));
        assert!(s.suzuki_compose(&[r(1, 2), r(1, 3)]).is_err());
    }

    #[test]
    fn time_offsets_accumulate() {
        let p = [r(1, 2), r(1, 2)];
        // Two Lie steps with weights 1/2; requires sum p^1 = 0, so build directly instead.
        let base = SplittingScheme::second_order();
        let steps: Vec<_> = p
            .iter()
            .flat_map(|&w| {
                base.steps()
                    .iter()
                    .map(move |s| SplitStep::new(s.tag, s.coefficient * w))
            })
            .collect();
        let s = SplittingScheme::new(steps, 2).unwrap();
        let offsets: Vec<_> = s.timed_steps().iter().map(|t| t.time_offset).collect();
        assert_eq!(offsets[..6], [Coefficient::zero(); 6]);
        assert_eq!(offsets[6..], [r(1, 2); 6]);
    }
}
