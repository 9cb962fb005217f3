//! Exhaustive search for rational Suzuki weights `p_i = 1/p~_i` with integer `p~_i`.
//!
//! Conditions: `sum p_i = 1`, `sum p_i^m = 0`, and every `p_i` is an integer multiple
//! of the smallest `|p_j|`. Writing `M = max |p~_i|`, the last condition says each
//! `|p~_i|` divides `M`, and with `w_i = M / p~_i` the two sums become the integer
//! equations `sum w_i = M` and `sum w_i^m = 0`.

use std::fmt;

use num_rational::Ratio;
use num_traits::Signed;

use super::Coefficient;
use crate::exec;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalSolution {
    /// Denominators `p~_i`, sorted descending.
    pub p_tilde: Vec<i64>,
}

impl RationalSolution {
    pub fn r(&self) -> usize {
        self.p_tilde.len()
    }

    /// Largest `|p~_i|`.
    pub fn modulus(&self) -> i64 {
        self.p_tilde.iter().map(|p| p.abs()).max().unwrap_or(0)
    }

    pub fn weights(&self) -> Vec<Coefficient> {
        self.p_tilde.iter().map(|&p| Ratio::new(1, p)).collect()
    }

    /// Exact check of both Suzuki sums and the multiplicity condition.
    pub fn satisfies(&self, m: u32) -> bool {
        let w = self.weights();
        let sum: Coefficient = w.iter().sum();
        let pow: Coefficient = w.iter().map(|x| x.pow(m as i32)).sum();
        let smallest = w.iter().map(|x| x.abs()).min();
        let multiples = smallest.is_some_and(|s| w.iter().all(|x| (x.abs() / s).is_integer()));
        sum == Ratio::from_integer(1) && pow == Ratio::from_integer(0) && multiples
    }
}

impl fmt::Display for RationalSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.p_tilde.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// All solutions with exactly `r` weights and `|p~_i| <= p_max`, ordered by `M` and then
/// lexicographically descending. Complete relative to the `p_max` bound.
pub fn search_rational_splittings(m: u32, r: usize, p_max: i64) -> Vec<RationalSolution> {
    if m < 1 || r == 0 || p_max < 1 {
        return Vec::new();
    }
    let moduli: Vec<i64> = (1..=p_max).collect();
    let per_modulus = exec::map_collect(moduli.len(), |i| search_modulus(m, r, moduli[i]));
    per_modulus.into_iter().flatten().collect()
}

struct Candidates {
    p: Vec<i64>,
    w: Vec<i64>,
    wm: Vec<i64>,
    suffix_w: Vec<(i64, i64)>,
    suffix_wm: Vec<(i64, i64)>,
}

fn search_modulus(m: u32, r: usize, modulus: i64) -> Vec<RationalSolution> {
    let divisors: Vec<i64> = (1..=modulus).filter(|d| modulus % d == 0).collect();
    let mut p: Vec<i64> = divisors.iter().rev().copied().collect();
    p.extend(divisors.iter().map(|d| -d));
    let w: Vec<i64> = p.iter().map(|&x| modulus / x).collect();
    let wm: Vec<i64> = w.iter().map(|&x| x.pow(m)).collect();
    let suffix = |v: &[i64]| {
        let mut out = vec![(i64::MAX, i64::MIN); v.len() + 1];
        for i in (0..v.len()).rev() {
            out[i] = (out[i + 1].0.min(v[i]), out[i + 1].1.max(v[i]));
        }
        out
    };
    let c = Candidates {
        suffix_w: suffix(&w),
        suffix_wm: suffix(&wm),
        p,
        w,
        wm,
    };
    let mut found = Vec::new();
    let mut chosen = Vec::with_capacity(r);
    descend(&c, modulus, r, 0, 0, 0, &mut chosen, &mut found);
    found
}

#[allow(clippy::too_many_arguments)]
fn descend(
    c: &Candidates,
    modulus: i64,
    r: usize,
    start: usize,
    sum_w: i64,
    sum_wm: i64,
    chosen: &mut Vec<usize>,
    found: &mut Vec<RationalSolution>,
) {
    let left = (r - chosen.len()) as i64;
    if left == 0 {
        let has_max = chosen.iter().any(|&i| c.p[i].abs() == modulus);
        if sum_w == modulus && sum_wm == 0 && has_max {
            found.push(RationalSolution {
                p_tilde: chosen.iter().map(|&i| c.p[i]).collect(),
            });
        }
        return;
    }
    for i in start..c.p.len() {
        let (wmin, wmax) = c.suffix_w[i];
        let (pmin, pmax) = c.suffix_wm[i];
        let need_w = modulus - sum_w;
        let need_wm = -sum_wm;
        if need_w < left * wmin
            || need_w > left * wmax
            || need_wm < left * pmin
            || need_wm > left * pmax
        {
            // Suffix bounds only tighten as `i` grows.
            break;
        }
        chosen.push(i);
        descend(
            c,
            modulus,
            r,
            i,
            sum_w + c.w[i],
            sum_wm + c.wm[i],
            chosen,
            found,
        );
        chosen.pop();
    }
}
