use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;

use super::GateCounts;
use crate::linalg::Mat2;
use crate::qcore::GateKind;
use crate::{Error, Result};

/// Single-qubit Clifford+T word in circuit order (first element acts first).
pub type Word = Vec<GateKind>;

/// `e^{i global_phase} U(word)` approximating `Rz(theta)` within `error`.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthesized {
    pub word: Word,
    pub global_phase: f64,
    pub error: f64,
}

impl Synthesized {
    fn from_word(word: Word, target: &Mat2) -> Self {
        let u = word_matrix(&word);
        let overlap = (u.adjoint() * *target).trace();
        let global_phase = if overlap.norm() > 0.0 {
            overlap.arg()
        } else {
            0.0
        };
        let error = u.phase_invariant_distance(target);
        Synthesized {
            word,
            global_phase,
            error,
        }
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for k in &self.word {
            match k {
                GateKind::H => c.h += 1,
                GateKind::S => c.s += 1,
                GateKind::T => c.t += 1,
                other => unreachable!("{other:?} in a Clifford+T word"),
            }
        }
        c
    }

    pub fn matrix(&self) -> Mat2 {
        word_matrix(&self.word).scale(C64::from_polar(1.0, self.global_phase))
    }
}

pub(crate) fn word_matrix(word: &[GateKind]) -> Mat2 {
    word.iter().fold(Mat2::identity(), |acc, k| {
        k.matrix2().expect("single-qubit kind") * acc
    })
}

/// Approximates `Rz(theta)` over {H, S, T}.
pub trait RotationSynthesizer: Send + Sync {
    fn name(&self) -> String;

    fn synthesize_rz(&self, theta: f64, epsilon: f64) -> Result<Arc<Synthesized>>;

    /// Gate counts of the approximation; models may answer without a word.
    fn rz_counts(&self, theta: f64, epsilon: f64) -> Result<GateCounts> {
        Ok(self.synthesize_rz(theta, epsilon)?.counts())
    }
}

type CacheKey = (u64, u64);

fn key(theta: f64, epsilon: f64) -> CacheKey {
    (theta.to_bits(), epsilon.to_bits())
}

/// Serializes calls into the grid-synthesis library, which keeps its working precision
/// in process-wide state.
static GRIDSYNTH_LOCK: Mutex<()> = Mutex::new(());

/// Number-theoretic Clifford+T synthesis of z-rotations (Ross-Selinger grid method),
/// seeded for reproducibility and memoized.
#[derive(Debug)]
pub struct GridSynth {
    seed: u64,
    cache: Mutex<HashMap<CacheKey, Arc<Synthesized>>>,
}

impl Default for GridSynth {
    fn default() -> Self {
        Self::new(1234)
    }
}

impl GridSynth {
    pub fn new(seed: u64) -> Self {
        GridSynth {
            seed,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn run(&self, theta: f64, epsilon: f64) -> Result<Synthesized> {
        use rsgridsynth::config::config_from_theta_epsilon;
        use rsgridsynth::gridsynth::gridsynth_gates;
        let gates = {
            let _guard = GRIDSYNTH_LOCK.lock().unwrap_or_else(|e| e.into_inner());
            std::panic::catch_unwind(|| {
                let mut cfg = config_from_theta_epsilon(theta, epsilon, self.seed, false, false);
                gridsynth_gates(&mut cfg).gates
            })
            .map_err(|_| {
                Error::Synthesis(format!(
                    "grid synthesis panicked for theta={theta}, epsilon={epsilon}"
                ))
            })?
        };
        // The output reads as a matrix product. Every letter is a symmetric matrix, so the
        // reversed word is the transpose, which approximates the diagonal target equally
        // well; it is still replayed in product order.
        let mut word = Word::new();
        for ch in gates.chars().rev() {
            match ch {
                'H' => word.push(GateKind::H),
                'S' => word.push(GateKind::S),
                'T' => word.push(GateKind::T),
                'X' => word.extend([GateKind::H, GateKind::S, GateKind::S, GateKind::H]),
                // Scalars; the phase is recomputed from the word below.
                'W' | 'I' => {}
                other => {
                    return Err(Error::Synthesis(format!(
                        "unexpected gate '{other}' in synthesized word"
                    )))
                }
            }
        }
        let syn = Synthesized::from_word(word, &Mat2::rz(theta));
        if syn.error > epsilon * (1.0 + 1e-6) + 1e-13 {
            return Err(Error::Synthesis(format!(
                "approximation error {:e} exceeds {epsilon:e}",
                syn.error
            )));
        }
        Ok(syn)
    }
}

impl RotationSynthesizer for GridSynth {
    fn name(&self) -> String {
        "gridsynth".into()
    }

    fn synthesize_rz(&self, theta: f64, epsilon: f64) -> Result<Arc<Synthesized>> {
        if let Some(hit) = self
            .cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key(theta, epsilon))
        {
            return Ok(hit.clone());
        }
        let syn = Arc::new(self.run(theta, epsilon)?);
        self.cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key(theta, epsilon), syn.clone());
        Ok(syn)
    }
}

/// Exhaustive search over normal-form words `(T | -) (HT | SHT)* C` with a bounded
/// T-count, `C` one of the 24 single-qubit Cliffords. Returns the lowest T-count word
/// within `epsilon`; practical only for coarse precision.
#[derive(Debug)]
pub struct SearchSynthesizer {
    max_t: usize,
    cliffords: Vec<(Word, Mat2)>,
    cache: Mutex<HashMap<CacheKey, Arc<Synthesized>>>,
}

impl SearchSynthesizer {
    pub fn new(max_t: usize) -> Self {
        SearchSynthesizer {
            max_t,
            cliffords: clifford_group(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn max_t(&self) -> usize {
        self.max_t
    }

    fn search(&self, target: &Mat2, epsilon: f64) -> Option<Synthesized> {
        for t_count in 0..=self.max_t {
            let mut best: Option<(f64, Word)> = None;
            let mut visit = |word: &Word, m: &Mat2| {
                for (cw, cm) in &self.cliffords {
                    let d = (*cm * *m).phase_invariant_distance(target);
                    let len = word.len() + cw.len();
                    let better = match &best {
                        None => true,
                        Some((bd, bw)) => {
                            d < *bd - 1e-15 || ((d - *bd).abs() <= 1e-15 && len < bw.len())
                        }
                    };
                    if better {
                        let mut w = word.clone();
                        w.extend(cw.iter().cloned());
                        best = Some((d, w));
                    }
                }
            };
            let t = GateKind::T.matrix2().unwrap();
            if t_count == 0 {
                visit(&Word::new(), &Mat2::identity());
            } else {
                // Leading T or not, then t_count (or t_count - 1) syllables.
                for lead in [false, true] {
                    let syllables = if lead { t_count - 1 } else { t_count };
                    if !lead && syllables == 0 {
                        continue;
                    }
                    let (w0, m0) = if lead {
                        (vec![GateKind::T], t)
                    } else {
                        (Word::new(), Mat2::identity())
                    };
                    enumerate_syllables(syllables, w0, m0, &mut visit);
                }
            }
            if let Some((d, w)) = best {
                if d <= epsilon {
                    return Some(Synthesized::from_word(w, target));
                }
            }
        }
        None
    }
}

fn enumerate_syllables(left: usize, word: Word, m: Mat2, visit: &mut impl FnMut(&Word, &Mat2)) {
    if left == 0 {
        visit(&word, &m);
        return;
    }
    let h = Mat2::hadamard();
    let s = GateKind::S.matrix2().unwrap();
    let t = GateKind::T.matrix2().unwrap();
    for with_s in [false, true] {
        let mut w = word.clone();
        let mut mm = m;
        if with_s {
            w.push(GateKind::S);
            mm = s * mm;
        }
        w.push(GateKind::H);
        w.push(GateKind::T);
        mm = t * h * mm;
        enumerate_syllables(left - 1, w, mm, visit);
    }
}

/// The 24 single-qubit Cliffords modulo phase, each with a shortest {H, S} word.
fn clifford_group() -> Vec<(Word, Mat2)> {
    fn canonical(m: &Mat2) -> [i64; 8] {
        // Fix the phase on the first sizeable entry, then round.
        let pivot =
            m.0.iter()
                .flatten()
                .find(|z| z.norm() > 1e-6)
                .copied()
                .unwrap_or(C64::new(1.0, 0.0));
        let ph = pivot.conj() / pivot.norm();
        let mut out = [0i64; 8];
        for (i, z) in m.0.iter().flatten().enumerate() {
            let w = z * ph;
            out[2 * i] = (w.re * 1e6).round() as i64;
            out[2 * i + 1] = (w.im * 1e6).round() as i64;
        }
        out
    }
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![(Word::new(), Mat2::identity())];
    seen.insert(canonical(&Mat2::identity()));
    let mut all = frontier.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, m) in &frontier {
            for k in [GateKind::H, GateKind::S] {
                let nm = k.matrix2().unwrap() * *m;
                if seen.insert(canonical(&nm)) {
                    let mut nw = w.clone();
                    nw.push(k.clone());
                    next.push((nw, nm));
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

impl RotationSynthesizer for SearchSynthesizer {
    fn name(&self) -> String {
        format!("search(T<={})", self.max_t)
    }

    fn synthesize_rz(&self, theta: f64, epsilon: f64) -> Result<Arc<Synthesized>> {
        if let Some(hit) = self
            .cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key(theta, epsilon))
        {
            return Ok(hit.clone());
        }
        let syn = self.search(&Mat2::rz(theta), epsilon).ok_or_else(|| {
            Error::Synthesis(format!(
                "no word with T-count <= {} reaches {epsilon:e}",
                self.max_t
            ))
        })?;
        let syn = Arc::new(syn);
        self.cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key(theta, epsilon), syn.clone());
        Ok(syn)
    }
}

/// `count(eps) = a + b log2(1/eps)` per gate kind, for counting without synthesis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    pub h: (f64, f64),
    pub s: (f64, f64),
    pub t: (f64, f64),
}

impl CostModel {
    pub fn counts(&self, epsilon: f64) -> GateCounts {
        let x = (1.0 / epsilon).log2();
        let f = |(a, b): (f64, f64)| (a + b * x).round().max(0.0) as usize;
        GateCounts {
            h: f(self.h),
            s: f(self.s),
            t: f(self.t),
            cnot: 0,
        }
    }

    /// Least-squares fit of the mean per-kind counts of `synth` over `angles` at each
    /// of `epsilons`.
    pub fn calibrate(
        synth: &dyn RotationSynthesizer,
        epsilons: &[f64],
        angles: &[f64],
    ) -> Result<CostModel> {
        if epsilons.len() < 2 || angles.is_empty() {
            return Err(Error::Unsupported(
                "calibration needs two precisions and one angle".into(),
            ));
        }
        let mut xs = Vec::new();
        let mut ys = [Vec::new(), Vec::new(), Vec::new()];
        for &eps in epsilons {
            let mut acc = [0.0; 3];
            for &a in angles {
                let c = synth.rz_counts(a, eps)?;
                acc[0] += c.h as f64;
                acc[1] += c.s as f64;
                acc[2] += c.t as f64;
            }
            xs.push((1.0 / eps).log2());
            for k in 0..3 {
                ys[k].push(acc[k] / angles.len() as f64);
            }
        }
        let line = |y: &[f64]| {
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = y.iter().sum::<f64>() / n;
            let sxy: f64 = xs.iter().zip(y).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            let b = sxy / sxx;
            (my - b * mx, b)
        };
        Ok(CostModel {
            h: line(&ys[0]),
            s: line(&ys[1]),
            t: line(&ys[2]),
        })
    }
}

impl RotationSynthesizer for CostModel {
    fn name(&self) -> String {
        "cost-model".into()
    }

    fn synthesize_rz(&self, _theta: f64, _epsilon: f64) -> Result<Arc<Synthesized>> {
        Err(Error::Unsupported(
            "the cost model only counts gates".into(),
        ))
    }

    fn rz_counts(&self, _theta: f64, epsilon: f64) -> Result<GateCounts> {
        Ok(self.counts(epsilon))
    }
}

/// Reduces `theta` to `(-pi, pi]`, returning the reduced angle and the phase picked up,
/// since `Rz(theta + 2 pi) = -Rz(theta)`.
pub(crate) fn reduce_angle(theta: f64) -> (f64, f64) {
    let k = (theta / (2.0 * PI)).round();
    let reduced = theta - 2.0 * PI * k;
    (
        reduced,
        if (k as i64).rem_euclid(2) == 1 {
            PI
        } else {
            0.0
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_group_has_24_elements() {
        let g = clifford_group();
        assert_eq!(g.len(), 24);
        assert!(g
            .iter()
            .all(|(w, m)| word_matrix(w).max_abs_diff(m) < 1e-12));
    }

    #[test]
    fn gridsynth_meets_precision() {
        let g = GridSynth::default();
        for theta in [0.3, -1.7, 2.9] {
            for eps in [1e-3, 1e-10] {
                let s = g.synthesize_rz(theta, eps).unwrap();
                assert!(s.error <= eps * (1.0 + 1e-6));
                assert!(s.matrix().max_abs_diff(&Mat2::rz(theta)) <= 2.0 * eps + 1e-12);
            }
        }
        let again = g.synthesize_rz(0.3, 1e-3).unwrap();
        assert_eq!(again.word, g.synthesize_rz(0.3, 1e-3).unwrap().word);
    }

    #[test]
    fn search_finds_exact_and_coarse_words() {
        let s = SearchSynthesizer::new(10);
        let exact = s.synthesize_rz(PI / 4.0, 1e-9).unwrap();
        assert_eq!(exact.counts().t, 1);
        let coarse = s.synthesize_rz(0.3, 0.1).unwrap();
        assert!(coarse.error <= 0.1);
        assert!(matches!(
            s.synthesize_rz(0.3, 1e-9),
            Err(Error::Synthesis(_))
        ));
    }

    #[test]
    fn cost_model_is_monotone() {
        let g = GridSynth::default();
        let m = CostModel::calibrate(&g, &[1e-2, 1e-4, 1e-6], &[0.4, 1.1]).unwrap();
        assert!(m.counts(1e-10).total() > m.counts(1e-3).total());
        assert!(m.t.1 > 0.0);
    }

    #[test]
    fn angle_reduction() {
        let (r, p) = reduce_angle(2.0 * PI + 0.5);
        assert!((r - 0.5).abs() < 1e-12 && p == PI);
        let m = Mat2::rz(2.0 * PI + 0.5);
        assert!(m.max_abs_diff(&Mat2::rz(0.5).scale(C64::from_polar(1.0, p))) < 1e-12);
    }
}
