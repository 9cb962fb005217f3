use dirac_qwalk::linalg::{Mat2, Mat4};
use dirac_qwalk::qcore::mcx::mcx_gates;
use dirac_qwalk::qcore::{
    Circuit, Control, Gate, GateKind, Instruction, QuantumState, UniformlyControlledGate,
};
use dirac_qwalk::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Dense = Vec<Vec<C64>>;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn random_u2(rng: &mut ChaCha8Rng) -> Mat2 {
    let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let b = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    let ph = C64::from_polar(1.0, rng.random_range(-3.0..3.0));
    Mat2::new(a, -b.conj() * ph, b, a.conj() * ph)
}

fn bit(n: usize, wire: usize, index: usize) -> usize {
    (index >> (n - 1 - wire)) & 1
}

fn with_bit(n: usize, wire: usize, index: usize, v: usize) -> usize {
    let mask = 1 << (n - 1 - wire);
    (index & !mask) | (v << (n - 1 - wire))
}

/// Dense matrix of one instruction, built entry by entry from its definition.
fn dense(n: usize, ins: &Instruction) -> Dense {
    let dim = 1 << n;
    let mut m = vec![vec![zero(); dim]; dim];
    for j in 0..dim {
        match ins {
            Instruction::Gate(g) => {
                let fires = g
                    .controls
                    .iter()
                    .all(|c| bit(n, c.wire, j) == usize::from(c.active_high));
                if !fires {
                    m[j][j] = C64::new(1.0, 0.0);
                    continue;
                }
                if let GateKind::Unitary2(u) = &g.kind {
                    let (t0, t1) = (g.targets[0], g.targets[1]);
                    let col = 2 * bit(n, t0, j) + bit(n, t1, j);
                    for row in 0..4 {
                        let i = with_bit(n, t1, with_bit(n, t0, j, row >> 1), row & 1);
                        m[i][j] += u.at(row, col);
                    }
                } else {
                    let u = g.kind.matrix2().unwrap();
                    let t = g.targets[0];
                    for row in 0..2 {
                        m[with_bit(n, t, j, row)][j] += u.at(row, bit(n, t, j));
                    }
                }
            }
            Instruction::Uniform(ucg) => {
                let pattern = ucg
                    .controls
                    .iter()
                    .fold(0, |acc, &c| (acc << 1) | bit(n, c, j));
                let u = ucg.table[pattern];
                let t = ucg.target;
                for row in 0..2 {
                    m[with_bit(n, t, j, row)][j] += u.at(row, bit(n, t, j));
                }
            }
        }
    }
    m
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn random_instruction(rng: &mut ChaCha8Rng, n: usize) -> Instruction {
    let mut wires: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        wires.swap(i, rng.random_range(0..=i));
    }
    match rng.random_range(0..10) {
        0 if n >= 2 => {
            let a = random_u2(rng);
            let b = random_u2(rng);
            let cnot = Mat4::from_real([
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
            ]);
            Gate::unitary2(a.kron(&b) * cnot, wires[0], wires[1])
                .unwrap()
                .into()
        }
        1 => {
            let k = rng.random_range(0..n.min(3));
            let table = (0..1 << k).map(|_| random_u2(rng)).collect();
            UniformlyControlledGate::new(wires[1..=k].to_vec(), wires[0], table)
                .unwrap()
                .into()
        }
        r => {
            let kind = match r {
                2 => GateKind::H,
                3 => GateKind::X,
                4 => GateKind::Ry(rng.random_range(-3.0..3.0)),
                5 => GateKind::Phase(rng.random_range(-3.0..3.0)),
                6 => GateKind::Y,
                _ => GateKind::Unitary(random_u2(rng)),
            };
            let k = rng.random_range(0..n.min(4));
            let mut g = Gate::new(kind, wires[0]);
            for &w in &wires[1..=k] {
                g = g.controlled_by(if rng.random_bool(0.5) {
                    Control::on(w)
                } else {
                    Control::off(w)
                });
            }
            g.into()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn execution_matches_dense_product(seed in any::<u64>(), n in 1usize..=6, len in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(n);
        let dim = 1 << n;
        let mut total: Dense = (0..dim).map(|i| (0..dim).map(|j| C64::new(f64::from(u8::from(i == j)), 0.0)).collect()).collect();
        for _ in 0..len {
            let ins = random_instruction(&mut rng, n);
            total = matmul(&dense(n, &ins), &total);
            c.push(ins).unwrap();
        }
        let amps: Vec<C64> = (0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let mut s = QuantumState::from_amplitudes(n, amps.iter().map(|z| z / norm.sqrt()).collect()).unwrap();
        let expect: Vec<C64> = (0..dim).map(|i| (0..dim).map(|j| total[i][j] * s.amplitudes()[j]).sum()).collect();
        c.apply(&mut s).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-12 * len as f64);
        for (a, b) in s.amplitudes().iter().zip(&expect) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn inverse_undoes(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(n);
        for _ in 0..10 {
            c.push(random_instruction(&mut rng, n)).unwrap();
        }
        let s0 = QuantumState::basis(n, rng.random_range(0..1 << n)).unwrap();
        let mut s = s0.clone();
        c.apply(&mut s).unwrap();
        c.inverse().apply(&mut s).unwrap();
        prop_assert!(s.max_abs_diff(&s0) <= 1e-12);
    }
}

#[test]
fn mcx_decomposition_is_linear() {
    let counts: Vec<usize> = (3..=20)
        .map(|k| {
            let controls: Vec<Control> = (0..k).map(Control::on).collect();
            let pool: Vec<usize> = (k + 1..2 * k).collect();
            mcx_gates(&controls, k, &pool).unwrap().len()
        })
        .collect();
    let steps: Vec<usize> = counts.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.iter().all(|&d| d == steps[0]), "{counts:?}");
}

#[test]
fn circuits_round_trip_through_text() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut c = Circuit::new(5);
    for _ in 0..20 {
        c.push(random_instruction(&mut rng, 5)).unwrap();
    }
    let back = Circuit::from_text(&c.to_text()).unwrap();
    assert_eq!(back.len(), c.len());
    let mut a = QuantumState::basis(5, 3).unwrap();
    let mut b = a.clone();
    c.apply(&mut a).unwrap();
    back.apply(&mut b).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-12);
}
