use dirac_qwalk::classical::ClassicalSolver;
use dirac_qwalk::lattice::{LatticeSpec, Potentials, SpinorField};
use dirac_qwalk::splitting::{search_rational_splittings, SplittingScheme};
use dirac_qwalk::C64;
use num_rational::Ratio;
use num_traits::Signed;

#[test]
fn solutions_are_exact_and_structured() {
    for r in 1..=9 {
        for s in search_rational_splittings(3, r, 12) {
            let p: Vec<Ratio<i64>> = s.p_tilde.iter().map(|&d| Ratio::new(1, d)).collect();
            assert_eq!(p.iter().sum::<Ratio<i64>>(), Ratio::from_integer(1), "{s}");
            assert_eq!(
                p.iter().map(|x| x * x * x).sum::<Ratio<i64>>(),
                Ratio::from_integer(0),
                "{s}"
            );
            let smallest = p.iter().map(|x| x.abs()).min().unwrap();
            assert!(p.iter().all(|x| (x.abs() / smallest).is_integer()), "{s}");
        }
    }
}

/// One step of the third-order scheme against the exact plane-wave propagator of
/// `H = -c p alpha_z + beta m c^2` (the solver's streaming convention).
fn one_step_error(level: u32) -> f64 {
    let len = 8.0;
    let ell = len / f64::from(1u32 << level);
    let spec = LatticeSpec::new([0, 0, level], ell, 2.0).unwrap();
    let k = 2.0;
    let p = 2.0 * std::f64::consts::PI * k / len;
    let spinor = [
        C64::new(0.6, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.8),
        C64::new(0.0, 0.0),
    ];
    let f = SpinorField::from_fn(spec.clone(), move |x| {
        spinor.map(|s| s * C64::from_polar(1.0, p * x[2]))
    });
    let mut g = f.clone();
    ClassicalSolver::new(
        spec.clone(),
        Potentials::free(1.0),
        SplittingScheme::third_order(),
    )
    .unwrap()
    .step(&mut g, 0.0)
    .unwrap();
    let (m, a) = (1.0, -p);
    let h = [
        [m, 0.0, a, 0.0],
        [0.0, m, 0.0, -a],
        [a, 0.0, -m, 0.0],
        [0.0, -a, 0.0, -m],
    ];
    let e = (m * m + a * a).sqrt();
    let (sn, cs) = (e * spec.dt()).sin_cos();
    let evolved: Vec<C64> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| C64::new(if i == j { cs } else { 0.0 }, -sn * h[i][j] / e) * spinor[j])
                .sum()
        })
        .collect();
    let exact = SpinorField::from_fn(spec, move |x| {
        std::array::from_fn(|s| evolved[s] * C64::from_polar(1.0, p * x[2]))
    });
    g.max_abs_diff(&exact)
}

#[test]
fn third_order_local_error_ratio() {
    for level in 6..=8 {
        let ratio = one_step_error(level) / one_step_error(level + 1);
        assert!(
            (ratio / 8.0 - 1.0).abs() <= 0.3,
            "level {level}: ratio {ratio}"
        );
    }
}
