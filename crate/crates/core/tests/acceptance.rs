use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use dirac_qwalk::circuits::{section, DiracCircuitBuilder};
use dirac_qwalk::classical::ClassicalSolver;
use dirac_qwalk::lattice::{
    Axis, LatticeSpec, Potentials, ScalarPotential, SpinorField, VectorPotential,
};
use dirac_qwalk::qcore::QuantumState;
use dirac_qwalk::resources::{fit_quadratic, scaling_study, GridSynth, StudyConfig};
use dirac_qwalk::spectral::{
    autocorrelation_classical, dispersion, feit_fleck_filter, spectral_density,
    success_probability_bound, FilterPlan, MeasurementMode, Window,
};
use dirac_qwalk::splitting::{search_rational_splittings, SplittingScheme};
use dirac_qwalk::stateprep::prepare_amplitudes;
use dirac_qwalk::C64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_field(spec: &LatticeSpec, rng: &mut ChaCha8Rng) -> SpinorField {
    let amps = (0..4 * spec.sites())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SpinorField::from_amplitudes(spec.clone(), amps)
        .unwrap()
        .normalized()
        .unwrap()
}

fn oracle_equivalence() -> Verdict {
    let configs: [([u32; 3], f64, f64, SplittingScheme); 6] = [
        ([3, 0, 0], 0.5, 1.0, SplittingScheme::second_order()),
        ([0, 0, 3], 0.5, 2.0, SplittingScheme::third_order()),
        ([2, 3, 0], 0.5, 1.0, SplittingScheme::second_order()),
        ([3, 2, 0], 0.25, 2.0, SplittingScheme::third_order()),
        ([2, 2, 2], 0.5, 1.0, SplittingScheme::second_order()),
        ([3, 3, 3], 0.5, 1.0, SplittingScheme::second_order()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let (qubits, ell, n_star, scheme) = &configs[i % configs.len()];
        let spec = LatticeSpec::new(*qubits, *ell, *n_star).unwrap();
        let mass = (i % 2) as f64;
        let p = Potentials::free(mass)
            .with_vector(VectorPotential::Oscillating {
                amplitude: [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ],
                omega: rng.random_range(0.5..2.0),
                phase: rng.random_range(0.0..PI),
            })
            .with_scalar(ScalarPotential::Linear {
                field: [
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                ],
                omega: rng.random_range(0.0..1.5),
            });
        let t = rng.random_range(0.0..3.0);
        let f = random_field(&spec, &mut rng);
        let mut classical = f.clone();
        ClassicalSolver::new(spec.clone(), p.clone(), scheme.clone())
            .unwrap()
            .step(&mut classical, t)
            .unwrap();
        let builder = DiracCircuitBuilder::new(spec, p).unwrap();
        let mut state = builder.encode(&f).unwrap();
        builder
            .time_step(scheme, t)
            .unwrap()
            .apply(&mut state)
            .unwrap();
        let quantum = builder.decode(&state).unwrap();
        worst = worst.max(quantum.max_abs_diff_phase_aligned(&classical));
    }
    verdict(
        worst <= 1e-11,
        format!("20 fields over 1-D/2-D/3-D, max deviation {worst:.2e} (limit 1e-11)"),
    )
}

const REFERENCE_ROWS: [&str; 6] = [
    "6,6,6,3,3,3,-2",
    "6,4,4,4,3,3,-2,-12",
    "6,6,6,6,6,6,6,6,-3",
    "6,6,6,3,3,3,2,-2,-2",
    "6,6,6,3,3,3,3,-2,-3",
    "12,6,6,6,3,3,3,-2,-12",
];

fn splitting_table() -> Verdict {
    let below: usize = (1..=6)
        .map(|r| search_rational_splittings(3, r, 12).len())
        .sum();
    let found: BTreeSet<String> = (7..=9)
        .flat_map(|r| search_rational_splittings(3, r, 12))
        .map(|s| s.to_string())
        .collect();
    let expected: BTreeSet<String> = REFERENCE_ROWS.iter().map(|s| s.to_string()).collect();
    let missing: Vec<_> = expected.difference(&found).cloned().collect();
    let extra: Vec<_> = found.difference(&expected).cloned().collect();
    verdict(
        below == 0 && missing.is_empty() && extra.is_empty(),
        format!(
            "r<=6: {below} rows; r=7..9: {} rows, missing {:?}, not in the reference table {:?}",
            found.len(),
            missing,
            extra
        ),
    )
}

fn suzuki_constraints() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in 7..=9 {
        for s in search_rational_splittings(3, r, 12) {
            let p: Vec<Ratio<i64>> = s.p_tilde.iter().map(|&d| Ratio::new(1, d)).collect();
            let sum: Ratio<i64> = p.iter().sum();
            let cubes: Ratio<i64> = p.iter().map(|x| x * x * x).sum();
            if sum != Ratio::from_integer(1) || cubes != Ratio::from_integer(0) {
                bad.push(s.to_string());
            }
            checked += 1;
        }
    }
    verdict(
        checked > 0 && bad.is_empty(),
        format!("{checked} solutions checked exactly, violations {bad:?}"),
    )
}

/// Exact continuum evolution of a 1-D field along z by `time`, mode by mode. The
/// streaming convention moves upper components towards lower indices, so the
/// generator is `H(p) = -c p alpha_z + beta m c^2`.
fn continuum_evolution(f: &SpinorField, mass: f64, time: f64) -> SpinorField {
    let spec = f.spec();
    let n = spec.sites();
    let ell = spec.ell();
    let c = spec.light_speed();
    let z: Vec<f64> = (0..n).map(|s| spec.site_centroid(s)[2]).collect();
    let len = n as f64 * ell;
    let zero = C64::new(0.0, 0.0);
    let mut out = vec![zero; 4 * n];
    for k in 0..n {
        let kk = if k <= n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        let p = 2.0 * PI * kk / len;
        let mut coef = [zero; 4];
        for (s, cf) in coef.iter_mut().enumerate() {
            *cf = (0..n)
                .map(|j| f.amplitudes()[s * n + j] * C64::from_polar(1.0, -p * z[j]))
                .sum();
        }
        // H = [[mc^2, 0, -cp, 0], [0, mc^2, 0, cp], [-cp, 0, -mc^2, 0], [0, cp, 0, -mc^2]].
        let (m, a) = (mass * c * c, -c * p);
        let h = [
            [m, 0.0, a, 0.0],
            [0.0, m, 0.0, -a],
            [a, 0.0, -m, 0.0],
            [0.0, -a, 0.0, -m],
        ];
        let e = (m * m + a * a).sqrt();
        let (sn, cs) = (e * time).sin_cos();
        let mut evolved = [zero; 4];
        for (i, ev) in evolved.iter_mut().enumerate() {
            for j in 0..4 {
                let id = if i == j { cs } else { 0.0 };
                let hij = if e > 0.0 { h[i][j] / e } else { 0.0 };
                *ev += C64::new(id, -sn * hij) * coef[j];
            }
        }
        for s in 0..4 {
            for j in 0..n {
                out[s * n + j] += evolved[s] * C64::from_polar(1.0 / n as f64, p * z[j]);
            }
        }
    }
    SpinorField::from_amplitudes(spec.clone(), out).unwrap()
}

fn convergence_order() -> Verdict {
    let (len, mass, t_end, n_star) = (16.0, 1.0, 2.0, 2.0);
    let mut lines = Vec::new();
    let mut pass = true;
    for scheme in [
        SplittingScheme::second_order(),
        SplittingScheme::third_order(),
    ] {
        let mut points = Vec::new();
        for n in 7..=10u32 {
            let ell = len / f64::from(1u32 << n);
            let spec = LatticeSpec::new([0, 0, n], ell, n_star).unwrap();
            let f = SpinorField::from_fn(spec.clone(), |x| {
                let d = x[2] - len / 2.0;
                let g = C64::from_polar((-d * d / (2.0 * 1.5 * 1.5)).exp(), 1.0 * x[2]);
                [g, C64::new(0.0, 0.0), g * 0.5, g * C64::new(0.0, 0.2)]
            })
            .normalized()
            .unwrap();
            let solver =
                ClassicalSolver::new(spec.clone(), Potentials::free(mass), scheme.clone()).unwrap();
            let steps = (t_end / spec.dt()).round() as usize;
            let mut g = f.clone();
            solver.evolve(&mut g, 0.0, steps, |_, _, _| {}).unwrap();
            let exact = continuum_evolution(&f, mass, steps as f64 * spec.dt());
            let err: f64 = g
                .amplitudes()
                .iter()
                .zip(exact.amplitudes())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                * ell;
            points.push((spec.dt().ln(), err.sqrt().ln()));
        }
        let m = points.len() as f64;
        let (mx, my) = (
            points.iter().map(|p| p.0).sum::<f64>() / m,
            points.iter().map(|p| p.1).sum::<f64>() / m,
        );
        let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        let target = f64::from(scheme.order()) - 1.0;
        pass &= (slope - target).abs() <= 0.35;
        let errs: Vec<String> = points
            .iter()
            .map(|p| format!("{:.1e}", p.1.exp()))
            .collect();
        lines.push(format!(
            "q={} slope {slope:.3} (target {target}) errors [{}]",
            scheme.order(),
            errs.join(", ")
        ));
    }
    verdict(pass, lines.join("; "))
}

fn dispersion_no_doublers() -> Verdict {
    let spec = LatticeSpec::new([0, 0, 6], 1.0, 0.5).unwrap();
    let r = dispersion(&SplittingScheme::second_order(), &spec, 0.0, Axis::Z, 1024).unwrap();
    let mut worst: f64 = 0.0;
    for (p, e) in r.momenta.iter().zip(&r.energies) {
        if p.abs() > 0.0 && p.abs() * spec.ell() <= 0.1 {
            worst = worst.max((e[3] - p.abs()).abs() / p.abs());
        }
    }
    verdict(
        r.doublers.is_empty() && worst <= 0.01,
        format!("N*=1/2: {} interior zeros, max relative deviation from |p| {worst:.2e} for |p|l <= 0.1", r.doublers.len()),
    )
}

struct FeitFleckRun {
    peaks_ok: bool,
    peak_detail: String,
    fidelity: f64,
    success_probability: f64,
    steps: usize,
}

fn feit_fleck_run() -> FeitFleckRun {
    let steps = 200;
    let spec = LatticeSpec::new([0, 0, 4], 0.5, 1.0).unwrap();
    let potentials = Potentials::free(1.0);
    let scheme = SplittingScheme::second_order();
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let trial = SpinorField::from_fn(spec.clone(), move |_| [one, z, one * 0.8, z])
        .normalized()
        .unwrap();
    let positive = SpinorField::from_fn(spec.clone(), move |_| [one, z, z, z])
        .normalized()
        .unwrap();

    let solver = ClassicalSolver::new(spec.clone(), potentials.clone(), scheme.clone()).unwrap();
    let series = autocorrelation_classical(&trial, &solver, steps).unwrap();
    let density = spectral_density(&series, spec.dt(), Window::Hann, 4001).unwrap();
    let de = density.resolution();
    let mut peaks = density.peaks(0.2);
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    let top: Vec<f64> = peaks.iter().take(2).map(|p| p.energy).collect();
    let near = |target: f64| top.iter().any(|e| (e - target).abs() <= de);
    let peaks_ok = de < 0.05 && near(1.0) && near(-1.0);

    let plan = FilterPlan::new(1.0, spec.dt(), steps, Window::Hann).unwrap();
    let out = feit_fleck_filter(
        &trial,
        &potentials,
        &scheme,
        &plan,
        MeasurementMode::Deterministic,
    )
    .unwrap();
    FeitFleckRun {
        peaks_ok,
        peak_detail: format!("dE = {de:.4}, strongest peaks at {top:.4?}"),
        fidelity: out.field.fidelity(&positive).unwrap(),
        success_probability: out.success_probability,
        steps,
    }
}

fn state_preparation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for i in 0..30 {
        let n = 1 + i % 7;
        let mut amps: Vec<C64> = (0..1 << n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        let wires: Vec<usize> = (0..n).collect();
        let circuit = prepare_amplitudes(&amps, &wires, n).unwrap();
        let mut state = QuantumState::zero(n).unwrap();
        circuit.apply(&mut state).unwrap();
        let overlap: C64 = amps
            .iter()
            .zip(state.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        worst = worst.max(1.0 - overlap.norm_sqr());
        worst_ratio = worst_ratio.max(circuit.len() as f64 / f64::from(1u32 << n));
    }
    verdict(
        worst <= 1e-10 && worst_ratio <= 4.0,
        format!("30 targets on 1..7 wires, max infidelity {worst:.2e}, max gates / 2^n = {worst_ratio:.2} (C = 4)"),
    )
}

fn resource_scaling() -> Verdict {
    let synth = GridSynth::default();
    let config = StudyConfig::new(3, (10..=60).step_by(5).collect());
    let rows = scaling_study(&config, &synth).unwrap();
    let ns: Vec<f64> = rows.iter().map(|r| f64::from(r.n)).collect();
    let depths: Vec<f64> = rows.iter().map(|r| r.counts.total() as f64).collect();
    let fit = fit_quadratic(&ns, &depths).unwrap();
    let widths_ok = rows.iter().all(|r| r.width == 4 * r.n as usize + 2);
    let constant = |label: &str| {
        rows.iter()
            .all(|r| r.sections.get(label) == rows[0].sections.get(label))
    };
    let local_ok = constant(section::MASS) && constant(section::VECTOR);

    let one_d = scaling_study(&StudyConfig::new(1, (3..=12).collect()), &synth).unwrap();
    let monotone = one_d
        .windows(2)
        .all(|w| w[1].counts.total() > w[0].counts.total());

    let pass = fit.r_squared >= 0.999
        && (1.8..=2.2).contains(&fit.exponent)
        && widths_ok
        && local_ok
        && monotone;
    verdict(
        pass,
        format!(
            "depth = {:.1} n^2 + {:.1} n + {:.0}, R^2 = {:.6}, log-log exponent {:.3}; width 4n+2: {widths_ok}; \
             Q_m/Q_A n-independent: {local_ok} ({} / {} gates); 1-D monotone: {monotone}",
            fit.c2,
            fit.c1,
            fit.c0,
            fit.r_squared,
            fit.exponent,
            rows[0].sections.get(section::MASS).map_or(0, |c| c.total()),
            rows[0].sections.get(section::VECTOR).map_or(0, |c| c.total()),
        ),
    )
}

fn norm_drift() -> Verdict {
    let spec = LatticeSpec::new([2, 2, 2], 0.5, 1.0).unwrap();
    let p = Potentials::free(1.0)
        .with_vector(VectorPotential::Oscillating {
            amplitude: [0.3, -0.2, 0.5],
            omega: 1.1,
            phase: 0.2,
        })
        .with_scalar(ScalarPotential::Linear {
            field: [0.1, 0.2, -0.1],
            omega: 0.6,
        });
    let scheme = SplittingScheme::second_order();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let f = random_field(&spec, &mut rng);
    let solver = ClassicalSolver::new(spec.clone(), p.clone(), scheme.clone()).unwrap();
    let mut g = f.clone();
    solver.evolve(&mut g, 0.0, 1000, |_, _, _| {}).unwrap();
    let builder = DiracCircuitBuilder::new(spec.clone(), p).unwrap();
    let mut state = builder.encode(&f).unwrap();
    for k in 0..1000 {
        builder
            .time_step(&scheme, k as f64 * spec.dt())
            .unwrap()
            .apply(&mut state)
            .unwrap();
    }
    let classical = (g.norm() - 1.0).abs();
    let quantum = (state.norm_sqr() - 1.0).abs();
    verdict(
        classical <= 1e-9 && quantum <= 1e-9,
        format!("1000 steps on 2x2x2 qubits: classical drift {classical:.2e}, circuit drift {quantum:.2e}"),
    )
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        }
    }
}

fn timed(f: impl FnOnce() -> Verdict) -> (Verdict, f64) {
    let start = Instant::now();
    let v = guarded(f);
    (v, start.elapsed().as_secs_f64())
}

fn report(passed: &mut Vec<bool>, id: usize, name: &str, v: Verdict, secs: f64) {
    println!(
        "[{}] {id:>2}. {name}: {} ({secs:.1} s)",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail
    );
    passed.push(v.pass);
}

fn main() -> ExitCode {
    let mut passed = Vec::new();
    let (v, s) = timed(oracle_equivalence);
    report(&mut passed, 1, "oracle equivalence", v, s);
    let (v, s) = timed(splitting_table);
    report(&mut passed, 2, "rational splitting table", v, s);
    let (v, s) = timed(suzuki_constraints);
    report(&mut passed, 3, "Suzuki constraints", v, s);
    let (v, s) = timed(convergence_order);
    report(&mut passed, 4, "convergence order", v, s);
    let (v, s) = timed(dispersion_no_doublers);
    report(&mut passed, 5, "dispersion without doublers", v, s);

    // Criteria 6 and 7 share one filter run.
    let start = Instant::now();
    let ff = panic::catch_unwind(feit_fleck_run);
    let secs = start.elapsed().as_secs_f64();
    let (six, seven) = match &ff {
        Ok(r) => {
            let bound = success_probability_bound(r.steps);
            (
                verdict(
                    r.peaks_ok && r.fidelity >= 0.99,
                    format!("{}; filtered fidelity {:.5}", r.peak_detail, r.fidelity),
                ),
                verdict(
                    r.success_probability >= bound,
                    format!(
                        "cumulative success probability {:.5} vs bound {bound:.5}",
                        r.success_probability
                    ),
                ),
            )
        }
        Err(_) => (
            verdict(false, "filter run panicked"),
            verdict(false, "filter run panicked"),
        ),
    };
    report(&mut passed, 6, "Feit-Fleck spectrum", six, secs);
    report(&mut passed, 7, "success probability bound", seven, 0.0);

    let (v, s) = timed(state_preparation);
    report(&mut passed, 8, "state preparation", v, s);
    let (v, s) = timed(resource_scaling);
    report(&mut passed, 9, "resource scaling", v, s);
    let (v, s) = timed(norm_drift);
    report(&mut passed, 10, "norm conservation", v, s);

    let ok = passed.iter().filter(|p| **p).count();
    println!("acceptance: {ok}/{} criteria passed", passed.len());
    if ok == passed.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
