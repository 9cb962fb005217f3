use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dirac_qwalk::circuits::DiracCircuitBuilder;
use dirac_qwalk::classical::ClassicalSolver;
use dirac_qwalk::exec::{with_backend, Backend};
use dirac_qwalk::lattice::{
    LatticeSpec, Potentials, ScalarPotential, SpinorField, VectorPotential,
};
use dirac_qwalk::splitting::SplittingScheme;
use dirac_qwalk::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BACKENDS: [(&str, Backend); 2] = [
    ("sequential", Backend::Sequential),
    ("parallel", Backend::Parallel),
];

fn random_field(spec: &LatticeSpec) -> SpinorField {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let amps = (0..4 * spec.sites())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SpinorField::from_amplitudes(spec.clone(), amps)
        .unwrap()
        .normalized()
        .unwrap()
}

fn potentials() -> Potentials {
    Potentials::free(1.0)
        .with_vector(VectorPotential::Oscillating {
            amplitude: [0.3, -0.2, 0.5],
            omega: 1.0,
            phase: 0.0,
        })
        .with_scalar(ScalarPotential::Linear {
            field: [0.1, 0.2, -0.1],
            omega: 0.5,
        })
}

fn classical_step(c: &mut Criterion) {
    let spec = LatticeSpec::new([6, 6, 6], 0.5, 1.0).unwrap();
    let solver =
        ClassicalSolver::new(spec.clone(), potentials(), SplittingScheme::second_order()).unwrap();
    let field = random_field(&spec);
    let mut group = c.benchmark_group("classical_step_6x6x6");
    for (name, backend) in BACKENDS {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            let mut f = field.clone();
            b.iter(|| with_backend(backend, || solver.step(&mut f, 0.0).unwrap()));
        });
    }
    group.finish();
}

fn circuit_step(c: &mut Criterion) {
    let spec = LatticeSpec::new([4, 4, 4], 0.5, 1.0).unwrap();
    let builder = DiracCircuitBuilder::new(spec.clone(), potentials()).unwrap();
    let circuit = builder
        .time_step(&SplittingScheme::second_order(), 0.0)
        .unwrap();
    let state = builder.encode(&random_field(&spec)).unwrap();
    let mut group = c.benchmark_group("circuit_step_4x4x4");
    group.sample_size(10);
    for (name, backend) in BACKENDS {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            let mut s = state.clone();
            b.iter(|| with_backend(backend, || circuit.apply(&mut s).unwrap()));
        });
    }
    group.finish();
}

criterion_group!(benches, classical_step, circuit_step);
criterion_main!(benches);
