use dirac_qwalk::circuits::{section, DiracCircuitBuilder};
use dirac_qwalk::lattice::{LatticeSpec, Potentials, SpinorField, VectorPotential};
use dirac_qwalk::qcore::Instruction;
use dirac_qwalk::resources::{
    scaling_study, CostModel, GridSynth, Lowering, RotationSynthesizer, SearchSynthesizer,
    StudyConfig,
};
use dirac_qwalk::splitting::SplittingScheme;
use dirac_qwalk::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn massive_1d(nz: u32) -> DiracCircuitBuilder {
    let spec = LatticeSpec::new([0, 0, nz], 0.5, 1.0).unwrap();
    let p = Potentials::free(1.0).with_vector(VectorPotential::Constant([0.0, 0.0, 0.4]));
    DiracCircuitBuilder::reduced_1d(spec, p, &[]).unwrap()
}

#[test]
fn lowered_time_step_acts_like_the_original() {
    let synth = GridSynth::default();
    let eps = 1e-7;
    let b = massive_1d(3);
    let step = b.time_step(&SplittingScheme::second_order(), 0.0).unwrap();
    let (lowered, report) = Lowering::new(&synth, eps).unwrap().lower(&step).unwrap();
    assert!(lowered.instructions().iter().all(
        |i| matches!(i, Instruction::Gate(g) if matches!(g.label(), "H" | "S" | "T" | "CNOT"))
    ));
    let spec = b.spec().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut amps = vec![C64::new(0.0, 0.0); 4 * spec.sites()];
    for comp in [0, 2] {
        for z in &mut amps[comp * spec.sites()..(comp + 1) * spec.sites()] {
            *z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let f = SpinorField::from_amplitudes(spec, amps)
        .unwrap()
        .normalized()
        .unwrap();
    let mut a = b.encode(&f).unwrap();
    let mut c = a.clone();
    step.apply(&mut a).unwrap();
    lowered.apply(&mut c).unwrap();
    let bound = 2.0 * eps * report.rotations as f64 + 1e-10;
    assert!(
        a.max_abs_diff(&c) <= bound,
        "{:e} > {bound:e}",
        a.max_abs_diff(&c)
    );
}

#[test]
fn counting_equals_materialized_on_small_steps() {
    let synth = GridSynth::default();
    let lowering = Lowering::new(&synth, 1e-10).unwrap();
    let spec = LatticeSpec::new([1, 1, 1], 0.5, 1.0).unwrap();
    let p = Potentials::free(1.0).with_vector(VectorPotential::Constant([0.1, 0.2, 0.3]));
    let steps = [
        massive_1d(3)
            .time_step(&SplittingScheme::second_order(), 0.0)
            .unwrap(),
        DiracCircuitBuilder::new(spec, p)
            .unwrap()
            .time_step(&SplittingScheme::second_order(), 0.0)
            .unwrap(),
    ];
    for step in &steps {
        let counted = lowering.count(step).unwrap();
        let (lowered, full) = lowering.lower(step).unwrap();
        assert_eq!(counted, full);
        let h = lowered.histogram();
        assert_eq!(h.get("T").copied().unwrap_or(0), counted.counts.t);
        assert_eq!(h.get("CNOT").copied().unwrap_or(0), counted.counts.cnot);
        assert_eq!(lowered.len(), counted.depth());
    }
}

#[test]
fn local_gates_do_not_grow_with_the_lattice() {
    let synth = GridSynth::default();
    let rows = scaling_study(&StudyConfig::new(3, vec![3, 8, 13]), &synth).unwrap();
    for label in [section::MASS, section::VECTOR] {
        assert!(
            rows.iter()
                .all(|r| r.sections[label] == rows[0].sections[label]),
            "{label}"
        );
    }
    let diffs: Vec<i64> = rows
        .windows(2)
        .map(|w| w[1].counts.total() as i64 - w[0].counts.total() as i64)
        .collect();
    assert!(diffs[1] > diffs[0]);
}

#[test]
fn cost_model_tracks_the_synthesizer() {
    let synth = GridSynth::default();
    let model = CostModel::calibrate(&synth, &[1e-3, 1e-5, 1e-7, 1e-9], &[0.3, 1.2, -2.1]).unwrap();
    let actual = synth.rz_counts(0.77, 1e-8).unwrap().total() as f64;
    let predicted = model.rz_counts(0.77, 1e-8).unwrap().total() as f64;
    assert!(
        (predicted / actual - 1.0).abs() < 0.25,
        "{predicted} vs {actual}"
    );
}

#[test]
fn search_synthesizer_lowers_at_coarse_precision() {
    let synth = SearchSynthesizer::new(12);
    let b = massive_1d(2);
    let step = b.time_step(&SplittingScheme::second_order(), 0.0).unwrap();
    let report = Lowering::new(&synth, 0.1).unwrap().count(&step).unwrap();
    assert!(report.counts.total() > 0);
}
