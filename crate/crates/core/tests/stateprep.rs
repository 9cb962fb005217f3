use dirac_qwalk::lattice::{LatticeSpec, SpinorField};
use dirac_qwalk::qcore::{decode_field, QuantumState, RegisterLayout};
use dirac_qwalk::stateprep::{prepare_state, rotation_count};
use dirac_qwalk::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn prepared_register_decodes_to_target(seed in any::<u64>(), nx in 0u32..3, nz in 1u32..3, ell in 0.2f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = LatticeSpec::new([nx, 0, nz], ell, 1.0).unwrap();
        let amps = (0..4 * spec.sites()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let target = SpinorField::from_amplitudes(spec.clone(), amps).unwrap().normalized().unwrap();
        let layout = RegisterLayout::standard(&spec).unwrap();
        let circuit = prepare_state(&target, &layout).unwrap();
        let mut s = QuantumState::zero(layout.n_qubits()).unwrap();
        circuit.apply(&mut s).unwrap();
        let out = decode_field(&s, &layout, &spec).unwrap();
        prop_assert!(out.max_abs_diff_phase_aligned(&target) <= 1e-10);
        let data = layout.data_qubits() as u32;
        prop_assert!(rotation_count(&circuit) <= 2usize << data);
    }
}
