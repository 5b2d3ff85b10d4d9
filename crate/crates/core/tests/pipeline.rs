//! Construction → serialization → certification → recovery, end to end.

use pfcs_core::charsum::KatzSums;
use pfcs_core::field::FieldParams;
use pfcs_core::index::{build_full, build_quotient, IndexSet};
use pfcs_core::matrix::SensingMatrix;
use pfcs_core::record::Record;
use pfcs_core::recovery::{basis_pursuit, gen_signal, measure, omp, relative_error, BpParams, SignalModel};
use pfcs_core::seed;

fn example_one() -> IndexSet {
    let f = FieldParams::new(29, 1, 2, Some(&[2, 0, 1])).unwrap();
    build_full(&f, &f.parse_element("1,1").unwrap(), &f.parse_element("0,28").unwrap()).unwrap()
}

fn example_two() -> IndexSet {
    let f = FieldParams::new(19, 1, 3, Some(&[1, 1, 0, 1])).unwrap();
    build_quotient(&f, &f.parse_element("0,2,1").unwrap(), &f.x(), 1).unwrap()
}

#[test]
fn fixtures_survive_serialization_and_rebuild() {
    for set in [example_one(), example_two()] {
        let back = Record::from_toml(&Record::from_index_set(&set).to_toml()).unwrap().to_index_set().unwrap();
        assert_eq!(back, set);
        assert_eq!(back.rebuild().unwrap(), set);
    }
}

#[test]
fn katz_sums_from_record_match_direct_evaluation() {
    let set = example_one();
    let direct = KatzSums::from_index_set(&set).unwrap();
    let text = Record::from_index_set(&set).to_toml();
    let loaded = KatzSums::from_index_set(&Record::from_toml(&text).unwrap().to_index_set().unwrap()).unwrap();
    for a in [1u64, 28, 29, 420, 839] {
        assert_eq!(direct.value(a), loaded.value(a));
    }
}

#[test]
fn negated_alpha_keeps_coherence() {
    let f = FieldParams::new(29, 1, 2, Some(&[2, 0, 1])).unwrap();
    let g = f.parse_element("1,1").unwrap();
    let mu = |alpha| {
        SensingMatrix::from_index_set(&build_full(&f, &g, &alpha).unwrap()).coherence_bruteforce().unwrap().mu
    };
    assert!((mu(f.x()) - mu(f.neg(&f.x()))).abs() < 1e-12);
}

#[test]
fn example_two_recovers_within_guarantee() {
    // μ(Example 2) < 1/3, so every 2-sparse signal is recoverable.
    let phi = SensingMatrix::from_index_set(&example_two());
    let report = phi.coherence_bruteforce().unwrap();
    assert!(report.k_max >= 2, "{report:?}");
    for trial in 0..10u64 {
        let sig = gen_signal(381, 2, SignalModel::UnitModulus, &mut seed::rng(77, &[trial])).unwrap();
        let y = measure(&phi, &sig).unwrap();
        let o = omp(&phi, &y, 2, 1e-12).unwrap();
        assert!(relative_error(&o.estimate, &sig) < 1e-6);
        let b = basis_pursuit(&phi, &y, &BpParams::default()).unwrap();
        assert!(b.converged);
        assert!(relative_error(&b.estimate, &sig) < 1e-4, "trial {trial}");
    }
}
