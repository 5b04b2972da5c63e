use singlet_core::counting::outcome_distribution;
use singlet_core::witness::{
    diff_against_golden, dominance_margin, parse_golden, reduce_witness_at_scale,
    witness_expectation_from_distributions, REFERENCE_TERMS,
};
use singlet_core::{
    add_white_noise, noise_tolerance, psi6_minus, reduce_witness, witness_expectation_from_counts,
    witness_max_overlap, Basis, BootstrapConfig, CountsTable, MeasurementSetting, Pauli, PauliWord,
    QubitState, Verdict, WitnessKind, WitnessOperator,
};

fn witnesses() -> (WitnessOperator, WitnessOperator) {
    let w = witness_max_overlap(&psi6_minus(), 2.0 / 3.0).unwrap();
    let r = reduce_witness(&w).unwrap();
    (w, r)
}

fn exact_counts(state: &singlet_core::DensityOperator, scale: f64) -> Vec<CountsTable> {
    [Basis::X, Basis::Y, Basis::Z]
        .into_iter()
        .map(|b| {
            let setting = MeasurementSetting::uniform(b, 6);
            let d = outcome_distribution(state, &setting).unwrap();
            let counts = d
                .probs()
                .iter()
                .map(|p| (p * scale).round() as u64)
                .collect();
            CountsTable::new(counts, setting).unwrap()
        })
        .collect()
}

#[test]
fn reduced_witness_values() {
    let (_, r) = witnesses();
    assert_eq!(r.kind(), WitnessKind::Reduced);
    let psi = psi6_minus();
    assert!((r.expectation(&psi).unwrap() + 1.0 / 18.0).abs() < 1e-9);
    assert!((r.normalized_trace() - 181.0 / 576.0).abs() < 1e-9);
    assert!((noise_tolerance(&r, &psi).unwrap() - 32.0 / 213.0).abs() < 1e-9);
    assert!((r.scale() - 1.0 / 6.0).abs() < 1e-6);
}

#[test]
fn reduced_witness_uses_three_settings_only() {
    let (_, r) = witnesses();
    assert!(r.form().iter().all(|(w, _)| !w.is_mixed()));
    assert_eq!(
        r.settings_required().unwrap(),
        vec![Pauli::X, Pauli::Y, Pauli::Z]
    );
    // 31 words per letter type plus the identity
    assert_eq!(r.form().len(), 94);
}

#[test]
fn reduced_witness_term_structure() {
    let (_, r) = witnesses();
    let coeff = |w: &str| r.form().coeff(&w.parse::<PauliWord>().unwrap()) * 576.0;
    for (word, want) in [
        ("XXIIII", -3.0),
        ("ZIIZII", 5.0),
        ("YYIYYI", -5.0),
        ("IIXXXX", 3.0),
        ("ZZZIIZ", 3.0),
        ("XXXXXX", 9.0),
        ("YYYYYY", 9.0),
    ] {
        assert!((coeff(word) - want).abs() < 1e-7, "{word}: {}", coeff(word));
    }
}

#[test]
fn reduced_witness_dominates_scaled_original() {
    let (w, r) = witnesses();
    assert!(dominance_margin(&r, &w, r.scale()).unwrap() > -1e-9);
    // no larger scale keeps the same offset feasible
    assert!(dominance_margin(&r, &w, r.scale() * 1.01).unwrap() < 0.0);
}

#[test]
fn fixed_unit_scale_is_weaker() {
    let (w, r) = witnesses();
    let unit = reduce_witness_at_scale(&w, 1.0).unwrap();
    assert!(unit.normalized_trace() > r.normalized_trace());
    assert!(unit.expectation(&psi6_minus()).unwrap() > 0.0);
}

#[test]
fn detection_implies_detection_by_original() {
    use rand::{Rng, SeedableRng};
    let (w, r) = witnesses();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let psi = psi6_minus();
    let mut detected = 0;
    for _ in 0..1000 {
        // singlet mixed with a random product state and white noise
        let letters: String = (0..6)
            .map(|_| ['H', 'V', 'D', 'A', 'L', 'R'][rng.random_range(0..6)])
            .collect();
        let prod = QubitState::product(&letters).unwrap();
        let (a, b) = (0.6 + 0.4 * rng.random::<f64>(), rng.random::<f64>() * 0.25);
        let m = psi.projector() * num_complex::Complex64::new(a * (1.0 - b), 0.0)
            + prod.projector() * num_complex::Complex64::new((1.0 - a) * (1.0 - b), 0.0)
            + nalgebra::DMatrix::identity(64, 64) * num_complex::Complex64::new(b / 64.0, 0.0);
        let rho = singlet_core::DensityOperator::new(m).unwrap();
        let er = r.expectation_mixed(&rho).unwrap();
        let ew = w.expectation_mixed(&rho).unwrap();
        if er < 0.0 {
            detected += 1;
            assert!(
                ew < 0.0,
                "reduced detects ({er}) but original does not ({ew})"
            );
        }
    }
    assert!(
        detected > 50,
        "too few detections to exercise the implication: {detected}"
    );
}

#[test]
fn golden_diff_is_reported() {
    let (_, r) = witnesses();
    let golden = parse_golden(REFERENCE_TERMS).unwrap();
    let diff = diff_against_golden(&r, &golden, 1e-9);
    assert_eq!(diff.compared, 94);
    // identity and the three all-σ words at ±9/576 are compared with the rest
    let id = golden.iter().find(|t| t.word.is_identity()).unwrap();
    assert!((id.value() - r.normalized_trace()).abs() < 1e-9);
    assert_eq!(diff.sign_flips(1e-9), diff.mismatches.len());
}

#[test]
fn counts_estimator_on_pure_singlet() {
    let (_, r) = witnesses();
    let rho = singlet_core::DensityOperator::pure(&psi6_minus());
    let tables = exact_counts(&rho, 36.0);
    let cfg = BootstrapConfig {
        resamples: 200,
        seed: 1,
        significance: 1.0,
    };
    let rep = witness_expectation_from_counts(&r, &tables, &cfg).unwrap();
    assert!((rep.expectation + 1.0 / 18.0).abs() < 1e-12);
    assert_eq!(rep.n_settings, 3);
}

#[test]
fn counts_estimator_on_white_noise() {
    let (_, r) = witnesses();
    let rho = add_white_noise(&psi6_minus(), 0.126).unwrap();
    let tables = exact_counts(&rho, 288_000.0);
    let cfg = BootstrapConfig {
        resamples: 400,
        seed: 9,
        significance: 1.0,
    };
    let rep = witness_expectation_from_counts(&r, &tables, &cfg).unwrap();
    let want = (181.0 - 213.0 * 0.874) / 576.0;
    assert!((rep.expectation - want).abs() < 1e-6, "{}", rep.expectation);
    assert!(rep.stderr > 0.0 && rep.stderr < 0.01);
    assert_eq!(rep.verdict, Verdict::EntanglementDetected);

    let again = witness_expectation_from_counts(&r, &tables, &cfg).unwrap();
    assert_eq!(rep, again);
}

#[test]
fn counts_estimator_matches_operator_expectation() {
    let (_, r) = witnesses();
    let rho = add_white_noise(&psi6_minus(), 0.3).unwrap();
    let dists: Vec<_> = [Basis::Z, Basis::X, Basis::Y]
        .into_iter()
        .map(|b| outcome_distribution(&rho, &MeasurementSetting::uniform(b, 6)).unwrap())
        .collect();
    let from_dists = witness_expectation_from_distributions(&r, &dists).unwrap();
    assert!((from_dists - r.expectation_mixed(&rho).unwrap()).abs() < 1e-10);
}

#[test]
fn single_bin_counts_are_inconclusive() {
    let (_, r) = witnesses();
    let tables: Vec<CountsTable> = [Basis::X, Basis::Y, Basis::Z]
        .into_iter()
        .map(|b| {
            let mut counts = vec![0u64; 64];
            counts[0] = 50;
            CountsTable::new(counts, MeasurementSetting::uniform(b, 6)).unwrap()
        })
        .collect();
    let rep = witness_expectation_from_counts(&r, &tables, &BootstrapConfig::default()).unwrap();
    // every word has parity +1 on the all-zero outcome
    let want: f64 = r.form().iter().map(|(_, c)| c).sum();
    assert!((rep.expectation - want).abs() < 1e-12);
    assert!(rep.expectation > 0.0);
    assert!(rep.stderr < 1e-12);
    assert_eq!(rep.verdict, Verdict::Inconclusive);
}

#[test]
fn counts_estimator_errors() {
    let (w, r) = witnesses();
    let rho = singlet_core::DensityOperator::pure(&psi6_minus());
    let tables = exact_counts(&rho, 36.0);
    let cfg = BootstrapConfig::default();
    assert!(witness_expectation_from_counts(&r, &tables[..2], &cfg).is_err());
    assert!(witness_expectation_from_counts(&w, &tables, &cfg).is_err());
    let empty = CountsTable::new(vec![0; 64], MeasurementSetting::uniform(Basis::X, 6)).unwrap();
    let mixed = vec![empty, tables[1].clone(), tables[2].clone()];
    assert_eq!(
        witness_expectation_from_counts(&r, &mixed, &cfg).unwrap_err(),
        singlet_core::Error::ZeroCounts
    );
}

#[test]
fn noise_tolerance_root_is_exact() {
    let (w, r) = witnesses();
    let psi = psi6_minus();
    for wit in [&w, &r] {
        let p = noise_tolerance(wit, &psi).unwrap();
        assert!(p > 0.0 && p < 1.0);
        let rho = add_white_noise(&psi, p).unwrap();
        assert!(wit.expectation_mixed(&rho).unwrap().abs() < 1e-12);
    }
}
