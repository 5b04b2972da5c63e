use std::f64::consts::{FRAC_PI_8, PI};

use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;

use singlet_core::counting::{correlation, outcome_distribution, sample_counts};
use singlet_core::pauli::{pauli_expectation, PauliString};
use singlet_core::pipeline::haar_su2;
use singlet_core::postselect::project_qubit;
use singlet_core::{
    add_white_noise, beamsplitter, estimate_fidelity_white_noise, fidelity, letter_ket, pdc_state,
    postselect_one_per_mode, psi6_minus, three_way_split, waveplate, Basis, FockKet, FockVector,
    JonesMatrix, MeasurementSetting, ModeMap, PdcSpec, PolMode, Spatial, WaveplateKind,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const MODES: [PolMode; 4] = [
    PolMode::h(Spatial::A),
    PolMode::v(Spatial::A),
    PolMode::h(Spatial::B),
    PolMode::v(Spatial::B),
];

fn fock_vector() -> impl Strategy<Value = FockVector> {
    prop::collection::vec(
        (
            (0u32..3, 0u32..3, 0u32..3, 0u32..3),
            -1.0..1.0f64,
            -1.0..1.0f64,
        ),
        1..6,
    )
    .prop_map(|terms| {
        FockVector::from_terms(terms.into_iter().map(|((p, q, r, s), re, im)| {
            let ket = FockKet::from_pairs(MODES.into_iter().zip([p, q, r, s]));
            (ket, c(re, im))
        }))
    })
}

fn unit_complex_triple() -> impl Strategy<Value = [Complex64; 3]> {
    prop::array::uniform3((0.2..1.0f64, 0.0..(2.0 * PI))).prop_map(|raw| {
        let norm = raw.iter().map(|(r, _)| r * r).sum::<f64>().sqrt();
        raw.map(|(r, t)| Complex64::from_polar(r / norm, t))
    })
}

fn su2() -> impl Strategy<Value = Matrix2<Complex64>> {
    any::<u64>().prop_map(|seed| haar_su2(&mut singlet_core::rng::substream(seed, 0)))
}

fn random_mode_map(theta: f64, phase: f64) -> ModeMap {
    // balanced mixing of a and b, then a wave plate on a
    let t = c(theta.cos(), 0.0);
    let r = Complex64::from_polar(theta.sin(), phase);
    let mut rules = std::collections::BTreeMap::new();
    for pol in singlet_core::Pol::BOTH {
        let a = PolMode::new(Spatial::A, pol);
        let b = PolMode::new(Spatial::B, pol);
        rules.insert(a, vec![(a, t), (b, r)]);
        rules.insert(b, vec![(a, -r.conj()), (b, t)]);
    }
    let bs = ModeMap::new(rules).unwrap();
    let wp = ModeMap::from_jones(Spatial::A, &waveplate(WaveplateKind::Quarter, theta)).unwrap();
    wp.compose(&bs).unwrap()
}

fn max_diff(a: &FockVector, b: &FockVector) -> f64 {
    a.add(&b.scale(c(-1.0, 0.0)))
        .iter()
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max)
}

fn splits(a: [Complex64; 3], b: [Complex64; 3]) -> ModeMap {
    let arm_a = three_way_split(Spatial::A0, [Spatial::A, Spatial::B, Spatial::C], a)
        .unwrap()
        .map;
    let arm_b = three_way_split(Spatial::B0, [Spatial::D, Spatial::E, Spatial::F], b)
        .unwrap()
        .map;
    arm_b.compose(&arm_a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_product_is_hermitian(u in fock_vector(), v in fock_vector()) {
        let uv = u.inner(&v);
        let vu = v.inner(&u);
        prop_assert!((uv - vu.conj()).norm() < 1e-12);
        prop_assert!(u.inner(&u).re >= 0.0 && u.inner(&u).im.abs() < 1e-12);
    }

    #[test]
    fn mode_maps_preserve_inner_products(u in fock_vector(), v in fock_vector(), th in 0.0..PI, ph in 0.0..(2.0 * PI)) {
        let m = random_mode_map(th, ph);
        let before = u.inner(&v);
        let after = m.apply(&u).inner(&m.apply(&v));
        prop_assert!((before - after).norm() < 1e-10);
    }

    #[test]
    fn mode_map_composition(v in fock_vector(), t1 in 0.0..PI, p1 in 0.0..PI, t2 in 0.0..PI, p2 in 0.0..PI) {
        let m1 = random_mode_map(t1, p1);
        let m2 = random_mode_map(t2, p2);
        let stepwise = m2.apply(&m1.apply(&v));
        let composed = m2.compose(&m1).unwrap().apply(&v);
        prop_assert!(max_diff(&stepwise, &composed) < 1e-10);
    }

    #[test]
    fn waveplates_are_unitary(theta in -10.0..10.0f64) {
        for kind in [WaveplateKind::Half, WaveplateKind::Quarter] {
            let m = waveplate(kind, theta).matrix();
            prop_assert!((m.adjoint() * m - Matrix2::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn pdc_amplitudes_have_equal_magnitude(order in 1u32..=3, phi in -10.0..10.0f64) {
        let v = pdc_state(&PdcSpec::new(order, phi)).unwrap();
        prop_assert_eq!(v.len(), order as usize + 1);
        let want = 1.0 / ((order + 1) as f64).sqrt();
        for (_, a) in v.iter() {
            prop_assert!((a.norm() - want).abs() < 1e-12);
        }
        let shifted = pdc_state(&PdcSpec::new(order, phi + 2.0 * PI)).unwrap();
        prop_assert!(max_diff(&v, &shifted) < 1e-12);
    }

    #[test]
    fn singlet_is_collectively_invariant(u in su2()) {
        let psi = psi6_minus();
        let rotated = psi.local_unitary(&[u; 6]).unwrap();
        prop_assert!((psi.overlap(&rotated).unwrap().norm() - 1.0).abs() < 1e-10);
        let z = outcome_distribution(&psi, &MeasurementSetting::uniform(Basis::Z, 6)).unwrap();
        let setting = MeasurementSetting::uniform(Basis::Custom(JonesMatrix::new(u).unwrap()), 6);
        let d = outcome_distribution(&psi, &setting).unwrap();
        for (a, b) in d.probs().iter().zip(z.probs()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn white_noise_density_is_invariant(u in su2(), p in 0.0..1.0f64) {
        let rho = add_white_noise(&psi6_minus(), p).unwrap();
        let r = rho.local_unitary(&[u; 6]).unwrap();
        prop_assert!((r.matrix() - rho.matrix()).iter().all(|z| z.norm() < 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn splitting_ratio_independence(a in unit_complex_triple(), b in unit_complex_triple()) {
        let emitted = pdc_state(&PdcSpec::new(3, PI)).unwrap();
        let (state, p) = postselect_one_per_mode(&splits(a, b).apply(&emitted), &Spatial::OUTPUTS).unwrap();
        prop_assert!((state.overlap(&psi6_minus()).unwrap().norm() - 1.0).abs() < 1e-10);
        // 36·|αβγ·α'β'γ'|²
        let prod = |t: [Complex64; 3]| t.iter().map(|z| z.norm()).product::<f64>();
        let want = 36.0 * (prod(a) * prod(b)).powi(2);
        prop_assert!((p - want).abs() < 1e-12, "{} vs {}", p, want);
    }
}

#[test]
fn white_noise_fidelity_identity() {
    let psi = psi6_minus();
    for k in 0..20 {
        let p = k as f64 / 19.0;
        let f = fidelity(&add_white_noise(&psi, p).unwrap(), &psi).unwrap();
        assert!((f - ((1.0 - p) + p / 64.0)).abs() < 1e-12, "p = {p}");
    }
}

#[test]
fn fidelity_estimator_is_exact_on_white_noise() {
    let psi = psi6_minus();
    for p in [0.0, 0.05, 0.126, 0.5, 1.0] {
        let rho = add_white_noise(&psi, p).unwrap();
        let e: Vec<f64> = [Basis::X, Basis::Y, Basis::Z]
            .into_iter()
            .map(|b| {
                correlation(
                    &outcome_distribution(&rho, &MeasurementSetting::uniform(b, 6)).unwrap(),
                )
            })
            .collect();
        let est = estimate_fidelity_white_noise([(e[0], 0.0), (e[1], 0.0), (e[2], 0.0)]).unwrap();
        assert!((est.fidelity - fidelity(&rho, &psi).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn correlations_match_pauli_expectations() {
    let psi = psi6_minus();
    for (b, w) in [
        (Basis::X, "XXXXXX"),
        (Basis::Y, "YYYYYY"),
        (Basis::Z, "ZZZZZZ"),
    ] {
        let d = outcome_distribution(&psi, &MeasurementSetting::uniform(b, 6)).unwrap();
        let op = pauli_expectation(&psi, &PauliString::parse(w, 1.0).unwrap()).unwrap();
        assert!((correlation(&d) - op).abs() < 1e-10);
        assert!((op + 1.0).abs() < 1e-12);
    }
}

#[test]
fn projections_on_different_qubits_commute() {
    let psi = psi6_minus();
    let letters = ['H', 'V', 'D', 'A', 'L', 'R'];
    for i in 0..6 {
        for j in 0..6 {
            if i == j {
                continue;
            }
            let bi = letter_ket(letters[i]).unwrap();
            let bj = letter_ket(letters[j]).unwrap();
            let (s1, p1) = project_qubit(&psi, i, &bi).unwrap();
            let j1 = if j > i { j - 1 } else { j };
            let (s12, p12) = project_qubit(&s1, j1, &bj).unwrap();
            let (s2, p2) = project_qubit(&psi, j, &bj).unwrap();
            let i2 = if i > j { i - 1 } else { i };
            let (s21, p21) = project_qubit(&s2, i2, &bi).unwrap();
            assert!((p1 * p12 - p2 * p21).abs() < 1e-12);
            assert!((s12.overlap(&s21).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn half_wave_plate_maps_z_histogram_to_x_histogram() {
    let psi = psi6_minus();
    let hwp = waveplate(WaveplateKind::Half, FRAC_PI_8).matrix();
    let rotated = psi.local_unitary(&[hwp; 6]).unwrap();
    let z = outcome_distribution(&rotated, &MeasurementSetting::uniform(Basis::Z, 6)).unwrap();
    let x = outcome_distribution(&psi, &MeasurementSetting::uniform(Basis::X, 6)).unwrap();
    for (a, b) in z.probs().iter().zip(x.probs()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn sampling_converges_in_total_variation() {
    let psi = psi6_minus();
    let rho = add_white_noise(&psi, 0.2).unwrap();
    for (seed, n) in [(1u64, 10_000u64), (2, 40_000), (3, 160_000)] {
        let d = outcome_distribution(&rho, &MeasurementSetting::uniform(Basis::Y, 6)).unwrap();
        let t = sample_counts(&d, n, seed);
        let f = t.frequencies().unwrap();
        let tv = 0.5
            * f.iter()
                .zip(d.probs())
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>();
        assert!(tv < 5.0 / (n as f64).sqrt(), "n = {n}: {tv}");
    }
}

#[test]
fn balanced_beamsplitter_on_two_photons() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bs = beamsplitter(Spatial::A0, Spatial::A, Spatial::B, c(s, 0.0), c(s, 0.0)).unwrap();
    let input = FockVector::ket(FockKet::from_pairs([(PolMode::h(Spatial::A0), 2)]));
    let out = bs.apply(&input);
    let k = |a, b| FockKet::from_pairs([(PolMode::h(Spatial::A), a), (PolMode::h(Spatial::B), b)]);
    assert!((out.amplitude(&k(2, 0)) - c(0.5, 0.0)).norm() < 1e-12);
    assert!((out.amplitude(&k(1, 1)) - c(s, 0.0)).norm() < 1e-12);
    assert!((out.amplitude(&k(0, 2)) - c(0.5, 0.0)).norm() < 1e-12);
}
