use proptest::prelude::*;
use qtwist::liftalg::{
    implement_k, induce_action, invert_q_action, lift_action, normalize_commutator, random_spins, roundtrip_instance,
    solve_coboundary_e, solve_coboundary_f, LiftConfig, ModuleAlgebraAction, RESIDUAL_NAMES,
};
use qtwist::linalg::dense::{hermitian_eigen, random_noise, random_unitary};
use qtwist::linalg::{Mat, Residual};
use qtwist::qnum::{Cplx, QScalar};
use qtwist::repcore::{direct_sum, irrep_su2, vector_rep_sln, Generator, RelationReport};
use qtwist::{Error, LiftStage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(s: &str) -> QScalar {
    s.parse().unwrap()
}

fn exact(r: &RelationReport) -> bool {
    r.entries
        .iter()
        .all(|e| matches!(&e.residual, Residual::Exact(x) if x.is_zero()))
}

fn cdiag(xs: &[f64]) -> Mat<Cplx> {
    Mat::diag(xs.iter().map(|x| Cplx::from_f64(*x, 0.0)).collect())
}

fn spin_half_action() -> ModuleAlgebraAction {
    induce_action(&irrep_su2(1, &q("1/2")).unwrap(), &[2]).unwrap()
}

fn spin_half_plus_trivial() -> ModuleAlgebraAction {
    let qv = q("1/2");
    let sum = direct_sum(&[irrep_su2(1, &qv).unwrap(), irrep_su2(0, &qv).unwrap()]).unwrap();
    induce_action(&sum, &[2, 1]).unwrap()
}

fn trivial_action() -> ModuleAlgebraAction {
    induce_action(&irrep_su2(0, &q("1/2")).unwrap(), &[1]).unwrap()
}

#[test]
fn induced_examples() {
    let t = trivial_action();
    assert!(t.e[0].is_zero() && t.f[0].is_zero());
    assert!((&t.k[0] - &Mat::identity(1)).is_zero());
    let a = spin_half_action();
    assert_eq!((a.algebra_dim(), a.hilbert_dim()), (4, 2));
    assert!(exact(&a.verify().unwrap()));
    let b = spin_half_plus_trivial();
    assert_eq!((b.algebra_dim(), b.hilbert_dim()), (5, 3));
    assert!(exact(&b.verify().unwrap()));
    let names: Vec<_> = b.verify().unwrap().entries.iter().map(|e| e.relation).collect();
    for name in ["leibniz_e", "leibniz_f", "k_automorphism", "star_e", "ke", "ef"] {
        assert!(names.contains(&name), "{name}");
    }
}

#[test]
fn induced_sl3_action_exact() {
    let a = induce_action(&vector_rep_sln(3, &q("2/3")).unwrap(), &[3]).unwrap();
    assert_eq!(a.algebra_dim(), 9);
    assert!(exact(&a.verify().unwrap()));
}

#[test]
fn incompatible_partitions() {
    let qv = q("1/2");
    let sum = direct_sum(&[irrep_su2(1, &qv).unwrap(), irrep_su2(0, &qv).unwrap()]).unwrap();
    assert!(matches!(
        induce_action(&sum, &[1, 2]),
        Err(Error::IncompatiblePartition(_))
    ));
    assert!(matches!(
        induce_action(&sum, &[2, 2]),
        Err(Error::IncompatiblePartition(_))
    ));
    assert!(matches!(
        induce_action(&irrep_su2(1, &qv).unwrap(), &[1, 1]),
        Err(Error::IncompatiblePartition(_))
    ));
}

#[test]
fn corrupted_action_fails_verification() {
    let mut a = spin_half_action();
    a.e[0][(0, 0)] = q("1/3");
    let rep = a.verify().unwrap();
    assert!(!rep.passes(1e-8));
}

#[test]
fn implement_k_examples() {
    let k = implement_k(&trivial_action().to_standard().unwrap(), 1, 1e-8).unwrap();
    assert!(k[0].dist(&Mat::identity(1)) < 1e-30);
    let k = implement_k(&spin_half_action().to_standard().unwrap(), 1, 1e-8).unwrap();
    assert!(k[0].dist(&cdiag(&[0.5, 2.0])) < 1e-30);
    let k = implement_k(&spin_half_plus_trivial().to_standard().unwrap(), 1, 1e-8).unwrap();
    assert_eq!(k.len(), 2);
    assert!(k[0].dist(&cdiag(&[0.5, 2.0])) < 1e-30);
    assert!(k[1].dist(&Mat::identity(1)) < 1e-30);
    assert!(implement_k(&spin_half_action().to_standard().unwrap(), 2, 1e-8).is_err());
}

#[test]
fn implement_k_rejects_non_inner_map() {
    let mut a = spin_half_action().to_standard().unwrap();
    a.k[0] = Mat::zeros(4, 4);
    assert!(implement_k(&a, 1, 1e-8).is_err());
}

#[test]
fn coboundaries_on_spin_half() {
    let a = spin_half_action().to_standard().unwrap();
    let k = implement_k(&a, 1, 1e-8).unwrap();
    let e = solve_coboundary_e(&a, 1, &k, 1e-8).unwrap();
    let f = solve_coboundary_f(&a, 1, &k, 1e-8).unwrap();
    let kinv = k[0].inverse().unwrap();
    let q2 = Cplx::from_f64(0.25, 0.0);
    let qm2 = Cplx::from_f64(4.0, 0.0);
    assert!(k[0].matmul(&e[0]).matmul(&kinv).dist(&e[0].scale(&q2)) <= 1e-10);
    assert!(k[0].matmul(&f[0]).matmul(&kinv).dist(&f[0].scale(&qm2)) <= 1e-10);
    assert!(!e[0].frobenius().is_zero());
}

#[test]
fn coboundaries_of_trivial_action_vanish() {
    let a = trivial_action().to_standard().unwrap();
    let k = implement_k(&a, 1, 1e-8).unwrap();
    assert!(solve_coboundary_e(&a, 1, &k, 1e-8).unwrap()[0].is_zero());
    assert!(solve_coboundary_f(&a, 1, &k, 1e-8).unwrap()[0].is_zero());
}

#[test]
fn non_derivations_rejected() {
    let a = spin_half_action().to_standard().unwrap();
    let k = implement_k(&a, 1, 1e-8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad_e = a.clone();
    bad_e.e[0].add_assign(&random_noise(4, 4, 1e-2, &mut rng));
    assert!(solve_coboundary_e(&bad_e, 1, &k, 1e-8).is_err());
    let mut bad_f = a.clone();
    bad_f.f[0].add_assign(&random_noise(4, 4, 1e-2, &mut rng));
    assert!(solve_coboundary_f(&bad_f, 1, &k, 1e-8).is_err());
}

#[test]
fn normalize_trivial() {
    let zero = vec![Mat::<Cplx>::zeros(1, 1)];
    let one = vec![Mat::<Cplx>::identity(1)];
    let (e, k) = normalize_commutator(&zero, &zero, &one, &q("1/2"), 1e-8).unwrap();
    assert!(e[0].is_zero());
    assert!(k[0].dist(&Mat::identity(1)) < 1e-30);
}

#[test]
fn normalize_rejects_positive_constant() {
    let e = vec![Mat::from_fn(2, 2, |i, j| {
        Cplx::from_f64(if (i, j) == (0, 1) { -2.0 } else { 0.0 }, 0.0)
    })];
    let f = vec![Mat::from_fn(2, 2, |i, j| {
        Cplx::from_f64(if (i, j) == (1, 0) { 1.0 } else { 0.0 }, 0.0)
    })];
    let k = vec![cdiag(&[1.0, -2.0])];
    assert!(matches!(
        normalize_commutator(&e, &f, &k, &q("1/2"), 1e-8),
        Err(Error::PositivityViolation(_))
    ));
}

#[test]
fn lift_trivial() {
    let lift = lift_action(&trivial_action(), &LiftConfig::default()).unwrap();
    assert!(lift.e[0].is_zero() && lift.f[0].is_zero());
    assert!(lift.k[0].dist(&Mat::identity(1)) < 1e-30);
    assert!(lift.residuals.values().all(|r| *r == 0.0));
    assert!(!lift.inverted);
}

/// Eigenvalues of `K` on the spin-`n` irrep: `q^{n-2m}`, ascending.
fn k_eigenvalues(n: u32, qv: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=n as i32).map(|m| qv.powi(n as i32 - 2 * m)).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn proportional(a: &[f64], b: &[f64], tol: f64) -> bool {
    let s = a[0] / b[0];
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - s * y).abs() <= tol * x.abs().max(1.0))
}

#[test]
fn lift_spin_half_recovers_spectrum() {
    let lift = lift_action(&spin_half_action(), &LiftConfig::default()).unwrap();
    assert!(lift.passes(), "{:?}", lift.failing());
    assert_eq!(lift.residuals.len(), RESIDUAL_NAMES.len());
    let spectrum = lift.k_spectrum(1, 0).unwrap();
    assert!(proportional(&spectrum, &k_eigenvalues(1, 0.5), 1e-8));
    assert!(spectrum.iter().all(|x| *x > 0.0));
}

#[test]
fn lift_spin_one_on_m3() {
    let a = induce_action(&irrep_su2(2, &q("1/2")).unwrap(), &[3]).unwrap();
    let lift = lift_action(&a, &LiftConfig::default()).unwrap();
    assert!(lift.passes(), "{:?}", lift.failing());
    assert!(lift.residuals["ef_commutator"] <= 1e-8);
}

#[test]
fn lift_sl3_serre_elements_vanish() {
    let a = induce_action(&vector_rep_sln(3, &q("1/2")).unwrap(), &[3]).unwrap();
    let lift = lift_action(&a, &LiftConfig::default()).unwrap();
    assert_eq!(lift.k.len(), 2);
    assert!(lift.residuals["serre_x"] <= 1e-8);
    assert!(lift.residuals["serre_y"] <= 1e-8);
    assert!(lift.passes(), "{:?}", lift.failing());
}

#[test]
fn lift_rejects_classical_parameter() {
    let mut a = spin_half_action();
    a.q = q("1");
    assert!(matches!(
        lift_action(&a, &LiftConfig::default()),
        Err(Error::UnsupportedParameter(_))
    ));
}

#[test]
fn lift_errors_carry_stage() {
    let mut a = spin_half_action().to_standard().unwrap();
    a.k[0] = Mat::zeros(4, 4);
    let err = lift_action(&a, &LiftConfig::default()).unwrap_err();
    assert_eq!(err.stage(), Some(LiftStage::ImplementK));
}

#[test]
fn lift_above_one_uses_inversion() {
    let a = induce_action(&irrep_su2(1, &q("2")).unwrap(), &[2]).unwrap();
    let lift = lift_action(&a, &LiftConfig::default()).unwrap();
    assert!(lift.inverted);
    assert!(lift.passes(), "{:?}", lift.failing());
    assert!(proportional(
        &lift.k_spectrum(1, 0).unwrap(),
        &k_eigenvalues(1, 2.0),
        1e-8
    ));
}

#[test]
fn invert_q_action_is_involutive() {
    let a = spin_half_plus_trivial();
    let b = invert_q_action(&a).unwrap();
    assert_eq!(b.q, q("2"));
    assert!((&b.k[0] - &a.k[0]).is_zero());
    let back = invert_q_action(&b).unwrap();
    for x in Generator::ALL {
        assert!((back.map(x, 1).unwrap() - a.map(x, 1).unwrap()).is_zero());
    }
}

#[test]
fn action_json_round_trip() {
    let a = spin_half_plus_trivial();
    let text = a.to_json();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["q"], "1/2");
    assert_eq!(v["blocks"], serde_json::json!([2, 1]));
    assert_eq!(v["E"][0].as_array().unwrap().len(), 5);
    let back: ModuleAlgebraAction = ModuleAlgebraAction::from_json(&text).unwrap();
    for x in Generator::ALL {
        assert!((back.map(x, 1).unwrap() - a.map(x, 1).unwrap()).is_zero());
    }
    let minimal = r#"{"cartan": {"label": "A1", "a": [[2]], "d": [1]}, "q": "1/2", "blocks": [1],
        "E": [[["0"]]], "F": [[["0"]]], "K": [[["1"]]]}"#;
    let m: ModuleAlgebraAction = ModuleAlgebraAction::from_json(minimal).unwrap();
    assert!(m.gram.is_none());
    let wrong = r#"{"cartan": {"label": "A1", "a": [[2]], "d": [1]}, "q": "1/2", "blocks": [2],
        "E": [[["0"]]], "F": [[["0"]]], "K": [[["1"]]]}"#;
    assert!(ModuleAlgebraAction::<QScalar>::from_json(wrong).is_err());
}

#[test]
fn lift_json_lists_residuals() {
    let lift = lift_action(&spin_half_action(), &LiftConfig::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&lift.to_json()).unwrap();
    for name in RESIDUAL_NAMES {
        assert!(v["residuals"][name].is_number(), "{name}");
    }
    assert!(v["k"][0][0][0].is_string());
}

/// Eigenvalues of `K` restricted to each block of an orthonormal round-trip
/// representation.
fn source_spectra(rep_k: &Mat<Cplx>, blocks: &[usize]) -> Vec<Vec<f64>> {
    let mut start = 0;
    blocks
        .iter()
        .map(|&n| {
            let (vals, _) = hermitian_eigen(&rep_k.block(start, start, n, n)).unwrap();
            start += n;
            vals.iter().map(|x| x.to_f64()).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn roundtrip_recovers_k_spectrum(seed in 0u64..10_000, half in any::<bool>()) {
        let qv = q(if half { "1/2" } else { "2/3" });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spins = random_spins(3, 3, &mut rng);
        let inst = roundtrip_instance(&spins, &qv, &mut rng).unwrap();
        let lift = lift_action(&inst.action, &LiftConfig::default()).unwrap();
        prop_assert!(lift.passes(), "{:?}", lift.failing());
        for (j, want) in source_spectra(&inst.rep.k[0], &inst.blocks).iter().enumerate() {
            let got = lift.k_spectrum(1, j).unwrap();
            prop_assert!(got.iter().all(|x| *x > 0.0));
            prop_assert!(proportional(&got, want, 1e-8), "{:?} vs {:?}", got, want);
        }
    }

    #[test]
    fn lift_is_gauge_robust(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spins = random_spins(2, 3, &mut rng);
        let inst = roundtrip_instance(&spins, &q("1/2"), &mut rng).unwrap();
        let u: Vec<Mat<Cplx>> = inst.blocks.iter().map(|&n| random_unitary(n, &mut rng)).collect();
        let moved = inst.action.conjugate(&u).unwrap();
        let cfg = LiftConfig::default();
        let a = lift_action(&inst.action, &cfg).unwrap();
        let b = lift_action(&moved, &cfg).unwrap();
        for name in RESIDUAL_NAMES {
            prop_assert!((a.residuals[name] - b.residuals[name]).abs() <= 1e-10, "{}", name);
        }
        prop_assert!(b.passes());
    }

    #[test]
    fn corruption_is_detected(seed in 0u64..10_000, which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spins = random_spins(2, 3, &mut rng);
        let mut inst = roundtrip_instance(&spins, &q("2/3"), &mut rng).unwrap();
        let d = inst.action.algebra_dim();
        let noise = random_noise(d, d, 1e-2, &mut rng);
        match which {
            0 => inst.action.e[0].add_assign(&noise),
            1 => inst.action.f[0].add_assign(&noise),
            _ => inst.action.k[0].add_assign(&noise),
        }
        let detected = match lift_action(&inst.action, &LiftConfig::default()) {
            Ok(lift) => lift.residuals.values().any(|r| *r > 1e-4),
            Err(_) => true,
        };
        prop_assert!(detected);
    }

    #[test]
    fn inverted_path_at_two(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spins = random_spins(3, 3, &mut rng);
        let inst = roundtrip_instance(&spins, &q("2"), &mut rng).unwrap();
        let lift = lift_action(&inst.action, &LiftConfig::default()).unwrap();
        prop_assert!(lift.inverted);
        prop_assert!(lift.passes(), "{:?}", lift.failing());
    }
}
