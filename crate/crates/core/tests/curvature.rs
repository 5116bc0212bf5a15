use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symsep::curvature::{
    complex_structure, curvature, curvature4, diagonal_obstruction, final_identity_scan,
    is_lie_triple, octo_witness, random_orthonormal_frame, random_unit_vector,
    sectional_curvature, standard_frame, SpaceModel, TangentSubspace, TangentVector,
};
use symsep::division::Octonion;
use symsep::exact::{q, qi, Rational};

fn models() -> Vec<SpaceModel> {
    vec![
        SpaceModel::sphere(4),
        SpaceModel::real_hyperbolic(3),
        SpaceModel::complex_projective(2),
        SpaceModel::complex_hyperbolic(2),
        SpaceModel::quaternionic_projective(2),
        SpaceModel::quaternionic_hyperbolic(1),
        SpaceModel::octonionic_plane(),
        SpaceModel::octonionic_hyperbolic(),
    ]
}

fn vector(n: usize) -> impl Strategy<Value = TangentVector> {
    prop::collection::vec((-6i64..=6, 1i64..=3), n)
        .prop_map(|v| TangentVector(v.into_iter().map(|(a, b)| q(a, b)).collect()))
}

fn model_and_four() -> impl Strategy<Value = (SpaceModel, [TangentVector; 4])> {
    prop::sample::select(models()).prop_flat_map(|m| {
        let n = m.dim();
        (Just(m), [vector(n), vector(n), vector(n), vector(n)])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_symmetries((m, [x, y, z, w]) in model_and_four()) {
        let r = curvature4(&m, &x, &y, &z, &w).unwrap();
        prop_assert_eq!(&r, &-curvature4(&m, &y, &x, &z, &w).unwrap());
        prop_assert_eq!(&r, &-curvature4(&m, &x, &y, &w, &z).unwrap());
        prop_assert_eq!(&r, &curvature4(&m, &z, &w, &x, &y).unwrap());
        let bianchi = r
            + curvature4(&m, &y, &z, &x, &w).unwrap()
            + curvature4(&m, &z, &x, &y, &w).unwrap();
        prop_assert!(bianchi.is_zero());
    }

    #[test]
    fn complex_rotation_invariance([x, y, z, w] in [vector(4), vector(4), vector(4), vector(4)]) {
        for m in [SpaceModel::complex_projective(2), SpaceModel::complex_hyperbolic(2)] {
            let j = complex_structure;
            prop_assert_eq!(
                curvature4(&m, &j(&x), &j(&y), &j(&z), &j(&w)).unwrap(),
                curvature4(&m, &x, &y, &z, &w).unwrap()
            );
        }
    }

    #[test]
    fn antisymmetric_in_first_pair(x in vector(16), z in vector(16)) {
        let m = SpaceModel::octonionic_plane();
        prop_assert!(curvature(&m, &x, &x, &z).unwrap().is_zero());
    }
}

#[test]
fn octonionic_sectional_curvature_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (lo, hi) = (qi(1), qi(4));
    let p = SpaceModel::octonionic_plane();
    let h = SpaceModel::octonionic_hyperbolic();
    for _ in 0..1000 {
        let x = TangentVector::random(&mut rng, 16);
        let y = TangentVector::random(&mut rng, 16);
        let Some(k) = sectional_curvature(&p, &x, &y).unwrap() else { continue };
        assert!(k >= lo && k <= hi, "{k}");
        let kh = sectional_curvature(&h, &x, &y).unwrap().unwrap();
        assert_eq!(kh, -k);
    }
}

#[test]
fn octonionic_factor_planes_are_lie_triples() {
    let m = SpaceModel::octonionic_plane();
    let first: Vec<TangentVector> = (0..8).map(|k| TangentVector::basis(16, k)).collect();
    let second: Vec<TangentVector> = (8..16).map(|k| TangentVector::basis(16, k)).collect();
    for b in [first, second] {
        let s = TangentSubspace::new(m, b).unwrap();
        assert!(is_lie_triple(&s).unwrap().is_none());
    }
    assert!(is_lie_triple(&TangentSubspace::whole(m)).unwrap().is_none());
}

#[test]
fn random_octonionic_subspace_is_not_lie_triple() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let m = SpaceModel::octonionic_plane();
    let basis: Vec<TangentVector> = (0..8).map(|_| TangentVector::random(&mut rng, 16)).collect();
    let s = TangentSubspace::new(m, basis).unwrap();
    let v = is_lie_triple(&s).unwrap().expect("generic subspace");
    assert!(!v.off_component.is_zero());
    assert!(s.orthogonal_part(&v.off_component) == v.off_component);
}

#[test]
fn totally_real_subspace_is_lie_triple() {
    let m = SpaceModel::complex_projective(3);
    let re: Vec<TangentVector> = (0..3).map(|k| TangentVector::basis(6, 2 * k)).collect();
    assert!(is_lie_triple(&TangentSubspace::new(m, re).unwrap()).unwrap().is_none());
}

#[test]
fn diagonal_obstruction_by_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in [3, 4, 5] {
        let m = SpaceModel::sphere(n);
        for _ in 0..5 {
            let f = random_orthonormal_frame(&mut rng, n);
            assert!(diagonal_obstruction(&m, &f).unwrap().is_empty());
        }
        let h = SpaceModel::real_hyperbolic(n);
        assert!(diagonal_obstruction(&h, &standard_frame(&h)).unwrap().is_empty());
    }
    for m in [
        SpaceModel::complex_projective(2),
        SpaceModel::quaternionic_projective(2),
        SpaceModel::octonionic_plane(),
    ] {
        assert!(!diagonal_obstruction(&m, &standard_frame(&m)).unwrap().is_empty(), "{}", m.name());
    }
}

#[test]
fn octonionic_witness_for_random_unit_e2() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..100 {
        let v = random_unit_vector(&mut rng, 15);
        let mut c = vec![Rational::zero()];
        c.extend(v.0);
        let e2 = TangentVector(c);
        let (y1, y2) = e2.octonion_pair();
        let w = octo_witness(&y1, &y2, 100, &mut rng).unwrap().expect("witness");
        let m = SpaceModel::octonionic_plane();
        let e1 = TangentVector::basis(16, 0);
        assert_eq!(curvature4(&m, &e1, &e2, &w.z, &w.w).unwrap(), w.residual);
        for t in [&w.z, &w.w] {
            assert!(t.inner(&e1).is_zero() && t.inner(&e2).is_zero());
        }
    }
}

#[test]
fn final_identity_has_basis_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let z = Octonion::basis(1);
    for _ in 0..100 {
        let u = Octonion::random(&mut rng);
        let scan = final_identity_scan(&u, &z).unwrap();
        assert!(scan.witness.is_some());
        assert!(scan.min_norm_sq > Rational::zero());
    }
    let scan = final_identity_scan(&Octonion::zero(), &z).unwrap();
    assert_eq!(scan.witness.unwrap().0, 0);
}
