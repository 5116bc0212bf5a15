use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symsep::curvature::SpaceModel;
use symsep::lie::{bracket, Algebra, LieElement, MatrixAlgebra};
use symsep::mechanics::haantjes::{coordinate_diagonal_field, rotating_frame_field};
use symsep::mechanics::{
    common_eigenframe, haantjes_torsion, hamiltonian_flow, killing_check, metric_hamiltonian,
    model_momentum_map, momentum_map, poisson_bracket, Chart, EigenFailure, MomentaPolynomial,
    PhasePoint, DEFAULT_STEP, HOMOMORPHISM_SIGN,
};

fn models() -> Vec<SpaceModel> {
    vec![
        SpaceModel::sphere(2),
        SpaceModel::sphere(3),
        SpaceModel::real_hyperbolic(2),
        SpaceModel::complex_projective(2),
        SpaceModel::complex_hyperbolic(2),
    ]
}

fn isometry_algebra(chart: &Chart) -> Algebra {
    let n = chart.dim();
    Algebra::Matrix(match chart.name() {
        s if s.starts_with('S') => MatrixAlgebra::so(n + 1),
        s if s.starts_with('H') => MatrixAlgebra::so_pq(n, 1),
        s if s.starts_with("CP") => MatrixAlgebra::su(n / 2 + 1),
        _ => MatrixAlgebra::su_pq(n / 2, 1),
    })
}

fn homomorphism_residual(xi: &LieElement, eta: &LieElement, chart: &Chart, at: &PhasePoint) -> f64 {
    let px = momentum_map(xi, chart).unwrap();
    let py = momentum_map(eta, chart).unwrap();
    let pb = momentum_map(&bracket(xi, eta).unwrap(), chart).unwrap();
    let lhs = poisson_bracket(&px, &py, at, DEFAULT_STEP).unwrap();
    (lhs - HOMOMORPHISM_SIGN * pb.eval(at).unwrap()).abs()
}

#[test]
fn canonical_relations_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chart = Chart::sphere_polar(3);
    for _ in 0..20 {
        let at = chart.random_phase_point(&mut rng);
        for i in 0..3 {
            for j in 0..3 {
                let delta = f64::from(u8::from(i == j));
                let p = MomentaPolynomial::momentum(3, i);
                let x = MomentaPolynomial::coordinate(3, j);
                assert!((poisson_bracket(&p, &x, &at, DEFAULT_STEP).unwrap() - delta).abs() < 1e-8);
                let xx = MomentaPolynomial::coordinate(3, i);
                assert!(poisson_bracket(&xx, &x, &at, DEFAULT_STEP).unwrap().abs() < 1e-8);
                let pp = MomentaPolynomial::momentum(3, j);
                assert!(poisson_bracket(&p, &pp, &at, DEFAULT_STEP).unwrap().abs() < 1e-8);
            }
        }
    }
}

fn sample_polynomial(seed: [f64; 4]) -> MomentaPolynomial {
    let [a, b, c, d] = seed;
    let quad = MomentaPolynomial::quadratic(2, move |x| {
        let off = a * (x[0] * x[1]).sin();
        DMatrix::from_row_slice(2, 2, &[1.0 + b * x[0] * x[0], off, off, c + x[1].cos()])
    });
    let lin = MomentaPolynomial::linear(2, move |x| nalgebra::DVector::from_vec(vec![d * x[1], x[0] - d]));
    quad.add(&lin).add(&MomentaPolynomial::scalar(2, move |x| a * x[0] * x[1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_antisymmetry_and_leibniz(
        s1 in prop::array::uniform4(-1.0f64..1.0),
        s2 in prop::array::uniform4(-1.0f64..1.0),
        x in prop::array::uniform2(-1.0f64..1.0),
        p in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let f = sample_polynomial(s1);
        let g = sample_polynomial(s2);
        let at = PhasePoint::new(x.to_vec(), p.to_vec());
        let fg = poisson_bracket(&f, &g, &at, DEFAULT_STEP).unwrap();
        let gf = poisson_bracket(&g, &f, &at, DEFAULT_STEP).unwrap();
        prop_assert!((fg + gf).abs() < 1e-8);
        prop_assert!(poisson_bracket(&f, &f, &at, DEFAULT_STEP).unwrap().abs() < 1e-8);

        // Leibniz with linear factors keeps the product within degree two.
        let u = MomentaPolynomial::momentum(2, 0).add(&MomentaPolynomial::coordinate(2, 1));
        let v = MomentaPolynomial::linear(2, move |y| nalgebra::DVector::from_vec(vec![y[1].sin(), s1[0] * y[0]]));
        let h = g.clone();
        let uv = u.product(&v).unwrap();
        let lhs = poisson_bracket(&h, &uv, &at, DEFAULT_STEP).unwrap();
        let rhs = poisson_bracket(&h, &u, &at, DEFAULT_STEP).unwrap() * v.eval(&at).unwrap()
            + u.eval(&at).unwrap() * poisson_bracket(&h, &v, &at, DEFAULT_STEP).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-7);
    }
}

#[test]
fn so3_homomorphism_on_the_sphere() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let chart = Chart::sphere_polar(2);
    let alg = isometry_algebra(&chart);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let at = chart.random_phase_point(&mut rng);
        for a in 0..3 {
            for b in 0..3 {
                worst = worst.max(homomorphism_residual(&alg.basis(a), &alg.basis(b), &chart, &at));
            }
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn homomorphism_on_every_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for model in models() {
        let chart = Chart::for_model(&model).unwrap();
        let alg = isometry_algebra(&chart);
        let (_, zero) = model_momentum_map(&alg.zero(), &model).unwrap();
        let at = chart.random_phase_point(&mut rng);
        assert_eq!(zero.eval(&at).unwrap(), 0.0);
        for a in 0..alg.dim() {
            for b in a + 1..alg.dim() {
                let r = homomorphism_residual(&alg.basis(a), &alg.basis(b), &chart, &at);
                assert!(r < 1e-8, "{} ({a},{b}): {r}", chart.name());
            }
        }
    }
}

#[test]
fn cartan_pair_commutes_on_cp2() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let chart = Chart::fubini_study(2);
    let alg = Algebra::Matrix(MatrixAlgebra::su(3));
    let p1 = momentum_map(&alg.basis(0), &chart).unwrap();
    let p2 = momentum_map(&alg.basis(1), &chart).unwrap();
    for _ in 0..20 {
        let at = chart.random_phase_point(&mut rng);
        assert!(poisson_bracket(&p1, &p2, &at, DEFAULT_STEP).unwrap().abs() < 1e-8);
        assert!(p1.eval(&at).unwrap().abs() > 0.0 || p2.eval(&at).unwrap().abs() > 0.0);
    }
}

#[test]
fn momentum_maps_are_killing() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for model in models() {
        let chart = Chart::for_model(&model).unwrap();
        let alg = isometry_algebra(&chart);
        for a in 0..alg.dim() {
            let p = momentum_map(&alg.basis(a), &chart).unwrap();
            let r = killing_check(&p, &chart, 5, &mut rng).unwrap();
            assert!(r < 1e-8, "{} generator {a}: {r}", chart.name());
        }
    }
}

#[test]
fn x1_p1_squared_is_not_killing() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let chart = Chart::sphere_polar(2);
    let k = MomentaPolynomial::quadratic(2, |x| DMatrix::from_row_slice(2, 2, &[x[0], 0.0, 0.0, 0.0]));
    assert!(killing_check(&k, &chart, 10, &mut rng).unwrap() > 1e-2);
    // At p = (1, 0) only dH/dp_1 = p_1 and dK/dx_1 = p_1^2 survive: {H, K} = 1.
    let at = PhasePoint::new(vec![1.0, 0.0], vec![1.0, 0.0]);
    let v = poisson_bracket(&metric_hamiltonian(&chart), &k, &at, DEFAULT_STEP).unwrap();
    assert!((v - 1.0).abs() < 1e-8, "{v}");
}

fn energy_drift(dt: f64) -> f64 {
    let chart = Chart::sphere_polar(2);
    let h = metric_hamiltonian(&chart);
    let start = PhasePoint::new(vec![1.1, 0.2], vec![0.6, 0.8]);
    let tr = hamiltonian_flow(&h, &start, 10.0, dt, DEFAULT_STEP).unwrap();
    (h.eval(tr.last()).unwrap() - h.eval(&start).unwrap()).abs()
}

#[test]
fn energy_drift_on_the_sphere() {
    let d = energy_drift(1e-3);
    assert!(d < 1e-8, "{d}");
}

#[test]
fn drift_scales_with_fourth_order() {
    let coarse = energy_drift(0.1);
    let fine = energy_drift(0.05);
    assert!(coarse / fine >= 12.0, "{coarse} / {fine}");
}

#[test]
fn noether_along_geodesics() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for model in models() {
        let chart = Chart::for_model(&model).unwrap();
        let alg = isometry_algebra(&chart);
        let h = metric_hamiltonian(&chart);
        // Short momenta keep the trajectories inside the sampled region.
        let mut start = chart.random_phase_point(&mut rng);
        start.p.iter_mut().for_each(|p| *p *= 0.1);
        let tr = hamiltonian_flow(&h, &start, 10.0, 1e-3, DEFAULT_STEP).unwrap();
        for a in 0..alg.dim() {
            let p = momentum_map(&alg.basis(a), &chart).unwrap();
            let d = (p.eval(tr.last()).unwrap() - p.eval(&start).unwrap()).abs();
            assert!(d < 1e-6, "{} generator {a}: {d}", chart.name());
        }
    }
}

#[test]
fn eigenframe_failure_on_random_noncommuting_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let chart = Chart::euclidean(3);
    let sym = |rng: &mut ChaCha8Rng| {
        let m = DMatrix::from_fn(3, 3, |_, _| rand::Rng::gen_range(rng, -1.0..1.0));
        &m + m.transpose()
    };
    let a = sym(&mut rng);
    let b = sym(&mut rng);
    assert!((&a * &b - &b * &a).norm() > 1e-3);
    let (ca, cb) = (a.clone(), b.clone());
    let ka = MomentaPolynomial::quadratic(3, move |_| ca.clone());
    let kb = MomentaPolynomial::quadratic(3, move |_| cb.clone());
    match common_eigenframe(&[ka, kb], &chart, &[0.0; 3], &[]) {
        Err(EigenFailure::NonCommuting { pair: (0, 1), norm }) => {
            assert!((norm - (&a * &b - &b * &a).norm()).abs() < 1e-12)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn eigenframe_on_sphere_orthogonal_to_rotation() {
    let chart = Chart::sphere_polar(2);
    let alg = isometry_algebra(&chart);
    let v = momentum_map(&alg.basis(2), &chart).unwrap();
    let h2 = metric_hamiltonian(&chart).scale(2.0);
    let x = [0.9, 0.4];
    let f = common_eigenframe(&[h2], &chart, &x, &[v.clone()]).unwrap();
    assert_eq!(f.vectors.len(), 1);
    let g = chart.metric(&x).unwrap();
    let killing = v.linear_coeffs(&x);
    assert!(f.vectors[0].dot(&(&g * killing)).abs() < 1e-12);
}

#[test]
fn haantjes_diagonal_and_counterexample() {
    let chart = Chart::euclidean(3);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let x = chart.random_point(&mut rng);
        let h = haantjes_torsion(&coordinate_diagonal_field(3), &chart, &x, DEFAULT_STEP).unwrap();
        assert!(h.max_abs() < 1e-6, "{}", h.max_abs());
    }
    let h = haantjes_torsion(&rotating_frame_field(), &chart, &[0.2, -0.1, 0.4], DEFAULT_STEP).unwrap();
    assert!(h.max_abs() > 1e-2);
    let l: symsep::mechanics::haantjes::TensorField = Arc::new(|_| DMatrix::identity(3, 3) * 3.0);
    assert_eq!(haantjes_torsion(&l, &chart, &[0.0; 3], DEFAULT_STEP).unwrap().max_abs(), 0.0);
    assert!(haantjes_torsion(&l, &chart, &[0.0; 3], 0.0).is_err());
}
