//! One line per acceptance criterion. Runs without the libtest harness so the
//! summary is printed even when everything passes.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symsep::curvature::{curvature4, is_lie_triple, sectional_curvature, SpaceModel, TangentSubspace, TangentVector};
use symsep::division::{oct_mul, Octonion, So8Matrix};
use symsep::exact::{qi, to_f64};
use symsep::lie::f4::{f4_bracket, lambda2_auto, lambda_auto, F4Element};
use symsep::lie::{adjoint_matrix, bracket, centralizer_dimension, killing_form, Algebra, LieElement, MatrixAlgebra};
use symsep::mechanics::haantjes::{coordinate_diagonal_field, rotating_frame_field};
use symsep::mechanics::{
    haantjes_torsion, hamiltonian_flow, metric_hamiltonian, momentum_map, poisson_bracket, Chart, MomentaPolynomial,
    PhasePoint, DEFAULT_STEP, HOMOMORPHISM_SIGN,
};
use symsep::stackel::instances::{
    cp2_cartan_candidate, cp2_torus, s2_missing_metric_candidate, s2_noncommuting_candidate, s2_rotation_candidate,
    shipped,
};
use symsep::stackel::{
    assemble_block_metric, benenti_check, conjugate_coordinates, generating_w, hj_residual, stackel_constants,
    verify_involution, StackelError,
};
use symsep::verify::{run_check, RunConfig, Status};

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// 1 -------------------------------------------------------------------------

fn exact_algebra() -> Verdict {
    let start = Instant::now();
    let mut r = rng(101);
    let n = 50;
    for _ in 0..n {
        let (x, y, z) = (Octonion::random(&mut r), Octonion::random(&mut r), Octonion::random(&mut r));
        let xy = oct_mul(&x, &y);
        ensure!(xy.norm_sq() == x.norm_sq() * y.norm_sq(), "composition fails for {x}, {y}");
        ensure!(oct_mul(&oct_mul(&x, &x), &y) == oct_mul(&x, &xy), "left alternativity fails");
        ensure!(oct_mul(&oct_mul(&y, &x), &x) == oct_mul(&y, &oct_mul(&x, &x)), "right alternativity fails");
        ensure!(xy.conj() == oct_mul(&y.conj(), &x.conj()), "conjugation is not an anti-automorphism");
        // Moufang: (xy)(zx) = (x(yz))x
        let lhs = oct_mul(&xy, &oct_mul(&z, &x));
        let rhs = oct_mul(&oct_mul(&x, &oct_mul(&y, &z)), &x);
        ensure!(lhs == rhs, "Moufang identity fails");
    }
    for _ in 0..n {
        let (x, y, z) = (F4Element::random(&mut r), F4Element::random(&mut r), F4Element::random(&mut r));
        let j = &(&f4_bracket(&x, &f4_bracket(&y, &z)) + &f4_bracket(&y, &f4_bracket(&z, &x)))
            + &f4_bracket(&z, &f4_bracket(&x, &y));
        ensure!(j.is_zero(), "Jacobi fails");
    }
    for _ in 0..n {
        let m = So8Matrix::random_skew(&mut r);
        let k = So8Matrix::random_skew(&mut r);
        let mk = m.commutator(&k);
        let l = |a: &So8Matrix| lambda_auto(a).unwrap();
        let l2 = |a: &So8Matrix| lambda2_auto(a).unwrap();
        ensure!(l(&mk) == l(&m).commutator(&l(&k)), "lambda is not a homomorphism");
        ensure!(l2(&mk) == l2(&m).commutator(&l2(&k)), "lambda^2 is not a homomorphism");
    }
    let pieces = |x: &F4Element| -> [LieElement; 4] {
        [
            F4Element::from_so8(x.a.clone()).into(),
            F4Element::from_u(x.u.clone()).into(),
            F4Element::from_v(x.v.clone()).into(),
            F4Element::from_w(x.w.clone()).into(),
        ]
    };
    for _ in 0..n {
        let (x, y) = (F4Element::random(&mut r), F4Element::random(&mut r));
        let (px, py) = (pieces(&x), pieces(&y));
        for (i, a) in px.iter().enumerate() {
            for (j, b) in py.iter().enumerate() {
                if i != j {
                    ensure!(killing_form(a, b).unwrap().is_zero(), "summands {i} and {j} not Killing-orthogonal");
                }
            }
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(format!("{n} instances per identity, all exactly zero, {:.1} s", t.as_secs_f64()))
}

// 2 -------------------------------------------------------------------------

fn curvature_suite() -> Verdict {
    let mut r = rng(102);
    let models = [
        SpaceModel::sphere(3),
        SpaceModel::real_hyperbolic(3),
        SpaceModel::complex_projective(2),
        SpaceModel::complex_hyperbolic(2),
        SpaceModel::quaternionic_projective(2),
        SpaceModel::quaternionic_hyperbolic(2),
        SpaceModel::octonionic_plane(),
        SpaceModel::octonionic_hyperbolic(),
    ];
    for m in &models {
        for _ in 0..10 {
            let v: Vec<TangentVector> = (0..4).map(|_| TangentVector::random(&mut r, m.dim())).collect();
            let (x, y, z, w) = (&v[0], &v[1], &v[2], &v[3]);
            let rr = |a, b, c, d| curvature4(m, a, b, c, d).unwrap();
            let base = rr(x, y, z, w);
            ensure!(base == -rr(y, x, z, w), "{}: first antisymmetry", m.name());
            ensure!(base == -rr(x, y, w, z), "{}: second antisymmetry", m.name());
            ensure!(base == rr(z, w, x, y), "{}: pair symmetry", m.name());
            ensure!((&base + &rr(y, z, x, w) + rr(z, x, y, w)).is_zero(), "{}: Bianchi", m.name());
        }
    }
    let plane = SpaceModel::octonionic_plane();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut planes = 0;
    while planes < 1000 {
        let x = TangentVector::random(&mut r, 16);
        let y = TangentVector::random(&mut r, 16);
        let Some(k) = sectional_curvature(&plane, &x, &y).unwrap() else { continue };
        planes += 1;
        ensure!(k >= qi(1) && k <= qi(4), "sectional curvature {k} outside [1, 4]");
        lo = lo.min(to_f64(&k));
        hi = hi.max(to_f64(&k));
    }
    for range in [0..8, 8..16] {
        let basis = range.clone().map(|k| TangentVector::basis(16, k)).collect();
        let s = TangentSubspace::new(plane, basis).unwrap();
        ensure!(is_lie_triple(&s).unwrap().is_none(), "coordinates {range:?} not a Lie triple");
    }
    Ok(format!(
        "symmetries exact on 8 models; 1000 planes with curvature in [{lo:.3}, {hi:.3}]; both factors are Lie triples"
    ))
}

// 3 -------------------------------------------------------------------------

fn nonexistence() -> Verdict {
    let start = Instant::now();
    let cfg = RunConfig::new(42);
    let mut lines = Vec::new();
    for id in ["octonion-diagonal", "f4", "cpn"] {
        let rep = run_check(id, &cfg).map_err(|e| e.to_string())?;
        ensure!(rep.status == Status::Pass, "{id} failed: {:?}", rep.witnesses);
        lines.push(id);
    }
    let oct = run_check("octonion-diagonal", &cfg).unwrap();
    let summary = oct.witnesses.last().unwrap();
    ensure!(summary.contains("0 without witness"), "{summary}");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(300), "took {t:?}");
    Ok(format!("{} pass, {:.1} s", lines.join(", "), t.as_secs_f64()))
}

// 4 -------------------------------------------------------------------------

/// Rank of the adjoint matrix in floating point, as an independent count.
fn float_centralizer(x: &LieElement) -> usize {
    let ad = adjoint_matrix(x);
    let m = DMatrix::from_fn(ad.rows(), ad.cols(), |i, j| to_f64(&ad[(i, j)]));
    let sv = m.singular_values();
    let scale = sv.max();
    sv.iter().filter(|s| **s <= 1e-9 * scale).count()
}

fn centralizers() -> Verdict {
    let mut r = rng(104);
    let mut parts = Vec::new();
    for (alg, want) in [
        (Algebra::Matrix(MatrixAlgebra::su(3)), 2),
        (Algebra::Matrix(MatrixAlgebra::su(4)), 3),
        (Algebra::F4, 4),
    ] {
        for _ in 0..20 {
            let x = alg.random(&mut r);
            let d = centralizer_dimension(&x);
            ensure!(d == want, "{}: centralizer {d}, expected {want}", alg.name());
            ensure!(float_centralizer(&x) == want, "{}: floating count disagrees", alg.name());
        }
        parts.push(format!("{} = {want}", alg.name()));
    }
    Ok(format!("{} at 20 points each", parts.join(", ")))
}

// 5 -------------------------------------------------------------------------

fn energy_drift(dt: f64) -> f64 {
    let chart = Chart::sphere_polar(2);
    let h = metric_hamiltonian(&chart);
    let start = PhasePoint::new(vec![1.1, 0.2], vec![0.6, 0.8]);
    let tr = hamiltonian_flow(&h, &start, 10.0, dt, DEFAULT_STEP).unwrap();
    (h.eval(tr.last()).unwrap() - h.eval(&start).unwrap()).abs()
}

fn mechanics() -> Verdict {
    let mut r = rng(105);
    let s2 = Chart::sphere_polar(2);
    let mut canonical: f64 = 0.0;
    for _ in 0..20 {
        let at = s2.random_phase_point(&mut r);
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let (p, x) = (MomentaPolynomial::momentum(2, i), MomentaPolynomial::coordinate(2, j));
                canonical = canonical.max((poisson_bracket(&p, &x, &at, DEFAULT_STEP).unwrap() - delta).abs());
                let xx = MomentaPolynomial::coordinate(2, i);
                canonical = canonical.max(poisson_bracket(&xx, &x, &at, DEFAULT_STEP).unwrap().abs());
                let pp = MomentaPolynomial::momentum(2, j);
                canonical = canonical.max(poisson_bracket(&p, &pp, &at, DEFAULT_STEP).unwrap().abs());
            }
        }
    }
    ensure!(canonical < 1e-8, "canonical relations off by {canonical}");

    let hom = |alg: Algebra, pairs: &[(usize, usize)], chart: &Chart, r: &mut ChaCha8Rng| -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let at = chart.random_phase_point(r);
            for &(a, b) in pairs {
                let (xi, eta) = (alg.basis(a), alg.basis(b));
                let lhs = poisson_bracket(
                    &momentum_map(&xi, chart).unwrap(),
                    &momentum_map(&eta, chart).unwrap(),
                    &at,
                    DEFAULT_STEP,
                )
                .unwrap();
                let rhs = momentum_map(&bracket(&xi, &eta).unwrap(), chart).unwrap().eval(&at).unwrap();
                worst = worst.max((lhs - HOMOMORPHISM_SIGN * rhs).abs());
            }
        }
        worst
    };
    let so3 = hom(Algebra::Matrix(MatrixAlgebra::so(3)), &[(0, 1), (0, 2), (1, 2)], &s2, &mut r);
    ensure!(so3 < 1e-8, "so(3) homomorphism residual {so3}");
    let cp2 = Chart::fubini_study(2);
    let cartan = hom(Algebra::Matrix(MatrixAlgebra::su(3)), &[(0, 1)], &cp2, &mut r);
    ensure!(cartan < 1e-8, "su(3) Cartan residual {cartan}");

    let drift = energy_drift(1e-3);
    ensure!(drift < 1e-8, "energy drift {drift}");
    let ratio = energy_drift(0.1) / energy_drift(0.05);
    ensure!(ratio >= 12.0, "halving dt improves drift only {ratio}x");

    let h = metric_hamiltonian(&s2);
    let mut start = s2.random_phase_point(&mut r);
    start.p.iter_mut().for_each(|p| *p *= 0.1);
    let tr = hamiltonian_flow(&h, &start, 10.0, 1e-3, DEFAULT_STEP).unwrap();
    let mut noether: f64 = 0.0;
    for k in 0..3 {
        let p = momentum_map(&Algebra::Matrix(MatrixAlgebra::so(3)).basis(k), &s2).unwrap();
        noether = noether.max((p.eval(tr.last()).unwrap() - p.eval(&start).unwrap()).abs());
    }
    ensure!(noether < 1e-6, "Noether drift {noether}");
    Ok(format!(
        "canonical {canonical:.1e}, so(3) {so3:.1e}, Cartan {cartan:.1e}, energy drift {drift:.1e}, Noether {noether:.1e}, dt halving {ratio:.1}x"
    ))
}

// 6 -------------------------------------------------------------------------

fn branch(p: &[f64]) -> Vec<i8> {
    p.iter().map(|v| if *v < 0.0 { -1 } else { 1 }).collect()
}

fn stackel_suite() -> Verdict {
    let mut r = rng(106);
    let mut worst = [0.0f64; 5];
    for name in ["s2-elliptic", "h2-elliptic"] {
        let sys = shipped(name).unwrap();
        let inv = verify_involution(&sys, 100, &mut r).unwrap();
        ensure!(inv.max_residual < 1e-6, "{name} involution {}", inv.max_residual);
        worst[0] = worst[0].max(inv.max_residual);

        let chart = sys.chart();
        let mut admissible = 0;
        while admissible < 100 {
            let at = sys.random_phase_point(&mut r);
            let c: Vec<f64> = stackel_constants(&sys, &at).unwrap().iter().copied().collect();
            let w = match generating_w(&sys, &c, &at.x, &branch(&at.p)) {
                Ok(w) => w,
                Err(StackelError::NegativeRadicand { .. }) => continue,
                Err(e) => return Err(e.to_string()),
            };
            admissible += 1;
            let res = hj_residual(&chart, &w.gradient, c[0], &at.x).unwrap();
            ensure!(res < 1e-6, "{name} HJ residual {res}");
            worst[1] = worst[1].max(res);
        }

        let start = PhasePoint::new(sys.base().to_vec(), vec![0.004, 0.001]);
        let tr = hamiltonian_flow(&sys.constant_polynomial(0), &start, 10.0, 1e-3, DEFAULT_STEP).unwrap();
        let c0 = stackel_constants(&sys, &start).unwrap();
        let drift = (stackel_constants(&sys, tr.last()).unwrap() - &c0).amax();
        ensure!(drift < 1e-5, "{name} constants drift {drift}");
        worst[2] = worst[2].max(drift);

        let sys = sys.with_base(start.x.clone()).unwrap();
        let c: Vec<f64> = c0.iter().copied().collect();
        let b = branch(&start.p);
        let q0 = conjugate_coordinates(&sys, &c, &start.x, &b).unwrap();
        for (t, z) in tr.times.iter().zip(&tr.points).step_by(1000).skip(1) {
            let q = conjugate_coordinates(&sys, &c, &z.x, &b).unwrap();
            let (d1, d2) = ((q[0] - q0[0] - t).abs(), (q[1] - q0[1]).abs());
            ensure!(d1 < 1e-4 && d2 < 1e-4, "{name} Q drift at t = {t}: {d1}, {d2}");
            worst[3] = worst[3].max(d1);
            worst[4] = worst[4].max(d2);
        }
    }

    let bad = shipped("s2-elliptic-corrupted").unwrap();
    let inv = verify_involution(&bad, 100, &mut r).unwrap();
    let ((i, j), at) = inv.witness.ok_or("corrupted system has no witness")?;
    let again = poisson_bracket(&bad.constant_polynomial(i), &bad.constant_polynomial(j), &at, DEFAULT_STEP).unwrap();
    ensure!(again.abs() > 1e-3, "corrupted witness bracket {again}");

    let nc = benenti_check(&s2_noncommuting_candidate(), 20, &mut r).unwrap();
    ensure!(!nc.involution.pass && nc.involution.offending_pair == Some((0, 1)), "noncommuting control");
    let mm = benenti_check(&s2_missing_metric_candidate(), 20, &mut r).unwrap();
    ensure!(mm.involution.pass && !mm.metric.pass, "missing-metric control");
    ensure!(benenti_check(&s2_rotation_candidate(), 20, &mut r).unwrap().pass, "S2 rotation candidate rejected");
    Ok(format!(
        "involution {:.1e}, HJ {:.1e}, constants {:.1e}, Q1 - t {:.1e}, Q2 {:.1e}; controls rejected with witnesses",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    ))
}

// 7 -------------------------------------------------------------------------

fn cp2_structure() -> Verdict {
    let mut r = rng(107);
    let (chart, vs) = cp2_torus();
    let mut region = vec![vec![0.4, 0.0, 0.3, 0.0]];
    region.extend((0..5).map(|_| chart.random_point(&mut r)));
    let sm = assemble_block_metric(&chart, &vs, &region).map_err(|e| format!("{e:?}"))?;
    ensure!(sm.r == 2, "r = {}", sm.r);
    let slice = vec![vec![0.0, 0.0], vec![0.12, -0.07], vec![-0.05, 0.1]];
    let translates: Vec<Vec<f64>> = (0..6).map(|_| vec![r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)]).collect();
    let defect = sm.translation_defect(&slice, &translates).map_err(|e| e.to_string())?;
    ensure!(defect < 1e-8, "g-block changes by {defect}");
    let rep = benenti_check(&cp2_cartan_candidate(), 10, &mut r).map_err(|e| e.to_string())?;
    ensure!(rep.pass, "benenti_check rejects the candidate: {rep:?}");
    Ok(format!("r = {}, t-dependence {defect:.1e}, candidate accepted", sm.r))
}

// 8 -------------------------------------------------------------------------

fn haantjes() -> Verdict {
    let chart = Chart::euclidean(3);
    let mut r = rng(108);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let x = chart.random_point(&mut r);
        worst = worst.max(haantjes_torsion(&coordinate_diagonal_field(3), &chart, &x, DEFAULT_STEP).unwrap().max_abs());
    }
    ensure!(worst < 1e-6, "diagonal field torsion {worst}");
    let at = [0.2, -0.1, 0.4];
    let h = haantjes_torsion(&rotating_frame_field(), &chart, &at, DEFAULT_STEP).unwrap().max_abs();
    ensure!(h > 1e-2, "counterexample torsion only {h}");
    Ok(format!("diagonal {worst:.1e}, counterexample {h:.3} at {at:?}"))
}

// 9 -------------------------------------------------------------------------

fn cli() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_symsep");
    let args = ["verify", "all", "--seed", "42", "--format", "json"];
    let a = Command::new(bin).args(args).env_remove("SYMSEP_OUT_DIR").output().map_err(|e| e.to_string())?;
    let b = Command::new(bin).args(args).env_remove("SYMSEP_OUT_DIR").output().map_err(|e| e.to_string())?;
    ensure!(a.status.code() == Some(0), "default run exit {:?}", a.status.code());
    ensure!(a.stdout == b.stdout && !a.stdout.is_empty(), "reports differ");

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut checked = 0;
    for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_none_or(|e| e != "args") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let mut expect = None;
        let mut argv = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(v) = line.strip_prefix("# expect-exit:") {
                expect = v.trim().parse::<i32>().ok();
            } else if !line.starts_with('#') {
                argv.push(line);
            }
        }
        let out = Command::new(bin).args(&argv).env_remove("SYMSEP_OUT_DIR").output().map_err(|e| e.to_string())?;
        ensure!(out.status.code() == expect, "{}: exit {:?}, expected {expect:?}", path.display(), out.status.code());
        checked += 1;
    }
    ensure!(checked >= 2, "only {checked} fixtures");
    Ok(format!("byte-identical JSON ({} bytes); {checked} fixtures honor exit codes", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("exact algebra suite", exact_algebra),
        ("curvature suite", curvature_suite),
        ("nonexistence reproductions", nonexistence),
        ("rank and dimension counts", centralizers),
        ("mechanics suite", mechanics),
        ("Staeckel suite", stackel_suite),
        ("CP2 structure at desk scale", cp2_structure),
        ("Haantjes torsion", haantjes),
        ("CLI determinism and exit codes", cli),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
