use nalgebra::DMatrix;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Outcome, Residual};
use crate::curvature::{
    diagonal_obstruction, final_identity_scan, is_lie_triple, octo_final_identity_residual, octo_witness,
    random_unit_vector, standard_frame, OctoBranch, OctoWitness, SpaceModel, TangentSubspace, TangentVector,
};
use crate::division::Octonion;
use crate::exact::{half, q, qi, random_rational, to_f64, RatMatrix, Rational};
use crate::lie::f4::{f4_bracket, F4Element, F4_DIM};
use crate::lie::matrix::{gaussian, CMatrix, Gaussian, MatrixAlgebra};
use crate::lie::{centralizer_dimension, orthogonal_complement, Algebra, LieElement, Subalgebra};
use crate::mechanics::{hamiltonian_flow, poisson_bracket, PhasePoint, DEFAULT_STEP};
use crate::stackel::instances::{cp2_cartan_candidate, cp2_torus, shipped};
use crate::stackel::{
    assemble_block_metric, benenti_check, conjugate_coordinates, generating_w, hj_residual, stackel_constants,
    verify_involution, StackelError, StackelSystem,
};

fn exact_outcome(defects: usize, witnesses: Vec<String>) -> Outcome {
    Outcome {
        residual: if defects == 0 { Residual::ExactZero } else { Residual::Value(defects as f64) },
        witnesses,
        skipped: false,
    }
}

fn rats(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn tangent(v: &TangentVector) -> String {
    let (a, b) = v.octonion_pair();
    format!("({a}; {b})")
}

// ---------------------------------------------------------------------------
// octonion-diagonal

#[derive(Clone, Debug)]
pub enum DiagonalOutcome {
    Witness(OctoWitness),
    /// Not a valid frame pair with `e1 = (1, 0)`.
    Skipped(String),
    Missing,
}

/// Looks for `Z, W` orthogonal to `e1 = (1,0)` and `e2 = (y1, y2)` with a
/// nonzero frame component `R(e1, e2, Z, W)`.
pub fn octonion_diagonal_outcome<R: Rng + ?Sized>(y1: &Octonion, y2: &Octonion, rng: &mut R) -> DiagonalOutcome {
    let imaginary_part_zero = y1.coeffs()[1..].iter().all(Zero::is_zero);
    if y2.is_zero() && imaginary_part_zero {
        return DiagonalOutcome::Skipped("e2 is parallel to e1".into());
    }
    if !y1.is_imaginary() {
        return DiagonalOutcome::Skipped("e2 is not orthogonal to e1".into());
    }
    match octo_witness(y1, y2, 100, rng) {
        Ok(Some(w)) => DiagonalOutcome::Witness(w),
        Ok(None) => DiagonalOutcome::Missing,
        Err(e) => DiagonalOutcome::Skipped(e.to_string()),
    }
}

fn unit_imaginary<R: Rng + ?Sized>(rng: &mut R) -> Octonion {
    let v = random_unit_vector(rng, 7);
    let mut c = vec![Rational::zero()];
    c.extend(v.0);
    Octonion::from_slice(&c)
}

pub(super) fn octonion_diagonal(samples: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let zero = Octonion::zero();
    let mut frames: Vec<(String, Octonion, Octonion)> = vec![
        ("e2 = (e1, 0)".into(), Octonion::basis(1), zero.clone()),
        (
            "e2 = (3/5 e1, 4/5 e2)".into(),
            Octonion::basis(1).scale(&q(3, 5)),
            Octonion::basis(2).scale(&q(4, 5)),
        ),
    ];
    for k in 0..samples {
        // Every fourth sample lies in the y2 = 0 case.
        let (y1, y2) = if k % 4 == 3 {
            (unit_imaginary(rng), zero.clone())
        } else {
            let v = random_unit_vector(rng, 15);
            let mut c = vec![Rational::zero()];
            c.extend(v.0);
            TangentVector(c).octonion_pair()
        };
        frames.push((format!("sample {k}"), y1, y2));
    }

    let mut witnesses = Vec::new();
    let mut missing = 0;
    let mut skipped = 0;
    let mut counts = [0usize; 3];
    for (k, (label, y1, y2)) in frames.iter().enumerate() {
        match octonion_diagonal_outcome(y1, y2, rng) {
            DiagonalOutcome::Witness(w) => {
                counts[match w.branch {
                    OctoBranch::W2Zero => 0,
                    OctoBranch::Y2Zero => 1,
                    OctoBranch::Random => 2,
                }] += 1;
                if k < 2 {
                    witnesses.push(format!(
                        "{label}: branch {:?}, Z = {}, W = {}, residual {}",
                        w.branch,
                        tangent(&w.z),
                        tangent(&w.w),
                        w.residual
                    ));
                }
            }
            DiagonalOutcome::Skipped(msg) => {
                skipped += 1;
                witnesses.push(format!("{label}: skipped, {msg}"));
            }
            DiagonalOutcome::Missing => {
                missing += 1;
                witnesses.push(format!("{label}: no witness for e2 = ({y1}; {y2})"));
            }
        }
    }
    witnesses.push(format!(
        "{} frames: {} in branch w2 = 0, {} in branch y2 = 0, {} random, {skipped} skipped, {missing} without witness",
        frames.len(),
        counts[0],
        counts[1],
        counts[2]
    ));
    exact_outcome(missing + skipped, witnesses)
}

// ---------------------------------------------------------------------------
// f4

fn f4_elem(x: F4Element) -> LieElement {
    LieElement::F4(x)
}

fn so8_slot() -> Subalgebra {
    let basis = (0..28).map(|k| f4_elem(F4Element::basis(k))).collect();
    Subalgebra::new(Algebra::F4, basis).expect("coordinate basis")
}

pub(super) fn f4(samples: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut witnesses = Vec::new();
    let mut defects = 0;

    // (i) Jacobi identity on random triples.
    let mut jacobi_max = Rational::zero();
    for _ in 0..20 {
        let (x, y, z) = (F4Element::random(rng), F4Element::random(rng), F4Element::random(rng));
        let a = f4_bracket(&x, &f4_bracket(&y, &z));
        let b = f4_bracket(&y, &f4_bracket(&z, &x));
        let c = f4_bracket(&z, &f4_bracket(&x, &y));
        let sum = &(&a + &b) + &c;
        for v in sum.coords() {
            let v = num_traits::Signed::abs(&v);
            if v > jacobi_max {
                jacobi_max = v;
            }
        }
    }
    if !jacobi_max.is_zero() {
        defects += 1;
    }
    witnesses.push(format!("(i) Jacobi over 20 random triples: max |coordinate| = {jacobi_max}"));

    // (ii) [m, m] for m = {(0,0,v,0)}.
    let m: Vec<F4Element> = (0..8).map(|k| F4Element::from_v(Octonion::basis(k))).collect();
    let mut brackets = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            brackets.push(f4_elem(f4_bracket(&m[i], &m[j])));
        }
    }
    let mm = Subalgebra::span(Algebra::F4, &brackets).expect("f4 elements");
    let slot = so8_slot();
    let ii = mm.dim() == 28 && mm.same_span(&slot);
    if !ii {
        defects += 1;
    }
    witnesses.push(format!(
        "(ii) [m, m] has dimension {} and {} the so(8) slot",
        mm.dim(),
        if ii { "equals" } else { "differs from" }
    ));

    // (iii) Killing-orthogonal complement of [m, m], then no component in m.
    match orthogonal_complement(&mm, &Subalgebra::whole(Algebra::F4)) {
        Ok(perp) => {
            let rows: Vec<Vec<Rational>> = (36..44)
                .map(|c| perp.basis().iter().map(|b| b.coords()[c].clone()).collect())
                .collect();
            let combos = RatMatrix::from_rows(&rows).kernel();
            let cut: Vec<LieElement> = combos
                .iter()
                .map(|coef| {
                    let mut c = vec![Rational::zero(); F4_DIM];
                    for (a, b) in coef.iter().zip(perp.basis()) {
                        for (ck, bk) in c.iter_mut().zip(b.coords()) {
                            *ck += a * bk;
                        }
                    }
                    Algebra::F4.from_coords(&c)
                })
                .collect();
            let cut = Subalgebra::span(Algebra::F4, &cut).expect("f4 elements");
            let uw: Vec<LieElement> = (0..8)
                .flat_map(|k| {
                    [
                        f4_elem(F4Element::from_u(Octonion::basis(k))),
                        f4_elem(F4Element::from_w(Octonion::basis(k))),
                    ]
                })
                .collect();
            let want = Subalgebra::new(Algebra::F4, uw).expect("coordinate basis");
            let ok = cut.same_span(&want);
            if !ok {
                defects += 1;
            }
            witnesses.push(format!(
                "(iii) complement of [m, m] has dimension {}; with no m-component {} ({} {{(0,u,0,w)}})",
                perp.dim(),
                cut.dim(),
                if ok { "equals" } else { "differs from" }
            ));
        }
        Err(e) => {
            defects += 1;
            witnesses.push(format!("(iii) complement failed: {e}"));
        }
    }

    // (iv) the final identity has a nonzero basis witness for z = e1.
    let z = Octonion::basis(1);
    let mut without = 0;
    let mut smallest: Option<Rational> = None;
    for _ in 0..samples {
        let u = Octonion::random(rng);
        let scan = final_identity_scan(&u, &z).expect("z is imaginary and nonzero");
        if scan.witness.is_none() {
            without += 1;
            witnesses.push(format!("(iv) no basis witness for u = {u}"));
        }
        if smallest.as_ref().is_none_or(|s| scan.min_norm_sq < *s) {
            smallest = Some(scan.min_norm_sq);
        }
    }
    defects += without;
    let r = octo_final_identity_residual(&Octonion::zero(), &z, &Octonion::basis(2)).expect("valid z");
    if r != Octonion::basis(3).scale(&half()) {
        defects += 1;
    }
    witnesses.push(format!(
        "(iv) {samples} random u with z = e1: {} with a basis witness, smallest squared residual over a = e0..e7 is {}; u = 0, a = e2 gives {r}",
        samples - without,
        smallest.map_or_else(|| "n/a".to_string(), |s| format!("{:.6e}", to_f64(&s)))
    ));
    exact_outcome(defects, witnesses)
}

// ---------------------------------------------------------------------------
// cpn

const PARAMS: [&str; 6] = ["Re u", "Im u", "Re v", "Im v", "s", "q"];

fn i_times(x: &Rational) -> Gaussian {
    gaussian(Rational::zero(), x.clone())
}

fn re(x: &Rational) -> Gaussian {
    gaussian(x.clone(), Rational::zero())
}

/// The two matrices with parameters `(Re u, Im u, Re v, Im v, s, q)`.
pub(crate) fn cpn_pair(p: &[Rational; 6]) -> (CMatrix, CMatrix) {
    let [ur, ui, vr, vi, s, qq] = p;
    let zero = Gaussian::zero();
    let one = re(&qi(1));
    let u = gaussian(ur.clone(), ui.clone());
    let v = gaussian(vr.clone(), vi.clone());
    let a = CMatrix::from_rows(vec![
        vec![-i_times(s), u.clone(), zero.clone()],
        vec![-u.conj(), i_times(&(s * qi(2))), one.clone()],
        vec![zero.clone(), -one.clone(), -i_times(s)],
    ]);
    let b = CMatrix::from_rows(vec![
        vec![-i_times(qq), v.clone(), zero.clone()],
        vec![-v.conj(), i_times(&(qq * qi(2))), i_times(&qi(1))],
        vec![zero.clone(), i_times(&qi(1)), -i_times(qq)],
    ]);
    (a, b)
}

fn commutator_at(p: &[Rational; 6]) -> CMatrix {
    let (a, b) = cpn_pair(p);
    a.commutator(&b)
}

/// Coefficients of a polynomial of degree at most 2 in each of six
/// variables from its values on `{-1, 0, 1}^6`; index digits in base 3 are
/// the exponents.
fn interpolate(values: &[Rational]) -> Vec<Rational> {
    let mut c = values.to_vec();
    for axis in 0..6 {
        let stride = 3usize.pow(axis);
        for base in 0..729 {
            if (base / stride) % 3 != 0 {
                continue;
            }
            let (fm, f0, fp) = (c[base].clone(), c[base + stride].clone(), c[base + 2 * stride].clone());
            c[base] = f0.clone();
            c[base + stride] = (&fp - &fm) * half();
            c[base + 2 * stride] = (&fp + &fm) * half() - f0;
        }
    }
    c
}

fn eval_poly(coeffs: &[Rational], p: &[Rational; 6]) -> Rational {
    let mut total = Rational::zero();
    for (idx, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut term = c.clone();
        let mut rest = idx;
        for x in p {
            for _ in 0..rest % 3 {
                term *= x;
            }
            rest /= 3;
        }
        total += term;
    }
    total
}

fn grid_point(idx: usize) -> [Rational; 6] {
    std::array::from_fn(|k| qi((idx / 3usize.pow(k as u32) % 3) as i64 - 1))
}

fn poly_string(coeffs: &[Rational]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(idx, c)| {
            let mut mono = Vec::new();
            let mut rest = idx;
            for name in PARAMS {
                match rest % 3 {
                    1 => mono.push(format!("({name})")),
                    2 => mono.push(format!("({name})^2")),
                    _ => {}
                }
                rest /= 3;
            }
            if mono.is_empty() {
                c.to_string()
            } else {
                format!("{c}*{}", mono.join("*"))
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub(super) fn cpn(samples: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut witnesses = Vec::new();
    let mut defects = 0;

    let grid: Vec<CMatrix> = (0..729).map(|idx| commutator_at(&grid_point(idx))).collect();
    // polys[entry][part]: real and imaginary parts of entry (i, j), row-major.
    let polys: Vec<[Vec<Rational>; 2]> = (0..9)
        .map(|e| {
            let (i, j) = (e / 3, e % 3);
            let re_vals: Vec<Rational> = grid.iter().map(|m| m[(i, j)].re.clone()).collect();
            let im_vals: Vec<Rational> = grid.iter().map(|m| m[(i, j)].im.clone()).collect();
            [interpolate(&re_vals), interpolate(&im_vals)]
        })
        .collect();

    let constant = polys.iter().enumerate().find_map(|(e, parts)| {
        parts.iter().enumerate().find_map(|(part, c)| {
            (!c[0].is_zero() && c[1..].iter().all(Zero::is_zero)).then(|| (e, part, c[0].clone()))
        })
    });
    match &constant {
        Some((e, part, c)) => witnesses.push(format!(
            "certificate: constant; entry ({}, {}) of the commutator has {} part identically {c}",
            e / 3,
            e % 3,
            if *part == 0 { "real" } else { "imaginary" }
        )),
        None => {
            let all_nonzero = grid.iter().all(|m| !m.is_zero());
            if all_nonzero {
                witnesses.push("certificate: grid; no common zero of the entries on {-1,0,1}^6".into());
            } else {
                defects += 1;
                witnesses.push("no certificate: the commutator vanishes at a grid point".into());
            }
        }
    }
    for (e, parts) in polys.iter().enumerate() {
        if parts.iter().any(|c| c.iter().any(|x| !x.is_zero())) {
            witnesses.push(format!(
                "entry ({}, {}) = {} + i*({})",
                e / 3,
                e % 3,
                poly_string(&parts[0]),
                poly_string(&parts[1])
            ));
        }
    }
    let origin = commutator_at(&std::array::from_fn(|_| Rational::zero()));
    witnesses.push(format!(
        "at u = v = s = q = 0: entry (1, 2) = {} + {}i, entry (2, 2) = {} + {}i",
        origin[(1, 2)].re,
        origin[(1, 2)].im,
        origin[(2, 2)].re,
        origin[(2, 2)].im
    ));

    let su3 = MatrixAlgebra::su(3);
    let mut vanishing = 0;
    let mut mismatched = 0;
    let mut outside = 0;
    for _ in 0..samples {
        let p: [Rational; 6] = std::array::from_fn(|_| random_rational(rng, 5, 7));
        let (a, b) = cpn_pair(&p);
        if !su3.contains(&a) || !su3.contains(&b) {
            outside += 1;
        }
        let c = a.commutator(&b);
        if c.is_zero() {
            vanishing += 1;
            witnesses.push(format!("commutator vanishes at {}", rats(&p)));
        }
        // Off-grid points confirm the interpolated polynomials.
        for (e, parts) in polys.iter().enumerate() {
            let z = &c[(e / 3, e % 3)];
            if eval_poly(&parts[0], &p) != z.re || eval_poly(&parts[1], &p) != z.im {
                mismatched += 1;
                witnesses.push(format!("interpolation mismatch at {} entry {e}", rats(&p)));
                break;
            }
        }
    }
    defects += vanishing + mismatched + outside;
    witnesses.push(format!(
        "{samples} random rational tuples: {} with nonzero commutator, {} outside su(3), {mismatched} interpolation mismatches",
        samples - vanishing,
        outside
    ));
    exact_outcome(defects, witnesses)
}

// ---------------------------------------------------------------------------
// lie-triple-dims

pub(super) fn lie_triple_dims(samples: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut witnesses = Vec::new();
    let mut defects = 0;

    let plane = SpaceModel::octonionic_plane();
    for (label, range) in [("{(v,0)}", 0..8), ("{(0,w)}", 8..16)] {
        let basis = range.map(|k| TangentVector::basis(16, k)).collect();
        let s = TangentSubspace::new(plane, basis).expect("coordinate subspace");
        match is_lie_triple(&s) {
            Ok(None) => witnesses.push(format!("(i) {label} is a Lie triple system")),
            Ok(Some(v)) => {
                defects += 1;
                witnesses.push(format!(
                    "(i) {label} fails at basis triple {:?}: off component {}",
                    v.indices,
                    tangent(&v.off_component)
                ));
            }
            Err(e) => {
                defects += 1;
                witnesses.push(format!("(i) {label}: {e}"));
            }
        }
    }

    for (alg, want) in [
        (Algebra::Matrix(MatrixAlgebra::su(3)), 2),
        (Algebra::Matrix(MatrixAlgebra::su(4)), 3),
        (Algebra::F4, 4),
    ] {
        let dims: Vec<usize> = (0..samples).map(|_| centralizer_dimension(&alg.random(rng))).collect();
        let generic = dims.iter().copied().min().unwrap_or(0);
        let off = dims.iter().filter(|&&d| d != want).count();
        defects += off;
        witnesses.push(format!(
            "(ii) {}: generic centralizer dimension {generic} (expected {want}) at {samples} random points, {off} deviating",
            alg.name()
        ));
    }

    let models = [
        (SpaceModel::sphere(4), false),
        (SpaceModel::real_hyperbolic(3), false),
        (SpaceModel::complex_projective(2), true),
        (SpaceModel::complex_hyperbolic(2), true),
        (SpaceModel::quaternionic_projective(2), true),
        (SpaceModel::octonionic_plane(), true),
    ];
    for (model, expect_violation) in models {
        match diagonal_obstruction(&model, &standard_frame(&model)) {
            Ok(v) => {
                if v.is_empty() == expect_violation {
                    defects += 1;
                }
                let first = v
                    .first()
                    .map(|f| format!(", first R{:?} = {}", f.indices, f.value))
                    .unwrap_or_default();
                witnesses.push(format!(
                    "(iii) {}: {} off-diagonal frame components{first}",
                    model.name(),
                    v.len()
                ));
            }
            Err(e) => {
                defects += 1;
                witnesses.push(format!("(iii) {}: {e}", model.name()));
            }
        }
    }
    exact_outcome(defects, witnesses)
}

// ---------------------------------------------------------------------------
// demo-separation

/// Residuals normalized by their thresholds.
#[derive(Default)]
struct Ratios {
    worst: f64,
    witnesses: Vec<String>,
}

impl Ratios {
    fn record(&mut self, name: &str, value: f64, threshold: f64) {
        let ratio = if value.is_nan() { f64::INFINITY } else { value / threshold };
        self.worst = self.worst.max(ratio);
        self.witnesses
            .push(format!("{name}: {} (threshold {})", super::float(value), super::float(threshold)));
    }

    fn fail(&mut self, msg: String) {
        self.worst = f64::INFINITY;
        self.witnesses.push(msg);
    }

    fn note(&mut self, msg: String) {
        self.witnesses.push(msg);
    }
}

fn branch(p: &[f64]) -> Vec<i8> {
    p.iter().map(|v| if *v < 0.0 { -1 } else { 1 }).collect()
}

fn stackel_pipeline(name: &str, samples: usize, rng: &mut ChaCha8Rng, out: &mut Ratios) -> Result<(), StackelError> {
    let sys = shipped(name)?;
    let inv = verify_involution(&sys, samples, rng)?;
    out.record(&format!("{name} involution"), inv.max_residual, 1e-6);

    let chart = sys.chart();
    let mut worst_hj: f64 = 0.0;
    let mut admissible = 0;
    let mut attempts = 0;
    while admissible < samples && attempts < 40 * samples {
        attempts += 1;
        let at = sys.random_phase_point(rng);
        let c: Vec<f64> = stackel_constants(&sys, &at)?.iter().copied().collect();
        let w = match generating_w(&sys, &c, &at.x, &branch(&at.p)) {
            Ok(w) => w,
            Err(StackelError::NegativeRadicand { .. }) => continue,
            Err(e) => return Err(e),
        };
        admissible += 1;
        worst_hj = worst_hj.max(hj_residual(&chart, &w.gradient, c[0], &at.x)?);
    }
    if admissible < samples {
        out.fail(format!("{name}: only {admissible} admissible samples in {attempts} attempts"));
    }
    out.record(&format!("{name} Hamilton-Jacobi residual"), worst_hj, 1e-6);

    // A slow start at the base point stays clear of turning points.
    let start = PhasePoint::new(sys.base().to_vec(), vec![0.004, 0.001]);
    let h = sys.constant_polynomial(0);
    let tr = hamiltonian_flow(&h, &start, 10.0, 1e-3, DEFAULT_STEP)?;
    let c0 = stackel_constants(&sys, &start)?;
    let drift = (stackel_constants(&sys, tr.last())? - &c0).amax();
    out.record(&format!("{name} constants drift over T = 10"), drift, 1e-5);

    let sys: StackelSystem = sys.with_base(start.x.clone())?;
    let c: Vec<f64> = c0.iter().copied().collect();
    let b0 = branch(&start.p);
    let mut ts = Vec::new();
    let mut q1 = Vec::new();
    let mut q2 = Vec::new();
    for (t, z) in tr.times.iter().zip(&tr.points).step_by(500) {
        if branch(&z.p) != b0 {
            out.fail(format!("{name}: turning point before t = {t}"));
            return Ok(());
        }
        let qs = conjugate_coordinates(&sys, &c, &z.x, &b0)?;
        ts.push(*t);
        q1.push(qs[0]);
        q2.push(qs[1]);
    }
    let n = ts.len() as f64;
    let (mt, mq) = (ts.iter().sum::<f64>() / n, q1.iter().sum::<f64>() / n);
    let slope = ts.iter().zip(&q1).map(|(t, q)| (t - mt) * (q - mq)).sum::<f64>()
        / ts.iter().map(|t| (t - mt).powi(2)).sum::<f64>();
    out.record(&format!("{name} |Q1 slope - 1|"), (slope - 1.0).abs(), 1e-4);
    let lin = ts.iter().zip(&q1).map(|(t, q)| (q - q1[0] - t).abs()).fold(0.0, f64::max);
    out.record(&format!("{name} Q1 deviation from Q1(0) + t"), lin, 1e-4);
    let flat = q2.iter().map(|q| (q - q2[0]).abs()).fold(0.0, f64::max);
    out.record(&format!("{name} Q2 drift"), flat, 1e-4);
    Ok(())
}

fn negative_control(samples: usize, rng: &mut ChaCha8Rng, out: &mut Ratios) -> Result<(), StackelError> {
    let bad = shipped("s2-elliptic-corrupted")?;
    let rep = verify_involution(&bad, samples, rng)?;
    match rep.witness {
        Some(((i, j), at)) if rep.max_residual > 1e-3 => out.note(format!(
            "negative control s2-elliptic-corrupted: bracket of c{} and c{} is {} at x = {:?}, p = {:?}",
            i + 1,
            j + 1,
            super::float(rep.max_residual),
            at.x,
            at.p
        )),
        _ => out.fail(format!(
            "negative control s2-elliptic-corrupted not detected: max bracket {}",
            super::float(rep.max_residual)
        )),
    }
    Ok(())
}

fn cp2_pipeline(samples: usize, rng: &mut ChaCha8Rng, out: &mut Ratios) {
    let (chart, vs) = cp2_torus();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let at = chart.random_phase_point(rng);
        match poisson_bracket(&vs[0], &vs[1], &at, DEFAULT_STEP) {
            Ok(v) => worst = worst.max(v.abs()),
            Err(e) => return out.fail(format!("CP2 torus bracket: {e}")),
        }
    }
    out.record("CP2 torus momentum-map bracket", worst, 1e-8);

    let mut region = vec![vec![0.4, 0.0, 0.3, 0.0]];
    region.extend((0..5).map(|_| chart.random_point(rng)));
    let sm = match assemble_block_metric(&chart, &vs, &region) {
        Ok(sm) => sm,
        Err(e) => return out.fail(format!("CP2 block metric assembly failed: {e:?}")),
    };
    if sm.r == 2 {
        out.note(format!("CP2 ignorable directions: r = {} of n = {}", sm.r, (sm.m + sm.r) / 2));
    } else {
        out.fail(format!("CP2 ignorable directions: r = {}, expected 2", sm.r));
    }
    out.record("CP2 Frobenius defect", sm.frobenius_defect, 1e-6);
    let slice = vec![vec![0.0, 0.0], vec![0.1, -0.05], vec![-0.08, 0.12]];
    let translates: Vec<Vec<f64>> = (0..4)
        .map(|_| vec![rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)])
        .collect();
    match sm.translation_defect(&slice, &translates) {
        Ok(d) => out.record("CP2 g-block change under torus translation", d, 1e-8),
        Err(e) => out.fail(format!("CP2 translation defect: {e}")),
    }
    let fmt = |m: &DMatrix<f64>| {
        let rows: Vec<String> = m
            .row_iter()
            .map(|r| r.iter().map(|v| super::float(*v)).collect::<Vec<_>>().join(", "))
            .collect();
        format!("[[{}]]", rows.join("], ["))
    };
    if let (Ok(g), Ok(hb)) = (sm.g_block(&[0.0, 0.0]), sm.h_block(&[0.0, 0.0])) {
        out.note(format!("CP2 blocks at the slice centre: g = {}, h = {}", fmt(&g), fmt(&hb)));
    }

    match benenti_check(&cp2_cartan_candidate(), samples, rng) {
        Ok(rep) if rep.pass => out.record("CP2 candidate involution", rep.involution.max_bracket, 1e-6),
        Ok(rep) => out.fail(format!(
            "CP2 candidate rejected: involution {}, metric {}, eigenframe {}",
            rep.involution.pass, rep.metric.pass, rep.eigenframe.pass
        )),
        Err(e) => out.fail(format!("CP2 candidate: {e}")),
    }
}

pub(super) fn demo_separation(samples: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut out = Ratios::default();
    for name in ["s2-elliptic", "h2-elliptic"] {
        if let Err(e) = stackel_pipeline(name, samples, rng, &mut out) {
            out.fail(format!("{name}: {e}"));
        }
    }
    if let Err(e) = negative_control(samples, rng, &mut out) {
        out.fail(format!("negative control: {e}"));
    }
    cp2_pipeline(samples, rng, &mut out);
    Outcome {
        residual: Residual::Value(out.worst),
        witnesses: out.witnesses,
        skipped: false,
    }
}
