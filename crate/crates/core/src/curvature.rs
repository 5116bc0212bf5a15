//! Pointwise curvature tensors of the rank-one symmetric spaces at a base
//! point, Lie triple systems, diagonal-frame obstructions and the octonionic
//! witness searches.
//!
//! Convention: `R(X,Y)Z = <Y,Z>X - <X,Z>Y` on the unit sphere, so the
//! sectional curvature of `span{X,Y}` is `<R(X,Y)Y,X> / |X ^ Y|^2`. Compact
//! models have sectional curvature in `[1,4]`, noncompact ones in `[-4,-1]`.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::division::{oct_mul, Octonion, MUL_TABLE};
use crate::exact::{dot, half, qi, random_rational, span_rank, RatMatrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurvatureError {
    #[error("vector has length {got}, model dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {dim} is not valid for the {family:?} family")]
    InvalidDimension { family: Family, dim: usize },
    #[error("sign must be +1 or -1")]
    InvalidSign,
    #[error("frame is not orthonormal: <e{0}, e{1}> is wrong")]
    NotOrthonormal(usize, usize),
    #[error("frame has {got} vectors, expected {expected}")]
    IncompleteFrame { expected: usize, got: usize },
    #[error("octonion argument must be orthogonal to 1")]
    NotImaginary,
    #[error("octonion argument must be nonzero")]
    ZeroOctonion,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("operation needs the octonionic family")]
    NotOctonionic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Real,
    Complex,
    Quaternionic,
    Octonionic,
}

/// A rank-one symmetric space, seen through its tangent space at the base
/// point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceModel {
    family: Family,
    sign: i8,
    dim: usize,
}

impl SpaceModel {
    pub fn new(family: Family, sign: i8, real_dimension: usize) -> Result<Self, CurvatureError> {
        if sign != 1 && sign != -1 {
            return Err(CurvatureError::InvalidSign);
        }
        let ok = match family {
            Family::Real => real_dimension >= 2,
            Family::Complex => real_dimension >= 2 && real_dimension % 2 == 0,
            Family::Quaternionic => real_dimension >= 4 && real_dimension % 4 == 0,
            Family::Octonionic => real_dimension == 16,
        };
        if !ok {
            return Err(CurvatureError::InvalidDimension {
                family,
                dim: real_dimension,
            });
        }
        Ok(Self {
            family,
            sign,
            dim: real_dimension,
        })
    }

    /// `S^n`.
    pub fn sphere(n: usize) -> Self {
        Self::new(Family::Real, 1, n).expect("n >= 2")
    }

    /// `H^n`.
    pub fn real_hyperbolic(n: usize) -> Self {
        Self::new(Family::Real, -1, n).expect("n >= 2")
    }

    /// `CP^n`, real dimension `2n`.
    pub fn complex_projective(n: usize) -> Self {
        Self::new(Family::Complex, 1, 2 * n).expect("n >= 1")
    }

    pub fn complex_hyperbolic(n: usize) -> Self {
        Self::new(Family::Complex, -1, 2 * n).expect("n >= 1")
    }

    /// `HP^n`, real dimension `4n`.
    pub fn quaternionic_projective(n: usize) -> Self {
        Self::new(Family::Quaternionic, 1, 4 * n).expect("n >= 1")
    }

    pub fn quaternionic_hyperbolic(n: usize) -> Self {
        Self::new(Family::Quaternionic, -1, 4 * n).expect("n >= 1")
    }

    pub fn octonionic_plane() -> Self {
        Self::new(Family::Octonionic, 1, 16).expect("fixed dimension")
    }

    pub fn octonionic_hyperbolic() -> Self {
        Self::new(Family::Octonionic, -1, 16).expect("fixed dimension")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> String {
        let compact = self.sign > 0;
        match self.family {
            Family::Real if compact => format!("S^{}", self.dim),
            Family::Real => format!("H^{}", self.dim),
            Family::Complex if compact => format!("CP^{}", self.dim / 2),
            Family::Complex => format!("CH^{}", self.dim / 2),
            Family::Quaternionic if compact => format!("HP^{}", self.dim / 4),
            Family::Quaternionic => format!("HH^{}", self.dim / 4),
            Family::Octonionic if compact => "OP^2".to_string(),
            Family::Octonionic => "OH^2".to_string(),
        }
    }

    fn check(&self, v: &TangentVector) -> Result<(), CurvatureError> {
        if v.0.len() != self.dim {
            return Err(CurvatureError::DimensionMismatch {
                expected: self.dim,
                got: v.0.len(),
            });
        }
        Ok(())
    }
}

/// Tangent vector at the base point with exact coordinates.
///
/// Complex family: coordinates come in (re, im) pairs. Quaternionic: blocks
/// of four along `1, i, j, k`. Octonionic: `(x1, x2)` with `x1` the first
/// eight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TangentVector(pub Vec<Rational>);

impl TangentVector {
    pub fn zero(n: usize) -> Self {
        Self(vec![Rational::zero(); n])
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[k] = Rational::one();
        v
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self(c.iter().map(|&x| qi(x)).collect())
    }

    pub fn from_octonions(x1: &Octonion, x2: &Octonion) -> Self {
        let mut c = x1.coeffs().to_vec();
        c.extend(x2.coeffs().iter().cloned());
        Self(c)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        Self((0..n).map(|_| random_rational(rng, 9, 5)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// `(x1, x2)` for 16-dimensional vectors.
    pub fn octonion_pair(&self) -> (Octonion, Octonion) {
        assert_eq!(self.0.len(), 16);
        (Octonion::from_slice(&self.0[..8]), Octonion::from_slice(&self.0[8..]))
    }

    pub fn inner(&self, other: &Self) -> Rational {
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> Rational {
        self.inner(self)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self(self.0.iter().map(|x| x * s).collect())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: &Rational, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// Complex structure on `C^n`: multiplication by `i` on (re, im) pairs.
pub fn complex_structure(v: &TangentVector) -> TangentVector {
    let mut out = TangentVector::zero(v.len());
    for k in 0..v.len() / 2 {
        out.0[2 * k] = -v.0[2 * k + 1].clone();
        out.0[2 * k + 1] = v.0[2 * k].clone();
    }
    out
}

/// Right multiplication by the quaternion unit `a` (1 = i, 2 = j, 3 = k) on
/// each block of four.
pub fn quaternionic_structure(a: usize, v: &TangentVector) -> TangentVector {
    assert!((1..=3).contains(&a));
    let mut out = TangentVector::zero(v.len());
    for b in 0..v.len() / 4 {
        for p in 0..4 {
            let c = &v.0[4 * b + p];
            if c.is_zero() {
                continue;
            }
            let (s, k) = MUL_TABLE[p][a];
            debug_assert!(k < 4);
            if s > 0 {
                out.0[4 * b + k] += c;
            } else {
                out.0[4 * b + k] -= c;
            }
        }
    }
    out
}

fn space_form_terms(x: &TangentVector, y: &TangentVector, z: &TangentVector) -> TangentVector {
    x.scale(&y.inner(z)).axpy(&-x.inner(z), y)
}

/// `<JY,Z>JX - <JX,Z>JY + 2<X,JY>JZ` for one complex structure `J`.
fn kahler_terms(
    j: impl Fn(&TangentVector) -> TangentVector,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> TangentVector {
    let (jx, jy, jz) = (j(x), j(y), j(z));
    jx.scale(&jy.inner(z))
        .axpy(&-jx.inner(z), &jy)
        .axpy(&(qi(2) * x.inner(&jy)), &jz)
}

/// The displayed octonionic formula, with its own argument order.
fn octonionic_raw(x: &TangentVector, y: &TangentVector, z: &TangentVector) -> TangentVector {
    let (x1, x2) = x.octonion_pair();
    let (y1, y2) = y.octonion_pair();
    let (z1, z2) = z.octonion_pair();
    let four = qi(4);
    let mixed = &oct_mul(&x1, &y2) - &oct_mul(&y1, &x2);

    let first = &(&(&(&y1.scale(&(&four * x1.inner(&z1)))
        - &x1.scale(&(&four * y1.inner(&z1))))
        - &oct_mul(&oct_mul(&z1, &y2), &x2.conj()))
        + &oct_mul(&oct_mul(&z1, &x2), &y2.conj()))
        - &oct_mul(&mixed, &z2.conj());
    let second = &(&(&(&y2.scale(&(&four * x2.inner(&z2)))
        - &x2.scale(&(&four * y2.inner(&z2))))
        - &oct_mul(&x1.conj(), &oct_mul(&y1, &z2)))
        + &oct_mul(&y1.conj(), &oct_mul(&x1, &z2)))
        + &oct_mul(&z1.conj(), &mixed);
    TangentVector::from_octonions(&first, &second)
}

/// `R(X,Y)Z`, linear in each slot.
pub fn curvature(
    model: &SpaceModel,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> Result<TangentVector, CurvatureError> {
    for v in [x, y, z] {
        model.check(v)?;
    }
    let r = match model.family {
        Family::Real => space_form_terms(x, y, z),
        Family::Complex => space_form_terms(x, y, z).add(&kahler_terms(complex_structure, x, y, z)),
        Family::Quaternionic => {
            let mut r = space_form_terms(x, y, z);
            for a in 1..=3 {
                r = r.add(&kahler_terms(|v| quaternionic_structure(a, v), x, y, z));
            }
            r
        }
        // The displayed formula has sectional curvature <R(X,Y)X,Y>; swapping
        // the first two slots brings it to this module's convention.
        Family::Octonionic => octonionic_raw(y, x, z),
    };
    Ok(if model.sign < 0 { r.scale(&qi(-1)) } else { r })
}

/// `<R(X,Y)Z, W>`.
pub fn curvature4(
    model: &SpaceModel,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
    w: &TangentVector,
) -> Result<Rational, CurvatureError> {
    model.check(w)?;
    Ok(curvature(model, x, y, z)?.inner(w))
}

/// Sectional curvature of `span{X, Y}`; `None` when the vectors are
/// parallel.
pub fn sectional_curvature(
    model: &SpaceModel,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<Option<Rational>, CurvatureError> {
    let area = x.norm_sq() * y.norm_sq() - x.inner(y) * x.inner(y);
    let num = curvature4(model, x, y, y, x)?;
    if area.is_zero() {
        return Ok(None);
    }
    Ok(Some(num / area))
}

/// Span of tangent vectors in one model; the basis is linearly independent.
#[derive(Clone, Debug)]
pub struct TangentSubspace {
    model: SpaceModel,
    basis: Vec<TangentVector>,
}

impl TangentSubspace {
    pub fn new(model: SpaceModel, basis: Vec<TangentVector>) -> Result<Self, CurvatureError> {
        for b in &basis {
            model.check(b)?;
        }
        let rows: Vec<Vec<Rational>> = basis.iter().map(|b| b.0.clone()).collect();
        if span_rank(&rows) != basis.len() {
            return Err(CurvatureError::DependentBasis);
        }
        Ok(Self { model, basis })
    }

    pub fn whole(model: SpaceModel) -> Self {
        let basis = (0..model.dim).map(|k| TangentVector::basis(model.dim, k)).collect();
        Self { model, basis }
    }

    pub fn model(&self) -> &SpaceModel {
        &self.model
    }

    pub fn basis(&self) -> &[TangentVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Component of `v` orthogonal to the subspace.
    pub fn orthogonal_part(&self, v: &TangentVector) -> TangentVector {
        if self.basis.is_empty() {
            return v.clone();
        }
        let gram: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|a| self.basis.iter().map(|b| a.inner(b)).collect())
            .collect();
        let rhs: Vec<Rational> = self.basis.iter().map(|a| a.inner(v)).collect();
        let coef = RatMatrix::from_rows(&gram)
            .solve(&rhs)
            .expect("Gram matrix of an independent basis is invertible");
        let mut out = v.clone();
        for (c, b) in coef.iter().zip(&self.basis) {
            out = out.axpy(&-c, b);
        }
        out
    }
}

/// A basis triple whose curvature leaves the subspace.
#[derive(Clone, Debug)]
pub struct TripleViolation {
    pub indices: (usize, usize, usize),
    pub off_component: TangentVector,
}

/// `None` when `R(a,b)c` stays in `S` for all basis triples, otherwise the
/// first violating triple.
pub fn is_lie_triple(s: &TangentSubspace) -> Result<Option<TripleViolation>, CurvatureError> {
    let n = s.dim();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let r = curvature(&s.model, &s.basis[i], &s.basis[j], &s.basis[k])?;
                let off = s.orthogonal_part(&r);
                if !off.is_zero() {
                    return Ok(Some(TripleViolation {
                        indices: (i, j, k),
                        off_component: off,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn check_orthonormal(model: &SpaceModel, frame: &[TangentVector]) -> Result<(), CurvatureError> {
    if frame.len() != model.dim {
        return Err(CurvatureError::IncompleteFrame {
            expected: model.dim,
            got: frame.len(),
        });
    }
    for v in frame {
        model.check(v)?;
    }
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate().skip(i) {
            let expected = if i == j { Rational::one() } else { Rational::zero() };
            if a.inner(b) != expected {
                return Err(CurvatureError::NotOrthonormal(i, j));
            }
        }
    }
    Ok(())
}

/// A nonzero frame component `R_ijkl` with pairwise distinct indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameViolation {
    pub indices: [usize; 4],
    pub value: Rational,
}

/// All `(i,j,k,l)` pairwise distinct with `R(e_i,e_j,e_k,e_l) != 0`.
pub fn diagonal_obstruction(
    model: &SpaceModel,
    frame: &[TangentVector],
) -> Result<Vec<FrameViolation>, CurvatureError> {
    check_orthonormal(model, frame)?;
    let n = frame.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let r = curvature(model, &frame[i], &frame[j], &frame[k])?;
                if r.is_zero() {
                    continue;
                }
                for (l, e) in frame.iter().enumerate() {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let value = r.inner(e);
                    if !value.is_zero() {
                        out.push(FrameViolation {
                            indices: [i, j, k, l],
                            value,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Standard basis of the model's tangent space.
pub fn standard_frame(model: &SpaceModel) -> Vec<TangentVector> {
    (0..model.dim).map(|k| TangentVector::basis(model.dim, k)).collect()
}

/// Columns of the Cayley transform `(I - A)(I + A)^{-1}` of a random
/// rational skew matrix `A`: an exactly orthonormal rational frame.
pub fn random_orthonormal_frame<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<TangentVector> {
    let mut a = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = random_rational(rng, 3, 4);
            a[(j, i)] = -v.clone();
            a[(i, j)] = v;
        }
    }
    let id = RatMatrix::identity(n);
    let mut minus = id.clone();
    let mut plus = id;
    for i in 0..n {
        for j in 0..n {
            minus[(i, j)] -= &a[(i, j)];
            plus[(i, j)] += &a[(i, j)];
        }
    }
    let q = minus.mul(&plus.inverse().expect("I + A is invertible for skew A"));
    (0..n)
        .map(|c| TangentVector((0..n).map(|r| q[(r, c)].clone()).collect()))
        .collect()
}

/// Rational point on the unit sphere `S^{n-1}` by inverse stereographic
/// projection of a random rational point of `R^{n-1}`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TangentVector {
    assert!(n >= 2);
    let t: Vec<Rational> = (0..n - 1).map(|_| random_rational(rng, 5, 4)).collect();
    let s = dot(&t, &t);
    let denom = &s + Rational::one();
    let mut v: Vec<Rational> = t.iter().map(|x| qi(2) * x / &denom).collect();
    v.push((&s - Rational::one()) / &denom);
    TangentVector(v)
}

/// `<y2 z2*, w1> + <2 y1 z2 - z1* y2, w2>`; requires `y1` orthogonal to 1.
pub fn octo_residual(
    y1: &Octonion,
    y2: &Octonion,
    z1: &Octonion,
    z2: &Octonion,
    w1: &Octonion,
    w2: &Octonion,
) -> Result<Rational, CurvatureError> {
    if !y1.is_imaginary() {
        return Err(CurvatureError::NotImaginary);
    }
    let a = oct_mul(y2, &z2.conj()).inner(w1);
    let b = (&oct_mul(y1, z2).scale(&qi(2)) - &oct_mul(&z1.conj(), y2)).inner(w2);
    Ok(a + b)
}

/// Which case split produced an octonionic witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OctoBranch {
    /// `y2 != 0`, `W = (w1, 0)`.
    W2Zero,
    /// `y2 = 0`, `Z = (0, z2)`, `W = (0, w2)`.
    Y2Zero,
    /// Found by the random fallback.
    Random,
}

#[derive(Clone, Debug)]
pub struct OctoWitness {
    pub z: TangentVector,
    pub w: TangentVector,
    pub residual: Rational,
    pub branch: OctoBranch,
}

/// Searches `Z, W` orthogonal to `e1 = (1,0)` and `e2 = (y1,y2)` with
/// nonzero `octo_residual`. Basis candidates (projected off `e1, e2`) come
/// first, then up to `budget` random rational pairs.
pub fn octo_witness<R: Rng + ?Sized>(
    y1: &Octonion,
    y2: &Octonion,
    budget: usize,
    rng: &mut R,
) -> Result<Option<OctoWitness>, CurvatureError> {
    if !y1.is_imaginary() {
        return Err(CurvatureError::NotImaginary);
    }
    let model = SpaceModel::octonionic_plane();
    let e1 = TangentVector::from_octonions(&Octonion::one(), &Octonion::zero());
    let e2 = TangentVector::from_octonions(y1, y2);
    if e2.is_zero() {
        return Err(CurvatureError::DependentBasis);
    }
    let frame = TangentSubspace::new(model, vec![e1, e2])?;
    let zero = Octonion::zero();

    let eval = |z: &TangentVector, w: &TangentVector| -> Result<Rational, CurvatureError> {
        let (z1, z2) = z.octonion_pair();
        let (w1, w2) = w.octonion_pair();
        octo_residual(y1, y2, &z1, &z2, &w1, &w2)
    };

    let (z_pool, w_pool, branch): (Vec<TangentVector>, Vec<TangentVector>, OctoBranch) =
        if !y2.is_zero() {
            let z = (0..8)
                .map(|k| frame.orthogonal_part(&TangentVector::from_octonions(&zero, &Octonion::basis(k))))
                .collect();
            let w = (0..8)
                .map(|k| frame.orthogonal_part(&TangentVector::from_octonions(&Octonion::basis(k), &zero)))
                .collect();
            (z, w, OctoBranch::W2Zero)
        } else {
            let pool: Vec<TangentVector> = (0..8)
                .map(|k| TangentVector::from_octonions(&zero, &Octonion::basis(k)))
                .collect();
            (pool.clone(), pool, OctoBranch::Y2Zero)
        };

    for z in &z_pool {
        if z.is_zero() {
            continue;
        }
        for w in &w_pool {
            if w.is_zero() {
                continue;
            }
            let residual = eval(z, w)?;
            if !residual.is_zero() {
                return Ok(Some(OctoWitness {
                    z: z.clone(),
                    w: w.clone(),
                    residual,
                    branch,
                }));
            }
        }
    }
    for _ in 0..budget {
        let z = frame.orthogonal_part(&TangentVector::random(rng, 16));
        let w = frame.orthogonal_part(&TangentVector::random(rng, 16));
        let residual = eval(&z, &w)?;
        if !residual.is_zero() {
            return Ok(Some(OctoWitness {
                z,
                w,
                residual,
                branch: OctoBranch::Random,
            }));
        }
    }
    Ok(None)
}

/// `1/2 za - <zu,a>u + <u,a>zu`; requires `z` nonzero and orthogonal to 1.
pub fn octo_final_identity_residual(
    u: &Octonion,
    z: &Octonion,
    a: &Octonion,
) -> Result<Octonion, CurvatureError> {
    if !z.is_imaginary() {
        return Err(CurvatureError::NotImaginary);
    }
    if z.is_zero() {
        return Err(CurvatureError::ZeroOctonion);
    }
    let zu = oct_mul(z, u);
    let out = &(&oct_mul(z, a).scale(&half()) - &u.scale(&zu.inner(a))) + &zu.scale(&u.inner(a));
    Ok(out)
}

/// Result of scanning the basis `a = e_0..e_7` in the final identity.
#[derive(Clone, Debug)]
pub struct FinalIdentityScan {
    /// First basis index with a nonzero residual and that residual.
    pub witness: Option<(usize, Octonion)>,
    /// Smallest squared residual norm over the basis.
    pub min_norm_sq: Rational,
}

pub fn final_identity_scan(u: &Octonion, z: &Octonion) -> Result<FinalIdentityScan, CurvatureError> {
    let mut witness = None;
    let mut min_norm_sq: Option<Rational> = None;
    for k in 0..8 {
        let r = octo_final_identity_residual(u, z, &Octonion::basis(k))?;
        let n = r.norm_sq();
        if witness.is_none() && !n.is_zero() {
            witness = Some((k, r));
        }
        min_norm_sq = Some(match min_norm_sq {
            Some(m) if m <= n => m,
            _ => n,
        });
    }
    Ok(FinalIdentityScan {
        witness,
        min_norm_sq: min_norm_sq.unwrap_or_default(),
    })
}

/// Largest absolute value among rationals, as used by residual reports.
pub fn max_abs_component(v: &TangentVector) -> Rational {
    v.0.iter().map(Signed::abs).fold(Rational::zero(), |a, b| if b > a { b } else { a })
}
