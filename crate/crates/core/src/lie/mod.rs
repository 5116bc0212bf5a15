//! Exact Lie algebras: `su(p,q)`, `so(p,q)` and the quadruple model of `f4-`.
//!
//! Every algebra carries a fixed real basis. Killing forms, adjoint ranks and
//! orthogonal complements are computed from structure constants in that
//! basis, which are cached per algebra behind a read-write lock.

pub mod f4;
pub mod matrix;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::exact::{dot, span_basis, span_rank, RatMatrix, Rational};
pub use f4::{f4_bracket, lambda2_auto, lambda_auto, F4Element, F4_DIM};
pub use matrix::{CMatrix, Gaussian, MatrixAlgebra, MatrixKind, MatrixLieElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("elements belong to different algebras: {0} and {1}")]
    MismatchedAlgebras(String, String),
    #[error("matrix is not an element of {0}")]
    NotInAlgebra(String),
    #[error("so(8) input is not skew-symmetric")]
    NotSkew,
    #[error("first wedge factor must be orthogonal to 1")]
    NotImaginary,
    #[error("basis elements are linearly dependent")]
    DependentBasis,
    #[error("Killing form restricted to the subspace is degenerate (radical dimension {0})")]
    DegenerateRestriction(usize),
}

/// Tag of an ambient algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    Matrix(MatrixAlgebra),
    F4,
}

impl Algebra {
    pub fn dim(&self) -> usize {
        match self {
            Algebra::Matrix(m) => m.dim(),
            Algebra::F4 => F4_DIM,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Algebra::Matrix(m) => m.name(),
            Algebra::F4 => "f4(-20)".to_string(),
        }
    }

    pub fn basis(&self, k: usize) -> LieElement {
        match self {
            Algebra::Matrix(m) => {
                LieElement::Matrix(MatrixLieElement::new_unchecked(*m, m.basis_matrix(k)))
            }
            Algebra::F4 => LieElement::F4(F4Element::basis(k)),
        }
    }

    pub fn from_coords(&self, c: &[Rational]) -> LieElement {
        match self {
            Algebra::Matrix(m) => {
                LieElement::Matrix(MatrixLieElement::new_unchecked(*m, m.from_coords(c)))
            }
            Algebra::F4 => LieElement::F4(F4Element::from_coords(c)),
        }
    }

    pub fn zero(&self) -> LieElement {
        self.from_coords(&vec![Rational::zero(); self.dim()])
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> LieElement {
        match self {
            Algebra::Matrix(m) => LieElement::Matrix(m.random(rng)),
            Algebra::F4 => LieElement::F4(F4Element::random(rng)),
        }
    }
}

/// Element of one of the modelled algebras.
#[derive(Clone, PartialEq, Eq)]
pub enum LieElement {
    Matrix(MatrixLieElement),
    F4(F4Element),
}

impl LieElement {
    pub fn algebra(&self) -> Algebra {
        match self {
            LieElement::Matrix(m) => Algebra::Matrix(m.algebra()),
            LieElement::F4(_) => Algebra::F4,
        }
    }

    pub fn coords(&self) -> Vec<Rational> {
        match self {
            LieElement::Matrix(m) => m.coords(),
            LieElement::F4(x) => x.coords(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let c: Vec<Rational> = self.coords().iter().map(|x| x * s).collect();
        self.algebra().from_coords(&c)
    }

    pub fn add(&self, other: &Self) -> Result<Self, LieError> {
        same_algebra(self, other)?;
        let c: Vec<Rational> = self
            .coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a + b)
            .collect();
        Ok(self.algebra().from_coords(&c))
    }

    pub fn as_matrix(&self) -> Option<&MatrixLieElement> {
        match self {
            LieElement::Matrix(m) => Some(m),
            LieElement::F4(_) => None,
        }
    }

    pub fn as_f4(&self) -> Option<&F4Element> {
        match self {
            LieElement::F4(x) => Some(x),
            LieElement::Matrix(_) => None,
        }
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieElement::Matrix(m) => write!(f, "{m:?}"),
            LieElement::F4(x) => write!(f, "{x:?}"),
        }
    }
}

impl From<F4Element> for LieElement {
    fn from(x: F4Element) -> Self {
        LieElement::F4(x)
    }
}

impl From<MatrixLieElement> for LieElement {
    fn from(x: MatrixLieElement) -> Self {
        LieElement::Matrix(x)
    }
}

fn same_algebra(x: &LieElement, y: &LieElement) -> Result<(), LieError> {
    if x.algebra() != y.algebra() {
        return Err(LieError::MismatchedAlgebras(x.algebra().name(), y.algebra().name()));
    }
    Ok(())
}

/// `[X, Y]`: matrix commutator, or the quadruple bracket of `f4-`.
pub fn bracket(x: &LieElement, y: &LieElement) -> Result<LieElement, LieError> {
    same_algebra(x, y)?;
    Ok(match (x, y) {
        (LieElement::Matrix(a), LieElement::Matrix(b)) => LieElement::Matrix(
            MatrixLieElement::new_unchecked(a.algebra(), a.entries().commutator(b.entries())),
        ),
        (LieElement::F4(a), LieElement::F4(b)) => LieElement::F4(f4_bracket(a, b)),
        _ => unreachable!("algebra tags already compared"),
    })
}

/// Adjoint matrices of the basis and the Killing Gram matrix of one algebra.
struct Structure {
    ad_basis: Vec<RatMatrix>,
    killing: RatMatrix,
}

fn structure(alg: Algebra) -> Arc<Structure> {
    static CACHE: OnceLock<RwLock<HashMap<Algebra, Arc<Structure>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(s) = cache.read().expect("structure cache poisoned").get(&alg) {
        return Arc::clone(s);
    }
    let built = Arc::new(build_structure(alg));
    let mut w = cache.write().expect("structure cache poisoned");
    Arc::clone(w.entry(alg).or_insert(built))
}

fn build_structure(alg: Algebra) -> Structure {
    let n = alg.dim();
    let basis: Vec<LieElement> = (0..n).map(|k| alg.basis(k)).collect();
    let ad_basis: Vec<RatMatrix> = basis
        .iter()
        .map(|b| {
            let mut m = RatMatrix::zeros(n, n);
            for (k, bk) in basis.iter().enumerate() {
                let col = bracket(b, bk).expect("same algebra").coords();
                for (i, c) in col.into_iter().enumerate() {
                    m[(i, k)] = c;
                }
            }
            m
        })
        .collect();
    let mut killing = RatMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = trace_of_product(&ad_basis[a], &ad_basis[b]);
            killing[(a, b)] = v.clone();
            killing[(b, a)] = v;
        }
    }
    Structure { ad_basis, killing }
}

fn trace_of_product(x: &RatMatrix, y: &RatMatrix) -> Rational {
    let n = x.rows();
    let mut acc = Rational::zero();
    for i in 0..n {
        for k in 0..n {
            let a = &x[(i, k)];
            if a.is_zero() {
                continue;
            }
            let b = &y[(k, i)];
            if !b.is_zero() {
                acc += a * b;
            }
        }
    }
    acc
}

/// Matrix of `ad_X` in the fixed basis.
pub fn adjoint_matrix(x: &LieElement) -> RatMatrix {
    let alg = x.algebra();
    let n = alg.dim();
    let s = structure(alg);
    let mut m = RatMatrix::zeros(n, n);
    for (c, ad) in x.coords().iter().zip(&s.ad_basis) {
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let e = &ad[(i, j)];
                if !e.is_zero() {
                    m[(i, j)] += c * e;
                }
            }
        }
    }
    m
}

/// `B(X, Y) = trace(ad_X ad_Y)`.
pub fn killing_form(x: &LieElement, y: &LieElement) -> Result<Rational, LieError> {
    same_algebra(x, y)?;
    let s = structure(x.algebra());
    let kx = s.killing.mul_vec(&x.coords());
    Ok(dot(&kx, &y.coords()))
}

/// Killing Gram matrix of the fixed basis.
pub fn killing_matrix(alg: Algebra) -> RatMatrix {
    structure(alg).killing.clone()
}

/// Dimension of `ker(ad_X)`.
pub fn centralizer_dimension(x: &LieElement) -> usize {
    let ad = adjoint_matrix(x);
    ad.cols() - ad.rank()
}

/// A linear span inside an ambient algebra, kept as an independent basis.
///
/// Closure under the bracket is not enforced; [`Subalgebra::is_closed`]
/// reports it.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    ambient: Algebra,
    basis: Vec<LieElement>,
}

impl Subalgebra {
    /// Rejects dependent or foreign basis elements.
    pub fn new(ambient: Algebra, basis: Vec<LieElement>) -> Result<Self, LieError> {
        for b in &basis {
            if b.algebra() != ambient {
                return Err(LieError::MismatchedAlgebras(ambient.name(), b.algebra().name()));
            }
        }
        let coords: Vec<Vec<Rational>> = basis.iter().map(LieElement::coords).collect();
        if span_rank(&coords) != basis.len() {
            return Err(LieError::DependentBasis);
        }
        Ok(Self { ambient, basis })
    }

    /// Span of arbitrary elements, reduced to an echelon basis.
    pub fn span(ambient: Algebra, elements: &[LieElement]) -> Result<Self, LieError> {
        for b in elements {
            if b.algebra() != ambient {
                return Err(LieError::MismatchedAlgebras(ambient.name(), b.algebra().name()));
            }
        }
        let coords: Vec<Vec<Rational>> = elements.iter().map(LieElement::coords).collect();
        let basis = span_basis(&coords)
            .iter()
            .map(|c| ambient.from_coords(c))
            .collect();
        Ok(Self { ambient, basis })
    }

    pub fn whole(ambient: Algebra) -> Self {
        let basis = (0..ambient.dim()).map(|k| ambient.basis(k)).collect();
        Self { ambient, basis }
    }

    pub fn zero(ambient: Algebra) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn ambient(&self) -> Algebra {
        self.ambient
    }

    pub fn basis(&self) -> &[LieElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, x: &LieElement) -> bool {
        if x.algebra() != self.ambient {
            return false;
        }
        let mut coords: Vec<Vec<Rational>> = self.basis.iter().map(LieElement::coords).collect();
        coords.push(x.coords());
        span_rank(&coords) == self.dim()
    }

    /// Same span as `other`.
    pub fn same_span(&self, other: &Subalgebra) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && other.basis.iter().all(|b| self.contains(b))
    }

    pub fn is_closed(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..]
                .iter()
                .all(|b| self.contains(&bracket(a, b).expect("same algebra")))
        })
    }
}

/// Outcome of an abelianness test.
#[derive(Clone, Debug)]
pub struct AbelianReport {
    pub abelian: bool,
    /// Indices of a non-commuting basis pair and their bracket.
    pub witness: Option<(usize, usize, LieElement)>,
}

/// True iff all pairwise brackets of basis elements vanish.
pub fn is_abelian(s: &Subalgebra) -> AbelianReport {
    for (i, a) in s.basis.iter().enumerate() {
        for (j, b) in s.basis.iter().enumerate().skip(i + 1) {
            let c = bracket(a, b).expect("same algebra");
            if !c.is_zero() {
                return AbelianReport {
                    abelian: false,
                    witness: Some((i, j, c)),
                };
            }
        }
    }
    AbelianReport {
        abelian: true,
        witness: None,
    }
}

/// `{Y in within : B(Y, s) = 0 for all s in S}`.
///
/// Fails when the Killing form restricted to `S` is degenerate.
pub fn orthogonal_complement(s: &Subalgebra, within: &Subalgebra) -> Result<Subalgebra, LieError> {
    if s.ambient != within.ambient {
        return Err(LieError::MismatchedAlgebras(s.ambient.name(), within.ambient.name()));
    }
    let alg = s.ambient;
    let st = structure(alg);
    let s_coords: Vec<Vec<Rational>> = s.basis.iter().map(LieElement::coords).collect();
    let ks: Vec<Vec<Rational>> = s_coords.iter().map(|c| st.killing.mul_vec(c)).collect();

    if !s.basis.is_empty() {
        let gram: Vec<Vec<Rational>> = ks
            .iter()
            .map(|k| s_coords.iter().map(|c| dot(k, c)).collect())
            .collect();
        let rank = RatMatrix::from_rows(&gram).rank();
        if rank < s.dim() {
            return Err(LieError::DegenerateRestriction(s.dim() - rank));
        }
    }

    let w_coords: Vec<Vec<Rational>> = within.basis.iter().map(LieElement::coords).collect();
    if ks.is_empty() {
        return Ok(within.clone());
    }
    // Rows: constraints indexed by s, columns: within basis.
    let constraints: Vec<Vec<Rational>> = ks
        .iter()
        .map(|k| w_coords.iter().map(|w| dot(k, w)).collect())
        .collect();
    let kernel = if w_coords.is_empty() {
        Vec::new()
    } else {
        RatMatrix::from_rows(&constraints).kernel()
    };
    let elements: Vec<LieElement> = kernel
        .iter()
        .map(|coef| {
            let mut c = vec![Rational::zero(); alg.dim()];
            for (a, w) in coef.iter().zip(&w_coords) {
                if a.is_zero() {
                    continue;
                }
                for (ci, wi) in c.iter_mut().zip(w) {
                    *ci += a * wi;
                }
            }
            alg.from_coords(&c)
        })
        .collect();
    Subalgebra::span(alg, &elements)
}
