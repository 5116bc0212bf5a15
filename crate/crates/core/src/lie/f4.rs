//! The quadruple model `f4- = so(8) + O + O + O` and the triality maps.

use std::fmt;
use std::ops::{Add, Sub};
use std::sync::OnceLock;

use num_traits::Zero;
use rand::Rng;

use super::LieError;
use crate::division::{left_mul_matrix, right_mul_matrix, wedge, Octonion, So8Matrix};
use crate::exact::{half, qi, RatMatrix, Rational};

/// Real dimension of the model.
pub const F4_DIM: usize = 52;

/// `(A, u, v, w)` with `A` in `so(8)` and `u, v, w` octonions.
#[derive(Clone, PartialEq, Eq)]
pub struct F4Element {
    pub a: So8Matrix,
    pub u: Octonion,
    pub v: Octonion,
    pub w: Octonion,
}

impl F4Element {
    pub fn new(a: So8Matrix, u: Octonion, v: Octonion, w: Octonion) -> Result<Self, LieError> {
        if !a.is_skew() {
            return Err(LieError::NotSkew);
        }
        Ok(Self { a, u, v, w })
    }

    pub fn zero() -> Self {
        Self {
            a: So8Matrix::zero(),
            u: Octonion::zero(),
            v: Octonion::zero(),
            w: Octonion::zero(),
        }
    }

    pub fn from_so8(a: So8Matrix) -> Self {
        Self { a, ..Self::zero() }
    }

    pub fn from_u(u: Octonion) -> Self {
        Self { u, ..Self::zero() }
    }

    pub fn from_v(v: Octonion) -> Self {
        Self { v, ..Self::zero() }
    }

    pub fn from_w(w: Octonion) -> Self {
        Self { w, ..Self::zero() }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            a: So8Matrix::random_skew(rng),
            u: Octonion::random(rng),
            v: Octonion::random(rng),
            w: Octonion::random(rng),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.u.is_zero() && self.v.is_zero() && self.w.is_zero()
    }

    /// Coordinates: 28 skew entries, then `u`, `v`, `w`.
    pub fn coords(&self) -> Vec<Rational> {
        let mut c = self.a.skew_coords();
        for o in [&self.u, &self.v, &self.w] {
            c.extend(o.coeffs().iter().cloned());
        }
        c
    }

    pub fn from_coords(c: &[Rational]) -> Self {
        assert_eq!(c.len(), F4_DIM);
        Self {
            a: So8Matrix::from_skew_coords(&c[..28]),
            u: Octonion::from_slice(&c[28..36]),
            v: Octonion::from_slice(&c[36..44]),
            w: Octonion::from_slice(&c[44..52]),
        }
    }

    pub fn basis(k: usize) -> Self {
        let mut c = vec![Rational::zero(); F4_DIM];
        c[k] = qi(1);
        Self::from_coords(&c)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            a: self.a.scale(s),
            u: self.u.scale(s),
            v: self.v.scale(s),
            w: self.w.scale(s),
        }
    }
}

impl Add for &F4Element {
    type Output = F4Element;
    fn add(self, rhs: &F4Element) -> F4Element {
        F4Element {
            a: &self.a + &rhs.a,
            u: &self.u + &rhs.u,
            v: &self.v + &rhs.v,
            w: &self.w + &rhs.w,
        }
    }
}

impl Sub for &F4Element {
    type Output = F4Element;
    fn sub(self, rhs: &F4Element) -> F4Element {
        F4Element {
            a: &self.a - &rhs.a,
            u: &self.u - &rhs.u,
            v: &self.v - &rhs.v,
            w: &self.w - &rhs.w,
        }
    }
}

impl fmt::Debug for F4Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F4Element {{ A: {:?}, u: {}, v: {}, w: {} }}",
            self.a.skew_coords().iter().map(ToString::to_string).collect::<Vec<_>>(),
            self.u,
            self.v,
            self.w
        )
    }
}

#[derive(Clone, Copy)]
enum Triality {
    Left,
    Right,
}

/// Nonzero entries of the image of each generator `e_i ^ e_j` (`i < j`)
/// under one triality map.
type SparseImages = Vec<Vec<(usize, usize, Rational)>>;

fn generator_images(kind: Triality) -> &'static SparseImages {
    static LEFT: OnceLock<SparseImages> = OnceLock::new();
    static RIGHT: OnceLock<SparseImages> = OnceLock::new();
    let cell = match kind {
        Triality::Left => &LEFT,
        Triality::Right => &RIGHT,
    };
    cell.get_or_init(|| {
        let mut out = Vec::with_capacity(28);
        for i in 0..8 {
            for j in i + 1..8 {
                let (ei, ej) = (Octonion::basis(i), Octonion::basis(j));
                // e0 ^ ej = -(ej ^ e0), so the first slot is always imaginary.
                let img = if i == 0 {
                    -&triality_on_wedge(kind, &ej, &ei)
                } else {
                    triality_on_wedge(kind, &ei, &ej)
                };
                let mut entries = Vec::new();
                for r in 0..8 {
                    for c in 0..8 {
                        let v = img.entry(r, c);
                        if !v.is_zero() {
                            entries.push((r, c, v.clone()));
                        }
                    }
                }
                out.push(entries);
            }
        }
        out
    })
}

/// `1/2 L_{b*} L_{a*}` or `1/2 R_{b*} R_{a*}`; requires `a` orthogonal to 1.
fn triality_on_wedge(kind: Triality, a: &Octonion, b: &Octonion) -> So8Matrix {
    let (ma, mb) = match kind {
        Triality::Left => (left_mul_matrix(&a.conj()), left_mul_matrix(&b.conj())),
        Triality::Right => (right_mul_matrix(&a.conj()), right_mul_matrix(&b.conj())),
    };
    mb.compose(&ma).scale(&half())
}

fn apply_triality(kind: Triality, m: &So8Matrix) -> So8Matrix {
    let images = generator_images(kind);
    let mut out = RatMatrix::zeros(8, 8);
    for (c, img) in m.skew_coords().iter().zip(images) {
        if c.is_zero() {
            continue;
        }
        for (r, col, v) in img {
            out[(*r, *col)] += c * v;
        }
    }
    So8Matrix::from_matrix_unchecked(out)
}

/// The automorphism `lambda` of `so(8)`, linearly extended from
/// `lambda(a ^ b) = 1/2 L_{b*} L_{a*}` for `a` orthogonal to 1.
pub fn lambda_auto(m: &So8Matrix) -> Result<So8Matrix, LieError> {
    if !m.is_skew() {
        return Err(LieError::NotSkew);
    }
    Ok(apply_triality(Triality::Left, m))
}

/// The automorphism `lambda^2`, from `lambda^2(a ^ b) = 1/2 R_{b*} R_{a*}`.
pub fn lambda2_auto(m: &So8Matrix) -> Result<So8Matrix, LieError> {
    if !m.is_skew() {
        return Err(LieError::NotSkew);
    }
    Ok(apply_triality(Triality::Right, m))
}

/// The defining formula of `lambda` evaluated directly on `a ^ b`.
///
/// The result is skew (and equals `lambda_auto(a ^ b)`) only when `a` is
/// also orthogonal to `b`.
pub fn lambda_on_wedge(a: &Octonion, b: &Octonion) -> Result<So8Matrix, LieError> {
    if !a.is_imaginary() {
        return Err(LieError::NotImaginary);
    }
    Ok(triality_on_wedge(Triality::Left, a, b))
}

/// The defining formula of `lambda^2` evaluated directly on `a ^ b`.
pub fn lambda2_on_wedge(a: &Octonion, b: &Octonion) -> Result<So8Matrix, LieError> {
    if !a.is_imaginary() {
        return Err(LieError::NotImaginary);
    }
    Ok(triality_on_wedge(Triality::Right, a, b))
}

/// `[(A,u,v,w), (B,x,y,z)] = (C,r,s,t)` with
///
/// ```text
/// C = AB - BA - 4 u^x + 4 lambda^2(v^y) + 4 lambda(w^z)
/// r = Ax - Bu - (vz)* + (yw)*
/// s = lambda(A)y - lambda(B)v + (wx)* - (zu)*
/// t = lambda^2(A)z - lambda^2(B)w + (uy)* - (xv)*
/// ```
pub fn f4_bracket(x: &F4Element, y: &F4Element) -> F4Element {
    let (a, u, v, w) = (&x.a, &x.u, &x.v, &x.w);
    let (b, xx, yy, z) = (&y.a, &y.u, &y.v, &y.w);
    let four = qi(4);

    let lam_a = apply_triality(Triality::Left, a);
    let lam_b = apply_triality(Triality::Left, b);
    let lam2_a = apply_triality(Triality::Right, a);
    let lam2_b = apply_triality(Triality::Right, b);

    let mut c = a.commutator(b);
    c = &c - &wedge(u, xx).scale(&four);
    c = &c + &apply_triality(Triality::Right, &wedge(v, yy)).scale(&four);
    c = &c + &apply_triality(Triality::Left, &wedge(w, z)).scale(&four);

    let r = &(&(&a.apply(xx) - &b.apply(u)) - &(v * z).conj()) + &(yy * w).conj();
    let s = &(&(&lam_a.apply(yy) - &lam_b.apply(v)) + &(w * xx).conj()) - &(z * u).conj();
    let t = &(&(&lam2_a.apply(z) - &lam2_b.apply(w)) + &(u * yy).conj()) - &(xx * v).conj();

    F4Element { a: c, u: r, v: s, w: t }
}
