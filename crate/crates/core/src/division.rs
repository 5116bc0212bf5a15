//! Exact octonions and the 8x8 operators built from them.
//!
//! The complex numbers and quaternions are the subalgebras spanned by
//! `{e0, e1}` and `{e0, e1, e2, e3}`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::exact::{q, random_rational, RatMatrix, Rational};

/// `MUL_TABLE[i][j] = (sign, k)` means `e_i e_j = sign * e_k`.
///
/// Cayley-Dickson doubling of the quaternions with basis
/// `(1, i, j, k, l, il, jl, kl)` and `(a, b)(c, d) = (ac - d*b, da + bc*)`.
pub const MUL_TABLE: [[(i8, usize); 8]; 8] = [
    [(1, 0), (1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2), (1, 5), (-1, 4), (-1, 7), (1, 6)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1), (1, 6), (1, 7), (-1, 4), (-1, 5)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0), (1, 7), (-1, 6), (1, 5), (-1, 4)],
    [(1, 4), (-1, 5), (-1, 6), (-1, 7), (-1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 5), (1, 4), (-1, 7), (1, 6), (-1, 1), (-1, 0), (-1, 3), (1, 2)],
    [(1, 6), (1, 7), (1, 4), (-1, 5), (-1, 2), (1, 3), (-1, 0), (-1, 1)],
    [(1, 7), (-1, 6), (1, 5), (1, 4), (-1, 3), (-1, 2), (1, 1), (-1, 0)],
];

/// An octonion with exact rational coefficients in the basis `e0 .. e7`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Octonion {
    coeffs: [Rational; 8],
}

impl Octonion {
    pub fn new(coeffs: [Rational; 8]) -> Self {
        Self { coeffs }
    }

    pub fn from_ints(c: [i64; 8]) -> Self {
        Self::new(c.map(|n| q(n, 1)))
    }

    pub fn from_slice(c: &[Rational]) -> Self {
        assert_eq!(c.len(), 8, "octonion needs 8 coefficients");
        Self::new(std::array::from_fn(|i| c[i].clone()))
    }

    pub fn zero() -> Self {
        Self::new(std::array::from_fn(|_| Rational::zero()))
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    /// The basis element `e_k`.
    pub fn basis(k: usize) -> Self {
        let mut o = Self::zero();
        o.coeffs[k] = Rational::one();
        o
    }

    pub fn real(r: Rational) -> Self {
        let mut o = Self::zero();
        o.coeffs[0] = r;
        o
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(std::array::from_fn(|_| random_rational(rng, 9, 4)))
    }

    /// Random octonion orthogonal to `e0`.
    pub fn random_imaginary<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut o = Self::random(rng);
        o.coeffs[0] = Rational::zero();
        o
    }

    pub fn coeffs(&self) -> &[Rational; 8] {
        &self.coeffs
    }

    pub fn re(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// True when the octonion is orthogonal to `e0`.
    pub fn is_imaginary(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    pub fn conj(&self) -> Self {
        let mut c = self.clone();
        for x in c.coeffs.iter_mut().skip(1) {
            *x = -x.clone();
        }
        c
    }

    /// `<u, u>`.
    pub fn norm_sq(&self) -> Rational {
        self.coeffs.iter().map(|x| x * x).sum()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(std::array::from_fn(|i| &self.coeffs[i] * s))
    }

    /// `<u, v> = Re(u v*)`.
    pub fn inner(&self, other: &Self) -> Rational {
        oct_inner(self, other)
    }

    /// Inverse `u* / <u, u>`; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.norm_sq();
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&n.recip()))
    }
}

impl fmt::Debug for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| if k == 0 { format!("{c}") } else { format!("{c}*e{k}") })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Index<usize> for Octonion {
    type Output = Rational;
    fn index(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }
}

impl Add for &Octonion {
    type Output = Octonion;
    fn add(self, rhs: &Octonion) -> Octonion {
        Octonion::new(std::array::from_fn(|i| &self.coeffs[i] + &rhs.coeffs[i]))
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        &self + &rhs
    }
}

impl AddAssign<&Octonion> for Octonion {
    fn add_assign(&mut self, rhs: &Octonion) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &Octonion {
    type Output = Octonion;
    fn sub(self, rhs: &Octonion) -> Octonion {
        Octonion::new(std::array::from_fn(|i| &self.coeffs[i] - &rhs.coeffs[i]))
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        &self - &rhs
    }
}

impl Neg for &Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion::new(std::array::from_fn(|i| -self.coeffs[i].clone()))
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        -&self
    }
}

impl Mul for &Octonion {
    type Output = Octonion;
    fn mul(self, rhs: &Octonion) -> Octonion {
        oct_mul(self, rhs)
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        oct_mul(&self, &rhs)
    }
}

/// Product in the fixed multiplication table.
pub fn oct_mul(u: &Octonion, v: &Octonion) -> Octonion {
    let mut out = Octonion::zero();
    for (i, a) in u.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in v.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let (sign, k) = MUL_TABLE[i][j];
            let p = a * b;
            if sign > 0 {
                out.coeffs[k] += p;
            } else {
                out.coeffs[k] -= p;
            }
        }
    }
    out
}

/// `Re(u v*)`, which in this orthonormal basis is the coefficient dot product.
pub fn oct_inner(u: &Octonion, v: &Octonion) -> Rational {
    u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a * b).sum()
}

/// An 8x8 real operator on the octonions, usually an element of `so(8)`.
///
/// Left and right multiplication operators by octonions with a real part
/// are not skew; [`So8Matrix::is_skew`] tells the two apart.
#[derive(Clone, PartialEq, Eq)]
pub struct So8Matrix(RatMatrix);

impl So8Matrix {
    pub fn zero() -> Self {
        Self(RatMatrix::zeros(8, 8))
    }

    pub fn identity() -> Self {
        Self(RatMatrix::identity(8))
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Rational) -> Self {
        let mut m = RatMatrix::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                m[(i, j)] = f(i, j);
            }
        }
        Self(m)
    }

    pub(crate) fn from_matrix_unchecked(m: RatMatrix) -> Self {
        Self(m)
    }

    /// Checked constructor for skew-symmetric input.
    pub fn skew_from(m: RatMatrix) -> Option<Self> {
        let s = Self(m);
        (s.0.rows() == 8 && s.0.cols() == 8 && s.is_skew()).then_some(s)
    }

    /// Elementary skew matrix `e_i ^ e_j`.
    pub fn elementary(i: usize, j: usize) -> Self {
        wedge(&Octonion::basis(i), &Octonion::basis(j))
    }

    /// Random skew matrix with small rational entries.
    pub fn random_skew<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut m = Self::zero();
        for i in 0..8 {
            for j in i + 1..8 {
                let x = random_rational(rng, 9, 4);
                m.0[(j, i)] = -x.clone();
                m.0[(i, j)] = x;
            }
        }
        m
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &RatMatrix {
        &self.0
    }

    pub fn is_skew(&self) -> bool {
        (0..8).all(|i| (i..8).all(|j| self.0[(i, j)] == -self.0[(j, i)].clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_fn(|i, j| &self.0[(i, j)] * s)
    }

    /// Matrix product.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.mul(&other.0))
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.compose(other) - &other.compose(self)
    }

    pub fn apply(&self, x: &Octonion) -> Octonion {
        Octonion::from_slice(&self.0.mul_vec(x.coeffs()))
    }

    /// Coordinates `(M[i][j])_{i<j}` in the basis `e_i ^ e_j`, lexicographic.
    pub fn skew_coords(&self) -> Vec<Rational> {
        let mut v = Vec::with_capacity(28);
        for i in 0..8 {
            for j in i + 1..8 {
                v.push(self.0[(i, j)].clone());
            }
        }
        v
    }

    pub fn from_skew_coords(c: &[Rational]) -> Self {
        assert_eq!(c.len(), 28);
        let mut m = Self::zero();
        let mut k = 0;
        for i in 0..8 {
            for j in i + 1..8 {
                m.0[(i, j)] = c[k].clone();
                m.0[(j, i)] = -c[k].clone();
                k += 1;
            }
        }
        m
    }

    pub fn max_abs_entry(&self) -> Rational {
        let mut best = Rational::zero();
        for i in 0..8 {
            for j in 0..8 {
                let a = self.0[(i, j)].abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    }
}

impl fmt::Debug for So8Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..8 {
            let row: Vec<String> = (0..8).map(|j| self.0[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &So8Matrix {
    type Output = So8Matrix;
    fn add(self, rhs: &So8Matrix) -> So8Matrix {
        So8Matrix::from_fn(|i, j| &self.0[(i, j)] + &rhs.0[(i, j)])
    }
}

impl Sub for &So8Matrix {
    type Output = So8Matrix;
    fn sub(self, rhs: &So8Matrix) -> So8Matrix {
        So8Matrix::from_fn(|i, j| &self.0[(i, j)] - &rhs.0[(i, j)])
    }
}

impl Neg for &So8Matrix {
    type Output = So8Matrix;
    fn neg(self) -> So8Matrix {
        So8Matrix::from_fn(|i, j| -self.0[(i, j)].clone())
    }
}

/// Matrix of `x -> c x`.
pub fn left_mul_matrix(c: &Octonion) -> So8Matrix {
    let cols: Vec<Octonion> = (0..8).map(|k| c * &Octonion::basis(k)).collect();
    So8Matrix::from_fn(|i, j| cols[j][i].clone())
}

/// Matrix of `x -> x c`.
pub fn right_mul_matrix(c: &Octonion) -> So8Matrix {
    let cols: Vec<Octonion> = (0..8).map(|k| &Octonion::basis(k) * c).collect();
    So8Matrix::from_fn(|i, j| cols[j][i].clone())
}

/// `a ^ b = a b^T - b a^T` on coefficient column vectors.
pub fn wedge(a: &Octonion, b: &Octonion) -> So8Matrix {
    So8Matrix::from_fn(|i, j| &a[i] * &b[j] - &b[i] * &a[j])
}
