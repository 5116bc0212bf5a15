//! Matrix Lie algebras `su(p,q)` and `so(p,q)` over exact Gaussian rationals.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;

use super::LieError;
use crate::exact::{random_rational, Rational};

/// Gaussian rational `a + b i`.
pub type Gaussian = Complex<Rational>;

pub fn gaussian(re: Rational, im: Rational) -> Gaussian {
    Complex::new(re, im)
}

pub fn g_re(re: Rational) -> Gaussian {
    Complex::new(re, Rational::zero())
}

pub fn g_im(im: Rational) -> Gaussian {
    Complex::new(Rational::zero(), im)
}

/// Square matrix of Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CMatrix {
    n: usize,
    data: Vec<Gaussian>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Gaussian::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Gaussian>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend(r);
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + a * b;
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.mul(other) - &other.mul(self)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Gaussian {
        (0..self.n).fold(Gaussian::zero(), |acc, i| acc + &self[(i, i)])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Left multiplication by the diagonal sign matrix `J`.
    fn sign_rows(&self, signs: &[i8]) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            if signs[i] < 0 {
                for j in 0..self.n {
                    out[(i, j)] = -out[(i, j)].clone();
                }
            }
        }
        out
    }

    fn sign_cols(&self, signs: &[i8]) -> Self {
        let mut out = self.clone();
        for j in 0..self.n {
            if signs[j] < 0 {
                for i in 0..self.n {
                    out[(i, j)] = -out[(i, j)].clone();
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Gaussian;
    fn index(&self, (i, j): (usize, usize)) -> &Gaussian {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Gaussian {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = &self[(i, j)];
                    format!("{}{:+}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    /// `su(p,q)`: `X^dagger J + J X = 0`, trace zero.
    SpecialUnitary,
    /// `so(p,q)`: real, `X^T J + J X = 0`.
    SpecialOrthogonal,
}

/// A real form of a classical matrix algebra with signature `(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatrixAlgebra {
    pub kind: MatrixKind,
    pub p: usize,
    pub q: usize,
}

impl MatrixAlgebra {
    pub fn su(n: usize) -> Self {
        Self::su_pq(n, 0)
    }

    pub fn su_pq(p: usize, q: usize) -> Self {
        Self {
            kind: MatrixKind::SpecialUnitary,
            p,
            q,
        }
    }

    pub fn so(n: usize) -> Self {
        Self::so_pq(n, 0)
    }

    pub fn so_pq(p: usize, q: usize) -> Self {
        Self {
            kind: MatrixKind::SpecialOrthogonal,
            p,
            q,
        }
    }

    /// Matrix size `p + q`.
    pub fn size(&self) -> usize {
        self.p + self.q
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.size()).map(|i| if i < self.p { 1 } else { -1 }).collect()
    }

    fn eps(&self, i: usize, j: usize) -> i8 {
        let s = self.signs();
        s[i] * s[j]
    }

    pub fn dim(&self) -> usize {
        let n = self.size();
        match self.kind {
            MatrixKind::SpecialUnitary => n * n - 1,
            MatrixKind::SpecialOrthogonal => n * (n - 1) / 2,
        }
    }

    pub fn name(&self) -> String {
        let base = match self.kind {
            MatrixKind::SpecialUnitary => "su",
            MatrixKind::SpecialOrthogonal => "so",
        };
        if self.q == 0 {
            format!("{base}({})", self.p)
        } else {
            format!("{base}({},{})", self.p, self.q)
        }
    }

    /// Membership test for an arbitrary Gaussian matrix.
    pub fn contains(&self, m: &CMatrix) -> bool {
        if m.size() != self.size() {
            return false;
        }
        let s = self.signs();
        let lhs = &m.adjoint().sign_cols(&s) + &m.sign_rows(&s);
        if !lhs.is_zero() {
            return false;
        }
        match self.kind {
            MatrixKind::SpecialUnitary => m.trace().is_zero(),
            MatrixKind::SpecialOrthogonal => m.data.iter().all(|z| z.im.is_zero()),
        }
    }

    /// Basis element `k` in the fixed real basis.
    ///
    /// `su(p,q)`: the `n-1` diagonal elements `i(E_kk - E_{k+1,k+1})` first,
    /// then for each `i < j` the pair `E_ij - eps E_ji`, `i(E_ij + eps E_ji)`
    /// with `eps = J_ii J_jj`. `so(p,q)`: `E_ij - eps E_ji` for `i < j`.
    pub fn basis_matrix(&self, k: usize) -> CMatrix {
        let n = self.size();
        let mut m = CMatrix::zeros(n);
        let one = Rational::one();
        match self.kind {
            MatrixKind::SpecialUnitary => {
                if k < n - 1 {
                    m[(k, k)] = g_im(one.clone());
                    m[(k + 1, k + 1)] = g_im(-one);
                    return m;
                }
                let mut idx = n - 1;
                for i in 0..n {
                    for j in i + 1..n {
                        let eps = Rational::from_integer(self.eps(i, j).into());
                        if idx == k {
                            m[(i, j)] = g_re(one.clone());
                            m[(j, i)] = g_re(-eps);
                            return m;
                        }
                        if idx + 1 == k {
                            m[(i, j)] = g_im(one.clone());
                            m[(j, i)] = g_im(eps);
                            return m;
                        }
                        idx += 2;
                    }
                }
            }
            MatrixKind::SpecialOrthogonal => {
                let mut idx = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if idx == k {
                            let eps = Rational::from_integer(self.eps(i, j).into());
                            m[(i, j)] = g_re(one.clone());
                            m[(j, i)] = g_re(-eps);
                            return m;
                        }
                        idx += 1;
                    }
                }
            }
        }
        panic!("basis index {k} out of range for {}", self.name());
    }

    /// Real coordinates of a member matrix in the fixed basis.
    pub fn coords(&self, m: &CMatrix) -> Vec<Rational> {
        let n = self.size();
        let mut v = Vec::with_capacity(self.dim());
        match self.kind {
            MatrixKind::SpecialUnitary => {
                let mut acc = Rational::zero();
                for k in 0..n - 1 {
                    acc += &m[(k, k)].im;
                    v.push(acc.clone());
                }
                for i in 0..n {
                    for j in i + 1..n {
                        v.push(m[(i, j)].re.clone());
                        v.push(m[(i, j)].im.clone());
                    }
                }
            }
            MatrixKind::SpecialOrthogonal => {
                for i in 0..n {
                    for j in i + 1..n {
                        v.push(m[(i, j)].re.clone());
                    }
                }
            }
        }
        v
    }

    pub fn from_coords(&self, c: &[Rational]) -> CMatrix {
        assert_eq!(c.len(), self.dim());
        let mut m = CMatrix::zeros(self.size());
        for (k, x) in c.iter().enumerate() {
            if !x.is_zero() {
                m = &m + &self.basis_matrix(k).scale(x);
            }
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> MatrixLieElement {
        let c: Vec<Rational> = (0..self.dim()).map(|_| random_rational(rng, 9, 4)).collect();
        MatrixLieElement {
            algebra: *self,
            entries: self.from_coords(&c),
        }
    }
}

/// Element of a matrix Lie algebra; membership is checked on construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixLieElement {
    algebra: MatrixAlgebra,
    entries: CMatrix,
}

impl MatrixLieElement {
    pub fn new(algebra: MatrixAlgebra, entries: CMatrix) -> Result<Self, LieError> {
        if !algebra.contains(&entries) {
            return Err(LieError::NotInAlgebra(algebra.name()));
        }
        Ok(Self { algebra, entries })
    }

    pub(crate) fn new_unchecked(algebra: MatrixAlgebra, entries: CMatrix) -> Self {
        Self { algebra, entries }
    }

    pub fn algebra(&self) -> MatrixAlgebra {
        self.algebra
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn coords(&self) -> Vec<Rational> {
        self.algebra.coords(&self.entries)
    }
}

impl fmt::Debug for MatrixLieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} element\n{:?}", self.algebra.name(), self.entries)
    }
}
