//! Functions on a cotangent chart that are polynomial of degree at most two
//! in the momenta.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::MechanicsError;

pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type MatrixField = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type DomainProbe = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Position `x` and covector `p` in a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Self {
        assert_eq!(x.len(), p.len(), "position and momentum lengths differ");
        Self { x, p }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// `c(x) + c_i(x) p_i + c^{ij}(x) p_i p_j`, with `c^{ij}` symmetric.
///
/// Absent coefficients are zero. The optional domain probe is checked at
/// every evaluation point, including finite-difference stencils.
#[derive(Clone)]
pub struct MomentaPolynomial {
    dim: usize,
    scalar: Option<ScalarField>,
    linear: Option<VectorField>,
    quadratic: Option<MatrixField>,
    domain: Option<DomainProbe>,
}

impl fmt::Debug for MomentaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentaPolynomial")
            .field("dim", &self.dim)
            .field("degree", &self.degree())
            .finish()
    }
}

impl MomentaPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            scalar: None,
            linear: None,
            quadratic: None,
            domain: None,
        }
    }

    pub fn scalar(dim: usize, c: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            scalar: Some(Arc::new(c)),
            ..Self::zero(dim)
        }
    }

    pub fn linear(dim: usize, c: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        Self {
            linear: Some(Arc::new(c)),
            ..Self::zero(dim)
        }
    }

    pub fn quadratic(dim: usize, c: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        Self {
            quadratic: Some(Arc::new(c)),
            ..Self::zero(dim)
        }
    }

    /// The coordinate function `x^j`.
    pub fn coordinate(dim: usize, j: usize) -> Self {
        Self::scalar(dim, move |x| x[j])
    }

    /// The momentum `p_i`.
    pub fn momentum(dim: usize, i: usize) -> Self {
        Self::linear(dim, move |_| {
            let mut v = DVector::zeros(dim);
            v[i] = 1.0;
            v
        })
    }

    pub fn with_domain(mut self, domain: DomainProbe) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        if self.quadratic.is_some() {
            2
        } else if self.linear.is_some() {
            1
        } else {
            0
        }
    }

    pub fn domain(&self) -> Option<&DomainProbe> {
        self.domain.as_ref()
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.domain.as_ref().is_none_or(|d| d(x))
    }

    fn check(&self, x: &[f64]) -> Result<(), MechanicsError> {
        if x.len() != self.dim {
            return Err(MechanicsError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !self.in_domain(x) {
            return Err(MechanicsError::OutsideDomain(x.to_vec()));
        }
        Ok(())
    }

    pub fn scalar_coeff(&self, x: &[f64]) -> f64 {
        self.scalar.as_ref().map_or(0.0, |c| c(x))
    }

    pub fn linear_coeffs(&self, x: &[f64]) -> DVector<f64> {
        self.linear.as_ref().map_or_else(|| DVector::zeros(self.dim), |c| c(x))
    }

    pub fn quadratic_coeffs(&self, x: &[f64]) -> DMatrix<f64> {
        self.quadratic
            .as_ref()
            .map_or_else(|| DMatrix::zeros(self.dim, self.dim), |c| c(x))
    }

    /// Value without the domain check.
    fn eval_raw(&self, x: &[f64], p: &[f64]) -> f64 {
        let mut v = self.scalar_coeff(x);
        if let Some(l) = &self.linear {
            let c = l(x);
            v += c.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
        }
        if let Some(q) = &self.quadratic {
            let c = q(x);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    v += c[(i, j)] * p[i] * p[j];
                }
            }
        }
        v
    }

    pub fn eval(&self, at: &PhasePoint) -> Result<f64, MechanicsError> {
        self.check(&at.x)?;
        Ok(self.eval_raw(&at.x, &at.p))
    }

    /// `dF/dp`, exact in the momenta.
    pub fn grad_p(&self, at: &PhasePoint) -> Result<DVector<f64>, MechanicsError> {
        self.check(&at.x)?;
        let mut g = self.linear_coeffs(&at.x);
        if let Some(q) = &self.quadratic {
            let c = q(&at.x);
            let p = DVector::from_column_slice(&at.p);
            g += (&c + c.transpose()) * p;
        }
        Ok(g)
    }

    /// `dF/dx` by central differences with one Richardson level.
    pub fn grad_x(&self, at: &PhasePoint, step: f64) -> Result<DVector<f64>, MechanicsError> {
        if !(step > 0.0) {
            return Err(MechanicsError::InvalidStep(step));
        }
        self.check(&at.x)?;
        let mut out = DVector::zeros(self.dim);
        let mut xs = at.x.clone();
        for i in 0..self.dim {
            let mut central = |h: f64| -> Result<f64, MechanicsError> {
                xs[i] = at.x[i] + h;
                self.check(&xs)?;
                let plus = self.eval_raw(&xs, &at.p);
                xs[i] = at.x[i] - h;
                self.check(&xs)?;
                let minus = self.eval_raw(&xs, &at.p);
                xs[i] = at.x[i];
                Ok((plus - minus) / (2.0 * h))
            };
            let coarse = central(step)?;
            let fine = central(step / 2.0)?;
            out[i] = (4.0 * fine - coarse) / 3.0;
        }
        Ok(out)
    }

    fn join_domain(&self, other: &Self) -> Option<DomainProbe> {
        match (&self.domain, &other.domain) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => Some(d.clone()),
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |x: &[f64]| a(x) && b(x)))
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let scalar = match (&self.scalar, &other.scalar) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |x: &[f64]| a(x) + b(x)) as ScalarField)
            }
        };
        let linear = match (&self.linear, &other.linear) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |x: &[f64]| a(x) + b(x)) as VectorField)
            }
        };
        let quadratic = match (&self.quadratic, &other.quadratic) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |x: &[f64]| a(x) + b(x)) as MatrixField)
            }
        };
        Self {
            dim: self.dim,
            scalar,
            linear,
            quadratic,
            domain: self.join_domain(other),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            scalar: self.scalar.clone().map(|c| Arc::new(move |x: &[f64]| s * c(x)) as ScalarField),
            linear: self.linear.clone().map(|c| Arc::new(move |x: &[f64]| c(x) * s) as VectorField),
            quadratic: self
                .quadratic
                .clone()
                .map(|c| Arc::new(move |x: &[f64]| c(x) * s) as MatrixField),
            domain: self.domain.clone(),
        }
    }

    /// Product of two polynomials whose degrees sum to at most two.
    pub fn product(&self, other: &Self) -> Result<Self, MechanicsError> {
        assert_eq!(self.dim, other.dim);
        if self.degree() + other.degree() > 2 {
            return Err(MechanicsError::DegreeOverflow);
        }
        let dim = self.dim;
        let (a, b) = (self.clone(), other.clone());
        let scalar: Option<ScalarField> = (self.scalar.is_some() && other.scalar.is_some()).then(|| {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[f64]| a.scalar_coeff(x) * b.scalar_coeff(x)) as ScalarField
        });
        let has_linear = (self.scalar.is_some() && other.linear.is_some())
            || (self.linear.is_some() && other.scalar.is_some());
        let linear: Option<VectorField> = has_linear.then(|| {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[f64]| {
                a.linear_coeffs(x) * b.scalar_coeff(x) + b.linear_coeffs(x) * a.scalar_coeff(x)
            }) as VectorField
        });
        let has_quadratic = (self.linear.is_some() && other.linear.is_some())
            || (self.scalar.is_some() && other.quadratic.is_some())
            || (self.quadratic.is_some() && other.scalar.is_some());
        let quadratic: Option<MatrixField> = has_quadratic.then(|| {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[f64]| {
                let (u, v) = (a.linear_coeffs(x), b.linear_coeffs(x));
                let outer = &u * v.transpose();
                (&outer + outer.transpose()) * 0.5
                    + a.quadratic_coeffs(x) * b.scalar_coeff(x)
                    + b.quadratic_coeffs(x) * a.scalar_coeff(x)
            }) as MatrixField
        });
        Ok(Self {
            dim,
            scalar,
            linear,
            quadratic,
            domain: self.join_domain(other),
        })
    }
}
