//! Coordinate charts with explicit metrics, and the model-space charts used
//! for momentum maps.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::polynomial::{DomainProbe, MatrixField, PhasePoint};
use super::MechanicsError;
use crate::curvature::{Family, SpaceModel};

/// Which model space a chart belongs to, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    Euclidean,
    /// Hyperspherical angles `(theta_1, ..., theta_{n-1}, phi)` on `S^n`.
    SpherePolar,
    /// Upper half-space `x_n > 0` on `H^n`.
    UpperHalfSpace,
    /// Affine chart `Z = (w, 1)` on `CP^n`, Fubini-Study metric.
    FubiniStudy,
    /// Unit ball `Z = (w, 1)` on `CH^n`, Bergman-type metric.
    Bergman,
    Custom,
}

/// A chart with metric `g_ij(x)` and a domain probe.
#[derive(Clone)]
pub struct Chart {
    name: String,
    dim: usize,
    kind: ChartKind,
    metric: MatrixField,
    domain: DomainProbe,
    sample_box: Vec<(f64, f64)>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .finish()
    }
}

impl Chart {
    /// A chart with a user-supplied metric; `sample_box` bounds the points
    /// used by sampling checks and must lie inside the domain.
    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        metric: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
        sample_box: Vec<(f64, f64)>,
    ) -> Self {
        assert_eq!(sample_box.len(), dim);
        Self {
            name: name.into(),
            dim,
            kind: ChartKind::Custom,
            metric: Arc::new(metric),
            domain: Arc::new(domain),
            sample_box,
        }
    }

    pub fn euclidean(n: usize) -> Self {
        Self {
            name: format!("R^{n}"),
            dim: n,
            kind: ChartKind::Euclidean,
            metric: Arc::new(move |_| DMatrix::identity(n, n)),
            domain: Arc::new(|_| true),
            sample_box: vec![(-1.0, 1.0); n],
        }
    }

    /// Round `S^n` in hyperspherical angles; `g = diag(1, s1^2, s1^2 s2^2, ...)`.
    pub fn sphere_polar(n: usize) -> Self {
        assert!(n >= 2);
        let mut sample_box = vec![(0.6, PI - 0.6); n - 1];
        sample_box.push((-PI, PI));
        Self {
            name: format!("S^{n} polar"),
            dim: n,
            kind: ChartKind::SpherePolar,
            metric: Arc::new(move |x| {
                let mut g = DMatrix::zeros(n, n);
                let mut prod = 1.0;
                for j in 0..n {
                    g[(j, j)] = prod;
                    if j + 1 < n {
                        prod *= x[j].sin().powi(2);
                    }
                }
                g
            }),
            domain: Arc::new(move |x| x[..n - 1].iter().all(|&t| t > 0.0 && t < PI)),
            sample_box,
        }
    }

    /// `H^n` as the upper half-space, `g = I / x_n^2`.
    pub fn upper_half_space(n: usize) -> Self {
        assert!(n >= 2);
        let mut sample_box = vec![(-0.8, 0.8); n - 1];
        sample_box.push((0.6, 1.6));
        Self {
            name: format!("H^{n} upper half-space"),
            dim: n,
            kind: ChartKind::UpperHalfSpace,
            metric: Arc::new(move |x| DMatrix::identity(n, n) / (x[n - 1] * x[n - 1])),
            domain: Arc::new(move |x| x[n - 1] > 0.0),
            sample_box,
        }
    }

    /// `CP^n` in the affine chart; real coordinates `(Re w_1, Im w_1, ...)`.
    pub fn fubini_study(n: usize) -> Self {
        Self {
            name: format!("CP^{n} affine"),
            dim: 2 * n,
            kind: ChartKind::FubiniStudy,
            metric: Arc::new(move |x| hermitian_metric(x, 1.0)),
            domain: Arc::new(|_| true),
            sample_box: vec![(-0.7, 0.7); 2 * n],
        }
    }

    /// `CH^n` on the unit ball.
    pub fn bergman(n: usize) -> Self {
        let dim = 2 * n;
        let r = 0.45 / (n as f64).sqrt();
        Self {
            name: format!("CH^{n} ball"),
            dim,
            kind: ChartKind::Bergman,
            metric: Arc::new(move |x| hermitian_metric(x, -1.0)),
            domain: Arc::new(|x| x.iter().map(|v| v * v).sum::<f64>() < 1.0),
            sample_box: vec![(-r, r); dim],
        }
    }

    /// The fixed chart used for a model space.
    pub fn for_model(model: &SpaceModel) -> Result<Self, MechanicsError> {
        let n = model.dim();
        match (model.family(), model.sign() > 0) {
            (Family::Real, true) => Ok(Self::sphere_polar(n)),
            (Family::Real, false) => Ok(Self::upper_half_space(n)),
            (Family::Complex, true) => Ok(Self::fubini_study(n / 2)),
            (Family::Complex, false) => Ok(Self::bergman(n / 2)),
            _ => Err(MechanicsError::Unsupported(format!("no chart for {}", model.name()))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn domain(&self) -> &DomainProbe {
        &self.domain
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && (self.domain)(x)
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>, MechanicsError> {
        if !self.contains(x) {
            return Err(MechanicsError::OutsideDomain(x.to_vec()));
        }
        Ok((self.metric)(x))
    }

    pub fn inverse_metric(&self, x: &[f64]) -> Result<DMatrix<f64>, MechanicsError> {
        self.metric(x)?
            .try_inverse()
            .ok_or_else(|| MechanicsError::SingularMetric(x.to_vec()))
    }

    /// Same chart with the metric multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let m = self.metric.clone();
        Self {
            name: format!("{} x{s}", self.name),
            metric: Arc::new(move |x| m(x) * s),
            kind: ChartKind::Custom,
            ..self.clone()
        }
    }

    pub fn metric_field(&self) -> MatrixField {
        self.metric.clone()
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.sample_box.iter().map(|&(a, b)| rng.gen_range(a..b)).collect()
    }

    pub fn random_phase_point<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePoint {
        let x = self.random_point(rng);
        let p = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PhasePoint::new(x, p)
    }
}

/// `Re[(1 + s|w|^2)<a,b> - s (w-bar . a) conj(w-bar . b)] / (1 + s|w|^2)^2`
/// as a real `2n x 2n` matrix; `s = 1` is Fubini-Study, `s = -1` Bergman.
fn hermitian_metric(x: &[f64], s: f64) -> DMatrix<f64> {
    let dim = x.len();
    let n = dim / 2;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let d = 1.0 + s * r2;
    // Real coordinates of the covector a -> w-bar . a (complex linear in a):
    // re part row and im part row.
    let mut re = DVector::zeros(dim);
    let mut im = DVector::zeros(dim);
    for k in 0..n {
        let (u, v) = (x[2 * k], x[2 * k + 1]);
        // (u - iv)(a + ib) = (ua + vb) + i(ub - va)
        re[2 * k] = u;
        re[2 * k + 1] = v;
        im[2 * k] = -v;
        im[2 * k + 1] = u;
    }
    let outer = &re * re.transpose() + &im * im.transpose();
    (DMatrix::identity(dim, dim) * d - outer * s) / (d * d)
}
