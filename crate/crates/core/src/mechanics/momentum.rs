//! Killing vector fields and momentum maps of the isometry algebras on the
//! model charts.
//!
//! Each model chart comes from an embedding `y(x)` into a linear space on
//! which the isometry algebra acts by matrices. The Killing field of `xi` is
//! the chart vector `V` with `Dy V = xi y`; for the real families this is
//! `V = g^{-1} Dy^T J xi y`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::chart::{Chart, ChartKind};
use super::polynomial::{MomentaPolynomial, VectorField};
use super::MechanicsError;
use crate::curvature::SpaceModel;
use crate::exact::to_f64;
use crate::lie::{LieElement, MatrixAlgebra, MatrixKind};

/// `{P_xi, P_eta} = HOMOMORPHISM_SIGN * P_[xi,eta]` on every model chart:
/// the action is a left action, so `xi -> V_xi` reverses brackets.
pub const HOMOMORPHISM_SIGN: f64 = -1.0;

/// Real and imaginary parts of a matrix element as `f64` matrices.
fn float_parts(xi: &LieElement) -> Result<(MatrixAlgebra, DMatrix<f64>, DMatrix<f64>), MechanicsError> {
    let m = xi
        .as_matrix()
        .ok_or_else(|| MechanicsError::Unsupported("momentum maps need a matrix algebra".into()))?;
    let e = m.entries();
    let n = e.size();
    let re = DMatrix::from_fn(n, n, |i, j| to_f64(&e[(i, j)].re));
    let im = DMatrix::from_fn(n, n, |i, j| to_f64(&e[(i, j)].im));
    Ok((m.algebra(), re, im))
}

fn expected_algebra(chart: &Chart) -> Option<MatrixAlgebra> {
    let n = chart.dim();
    match chart.kind() {
        ChartKind::SpherePolar => Some(MatrixAlgebra::so(n + 1)),
        ChartKind::UpperHalfSpace => Some(MatrixAlgebra::so_pq(n, 1)),
        ChartKind::FubiniStudy => Some(MatrixAlgebra::su(n / 2 + 1)),
        ChartKind::Bergman => Some(MatrixAlgebra::su_pq(n / 2, 1)),
        ChartKind::Euclidean | ChartKind::Custom => None,
    }
}

/// Hyperspherical embedding `S^n -> R^{n+1}` and its Jacobian.
pub fn sphere_embedding(x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = x.len();
    let (s, c): (Vec<f64>, Vec<f64>) = x.iter().map(|a| (a.sin(), a.cos())).unzip();
    let mut y = DVector::zeros(n + 1);
    let mut dy = DMatrix::zeros(n + 1, n);
    // y_k = s_0 ... s_{k-1} c_k for k < n, y_n = s_0 ... s_{n-1}.
    for k in 0..=n {
        let last = if k < n { c[k] } else { 1.0 };
        y[k] = s[..k].iter().product::<f64>() * last;
        for j in 0..n {
            if j < k {
                let others: f64 = (0..k).filter(|&i| i != j).map(|i| s[i]).product();
                dy[(k, j)] = others * c[j] * last;
            } else if j == k {
                dy[(k, j)] = -s[..k].iter().product::<f64>() * s[k];
            }
        }
    }
    (y, dy)
}

/// Embedding of the upper half-space onto the hyperboloid
/// `y_1^2 + ... + y_n^2 - y_{n+1}^2 = -1`, timelike coordinate last.
pub fn hyperboloid_embedding(x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = x.len();
    let t = x[n - 1];
    let u = &x[..n - 1];
    let u2: f64 = u.iter().map(|v| v * v).sum();
    let mut y = DVector::zeros(n + 1);
    let mut dy = DMatrix::zeros(n + 1, n);
    for k in 0..n - 1 {
        y[k] = u[k] / t;
        dy[(k, k)] = 1.0 / t;
        dy[(k, n - 1)] = -u[k] / (t * t);
    }
    y[n - 1] = (1.0 - u2 - t * t) / (2.0 * t);
    y[n] = (1.0 + u2 + t * t) / (2.0 * t);
    for j in 0..n - 1 {
        dy[(n - 1, j)] = -u[j] / t;
        dy[(n, j)] = u[j] / t;
    }
    dy[(n - 1, n - 1)] = -(1.0 - u2) / (2.0 * t * t) - 0.5;
    dy[(n, n - 1)] = -(1.0 + u2) / (2.0 * t * t) + 0.5;
    (y, dy)
}

/// Killing vector field of `xi` on a model chart.
pub fn killing_field(xi: &LieElement, chart: &Chart) -> Result<VectorField, MechanicsError> {
    let expected = expected_algebra(chart).ok_or_else(|| {
        MechanicsError::Unsupported(format!("no isometry algebra attached to {}", chart.name()))
    })?;
    let (alg, re, im) = float_parts(xi)?;
    if alg != expected {
        return Err(MechanicsError::Unsupported(format!(
            "{} does not act on {}",
            alg.name(),
            chart.name()
        )));
    }
    let kind = chart.kind();
    let metric = chart.metric_field();
    let field: VectorField = match alg.kind {
        MatrixKind::SpecialOrthogonal => {
            let signs: Vec<f64> = alg.signs().iter().map(|&s| f64::from(s)).collect();
            Arc::new(move |x: &[f64]| {
                let (y, dy) = if kind == ChartKind::SpherePolar {
                    sphere_embedding(x)
                } else {
                    hyperboloid_embedding(x)
                };
                let mut jxy = &re * &y;
                for (v, s) in jxy.iter_mut().zip(&signs) {
                    *v *= s;
                }
                let g = metric(x);
                let rhs = dy.transpose() * jxy;
                g.lu().solve(&rhs).unwrap_or_else(|| DVector::from_element(x.len(), f64::NAN))
            })
        }
        MatrixKind::SpecialUnitary => Arc::new(move |x: &[f64]| {
            let n = x.len() / 2;
            let mut zr = DVector::zeros(n + 1);
            let mut zi = DVector::zeros(n + 1);
            for k in 0..n {
                zr[k] = x[2 * k];
                zi[k] = x[2 * k + 1];
            }
            zr[n] = 1.0;
            // (re + i im)(zr + i zi)
            let ar = &re * &zr - &im * &zi;
            let ai = &re * &zi + &im * &zr;
            let mut v = DVector::zeros(2 * n);
            for k in 0..n {
                // a_k - w_k a_n
                v[2 * k] = ar[k] - (zr[k] * ar[n] - zi[k] * ai[n]);
                v[2 * k + 1] = ai[k] - (zr[k] * ai[n] + zi[k] * ar[n]);
            }
            v
        }),
    };
    Ok(field)
}

/// Linear momentum function `P_xi(x, p) = p . V_xi(x)` on a model chart.
pub fn momentum_map(xi: &LieElement, chart: &Chart) -> Result<MomentaPolynomial, MechanicsError> {
    let v = killing_field(xi, chart)?;
    Ok(MomentaPolynomial::linear(chart.dim(), move |x| v(x)).with_domain(chart.domain().clone()))
}

/// Momentum map on the fixed chart of a model space.
pub fn model_momentum_map(
    xi: &LieElement,
    model: &SpaceModel,
) -> Result<(Chart, MomentaPolynomial), MechanicsError> {
    let chart = Chart::for_model(model)?;
    let p = momentum_map(xi, &chart)?;
    Ok((chart, p))
}
