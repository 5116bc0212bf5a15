//! Nijenhuis and Haantjes torsion of a `(1,1)`-tensor field, with field
//! derivatives by central differences.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::chart::Chart;
use super::MechanicsError;

/// Pointwise `(1,1)`-tensor field; entry `(i, j)` is `L^i_j`.
pub type TensorField = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Rank-three array `T^i_jk` stored as `data[(i * n + j) * n + k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

/// `dL/dx^m` for every `m`, Richardson-extrapolated central differences.
fn derivatives(l: &TensorField, chart: &Chart, at: &[f64], step: f64) -> Result<Vec<DMatrix<f64>>, MechanicsError> {
    let mut xs = at.to_vec();
    let mut out = Vec::with_capacity(at.len());
    for m in 0..at.len() {
        let mut central = |h: f64| -> Result<DMatrix<f64>, MechanicsError> {
            xs[m] = at[m] + h;
            if !chart.contains(&xs) {
                return Err(MechanicsError::OutsideDomain(xs.clone()));
            }
            let plus = l(&xs);
            xs[m] = at[m] - h;
            if !chart.contains(&xs) {
                return Err(MechanicsError::OutsideDomain(xs.clone()));
            }
            let minus = l(&xs);
            xs[m] = at[m];
            Ok((plus - minus) / (2.0 * h))
        };
        let coarse = central(step)?;
        let fine = central(step / 2.0)?;
        out.push((fine * 4.0 - coarse) / 3.0);
    }
    Ok(out)
}

fn check(chart: &Chart, at: &[f64], step: f64) -> Result<(), MechanicsError> {
    if !(step > 0.0) {
        return Err(MechanicsError::InvalidStep(step));
    }
    if !chart.contains(at) {
        return Err(MechanicsError::OutsideDomain(at.to_vec()));
    }
    Ok(())
}

/// `N(X,Y) = L^2[X,Y] + [LX,LY] - L[LX,Y] - L[X,LY]` on coordinate fields:
/// `N^i_jk = L^m_j d_m L^i_k - L^m_k d_m L^i_j + L^i_m (d_k L^m_j - d_j L^m_k)`.
pub fn nijenhuis_torsion(l: &TensorField, chart: &Chart, at: &[f64], step: f64) -> Result<Tensor3, MechanicsError> {
    check(chart, at, step)?;
    let n = at.len();
    let lx = l(at);
    let d = derivatives(l, chart, at, step)?;
    let mut t = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = 0.0;
                for m in 0..n {
                    v += lx[(m, j)] * d[m][(i, k)] - lx[(m, k)] * d[m][(i, j)];
                    v += lx[(i, m)] * (d[k][(m, j)] - d[j][(m, k)]);
                }
                t.set(i, j, k, v);
            }
        }
    }
    Ok(t)
}

/// `H(X,Y) = L^2 N(X,Y) + N(LX,LY) - L N(LX,Y) - L N(X,LY)`.
pub fn haantjes_torsion(l: &TensorField, chart: &Chart, at: &[f64], step: f64) -> Result<Tensor3, MechanicsError> {
    let nt = nijenhuis_torsion(l, chart, at, step)?;
    let n = at.len();
    let lx = l(at);
    let l2 = &lx * &lx;
    let mut h = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = 0.0;
                for a in 0..n {
                    v += l2[(i, a)] * nt.get(a, j, k);
                    for b in 0..n {
                        v += nt.get(i, a, b) * lx[(a, j)] * lx[(b, k)];
                        v -= lx[(i, a)] * nt.get(a, b, k) * lx[(b, j)];
                        v -= lx[(i, a)] * nt.get(a, j, b) * lx[(b, k)];
                    }
                }
                h.set(i, j, k, v);
            }
        }
    }
    Ok(h)
}

/// `diag(f_1(x_1), ..., f_n(x_n))` with `f_i(t) = (i + 1) + sin((i + 1) t)`:
/// eigenframe is the coordinate frame, so the Haantjes torsion vanishes.
pub fn coordinate_diagonal_field(n: usize) -> TensorField {
    Arc::new(move |x: &[f64]| {
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (i as f64 + 1.0) + ((i as f64 + 1.0) * x[i]).sin()
            } else {
                0.0
            }
        })
    })
}

/// `R(x_3) diag(1,2,3) R(x_3)^T` on `R^3` with `R` the rotation about the
/// third axis: the eigenvectors `e_1`, `e_3` span a contact distribution, so
/// the Haantjes torsion does not vanish.
pub fn rotating_frame_field() -> TensorField {
    Arc::new(|x: &[f64]| {
        let (s, c) = x[2].sin_cos();
        let r = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
        &r * d * r.transpose()
    })
}
