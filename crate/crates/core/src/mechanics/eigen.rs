//! Simultaneous eigenvectors of quadratic Killing tensors, restricted to the
//! complement of a set of Killing vectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::chart::Chart;
use super::polynomial::MomentaPolynomial;

/// Commutators and eigen-residuals below `COMMUTE_TOL * scale` count as zero.
pub const COMMUTE_TOL: f64 = 1e-8;
/// Eigenvalues of the combined operator closer than this are one cluster.
pub const TIE_GAP: f64 = 1e-6;

/// A g-orthonormal frame of common eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigenframe {
    /// Frame vectors in chart components.
    pub vectors: Vec<DVector<f64>>,
    /// `eigenvalues[a][k]`: eigenvalue of tensor `a` on vector `k`.
    pub eigenvalues: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EigenFailure {
    /// Two restricted operators do not commute.
    NonCommuting { pair: (usize, usize), norm: f64 },
    /// A vector of the combined eigenbasis is not an eigenvector of `tensor`.
    NotSimultaneous { tensor: usize, residual: f64 },
    DegenerateMetric,
    /// The Killing vectors are linearly dependent at the point.
    DependentKilling,
    OutsideDomain,
}

fn weight(a: usize) -> f64 {
    0.5 + ((a as f64 + 1.0) * 0.618_033_988_749_894_9).fract()
}

/// Orthonormal basis (Euclidean) of `{alpha : alpha . v = 0 for all v}`;
/// `None` when the `v` are linearly dependent.
fn annihilator(vs: &[DVector<f64>], n: usize) -> Option<DMatrix<f64>> {
    if vs.is_empty() {
        return Some(DMatrix::identity(n, n));
    }
    let m = DMatrix::from_columns(vs);
    let eig = SymmetricEigen::new(&m * m.transpose());
    let top = eig.eigenvalues.amax();
    let null: Vec<DVector<f64>> = (0..n)
        .filter(|&k| eig.eigenvalues[k] <= 1e-12 * top)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    if top == 0.0 || n - null.len() < vs.len() {
        return None;
    }
    if null.is_empty() {
        return Some(DMatrix::zeros(n, 0));
    }
    Some(DMatrix::from_columns(&null))
}

/// Orthonormal eigenvectors of the symmetric `c`, with near-ties refined by
/// diagonalizing each operator in turn inside the cluster.
fn joint_basis(c: &DMatrix<f64>, ops: &[DMatrix<f64>]) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(c.clone());
    let m = c.nrows();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut q = DMatrix::zeros(m, m);
    for (k, &i) in order.iter().enumerate() {
        q.set_column(k, &eig.eigenvectors.column(i));
    }
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && (vals[end] - vals[end - 1]).abs() < TIE_GAP {
            end += 1;
        }
        if end - start > 1 {
            let mut block = q.columns(start, end - start).into_owned();
            for op in ops {
                let r = block.transpose() * op * &block;
                let e = SymmetricEigen::new((&r + r.transpose()) * 0.5);
                block = &block * e.eigenvectors;
            }
            q.columns_mut(start, end - start).copy_from(&block);
        }
        start = end;
    }
    q
}

/// Common eigenframe of the tensors `K^{ij}` (quadratic parts) relative to
/// the inverse metric, on the covectors annihilating the Killing vectors.
///
/// Returned vectors are `X = g^{-1} alpha`; they are g-orthonormal and
/// g-orthogonal to every Killing vector.
pub fn common_eigenframe(
    tensors: &[MomentaPolynomial],
    chart: &Chart,
    at: &[f64],
    orthogonal_to: &[MomentaPolynomial],
) -> Result<Eigenframe, EigenFailure> {
    if !chart.contains(at) {
        return Err(EigenFailure::OutsideDomain);
    }
    let n = chart.dim();
    let ginv = chart.inverse_metric(at).map_err(|_| EigenFailure::DegenerateMetric)?;
    if ginv.clone().cholesky().is_none() {
        return Err(EigenFailure::DegenerateMetric);
    }
    let vs: Vec<DVector<f64>> = orthogonal_to.iter().map(|v| v.linear_coeffs(at)).collect();
    let w = annihilator(&vs, n).ok_or(EigenFailure::DependentKilling)?;
    let m = w.ncols();
    let gram = w.transpose() * &ginv * &w;
    let chol = gram.cholesky().ok_or(EigenFailure::DegenerateMetric)?;
    // B = W L^{-T}, so B^T G B = I.
    let linv_t = chol
        .l()
        .try_inverse()
        .ok_or(EigenFailure::DegenerateMetric)?
        .transpose();
    let b = &w * linv_t;

    let ops: Vec<DMatrix<f64>> = tensors
        .iter()
        .map(|k| {
            let c = k.quadratic_coeffs(at);
            let c = (&c + c.transpose()) * 0.5;
            b.transpose() * c * &b
        })
        .collect();
    for (i, a) in ops.iter().enumerate() {
        for (j, bb) in ops.iter().enumerate().skip(i + 1) {
            let norm = (a * bb - bb * a).norm();
            if norm > COMMUTE_TOL * (a.norm() * bb.norm()).max(1.0) {
                return Err(EigenFailure::NonCommuting { pair: (i, j), norm });
            }
        }
    }
    let combo = ops
        .iter()
        .enumerate()
        .fold(DMatrix::zeros(m, m), |acc, (a, op)| acc + op * weight(a));
    let q = joint_basis(&combo, &ops);

    let mut eigenvalues = vec![Vec::with_capacity(m); ops.len()];
    for k in 0..m {
        let beta = q.column(k).into_owned();
        for (a, op) in ops.iter().enumerate() {
            let ob = op * &beta;
            let lambda = beta.dot(&ob);
            let residual = (ob - &beta * lambda).norm();
            if residual > COMMUTE_TOL * op.norm().max(1.0) {
                return Err(EigenFailure::NotSimultaneous { tensor: a, residual });
            }
            eigenvalues[a].push(lambda);
        }
    }
    let vectors = (0..m).map(|k| &ginv * (&b * q.column(k))).collect();
    Ok(Eigenframe { vectors, eigenvalues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanics::metric_hamiltonian;

    fn constant(m: DMatrix<f64>) -> MomentaPolynomial {
        let n = m.nrows();
        MomentaPolynomial::quadratic(n, move |_| m.clone())
    }

    #[test]
    fn metric_alone_gives_orthonormal_frame() {
        let c = Chart::sphere_polar(2);
        let x = [1.0, 0.3];
        let f = common_eigenframe(&[metric_hamiltonian(&c).scale(2.0)], &c, &x, &[]).unwrap();
        let g = c.metric(&x).unwrap();
        assert_eq!(f.vectors.len(), 2);
        for (i, a) in f.vectors.iter().enumerate() {
            for (j, b) in f.vectors.iter().enumerate() {
                let v = a.dot(&(&g * b));
                assert!((v - f64::from(u8::from(i == j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shared_diagonal_frame() {
        let c = Chart::euclidean(3);
        let k1 = constant(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0])));
        let k2 = constant(DMatrix::from_diagonal(&DVector::from_vec(vec![5.0, 5.0, -1.0])));
        let f = common_eigenframe(&[k1, k2], &c, &[0.0; 3], &[]).unwrap();
        for v in &f.vectors {
            assert_eq!(v.iter().filter(|x| x.abs() > 1e-10).count(), 1);
        }
    }

    #[test]
    fn non_commuting_pair_is_certified() {
        let c = Chart::euclidean(3);
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!((&a * &b - &b * &a).norm() > 0.1);
        match common_eigenframe(&[constant(a), constant(b)], &c, &[0.0; 3], &[]) {
            Err(EigenFailure::NonCommuting { pair, norm }) => {
                assert_eq!(pair, (0, 1));
                assert!(norm > 0.1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn killing_directions_are_removed() {
        let c = Chart::euclidean(3);
        let v = MomentaPolynomial::momentum(3, 2);
        let f = common_eigenframe(&[metric_hamiltonian(&c)], &c, &[0.0; 3], &[v]).unwrap();
        assert_eq!(f.vectors.len(), 2);
        for x in &f.vectors {
            assert!(x[2].abs() < 1e-12);
        }
    }
}
