//! Block-form metrics `g_ab(s) ds^a ds^b + h_ij(s) dt^i dt^j` adapted to `r`
//! commuting Killing vectors.
//!
//! Adapted coordinates: `s` parametrizes the leaf through a base point of the
//! distribution orthogonal to the Killing vectors (by geodesics from the base
//! point, which stay on the leaf when it is totally geodesic) and `t` moves
//! along the commuting Killing flows, `X(s, t) = Phi_t(sigma(s))`.

use nalgebra::{DMatrix, DVector};

use crate::mechanics::{
    hamiltonian_flow, metric_hamiltonian, poisson_bracket, Chart, MechanicsError, MomentaPolynomial, PhasePoint,
    DEFAULT_STEP,
};

/// Frobenius defects below this count as involutive.
pub const FROBENIUS_TOL: f64 = 1e-6;
/// Brackets of Killing momenta below this count as commuting.
pub const COMMUTE_TOL: f64 = 1e-8;
/// Gram determinants of the Killing vectors below this are non-regular.
pub const REGULAR_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum AssemblyFailure {
    /// `{P_i, P_j}` is nonzero at `at`.
    NotCommuting { pair: (usize, usize), at: PhasePoint, value: f64 },
    /// The Killing vectors are linearly dependent at this point.
    NonRegular(Vec<f64>),
    /// The orthogonal distribution fails to be involutive at `at`.
    Frobenius { at: Vec<f64>, defect: f64 },
    EmptyRegion,
    Mechanics(MechanicsError),
}

impl From<MechanicsError> for AssemblyFailure {
    fn from(e: MechanicsError) -> Self {
        Self::Mechanics(e)
    }
}

/// Metric blocks at one point in adapted coordinates.
#[derive(Clone, Debug)]
pub struct BlockSample {
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    /// `<d/ds_a, d/dt_j>`, zero for a block metric.
    pub cross: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct SeparableMetric {
    pub m: usize,
    pub r: usize,
    /// Largest Frobenius defect seen over the region.
    pub frobenius_defect: f64,
    chart: Chart,
    killing: Vec<MomentaPolynomial>,
    base: Vec<f64>,
    frame: Vec<DVector<f64>>,
    geodesic_dt: f64,
    flow_dt: f64,
}

fn killing_matrix(killing: &[MomentaPolynomial], x: &[f64]) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = killing.iter().map(|k| k.linear_coeffs(x)).collect();
    DMatrix::from_columns(&cols)
}

/// Projector onto the g-orthogonal complement of the columns of `v`.
fn projector(g: &DMatrix<f64>, v: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = g.nrows();
    if v.ncols() == 0 {
        return Some(DMatrix::identity(n, n));
    }
    let gram = v.transpose() * g * v;
    let inv = gram.try_inverse()?;
    Some(DMatrix::identity(n, n) - v * inv * v.transpose() * g)
}

fn regular(g: &DMatrix<f64>, v: &DMatrix<f64>) -> bool {
    if v.ncols() == 0 {
        return true;
    }
    let gram = v.transpose() * g * v;
    let scale: f64 = (0..gram.nrows()).map(|i| gram[(i, i)]).product();
    scale > 0.0 && gram.determinant() / scale > REGULAR_TOL
}

fn frobenius_defect(chart: &Chart, killing: &[MomentaPolynomial], x: &[f64]) -> Result<f64, AssemblyFailure> {
    let n = chart.dim();
    let proj = |y: &[f64]| -> Result<DMatrix<f64>, AssemblyFailure> {
        let g = chart.metric(y)?;
        projector(&g, &killing_matrix(killing, y)).ok_or_else(|| AssemblyFailure::NonRegular(y.to_vec()))
    };
    let h = DEFAULT_STEP;
    // dP[k] = d(Pi)/dx_k, Richardson-extrapolated.
    let mut dp = Vec::with_capacity(n);
    let mut y = x.to_vec();
    for k in 0..n {
        let mut central = |s: f64| -> Result<DMatrix<f64>, AssemblyFailure> {
            y[k] = x[k] + s;
            let a = proj(&y)?;
            y[k] = x[k] - s;
            let b = proj(&y)?;
            y[k] = x[k];
            Ok((a - b) / (2.0 * s))
        };
        let c = central(h)?;
        let f = central(h / 2.0)?;
        dp.push((f * 4.0 - c) / 3.0);
    }
    let p = proj(x)?;
    let g = chart.metric(x)?;
    let v = killing_matrix(killing, x);
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            // [Y_a, Y_b] with Y_c = Pi e_c.
            let ya = p.column(a);
            let yb = p.column(b);
            let mut br = DVector::zeros(n);
            for k in 0..n {
                br += dp[k].column(b) * ya[k] - dp[k].column(a) * yb[k];
            }
            for j in 0..v.ncols() {
                let vj = v.column(j);
                let norm = vj.dot(&(&g * vj)).sqrt();
                worst = worst.max(br.dot(&(&g * vj)).abs() / norm);
            }
        }
    }
    Ok(worst)
}

/// Checks the preconditions and involutivity at every point of `region`
/// and builds adapted coordinates based at `region[0]`.
pub fn assemble_block_metric(
    chart: &Chart,
    killing_vectors: &[MomentaPolynomial],
    region: &[Vec<f64>],
) -> Result<SeparableMetric, AssemblyFailure> {
    let n = chart.dim();
    let r = killing_vectors.len();
    if region.is_empty() || r >= n {
        return Err(AssemblyFailure::EmptyRegion);
    }
    for x in region {
        // Brackets are linear in p, so the coordinate covectors suffice.
        for k in 0..n {
            let mut p = vec![0.0; n];
            p[k] = 1.0;
            let at = PhasePoint::new(x.clone(), p);
            for i in 0..r {
                for j in i + 1..r {
                    let v = poisson_bracket(&killing_vectors[i], &killing_vectors[j], &at, DEFAULT_STEP)?;
                    if v.abs() > COMMUTE_TOL {
                        return Err(AssemblyFailure::NotCommuting { pair: (i, j), at, value: v });
                    }
                }
            }
        }
        if !regular(&chart.metric(x)?, &killing_matrix(killing_vectors, x)) {
            return Err(AssemblyFailure::NonRegular(x.clone()));
        }
    }
    let mut defect: f64 = 0.0;
    for x in region {
        let d = frobenius_defect(chart, killing_vectors, x)?;
        if d > FROBENIUS_TOL {
            return Err(AssemblyFailure::Frobenius { at: x.clone(), defect: d });
        }
        defect = defect.max(d);
    }

    // g-orthonormal basis of the orthogonal complement at the base point.
    let base = region[0].clone();
    let g = chart.metric(&base)?;
    let p = projector(&g, &killing_matrix(killing_vectors, &base)).ok_or(AssemblyFailure::NonRegular(base.clone()))?;
    let mut frame: Vec<DVector<f64>> = Vec::new();
    for k in 0..n {
        let mut v = p.column(k).into_owned();
        for e in &frame {
            let c = e.dot(&(&g * &v));
            v -= e * c;
        }
        let len = v.dot(&(&g * &v)).sqrt();
        if len > 1e-8 {
            frame.push(v / len);
        }
        if frame.len() == n - r {
            break;
        }
    }
    Ok(SeparableMetric {
        m: n - r,
        r,
        frobenius_defect: defect,
        chart: chart.clone(),
        killing: killing_vectors.to_vec(),
        base,
        frame,
        geodesic_dt: 1e-2,
        flow_dt: 1e-3,
    })
}

impl SeparableMetric {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    /// Steps of the slice geodesics and of the Killing flows.
    pub fn with_steps(mut self, geodesic_dt: f64, flow_dt: f64) -> Self {
        self.geodesic_dt = geodesic_dt;
        self.flow_dt = flow_dt;
        self
    }

    /// `sigma(s) = exp_base(sum_a s_a e_a)`.
    pub fn slice_point(&self, s: &[f64]) -> Result<Vec<f64>, MechanicsError> {
        if s.len() != self.m {
            return Err(MechanicsError::DimensionMismatch { expected: self.m, got: s.len() });
        }
        if s.iter().all(|v| *v == 0.0) {
            return Ok(self.base.clone());
        }
        let v = self.frame.iter().zip(s).fold(DVector::zeros(self.base.len()), |acc, (e, c)| acc + e * *c);
        let p = self.chart.metric(&self.base)? * v;
        let h = metric_hamiltonian(&self.chart);
        let start = PhasePoint::new(self.base.clone(), p.iter().copied().collect());
        Ok(hamiltonian_flow(&h, &start, 1.0, self.geodesic_dt, DEFAULT_STEP)?.last().x.clone())
    }

    /// Flows `x` by time `t[j]` along Killing vector `j` (RK4).
    pub fn translate(&self, x: &[f64], t: &[f64]) -> Result<Vec<f64>, MechanicsError> {
        if t.len() != self.r {
            return Err(MechanicsError::DimensionMismatch { expected: self.r, got: t.len() });
        }
        let mut y = DVector::from_column_slice(x);
        for (k, &tk) in self.killing.iter().zip(t) {
            if tk == 0.0 {
                continue;
            }
            let steps = (tk.abs() / self.flow_dt).ceil().max(1.0) as usize;
            let h = tk / steps as f64;
            let field = |z: &DVector<f64>| -> Result<DVector<f64>, MechanicsError> {
                if !self.chart.contains(z.as_slice()) {
                    return Err(MechanicsError::OutsideDomain(z.iter().copied().collect()));
                }
                Ok(k.linear_coeffs(z.as_slice()))
            };
            for _ in 0..steps {
                let k1 = field(&y)?;
                let k2 = field(&(&y + &k1 * (h / 2.0)))?;
                let k3 = field(&(&y + &k2 * (h / 2.0)))?;
                let k4 = field(&(&y + &k3 * h))?;
                y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            }
        }
        Ok(y.iter().copied().collect())
    }

    /// `X(s, t)`.
    pub fn point(&self, s: &[f64], t: &[f64]) -> Result<Vec<f64>, MechanicsError> {
        self.translate(&self.slice_point(s)?, t)
    }

    /// Metric blocks at `X(s, t)`; `d/ds` by Richardson-extrapolated central
    /// differences, `d/dt_j = V_j`.
    pub fn blocks_at(&self, s: &[f64], t: &[f64]) -> Result<BlockSample, MechanicsError> {
        let x = self.point(s, t)?;
        let n = x.len();
        let step = 1e-4;
        let mut ds = DMatrix::zeros(n, self.m);
        let mut probe = s.to_vec();
        for a in 0..self.m {
            let mut central = |h: f64| -> Result<DVector<f64>, MechanicsError> {
                probe[a] = s[a] + h;
                let plus = DVector::from_vec(self.point(&probe, t)?);
                probe[a] = s[a] - h;
                let minus = DVector::from_vec(self.point(&probe, t)?);
                probe[a] = s[a];
                Ok((plus - minus) / (2.0 * h))
            };
            let c = central(step)?;
            let f = central(step / 2.0)?;
            ds.set_column(a, &((f * 4.0 - c) / 3.0));
        }
        let g = self.chart.metric(&x)?;
        let v = killing_matrix(&self.killing, &x);
        Ok(BlockSample {
            g: ds.transpose() * &g * &ds,
            h: v.transpose() * &g * &v,
            cross: ds.transpose() * &g * &v,
        })
    }

    pub fn g_block(&self, s: &[f64]) -> Result<DMatrix<f64>, MechanicsError> {
        Ok(self.blocks_at(s, &vec![0.0; self.r])?.g)
    }

    pub fn h_block(&self, s: &[f64]) -> Result<DMatrix<f64>, MechanicsError> {
        let x = self.slice_point(s)?;
        let g = self.chart.metric(&x)?;
        let v = killing_matrix(&self.killing, &x);
        Ok(v.transpose() * g * v)
    }

    /// Largest change of either block between `t = 0` and the given
    /// translates, over the given slice points.
    pub fn translation_defect(&self, slice: &[Vec<f64>], translates: &[Vec<f64>]) -> Result<f64, MechanicsError> {
        let zero = vec![0.0; self.r];
        let mut worst: f64 = 0.0;
        for s in slice {
            let b0 = self.blocks_at(s, &zero)?;
            for t in translates {
                let b = self.blocks_at(s, t)?;
                worst = worst.max((&b.g - &b0.g).amax()).max((&b.h - &b0.h).amax());
            }
        }
        Ok(worst)
    }
}
