//! The three separability conditions for `r` Killing vectors and `N - r`
//! quadratic Killing tensors: (I) involution and independence, (II) the
//! metric among the tensors, (III) a common eigenframe orthogonal to the
//! vectors.

use nalgebra::DMatrix;
use rand::Rng;

use super::StackelError;
use crate::mechanics::{
    common_eigenframe, metric_hamiltonian, poisson_bracket, Chart, EigenFailure, MomentaPolynomial, PhasePoint,
    DEFAULT_STEP,
};

/// Brackets below this count as zero.
pub const BRACKET_TOL: f64 = 1e-6;
/// Singular values of the differential above this count toward the rank.
pub const RANK_TOL: f64 = 1e-8;
/// Relative tolerance for a tensor to equal `2H`.
pub const METRIC_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SeparationCandidate {
    chart: Chart,
    killing_vectors: Vec<MomentaPolynomial>,
    killing_tensors: Vec<MomentaPolynomial>,
}

impl SeparationCandidate {
    pub fn new(
        chart: Chart,
        killing_vectors: Vec<MomentaPolynomial>,
        killing_tensors: Vec<MomentaPolynomial>,
    ) -> Result<Self, StackelError> {
        let n = chart.dim();
        let r = killing_vectors.len();
        if r >= n || killing_tensors.len() != n - r {
            return Err(StackelError::DimensionMismatch {
                expected: n.saturating_sub(r),
                got: killing_tensors.len(),
            });
        }
        if let Some(bad) = killing_vectors
            .iter()
            .chain(&killing_tensors)
            .find(|k| k.dim() != n)
        {
            return Err(StackelError::DimensionMismatch { expected: n, got: bad.dim() });
        }
        Ok(Self {
            chart,
            killing_vectors,
            killing_tensors,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn killing_vectors(&self) -> &[MomentaPolynomial] {
        &self.killing_vectors
    }

    pub fn killing_tensors(&self) -> &[MomentaPolynomial] {
        &self.killing_tensors
    }

    /// Vectors first, then tensors; pair indices in reports refer to this list.
    pub fn functions(&self) -> Vec<&MomentaPolynomial> {
        self.killing_vectors.iter().chain(&self.killing_tensors).collect()
    }
}

#[derive(Clone, Debug)]
pub struct InvolutionVerdict {
    pub pass: bool,
    pub max_bracket: f64,
    /// Pair with the largest bracket when it exceeds the tolerance.
    pub offending_pair: Option<(usize, usize)>,
    pub witness: Option<PhasePoint>,
    /// Best (largest) smallest singular value of the `N x 2N` differential.
    pub min_singular_value: f64,
    pub independent: bool,
}

#[derive(Clone, Debug)]
pub struct MetricVerdict {
    pub pass: bool,
    /// Index into the tensor list of a tensor equal to `2H`.
    pub matching_tensor: Option<usize>,
    /// Smallest relative deviation from `2H` over the tensors.
    pub best_deviation: f64,
}

#[derive(Clone, Debug)]
pub struct EigenframeVerdict {
    pub pass: bool,
    pub failure: Option<(Vec<f64>, EigenFailure)>,
}

#[derive(Clone, Debug)]
pub struct BenentiReport {
    pub involution: InvolutionVerdict,
    pub metric: MetricVerdict,
    pub eigenframe: EigenframeVerdict,
    pub pass: bool,
}

fn differential(fs: &[&MomentaPolynomial], at: &PhasePoint) -> Result<DMatrix<f64>, StackelError> {
    let n = at.dim();
    let mut d = DMatrix::zeros(fs.len(), 2 * n);
    for (k, f) in fs.iter().enumerate() {
        let gx = f.grad_x(at, DEFAULT_STEP)?;
        let gp = f.grad_p(at)?;
        for i in 0..n {
            d[(k, i)] = gx[i];
            d[(k, n + i)] = gp[i];
        }
    }
    Ok(d)
}

fn metric_deviation(k: &MomentaPolynomial, h2: &MomentaPolynomial, x: &[f64]) -> f64 {
    let g = h2.quadratic_coeffs(x);
    let scale = g.amax().max(1e-300);
    let dq = (k.quadratic_coeffs(x) - &g).amax();
    let dl = k.linear_coeffs(x).amax();
    let ds = k.scalar_coeff(x).abs();
    (dq + dl + ds) / scale
}

/// Runs the three conditions at `samples` random points of the chart.
pub fn benenti_check<R: Rng + ?Sized>(
    cand: &SeparationCandidate,
    samples: usize,
    rng: &mut R,
) -> Result<BenentiReport, StackelError> {
    let chart = &cand.chart;
    let fs = cand.functions();
    let h2 = metric_hamiltonian(chart).scale(2.0);
    let mut involution = InvolutionVerdict {
        pass: true,
        max_bracket: 0.0,
        offending_pair: None,
        witness: None,
        min_singular_value: 0.0,
        independent: false,
    };
    let mut deviations = vec![0.0f64; cand.killing_tensors.len()];
    let mut eigenframe = EigenframeVerdict { pass: true, failure: None };

    for _ in 0..samples.max(1) {
        let at = chart.random_phase_point(rng);
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                let v = poisson_bracket(fs[i], fs[j], &at, DEFAULT_STEP)?.abs();
                if v > involution.max_bracket {
                    involution.max_bracket = v;
                    if v > BRACKET_TOL {
                        involution.offending_pair = Some((i, j));
                        involution.witness = Some(at.clone());
                    }
                }
            }
        }
        let sv = differential(&fs, &at)?.singular_values();
        let smallest = if sv.len() < fs.len() { 0.0 } else { sv.min() };
        involution.min_singular_value = involution.min_singular_value.max(smallest);

        for (k, t) in cand.killing_tensors.iter().enumerate() {
            deviations[k] = deviations[k].max(metric_deviation(t, &h2, &at.x));
        }

        if eigenframe.failure.is_none() {
            if let Err(e) = common_eigenframe(&cand.killing_tensors, chart, &at.x, &cand.killing_vectors) {
                eigenframe.pass = false;
                eigenframe.failure = Some((at.x.clone(), e));
            }
        }
    }
    involution.independent = involution.min_singular_value > RANK_TOL;
    involution.pass = involution.offending_pair.is_none() && involution.independent;

    let (best, best_deviation) = deviations
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::INFINITY));
    let metric = MetricVerdict {
        pass: best_deviation < METRIC_TOL,
        matching_tensor: (best_deviation < METRIC_TOL).then_some(best),
        best_deviation,
    };
    let pass = involution.pass && metric.pass && eigenframe.pass;
    Ok(BenentiReport {
        involution,
        metric,
        eigenframe,
        pass,
    })
}
