//! Cotangent-chart mechanics: momenta polynomials, Poisson brackets,
//! Hamiltonian flows, momentum maps, Killing checks, common eigenframes and
//! Haantjes torsion.
//!
//! Bracket convention: `{F, G} = sum_i dF/dp_i dG/dx^i - dF/dx^i dG/dp_i`, so
//! `{p_i, x^j} = delta_ij` and `dF/dt = {H, F}` along the flow of `H` with
//! Hamilton's equations `x' = dH/dp`, `p' = -dH/dx`.

pub mod chart;
pub mod eigen;
pub mod flow;
pub mod haantjes;
pub mod momentum;
pub mod polynomial;

use rand::Rng;
use thiserror::Error;

pub use chart::{Chart, ChartKind};
pub use eigen::{common_eigenframe, EigenFailure, Eigenframe};
pub use flow::{hamiltonian_flow, Trajectory};
pub use haantjes::{haantjes_torsion, nijenhuis_torsion};
pub use momentum::{killing_field, model_momentum_map, momentum_map, HOMOMORPHISM_SIGN};
pub use polynomial::{MomentaPolynomial, PhasePoint};

/// Default finite-difference step for position derivatives.
pub const DEFAULT_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanicsError {
    #[error("point {0:?} is outside the chart domain")]
    OutsideDomain(Vec<f64>),
    #[error("metric is singular at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("vector has length {got}, chart dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("trajectory left the chart domain at t = {time}")]
    ExitedDomain { time: f64 },
    #[error("product would exceed degree two in the momenta")]
    DegreeOverflow,
    #[error("invalid integration parameters: {0}")]
    InvalidFlow(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// `{F, G}` at a phase point; momentum derivatives exact, position
/// derivatives by Richardson-extrapolated central differences.
pub fn poisson_bracket(
    f: &MomentaPolynomial,
    g: &MomentaPolynomial,
    at: &PhasePoint,
    step: f64,
) -> Result<f64, MechanicsError> {
    let fp = f.grad_p(at)?;
    let gp = g.grad_p(at)?;
    let fx = if g.degree() > 0 { Some(f.grad_x(at, step)?) } else { None };
    let gx = g.grad_x(at, step)?;
    let mut s = fp.dot(&gx);
    if let Some(fx) = fx {
        s -= fx.dot(&gp);
    }
    Ok(s)
}

/// `H(x, p) = 1/2 g^{ij}(x) p_i p_j`.
pub fn metric_hamiltonian(chart: &Chart) -> MomentaPolynomial {
    let c = chart.clone();
    let n = chart.dim();
    MomentaPolynomial::quadratic(n, move |x| {
        c.inverse_metric(x)
            .map(|gi| gi * 0.5)
            .unwrap_or_else(|_| nalgebra::DMatrix::from_element(n, n, f64::NAN))
    })
    .with_domain(chart.domain().clone())
}

/// `H` checked for invertibility of the metric at a probe point.
pub fn metric_hamiltonian_at(chart: &Chart, probe: &[f64]) -> Result<MomentaPolynomial, MechanicsError> {
    chart.inverse_metric(probe)?;
    Ok(metric_hamiltonian(chart))
}

/// Maximum of `|{H, K}|` over random phase points of the chart.
pub fn killing_check<R: Rng + ?Sized>(
    k: &MomentaPolynomial,
    chart: &Chart,
    samples: usize,
    rng: &mut R,
) -> Result<f64, MechanicsError> {
    let h = metric_hamiltonian(chart);
    let mut worst: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let at = chart.random_phase_point(rng);
        worst = worst.max(poisson_bracket(&h, k, &at, DEFAULT_STEP)?.abs());
    }
    Ok(worst)
}
