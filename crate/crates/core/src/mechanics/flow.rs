//! Classical fourth-order Runge-Kutta integration of Hamilton's equations.

use nalgebra::DVector;

use super::polynomial::{MomentaPolynomial, PhasePoint};
use super::MechanicsError;

/// Sampled trajectory; `points[k]` is the state at `times[k]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectory holds the start point")
    }
}

fn vector_field(h: &MomentaPolynomial, z: &PhasePoint, step: f64) -> Result<(DVector<f64>, DVector<f64>), MechanicsError> {
    let xdot = h.grad_p(z)?;
    let pdot = -h.grad_x(z, step)?;
    Ok((xdot, pdot))
}

fn shifted(z: &PhasePoint, dx: &DVector<f64>, dp: &DVector<f64>, s: f64) -> PhasePoint {
    PhasePoint {
        x: z.x.iter().zip(dx.iter()).map(|(a, b)| a + s * b).collect(),
        p: z.p.iter().zip(dp.iter()).map(|(a, b)| a + s * b).collect(),
    }
}

/// Integrates `x' = dH/dp`, `p' = -dH/dx` from `start` for time `t_end`
/// with step `dt` (the last step is shortened to land on `t_end`). Position
/// derivatives use central differences with step `fd_step`.
///
/// Leaving the domain of `H` is reported with the time of the last good
/// state.
pub fn hamiltonian_flow(
    h: &MomentaPolynomial,
    start: &PhasePoint,
    t_end: f64,
    dt: f64,
    fd_step: f64,
) -> Result<Trajectory, MechanicsError> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(MechanicsError::InvalidFlow(format!("need dt > 0 and T > 0, got dt = {dt}, T = {t_end}")));
    }
    if !h.in_domain(&start.x) {
        return Err(MechanicsError::OutsideDomain(start.x.clone()));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    times.push(0.0);
    points.push(start.clone());
    let mut z = start.clone();
    let mut t = 0.0;
    for k in 0..steps {
        let hstep = if k + 1 == steps { t_end - t } else { dt };
        let stage = |z: &PhasePoint| {
            vector_field(h, z, fd_step).map_err(|e| match e {
                MechanicsError::OutsideDomain(_) => MechanicsError::ExitedDomain { time: t },
                other => other,
            })
        };
        let (k1x, k1p) = stage(&z)?;
        let (k2x, k2p) = stage(&shifted(&z, &k1x, &k1p, hstep / 2.0))?;
        let (k3x, k3p) = stage(&shifted(&z, &k2x, &k2p, hstep / 2.0))?;
        let (k4x, k4p) = stage(&shifted(&z, &k3x, &k3p, hstep))?;
        let dx = (k1x + k2x * 2.0 + k3x * 2.0 + k4x) / 6.0;
        let dp = (k1p + k2p * 2.0 + k3p * 2.0 + k4p) / 6.0;
        z = shifted(&z, &dx, &dp, hstep);
        t = if k + 1 == steps { t_end } else { t + hstep };
        if !h.in_domain(&z.x) {
            return Err(MechanicsError::ExitedDomain { time: times[times.len() - 1] });
        }
        times.push(t);
        points.push(z.clone());
    }
    Ok(Trajectory { times, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanics::{metric_hamiltonian, Chart, DEFAULT_STEP};
    use std::sync::Arc;

    #[test]
    fn free_particle_moves_in_a_line() {
        let h = metric_hamiltonian(&Chart::euclidean(2));
        let start = PhasePoint::new(vec![0.5, -1.0], vec![0.25, 2.0]);
        let tr = hamiltonian_flow(&h, &start, 2.0, 0.1, DEFAULT_STEP).unwrap();
        let end = tr.last();
        assert!((end.x[0] - 1.0).abs() < 1e-12 && (end.x[1] - 3.0).abs() < 1e-12);
        assert!((tr.times.last().unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exit_is_reported() {
        let h = metric_hamiltonian(&Chart::euclidean(1)).with_domain(Arc::new(|x| x[0] < 1.0));
        let start = PhasePoint::new(vec![0.0], vec![1.0]);
        match hamiltonian_flow(&h, &start, 5.0, 0.01, DEFAULT_STEP) {
            Err(MechanicsError::ExitedDomain { time }) => assert!((time - 1.0).abs() < 0.02),
            other => panic!("{other:?}"),
        }
        assert!(hamiltonian_flow(&h, &start, 1.0, 0.0, DEFAULT_STEP).is_err());
    }
}
