//! Shipped Stäckel systems and separation candidates.

use super::benenti::SeparationCandidate;
use super::system::StackelSystem;
use super::StackelError;
use crate::lie::{Algebra, LieElement, MatrixAlgebra};
use crate::mechanics::{metric_hamiltonian, momentum_map, Chart, MomentaPolynomial};

const SHIPPED: [(&str, &str); 4] = [
    ("s2-elliptic", include_str!("../../data/s2-elliptic.stackel")),
    ("h2-elliptic", include_str!("../../data/h2-elliptic.stackel")),
    ("euclid2", include_str!("../../data/euclid2.stackel")),
    ("s2-elliptic-corrupted", include_str!("../../data/s2-elliptic-corrupted.stackel")),
];

pub fn shipped_names() -> Vec<&'static str> {
    SHIPPED.iter().map(|(n, _)| *n).collect()
}

/// One of the systems under `data/`.
pub fn shipped(name: &str) -> Result<StackelSystem, StackelError> {
    let (_, text) = SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| StackelError::Io(format!("no shipped system named '{name}'")))?;
    StackelSystem::parse(text)
}

fn momentum(alg: MatrixAlgebra, k: usize, chart: &Chart) -> MomentaPolynomial {
    momentum_map(&Algebra::Matrix(alg).basis(k), chart).expect("generator of the chart's isometry algebra")
}

fn square(p: &MomentaPolynomial) -> MomentaPolynomial {
    p.product(p).expect("linear times linear")
}

/// Rotations of `S^2` in the `(y_1, y_2)`, `(y_0, y_1)`, `(y_0, y_2)` planes;
/// the first is `d/dphi` in the polar chart.
fn s2_rotations(chart: &Chart) -> [MomentaPolynomial; 3] {
    let so3 = MatrixAlgebra::so(3);
    [momentum(so3, 2, chart), momentum(so3, 0, chart), momentum(so3, 1, chart)]
}

/// `S^2` with the axial rotation and `2H`: surface-of-revolution separation.
pub fn s2_rotation_candidate() -> SeparationCandidate {
    let chart = Chart::sphere_polar(2);
    let [v, _, _] = s2_rotations(&chart);
    let h2 = metric_hamiltonian(&chart).scale(2.0);
    SeparationCandidate::new(chart, vec![v], vec![h2]).expect("counts match")
}

/// Tensor `2H + P_x^2` does not commute with the axial rotation.
pub fn s2_noncommuting_candidate() -> SeparationCandidate {
    let chart = Chart::sphere_polar(2);
    let [v, px, _] = s2_rotations(&chart);
    let k = metric_hamiltonian(&chart).scale(2.0).add(&square(&px));
    SeparationCandidate::new(chart, vec![v], vec![k]).expect("counts match")
}

/// Tensor `P_x^2 + P_y^2` commutes with everything but is not the metric.
pub fn s2_missing_metric_candidate() -> SeparationCandidate {
    let chart = Chart::sphere_polar(2);
    let [v, px, py] = s2_rotations(&chart);
    let k = square(&px).add(&square(&py));
    SeparationCandidate::new(chart, vec![v], vec![k]).expect("counts match")
}

/// The two diagonal generators of `su(3)`.
pub fn su3_cartan() -> [LieElement; 2] {
    let alg = Algebra::Matrix(MatrixAlgebra::su(3));
    [alg.basis(0), alg.basis(1)]
}

/// Momentum maps of the Cartan torus on the affine chart of `CP^2`.
pub fn cp2_torus() -> (Chart, Vec<MomentaPolynomial>) {
    let chart = Chart::fubini_study(2);
    let vs = su3_cartan()
        .iter()
        .map(|xi| momentum_map(xi, &chart).expect("su(3) acts on CP^2"))
        .collect();
    (chart, vs)
}

/// `CP^2` with the Cartan torus, `2H` and the Casimir of the `su(2)` acting
/// on the first two homogeneous coordinates.
pub fn cp2_cartan_candidate() -> SeparationCandidate {
    let (chart, vs) = cp2_torus();
    let su3 = MatrixAlgebra::su(3);
    // basis 0 is i(E_11 - E_22); basis 2, 3 span the (1,2) root space.
    let casimir = [0, 2, 3]
        .iter()
        .map(|&k| square(&momentum(su3, k, &chart)))
        .reduce(|a, b| a.add(&b))
        .expect("three terms");
    let h2 = metric_hamiltonian(&chart).scale(2.0);
    SeparationCandidate::new(chart, vs, vec![h2, casimir]).expect("counts match")
}

/// Rotations of `S^3` in the `(y_0, y_1)` and `(y_0, y_2)` planes, which do
/// not commute.
pub fn s3_noncommuting_rotations() -> (Chart, [LieElement; 2], Vec<MomentaPolynomial>) {
    let chart = Chart::sphere_polar(3);
    let alg = Algebra::Matrix(MatrixAlgebra::so(4));
    let xis = [alg.basis(0), alg.basis(1)];
    let vs = xis.iter().map(|xi| momentum_map(xi, &chart).expect("so(4) acts on S^3")).collect();
    (chart, xis, vs)
}
