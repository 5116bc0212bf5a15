//! Stäckel systems `S(x) C = P(x, p)` with `P_i = f_i(x_i) p_i^2 + phi_i(x_i)`,
//! their separation constants, generating functions and conjugate
//! coordinates.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::expr::Expr;
use super::quadrature::integrate;
use super::StackelError;
use crate::mechanics::{metric_hamiltonian, poisson_bracket, Chart, MechanicsError, MomentaPolynomial, PhasePoint, DEFAULT_STEP};

/// `|det S|` below this counts as singular.
pub const DET_TOL: f64 = 1e-12;
/// Absolute tolerance of the quadratures behind `W` and `Q`.
pub const QUAD_TOL: f64 = 1e-9;

/// A Stäckel system read from expressions.
#[derive(Clone, Debug)]
pub struct StackelSystem {
    name: String,
    m: usize,
    r: usize,
    s: Vec<Vec<Expr>>,
    f: Vec<Expr>,
    phi: Vec<Expr>,
    intervals: Vec<(f64, f64)>,
    base: Vec<f64>,
}

/// `W = sum_i W_i` and its gradient `dW/dx_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct WValue {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Largest `|{c_i, c_j}|` seen, where it was seen, and the points skipped
/// because `S` was singular there.
#[derive(Clone, Debug)]
pub struct InvolutionReport {
    pub max_residual: f64,
    pub witness: Option<((usize, usize), PhasePoint)>,
    pub skipped: Vec<Vec<f64>>,
}

impl StackelSystem {
    /// `intervals[i]` is the admissible open range of `x_i`; the base point
    /// of the quadratures defaults to the interval midpoints.
    pub fn new(
        name: impl Into<String>,
        s: Vec<Vec<Expr>>,
        f: Vec<Expr>,
        phi: Vec<Expr>,
        intervals: Vec<(f64, f64)>,
    ) -> Result<Self, StackelError> {
        let m = f.len();
        if m == 0 || s.len() != m || s.iter().any(|row| row.len() != m) || phi.len() != m || intervals.len() != m {
            return Err(StackelError::Format {
                line: 0,
                message: format!("inconsistent sizes for m = {m}"),
            });
        }
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a < b) {
                return Err(StackelError::Format {
                    line: 0,
                    message: format!("empty interval for x{}", i + 1),
                });
            }
        }
        let all = s.iter().flatten().chain(&f).chain(&phi);
        if let Some(k) = all.flat_map(|e| e.variables(0)).find(|&k| k >= m) {
            return Err(StackelError::Format {
                line: 0,
                message: format!("x{} is not a coordinate of an m = {m} system", k + 1),
            });
        }
        let base = intervals.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
        Ok(Self {
            name: name.into(),
            m,
            r: 0,
            s,
            f,
            phi,
            intervals,
            base,
        })
    }

    pub fn with_base(mut self, base: Vec<f64>) -> Result<Self, StackelError> {
        if base.len() != self.m || !self.in_domain(&base) {
            return Err(StackelError::OutsideDomain(base));
        }
        self.base = base;
        Ok(self)
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    /// Parses the line-oriented data format:
    ///
    /// ```text
    /// # comment
    /// name: s2-elliptic
    /// m: 2
    /// r: 0
    /// S[1,1]: x
    /// f[1]: -4*x*(x-1)*(x-2)
    /// phi[1]: 0
    /// interval[1]: 1/10, 9/10
    /// base[1]: 1/2
    /// ```
    ///
    /// Indices are 1-based; `base` entries are optional.
    pub fn parse(text: &str) -> Result<Self, StackelError> {
        let mut name = None;
        let mut m = None;
        let mut r = 0;
        let mut entries: BTreeMap<(String, Vec<usize>), (usize, String)> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fmt_err = |message: String| StackelError::Format { line: line_no, message };
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| fmt_err("expected 'key: value'".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "name" => name = Some(value.to_string()),
                "m" => m = Some(value.parse::<usize>().map_err(|_| fmt_err(format!("bad m '{value}'")))?),
                "r" => r = value.parse::<usize>().map_err(|_| fmt_err(format!("bad r '{value}'")))?,
                _ => {
                    let (head, idx) = split_key(key).ok_or_else(|| fmt_err(format!("unknown key '{key}'")))?;
                    if !matches!(
                        (head, idx.len()),
                        ("S", 2) | ("f", 1) | ("phi", 1) | ("interval", 1) | ("base", 1)
                    ) {
                        return Err(fmt_err(format!("unknown key '{key}'")));
                    }
                    if entries.insert((head.to_string(), idx), (line_no, value.to_string())).is_some() {
                        return Err(fmt_err(format!("duplicate key '{key}'")));
                    }
                }
            }
        }
        let m = m.ok_or(StackelError::Format { line: 0, message: "missing 'm'".into() })?;
        let mut take = |head: &str, idx: Vec<usize>| -> Result<Option<(usize, String)>, StackelError> {
            let key = (head.to_string(), idx.clone());
            match entries.remove(&key) {
                Some(v) => Ok(Some(v)),
                None if head == "base" => Ok(None),
                None => Err(StackelError::Format {
                    line: 0,
                    message: format!(
                        "missing {head}[{}]",
                        idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
                    ),
                }),
            }
        };
        let expr = |(line, src): (usize, String)| Expr::parse(&src).map_err(|source| StackelError::Parse { line, source });
        let constant = |(line, src): (usize, String)| -> Result<f64, StackelError> {
            let e = Expr::parse(&src).map_err(|source| StackelError::Parse { line, source })?;
            e.eval_const().ok_or(StackelError::Format {
                line,
                message: format!("'{src}' must be a constant"),
            })
        };
        let mut s = Vec::with_capacity(m);
        let mut f = Vec::with_capacity(m);
        let mut phi = Vec::with_capacity(m);
        let mut intervals = Vec::with_capacity(m);
        let mut base = Vec::with_capacity(m);
        for i in 1..=m {
            let mut row = Vec::with_capacity(m);
            for j in 1..=m {
                row.push(expr(take("S", vec![i, j])?.expect("required"))?);
            }
            s.push(row);
            f.push(expr(take("f", vec![i])?.expect("required"))?);
            phi.push(expr(take("phi", vec![i])?.expect("required"))?);
            let (line, src) = take("interval", vec![i])?.expect("required");
            let (a, b) = src.split_once(',').ok_or(StackelError::Format {
                line,
                message: "interval needs 'lo, hi'".into(),
            })?;
            intervals.push((constant((line, a.to_string()))?, constant((line, b.to_string()))?));
            if let Some(v) = take("base", vec![i])? {
                base.push(constant(v)?);
            }
        }
        if let Some(((head, idx), (line, _))) = entries.into_iter().next() {
            return Err(StackelError::Format {
                line,
                message: format!("{head}{idx:?} is out of range for m = {m}"),
            });
        }
        let mut sys = Self::new(name.unwrap_or_else(|| "unnamed".into()), s, f, phi, intervals)?.with_r(r);
        if !base.is_empty() {
            if base.len() != m {
                return Err(StackelError::Format {
                    line: 0,
                    message: "give all base entries or none".into(),
                });
            }
            sys = sys.with_base(base)?;
        }
        Ok(sys)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, StackelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| StackelError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    /// Whether row `i` of `S`, `f_i` and `phi_i` read only `x_i`.
    pub fn is_separated(&self) -> bool {
        (0..self.m).all(|i| {
            let own = |e: &Expr| e.variables(i).iter().all(|&k| k == i);
            self.s[i].iter().all(own) && own(&self.f[i]) && own(&self.phi[i])
        })
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.m && x.iter().zip(&self.intervals).all(|(v, &(a, b))| *v > a && *v < b)
    }

    pub fn s_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| self.s[i][j].eval(i, x))
    }

    fn inverse_s(&self, x: &[f64]) -> Result<DMatrix<f64>, StackelError> {
        let s = self.s_matrix(x);
        let det = s.determinant();
        if !(det.abs() > DET_TOL) {
            return Err(StackelError::SingularMatrix(x.to_vec()));
        }
        s.try_inverse().ok_or_else(|| StackelError::SingularMatrix(x.to_vec()))
    }

    fn f_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m).map(|i| self.f[i].eval(i, x)).collect()
    }

    fn phi_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m).map(|i| self.phi[i].eval(i, x)).collect()
    }

    /// `c_a` as a momenta polynomial on the box of admissible intervals.
    pub fn constant_polynomial(&self, a: usize) -> MomentaPolynomial {
        let quad = {
            let sys = self.clone();
            MomentaPolynomial::quadratic(self.m, move |x| match sys.inverse_s(x) {
                Ok(inv) => {
                    let f = sys.f_values(x);
                    DMatrix::from_fn(sys.m, sys.m, |i, j| if i == j { inv[(a, i)] * f[i] } else { 0.0 })
                }
                Err(_) => DMatrix::from_element(sys.m, sys.m, f64::NAN),
            })
        };
        let scalar = {
            let sys = self.clone();
            MomentaPolynomial::scalar(self.m, move |x| match sys.inverse_s(x) {
                Ok(inv) => sys.phi_values(x).iter().enumerate().map(|(i, v)| inv[(a, i)] * v).sum(),
                Err(_) => f64::NAN,
            })
        };
        quad.add(&scalar).with_domain(self.domain_probe())
    }

    fn domain_probe(&self) -> Arc<dyn Fn(&[f64]) -> bool + Send + Sync> {
        let intervals = self.intervals.clone();
        Arc::new(move |x| x.iter().zip(&intervals).all(|(v, &(a, b))| *v > a && *v < b))
    }

    /// Chart whose metric Hamiltonian is the kinetic part of `c_1`:
    /// `g_jj = 1 / (2 (S^{-1})_{1j} f_j)`.
    pub fn chart(&self) -> Chart {
        let sys = self.clone();
        let m = self.m;
        let intervals = self.intervals.clone();
        let inner = intervals.clone();
        Chart::custom(
            format!("{} chart", self.name),
            m,
            move |x| match sys.inverse_s(x) {
                Ok(inv) => {
                    let f = sys.f_values(x);
                    DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 / (2.0 * inv[(0, i)] * f[i]) } else { 0.0 })
                }
                Err(_) => DMatrix::from_element(m, m, f64::NAN),
            },
            move |x| x.iter().zip(&inner).all(|(v, &(a, b))| *v > a && *v < b),
            intervals,
        )
    }

    /// Uniform phase point: positions in the admissible box, momenta in
    /// `[-1, 1]`.
    pub fn random_phase_point<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePoint {
        let x = self.intervals.iter().map(|&(a, b)| rng.gen_range(a..b)).collect();
        let p = (0..self.m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PhasePoint::new(x, p)
    }

    /// `(-phi_i + sum_a S_ia c_a) / f_i` at `x_i = xi`, other coordinates
    /// from `x`.
    fn radicand(&self, i: usize, c: &[f64], x: &mut [f64], xi: f64) -> f64 {
        x[i] = xi;
        let num: f64 = (0..self.m).map(|a| self.s[i][a].eval(i, x) * c[a]).sum::<f64>() - self.phi[i].eval(i, x);
        num / self.f[i].eval(i, x)
    }

    fn checked_radicand(&self, i: usize, c: &[f64], x: &mut [f64], xi: f64) -> Result<f64, StackelError> {
        let r = self.radicand(i, c, x, xi);
        if r < -1e-14 || !r.is_finite() {
            return Err(StackelError::NegativeRadicand { index: i, xi });
        }
        Ok(r.max(0.0))
    }

    fn check_arguments(&self, c: &[f64], x: &[f64], branch: &[i8]) -> Result<(), StackelError> {
        if c.len() != self.m || branch.len() != self.m {
            return Err(StackelError::DimensionMismatch { expected: self.m, got: c.len().min(branch.len()) });
        }
        if branch.iter().any(|b| b.abs() != 1) {
            return Err(StackelError::InvalidBranch(branch.to_vec()));
        }
        if !self.in_domain(x) {
            return Err(StackelError::OutsideDomain(x.to_vec()));
        }
        Ok(())
    }
}

fn split_key(key: &str) -> Option<(&str, Vec<usize>)> {
    let (head, rest) = key.split_once('[')?;
    let inner = rest.strip_suffix(']')?;
    let idx = inner
        .split(',')
        .map(|t| t.trim().parse::<usize>().ok().filter(|&v| v > 0))
        .collect::<Option<Vec<_>>>()?;
    Some((head.trim(), idx))
}

/// `C = S(x)^{-1} P(x, p)`.
pub fn stackel_constants(sys: &StackelSystem, at: &PhasePoint) -> Result<DVector<f64>, StackelError> {
    if at.x.len() != sys.m || at.p.len() != sys.m {
        return Err(StackelError::DimensionMismatch { expected: sys.m, got: at.x.len() });
    }
    let inv = sys.inverse_s(&at.x)?;
    let f = sys.f_values(&at.x);
    let phi = sys.phi_values(&at.x);
    let p = DVector::from_fn(sys.m, |i, _| f[i] * at.p[i] * at.p[i] + phi[i]);
    Ok(inv * p)
}

/// Largest `|{c_i, c_j}|` over random phase points and pairs.
pub fn verify_involution<R: Rng + ?Sized>(
    sys: &StackelSystem,
    samples: usize,
    rng: &mut R,
) -> Result<InvolutionReport, StackelError> {
    let cs: Vec<MomentaPolynomial> = (0..sys.m).map(|a| sys.constant_polynomial(a)).collect();
    let mut report = InvolutionReport {
        max_residual: 0.0,
        witness: None,
        skipped: Vec::new(),
    };
    for _ in 0..samples.max(1) {
        let at = sys.random_phase_point(rng);
        if sys.inverse_s(&at.x).is_err() {
            report.skipped.push(at.x);
            continue;
        }
        for i in 0..sys.m {
            for j in i + 1..sys.m {
                let v = match poisson_bracket(&cs[i], &cs[j], &at, DEFAULT_STEP) {
                    Ok(v) if v.is_finite() => v.abs(),
                    // A finite-difference probe crossed a singular point.
                    Ok(_) | Err(MechanicsError::OutsideDomain(_)) => {
                        report.skipped.push(at.x.clone());
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                if v > report.max_residual || report.witness.is_none() {
                    report.max_residual = report.max_residual.max(v);
                    report.witness = Some(((i, j), at.clone()));
                }
            }
        }
    }
    Ok(report)
}

/// `W = sum_i branch_i int_{base_i}^{x_i} sqrt(R_i)` with the closed-form
/// gradient `branch_i sqrt(R_i(x_i))`.
pub fn generating_w(sys: &StackelSystem, c: &[f64], x: &[f64], branch: &[i8]) -> Result<WValue, StackelError> {
    sys.check_arguments(c, x, branch)?;
    let mut value = 0.0;
    let mut gradient = Vec::with_capacity(sys.m);
    let mut probe = x.to_vec();
    for i in 0..sys.m {
        let sign = f64::from(branch[i]);
        let q = integrate(
            |xi| sys.checked_radicand(i, c, &mut probe, xi).map(f64::sqrt),
            sys.base[i],
            x[i],
            QUAD_TOL,
        )?;
        value += sign * q.value;
        gradient.push(sign * sys.checked_radicand(i, c, &mut probe, x[i])?.sqrt());
        probe[i] = x[i];
    }
    Ok(WValue { value, gradient })
}

/// Conjugate coordinates `Q_a = dW/dc_a`, differentiated under the integral:
/// `Q_a = sum_i branch_i int S_ia / (2 f_i sqrt(R_i))`.
pub fn conjugate_coordinates(sys: &StackelSystem, c: &[f64], x: &[f64], branch: &[i8]) -> Result<Vec<f64>, StackelError> {
    sys.check_arguments(c, x, branch)?;
    let mut out = vec![0.0; sys.m];
    let mut probe = x.to_vec();
    for i in 0..sys.m {
        let sign = f64::from(branch[i]);
        for (a, slot) in out.iter_mut().enumerate() {
            let q = integrate(
                |xi| {
                    let r = sys.checked_radicand(i, c, &mut probe, xi)?;
                    if r == 0.0 {
                        return Err(StackelError::NegativeRadicand { index: i, xi });
                    }
                    Ok(sys.s[i][a].eval(i, &probe) / (2.0 * sys.f[i].eval(i, &probe) * r.sqrt()))
                },
                sys.base[i],
                x[i],
                QUAD_TOL,
            )?;
            *slot += sign * q.value;
            probe[i] = x[i];
        }
    }
    Ok(out)
}

/// `|H(x, dW/dx) - c_1|` with `H` the metric Hamiltonian of `chart`.
pub fn hj_residual(chart: &Chart, w_gradient: &[f64], c1: f64, at: &[f64]) -> Result<f64, MechanicsError> {
    let h = metric_hamiltonian(chart);
    let v = h.eval(&PhasePoint::new(at.to_vec(), w_gradient.to_vec()))?;
    Ok((v - c1).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn flat_1d() -> StackelSystem {
        StackelSystem::new("line", vec![vec![e("1")]], vec![e("1")], vec![e("0")], vec![(-5.0, 5.0)])
            .unwrap()
            .with_base(vec![0.0])
            .unwrap()
    }

    #[test]
    fn diagonal_constants() {
        let sys = StackelSystem::new(
            "diag",
            vec![vec![e("1"), e("0")], vec![e("0"), e("1")]],
            vec![e("x^2 + 1"), e("2")],
            vec![e("0"), e("0")],
            vec![(-1.0, 1.0), (-1.0, 1.0)],
        )
        .unwrap();
        let at = PhasePoint::new(vec![0.5, 0.1], vec![2.0, 3.0]);
        let c = stackel_constants(&sys, &at).unwrap();
        assert!((c[0] - 1.25 * 4.0).abs() < 1e-15 && (c[1] - 18.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_solve() {
        let sys = StackelSystem::new("one", vec![vec![e("2 + x")]], vec![e("3")], vec![e("x")], vec![(0.0, 1.0)]).unwrap();
        let at = PhasePoint::new(vec![0.5], vec![2.0]);
        let c = stackel_constants(&sys, &at).unwrap();
        assert!((c[0] - (3.0 * 4.0 + 0.5) / 2.5).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let sys = StackelSystem::new(
            "sing",
            vec![vec![e("x"), e("1")], vec![e("x"), e("1")]],
            vec![e("1"), e("1")],
            vec![e("0"), e("0")],
            vec![(0.0, 2.0), (0.0, 2.0)],
        )
        .unwrap();
        let at = PhasePoint::new(vec![1.0, 1.0], vec![1.0, 1.0]);
        assert!(matches!(stackel_constants(&sys, &at), Err(StackelError::SingularMatrix(_))));
    }

    #[test]
    fn flat_line_w_is_linear() {
        let sys = flat_1d();
        let k = 1.5;
        let w = generating_w(&sys, &[k * k], &[2.0], &[1]).unwrap();
        assert!((w.value - k * 2.0).abs() < 1e-12);
        assert!((w.gradient[0] - k).abs() < 1e-15);
        let w = generating_w(&sys, &[k * k], &[2.0], &[-1]).unwrap();
        assert!((w.value + k * 2.0).abs() < 1e-12);
        assert!(generating_w(&sys, &[-1.0], &[2.0], &[1]).is_err());
        assert!(generating_w(&sys, &[1.0], &[2.0], &[0]).is_err());
    }

    #[test]
    fn parse_rejects_bad_files() {
        assert!(StackelSystem::parse("m: 1\nS[1,1]: 1\nf[1]: 1\nphi[1]: 0\n").is_err());
        let ok = "m: 1\nS[1,1]: 1\nf[1]: 1\nphi[1]: 0\ninterval[1]: -1, 1\n";
        assert!(StackelSystem::parse(ok).is_ok());
        assert!(StackelSystem::parse(&format!("{ok}S[2,1]: 1\n")).is_err());
        assert!(StackelSystem::parse(&format!("{ok}f[1]: 2\n")).is_err());
        assert!(StackelSystem::parse(&ok.replace("f[1]: 1", "f[1]: x2")).is_err());
        assert!(StackelSystem::parse(&ok.replace("-1, 1", "x, 1")).is_err());
        match StackelSystem::parse(&ok.replace("f[1]: 1", "f[1]: 1 +")) {
            Err(StackelError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
