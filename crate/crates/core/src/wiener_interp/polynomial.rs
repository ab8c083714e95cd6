use crate::circle_sets::ANGLE_TOL;
use crate::diophantine::UNIMODULAR_TOL;
use crate::error::{invalid, Error, Result};
use crate::linalg::{identity, CMatrix};
use crate::numeric::{turn_power, turns_of, CompensatedSum, ComplexCompensatedSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `f(z) = Σ_{n=0}^{D} c_n zⁿ`, normed by `Σ |c_n|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPolynomial {
    pub coeffs: Vec<Complex64>,
}

impl AnalyticPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        AnalyticPolynomial { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        AnalyticPolynomial { coeffs: vec![c] }
    }

    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
        coeffs[degree] = Complex64::new(1.0, 0.0);
        AnalyticPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn aplus_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).collect::<CompensatedSum>().value()
    }

    /// Value at a point of the circle given by its turn coordinate; powers
    /// are formed exactly rather than by repeated multiplication.
    pub fn eval_turns(&self, t: f64) -> Complex64 {
        let mut acc = ComplexCompensatedSum::default();
        for (n, &c) in self.coeffs.iter().enumerate() {
            acc.add(c * turn_power(t, n as i64));
        }
        acc.value()
    }

    /// Horner evaluation at an arbitrary complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

/// `f(T) = Σ c_n Tⁿ` by Horner's rule.
pub fn evaluate_on_operator(f: &AnalyticPolynomial, t: &CMatrix) -> Result<CMatrix> {
    if t.nrows() != t.ncols() {
        return invalid("operator must be square");
    }
    let n = t.nrows();
    let mut acc = CMatrix::zeros(n, n);
    for &c in f.coeffs.iter().rev() {
        acc = &acc * t + identity(n) * c;
    }
    Ok(acc)
}

/// Interpolate `values` at distinct `nodes` of the circle by a polynomial of
/// degree at most `degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct InterpolationProblem {
    nodes: Vec<Complex64>,
    values: Vec<Complex64>,
    degree: usize,
    turns: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    nodes: Vec<Complex64>,
    values: Vec<Complex64>,
    degree: usize,
}

impl TryFrom<RawProblem> for InterpolationProblem {
    type Error = Error;
    fn try_from(r: RawProblem) -> Result<Self> {
        InterpolationProblem::new(r.nodes, r.values, r.degree)
    }
}

impl From<InterpolationProblem> for RawProblem {
    fn from(p: InterpolationProblem) -> Self {
        RawProblem { nodes: p.nodes, values: p.values, degree: p.degree }
    }
}

impl InterpolationProblem {
    pub fn new(nodes: Vec<Complex64>, values: Vec<Complex64>, degree: usize) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return invalid("need as many target values as nodes, and at least one node");
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return invalid("target values must be finite");
        }
        if let Some(z) = nodes.iter().find(|z| !((z.norm() - 1.0).abs() <= UNIMODULAR_TOL)) {
            return invalid(format!("node {z} is not unimodular"));
        }
        let turns: Vec<f64> = nodes.iter().map(|&z| turns_of(z)).collect();
        for i in 0..turns.len() {
            for j in 0..i {
                let d = (turns[i] - turns[j]).rem_euclid(1.0);
                if d.min(1.0 - d) * std::f64::consts::TAU <= ANGLE_TOL {
                    return invalid(format!("nodes {} and {} coincide", nodes[i], nodes[j]));
                }
            }
        }
        if degree + 1 < nodes.len() {
            return Err(Error::Infeasible(format!(
                "degree {degree} cannot interpolate {} nodes",
                nodes.len()
            )));
        }
        Ok(InterpolationProblem { nodes, values, degree, turns })
    }

    /// Targets `ζ^{−k}` on the given nodes.
    pub fn negative_power(nodes: Vec<Complex64>, k: u64, degree: usize) -> Result<Self> {
        let values = nodes.iter().map(|&z| turn_power(turns_of(z), -(k as i64))).collect();
        Self::new(nodes, values, degree)
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `V[j][n] = ζ_jⁿ`.
    pub fn vandermonde(&self) -> CMatrix {
        CMatrix::from_fn(self.nodes.len(), self.degree + 1, |j, n| turn_power(self.turns[j], n as i64))
    }

    /// `max_j |f(ζ_j) − v_j|`.
    pub fn max_residual(&self, f: &AnalyticPolynomial) -> f64 {
        self.turns.iter().zip(&self.values).map(|(&t, &v)| (f.eval_turns(t) - v).norm()).fold(0.0, f64::max)
    }
}
