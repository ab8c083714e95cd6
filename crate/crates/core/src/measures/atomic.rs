use crate::circle_sets::{Angle, ANGLE_TOL};
use crate::error::{invalid, Result};
use crate::numeric::{turn_power, CompensatedSum, ComplexCompensatedSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: Angle,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawMeasure {
    atoms: Vec<Atom>,
}

/// A finite positive combination of point masses on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
    /// Turn coordinates of the atoms, derived in the constructor.
    turns: Vec<f64>,
}

impl TryFrom<RawMeasure> for AtomicMeasure {
    type Error = crate::error::Error;
    fn try_from(r: RawMeasure) -> Result<Self> {
        AtomicMeasure::new(r.atoms)
    }
}

impl From<AtomicMeasure> for RawMeasure {
    fn from(m: AtomicMeasure) -> RawMeasure {
        RawMeasure { atoms: m.atoms }
    }
}

impl AtomicMeasure {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return invalid("a measure needs at least one atom");
        }
        if let Some(a) = atoms.iter().find(|a| !(a.weight > 0.0 && a.weight.is_finite())) {
            return invalid(format!("atom weight {} must be positive and finite", a.weight));
        }
        atoms.sort_by(|a, b| a.angle.radians().total_cmp(&b.angle.radians()));
        let n = atoms.len();
        for i in 0..n {
            let next = &atoms[(i + 1) % n];
            if n > 1 && atoms[i].angle.approx_eq(next.angle, ANGLE_TOL) {
                return invalid(format!("atoms at {} and {} coincide", atoms[i].angle.radians(), next.angle.radians()));
            }
        }
        let turns = atoms.iter().map(|a| a.angle.turns()).collect();
        Ok(AtomicMeasure { atoms, turns })
    }

    /// Equal weights `mass/n` on the given angles.
    pub fn uniform(angles: &[Angle], mass: f64) -> Result<Self> {
        let w = mass / angles.len().max(1) as f64;
        Self::new(angles.iter().map(|&angle| Atom { angle, weight: w }).collect())
    }

    /// Uniform measure on the `r`-th roots of unity.
    pub fn roots_of_unity(r: usize, mass: f64) -> Result<Self> {
        let angles: Vec<Angle> =
            (0..r).map(|k| Angle::new(std::f64::consts::TAU * k as f64 / r as f64)).collect::<Result<_>>()?;
        Self::uniform(&angles, mass)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn angles(&self) -> Vec<Angle> {
        self.atoms.iter().map(|a| a.angle).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).collect::<CompensatedSum>().value()
    }

    /// `μ̂(n) = Σ w_j e^{−inθ_j}`.
    pub fn fourier_coefficient(&self, n: i64) -> Complex64 {
        let mut acc = ComplexCompensatedSum::default();
        for (a, &t) in self.atoms.iter().zip(&self.turns) {
            acc.add(turn_power(t, -n) * a.weight);
        }
        acc.value()
    }

    /// `Σ w_j f(ζ_j^n)` style integrals: calls `f` with each atom's turn
    /// coordinate and weight, summing compensated.
    pub(crate) fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (a, &t) in self.atoms.iter().zip(&self.turns) {
            acc.add(a.weight * f(t));
        }
        acc.value()
    }
}

/// Depth-d self-similar approximation of a Cantor-type measure: the base arc is
/// replaced by its two end subarcs of relative length `ratio`, `depth` times, and
/// the mass is split equally over interval midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantorApproxMeasure {
    pub ratio: f64,
    pub depth: u32,
    pub mass: f64,
    pub arc_start: Angle,
    pub arc_length: f64,
}

/// Beyond this depth the rendering would exceed sixteen million atoms.
pub const MAX_CANTOR_DEPTH: u32 = 24;

impl CantorApproxMeasure {
    pub fn new(ratio: f64, depth: u32, mass: f64, arc_start: Angle, arc_length: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 0.5) {
            return invalid("Cantor ratio must lie in (0, 1/2)");
        }
        if depth > MAX_CANTOR_DEPTH {
            return invalid(format!("Cantor depth {depth} exceeds {MAX_CANTOR_DEPTH}"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return invalid("Cantor mass must be positive");
        }
        if !(arc_length > 0.0 && arc_length <= std::f64::consts::TAU) {
            return invalid("Cantor base arc length must lie in (0, 2π]");
        }
        Ok(CantorApproxMeasure { ratio, depth, mass, arc_start, arc_length })
    }

    /// Midpoints of the `2^depth` construction intervals, in radians (unreduced).
    pub fn midpoints(&self) -> Vec<f64> {
        let mut lefts = vec![self.arc_start.radians()];
        let mut len = self.arc_length;
        for _ in 0..self.depth {
            let child = len * self.ratio;
            lefts = lefts.iter().flat_map(|&x| [x, x + len - child]).collect();
            len = child;
        }
        lefts.into_iter().map(|x| x + 0.5 * len).collect()
    }

    pub fn render(&self) -> Result<AtomicMeasure> {
        let w = self.mass / (1u64 << self.depth) as f64;
        let atoms = self
            .midpoints()
            .into_iter()
            .map(|x| Ok(Atom { angle: Angle::new(x)?, weight: w }))
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure::new(atoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn trivial_coefficients() {
        let m = AtomicMeasure::new(vec![Atom { angle: Angle::new(0.0).unwrap(), weight: 2.5 }]).unwrap();
        for n in [-7, 0, 1, 1000] {
            assert_eq!(m.fourier_coefficient(n), Complex64::new(2.5, 0.0));
        }
        let r = AtomicMeasure::roots_of_unity(5, 1.0).unwrap();
        assert!((r.fourier_coefficient(0).re - 1.0).abs() < 1e-15);
        assert!(r.fourier_coefficient(3).norm() < 1e-15);
        assert!((r.fourier_coefficient(10).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_atoms() {
        let a = Angle::new(1.0).unwrap();
        assert!(AtomicMeasure::new(vec![]).is_err());
        assert!(AtomicMeasure::new(vec![Atom { angle: a, weight: 0.0 }]).is_err());
        assert!(AtomicMeasure::new(vec![Atom { angle: a, weight: 1.0 }, Atom { angle: a, weight: 1.0 }]).is_err());
    }

    #[test]
    fn cantor_rendering() {
        let c = CantorApproxMeasure::new(1.0 / 3.0, 3, 1.0, Angle::new(0.0).unwrap(), TAU).unwrap();
        let m = c.render().unwrap();
        assert_eq!(m.atoms().len(), 8);
        assert!(m.atoms().iter().all(|a| (a.weight - 0.125).abs() < 1e-16));
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
        assert!(CantorApproxMeasure::new(0.5, 3, 1.0, Angle::new(0.0).unwrap(), 1.0).is_err());
    }
}
