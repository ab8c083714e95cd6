//! Small floating-point kernels shared by the search and measure code.
//!
//! Powers `ζ^n` of a unimodular number are always evaluated through its
//! turn coordinate `t = arg ζ / 2π`: the product `n·t` is formed exactly
//! with a fused multiply-add, reduced to the nearest integer, and the trig
//! functions are evaluated on the reduced residual. This keeps results exact
//! at the dyadic rationals (`ζ = ±1, ±i`) and accurate to a few ulps for
//! `n` up to `2^53`.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Exact product `a·b = hi + lo`.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    (hi, lo)
}

/// Nearest integer `p` to `q·t` and the signed residual `q·t − p`,
/// computed from the exact product so the residual carries full precision.
#[inline]
pub fn nearest_integer_residual(q: u64, t: f64) -> (i64, f64) {
    let qf = q as f64;
    let (hi, lo) = two_prod(qf, t);
    let mut p = hi.round();
    let mut r = (hi - p) + lo;
    if r > 0.5 {
        p += 1.0;
        r -= 1.0;
    } else if r < -0.5 {
        p -= 1.0;
        r += 1.0;
    }
    (p as i64, r)
}

/// Distance from `q·t` to the nearest integer.
#[inline]
pub fn dist_to_integer(q: u64, t: f64) -> f64 {
    nearest_integer_residual(q, t).1.abs()
}

/// `sin(πx)` with exact zeros at integers and exact `±1` at half-integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // Reduce to [-1, 1]; the subtraction is exact by Sterbenz.
    let r = x - 2.0 * (x * 0.5).round();
    let (sign, r) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    let v = if r <= 0.25 {
        (PI * r).sin()
    } else {
        (PI * (0.5 - r)).cos()
    };
    sign * v
}

/// `cos(πx)`, exact at integers and half-integers.
pub fn cos_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let r = (x - 2.0 * (x * 0.5).round()).abs();
    // cos(πr) = -cos(π(1-r)) for r in [1/2, 1]
    let (sign, r) = if r > 0.5 { (-1.0, 1.0 - r) } else { (1.0, r) };
    let v = if r <= 0.25 {
        (PI * r).cos()
    } else {
        (PI * (0.5 - r)).sin()
    };
    sign * v
}

/// `e^{2πi·n·t}` for a turn coordinate `t`, any sign of `n`.
pub fn turn_power(t: f64, n: i64) -> Complex64 {
    let (_, r) = nearest_integer_residual(n.unsigned_abs(), t);
    let r = if n < 0 { -r } else { r };
    Complex64::new(cos_pi(2.0 * r), sin_pi(2.0 * r))
}

/// `|e^{2πi·n·t} − 1| = 2|sin(π‖n t‖)|`.
pub fn turn_power_minus_one(t: f64, n: u64) -> f64 {
    2.0 * sin_pi(dist_to_integer(n, t)).abs()
}

/// Turn coordinate of a nonzero complex number, in `[0, 1)`.
pub fn turns_of(z: Complex64) -> f64 {
    let t = z.arg() / TAU;
    let t = if t < 0.0 { t + 1.0 } else { t };
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of complex terms (real and imaginary parts separately).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexCompensatedSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexCompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<CompensatedSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_pi_exact_points() {
        assert_eq!(sin_pi(0.0), 0.0);
        assert_eq!(sin_pi(1.0), 0.0);
        assert_eq!(sin_pi(-3.0), 0.0);
        assert_eq!(sin_pi(0.5), 1.0);
        assert_eq!(sin_pi(-0.5), -1.0);
        assert_eq!(sin_pi(1.5), -1.0);
        assert_eq!(cos_pi(1.0), -1.0);
        assert_eq!(cos_pi(0.5), 0.0);
        assert_eq!(cos_pi(2.0), 1.0);
    }

    #[test]
    fn sin_pi_matches_std() {
        for i in -500..500 {
            let x = i as f64 * 0.0137 + 0.003;
            assert!((sin_pi(x) - (PI * x).sin()).abs() < 1e-13);
            assert!((cos_pi(x) - (PI * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn residual_of_exact_products() {
        assert_eq!(nearest_integer_residual(6, 0.5), (3, 0.0));
        let (p, r) = nearest_integer_residual(3, 1.0 / 3.0);
        assert_eq!(p, 1);
        assert!(r.abs() < 1e-16);
        // q·t with q large still resolves the fractional part.
        let t = 0.1;
        let (p, r) = nearest_integer_residual(1_000_000_007, t);
        assert_eq!(p, 100_000_001);
        assert!((r + 0.3).abs() < 1e-7);
    }

    #[test]
    fn quarter_turn_powers_are_exact() {
        for n in 0..40 {
            let z = turn_power(0.25, n);
            let expect = match n % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            assert_eq!(z, expect);
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut xs = vec![1.0];
        xs.extend(std::iter::repeat(1e-16).take(10_000));
        xs.push(-1.0);
        let s = compensated_sum(xs);
        assert!((s - 1e-12).abs() < 1e-20);
    }
}
