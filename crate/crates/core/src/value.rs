//! Values of characteristic functions: exact where possible, floating otherwise.

use core::fmt;
use core::ops::Mul;

pub use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::arith::{frac, Rational};

/// A complex number that stays exact while every factor is exact.
///
/// Canonical form: `Phase` is used only for nonzero values whose turn is not
/// 0 or 1/2; those are folded into `Rational`. Exact and approximate values
/// never compare equal structurally; use [`Value::approx_eq`] across paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Rational(Rational),
    /// `modulus · exp(2πi·turn)`, `modulus > 0`, `turn ∈ [0, 1)`.
    Phase { modulus: Rational, turn: Rational },
    Approx(Complex64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        Value::Rational(Rational::one())
    }

    pub fn rational(r: Rational) -> Self {
        Value::Rational(r)
    }

    /// `modulus · exp(2πi·turn)`, canonicalised. Negative moduli rotate by 1/2.
    pub fn polar(modulus: Rational, turn: Rational) -> Self {
        let (modulus, turn) = if modulus.is_negative() {
            (-modulus, turn + Rational::new(1, 2))
        } else {
            (modulus, turn)
        };
        if modulus.is_zero() {
            return Self::zero();
        }
        let turn = frac(turn);
        if turn.is_zero() {
            Value::Rational(modulus)
        } else if turn == Rational::new(1, 2) {
            Value::Rational(-modulus)
        } else {
            Value::Phase { modulus, turn }
        }
    }

    pub fn unit(turn: Rational) -> Self {
        Self::polar(Rational::one(), turn)
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Value::Approx(_))
    }

    /// Exact zero. Approximate values are never reported as zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, Value::Rational(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Value::Rational(r) if r.is_one())
    }

    fn exact_polar(&self) -> Option<(Rational, Rational)> {
        match *self {
            Value::Rational(r) if r.is_negative() => Some((-r, Rational::new(1, 2))),
            Value::Rational(r) => Some((r, Rational::zero())),
            Value::Phase { modulus, turn } => Some((modulus, turn)),
            Value::Approx(_) => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match *self {
            Value::Rational(r) => Complex64::new(rat_f64(r), 0.0),
            Value::Phase { modulus, turn } => {
                let angle = 2.0 * core::f64::consts::PI * rat_f64(turn);
                Complex64::new(libm::cos(angle), libm::sin(angle)) * rat_f64(modulus)
            }
            Value::Approx(z) => z,
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            Value::Rational(r) => Value::Rational(r),
            Value::Phase { modulus, turn } => Self::polar(modulus, -turn),
            Value::Approx(z) => Value::Approx(z.conj()),
        }
    }

    /// `|v|²`, exact when `v` is.
    pub fn norm_sqr(&self) -> Self {
        match self.exact_polar() {
            Some((m, _)) => Value::Rational(m * m),
            None => Value::Approx(Complex64::new(self.to_complex().norm_sqr(), 0.0)),
        }
    }

    /// `|v|` as an exact rational, when exact.
    pub fn exact_modulus(&self) -> Option<Rational> {
        self.exact_polar().map(|(m, _)| m)
    }

    pub fn modulus(&self) -> f64 {
        match self.exact_modulus() {
            Some(m) => rat_f64(m),
            None => self.to_complex().norm(),
        }
    }

    pub fn distance(&self, other: &Value) -> f64 {
        if self.is_exact() && other.is_exact() && self == other {
            return 0.0;
        }
        (self.to_complex() - other.to_complex()).norm()
    }

    /// Exact equality when both sides are exact, `|a - b| <= tol` otherwise.
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        if self.is_exact() && other.is_exact() {
            self == other
        } else {
            self.distance(other) <= tol
        }
    }

    /// Integer power.
    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Value::one(), |acc, _| acc * *self)
    }
}

pub(crate) fn rat_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Mul for Value {
    type Output = Value;

    fn mul(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a * b),
            (a, b) => match (a.exact_polar(), b.exact_polar()) {
                (Some((ma, ta)), Some((mb, tb))) => Value::polar(ma * mb, ta + tb),
                _ => {
                    if a.is_zero() || b.is_zero() {
                        Value::zero()
                    } else {
                        Value::Approx(a.to_complex() * b.to_complex())
                    }
                }
            },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(r) => write!(f, "{r}"),
            Value::Phase { modulus, turn } => write!(f, "{modulus}·e(2πi·{turn})"),
            Value::Approx(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn polar_canonicalises() {
        assert_eq!(Value::polar(r(1, 2), r(1, 2)), Value::Rational(r(-1, 2)));
        assert_eq!(Value::polar(r(0, 1), r(1, 3)), Value::zero());
        assert_eq!(Value::polar(r(-1, 1), r(0, 1)), Value::Rational(r(-1, 1)));
        assert_eq!(Value::unit(r(5, 4)), Value::Phase { modulus: r(1, 1), turn: r(1, 4) });
    }

    #[test]
    fn exact_products_stay_exact() {
        let i = Value::unit(r(1, 4));
        assert_eq!(i * i, Value::Rational(r(-1, 1)));
        assert_eq!(i * i.conj(), Value::one());
        let half = Value::Rational(r(1, 2));
        assert_eq!(half * half, Value::Rational(r(1, 4)));
        assert_eq!(Value::unit(r(1, 3)).powi(3), Value::one());
    }

    #[test]
    fn approximate_path() {
        let g = Value::Approx(Complex64::new(0.5, 0.0));
        let v = g * Value::unit(r(1, 4));
        assert!(!v.is_exact());
        assert!(v.approx_eq(&Value::Approx(Complex64::new(0.0, 0.5)), 1e-12));
        assert!((g * Value::zero()).is_zero());
        assert!(Value::Rational(r(1, 2)).approx_eq(&g, 1e-12));
    }

    #[test]
    fn norms() {
        assert_eq!(Value::polar(r(1, 2), r(1, 3)).norm_sqr(), Value::Rational(r(1, 4)));
        assert_eq!(Value::Rational(r(-2, 3)).exact_modulus(), Some(r(2, 3)));
        assert!((Value::unit(r(1, 8)).to_complex().norm() - 1.0).abs() < 1e-15);
    }
}
