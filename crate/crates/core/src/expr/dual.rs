use std::ops::{Add, Div, Mul, Neg, Sub};

/// A first-order dual number `value + derivative·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub value: f64,
    pub derivative: f64,
}

impl Dual {
    pub const fn new(value: f64, derivative: f64) -> Self {
        Self { value, derivative }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    /// A variable seeded with unit derivative.
    pub const fn variable(value: f64) -> Self {
        Self::new(value, 1.0)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.value + rhs.value, self.derivative + rhs.derivative)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.value - rhs.value, self.derivative - rhs.derivative)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(
            self.value * rhs.value,
            self.value * rhs.derivative + self.derivative * rhs.value,
        )
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let q = self.value / rhs.value;
        Dual::new(q, (self.derivative - q * rhs.derivative) / rhs.value)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.derivative)
    }
}

/// Number types the expression evaluator can run on.
///
/// The evaluator checks domains on [`Scalar::value`] before calling any of
/// the partial functions here, so implementations may assume valid inputs.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    fn value(self) -> f64;
    fn is_finite(self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    /// `abs` with the convention that the derivative at 0 is 0.
    fn abs(self) -> Self;
    fn powi(self, k: i32) -> Self;
    /// `self^k` for a real constant exponent and positive base (or zero base with `k >= 1`).
    fn powf_const(self, k: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
    fn powf_const(self, k: f64) -> Self {
        f64::powf(self, k)
    }
}

impl Scalar for Dual {
    fn constant(v: f64) -> Self {
        Dual::constant(v)
    }
    fn value(self) -> f64 {
        self.value
    }
    fn is_finite(self) -> bool {
        self.value.is_finite() && self.derivative.is_finite()
    }
    fn sin(self) -> Self {
        Dual::new(self.value.sin(), self.derivative * self.value.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.value.cos(), -self.derivative * self.value.sin())
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        Dual::new(e, self.derivative * e)
    }
    fn ln(self) -> Self {
        Dual::new(self.value.ln(), self.derivative / self.value)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let d = if self.derivative == 0.0 {
            0.0
        } else {
            self.derivative / (2.0 * s)
        };
        Dual::new(s, d)
    }
    fn abs(self) -> Self {
        let sign = if self.value > 0.0 {
            1.0
        } else if self.value < 0.0 {
            -1.0
        } else {
            0.0
        };
        Dual::new(self.value.abs(), sign * self.derivative)
    }
    fn powi(self, k: i32) -> Self {
        match k {
            0 => Dual::constant(1.0),
            1 => self,
            _ => Dual::new(
                self.value.powi(k),
                f64::from(k) * self.value.powi(k - 1) * self.derivative,
            ),
        }
    }
    fn powf_const(self, k: f64) -> Self {
        let d = if self.derivative == 0.0 {
            0.0
        } else {
            k * self.value.powf(k - 1.0) * self.derivative
        };
        Dual::new(self.value.powf(k), d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_is_exact() {
        let a = Dual::new(1.5, 2.0);
        let b = Dual::new(-3.0, 0.25);
        let p = a * b;
        assert_eq!(p.value, 1.5 * -3.0);
        assert_eq!(p.derivative, 1.5 * 0.25 + 2.0 * -3.0);
    }

    #[test]
    fn quotient_rule() {
        let x = Dual::variable(2.0);
        let r = Dual::constant(1.0) / x;
        assert_eq!(r.value, 0.5);
        assert_eq!(r.derivative, -0.25);
    }

    #[test]
    fn abs_at_zero_has_zero_derivative() {
        assert_eq!(Scalar::abs(Dual::variable(0.0)).derivative, 0.0);
        assert_eq!(Scalar::abs(Dual::variable(-2.0)).derivative, -1.0);
    }

    #[test]
    fn integer_powers() {
        let x = Dual::variable(3.0);
        let c = x.powi(3);
        assert_eq!((c.value, c.derivative), (27.0, 27.0));
        let z = Dual::variable(0.0).powi(0);
        assert_eq!((z.value, z.derivative), (1.0, 0.0));
    }
}
