use std::f64::consts::TAU;

use num_complex::Complex64;

use super::Ring;
use crate::error::{Error, Result};

/// Default relative zero tolerance.
pub const DEFAULT_EPS: f64 = 1e-8;

/// `e^{2 pi i k / order}`, with `k` reduced first so large exponents keep
/// full accuracy.
pub fn unit_root(k: i64, order: u64) -> Complex64 {
    let k = k.rem_euclid(order as i64) as f64;
    Complex64::from_polar(1.0, TAU * k / order as f64)
}

/// Double-precision complex arithmetic. A value is numerically zero at
/// scale `s` when its modulus is below `eps * s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexField {
    eps: f64,
}

impl ComplexField {
    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps.is_finite() {
            Ok(Self { eps })
        } else {
            Err(Error::InvariantViolated(format!("zero tolerance must be positive, got {eps}")))
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl Default for ComplexField {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS }
    }
}

impl Ring for ComplexField {
    type Elem = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn add(&self, a: Complex64, b: Complex64) -> Complex64 {
        a + b
    }

    fn sub(&self, a: Complex64, b: Complex64) -> Complex64 {
        a - b
    }

    fn mul(&self, a: Complex64, b: Complex64) -> Complex64 {
        a * b
    }

    fn neg(&self, a: Complex64) -> Complex64 {
        -a
    }

    fn inv(&self, a: Complex64) -> Option<Complex64> {
        if a.norm_sqr() == 0.0 {
            None
        } else {
            Some(a.inv())
        }
    }

    fn from_i64(&self, v: i64) -> Complex64 {
        Complex64::new(v as f64, 0.0)
    }

    fn root_of_unity(&self, order: u64) -> Result<Complex64> {
        if order == 0 {
            return Err(Error::NotADivisor { divisor: 0, order: 0 });
        }
        Ok(unit_root(1, order))
    }

    fn conj(&self, a: Complex64) -> Result<Complex64> {
        Ok(a.conj())
    }

    fn magnitude(&self, a: Complex64) -> f64 {
        a.norm()
    }

    fn is_negligible(&self, a: Complex64, scale: f64) -> bool {
        a.norm() < self.eps * scale
    }

    fn partial_pivoting(&self) -> bool {
        true
    }
}
