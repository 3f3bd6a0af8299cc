use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{unit_root, CyclotomicContext, Ring};
use crate::error::{Error, Result};

pub fn euler_phi(n: u64) -> u64 {
    super::prime_factors(n).into_iter().fold(n, |acc, q| acc / q * (q - 1))
}

/// Coefficients (lowest degree first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            num = div_exact_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

/// Exact quotient of `a` by the monic polynomial `b`.
fn div_exact_monic(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    let mut q = vec![0i64; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = rem[i + db];
        q[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            rem[i + j] -= c * bj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "division was not exact");
    q
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn rem_monic(a: &[i64], m: &[i64]) -> Vec<i64> {
    let dm = m.len() - 1;
    let mut rem = a.to_vec();
    for i in (dm..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        for (j, &mj) in m.iter().enumerate() {
            rem[i - dm + j] -= c * mj;
        }
    }
    rem.truncate(dm);
    rem
}

/// An element of `Z[w]`, `w = e^{2 pi i / n}`, stored as a polynomial in `w`
/// modulo `w^n - 1`. Equality and display go through the canonical
/// representative modulo the `n`-th cyclotomic polynomial.
#[derive(Debug, Clone)]
pub struct CyclotomicElement {
    order: u64,
    coeffs: Vec<i64>,
}

impl CyclotomicElement {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1, "order must be positive");
        Self { order, coeffs: vec![0; order as usize] }
    }

    pub fn from_int(order: u64, v: i64) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[0] = v;
        out
    }

    pub fn one(order: u64) -> Self {
        Self::from_int(order, 1)
    }

    /// `w^k` for any integer `k`.
    pub fn root_power(order: u64, k: i64) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[k.rem_euclid(order as i64) as usize] = 1;
        out
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Adds `c * w^k` in place.
    pub fn add_term(&mut self, c: i64, k: i64) {
        let idx = k.rem_euclid(self.order as i64) as usize;
        self.coeffs[idx] += c;
    }

    /// Canonical coefficients modulo the cyclotomic polynomial, lowest degree
    /// first, of length `phi(n)`.
    pub fn canonical(&self) -> Vec<i64> {
        rem_monic(&self.coeffs, &cyclotomic_polynomial(self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().iter().all(|&c| c == 0)
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| unit_root(k as i64, self.order) * c as f64)
            .sum()
    }

    /// Image in `F_p` under `w -> u^(L/n)`.
    pub fn to_residue(&self, ctx: &CyclotomicContext) -> Result<u64> {
        if ctx.order() % self.order != 0 {
            return Err(Error::NotADivisor { divisor: self.order, order: ctx.order() });
        }
        let step = ctx.order() / self.order;
        Ok(self.coeffs.iter().enumerate().fold(0, |acc, (k, &c)| {
            if c == 0 {
                acc
            } else {
                ctx.add(acc, ctx.mul(ctx.from_i64(c), ctx.root_power(k as u64 * step)))
            }
        }))
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(self.order, other.order, "cyclotomic elements of different orders");
    }
}

impl PartialEq for CyclotomicElement {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.canonical() == other.canonical()
    }
}

impl Eq for CyclotomicElement {}

impl Add for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn add(self, rhs: &CyclotomicElement) -> CyclotomicElement {
        self.check_order(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        CyclotomicElement { order: self.order, coeffs }
    }
}

impl Sub for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn sub(self, rhs: &CyclotomicElement) -> CyclotomicElement {
        self.check_order(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        CyclotomicElement { order: self.order, coeffs }
    }
}

impl Mul for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn mul(self, rhs: &CyclotomicElement) -> CyclotomicElement {
        self.check_order(rhs);
        let n = self.order as usize;
        let mut coeffs = vec![0i64; n];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (j, &b) in rhs.coeffs.iter().enumerate().filter(|(_, &b)| b != 0) {
                coeffs[(i + j) % n] += a * b;
            }
        }
        CyclotomicElement { order: self.order, coeffs }
    }
}

impl Neg for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn neg(self) -> CyclotomicElement {
        CyclotomicElement { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CyclotomicElement {
            type Output = CyclotomicElement;
            fn $m(self, rhs: CyclotomicElement) -> CyclotomicElement {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Renders the canonical form with descending powers, e.g. `ω−1`, `−2ω^2+3`.
impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let canon = self.canonical();
        let mut first = true;
        for (k, &c) in canon.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                f.write_str("\u{2212}")?;
            } else if !first {
                f.write_str("+")?;
            }
            let a = c.unsigned_abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if k == 1 {
                        f.write_str("ω")?;
                    } else {
                        write!(f, "ω^{k}")?;
                    }
                }
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A sparse integer combination `sum c * z^e` of powers of a primitive root
/// `z` of the given order. Not canonical; used to describe exact window
/// entries independently of any particular prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseCyclotomic {
    pub order: u64,
    pub terms: Vec<(i64, u64)>,
}

impl SparseCyclotomic {
    pub fn root_power(order: u64, e: u64) -> Self {
        Self { order, terms: vec![(1, e % order)] }
    }

    pub fn integer(order: u64, v: i64) -> Self {
        Self { order, terms: vec![(v, 0)] }
    }

    /// `re + im * i`, where `i = z^(order/4)`.
    pub fn gaussian(order: u64, re: i64, im: i64) -> Result<Self> {
        if order % 4 != 0 {
            return Err(Error::NotADivisor { divisor: 4, order });
        }
        Ok(Self { order, terms: vec![(re, 0), (im, order / 4)] })
    }

    /// Exponent `e` when the value is exactly `z^e`.
    pub fn as_root_power(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [(1, e)] => Some(*e),
            _ => None,
        }
    }

    pub fn eval_complex(&self) -> Complex64 {
        self.terms.iter().map(|&(c, e)| unit_root(e as i64, self.order) * c as f64).sum()
    }

    pub fn eval_residue(&self, ctx: &CyclotomicContext) -> Result<u64> {
        if ctx.order() % self.order != 0 {
            return Err(Error::NotADivisor { divisor: self.order, order: ctx.order() });
        }
        let step = ctx.order() / self.order;
        Ok(self.terms.iter().fold(0, |acc, &(c, e)| {
            ctx.add(acc, ctx.mul(ctx.from_i64(c), ctx.root_power(e * step)))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::find_embedding_prime;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        for n in 1..40 {
            assert_eq!(cyclotomic_polynomial(n).len() as u64 - 1, euler_phi(n));
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(81), 54);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(625), 500);
    }

    #[test]
    fn reduction_identifies_equal_values() {
        // 1 + w + w^2 = 0 for n = 3
        let mut s = CyclotomicElement::zero(3);
        for k in 0..3 {
            s.add_term(1, k);
        }
        assert!(s.is_zero());
        // 1 - w^2 = w + 2 for n = 3
        let lhs = &CyclotomicElement::one(3) - &CyclotomicElement::root_power(3, 2);
        let mut rhs = CyclotomicElement::from_int(3, 2);
        rhs.add_term(1, 1);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_forms() {
        let w = CyclotomicElement::root_power(3, 1);
        let one = CyclotomicElement::one(3);
        assert_eq!((&w - &one).to_string(), "ω\u{2212}1");
        assert_eq!(CyclotomicElement::zero(5).to_string(), "0");
        assert_eq!(CyclotomicElement::root_power(2, 1).to_string(), "\u{2212}1");
        assert_eq!(CyclotomicElement::root_power(5, 3).to_string(), "ω^3");
    }

    #[test]
    fn residue_and_complex_images_agree_on_zero() {
        let ctx = find_embedding_prime(12, 40).unwrap();
        for n in [2u64, 3, 4, 6, 12] {
            let mut s = CyclotomicElement::zero(n);
            for k in 0..n as i64 {
                s.add_term(1, k);
            }
            assert_eq!(s.to_residue(&ctx).unwrap(), 0);
            assert!(s.to_complex().norm() < 1e-12);
        }
    }

    #[test]
    fn sparse_gaussian_integer() {
        let g = SparseCyclotomic::gaussian(12, 2, -3).unwrap();
        let c = g.eval_complex();
        assert!((c - Complex64::new(2.0, -3.0)).norm() < 1e-12);
        assert!(SparseCyclotomic::gaussian(6, 1, 1).is_err());
        let ctx = find_embedding_prime(12, 30).unwrap();
        let i = ctx.root_power(3);
        let expect = ctx.sub(2, ctx.mul(3, i));
        assert_eq!(g.eval_residue(&ctx).unwrap(), expect);
    }
}
