use serde::{Deserialize, Serialize};

use super::{Matrix, Ring};
use crate::error::{Error, Result};

/// Default size of embedding primes, in bits. Residues then fit in `u64`
/// with room for one addition.
pub const DEFAULT_PRIME_BITS: u32 = 62;

/// Number of candidates `k * L + 1` examined before giving up.
pub const PRIME_SEARCH_CANDIDATES: u64 = 1 << 24;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Montgomery multiplication for odd moduli below 2^63.
#[derive(Debug, Clone, Copy)]
struct Montgomery {
    p: u64,
    /// -p^{-1} mod 2^64
    p_neg_inv: u64,
    /// 2^128 mod p
    r2: u64,
}

impl Montgomery {
    fn new(p: u64) -> Option<Self> {
        if p % 2 == 0 || p >= 1 << 63 {
            return None;
        }
        // Newton iteration for p^{-1} mod 2^64.
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = mul_mod(r, r, p);
        Some(Self { p, p_neg_inv: inv.wrapping_neg(), r2 })
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.p_neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }
}

/// `F_p` together with a residue `u` of exact multiplicative order `L`.
///
/// The ring homomorphism `Z[e^{2 pi i / L}] -> F_p` sending the primitive
/// root to `u` lets exact cyclotomic determinants be evaluated with machine
/// integers.
#[derive(Debug, Clone)]
pub struct CyclotomicContext {
    order: u64,
    p: u64,
    u: u64,
    mont: Option<Montgomery>,
}

impl PartialEq for CyclotomicContext {
    fn eq(&self, other: &Self) -> bool {
        (self.order, self.p, self.u) == (other.order, other.p, other.u)
    }
}

impl Eq for CyclotomicContext {}

/// Serializable parameters of a context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextParams {
    pub order: u64,
    pub p: u64,
    pub u: u64,
}

impl CyclotomicContext {
    /// Validates and builds a context from explicit parameters.
    pub fn new(order: u64, p: u64, u: u64) -> Result<Self> {
        if order == 0 || !is_prime(p) || (p - 1) % order != 0 || u == 0 || u >= p {
            return Err(Error::InvariantViolated(format!(
                "invalid cyclotomic context (L={order}, p={p}, u={u})"
            )));
        }
        if !has_exact_order(u, order, p) {
            return Err(Error::InvariantViolated(format!("{u} does not have order {order} mod {p}")));
        }
        Ok(Self { order, p, u, mont: Montgomery::new(p) })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The residue image of the primitive `L`-th root of unity.
    pub fn root(&self) -> u64 {
        self.u
    }

    pub fn params(&self) -> ContextParams {
        ContextParams { order: self.order, p: self.p, u: self.u }
    }

    pub fn scalar(&self, value: u64) -> ResidueScalar {
        ResidueScalar { value: value % self.p, modulus: self.p }
    }

    /// `u^e`, i.e. the image of `e^{2 pi i e / L}`.
    pub fn root_power(&self, e: u64) -> u64 {
        pow_mod(self.u, e % self.order, self.p)
    }

    /// Converts a residue into the representation used by
    /// [`Self::fast_is_singular`].
    #[inline]
    pub fn to_fast(&self, a: u64) -> u64 {
        match &self.mont {
            Some(m) => m.to_mont(a),
            None => a,
        }
    }

    #[inline]
    fn fast_mul(&self, a: u64, b: u64) -> u64 {
        match &self.mont {
            Some(m) => m.mul(a, b),
            None => mul_mod(a, b, self.p),
        }
    }

    /// Zero test for the determinant of an `n x n` row-major matrix whose
    /// entries went through [`Self::to_fast`]. Destroys `a`.
    ///
    /// Uses fraction-free elimination: each update scales a row by a nonzero
    /// pivot, which preserves singularity and avoids inversions.
    pub fn fast_is_singular(&self, a: &mut [u64], n: usize) -> bool {
        debug_assert_eq!(a.len(), n * n);
        let p = self.p;
        for k in 0..n {
            let Some(pr) = (k..n).find(|&r| a[r * n + k] != 0) else {
                return true;
            };
            if pr != k {
                for c in k..n {
                    a.swap(pr * n + c, k * n + c);
                }
            }
            let piv = a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k];
                if f == 0 {
                    continue;
                }
                for c in k + 1..n {
                    let x = self.fast_mul(piv, a[r * n + c]);
                    let y = self.fast_mul(f, a[k * n + c]);
                    a[r * n + c] = if x >= y { x - y } else { x + p - y };
                }
            }
        }
        false
    }

    /// The context for the next prime above this one with the same order.
    pub fn next(&self) -> Result<Self> {
        search_from(self.order, self.p + 1, 0)
    }
}

fn has_exact_order(u: u64, order: u64, p: u64) -> bool {
    pow_mod(u, order, p) == 1
        && prime_factors(order).into_iter().all(|q| pow_mod(u, order / q, p) != 1)
}

fn search_from(order: u64, start: u64, min_bits: u32) -> Result<CyclotomicContext> {
    let exceeded = || Error::SearchBoundExceeded {
        order,
        min_bits,
        candidates: PRIME_SEARCH_CANDIDATES,
    };
    // first k with k * L + 1 >= start
    let mut k = start.saturating_sub(1).div_ceil(order);
    if k == 0 {
        k = 1;
    }
    if order == 1 && start <= 2 {
        return CyclotomicContext::new(1, 2, 1);
    }
    for _ in 0..PRIME_SEARCH_CANDIDATES {
        let p = k.checked_mul(order).and_then(|x| x.checked_add(1)).ok_or_else(exceeded)?;
        if p >= 1 << 63 {
            return Err(exceeded());
        }
        if is_prime(p) {
            let cofactor = (p - 1) / order;
            let u = (2..p)
                .map(|g| pow_mod(g, cofactor, p))
                .find(|&u| has_exact_order(u, order, p))
                .expect("F_p^* is cyclic, so an element of order L exists");
            return CyclotomicContext::new(order, p, u);
        }
        k += 1;
    }
    Err(exceeded())
}

/// Smallest prime `p >= 2^min_bits` with `p = 1 (mod order)`, together with a
/// residue of exact multiplicative order `order`.
pub fn find_embedding_prime(order: u64, min_bits: u32) -> Result<CyclotomicContext> {
    if order == 0 {
        return Err(Error::InvariantViolated("root-of-unity order must be positive".into()));
    }
    if min_bits >= 63 {
        return Err(Error::SearchBoundExceeded {
            order,
            min_bits,
            candidates: 0,
        });
    }
    search_from(order, 1u64 << min_bits, min_bits)
}

/// The `count` smallest embedding primes at or above `2^min_bits`.
pub fn find_embedding_primes(order: u64, min_bits: u32, count: usize) -> Result<Vec<CyclotomicContext>> {
    let mut out: Vec<CyclotomicContext> = Vec::with_capacity(count);
    for i in 0..count {
        let ctx = if i == 0 {
            find_embedding_prime(order, min_bits)?
        } else {
            out[i - 1].next()?
        };
        out.push(ctx);
    }
    Ok(out)
}

/// `u^(L/d)`, a residue of exact order `d`.
pub fn root_of_unity(ctx: &CyclotomicContext, d: u64) -> Result<ResidueScalar> {
    if d == 0 || ctx.order % d != 0 {
        return Err(Error::NotADivisor { divisor: d, order: ctx.order });
    }
    Ok(ctx.scalar(ctx.root_power(ctx.order / d)))
}

impl Ring for CyclotomicContext {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(pow_mod(a, self.p - 2, self.p))
        }
    }

    fn from_i64(&self, v: i64) -> u64 {
        let r = v.rem_euclid(self.p as i64);
        r as u64
    }

    fn root_of_unity(&self, order: u64) -> Result<u64> {
        root_of_unity(self, order).map(|s| s.value)
    }

    fn conj(&self, a: u64) -> Result<u64> {
        if a != 0 && pow_mod(a, self.order, self.p) == 1 {
            Ok(pow_mod(a, self.order - 1, self.p))
        } else {
            Err(Error::NonUnimodular)
        }
    }

    fn magnitude(&self, a: u64) -> f64 {
        if a == 0 {
            0.0
        } else {
            1.0
        }
    }

    fn is_negligible(&self, a: u64, _scale: f64) -> bool {
        a == 0
    }

    fn partial_pivoting(&self) -> bool {
        false
    }
}

/// A residue tagged with its modulus, for APIs that accept values from
/// possibly different fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueScalar {
    pub value: u64,
    pub modulus: u64,
}

/// Determinant of a matrix of tagged residues. All entries must share one
/// modulus, which must be prime.
pub fn determinant_checked(rows: &[Vec<ResidueScalar>]) -> Result<ResidueScalar> {
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: r.len() });
    }
    let Some(first) = rows.first().and_then(|r| r.first()) else {
        // empty product
        return Ok(ResidueScalar { value: 1, modulus: 0 });
    };
    let p = first.modulus;
    if let Some(bad) = rows.iter().flatten().find(|s| s.modulus != p) {
        return Err(Error::MixedContext { left: p, right: bad.modulus });
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    // Only field arithmetic is needed; any order dividing p - 1 works.
    let field = CyclotomicContext::new(1, p, 1)?;
    let m = Matrix::from_fn(n, n, |r, c| rows[r][c].value % p);
    let det = super::determinant(&field, &m)?;
    Ok(ResidueScalar { value: det, modulus: p })
}
