use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gabor::TimeFreqIndex;
use crate::scalar::{determinant, find_embedding_prime, CyclotomicContext, CyclotomicElement, Matrix, Ring};

use super::expansion::expand_determinant;
use super::profile::validate_support;

/// `Q_Lambda(x) = P_Lambda(1, x, x^4, ..., x^{(N-1)^2})` modulo one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPolynomial {
    pub n: usize,
    /// `N (N-1)^2`.
    pub degree_bound: usize,
    pub context: CyclotomicContext,
    /// Residues of the coefficients of `x^0, ..., x^{degree_bound}`.
    pub coefficients: Vec<u64>,
}

impl QPolynomial {
    /// Index of the highest nonzero residue, `None` if every residue vanishes.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|&c| c != 0)
    }

    pub fn is_nonzero(&self) -> bool {
        self.degree().is_some()
    }
}

/// Interpolates `Q_Lambda` from `N (N-1)^2 + 2` evaluations of `det D` at
/// `z_j = t^{j^2}`. The extra point makes the degree bound a real check:
/// the interpolant's top coefficient must vanish.
pub fn q_polynomial(support: &[TimeFreqIndex], n: usize, prime_bits: u32) -> Result<QPolynomial> {
    validate_support(support, n)?;
    let ctx = find_embedding_prime(n as u64, prime_bits)?;
    q_polynomial_in(support, n, &ctx)
}

pub fn q_polynomial_in(support: &[TimeFreqIndex], n: usize, ctx: &CyclotomicContext) -> Result<QPolynomial> {
    validate_support(support, n)?;
    let bound = n * (n - 1) * (n - 1);
    let points = bound + 2;
    if (points as u64) >= ctx.prime() {
        return Err(Error::InvariantViolated(format!("prime {} too small for interpolation", ctx.prime())));
    }
    let omega = ctx.root_of_unity(n as u64)?;
    let xs: Vec<u64> = (1..=points as u64).collect();
    let ys: Vec<u64> = xs
        .iter()
        .map(|&t| {
            let z: Vec<u64> = (0..n).map(|j| ctx.pow(t, (j * j) as u64)).collect();
            let m = Matrix::from_fn(n, n, |r, c| {
                let idx = support[c];
                ctx.mul(ctx.pow(omega, (r * idx.lambda) as u64), z[(r + n - idx.kappa) % n])
            });
            determinant(ctx, &m).expect("square")
        })
        .collect();
    let mut coefficients = interpolate(ctx, &xs, &ys);
    let top = coefficients.pop().expect("points > 0");
    if top != 0 {
        return Err(Error::InvariantViolated(format!(
            "interpolated Q has degree above {bound} for {}",
            crate::gabor::format_support(support)
        )));
    }
    Ok(QPolynomial { n, degree_bound: bound, context: ctx.clone(), coefficients })
}

/// Coefficients (lowest first) of the polynomial of degree `< xs.len()`
/// through the given points, by Newton divided differences.
pub fn interpolate<R: Ring>(ring: &R, xs: &[R::Elem], ys: &[R::Elem]) -> Vec<R::Elem> {
    let k = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..k {
        for i in (level..k).rev() {
            let num = ring.sub(dd[i], dd[i - 1]);
            let den = ring.sub(xs[i], xs[i - level]);
            dd[i] = ring.mul(num, ring.inv(den).expect("distinct nodes"));
        }
    }
    // Horner on the Newton form
    let mut coeffs = vec![ring.zero(); k];
    for i in (0..k).rev() {
        // coeffs <- coeffs * (x - xs[i]) + dd[i]
        let mut next = vec![ring.zero(); k];
        for d in 0..k {
            if d + 1 < k {
                next[d + 1] = ring.add(next[d + 1], coeffs[d]);
            }
            next[d] = ring.sub(next[d], ring.mul(coeffs[d], xs[i]));
        }
        next[0] = ring.add(next[0], dd[i]);
        coeffs = next;
    }
    coeffs
}

/// `Q_Lambda` from the full expansion: each monomial `z^alpha` lands on
/// `x^{sum i^2 alpha_i}`. Zero coefficients are dropped.
pub fn q_from_expansion(support: &[TimeFreqIndex], n: usize) -> Result<BTreeMap<u64, CyclotomicElement>> {
    let mut out: BTreeMap<u64, CyclotomicElement> = BTreeMap::new();
    for (mono, coeff) in expand_determinant(support, n)? {
        let slot = out.entry(mono.x_exponent()).or_insert_with(|| CyclotomicElement::zero(n as u64));
        *slot = &*slot + &coeff;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}
