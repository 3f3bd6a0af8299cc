//! Arithmetic backends.
//!
//! Two interchangeable scalar rings implement [`Ring`]:
//!
//! * [`CyclotomicContext`] embeds cyclotomic integers into `F_p` with
//!   `p = 1 (mod L)`, sending the primitive `L`-th root of unity to a residue
//!   `u` of exact order `L`. A nonzero residue certifies a nonzero complex
//!   value; a zero residue only means "presumed zero".
//! * [`ComplexField`] is double-precision complex arithmetic with a
//!   configurable relative zero tolerance.
//!
//! [`determinant`] runs pivoted Gaussian elimination over either ring.

mod complex;
mod cyclotomic;
mod residue;

pub use complex::{unit_root, ComplexField, DEFAULT_EPS};
pub use cyclotomic::{cyclotomic_polynomial, euler_phi, CyclotomicElement, SparseCyclotomic};
pub use residue::{
    determinant_checked, find_embedding_prime, find_embedding_primes, gcd, is_prime, lcm,
    prime_factors, root_of_unity, ContextParams, CyclotomicContext, ResidueScalar, DEFAULT_PRIME_BITS,
    PRIME_SEARCH_CANDIDATES,
};

use std::fmt::Debug;

use crate::error::{Error, Result};

/// A commutative ring with enough structure to evaluate Gabor determinants.
pub trait Ring: Send + Sync {
    type Elem: Copy + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for (numerical) zero.
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, v: i64) -> Self::Elem;

    /// A primitive root of unity of the given order.
    fn root_of_unity(&self, order: u64) -> Result<Self::Elem>;

    /// Complex conjugation. The residue backend can only conjugate roots of
    /// unity (where conjugation is inversion).
    fn conj(&self, a: Self::Elem) -> Result<Self::Elem>;

    /// Size used for pivot selection; zero exactly when `a` is an exact zero.
    fn magnitude(&self, a: Self::Elem) -> f64;

    /// Zero test at a given scale. Exact backends ignore the scale.
    fn is_negligible(&self, a: Self::Elem, scale: f64) -> bool;

    /// Whether pivot selection should maximize magnitude (floating point) or
    /// take the first nonzero entry (exact).
    fn partial_pivoting(&self) -> bool;

    fn pow(&self, a: Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy> Matrix<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data has the wrong length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix whose `c`-th column is `columns[c]`.
    pub fn from_columns(columns: &[Vec<E>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Self::from_fn(rows, cols, |r, c| columns[c][r])
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ring.one() } else { ring.zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> E {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn map<F: Copy>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

/// Determinant by Gaussian elimination over `ring`.
///
/// Floating point rings use partial pivoting; exact rings take the first
/// nonzero pivot.
pub fn determinant<R: Ring>(ring: &R, matrix: &Matrix<R::Elem>) -> Result<R::Elem> {
    let n = matrix.rows();
    if n != matrix.cols() {
        return Err(Error::NotSquare { rows: n, cols: matrix.cols() });
    }
    let mut a = matrix.clone();
    let mut det = ring.one();
    for k in 0..n {
        let mut pivot = k;
        let mut best = ring.magnitude(a.get(k, k));
        for r in k + 1..n {
            if !ring.partial_pivoting() && best > 0.0 {
                break;
            }
            let w = ring.magnitude(a.get(r, k));
            if w > best {
                best = w;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Ok(ring.zero());
        }
        if pivot != k {
            a.swap_rows(pivot, k);
            det = ring.neg(det);
        }
        let p = a.get(k, k);
        det = ring.mul(det, p);
        let p_inv = ring.inv(p).expect("nonzero pivot is invertible");
        for r in k + 1..n {
            let factor = ring.mul(a.get(r, k), p_inv);
            if ring.magnitude(factor) == 0.0 {
                continue;
            }
            for c in k + 1..n {
                let v = ring.sub(a.get(r, c), ring.mul(factor, a.get(k, c)));
                a.set(r, c, v);
            }
        }
    }
    Ok(det)
}

/// Largest entry magnitude, the reference scale for floating-point zero tests.
pub fn max_entry_magnitude<R: Ring>(ring: &R, matrix: &Matrix<R::Elem>) -> f64 {
    matrix.data().iter().map(|&x| ring.magnitude(x)).fold(0.0, f64::max)
}

/// Zero verdict for a determinant: exact equality for residues, and
/// `|det| < eps * max|a_ij|^n` for floating point.
pub fn determinant_is_zero<R: Ring>(ring: &R, det: R::Elem, matrix: &Matrix<R::Elem>) -> bool {
    let scale = max_entry_magnitude(ring, matrix).powi(matrix.rows() as i32);
    ring.is_negligible(det, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_determinant() {
        let ctx = find_embedding_prime(4, 2).unwrap();
        let id = Matrix::identity(&ctx, 3);
        assert_eq!(determinant(&ctx, &id).unwrap(), 1);
        let cf = ComplexField::default();
        let id = Matrix::identity(&cf, 3);
        assert!((determinant(&cf, &id).unwrap() - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_by_two_mod_five() {
        let ctx = find_embedding_prime(4, 2).unwrap();
        assert_eq!(ctx.prime(), 5);
        let m = Matrix::new(2, 2, vec![1, 1, 1, ctx.from_i64(-1)]);
        assert_eq!(determinant(&ctx, &m).unwrap(), 3);
    }

    #[test]
    fn non_square_is_rejected() {
        let cf = ComplexField::default();
        let m = Matrix::new(1, 2, vec![cf.one(), cf.one()]);
        assert!(matches!(determinant(&cf, &m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn duplicated_row_is_exactly_singular() {
        let ctx = find_embedding_prime(12, 40).unwrap();
        let m = Matrix::new(3, 3, vec![3, 7, 11, 5, 9, 2, 3, 7, 11]);
        assert_eq!(determinant(&ctx, &m).unwrap(), 0);
        assert!(determinant_is_zero(&ctx, 0, &m));
    }

    #[test]
    fn row_swap_negates() {
        let ctx = find_embedding_prime(12, 40).unwrap();
        let m = Matrix::new(3, 3, vec![3, 7, 11, 5, 9, 2, 4, 1, 8]);
        let mut swapped = m.clone();
        swapped.swap_rows(0, 2);
        let d = determinant(&ctx, &m).unwrap();
        let ds = determinant(&ctx, &swapped).unwrap();
        assert_eq!(ds, ctx.neg(d));
    }
}
