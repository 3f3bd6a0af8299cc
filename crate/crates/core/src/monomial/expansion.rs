use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::gabor::TimeFreqIndex;
use crate::scalar::CyclotomicElement;

use super::profile::{
    ci_monomial, next_permutation, normalize_profile, profile_of_support, shift_support, validate_support,
    Monomial,
};

/// Largest dimension accepted by [`expand_determinant`].
pub const MAX_EXPANSION_DIM: usize = 6;

/// Symbolic `det D` for a window of indeterminates `z`: the entry in row `r`
/// of column `(kappa, lambda)` is `omega^{r lambda} z_{(r - kappa) mod N}`.
/// Columns follow the order of `support`. Zero coefficients are dropped.
pub fn expand_determinant(support: &[TimeFreqIndex], n: usize) -> Result<BTreeMap<Monomial, CyclotomicElement>> {
    if n > MAX_EXPANSION_DIM {
        return Err(Error::DimensionTooLarge { n, max: MAX_EXPANSION_DIM });
    }
    validate_support(support, n)?;
    let order = n as u64;
    let mut terms: BTreeMap<Monomial, CyclotomicElement> = BTreeMap::new();
    // perm[c] = row used for column c
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1i64;
    loop {
        let mut exp = 0i64;
        let mut exps = vec![0u32; n];
        for (c, idx) in support.iter().enumerate() {
            let r = perm[c];
            exp += (r * idx.lambda) as i64;
            exps[(r + n - idx.kappa) % n] += 1;
        }
        terms
            .entry(Monomial::from_exponents(exps))
            .or_insert_with(|| CyclotomicElement::zero(order))
            .add_term(sign, exp);
        if !next_permutation_with_sign(&mut perm, &mut sign) {
            break;
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(terms)
}

fn next_permutation_with_sign(p: &mut [usize], sign: &mut i64) -> bool {
    let before = p.to_vec();
    if !next_permutation(p) {
        return false;
    }
    // one swap plus a reversal of the suffix after the pivot
    let i = (0..p.len()).find(|&i| p[i] != before[i]).expect("changed");
    let tail = p.len() - i - 1;
    let transpositions = 1 + tail / 2;
    if transpositions % 2 == 1 {
        *sign = -*sign;
    }
    true
}

/// Sign of the permutation that sorts `keys` increasingly (keys distinct).
pub fn sorting_sign<T: Ord>(keys: &[T]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            if keys[i] > keys[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `prod_{i<j} (x_j - x_i)` with `x_i = omega^{lambda_i}`.
pub fn vandermonde(order: u64, lambdas: &[usize]) -> CyclotomicElement {
    let mut acc = CyclotomicElement::one(order);
    for j in 0..lambdas.len() {
        for i in 0..j {
            let mut d = CyclotomicElement::root_power(order, lambdas[j] as i64);
            d.add_term(-1, lambdas[i] as i64);
            acc = &acc * &d;
        }
    }
    acc
}

/// The CI monomial of the normalized support and its coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct CiCoefficient {
    /// `gamma` with `Lambda' = Lambda - (gamma, 0)` normalized.
    pub shift: usize,
    pub normalized_support: Vec<TimeFreqIndex>,
    pub monomial: Monomial,
    pub coefficient: CyclotomicElement,
}

/// Coefficient of the CI monomial in `det D_{Lambda'}`, where `Lambda'` is
/// the normalized translate of `support`.
///
/// After sorting the columns by `(kappa, lambda)` the canonical class is
/// block diagonal and contributes `prod_kappa omega^{m_kappa sum lambda}
/// V(omega^{lambda_1}, ...)`; the sign is that of the sorting permutation.
pub fn ci_coefficient(support: &[TimeFreqIndex], n: usize) -> Result<CiCoefficient> {
    let profile = profile_of_support(support, n)?;
    let (shift, normalized) = normalize_profile(&profile);
    let shifted = shift_support(support, shift, n);
    let order = n as u64;
    let mut coefficient = CyclotomicElement::from_int(order, sorting_sign(&shifted));
    let m = normalized.m();
    for k in 0..n {
        let mut lambdas: Vec<usize> = shifted.iter().filter(|i| i.kappa == k).map(|i| i.lambda).collect();
        lambdas.sort_unstable();
        let total: usize = lambdas.iter().sum();
        let block = &vandermonde(order, &lambdas) * &CyclotomicElement::root_power(order, (m[k] * total) as i64);
        coefficient = &coefficient * &block;
    }
    Ok(CiCoefficient { shift, normalized_support: shifted, monomial: ci_monomial(&normalized), coefficient })
}

fn greedy(
    support: &[TimeFreqIndex],
    n: usize,
    rows: u32,
    cols: u32,
    acc: &mut Vec<u32>,
    all_choices: bool,
    out: &mut BTreeSet<Monomial>,
) {
    if cols == 0 {
        out.insert(Monomial::from_exponents(acc.clone()));
        return;
    }
    let var = |r: usize, c: usize| (r + n - support[c].kappa) % n;
    let mut best = usize::MAX;
    let mut picks = Vec::new();
    for r in (0..n).filter(|r| rows >> r & 1 == 1) {
        for c in (0..n).filter(|c| cols >> c & 1 == 1) {
            let v = var(r, c);
            if v < best {
                best = v;
                picks.clear();
            }
            if v == best {
                picks.push((r, c));
            }
        }
    }
    if !all_choices {
        picks.truncate(1);
    }
    for (r, c) in picks {
        acc[best] += 1;
        greedy(support, n, rows & !(1 << r), cols & !(1 << c), acc, all_choices, out);
        acc[best] -= 1;
    }
}

/// The greedy monomial `p_D`: repeatedly take an entry carrying the
/// smallest-index variable and delete its row and column. Ties take the
/// first entry in row-major order.
pub fn lowest_index_monomial(support: &[TimeFreqIndex], n: usize) -> Result<Monomial> {
    validate_support(support, n)?;
    if n > 32 {
        return Err(Error::DimensionTooLarge { n, max: 32 });
    }
    let mut out = BTreeSet::new();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    greedy(support, n, full, full, &mut vec![0; n], false, &mut out);
    Ok(out.into_iter().next().expect("one result"))
}

/// Largest dimension accepted by [`lowest_index_monomials_all_choices`].
pub const MAX_TIE_BREAK_DIM: usize = 5;

/// Every monomial the greedy procedure can produce over all tie-breaks.
pub fn lowest_index_monomials_all_choices(support: &[TimeFreqIndex], n: usize) -> Result<BTreeSet<Monomial>> {
    validate_support(support, n)?;
    if n > MAX_TIE_BREAK_DIM {
        return Err(Error::DimensionTooLarge { n, max: MAX_TIE_BREAK_DIM });
    }
    let mut out = BTreeSet::new();
    let full = (1u32 << n) - 1;
    greedy(support, n, full, full, &mut vec![0; n], true, &mut out);
    Ok(out)
}
