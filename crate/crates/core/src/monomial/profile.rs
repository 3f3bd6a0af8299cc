use std::fmt;
use std::ops::Range;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::{check_distinct, TimeFreqIndex};

/// Number of support columns with each time shift, `l_kappa`, together with
/// the prefix sums `m_kappa = l_0 + ... + l_{kappa-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnProfile {
    l: Vec<usize>,
    m: Vec<usize>,
}

impl ColumnProfile {
    pub fn new(l: Vec<usize>) -> Result<Self> {
        let n = l.len();
        if n == 0 || l.iter().sum::<usize>() != n {
            return Err(Error::InvalidSupport(format!("profile {l:?} does not sum to its length")));
        }
        let mut m = Vec::with_capacity(n + 1);
        let mut acc = 0;
        m.push(0);
        for &x in &l {
            acc += x;
            m.push(acc);
        }
        Ok(Self { l, m })
    }

    pub fn n(&self) -> usize {
        self.l.len()
    }

    pub fn l(&self) -> &[usize] {
        &self.l
    }

    /// Prefix sums `m_0, ..., m_N` (so `m_N = N`).
    pub fn m(&self) -> &[usize] {
        &self.m
    }

    /// `m_kappa - kappa` for `kappa < N`.
    pub fn offsets(&self) -> Vec<i64> {
        (0..self.n()).map(|k| self.m[k] as i64 - k as i64).collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.offsets().iter().all(|&d| d >= 0)
    }

    /// `N! / prod l_kappa!`, the number of partition classes.
    pub fn class_count(&self) -> u128 {
        let mut out: u128 = 1;
        let mut k: u128 = 0;
        for &x in &self.l {
            for i in 1..=x as u128 {
                k += 1;
                out = out * k / i;
            }
        }
        out
    }
}

impl fmt::Display for ColumnProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.l.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn profile_of_support(support: &[TimeFreqIndex], n: usize) -> Result<ColumnProfile> {
    validate_support(support, n)?;
    let mut l = vec![0; n];
    for idx in support {
        l[idx.kappa] += 1;
    }
    ColumnProfile::new(l)
}

pub(crate) fn validate_support(support: &[TimeFreqIndex], n: usize) -> Result<()> {
    if support.len() != n {
        return Err(Error::InvalidSupport(format!("support has {} indices, need {n}", support.len())));
    }
    for idx in support {
        TimeFreqIndex::new(idx.kappa, idx.lambda, n)?;
    }
    check_distinct(support)
}

/// All profiles of length `n` (compositions of `n` into `n` nonnegative
/// parts), in lexicographic order of `l`.
pub fn all_profiles(n: usize) -> Vec<ColumnProfile> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<ColumnProfile>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(ColumnProfile::new(cur.clone()).expect("composition"));
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(n, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// The consecutive blocks `A_kappa = [m_kappa, m_{kappa+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPartition {
    pub blocks: Vec<Range<usize>>,
}

impl CanonicalPartition {
    pub fn to_class(&self) -> PartitionClass {
        PartitionClass { blocks: self.blocks.iter().map(|r| r.clone().collect()).collect() }
    }
}

pub fn canonical_partition(profile: &ColumnProfile) -> CanonicalPartition {
    let m = profile.m();
    CanonicalPartition { blocks: (0..profile.n()).map(|k| m[k]..m[k + 1]).collect() }
}

/// Ordered partition `B_0, ..., B_{N-1}` of `{0, ..., N-1}`; each block is
/// kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionClass {
    blocks: Vec<Vec<usize>>,
}

impl PartitionClass {
    pub fn new(mut blocks: Vec<Vec<usize>>, profile: &ColumnProfile) -> Result<Self> {
        let n = profile.n();
        if blocks.len() != n {
            return Err(Error::ClassMismatch);
        }
        let mut seen = vec![false; n];
        for (b, &l) in blocks.iter_mut().zip(profile.l()) {
            if b.len() != l {
                return Err(Error::ClassMismatch);
            }
            for &r in b.iter() {
                if r >= n || seen[r] {
                    return Err(Error::ClassMismatch);
                }
                seen[r] = true;
            }
            b.sort_unstable();
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    fn fits(&self, profile: &ColumnProfile) -> bool {
        self.blocks.len() == profile.n() && self.blocks.iter().zip(profile.l()).all(|(b, &l)| b.len() == l)
    }
}

impl fmt::Display for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Every partition class of a profile; the canonical class comes first.
pub fn enumerate_classes(profile: &ColumnProfile) -> Vec<PartitionClass> {
    fn rec(
        k: usize,
        l: &[usize],
        free: &mut Vec<usize>,
        cur: &mut Vec<Vec<usize>>,
        out: &mut Vec<PartitionClass>,
    ) {
        if k == l.len() {
            out.push(PartitionClass { blocks: cur.clone() });
            return;
        }
        let pool = free.clone();
        let mut pick: Vec<usize> = (0..l[k]).collect();
        loop {
            let block: Vec<usize> = pick.iter().map(|&i| pool[i]).collect();
            free.retain(|r| !block.contains(r));
            cur.push(block);
            rec(k + 1, l, free, cur, out);
            cur.pop();
            *free = pool.clone();
            if !crate::glp::next_combination(&mut pick, pool.len()) {
                break;
            }
        }
    }
    let n = profile.n();
    let mut out = Vec::new();
    rec(0, profile.l(), &mut (0..n).collect(), &mut Vec::with_capacity(n), &mut out);
    out
}

/// Exponent vector `alpha_0, ..., alpha_{N-1}` of `z_0^{alpha_0} ... z_{N-1}^{alpha_{N-1}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    exponents: Vec<u32>,
}

impl Monomial {
    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    /// Monomial with one factor `z_i` per listed index.
    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut exponents = vec![0; n];
        for i in indices {
            exponents[i] += 1;
        }
        Self { exponents }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Exponent of `x` after substituting `z_n = x^{n^2}`.
    pub fn x_exponent(&self) -> u64 {
        self.exponents.iter().enumerate().map(|(i, &a)| (i * i) as u64 * a as u64).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a > 0)
            .map(|(i, &a)| if a == 1 { format!("z{i}") } else { format!("z{i}^{a}") })
            .collect();
        if factors.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&factors.join("*"))
        }
    }
}

/// The monomial with indices `(b - kappa) mod N` for `b` in `B_kappa`.
pub fn monomial_of_class(profile: &ColumnProfile, class: &PartitionClass) -> Result<Monomial> {
    if !class.fits(profile) {
        return Err(Error::ClassMismatch);
    }
    let n = profile.n();
    Ok(Monomial::from_indices(
        n,
        class.blocks.iter().enumerate().flat_map(|(k, b)| b.iter().map(move |&r| (r + n - k) % n)),
    ))
}

pub fn ci_monomial(profile: &ColumnProfile) -> Monomial {
    monomial_of_class(profile, &canonical_partition(profile).to_class()).expect("canonical class fits")
}

/// Returns `(gamma, l')` with `gamma` the smallest minimizer of `m_kappa - kappa`
/// and `l'_kappa = l_{(kappa + gamma) mod N}`.
pub fn normalize_profile(profile: &ColumnProfile) -> (usize, ColumnProfile) {
    let n = profile.n();
    let offs = profile.offsets();
    let min = *offs.iter().min().expect("nonempty profile");
    let gamma = offs.iter().position(|&d| d == min).expect("minimum exists");
    let l = (0..n).map(|k| profile.l()[(k + gamma) % n]).collect();
    (gamma, ColumnProfile::new(l).expect("rotation keeps the sum"))
}

/// `Lambda - (gamma, 0)`, keeping the order of the support.
pub fn shift_support(support: &[TimeFreqIndex], gamma: usize, n: usize) -> Vec<TimeFreqIndex> {
    support
        .iter()
        .map(|idx| TimeFreqIndex { kappa: (idx.kappa + n - gamma % n) % n, lambda: idx.lambda })
        .collect()
}

/// `[alpha, beta]` with `alpha = min(m_kappa - kappa)`, `beta = max(m_kappa - kappa)`.
/// Checks that the sets `A_kappa - kappa` cover exactly this interval and
/// that it has at most `N` points.
pub fn interval_of_profile(profile: &ColumnProfile) -> Result<(i64, i64)> {
    let n = profile.n() as i64;
    let offs = profile.offsets();
    let alpha = *offs.iter().min().expect("nonempty");
    let beta = *offs.iter().max().expect("nonempty");
    let mut covered = vec![false; (beta - alpha + 1) as usize];
    for (k, block) in canonical_partition(profile).blocks.iter().enumerate() {
        for a in block.clone() {
            let v = a as i64 - k as i64;
            if v < alpha || v > beta {
                return Err(Error::InvariantViolated(format!(
                    "{v} lies outside [{alpha}, {beta}] for profile {profile}"
                )));
            }
            covered[(v - alpha) as usize] = true;
        }
    }
    if let Some(gap) = covered.iter().position(|&c| !c) {
        return Err(Error::InvariantViolated(format!(
            "{} is not covered for profile {profile}",
            alpha + gap as i64
        )));
    }
    if beta - alpha > n - 1 {
        return Err(Error::InvariantViolated(format!("interval too long for profile {profile}")));
    }
    Ok((alpha, beta))
}

/// `E[X]` and `E[X^2]` for `P[X = i] = alpha_i / N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentPair {
    pub e: Ratio<i64>,
    pub e2: Ratio<i64>,
}

pub fn moments_of_monomial(mono: &Monomial) -> MomentPair {
    let n = mono.exponents().len() as i64;
    let (mut s1, mut s2) = (0i64, 0i64);
    for (i, &a) in mono.exponents().iter().enumerate() {
        s1 += i as i64 * a as i64;
        s2 += (i * i) as i64 * a as i64;
    }
    MomentPair { e: Ratio::new(s1, n), e2: Ratio::new(s2, n) }
}

pub fn moments(profile: &ColumnProfile, class: &PartitionClass) -> Result<MomentPair> {
    if let Some(k) = profile.offsets().iter().position(|&d| d < 0) {
        return Err(Error::UnnormalizedProfile(k));
    }
    Ok(moments_of_monomial(&monomial_of_class(profile, class)?))
}

/// Default cap on the number of classes enumerated by [`verify_ci_uniqueness`].
pub const DEFAULT_CLASS_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMoments {
    pub class: PartitionClass,
    pub monomial: Monomial,
    pub moments: MomentPair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub profile: ColumnProfile,
    pub ci_monomial: Monomial,
    /// One entry per class, canonical class first.
    pub classes: Vec<ClassMoments>,
    /// Exactly one class yields the CI monomial.
    pub unique: bool,
    /// `E[X] <= E[X_sigma]` for every class.
    pub first_moment_minimal: bool,
    /// `E[X^2] < E[X_sigma^2]` for every non-canonical class.
    pub second_moment_gap: bool,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.unique && self.first_moment_minimal && self.second_moment_gap
    }
}

pub fn verify_ci_uniqueness(profile: &ColumnProfile, budget: u128) -> Result<UniquenessReport> {
    if let Some(k) = profile.offsets().iter().position(|&d| d < 0) {
        return Err(Error::UnnormalizedProfile(k));
    }
    let needed = profile.class_count();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let ci = ci_monomial(profile);
    let classes: Vec<ClassMoments> = enumerate_classes(profile)
        .into_iter()
        .map(|class| {
            let monomial = monomial_of_class(profile, &class)?;
            let moments = moments_of_monomial(&monomial);
            Ok(ClassMoments { class, monomial, moments })
        })
        .collect::<Result<_>>()?;
    let canon = classes[0].moments;
    Ok(UniquenessReport {
        profile: profile.clone(),
        unique: classes.iter().filter(|c| c.monomial == ci).count() == 1,
        first_moment_minimal: classes.iter().all(|c| canon.e <= c.moments.e),
        second_moment_gap: classes[1..].iter().all(|c| canon.e2 < c.moments.e2),
        ci_monomial: ci,
        classes,
    })
}

/// Checks `sum n b_n >= sum sigma(n) b_n` over every permutation `sigma`,
/// with equality exactly when `sigma` preserves every block `A_kappa`
/// (`b_n = kappa` on `A_kappa`). Returns the number of permutations checked.
pub fn rearrangement_check(profile: &ColumnProfile) -> Result<u64> {
    let n = profile.n();
    let mut b = vec![0i64; n];
    for (k, block) in canonical_partition(profile).blocks.iter().enumerate() {
        for i in block.clone() {
            b[i] = k as i64;
        }
    }
    let top: i64 = (0..n).map(|i| i as i64 * b[i]).sum();
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut count = 0;
    loop {
        count += 1;
        let s: i64 = (0..n).map(|i| sigma[i] as i64 * b[i]).sum();
        let preserves = (0..n).all(|i| b[sigma[i]] == b[i]);
        if s > top || (s == top) != preserves {
            return Err(Error::InvariantViolated(format!(
                "rearrangement fails for profile {profile} at {sigma:?}"
            )));
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    Ok(count)
}

/// Lexicographic successor; false at the last permutation.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}
