//! Certification of general linear position.
//!
//! A window is in general linear position when every `N` of its `N^2`
//! time-frequency shifts are linearly independent. Supports of size `N` are
//! enumerated exhaustively (lexicographic `N`-subsets of the column indices
//! `0..N^2`) or by seeded sampling, and each `N x N` minor is tested with one
//! of two backends:
//!
//! * exact: residues modulo `k` primes `p = 1 (mod L)`. A nonzero residue
//!   certifies independence; a support is reported dependent only when all
//!   `k` primes give zero.
//! * float: the smallest singular value is compared with `eps` times the
//!   largest entry modulus; dependent supports carry a numerical null vector.

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::{check_distinct, format_support, Provenance, TimeFreqIndex, TimeFrequencyPlane, Window};
use crate::scalar::{
    determinant, find_embedding_primes, is_prime, lcm, ComplexField, CyclotomicContext, Matrix,
    SparseCyclotomic, DEFAULT_EPS, DEFAULT_PRIME_BITS,
};
use crate::window::AnyWindow;

/// Largest dimension handled by the exact checker's stack buffers.
pub const MAX_EXACT_DIM: usize = 16;

/// Number of independent primes that must agree before an exact zero is
/// reported.
pub const DEFAULT_PRIME_COUNT: usize = 3;

/// Dependent supports kept in a report (all are counted).
pub const DEFAULT_MAX_WITNESSES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Exact,
    Float,
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BackendKind::Exact => "exact",
            BackendKind::Float => "float",
        })
    }
}

/// Backend configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Backend {
    Exact { prime_bits: u32, primes: usize },
    Float { eps: f64 },
}

impl Backend {
    pub fn exact() -> Self {
        Backend::Exact { prime_bits: DEFAULT_PRIME_BITS, primes: DEFAULT_PRIME_COUNT }
    }

    pub fn float() -> Self {
        Backend::Float { eps: DEFAULT_EPS }
    }

    pub fn kind(&self) -> BackendKind {
        match self {
            Backend::Exact { .. } => BackendKind::Exact,
            Backend::Float { .. } => BackendKind::Float,
        }
    }
}

/// Evidence attached to a dependent support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
pub enum Witness {
    /// Determinant residues, one per prime (all zero).
    Exact { primes: Vec<u64>, residues: Vec<u64> },
    /// `|det|` and a unit vector `v` with `||D v|| = sigma_min`.
    Float { det_modulus: f64, sigma_min: f64, null_vector: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Independent,
    Dependent(Witness),
}

impl Verdict {
    pub fn is_independent(&self) -> bool {
        matches!(self, Verdict::Independent)
    }
}

/// Tests `N`-subsets of the lexicographically ordered full Gabor system.
pub trait SupportChecker: Sync {
    fn dim(&self) -> usize;
    fn backend(&self) -> BackendKind;
    /// Primes used for exact certificates; empty for float.
    fn primes(&self) -> Vec<u64>;
    /// Checks the minor formed by the given column indices (`kappa * N + lambda`).
    fn check_columns(&self, cols: &[usize]) -> Verdict;
}

struct PrimeColumns {
    ctx: CyclotomicContext,
    /// Column-major `N^2` columns of length `N`, in fast representation.
    fast: Vec<u64>,
    /// Same columns as plain residues.
    plain: Vec<u64>,
}

/// Exact checker over `k` embedding primes.
pub struct ExactChecker {
    n: usize,
    per_prime: Vec<PrimeColumns>,
}

impl ExactChecker {
    pub fn new(window: &Window<SparseCyclotomic>, prime_bits: u32, primes: usize) -> Result<Self> {
        let n = window.dim();
        if n > MAX_EXACT_DIM {
            return Err(Error::DimensionTooLarge { n, max: MAX_EXACT_DIM });
        }
        let order = lcm(window.order(), n as u64);
        let contexts = find_embedding_primes(order, prime_bits, primes.max(1))?;
        let per_prime = contexts
            .into_iter()
            .map(|ctx| {
                let entries = window
                    .entries()
                    .iter()
                    .map(|e| e.eval_residue(&ctx))
                    .collect::<Result<Vec<_>>>()?;
                let plane = TimeFrequencyPlane::new(ctx.clone(), n)?;
                let sys = plane.full_system(&entries)?;
                let plain: Vec<u64> = (0..n * n).flat_map(|c| sys.matrix.column(c)).collect();
                let fast = plain.iter().map(|&x| ctx.to_fast(x)).collect();
                Ok(PrimeColumns { ctx, fast, plain })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, per_prime })
    }

    pub fn contexts(&self) -> impl Iterator<Item = &CyclotomicContext> {
        self.per_prime.iter().map(|p| &p.ctx)
    }

    fn singular_in(&self, pc: &PrimeColumns, cols: &[usize]) -> bool {
        let n = self.n;
        let mut buf = [0u64; MAX_EXACT_DIM * MAX_EXACT_DIM];
        let a = &mut buf[..n * n];
        for (i, &c) in cols.iter().enumerate() {
            let col = &pc.fast[c * n..(c + 1) * n];
            for r in 0..n {
                a[r * n + i] = col[r];
            }
        }
        pc.ctx.fast_is_singular(a, n)
    }

    fn determinant_in(&self, pc: &PrimeColumns, cols: &[usize]) -> u64 {
        let n = self.n;
        let m = Matrix::from_fn(n, n, |r, i| pc.plain[cols[i] * n + r]);
        determinant(&pc.ctx, &m).expect("square")
    }
}

impl SupportChecker for ExactChecker {
    fn dim(&self) -> usize {
        self.n
    }

    fn backend(&self) -> BackendKind {
        BackendKind::Exact
    }

    fn primes(&self) -> Vec<u64> {
        self.per_prime.iter().map(|p| p.ctx.prime()).collect()
    }

    fn check_columns(&self, cols: &[usize]) -> Verdict {
        debug_assert_eq!(cols.len(), self.n);
        if self.per_prime.iter().any(|pc| !self.singular_in(pc, cols)) {
            return Verdict::Independent;
        }
        Verdict::Dependent(Witness::Exact {
            primes: self.primes(),
            residues: self.per_prime.iter().map(|pc| self.determinant_in(pc, cols)).collect(),
        })
    }
}

/// Floating-point checker using the smallest singular value.
pub struct FloatChecker {
    n: usize,
    field: ComplexField,
    columns: Vec<Complex64>,
}

impl FloatChecker {
    pub fn new(window: &Window<Complex64>, eps: f64) -> Result<Self> {
        let n = window.dim();
        let field = ComplexField::new(eps)?;
        let plane = TimeFrequencyPlane::new(field, n)?;
        let sys = plane.full_system(window.entries())?;
        let columns = (0..n * n).flat_map(|c| sys.matrix.column(c)).collect();
        Ok(Self { n, field, columns })
    }

    pub fn eps(&self) -> f64 {
        self.field.eps()
    }

    /// The minor as a matrix.
    pub fn minor(&self, cols: &[usize]) -> Matrix<Complex64> {
        let n = self.n;
        Matrix::from_fn(n, n, |r, i| self.columns[cols[i] * n + r])
    }
}

/// Smallest singular value and its right singular vector.
pub fn smallest_singular_pair(m: &Matrix<Complex64>) -> (f64, Vec<Complex64>) {
    let dm = DMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c));
    let svd = dm.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let (imin, &smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty matrix");
    let v = v_t.row(imin).iter().map(|z| z.conj()).collect();
    (smin, v)
}

impl SupportChecker for FloatChecker {
    fn dim(&self) -> usize {
        self.n
    }

    fn backend(&self) -> BackendKind {
        BackendKind::Float
    }

    fn primes(&self) -> Vec<u64> {
        Vec::new()
    }

    fn check_columns(&self, cols: &[usize]) -> Verdict {
        let m = self.minor(cols);
        let scale = m.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (sigma_min, v) = smallest_singular_pair(&m);
        if sigma_min >= self.field.eps() * scale {
            return Verdict::Independent;
        }
        let det = determinant(&self.field, &m).expect("square");
        Verdict::Dependent(Witness::Float {
            det_modulus: det.norm(),
            sigma_min,
            null_vector: v.iter().map(|z| [z.re, z.im]).collect(),
        })
    }
}

/// Builds the checker for a window and backend. The float backend accepts
/// exact windows through their complex image.
pub fn checker_for(window: &AnyWindow, backend: &Backend) -> Result<Box<dyn SupportChecker>> {
    match (backend, window) {
        (Backend::Exact { prime_bits, primes }, AnyWindow::Exact(w)) => {
            Ok(Box::new(ExactChecker::new(w, *prime_bits, *primes)?))
        }
        (Backend::Exact { .. }, AnyWindow::Float(_)) => Err(Error::BackendMismatch(
            "the exact backend needs a window with cyclotomic entries".into(),
        )),
        (Backend::Float { eps }, w) => Ok(Box::new(FloatChecker::new(&w.to_complex(), *eps)?)),
    }
}

fn support_columns(support: &[TimeFreqIndex], n: usize) -> Result<Vec<usize>> {
    if support.len() != n {
        return Err(Error::InvalidSupport(format!("support has {} indices, need {n}", support.len())));
    }
    check_distinct(support)?;
    support
        .iter()
        .map(|idx| TimeFreqIndex::new(idx.kappa, idx.lambda, n).map(|i| i.column(n)))
        .collect()
}

/// Independence of the `N` shifts of `window` indexed by `support`.
pub fn check_support(window: &AnyWindow, support: &[TimeFreqIndex], backend: &Backend) -> Result<Verdict> {
    let checker = checker_for(window, backend)?;
    let cols = support_columns(support, checker.dim())?;
    Ok(checker.check_columns(&cols))
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th `k`-subset of `0..m` in lexicographic order.
pub fn unrank_combination(m: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        loop {
            let remaining = binomial((m - next - 1) as u64, (k - slot - 1) as u64);
            if rank < remaining {
                break;
            }
            rank -= remaining;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Advances to the next `k`-subset of `0..m`; false when exhausted.
pub fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum EnumerationMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

/// Supports `Lambda` of size `N` to test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportEnumeration {
    n: usize,
    mode: EnumerationMode,
}

impl SupportEnumeration {
    pub fn exhaustive(n: usize) -> Self {
        Self { n, mode: EnumerationMode::Exhaustive }
    }

    pub fn sampled(n: usize, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidSupport("sample count must be at least 1".into()));
        }
        let total = binomial((n * n) as u64, n as u64);
        if count as u128 > total {
            return Err(Error::BudgetExceeded { needed: count as u128, budget: total });
        }
        Ok(Self { n, mode: EnumerationMode::Sampled { count, seed } })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> EnumerationMode {
        self.mode
    }

    /// Number of supports this enumeration yields.
    pub fn len(&self) -> u128 {
        match self.mode {
            EnumerationMode::Exhaustive => binomial((self.n * self.n) as u64, self.n as u64),
            EnumerationMode::Sampled { count, .. } => count as u128,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sampled supports as sorted column-index lists, in draw order.
    /// Distinct, and reproducible from the seed.
    pub fn sample(&self) -> Vec<Vec<usize>> {
        let EnumerationMode::Sampled { count, seed } = self.mode else {
            return Vec::new();
        };
        let m = self.n * self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = HashSet::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut s = index::sample(&mut rng, m, self.n).into_vec();
            s.sort_unstable();
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
        out
    }

    /// Every support, materialized. Intended for small enumerations.
    pub fn to_vec(&self) -> Vec<Vec<usize>> {
        match self.mode {
            EnumerationMode::Sampled { .. } => self.sample(),
            EnumerationMode::Exhaustive => {
                let m = self.n * self.n;
                let mut out = Vec::new();
                let mut c: Vec<usize> = (0..self.n).collect();
                loop {
                    out.push(c.clone());
                    if !next_combination(&mut c, m) {
                        break;
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlpVerdict {
    /// Exhaustive enumeration found no dependent support.
    GlpCertified,
    /// Sampled enumeration found no dependent support.
    GlpOnSample,
    NotGlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependentSupport {
    pub support: Vec<TimeFreqIndex>,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub window: Provenance,
    pub backend: BackendKind,
    pub enumeration: EnumerationMode,
    pub supports_tested: u64,
    pub dependent: u64,
    /// The first dependent supports in enumeration order (capped).
    pub witnesses: Vec<DependentSupport>,
    pub primes: Vec<u64>,
    pub verdict: GlpVerdict,
    #[serde(skip)]
    pub elapsed: Duration,
}

struct Partial {
    tested: u64,
    dependent: u64,
    // (column indices, witness) in enumeration order
    witnesses: Vec<(Vec<usize>, Witness)>,
}

impl Partial {
    fn empty() -> Self {
        Self { tested: 0, dependent: 0, witnesses: Vec::new() }
    }

    fn record(&mut self, cols: &[usize], verdict: Verdict, cap: usize) {
        self.tested += 1;
        if let Verdict::Dependent(w) = verdict {
            self.dependent += 1;
            if self.witnesses.len() < cap {
                self.witnesses.push((cols.to_vec(), w));
            }
        }
    }

    /// `other` must come after `self` in enumeration order.
    fn merge(mut self, other: Partial, cap: usize) -> Partial {
        self.tested += other.tested;
        self.dependent += other.dependent;
        self.witnesses.extend(other.witnesses);
        self.witnesses.truncate(cap);
        self
    }
}

/// Options for [`verify_glp_with`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub max_witnesses: usize,
    /// Supports per parallel work item.
    pub chunk: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { max_witnesses: DEFAULT_MAX_WITNESSES, chunk: 4096 }
    }
}

pub fn verify_glp(
    checker: &dyn SupportChecker,
    window: &Provenance,
    enumeration: &SupportEnumeration,
) -> Result<VerificationReport> {
    verify_glp_with(checker, window, enumeration, VerifyOptions::default())
}

/// Runs every support of `enumeration` through `checker` on the current
/// rayon pool. The report does not depend on the number of workers.
pub fn verify_glp_with(
    checker: &dyn SupportChecker,
    window: &Provenance,
    enumeration: &SupportEnumeration,
    opts: VerifyOptions,
) -> Result<VerificationReport> {
    let n = enumeration.dim();
    if n != checker.dim() {
        return Err(Error::DimensionMismatch { expected: checker.dim(), actual: n });
    }
    let start = Instant::now();
    let cap = opts.max_witnesses;
    let chunk = opts.chunk.max(1);
    let m = n * n;
    let partial = match enumeration.mode() {
        EnumerationMode::Exhaustive => {
            let total = enumeration.len();
            let chunks = total.div_ceil(chunk as u128);
            let chunks = u64::try_from(chunks).map_err(|_| Error::BudgetExceeded {
                needed: total,
                budget: u64::MAX as u128,
            })?;
            (0..chunks)
                .into_par_iter()
                .map(|ci| {
                    let begin = ci as u128 * chunk as u128;
                    let end = (begin + chunk as u128).min(total);
                    let mut c = unrank_combination(m, n, begin);
                    let mut part = Partial::empty();
                    for _ in begin..end {
                        part.record(&c, checker.check_columns(&c), cap);
                        next_combination(&mut c, m);
                    }
                    part
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Partial::empty(), |a, b| a.merge(b, cap))
        }
        EnumerationMode::Sampled { .. } => enumeration
            .sample()
            .par_chunks(chunk)
            .map(|supports| {
                let mut part = Partial::empty();
                for c in supports {
                    part.record(c, checker.check_columns(c), cap);
                }
                part
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Partial::empty(), |a, b| a.merge(b, cap)),
    };
    let verdict = match (partial.dependent, enumeration.mode()) {
        (0, EnumerationMode::Exhaustive) => GlpVerdict::GlpCertified,
        (0, EnumerationMode::Sampled { .. }) => GlpVerdict::GlpOnSample,
        _ => GlpVerdict::NotGlp,
    };
    Ok(VerificationReport {
        n,
        window: window.clone(),
        backend: checker.backend(),
        enumeration: enumeration.mode(),
        supports_tested: partial.tested,
        dependent: partial.dependent,
        witnesses: partial
            .witnesses
            .into_iter()
            .map(|(cols, witness)| DependentSupport {
                support: cols.iter().map(|&c| TimeFreqIndex::from_column(c, n)).collect(),
                witness,
            })
            .collect(),
        primes: checker.primes(),
        verdict,
        elapsed: start.elapsed(),
    })
}

/// Writes dependent supports as CSV: `n,support,backend,determinant`, where
/// the determinant column holds `;`-joined residues (exact) or `|det|` (float).
pub fn write_witness_csv<W: Write>(report: &VerificationReport, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    wtr.write_record(["n", "support", "backend", "determinant"]).map_err(ser)?;
    for dep in &report.witnesses {
        let det = match &dep.witness {
            Witness::Exact { residues, .. } => {
                residues.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
            }
            Witness::Float { det_modulus, .. } => format!("{det_modulus:e}"),
        };
        wtr.write_record([
            report.n.to_string(),
            format_support(&dep.support),
            report.backend.to_string(),
            det,
        ])
        .map_err(ser)?;
    }
    wtr.flush().map_err(|e| Error::Serialization(e.to_string()))
}

/// Outcome of checking every square minor of the `p x p` DFT matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierMinorReport {
    pub p: u64,
    pub minors_checked: u64,
    /// `(rows, cols)` of minors that vanished modulo every prime.
    pub zero_minors: Vec<(Vec<usize>, Vec<usize>)>,
    pub primes: Vec<u64>,
    pub pass: bool,
}

/// Largest `p` accepted by [`fourier_minor_check`].
pub const MAX_FOURIER_PRIME: u64 = 11;

/// Checks that all square minors of `(omega^{jk})_{j,k<p}` are nonzero.
pub fn fourier_minor_check(p: u64, prime_bits: u32, primes: usize) -> Result<FourierMinorReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > MAX_FOURIER_PRIME {
        return Err(Error::DimensionTooLarge { n: p as usize, max: MAX_FOURIER_PRIME as usize });
    }
    let n = p as usize;
    let contexts = find_embedding_primes(p, prime_bits, primes.max(1))?;
    let dft: Vec<Vec<u64>> = contexts
        .iter()
        .map(|ctx| {
            (0..n * n)
                .map(|i| ctx.to_fast(ctx.root_power(((i / n) * (i % n)) as u64)))
                .collect()
        })
        .collect();
    let mut checked = 0u64;
    let mut zero_minors = Vec::new();
    let mut buf = vec![0u64; n * n];
    for size in 1..=n {
        let mut rows: Vec<usize> = (0..size).collect();
        loop {
            let mut cols: Vec<usize> = (0..size).collect();
            loop {
                checked += 1;
                let singular_everywhere = contexts.iter().zip(&dft).all(|(ctx, f)| {
                    let a = &mut buf[..size * size];
                    for (i, &r) in rows.iter().enumerate() {
                        for (j, &c) in cols.iter().enumerate() {
                            a[i * size + j] = f[r * n + c];
                        }
                    }
                    ctx.fast_is_singular(a, size)
                });
                if singular_everywhere {
                    zero_minors.push((rows.clone(), cols.clone()));
                }
                if !next_combination(&mut cols, n) {
                    break;
                }
            }
            if !next_combination(&mut rows, n) {
                break;
            }
        }
    }
    Ok(FourierMinorReport {
        p,
        minors_checked: checked,
        pass: zero_minors.is_empty(),
        zero_minors,
        primes: contexts.iter().map(CyclotomicContext::prime).collect(),
    })
}
