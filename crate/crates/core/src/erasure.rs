//! Gabor coefficients as an erasure code, and identification of operators
//! spanned by few time-frequency shifts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::{check_distinct, TimeFreqIndex, TimeFrequencyPlane, Window};
use crate::scalar::{ComplexField, Ring};

/// Relative singular value below which an analysis system counts as singular.
pub const DEFAULT_RCOND: f64 = 1e-12;

/// One transmitted coefficient `<f, pi(kappa, lambda) w>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPacket {
    pub index: TimeFreqIndex,
    pub value: Complex64,
}

/// Indices that survive the channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    pub surviving: Vec<TimeFreqIndex>,
    pub seed: Option<u64>,
}

impl ErasurePattern {
    /// `keep` indices drawn uniformly without replacement, sorted.
    pub fn random(n: usize, keep: usize, seed: u64) -> Result<Self> {
        if keep > n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: keep });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cols = index::sample(&mut rng, n * n, keep).into_vec();
        cols.sort_unstable();
        Ok(Self { surviving: cols.into_iter().map(|c| TimeFreqIndex::from_column(c, n)).collect(), seed: Some(seed) })
    }

    pub fn apply(&self, packets: &[CoefficientPacket]) -> Vec<CoefficientPacket> {
        packets.iter().filter(|p| self.surviving.contains(&p.index)).copied().collect()
    }
}

fn plane(n: usize) -> Result<TimeFrequencyPlane<ComplexField>> {
    TimeFrequencyPlane::new(ComplexField::default(), n)
}

/// All `N^2` coefficients, lexicographic order.
pub fn encode(f: &[Complex64], w: &Window<Complex64>) -> Result<Vec<CoefficientPacket>> {
    let n = w.dim();
    let v = plane(n)?.stft(f, w.entries())?;
    Ok((0..n * n)
        .map(|c| {
            let index = TimeFreqIndex::from_column(c, n);
            CoefficientPacket { index, value: v[index.kappa][index.lambda] }
        })
        .collect())
}

/// Least squares with a rank check: `sigma_min < rcond * sigma_max` is
/// reported as rank deficient.
fn solve(a: DMatrix<Complex64>, b: DVector<Complex64>, rcond: f64) -> Result<Vec<Complex64>> {
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin < rcond * smax {
        return Err(Error::RankDeficient { sigma_min: smin });
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::InvariantViolated(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

pub fn decode(packets: &[CoefficientPacket], w: &Window<Complex64>) -> Result<Vec<Complex64>> {
    decode_with(packets, w, DEFAULT_RCOND)
}

/// Recovers `f` from surviving coefficients by solving the analysis system
/// `conj(pi(k) w)^T f = <f, pi(k) w>` over the surviving `k`.
pub fn decode_with(packets: &[CoefficientPacket], w: &Window<Complex64>, rcond: f64) -> Result<Vec<Complex64>> {
    let n = w.dim();
    if packets.len() < n {
        return Err(Error::InsufficientPackets { received: packets.len(), needed: n });
    }
    let idx: Vec<TimeFreqIndex> = packets.iter().map(|p| p.index).collect();
    let sys = plane(n)?.gabor_matrix(w.entries(), &idx)?;
    let a = DMatrix::from_fn(packets.len(), n, |k, j| sys.matrix.get(j, k).conj());
    let b = DVector::from_iterator(packets.len(), packets.iter().map(|p| p.value));
    solve(a, b, rcond)
}

/// `H = sum c_{kappa lambda} pi(kappa, lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorCoefficients {
    pub support: Vec<TimeFreqIndex>,
    pub coefficients: Vec<Complex64>,
}

impl OperatorCoefficients {
    /// `H x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = x.len();
        let p = plane(n)?;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (&idx, &c) in self.support.iter().zip(&self.coefficients) {
            for (o, v) in out.iter_mut().zip(p.tf_shift(x, idx)?) {
                *o += c * v;
            }
        }
        Ok(out)
    }
}

/// Solves `sum c_k pi(k) w = observed` for `c` on the given support.
pub fn identify_operator(
    observed: &[Complex64],
    support: &[TimeFreqIndex],
    w: &Window<Complex64>,
) -> Result<OperatorCoefficients> {
    let n = w.dim();
    if support.len() > n {
        return Err(Error::Ambiguous { size: support.len(), n });
    }
    if observed.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: observed.len() });
    }
    check_distinct(support)?;
    let sys = plane(n)?.gabor_matrix(w.entries(), support)?;
    let a = DMatrix::from_fn(n, support.len(), |r, c| sys.matrix.get(r, c));
    let b = DVector::from_column_slice(observed);
    let coefficients = solve(a, b, DEFAULT_RCOND)?;
    Ok(OperatorCoefficients { support: support.to_vec(), coefficients })
}

/// Size of the support of `V_w f` against the bound `N^2 - N + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportBound {
    pub nonzero: usize,
    pub bound: usize,
    pub holds: bool,
}

/// Counts coefficients of `V_w f` that are not negligible at `scale`.
/// For floating point, a natural scale is `||f|| ||w||`.
pub fn support_bound_check<R: Ring>(
    plane: &TimeFrequencyPlane<R>,
    f: &[R::Elem],
    w: &[R::Elem],
    scale: f64,
) -> Result<SupportBound> {
    let ring = plane.ring();
    if f.iter().all(|&x| ring.magnitude(x) == 0.0) {
        return Err(Error::InvariantViolated("signal must be nonzero".into()));
    }
    let v = plane.stft(f, w)?;
    let n = plane.dim();
    let nonzero = v.iter().flatten().filter(|&&x| !ring.is_negligible(x, scale)).count();
    let bound = n * n - n + 1;
    Ok(SupportBound { nonzero, bound, holds: nonzero >= bound })
}

/// Float convenience wrapper with scale `||f|| ||w||`.
pub fn support_bound_check_float(f: &[Complex64], w: &Window<Complex64>, eps: f64) -> Result<SupportBound> {
    let plane = TimeFrequencyPlane::new(ComplexField::new(eps)?, w.dim())?;
    let norm = |x: &[Complex64]| x.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    support_bound_check(&plane, f, w.entries(), norm(f) * norm(w.entries()))
}

/// A unit vector orthogonal to `pi(k) w` for every `k` in `indices`
/// (at most `N - 1` of them).
pub fn orthogonal_signal(w: &Window<Complex64>, indices: &[TimeFreqIndex]) -> Result<Vec<Complex64>> {
    let n = w.dim();
    if indices.len() >= n {
        return Err(Error::DimensionMismatch { expected: n - 1, actual: indices.len() });
    }
    let sys = plane(n)?.gabor_matrix(w.entries(), indices)?;
    // pad with zero rows so the SVD returns a full V
    let a = DMatrix::from_fn(n, n, |k, j| {
        if k < indices.len() {
            sys.matrix.get(j, k).conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let imin = svd.singular_values.imin();
    Ok(v_t.row(imin).iter().map(|z| z.conj()).collect())
}

/// Standard complex Gaussian vector from a seed.
pub fn random_signal(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid deviation");
    (0..n).map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))).collect()
}

pub fn relative_error(approx: &[Complex64], exact: &[Complex64]) -> f64 {
    let num: f64 = approx.iter().zip(exact).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = exact.iter().map(Complex64::norm_sqr).sum();
    (num / den).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialVerdict {
    Recovered,
    InsufficientPackets,
    RankDeficient,
    ToleranceExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub n: usize,
    pub seed: u64,
    pub kept: usize,
    pub relative_error: Option<f64>,
    pub verdict: TrialVerdict,
}

/// Encodes a random signal, keeps `kept` random coefficients and decodes.
pub fn run_trial(w: &Window<Complex64>, kept: usize, seed: u64, tolerance: f64) -> Result<TrialResult> {
    let n = w.dim();
    let f = random_signal(n, seed);
    let pattern = ErasurePattern::random(n, kept, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let packets = pattern.apply(&encode(&f, w)?);
    let (relative_error, verdict) = match decode(&packets, w) {
        Ok(g) => {
            let e = relative_error(&g, &f);
            (Some(e), if e <= tolerance { TrialVerdict::Recovered } else { TrialVerdict::ToleranceExceeded })
        }
        Err(Error::InsufficientPackets { .. }) => (None, TrialVerdict::InsufficientPackets),
        Err(Error::RankDeficient { .. }) => (None, TrialVerdict::RankDeficient),
        Err(e) => return Err(e),
    };
    Ok(TrialResult { n, seed, kept, relative_error, verdict })
}
