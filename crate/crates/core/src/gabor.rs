//! Time-frequency shifts, Gabor systems, the short-time Fourier transform and
//! the frame operator.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ComplexField, Matrix, Ring, SparseCyclotomic};

/// A point `(kappa, lambda)` of `(Z/NZ)^2`; labels the vector
/// `M^lambda T^kappa phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TimeFreqIndex {
    pub kappa: usize,
    pub lambda: usize,
}

impl TimeFreqIndex {
    pub fn new(kappa: usize, lambda: usize, n: usize) -> Result<Self> {
        if kappa >= n || lambda >= n {
            return Err(Error::InvalidSupport(format!("index ({kappa},{lambda}) outside (Z/{n}Z)^2")));
        }
        Ok(Self { kappa, lambda })
    }

    /// Position in the lexicographic ordering of `(Z/NZ)^2`.
    pub fn column(self, n: usize) -> usize {
        self.kappa * n + self.lambda
    }

    pub fn from_column(c: usize, n: usize) -> Self {
        Self { kappa: c / n, lambda: c % n }
    }
}

impl fmt::Display for TimeFreqIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.kappa, self.lambda)
    }
}

/// Formats a support as semicolon-joined `kappa,lambda` pairs.
pub fn format_support(support: &[TimeFreqIndex]) -> String {
    support.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

/// Parses `"(0,0);(0,1);(1,0)"` or `"0,0;0,1;1,0"`.
pub fn parse_support(s: &str, n: usize) -> Result<Vec<TimeFreqIndex>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let pair = pair.trim().trim_start_matches('(').trim_end_matches(')');
            let mut it = pair.split(',').map(|x| x.trim().parse::<usize>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(k)), Some(Ok(l)), None) => TimeFreqIndex::new(k, l, n),
                _ => Err(Error::InvalidSupport(format!("cannot parse index {pair:?}"))),
            }
        })
        .collect()
}

pub(crate) fn check_distinct(support: &[TimeFreqIndex]) -> Result<()> {
    let mut seen = HashSet::with_capacity(support.len());
    for idx in support {
        if !seen.insert(*idx) {
            return Err(Error::DuplicateIndex(idx.kappa, idx.lambda));
        }
    }
    Ok(())
}

/// Where a window came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    /// `(1, zeta, zeta^4, ..., zeta^((N-1)^2))` with `zeta` of order `(N-1)^4`.
    RootOfUnity,
    /// `(1, xi, xi^4, ...)` for a user-chosen complex `xi`.
    GenericPower { xi: [f64; 2] },
    Random { seed: u64 },
    User,
}

/// Entry types that can tell whether they are exactly zero.
pub trait WindowEntry: Clone {
    fn is_zero_entry(&self) -> bool;
}

impl WindowEntry for Complex64 {
    fn is_zero_entry(&self) -> bool {
        self.norm_sqr() == 0.0
    }
}

impl WindowEntry for u64 {
    fn is_zero_entry(&self) -> bool {
        *self == 0
    }
}

impl WindowEntry for SparseCyclotomic {
    fn is_zero_entry(&self) -> bool {
        self.terms.iter().all(|&(c, _)| c == 0)
    }
}

/// A nonzero vector of length `N` generating a Gabor system.
#[derive(Debug, Clone, PartialEq)]
pub struct Window<E> {
    entries: Vec<E>,
    provenance: Provenance,
}

impl<E: WindowEntry> Window<E> {
    pub fn new(entries: Vec<E>, provenance: Provenance) -> Result<Self> {
        if entries.is_empty() || entries.iter().all(WindowEntry::is_zero_entry) {
            return Err(Error::ZeroWindow);
        }
        Ok(Self { entries, provenance })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Maps every entry, keeping provenance.
    pub fn try_map<F: WindowEntry>(&self, f: impl Fn(&E) -> Result<F>) -> Result<Window<F>> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Window::new(entries, self.provenance.clone())
    }
}

impl Window<SparseCyclotomic> {
    /// The complex image of an exact window.
    pub fn to_complex(&self) -> Window<Complex64> {
        Window {
            entries: self.entries.iter().map(SparseCyclotomic::eval_complex).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Least common order of the entries' roots of unity.
    pub fn order(&self) -> u64 {
        self.entries.iter().fold(1, |acc, e| crate::scalar::lcm(acc, e.order))
    }
}

/// `T^kappa x`: `out_j = x_{(j - kappa) mod N}`.
pub fn translate<T: Clone>(x: &[T], kappa: usize) -> Vec<T> {
    let n = x.len();
    (0..n).map(|j| x[(j + n - kappa % n) % n].clone()).collect()
}

/// A ring together with the powers of its primitive `N`-th root of unity;
/// provides the modulation and every operator built on it.
#[derive(Debug, Clone)]
pub struct TimeFrequencyPlane<R: Ring> {
    ring: R,
    n: usize,
    omega: Vec<R::Elem>,
}

/// Columns `pi(Lambda_i) w` of a Gabor system, in the order of the support.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborSystem<E> {
    pub support: Vec<TimeFreqIndex>,
    pub matrix: Matrix<E>,
}

impl<R: Ring> TimeFrequencyPlane<R> {
    pub fn new(ring: R, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
        }
        let w = ring.root_of_unity(n as u64)?;
        let mut omega = Vec::with_capacity(n);
        let mut acc = ring.one();
        for _ in 0..n {
            omega.push(acc);
            acc = ring.mul(acc, w);
        }
        Ok(Self { ring, n, omega })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `omega^k`.
    pub fn omega_pow(&self, k: usize) -> R::Elem {
        self.omega[k % self.n]
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: len });
        }
        Ok(())
    }

    /// `M^lambda x`: `out_j = omega^{j lambda} x_j`.
    pub fn modulate(&self, x: &[R::Elem], lambda: usize) -> Result<Vec<R::Elem>> {
        self.check_len(x.len())?;
        Ok(x.iter()
            .enumerate()
            .map(|(j, &v)| self.ring.mul(self.omega_pow(j * lambda), v))
            .collect())
    }

    pub fn translate(&self, x: &[R::Elem], kappa: usize) -> Result<Vec<R::Elem>> {
        self.check_len(x.len())?;
        Ok(translate(x, kappa))
    }

    /// `pi(kappa, lambda) x = M^lambda T^kappa x`.
    pub fn tf_shift(&self, x: &[R::Elem], idx: TimeFreqIndex) -> Result<Vec<R::Elem>> {
        self.check_len(x.len())?;
        let n = self.n;
        Ok((0..n)
            .map(|j| {
                let v = x[(j + n - idx.kappa % n) % n];
                self.ring.mul(self.omega_pow(j * idx.lambda), v)
            })
            .collect())
    }

    pub fn gabor_matrix(&self, window: &[R::Elem], support: &[TimeFreqIndex]) -> Result<GaborSystem<R::Elem>> {
        self.check_len(window.len())?;
        if support.is_empty() {
            return Err(Error::InvalidSupport("support must not be empty".into()));
        }
        for idx in support {
            TimeFreqIndex::new(idx.kappa, idx.lambda, self.n)?;
        }
        check_distinct(support)?;
        let columns = support
            .iter()
            .map(|&idx| self.tf_shift(window, idx))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaborSystem { support: support.to_vec(), matrix: Matrix::from_columns(&columns) })
    }

    /// All `N^2` columns in lexicographic `(kappa, lambda)` order.
    pub fn full_system(&self, window: &[R::Elem]) -> Result<GaborSystem<R::Elem>> {
        let support: Vec<_> = (0..self.n * self.n).map(|c| TimeFreqIndex::from_column(c, self.n)).collect();
        self.gabor_matrix(window, &support)
    }

    /// `<f, g> = sum_j f_j conj(g_j)`.
    pub fn inner(&self, f: &[R::Elem], g: &[R::Elem]) -> Result<R::Elem> {
        let mut acc = self.ring.zero();
        for (&a, &b) in f.iter().zip(g) {
            acc = self.ring.add(acc, self.ring.mul(a, self.ring.conj(b)?));
        }
        Ok(acc)
    }

    /// `V_w f(kappa, lambda) = <f, pi(kappa, lambda) w>`, indexed `[kappa][lambda]`.
    pub fn stft(&self, f: &[R::Elem], window: &[R::Elem]) -> Result<Vec<Vec<R::Elem>>> {
        self.check_len(f.len())?;
        self.check_len(window.len())?;
        (0..self.n)
            .map(|kappa| {
                (0..self.n)
                    .map(|lambda| {
                        let g = self.tf_shift(window, TimeFreqIndex { kappa, lambda })?;
                        self.inner(f, &g)
                    })
                    .collect()
            })
            .collect()
    }
}

/// `max |S - N ||w||^2 I|` where `S f = sum <f, pi(k,l) w> pi(k,l) w` over all
/// of `(Z/NZ)^2`.
pub fn frame_operator_defect(window: &[Complex64]) -> Result<f64> {
    let n = window.len();
    let plane = TimeFrequencyPlane::new(ComplexField::default(), n)?;
    let norm2: f64 = window.iter().map(Complex64::norm_sqr).sum();
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    for c in 0..n * n {
        let v = plane.tf_shift(window, TimeFreqIndex::from_column(c, n))?;
        for r in 0..n {
            for k in 0..n {
                s[r * n + k] += v[r] * v[k].conj();
            }
        }
    }
    let target = n as f64 * norm2;
    let mut defect: f64 = 0.0;
    for r in 0..n {
        for k in 0..n {
            let expect = if r == k { target } else { 0.0 };
            defect = defect.max((s[r * n + k] - expect).norm());
        }
    }
    Ok(defect)
}
