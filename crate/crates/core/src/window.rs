//! Window construction: the explicit root-of-unity power window, generic
//! power windows `xi^{j^2}` and seeded Gaussian windows.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::{Provenance, Window};
use crate::scalar::{euler_phi, gcd, lcm, SparseCyclotomic};

/// Parameters of the root-of-unity construction in dimension `N >= 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub n: usize,
    /// `(N-1)^4`, the order of `zeta`.
    pub zeta_order: u64,
    /// `lcm(N, (N-1)^4)`; both `omega` and `zeta` are powers of a root of this order.
    pub order: u64,
    /// Degree of `zeta` over `Q`, `phi((N-1)^4) = (N-1)^3 phi(N-1)`.
    pub zeta_degree: u64,
    /// `N (N-1)^2`, the degree bound of every `Q_Lambda`.
    pub degree_bound: u64,
}

pub fn construction_params(n: usize) -> Result<ConstructionParams> {
    if n < 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    let n64 = n as u64;
    let zeta_order = (n64 - 1).pow(4);
    if gcd(n64, zeta_order) != 1 {
        return Err(Error::InvariantViolated(format!("gcd({n}, (N-1)^4) != 1")));
    }
    let zeta_degree = euler_phi(zeta_order);
    let degree_bound = n64 * (n64 - 1).pow(2);
    if zeta_degree <= degree_bound {
        return Err(Error::InvariantViolated(format!(
            "degree of zeta ({zeta_degree}) does not exceed N(N-1)^2 = {degree_bound}"
        )));
    }
    Ok(ConstructionParams {
        n,
        zeta_order,
        order: lcm(n64, zeta_order),
        zeta_degree,
        degree_bound,
    })
}

/// `phi_j = zeta^{j^2}` with `zeta` a primitive `(N-1)^4`-th root of unity,
/// expressed as powers of the primitive `lcm(N, (N-1)^4)`-th root `u`.
pub fn power_window_root_of_unity(n: usize) -> Result<Window<SparseCyclotomic>> {
    let params = construction_params(n)?;
    let step = params.order / params.zeta_order;
    let entries = (0..n as u64)
        .map(|j| SparseCyclotomic::root_power(params.order, (j * j % params.zeta_order) * step))
        .collect();
    Window::new(entries, Provenance::RootOfUnity)
}

/// `phi_j = xi^{j^2}`.
pub fn power_window_generic(n: usize, xi: Complex64) -> Result<Window<Complex64>> {
    if xi.norm_sqr() == 0.0 {
        return Err(Error::ZeroWindow);
    }
    let entries = (0..n as i32).map(|j| xi.powi(j * j)).collect();
    Window::new(entries, Provenance::GenericPower { xi: [xi.re, xi.im] })
}

/// Independent standard complex Gaussian entries (`E|phi_j|^2 = 1`).
pub fn random_window(n: usize, seed: u64) -> Result<Window<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid deviation");
    let entries = (0..n)
        .map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    Window::new(entries, Provenance::Random { seed })
}

/// The all-ones window as an exact window of the given root order.
pub fn ones_window(n: usize, order: u64) -> Result<Window<SparseCyclotomic>> {
    Window::new(vec![SparseCyclotomic::root_power(order, 0); n], Provenance::User)
}

/// What kind of window to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowSpec {
    RootOfUnity,
    GenericPower(Complex64),
    Random { seed: u64 },
    Ones,
}

/// A window in one of the two representations.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyWindow {
    Exact(Window<SparseCyclotomic>),
    Float(Window<Complex64>),
}

impl AnyWindow {
    pub fn dim(&self) -> usize {
        match self {
            AnyWindow::Exact(w) => w.dim(),
            AnyWindow::Float(w) => w.dim(),
        }
    }

    pub fn provenance(&self) -> &Provenance {
        match self {
            AnyWindow::Exact(w) => w.provenance(),
            AnyWindow::Float(w) => w.provenance(),
        }
    }

    pub fn to_complex(&self) -> Window<Complex64> {
        match self {
            AnyWindow::Exact(w) => w.to_complex(),
            AnyWindow::Float(w) => w.clone(),
        }
    }
}

/// Builds a window. Requests for the root-of-unity window with `N < 4` fall
/// back to a seeded random window (`fallback_seed`), since the construction
/// needs `N >= 4`.
pub fn construct(n: usize, spec: WindowSpec, fallback_seed: u64) -> Result<AnyWindow> {
    if n == 0 {
        return Err(Error::ZeroWindow);
    }
    match spec {
        WindowSpec::RootOfUnity if n < 4 => random_window(n, fallback_seed).map(AnyWindow::Float),
        WindowSpec::RootOfUnity => power_window_root_of_unity(n).map(AnyWindow::Exact),
        WindowSpec::GenericPower(xi) => power_window_generic(n, xi).map(AnyWindow::Float),
        WindowSpec::Random { seed } => random_window(n, seed).map(AnyWindow::Float),
        WindowSpec::Ones => ones_window(n, n as u64).map(AnyWindow::Exact),
    }
}

/// On-disk form of a window.
///
/// Exact entries are `[e, L]`, meaning `u^e` for the primitive `L`-th root
/// `u`; float entries are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub n: usize,
    pub provenance: Provenance,
    #[serde(flatten)]
    pub entries: EntriesRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", content = "entries", rename_all = "lowercase")]
pub enum EntriesRecord {
    Exact(Vec<[u64; 2]>),
    Float(Vec<[f64; 2]>),
}

impl WindowRecord {
    pub fn from_window(w: &AnyWindow) -> Result<Self> {
        let entries = match w {
            AnyWindow::Exact(w) => EntriesRecord::Exact(
                w.entries()
                    .iter()
                    .map(|e| {
                        e.as_root_power().map(|k| [k, e.order]).ok_or_else(|| {
                            Error::Serialization("exact entries must be single roots of unity".into())
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            AnyWindow::Float(w) => EntriesRecord::Float(w.entries().iter().map(|c| [c.re, c.im]).collect()),
        };
        Ok(Self { n: w.dim(), provenance: w.provenance().clone(), entries })
    }

    pub fn to_window(&self) -> Result<AnyWindow> {
        let len = match &self.entries {
            EntriesRecord::Exact(e) => e.len(),
            EntriesRecord::Float(e) => e.len(),
        };
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: len });
        }
        match &self.entries {
            EntriesRecord::Exact(e) => {
                let entries = e
                    .iter()
                    .map(|&[k, order]| {
                        if order == 0 {
                            Err(Error::Serialization("root order must be positive".into()))
                        } else {
                            Ok(SparseCyclotomic::root_power(order, k))
                        }
                    })
                    .collect::<Result<_>>()?;
                Window::new(entries, self.provenance.clone()).map(AnyWindow::Exact)
            }
            EntriesRecord::Float(e) => {
                let entries = e.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                Window::new(entries, self.provenance.clone()).map(AnyWindow::Float)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_for_n4() {
        let p = construction_params(4).unwrap();
        assert_eq!(p.zeta_order, 81);
        assert_eq!(p.order, 324);
        assert_eq!(p.zeta_degree, 54);
        assert_eq!(p.zeta_degree, 27 * euler_phi(3));
        assert_eq!(p.degree_bound, 36);
        assert_eq!(construction_params(5).unwrap().order, 1280);
    }

    #[test]
    fn root_of_unity_window_exponents() {
        let w = power_window_root_of_unity(4).unwrap();
        // zeta = u^4, phi = (1, zeta, zeta^4, zeta^9)
        let exps: Vec<u64> = w.entries().iter().map(|e| e.as_root_power().unwrap()).collect();
        assert_eq!(exps, vec![0, 4, 16, 36]);
        assert!(w.entries().iter().all(|e| e.order == 324));
        let w5 = power_window_root_of_unity(5).unwrap();
        let exps: Vec<u64> = w5.entries().iter().map(|e| e.as_root_power().unwrap() / 5).collect();
        assert_eq!(exps, vec![0, 1, 4, 9, 16]);
    }

    #[test]
    fn small_dimensions_are_unsupported() {
        for n in 0..4 {
            assert_eq!(power_window_root_of_unity(n), Err(Error::UnsupportedDimension(n)));
        }
        assert!(matches!(construct(3, WindowSpec::RootOfUnity, 9).unwrap(), AnyWindow::Float(_)));
    }

    #[test]
    fn generic_power_window() {
        let w = power_window_generic(2, Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(w.entries(), &[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        let ones = power_window_generic(5, Complex64::new(1.0, 0.0)).unwrap();
        assert!(ones.entries().iter().all(|&e| e == Complex64::new(1.0, 0.0)));
        assert!(power_window_generic(3, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn random_windows_are_reproducible() {
        let a = random_window(6, 17).unwrap();
        let b = random_window(6, 17).unwrap();
        let c = random_window(6, 18).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let one = random_window(1, 3).unwrap();
        assert!(one.entries()[0].norm() > 0.0);
    }

    #[test]
    fn window_record_roundtrip() {
        let w = construct(4, WindowSpec::RootOfUnity, 0).unwrap();
        let rec = WindowRecord::from_window(&w).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"backend\":\"exact\""));
        assert!(json.contains("[36,324]"));
        let back: WindowRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_window().unwrap(), w);

        let w = construct(3, WindowSpec::Random { seed: 5 }, 0).unwrap();
        let rec = WindowRecord::from_window(&w).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"seed\":5"));
        let back: WindowRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_window().unwrap(), w);
    }
}
