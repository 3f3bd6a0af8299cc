//! JSON report layout, schema `gabor-glp/v1`.

use std::time::Instant;

use gabor_glp::erasure::TrialResult;
use gabor_glp::gabor::TimeFreqIndex;
use gabor_glp::monomial::{
    ci_coefficient, expand_determinant, interval_of_profile, lowest_index_monomial, normalize_profile,
    profile_of_support, q_polynomial, verify_ci_uniqueness, MAX_EXPANSION_DIM,
};
use gabor_glp::scalar::{find_embedding_prime, find_embedding_primes, ContextParams};
use gabor_glp::window::{construction_params, AnyWindow, ConstructionParams, WindowRecord};
use gabor_glp::{format_support, Error, Provenance, Result};
use serde::Serialize;

pub const SCHEMA: &str = "gabor-glp/v1";

#[derive(Serialize)]
pub struct Report<R: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub n: usize,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowRecord>,
    pub result: R,
    pub timing: Timing,
}

#[derive(Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

impl<R: Serialize> Report<R> {
    pub fn new(
        command: &'static str,
        n: usize,
        config: serde_json::Value,
        construction: Option<Construction>,
        window: Option<WindowRecord>,
        result: R,
        start: Instant,
    ) -> Self {
        Self {
            schema: SCHEMA,
            command,
            n,
            config,
            construction,
            window,
            result,
            timing: Timing { elapsed_seconds: start.elapsed().as_secs_f64() },
        }
    }
}

/// Root-of-unity parameters and the embedding primes used for an exact window.
#[derive(Serialize)]
pub struct Construction {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ConstructionParams>,
    pub order: u64,
    pub contexts: Vec<ContextParams>,
}

pub fn construction_for(w: &AnyWindow, prime_bits: u32, primes: usize) -> Result<Option<Construction>> {
    let AnyWindow::Exact(ew) = w else { return Ok(None) };
    let params = match ew.provenance() {
        Provenance::RootOfUnity => Some(construction_params(ew.dim())?),
        _ => None,
    };
    let order = ew.order();
    let contexts = find_embedding_primes(order, prime_bits, primes)?.iter().map(|c| c.params()).collect();
    Ok(Some(Construction { params, order, contexts }))
}

#[derive(Serialize)]
pub struct MomentRow {
    pub class: String,
    pub monomial: String,
    pub e: String,
    pub e2: String,
}

#[derive(Serialize)]
pub struct Uniqueness {
    pub classes: usize,
    pub unique: bool,
    pub first_moment_minimal: bool,
    pub second_moment_gap: bool,
    pub passed: bool,
    pub moments: Vec<MomentRow>,
}

#[derive(Serialize)]
pub struct QSummary {
    pub prime: u64,
    pub degree_bound: usize,
    pub degree: Option<usize>,
    pub nonzero: bool,
}

#[derive(Serialize)]
pub struct Term {
    pub monomial: String,
    pub coefficient: String,
}

#[derive(Serialize)]
pub struct AnalyzeResult {
    pub support: String,
    pub profile_l: Vec<usize>,
    pub profile_m: Vec<usize>,
    pub interval: (i64, i64),
    pub gamma: usize,
    pub normalized_profile_l: Vec<usize>,
    pub normalized_support: String,
    pub ci_monomial: String,
    pub coefficient: String,
    pub coefficient_residue: u64,
    pub coefficient_prime: u64,
    pub coefficient_modulus: f64,
    pub lowest_index_monomial: String,
    /// `null` when the class count exceeds the budget.
    pub uniqueness: Option<Uniqueness>,
    pub q: QSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion: Option<Vec<Term>>,
}

impl AnalyzeResult {
    pub fn passed(&self) -> bool {
        self.coefficient_residue != 0 && self.q.nonzero && self.uniqueness.as_ref().is_none_or(|u| u.passed)
    }
}

pub fn analyze_support(
    support: &[TimeFreqIndex],
    n: usize,
    prime_bits: u32,
    expand: bool,
    class_budget: u128,
) -> Result<AnalyzeResult> {
    let profile = profile_of_support(support, n)?;
    let interval = interval_of_profile(&profile)?;
    let (gamma, normalized) = normalize_profile(&profile);
    let ci = ci_coefficient(support, n)?;
    let ctx = find_embedding_prime(n as u64, prime_bits)?;
    let uniqueness = match verify_ci_uniqueness(&normalized, class_budget) {
        Ok(u) => Some(Uniqueness {
            classes: u.classes.len(),
            unique: u.unique,
            first_moment_minimal: u.first_moment_minimal,
            second_moment_gap: u.second_moment_gap,
            passed: u.passed(),
            moments: u
                .classes
                .iter()
                .map(|c| MomentRow {
                    class: c.class.to_string(),
                    monomial: c.monomial.to_string(),
                    e: c.moments.e.to_string(),
                    e2: c.moments.e2.to_string(),
                })
                .collect(),
        }),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let q = q_polynomial(support, n, prime_bits)?;
    let expansion = if expand {
        if n > MAX_EXPANSION_DIM {
            return Err(Error::DimensionTooLarge { n, max: MAX_EXPANSION_DIM });
        }
        Some(
            expand_determinant(support, n)?
                .iter()
                .map(|(m, c)| Term { monomial: m.to_string(), coefficient: c.to_string() })
                .collect(),
        )
    } else {
        None
    };
    Ok(AnalyzeResult {
        support: format_support(support),
        profile_l: profile.l().to_vec(),
        profile_m: profile.m().to_vec(),
        interval,
        gamma,
        normalized_profile_l: normalized.l().to_vec(),
        normalized_support: format_support(&ci.normalized_support),
        ci_monomial: ci.monomial.to_string(),
        coefficient: ci.coefficient.to_string(),
        coefficient_residue: ci.coefficient.to_residue(&ctx)?,
        coefficient_prime: ctx.prime(),
        coefficient_modulus: ci.coefficient.to_complex().norm(),
        lowest_index_monomial: lowest_index_monomial(support, n)?.to_string(),
        uniqueness,
        q: QSummary {
            prime: q.context.prime(),
            degree_bound: q.degree_bound,
            degree: q.degree(),
            nonzero: q.is_nonzero(),
        },
        expansion,
    })
}

#[derive(Serialize)]
pub struct SimulationSummary {
    pub trials: u64,
    pub kept: usize,
    pub recovered: u64,
    pub failures: u64,
    pub max_relative_error: Option<f64>,
    pub tolerance: f64,
}

#[derive(Serialize)]
pub struct SimulationResult {
    pub summary: SimulationSummary,
    pub trials: Vec<TrialResult>,
}
