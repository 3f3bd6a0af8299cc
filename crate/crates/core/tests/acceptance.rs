//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p gabor-glp --test acceptance`. Names given as
//! arguments (e.g. `AC3`) restrict the run.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gabor_glp::erasure::{
    decode, encode, random_signal, relative_error, support_bound_check_float, ErasurePattern,
};
use gabor_glp::gabor::{frame_operator_defect, Provenance, TimeFreqIndex, Window};
use gabor_glp::glp::{
    checker_for, fourier_minor_check, verify_glp, Backend, GlpVerdict, SupportEnumeration,
};
use gabor_glp::monomial::{
    all_profiles, ci_coefficient, enumerate_classes, expand_determinant, moments_of_monomial, monomial_of_class,
    profile_of_support, q_from_expansion, q_polynomial, verify_ci_uniqueness, DEFAULT_CLASS_BUDGET,
};
use gabor_glp::window::{construct, power_window_root_of_unity, random_window, AnyWindow, WindowSpec};
use gabor_glp::Error;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn random_support(rng: &mut ChaCha8Rng, n: usize) -> Vec<TimeFreqIndex> {
    let mut cols = index::sample(rng, n * n, n).into_vec();
    cols.sort_unstable();
    cols.into_iter().map(|c| TimeFreqIndex::from_column(c, n)).collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn exhaustive_exact(n: usize, limit: Duration) -> Outcome {
    let w = construct(n, WindowSpec::RootOfUnity, 0).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let checker = checker_for(&w, &Backend::exact()).map_err(|e| e.to_string())?;
    let r = verify_glp(checker.as_ref(), w.provenance(), &SupportEnumeration::exhaustive(n))
        .map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let expect = binomial((n * n) as u64, n as u64);
    let detail = format!(
        "N={n}: {} supports, {} dependent, primes {:?}, {:.2?} (limit {:?})",
        r.supports_tested, r.dependent, r.primes, t, limit
    );
    if r.supports_tested == expect && r.dependent == 0 && r.verdict == GlpVerdict::GlpCertified && t <= limit {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1() -> Outcome {
    let exact = exhaustive_exact(4, Duration::from_secs(10))?;
    // independent check on the complex image of the same window
    let w = AnyWindow::Float(power_window_root_of_unity(4).map_err(|e| e.to_string())?.to_complex());
    let checker = checker_for(&w, &Backend::float()).map_err(|e| e.to_string())?;
    let r = verify_glp(checker.as_ref(), w.provenance(), &SupportEnumeration::exhaustive(4))
        .map_err(|e| e.to_string())?;
    if r.dependent != 0 {
        return Err(format!("{exact}; float image reports {} dependent", r.dependent));
    }
    Ok(format!("{exact}; float image agrees"))
}

fn ac2() -> Outcome {
    exhaustive_exact(5, Duration::from_secs(60))
}

fn ac3() -> Outcome {
    exhaustive_exact(6, Duration::from_secs(30 * 60))
}

fn ac4() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [7usize, 8] {
        let w = construct(n, WindowSpec::RootOfUnity, 0).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let checker = checker_for(&w, &Backend::exact()).map_err(|e| e.to_string())?;
        let e = SupportEnumeration::sampled(n, 100_000, 0x5eed + n as u64).map_err(|e| e.to_string())?;
        let r = verify_glp(checker.as_ref(), w.provenance(), &e).map_err(|e| e.to_string())?;
        let t = start.elapsed();
        ok &= r.supports_tested == 100_000 && r.dependent == 0 && t <= Duration::from_secs(300);
        lines.push(format!("N={n}: {} sampled, {} dependent, {:.2?}", r.supports_tested, r.dependent, t));
    }
    let detail = lines.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn multinomial(l: &[usize]) -> u128 {
    let n: usize = l.iter().sum();
    let fact = |k: usize| (1..=k as u128).product::<u128>();
    l.iter().fold(fact(n), |acc, &x| acc / fact(x))
}

fn ac5() -> Outcome {
    let mut lines = Vec::new();
    for n in 1..=6 {
        let mut profiles = 0;
        let mut classes = 0u128;
        for p in all_profiles(n).into_iter().filter(|p| p.is_normalized()) {
            let r = verify_ci_uniqueness(&p, DEFAULT_CLASS_BUDGET).map_err(|e| e.to_string())?;
            if r.classes.len() as u128 != multinomial(p.l()) {
                return Err(format!("profile {p}: {} classes, expected {}", r.classes.len(), multinomial(p.l())));
            }
            if !r.passed() {
                return Err(format!(
                    "profile {p}: unique={} first={} gap={}",
                    r.unique, r.first_moment_minimal, r.second_moment_gap
                ));
            }
            profiles += 1;
            classes += r.classes.len() as u128;
        }
        lines.push(format!("N={n}: {profiles} profiles/{classes} classes"));
    }
    Ok(lines.join(", "))
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for n in 2..=5 {
        for _ in 0..100 {
            let s = random_support(&mut rng, n);
            let ci = ci_coefficient(&s, n).map_err(|e| e.to_string())?;
            let terms = expand_determinant(&ci.normalized_support, n).map_err(|e| e.to_string())?;
            let Some(c) = terms.get(&ci.monomial) else {
                return Err(format!("N={n} {s:?}: CI monomial {} missing from expansion", ci.monomial));
            };
            if c != &ci.coefficient || ci.coefficient.is_zero() {
                return Err(format!("N={n} {s:?}: expansion {c} vs formula {}", ci.coefficient));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} supports, coefficients equal and nonzero"))
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut max_deg = BTreeMap::new();
    for n in 3..=6 {
        for _ in 0..100 {
            let s = random_support(&mut rng, n);
            let q = q_polynomial(&s, n, 62).map_err(|e| format!("N={n} {s:?}: {e}"))?;
            let Some(deg) = q.degree() else {
                return Err(format!("N={n} {s:?}: Q vanishes"));
            };
            if deg > n * (n - 1) * (n - 1) {
                return Err(format!("N={n} {s:?}: degree {deg}"));
            }
            let sym = q_from_expansion(&s, n).map_err(|e| e.to_string())?;
            for (e, c) in q.coefficients.iter().enumerate() {
                let expect = match sym.get(&(e as u64)) {
                    Some(v) => v.to_residue(&q.context).map_err(|e| e.to_string())?,
                    None => 0,
                };
                if *c != expect {
                    return Err(format!("N={n} {s:?}: coefficient of x^{e} differs from the expansion"));
                }
            }
            let profile = profile_of_support(&s, n).map_err(|e| e.to_string())?;
            for class in enumerate_classes(&profile) {
                let m = monomial_of_class(&profile, &class).map_err(|e| e.to_string())?;
                let e2 = moments_of_monomial(&m).e2;
                if Ratio::from_integer(m.x_exponent() as i64) != e2 * Ratio::from_integer(n as i64) {
                    return Err(format!("N={n} {s:?}: exponent {} vs N*E2 {}", m.x_exponent(), e2 * n as i64));
                }
            }
            let slot = max_deg.entry(n).or_insert(0);
            *slot = (*slot).max(deg);
        }
    }
    Ok(format!("all nonzero; max degree per N {max_deg:?} (bounds 12, 36, 80, 150)"))
}

fn ac8() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=12 {
        for seed in 0..100 {
            let w = random_window(n, 8000 + seed).map_err(|e| e.to_string())?;
            let norm2: f64 = w.entries().iter().map(Complex64::norm_sqr).sum();
            let d = frame_operator_defect(w.entries()).map_err(|e| e.to_string())?;
            let rel = d / (n as f64 * norm2);
            worst = worst.max(rel);
            if rel > 1e-10 {
                return Err(format!("N={n} seed={seed}: defect {d:e}"));
            }
        }
    }
    Ok(format!("1100 windows, worst defect/(N||w||^2) = {worst:.2e}"))
}

fn ac9() -> Outcome {
    let mut lines = Vec::new();
    for n in [4usize, 5, 6] {
        let w = power_window_root_of_unity(n).map_err(|e| e.to_string())?.to_complex();
        let mut worst = 0.0f64;
        for trial in 0..500u64 {
            let f = random_signal(n, 90_000 + trial);
            let packets = encode(&f, &w).map_err(|e| e.to_string())?;
            let keep = ErasurePattern::random(n, n, trial).map_err(|e| e.to_string())?;
            let g = decode(&keep.apply(&packets), &w).map_err(|e| format!("N={n} trial {trial}: {e}"))?;
            let err = relative_error(&g, &f);
            worst = worst.max(err);
            if err > 1e-8 {
                return Err(format!("N={n} trial {trial}: relative error {err:e}"));
            }
            let short = ErasurePattern::random(n, n - 1, trial).map_err(|e| e.to_string())?;
            if !matches!(decode(&short.apply(&packets), &w), Err(Error::InsufficientPackets { .. })) {
                return Err(format!("N={n} trial {trial}: N-1 packets did not error"));
            }
        }
        lines.push(format!("N={n}: worst {worst:.1e}"));
    }
    let ones = Window::new(vec![Complex64::new(1.0, 0.0); 2], Provenance::User).map_err(|e| e.to_string())?;
    let packets = encode(&random_signal(2, 1), &ones).map_err(|e| e.to_string())?;
    let failing = (0..4)
        .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
        .find(|&(a, b)| {
            let keep = ErasurePattern {
                surviving: vec![TimeFreqIndex::from_column(a, 2), TimeFreqIndex::from_column(b, 2)],
                seed: None,
            };
            matches!(decode(&keep.apply(&packets), &ones), Err(Error::RankDeficient { .. }))
        })
        .ok_or("the (1,1) window never reported rank deficiency")?;
    lines.push(format!(
        "(1,1) window rank deficient on {{{}; {}}}",
        TimeFreqIndex::from_column(failing.0, 2),
        TimeFreqIndex::from_column(failing.1, 2)
    ));
    Ok(lines.join(", "))
}

fn ac10() -> Outcome {
    let mut lines = Vec::new();
    for n in [4usize, 5] {
        let w = power_window_root_of_unity(n).map_err(|e| e.to_string())?.to_complex();
        let mut min = usize::MAX;
        for trial in 0..1000u64 {
            let f = random_signal(n, 50_000 + trial);
            let b = support_bound_check_float(&f, &w, 1e-8).map_err(|e| e.to_string())?;
            min = min.min(b.nonzero);
            if !b.holds {
                return Err(format!("N={n} trial {trial}: {} nonzero < {}", b.nonzero, b.bound));
            }
        }
        lines.push(format!("N={n}: min support {min} (bound {})", n * n - n + 1));
    }
    Ok(lines.join(", "))
}

fn ac11() -> Outcome {
    let mut lines = Vec::new();
    for p in [2u64, 3, 5, 7] {
        let r = fourier_minor_check(p, 62, 3).map_err(|e| e.to_string())?;
        if !r.pass {
            return Err(format!("p={p}: {} vanishing minors", r.zero_minors.len()));
        }
        lines.push(format!("p={p}: {} minors", r.minors_checked));
    }
    Ok(lines.join(", "))
}

fn ac12() -> Outcome {
    let start = Instant::now();
    for seed in 0..50u64 {
        let w = AnyWindow::Float(random_window(4, 1200 + seed).map_err(|e| e.to_string())?);
        let checker = checker_for(&w, &Backend::float()).map_err(|e| e.to_string())?;
        let r = verify_glp(checker.as_ref(), w.provenance(), &SupportEnumeration::exhaustive(4))
            .map_err(|e| e.to_string())?;
        if r.verdict != GlpVerdict::GlpCertified {
            return Err(format!("seed {}: {} dependent supports", 1200 + seed, r.dependent));
        }
    }
    Ok(format!("50/50 windows certified, {:.2?}", start.elapsed()))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 12] = [
        ("AC1", "N=4 root-of-unity window, exhaustive exact, <= 10 s", ac1),
        ("AC2", "N=5 exhaustive exact, <= 60 s", ac2),
        ("AC3", "N=6 exhaustive exact, <= 30 min", ac3),
        ("AC4", "N=7, 8: 1e5 sampled supports each, <= 5 min each", ac4),
        ("AC5", "CI uniqueness for all normalized profiles, N <= 6", ac5),
        ("AC6", "CI coefficient equals expansion coefficient, N = 2..5", ac6),
        ("AC7", "Q nonzero, degree bound, exponents N*E[X^2], N = 3..6", ac7),
        ("AC8", "tight frame defect <= 1e-10 N ||w||^2, N = 2..12", ac8),
        ("AC9", "erasure recovery from N packets, N = 4, 5, 6", ac9),
        ("AC10", "|supp V f| >= N^2 - N + 1, N = 4, 5", ac10),
        ("AC11", "DFT minors nonzero, p = 2, 3, 5, 7", ac11),
        ("AC12", "50 Gaussian windows GLP at N = 4", ac12),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, what, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == name) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("{name} PASS [{t:.2?}] {what}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{name} FAIL [{t:.2?}] {what}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
