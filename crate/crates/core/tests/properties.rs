use gabor_glp::gabor::{Provenance, TimeFreqIndex, TimeFrequencyPlane, Window};
use gabor_glp::glp::{
    check_support, checker_for, verify_glp, verify_glp_with, Backend, GlpVerdict, SupportEnumeration,
    VerifyOptions,
};
use gabor_glp::monomial::{
    all_profiles, expand_determinant, interval_of_profile, lowest_index_monomials_all_choices, normalize_profile,
    profile_of_support, rearrangement_check, ColumnProfile,
};
use gabor_glp::scalar::{determinant, find_embedding_prime, ComplexField, Ring};
use gabor_glp::window::{construct, power_window_generic, power_window_root_of_unity, AnyWindow, WindowSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

fn sized_vec(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    (1..=max).prop_flat_map(complex_vec)
}

fn support_strategy(n: usize) -> impl Strategy<Value = Vec<TimeFreqIndex>> {
    proptest::sample::subsequence((0..n * n).collect::<Vec<_>>(), n)
        .prop_map(move |cols| cols.into_iter().map(|c| TimeFreqIndex::from_column(c, n)).collect())
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn float_det(w: &[Complex64], support: &[TimeFreqIndex]) -> Complex64 {
    let plane = TimeFrequencyPlane::new(ComplexField::default(), w.len()).unwrap();
    let m = plane.gabor_matrix(w, support).unwrap().matrix;
    determinant(plane.ring(), &m).unwrap()
}

proptest! {
    #[test]
    fn modulation_and_translation_commute_up_to_omega(x in sized_vec(8)) {
        let n = x.len();
        let plane = TimeFrequencyPlane::new(ComplexField::default(), n).unwrap();
        let mt = plane.modulate(&plane.translate(&x, 1).unwrap(), 1).unwrap();
        let tm = plane.translate(&plane.modulate(&x, 1).unwrap(), 1).unwrap();
        let w = plane.omega_pow(1);
        for (a, b) in mt.iter().zip(&tm) {
            prop_assert!((a - w * b).norm() < 1e-9);
        }
    }

    #[test]
    fn shifts_are_unitary(x in sized_vec(12), k in 0usize..12, l in 0usize..12) {
        let n = x.len();
        let plane = TimeFrequencyPlane::new(ComplexField::default(), n).unwrap();
        let nx = norm(&x);
        prop_assert!((norm(&plane.translate(&x, k % n).unwrap()) - nx).abs() <= 1e-12 * nx.max(1.0));
        prop_assert!((norm(&plane.modulate(&x, l % n).unwrap()) - nx).abs() <= 1e-12 * nx.max(1.0));
    }

    #[test]
    fn check_support_ignores_column_order(
        w in complex_vec(4),
        s in support_strategy(4),
        shuffle in any::<u64>(),
    ) {
        prop_assume!(norm(&w) > 1e-3);
        let win = AnyWindow::Float(Window::new(w, Provenance::User).unwrap());
        let mut t = s.clone();
        let k = (shuffle % 4) as usize;
        t.rotate_left(k);
        t.swap(0, (shuffle as usize / 4) % 4);
        let a = check_support(&win, &s, &Backend::float()).unwrap().is_independent();
        let b = check_support(&win, &t, &Backend::float()).unwrap().is_independent();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn modulation_shift_preserves_determinant_modulus(
        w in complex_vec(5),
        s in support_strategy(5),
        gamma in 0usize..5,
    ) {
        let shifted: Vec<TimeFreqIndex> =
            s.iter().map(|i| TimeFreqIndex { kappa: i.kappa, lambda: (i.lambda + 5 - gamma) % 5 }).collect();
        let a = float_det(&w, &s).norm();
        let b = float_det(&w, &shifted).norm();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn time_shift_matches_rotated_window(
        w in complex_vec(5),
        s in support_strategy(5),
        gamma in 0usize..5,
    ) {
        let n = 5;
        let shifted: Vec<TimeFreqIndex> =
            s.iter().map(|i| TimeFreqIndex { kappa: (i.kappa + n - gamma) % n, lambda: i.lambda }).collect();
        let rotated: Vec<Complex64> = (0..n).map(|j| w[(j + gamma) % n]).collect();
        let a = float_det(&w, &shifted);
        let b = float_det(&rotated, &s);
        // orientation s = +1, and the identity even holds without the modulus
        prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn expansion_terms_have_degree_n(s in support_strategy(4)) {
        for m in expand_determinant(&s, 4).unwrap().keys() {
            prop_assert_eq!(m.degree(), 4);
        }
    }

    #[test]
    fn normalization_makes_offsets_nonnegative(l in proptest::collection::vec(0usize..4, 1..8)) {
        let n = l.len();
        let total: usize = l.iter().sum();
        prop_assume!(total <= n);
        let mut l = l;
        l[n - 1] += n - total;
        let p = ColumnProfile::new(l).unwrap();
        let (gamma, q) = normalize_profile(&p);
        prop_assert!(gamma < n);
        let offs = q.offsets();
        prop_assert!(offs.iter().all(|&d| d >= 0));
        prop_assert_eq!(*offs.iter().min().unwrap(), 0);
        prop_assert!(q.m().windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(q.m()[n], n);
    }

    #[test]
    fn tight_frame_defect_is_small(w in sized_vec(12)) {
        prop_assume!(norm(&w) > 1e-3);
        let d = gabor_glp::gabor::frame_operator_defect(&w).unwrap();
        prop_assert!(d <= 1e-10 * w.len() as f64 * norm(&w).powi(2));
    }
}

#[test]
fn group_law_holds_up_to_a_power_of_omega() {
    for n in 1..=6usize {
        let ctx = find_embedding_prime(n as u64, 62).unwrap();
        let plane = TimeFrequencyPlane::new(ctx.clone(), n).unwrap();
        let xs: Vec<Vec<u64>> = (0..2).map(|t| (0..n).map(|j| (j * j + 3 * j + 7 + t * 11) as u64).collect()).collect();
        for a in 0..n * n {
            for b in 0..n * n {
                let (i1, i2) = (TimeFreqIndex::from_column(a, n), TimeFreqIndex::from_column(b, n));
                let sum = TimeFreqIndex { kappa: (i1.kappa + i2.kappa) % n, lambda: (i1.lambda + i2.lambda) % n };
                let found = (0..n).find(|&s| {
                    xs.iter().all(|x| {
                        let lhs = plane.tf_shift(&plane.tf_shift(x, i1).unwrap(), i2).unwrap();
                        let rhs = plane.tf_shift(x, sum).unwrap();
                        lhs.iter().zip(&rhs).all(|(&l, &r)| l == ctx.mul(plane.omega_pow(s), r))
                    })
                });
                assert!(found.is_some(), "n={n} {i1} {i2}");
            }
        }
    }
}

#[test]
fn interval_property_for_all_profiles_up_to_8() {
    for n in 1..=8 {
        for p in all_profiles(n) {
            let (a, b) = interval_of_profile(&p).unwrap();
            assert!(b - a <= n as i64 - 1);
        }
    }
}

#[test]
fn rearrangement_lemma_up_to_7() {
    for n in 1..=7 {
        let mut perms = 0;
        for p in all_profiles(n) {
            perms += rearrangement_check(&p).unwrap();
        }
        let fact: u64 = (1..=n as u64).product();
        assert_eq!(perms, fact * all_profiles(n).len() as u64);
    }
}

#[test]
fn greedy_monomial_ignores_tie_breaks() {
    for n in 1..=4 {
        let e = SupportEnumeration::exhaustive(n);
        for cols in e.to_vec() {
            let s: Vec<TimeFreqIndex> = cols.iter().map(|&c| TimeFreqIndex::from_column(c, n)).collect();
            assert_eq!(lowest_index_monomials_all_choices(&s, n).unwrap().len(), 1, "{s:?}");
        }
    }
}

#[test]
fn one_column_per_shift_gives_z0_power() {
    let s: Vec<TimeFreqIndex> = (0..4).map(|k| TimeFreqIndex { kappa: k, lambda: (k * 3) % 4 }).collect();
    assert_eq!(profile_of_support(&s, 4).unwrap().l(), &[1, 1, 1, 1]);
    let all = lowest_index_monomials_all_choices(&s, 4).unwrap();
    assert_eq!(all.into_iter().next().unwrap().to_string(), "z0^4");
}

#[test]
fn sampled_reports_agree_with_exhaustive_certificate() {
    let w = construct(4, WindowSpec::RootOfUnity, 0).unwrap();
    let checker = checker_for(&w, &Backend::exact()).unwrap();
    let full = verify_glp(checker.as_ref(), w.provenance(), &SupportEnumeration::exhaustive(4)).unwrap();
    assert_eq!(full.verdict, GlpVerdict::GlpCertified);
    for seed in 0..5 {
        let e = SupportEnumeration::sampled(4, 300, seed).unwrap();
        let r = verify_glp(checker.as_ref(), w.provenance(), &e).unwrap();
        assert_eq!(r.dependent, 0);
        assert_eq!(r.verdict, GlpVerdict::GlpOnSample);
    }
}

#[test]
fn report_does_not_depend_on_worker_count() {
    let w = construct(4, WindowSpec::Ones, 0).unwrap();
    let checker = checker_for(&w, &Backend::exact()).unwrap();
    let e = SupportEnumeration::exhaustive(4);
    let opts = VerifyOptions { max_witnesses: 20, chunk: 97 };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| verify_glp_with(checker.as_ref(), w.provenance(), &e, opts).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.witnesses, b.witnesses);
    assert_eq!(a.dependent, b.dependent);
    assert!(a.dependent > 0);
}

#[test]
fn root_of_unity_window_float_image_is_glp() {
    for n in [4, 5] {
        let exact = AnyWindow::Exact(power_window_root_of_unity(n).unwrap());
        let float = AnyWindow::Float(exact.to_complex());
        assert!(float.to_complex().entries().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        for (w, b) in [(&exact, Backend::exact()), (&float, Backend::float())] {
            let checker = checker_for(w, &b).unwrap();
            let r = verify_glp(checker.as_ref(), w.provenance(), &SupportEnumeration::exhaustive(n)).unwrap();
            assert_eq!(r.dependent, 0, "n={n} {b:?}");
        }
    }
}

#[test]
fn pi_power_window_is_glp_at_4() {
    let w = AnyWindow::Float(power_window_generic(4, Complex64::new(std::f64::consts::PI, 0.0)).unwrap());
    let checker = checker_for(&w, &Backend::float()).unwrap();
    let r = verify_glp(checker.as_ref(), w.provenance(), &SupportEnumeration::exhaustive(4)).unwrap();
    assert_eq!(r.verdict, GlpVerdict::GlpCertified);
    let unimodular = power_window_generic(6, Complex64::from_polar(1.0, 1.0)).unwrap();
    assert!(unimodular.entries().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn ones_window_fails_at_2() {
    let w = AnyWindow::Float(power_window_generic(2, Complex64::new(1.0, 0.0)).unwrap());
    let checker = checker_for(&w, &Backend::float()).unwrap();
    let r = verify_glp(checker.as_ref(), w.provenance(), &SupportEnumeration::exhaustive(2)).unwrap();
    assert_eq!(r.verdict, GlpVerdict::NotGlp);
    let s = r.witnesses.iter().map(|d| d.support.clone()).collect::<Vec<_>>();
    assert!(s.contains(&vec![TimeFreqIndex { kappa: 0, lambda: 0 }, TimeFreqIndex { kappa: 1, lambda: 0 }]));
}
