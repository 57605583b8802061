//! Seeded checks of the structural facts the library relies on.

use lcaudit::audit::{
    check_factorizability, check_free_variables, check_functional_sufficiency,
    check_local_causality, check_statistical_sufficiency, Verdict,
};
use lcaudit::bounds::{chsh, lhv_membership, DEFAULT_STRATEGY_CAP};
use lcaudit::fisher::{
    is_sufficient_bayes, is_sufficient_conditional, is_sufficient_factorization,
    minimal_sufficient_partition,
};
use lcaudit::sample;
use lcaudit::scenario::{build_singlet, Phenomenology};
use lcaudit::{table_close, ProbTable, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

#[test]
fn local_causality_is_the_conjunction_of_both_sufficiencies() {
    let mut rng = sample::rng(101);
    let mut kinds = [0usize; 4];
    for i in 0..2_000 {
        let m = sample::bell_model(&mut rng);
        let lc = check_local_causality(&m, &tol());
        let st = check_statistical_sufficiency(&m, &tol());
        let fu = check_functional_sufficiency(&m, &tol());
        assert_eq!(
            lc.verdict.passed(),
            st.verdict.passed() && fu.verdict.passed(),
            "model {i}: {m:?}"
        );
        kinds[usize::from(st.verdict.passed()) * 2 + usize::from(fu.verdict.passed())] += 1;
        let fa = check_factorizability(&m, &tol());
        if lc.skipped_cells.is_empty() && fa.skipped_cells.is_empty() {
            assert_eq!(fa.verdict.passed(), lc.verdict.passed(), "model {i}: {m:?}");
        }
    }
    // every combination of the two sufficiency verdicts is exercised
    assert!(kinds.iter().all(|&k| k > 20), "{kinds:?}");
}

#[test]
fn verdicts_are_never_undefined_for_supported_models() {
    let mut rng = sample::rng(102);
    for _ in 0..500 {
        let m = sample::bell_model(&mut rng);
        let fv = check_free_variables(&m, &tol());
        assert_ne!(fv.verdict, Verdict::UndefinedCells);
        assert!(fv.cells_evaluated > 0);
    }
}

#[test]
fn sufficiency_criteria_agree() {
    let mut rng = sample::rng(103);
    let mut sufficient = 0;
    for i in 0..1_000 {
        let (f, t) = sample::family_and_statistic(&mut rng);
        let c = is_sufficient_conditional(&f, &t, &tol()).unwrap();
        let fa = is_sufficient_factorization(&f, &t, &tol()).unwrap();
        let b = is_sufficient_bayes(&f, &t, &sample::positive_prior(&mut rng, &f), &tol()).unwrap();
        assert_eq!(c.sufficient, fa.sufficient, "case {i}: {f:?} {t:?}");
        assert_eq!(c.sufficient, b.sufficient, "case {i}: {f:?} {t:?}");
        sufficient += usize::from(c.sufficient);

        let m = minimal_sufficient_partition(&f, &tol()).unwrap();
        if c.sufficient {
            // outcomes that no parameter can produce may sit in any fiber
            let live: Vec<usize> = (0..f.outcomes().len())
                .filter(|&x| (0..f.thetas().len()).any(|th| f.p(th, x) > 0.0))
                .collect();
            for &x in &live {
                for &y in &live {
                    if t.apply(x) == t.apply(y) {
                        assert_eq!(m.apply(x), m.apply(y), "case {i}: {f:?} {t:?}");
                    }
                }
            }
        }
    }
    assert!((200..800).contains(&sufficient), "{sufficient}");
}

#[test]
fn lhv_mixtures_are_recovered() {
    let mut rng = sample::rng(104);
    for i in 0..200 {
        let m = sample::lhv_mixture(&mut rng);
        let ph = m.predict();
        let cert = lhv_membership(&ph, &tol(), DEFAULT_STRATEGY_CAP).unwrap();
        assert!(cert.feasible, "mixture {i}");
        assert!(cert.reconstruction_error.unwrap() <= 1e-9);
        let rebuilt = cert.to_model().unwrap();
        assert!(check_local_causality(&rebuilt, &tol()).verdict.passed());
        for (x, y) in rebuilt.predict().tables().iter().zip(ph.tables()) {
            assert!(table_close(x, y, &tol()).unwrap().close);
        }
    }
}

fn binary_phenomenologies(seed: u64, n: usize) -> Vec<Phenomenology> {
    let mut rng = sample::rng(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let m = sample::bell_model(&mut rng);
        let s = m.scenario();
        if s.outcomes_a.len() == 2 && s.outcomes_b.len() == 2 {
            out.push(m.predict());
        }
    }
    out
}

#[test]
fn chsh_violation_implies_infeasibility() {
    let t = tol();
    let mut phs = binary_phenomenologies(105, 150);
    let singlet = build_singlet(
        &[0.0, std::f64::consts::FRAC_PI_2],
        &[std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_4],
    )
    .unwrap()
    .predict();
    let sc = singlet.scenario().clone();
    let noise = Phenomenology::new(
        sc.clone(),
        vec![ProbTable::uniform(sc.outcome_axes()).unwrap(); sc.n_pairs()],
    )
    .unwrap();
    for k in 0..=20 {
        phs.push(singlet.mix(f64::from(k) / 20.0, &noise).unwrap());
    }
    let mut violations = 0;
    for ph in &phs {
        let s = ph.scenario();
        let (a, b) = (&s.settings_a, &s.settings_b);
        let value = chsh(ph, &a[0], &a[1], &b[0], &b[1]).unwrap();
        if value.abs() > 2.0 + 8.0 * t.eq {
            violations += 1;
            assert!(
                !lhv_membership(ph, &t, DEFAULT_STRATEGY_CAP)
                    .unwrap()
                    .feasible
            );
        }
    }
    assert!(violations >= 6, "{violations}");
}

#[test]
fn chsh_is_linear_under_mixing() {
    let phs = binary_phenomenologies(106, 60);
    for pair in phs.chunks(2) {
        let (p, q) = (&pair[0], &pair[1]);
        if p.scenario() != q.scenario() {
            continue;
        }
        let s = p.scenario();
        let (a, b) = (&s.settings_a, &s.settings_b);
        let f = |x: &Phenomenology| chsh(x, &a[0], &a[1], &b[0], &b[1]).unwrap();
        let mixed = p.mix(0.3, q).unwrap();
        assert!((f(&mixed) - (0.3 * f(p) + 0.7 * f(q))).abs() < 1e-12);
    }
}
