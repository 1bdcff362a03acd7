use super::*;

fn quick() -> SuiteConfig {
    SuiteConfig {
        modulus: ModulusConfig::with_grid(256, 4),
        figure_samples: 300,
        convexity_samples: 100,
        ..SuiteConfig::default()
    }
}

fn linf() -> Norm {
    Norm::lp(f64::INFINITY).unwrap()
}

fn record<'a>(r: &'a VerificationReport, id: &str) -> &'a CheckRecord {
    r.checks.iter().find(|c| c.id == id).unwrap_or_else(|| panic!("no record {id}"))
}

#[test]
fn empty_suite_gives_empty_report() {
    let r = run_suite(&[], &quick()).unwrap();
    assert!(r.checks.is_empty());
    assert!(!r.has_failures());
}

#[test]
fn euclidean_day_nordlander_checks_pass() {
    let specs = select_checks(
        default_suite(&[Norm::euclidean()], 1e-4),
        &["generalized-day-nordlander", "phi-day-nordlander", "zeta-day-nordlander", "euclidean-coincidence"],
    )
    .unwrap();
    assert_eq!(specs.len(), 4);
    let r = run_suite(&specs, &quick()).unwrap();
    for c in &r.checks {
        assert_eq!(c.status, Status::Pass, "{c:?}");
        assert!(c.worst_margin >= -1e-4, "{} {}", c.id, c.worst_margin);
        assert!(c.runtime_ms.is_some());
    }
}

/// On the square λ⁻ = 0 while λ⁺(ε) = ε (corner x, y = e₁), so the chain
/// `0 ≤ λ⁻ ≤ λ⁺ ≤ ε` is tight at both ends and has a gap of ε in the middle.
#[test]
fn lambda_le_eps_on_the_square() {
    let mut specs = select_checks(default_suite(&[linf()], 1e-3), &["eq5"]).unwrap();
    specs[0].eps_grid = vec![0.5];
    let r = run_suite(&specs, &quick()).unwrap();
    let c = record(&r, "eq5-lambda-le-eps");
    assert_eq!(c.status, Status::Pass);
    assert_eq!(c.worst_margin, 0.0);

    let norms = [linf()];
    let catalogue::Plan::Syms(syms, _) = catalogue::validate(&specs[0]).unwrap().plan(&norms[0], &[0.5]) else {
        panic!()
    };
    let mut needs = BTreeMap::new();
    register(&mut needs, 0, &syms);
    let table = Table::build(&norms, needs, &quick().modulus);
    let (mut outcomes, mut notes) = (Vec::new(), Vec::new());
    evaluate_syms(&table, 0, &norms[0], &syms, 0.0, &mut outcomes, &mut notes);
    let margins: Vec<f64> = outcomes.iter().map(|o| o.margin).collect();
    assert_eq!(margins.len(), 3);
    assert_eq!(margins[0], 0.0);
    assert!((margins[1] - 0.5).abs() < 1e-12, "{margins:?}");
    assert!(margins[2].abs() < 1e-12, "{margins:?}");
}

#[test]
fn selection_by_prefix_and_unknown_names() {
    let all = default_suite(&[Norm::euclidean()], 1e-3);
    assert_eq!(all.len(), check_ids().len());
    let two = select_checks(all.clone(), &["eq4", "eq5"]).unwrap();
    assert_eq!(two.iter().map(|s| s.id.as_str()).collect::<Vec<_>>(), ["eq4-delta-lambda-minus", "eq5-lambda-le-eps"]);
    let err = select_checks(all.clone(), &["bogus"]).unwrap_err();
    assert!(err.to_string().contains("eq3-rho-lambda-plus"), "{err}");
    // a prefix must end at a word boundary
    assert!(select_checks(all, &["eq"]).is_err());
}

#[test]
fn invalid_specs_are_rejected() {
    let mut specs = select_checks(default_suite(&[Norm::euclidean()], 1e-3), &["eq5"]).unwrap();
    specs.push(specs[0].clone());
    assert!(matches!(run_suite(&specs, &quick()), Err(ModuliError::Input(_))));
    specs.pop();
    specs[0].slack = -1.0;
    assert!(run_suite(&specs, &quick()).is_err());
    specs[0].slack = 0.0;
    specs[0].eps_grid = vec![0.5, 0.25];
    assert!(run_suite(&specs, &quick()).is_err());
    specs[0].eps_grid = vec![0.5];
    specs[0].kind = CheckKind::Monotonicity;
    assert!(run_suite(&specs, &quick()).is_err());
}

#[test]
fn out_of_domain_points_are_skipped_with_notes() {
    let mut specs = select_checks(default_suite(&[Norm::euclidean()], 1e-3), &["eq4"]).unwrap();
    specs[0].eps_grid = vec![0.5, 1.5];
    let r = run_suite(&specs, &quick()).unwrap();
    let c = &r.checks[0];
    assert_eq!(c.status, Status::Pass);
    assert!(c.notes.iter().any(|n| n.contains("eps=1.5")), "{:?}", c.notes);
}

#[test]
fn non_applicable_checks_are_skipped() {
    let specs = select_checks(default_suite(&[linf()], 1e-3), &["euclidean-coincidence", "area-additivity"]).unwrap();
    let r = run_suite(&specs, &quick()).unwrap();
    for c in &r.checks {
        assert_eq!(c.status, Status::Skipped, "{c:?}");
        assert!(c.worst_margin.is_infinite() && !c.notes.is_empty());
    }
    let back = VerificationReport::from_json(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
}

/// A deliberately false claim fails, and its witness replays to the margin.
#[test]
fn failing_comparison_replays_from_witness() {
    let norm = Norm::lp(3.0).unwrap();
    let cfg = ModulusConfig::with_grid(256, 4);
    let sym = Sym {
        relation: "delta(eps) <= 0".into(),
        eps: 1.0,
        lhs: vec![SymTerm::M { kind: ModulusKind::Delta, eps: 1.0, coef: 1.0 }],
        rhs: vec![SymTerm::C { value: 0.0, label: "0".into() }],
    };
    let mut needs = BTreeMap::new();
    register(&mut needs, 0, std::slice::from_ref(&sym));
    let table = Table::build(std::slice::from_ref(&norm), needs, &cfg);
    let (mut outcomes, mut notes) = (Vec::new(), Vec::new());
    evaluate_syms(&table, 0, &norm, &[sym], 1e-3, &mut outcomes, &mut notes);
    let rec = summarize("probe", CheckKind::Inequality, outcomes, notes, false, None);
    assert_eq!(rec.status, Status::Fail);
    let w = rec.witness.as_ref().unwrap();
    assert!((w.replay_margin(&cfg).unwrap() - rec.worst_margin).abs() <= 1e-9);
    let back = VerificationReport::from_json(
        &VerificationReport { suite: run_suite(&[], &quick()).unwrap().suite, checks: vec![rec.clone()] }
            .to_json()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(back.checks[0], rec);
}

#[test]
fn sampled_witnesses_replay() {
    let specs = select_checks(
        default_suite(&[Norm::regular_polygon(6).unwrap(), Norm::lp(1.5).unwrap()], 1e-3),
        &["projection-bound", "cathetus-identity", "lambda-range", "lambda-convexity", "quasi-orthogonality"],
    )
    .unwrap();
    let cfg = quick();
    let r = run_suite(&specs, &cfg).unwrap();
    assert!(!r.has_failures(), "{:#?}", r.checks.iter().filter(|c| c.status == Status::Fail).collect::<Vec<_>>());
    for c in &r.checks {
        let m = c.witness.as_ref().unwrap().replay_margin(&cfg.modulus).unwrap();
        assert!((m - c.worst_margin).abs() <= 1e-9, "{} {m} {}", c.id, c.worst_margin);
    }
}

#[test]
fn area_additivity_with_reference() {
    let specs =
        select_checks(default_suite(&[Norm::euclidean(), Norm::lp(3.0).unwrap()], 1e-3), &["area-additivity"]).unwrap();
    let r = run_suite(&specs, &quick()).unwrap();
    let c = &r.checks[0];
    assert_eq!(c.status, Status::Pass, "{c:?}");
    assert!(c.worst_margin > 0.0);
}

#[test]
fn reports_are_deterministic_apart_from_runtime() {
    let specs = select_checks(default_suite(&[Norm::lp(3.0).unwrap()], 1e-3), &["eq3", "lambda-convexity"]).unwrap();
    let strip = |mut r: VerificationReport| {
        r.checks.iter_mut().for_each(|c| c.runtime_ms = None);
        r.to_json().unwrap()
    };
    assert_eq!(strip(run_suite(&specs, &quick()).unwrap()), strip(run_suite(&specs, &quick()).unwrap()));
}

#[test]
fn gamma_monotonicity() {
    let cfg = ModulusConfig::with_grid(256, 4);
    assert_eq!(gamma_monotonicity_check(&Norm::euclidean(), &[0.5], &cfg).unwrap(), f64::INFINITY);
    let grid = [0.25, 0.5, 1.0];
    let m = gamma_monotonicity_check(&Norm::euclidean(), &grid, &cfg).unwrap();
    assert!((m - (0.25 - 0.0625)).abs() < 1e-5, "{m}");
    assert!(gamma_monotonicity_check(&linf(), &default_grid(0.0, 2.0, 9), &cfg).unwrap() >= -1e-3);
}
