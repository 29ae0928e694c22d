use conclab_core::distributions::AnalyticDistribution;
use conclab_core::verifier::{fit_log_log, rate_curves, rate_regression, CurvePoint};
use conclab_core::{run_bound_check, BoundId, Error, MonteCarloPlan, ReportKind, Scenario, Verifier};

fn plan(r: usize, n: usize) -> MonteCarloPlan {
    MonteCarloPlan::new(r, 77, n).unwrap()
}

/// P{|N(0,1)| >= x} by the continued fraction of the Mills ratio, independent of erfc.
fn two_sided_gaussian_tail(x: f64) -> f64 {
    let mut cf = 0.0;
    for k in (1..200).rev() {
        cf = k as f64 / (x + cf);
    }
    2.0 * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt() / (x + cf)
}

#[test]
fn linear_tail_example() {
    let r = run_bound_check(BoundId::Prop52Tail, &plan(10, 100), &Scenario::gaussian_product()).unwrap();
    let expect = two_sided_gaussian_tail(2.0);
    assert!((r[0].lhs_estimate - expect).abs() < 1e-12, "{} vs {expect}", r[0].lhs_estimate);
    assert!((r[0].rhs_value.unwrap() - 0.2706705664732254).abs() < 1e-15);
    assert!(r[0].pass);
    assert_eq!(r[0].slack_sigmas, 0.0);
}

#[test]
fn printed_linear_tail_constant_fails_at_moderate_n() {
    // exact lhs 2 PhiBar(2.83) ~ 4.7e-3 against 6 e^{-40}
    let r = run_bound_check(BoundId::Prop23Tail, &plan(10, 200), &Scenario::gaussian_product()).unwrap();
    assert!((r[0].lhs_estimate - two_sided_gaussian_tail(0.2 * 200f64.sqrt())).abs() < 1e-12);
    assert!(r[0].rhs_value.unwrap() < 1e-16);
    assert!(!r[0].pass);
    let sqrt_form = r[0].metadata["rhs_sqrt_n_scaling"].as_f64().unwrap();
    assert!(r[0].lhs_estimate <= sqrt_form);
}

#[test]
fn beta_and_mean_bound_values() {
    let r = run_bound_check(BoundId::Thm12Mean, &plan(200, 200), &Scenario::gaussian_product()).unwrap();
    let beta = r[0].metadata["beta"].as_f64().unwrap();
    assert!((beta - 0.092674).abs() < 1e-5);
    assert!((r[0].rhs_value.unwrap() - 0.6261).abs() < 1e-3);
    assert!(r[0].pass);
}

#[test]
fn determinism_is_bitwise() {
    let s = Scenario::gaussian_product();
    for b in [BoundId::Eq14Sandwich, BoundId::Prop51Ent, BoundId::Cor32] {
        let a = serde_json::to_string(&run_bound_check(b, &plan(64, 40), &s).unwrap()).unwrap();
        let c = serde_json::to_string(&run_bound_check(b, &plan(64, 40), &s).unwrap()).unwrap();
        assert_eq!(a, c);
    }
    let other = MonteCarloPlan::new(64, 78, 40).unwrap();
    let a = run_bound_check(BoundId::Cor32, &plan(64, 40), &s).unwrap();
    let c = run_bound_check(BoundId::Cor32, &other, &s).unwrap();
    assert_ne!(a[0].lhs_estimate, c[0].lhs_estimate);
}

#[test]
fn scale_equivariance() {
    let lambda = 2.5;
    let base = Scenario::gaussian_product();
    let scaled = base.scaled(lambda).unwrap();
    for b in [BoundId::Eq14Sandwich, BoundId::Cor32, BoundId::Cor62] {
        let r0 = run_bound_check(b, &plan(300, 50), &base).unwrap();
        let r1 = run_bound_check(b, &plan(300, 50), &scaled).unwrap();
        for (x, y) in r0.iter().zip(&r1) {
            assert_eq!(x.pass, y.pass, "{b}");
            assert!((y.lhs_estimate - lambda * x.lhs_estimate).abs() < 1e-9 * (1.0 + x.lhs_estimate.abs()), "{b}");
            assert!((y.rhs_value.unwrap() - lambda * x.rhs_value.unwrap()).abs() < 1e-9, "{b}");
        }
    }
}

#[test]
fn rate_entry_on_iid_product() {
    let s = Scenario::gaussian_product().with_sweep(vec![25, 50, 100, 200]);
    let r = run_bound_check(BoundId::Thm11Rate, &plan(200, 25), &s).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].kind, ReportKind::Rate);
    assert!(r[0].rhs_value.is_none());
    // E W1 of i.i.d. samples decays like n^{-1/2}
    assert!((r[0].lhs_estimate + 0.5).abs() < 0.1, "{}", r[0].lhs_estimate);
    assert!(r[0].pass);
    let pointwise = rate_curves(BoundId::Prop63Mean, &plan(10, 25), &s).unwrap();
    // exact binomial mean absolute deviation, also n^{-1/2}
    assert!((pointwise[0].1.fit.slope + 0.5).abs() < 0.05);
}

#[test]
fn synthetic_two_thirds_regression() {
    let pts: Vec<CurvePoint> = [32usize, 64, 128, 256]
        .iter()
        .map(|&n| CurvePoint { n, lhs: 3.0 * (n as f64).powf(-2.0 / 3.0), stderr: 0.0, shape: (n as f64).powf(-2.0 / 3.0) })
        .collect();
    let fit = rate_regression(&pts, None, false).unwrap();
    assert!((fit.fit.slope + 2.0 / 3.0).abs() < 1e-12);
    assert!(fit.pass);
    assert!(matches!(fit_log_log(&[1, 2, 3], &[1.0, -1.0, 2.0]), Err(Error::DegenerateRegression(_))));
}

#[test]
fn example_two_is_order_one() {
    let v = Verifier::new(Scenario::gaussian_product().with_sweep(vec![16, 64, 256]), plan(4000, 16)).unwrap();
    let curves = v.rate_curves(BoundId::Ex2).unwrap();
    for p in &curves[0].1.points {
        // E max(U, 1-U) = 3/4
        assert!((p.lhs - 0.75).abs() < 4.0 * p.stderr + 1e-9);
    }
    assert!(curves[0].1.pass);
}

#[test]
fn example_one_kolmogorov_decays_like_one_over_n() {
    let r = run_bound_check(BoundId::Ex1, &plan(300, 64), &Scenario::example1()).unwrap();
    let k = r.iter().find(|x| x.variant == "kolmogorov").unwrap();
    let w = r.iter().find(|x| x.variant == "w1").unwrap();
    assert!(k.lhs_estimate <= -0.9 && k.pass);
    assert!(w.pass);
    for p in w.metadata["points"].as_array().unwrap() {
        assert!((p["lhs"].as_f64().unwrap() - 1.0 / 3.0).abs() < 0.01);
    }
}

#[test]
fn lsi_entries_refuse_poincare_only_scenarios() {
    let s = Scenario::iid(AnalyticDistribution::two_sided_exponential()).unwrap();
    for b in BoundId::ALL {
        if b.requirement() == conclab_core::verifier::Requirement::LogSobolev && !b.uses_sweep() {
            assert_eq!(run_bound_check(b, &plan(4, 8), &s).unwrap_err(), Error::RequiresLsi(b.as_str().into()), "{b}");
        }
    }
}

#[test]
fn every_inequality_entry_runs_on_the_gaussian_product() {
    let v = Verifier::new(Scenario::gaussian_product(), plan(400, 60)).unwrap();
    for b in BoundId::ALL.into_iter().filter(|b| !b.uses_sweep()) {
        let reports = v.run(b).unwrap();
        assert!(!reports.is_empty());
        for r in reports {
            assert!(r.lhs_stderr >= 0.0 && r.lhs_estimate.is_finite(), "{b}");
            if b != BoundId::Prop23Tail {
                assert!(r.acceptable(), "{b} {r:?}");
            }
        }
    }
}
