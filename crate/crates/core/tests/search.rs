use bnf_core::counterexample::{example_dataset, EXAMPLE_W0};
use bnf_core::falsifier::{
    run_trial, search_fixed, violation_gradient_norms, LemmaOutcome, Witness, VIOLATION_SLACK,
};
use bnf_core::objective::{standard_cost_gradient, FD_REL_STEP};
use bnf_core::{
    bn_cost, check_inequality, check_lemma_on_instance, finite_diff_gradient, least_squares_fit, random_instance,
    search, BNParams, BnObjective, InstanceSpec, SearchConfig, TargetModel,
};

fn config(seed: u64) -> SearchConfig {
    SearchConfig { master_seed: seed, ..SearchConfig::default() }
}

#[test]
fn example_instance_is_a_violation() {
    let s = search_fixed(&SearchConfig { trials: 1, ..config(0) }, &example_dataset(), &EXAMPLE_W0).unwrap();
    assert_eq!((s.trials, s.violated, s.held, s.skipped), (1, 1, 0, 0));
    assert!(s.violations[0].rhs.abs() <= 1e-12);
}

#[test]
fn violations_revalidate_from_stored_fields() {
    let cfg = config(1);
    let s = search(&cfg, &InstanceSpec::default()).unwrap();
    assert_eq!(s.violated + s.held + s.skipped, 200);
    assert!(s.violated >= 1);
    for v in &s.violations {
        let c = check_inequality(&v.w0, &v.w_star, &v.w_hat_star).unwrap();
        assert!(c.lhs > c.rhs + VIOLATION_SLACK);
        assert_eq!((c.lhs, c.rhs), (v.lhs, v.rhs));
        let (bn, std) = violation_gradient_norms(v).unwrap();
        assert!(bn <= cfg.grad_tol, "BN gradient {bn:e} at stored optimum");
        assert!(std <= 1e-9, "standard gradient {std:e} at stored W*");
        assert!(v.precondition_inner > 0.0);
        // the stored instance regenerates the stored dataset
        let spec = v.instance.as_ref().unwrap();
        let (data, w0) = random_instance(spec).unwrap();
        assert_eq!(data, v.dataset);
        assert_eq!(w0, v.w0);
    }
}

#[test]
fn forced_violation_when_initialized_at_standard_optimum() {
    // W0 = W* makes the right-hand side zero; any non-critical W* then breaks
    // the inequality as soon as a nearest BN optimum exists.
    let cfg = config(2);
    let template = InstanceSpec::default();
    let mut qualifying = 0;
    for trial in 0..200 {
        let rec = run_trial(&cfg, &template, trial);
        let Some(data) = rec.dataset else { continue };
        let w_star = least_squares_fit(&data).unwrap();
        let obj = BnObjective::new(&data, &BNParams::unit(1)).unwrap();
        let Ok(g) = obj.gradient(&w_star) else { continue };
        if g.norm() <= cfg.grad_tol {
            continue;
        }
        // independent criticality check by finite differences
        let fd = finite_diff_gradient(|w| bn_cost(w, &data, &BNParams::unit(1)), &w_star, FD_REL_STEP).unwrap();
        assert!(fd.norm() > 0.5 * g.norm());

        match check_lemma_on_instance(&data, &w_star, &cfg, trial as u64) {
            LemmaOutcome::Violation(Witness { rhs, .. }) => {
                qualifying += 1;
                assert!(rhs.abs() <= 1e-9 * w_star.iter().map(|v| v * v).sum::<f64>());
            }
            LemmaOutcome::Skipped { reason } => {
                // only legitimate when no BN ray has a positive projection
                assert_eq!(reason, bnf_core::falsifier::SkipReason::NoAttainedOptimum, "trial {trial}");
            }
            LemmaOutcome::Holds(w) => panic!("trial {trial}: forced violation did not occur: {w:?}"),
        }
    }
    assert!(qualifying > 100, "only {qualifying} qualifying instances");
}

#[test]
fn linear_targets_with_zero_noise() {
    // exact linear targets: W* reproduces the targets, so the BN cost is
    // critical at W* and initializing there holds
    let cfg = config(3);
    let mut checked = 0;
    for seed in 0..30 {
        let spec = InstanceSpec {
            p: 2,
            n: 5,
            target_model: TargetModel::LinearPlusNoise,
            noise_scale: 0.0,
            seed,
            ..InstanceSpec::default()
        };
        let (data, _) = random_instance(&spec).unwrap();
        let w_star = least_squares_fit(&data).unwrap();
        let fd = finite_diff_gradient(|w| bn_cost(w, &data, &BNParams::unit(1)), &w_star, FD_REL_STEP).unwrap();
        let critical = fd.norm() <= 1e-6;
        match check_lemma_on_instance(&data, &w_star, &cfg, seed) {
            LemmaOutcome::Holds(w) => {
                assert!(critical);
                assert!(w.lhs <= 1e-12);
                checked += 1;
            }
            LemmaOutcome::Violation(_) => assert!(!critical, "seed {seed}"),
            LemmaOutcome::Skipped { .. } => {}
        }
    }
    assert!(checked > 0);
}

#[test]
fn search_is_deterministic_across_thread_counts() {
    let cfg = SearchConfig { trials: 60, ..config(9) };
    let template = InstanceSpec { p: 3, n: 5, ..InstanceSpec::default() };
    let a = search(&cfg, &template).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = one.install(|| search(&cfg, &template).unwrap());
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let c = four.install(|| search(&cfg, &template).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);
    let other = search(&SearchConfig { master_seed: 10, ..cfg }, &template).unwrap();
    assert_ne!(a, other);
}

#[test]
fn higher_dimensional_search_is_sound() {
    let cfg = SearchConfig { trials: 40, ..config(4) };
    let s = search(&cfg, &InstanceSpec { p: 4, n: 9, input_range: (-2.0, 2.0), ..InstanceSpec::default() }).unwrap();
    for v in &s.violations {
        let (bn, std) = violation_gradient_norms(v).unwrap();
        assert!(bn <= cfg.grad_tol && std <= 1e-9);
        assert!(standard_cost_gradient(&v.w_star, &v.dataset).unwrap().norm() <= 1e-9);
    }
}
