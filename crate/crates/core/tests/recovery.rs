use amop::scalar::norm;
use amop::{
    amop, cosamp, dense_lstsq, exact_recovery, gen_gaussian, gen_sparse_signal, measure, omp, p_min, AmopConfig,
    Complex64, DenseMatrix, HaltReason, RecoveryResult, Scalar, SignalModel,
};

fn check_pursuit_invariants<S: Scalar>(res: &RecoveryResult<S>) {
    for w in res.residual_history.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "residual grew: {:?}", res.residual_history);
    }
    let mut seen = std::collections::HashSet::new();
    for step in &res.steps {
        assert!(!step.selected.is_empty(), "support did not grow");
        for &i in &step.selected {
            assert!(seen.insert(i), "index {i} selected twice");
        }
    }
    assert_eq!(seen.len(), res.support.len());
    assert_eq!(res.iterations, res.residual_history.len());
}

#[test]
fn amop_recovers_flat_signals_from_gaussian_measurements() {
    let mut ok = 0;
    for seed in 0..100 {
        let a = gen_gaussian::<f64>(64, 128, seed).unwrap();
        let x = gen_sparse_signal::<f64>(128, 4, SignalModel::Flat, 10_000 + seed).unwrap();
        let y = measure(&a, &x).unwrap();
        let cfg = AmopConfig {
            threshold: 0.3,
            halt_eps: 1e-6,
            cap_k: 16,
            ..AmopConfig::default()
        };
        let res = amop(&a, &y, &cfg).unwrap();
        check_pursuit_invariants(&res);
        if exact_recovery(&x, &res.estimate, 1e-6).unwrap() {
            ok += 1;
        }
    }
    assert!(ok >= 90, "{ok}/100");
}

#[test]
fn cosamp_recovers_flat_signals_from_gaussian_measurements() {
    let mut ok = 0;
    for seed in 0..100 {
        let a = gen_gaussian::<f64>(64, 128, seed).unwrap();
        let x = gen_sparse_signal::<f64>(128, 4, SignalModel::Flat, 10_000 + seed).unwrap();
        let y = measure(&a, &x).unwrap();
        let res = cosamp(&a, &y, 4, 1e-6, 64).unwrap();
        assert!(res.support.len() <= 4);
        if exact_recovery(&x, &res.estimate, 1e-6).unwrap() {
            ok += 1;
        }
    }
    assert!(ok >= 85, "{ok}/100");
}

#[test]
fn successful_noiseless_recoveries_are_far_inside_tolerance() {
    for seed in 0..30 {
        let a = gen_gaussian::<Complex64>(64, 128, seed).unwrap();
        let x = gen_sparse_signal::<Complex64>(128, 6, SignalModel::Flat, seed).unwrap();
        let y = measure(&a, &x).unwrap();
        let res = amop(&a, &y, &AmopConfig::for_measurements(64, f64::INFINITY)).unwrap();
        let err = amop::relative_error(&x, &res.estimate).unwrap();
        if err < 1e-6 {
            assert!(err < 1e-10, "seed {seed}: {err}");
        }
    }
}

/// Smallest residual over every `s`-column least-squares fit.
fn best_sparse_residual(a: &DenseMatrix<f64>, y: &[f64], s: usize) -> f64 {
    fn walk(a: &DenseMatrix<f64>, y: &[f64], s: usize, start: usize, chosen: &mut Vec<usize>, best: &mut f64) {
        if chosen.len() == s {
            let sub = a.select_columns(chosen).unwrap();
            if let Ok(coef) = dense_lstsq(&sub, y) {
                let fit = sub.matvec(&coef).unwrap();
                let r: Vec<f64> = y.iter().zip(fit.iter()).map(|(p, q)| p - q).collect();
                *best = best.min(norm(&r));
            }
            return;
        }
        for j in start..a.cols() {
            chosen.push(j);
            walk(a, y, s, j + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    walk(a, y, s, 0, &mut Vec::new(), &mut best);
    best
}

#[test]
fn cosamp_never_beats_exhaustive_search() {
    let mut converged = 0;
    for seed in 0..40 {
        let a = gen_gaussian::<f64>(8, 12, seed).unwrap();
        let y: Vec<f64> = if seed % 2 == 0 {
            let x = gen_sparse_signal::<f64>(12, 2, SignalModel::Flat, seed).unwrap();
            measure(&a, &x).unwrap().into_vec()
        } else {
            (0..8).map(|i| ((i * 7 + seed as usize) % 5) as f64 - 2.0).collect()
        };
        let best = best_sparse_residual(&a, &y, 2);
        let res = cosamp(&a, &y, 2, 1e-9, 50).unwrap();
        let fit = measure(&a, &res.estimate).unwrap();
        let r: Vec<f64> = y.iter().zip(fit.iter()).map(|(p, q)| p - q).collect();
        let got = norm(&r);
        assert!(got >= best - 1e-9, "seed {seed}: {got} < {best}");
        if res.halt_reason == HaltReason::Converged {
            converged += 1;
            assert!((got - best).abs() <= 1e-8 * norm(&y).max(1.0), "seed {seed}");
        }
    }
    assert!(converged > 0);
}

#[test]
fn pinned_amop_is_omp() {
    for seed in 0..50 {
        let a = gen_gaussian::<f64>(40, 100, seed).unwrap();
        let x = gen_sparse_signal::<f64>(100, 6, SignalModel::Exponential { alpha: 0.8 }, seed).unwrap();
        let y = measure(&a, &x).unwrap();
        let cfg = AmopConfig {
            fixed_k: Some(1),
            halt_eps: 1e-8,
            max_iters: 40,
            ..AmopConfig::default()
        };
        let pinned = amop(&a, &y, &cfg).unwrap();
        let plain = omp(&a, &y, 1e-8, 40).unwrap();
        assert_eq!(pinned.support, plain.support);
        assert_eq!(pinned.estimate, plain.estimate);
        assert_eq!(pinned.residual_history, plain.residual_history);
        check_pursuit_invariants(&plain);
    }
}

#[test]
fn amop_is_scale_invariant() {
    for seed in 0..50 {
        let a = gen_gaussian::<Complex64>(48, 96, seed).unwrap();
        let x = gen_sparse_signal::<Complex64>(96, 5, SignalModel::Flat, seed + 1).unwrap();
        let y = measure(&a, &x).unwrap();
        let cfg = AmopConfig::for_measurements(48, f64::INFINITY);
        let base = amop(&a, &y, &cfg).unwrap();
        for c in [-1.0, 3.0, 1e3] {
            let cy: Vec<Complex64> = y.iter().map(|v| v * c).collect();
            let scaled = amop(&a, &cy, &cfg).unwrap();
            assert_eq!(scaled.support, base.support, "seed {seed}, c {c}");
            let want = base.estimate.scaled(Complex64::new(c, 0.0));
            for ((_, g), (_, w)) in scaled.estimate.iter().zip(want.iter()) {
                assert!((g - w).norm() <= 1e-9 * c.abs());
            }
        }
    }
}

#[test]
fn adaptive_steps_capture_the_guaranteed_energy() {
    let mut checked = 0;
    for seed in 0..60 {
        let a = gen_gaussian::<f64>(80, 200, seed).unwrap();
        let model = if seed % 2 == 0 {
            SignalModel::Flat
        } else {
            SignalModel::Polynomial { p: 0.7 }
        };
        let x = gen_sparse_signal::<f64>(200, 12, model, seed).unwrap();
        let y = measure(&a, &x).unwrap();
        let cfg = AmopConfig::for_measurements(80, f64::INFINITY);
        let res = amop(&a, &y, &cfg).unwrap();
        check_pursuit_invariants(&res);
        for step in res.steps.iter().filter(|s| s.at_drop) {
            let beta = step.beta.unwrap();
            let bound = p_min(step.nonzero_ranked, cfg.threshold * beta);
            assert!(step.energy_fraction >= bound - 1e-12, "seed {seed}: {step:?}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn support_never_exceeds_rows_minus_one() {
    let a = gen_gaussian::<f64>(10, 40, 2).unwrap();
    let x = gen_sparse_signal::<f64>(40, 20, SignalModel::Flat, 2).unwrap();
    let y = measure(&a, &x).unwrap();
    let cfg = AmopConfig {
        cap_k: 40,
        halt_eps: 1e-12,
        ..AmopConfig::default()
    };
    let res = amop(&a, &y, &cfg).unwrap();
    assert!(res.support.len() <= 9);
    assert_eq!(res.halt_reason, HaltReason::SupportFull);
    check_pursuit_invariants(&res);
}

#[test]
fn halting_level_controls_iterations() {
    let a = gen_gaussian::<f64>(60, 120, 5).unwrap();
    let x = gen_sparse_signal::<f64>(120, 10, SignalModel::Exponential { alpha: 0.6 }, 5).unwrap();
    let y = measure(&a, &x).unwrap();
    let loose = omp(&a, &y, 0.5, 60).unwrap();
    let tight = omp(&a, &y, 1e-8, 60).unwrap();
    assert!(loose.iterations < tight.iterations);
    assert!(*loose.residual_history.last().unwrap() < 0.5);
    assert_eq!(loose.halt_reason, HaltReason::Converged);
}

#[test]
fn single_precision_pursuit() {
    let a64 = gen_gaussian::<f64>(50, 100, 1).unwrap();
    let a = DenseMatrix::<f32>::from_col_major(50, 100, a64.as_col_major().iter().map(|&v| v as f32).collect())
        .unwrap();
    let x = gen_sparse_signal::<f32>(100, 4, SignalModel::Flat, 1).unwrap();
    let y = measure(&a, &x).unwrap();
    let cfg = AmopConfig {
        halt_eps: 1e-4,
        lin_dep_tol: 1e-5,
        ..AmopConfig::default()
    };
    let res = amop(&a, &y, &cfg).unwrap();
    assert!(amop::relative_error(&x, &res.estimate).unwrap() < 1e-4);
}
