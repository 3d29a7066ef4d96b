use amop::scalar::{dot_conj, norm};
use amop::{
    gen_gaussian, gen_sparse_signal, measure, p_min, rank_proxy, select_k, support_metrics, AmopConfig, Complex64,
    DenseMatrix, IncrementalQR, RankedProxy, Scalar, SignalModel,
};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #[test]
    fn conjugation_is_involutive(z in complex()) {
        prop_assert_eq!(z.conj().conj(), z);
        prop_assert!(z.abs_sqr() >= 0.0);
        prop_assert!(((z * z.conj()).re - z.abs_sqr()).abs() <= 1e-9 * z.abs_sqr().max(1.0));
    }

    #[test]
    fn ranked_proxy_is_a_sorted_permutation(u in prop::collection::vec(complex(), 1..40)) {
        let r = rank_proxy(&u);
        prop_assert!(r.magnitudes.windows(2).all(|w| w[0] >= w[1]));
        let mut perm = r.perm.clone();
        perm.sort_unstable();
        prop_assert_eq!(perm, (0..u.len()).collect::<Vec<_>>());
        for (m, &i) in r.magnitudes.iter().zip(&r.perm) {
            prop_assert_eq!(*m, u[i].modulus());
        }
    }

    #[test]
    fn selection_stays_within_cap_and_budget(
        mut mags in prop::collection::vec(0.0..1.0f64, 2..40),
        t in 0.01..0.99f64,
        cap in 1usize..20,
        budget in 1usize..20,
    ) {
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        mags[0] = 1.0;
        let r = RankedProxy { perm: (0..mags.len()).collect(), magnitudes: mags.clone() };
        let cfg = AmopConfig { threshold: t, cap_k: cap, ..AmopConfig::default() };
        let sel = select_k(&r, &cfg, budget);
        prop_assert!(sel.k >= 1 && sel.k <= cap && sel.k <= budget);
        if sel.at_drop {
            let thr = t * sel.beta;
            let drop = |i: usize| (mags[i - 1] - mags[i]) / mags[i - 1];
            prop_assert!(drop(sel.k) > thr);
            prop_assert!((1..sel.k).all(|i| drop(i) <= thr));
        }
    }

    #[test]
    fn p_min_is_monotone(k in 1usize..500, t in 0.01..0.98f64, dt in 0.001..0.01f64) {
        prop_assert!(p_min(k + 1, t) < p_min(k, t));
        prop_assert!(p_min(k + 1, t + dt) > p_min(k + 1, t));
        prop_assert!(p_min(k, t) > 0.0 && p_min(k, t) <= 1.0);
    }

    #[test]
    fn support_metric_counts_are_consistent(
        truth in prop::collection::btree_set(0usize..100, 0..15),
        est in prop::collection::btree_set(0usize..100, 0..15),
        tol in 0usize..4,
    ) {
        let truth: Vec<usize> = truth.into_iter().collect();
        let est: Vec<usize> = est.into_iter().collect();
        let m = support_metrics(&truth, &est, None, tol).unwrap();
        prop_assert_eq!(m.hits + m.misses, truth.len());
        prop_assert_eq!(m.hits + m.false_alarms, est.len());
        let wider = support_metrics(&truth, &est, None, tol + 1).unwrap();
        prop_assert!(wider.hits >= m.hits);
    }

    #[test]
    fn measurement_is_linear(seed in 0u64..1000, c in -10.0..10.0f64) {
        prop_assume!(c != 0.0);
        let a = gen_gaussian::<f64>(12, 30, seed).unwrap();
        let x = gen_sparse_signal::<f64>(30, 5, SignalModel::Flat, seed).unwrap();
        let y = measure(&a, &x).unwrap();
        let cy = measure(&a, &x.scaled(c)).unwrap();
        for (p, q) in y.iter().zip(cy.iter()) {
            prop_assert!((p * c - q).abs() <= 1e-12 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn incremental_factorization_invariants(seed in 0u64..10_000, k in 1usize..12) {
        let a = gen_gaussian::<Complex64>(24, 30, seed).unwrap();
        let mut qr = IncrementalQR::new(24);
        let idx: Vec<usize> = (0..k).map(|i| (i * 7 + seed as usize) % 30).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        qr.extend(&a, &idx).unwrap();
        prop_assert!(qr.orthogonality_error() <= 1e-10);
        for (pos, &j) in qr.selected().iter().enumerate() {
            let mut recon = vec![Complex64::new(0.0, 0.0); 24];
            for i in 0..=pos {
                let r = qr.r_entry(i, pos);
                for (acc, q) in recon.iter_mut().zip(qr.q_column(i)) {
                    *acc += q * r;
                }
            }
            let diff: Vec<Complex64> = recon.iter().zip(a.column(j)).map(|(p, q)| p - q).collect();
            prop_assert!(norm(&diff) <= 1e-10 * norm(a.column(j)));
            prop_assert!(qr.r_entry(pos, pos).norm() > qr.lin_dep_tol());
        }
    }

    #[test]
    fn adjoint_satisfies_inner_product_identity(seed in 0u64..1000) {
        let a = gen_gaussian::<Complex64>(6, 9, seed).unwrap();
        let x: Vec<Complex64> = (0..9).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let r: Vec<Complex64> = (0..6).map(|i| Complex64::new(1.0, -(i as f64))).collect();
        let lhs = dot_conj(&a.matvec(&x).unwrap(), &r);
        let rhs = dot_conj(&x, &a.adjoint_matvec(&r).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
        let ah = a.adjoint();
        let back: DenseMatrix<Complex64> = ah.adjoint();
        prop_assert_eq!(back, a);
    }
}
