use std::cmp::Ordering;

use crate::recovery::AmopConfig;
use crate::scalar::{RealScalar, Scalar};

/// Proxy magnitudes sorted in nonincreasing order, with the permutation
/// back to original coordinates. Ties keep ascending coordinate order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedProxy<R> {
    pub magnitudes: Vec<R>,
    pub perm: Vec<usize>,
}

impl<R: RealScalar> RankedProxy<R> {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// Number of strictly positive magnitudes.
    pub fn nonzero_len(&self) -> usize {
        self.magnitudes.iter().take_while(|&&m| m > R::zero()).count()
    }
}

/// Sorts `|u|` in descending order.
pub fn rank_proxy<S: Scalar>(u: &[S]) -> RankedProxy<S::Real> {
    rank_proxy_masked(u, |_| false)
}

/// Like [`rank_proxy`] but leaves out every coordinate for which `excluded`
/// returns true.
pub fn rank_proxy_masked<S: Scalar>(u: &[S], excluded: impl Fn(usize) -> bool) -> RankedProxy<S::Real> {
    let mut entries: Vec<(S::Real, usize)> = u
        .iter()
        .enumerate()
        .filter(|&(i, _)| !excluded(i))
        .map(|(i, z)| (z.modulus(), i))
        .collect();
    entries.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
    let (magnitudes, perm) = entries.into_iter().unzip();
    RankedProxy { magnitudes, perm }
}

/// Outcome of the adaptive batch-size rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSelection {
    /// Number of leading ranked coordinates to take.
    pub k: usize,
    /// Value of the threshold scale when the rule stopped.
    pub beta: f64,
    /// True when `k` sits at a relative drop exceeding `T * beta` and was
    /// neither forced by the cap fallback nor clipped by the budget.
    pub at_drop: bool,
}

/// Smallest 1-based `i` whose relative drop
/// `(mag[i-1] - mag[i]) / mag[i-1]` exceeds `threshold`.
fn first_drop<R: RealScalar>(mags: &[R], threshold: R) -> Option<usize> {
    (1..mags.len()).find(|&i| {
        let prev = mags[i - 1];
        prev > R::zero() && (prev - mags[i]) / prev > threshold
    })
}

/// Chooses how many of the leading ranked proxy coordinates to admit.
///
/// Starting at `beta = 1`, `k` is the position of the first relative drop
/// larger than `T * beta`. A `k` within the cap is accepted at once;
/// otherwise `beta` decays geometrically. Once `beta` is below the floor the
/// cap is used (or a single coordinate if no drop was ever found). The
/// result is finally clipped to `remaining_budget`.
pub fn select_k<R: RealScalar>(ranked: &RankedProxy<R>, cfg: &AmopConfig, remaining_budget: usize) -> KSelection {
    let t = R::lit(cfg.threshold);
    let mut beta = 1.0f64;
    let (k, at_drop) = loop {
        let found = first_drop(&ranked.magnitudes, t * R::lit(beta));
        match found {
            Some(k) if k <= cfg.cap_k => break (k, true),
            _ => {}
        }
        if beta < cfg.beta_floor {
            break (found.map_or(1, |k| k.min(cfg.cap_k)), false);
        }
        beta *= cfg.beta_decay;
    };
    let budget = remaining_budget.max(1);
    KSelection {
        k: k.min(budget),
        beta,
        at_drop: at_drop && k <= budget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ranked(m: &[f64]) -> RankedProxy<f64> {
        RankedProxy {
            magnitudes: m.to_vec(),
            perm: (0..m.len()).collect(),
        }
    }

    fn cfg(t: f64, cap: usize) -> AmopConfig {
        AmopConfig {
            threshold: t,
            cap_k: cap,
            ..AmopConfig::default()
        }
    }

    #[test]
    fn rank_real_values() {
        let r = rank_proxy(&[3.0, -5.0, 4.0]);
        assert_eq!(r.magnitudes, vec![5.0, 4.0, 3.0]);
        assert_eq!(r.perm, vec![1, 2, 0]);
    }

    #[test]
    fn ties_keep_index_order() {
        let r = rank_proxy(&[2.0, -2.0, 2.0, 2.0]);
        assert_eq!(r.perm, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rank_complex_by_modulus() {
        let r = rank_proxy(&[Complex64::new(0.0, 1.0), Complex64::new(-2.0, 0.0)]);
        assert_eq!(r.magnitudes, vec![2.0, 1.0]);
        assert_eq!(r.perm, vec![1, 0]);
    }

    #[test]
    fn masked_coordinates_are_skipped() {
        let r = rank_proxy_masked(&[9.0, 1.0, 5.0], |i| i == 0);
        assert_eq!(r.perm, vec![2, 1]);
    }

    #[test]
    fn first_qualifying_drop_is_selected() {
        let s = select_k(&ranked(&[10.0, 9.0, 4.0, 3.0, 1.0]), &cfg(0.3, 5), 100);
        assert_eq!(s.k, 2);
        assert_eq!(s.beta, 1.0);
        assert!(s.at_drop);
    }

    #[test]
    fn threshold_decays_until_within_cap() {
        let s = select_k(&ranked(&[10.0, 9.0, 8.0, 7.0, 1.0]), &cfg(0.3, 2), 100);
        assert_eq!(s.k, 2);
        assert!((s.beta - 0.9f64.powi(10)).abs() < 1e-12);
        assert!((s.beta - 0.349).abs() < 1e-3);
        assert!(s.at_drop);
    }

    #[test]
    fn constant_sequence_falls_back_to_one() {
        for t in [0.05, 0.3, 0.9] {
            let s = select_k(&ranked(&[5.0; 4]), &cfg(t, 4), 100);
            assert_eq!(s.k, 1);
            assert!(!s.at_drop);
            assert!(s.beta < 0.1);
        }
    }

    #[test]
    fn budget_clips_selection() {
        let s = select_k(&ranked(&[1.0, 1.0, 1.0, 0.0]), &cfg(0.3, 5), 2);
        assert_eq!(s.k, 2);
        assert!(!s.at_drop);
    }

    #[test]
    fn drop_to_zero_counts() {
        let s = select_k(&ranked(&[1.0, 1.0, 1.0, 0.0, 0.0]), &cfg(0.3, 5), 10);
        assert_eq!(s.k, 3);
    }
}
